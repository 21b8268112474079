//! Quadrature over the four-dimensional phase space with measure
//!
//! ```text
//! dμ(α, z) = (2j+1)/π² · d²α · d²z / (1 + |z|²)²
//!          = [d²α / π] · [(2j+1)/(4π) · sinθ dθ dφ],   z = tan(θ/2) e^{iφ}
//! ```
//!
//! The α plane is covered by a tensor Gauss-Legendre rule on a square box,
//! the sphere by Gauss-Legendre in `cosθ` times the periodic trapezoid rule
//! in `φ`.
//!
//! Integrands are Husimi densities `Ψ = |Σ_k a_k(α) b_k(z)|²` of amplitudes
//! that separate into a low-rank sum ([`SeparableAmplitude`]). The amplitude
//! on a block of sphere nodes times all α nodes is then one real matrix
//! product. Blocks are fixed-size and reduced in block order, so results do
//! not depend on the number of worker threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Spin;

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`. Nodes are
/// exactly antisymmetric, weights exactly symmetric.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Resolution, extent and convergence policy of the phase-space rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Half-width `R_α` of the square α box `[-R_α, R_α]²`.
    pub alpha_extent: f64,
    /// Gauss-Legendre points per α axis.
    pub alpha_points: usize,
    /// Gauss-Legendre points in `cosθ`.
    pub theta_points: usize,
    /// Trapezoid points in `φ`.
    pub phi_points: usize,
    /// Relative change between successive doublings that counts as converged.
    pub rel_tol: f64,
    /// How many times all point counts may be doubled.
    pub max_doublings: usize,
}

pub const DEFAULT_ALPHA_POINTS: usize = 48;
pub const DEFAULT_THETA_POINTS: usize = 64;
pub const DEFAULT_PHI_POINTS: usize = 64;
pub const DEFAULT_REL_TOL: f64 = 1e-3;

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            alpha_extent: 8.0,
            alpha_points: DEFAULT_ALPHA_POINTS,
            theta_points: DEFAULT_THETA_POINTS,
            phi_points: DEFAULT_PHI_POINTS,
            rel_tol: DEFAULT_REL_TOL,
            max_doublings: 3,
        }
    }
}

impl QuadratureSpec {
    /// Default resolution with the α box covering packets at `±alpha_center`:
    /// `R_α = max(|α_c| + 6, 8)`.
    pub fn centered(alpha_center: f64) -> Self {
        Self {
            alpha_extent: alpha_extent_for(alpha_center),
            ..Self::default()
        }
    }

    pub fn with_points(mut self, alpha_points: usize, theta_points: usize, phi_points: usize) -> Self {
        self.alpha_points = alpha_points;
        self.theta_points = theta_points;
        self.phi_points = phi_points;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_points < 8 || self.theta_points < 8 || self.phi_points < 8 {
            return Err(Error::Validation("quadrature point counts must be >= 8".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 0.1) {
            return Err(Error::Validation(format!(
                "rel_tol must lie in (0, 0.1], got {}",
                self.rel_tol
            )));
        }
        if !(self.alpha_extent.is_finite() && self.alpha_extent > 0.0) {
            return Err(Error::Validation("alpha_extent must be positive".into()));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            alpha_points: 2 * self.alpha_points,
            theta_points: 2 * self.theta_points,
            phi_points: 2 * self.phi_points,
            ..*self
        }
    }
}

pub fn alpha_extent_for(alpha_center: f64) -> f64 {
    (alpha_center.abs() + 6.0).max(8.0)
}

/// An amplitude `A(α, z) = Σ_k a_k(α) b_k(z)` whose squared modulus is a
/// Husimi density.
pub trait SeparableAmplitude: Sync {
    fn spin(&self) -> Spin;

    /// Number of separable terms.
    fn rank(&self) -> usize;

    /// Writes `a_k(α)` for `k < rank`.
    fn alpha_factors(&self, alpha: Complex64, out: &mut [Complex64]);

    /// Writes `b_k(z)` for `z = tan(θ/2) e^{iφ}`.
    fn sphere_factors(&self, theta: f64, phi: f64, out: &mut [Complex64]);

    /// True when `A(ᾱ, z̄) = conj A(α, z)`, which halves the α grid.
    fn conjugation_symmetric(&self) -> bool {
        false
    }
}

/// Densities below `e^{-700}` contribute nothing to `-Ψ ln Ψ`.
const LOG_DENSITY_FLOOR: f64 = -700.0;

/// Sphere nodes per reduction block.
const BLOCK: usize = 32;

/// `∫Ψ dμ` and `-∫Ψ lnΨ dμ` on one fixed rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSpaceIntegrals {
    pub norm: f64,
    pub entropy: f64,
}

fn alpha_nodes(spec: &QuadratureSpec, half_plane: bool) -> (Vec<Complex64>, Vec<f64>) {
    let (x, w) = gauss_legendre(spec.alpha_points);
    let r = spec.alpha_extent;
    let points: Vec<f64> = x.iter().map(|v| v * r).collect();
    let axis_w: Vec<f64> = w.iter().map(|v| v * r).collect();
    let mut alphas = Vec::new();
    let mut weights = Vec::new();
    for (yi, &y) in points.iter().enumerate() {
        let fold = if !half_plane {
            1.0
        } else if y > 0.0 {
            2.0
        } else if y == 0.0 {
            1.0
        } else {
            continue;
        };
        for (xi, &x) in points.iter().enumerate() {
            alphas.push(Complex64::new(x, y));
            weights.push(fold * axis_w[xi] * axis_w[yi] / PI);
        }
    }
    (alphas, weights)
}

fn sphere_nodes(spec: &QuadratureSpec, spin: Spin) -> Vec<(f64, f64, f64)> {
    let (x, w) = gauss_legendre(spec.theta_points);
    let dphi = 2.0 * PI / spec.phi_points as f64;
    let prefactor = (spin.multiplicity() as f64) / (4.0 * PI);
    let mut nodes = Vec::with_capacity(spec.theta_points * spec.phi_points);
    for (&c, &wc) in x.iter().zip(&w) {
        let theta = c.clamp(-1.0, 1.0).acos();
        for l in 0..spec.phi_points {
            nodes.push((theta, l as f64 * dphi, prefactor * wc * dphi));
        }
    }
    nodes
}

/// Integrates `Ψ` and `-Ψ lnΨ` on the fixed rule `spec`.
pub fn integrate_once<A: SeparableAmplitude + ?Sized>(amp: &A, spec: &QuadratureSpec) -> PhaseSpaceIntegrals {
    let rank = amp.rank();
    let (alphas, alpha_w) = alpha_nodes(spec, amp.conjugation_symmetric());
    let n_alpha = alphas.len();
    let sphere = sphere_nodes(spec, amp.spin());

    // right factor, (2r) × (2 n_alpha): rows k = [Re a_k | Im a_k], rows r+k = [Im a_k | -Re a_k]
    let cols = 2 * n_alpha;
    let mut right = vec![0.0; 2 * rank * cols];
    let mut buf = vec![Complex64::new(0.0, 0.0); rank];
    for (ia, &alpha) in alphas.iter().enumerate() {
        amp.alpha_factors(alpha, &mut buf);
        for (k, a) in buf.iter().enumerate() {
            right[k * cols + ia] = a.re;
            right[k * cols + n_alpha + ia] = a.im;
            right[(rank + k) * cols + ia] = a.im;
            right[(rank + k) * cols + n_alpha + ia] = -a.re;
        }
    }

    let blocks: Vec<&[(f64, f64, f64)]> = sphere.chunks(BLOCK).collect();
    let partials: Vec<(f64, f64)> = blocks
        .par_iter()
        .map(|block| {
            let rows = block.len();
            // left factor, rows × (2r): [Re b_k | -Im b_k]
            let mut left = vec![0.0; rows * 2 * rank];
            let mut b = vec![Complex64::new(0.0, 0.0); rank];
            for (iz, &(theta, phi, _)) in block.iter().enumerate() {
                amp.sphere_factors(theta, phi, &mut b);
                for (k, v) in b.iter().enumerate() {
                    left[iz * 2 * rank + k] = v.re;
                    left[iz * 2 * rank + rank + k] = -v.im;
                }
            }
            let mut out = vec![0.0; rows * cols];
            // SAFETY: all slices are sized for the stated row-major shapes.
            unsafe {
                matrixmultiply::dgemm(
                    rows,
                    2 * rank,
                    cols,
                    1.0,
                    left.as_ptr(),
                    (2 * rank) as isize,
                    1,
                    right.as_ptr(),
                    cols as isize,
                    1,
                    0.0,
                    out.as_mut_ptr(),
                    cols as isize,
                    1,
                );
            }
            let mut norm = 0.0;
            let mut entropy = 0.0;
            for (iz, &(_, _, wz)) in block.iter().enumerate() {
                let row = &out[iz * cols..(iz + 1) * cols];
                let (re, im) = row.split_at(n_alpha);
                let mut row_norm = 0.0;
                let mut row_entropy = 0.0;
                for ((&r, &i), &wa) in re.iter().zip(im).zip(&alpha_w) {
                    let psi = r * r + i * i;
                    row_norm += wa * psi;
                    if psi > 0.0 {
                        let ln_psi = psi.ln();
                        if ln_psi > LOG_DENSITY_FLOOR {
                            row_entropy -= wa * psi * ln_psi;
                        }
                    }
                }
                norm += wz * row_norm;
                entropy += wz * row_entropy;
            }
            (norm, entropy)
        })
        .collect();

    let (norm, entropy) = partials.iter().fold((0.0, 0.0), |(n, e), &(pn, pe)| (n + pn, e + pe));
    PhaseSpaceIntegrals { norm, entropy }
}

/// Which integral drives the refinement loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Norm,
    Entropy,
}

/// Outcome of [`integrate_converged`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergedIntegrals {
    pub norm: f64,
    pub entropy: f64,
    /// Relative change of the target between the last two rules.
    pub relative_change: f64,
    /// The finest rule evaluated.
    pub spec: QuadratureSpec,
}

/// Doubles every point count of `spec` until the target integral changes by
/// less than `rel_tol` relative to its latest value.
pub fn integrate_converged<A: SeparableAmplitude + ?Sized>(
    amp: &A,
    spec: &QuadratureSpec,
    target: Target,
) -> Result<ConvergedIntegrals> {
    spec.validate()?;
    let pick = |r: &PhaseSpaceIntegrals| match target {
        Target::Norm => r.norm,
        Target::Entropy => r.entropy,
    };
    let mut current_spec = *spec;
    let mut previous = integrate_once(amp, &current_spec);
    let mut last_change = f64::INFINITY;
    for _ in 0..spec.max_doublings {
        current_spec = current_spec.doubled();
        let next = integrate_once(amp, &current_spec);
        let value = pick(&next);
        last_change = (value - pick(&previous)).abs() / value.abs().max(f64::MIN_POSITIVE);
        previous = next;
        if last_change < spec.rel_tol {
            return Ok(ConvergedIntegrals {
                norm: next.norm,
                entropy: next.entropy,
                relative_change: last_change,
                spec: current_spec,
            });
        }
    }
    Err(Error::QuadratureNotConverged {
        value: pick(&previous),
        relative_change: last_change,
    })
}
