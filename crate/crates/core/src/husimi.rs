//! Husimi distribution `Ψ(α, z) = |<α, z|ψ>|²` of a diagonalized ground
//! state, its normalization and its Wehrl entropy.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherent::{glauber_amplitudes, spin_amplitudes, spin_amplitudes_sphere, PhasePoint};
use crate::eigensolve::GroundState;
use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::model::Spin;
use crate::quadrature::{integrate_converged, ConvergedIntegrals, QuadratureSpec, SeparableAmplitude, Target};

/// `<α, z|ψ> = Σ c_{nm} conj(<n|α>) conj(<j,m|z>)`, arranged as a separable
/// sum over whichever of the two sectors is smaller.
pub struct ExactAmplitude {
    spin: Spin,
    /// Highest photon number carrying weight.
    n_max: usize,
    /// Row-major `(n_max + 1) × (2j + 1)`.
    coeffs: Vec<f64>,
    over_spin: bool,
}

impl ExactAmplitude {
    pub fn new(g: &GroundState) -> Self {
        let spin = g.spin();
        let mult = spin.multiplicity();
        let n_max = g.iter().filter(|(_, c)| *c != 0.0).map(|(b, _)| b.n).max().unwrap_or(0);
        let coeffs = g.coeffs()[..(n_max + 1) * mult].to_vec();
        Self {
            spin,
            n_max,
            coeffs,
            over_spin: mult <= n_max + 1,
        }
    }

    fn mult(&self) -> usize {
        self.spin.multiplicity()
    }

    pub fn amplitude(&self, pt: PhasePoint) -> Complex64 {
        let photon = glauber_amplitudes(pt.alpha, self.n_max);
        let atom = spin_amplitudes(pt.z, self.spin);
        let mult = self.mult();
        photon
            .iter()
            .enumerate()
            .map(|(n, g)| {
                let row = &self.coeffs[n * mult..(n + 1) * mult];
                let inner: Complex64 = row.iter().zip(&atom).map(|(&c, s)| c * s.conj()).sum();
                g.conj() * inner
            })
            .sum()
    }
}

impl SeparableAmplitude for ExactAmplitude {
    fn spin(&self) -> Spin {
        self.spin
    }

    fn rank(&self) -> usize {
        if self.over_spin {
            self.mult()
        } else {
            self.n_max + 1
        }
    }

    fn alpha_factors(&self, alpha: Complex64, out: &mut [Complex64]) {
        let photon = glauber_amplitudes(alpha, self.n_max);
        let mult = self.mult();
        if self.over_spin {
            out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
            for (n, g) in photon.iter().enumerate() {
                let gc = g.conj();
                for (o, &c) in out.iter_mut().zip(&self.coeffs[n * mult..(n + 1) * mult]) {
                    *o += c * gc;
                }
            }
        } else {
            for (o, g) in out.iter_mut().zip(&photon) {
                *o = g.conj();
            }
        }
    }

    fn sphere_factors(&self, theta: f64, phi: f64, out: &mut [Complex64]) {
        let atom = spin_amplitudes_sphere(theta, phi, self.spin);
        if self.over_spin {
            for (o, s) in out.iter_mut().zip(&atom) {
                *o = s.conj();
            }
        } else {
            let mult = self.mult();
            for (n, o) in out.iter_mut().enumerate() {
                let row = &self.coeffs[n * mult..(n + 1) * mult];
                *o = row.iter().zip(&atom).map(|(&c, s)| c * s.conj()).sum();
            }
        }
    }

    fn conjugation_symmetric(&self) -> bool {
        // real coefficients
        true
    }
}

/// `Ψ(α, z)` of the state `g`, evaluated as one O(dim) sum.
pub fn husimi_exact(g: &GroundState, pt: PhasePoint) -> f64 {
    ExactAmplitude::new(g).amplitude(pt).norm_sqr()
}

/// Two-dimensional section of phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slice {
    /// `α = x`, `z = y`, both real.
    Position,
    /// `α = i x`, `z = i y`, both imaginary.
    Momentum,
    /// `α = alpha_origin + x · alpha_dir`, `z = z_origin + y · z_dir`.
    Custom {
        alpha_origin: Complex64,
        alpha_dir: Complex64,
        z_origin: Complex64,
        z_dir: Complex64,
    },
}

impl Slice {
    pub fn point(&self, x: f64, y: f64) -> PhasePoint {
        match *self {
            Slice::Position => PhasePoint::real(x, y),
            Slice::Momentum => PhasePoint::new(Complex64::new(0.0, x), Complex64::new(0.0, y)),
            Slice::Custom {
                alpha_origin,
                alpha_dir,
                z_origin,
                z_dir,
            } => PhasePoint::new(alpha_origin + alpha_dir * x, z_origin + z_dir * y),
        }
    }
}

/// Evenly spaced axis `start..=end` with `points` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(start: f64, end: f64, points: usize) -> Self {
        Self { start, end, points }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.start + step * i as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 || !(self.end > self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::Validation(format!(
                "axis [{}, {}] with {} points is not monotone",
                self.start, self.end, self.points
            )));
        }
        Ok(())
    }
}

/// Samples of a Husimi distribution on a slice; `values[i * axis2.len() + k]`
/// belongs to `(axis1[i], axis2[k])`.
#[derive(Clone, Debug, PartialEq)]
pub struct HusimiField {
    pub slice: Slice,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    pub values: Vec<f64>,
}

impl HusimiField {
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.axis2.len() + k]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Interior grid points strictly above their eight neighbours and above
    /// `rel_floor · max`.
    pub fn local_maxima(&self, rel_floor: f64) -> Vec<(usize, usize)> {
        let (n1, n2) = (self.axis1.len(), self.axis2.len());
        let floor = rel_floor * self.max();
        let mut peaks = Vec::new();
        for i in 1..n1.saturating_sub(1) {
            for k in 1..n2.saturating_sub(1) {
                let v = self.get(i, k);
                if v <= floor {
                    continue;
                }
                let is_peak = (i - 1..=i + 1)
                    .flat_map(|a| (k - 1..=k + 1).map(move |b| (a, b)))
                    .filter(|&(a, b)| (a, b) != (i, k))
                    .all(|(a, b)| v > self.get(a, b));
                if is_peak {
                    peaks.push((i, k));
                }
            }
        }
        peaks
    }

    /// CSV with header `axis1,axis2,psi`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "axis1,axis2,psi")?;
        for (i, x) in self.axis1.iter().enumerate() {
            for (k, y) in self.axis2.iter().enumerate() {
                writeln!(w, "{},{},{}", fmt_f64(*x), fmt_f64(*y), fmt_f64(self.get(i, k)))?;
            }
        }
        Ok(())
    }
}

/// Samples `density` on the slice grid.
pub fn grid_from_fn<F>(density: F, slice: Slice, axis1: Axis, axis2: Axis) -> Result<HusimiField>
where
    F: Fn(PhasePoint) -> f64 + Sync,
{
    axis1.validate()?;
    axis2.validate()?;
    let xs = axis1.values();
    let ys = axis2.values();
    let values: Vec<f64> = xs
        .par_iter()
        .flat_map_iter(|&x| ys.iter().map(move |&y| (x, y)).collect::<Vec<_>>())
        .map(|(x, y)| density(slice.point(x, y)))
        .collect();
    Ok(HusimiField {
        slice,
        axis1: xs,
        axis2: ys,
        values,
    })
}

/// Exact Husimi distribution on a slice grid.
pub fn husimi_grid(g: &GroundState, slice: Slice, axis1: Axis, axis2: Axis) -> Result<HusimiField> {
    let amp = ExactAmplitude::new(g);
    grid_from_fn(|pt| amp.amplitude(pt).norm_sqr(), slice, axis1, axis2)
}

/// Default rule for `g`: the α box is centred on `±√<a†a>`.
pub fn default_quadrature(g: &GroundState) -> QuadratureSpec {
    QuadratureSpec::centered(g.observables().mean_photons.max(0.0).sqrt())
}

/// `∫Ψ dμ` and `-∫Ψ lnΨ dμ`, refined until the entropy settles.
pub fn husimi_integrals(g: &GroundState, q: &QuadratureSpec) -> Result<ConvergedIntegrals> {
    integrate_converged(&ExactAmplitude::new(g), q, Target::Entropy)
}

/// `∫Ψ dμ`, refined until it settles.
pub fn husimi_norm(g: &GroundState, q: &QuadratureSpec) -> Result<f64> {
    Ok(integrate_converged(&ExactAmplitude::new(g), q, Target::Norm)?.norm)
}

/// Wehrl entropy `-∫Ψ lnΨ dμ` (with `0 ln 0 = 0`).
pub fn wehrl_entropy(g: &GroundState, q: &QuadratureSpec) -> Result<f64> {
    Ok(husimi_integrals(g, q)?.entropy)
}
