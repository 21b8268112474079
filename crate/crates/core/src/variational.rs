//! Parity-adapted coherent states: the mean-field energy surface, its
//! equilibria, and the Husimi distribution and Wehrl entropy of the
//! resulting Schrödinger-cat states.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent::{glauber_overlap, spin_overlap, spin_overlap_sphere, PhasePoint};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Spin};
use crate::quadrature::{integrate_converged, ConvergedIntegrals, QuadratureSpec, SeparableAmplitude, Target};

/// `<α,z|H|α,z>` for coherent states: `ω|α|² + jω0(|z|²-1)/(|z|²+1)
/// + λ√(2j)(α+ᾱ)(z̄+z)/(|z|²+1)`.
pub fn energy_surface(p: &ModelParams, alpha: Complex64, z: Complex64) -> f64 {
    let j = p.j();
    let zz = z.norm_sqr();
    p.omega * alpha.norm_sqr()
        + j * p.omega0 * (zz - 1.0) / (zz + 1.0)
        + p.lambda * (2.0 * j).sqrt() * (2.0 * alpha.re) * (2.0 * z.re) / (zz + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumSource {
    PaperFormula,
    Minimizer,
}

impl EquilibriumSource {
    pub fn as_str(self) -> &'static str {
        match self {
            EquilibriumSource::PaperFormula => "paper_formula",
            EquilibriumSource::Minimizer => "minimizer",
        }
    }
}

/// Real centre `(α_e, z_e)` of the coherent-state packet, `α_e ≤ 0 ≤ z_e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub alpha_e: f64,
    pub z_e: f64,
    pub source: EquilibriumSource,
    pub params: ModelParams,
}

impl Equilibrium {
    pub fn energy(&self) -> f64 {
        energy_surface(&self.params, self.alpha_e.into(), self.z_e.into())
    }

    pub fn is_normal(&self) -> bool {
        self.alpha_e == 0.0 && self.z_e == 0.0
    }
}

/// Closed-form equilibrium transcribed as published:
/// `α_e = -√(2j) √(ω0/ω) (λ/λ_c) √(1 - (λ/λ_c)^-4)`,
/// `z_e = √((λ/λ_c - λ_c/λ) / (λ/λ_c + λ_c/λ))`, both zero below `λ_c`.
pub fn equilibrium_paper(p: &ModelParams) -> Equilibrium {
    let r = p.lambda / p.critical_coupling();
    let (alpha_e, z_e) = if r < 1.0 {
        (0.0, 0.0)
    } else {
        let alpha = -(2.0 * p.j()).sqrt() * (p.omega0 / p.omega).sqrt() * r * (1.0 - r.powi(-4)).sqrt();
        let z = ((r - 1.0 / r) / (r + 1.0 / r)).sqrt();
        (alpha, z)
    };
    Equilibrium {
        alpha_e,
        z_e,
        source: EquilibriumSource::PaperFormula,
        params: *p,
    }
}

/// Energy surface on the real section with its gradient and Hessian.
struct RealSurface {
    omega: f64,
    j_omega0: f64,
    coupling: f64,
}

impl RealSurface {
    fn new(p: &ModelParams) -> Self {
        Self {
            omega: p.omega,
            j_omega0: p.j() * p.omega0,
            coupling: 4.0 * p.lambda * (2.0 * p.j()).sqrt(),
        }
    }

    fn energy(&self, a: f64, z: f64) -> f64 {
        let q = 1.0 + z * z;
        self.omega * a * a + self.j_omega0 * (z * z - 1.0) / q + self.coupling * a * z / q
    }

    fn best_alpha(&self, z: f64) -> f64 {
        -self.coupling * z / (2.0 * self.omega * (1.0 + z * z))
    }

    fn gradient(&self, a: f64, z: f64) -> [f64; 2] {
        let q = 1.0 + z * z;
        [
            2.0 * self.omega * a + self.coupling * z / q,
            (4.0 * self.j_omega0 * z + self.coupling * a * (1.0 - z * z)) / (q * q),
        ]
    }

    fn hessian(&self, a: f64, z: f64) -> [[f64; 2]; 2] {
        let q = 1.0 + z * z;
        let az = self.coupling * (1.0 - z * z) / (q * q);
        let zz =
            (4.0 * self.j_omega0 * (1.0 - 3.0 * z * z) + 2.0 * self.coupling * a * z * (z * z - 3.0)) / (q * q * q);
        [[2.0 * self.omega, az], [az, zz]]
    }
}

const GRID: usize = 64;
const MAX_DESCENT: usize = 500;
const Z_CEILING: f64 = 1.0 - 1e-12;

/// Minimum of the energy surface on the real section `α ≤ 0 ≤ z < 1`:
/// a 64×64 grid seed, coordinate descent (exact in α, Newton in z) and a
/// final two-dimensional Newton polish.
pub fn equilibrium_minimize(p: &ModelParams) -> Result<Equilibrium> {
    let result = |alpha_e: f64, z_e: f64| Equilibrium {
        alpha_e,
        z_e,
        source: EquilibriumSource::Minimizer,
        params: *p,
    };
    if p.lambda <= p.critical_coupling() || p.lambda == 0.0 {
        return Ok(result(0.0, 0.0));
    }
    let s = RealSurface::new(p);
    let tol = 1e-12 * (1.0 + s.j_omega0 + s.omega);

    let a_span = 2.0 * (2.0 * p.j()).sqrt() * (p.lambda / p.omega).max(1.0);
    let (mut a, mut z) = (0.0, 0.0);
    let mut best = f64::INFINITY;
    for i in 0..GRID {
        let ai = -a_span * i as f64 / (GRID - 1) as f64;
        for k in 0..GRID {
            let zk = k as f64 / GRID as f64;
            let e = s.energy(ai, zk);
            if e < best {
                best = e;
                a = ai;
                z = zk;
            }
        }
    }
    // λ > λ_c makes the origin a saddle; leave it
    if z == 0.0 {
        z = 1.0 / GRID as f64;
    }

    let mut converged = false;
    for _ in 0..MAX_DESCENT {
        a = s.best_alpha(z);
        let [_, gz] = s.gradient(a, z);
        if gz.abs() < tol {
            converged = true;
            break;
        }
        let h = s.hessian(a, z)[1][1];
        let mut step = if h > 0.0 { -gz / h } else { -gz.signum() * 0.1 };
        let e0 = s.energy(a, z);
        loop {
            let trial = (z + step).clamp(0.0, Z_CEILING);
            if s.energy(a, trial) <= e0 || step.abs() < 1e-16 {
                z = trial;
                break;
            }
            step *= 0.5;
        }
    }

    for _ in 0..8 {
        let g = s.gradient(a, z);
        if g[0].abs().max(g[1].abs()) < tol * 1e-2 {
            break;
        }
        let h = s.hessian(a, z);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det <= 0.0 {
            break;
        }
        let da = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dz = -(h[0][0] * g[1] - h[1][0] * g[0]) / det;
        let (na, nz) = (a + da, (z + dz).clamp(0.0, Z_CEILING));
        let ng = s.gradient(na, nz);
        if ng[0].abs().max(ng[1].abs()) > g[0].abs().max(g[1].abs()) {
            break;
        }
        a = na;
        z = nz;
    }

    let g = s.gradient(a, z);
    let gnorm = g[0].hypot(g[1]);
    if !converged && gnorm >= tol {
        return Err(Error::MinimizerNotConverged {
            alpha: a,
            z,
            gradient: gnorm,
        });
    }
    if s.energy(a, z) >= s.energy(0.0, 0.0) {
        return Ok(result(0.0, 0.0));
    }
    Ok(result(a, z))
}

/// `e^{-2α_e²} ((1-z_e²)/(1+z_e²))^{2j}`, the overlap `<α_e,z_e|-α_e,-z_e>`.
pub fn cat_overlap(alpha_e: f64, z_e: f64, spin: Spin) -> f64 {
    let zz = z_e * z_e;
    (-2.0 * alpha_e * alpha_e).exp() * ((1.0 - zz) / (1.0 + zz)).powi(spin.twice() as i32)
}

/// `N_± = √2 (1 ± <α_e,z_e|-α_e,-z_e>)^{1/2}`.
pub fn cat_norm(alpha_e: f64, z_e: f64, spin: Spin, parity_sign: i8) -> Result<f64> {
    let sign = parity_sign_value(parity_sign)?;
    let inner = 1.0 + sign * cat_overlap(alpha_e, z_e, spin);
    if inner <= 0.0 {
        return Err(Error::DegenerateState(format!(
            "cat of parity {parity_sign:+} at alpha_e = {alpha_e}, z_e = {z_e} has zero norm"
        )));
    }
    Ok((2.0 * inner).sqrt())
}

fn parity_sign_value(parity_sign: i8) -> Result<f64> {
    match parity_sign {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(Error::Validation(format!(
            "parity sign must be +1 or -1, got {parity_sign}"
        ))),
    }
}

/// Normalized superposition `Σ_k w_k |α_k, z_k>` of coherent states.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentSuperposition {
    spin: Spin,
    centers: Vec<PhasePoint>,
    /// Weights divided by the norm of the raw sum.
    weights: Vec<f64>,
}

impl CoherentSuperposition {
    pub fn new(spin: Spin, centers: Vec<PhasePoint>, weights: Vec<f64>) -> Result<Self> {
        if centers.is_empty() || centers.len() != weights.len() {
            return Err(Error::Validation("need one weight per coherent-state center".into()));
        }
        let mut norm_sqr = 0.0;
        for (p, wp) in centers.iter().zip(&weights) {
            for (q, wq) in centers.iter().zip(&weights) {
                let o = glauber_overlap(p.alpha, q.alpha) * spin_overlap(p.z, q.z, spin);
                norm_sqr += wp * wq * o.re;
            }
        }
        if !(norm_sqr > 1e-300) {
            return Err(Error::DegenerateState("superposition has zero norm".into()));
        }
        let scale = norm_sqr.sqrt();
        Ok(Self {
            spin,
            centers,
            weights: weights.iter().map(|w| w / scale).collect(),
        })
    }

    pub fn amplitude(&self, pt: PhasePoint) -> Complex64 {
        self.centers
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| *w * glauber_overlap(pt.alpha, c.alpha) * spin_overlap(pt.z, c.z, self.spin))
            .sum()
    }

    pub fn husimi(&self, pt: PhasePoint) -> f64 {
        self.amplitude(pt).norm_sqr()
    }
}

impl SeparableAmplitude for CoherentSuperposition {
    fn spin(&self) -> Spin {
        self.spin
    }

    fn rank(&self) -> usize {
        self.centers.len()
    }

    fn alpha_factors(&self, alpha: Complex64, out: &mut [Complex64]) {
        for ((o, c), w) in out.iter_mut().zip(&self.centers).zip(&self.weights) {
            *o = *w * glauber_overlap(alpha, c.alpha);
        }
    }

    fn sphere_factors(&self, theta: f64, phi: f64, out: &mut [Complex64]) {
        for (o, c) in out.iter_mut().zip(&self.centers) {
            *o = spin_overlap_sphere(theta, phi, c.z, self.spin);
        }
    }

    fn conjugation_symmetric(&self) -> bool {
        self.centers.iter().all(|c| c.alpha.im == 0.0 && c.z.im == 0.0)
    }
}

/// `|α_e, z_e, ±> = (|α_e, z_e> ± |-α_e, -z_e>) / N_±`.
#[derive(Clone, Debug, PartialEq)]
pub struct CatState {
    pub alpha_e: f64,
    pub z_e: f64,
    pub parity_sign: i8,
    pub norm: f64,
    superposition: CoherentSuperposition,
}

impl CatState {
    pub fn new(alpha_e: f64, z_e: f64, spin: Spin, parity_sign: i8) -> Result<Self> {
        let norm = cat_norm(alpha_e, z_e, spin, parity_sign)?;
        let sign = parity_sign_value(parity_sign)?;
        let centers = vec![PhasePoint::real(alpha_e, z_e), PhasePoint::real(-alpha_e, -z_e)];
        let superposition = CoherentSuperposition {
            spin,
            centers,
            weights: vec![1.0 / norm, sign / norm],
        };
        Ok(Self {
            alpha_e,
            z_e,
            parity_sign,
            norm,
            superposition,
        })
    }

    pub fn even(eq: &Equilibrium) -> Result<Self> {
        Self::new(eq.alpha_e, eq.z_e, eq.params.spin, 1)
    }

    pub fn spin(&self) -> Spin {
        self.superposition.spin
    }

    pub fn amplitude(&self, pt: PhasePoint) -> Complex64 {
        self.superposition.amplitude(pt)
    }

    pub fn default_quadrature(&self) -> QuadratureSpec {
        QuadratureSpec::centered(self.alpha_e)
    }
}

impl SeparableAmplitude for CatState {
    fn spin(&self) -> Spin {
        self.superposition.spin
    }

    fn rank(&self) -> usize {
        2
    }

    fn alpha_factors(&self, alpha: Complex64, out: &mut [Complex64]) {
        self.superposition.alpha_factors(alpha, out)
    }

    fn sphere_factors(&self, theta: f64, phi: f64, out: &mut [Complex64]) {
        self.superposition.sphere_factors(theta, phi, out)
    }
}

/// `|<α,z|α_e,z_e> ± <α,z|-α_e,-z_e>|² / N_±²`.
pub fn husimi_variational(c: &CatState, pt: PhasePoint) -> f64 {
    c.amplitude(pt).norm_sqr()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Normal,
    Superradiant,
    /// Packets overlap; no closed form, integrate instead.
    Crossover,
}

/// Overlap below which the two packets count as disjoint.
pub const CROSSOVER_OVERLAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalEntropy {
    pub regime: Regime,
    pub value: Option<f64>,
    pub equilibrium: Equilibrium,
}

/// `1 + 2j/(2j+1)` in the normal phase, plus `ln 2` once the packets separate.
pub fn wehrl_variational_analytic(p: &ModelParams) -> Result<VariationalEntropy> {
    let eq = equilibrium_minimize(p)?;
    Ok(wehrl_variational_analytic_at(&eq))
}

pub fn wehrl_variational_analytic_at(eq: &Equilibrium) -> VariationalEntropy {
    let spin = eq.params.spin;
    let twice = spin.twice() as f64;
    let base = 1.0 + twice / (twice + 1.0);
    let (regime, value) = if eq.is_normal() {
        (Regime::Normal, Some(base))
    } else if cat_overlap(eq.alpha_e, eq.z_e, spin) < CROSSOVER_OVERLAP {
        (Regime::Superradiant, Some(base + LN_2))
    } else {
        (Regime::Crossover, None)
    };
    VariationalEntropy {
        regime,
        value,
        equilibrium: *eq,
    }
}

/// Norm and Wehrl entropy of the cat's Husimi distribution by quadrature.
pub fn variational_integrals(c: &CatState, q: &QuadratureSpec) -> Result<ConvergedIntegrals> {
    integrate_converged(c, q, Target::Entropy)
}

pub fn wehrl_variational_quadrature(c: &CatState, q: &QuadratureSpec) -> Result<f64> {
    Ok(variational_integrals(c, q)?.entropy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::GroundState;
    use crate::husimi::{husimi_integrals, ExactAmplitude};
    use crate::model::BasisIndex;
    use proptest::prelude::*;

    fn params(lambda: f64, j: f64) -> ModelParams {
        ModelParams::resonant(lambda, j).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn energy_surface_examples() {
        let p = params(0.8, 4.0);
        assert_eq!(energy_surface(&p, c(0.0, 0.0), c(0.0, 0.0)), -4.0);
        let (a, z) = (c(0.0, 1.3), c(0.0, -0.4));
        let zz: f64 = 0.16;
        let expect = 1.69 + 4.0 * (zz - 1.0) / (zz + 1.0);
        assert!((energy_surface(&p, a, z) - expect).abs() < 1e-14);
    }

    /// Dense grid followed by golden-section refinement along the exact α
    /// valley; independent of the descent in the implementation.
    fn brute_force_minimum(p: &ModelParams) -> f64 {
        let f = |a: f64, z: f64| energy_surface(p, a.into(), z.into());
        let (mut best, mut bz) = (f64::INFINITY, 0.0);
        for k in 0..20000 {
            let z = k as f64 / 20000.0;
            for i in 0..400 {
                let a = -12.0 * i as f64 / 399.0;
                let e = f(a, z);
                if e < best {
                    best = e;
                    bz = z;
                }
            }
        }
        let valley = |z: f64| {
            let a = -2.0 * p.lambda * (2.0 * p.j()).sqrt() * z / (p.omega * (1.0 + z * z));
            f(a, z)
        };
        let (mut lo, mut hi) = ((bz - 1e-3).max(0.0), (bz + 1e-3).min(1.0));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if valley(m1) < valley(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        valley(0.5 * (lo + hi)).min(best)
    }

    #[test]
    fn minimizer_matches_brute_force_and_stationary_condition() {
        let p = params(1.0, 10.0);
        let eq = equilibrium_minimize(&p).unwrap();
        assert!((eq.energy() - brute_force_minimum(&p)).abs() < 1e-6);
        assert!((eq.z_e - 0.6f64.sqrt()).abs() < 1e-8);
        assert!((eq.alpha_e + 4.330127018922193).abs() < 1e-8);
        let paper = equilibrium_paper(&p);
        assert!((paper.alpha_e + 8.660254037844386).abs() < 1e-9);
        assert!((paper.z_e - eq.z_e).abs() < 1e-8);
        assert_eq!(paper.source, EquilibriumSource::PaperFormula);
    }

    #[test]
    fn normal_phase_equilibria() {
        let p = params(0.3, 10.0);
        for eq in [equilibrium_paper(&p), equilibrium_minimize(&p).unwrap()] {
            assert_eq!((eq.alpha_e, eq.z_e), (0.0, 0.0));
            assert_eq!(eq.energy(), -10.0);
        }
    }

    #[test]
    fn minimizer_just_above_critical() {
        let p = params(0.5 * 1.0001, 5.0);
        let eq = equilibrium_minimize(&p).unwrap();
        let mu = (0.5f64 / p.lambda).powi(2);
        assert!((eq.z_e - ((1.0 - mu) / (1.0 + mu)).sqrt()).abs() < 1e-7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn minimizer_is_canonical(lambda in 0.0f64..2.5, twice in 1u32..60, omega0 in 0.3f64..2.0) {
            let p = ModelParams::with_spin(1.0, omega0, lambda, Spin::from_twice(twice).unwrap()).unwrap();
            let eq = equilibrium_minimize(&p).unwrap();
            let paper = equilibrium_paper(&p);
            let e = eq.energy();
            prop_assert!(e <= energy_surface(&p, c(0.0, 0.0), c(0.0, 0.0)) + 1e-12);
            prop_assert!(e <= paper.energy() + 1e-9 * (1.0 + e.abs()));
            prop_assert!(eq.alpha_e <= 0.0 && (0.0..1.0).contains(&eq.z_e));
            if lambda > p.critical_coupling() * 1.001 {
                prop_assert!((eq.z_e - paper.z_e).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn cat_norm_examples() {
        let spin = Spin::new(10.0).unwrap();
        assert_eq!(cat_norm(0.0, 0.0, spin, 1).unwrap(), 2.0);
        assert!(matches!(cat_norm(0.0, 0.0, spin, -1), Err(Error::DegenerateState(_))));
        let n = cat_norm(-4.330127, 0.774597, spin, 1).unwrap();
        assert!((n - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(cat_overlap(-4.330127, 0.774597, spin) < 1e-16);
    }

    #[test]
    fn cat_norm_matches_gram_sum() {
        let spin = Spin::new(1.5).unwrap();
        for sign in [1i8, -1] {
            let cat = CatState::new(-0.4, 0.3, spin, sign).unwrap();
            let raw = CoherentSuperposition::new(
                spin,
                vec![PhasePoint::real(-0.4, 0.3), PhasePoint::real(0.4, -0.3)],
                vec![1.0, sign as f64],
            )
            .unwrap();
            let pt = PhasePoint::new(c(0.2, 0.5), c(-0.1, 0.9));
            assert!((cat.amplitude(pt) - raw.amplitude(pt)).norm() < 1e-14);
        }
    }

    #[test]
    fn variational_husimi_examples() {
        let spin = Spin::new(10.0).unwrap();
        let normal = CatState::new(0.0, 0.0, spin, 1).unwrap();
        assert!((husimi_variational(&normal, PhasePoint::real(0.0, 0.0)) - 1.0).abs() < 1e-15);
        let pt = PhasePoint::new(c(0.6, -0.2), c(0.3, 0.4));
        let expect = (-0.4f64).exp() / 1.25f64.powi(20);
        assert!((husimi_variational(&normal, pt) - expect).abs() < 1e-15);
        let eq = equilibrium_minimize(&params(1.0, 10.0)).unwrap();
        let cat = CatState::even(&eq).unwrap();
        let peak = husimi_variational(&cat, PhasePoint::real(eq.alpha_e, eq.z_e));
        assert!((peak - 0.5).abs() < 1e-12);
    }

    #[test]
    fn even_cat_is_parity_symmetric() {
        let cat = CatState::new(-1.3, 0.5, Spin::new(3.0).unwrap(), 1).unwrap();
        for (ar, ai, zr, zi) in [(0.3, 0.1, 0.5, -0.2), (-1.0, 0.4, 0.2, 1.1), (2.0, -0.3, -0.8, 0.0)] {
            let pt = PhasePoint::new(c(ar, ai), c(zr, zi));
            let d = husimi_variational(&cat, pt) - husimi_variational(&cat, pt.antipode());
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_entropy_branches() {
        let low = wehrl_variational_analytic(&params(0.2, 5.0)).unwrap();
        assert_eq!(low.regime, Regime::Normal);
        assert!((low.value.unwrap() - 21.0 / 11.0).abs() < 1e-12);
        let high = wehrl_variational_analytic(&params(1.0, 10.0)).unwrap();
        assert_eq!(high.regime, Regime::Superradiant);
        assert!((high.value.unwrap() - (1.0 + 20.0 / 21.0 + LN_2)).abs() < 1e-12);
        let near = wehrl_variational_analytic(&params(0.52, 1.0)).unwrap();
        assert_eq!(near.regime, Regime::Crossover);
        assert!(near.value.is_none());
        let huge = Spin::from_twice(20000).unwrap();
        let lim = wehrl_variational_analytic(&ModelParams::with_spin(1.0, 1.0, 0.1, huge).unwrap()).unwrap();
        assert!((lim.value.unwrap() - 2.0).abs() < 1e-4);
    }

    fn quick() -> QuadratureSpec {
        QuadratureSpec::default().with_points(32, 32, 32)
    }

    #[test]
    fn quadrature_matches_analytic_branches() {
        let normal = CatState::new(0.0, 0.0, Spin::new(5.0).unwrap(), 1).unwrap();
        let w = wehrl_variational_quadrature(&normal, &QuadratureSpec { ..quick() }).unwrap();
        assert!((w - 21.0 / 11.0).abs() < 1e-3);

        let eq = equilibrium_minimize(&params(1.0, 10.0)).unwrap();
        let cat = CatState::even(&eq).unwrap();
        let spec = QuadratureSpec {
            alpha_extent: cat.default_quadrature().alpha_extent,
            ..quick()
        };
        let r = variational_integrals(&cat, &spec).unwrap();
        assert!((r.norm - 1.0).abs() < 2e-3);
        assert!((r.entropy - (1.0 + 20.0 / 21.0 + LN_2)).abs() < 3e-3);
    }

    #[test]
    fn entropy_excess_of_separated_packets() {
        let spin = Spin::new(2.0).unwrap();
        let packet = |a: f64, zr: f64, zi: f64| PhasePoint::new(c(a, 0.0), c(zr, zi));
        let single = CoherentSuperposition::new(spin, vec![packet(0.0, 0.0, 0.0)], vec![1.0]).unwrap();
        let pair = CoherentSuperposition::new(
            spin,
            vec![packet(-7.0, 0.0, 0.0), packet(7.0, 0.0, 0.0)],
            vec![1.0, 1.0],
        )
        .unwrap();
        let triple = CoherentSuperposition::new(
            spin,
            vec![packet(-9.0, 0.0, 0.0), packet(0.0, 0.0, 0.0), packet(9.0, 0.0, 0.0)],
            vec![1.0, -1.0, 1.0],
        )
        .unwrap();
        let spec = QuadratureSpec {
            alpha_extent: 15.0,
            ..QuadratureSpec::default().with_points(64, 24, 24)
        };
        let w1 = integrate_converged(&single, &spec, Target::Entropy).unwrap().entropy;
        let w2 = integrate_converged(&pair, &spec, Target::Entropy).unwrap().entropy;
        let w3 = integrate_converged(&triple, &spec, Target::Entropy).unwrap().entropy;
        assert!((w2 - w1 - LN_2).abs() < 2e-3 * w2);
        assert!((w3 - w1 - 3f64.ln()).abs() < 2e-3 * w3);
    }

    /// Expands the cat in the Fock ⊗ Dicke basis and integrates it through
    /// the exact-state path.
    #[test]
    fn cat_through_exact_path() {
        let spin = Spin::new(2.0).unwrap();
        let p = ModelParams::with_spin(1.0, 1.0, 0.8, spin).unwrap();
        let (a, z) = (-1.2, 0.45);
        let cat = CatState::new(a, z, spin, 1).unwrap();
        let n_c = 40;
        let mult = spin.multiplicity();
        let mut table = vec![0.0; (n_c + 1) * mult];
        for n in 0..=n_c {
            for m in 0..mult {
                let b = BasisIndex::new(n, m as u32);
                let plus = crate::coherent::joint_amplitude(b, PhasePoint::real(a, z), spin);
                let minus = crate::coherent::joint_amplitude(b, PhasePoint::real(-a, -z), spin);
                table[n * mult + m] = ((plus + minus) / cat.norm).re;
            }
        }
        let g = GroundState::from_coefficients(p, n_c, 0.0, table).unwrap();
        let exact = ExactAmplitude::new(&g);
        let pt = PhasePoint::new(c(0.3, -0.7), c(0.5, 0.2));
        assert!((exact.amplitude(pt) - cat.amplitude(pt)).norm() < 1e-12);
        let spec = QuadratureSpec::centered(a).with_points(32, 32, 32);
        let via_exact = husimi_integrals(&g, &spec).unwrap();
        let via_cat = variational_integrals(&cat, &spec).unwrap();
        assert!((via_exact.entropy - via_cat.entropy).abs() < 1e-3);
        assert!((via_exact.norm - 1.0).abs() < 1e-3);
    }
}
