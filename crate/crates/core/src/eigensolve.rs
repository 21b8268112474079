//! Ground state of the truncated Hamiltonian and its cutoff convergence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lanczos_lowest, symmetric_eigen, LanczosOptions};
use crate::model::{
    basis_dim, build_hamiltonian_sector, BasisIndex, HamiltonianMatrix, ModelParams, Sector, Spin, DEFAULT_MAX_DIM,
};

/// Matrices up to this dimension are diagonalized densely.
pub const DENSE_LIMIT: usize = 400;

/// Lowest eigenpair of a Hamiltonian matrix (vector in the matrix's local basis).
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Residual bound `1e-10 · max|H_ij| · dim` every returned pair satisfies.
pub fn residual_bound(h: &HamiltonianMatrix) -> f64 {
    1e-10 * h.max_abs().max(f64::MIN_POSITIVE) * h.dim() as f64
}

fn residual(h: &HamiltonianMatrix, energy: f64, v: &[f64]) -> f64 {
    let mut hv = vec![0.0; v.len()];
    h.matvec(v, &mut hv);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - energy * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn rayleigh(h: &HamiltonianMatrix, v: &[f64]) -> f64 {
    let mut hv = vec![0.0; v.len()];
    h.matvec(v, &mut hv);
    hv.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Algebraically smallest eigenvalue and a unit eigenvector.
///
/// Dense Householder/QL below [`DENSE_LIMIT`], Lanczos with full
/// reorthogonalization above. A ground level that is degenerate across
/// parity sectors is resolved in favour of the even combination.
pub fn ground_eigenpair(h: &HamiltonianMatrix) -> Result<EigenPair> {
    if h.dim() <= DENSE_LIMIT {
        dense_ground(h)
    } else {
        lanczos_ground(h)
    }
}

/// Dense full-spectrum path.
pub fn dense_ground(h: &HamiltonianMatrix) -> Result<EigenPair> {
    let dim = h.dim();
    if dim == 0 {
        return Err(Error::Validation("empty Hamiltonian".into()));
    }
    let eig = symmetric_eigen(&h.to_dense(), dim)?;
    let gap_tol = 1e-9 * h.max_abs().max(1.0);
    let e0 = eig.values[0];
    let cluster: Vec<Vec<f64>> = (0..dim)
        .take_while(|&k| eig.values[k] - e0 <= gap_tol)
        .map(|k| eig.vector(k))
        .collect();

    let vector = if cluster.len() == 1 || h.sector() != Sector::Full {
        cluster.into_iter().next().unwrap()
    } else {
        // pick the member with the largest even weight and project it
        let best = cluster
            .into_iter()
            .max_by(|a, b| even_weight(h, a).total_cmp(&even_weight(h, b)))
            .unwrap();
        project_even(h, &best).unwrap_or(best)
    };
    finish(h, vector)
}

/// Sparse Lanczos path, started from the normalized constant vector.
pub fn lanczos_ground(h: &HamiltonianMatrix) -> Result<EigenPair> {
    let dim = h.dim();
    let start = vec![1.0; dim];
    let opts = LanczosOptions {
        tolerance: 1e-11 * h.max_abs().max(1.0),
        max_krylov: dim.min(300),
        max_restarts: 40,
    };
    let apply = |x: &[f64], out: &mut [f64]| h.matvec(x, out);
    let res = lanczos_lowest(apply, dim, &start, opts).or_else(|e| match e {
        // strict target missed but the contract bound is reachable
        Error::EigenNotConverged { residual, .. } if residual <= residual_bound(h) => {
            let relaxed = LanczosOptions {
                tolerance: residual_bound(h),
                ..opts
            };
            lanczos_lowest(apply, dim, &start, relaxed)
        }
        e => Err(e),
    })?;
    let mut vector = res.vector;
    if h.sector() == Sector::Full && 1.0 - even_weight(h, &vector) > 1e-10 {
        if let Some(projected) = project_even(h, &vector) {
            let e = rayleigh(h, &projected);
            if residual(h, e, &projected) <= residual_bound(h) {
                vector = projected;
            }
        }
    }
    finish(h, vector)
}

fn even_weight(h: &HamiltonianMatrix, v: &[f64]) -> f64 {
    h.basis()
        .iter()
        .zip(v)
        .filter(|(b, _)| b.parity() == 1)
        .map(|(_, c)| c * c)
        .sum()
}

fn project_even(h: &HamiltonianMatrix, v: &[f64]) -> Option<Vec<f64>> {
    let mut p: Vec<f64> = h
        .basis()
        .iter()
        .zip(v)
        .map(|(b, &c)| if b.parity() == 1 { c } else { 0.0 })
        .collect();
    let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm < 1e-3 {
        return None;
    }
    p.iter_mut().for_each(|c| *c /= norm);
    Some(p)
}

/// Normalizes, fixes the sign and checks the residual bound.
fn finish(h: &HamiltonianMatrix, mut vector: Vec<f64>) -> Result<EigenPair> {
    let norm = vector.iter().map(|c| c * c).sum::<f64>().sqrt();
    vector.iter_mut().for_each(|c| *c /= norm);
    fix_sign(&mut vector);
    let energy = rayleigh(h, &vector);
    let res = residual(h, energy, &vector);
    if res > residual_bound(h) {
        return Err(Error::EigenNotConverged {
            iterations: 0,
            residual: res,
        });
    }
    Ok(EigenPair {
        energy,
        vector,
        residual: res,
    })
}

/// Makes the largest-magnitude component positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0_f64;
    let mut sign = 1.0;
    for &c in v.iter() {
        if c.abs() > best {
            best = c.abs();
            sign = c.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|c| *c = -*c);
    }
}

/// Ground state: coefficient table `c_{nm}` over the full truncated basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundState {
    params: ModelParams,
    n_c: usize,
    energy: f64,
    /// Row-major `(n_c + 1) × (2j + 1)`.
    coeffs: Vec<f64>,
    parity: i8,
}

impl GroundState {
    /// Builds a state from a full coefficient table.
    pub fn from_coefficients(params: ModelParams, n_c: usize, energy: f64, coeffs: Vec<f64>) -> Result<Self> {
        let dim = basis_dim(params.spin, n_c).ok_or(Error::Validation("basis too large".into()))?;
        if coeffs.len() != dim {
            return Err(Error::Validation(format!(
                "expected {dim} coefficients for n_c = {n_c}, got {}",
                coeffs.len()
            )));
        }
        let mut g = Self {
            params,
            n_c,
            energy,
            coeffs,
            parity: 1,
        };
        g.parity = if g.parity_expectation() >= 0.0 { 1 } else { -1 };
        Ok(g)
    }

    fn from_eigenpair(h: &HamiltonianMatrix, pair: EigenPair) -> Result<Self> {
        let spin = h.params().spin;
        let n_c = h.cutoff();
        let mut coeffs = vec![0.0; basis_dim(spin, n_c).unwrap()];
        for (b, c) in h.basis().iter().zip(&pair.vector) {
            coeffs[b.n * spin.multiplicity() + b.m_offset as usize] = *c;
        }
        Self::from_coefficients(*h.params(), n_c, pair.energy, coeffs)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spin(&self) -> Spin {
        self.params.spin
    }

    pub fn cutoff(&self) -> usize {
        self.n_c
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, b: BasisIndex) -> f64 {
        if b.n > self.n_c || b.m_offset > self.spin().twice() {
            return 0.0;
        }
        self.coeffs[b.n * self.spin().multiplicity() + b.m_offset as usize]
    }

    /// `(BasisIndex, c)` over the whole table.
    pub fn iter(&self) -> impl Iterator<Item = (BasisIndex, f64)> + '_ {
        let mult = self.spin().multiplicity();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (BasisIndex::new(i / mult, (i % mult) as u32), c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `Σ_{n > n_c/2} Σ_m c²`.
    pub fn tail_weight(&self) -> f64 {
        let half = self.n_c / 2;
        self.iter().filter(|(b, _)| b.n > half).map(|(_, c)| c * c).sum()
    }

    /// Weight in odd-parity basis states.
    pub fn odd_weight(&self) -> f64 {
        self.iter().filter(|(b, _)| b.parity() == -1).map(|(_, c)| c * c).sum()
    }

    pub fn parity_expectation(&self) -> f64 {
        self.iter().map(|(b, c)| b.parity() as f64 * c * c).sum()
    }

    pub fn observables(&self) -> Observables {
        observables(self)
    }

    /// A copy with every coefficient multiplied by `factor` (not renormalized).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            ..self.clone()
        }
    }
}

/// Ground-state expectation values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub mean_photons: f64,
    pub mean_jz: f64,
    pub parity: f64,
}

/// `<a†a>`, `<J_z>` and `<Π>` from the coefficient table.
pub fn observables(g: &GroundState) -> Observables {
    let spin = g.spin();
    let mut obs = Observables {
        mean_photons: 0.0,
        mean_jz: 0.0,
        parity: 0.0,
    };
    for (b, c) in g.iter() {
        let w = c * c;
        obs.mean_photons += b.n as f64 * w;
        obs.mean_jz += b.m(spin) * w;
        obs.parity += b.parity() as f64 * w;
    }
    obs
}

/// Ground state at a fixed cutoff. `Sector::Even` solves only the even
/// block; `Sector::Full` solves the whole matrix.
pub fn ground_state(p: &ModelParams, n_c: usize, sector: Sector) -> Result<GroundState> {
    let h = build_hamiltonian_sector(p, n_c, sector, DEFAULT_MAX_DIM)?;
    let pair = ground_eigenpair(&h)?;
    GroundState::from_eigenpair(&h, pair)
}

/// Cutoff doubling policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffPolicy {
    pub e_tol: f64,
    pub w_tol: f64,
    pub n_c0: usize,
    /// Largest cutoff that may be tried.
    pub ceiling: usize,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self {
            e_tol: 1e-8,
            w_tol: 1e-8,
            n_c0: 16,
            ceiling: 2048,
        }
    }
}

/// Doubles `n_c` from `n_c0` until `|E(2n_c) - E(n_c)| < e_tol` and the
/// weight above `n_c/2` is below `w_tol`; returns the state at that `n_c`.
pub fn converge_cutoff(p: &ModelParams, policy: &CutoffPolicy) -> Result<GroundState> {
    if !(policy.e_tol > 0.0 && policy.w_tol > 0.0) {
        return Err(Error::Validation("e_tol and w_tol must be positive".into()));
    }
    if policy.n_c0 < 1 {
        return Err(Error::Validation("n_c0 must be >= 1".into()));
    }
    let mut n_c = policy.n_c0;
    let mut current = ground_state(p, n_c, Sector::Even)?;
    let mut delta = f64::INFINITY;
    while 2 * n_c <= policy.ceiling {
        let next = ground_state(p, 2 * n_c, Sector::Even)?;
        delta = (next.energy - current.energy).abs();
        if delta < policy.e_tol && current.tail_weight() < policy.w_tol {
            return Ok(current);
        }
        n_c *= 2;
        current = next;
    }
    Err(Error::CutoffCeiling {
        ceiling: policy.ceiling,
        delta_energy: delta,
        tail_weight: current.tail_weight(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_hamiltonian;

    #[test]
    fn decoupled_ground_state() {
        for j in [0.5, 2.0, 5.0] {
            let p = ModelParams::resonant(0.0, j).unwrap();
            let h = build_hamiltonian(&p, 6).unwrap();
            let pair = ground_eigenpair(&h).unwrap();
            assert!((pair.energy + j).abs() < 1e-14);
            assert!((pair.vector[0] - 1.0).abs() < 1e-14);
            let g = ground_state(&p, 6, Sector::Full).unwrap();
            let obs = g.observables();
            assert_eq!((obs.mean_photons, obs.mean_jz, obs.parity), (0.0, -j, 1.0));
        }
    }

    #[test]
    fn coupling_lowers_spin_half_energy() {
        let p = ModelParams::resonant(0.1, 0.5).unwrap();
        let g = ground_state(&p, 40, Sector::Full).unwrap();
        assert!(g.energy() <= -0.5);
    }

    #[test]
    fn lanczos_and_dense_agree() {
        let p = ModelParams::resonant(0.7, 3.0).unwrap();
        let h = build_hamiltonian(&p, 50).unwrap();
        let a = dense_ground(&h).unwrap();
        let b = lanczos_ground(&h).unwrap();
        assert!((a.energy - b.energy).abs() < 1e-10);
        let overlap: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
        assert!((overlap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn even_block_reproduces_full_energy() {
        for lambda in [0.2, 0.5, 0.9] {
            let p = ModelParams::resonant(lambda, 2.0).unwrap();
            let full = ground_state(&p, 40, Sector::Full).unwrap();
            let even = ground_state(&p, 40, Sector::Even).unwrap();
            assert!((full.energy() - even.energy()).abs() < 1e-10);
            assert!(full.odd_weight() < 1e-10);
        }
    }

    #[test]
    fn degenerate_doublet_resolved_to_even() {
        // deep in the superradiant phase the even/odd splitting is below round-off
        let p = ModelParams::resonant(2.0, 1.0).unwrap();
        let h = build_hamiltonian(&p, 120).unwrap();
        let pair = ground_eigenpair(&h).unwrap();
        let g = GroundState::from_eigenpair(&h, pair).unwrap();
        assert!(g.odd_weight() < 1e-10, "odd weight {}", g.odd_weight());
        assert_eq!(g.parity(), 1);
    }

    #[test]
    fn sign_convention_and_normalization() {
        let p = ModelParams::resonant(0.6, 3.0).unwrap();
        let g = ground_state(&p, 40, Sector::Even).unwrap();
        assert!((g.norm_sqr() - 1.0).abs() < 1e-12);
        let largest = g
            .coeffs()
            .iter()
            .copied()
            .fold(0.0_f64, |a, c| if c.abs() > a.abs() { c } else { a });
        assert!(largest > 0.0);
    }

    #[test]
    fn cutoff_policy_examples() {
        let policy = CutoffPolicy::default();
        let g0 = converge_cutoff(&ModelParams::resonant(0.0, 5.0).unwrap(), &policy).unwrap();
        assert_eq!(g0.cutoff(), policy.n_c0);

        let normal = converge_cutoff(&ModelParams::resonant(0.3, 5.0).unwrap(), &policy).unwrap();
        let strong = converge_cutoff(&ModelParams::resonant(1.0, 5.0).unwrap(), &policy).unwrap();
        assert!(normal.cutoff() < strong.cutoff());

        let tight = CutoffPolicy { ceiling: 32, ..policy };
        let err = converge_cutoff(&ModelParams::resonant(1.0, 10.0).unwrap(), &tight).unwrap_err();
        assert!(matches!(err, Error::CutoffCeiling { ceiling: 32, .. }));
    }

    #[test]
    fn energy_non_increasing_in_lambda() {
        let mut last = f64::INFINITY;
        for i in 0..24 {
            let lambda = i as f64 * 0.05;
            let p = ModelParams::resonant(lambda, 2.0).unwrap();
            let g = ground_state(&p, 60, Sector::Even).unwrap();
            assert!(g.energy() <= last + 1e-12);
            last = g.energy();
        }
    }
}
