//! Model parameters, the truncated product basis `|n> ⊗ |j, m>` and the
//! Dicke Hamiltonian
//!
//! ```text
//! H = ω0 J_z + ω a†a + λ/√(2j) (a† + a)(J+ + J-)
//! ```
//!
//! assembled in that basis. Spin projections are stored as the integer
//! offset `m + j ∈ [0, 2j]`, so half-integer `j` needs no floating-point
//! bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest basis dimension `build_hamiltonian` accepts unless told otherwise.
pub const DEFAULT_MAX_DIM: usize = 1 << 22;

/// Pseudospin length `j`, stored as the positive integer `2j = N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Spin {
    twice_j: u32,
}

impl Spin {
    pub fn from_twice(twice_j: u32) -> Result<Self> {
        if twice_j == 0 {
            return Err(Error::Validation("2j must be a positive integer".into()));
        }
        Ok(Self { twice_j })
    }

    /// Accepts `j` as a real number; `2j` must be a positive integer.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.5 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "j = {j} is not a positive half-integer (2j must be a positive integer)"
            )));
        }
        if twice.round() > u32::MAX as f64 {
            return Err(Error::Validation(format!("j = {j} is too large")));
        }
        Self::from_twice(twice.round() as u32)
    }

    pub fn j(self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    /// `2j`, the number of atoms.
    pub fn twice(self) -> u32 {
        self.twice_j
    }

    /// `2j + 1`, the dimension of the atomic sector.
    pub fn multiplicity(self) -> usize {
        self.twice_j as usize + 1
    }
}

/// Physical constants of one Dicke model instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    pub spin: Spin,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    omega: f64,
    omega0: f64,
    lambda: f64,
    j: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.omega, raw.omega0, raw.lambda, raw.j)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            omega: p.omega,
            omega0: p.omega0,
            lambda: p.lambda,
            j: p.spin.j(),
        }
    }
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, lambda: f64, j: f64) -> Result<Self> {
        let spin = Spin::new(j)?;
        Self::with_spin(omega, omega0, lambda, spin)
    }

    pub fn with_spin(omega: f64, omega0: f64, lambda: f64, spin: Spin) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Validation(format!("omega must be > 0, got {omega}")));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::Validation(format!("omega0 must be > 0, got {omega0}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Validation(format!("lambda must be >= 0, got {lambda}")));
        }
        Ok(Self {
            omega,
            omega0,
            lambda,
            spin,
        })
    }

    /// Resonant parameters `ω = ω0 = 1`, the setting of every figure.
    pub fn resonant(lambda: f64, j: f64) -> Result<Self> {
        Self::new(1.0, 1.0, lambda, j)
    }

    pub fn j(&self) -> f64 {
        self.spin.j()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::with_spin(self.omega, self.omega0, lambda, self.spin)
    }

    pub fn critical_coupling(&self) -> f64 {
        critical_coupling(self)
    }
}

/// `λ_c = √(ω ω0) / 2`.
pub fn critical_coupling(p: &ModelParams) -> f64 {
    (p.omega * p.omega0).sqrt() / 2.0
}

/// One product basis state `|n; j, m>` with `m_offset = m + j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub n: usize,
    pub m_offset: u32,
}

impl BasisIndex {
    pub fn new(n: usize, m_offset: u32) -> Self {
        Self { n, m_offset }
    }

    /// Builds an index from a physical projection `m ∈ [-j, j]`.
    pub fn from_m(n: usize, m: f64, spin: Spin) -> Result<Self> {
        let offset = m + spin.j();
        if (offset - offset.round()).abs() > 1e-9 || offset.round() < 0.0 {
            return Err(Error::Validation(format!(
                "m = {m} is not a valid projection for j = {}",
                spin.j()
            )));
        }
        let offset = offset.round() as u32;
        if offset > spin.twice() {
            return Err(Error::Validation(format!("|m| = {} exceeds j = {}", m.abs(), spin.j())));
        }
        Ok(Self::new(n, offset))
    }

    pub fn m(&self, spin: Spin) -> f64 {
        self.m_offset as f64 - spin.j()
    }

    /// `(-1)^(n + m + j)`.
    pub fn parity(&self) -> i8 {
        if (self.n + self.m_offset as usize) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

pub fn parity_of(b: BasisIndex) -> i8 {
    b.parity()
}

/// Full basis dimension `(n_c + 1)(2j + 1)`, or `None` on overflow.
pub fn basis_dim(spin: Spin, n_c: usize) -> Option<usize> {
    n_c.checked_add(1)?.checked_mul(spin.multiplicity())
}

/// Row-major position of `b` in the full basis (photon number outer, spin inner).
pub fn flat_index(b: BasisIndex, spin: Spin, n_c: usize) -> Result<usize> {
    if b.n > n_c || b.m_offset > spin.twice() {
        return Err(Error::Validation(format!(
            "basis index (n = {}, m + j = {}) out of range for n_c = {n_c}, 2j = {}",
            b.n,
            b.m_offset,
            spin.twice()
        )));
    }
    Ok(b.n * spin.multiplicity() + b.m_offset as usize)
}

/// Inverse of [`flat_index`].
pub fn basis_index(flat: usize, spin: Spin, n_c: usize) -> Result<BasisIndex> {
    let dim = basis_dim(spin, n_c).unwrap_or(usize::MAX);
    if flat >= dim {
        return Err(Error::Validation(format!("flat index {flat} out of range (dim {dim})")));
    }
    let mult = spin.multiplicity();
    Ok(BasisIndex::new(flat / mult, (flat % mult) as u32))
}

/// Which parity sector a matrix is restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    Full,
    Even,
    Odd,
}

impl Sector {
    fn admits(self, b: BasisIndex) -> bool {
        match self {
            Sector::Full => true,
            Sector::Even => b.parity() == 1,
            Sector::Odd => b.parity() == -1,
        }
    }
}

/// Real symmetric Hamiltonian over a (possibly parity-restricted) basis,
/// stored in compressed sparse rows. Each row holds at most five entries.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    params: ModelParams,
    n_c: usize,
    sector: Sector,
    basis: Vec<BasisIndex>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn cutoff(&self) -> usize {
        self.n_c
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    /// Basis state of each local row/column.
    pub fn basis(&self) -> &[BasisIndex] {
        &self.basis
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == k).map_or(0.0, |(_, v)| v)
    }

    pub fn nonzeros(&self) -> usize {
        self.values.len()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// `out = H x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        for (i, o) in out.iter_mut().enumerate() {
            let span = self.row_ptr[i]..self.row_ptr[i + 1];
            *o = self.cols[span.clone()]
                .iter()
                .zip(&self.values[span])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut dense = vec![0.0; dim * dim];
        for i in 0..dim {
            for (c, v) in self.row(i) {
                dense[i * dim + c] = v;
            }
        }
        dense
    }
}

pub fn build_hamiltonian(p: &ModelParams, n_c: usize) -> Result<HamiltonianMatrix> {
    build_hamiltonian_sector(p, n_c, Sector::Full, DEFAULT_MAX_DIM)
}

/// Assembles `H` on the states of `sector` with photon numbers `0..=n_c`.
pub fn build_hamiltonian_sector(
    p: &ModelParams,
    n_c: usize,
    sector: Sector,
    max_dim: usize,
) -> Result<HamiltonianMatrix> {
    if n_c < 1 {
        return Err(Error::Validation("photon cutoff n_c must be >= 1".into()));
    }
    let spin = p.spin;
    let full_dim = basis_dim(spin, n_c).ok_or(Error::DimensionOverflow {
        dim: usize::MAX,
        max: max_dim,
    })?;
    if full_dim > max_dim {
        return Err(Error::DimensionOverflow {
            dim: full_dim,
            max: max_dim,
        });
    }

    let mut local = vec![usize::MAX; full_dim];
    let mut basis = Vec::with_capacity(full_dim);
    for flat in 0..full_dim {
        let b = BasisIndex::new(flat / spin.multiplicity(), (flat % spin.multiplicity()) as u32);
        if sector.admits(b) {
            local[flat] = basis.len();
            basis.push(b);
        }
    }

    let twice_j = spin.twice() as f64;
    let coupling = p.lambda / twice_j.sqrt();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(5); basis.len()];

    for (i, b) in basis.iter().enumerate() {
        rows[i].push((i, b.n as f64 * p.omega + b.m(spin) * p.omega0));
        if coupling == 0.0 {
            continue;
        }
        // Upper neighbours only: photon number n + 1 with m ± 1; the mirror
        // entry is inserted at the same time so H is symmetric bit for bit.
        let n_up = b.n + 1;
        if n_up > n_c {
            continue;
        }
        let photon = (n_up as f64).sqrt();
        let k = b.m_offset as f64;
        let mut neighbours = [None, None];
        if b.m_offset < spin.twice() {
            // J+ : sqrt((j - m)(j + m + 1)) = sqrt((2j - k)(k + 1))
            let ladder = ((twice_j - k) * (k + 1.0)).sqrt();
            neighbours[0] = Some((BasisIndex::new(n_up, b.m_offset + 1), ladder));
        }
        if b.m_offset > 0 {
            // J- : sqrt((j + m)(j - m + 1)) = sqrt(k (2j - k + 1))
            let ladder = (k * (twice_j - k + 1.0)).sqrt();
            neighbours[1] = Some((BasisIndex::new(n_up, b.m_offset - 1), ladder));
        }
        for (target, ladder) in neighbours.into_iter().flatten() {
            let flat = target.n * spin.multiplicity() + target.m_offset as usize;
            let t = local[flat];
            debug_assert!(t != usize::MAX, "coupling must preserve parity");
            let value = coupling * photon * ladder;
            rows[i].push((t, value));
            rows[t].push((i, value));
        }
    }

    let mut row_ptr = Vec::with_capacity(basis.len() + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for mut row in rows {
        row.sort_by_key(|&(c, _)| c);
        for (c, v) in row {
            cols.push(c);
            values.push(v);
        }
        row_ptr.push(cols.len());
    }

    Ok(HamiltonianMatrix {
        params: *p,
        n_c,
        sector,
        basis,
        row_ptr,
        cols,
        values,
    })
}
