//! File formats: ground-state JSON documents and float formatting shared by
//! the CSV writers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eigensolve::GroundState;
use crate::error::{Error, Result};
use crate::model::{flat_index, BasisIndex, ModelParams};

/// Shortest decimal form that round-trips to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // drop the sign of negative zero so mirrored grids print alike
        return "0".to_string();
    }
    format!("{x}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub n: usize,
    pub m: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateDoc {
    pub params: ModelParams,
    pub n_c: usize,
    pub energy: f64,
    pub coeffs: Vec<CoeffEntry>,
}

impl GroundStateDoc {
    /// Entries with `c == 0` are left out.
    pub fn from_state(g: &GroundState) -> Self {
        let spin = g.spin();
        Self {
            params: *g.params(),
            n_c: g.cutoff(),
            energy: g.energy(),
            coeffs: g
                .iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(b, c)| CoeffEntry {
                    n: b.n,
                    m: b.m(spin),
                    c,
                })
                .collect(),
        }
    }

    pub fn into_state(self) -> Result<GroundState> {
        let spin = self.params.spin;
        let mut table = vec![0.0; (self.n_c + 1) * spin.multiplicity()];
        for e in &self.coeffs {
            let b = BasisIndex::from_m(e.n, e.m, spin)?;
            let k = flat_index(b, spin, self.n_c)?;
            if table[k] != 0.0 {
                return Err(Error::Validation(format!(
                    "duplicate coefficient for n = {}, m = {}",
                    e.n, e.m
                )));
            }
            table[k] = e.c;
        }
        GroundState::from_coefficients(self.params, self.n_c, self.energy, table)
    }
}

pub fn ground_state_to_json(g: &GroundState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&GroundStateDoc::from_state(g))?)
}

pub fn ground_state_from_json(text: &str) -> Result<GroundState> {
    serde_json::from_str::<GroundStateDoc>(text)?.into_state()
}

pub fn save_ground_state(g: &GroundState, path: &Path) -> Result<()> {
    fs::write(path, ground_state_to_json(g)?)?;
    Ok(())
}

pub fn load_ground_state(path: &Path) -> Result<GroundState> {
    ground_state_from_json(&fs::read_to_string(path)?)
}
