//! Ground states checked against a full-spectrum nalgebra solve of a
//! Hamiltonian assembled from Kronecker products of the ladder operators.

use dicke::eigensolve::{ground_eigenpair, lanczos_ground};
use dicke::model::{build_hamiltonian, ModelParams};

mod common;
use common::{kron_hamiltonian, overlap_with_ground_space};

struct Case {
    omega: f64,
    omega0: f64,
    lambda: f64,
    twice_j: usize,
    n_c: usize,
}

fn cases() -> Vec<Case> {
    let mut out = Vec::new();
    for twice_j in 1..=6 {
        for n_c in [4, 10, 20] {
            for (omega, omega0, lambda) in [(1.0, 1.0, 0.2), (1.0, 1.0, 0.7), (1.3, 0.8, 1.1)] {
                out.push(Case {
                    omega,
                    omega0,
                    lambda,
                    twice_j,
                    n_c,
                });
            }
        }
    }
    out
}

#[test]
fn ground_eigenpair_matches_full_spectrum_solve() {
    for c in cases() {
        let p = ModelParams::new(c.omega, c.omega0, c.lambda, c.twice_j as f64 / 2.0).unwrap();
        let h = build_hamiltonian(&p, c.n_c).unwrap();
        let oracle = kron_hamiltonian(c.omega, c.omega0, c.lambda, c.twice_j, c.n_c);
        let dense = h.to_dense();
        let dim = h.dim();
        for r in 0..dim {
            for k in 0..dim {
                assert!(
                    (dense[r * dim + k] - oracle[(r, k)]).abs() < 1e-13,
                    "matrix element ({r},{k})"
                );
            }
        }
        let eig = oracle.symmetric_eigen();
        let fast = ground_eigenpair(&h).unwrap();
        let (e0, ov) = overlap_with_ground_space(&eig, &fast.vector, 1e-8);
        assert!((fast.energy - e0).abs() < 1e-9, "energy {} vs {e0}", fast.energy);
        assert!(
            (ov - 1.0).abs() < 1e-8,
            "overlap {ov} for 2j={} n_c={}",
            c.twice_j,
            c.n_c
        );
    }
}

#[test]
fn lanczos_matches_full_spectrum_solve() {
    for c in cases().into_iter().filter(|c| c.n_c == 20) {
        let p = ModelParams::new(c.omega, c.omega0, c.lambda, c.twice_j as f64 / 2.0).unwrap();
        let h = build_hamiltonian(&p, c.n_c).unwrap();
        let eig = kron_hamiltonian(c.omega, c.omega0, c.lambda, c.twice_j, c.n_c).symmetric_eigen();
        let fast = lanczos_ground(&h).unwrap();
        let (e0, ov) = overlap_with_ground_space(&eig, &fast.vector, 1e-8);
        assert!((fast.energy - e0).abs() < 1e-9);
        assert!((ov - 1.0).abs() < 1e-8);
    }
}
