//! Independent dense reference: the Hamiltonian assembled from Kronecker
//! products of ladder operators and diagonalized by nalgebra.

use nalgebra::{DMatrix, Dyn, SymmetricEigen};

pub fn kron_hamiltonian(omega: f64, omega0: f64, lambda: f64, twice_j: usize, n_c: usize) -> DMatrix<f64> {
    let j = twice_j as f64 / 2.0;
    let (nf, ns) = (n_c + 1, twice_j + 1);
    let mut a = DMatrix::<f64>::zeros(nf, nf);
    for n in 1..nf {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    let mut jz = DMatrix::<f64>::zeros(ns, ns);
    let mut jp = DMatrix::<f64>::zeros(ns, ns);
    for k in 0..ns {
        let m = k as f64 - j;
        jz[(k, k)] = m;
        if k + 1 < ns {
            jp[(k + 1, k)] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        }
    }
    let jx2 = &jp + jp.transpose();
    let num = a.transpose() * &a;
    let x = &a + a.transpose();
    let eye_f = DMatrix::<f64>::identity(nf, nf);
    let eye_s = DMatrix::<f64>::identity(ns, ns);
    eye_f.kronecker(&jz) * omega0 + num.kronecker(&eye_s) * omega + x.kronecker(&jx2) * (lambda / (2.0 * j).sqrt())
}

/// Lowest oracle eigenvalue and the norm of the projection of `v` onto the
/// oracle eigenvectors within `tol` of it.
pub fn overlap_with_ground_space(eig: &SymmetricEigen<f64, Dyn>, v: &[f64], tol: f64) -> (f64, f64) {
    let lowest = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for (k, &e) in eig.eigenvalues.iter().enumerate() {
        if e - lowest < tol {
            let d: f64 = eig.eigenvectors.column(k).iter().zip(v).map(|(a, b)| a * b).sum();
            sum += d * d;
        }
    }
    (lowest, sum.sqrt())
}
