//! Glauber and spin-j coherent-state amplitudes and overlaps.
//!
//! Everything is evaluated as `exp(log-magnitude + i·phase)` so that
//! `n!`, binomials and `(1 + z̄w)^{2j}` never overflow.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{BasisIndex, Spin};

/// Phase-space point `(α, z)`: field coordinate and stereographic atomic
/// coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub alpha: Complex64,
    pub z: Complex64,
}

impl PhasePoint {
    pub fn new(alpha: Complex64, z: Complex64) -> Self {
        Self { alpha, z }
    }

    pub fn real(alpha: f64, z: f64) -> Self {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(z, 0.0))
    }

    /// The parity image `(-α, -z)`.
    pub fn antipode(self) -> Self {
        Self::new(-self.alpha, -self.z)
    }
}

/// `ln n!` through log-Γ.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `ln C(total, k)`.
pub fn ln_binomial(total: u32, k: u32) -> f64 {
    ln_factorial(total as usize) - ln_factorial(k as usize) - ln_factorial((total - k) as usize)
}

/// `<n|α> = e^{-|α|²/2} αⁿ / √(n!)`.
pub fn glauber_amplitude(n: usize, alpha: Complex64) -> Complex64 {
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        return if n == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let log_mag = -0.5 * r2 + n as f64 * 0.5 * r2.ln() - 0.5 * ln_factorial(n);
    Complex64::from_polar(log_mag.exp(), n as f64 * alpha.arg())
}

/// `<n|α>` for `n = 0..=n_max`.
pub fn glauber_amplitudes(alpha: Complex64, n_max: usize) -> Vec<Complex64> {
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
        out[0] = Complex64::new(1.0, 0.0);
        return out;
    }
    let ln_r = 0.5 * r2.ln();
    let arg = alpha.arg();
    (0..=n_max)
        .map(|n| {
            let log_mag = -0.5 * r2 + n as f64 * ln_r - 0.5 * ln_factorial(n);
            Complex64::from_polar(log_mag.exp(), n as f64 * arg)
        })
        .collect()
}

/// `<j, m|z> = (1 + |z|²)^{-j} √C(2j, j+m) z^{j+m}`, with `m_offset = j + m`.
pub fn spin_amplitude(m_offset: u32, z: Complex64, spin: Spin) -> Complex64 {
    assert!(m_offset <= spin.twice(), "m + j out of range");
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        return if m_offset == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let log_mag = -spin.j() * r2.ln_1p() + 0.5 * ln_binomial(spin.twice(), m_offset) + m_offset as f64 * 0.5 * r2.ln();
    Complex64::from_polar(log_mag.exp(), m_offset as f64 * z.arg())
}

/// `<j, m|z>` for every `m` (indexed by `m + j`).
pub fn spin_amplitudes(z: Complex64, spin: Spin) -> Vec<Complex64> {
    (0..=spin.twice()).map(|k| spin_amplitude(k, z, spin)).collect()
}

/// `<j, m|z>` on the sphere chart `z = tan(θ/2) e^{iφ}`:
/// `√C(2j, k) cos^{2j-k}(θ/2) sin^k(θ/2) e^{ikφ}`.
pub fn spin_amplitudes_sphere(theta: f64, phi: f64, spin: Spin) -> Vec<Complex64> {
    let twice = spin.twice();
    let (s, c) = (0.5 * theta).sin_cos();
    let (ln_s, ln_c) = (s.ln(), c.ln());
    (0..=twice)
        .map(|k| {
            let kf = k as f64;
            let mut log_mag = 0.5 * ln_binomial(twice, k);
            if k > 0 {
                log_mag += kf * ln_s;
            }
            if k < twice {
                log_mag += (twice - k) as f64 * ln_c;
            }
            Complex64::from_polar(log_mag.exp(), kf * phi)
        })
        .collect()
}

/// `φ_{n,m}(α, z) = <n|α> <j,m|z>`.
pub fn joint_amplitude(b: BasisIndex, pt: PhasePoint, spin: Spin) -> Complex64 {
    glauber_amplitude(b.n, pt.alpha) * spin_amplitude(b.m_offset, pt.z, spin)
}

/// `<α|β> = exp(-|α|²/2 - |β|²/2 + ᾱβ)`.
pub fn glauber_overlap(alpha: Complex64, beta: Complex64) -> Complex64 {
    (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp()
}

/// `<z|w> = (1 + z̄w)^{2j} / ((1 + |z|²)^j (1 + |w|²)^j)`.
pub fn spin_overlap(z: Complex64, w: Complex64, spin: Spin) -> Complex64 {
    let base = Complex64::new(1.0, 0.0) + z.conj() * w;
    if base.norm_sqr() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let j = spin.j();
    (spin.twice() as f64 * base.ln() - j * z.norm_sqr().ln_1p() - j * w.norm_sqr().ln_1p()).exp()
}

/// `<z|w>` with `z = tan(θ/2) e^{iφ}`:
/// `(cos(θ/2) + sin(θ/2) e^{-iφ} w)^{2j} / (1 + |w|²)^j`.
pub fn spin_overlap_sphere(theta: f64, phi: f64, w: Complex64, spin: Spin) -> Complex64 {
    let (s, c) = (0.5 * theta).sin_cos();
    let base = Complex64::new(c, 0.0) + Complex64::from_polar(s, -phi) * w;
    if base.norm_sqr() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    (spin.twice() as f64 * base.ln() - spin.j() * w.norm_sqr().ln_1p()).exp()
}

/// Stereographic coordinate of the sphere point `(θ, φ)`.
pub fn sphere_to_z(theta: f64, phi: f64) -> Complex64 {
    Complex64::from_polar((0.5 * theta).tan(), phi)
}

/// Inverse of [`sphere_to_z`]; `φ` in `[0, 2π)`.
pub fn z_to_sphere(z: Complex64) -> (f64, f64) {
    let theta = 2.0 * z.norm().atan();
    let phi = z.arg().rem_euclid(2.0 * PI);
    (theta, phi)
}
