//! Seeded random generators for gates and forms, used by the benchmark
//! harness and the verification suites.

use num_complex::Complex64;
use rand::Rng;

use crate::su2::{RealOffDiagForm, Su2};

/// Standard normal via Box-Muller; avoids an extra distribution dependency.
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

/// Haar-distributed SU(2) element via a uniform point on the 3-sphere.
pub fn random_su2(rng: &mut impl Rng) -> Su2 {
    let q: [f64; 4] = std::array::from_fn(|_| standard_normal(rng));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    Su2::from_alpha_beta(
        Complex64::new(q[0] / n, q[3] / n),
        Complex64::new(-q[2] / n, q[1] / n),
    )
}

/// Uniform `(z, x)` on the unit 3-sphere of `|z|^2 + x^2 = 1`.
pub fn random_off_diag(rng: &mut impl Rng) -> RealOffDiagForm {
    let v: [f64; 3] = std::array::from_fn(|_| standard_normal(rng));
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    RealOffDiagForm {
        z: Complex64::new(v[0] / n, v[1] / n),
        x: v[2] / n,
    }
}

/// Random SU(2) matrix with a real main diagonal: `(x', -z'; conj(z'), x')`.
pub fn random_real_main_diag(rng: &mut impl Rng) -> Su2 {
    let v: [f64; 3] = std::array::from_fn(|_| standard_normal(rng));
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    // alpha = x' real, beta = conj(z')
    Su2::from_alpha_beta(
        Complex64::new(v[0] / n, 0.0),
        Complex64::new(v[1] / n, -v[2] / n),
    )
}
