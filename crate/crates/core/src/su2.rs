//! Complex 2x2 matrix algebra, SU(2) predicates and the closed-form solvers
//! used by the multi-controlled gate decompositions.
//!
//! The central objects are matrices of the form
//!
//! ```text
//!   A = | alpha  -conj(beta) |        V = | conj(z)   x |
//!       | beta    conj(alpha)|            |   -x      z |
//! ```
//!
//! with `|alpha|^2 + |beta|^2 = 1` and `|z|^2 + x^2 = 1` (`x` real). The
//! solvers answer: given `V` with a real off-diagonal, which `A` satisfies
//! `(A† X A X)^2 = V`, and which `B` satisfies `B† X B X = V`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default numerical tolerance for unitarity / equality checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Threshold on `Re(z) + 1` below which the closed-form -I branch is taken.
pub const EPS_SING: f64 = 1e-9;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a00: Complex64,
    pub a01: Complex64,
    pub a10: Complex64,
    pub a11: Complex64,
}

impl Mat2 {
    pub const fn new(a00: Complex64, a01: Complex64, a10: Complex64, a11: Complex64) -> Self {
        Mat2 { a00, a01, a10, a11 }
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn pauli_x() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn pauli_z() -> Self {
        Mat2::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::new(h.into(), h.into(), h.into(), (-h).into())
    }

    /// The reflected Hadamard satisfying `X H = H~ X`.
    pub fn hadamard_tilde() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::new((-h).into(), h.into(), h.into(), h.into())
    }

    pub fn t_gate() -> Self {
        Mat2::new(ONE, ZERO, ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4))
    }

    pub fn t_dagger() -> Self {
        Mat2::t_gate().adjoint()
    }

    pub fn rx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Mat2::new(c.into(), -I * s, -I * s, c.into())
    }

    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Mat2::new(c.into(), (-s).into(), s.into(), c.into())
    }

    pub fn rz(theta: f64) -> Self {
        Mat2::new(
            Complex64::from_polar(1.0, -theta / 2.0),
            ZERO,
            ZERO,
            Complex64::from_polar(1.0, theta / 2.0),
        )
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            self.a00 * rhs.a00 + self.a01 * rhs.a10,
            self.a00 * rhs.a01 + self.a01 * rhs.a11,
            self.a10 * rhs.a00 + self.a11 * rhs.a10,
            self.a10 * rhs.a01 + self.a11 * rhs.a11,
        )
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2::new(self.a00.conj(), self.a10.conj(), self.a01.conj(), self.a11.conj())
    }

    pub fn det(&self) -> Complex64 {
        self.a00 * self.a11 - self.a01 * self.a10
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        Mat2::new(self.a00 * s, self.a01 * s, self.a10 * s, self.a11 * s)
    }

    /// Entrywise max-norm distance.
    pub fn max_dev(&self, rhs: &Mat2) -> f64 {
        [
            (self.a00 - rhs.a00).norm(),
            (self.a01 - rhs.a01).norm(),
            (self.a10 - rhs.a10).norm(),
            (self.a11 - rhs.a11).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        [self.a00, self.a01, self.a10, self.a11]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Max-norm deviation of `M M†` from the identity.
    pub fn nonunitarity(&self) -> f64 {
        self.mul(&self.adjoint()).max_dev(&Mat2::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_finite() && self.nonunitarity() <= tol
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a00, self.a01, self.a10, self.a11]
    }
}

/// True iff `m` is unitary with determinant 1, both within `tol`.
pub fn is_su2(m: &Mat2, tol: f64) -> bool {
    m.is_unitary(tol) && (m.det() - ONE).norm() <= tol
}

/// A validated special-unitary 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2(Mat2);

impl Su2 {
    /// Validates unitarity and det = 1 within `tol`.
    pub fn new(m: Mat2, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NotSpecialUnitary {
                tol,
                detail: "non-finite entries".into(),
            });
        }
        let nu = m.nonunitarity();
        let dd = (m.det() - ONE).norm();
        if nu > tol || dd > tol {
            return Err(Error::NotSpecialUnitary {
                tol,
                detail: format!("unitarity residual {nu:.3e}, det residual {dd:.3e}"),
            });
        }
        Ok(Su2(m))
    }

    /// Construction from `(alpha, beta)`; normalizes rounding in the caller's court.
    pub fn from_alpha_beta(alpha: Complex64, beta: Complex64) -> Self {
        Su2(Mat2::new(alpha, -beta.conj(), beta, alpha.conj()))
    }

    pub fn identity() -> Self {
        Su2(Mat2::identity())
    }

    pub fn rx(theta: f64) -> Self {
        Su2(Mat2::rx(theta))
    }

    pub fn ry(theta: f64) -> Self {
        Su2(Mat2::ry(theta))
    }

    pub fn rz(theta: f64) -> Self {
        Su2(Mat2::rz(theta))
    }

    pub fn mat(&self) -> &Mat2 {
        &self.0
    }

    pub fn into_mat(self) -> Mat2 {
        self.0
    }

    pub fn adjoint(&self) -> Su2 {
        Su2(self.0.adjoint())
    }

    pub fn alpha(&self) -> Complex64 {
        self.0.a00
    }

    pub fn beta(&self) -> Complex64 {
        self.0.a10
    }
}

/// Which diagonal of an SU(2) matrix is real-valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalClass {
    /// Real off-diagonal: the form `(conj(z), x; -x, z)` applies directly.
    RealOffDiag,
    /// Real main diagonal: the Hadamard-conjugated form applies.
    RealMainDiag,
    /// Entirely real matrix.
    Both,
    /// Neither diagonal real: route through the eigendecomposition pipeline.
    Neither,
}

/// Classifies which diagonal of `m` has vanishing imaginary parts within `tol`.
pub fn classify_diagonal(m: &Su2, tol: f64) -> DiagonalClass {
    let mm = m.mat();
    let off = mm.a01.im.abs() <= tol && mm.a10.im.abs() <= tol;
    let main = mm.a00.im.abs() <= tol && mm.a11.im.abs() <= tol;
    match (off, main) {
        (true, true) => DiagonalClass::Both,
        (true, false) => DiagonalClass::RealOffDiag,
        (false, true) => DiagonalClass::RealMainDiag,
        (false, false) => DiagonalClass::Neither,
    }
}

/// The `(z, x)` parametrization of an SU(2) matrix with real off-diagonal:
/// `V = (conj(z), x; -x, z)` with `x` real and `|z|^2 + x^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealOffDiagForm {
    pub z: Complex64,
    pub x: f64,
}

impl RealOffDiagForm {
    /// Validates the unit-norm constraint `|z|^2 + x^2 = 1` within `tol`.
    pub fn new(z: Complex64, x: f64, tol: f64) -> Result<Self> {
        let norm = z.norm_sqr() + x * x;
        if !norm.is_finite() || (norm - 1.0).abs() > tol.max(1e-12) * 10.0 {
            return Err(Error::NotSpecialUnitary {
                tol,
                detail: format!("|z|^2 + x^2 = {norm} != 1"),
            });
        }
        Ok(RealOffDiagForm { z, x })
    }

    /// Reads the form off a matrix with real off-diagonal entries.
    pub fn from_matrix(m: &Su2, tol: f64) -> Result<Self> {
        let mm = m.mat();
        if mm.a01.im.abs() > tol || mm.a10.im.abs() > tol {
            return Err(Error::NotSpecialUnitary {
                tol,
                detail: "off-diagonal is not real".into(),
            });
        }
        RealOffDiagForm::new(mm.a11, mm.a01.re, tol)
    }

    pub fn matrix(&self) -> Su2 {
        Su2(Mat2::new(self.z.conj(), self.x.into(), (-self.x).into(), self.z))
    }
}

/// Solution pair of `z = w1^2 - w2^2`, `x = 2 Re(w1) w2` with `|w1|^2 + w2^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaPair {
    pub omega1: Complex64,
    pub omega2: f64,
}

/// Positive-branch closed form:
///
/// ```text
///   w1 = sqrt((Re z + 1)/2) + i Im(z)/sqrt(2 (Re z + 1))
///   w2 = x / sqrt(2 (Re z + 1))
/// ```
///
/// Fails with `SingularInput` for `Re(z) <= -1 + eps` (the -I corner, where
/// the denominators vanish; see `solve_a_gate` for the closed-form handling).
pub fn solve_omega(v: &RealOffDiagForm) -> Result<OmegaPair> {
    let s = v.z.re + 1.0;
    if s < EPS_SING {
        return Err(Error::SingularInput(s));
    }
    let denom = (2.0 * s).sqrt();
    Ok(OmegaPair {
        omega1: Complex64::new((s / 2.0).sqrt(), v.z.im / denom),
        omega2: v.x / denom,
    })
}

/// Solves `(A† X A X)^2 = V` for `A` with real `beta`:
///
/// ```text
///   a = sqrt((Re w1 + 1)/2),  b = Im(w1)/(2a),  c = w2/(2a),  A = (a+ib, -c; c, a-ib)
/// ```
///
/// At the -I corner the closed form `A = diag(e^{-i pi/4}, e^{i pi/4})`
/// reproduces `(A† X A X)^2 = -I` exactly.
pub fn solve_a_gate(v: &RealOffDiagForm) -> Result<Su2> {
    match solve_omega(v) {
        Ok(w) => {
            let a = ((w.omega1.re + 1.0) / 2.0).sqrt();
            let b = w.omega1.im / (2.0 * a);
            let c = w.omega2 / (2.0 * a);
            Ok(Su2::from_alpha_beta(Complex64::new(a, b), c.into()))
        }
        Err(Error::SingularInput(_)) => {
            // Unit norm forces x and Im(z) to vanish here, so V = -I.
            let q = std::f64::consts::FRAC_PI_4;
            Ok(Su2(Mat2::new(
                Complex64::from_polar(1.0, -q),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, q),
            )))
        }
        Err(e) => Err(e),
    }
}

/// Solves the half-depth identity `B† X B X = V`, with `B` built directly
/// from the omega pair: `B = (w1, -w2; w2, conj(w1))`.
pub fn solve_b_half(v: &RealOffDiagForm) -> Result<Su2> {
    let w = solve_omega(v)?;
    Ok(Su2::from_alpha_beta(w.omega1, w.omega2.into()))
}

/// Eigendecomposition `Q D Q†` with `D = diag(e^{i theta}, e^{-i theta})`
/// and `Q` special unitary with a real main diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomp {
    pub q: Su2,
    pub d_phase: f64,
}

impl EigenDecomp {
    pub fn d_matrix(&self) -> Su2 {
        Su2(Mat2::new(
            Complex64::from_polar(1.0, self.d_phase),
            ZERO,
            ZERO,
            Complex64::from_polar(1.0, -self.d_phase),
        ))
    }

    pub fn reconstruct(&self) -> Mat2 {
        self.q.mat().mul(self.d_matrix().mat()).mul(&self.q.mat().adjoint())
    }
}

/// Diagonalizes `v` in SU(2). The eigenvector phase is chosen so the first
/// column has a real non-negative first component; the second column is
/// `(-conj(b), a)`, which keeps `Q` special unitary with a real main diagonal.
/// The sign of `theta` is fixed so that the first column is the eigenvector
/// with the dominant first component (`Rz`-like inputs give `Q = I`).
pub fn eigendecompose(v: &Su2) -> Result<EigenDecomp> {
    let alpha = v.alpha();
    let beta = v.beta();
    let c = alpha.re.clamp(-1.0, 1.0);
    let theta0 = c.acos();
    if theta0.sin().abs() < 1e-12 {
        return Err(Error::DegenerateSpectrum);
    }
    let lambda = Complex64::from_polar(1.0, theta0);
    // Two candidate eigenvectors for eigenvalue e^{i theta0}; at least one is
    // nonzero away from the degenerate corner.
    let (ua, ub) = (
        (beta.conj(), alpha - lambda),
        (lambda - alpha.conj(), beta),
    );
    let na = ua.0.norm_sqr() + ua.1.norm_sqr();
    let nb = ub.0.norm_sqr() + ub.1.norm_sqr();
    let u = if na >= nb { ua } else { ub };
    let norm = (u.0.norm_sqr() + u.1.norm_sqr()).sqrt();
    let u = (u.0 / norm, u.1 / norm);

    let (col, theta) = if u.0.norm() >= u.1.norm() {
        (u, theta0)
    } else {
        // Swap eigenvalue roles: the orthogonal complement (-conj(u1), conj(u0))
        // is the eigenvector for e^{-i theta0} and has the larger first component.
        ((-u.1.conj(), u.0.conj()), -theta0)
    };
    let phase = Complex64::from_polar(1.0, -col.0.arg());
    let a = (col.0 * phase).re.max(0.0);
    let b = col.1 * phase;
    Ok(EigenDecomp {
        q: Su2::from_alpha_beta(a.into(), b),
        d_phase: theta,
    })
}

/// ZYZ Euler angles: `u = e^{i phase} Rz(beta) Ry(gamma) Rz(delta)` with
/// `gamma` in `[0, pi]` and `beta`, `delta` wrapped to `(-pi, pi]`.
///
/// Wrapping `beta` and `delta` independently can negate the half-angle
/// exponentials (the SU(2) double cover); the sign is folded back into
/// `phase`.
pub fn zyz_angles(u: &Mat2) -> (f64, f64, f64, f64) {
    let det = u.det();
    let mut phase = det.arg() / 2.0;
    let v = u.scale(Complex64::from_polar(1.0, -phase));
    let (a, b) = (v.a00, v.a10);
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let (beta, delta) = if b.norm() < 1e-12 {
        (wrap_angle(-2.0 * a.arg()), 0.0)
    } else if a.norm() < 1e-12 {
        (wrap_angle(2.0 * b.arg()), 0.0)
    } else {
        (
            wrap_angle(b.arg() - a.arg()),
            wrap_angle(-a.arg() - b.arg()),
        )
    };
    let rebuilt = Mat2::rz(beta).mul(&Mat2::ry(gamma)).mul(&Mat2::rz(delta));
    if rebuilt.max_dev(&v) > rebuilt.scale(-ONE).max_dev(&v) {
        phase = wrap_angle(phase + std::f64::consts::PI);
    }
    (phase, beta, gamma, delta)
}

fn wrap_angle(t: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = t % two_pi;
    if t <= -std::f64::consts::PI {
        t += two_pi;
    } else if t > std::f64::consts::PI {
        t -= two_pi;
    }
    t
}

/// Splits `w` into `(a, b, c)` with `a b c = I` and `a X b X c = w`.
///
/// Built on the ZYZ angles of `w`: `a = Rz(beta) Ry(gamma/2)`,
/// `b = Ry(-gamma/2) Rz(-(delta+beta)/2)`, `c = Rz((delta-beta)/2)`. When
/// the wrapped angles reproduce `-w`, shifting `beta` by `2 pi` (which
/// negates `Rz`) absorbs the sign while keeping `a b c = I`.
pub fn abc_decompose(w: &Su2) -> (Su2, Su2, Su2) {
    let (phase, mut beta, gamma, delta) = zyz_angles(w.mat());
    if phase.abs() > std::f64::consts::FRAC_PI_2 {
        beta += 2.0 * std::f64::consts::PI;
    }
    let a = Mat2::rz(beta).mul(&Mat2::ry(gamma / 2.0));
    let b = Mat2::ry(-gamma / 2.0).mul(&Mat2::rz(-(delta + beta) / 2.0));
    let c = Mat2::rz((delta - beta) / 2.0);
    (Su2(a), Su2(b), Su2(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_off_diag, random_su2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x() -> Mat2 {
        Mat2::pauli_x()
    }

    fn axax(a: &Su2) -> Mat2 {
        a.mat().adjoint().mul(&x()).mul(a.mat()).mul(&x())
    }

    #[test]
    fn identity_is_su2() {
        assert!(is_su2(&Mat2::identity(), 1e-10));
    }

    #[test]
    fn pauli_x_has_det_minus_one() {
        assert!(!is_su2(&Mat2::pauli_x(), 1e-10));
    }

    #[test]
    fn i_times_x_is_su2() {
        let m = Mat2::new(ZERO, I, I, ZERO);
        assert!(is_su2(&m, 1e-10));
    }

    #[test]
    fn classify_rotations() {
        let tol = 1e-10;
        let rz = Su2::rz(0.7);
        let rx = Su2::rx(0.7);
        let ry = Su2::ry(0.7);
        assert_eq!(classify_diagonal(&rz, tol), DiagonalClass::RealOffDiag);
        assert_eq!(classify_diagonal(&rx, tol), DiagonalClass::RealMainDiag);
        assert_eq!(classify_diagonal(&ry, tol), DiagonalClass::Both);
    }

    #[test]
    fn classify_stable_under_small_perturbation() {
        let tol = 1e-8;
        let mut m = *Su2::rz(0.7).mat();
        m.a01 += Complex64::new(0.0, tol / 10.0);
        let s = Su2(m);
        assert_eq!(classify_diagonal(&s, tol), DiagonalClass::RealOffDiag);
    }

    #[test]
    fn omega_identity_case() {
        let v = RealOffDiagForm { z: ONE, x: 0.0 };
        let w = solve_omega(&v).unwrap();
        assert!((w.omega1 - ONE).norm() < 1e-14);
        assert!(w.omega2.abs() < 1e-14);
    }

    #[test]
    fn omega_quarter_case() {
        let v = RealOffDiagForm { z: ZERO, x: 1.0 };
        let w = solve_omega(&v).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w.omega1.re - r).abs() < 1e-12);
        assert!(w.omega1.im.abs() < 1e-12);
        assert!((w.omega2 - r).abs() < 1e-12);
    }

    #[test]
    fn omega_defining_equations_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let v = random_off_diag(&mut rng);
            if v.z.re + 1.0 < EPS_SING {
                continue;
            }
            let w = solve_omega(&v).unwrap();
            let z_back = w.omega1 * w.omega1 - w.omega2 * w.omega2;
            let x_back = 2.0 * w.omega1.re * w.omega2;
            assert!((z_back - v.z).norm() < 1e-12);
            assert!((x_back - v.x).abs() < 1e-12);
            assert!((w.omega1.norm_sqr() + w.omega2 * w.omega2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn omega_rejects_singular() {
        let v = RealOffDiagForm { z: -ONE, x: 0.0 };
        assert!(matches!(solve_omega(&v), Err(Error::SingularInput(_))));
    }

    #[test]
    fn a_gate_identity_and_quarter() {
        let v = RealOffDiagForm { z: ONE, x: 0.0 };
        let a = solve_a_gate(&v).unwrap();
        assert!(a.mat().max_dev(&Mat2::identity()) < 1e-12);

        let v = RealOffDiagForm { z: ZERO, x: 1.0 };
        let a = solve_a_gate(&v).unwrap();
        assert!((a.alpha().re - 0.923_879_532_511_286_7).abs() < 1e-12);
        assert!(a.alpha().im.abs() < 1e-12);
        assert!((a.beta().re - 0.382_683_432_365_089_8).abs() < 1e-12);
        let rebuilt = axax(&a).mul(&axax(&a));
        assert!(rebuilt.max_dev(v.matrix().mat()) < 1e-12);
    }

    #[test]
    fn a_gate_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let v = random_off_diag(&mut rng);
            let a = solve_a_gate(&v).unwrap();
            assert!(is_su2(a.mat(), 1e-12), "solver output drifted off SU(2)");
            let rebuilt = axax(&a).mul(&axax(&a));
            assert!(rebuilt.max_dev(v.matrix().mat()) < 1e-10);
        }
    }

    #[test]
    fn a_gate_minus_identity_closed_form() {
        let v = RealOffDiagForm { z: -ONE, x: 0.0 };
        let a = solve_a_gate(&v).unwrap();
        let rebuilt = axax(&a).mul(&axax(&a));
        let minus_i = Mat2::identity().scale(-ONE);
        assert!(rebuilt.max_dev(&minus_i) < 1e-15);
    }

    #[test]
    fn b_half_identity_and_quarter() {
        let v = RealOffDiagForm { z: ONE, x: 0.0 };
        let b = solve_b_half(&v).unwrap();
        assert!(b.mat().max_dev(&Mat2::identity()) < 1e-12);

        let v = RealOffDiagForm { z: ZERO, x: 1.0 };
        let b = solve_b_half(&v).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b.alpha().re - r).abs() < 1e-12 && (b.beta().re - r).abs() < 1e-12);
        assert!(axax(&b).max_dev(v.matrix().mat()) < 1e-12);
    }

    #[test]
    fn b_half_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let v = random_off_diag(&mut rng);
            if v.z.re + 1.0 < EPS_SING {
                continue;
            }
            let b = solve_b_half(&v).unwrap();
            assert!(axax(&b).max_dev(v.matrix().mat()) < 1e-10);
        }
    }

    #[test]
    fn eigendecompose_rz_gives_identity_q() {
        let d = eigendecompose(&Su2::rz(0.8)).unwrap();
        assert!(d.q.mat().max_dev(&Mat2::identity()) < 1e-12);
        assert!((d.d_phase - (-0.4)).abs() < 1e-12);
    }

    #[test]
    fn eigendecompose_rx() {
        let v = Su2::rx(1.1);
        let d = eigendecompose(&v).unwrap();
        assert!(d.q.mat().a00.im.abs() < 1e-12);
        assert!(d.q.mat().a11.im.abs() < 1e-12);
        assert!(d.reconstruct().max_dev(v.mat()) < 1e-12);
    }

    #[test]
    fn eigendecompose_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let v = random_su2(&mut rng);
            if (v.alpha().re.abs() - 1.0).abs() < 1e-6 {
                continue;
            }
            let d = eigendecompose(&v).unwrap();
            assert!(is_su2(d.q.mat(), 1e-10));
            assert!(d.q.mat().a00.im.abs() < 1e-12);
            assert!(d.q.mat().a11.im.abs() < 1e-12);
            assert!(d.reconstruct().max_dev(v.mat()) < 1e-10);
        }
    }

    #[test]
    fn eigendecompose_rejects_identity() {
        assert!(matches!(
            eigendecompose(&Su2::identity()),
            Err(Error::DegenerateSpectrum)
        ));
    }

    #[test]
    fn zyz_identity_and_ry() {
        let (p, b, g, d) = zyz_angles(&Mat2::identity());
        assert!(p.abs() < 1e-12 && b.abs() < 1e-12 && g.abs() < 1e-12 && d.abs() < 1e-12);

        let (p, b, g, d) = zyz_angles(Su2::ry(0.3).mat());
        assert!(p.abs() < 1e-12 && b.abs() < 1e-12 && d.abs() < 1e-12);
        assert!((g - 0.3).abs() < 1e-12);
    }

    #[test]
    fn zyz_reconstructs_random_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..1000 {
            let s = random_su2(&mut rng);
            // Random global phase makes it a generic U(2).
            let u = s.mat().scale(Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)));
            let (p, b, g, d) = zyz_angles(&u);
            assert!((0.0..=std::f64::consts::PI + 1e-12).contains(&g));
            let rebuilt = Mat2::rz(b)
                .mul(&Mat2::ry(g))
                .mul(&Mat2::rz(d))
                .scale(Complex64::from_polar(1.0, p));
            assert!(rebuilt.max_dev(&u) < 1e-12);
        }
    }

    #[test]
    fn abc_identity() {
        let (a, b, c) = abc_decompose(&Su2::identity());
        for m in [&a, &b, &c] {
            assert!(m.mat().max_dev(&Mat2::identity()) < 1e-12);
        }
    }

    #[test]
    fn abc_symmetric_form_gives_b_adjoint_of_a() {
        let (beta, theta) = (0.9, 0.5);
        let w = Su2(Mat2::rz(beta).mul(&Mat2::ry(theta)).mul(&Mat2::rz(beta)));
        let (a, b, c) = abc_decompose(&w);
        let expect_a = Mat2::rz(beta).mul(&Mat2::ry(theta / 2.0));
        assert!(a.mat().max_dev(&expect_a) < 1e-12);
        assert!(b.mat().max_dev(&a.adjoint().into_mat()) < 1e-12);
        assert!(c.mat().max_dev(&Mat2::identity()) < 1e-12);
    }

    #[test]
    fn abc_random_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let w = random_su2(&mut rng);
            let (a, b, c) = abc_decompose(&w);
            let abc = a.mat().mul(b.mat()).mul(c.mat());
            assert!(abc.max_dev(&Mat2::identity()) < 1e-12);
            let axbxc = a.mat().mul(&x()).mul(b.mat()).mul(&x()).mul(c.mat());
            assert!(axbxc.max_dev(w.mat()) < 1e-12);
        }
    }

    #[test]
    fn hadamard_tilde_commutation() {
        // X H = H~ X
        let lhs = Mat2::pauli_x().mul(&Mat2::hadamard());
        let rhs = Mat2::hadamard_tilde().mul(&Mat2::pauli_x());
        assert!(lhs.max_dev(&rhs) < 1e-15);
    }
}
