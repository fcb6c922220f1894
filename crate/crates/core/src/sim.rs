//! Brute-force verification engine: dense circuit unitaries, statevector
//! application, ideal multi-controlled operators and up-to-global-phase
//! equivalence.
//!
//! Dense unitaries are built column-panel by column-panel so the working set
//! stays cache resident, with gate kernels specialized for real and diagonal
//! single-qubit matrices (the bulk of the lowered netlists).

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::su2::{Mat2, ONE};

/// Default width ceiling for dense unitaries (a 2^12 x 2^12 complex matrix).
pub const W_MAX_DENSE: usize = 12;

const PANEL: usize = 32;

/// Row-major dense `dim x dim` complex matrix with `dim` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseUnitary {
    pub fn identity(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "dimension must be a power of two");
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            data[r * dim + r] = ONE;
        }
        DenseUnitary { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    /// Entrywise max-norm distance.
    pub fn max_dev(&self, other: &DenseUnitary) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm deviation of `U† U` from the identity. O(dim^3); intended for
    /// modest widths.
    pub fn nonunitarity(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let expect = if i == j { ONE } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }

    pub fn matmul(&self, rhs: &DenseUnitary) -> DenseUnitary {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = DenseUnitary {
            dim: n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> DenseUnitary {
        let n = self.dim;
        let mut out = DenseUnitary {
            dim: n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        };
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, self.get(c, r).conj());
            }
        }
        out
    }
}

/// Normalized state vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = ONE;
        StateVector { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::DimMismatch(amps.len(), dim));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Single-qubit gate kernels, specialized by matrix structure.
enum Kernel {
    /// All-real 2x2 matrix (rotations about y, Hadamards, X).
    Real { q: usize, g: [f64; 4] },
    /// Diagonal complex matrix (rotations about z, phase gates).
    Diag { q: usize, d0: Complex64, d1: Complex64 },
    General { q: usize, m: Mat2 },
    Cnot { c: usize, t: usize },
}

fn compile(circuit: &Circuit) -> Vec<Kernel> {
    circuit
        .gates()
        .iter()
        .map(|g| match g {
            Gate::Cnot { control, target } => Kernel::Cnot { c: *control, t: *target },
            Gate::SingleQubit { target, matrix, .. } => {
                let m = *matrix;
                let all_real = m.entries().iter().all(|e| e.im == 0.0);
                let diag = m.a01 == crate::su2::ZERO && m.a10 == crate::su2::ZERO;
                if all_real {
                    Kernel::Real { q: *target, g: [m.a00.re, m.a01.re, m.a10.re, m.a11.re] }
                } else if diag {
                    Kernel::Diag { q: *target, d0: m.a00, d1: m.a11 }
                } else {
                    Kernel::General { q: *target, m }
                }
            }
        })
        .collect()
}

/// Applies one kernel to a panel of `b` columns stored row-major with row
/// stride `b` over `dim` rows.
fn apply_kernel(k: &Kernel, panel: &mut [Complex64], dim: usize, b: usize) {
    match *k {
        Kernel::Real { q, g } => {
            let mask = 1usize << q;
            let [g00, g01, g10, g11] = g;
            for base in (0..dim).step_by(mask << 1) {
                for r0 in base..base + mask {
                    let (top, bottom) = panel.split_at_mut((r0 + mask) * b);
                    let row0 = &mut top[r0 * b..r0 * b + b];
                    let row1 = &mut bottom[..b];
                    for (z0, z1) in row0.iter_mut().zip(row1.iter_mut()) {
                        let (a, c) = (*z0, *z1);
                        z0.re = g00 * a.re + g01 * c.re;
                        z0.im = g00 * a.im + g01 * c.im;
                        z1.re = g10 * a.re + g11 * c.re;
                        z1.im = g10 * a.im + g11 * c.im;
                    }
                }
            }
        }
        Kernel::Diag { q, d0, d1 } => {
            let mask = 1usize << q;
            for (r, row) in panel.chunks_exact_mut(b).enumerate() {
                let d = if r & mask == 0 { d0 } else { d1 };
                if d == ONE {
                    continue;
                }
                for z in row {
                    *z *= d;
                }
            }
        }
        Kernel::General { q, m } => {
            let mask = 1usize << q;
            for base in (0..dim).step_by(mask << 1) {
                for r0 in base..base + mask {
                    let (top, bottom) = panel.split_at_mut((r0 + mask) * b);
                    let row0 = &mut top[r0 * b..r0 * b + b];
                    let row1 = &mut bottom[..b];
                    for (z0, z1) in row0.iter_mut().zip(row1.iter_mut()) {
                        let (a, c) = (*z0, *z1);
                        *z0 = m.a00 * a + m.a01 * c;
                        *z1 = m.a10 * a + m.a11 * c;
                    }
                }
            }
        }
        Kernel::Cnot { c, t } => {
            let cmask = 1usize << c;
            let tmask = 1usize << t;
            for r in 0..dim {
                if r & cmask != 0 && r & tmask == 0 {
                    let r1 = r | tmask;
                    let (top, bottom) = panel.split_at_mut(r1 * b);
                    top[r * b..r * b + b].swap_with_slice(&mut bottom[..b]);
                }
            }
        }
    }
}

/// Dense unitary of `circuit` under the qubit-0-least-significant convention,
/// limited to [`W_MAX_DENSE`] qubits.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DenseUnitary> {
    circuit_unitary_with_limit(circuit, W_MAX_DENSE)
}

pub fn circuit_unitary_with_limit(circuit: &Circuit, w_max: usize) -> Result<DenseUnitary> {
    let width = circuit.width();
    if width > w_max {
        return Err(Error::TooWide { width, max: w_max });
    }
    let dim = 1usize << width;
    let kernels = compile(circuit);
    let mut out = DenseUnitary {
        dim,
        data: vec![Complex64::new(0.0, 0.0); dim * dim],
    };
    let mut panel = vec![Complex64::new(0.0, 0.0); dim * PANEL];
    let mut col = 0;
    while col < dim {
        let b = PANEL.min(dim - col);
        let panel = &mut panel[..dim * b];
        panel.fill(Complex64::new(0.0, 0.0));
        for j in 0..b {
            panel[(col + j) * b + j] = ONE;
        }
        for k in &kernels {
            apply_kernel(k, panel, dim, b);
        }
        for r in 0..dim {
            out.data[r * dim + col..r * dim + col + b].copy_from_slice(&panel[r * b..r * b + b]);
        }
        col += b;
    }
    Ok(out)
}

/// Applies `circuit` to a state, gate by gate.
pub fn apply(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    if circuit.width() != state.n_qubits() {
        return Err(Error::DimMismatch(1 << circuit.width(), state.amps.len()));
    }
    let dim = state.amps.len();
    let mut amps = state.amps.clone();
    for k in compile(circuit) {
        apply_kernel(&k, &mut amps, dim, 1);
    }
    Ok(StateVector { n_qubits: state.n_qubits, amps })
}

/// The ideal multi-controlled operator: identity except that `v` acts on the
/// target within the all-controls-one subspace. `v` may be any single-qubit
/// unitary (`X` gives the plain multi-controlled X).
pub fn ideal_mc_unitary(
    width: usize,
    controls: &[usize],
    target: usize,
    v: &Mat2,
) -> Result<DenseUnitary> {
    let mut seen = std::collections::HashSet::new();
    for &q in controls.iter().chain(std::iter::once(&target)) {
        if q >= width {
            return Err(Error::QubitOutOfRange { qubit: q, width });
        }
        if !seen.insert(q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    let dim = 1usize << width;
    let cmask: usize = controls.iter().map(|&q| 1usize << q).sum();
    let tmask = 1usize << target;
    let mut out = DenseUnitary::identity(dim);
    for i in 0..dim {
        if i & cmask == cmask && i & tmask == 0 {
            let j = i | tmask;
            out.set(i, i, v.a00);
            out.set(i, j, v.a01);
            out.set(j, i, v.a10);
            out.set(j, j, v.a11);
        }
    }
    Ok(out)
}

/// Up-to-global-phase equivalence: finds the unit scalar `lambda` from the
/// largest-magnitude entry of `w` and reports `max |u - lambda w|`.
pub fn equiv_phase(
    u: &DenseUnitary,
    w: &DenseUnitary,
    tol: f64,
) -> Result<(bool, f64, Complex64)> {
    if u.dim != w.dim {
        return Err(Error::DimMismatch(u.dim, w.dim));
    }
    let mut best = 0usize;
    let mut best_mag = -1.0f64;
    for (idx, e) in w.data.iter().enumerate() {
        let m = e.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = idx;
        }
    }
    let lambda = if best_mag > 0.0 && u.data[best].norm() > 0.0 {
        let raw = u.data[best] / w.data[best];
        raw / raw.norm()
    } else {
        ONE
    };
    let mut max_err = 0.0f64;
    for (a, b) in u.data.iter().zip(&w.data) {
        max_err = max_err.max((a - lambda * b).norm());
    }
    Ok((max_err < tol, max_err, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::random_su2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_circuit(width: usize, gates: usize, rng: &mut impl Rng) -> Circuit {
        let mut c = Circuit::new(width);
        for _ in 0..gates {
            if rng.gen_bool(0.5) && width >= 2 {
                let a = rng.gen_range(0..width);
                let mut b = rng.gen_range(0..width);
                while b == a {
                    b = rng.gen_range(0..width);
                }
                c.push_cnot(a, b).unwrap();
            } else {
                let q = rng.gen_range(0..width);
                c.push_single(q, *random_su2(rng).mat()).unwrap();
            }
        }
        c
    }

    #[test]
    fn empty_circuit_is_identity() {
        let u = circuit_unitary(&Circuit::new(3)).unwrap();
        assert!(u.max_dev(&DenseUnitary::identity(8)) < 1e-15);
    }

    #[test]
    fn x_gate_unitary() {
        let mut c = Circuit::new(1);
        c.push_single(0, Mat2::pauli_x()).unwrap();
        let u = circuit_unitary(&c).unwrap();
        assert!((u.get(0, 1) - ONE).norm() < 1e-15);
        assert!((u.get(1, 0) - ONE).norm() < 1e-15);
        assert!(u.get(0, 0).norm() < 1e-15 && u.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn random_circuit_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let c = random_circuit(6, 60, &mut rng);
        let u = circuit_unitary(&c).unwrap();
        assert!(u.nonunitarity() < 1e-12);
    }

    #[test]
    fn compose_is_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let a = random_circuit(4, 25, &mut rng);
        let b = random_circuit(4, 25, &mut rng);
        let ua = circuit_unitary(&a).unwrap();
        let ub = circuit_unitary(&b).unwrap();
        let uc = circuit_unitary(&a.compose(&b).unwrap()).unwrap();
        assert!(uc.max_dev(&ub.matmul(&ua)) < 1e-12);
    }

    #[test]
    fn inverse_gives_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let c = random_circuit(5, 40, &mut rng);
        let u = circuit_unitary(&c).unwrap();
        let uinv = circuit_unitary(&c.inverse()).unwrap();
        assert!(uinv.matmul(&u).max_dev(&DenseUnitary::identity(32)) < 1e-10);
    }

    #[test]
    fn too_wide_is_rejected() {
        let c = Circuit::new(13);
        assert!(matches!(circuit_unitary(&c), Err(Error::TooWide { width: 13, max: 12 })));
    }

    #[test]
    fn apply_x_flips_lowest_qubit() {
        let mut c = Circuit::new(3);
        c.push_single(0, Mat2::pauli_x()).unwrap();
        let s = apply(&c, &StateVector::zero_state(3)).unwrap();
        assert!((s.amplitudes()[1] - ONE).norm() < 1e-15);
    }

    #[test]
    fn apply_cnot_endianness() {
        // CNOT(0 -> 1) maps index 1 (qubit 0 set) to index 3.
        let mut c = Circuit::new(2);
        c.push_cnot(0, 1).unwrap();
        let s = apply(&c, &StateVector::basis(2, 1)).unwrap();
        assert!((s.amplitudes()[3] - ONE).norm() < 1e-15);
    }

    #[test]
    fn apply_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let c = random_circuit(6, 50, &mut rng);
            let u = circuit_unitary(&c).unwrap();
            let idx = rng.gen_range(0..64);
            let s = apply(&c, &StateVector::basis(6, idx)).unwrap();
            for r in 0..64 {
                assert!((s.amplitudes()[r] - u.get(r, idx)).norm() < 1e-12);
            }
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_mc_is_cnot_and_ccx() {
        let u = ideal_mc_unitary(2, &[0], 1, &Mat2::pauli_x()).unwrap();
        let mut cnot = Circuit::new(2);
        cnot.push_cnot(0, 1).unwrap();
        assert!(u.max_dev(&circuit_unitary(&cnot).unwrap()) < 1e-15);

        let ccx = ideal_mc_unitary(3, &[0, 1], 2, &Mat2::pauli_x()).unwrap();
        assert!((ccx.get(0b111, 0b011) - ONE).norm() < 1e-15);
        assert!((ccx.get(0b011, 0b111) - ONE).norm() < 1e-15);
        assert!(ccx.get(0b011, 0b011).norm() < 1e-15);
    }

    #[test]
    fn ideal_mc_identity_block() {
        let u = ideal_mc_unitary(4, &[0, 1], 3, &Mat2::identity()).unwrap();
        assert!(u.max_dev(&DenseUnitary::identity(16)) < 1e-15);
    }

    #[test]
    fn ideal_mc_times_adjoint_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let v = random_su2(&mut rng);
        let u = ideal_mc_unitary(5, &[1, 3], 0, v.mat()).unwrap();
        let w = ideal_mc_unitary(5, &[1, 3], 0, &v.mat().adjoint()).unwrap();
        assert!(u.matmul(&w).max_dev(&DenseUnitary::identity(32)) < 1e-12);
    }

    #[test]
    fn equiv_phase_detects_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let c = random_circuit(4, 20, &mut rng);
        let u = circuit_unitary(&c).unwrap();
        let mut w = u.clone();
        let phase = Complex64::from_polar(1.0, std::f64::consts::PI / 7.0);
        for e in &mut w.data {
            *e *= phase;
        }
        let (ok, err, lambda) = equiv_phase(&u, &w, 1e-10).unwrap();
        assert!(ok, "residual {err}");
        assert!((lambda - phase.conj()).norm() < 1e-12);

        let (ok, err, lambda) = equiv_phase(&u, &u, 1e-12).unwrap();
        assert!(ok && err < 1e-15);
        assert!((lambda - ONE).norm() < 1e-15);
    }

    #[test]
    fn equiv_phase_rejects_dim_mismatch() {
        let a = DenseUnitary::identity(4);
        let b = DenseUnitary::identity(8);
        assert!(matches!(equiv_phase(&a, &b, 1e-9), Err(Error::DimMismatch(4, 8))));
    }
}
