//! Gate-level circuit IR: single-qubit unitaries and CNOTs on indexed
//! qubits, with counting, depth, inversion, composition and OpenQASM 2.0
//! export.
//!
//! Qubit 0 is the least significant bit of computational-basis indices.
//! Gates apply left to right to state vectors, so the circuit unitary is the
//! right-to-left matrix product of the gate embeddings.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::su2::{zyz_angles, Mat2};

pub type QubitId = usize;

/// A gate in the IR. Single-qubit gates carry the concrete matrix (which is
/// authoritative) plus an optional label used only for debugging output.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    SingleQubit {
        target: QubitId,
        matrix: Mat2,
        label: Option<&'static str>,
    },
    Cnot {
        control: QubitId,
        target: QubitId,
    },
}

impl Gate {
    pub fn single(target: QubitId, matrix: Mat2) -> Self {
        Gate::SingleQubit { target, matrix, label: None }
    }

    pub fn labeled(target: QubitId, matrix: Mat2, label: &'static str) -> Self {
        Gate::SingleQubit { target, matrix, label: Some(label) }
    }

    pub fn cnot(control: QubitId, target: QubitId) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn qubits(&self) -> impl Iterator<Item = QubitId> {
        let (first, second) = match self {
            Gate::SingleQubit { target, .. } => (*target, None),
            Gate::Cnot { control, target } => (*control, Some(*target)),
        };
        std::iter::once(first).chain(second)
    }

    /// The gate applied in reverse time: conjugate transpose of the matrix,
    /// CNOTs are self-inverse.
    pub fn dagger(&self) -> Gate {
        match self {
            Gate::SingleQubit { target, matrix, label: _ } => Gate::single(*target, matrix.adjoint()),
            g @ Gate::Cnot { .. } => g.clone(),
        }
    }
}

/// An ordered gate list over `width` qubits. The CNOT count is cached and
/// kept consistent by every mutating operation.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    cnots: usize,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, gates: Vec::new(), cnots: 0 }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends `g`, validating qubit ranges and control/target distinctness.
    pub fn append(&mut self, g: Gate) -> Result<()> {
        match &g {
            Gate::SingleQubit { target, .. } => {
                if *target >= self.width {
                    return Err(Error::QubitOutOfRange { qubit: *target, width: self.width });
                }
            }
            Gate::Cnot { control, target } => {
                if control == target {
                    return Err(Error::DuplicateQubit(*control));
                }
                for q in [*control, *target] {
                    if q >= self.width {
                        return Err(Error::QubitOutOfRange { qubit: q, width: self.width });
                    }
                }
                self.cnots += 1;
            }
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn push_single(&mut self, target: QubitId, matrix: Mat2) -> Result<()> {
        self.append(Gate::single(target, matrix))
    }

    pub fn push_cnot(&mut self, control: QubitId, target: QubitId) -> Result<()> {
        self.append(Gate::cnot(control, target))
    }

    /// Concatenation: the gates of `self` followed by the gates of `other`.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit> {
        if self.width != other.width {
            return Err(Error::WidthMismatch(self.width, other.width));
        }
        let mut out = self.clone();
        out.gates.extend(other.gates.iter().cloned());
        out.cnots += other.cnots;
        Ok(out)
    }

    /// Reversed gate order with each single-qubit matrix conjugate-transposed.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::dagger).collect(),
            cnots: self.cnots,
        }
    }

    pub fn cnot_count(&self) -> usize {
        self.cnots
    }

    /// ASAP-layered depth counting all gates.
    pub fn depth(&self) -> usize {
        self.layered_depth().0
    }

    /// Number of ASAP layers containing at least one CNOT.
    pub fn cnot_depth(&self) -> usize {
        self.layered_depth().1
    }

    fn layered_depth(&self) -> (usize, usize) {
        let mut frontier = vec![0usize; self.width];
        let mut cnot_layers = std::collections::HashSet::new();
        let mut depth = 0;
        for g in &self.gates {
            let layer = 1 + g.qubits().map(|q| frontier[q]).max().unwrap_or(0);
            for q in g.qubits() {
                frontier[q] = layer;
            }
            if matches!(g, Gate::Cnot { .. }) {
                cnot_layers.insert(layer);
            }
            depth = depth.max(layer);
        }
        (depth, cnot_layers.len())
    }

    /// Multiplies runs of single-qubit gates that are adjacent on the same
    /// wire into one gate. CNOT count and the circuit unitary are unchanged.
    pub fn fuse_single_qubit_runs(&self) -> Circuit {
        let mut out: Vec<Gate> = Vec::with_capacity(self.gates.len());
        // last_on[q] = index in `out` of the last gate touching q, if 1q.
        let mut last_on: Vec<Option<usize>> = vec![None; self.width];
        for g in &self.gates {
            match g {
                Gate::SingleQubit { target, matrix, label } => {
                    if let Some(idx) = last_on[*target] {
                        if let Gate::SingleQubit { matrix: prev, label: prev_label, .. } = &mut out[idx] {
                            *prev = matrix.mul(prev);
                            *prev_label = None;
                            continue;
                        }
                    }
                    out.push(Gate::SingleQubit { target: *target, matrix: *matrix, label: *label });
                    last_on[*target] = Some(out.len() - 1);
                }
                Gate::Cnot { control, target } => {
                    out.push(g.clone());
                    last_on[*control] = None;
                    last_on[*target] = None;
                }
            }
        }
        let cnots = out.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count();
        Circuit { width: self.width, gates: out, cnots }
    }

    /// OpenQASM 2.0 text. Single-qubit gates are emitted as `u3` via their
    /// ZYZ angles (global phase dropped), CNOTs as `cx`.
    pub fn to_qasm(&self) -> String {
        let mut s = String::new();
        s.push_str("OPENQASM 2.0;\n");
        s.push_str("include \"qelib1.inc\";\n");
        let _ = writeln!(s, "qreg q[{}];", self.width);
        for g in &self.gates {
            match g {
                Gate::SingleQubit { target, matrix, .. } => {
                    let (_, beta, gamma, delta) = zyz_angles(matrix);
                    let _ = writeln!(s, "u3({gamma},{beta},{delta}) q[{target}];");
                }
                Gate::Cnot { control, target } => {
                    let _ = writeln!(s, "cx q[{control}],q[{target}];");
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::Mat2;

    #[test]
    fn append_counts_cnots() {
        let mut c = Circuit::new(2);
        c.push_cnot(0, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.cnot_count(), 1);
    }

    #[test]
    fn append_rejects_control_equal_target() {
        let mut c = Circuit::new(2);
        assert!(matches!(c.push_cnot(0, 0), Err(Error::DuplicateQubit(0))));
    }

    #[test]
    fn append_rejects_out_of_range() {
        let mut c = Circuit::new(3);
        assert!(matches!(
            c.push_single(5, Mat2::hadamard()),
            Err(Error::QubitOutOfRange { qubit: 5, width: 3 })
        ));
    }

    #[test]
    fn compose_empty_is_identity() {
        let mut c = Circuit::new(2);
        c.push_cnot(0, 1).unwrap();
        let composed = c.compose(&Circuit::new(2)).unwrap();
        assert_eq!(composed, c);
    }

    #[test]
    fn compose_rejects_width_mismatch() {
        let a = Circuit::new(3);
        let b = Circuit::new(4);
        assert!(matches!(a.compose(&b), Err(Error::WidthMismatch(3, 4))));
    }

    #[test]
    fn inverse_is_involution() {
        let mut c = Circuit::new(3);
        c.push_single(0, Mat2::hadamard()).unwrap();
        c.push_cnot(0, 1).unwrap();
        c.push_single(2, Mat2::rz(0.3)).unwrap();
        assert_eq!(c.inverse().inverse(), c);
    }

    #[test]
    fn inverse_of_single_cnot_is_itself() {
        let mut c = Circuit::new(2);
        c.push_cnot(0, 1).unwrap();
        assert_eq!(c.inverse(), c);
    }

    #[test]
    fn depth_serial_chain() {
        let mut c = Circuit::new(2);
        c.push_single(0, Mat2::hadamard()).unwrap();
        c.push_cnot(0, 1).unwrap();
        c.push_single(1, Mat2::hadamard()).unwrap();
        assert_eq!(c.cnot_count(), 1);
        assert_eq!(c.depth(), 3);
        assert_eq!(c.cnot_depth(), 1);
    }

    #[test]
    fn depth_parallel_gates() {
        let mut c = Circuit::new(2);
        c.push_single(0, Mat2::hadamard()).unwrap();
        c.push_single(1, Mat2::hadamard()).unwrap();
        assert_eq!(c.depth(), 1);
    }

    #[test]
    fn qasm_header_only_for_empty() {
        let c = Circuit::new(1);
        assert_eq!(c.to_qasm(), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n");
    }

    #[test]
    fn qasm_emits_cx_per_cnot() {
        let mut c = Circuit::new(2);
        c.push_cnot(0, 1).unwrap();
        let q = c.to_qasm();
        assert_eq!(q.matches("cx ").count(), 1);
        assert!(q.contains("cx q[0],q[1];"));
    }

    #[test]
    fn fusion_preserves_cnots_and_merges_singles() {
        let mut c = Circuit::new(2);
        c.push_single(0, Mat2::hadamard()).unwrap();
        c.push_single(0, Mat2::hadamard()).unwrap();
        c.push_cnot(0, 1).unwrap();
        c.push_single(1, Mat2::rz(0.2)).unwrap();
        c.push_single(0, Mat2::rz(0.1)).unwrap();
        let f = c.fuse_single_qubit_runs();
        assert_eq!(f.cnot_count(), 1);
        assert_eq!(f.len(), 4); // HH fused, the two post-CNOT singles stay
        // HH = I
        if let Gate::SingleQubit { matrix, .. } = &f.gates()[0] {
            assert!(matrix.max_dev(&Mat2::identity()) < 1e-15);
        } else {
            panic!("expected fused single-qubit gate first");
        }
    }
}
