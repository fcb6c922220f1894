//! Synthesis of multi-controlled SU(2) gates into CNOT + single-qubit
//! netlists with a CNOT cost linear in the qubit count, together with the
//! prior linear-cost scheme for comparison, a brute-force verification
//! engine, and CVO-QRAM sparse quantum-state preparation built on top of the
//! decomposition.
//!
//! The crate is organized as:
//!
//! - [`su2`]: complex 2x2 algebra and the closed-form gate solvers,
//! - [`circuit`]: the gate-level IR with counting, depth and QASM export,
//! - [`mcx`]: multi-controlled-X building blocks on borrowed (dirty) qubits,
//! - [`mcsu2`]: the multi-controlled SU(2) decompositions and their CNOT
//!   bounds,
//! - [`sim`]: dense unitaries, statevectors and equivalence checking,
//! - [`stateprep`]: CVO-QRAM sparse state preparation and the benchmark
//!   sweep,
//! - [`sample`]: seeded random gates for tests and benchmarks.

pub mod circuit;
pub mod error;
pub mod mcsu2;
pub mod mcx;
pub mod sample;
pub mod sim;
pub mod stateprep;
pub mod su2;

pub use error::{Error, Result};
