//! Quantum state engines.
//!
//! [`TwoBranchState`] is an exact symbolic form for every state the protocol
//! produces and scales to any qubit count. [`DenseState`] and
//! [`DensityMatrix`] are the small-n oracle used to check it.

mod dense;
mod density;
mod eigen;
mod phase;
mod two_branch;

pub use dense::{Circuit, DenseState, Gate, PmOutcome, Pauli};
pub(crate) use dense::sample_index;
pub use density::DensityMatrix;
pub use eigen::hermitian_eigenvalues;
pub use phase::PhasePower;
pub use two_branch::TwoBranchState;

/// Largest qubit count the dense engine accepts by default.
pub const DENSE_LIMIT: usize = 12;

pub(crate) fn check_capacity(qubits: usize, limit: usize) -> crate::Result<()> {
    if qubits > limit {
        Err(crate::Error::Capacity { qubits, limit })
    } else {
        Ok(())
    }
}
