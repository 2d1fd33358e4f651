//! Exact weak-coupling thermal generators for small spin systems.
//!
//! Everything is exact diagonalization: Bohr decompositions of the coupling
//! operators, the dissipative generator applied operator-by-operator, decay
//! rates and their bath-ceiling bound, and the quantum-to-classical
//! reduction cross-check on the small torus model.

mod classical;
mod oracle;
mod pauli;
mod system;

pub use classical::{
    kitaev_torus, verify_classical_reduction, ClassicalGaugeModel, KitaevTorus,
    ReductionReport,
};
pub use oracle::{BohrDecomposition, Oracle};
pub use pauli::{commutant_is_trivial, PauliString, PauliTerm};
pub use system::{BathSpectrum, SmallSystem, SPIN_CAP};
