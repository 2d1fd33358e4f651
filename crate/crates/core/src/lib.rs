//! Thermal stability toolkit for toric-code memories on 2/3/4-dimensional tori.
//!
//! The crate has five layers:
//!
//! - [`lattice`]: toroidal cell complexes and their incidence tables;
//! - [`homology`]: Z2 boundary calculus — syndromes, loop decomposition,
//!   winding labels, homology classes of spin configurations;
//! - [`decoder`]: the polynomial measurement algorithm for dressed
//!   topological observables (canonical walk, loop reduction, surface
//!   closing);
//! - [`dynamics`]: classical Markov dynamics with detailed-balance rate
//!   families, Gibbs sampling, stability estimators and exact enumeration
//!   oracles for small lattices;
//! - [`davies`]: the exact weak-coupling thermal generator for systems of up
//!   to ten spins, with Bohr decompositions, decay rates, rate bounds and a
//!   quantum/classical cross-check.
//!
//! [`checks`] bundles the verification suite the CLI and the acceptance
//! tests share.

pub mod bits;
pub mod checks;
pub mod davies;
pub mod decoder;
pub mod dynamics;
pub mod error;
pub mod homology;
pub mod lattice;

pub use error::{Error, Result};
