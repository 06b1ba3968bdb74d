//! Belief-function calculus on finite frames.
//!
//! Mass functions ([`belief::MassFunction`]) are the canonical state; bel,
//! pl, q and b are interchangeable views reached through the fast subset
//! transforms in [`lattice`]. [`dynamics`] implements the update rules
//! directly and [`specialization`] expresses the same rules as matrices.
//! [`verify`] checks the structural theorems that tie the two together on
//! sampled instances.

pub mod belief;
pub mod commitment;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod specialization;
pub mod verify;

pub use belief::{Kind, MassFunction, ValueFunction};
pub use commitment::CommitmentOrdering;
pub use error::{BeliefError, Result};
pub use lattice::{Frame, LatticeVector, SubsetIndex};
pub use specialization::{
    DespecializationMatrix, GeneralizationMatrix, Matrix, SpecializationMatrix,
};

/// Absolute tolerance used for validation and comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
