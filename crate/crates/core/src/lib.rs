//! Exact linear-algebra models of perverse sheaves on complexified real
//! hyperplane arrangements.
//!
//! A perverse sheaf smooth along an arrangement is encoded by a
//! [`hypsheaf::HyperbolicSheaf`]: one vector space per real face together
//! with generalization maps `γ` and specialization maps `δ`. Each operation in
//! [`calculus`] is the cohomology of an explicit chain complex built from
//! that data.

pub mod arrangement;
pub mod calculus;
pub mod error;
pub mod hypsheaf;
pub mod qlinalg;

pub use error::{Error, Result};
