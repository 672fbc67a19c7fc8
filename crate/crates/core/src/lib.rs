//! Rigorous interval bounds on the topological pressure of nearest-neighbour
//! interactions on the square lattice.
//!
//! The pressure is written as the orbit average of `-ln p + A_Φ` over a
//! periodic point, where `p` is the conditional probability of the symbol at
//! the origin given the lexicographic past. [`pressure::gk_pressure`] brackets
//! `p` by extreme boundary conditions on a half box and assembles the
//! resulting interval. [`transfer`] supplies the exact finite-volume
//! computations behind it and independent strip/box oracles; [`sft`] checks
//! the structural hypotheses (single-site fillability, safe symbols) and
//! builds periodic points.

pub mod error;
pub mod interaction;
pub mod lattice;
pub mod pressure;
pub mod sft;
pub mod transfer;

pub use error::{Error, Result};
pub use interaction::{Configuration, Interaction, Symbol};
pub use lattice::{Region, Site};
pub use pressure::{gk_pressure, p_interval, Interval, PInterval, PressureEstimate};
pub use sft::PeriodicPoint;
pub use transfer::{Budget, ConstrainedRegion, LogWeight};
