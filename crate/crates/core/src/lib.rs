//! Executable dynamics for non-autonomous discrete systems.
//!
//! The crate builds and *verifies* concrete witnesses for dynamical
//! properties of time-varying map families `f_1, f_2, ...` on compact metric
//! spaces: hit sets and topological transitivity/mixing, sensitivity, dense
//! periodic points, the strong / weak / quasi-weak specification properties,
//! and the systems these induce on finite compact subsets (Hausdorff metric)
//! and on empirical probability measures (Prohorov metric).
//!
//! Every search produces a [`specification::TracingCertificate`] (or a
//! property verdict carrying evidence) that can be re-checked by pure
//! simulation, independent of how it was found.

pub mod catalog;
pub mod error;
pub mod experiment;
pub mod hyperspace;
pub mod measures;
pub mod properties;
pub mod spaces;
pub mod specification;
pub mod systems;

pub use error::{Error, Result};
