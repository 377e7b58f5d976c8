//! Simulation and verification laboratory for the matroid secretary problem.

pub mod algorithms;
pub mod analytics;
pub mod arrival;
pub mod error;
pub mod harness;
pub mod instance_gen;
pub mod labeling;
pub mod matroid;
pub mod rng;

pub use error::{Error, Result};
pub use matroid::{Element, ElementSet, LaminarSet, MatroidInstance, MatroidKind, ValueOrder};
