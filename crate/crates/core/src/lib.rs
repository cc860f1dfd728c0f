//! Numerical laboratory for the Collatz phase rotation.
//!
//! The transform T(x) = frac(log6(x + 1/5)) sends Collatz orbits to near
//! rotations of the circle by alpha = log6(3). This crate computes the
//! per-step deviation from that rotation exactly where possible, sweeps it
//! over large integer ranges deterministically, scans the transform parameter
//! plane, and compares every derived statistic against a bundled reference
//! table set, flagging disagreements instead of assuming them away.

pub mod analytics;
pub mod cli;
pub mod collatz;
pub mod cumulative;
pub mod error;
pub mod flow;
pub mod phase;
pub mod report;
pub mod survey;

pub use collatz::{OrbitStats, OrbitValue, Resolution};
pub use error::{Error, Result};
pub use phase::{MapFamily, Parity, PhaseAngle, PhaseTransform, SignedDeviation};
pub use report::{CompareScale, DiscrepancyReport};
