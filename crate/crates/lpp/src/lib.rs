//! Directed last-passage percolation on the integer line.
//!
//! A window of size `n` holds the vertices `0..=n`; each ordered pair `i < j`
//! carries an independent coin for edge presence and an independent positive
//! weight. The library computes last-passage values and geodesics over such
//! windows, detects the renewal points that split geodesics into independent
//! cycles, builds the heavy-tail continuum model (weighted intervals on
//! `[0, 1]`), and drives the Monte Carlo experiments tying the two together.
//!
//! Everything is deterministic given a master seed: edge data is a pure
//! function of `(seed, i, j)`, so windows of any size cost O(1) memory and
//! results do not depend on query order or worker count.

pub mod continuum;
pub mod dist;
mod error;
pub mod experiments;
pub mod graph;
pub mod passage;
pub mod renewal;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
