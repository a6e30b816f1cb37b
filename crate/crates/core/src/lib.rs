//! Link-level simulation and access-point selection for bistatic backscatter
//! communication in cell-free MIMO networks.
//!
//! A backscatter device (BD) signals by switching its reflection coefficient
//! while one or more access points (APs) illuminate it with a probing signal
//! and the remaining APs decode the reflection. This crate provides:
//!
//! - [`geometry`]: deployments, rectangular uncertainty regions, free-space
//!   path gains, and region discretization.
//! - [`channel`]: synthesis of complex channel realizations and orthogonal
//!   probing signals under the free-space line-of-sight norm constraints.
//! - [`detector`]: the optimal bit detector for the backscatter link, its
//!   exact error probability, and a Monte-Carlo bit-error estimator.
//! - [`metrics`]: geometry-only figures of merit for carrier-emitter (CE)
//!   selection.
//! - [`selection`]: max-min fair CE selection over an uncertainty region
//!   (multi-start projected gradient descent plus grid-search oracles) and
//!   the pruned CE-reader pair search.
//! - [`experiments`]: seeded Monte-Carlo campaigns, error-rate curves, and
//!   region heatmaps with CSV output.
//!
//! All randomized operations are deterministic given their seed and are safe
//! to run on any number of threads.

pub mod channel;
pub mod detector;
mod error;
pub mod experiments;
pub mod geometry;
pub mod metrics;
pub mod seeding;
pub mod selection;

pub use error::{Error, Result};
