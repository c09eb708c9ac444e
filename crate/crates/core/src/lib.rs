//! Certification of a zonal congestion controller's safety probability.
//!
//! Two estimators of `p_safe`, the probability that a random renewable-injection
//! scenario leaves every line of a zone below its limit, are provided:
//!
//! * a brute-force Monte Carlo process that simulates every scenario and builds a
//!   score interval around the empirical frequency, and
//! * a proxy-based process that predicts the flow vector with a multivariate
//!   Gaussian process, skips the simulation when the predicted safety probability is
//!   extreme, and widens the interval to absorb the prediction uncertainty.
//!
//! The crate is organised bottom-up:
//!
//! * [`rng`] counter-based random streams keyed by `(seed, domain, id)`
//! * [`sampler`] truncated multivariate normal scenarios on the unit hypercube
//! * [`netsim`] the noisy PTDF simulator with history-based curtailment
//! * [`mgp`] the multivariate Gaussian process proxy
//! * [`mvncdf`] rectangle probabilities of a multivariate normal
//! * [`certify`] intervals, decision rule and the two processes
//! * [`config`], [`run`], [`sweep`], [`bench`] drivers used by the `certify` binary

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod certify;
pub mod config;
pub mod error;
pub mod mgp;
pub mod mvncdf;
pub mod netsim;
pub mod rng;
pub mod run;
pub mod sampler;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
