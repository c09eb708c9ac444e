//! Multivariate Gaussian process proxy of the simulator.
//!
//! All output lines share one squared-exponential kernel over scenarios and a
//! fixed `L x L` output covariance `Ω`. The conditional law of a new flow vector is
//! `N(μ*, σ* Ω)`: the data move the mean and the scalar scale, never the shape.

mod kernel;
mod likelihood;
mod omega;
mod posterior;

pub use kernel::{kernel, KernelParams};
pub use likelihood::{fit_hyperparameters, log_marginal_likelihood, FitConfig, ParamBounds, MIN_FIT_POINTS};
pub use omega::{omega_from_zone, OutputCovariance};
pub use posterior::{
    gram_matrix, local_subset, posterior, robust_cholesky, LocalityConfig, PosteriorPrediction, TrainingSet,
    TrainingView,
};
