//! Conditioning Gaussian processes on finite — and progressively refined —
//! observation sets.
//!
//! A Gaussian process prior `(m, k)` on a box domain is conditioned on
//! observations through the pseudoinverse update
//!
//! ```text
//! mean(t)     = m(t) + K_{t,S} (K_{S,S} + σ²I)⁻ (y − m(S))
//! cov(t₁,t₂)  = k(t₁,t₂) − K_{t₁,S} (K_{S,S} + σ²I)⁻ K_{S,t₂}
//! ```
//!
//! where the noise-free case uses a truncated spectral Moore–Penrose
//! pseudoinverse and the noisy case a Cholesky solve. Observations may be
//! point evaluations, weighted sums, or (for smooth kernels) derivative
//! evaluations. On top of the single conditioning step, the crate drives
//! sequences of nested observation designs that become dense in a region,
//! and monitors how the posterior settles: sup-norm deltas of the mean,
//! nuclear-norm deltas of the covariance, and characteristic-functional
//! probes. When the whole domain is observed, the posterior contracts onto
//! the observed path; [`refinement::contraction_experiment`] measures that
//! collapse on a sampled truth path.
//!
//! # Examples
//!
//! The `examples/` directory is the front door — one runnable program per
//! capability:
//!
//! - **`brownian_bridge`** — conditioning Brownian motion on its endpoint;
//!   closed-form check of the bridge covariance.
//! - **`nested_designs`** — nested low-discrepancy designs, fill-distance
//!   decay, and the kernel pseudo-metric.
//! - **`spectral_pseudoinverse`** — rank-deficient Gram matrices and the
//!   truncated spectral pseudoinverse behind noise-free conditioning.
//! - **`noisy_observations`** — the σ² > 0 Cholesky path and how noise
//!   relaxes interpolation.
//! - **`derivative_observations`** — conditioning on values and slopes.
//! - **`refine_and_monitor`** — growing nested designs with the convergence
//!   report.
//! - **`contraction`** — full-domain observation of a sampled path; the
//!   posterior collapses onto it.
//! - **`partial_observation`** — observing half the domain: interpolation
//!   inside, prior uncertainty far away.
//! - **`sample_paths`** — drawing prior and posterior paths on a grid.
//!
//! ```bash
//! cargo run --release --example brownian_bridge
//! cargo run --release --example contraction
//! ```
//!
//! The thin `gpcond` binary runs the same workflows from a config file; see
//! the crate README.

pub mod cli;
pub mod conditioning;
pub mod domain;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod refinement;
pub mod sampling;

pub use conditioning::{
    condition, condition_with_tol, interpolation_check, InterpolationReport, ObservationSet,
    PosteriorGp,
};
pub use domain::{
    fill_distance, kernel_metric, nested_design, van_der_corput, Domain, FillMetric, NestedDesign,
    Point,
};
pub use error::{GpError, Result};
pub use kernels::{
    cross_cov, gram, gram_functionals, mean_apply, GpPrior, Kernel, MeanFunction,
    ObservationFunctional,
};
pub use linalg::{
    eigh_sym, operator_norm, pinv_psd, psd_project, solve_spd, trace_norm, PsdFactor,
    SpectralDecomposition, SymMatrix, DEFAULT_PINV_TOL,
};
pub use refinement::{
    char_functional, contraction_experiment, refine_and_monitor, CharProbe, ConvergenceReport,
    LevelRecord, PathObservable, RefineOptions, RefinementSchedule,
};
pub use sampling::{sample_paths, standard_normals, GaussianModel, PathSample, Rng};
