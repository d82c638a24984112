//! Monte Carlo evaluation of linear PDEs with a potential term via Poisson
//! renewal paths, product-moment estimators for the same equations driven by
//! spatially homogeneous Gaussian noise, and the deterministic quadrature
//! oracles used to validate every estimator.
//!
//! The engine represents a solution of the integral equation
//!
//! ```text
//! u(t, x) = w(t, x) + ∫_0^t ds ∫ S(s, dy) V(t-s, x-y) u(t-s, x-y)
//! ```
//!
//! as an exponentially tilted expectation over sparse renewal paths: a
//! Poisson clock restarts a spatial process whose one-time marginals are the
//! normalized kernel |S(t, ·)| / |S|(t, ℝ^d). Sample weights multiply the
//! kernel mass, the potential along the path, and a sign counter for signed
//! kernels. Second and n-th product moments of the noisy counterpart use one
//! shared clock (n = 2) or a pairwise-marked Poisson measure (n >= 2).

pub mod bessel;
pub mod estimator;
pub mod error;
pub mod fields;
pub mod kernels;
pub mod moments;
pub mod oracles;
pub mod paths;
pub mod quad;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use estimator::{estimate_solution, solution_weight, EstimatorResult};
pub use fields::{initial_wave_field, ScalarField, TabulatedGrid1d};
pub use kernels::{BeamTable, Kernel, Point};
pub use moments::{
    check_admissibility, estimate_nth_moment, estimate_second_moment, AdmissibilityOutcome,
    Covariance,
};
pub use paths::{
    build_multi_paths, build_renewal_path, sample_pair_clock, sample_poisson_times, MultiPaths,
    PairClock, PairEvent, RenewalPath,
};
