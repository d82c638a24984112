//! Monte Carlo estimator for the potential-term integral equation
//!
//! ```text
//! u(t, x) = w(t, x) + ∫_0^t ds ∫ S(s, dy) V(t-s, x-y) u(t-s, x-y).
//! ```
//!
//! Each sample draws a renewal path at Poisson rate λ and evaluates
//!
//! ```text
//! e^{λt} w(t-τ_N, X_{τ_N}) (-1)^{C_t} Π_{i<=N} [ |S|(τ_i-τ_{i-1}, ℝ^d) λ^{-1} V(t-τ_i, X_{τ_i}) ]
//! ```
//!
//! with the empty product equal to 1 and C_t counting increments that fall
//! where the kernel density is negative. The sample mean is an unbiased
//! estimate of u(t, x) for every λ > 0; λ trades per-sample weight dispersion
//! against the expected number of jumps.

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::kernels::{Kernel, Point};
use crate::paths::sample_poisson_times;
use crate::rng::{sample_stream, SampleRng};
use crate::stats::{parallel_sample_sum, SampleStats};

/// Outcome of a Monte Carlo run: sample mean, standard error of the mean
/// (stable streaming variance), and the configuration echo.
#[derive(Clone, Debug)]
pub struct EstimatorResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub horizon: f64,
    pub points: Vec<Vec<f64>>,
    pub config: String,
    /// Largest jump count observed over all samples.
    pub max_jumps: u32,
    /// Set when e^{λt} (bound(V) sup_s mass(s) / λ)^{max_jumps} indicates the
    /// weight range may approach f64 overflow. Non-fatal.
    pub overflow_risk: bool,
}

impl EstimatorResult {
    pub(crate) fn from_stats(
        stats: SampleStats,
        seed: u64,
        horizon: f64,
        points: Vec<Vec<f64>>,
        config: String,
        overflow_risk: bool,
    ) -> Self {
        EstimatorResult {
            mean: stats.moments.mean(),
            std_error: stats.moments.std_error(),
            n_samples: stats.moments.count(),
            seed,
            horizon,
            points,
            config,
            max_jumps: stats.max_jumps,
            overflow_risk,
        }
    }

    pub(crate) fn exact(
        value: f64,
        seed: u64,
        points: Vec<Vec<f64>>,
        config: String,
    ) -> Self {
        EstimatorResult {
            mean: value,
            std_error: 0.0,
            n_samples: 0,
            seed,
            horizon: 0.0,
            points,
            config,
            max_jumps: 0,
            overflow_risk: false,
        }
    }
}

/// One sample weight and its jump count.
pub fn solution_weight(
    kernel: &Kernel,
    v: &ScalarField,
    w: &ScalarField,
    t: f64,
    x: &[f64],
    lambda: f64,
    rng: &mut SampleRng,
) -> Result<(f64, u32)> {
    let times = sample_poisson_times(lambda, t, rng)?;
    let signed = kernel.is_signed();
    let mut pos: Point = x.iter().copied().collect();
    let mut prev = 0.0;
    let mut core = 1.0;
    let mut negatives = 0u32;
    for &tau in &times {
        let gap = tau - prev;
        let inc = kernel.sample_increment_unchecked(gap, rng)?;
        if signed && kernel.increment_sign(gap, &inc) < 0 {
            negatives += 1;
        }
        for (c, d) in pos.iter_mut().zip(inc.iter()) {
            *c += d;
        }
        core *= kernel.mass_value(gap) / lambda * v.eval(t - tau, &pos);
        prev = tau;
    }
    let mut weight = (lambda * t).exp() * core * w.eval(t - prev, &pos);
    if negatives % 2 == 1 {
        weight = -weight;
    }
    Ok((weight, times.len() as u32))
}

fn validate_common(kernel: &Kernel, x: &[f64], t: f64) -> Result<()> {
    if x.len() != kernel.dim() {
        return Err(Error::invalid(format!(
            "point has dimension {}, kernel expects {}",
            x.len(),
            kernel.dim()
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!(
            "horizon must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

fn overflow_risk(lambda: f64, t: f64, v_bound: f64, sup_mass: f64, max_jumps: u32) -> bool {
    if max_jumps == 0 || v_bound == 0.0 {
        return false;
    }
    let per_jump = (v_bound * sup_mass / lambda).max(1.0).log10();
    lambda * t * std::f64::consts::LOG10_E + max_jumps as f64 * per_jump > 280.0
}

/// Estimate u(t, x). `lambda` is the renewal rate (1 is the default choice);
/// `t = 0` returns w(0, x) exactly without sampling.
#[allow(clippy::too_many_arguments)]
pub fn estimate_solution(
    kernel: &Kernel,
    v: &ScalarField,
    w: &ScalarField,
    t: f64,
    x: &[f64],
    lambda: f64,
    n_samples: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    validate_common(kernel, x, t)?;
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::invalid(format!(
            "renewal rate must be positive, got {lambda}"
        )));
    }
    let v_bound = v.bound(t.max(1e-300));
    let w_bound = w.bound(t.max(1e-300));
    if !v_bound.is_finite() || !w_bound.is_finite() {
        return Err(Error::invalid(
            "potential and homogeneous term must be bounded",
        ));
    }
    let config = format!(
        "solve equation={} dim={} t={t} lambda={lambda} samples={n_samples}",
        kernel.equation_name(),
        kernel.dim()
    );
    if t == 0.0 {
        return Ok(EstimatorResult::exact(
            w.eval(0.0, x),
            seed,
            vec![x.to_vec()],
            config,
        ));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be positive"));
    }
    let stats = parallel_sample_sum(n_samples, |i| {
        let mut rng = sample_stream(seed, i);
        solution_weight(kernel, v, w, t, x, lambda, &mut rng)
            .expect("per-sample evaluation cannot fail after validation")
    });
    let risk = overflow_risk(lambda, t, v_bound, kernel.supremum_mass(t), stats.max_jumps);
    Ok(EstimatorResult::from_stats(
        stats,
        seed,
        t,
        vec![x.to_vec()],
        config,
        risk,
    ))
}
