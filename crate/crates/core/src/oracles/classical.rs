//! Classical Brownian-path estimator for the heat equation with potential:
//! u(t, x) = E[ f0(B_t) exp(∫_0^t V(t-s, B_s) ds) ] with B_0 = x.
//!
//! The exponent integral is discretized with left-endpoint steps, giving a
//! O(Δt) bias; this estimator is an independent cross-check for the renewal
//! representation on the heat kernel, not a production path.

use crate::error::{Error, Result};
use crate::estimator::EstimatorResult;
use crate::fields::ScalarField;
use crate::rng::sample_stream;
use crate::stats::parallel_sample_sum;
use rand_distr::{Distribution, StandardNormal};

/// One Brownian sample of f0(B_t) exp(Σ V(t - s_k, B_{s_k}) Δ).
#[allow(clippy::too_many_arguments)]
fn brownian_weight(
    v: &ScalarField,
    f0: &ScalarField,
    t: f64,
    x: &[f64],
    n_time_steps: usize,
    rng: &mut crate::rng::SampleRng,
) -> f64 {
    let dt = t / n_time_steps as f64;
    let scale = dt.sqrt();
    let mut pos: Vec<f64> = x.to_vec();
    let mut exponent = 0.0;
    for k in 0..n_time_steps {
        let s = k as f64 * dt;
        exponent += v.eval(t - s, &pos) * dt;
        for c in pos.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *c += scale * z;
        }
    }
    f0.eval(0.0, &pos) * exponent.exp()
}

/// Estimate the heat solution by the Brownian path representation (d <= 3).
pub fn classical_fk_heat(
    v: &ScalarField,
    f0: &ScalarField,
    t: f64,
    x: &[f64],
    n_samples: u64,
    n_time_steps: usize,
    seed: u64,
) -> Result<EstimatorResult> {
    if x.is_empty() || x.len() > 3 {
        return Err(Error::unsupported(format!(
            "brownian cross-check covers d in 1..=3, got {}",
            x.len()
        )));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::invalid(format!("horizon must be positive, got {t}")));
    }
    if n_time_steps == 0 || n_samples == 0 {
        return Err(Error::invalid("need positive samples and time steps"));
    }
    if !v.bound(t).is_finite() || !f0.bound(t).is_finite() {
        return Err(Error::invalid("fields must be bounded"));
    }
    let stats = parallel_sample_sum(n_samples, |i| {
        let mut rng = sample_stream(seed, i);
        (brownian_weight(v, f0, t, x, n_time_steps, &mut rng), 0)
    });
    Ok(EstimatorResult::from_stats(
        stats,
        seed,
        t,
        vec![x.to_vec()],
        format!(
            "classical-fk dim={} t={t} steps={n_time_steps} samples={n_samples}",
            x.len()
        ),
        false,
    ))
}
