//! Damped wave kernel in one dimension.
//!
//! The kernel density is e^{-at} I₀(a√(t²-y²))/2 on |y| < t, a non-negative
//! measure with total mass (1 - e^{-2at})/(2a). Increments are sampled
//! exactly from the normalized density by expanding the kernel as a series of
//! time-convolved flat (undamped wave) kernels: the number of convolution
//! factors K+1 has P(K = k) ∝ (a·dt)^{2k+1}/(2k+1)!, the time split is
//! Dirichlet(2, ..., 2), and each factor contributes an independent uniform
//! increment over its sub-interval.

use crate::bessel::i0;
use crate::error::{Error, Result};
use crate::quad::integrate_gl;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Total mass (1 - e^{-2at})/(2a); the a -> 0 limit is t.
pub fn mass(damping: f64, t: f64) -> f64 {
    if damping == 0.0 {
        t
    } else {
        -(-2.0 * damping * t).exp_m1() / (2.0 * damping)
    }
}

/// Kernel density e^{-at} I₀(a√(t²-y²))/2 on |y| < t, 0 outside.
pub fn density(damping: f64, t: f64, y: f64) -> f64 {
    if y.abs() >= t {
        return 0.0;
    }
    0.5 * (-damping * t).exp() * i0(damping * (t * t - y * y).sqrt())
}

/// Mass by Gauss-Legendre quadrature of the density; cross-check route for
/// the closed form.
pub fn mass_by_quadrature(damping: f64, t: f64) -> f64 {
    // The integrand is smooth in y (I₀ is an even power series of its
    // argument) so an undivided high-order rule converges to machine level.
    integrate_gl(|y| density(damping, t, y), -t, t, 96)
}

/// One exact draw from the normalized kernel density at horizon `dt`.
pub fn sample_increment<R: Rng + ?Sized>(damping: f64, dt: f64, rng: &mut R) -> Result<f64> {
    let x = damping * dt;
    if !(0.0..=700.0).contains(&x) {
        return Err(Error::invalid(format!(
            "damping * dt = {x} outside the supported range [0, 700]"
        )));
    }
    // K with P(K = k) = x^{2k+1} / ((2k+1)! sinh x); for x = 0 this is K = 0.
    let mut k = 0usize;
    if x > 0.0 {
        let target = rng.random::<f64>() * x.sinh();
        let mut term = x;
        let mut cum = x;
        while cum < target && k < 10_000 {
            k += 1;
            let kk = (2 * k) as f64;
            term *= x * x / (kk * (kk + 1.0));
            cum += term;
        }
    }
    // Sub-interval lengths ~ Dirichlet(2, ..., 2) scaled to dt, via K+1
    // normalized Gamma(2) draws; each contributes a uniform increment.
    let mut gammas = Vec::with_capacity(k + 1);
    let mut total = 0.0;
    for _ in 0..=k {
        let e1: f64 = Exp1.sample(rng);
        let e2: f64 = Exp1.sample(rng);
        let g = e1 + e2;
        gammas.push(g);
        total += g;
    }
    let mut y = 0.0;
    for g in gammas {
        let delta = dt * g / total;
        y += delta * (2.0 * rng.random::<f64>() - 1.0);
    }
    Ok(y)
}

/// Kac telegraph time ∫_0^t (-1)^{N(s)} ds for a rate `rate` Poisson process,
/// starting in the +1 direction.
pub fn telegraph_time<R: Rng + ?Sized>(rate: f64, horizon: f64, rng: &mut R) -> f64 {
    if rate == 0.0 {
        return horizon;
    }
    let mut s = 0.0;
    let mut dir = 1.0;
    let mut tau = 0.0;
    loop {
        let e: f64 = Exp1.sample(rng);
        let gap = e / rate;
        if s + gap >= horizon {
            tau += dir * (horizon - s);
            return tau;
        }
        tau += dir * gap;
        s += gap;
        dir = -dir;
    }
}
