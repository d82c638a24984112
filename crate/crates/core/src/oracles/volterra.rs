//! Scalar Volterra reduction for spatially constant data.
//!
//! With V ≡ c and w ≡ w0 the integral equation collapses to
//! u(t) = w0 + c ∫_0^t m(s) u(t-s) ds for the scalar mass profile
//! m(s) = S(s, ℝ^d). Solved by trapezoidal product integration with
//! Richardson extrapolation and step halving.

use crate::error::{Error, Result};

fn solve_grid<F: Fn(f64) -> f64>(
    mass_profile: &F,
    c: f64,
    w0: f64,
    t: f64,
    n: usize,
) -> Option<f64> {
    let h = t / n as f64;
    let mass: Vec<f64> = (0..=n).map(|j| mass_profile(j as f64 * h)).collect();
    let denom = 1.0 - 0.5 * c * h * mass[0];
    if denom.abs() < 0.5 {
        return None; // step too coarse for the implicit endpoint term
    }
    let mut u = vec![w0; n + 1];
    for i in 1..=n {
        let mut s = 0.5 * mass[i] * u[0];
        for j in 1..i {
            s += mass[j] * u[i - j];
        }
        u[i] = (w0 + c * h * s) / denom;
    }
    Some(u[n])
}

/// Solve u(t) = w0 + c ∫_0^t m(s) u(t-s) ds to relative tolerance 1e-8.
pub fn volterra_constant_reduction<F: Fn(f64) -> f64>(
    mass_profile: F,
    c: f64,
    w0: f64,
    t: f64,
) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!(
            "horizon must be non-negative, got {t}"
        )));
    }
    if t == 0.0 || c == 0.0 {
        return Ok(w0);
    }
    let mut n = 64usize;
    let mut coarse = None;
    let mut prev_extrap: Option<f64> = None;
    while n <= 1 << 14 {
        match (coarse, solve_grid(&mass_profile, c, w0, t, n)) {
            (_, None) => {}
            (None, Some(u)) => coarse = Some(u),
            (Some(uc), Some(uf)) => {
                // Trapezoid converges at O(h²); Richardson removes the
                // leading term.
                let extrap = (4.0 * uf - uc) / 3.0;
                if let Some(p) = prev_extrap {
                    if (extrap - p).abs() <= 1e-8 * extrap.abs().max(1.0) {
                        return Ok(extrap);
                    }
                }
                prev_extrap = Some(extrap);
                coarse = Some(uf);
            }
        }
        n *= 2;
    }
    Err(Error::StepHalvingFailure)
}
