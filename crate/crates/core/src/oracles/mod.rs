//! Deterministic solvers used to validate the Monte Carlo estimators:
//! series quadrature, Volterra/ODE reductions, a classical Brownian
//! estimator for the heat kernel, finite-difference references, and the
//! second-moment quadrature recursion.

mod classical;
mod fd;
mod moment_recursion;
mod picard;
mod volterra;

pub use classical::classical_fk_heat;
pub use fd::{fd_reference_1d, FdEquation, FdSolution, Grid1D};
pub use moment_recursion::{second_moment_recursion_1d, RecursionGrid};
pub use picard::{picard_series_1d, PicardGrid};
pub use volterra::volterra_constant_reduction;

use crate::error::Result;
use std::io::Write;
use std::path::Path;

/// A truncated series evaluation with its per-term values, the analytic
/// factorial tail bound for the dropped remainder, and a quadrature error
/// estimate obtained by comparing against a half-resolution rerun.
#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub terms: Vec<f64>,
    pub total: f64,
    pub tail_bound: f64,
    pub quad_error: f64,
}

impl SeriesResult {
    /// Dump per-term values as CSV (term index, value) for convergence plots.
    pub fn write_terms_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "m,term")?;
        for (m, v) in self.terms.iter().enumerate() {
            writeln!(f, "{m},{v}")?;
        }
        Ok(())
    }
}

/// Remainder bound sup_w (C t)^{m+1} / (m+1)! e^{C t} for a series whose
/// terms obey |H_m| <= sup_w (C t)^m / m!.
pub(crate) fn factorial_tail_bound(scale: f64, prefactor: f64, terms_kept: usize) -> f64 {
    let m = terms_kept as f64;
    // (scale)^{m+1}/(m+1)! computed in log space to dodge overflow.
    let log_term = (m + 1.0) * scale.max(1e-300).ln() - ln_factorial(terms_kept + 1);
    prefactor * (log_term + scale).exp()
}

pub(crate) fn required_terms(scale: f64, prefactor: f64, tol: f64) -> usize {
    for m in 0..400 {
        if factorial_tail_bound(scale, prefactor, m) <= tol {
            return m;
        }
    }
    400
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Catmull-Rom interpolation of uniformly gridded values at index-space
/// position `p`; wraps when `periodic`, clamps otherwise.
pub(crate) fn interp_row(values: &[f64], p: f64, periodic: bool) -> f64 {
    let n = values.len();
    let nf = n as f64;
    let (i, s) = if periodic {
        let q = p.rem_euclid(nf);
        let i = (q as usize) % n;
        (i as isize, q - q.floor())
    } else {
        let q = p.clamp(0.0, nf - 1.0);
        let i = (q as usize).min(n - 2);
        (i as isize, q - i as f64)
    };
    let at = |k: isize| -> f64 {
        let idx = if periodic {
            k.rem_euclid(n as isize) as usize
        } else {
            k.clamp(0, n as isize - 1) as usize
        };
        values[idx]
    };
    let (f_m1, f_0, f_1, f_2) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    f_0 + 0.5
        * s
        * (f_1 - f_m1
            + s * (2.0 * f_m1 - 5.0 * f_0 + 4.0 * f_1 - f_2
                + s * (3.0 * (f_0 - f_1) + f_2 - f_m1)))
}
