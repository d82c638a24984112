//! Tabulated reference density for the beam (fourth-order) kernel.
//!
//! The kernel family has Fourier transform exp(-ξ⁴ t), so the t = 1 density
//! q₁(y) = (1/π) ∫_0^∞ cos(ξy) exp(-ξ⁴) dξ is tabulated once and every other
//! t is reached through the scaling q_t(y) = t^{-1/4} q₁(y t^{-1/4}). The
//! density changes sign, so the table also records where it is negative and a
//! cumulative table of |q₁| for inverse-transform sampling.

use crate::error::{Error, Result};
use crate::quad::{integrate_gl_panels, trapezoid_uniform};
use rand::Rng;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub const DEFAULT_RESOLUTION: usize = 1 << 14;
pub const DEFAULT_HALFWIDTH: f64 = 28.0;

/// Frequency beyond which exp(-ξ⁴) is below 1e-58; integration stops there.
const XI_MAX: f64 = 3.4;
const XI_PANELS: usize = 8;

/// Saddle-point decay rate of |q₁|: |q₁(y)| ≲ 0.5 exp(-C |y|^{4/3}) with
/// C = (3/2) 4^{-4/3} ≈ 0.2362.
const DECAY_RATE: f64 = 1.5 / 6.349604207872798;
const ENVELOPE_AMP: f64 = 0.5;

/// Pointwise q₁(y) by panelled Gauss-Legendre quadrature of order `order`.
pub fn q1_pointwise(y: f64, order: usize) -> f64 {
    integrate_gl_panels(
        |xi: f64| (xi * y).cos() * (-xi.powi(4)).exp(),
        0.0,
        XI_MAX,
        order,
        XI_PANELS,
    ) / std::f64::consts::PI
}

/// Conservative bound on the |q₁| mass outside [-halfwidth, halfwidth].
pub fn tail_mass_bound(halfwidth: f64) -> f64 {
    let l43 = halfwidth.powf(4.0 / 3.0);
    // ∫_L^∞ exp(-C y^{4/3}) dy <= exp(-C L^{4/3}) * 3 L^{-1/3} / (4C), padded 20%.
    2.0 * ENVELOPE_AMP * (-DECAY_RATE * l43).exp() * 3.0 * 1.2
        / (4.0 * DECAY_RATE * halfwidth.cbrt())
}

#[derive(Debug)]
pub struct BeamTable {
    resolution: usize,
    halfwidth: f64,
    grid: Vec<f64>,
    values: Vec<f64>,
    /// Total variation ∫ |q₁|.
    tv_mass: f64,
    /// Trapezoidal ∫ q₁ (should be 1 up to quadrature error).
    net_mass: f64,
    /// Intervals of |y| where q₁ < 0, sorted.
    sign_intervals: Vec<(f64, f64)>,
    /// Cumulative trapezoid of |q₁| over the grid, unnormalized.
    cdf: Vec<f64>,
}

impl BeamTable {
    /// Tabulate q₁ on a uniform symmetric grid.
    pub fn build(resolution: usize, halfwidth: f64) -> Result<Self> {
        if resolution < 1 << 10 {
            return Err(Error::invalid(format!(
                "beam table resolution must be at least {}, got {resolution}",
                1 << 10
            )));
        }
        if !halfwidth.is_finite() || tail_mass_bound(halfwidth) >= 1e-8 {
            return Err(Error::invalid(format!(
                "beam table halfwidth {halfwidth} leaves tail mass above 1e-8 \
                 (bound {:.2e}); use halfwidth >= {}",
                tail_mass_bound(halfwidth),
                DEFAULT_HALFWIDTH
            )));
        }
        let n = resolution;
        let h = 2.0 * halfwidth / (n - 1) as f64;
        let grid: Vec<f64> = (0..n).map(|i| -halfwidth + i as f64 * h).collect();

        // Evaluate the upper half and mirror; check quadrature convergence by
        // comparing two rule orders.
        let mut values = vec![0.0; n];
        let mut worst = 0.0f64;
        for i in n / 2..n {
            let y = grid[i];
            let lo = q1_pointwise(y, 24);
            let hi = q1_pointwise(y, 48);
            worst = worst.max((hi - lo).abs());
            values[i] = hi;
            values[n - 1 - i] = hi;
        }
        if worst > 1e-9 {
            return Err(Error::Quadrature(format!(
                "beam density quadrature not converged: max node discrepancy {worst:.2e}"
            )));
        }
        Self::finish(resolution, halfwidth, grid, values)
    }

    /// Derive masses, sign intervals and the sampling CDF from raw values.
    fn finish(
        resolution: usize,
        halfwidth: f64,
        grid: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let n = resolution;
        let h = 2.0 * halfwidth / (n - 1) as f64;
        let net_mass = trapezoid_uniform(&values, h);
        let abs_vals: Vec<f64> = values.iter().map(|v| v.abs()).collect();

        let mut cdf = vec![0.0; n];
        for i in 1..n {
            cdf[i] = cdf[i - 1] + 0.5 * h * (abs_vals[i - 1] + abs_vals[i]);
        }
        let tv_mass = cdf[n - 1];

        // Negative runs on the positive half-axis, endpoints refined by
        // linear interpolation between the bracketing nodes.
        let mut sign_intervals = Vec::new();
        let mut start: Option<f64> = None;
        let cross = |i: usize| -> f64 {
            let (v0, v1) = (values[i - 1], values[i]);
            grid[i - 1] + h * v0 / (v0 - v1)
        };
        for i in n / 2..n {
            let neg = values[i] < 0.0;
            match (neg, start) {
                (true, None) => {
                    start = Some(if i > 0 && values[i - 1] >= 0.0 {
                        cross(i)
                    } else {
                        grid[i].max(0.0)
                    });
                }
                (false, Some(a)) => {
                    sign_intervals.push((a, cross(i)));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(a) = start {
            sign_intervals.push((a, halfwidth));
        }

        Ok(Self {
            resolution,
            halfwidth,
            grid,
            values,
            tv_mass,
            net_mass,
            sign_intervals,
            cdf,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tv_mass(&self) -> f64 {
        self.tv_mass
    }

    pub fn net_mass(&self) -> f64 {
        self.net_mass
    }

    pub fn sign_intervals(&self) -> &[(f64, f64)] {
        &self.sign_intervals
    }

    fn step(&self) -> f64 {
        2.0 * self.halfwidth / (self.resolution - 1) as f64
    }

    /// Signed density by linear interpolation; 0 outside the table.
    pub fn density(&self, y: f64) -> f64 {
        if y.abs() >= self.halfwidth {
            return 0.0;
        }
        let h = self.step();
        let pos = (y + self.halfwidth) / h;
        let i = (pos as usize).min(self.resolution - 2);
        let s = pos - i as f64;
        self.values[i] * (1.0 - s) + self.values[i + 1] * s
    }

    /// Sign of q₁ at `y`; zeros of the tabulated density resolve to +1.
    pub fn sign(&self, y: f64) -> i8 {
        let a = y.abs();
        let idx = self
            .sign_intervals
            .partition_point(|&(_, hi)| hi <= a);
        if idx < self.sign_intervals.len() && self.sign_intervals[idx].0 < a {
            -1
        } else {
            1
        }
    }

    /// Inverse-transform draw from |q₁| / tv_mass. The sampled law is the
    /// piecewise-linear interpolation of |q₁|, consistent with the stored CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let target = rng.random::<f64>() * self.tv_mass;
        let i = self
            .cdf
            .partition_point(|&c| c <= target)
            .clamp(1, self.resolution - 1)
            - 1;
        let h = self.step();
        let tau = target - self.cdf[i];
        let d0 = self.values[i].abs();
        let d1 = self.values[i + 1].abs();
        let a = 0.5 * (d1 - d0);
        let s = if a.abs() * h < 1e-300 || d0 + d1 < 1e-300 {
            if d0 > 0.0 {
                tau / (h * d0)
            } else {
                0.5
            }
        } else if a.abs() < 1e-12 * d0.max(d1) {
            tau / (h * d0)
        } else {
            let disc = (d0 * d0 + 4.0 * a * tau / h).max(0.0);
            (disc.sqrt() - d0) / (2.0 * a)
        };
        self.grid[i] + s.clamp(0.0, 1.0) * h
    }

    /// Persist as a versioned CSV cache keyed by (resolution, halfwidth).
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "beam_table_v1,{},{}", self.resolution, self.halfwidth)?;
        for (y, v) in self.grid.iter().zip(&self.values) {
            writeln!(f, "{y},{v}")?;
        }
        Ok(())
    }

    /// Load a cache written by [`save_csv`]. Derived fields are recomputed
    /// from the stored values, so a cache hit is bit-identical to a rebuild.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let f = BufReader::new(std::fs::File::open(path)?);
        let mut lines = f.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Cache("empty beam table file".into()))??;
        let parts: Vec<&str> = header.split(',').collect();
        if parts.len() != 3 || parts[0] != "beam_table_v1" {
            return Err(Error::Cache(format!("bad beam table header: {header}")));
        }
        let resolution: usize = parts[1]
            .parse()
            .map_err(|e| Error::Cache(format!("bad resolution: {e}")))?;
        let halfwidth: f64 = parts[2]
            .parse()
            .map_err(|e| Error::Cache(format!("bad halfwidth: {e}")))?;
        let mut grid = Vec::with_capacity(resolution);
        let mut values = Vec::with_capacity(resolution);
        for line in lines {
            let line = line?;
            let (y, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Cache(format!("bad row: {line}")))?;
            grid.push(
                y.parse::<f64>()
                    .map_err(|e| Error::Cache(format!("bad abscissa: {e}")))?,
            );
            values.push(
                v.parse::<f64>()
                    .map_err(|e| Error::Cache(format!("bad value: {e}")))?,
            );
        }
        if grid.len() != resolution {
            return Err(Error::Cache(format!(
                "expected {resolution} rows, found {}",
                grid.len()
            )));
        }
        Self::finish(resolution, halfwidth, grid, values)
    }
}
