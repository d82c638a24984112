//! Second-moment series by quadrature of the two-point recursion
//!
//! G_0 = w0², G_m(t, x, y) = ∫_0^t ds ∬ S(t-s, x-dz₁) S(t-s, y-dz₂)
//!                             f(z₁-z₂) G_{m-1}(s, z₁, z₂),
//!
//! exploiting translation invariance: with constant w and stationary f the
//! terms depend on r = x - y only, and the double spatial integral reduces
//! to one integral against the difference kernel D_σ (law of the difference
//! of two independent increments, scaled by mass²):
//!
//!   heat d=1: D_σ = p_{2σ} (mass 1),
//!   wave d=1: D_σ(u) = (2σ - |u|)/4 on |u| < 2σ (mass σ²).
//!
//! The chaos terms are orthogonal, so the second moment is the plain sum of
//! the per-order terms.

use super::{factorial_tail_bound, interp_row, required_terms, SeriesResult};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::moments::Covariance;
use crate::quad::gauss_legendre;

#[derive(Clone, Copy, Debug)]
pub struct RecursionGrid {
    pub r_min: f64,
    pub r_max: f64,
    /// Spatial points in the difference variable.
    pub nr: usize,
    /// Time steps.
    pub nt: usize,
}

impl RecursionGrid {
    /// Symmetric default wide enough for t <= 1 with room for 8 orders.
    pub fn default_for(t: f64) -> Self {
        RecursionGrid {
            r_min: -8.0 * t.max(1.0),
            r_max: 8.0 * t.max(1.0),
            nr: 257,
            nt: 96,
        }
    }

    fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / (self.nr - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.nr < 16 || self.nt < 4 {
            return Err(Error::Grid("recursion grid needs nr >= 16, nt >= 4".into()));
        }
        if !(self.r_max > self.r_min) {
            return Err(Error::Grid("degenerate recursion domain".into()));
        }
        Ok(())
    }
}

enum Kind {
    Heat,
    Wave,
}

fn heat_density(var: f64, u: f64) -> f64 {
    (-u * u / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

struct Worker<'a> {
    kind: Kind,
    f: &'a Covariance,
    grid: RecursionGrid,
    t: f64,
}

impl Worker<'_> {
    fn f_at(&self, r: f64) -> f64 {
        self.f.eval(&[r])
    }

    fn step(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let nt = self.grid.nt;
        let nr = self.grid.nr;
        let ht = self.t / nt as f64;
        let dr = self.grid.dr();
        let rule = gauss_legendre(match self.kind {
            Kind::Heat => 32,
            Kind::Wave => 12,
        });
        let mut out = vec![vec![0.0; nr]; nt + 1];
        for i in 1..=nt {
            let mut acc = vec![0.0; nr];
            for k in 0..=i {
                let sigma = k as f64 * ht;
                let weight = if k == 0 || k == i { 0.5 * ht } else { ht };
                let row = &rows[i - k]; // G_{m-1}(t_i - σ, ·)
                match self.kind {
                    Kind::Heat => {
                        if k == 0 {
                            for j in 0..nr {
                                let rj = self.grid.r_min + j as f64 * dr;
                                acc[j] += weight * self.f_at(rj) * row[j];
                            }
                        } else {
                            let half = 8.0 * (2.0 * sigma).sqrt();
                            for j in 0..nr {
                                let rj = self.grid.r_min + j as f64 * dr;
                                let mut inner = 0.0;
                                for (&node, &wq) in rule.nodes.iter().zip(&rule.weights) {
                                    let u = half * node;
                                    let re = rj - u;
                                    let p = (re - self.grid.r_min) / dr;
                                    inner += wq
                                        * heat_density(2.0 * sigma, u)
                                        * self.f_at(re)
                                        * interp_row(row, p, false);
                                }
                                acc[j] += weight * inner * half;
                            }
                        }
                    }
                    Kind::Wave => {
                        if k == 0 {
                            continue; // mass σ² vanishes
                        }
                        // Split at the kink of (2σ - |u|)/4.
                        for j in 0..nr {
                            let rj = self.grid.r_min + j as f64 * dr;
                            let mut inner = 0.0;
                            for side in [-1.0f64, 1.0] {
                                for (&node, &wq) in rule.nodes.iter().zip(&rule.weights) {
                                    let u = side * sigma * (node + 1.0);
                                    let d = (2.0 * sigma - u.abs()) / 4.0;
                                    let re = rj - u;
                                    let p = (re - self.grid.r_min) / dr;
                                    inner += wq
                                        * sigma
                                        * d
                                        * self.f_at(re)
                                        * interp_row(row, p, false);
                                }
                            }
                            acc[j] += weight * inner;
                        }
                    }
                }
            }
            out[i] = acc;
        }
        out
    }

    fn run(&self, w0: f64, m_max: usize, r0: f64) -> (Vec<f64>, f64) {
        let nt = self.grid.nt;
        let nr = self.grid.nr;
        let dr = self.grid.dr();
        let mut rows: Vec<Vec<f64>> = vec![vec![w0 * w0; nr]; nt + 1];
        let p = (r0 - self.grid.r_min) / dr;
        let mut terms = vec![w0 * w0];
        for _ in 0..m_max {
            rows = self.step(&rows);
            terms.push(interp_row(&rows[nt], p, false));
        }
        let total = terms.iter().sum();
        (terms, total)
    }
}

/// Σ_{m <= m_max} E[I_m(t,x) I_m(t,y)] for constant w, by quadrature of the
/// two-point recursion in the difference variable x - y.
#[allow(clippy::too_many_arguments)]
pub fn second_moment_recursion_1d(
    kernel: &Kernel,
    f: &Covariance,
    w0: f64,
    t: f64,
    x: f64,
    y: f64,
    m_max: usize,
    grid: &RecursionGrid,
) -> Result<SeriesResult> {
    let kind = match kernel {
        Kernel::Heat { dim: 1 } => Kind::Heat,
        Kernel::Wave { dim: 1 } => Kind::Wave,
        _ => {
            return Err(Error::unsupported(
                "moment recursion covers the heat and wave kernels in d = 1",
            ))
        }
    };
    grid.validate()?;
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::invalid(format!("horizon must be positive, got {t}")));
    }
    let r0 = x - y;
    if r0 < grid.r_min || r0 > grid.r_max {
        return Err(Error::Grid(format!(
            "difference {r0} outside the grid [{}, {}]",
            grid.r_min, grid.r_max
        )));
    }
    let sup_mass = kernel.supremum_mass(t);
    let scale = f.bound() * sup_mass * sup_mass * t;
    let tail_bound = factorial_tail_bound(scale, w0 * w0, m_max);
    if tail_bound > 1e-3 {
        return Err(Error::TruncationTooShort {
            required: required_terms(scale, w0 * w0, 1e-6),
            got: m_max,
        });
    }
    let worker = Worker {
        kind,
        f,
        grid: *grid,
        t,
    };
    let (terms, total) = worker.run(w0, m_max, r0);

    let coarse = RecursionGrid {
        nr: (grid.nr / 2).max(16) | 1,
        nt: (grid.nt / 2).max(4),
        ..*grid
    };
    let coarse_worker = Worker {
        kind: worker.kind,
        f,
        grid: coarse,
        t,
    };
    let (_, coarse_total) = coarse_worker.run(w0, m_max, r0);

    Ok(SeriesResult {
        terms,
        total,
        tail_bound,
        quad_error: (total - coarse_total).abs(),
    })
}
