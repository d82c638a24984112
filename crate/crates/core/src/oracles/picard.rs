//! Series solution by nested quadrature in one space dimension.
//!
//! Iterates H_0 = w,
//! H_{m+1}(t, x) = ∫_0^t ds ∫ S(s, dy) V(t-s, x-y) H_m(t-s, x-y),
//! on a uniform (t, x) grid, with Gauss-Legendre quadrature in y over the
//! kernel support (the flat interval |y| < s for the wave kernel, ±8√s for
//! the heat Gaussian) and the trapezoid rule in s. The returned sum carries
//! the factorial tail bound for the dropped remainder.

use super::{factorial_tail_bound, interp_row, required_terms, SeriesResult};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::kernels::Kernel;
use crate::quad::gauss_legendre;

#[derive(Clone, Copy, Debug)]
pub struct PicardGrid {
    pub x_min: f64,
    pub x_max: f64,
    /// Spatial points (x_max excluded when periodic).
    pub nx: usize,
    /// Time steps (nt + 1 grid rows).
    pub nt: usize,
    pub periodic: bool,
}

impl PicardGrid {
    /// Periodic grid over [-π, π), matching 2π-periodic potentials exactly.
    pub fn periodic_2pi(nx: usize, nt: usize) -> Self {
        PicardGrid {
            x_min: -std::f64::consts::PI,
            x_max: std::f64::consts::PI,
            nx,
            nt,
            periodic: true,
        }
    }

    fn dx(&self) -> f64 {
        if self.periodic {
            (self.x_max - self.x_min) / self.nx as f64
        } else {
            (self.x_max - self.x_min) / (self.nx - 1) as f64
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 8 || self.nt < 4 {
            return Err(Error::Grid("picard grid needs nx >= 8, nt >= 4".into()));
        }
        if !(self.x_max > self.x_min) {
            return Err(Error::Grid("degenerate picard domain".into()));
        }
        Ok(())
    }
}

enum Kind {
    Heat,
    Wave,
}

fn heat_density(s: f64, y: f64) -> f64 {
    (-y * y / (2.0 * s)).exp() / (2.0 * std::f64::consts::PI * s).sqrt()
}

struct Worker<'a> {
    kind: Kind,
    v: &'a ScalarField,
    grid: PicardGrid,
    t: f64,
}

impl Worker<'_> {
    /// One series term update: next(t_i, x_j) for all grid nodes.
    fn step(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let nt = self.grid.nt;
        let nx = self.grid.nx;
        let ht = self.t / nt as f64;
        let dx = self.grid.dx();
        let rule = gauss_legendre(match self.kind {
            Kind::Heat => 32,
            Kind::Wave => 16,
        });
        let mut out = vec![vec![0.0; nx]; nt + 1];
        for i in 1..=nt {
            let ti = i as f64 * ht;
            let mut acc = vec![0.0; nx];
            for k in 0..=i {
                let s = k as f64 * ht;
                let weight = if k == 0 || k == i { 0.5 * ht } else { ht };
                let t_rem = ti - s; // lands exactly on grid row i - k
                let row = &rows[i - k];
                match self.kind {
                    Kind::Heat => {
                        if k == 0 {
                            // s -> 0: the kernel collapses to a point mass.
                            for j in 0..nx {
                                let xj = self.grid.x_min + j as f64 * dx;
                                acc[j] += weight * self.v.eval(t_rem, &[xj]) * row[j];
                            }
                        } else {
                            let half = 8.0 * s.sqrt();
                            for j in 0..nx {
                                let xj = self.grid.x_min + j as f64 * dx;
                                let mut inner = 0.0;
                                for (&node, &wq) in rule.nodes.iter().zip(&rule.weights) {
                                    let y = half * node;
                                    let xe = xj - y;
                                    let p = (xe - self.grid.x_min) / dx;
                                    inner += wq
                                        * heat_density(s, y)
                                        * self.v.eval(t_rem, &[xe])
                                        * interp_row(row, p, self.grid.periodic);
                                }
                                acc[j] += weight * inner * half;
                            }
                        }
                    }
                    Kind::Wave => {
                        if k == 0 {
                            continue; // zero mass at s = 0
                        }
                        for j in 0..nx {
                            let xj = self.grid.x_min + j as f64 * dx;
                            let mut inner = 0.0;
                            for (&node, &wq) in rule.nodes.iter().zip(&rule.weights) {
                                let y = s * node;
                                let xe = xj - y;
                                let p = (xe - self.grid.x_min) / dx;
                                inner += wq
                                    * 0.5
                                    * self.v.eval(t_rem, &[xe])
                                    * interp_row(row, p, self.grid.periodic);
                            }
                            acc[j] += weight * inner * s;
                        }
                    }
                }
            }
            out[i] = acc;
        }
        out
    }

    fn run(&self, w: &ScalarField, m_max: usize, x: f64) -> (Vec<f64>, f64) {
        let nt = self.grid.nt;
        let nx = self.grid.nx;
        let ht = self.t / nt as f64;
        let dx = self.grid.dx();
        let mut rows: Vec<Vec<f64>> = (0..=nt)
            .map(|i| {
                (0..nx)
                    .map(|j| w.eval(i as f64 * ht, &[self.grid.x_min + j as f64 * dx]))
                    .collect()
            })
            .collect();
        let p = (x - self.grid.x_min) / dx;
        let mut terms = vec![w.eval(self.t, &[x])];
        for _ in 0..m_max {
            rows = self.step(&rows);
            terms.push(interp_row(&rows[nt], p, self.grid.periodic));
        }
        let total = terms.iter().sum();
        (terms, total)
    }
}

/// Evaluate the truncated series Σ_{m <= m_max} H_m(t, x) for the heat or
/// wave kernel in d = 1, together with the factorial tail bound and a
/// half-resolution quadrature error estimate.
pub fn picard_series_1d(
    kernel: &Kernel,
    v: &ScalarField,
    w: &ScalarField,
    t: f64,
    x: f64,
    m_max: usize,
    grid: &PicardGrid,
) -> Result<SeriesResult> {
    let kind = match kernel {
        Kernel::Heat { dim: 1 } => Kind::Heat,
        Kernel::Wave { dim: 1 } => Kind::Wave,
        _ => {
            return Err(Error::unsupported(
                "series quadrature covers the heat and wave kernels in d = 1",
            ))
        }
    };
    grid.validate()?;
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::invalid(format!("horizon must be positive, got {t}")));
    }
    let sup_w = w.bound(t);
    let scale = v.bound(t) * kernel.supremum_mass(t) * t;
    if !sup_w.is_finite() || !scale.is_finite() {
        return Err(Error::invalid("fields must be bounded"));
    }
    let tail_bound = factorial_tail_bound(scale, sup_w, m_max);
    if tail_bound > 1e-3 {
        return Err(Error::TruncationTooShort {
            required: required_terms(scale, sup_w, 1e-6),
            got: m_max,
        });
    }

    let worker = Worker {
        kind,
        v,
        grid: *grid,
        t,
    };
    let (terms, total) = worker.run(w, m_max, x);

    let coarse_grid = PicardGrid {
        nx: (grid.nx / 2).max(8),
        nt: (grid.nt / 2).max(4),
        ..*grid
    };
    let coarse_worker = Worker {
        kind: worker.kind,
        v,
        grid: coarse_grid,
        t,
    };
    let (_, coarse_total) = coarse_worker.run(w, m_max, x);

    Ok(SeriesResult {
        terms,
        total,
        tail_bound,
        quad_error: (total - coarse_total).abs(),
    })
}
