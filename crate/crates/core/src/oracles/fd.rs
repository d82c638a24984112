//! Finite-difference reference solutions in one space dimension.
//!
//! Heat (u_t = ½ u_xx + V u): Crank-Nicolson diffusion with the reaction
//! term treated explicitly by a two-step Adams-Bashforth extrapolation,
//! O(Δt² + Δx²). Wave (u_tt = u_xx + V u): leapfrog, O(Δt² + Δx²), subject
//! to the CFL constraint Δt <= Δx.
//!
//! Boundary handling is periodic (recommended; exact for periodic data) or
//! frozen-edge Dirichlet, in which case the domain must be wide enough that
//! the boundary influence at the queried points is negligible.

use crate::error::{Error, Result};
use crate::fields::ScalarField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    /// Number of spatial points (periodic grids exclude x_max).
    pub nx: usize,
    /// Number of time steps.
    pub nt: usize,
    pub horizon: f64,
    pub periodic: bool,
}

impl Grid1D {
    pub fn periodic(x_min: f64, x_max: f64, nx: usize, nt: usize, horizon: f64) -> Self {
        Grid1D {
            x_min,
            x_max,
            nx,
            nt,
            horizon,
            periodic: true,
        }
    }

    pub fn dx(&self) -> f64 {
        if self.periodic {
            (self.x_max - self.x_min) / self.nx as f64
        } else {
            (self.x_max - self.x_min) / (self.nx - 1) as f64
        }
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.nt as f64
    }

    pub fn x_at(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.nt < 2 {
            return Err(Error::Grid("need nx >= 2 and nt >= 2".into()));
        }
        if !(self.x_max > self.x_min) || !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err(Error::Grid("degenerate domain".into()));
        }
        Ok(())
    }

    /// Leapfrog stability for the wave solver.
    pub fn validate_wave_cfl(&self) -> Result<()> {
        self.validate()?;
        if self.dt() > self.dx() {
            return Err(Error::Grid(format!(
                "wave CFL violated: dt = {} > dx = {}",
                self.dt(),
                self.dx()
            )));
        }
        Ok(())
    }

    /// Stability of fully explicit heat stepping (recorded for reference;
    /// the Crank-Nicolson path only restricts the explicit reaction term).
    pub fn validate_heat_explicit_cfl(&self) -> Result<()> {
        self.validate()?;
        if self.dt() > 0.5 * self.dx() * self.dx() {
            return Err(Error::Grid(format!(
                "explicit heat constraint violated: dt = {} > dx²/2 = {}",
                self.dt(),
                0.5 * self.dx() * self.dx()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdEquation {
    Heat,
    Wave,
}

/// Full space-time solution array.
#[derive(Clone, Debug)]
pub struct FdSolution {
    pub grid: Grid1D,
    /// (nt + 1) rows of nx values.
    pub values: Vec<f64>,
}

impl FdSolution {
    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n * self.grid.nx..(n + 1) * self.grid.nx]
    }

    /// Bilinear interpolation in (t, x); x wraps on periodic grids.
    pub fn at(&self, t: f64, x: f64) -> f64 {
        let g = &self.grid;
        let tf = (t / g.dt()).clamp(0.0, g.nt as f64);
        let it = (tf as usize).min(g.nt - 1);
        let st = tf - it as f64;
        let row0 = self.row(it);
        let row1 = self.row(it + 1);
        let sample = |row: &[f64]| -> f64 {
            let mut p = (x - g.x_min) / g.dx();
            if g.periodic {
                p = p.rem_euclid(g.nx as f64);
                let j = p as usize % g.nx;
                let s = p - p.floor();
                row[j] * (1.0 - s) + row[(j + 1) % g.nx] * s
            } else {
                p = p.clamp(0.0, (g.nx - 1) as f64);
                let j = (p as usize).min(g.nx - 2);
                let s = p - j as f64;
                row[j] * (1.0 - s) + row[j + 1] * s
            }
        };
        sample(row0) * (1.0 - st) + sample(row1) * st
    }

    pub fn final_at(&self, x: f64) -> f64 {
        self.at(self.grid.horizon, x)
    }
}

/// Constant-coefficient tridiagonal system with optional cyclic corners,
/// solved by the Thomas algorithm (plus Sherman-Morrison when cyclic).
struct ConstTridiag {
    diag: f64,
    off: f64,
    cyclic: bool,
}

impl ConstTridiag {
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        if !self.cyclic {
            return self.thomas_var(&vec![self.diag; n], rhs);
        }
        // Sherman-Morrison: write A = T + u v^T with u = gamma e_0 + off e_{n-1}
        // scaled so T keeps a safe diagonal.
        let gamma = -self.diag;
        let mut d0 = vec![self.diag; n];
        d0[0] = self.diag - gamma;
        d0[n - 1] = self.diag - self.off * self.off / gamma;
        let y = self.thomas_var(&d0, rhs);
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = self.off;
        let z = self.thomas_var(&d0, &u);
        let vy = y[0] + self.off / gamma * y[n - 1];
        let vz = z[0] + self.off / gamma * z[n - 1];
        let factor = vy / (1.0 + vz);
        y.iter().zip(&z).map(|(a, b)| a - factor * b).collect()
    }

    /// Thomas with per-row diagonal (constant off-diagonals).
    fn thomas_var(&self, diag: &[f64], rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut c_star = vec![0.0; n];
        let mut d_star = vec![0.0; n];
        c_star[0] = self.off / diag[0];
        d_star[0] = rhs[0] / diag[0];
        for i in 1..n {
            let m = diag[i] - self.off * c_star[i - 1];
            c_star[i] = self.off / m;
            d_star[i] = (rhs[i] - self.off * d_star[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d_star[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d_star[i] - c_star[i] * x[i + 1];
        }
        x
    }
}

fn second_difference(row: &[f64], j: usize, dx2: f64, periodic: bool) -> f64 {
    let n = row.len();
    let (lo, hi) = if periodic {
        (row[(j + n - 1) % n], row[(j + 1) % n])
    } else if j == 0 || j == n - 1 {
        return 0.0; // frozen Dirichlet edges
    } else {
        (row[j - 1], row[j + 1])
    };
    (lo - 2.0 * row[j] + hi) / dx2
}

/// Reference solution of the heat (u_t = ½u_xx + Vu, u(0) = f0) or wave
/// (u_tt = u_xx + Vu, u(0) = f0, u_t(0) = f1) problem on a 1-d grid.
pub fn fd_reference_1d(
    equation: FdEquation,
    v: &ScalarField,
    f0: &ScalarField,
    f1: &ScalarField,
    grid: &Grid1D,
) -> Result<FdSolution> {
    match equation {
        FdEquation::Wave => fd_wave(v, f0, f1, grid),
        FdEquation::Heat => fd_heat(v, f0, grid),
    }
}

fn field_row(f: &ScalarField, t: f64, grid: &Grid1D) -> Vec<f64> {
    (0..grid.nx).map(|j| f.eval(t, &[grid.x_at(j)])).collect()
}

fn fd_wave(v: &ScalarField, f0: &ScalarField, f1: &ScalarField, grid: &Grid1D) -> Result<FdSolution> {
    grid.validate_wave_cfl()?;
    let (nx, nt) = (grid.nx, grid.nt);
    let (dt, dx) = (grid.dt(), grid.dx());
    let dx2 = dx * dx;
    let mut values = Vec::with_capacity((nt + 1) * nx);
    let u0 = field_row(f0, 0.0, grid);
    // Second-order Taylor bootstrap for the first step.
    let v0 = field_row(v, 0.0, grid);
    let vel = field_row(f1, 0.0, grid);
    let mut u1 = vec![0.0; nx];
    for j in 0..nx {
        let lap = second_difference(&u0, j, dx2, grid.periodic);
        u1[j] = u0[j] + dt * vel[j] + 0.5 * dt * dt * (lap + v0[j] * u0[j]);
    }
    values.extend_from_slice(&u0);
    values.extend_from_slice(&u1);
    let mut prev = u0;
    let mut curr = u1;
    for n in 1..nt {
        let tn = n as f64 * dt;
        let vn = field_row(v, tn, grid);
        let mut next = vec![0.0; nx];
        for j in 0..nx {
            let lap = second_difference(&curr, j, dx2, grid.periodic);
            next[j] = 2.0 * curr[j] - prev[j] + dt * dt * (lap + vn[j] * curr[j]);
        }
        if !grid.periodic {
            next[0] = curr[0];
            next[nx - 1] = curr[nx - 1];
        }
        values.extend_from_slice(&next);
        prev = curr;
        curr = next;
    }
    Ok(FdSolution {
        grid: *grid,
        values,
    })
}

fn fd_heat(v: &ScalarField, f0: &ScalarField, grid: &Grid1D) -> Result<FdSolution> {
    grid.validate()?;
    let (nx, nt) = (grid.nx, grid.nt);
    let (dt, dx) = (grid.dt(), grid.dx());
    let v_bound = v.bound(grid.horizon);
    if dt * v_bound > 0.5 {
        return Err(Error::Grid(format!(
            "explicit reaction term needs dt |V| <= 1/2, got {}",
            dt * v_bound
        )));
    }
    let dx2 = dx * dx;
    let r = 0.25 * dt / dx2; // ½ from the diffusion coefficient, ½ from CN
    let solver = ConstTridiag {
        diag: 1.0 + 2.0 * r,
        off: -r,
        cyclic: grid.periodic,
    };
    let mut values = Vec::with_capacity((nt + 1) * nx);
    let mut curr = field_row(f0, 0.0, grid);
    values.extend_from_slice(&curr);
    // reaction[j] at the two previous levels, for the AB2 extrapolation
    let mut react_prev: Option<Vec<f64>> = None;
    for n in 0..nt {
        let tn = n as f64 * dt;
        let vn = field_row(v, tn, grid);
        let react_n: Vec<f64> = (0..nx).map(|j| vn[j] * curr[j]).collect();
        let mut step = |react: &[f64]| -> Vec<f64> {
            let mut rhs = vec![0.0; nx];
            for j in 0..nx {
                let lap = second_difference(&curr, j, dx2, grid.periodic);
                rhs[j] = curr[j] + 0.25 * dt * lap + dt * react[j];
            }
            if grid.periodic {
                solver.solve(&rhs)
            } else {
                let mut out = solver.solve(&rhs);
                out[0] = curr[0];
                out[nx - 1] = curr[nx - 1];
                out
            }
        };
        let next = match &react_prev {
            None => {
                // Heun bootstrap: predict with the current reaction, then
                // correct with the midpoint average.
                let pred = step(&react_n);
                let vn1 = field_row(v, tn + dt, grid);
                let react_avg: Vec<f64> = (0..nx)
                    .map(|j| 0.5 * (react_n[j] + vn1[j] * pred[j]))
                    .collect();
                step(&react_avg)
            }
            Some(prev) => {
                let react_ab: Vec<f64> = (0..nx)
                    .map(|j| 1.5 * react_n[j] - 0.5 * prev[j])
                    .collect();
                step(&react_ab)
            }
        };
        values.extend_from_slice(&next);
        react_prev = Some(react_n);
        curr = next;
    }
    Ok(FdSolution {
        grid: *grid,
        values,
    })
}
