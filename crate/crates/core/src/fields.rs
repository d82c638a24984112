//! Deterministic scalar fields: potentials V(t, x) and homogeneous solutions
//! w(t, x). Evaluation is pure; every field knows a finite bound on its
//! absolute value, which the estimators use for overflow diagnostics and the
//! series oracles use for tail bounds.

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate_gl};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum ScalarField {
    Constant(f64),
    /// amplitude * cos(k · x), constant in time.
    CosineInSpace { amplitude: f64, wavevector: Vec<f64> },
    /// amplitude * exp(-|x - center|² / (2 width²)).
    GaussianBump {
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// (p0 + p1 t + p2 t²) * space(x).
    SeparableProduct {
        time_poly: [f64; 3],
        space: Box<ScalarField>,
    },
    /// d = 1 table with bilinear interpolation in (t, x), clamped at edges.
    TabulatedGrid(Arc<TabulatedGrid1d>),
    /// Wave-equation homogeneous solution from initial data (f0, f1):
    /// w(t, x) = ∂_t(S(t) * f0)(x) + (S(t) * f1)(x).
    WaveInitial {
        f0: Box<ScalarField>,
        f1: Box<ScalarField>,
        dim: usize,
    },
}

#[derive(Clone, Debug)]
pub struct TabulatedGrid1d {
    pub t_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// Row-major `t_grid.len() x x_grid.len()`.
    pub values: Vec<f64>,
}

impl TabulatedGrid1d {
    pub fn new(t_grid: Vec<f64>, x_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t_grid.len() < 2 || x_grid.len() < 2 {
            return Err(Error::invalid("tabulated grid needs at least 2x2 nodes"));
        }
        if values.len() != t_grid.len() * x_grid.len() {
            return Err(Error::invalid(format!(
                "tabulated grid expects {} values, got {}",
                t_grid.len() * x_grid.len(),
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("tabulated grid values must be finite"));
        }
        Ok(Self {
            t_grid,
            x_grid,
            values,
        })
    }

    fn locate(grid: &[f64], v: f64) -> (usize, f64) {
        let n = grid.len();
        if v <= grid[0] {
            return (0, 0.0);
        }
        if v >= grid[n - 1] {
            return (n - 2, 1.0);
        }
        let i = (grid.partition_point(|&g| g <= v) - 1).min(n - 2);
        (i, (v - grid[i]) / (grid[i + 1] - grid[i]))
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let (it, st) = Self::locate(&self.t_grid, t);
        let (ix, sx) = Self::locate(&self.x_grid, x);
        let nx = self.x_grid.len();
        let v00 = self.values[it * nx + ix];
        let v01 = self.values[it * nx + ix + 1];
        let v10 = self.values[(it + 1) * nx + ix];
        let v11 = self.values[(it + 1) * nx + ix + 1];
        (1.0 - st) * ((1.0 - sx) * v00 + sx * v01) + st * ((1.0 - sx) * v10 + sx * v11)
    }
}

impl ScalarField {
    pub fn constant(c: f64) -> Self {
        ScalarField::Constant(c)
    }

    pub fn zero() -> Self {
        ScalarField::Constant(0.0)
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::CosineInSpace {
                amplitude,
                wavevector,
            } => {
                let dot: f64 = wavevector.iter().zip(x.iter()).map(|(k, v)| k * v).sum();
                amplitude * dot.cos()
            }
            ScalarField::GaussianBump {
                amplitude,
                center,
                width,
            } => {
                let r2: f64 = center
                    .iter()
                    .zip(x.iter())
                    .map(|(c, v)| (v - c) * (v - c))
                    .sum();
                amplitude * (-r2 / (2.0 * width * width)).exp()
            }
            ScalarField::SeparableProduct { time_poly, space } => {
                (time_poly[0] + time_poly[1] * t + time_poly[2] * t * t) * space.eval(t, x)
            }
            ScalarField::TabulatedGrid(g) => g.eval(t, x[0]),
            ScalarField::WaveInitial { f0, f1, dim } => wave_initial_value(
                &|p: &[f64]| f0.eval(0.0, p),
                &|p: &[f64]| f1.eval(0.0, p),
                *dim,
                t,
                x,
            ),
        }
    }

    /// Finite bound on |field| over [0, t_max] x ℝ^d. Exact for the analytic
    /// variants; for `WaveInitial` in d >= 2 the gradient factor is estimated
    /// numerically, so the bound is a diagnostic estimate rather than a proof.
    pub fn bound(&self, t_max: f64) -> f64 {
        match self {
            ScalarField::Constant(c) => c.abs(),
            ScalarField::CosineInSpace { amplitude, .. } => amplitude.abs(),
            ScalarField::GaussianBump { amplitude, .. } => amplitude.abs(),
            ScalarField::SeparableProduct { time_poly, space } => {
                let [a, b, c] = *time_poly;
                let poly = |t: f64| (a + b * t + c * t * t).abs();
                let mut m = poly(0.0).max(poly(t_max));
                if c != 0.0 {
                    let vertex = -b / (2.0 * c);
                    if vertex > 0.0 && vertex < t_max {
                        m = m.max(poly(vertex));
                    }
                }
                m * space.bound(t_max)
            }
            ScalarField::TabulatedGrid(g) => {
                g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
            ScalarField::WaveInitial { f0, f1, dim } => {
                let base = f0.bound(t_max) + t_max * f1.bound(t_max);
                if *dim == 1 {
                    base
                } else {
                    base + t_max * gradient_estimate(f0, *dim)
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarField::Constant(c) if *c == 0.0)
    }
}

/// Crude sup |∇f| estimate over a probe lattice; used only for the
/// diagnostic bound of wave initial fields in d >= 2.
fn gradient_estimate(f: &ScalarField, dim: usize) -> f64 {
    let probes = [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0];
    let h = 1e-4;
    let mut worst = 0.0f64;
    let mut x = vec![0.0; dim];
    let count = probes.len().pow(dim as u32);
    for idx in 0..count {
        let mut rem = idx;
        for v in x.iter_mut() {
            *v = probes[rem % probes.len()];
            rem /= probes.len();
        }
        for j in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            worst = worst.max((f.eval(0.0, &xp) - f.eval(0.0, &xm)).abs() / (2.0 * h));
        }
    }
    worst
}

/// Homogeneous wave solution from initial displacement `f0` and velocity
/// `f1`: w(t, x) = ∂_t(S(t) * f0)(x) + (S(t) * f1)(x).
///
/// d = 1 uses the d'Alembert closed form; d = 2 integrates over the disk and
/// d = 3 over the sphere, with the time derivative taken by central
/// differences of step 1e-4 * t.
pub fn initial_wave_field(f0: ScalarField, f1: ScalarField, dim: usize) -> Result<ScalarField> {
    if !(1..=3).contains(&dim) {
        return Err(Error::unsupported(format!(
            "wave initial fields supported for d in 1..=3, got {dim}"
        )));
    }
    if !f0.bound(1.0).is_finite() || !f1.bound(1.0).is_finite() {
        return Err(Error::invalid("wave initial data must be bounded"));
    }
    Ok(ScalarField::WaveInitial {
        f0: Box::new(f0),
        f1: Box::new(f1),
        dim,
    })
}

type SpaceFn<'a> = &'a dyn Fn(&[f64]) -> f64;

/// Closure-level evaluation of the wave initial field; shared by the
/// `ScalarField` variant and by tests with data outside the field menu.
pub(crate) fn wave_initial_value(f0: SpaceFn, f1: SpaceFn, dim: usize, t: f64, x: &[f64]) -> f64 {
    if t == 0.0 {
        return f0(x);
    }
    match dim {
        1 => {
            let a = f0(&[x[0] + t]);
            let b = f0(&[x[0] - t]);
            let integral = integrate_gl(|y| f1(&[y]), x[0] - t, x[0] + t, 48);
            0.5 * (a + b) + 0.5 * integral
        }
        2 => {
            let h = 1e-4 * t;
            let d0 = (disk_convolve(f0, t + h, x) - disk_convolve(f0, t - h, x)) / (2.0 * h);
            d0 + disk_convolve(f1, t, x)
        }
        3 => {
            // S(t) * g = t * (spherical mean of g at radius t).
            let h = 1e-4 * t;
            let d0 = ((t + h) * sphere_average(f0, t + h, x)
                - (t - h) * sphere_average(f0, t - h, x))
                / (2.0 * h);
            d0 + t * sphere_average(f1, t, x)
        }
        _ => unreachable!("dimension validated at construction"),
    }
}

/// (S(t) * g)(x) in d = 2: t ∫_0^{π/2} sinψ (mean over φ of g(x - t sinψ ω)) dψ.
fn disk_convolve(g: SpaceFn, t: f64, x: &[f64]) -> f64 {
    let rule = gauss_legendre(24);
    let n_phi = 32;
    let mut acc = 0.0;
    for (&node, &wgt) in rule.nodes.iter().zip(&rule.weights) {
        let psi = 0.25 * std::f64::consts::PI * (node + 1.0);
        let r = t * psi.sin();
        let mut ring = 0.0;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            ring += g(&[x[0] - r * phi.cos(), x[1] - r * phi.sin()]);
        }
        acc += wgt * psi.sin() * ring / n_phi as f64;
    }
    t * acc * std::f64::consts::FRAC_PI_4
}

/// Spherical mean of g over the sphere of radius t centered at x (d = 3).
fn sphere_average(g: SpaceFn, t: f64, x: &[f64]) -> f64 {
    let rule = gauss_legendre(16);
    let n_phi = 32;
    let mut acc = 0.0;
    for (&node, &wgt) in rule.nodes.iter().zip(&rule.weights) {
        let z = node;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let mut ring = 0.0;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            ring += g(&[
                x[0] + t * r * phi.cos(),
                x[1] + t * r * phi.sin(),
                x[2] + t * z,
            ]);
        }
        acc += wgt * ring / n_phi as f64;
    }
    acc / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn basic_fields() {
        let c = ScalarField::constant(2.5);
        assert_eq!(c.eval(0.3, &[1.0, 2.0]), 2.5);
        assert_eq!(c.bound(10.0), 2.5);

        let cosf = ScalarField::CosineInSpace {
            amplitude: 2.0,
            wavevector: vec![1.0, 0.0],
        };
        assert_relative_eq!(cosf.eval(0.0, &[0.5, 9.0]), 2.0 * 0.5f64.cos());
        assert_eq!(cosf.bound(1.0), 2.0);

        let bump = ScalarField::GaussianBump {
            amplitude: 3.0,
            center: vec![1.0],
            width: 2.0,
        };
        assert_relative_eq!(bump.eval(0.0, &[1.0]), 3.0);
        assert_relative_eq!(bump.eval(0.0, &[3.0]), 3.0 * (-0.5f64).exp());

        let sep = ScalarField::SeparableProduct {
            time_poly: [1.0, -2.0, 0.5],
            space: Box::new(ScalarField::constant(2.0)),
        };
        assert_relative_eq!(sep.eval(2.0, &[0.0]), (1.0 - 4.0 + 2.0) * 2.0);
        // |1 - 2t + 0.5 t²| on [0, 4]: ends are both 1, vertex (t=2) is 1.
        assert_relative_eq!(sep.bound(4.0), 2.0);
    }

    #[test]
    fn tabulated_grid_interpolates_and_clamps() {
        let g = TabulatedGrid1d::new(
            vec![0.0, 1.0],
            vec![0.0, 1.0, 2.0],
            vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0],
        )
        .unwrap();
        let f = ScalarField::TabulatedGrid(Arc::new(g));
        assert_relative_eq!(f.eval(0.0, &[0.5]), 0.5);
        assert_relative_eq!(f.eval(0.5, &[0.0]), 5.0);
        assert_relative_eq!(f.eval(0.5, &[1.5]), (1.5 + 11.5) / 2.0);
        // Clamped outside.
        assert_relative_eq!(f.eval(-3.0, &[-4.0]), 0.0);
        assert_relative_eq!(f.eval(9.0, &[9.0]), 12.0);
        assert_eq!(f.bound(1.0), 12.0);

        assert!(TabulatedGrid1d::new(vec![0.0], vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(TabulatedGrid1d::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0]).is_err());
    }

    #[test]
    fn wave_initial_preserves_constants_in_all_dims() {
        for d in 1..=3 {
            let w = initial_wave_field(ScalarField::constant(1.0), ScalarField::zero(), d)
                .unwrap();
            let x = vec![0.3; d];
            for &t in &[0.0, 0.4, 1.7] {
                assert_relative_eq!(w.eval(t, &x), 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn dalembert_linear_and_velocity_data() {
        // f0(x) = x is preserved; f1 = 1 contributes t.
        let lin = |p: &[f64]| p[0];
        let one = |_: &[f64]| 1.0;
        for &(t, x) in &[(0.5, 0.0), (1.0, 2.0), (2.0, -3.0)] {
            assert_relative_eq!(wave_initial_value(&lin, &one, 1, t, &[x]), x + t, epsilon = 1e-11);
        }
    }

    #[test]
    fn kirchhoff_quadratic_initial_data() {
        // d = 3, f0 = |x|²: spherical mean is |x|² + t², so
        // w = ∂_t(t(|x|² + t²)) = |x|² + 3t².
        let r2 = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
        let zero = |_: &[f64]| 0.0;
        for &(t, x) in &[(0.3, [0.0, 0.0, 0.0]), (0.8, [1.0, -0.5, 0.25])] {
            let want = r2(&x) + 3.0 * t * t;
            assert_relative_eq!(
                wave_initial_value(&r2, &zero, 3, t, &x),
                want,
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn poisson_disk_quadratic_initial_data() {
        // d = 2, f0 = |x|²: S(t)*f0 = t|x|² + (2/3)t³, so w = |x|² + 2t².
        let r2 = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
        let zero = |_: &[f64]| 0.0;
        for &(t, x) in &[(0.4, [0.0, 0.0]), (1.1, [0.7, -0.2])] {
            let want = r2(&x) + 2.0 * t * t;
            assert_relative_eq!(
                wave_initial_value(&r2, &zero, 2, t, &x),
                want,
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(initial_wave_field(ScalarField::constant(1.0), ScalarField::zero(), 4).is_err());
        assert!(initial_wave_field(ScalarField::constant(1.0), ScalarField::zero(), 0).is_err());
    }
}
