//! Product moments of solutions driven by spatially homogeneous Gaussian
//! noise that is white in time, plus the spectral admissibility integral.
//!
//! Second moments use one rate-1 Poisson clock shared by two renewal paths;
//! the n-th product moment uses a Poisson measure marked by unordered index
//! pairs. Both require a non-negative kernel, so the beam family is rejected.

use crate::error::{Error, Result};
use crate::estimator::EstimatorResult;
use crate::fields::ScalarField;
use crate::kernels::{Kernel, Point};
use crate::paths::{build_multi_paths, sample_pair_clock, sample_poisson_times};
use crate::quad::integrate_gl;
use crate::rng::{sample_stream, SampleRng};
use crate::stats::parallel_sample_sum;

/// Default upper bound on the product-moment order: the deterministic factor
/// e^{t n(n-1)/2} makes the relative Monte Carlo error explode beyond this.
pub const DEFAULT_ORDER_CAP: usize = 6;

/// Spatial covariance f(x - y) of the driving noise, together with its
/// spectral measure. All kinds are bounded, symmetric and continuous, so the
/// moment weights stay finite at coincident points.
#[derive(Clone, Debug)]
pub enum Covariance {
    /// f ≡ level; spectral measure is a point mass of that level at 0.
    Constant { level: f64 },
    /// f(x) = exp(-|x| / scale).
    Exponential { scale: f64, dim: usize },
    /// f(x) = exp(-|x|² / (2 scale²)).
    Gaussian { scale: f64, dim: usize },
}

impl Covariance {
    pub fn constant(level: f64) -> Result<Self> {
        if !level.is_finite() || level < 0.0 {
            return Err(Error::invalid(format!(
                "constant covariance level must be non-negative, got {level}"
            )));
        }
        Ok(Covariance::Constant { level })
    }

    pub fn exponential(scale: f64, dim: usize) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::invalid(format!(
                "exponential covariance scale must be positive, got {scale}"
            )));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::unsupported(
                "spectral density formulas cover d in 1..=3",
            ));
        }
        Ok(Covariance::Exponential { scale, dim })
    }

    pub fn gaussian(scale: f64, dim: usize) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::invalid(format!(
                "gaussian covariance scale must be positive, got {scale}"
            )));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::unsupported(
                "spectral density formulas cover d in 1..=3",
            ));
        }
        Ok(Covariance::Gaussian { scale, dim })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Covariance::Constant { .. } => "constant",
            Covariance::Exponential { .. } => "exponential",
            Covariance::Gaussian { .. } => "gaussian",
        }
    }

    /// f evaluated at a difference vector.
    pub fn eval(&self, diff: &[f64]) -> f64 {
        match self {
            Covariance::Constant { level } => *level,
            Covariance::Exponential { scale, .. } => {
                let r: f64 = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
                (-r / scale).exp()
            }
            Covariance::Gaussian { scale, .. } => {
                let r2: f64 = diff.iter().map(|v| v * v).sum();
                (-r2 / (2.0 * scale * scale)).exp()
            }
        }
    }

    /// sup |f|.
    pub fn bound(&self) -> f64 {
        match self {
            Covariance::Constant { level } => *level,
            _ => 1.0,
        }
    }

    /// Point mass at the origin, if the spectral measure is one.
    pub fn spectral_point_mass(&self) -> Option<f64> {
        match self {
            Covariance::Constant { level } => Some(*level),
            _ => None,
        }
    }

    /// Radial spectral density g(ρ) (the measure is g(|ξ|) dξ), using the
    /// convention f(x) = ∫ e^{i ξ·x} μ(dξ).
    pub fn spectral_radial(&self, rho: f64) -> f64 {
        match self {
            Covariance::Constant { .. } => 0.0,
            Covariance::Exponential { scale, dim } => {
                let l = *scale;
                let q = 1.0 + l * l * rho * rho;
                match dim {
                    1 => l / (std::f64::consts::PI * q),
                    2 => l * l / (2.0 * std::f64::consts::PI * q.powf(1.5)),
                    3 => l * l * l / (std::f64::consts::PI.powi(2) * q * q),
                    _ => unreachable!("dimension validated at construction"),
                }
            }
            Covariance::Gaussian { scale, dim } => {
                let l = *scale;
                (l * l / (2.0 * std::f64::consts::PI)).powf(*dim as f64 / 2.0)
                    * (-0.5 * l * l * rho * rho).exp()
            }
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Covariance::Constant { .. } => None,
            Covariance::Exponential { dim, .. } | Covariance::Gaussian { dim, .. } => Some(*dim),
        }
    }
}

fn validate_moment_inputs(
    kernel: &Kernel,
    cov: &Covariance,
    w: &ScalarField,
    t: f64,
    points: &[&[f64]],
) -> Result<()> {
    if kernel.is_signed() {
        return Err(Error::unsupported(
            "moment representations require a non-negative kernel; the beam kernel is excluded",
        ));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!(
            "horizon must be finite and non-negative, got {t}"
        )));
    }
    if let Some(d) = cov.dim() {
        if d != kernel.dim() {
            return Err(Error::invalid(format!(
                "covariance dimension {d} does not match kernel dimension {}",
                kernel.dim()
            )));
        }
    }
    if !cov.bound().is_finite() {
        return Err(Error::invalid("covariance must be bounded"));
    }
    if !w.bound(t.max(1e-300)).is_finite() {
        return Err(Error::invalid("homogeneous term must be bounded"));
    }
    for p in points {
        if p.len() != kernel.dim() {
            return Err(Error::invalid(format!(
                "point has dimension {}, kernel expects {}",
                p.len(),
                kernel.dim()
            )));
        }
    }
    Ok(())
}

/// One sample weight for E[u(t,x) u(t,y)]: two renewal paths sharing a
/// rate-1 clock, weighted by mass² f(X¹-X²) per jump.
pub fn second_moment_weight(
    kernel: &Kernel,
    cov: &Covariance,
    w: &ScalarField,
    t: f64,
    x: &[f64],
    y: &[f64],
    rng: &mut SampleRng,
) -> Result<(f64, u32)> {
    let times = sample_poisson_times(1.0, t, rng)?;
    let mut p1: Point = x.iter().copied().collect();
    let mut p2: Point = y.iter().copied().collect();
    let mut core = 1.0;
    let mut prev = 0.0;
    let mut diff: Point = Point::new();
    for &tau in &times {
        let gap = tau - prev;
        let inc1 = kernel.sample_increment_unchecked(gap, rng)?;
        for (c, d) in p1.iter_mut().zip(inc1.iter()) {
            *c += d;
        }
        let inc2 = kernel.sample_increment_unchecked(gap, rng)?;
        for (c, d) in p2.iter_mut().zip(inc2.iter()) {
            *c += d;
        }
        let m = kernel.mass_value(gap);
        diff.clear();
        diff.extend(p1.iter().zip(p2.iter()).map(|(a, b)| a - b));
        core *= m * m * cov.eval(&diff);
        prev = tau;
    }
    let weight = t.exp() * core * w.eval(t - prev, &p1) * w.eval(t - prev, &p2);
    Ok((weight, times.len() as u32))
}

/// Estimate E[u(t,x) u(t,y)] for the noise-driven equation. The two query
/// points are ordered canonically first, so exchanging x and y reproduces
/// the identical sample path and a bit-identical result.
#[allow(clippy::too_many_arguments)]
pub fn estimate_second_moment(
    kernel: &Kernel,
    cov: &Covariance,
    w: &ScalarField,
    t: f64,
    x: &[f64],
    y: &[f64],
    n_samples: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    validate_moment_inputs(kernel, cov, w, t, &[x, y])?;
    let (x, y) = if x
        .iter()
        .zip(y.iter())
        .find_map(|(a, b)| {
            if a < b {
                Some(false)
            } else if a > b {
                Some(true)
            } else {
                None
            }
        })
        .unwrap_or(false)
    {
        (y, x)
    } else {
        (x, y)
    };
    let config = format!(
        "moment order=2 equation={} dim={} cov={} t={t} samples={n_samples}",
        kernel.equation_name(),
        kernel.dim(),
        cov.name()
    );
    if t == 0.0 {
        return Ok(EstimatorResult::exact(
            w.eval(0.0, x) * w.eval(0.0, y),
            seed,
            vec![x.to_vec(), y.to_vec()],
            config,
        ));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be positive"));
    }
    let stats = parallel_sample_sum(n_samples, |i| {
        let mut rng = sample_stream(seed, i);
        second_moment_weight(kernel, cov, w, t, x, y, &mut rng)
            .expect("per-sample evaluation cannot fail after validation")
    });
    Ok(EstimatorResult::from_stats(
        stats,
        seed,
        t,
        vec![x.to_vec(), y.to_vec()],
        config,
        false,
    ))
}

/// One sample weight for the n-point product moment at a single time t.
pub fn nth_moment_weight(
    kernel: &Kernel,
    cov: &Covariance,
    w: &ScalarField,
    t: f64,
    origins: &[Point],
    rng: &mut SampleRng,
) -> Result<(f64, u32)> {
    let n = origins.len();
    let clock = sample_pair_clock(n, t, rng)?;
    let paths = build_multi_paths(kernel, &clock, origins, rng)?;
    let mut core = 1.0;
    let mut diff: Point = Point::new();
    for event in &clock.events {
        let (a, b) = paths.event_positions(event);
        diff.clear();
        diff.extend(a.iter().zip(b.iter()).map(|(u, v)| u - v));
        core *= cov.eval(&diff);
    }
    for times in &clock.per_index_times {
        let mut prev = 0.0;
        for &tau in times {
            core *= kernel.mass_value(tau - prev);
            prev = tau;
        }
    }
    for (idx, times) in clock.per_index_times.iter().enumerate() {
        let last = times.last().copied().unwrap_or(0.0);
        let pos = paths.last_position(idx, &origins[idx]);
        core *= w.eval(t - last, pos);
    }
    let rate = (n * (n - 1) / 2) as f64;
    Ok((
        (t * rate).exp() * core,
        clock.total_events() as u32,
    ))
}

/// Estimate E[u(t,x_1) ... u(t,x_n)] for 2 <= n <= 6 (the cap can be lifted
/// explicitly; beyond it the deterministic exponential factor makes the
/// relative error impractical).
#[allow(clippy::too_many_arguments)]
pub fn estimate_nth_moment(
    kernel: &Kernel,
    cov: &Covariance,
    w: &ScalarField,
    t: f64,
    points: &[Vec<f64>],
    n_samples: u64,
    seed: u64,
    allow_high_order: bool,
) -> Result<EstimatorResult> {
    let n = points.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "product moment needs at least two points, got {n}"
        )));
    }
    if n > DEFAULT_ORDER_CAP && !allow_high_order {
        return Err(Error::invalid(format!(
            "moment order {n} exceeds the default cap {DEFAULT_ORDER_CAP}; \
             pass the explicit override to proceed"
        )));
    }
    let views: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    validate_moment_inputs(kernel, cov, w, t, &views)?;
    let config = format!(
        "moment order={n} equation={} dim={} cov={} t={t} samples={n_samples}",
        kernel.equation_name(),
        kernel.dim(),
        cov.name()
    );
    if t == 0.0 {
        let value = points.iter().map(|p| w.eval(0.0, p)).product();
        return Ok(EstimatorResult::exact(value, seed, points.to_vec(), config));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be positive"));
    }
    let origins: Vec<Point> = points.iter().map(|p| p.iter().copied().collect()).collect();
    let stats = parallel_sample_sum(n_samples, |i| {
        let mut rng = sample_stream(seed, i);
        nth_moment_weight(kernel, cov, w, t, &origins, &mut rng)
            .expect("per-sample evaluation cannot fail after validation")
    });
    Ok(EstimatorResult::from_stats(
        stats,
        seed,
        t,
        points.to_vec(),
        config,
        false,
    ))
}

/// Result of the spectral admissibility integral
/// ∫_0^T ds ∫ μ(dξ) |ℱS(s,·)(ξ)|².
#[derive(Clone, Debug)]
pub enum AdmissibilityOutcome {
    Finite {
        value: f64,
        truncation_radius: f64,
        last_rel_change: f64,
    },
    Divergent {
        truncation_radius: f64,
        last_value: f64,
    },
}

impl AdmissibilityOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            AdmissibilityOutcome::Finite { value, .. } => Some(*value),
            AdmissibilityOutcome::Divergent { .. } => None,
        }
    }
}

/// Closed-form time integral W(ρ) = ∫_0^T |ℱS(s,·)|²(ρ) ds per kernel.
fn time_integral(kernel: &Kernel, horizon: f64, rho: f64) -> f64 {
    let t = horizon;
    match kernel {
        Kernel::Heat { .. } => {
            let q = rho * rho;
            if q * t < 1e-12 {
                t
            } else {
                -(-t * q).exp_m1() / q
            }
        }
        Kernel::Wave { .. } => {
            if 2.0 * t * rho < 1e-3 {
                // Series around ρ = 0 avoids the cancellation in the closed form.
                t * t * t / 3.0 - 4.0 / 15.0 * t.powi(5) * rho * rho
            } else {
                (t / 2.0 - (2.0 * t * rho).sin() / (4.0 * rho)) / (rho * rho)
            }
        }
        Kernel::Beam { .. } => {
            let q = rho.powi(4);
            if 2.0 * q * t < 1e-12 {
                t
            } else {
                -(-2.0 * t * q).exp_m1() / (2.0 * q)
            }
        }
        Kernel::DampedWave { .. } => unreachable!("rejected before quadrature"),
    }
}

fn sphere_surface(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => unreachable!("spectral densities are defined for d <= 3"),
    }
}

/// Radial truncation loop shared by the public check and the tests: doubles
/// the truncation radius until the added mass passes a Cauchy criterion.
pub(crate) fn radial_admissibility<G, W>(
    density: G,
    dim: usize,
    time_int: W,
) -> AdmissibilityOutcome
where
    G: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    let surf = sphere_surface(dim);
    let integrand = |rho: f64| surf * density(rho) * rho.powi(dim as i32 - 1) * time_int(rho);
    let mut value = integrate_gl(integrand, 0.0, 1.0, 64);
    let mut radius = 1.0;
    let mut last_rel = f64::INFINITY;
    for _ in 0..60 {
        let add = integrate_gl(integrand, radius, 2.0 * radius, 64);
        value += add;
        radius *= 2.0;
        last_rel = add.abs() / value.abs().max(1e-300);
        if last_rel < 1e-10 {
            return AdmissibilityOutcome::Finite {
                value,
                truncation_radius: radius,
                last_rel_change: last_rel,
            };
        }
    }
    let _ = last_rel;
    AdmissibilityOutcome::Divergent {
        truncation_radius: radius,
        last_value: value,
    }
}

/// Evaluate the admissibility integral for a kernel/covariance pair, or flag
/// divergence when radius doubling fails the Cauchy criterion.
pub fn check_admissibility(
    kernel: &Kernel,
    cov: &Covariance,
    horizon: f64,
) -> Result<AdmissibilityOutcome> {
    if !kernel.has_fourier() {
        return Err(Error::unsupported(
            "admissibility needs the kernel's Fourier transform (unavailable for damped wave)",
        ));
    }
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::invalid(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if let Some(d) = cov.dim() {
        if d != kernel.dim() {
            return Err(Error::invalid(format!(
                "covariance dimension {d} does not match kernel dimension {}",
                kernel.dim()
            )));
        }
    }
    if let Some(level) = cov.spectral_point_mass() {
        // Point mass at 0: the spatial integral collapses to ρ = 0.
        return Ok(AdmissibilityOutcome::Finite {
            value: level * time_integral(kernel, horizon, 0.0),
            truncation_radius: 0.0,
            last_rel_change: 0.0,
        });
    }
    Ok(radial_admissibility(
        |rho| cov.spectral_radial(rho),
        kernel.dim(),
        |rho| time_integral(kernel, horizon, rho),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn second(
        kernel: &Kernel,
        cov: &Covariance,
        w: &ScalarField,
        t: f64,
        x: &[f64],
        y: &[f64],
        n: u64,
        seed: u64,
    ) -> EstimatorResult {
        estimate_second_moment(kernel, cov, w, t, x, y, n, seed).unwrap()
    }

    #[test]
    fn rejects_signed_kernels_and_bad_orders() {
        let beam = Kernel::beam_default();
        let cov = Covariance::constant(1.0).unwrap();
        let w = ScalarField::constant(1.0);
        assert!(estimate_second_moment(&beam, &cov, &w, 1.0, &[0.0], &[0.0], 10, 1).is_err());
        let heat = Kernel::heat(1).unwrap();
        assert!(estimate_nth_moment(&heat, &cov, &w, 1.0, &[vec![0.0]], 10, 1, false).is_err());
        let seven = vec![vec![0.0]; 7];
        assert!(estimate_nth_moment(&heat, &cov, &w, 0.5, &seven, 10, 1, false).is_err());
        assert!(estimate_nth_moment(&heat, &cov, &w, 0.125, &seven, 64, 1, true).is_ok());
        assert!(Covariance::constant(-1.0).is_err());
        assert!(Covariance::exponential(0.0, 1).is_err());
        assert!(Covariance::gaussian(1.0, 4).is_err());
    }

    #[test]
    fn zero_covariance_gives_product_of_w() {
        // f = 0: any jump kills the weight, so the mean is w(t,x) w(t,y).
        let k = Kernel::heat(1).unwrap();
        let cov = Covariance::constant(0.0).unwrap();
        let w = ScalarField::constant(2.0);
        let r = second(&k, &cov, &w, 0.7, &[0.1], &[0.4], 20_000, 3);
        let p0 = (-0.7f64).exp();
        let se = 4.0 * 0.7f64.exp() * (p0 * (1.0 - p0) / 20_000.0).sqrt();
        assert!((r.mean - 4.0).abs() < 4.0 * se.max(r.std_error * 4.0));

        // And exactly for each sample: weight is 0 or e^t * 4.
        let mut rng = sample_stream(5, 0);
        for _ in 0..200 {
            let (wt, jumps) =
                second_moment_weight(&k, &cov, &w, 0.7, &[0.1], &[0.4], &mut rng).unwrap();
            if jumps == 0 {
                assert_eq!(wt, 0.7f64.exp() * 4.0);
            } else {
                assert_eq!(wt, 0.0);
            }
        }
    }

    #[test]
    fn heat_constant_covariance_exponential_moment() {
        // M(t) = 1 + ∫ M => M(1) = e. Mass 1 and f = 1 make every weight
        // exactly e^t, so this configuration is zero-variance.
        let k = Kernel::heat(1).unwrap();
        let cov = Covariance::constant(1.0).unwrap();
        let w = ScalarField::constant(1.0);
        let r = second(&k, &cov, &w, 1.0, &[0.0], &[0.0], 50_000, 8);
        assert_eq!(r.mean.to_bits(), std::f64::consts::E.to_bits());
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn coupled_exchange_symmetry_is_exact() {
        let k = Kernel::wave(1).unwrap();
        let cov = Covariance::exponential(1.0, 1).unwrap();
        let w = ScalarField::constant(1.0);
        let a = second(&k, &cov, &w, 0.5, &[0.25], &[-0.5], 50_000, 17);
        let b = second(&k, &cov, &w, 0.5, &[-0.5], &[0.25], 50_000, 17);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn positivity_of_weights() {
        let k = Kernel::wave(3).unwrap();
        let cov = Covariance::gaussian(0.7, 3).unwrap();
        let w = ScalarField::constant(1.0);
        let mut rng = sample_stream(23, 0);
        for _ in 0..2_000 {
            let (wt, _) =
                second_moment_weight(&k, &cov, &w, 1.0, &[0.0; 3], &[0.5, 0.0, 0.0], &mut rng)
                    .unwrap();
            assert!(wt >= 0.0);
        }
    }

    #[test]
    fn nth_moment_matches_second_moment_at_n2() {
        let configs: Vec<(Kernel, Covariance, f64)> = vec![
            (
                Kernel::heat(1).unwrap(),
                Covariance::exponential(1.0, 1).unwrap(),
                0.8,
            ),
            (
                Kernel::wave(1).unwrap(),
                Covariance::constant(1.0).unwrap(),
                1.0,
            ),
            (
                Kernel::wave(3).unwrap(),
                Covariance::gaussian(1.0, 3).unwrap(),
                0.5,
            ),
        ];
        let w = ScalarField::constant(1.0);
        for (k, cov, t) in &configs {
            let d = k.dim();
            let x = vec![0.0; d];
            let mut y = vec![0.0; d];
            y[0] = 0.3;
            let a = second(k, cov, &w, *t, &x, &y, 200_000, 5);
            let b = estimate_nth_moment(
                k,
                cov,
                &w,
                *t,
                &[x.clone(), y.clone()],
                200_000,
                6,
                false,
            )
            .unwrap();
            let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            assert!(
                (a.mean - b.mean).abs() < 4.0 * se,
                "{} {}: {} vs {}",
                k.equation_name(),
                cov.name(),
                a.mean,
                b.mean
            );
        }
    }

    #[test]
    fn nth_moment_zero_variance_for_flat_configuration() {
        // Heat, f = 1, w = 1: every weight equals e^{t n(n-1)/2} exactly.
        let k = Kernel::heat(1).unwrap();
        let cov = Covariance::constant(1.0).unwrap();
        let w = ScalarField::constant(1.0);
        let points = vec![vec![0.0], vec![0.5], vec![-1.0]];
        let expected = (0.5f64 * 3.0).exp();
        let origins: Vec<Point> = points.iter().map(|p| p.iter().copied().collect()).collect();
        for i in 0..500 {
            let mut rng = sample_stream(9, i);
            let (wt, _) = nth_moment_weight(&k, &cov, &w, 0.5, &origins, &mut rng).unwrap();
            assert_eq!(wt.to_bits(), expected.to_bits());
        }
        let r = estimate_nth_moment(&k, &cov, &w, 0.5, &points, 10_000, 9, false).unwrap();
        assert_eq!(r.mean.to_bits(), expected.to_bits());
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn nth_moment_zero_covariance_gives_product_exactly_on_no_event_samples() {
        let k = Kernel::wave(1).unwrap();
        let cov = Covariance::constant(0.0).unwrap();
        let w = ScalarField::constant(3.0);
        let points = vec![vec![0.0], vec![0.2], vec![0.4]];
        let r = estimate_nth_moment(&k, &cov, &w, 0.4, &points, 100_000, 2, false).unwrap();
        // Mean estimates 27; each weight is 0 or e^{1.2 t} 27.
        let atom_p = (-0.4 * 3.0f64).exp();
        let atom = (0.4 * 3.0f64).exp() * 27.0;
        let se = atom * (atom_p * (1.0 - atom_p) / 100_000.0).sqrt();
        assert!((r.mean - 27.0).abs() < 4.0 * se, "mean {}", r.mean);
    }

    #[test]
    fn permutation_symmetry_statistical() {
        let k = Kernel::heat(1).unwrap();
        let cov = Covariance::exponential(0.5, 1).unwrap();
        let w = ScalarField::constant(1.0);
        let pts = vec![vec![0.0], vec![0.4], vec![-0.3]];
        let perm = vec![vec![0.4], vec![-0.3], vec![0.0]];
        let a = estimate_nth_moment(&k, &cov, &w, 0.6, &pts, 300_000, 31, false).unwrap();
        let b = estimate_nth_moment(&k, &cov, &w, 0.6, &perm, 300_000, 31, false).unwrap();
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() < 4.0 * se, "{} vs {}", a.mean, b.mean);
    }

    #[test]
    fn cauchy_schwarz_sanity() {
        let k = Kernel::heat(1).unwrap();
        let cov = Covariance::exponential(1.0, 1).unwrap();
        let w = ScalarField::constant(1.0);
        let (x, y) = ([0.0], [0.6]);
        let cross = second(&k, &cov, &w, 1.0, &x, &y, 200_000, 41);
        let xx = second(&k, &cov, &w, 1.0, &x, &x, 200_000, 42);
        let yy = second(&k, &cov, &w, 1.0, &y, &y, 200_000, 43);
        let lhs = cross.mean * cross.mean;
        let rhs = (xx.mean + 4.0 * xx.std_error) * (yy.mean + 4.0 * yy.std_error);
        assert!(lhs <= rhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn spectral_density_is_fourier_pair_of_f() {
        // g(ξ) == (2π)^{-d} ∫ e^{-iξx} f(|x|) dx at five probe frequencies,
        // radially reduced (f decays fast, so the quadrature is clean):
        //   d=1: (1/π)    ∫_0^∞ f(r) cos(ρ r) dr
        //   d=2: (1/2π)   ∫_0^∞ f(r) J0(ρ r) r dr
        //   d=3: (1/2π²)  ∫_0^∞ f(r) sinc(ρ r) r² dr
        let j0 = |x: f64| {
            integrate_gl(|t: f64| (x * t.sin()).cos(), 0.0, std::f64::consts::PI, 64)
                / std::f64::consts::PI
        };
        let probes = [0.0, 0.3, 0.9, 1.7, 3.1];
        let cases: Vec<Covariance> = vec![
            Covariance::exponential(1.0, 1).unwrap(),
            Covariance::exponential(0.7, 2).unwrap(),
            Covariance::exponential(1.3, 3).unwrap(),
            Covariance::gaussian(0.8, 1).unwrap(),
            Covariance::gaussian(1.1, 2).unwrap(),
            Covariance::gaussian(0.6, 3).unwrap(),
        ];
        for cov in &cases {
            let d = cov.dim().unwrap();
            let radial_f = |r: f64| {
                let mut x = vec![0.0; d];
                x[0] = r;
                cov.eval(&x)
            };
            for &rho in &probes {
                let inner = |r: f64| match d {
                    1 => radial_f(r) * (rho * r).cos() / std::f64::consts::PI,
                    2 => radial_f(r) * j0(rho * r) * r / (2.0 * std::f64::consts::PI),
                    3 => {
                        let s = if rho * r == 0.0 {
                            1.0
                        } else {
                            (rho * r).sin() / (rho * r)
                        };
                        radial_f(r) * s * r * r / (2.0 * std::f64::consts::PI.powi(2))
                    }
                    _ => unreachable!(),
                };
                let recon = crate::quad::integrate_gl_panels(inner, 0.0, 60.0, 48, 120);
                let want = cov.spectral_radial(rho);
                assert!(
                    (recon - want).abs() < 1e-8 + 1e-6 * want.abs(),
                    "{} d={d} rho={rho}: {recon} vs {want}",
                    cov.name()
                );
            }
        }
    }

    #[test]
    fn admissibility_values() {
        // Wave d=3 with point-mass spectrum: ∫_0^1 s² ds = 1/3 exactly.
        let w3 = Kernel::wave(3).unwrap();
        let c = Covariance::constant(1.0).unwrap();
        let out = check_admissibility(&w3, &c, 1.0).unwrap();
        assert_relative_eq!(out.value().unwrap(), 1.0 / 3.0, epsilon = 1e-9);

        // Heat d=1 with exponential covariance: finite, matches brute 2-d quadrature.
        let h1 = Kernel::heat(1).unwrap();
        let e1 = Covariance::exponential(1.0, 1).unwrap();
        let out = check_admissibility(&h1, &e1, 1.0).unwrap();
        let AdmissibilityOutcome::Finite {
            value,
            last_rel_change,
            ..
        } = out
        else {
            panic!("expected finite outcome");
        };
        assert!(last_rel_change < 1e-4);
        let brute = integrate_gl(
            |s: f64| {
                crate::quad::integrate_gl_panels(
                    |xi: f64| {
                        2.0 * (1.0 / (std::f64::consts::PI * (1.0 + xi * xi)))
                            * (-s * xi * xi).exp()
                    },
                    0.0,
                    400.0,
                    48,
                    200,
                )
            },
            0.0,
            1.0,
            48,
        );
        assert_relative_eq!(value, brute, max_relative = 1e-5);

        // Beam with exponential covariance: finite.
        let beam = Kernel::beam_default();
        let out = check_admissibility(&beam, &e1, 1.0).unwrap();
        assert!(out.value().unwrap().is_finite());

        // Damped wave has no Fourier transform: rejected.
        let dw = Kernel::damped_wave(1.0).unwrap();
        assert!(check_admissibility(&dw, &c, 1.0).is_err());
    }

    #[test]
    fn admissibility_divergence_flag() {
        // Synthetic linear-growth density against the heat time integral
        // gives a log-divergent radial integral.
        let out = radial_admissibility(|rho| rho, 1, |rho| 1.0 / (1.0 + rho * rho));
        assert!(matches!(out, AdmissibilityOutcome::Divergent { .. }));
    }
}
