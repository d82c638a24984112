//! Poisson clock structures and renewal positions: single-index renewal
//! paths, and the pairwise-marked Poisson measure with its synchronized
//! multi-index paths.
//!
//! Everything here is a pure function of (inputs, random stream); positions
//! are materialized only at jump times.

use crate::error::{Error, Result};
use crate::kernels::{Kernel, Point};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Jump times of a rate-`rate` Poisson process on (0, horizon]: the count is
/// Poisson(rate * horizon) and, given the count, the times are uniform order
/// statistics. Exact duplicate times (measure-zero float collisions) are
/// dropped to keep the list strictly increasing.
pub fn sample_poisson_times<R: Rng + ?Sized>(
    rate: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::invalid(format!("rate must be positive, got {rate}")));
    }
    if !horizon.is_finite() || horizon < 0.0 {
        return Err(Error::invalid(format!(
            "horizon must be non-negative, got {horizon}"
        )));
    }
    if horizon == 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(rate * horizon)
        .map_err(|e| Error::invalid(format!("poisson parameter: {e}")))?
        .sample(rng) as usize;
    let mut times: Vec<f64> = (0..count)
        .map(|_| {
            // Scale an open-interval uniform so no time lands exactly on 0.
            let u: f64 = rng.random();
            horizon * (1.0 - u)
        })
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    Ok(times)
}

/// A sparse renewal path: positions only at the jump times.
#[derive(Clone, Debug)]
pub struct RenewalPath {
    pub origin: Point,
    pub horizon: f64,
    pub jump_times: Vec<f64>,
    pub positions: Vec<Point>,
}

impl RenewalPath {
    pub fn jumps(&self) -> usize {
        self.jump_times.len()
    }

    /// Position at the last jump (the origin when there are none).
    pub fn last_position(&self) -> &Point {
        self.positions.last().unwrap_or(&self.origin)
    }

    /// Time of the last jump (0 when there are none).
    pub fn last_jump_time(&self) -> f64 {
        self.jump_times.last().copied().unwrap_or(0.0)
    }
}

/// Renewal path at Poisson rate `rate`: at each jump the position restarts
/// with an increment drawn over the elapsed gap.
pub fn build_renewal_path<R: Rng + ?Sized>(
    kernel: &Kernel,
    origin: &[f64],
    horizon: f64,
    rate: f64,
    rng: &mut R,
) -> Result<RenewalPath> {
    if origin.len() != kernel.dim() {
        return Err(Error::invalid(format!(
            "origin has dimension {}, kernel expects {}",
            origin.len(),
            kernel.dim()
        )));
    }
    let jump_times = sample_poisson_times(rate, horizon, rng)?;
    let mut positions = Vec::with_capacity(jump_times.len());
    let mut current: Point = origin.iter().copied().collect();
    let mut prev_time = 0.0;
    for &tau in &jump_times {
        let inc = kernel.sample_increment_unchecked(tau - prev_time, rng)?;
        for (c, d) in current.iter_mut().zip(inc.iter()) {
            *c += d;
        }
        positions.push(current.clone());
        prev_time = tau;
    }
    Ok(RenewalPath {
        origin: origin.iter().copied().collect(),
        horizon,
        jump_times,
        positions,
    })
}

/// One marked event of the pairwise Poisson measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairEvent {
    pub time: f64,
    /// Unordered index pair, stored as (low, high), 0-based.
    pub pair: (usize, usize),
    /// Position of `time` within each member index's own jump-time list.
    pub slots: (usize, usize),
}

/// Marked Poisson events over the unordered pairs of {0, .., n-1}, together
/// with the per-index jump-time projections.
#[derive(Clone, Debug)]
pub struct PairClock {
    pub n: usize,
    pub horizon: f64,
    pub events: Vec<PairEvent>,
    pub per_index_times: Vec<Vec<f64>>,
}

impl PairClock {
    pub fn total_events(&self) -> usize {
        self.events.len()
    }
}

/// Draw the pairwise clock by superposition: one Poisson process of rate
/// n(n-1)/2 whose events get independent uniform pair marks.
pub fn sample_pair_clock<R: Rng + ?Sized>(
    n: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<PairClock> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "pair clock needs at least two indices, got {n}"
        )));
    }
    let n_pairs = n * (n - 1) / 2;
    let times = sample_poisson_times(n_pairs as f64, horizon, rng)?;
    let mut per_index_times: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut events = Vec::with_capacity(times.len());
    for time in times {
        let mut label = rng.random_range(0..n_pairs);
        // Decode the flat label into (i, j) with i < j.
        let mut i = 0;
        while label >= n - 1 - i {
            label -= n - 1 - i;
            i += 1;
        }
        let j = i + 1 + label;
        let slots = (per_index_times[i].len(), per_index_times[j].len());
        per_index_times[i].push(time);
        per_index_times[j].push(time);
        events.push(PairEvent {
            time,
            pair: (i, j),
            slots,
        });
    }
    Ok(PairClock {
        n,
        horizon,
        events,
        per_index_times,
    })
}

/// Renewal positions for all indices of a pair clock, aligned with
/// `per_index_times`. Positions exist only at an index's own jump times;
/// an event time is materialized exactly for the two indices it marks.
#[derive(Clone, Debug)]
pub struct MultiPaths {
    pub positions: Vec<Vec<Point>>,
}

impl MultiPaths {
    /// Positions of the two marked indices at an event.
    pub fn event_positions<'a>(&'a self, event: &PairEvent) -> (&'a Point, &'a Point) {
        (
            &self.positions[event.pair.0][event.slots.0],
            &self.positions[event.pair.1][event.slots.1],
        )
    }

    pub fn last_position<'a>(&'a self, index: usize, origin: &'a Point) -> &'a Point {
        self.positions[index].last().unwrap_or(origin)
    }
}

/// Build the n synchronized renewal paths driven by a pair clock. Index
/// draws happen in index order, then jump order, so the layout is a pure
/// function of (clock, stream).
pub fn build_multi_paths<R: Rng + ?Sized>(
    kernel: &Kernel,
    clock: &PairClock,
    origins: &[Point],
    rng: &mut R,
) -> Result<MultiPaths> {
    if origins.len() != clock.n {
        return Err(Error::invalid(format!(
            "expected {} origins, got {}",
            clock.n,
            origins.len()
        )));
    }
    let mut positions = Vec::with_capacity(clock.n);
    for (idx, times) in clock.per_index_times.iter().enumerate() {
        if origins[idx].len() != kernel.dim() {
            return Err(Error::invalid(format!(
                "origin {idx} has dimension {}, kernel expects {}",
                origins[idx].len(),
                kernel.dim()
            )));
        }
        let mut list = Vec::with_capacity(times.len());
        let mut current = origins[idx].clone();
        let mut prev = 0.0;
        for &tau in times {
            let inc = kernel.sample_increment_unchecked(tau - prev, rng)?;
            for (c, d) in current.iter_mut().zip(inc.iter()) {
                *c += d;
            }
            list.push(current.clone());
            prev = tau;
        }
        positions.push(list);
    }
    Ok(MultiPaths { positions })
}
