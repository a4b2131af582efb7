//! Sample paths on a uniform time grid and their binned local-time profiles.

use rand::Rng;
use rand_distr::StandardNormal;

use super::sampler::{path_rng, IncrementSampler};
use crate::error::{domain, Error, Result};
use crate::stable::{check_time, WalkModel};

/// Positions `x(τ_k)` at `τ_k = k t / N`, `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub model: WalkModel,
    pub seed: u64,
}

impl PathSample {
    pub fn n_steps(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.times[self.times.len() - 1] / self.n_steps() as f64
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn terminal(&self) -> f64 {
        self.positions[self.positions.len() - 1]
    }
}

fn check_steps(n_steps: usize) -> Result<()> {
    if n_steps == 0 {
        return Err(Error::Config("n_steps must be at least 1".into()));
    }
    Ok(())
}

pub(crate) fn time_grid(t: f64, n_steps: usize) -> Vec<f64> {
    let dt = t / n_steps as f64;
    let mut times: Vec<f64> = (0..=n_steps).map(|k| k as f64 * dt).collect();
    times[n_steps] = t;
    times
}

/// Fills `out` with `x_a` followed by the cumulative sums of `n` increments.
pub(crate) fn walk_into<R: Rng + ?Sized>(
    out: &mut Vec<f64>,
    n: usize,
    x_a: f64,
    sampler: &IncrementSampler,
    rng: &mut R,
) {
    out.clear();
    out.push(x_a);
    let mut x = x_a;
    for _ in 0..n {
        x += sampler.sample(rng);
        out.push(x);
    }
}

/// Exact Brownian bridge by sequential conditioning: from `x` at time `s`,
/// the next point is Gaussian with mean `x + (x_b - x) dt/(t - s)` and
/// variance `2D dt (t - s - dt)/(t - s)`.
pub(crate) fn bridge_into<R: Rng + ?Sized>(
    out: &mut Vec<f64>,
    n: usize,
    t: f64,
    x_a: f64,
    x_b: f64,
    diffusion: f64,
    rng: &mut R,
) {
    out.clear();
    out.push(x_a);
    let dt = t / n as f64;
    let mut x = x_a;
    for k in 0..n - 1 {
        let left = t - k as f64 * dt;
        let mean = x + (x_b - x) * dt / left;
        let var = 2.0 * diffusion * dt * (left - dt) / left;
        x = mean + var.sqrt() * rng.sample::<f64, _>(StandardNormal);
        out.push(x);
    }
    out.push(x_b);
}

/// Path of `n_steps` i.i.d. increments started at `x_a`; path index 0 of
/// the ensemble seeded by `seed`.
pub fn simulate_path(
    t: f64,
    n_steps: usize,
    x_a: f64,
    model: &WalkModel,
    seed: u64,
) -> Result<PathSample> {
    simulate_indexed_path(t, n_steps, x_a, model, seed, 0)
}

/// Path `index` of the ensemble seeded by `seed`.
pub fn simulate_indexed_path(
    t: f64,
    n_steps: usize,
    x_a: f64,
    model: &WalkModel,
    seed: u64,
    index: u64,
) -> Result<PathSample> {
    check_time(t)?;
    check_steps(n_steps)?;
    let sampler = IncrementSampler::new(t / n_steps as f64, model)?;
    let mut positions = Vec::with_capacity(n_steps + 1);
    walk_into(
        &mut positions,
        n_steps,
        x_a,
        &sampler,
        &mut path_rng(seed, index),
    );
    Ok(PathSample {
        times: time_grid(t, n_steps),
        positions,
        model: *model,
        seed,
    })
}

/// Brownian bridge from `x_a` to `x_b` for the generator `D p²`.
pub fn brownian_bridge_path(
    t: f64,
    n_steps: usize,
    x_a: f64,
    x_b: f64,
    diffusion: f64,
    seed: u64,
) -> Result<PathSample> {
    simulate_indexed_bridge(t, n_steps, x_a, x_b, diffusion, seed, 0)
}

/// Bridge `index` of the ensemble seeded by `seed`.
pub fn simulate_indexed_bridge(
    t: f64,
    n_steps: usize,
    x_a: f64,
    x_b: f64,
    diffusion: f64,
    seed: u64,
    index: u64,
) -> Result<PathSample> {
    check_time(t)?;
    check_steps(n_steps)?;
    let model = WalkModel::gaussian(diffusion)?;
    let mut positions = Vec::with_capacity(n_steps + 1);
    bridge_into(
        &mut positions,
        n_steps,
        t,
        x_a,
        x_b,
        diffusion,
        &mut path_rng(seed, index),
    );
    Ok(PathSample {
        times: time_grid(t, n_steps),
        positions,
        model,
        seed,
    })
}

/// Binned local time: `values_i = Δt · #{k < N : x(τ_k) ∈ bin i} / h_i`.
///
/// Time spent left of the first edge or right of the last one is kept in
/// `below` and `above`, so `Σ values_i h_i + below + above = t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeProfile {
    pub bin_edges: Vec<f64>,
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
    pub below: f64,
    pub above: f64,
    pub total_time: f64,
}

impl LocalTimeProfile {
    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.bin_edges.windows(2).map(|w| w[1] - w[0])
    }

    /// `Σ values_i h_i + below + above`.
    pub fn occupied_time(&self) -> f64 {
        self.values
            .iter()
            .zip(self.widths())
            .map(|(v, h)| v * h)
            .sum::<f64>()
            + self.below
            + self.above
    }
}

pub(crate) fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::Config("need at least two bin edges".into()));
    }
    for w in edges.windows(2) {
        if !(w[1] > w[0]) {
            return Err(domain(
                "bin edge",
                w[1],
                "bin edges must be strictly increasing",
            ));
        }
    }
    Ok(())
}

/// Occupation-time profile of `path` on `bin_edges` (half-open bins
/// `[e_i, e_{i+1})`), each step contributing its left endpoint.
pub fn local_time_profile(path: &PathSample, bin_edges: &[f64]) -> Result<LocalTimeProfile> {
    check_edges(bin_edges)?;
    let nb = bin_edges.len() - 1;
    let mut counts = vec![0u64; nb];
    let (mut lo, mut hi) = (0u64, 0u64);
    for &x in &path.positions[..path.n_steps()] {
        let i = bin_edges.partition_point(|&e| e <= x);
        if i == 0 {
            lo += 1;
        } else if i > nb {
            hi += 1;
        } else {
            counts[i - 1] += 1;
        }
    }
    let dt = path.dt();
    let values = counts
        .iter()
        .zip(bin_edges.windows(2))
        .map(|(&c, w)| c as f64 * dt / (w[1] - w[0]))
        .collect();
    Ok(LocalTimeProfile {
        bin_edges: bin_edges.to_vec(),
        values,
        counts,
        below: lo as f64 * dt,
        above: hi as f64 * dt,
        total_time: path.duration(),
    })
}

/// `L̂(x)`: occupation count of the bin `[x - h/2, x + h/2)` times `Δt / h`.
pub(crate) fn local_time_at(positions: &[f64], x: f64, h: f64, dt: f64) -> f64 {
    let (lo, hi) = (x - 0.5 * h, x + 0.5 * h);
    let n = positions.len() - 1;
    let c = positions[..n]
        .iter()
        .filter(|&&p| p >= lo && p < hi)
        .count();
    c as f64 * dt / h
}
