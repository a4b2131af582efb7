//! Ensemble estimators over independent paths.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::path::{bridge_into, local_time_at, walk_into};
use super::sampler::{path_rng, IncrementSampler};
use super::stats::{MCEstimate, Welford};
use super::thread_pool;
use crate::error::{domain, Error, Result};
use crate::localtime::EndpointSpec;
use crate::special::erf;
use crate::stable::{StableCdf, WalkModel};

const BLOCK: usize = 1024;

/// Monte Carlo run description.
///
/// A fixed endpoint is exact for `λ = 2` (Brownian bridges). For `λ < 2`
/// free paths are kept when `|x(t) - x_b| ≤ ε`, which biases estimates at
/// `O(ε)`; `epsilon` must then be given.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub model: WalkModel,
    pub t: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    pub x_a: f64,
    pub endpoint: EndpointSpec,
    pub epsilon: Option<f64>,
    /// Spatial bin width `h`; defaults to `(D t)^{1/λ} / 25`.
    pub bin_width: Option<f64>,
    pub seed: u64,
}

impl McConfig {
    /// Free endpoint, `x_a = 0`, default bin width.
    pub fn new(model: WalkModel, t: f64, n_steps: usize, n_paths: usize, seed: u64) -> Self {
        Self {
            model,
            t,
            n_steps,
            n_paths,
            x_a: 0.0,
            endpoint: EndpointSpec::Free,
            epsilon: None,
            bin_width: None,
            seed,
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
            .unwrap_or_else(|| self.model.length_scale(self.t) / 25.0)
    }

    /// `0.05 (D t)^{1/λ}`, the customary acceptance window.
    pub fn default_epsilon(&self) -> f64 {
        0.05 * self.model.length_scale(self.t)
    }

    pub fn dt(&self) -> f64 {
        self.t / self.n_steps as f64
    }

    /// Smallest non-zero value of `L̂`, `Δt / h`.
    pub fn quantum(&self) -> f64 {
        self.dt() / self.bin_width()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(domain("time", self.t, "elapsed time must be positive"));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        if self.n_paths < 2 {
            return Err(Error::Config("n_paths must be at least 2".into()));
        }
        if let Some(h) = self.bin_width {
            if !(h > 0.0) || !h.is_finite() {
                return Err(domain("bin width", h, "bin width must be positive"));
            }
        }
        if let EndpointSpec::Fixed(_) = self.endpoint {
            if !self.model.is_gaussian() {
                match self.epsilon {
                    None => {
                        return Err(Error::Config(
                            "fixed endpoint with lambda < 2 needs an acceptance window epsilon"
                                .into(),
                        ))
                    }
                    Some(e) if !(e > 0.0) || !e.is_finite() => {
                        return Err(domain("epsilon", e, "acceptance window must be positive"))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Runs every path of the ensemble and folds the accepted ones into block
/// accumulators, merged in block order. Returns the merged accumulator and
/// the number of accepted paths.
fn run_ensemble<A, M, V, G>(config: &McConfig, make: M, visit: V, merge: G) -> Result<(A, usize)>
where
    A: Send,
    M: Fn() -> A + Sync,
    V: Fn(&mut A, &[f64]) + Sync,
    G: Fn(&mut A, A),
{
    config.validate()?;
    let sampler = IncrementSampler::new(config.dt(), &config.model)?;
    let n_blocks = config.n_paths.div_ceil(BLOCK);
    let pool = thread_pool()?;
    let blocks: Vec<(A, usize)> = pool.install(|| {
        (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = make();
                let mut accepted = 0;
                let mut buf = Vec::with_capacity(config.n_steps + 1);
                let end = ((b + 1) * BLOCK).min(config.n_paths);
                for i in b * BLOCK..end {
                    let mut rng = path_rng(config.seed, i as u64);
                    match config.endpoint {
                        EndpointSpec::Free => {
                            walk_into(&mut buf, config.n_steps, config.x_a, &sampler, &mut rng)
                        }
                        EndpointSpec::Fixed(x_b) if config.model.is_gaussian() => bridge_into(
                            &mut buf,
                            config.n_steps,
                            config.t,
                            config.x_a,
                            x_b,
                            config.model.diffusion(),
                            &mut rng,
                        ),
                        EndpointSpec::Fixed(x_b) => {
                            walk_into(&mut buf, config.n_steps, config.x_a, &sampler, &mut rng);
                            let eps = config.epsilon.unwrap_or_default();
                            if (buf[config.n_steps] - x_b).abs() > eps {
                                continue;
                            }
                        }
                    }
                    accepted += 1;
                    visit(&mut acc, &buf);
                }
                (acc, accepted)
            })
            .collect()
    });
    let mut it = blocks.into_iter();
    let (mut total, mut accepted) = it.next().expect("at least one block");
    for (acc, n) in it {
        merge(&mut total, acc);
        accepted += n;
    }
    Ok((total, accepted))
}

/// `⟨L̂(x)⟩` at each point, one pass over the ensemble.
pub fn estimate_means(config: &McConfig, points: &[f64]) -> Result<Vec<MCEstimate>> {
    let (h, dt) = (config.bin_width(), config.dt());
    let (acc, _) = run_ensemble(
        config,
        || vec![Welford::new(); points.len()],
        |acc, pos| {
            for (w, &x) in acc.iter_mut().zip(points) {
                w.push(local_time_at(pos, x, h, dt));
            }
        },
        |a, b| a.iter_mut().zip(&b).for_each(|(x, y)| x.merge(y)),
    )?;
    acc.iter().map(Welford::estimate).collect()
}

/// `⟨L̂(x_1) ⋯ L̂(x_n)⟩` for `n = order ∈ {1, 2}` points.
pub fn estimate_moments(config: &McConfig, order: usize, points: &[f64]) -> Result<MCEstimate> {
    if !(1..=2).contains(&order) {
        return Err(Error::Config(format!(
            "moment order must be 1 or 2, got {order}"
        )));
    }
    if points.len() != order {
        return Err(Error::Config(format!(
            "moment of order {order} needs {order} points, got {}",
            points.len()
        )));
    }
    let (h, dt) = (config.bin_width(), config.dt());
    let (acc, _) = run_ensemble(
        config,
        Welford::new,
        |w, pos| {
            w.push(
                points
                    .iter()
                    .map(|&x| local_time_at(pos, x, h, dt))
                    .product(),
            )
        },
        |a, b| a.merge(&b),
    )?;
    acc.estimate()
}

/// Empirical one-point distribution of `L̂(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePointHistogram {
    /// Edges in `L` of the continuous-part histogram.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// `count / (n ΔL)`.
    pub density: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Fraction of paths with `L̂(x) = 0`.
    pub atom: MCEstimate,
    /// Paths with `L̂ > 0` falling outside the edges.
    pub outside: u64,
    pub n_paths: usize,
    pub quantum: f64,
}

#[derive(Clone)]
struct HistAcc {
    counts: Vec<u64>,
    zeros: u64,
    outside: u64,
}

/// Histogram of `L̂(x)` on `l_edges`, with the atom `Pr[L̂ = 0]` reported
/// separately. Per-bin errors are binomial, `√(p(1-p)/n) / ΔL`.
pub fn estimate_onepoint_distribution(
    config: &McConfig,
    x: f64,
    l_edges: &[f64],
) -> Result<OnePointHistogram> {
    super::path::check_edges(l_edges)?;
    let (h, dt) = (config.bin_width(), config.dt());
    let nb = l_edges.len() - 1;
    let (acc, n) = run_ensemble(
        config,
        || HistAcc {
            counts: vec![0; nb],
            zeros: 0,
            outside: 0,
        },
        |acc, pos| {
            let l = local_time_at(pos, x, h, dt);
            if l == 0.0 {
                acc.zeros += 1;
                return;
            }
            let i = l_edges.partition_point(|&e| e <= l);
            if i == 0 || i > nb {
                acc.outside += 1;
            } else {
                acc.counts[i - 1] += 1;
            }
        },
        |a, b| {
            a.counts
                .iter_mut()
                .zip(&b.counts)
                .for_each(|(x, y)| *x += y);
            a.zeros += b.zeros;
            a.outside += b.outside;
        },
    )?;
    if n < 2 {
        return Err(Error::Config(format!(
            "only {n} paths accepted; widen epsilon or add paths"
        )));
    }
    let nf = n as f64;
    let mut density = Vec::with_capacity(nb);
    let mut std_error = Vec::with_capacity(nb);
    for (c, w) in acc.counts.iter().zip(l_edges.windows(2)) {
        let p = *c as f64 / nf;
        let width = w[1] - w[0];
        density.push(p / width);
        std_error.push((p * (1.0 - p) / nf).sqrt() / width);
    }
    let p0 = acc.zeros as f64 / nf;
    Ok(OnePointHistogram {
        edges: l_edges.to_vec(),
        counts: acc.counts,
        density,
        std_error,
        atom: MCEstimate {
            mean: p0,
            std_error: (p0 * (1.0 - p0) / (nf - 1.0)).sqrt(),
            n_samples: n,
        },
        outside: acc.outside,
        n_paths: n,
        quantum: config.quantum(),
    })
}

/// Edges `(j m + 1/2) q`, `j = 0, 1, …`, up to `l_max`: every bin holds
/// exactly `m` lattice values of `L̂` (multiples of `q`) at its centre.
pub fn lattice_edges(quantum: f64, quanta_per_bin: usize, l_max: f64) -> Vec<f64> {
    let m = quanta_per_bin.max(1) as f64;
    let mut edges = Vec::new();
    let mut j = 0.0;
    loop {
        let e = (j * m + 0.5) * quantum;
        edges.push(e);
        if e > l_max {
            break;
        }
        j += 1.0;
    }
    edges
}

/// Terminal positions of the accepted paths, in path order.
pub fn terminal_positions(config: &McConfig) -> Result<Vec<f64>> {
    let (v, _) = run_ensemble(
        config,
        Vec::new,
        |acc: &mut Vec<f64>, pos| acc.push(pos[pos.len() - 1]),
        |a, mut b| a.append(&mut b),
    )?;
    Ok(v)
}

/// Exact expectation of `L̂(x)` for the free walk on the same time grid:
/// `(Δt/h) Σ_{k<N} Pr[x(kΔt) ∈ [x - h/2, x + h/2)]`.
///
/// This is the target of [`estimate_means`] at finite `N` and `h`; the
/// continuum `μ*(x)` is its limit.
pub fn discrete_mean_free(config: &McConfig, x: f64) -> Result<f64> {
    config.validate()?;
    let (h, dt) = (config.bin_width(), config.dt());
    let lo = x - 0.5 * h - config.x_a;
    let hi = x + 0.5 * h - config.x_a;
    let model = config.model;
    let table = if model.is_gaussian() || model.is_cauchy() {
        None
    } else {
        Some(StableCdf::new(1.0, &model)?)
    };
    let mut sum = if lo <= 0.0 && 0.0 < hi { 1.0 } else { 0.0 };
    for k in 1..config.n_steps {
        let s = model.length_scale(k as f64 * dt);
        let (a, b) = (lo / s, hi / s);
        sum += if model.is_gaussian() {
            0.5 * (erf(b / 2.0) - erf(a / 2.0))
        } else if model.is_cauchy() {
            (b.atan() - a.atan()) / PI
        } else {
            let t = table.as_ref().expect("table built for generic lambda");
            t.standard_cdf(b) - t.standard_cdf(a)
        };
    }
    Ok(sum * dt / h)
}
