//! Canned runs regenerating the figure data as dimensionless curves.

use levy_localtime::localtime::{mean_fixed, mean_free, w_fixed, w_free, LocalTimeValue};
use levy_localtime::montecarlo::{local_time_profile, simulate_indexed_path};
use levy_localtime::resolvent::{resolvent, Energy};
use levy_localtime::{stable_density, Result, WalkModel};

use crate::commands::linspace;
use crate::table::Table;

/// Physical parameters a recipe is evaluated at; the emitted dimensionless
/// curves do not depend on them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub diffusion: f64,
    pub time: f64,
    pub energy: f64,
}

impl Default for Scale {
    fn default() -> Self {
        Self {
            diffusion: 1.0,
            time: 1.0,
            energy: 1.0,
        }
    }
}

type Point = fn(f64, f64, &Scale) -> Result<f64>;

/// One dimensionless curve per `λ` on a common axis.
pub struct CurveRecipe {
    pub name: &'static str,
    pub title: &'static str,
    pub axis: &'static str,
    pub quantity: &'static str,
    pub grid: (f64, f64, usize),
    pub lambdas: &'static [f64],
    /// `(λ, axis value, scale) -> dimensionless value`.
    pub point: Point,
}

pub enum Recipe {
    Curves(CurveRecipe),
    /// Sample paths and their local-time profiles for several `λ`.
    SamplePaths {
        name: &'static str,
        title: &'static str,
        lambdas: &'static [f64],
        seeds: &'static [u64],
        steps: usize,
    },
}

impl Recipe {
    pub fn name(&self) -> &'static str {
        match self {
            Recipe::Curves(c) => c.name,
            Recipe::SamplePaths { name, .. } => name,
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Recipe::Curves(c) => c.title,
            Recipe::SamplePaths { title, .. } => title,
        }
    }

    /// Output tables, each with a file-name stem.
    pub fn build(&self, scale: &Scale) -> Result<Vec<(String, Table)>> {
        match self {
            Recipe::Curves(c) => Ok(vec![(c.name.to_string(), c.table(scale)?)]),
            Recipe::SamplePaths {
                name,
                lambdas,
                seeds,
                steps,
                ..
            } => sample_paths(name, lambdas, seeds, *steps, scale),
        }
    }
}

impl CurveRecipe {
    pub fn table(&self, scale: &Scale) -> Result<Table> {
        let mut cols = vec![self.axis.to_string()];
        cols.extend(
            self.lambdas
                .iter()
                .map(|l| format!("{}_{l}", self.quantity)),
        );
        let mut t = Table::new(cols);
        for v in linspace(self.grid.0, self.grid.1, self.grid.2) {
            let mut row = vec![v];
            for &l in self.lambdas {
                row.push((self.point)(l, v, scale)?);
            }
            t.push(row);
        }
        Ok(t)
    }
}

fn scale_length(l: f64, s: &Scale) -> f64 {
    (s.diffusion * s.time).powf(1.0 / l)
}

fn model(l: f64, s: &Scale) -> Result<WalkModel> {
    WalkModel::new(l, s.diffusion)
}

fn density_point(l: f64, xbar: f64, s: &Scale) -> Result<f64> {
    let len = scale_length(l, s);
    Ok(len * stable_density(xbar * len, s.time, &model(l, s)?)?)
}

fn resolvent_point(l: f64, xbar: f64, s: &Scale) -> Result<f64> {
    let len = (s.diffusion / s.energy).powf(1.0 / l);
    let e = Energy::new(s.energy)?;
    Ok(len * s.energy * resolvent(xbar * len, e, &model(l, s)?)?)
}

fn w_fixed_point(l: f64, lbar: f64, s: &Scale) -> Result<f64> {
    let len = scale_length(l, s);
    let v = LocalTimeValue::new(lbar * s.time / len)?;
    Ok(s.time * w_fixed(v, s.time, &model(l, s)?)? / len)
}

fn w_free_point(l: f64, lbar: f64, s: &Scale) -> Result<f64> {
    let len = scale_length(l, s);
    let v = LocalTimeValue::new(lbar * s.time / len)?;
    Ok(s.time * w_free(v, s.time, &model(l, s)?)? / len)
}

fn mean_fixed_point(l: f64, xbar: f64, s: &Scale) -> Result<f64> {
    let len = scale_length(l, s);
    Ok(len * mean_fixed(xbar * len, 0.0, 0.0, s.time, &model(l, s)?)? / s.time)
}

fn mean_free_point(l: f64, xbar: f64, s: &Scale) -> Result<f64> {
    let len = scale_length(l, s);
    Ok(len * mean_free(xbar * len, 0.0, s.time, &model(l, s)?)? / s.time)
}

/// Sample paths plus the six curve families. Grids with an even number of
/// points avoid `x̄ = 0`, where the Cauchy curves diverge.
pub fn figure_recipes() -> Vec<Recipe> {
    vec![
        Recipe::SamplePaths {
            name: "fig1",
            title: "sample paths and local-time profiles",
            lambdas: &[2.0, 1.5, 1.0],
            seeds: &[1, 2, 3],
            steps: 5000,
        },
        Recipe::Curves(CurveRecipe {
            name: "fig2",
            title: "stable density",
            axis: "xbar",
            quantity: "Pbar",
            grid: (-5.0, 5.0, 201),
            lambdas: &[1.0, 1.5, 2.0],
            point: density_point,
        }),
        Recipe::Curves(CurveRecipe {
            name: "fig3",
            title: "resolvent",
            axis: "xbar",
            quantity: "Rbar",
            grid: (-5.0, 5.0, 200),
            lambdas: &[1.0, 1.5, 2.0],
            point: resolvent_point,
        }),
        Recipe::Curves(CurveRecipe {
            name: "fig4",
            title: "local time at the start, fixed endpoint",
            axis: "Lbar",
            quantity: "Wbar",
            grid: (0.0, 3.0, 61),
            lambdas: &[1.05, 1.5, 2.0],
            point: w_fixed_point,
        }),
        Recipe::Curves(CurveRecipe {
            name: "fig5",
            title: "local time at the start, free endpoint",
            axis: "Lbar",
            quantity: "Wbar*",
            grid: (0.0, 3.0, 61),
            lambdas: &[1.05, 1.5, 2.0],
            point: w_free_point,
        }),
        Recipe::Curves(CurveRecipe {
            name: "fig6",
            title: "mean local time, fixed endpoint",
            axis: "xbar",
            quantity: "mubar",
            grid: (-5.0, 5.0, 100),
            lambdas: &[1.0, 1.5, 2.0],
            point: mean_fixed_point,
        }),
        Recipe::Curves(CurveRecipe {
            name: "fig7",
            title: "mean local time, free endpoint",
            axis: "xbar",
            quantity: "mubar*",
            grid: (-5.0, 5.0, 100),
            lambdas: &[1.0, 1.5, 2.0],
            point: mean_free_point,
        }),
    ]
}

fn sample_paths(
    name: &str,
    lambdas: &[f64],
    seeds: &[u64],
    steps: usize,
    scale: &Scale,
) -> Result<Vec<(String, Table)>> {
    let mut cols = vec!["tau".to_string()];
    cols.extend(lambdas.iter().map(|l| format!("x_{l}")));
    let mut paths = Table::new(cols);
    let mut profiles = Table::new(["lambda", "x", "L"]);
    let mut samples = Vec::new();
    for (&l, &seed) in lambdas.iter().zip(seeds) {
        let m = model(l, scale)?;
        let path = simulate_indexed_path(scale.time, steps, 0.0, &m, seed, 0)?;
        let lo = path.positions.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = path
            .positions
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let h = m.length_scale(scale.time) / 50.0;
        let nb = (((hi - lo) / h).ceil() as usize).max(1);
        let edges: Vec<f64> = (0..=nb).map(|k| lo + k as f64 * h).collect();
        let prof = local_time_profile(&path, &edges)?;
        for (i, &v) in prof.values.iter().enumerate() {
            profiles.push(vec![l, 0.5 * (edges[i] + edges[i + 1]), v]);
        }
        samples.push(path);
    }
    for k in 0..=steps {
        let mut row = vec![samples[0].times[k]];
        row.extend(samples.iter().map(|p| p.positions[k]));
        paths.push(row);
    }
    Ok(vec![
        (format!("{name}_paths"), paths),
        (format!("{name}_profiles"), profiles),
    ])
}

/// Largest relative change of one row per curve between the default scale
/// and a different `(D, t, E)`.
pub fn rescaling_spread() -> Result<f64> {
    let other = Scale {
        diffusion: 2.0,
        time: 0.5,
        energy: 3.0,
    };
    let mut worst: f64 = 0.0;
    for r in figure_recipes() {
        if let Recipe::Curves(c) = r {
            let grid = linspace(c.grid.0, c.grid.1, c.grid.2);
            let v = grid[grid.len() / 3];
            for &l in c.lambdas {
                let a = (c.point)(l, v, &Scale::default())?;
                let b = (c.point)(l, v, &other)?;
                worst = worst.max((a - b).abs() / a.abs().max(1e-300));
            }
        }
    }
    Ok(worst)
}
