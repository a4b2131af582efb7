//! Subcommand bodies. Each builds a [`Table`] or a check report.

use std::path::{Path, PathBuf};

use levy_localtime::localtime::{
    correlation_e, mean_fixed, mean_free, onepoint_density_e, second_moment_gauss, w_fixed, w_free,
    w_gauss_fixed, w_gauss_free, EndpointSpec, LocalTimeValue,
};
use levy_localtime::montecarlo::{
    estimate_means, estimate_moments, local_time_profile, simulate_indexed_bridge,
    simulate_indexed_path, McConfig, PathSample,
};
use levy_localtime::resolvent::{resolvent, Energy};
use levy_localtime::verify::{self, CheckReport, VerifyOptions};
use levy_localtime::{stable_density, WalkModel};

use crate::figures::{figure_recipes, rescaling_spread, Scale};
use crate::svg::line_chart;
use crate::table::{write_atomic, Format, Table};
use crate::CliError;

/// `min:max:count`, inclusive endpoints, `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected min:max:count, got {s:?}"));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    let (min, max) = (num(parts[0])?, num(parts[1])?);
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| format!("{:?}: {e}", parts[2]))?;
    if !min.is_finite() || !max.is_finite() || !(min < max) {
        return Err(format!("grid needs finite min < max, got {min}:{max}"));
    }
    if count < 2 {
        return Err(format!("grid count must be at least 2, got {count}"));
    }
    Ok(Grid { min, max, count })
}

pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    let step = (max - min) / (count - 1) as f64;
    let mut v: Vec<f64> = (0..count).map(|i| min + i as f64 * step).collect();
    v[count - 1] = max;
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Endpoint {
    Fixed,
    Free,
}

fn endpoint_spec(e: Endpoint, x_b: f64) -> EndpointSpec {
    match e {
        Endpoint::Fixed => EndpointSpec::Fixed(x_b),
        Endpoint::Free => EndpointSpec::Free,
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Where and how a table goes.
pub struct Sink<'a> {
    pub format: Format,
    pub output: Option<&'a Path>,
    pub svg: Option<&'a Path>,
}

impl Sink<'_> {
    pub fn emit(&self, table: &Table, title: &str) -> Result<(), CliError> {
        let text = table.render(self.format);
        match self.output {
            Some(p) => write_atomic(p, &text)?,
            None => print!("{text}"),
        }
        if let Some(p) = self.svg {
            write_atomic(p, &line_chart(table, title))?;
        }
        Ok(())
    }
}

pub fn density(model: &WalkModel, t: f64, grid: Grid) -> Result<Table, CliError> {
    let mut tab = Table::new(["x", "P"]);
    for x in grid.points() {
        tab.push(vec![x, stable_density(x, t, model)?]);
    }
    Ok(tab)
}

pub fn resolvent_curve(model: &WalkModel, e: f64, grid: Grid) -> Result<Table, CliError> {
    let en = Energy::new(e)?;
    let mut tab = Table::new(["x", "R"]);
    for x in grid.points() {
        tab.push(vec![x, resolvent(x, en, model)?]);
    }
    Ok(tab)
}

pub struct Placement {
    pub x: f64,
    pub x_a: f64,
    pub x_b: f64,
    pub endpoint: Endpoint,
}

pub enum Domain {
    Time(f64),
    Energy(f64),
}

pub fn domain(time: Option<f64>, energy: Option<f64>) -> Result<Domain, CliError> {
    match (time, energy) {
        (Some(t), None) => Ok(Domain::Time(t)),
        (None, Some(e)) => Ok(Domain::Energy(e)),
        (None, None) => Err(usage("one of --time or --energy is required")),
        (Some(_), Some(_)) => Err(usage("--time and --energy are mutually exclusive")),
    }
}

/// One-point distribution of `L(x)` on an `L` grid: continuous density and
/// the `δ(L)` atom.
pub fn ltdist(
    model: &WalkModel,
    dom: Domain,
    at: &Placement,
    grid: Grid,
) -> Result<Table, CliError> {
    let points = grid.points();
    if points[0] < 0.0 {
        return Err(usage("local-time grid must be non-negative"));
    }
    match dom {
        Domain::Energy(e) => {
            if at.endpoint == Endpoint::Free {
                return Err(usage(
                    "the E-domain distribution is available for a fixed endpoint only",
                ));
            }
            let d = onepoint_density_e(at.x, at.x_a, at.x_b, Energy::new(e)?, model)?;
            let mut tab = Table::new(["L", "density", "atom"]);
            for l in points {
                tab.push(vec![l, d.density(l), d.atom]);
            }
            Ok(tab)
        }
        Domain::Time(t) => {
            let mut tab = Table::new(["L", "W", "atom"]);
            for l in points {
                let v = LocalTimeValue::new(l)?;
                let (w, atom) = if model.is_gaussian() {
                    let a = match at.endpoint {
                        Endpoint::Fixed => {
                            w_gauss_fixed(v, at.x, at.x_a, at.x_b, t, model.diffusion())?
                        }
                        Endpoint::Free => w_gauss_free(v, at.x, at.x_a, t, model.diffusion())?,
                    };
                    (a.density, a.atom)
                } else {
                    let fixed = at.endpoint == Endpoint::Fixed;
                    if at.x != at.x_a || (fixed && at.x_b != at.x_a) {
                        return Err(usage(
                            "for lambda < 2 the distribution is available at x = xa (and xb = xa for a fixed endpoint) only",
                        ));
                    }
                    let w = if fixed {
                        w_fixed(v, t, model)?
                    } else {
                        w_free(v, t, model)?
                    };
                    (w, 0.0)
                };
                tab.push(vec![l, w, atom]);
            }
            Ok(tab)
        }
    }
}

pub struct McArgs {
    pub paths: Option<usize>,
    pub steps: usize,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub bin_width: Option<f64>,
}

/// `⟨L(x)⟩` (order 1) or `⟨L(x) L(x₂)⟩` (order 2) along the grid, analytically
/// or, with `--paths`, by simulation.
pub fn moment(
    model: &WalkModel,
    order: usize,
    dom: Domain,
    at: &Placement,
    grid: Grid,
    mc: &McArgs,
) -> Result<Table, CliError> {
    if !(1..=2).contains(&order) {
        return Err(usage(format!("--order must be 1 or 2, got {order}")));
    }
    let second = at.x;
    let pts = |x: f64| if order == 1 { vec![x] } else { vec![x, second] };
    let spec = endpoint_spec(at.endpoint, at.x_b);
    if let Some(paths) = mc.paths {
        let Domain::Time(t) = dom else {
            return Err(usage("Monte Carlo moments need --time"));
        };
        let mut cfg = McConfig::new(*model, t, mc.steps, paths, mc.seed);
        cfg.x_a = at.x_a;
        cfg.endpoint = spec;
        cfg.bin_width = mc.bin_width;
        cfg.epsilon = mc.epsilon;
        if matches!(spec, EndpointSpec::Fixed(_)) && !model.is_gaussian() && cfg.epsilon.is_none() {
            cfg.epsilon = Some(cfg.default_epsilon());
        }
        let mut tab = Table::new(["x", "value", "std_error"]);
        let grid = grid.points();
        if order == 1 {
            for (x, e) in grid.iter().zip(estimate_means(&cfg, &grid)?) {
                tab.push(vec![*x, e.mean, e.std_error]);
            }
        } else {
            for x in grid {
                let e = estimate_moments(&cfg, 2, &pts(x))?;
                tab.push(vec![x, e.mean, e.std_error]);
            }
        }
        return Ok(tab);
    }
    let mut tab = Table::new(["x", "value"]);
    for x in grid.points() {
        let v = match dom {
            Domain::Energy(e) => {
                if at.endpoint == Endpoint::Free {
                    return Err(usage(
                        "E-domain correlations are available for a fixed endpoint only",
                    ));
                }
                correlation_e(&pts(x), at.x_a, at.x_b, Energy::new(e)?, model)?
            }
            Domain::Time(t) if order == 1 => match spec {
                EndpointSpec::Fixed(x_b) => mean_fixed(x, at.x_a, x_b, t, model)?,
                EndpointSpec::Free => mean_free(x, at.x_a, t, model)?,
            },
            Domain::Time(t) => {
                if !model.is_gaussian() {
                    return Err(usage(
                        "time-domain second moments are available for lambda = 2 only; use --energy or --paths",
                    ));
                }
                second_moment_gauss(x, second, at.x_a, spec, t, model.diffusion())?
            }
        };
        tab.push(vec![x, v]);
    }
    Ok(tab)
}

pub struct SimulateArgs {
    pub t: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    pub x_a: f64,
    pub x_b: f64,
    pub endpoint: Endpoint,
}

pub fn sample_paths(model: &WalkModel, a: &SimulateArgs) -> Result<Vec<PathSample>, CliError> {
    if a.paths == 0 {
        return Err(usage("--paths must be at least 1"));
    }
    if a.endpoint == Endpoint::Fixed && !model.is_gaussian() {
        return Err(usage(
            "fixed-endpoint sample paths are available for lambda = 2 only",
        ));
    }
    (0..a.paths as u64)
        .map(|i| {
            Ok(match a.endpoint {
                Endpoint::Free => simulate_indexed_path(a.t, a.steps, a.x_a, model, a.seed, i)?,
                Endpoint::Fixed => simulate_indexed_bridge(
                    a.t,
                    a.steps,
                    a.x_a,
                    a.x_b,
                    model.diffusion(),
                    a.seed,
                    i,
                )?,
            })
        })
        .collect()
}

/// Long format: one row per (path, step).
pub fn paths_table(paths: &[PathSample]) -> Table {
    let mut tab = Table::new(["path", "step", "t", "x"]);
    for (i, p) in paths.iter().enumerate() {
        for (k, (&t, &x)) in p.times.iter().zip(&p.positions).enumerate() {
            tab.push(vec![i as f64, k as f64, t, x]);
        }
    }
    tab
}

/// Wide format for plotting: `t, x_0, x_1, ...`.
pub fn paths_wide(paths: &[PathSample]) -> Table {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..paths.len()).map(|i| format!("x_{i}")));
    let mut tab = Table::new(cols);
    for k in 0..paths[0].times.len() {
        let mut row = vec![paths[0].times[k]];
        row.extend(paths.iter().map(|p| p.positions[k]));
        tab.push(row);
    }
    tab
}

pub fn profiles_table(paths: &[PathSample], grid: Grid) -> Result<Table, CliError> {
    let edges = grid.points();
    let mut tab = Table::new(["path", "x_lo", "x_hi", "L"]);
    for (i, p) in paths.iter().enumerate() {
        let prof = local_time_profile(p, &edges)?;
        for (j, &v) in prof.values.iter().enumerate() {
            tab.push(vec![i as f64, edges[j], edges[j + 1], v]);
        }
    }
    Ok(tab)
}

/// `dir/stem_profile.ext` next to `path`.
pub fn profile_path(path: &Path, format: Format) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}_profile.{}", format.extension()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Analytic,
    Mc,
    All,
}

pub fn parse_tolerance(s: &str) -> Result<f64, String> {
    if s == "default" {
        return Ok(1.0);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!(
            "expected `default` or a positive factor, got {s:?}"
        )),
    }
}

fn figure_rescaling(o: &VerifyOptions) -> CheckReport {
    let threshold = 1e-7 * o.tolerance_factor;
    match rescaling_spread() {
        Ok(v) => CheckReport {
            name: "figure_rescaling",
            passed: v <= threshold,
            measured: v,
            threshold,
            detail: "one row per figure curve at (D, t, E) = (1, 1, 1) vs (2, 0.5, 3)".into(),
        },
        Err(e) => CheckReport {
            name: "figure_rescaling",
            passed: false,
            measured: f64::NAN,
            threshold,
            detail: e.to_string(),
        },
    }
}

pub fn run_verify(suite: Suite, o: &VerifyOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Analytic | Suite::All) {
        out.extend(verify::analytic_suite(o));
        out.push(figure_rescaling(o));
    }
    if matches!(suite, Suite::Mc | Suite::All) {
        out.extend(verify::mc_suite(o));
    }
    out
}

pub fn figures(
    recipe: &str,
    dir: &Path,
    format: Format,
    svg: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let all = figure_recipes();
    let chosen: Vec<_> = if recipe == "all" {
        all.iter().collect()
    } else {
        let r: Vec<_> = all.iter().filter(|r| r.name() == recipe).collect();
        if r.is_empty() {
            let names: Vec<_> = all.iter().map(|r| r.name()).collect();
            return Err(usage(format!(
                "unknown recipe {recipe:?}; expected one of {} or all",
                names.join(", ")
            )));
        }
        r
    };
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for r in chosen {
        for (stem, table) in r.build(&Scale::default())? {
            let p = dir.join(format!("{stem}.{}", format.extension()));
            write_atomic(&p, &table.render(format))?;
            written.push(p);
            // long-format profile tables do not chart as lines
            if svg && !stem.ends_with("_profiles") {
                let s = dir.join(format!("{stem}.svg"));
                write_atomic(&s, &line_chart(&table, r.title()))?;
                written.push(s);
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        let g = parse_grid("-10:10:401").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 401);
        assert_eq!((p[0], p[200], p[400]), (-10.0, 0.0, 10.0));
        assert!(parse_grid("0:1:1").is_err());
        assert!(parse_grid("1:0:5").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a:1:3").is_err());
    }

    #[test]
    fn tolerance_syntax() {
        assert_eq!(parse_tolerance("default"), Ok(1.0));
        assert_eq!(parse_tolerance("2.5"), Ok(2.5));
        assert!(parse_tolerance("-1").is_err());
    }

    #[test]
    fn profile_sibling() {
        let p = profile_path(Path::new("out/paths.csv"), Format::Json);
        assert_eq!(p, Path::new("out/paths_profile.json"));
    }

    #[test]
    fn generic_ltdist_only_at_start() {
        let m = WalkModel::new(1.5, 1.0).unwrap();
        let g = parse_grid("0:1:3").unwrap();
        let away = Placement {
            x: 0.5,
            x_a: 0.0,
            x_b: 0.0,
            endpoint: Endpoint::Free,
        };
        assert!(matches!(
            ltdist(&m, Domain::Time(1.0), &away, g),
            Err(CliError::Usage(_))
        ));
        let start = Placement { x: 0.0, ..away };
        let t = ltdist(&m, Domain::Time(1.0), &start, g).unwrap();
        assert_eq!(t.rows.len(), 3);
    }

    #[test]
    fn gaussian_second_moment_at_start() {
        let m = WalkModel::gaussian(1.0).unwrap();
        let at = Placement {
            x: 0.0,
            x_a: 0.0,
            x_b: 0.0,
            endpoint: Endpoint::Fixed,
        };
        let mc = McArgs {
            paths: None,
            steps: 10,
            seed: 0,
            epsilon: None,
            bin_width: None,
        };
        let t = moment(
            &m,
            2,
            Domain::Time(1.0),
            &at,
            parse_grid("0:1:2").unwrap(),
            &mc,
        )
        .unwrap();
        assert!((t.rows[0][1] - 1.0).abs() < 1e-12);
    }
}
