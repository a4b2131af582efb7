//! `levy-lt`: curves, simulations, figure data and the verification suite
//! for local times of Lévy random walks.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage or
//! domain error.

mod commands;
mod figures;
mod svg;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use levy_localtime::verify::VerifyOptions;
use levy_localtime::{Error, WalkModel};

use commands::{Endpoint, Grid, McArgs, Placement, SimulateArgs, Sink, Suite};
use table::Format;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(
                Error::Domain { .. }
                | Error::Config(_)
                | Error::Divergence(_)
                | Error::TooManyPoints(_),
            ) => 2,
            CliError::Lib(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "levy-lt",
    version,
    about = "Local time of symmetric Lévy random walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Lévy index, 1 ≤ λ ≤ 2.
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    diffusion: f64,
}

impl ModelArgs {
    fn model(&self) -> Result<WalkModel, CliError> {
        Ok(WalkModel::new(self.lambda, self.diffusion)?)
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write an SVG line chart here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

impl OutputArgs {
    fn sink(&self) -> Sink<'_> {
        Sink {
            format: self.format,
            output: self.output.as_deref(),
            svg: self.svg.as_deref(),
        }
    }
}

#[derive(Args)]
struct PlacementArgs {
    /// Point where the local time is taken (defaults to --xa).
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    xa: f64,
    /// Endpoint for --endpoint fixed (defaults to --xa).
    #[arg(long, allow_hyphen_values = true)]
    xb: Option<f64>,
    #[arg(long, value_enum, default_value_t = Endpoint::Fixed)]
    endpoint: Endpoint,
}

impl PlacementArgs {
    fn placement(&self) -> Placement {
        Placement {
            x: self.x.unwrap_or(self.xa),
            x_a: self.xa,
            x_b: self.xb.unwrap_or(self.xa),
            endpoint: self.endpoint,
        }
    }
}

fn grid_arg(s: &str) -> Result<Grid, String> {
    commands::parse_grid(s)
}

#[derive(Subcommand)]
enum Command {
    /// Transition density P(x, t) on an x grid.
    Density {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        time: f64,
        /// min:max:count
        #[arg(long, allow_hyphen_values = true, value_parser = grid_arg)]
        grid: Grid,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Resolvent R(x, -E) on an x grid.
    Resolvent {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        energy: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = grid_arg)]
        grid: Grid,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// One-point local-time distribution on an L grid (density and δ(L) atom).
    Ltdist {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        time: Option<f64>,
        /// Evaluate the Laplace-domain distribution instead.
        #[arg(long)]
        energy: Option<f64>,
        #[arg(long, value_parser = grid_arg)]
        grid: Grid,
        #[command(flatten)]
        at: PlacementArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// First or second local-time moment along an x grid; the second moment
    /// pairs each grid point with --x.
    Moment {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        energy: Option<f64>,
        #[arg(long, allow_hyphen_values = true, value_parser = grid_arg)]
        grid: Grid,
        #[command(flatten)]
        at: PlacementArgs,
        /// Estimate by simulation with this many paths.
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Endpoint acceptance window for λ < 2 (default 0.05 (Dt)^{1/λ}).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Spatial bin width (default (Dt)^{1/λ}/25).
        #[arg(long)]
        bin_width: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sample paths; with --grid also their local-time profiles on those
    /// bin edges, written next to --output as <stem>_profile.<ext>.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        xa: f64,
        #[arg(long, allow_hyphen_values = true)]
        xb: Option<f64>,
        #[arg(long, value_enum, default_value_t = Endpoint::Free)]
        endpoint: Endpoint,
        #[arg(long, allow_hyphen_values = true, value_parser = grid_arg)]
        grid: Option<Grid>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the property checks and print a PASS/FAIL table.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// `default` or a factor multiplying every threshold.
        #[arg(long, default_value = "default", value_parser = commands::parse_tolerance)]
        tolerance: f64,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Regenerate figure data files into a directory.
    Figures {
        /// fig1 ... fig7, or all.
        #[arg(long, default_value = "all")]
        recipe: String,
        #[arg(long, required_unless_present = "list")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write an SVG chart per curve file.
        #[arg(long)]
        svg: bool,
        /// List the recipes and exit.
        #[arg(long)]
        list: bool,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Density {
            model,
            time,
            grid,
            out,
        } => {
            let t = commands::density(&model.model()?, time, grid)?;
            out.sink().emit(&t, "P(x, t)")?;
        }
        Command::Resolvent {
            model,
            energy,
            grid,
            out,
        } => {
            let t = commands::resolvent_curve(&model.model()?, energy, grid)?;
            out.sink().emit(&t, "R(x, -E)")?;
        }
        Command::Ltdist {
            model,
            time,
            energy,
            grid,
            at,
            out,
        } => {
            let dom = commands::domain(time, energy)?;
            let t = commands::ltdist(&model.model()?, dom, &at.placement(), grid)?;
            out.sink().emit(&t, "one-point distribution")?;
        }
        Command::Moment {
            model,
            order,
            time,
            energy,
            grid,
            at,
            paths,
            steps,
            seed,
            epsilon,
            bin_width,
            out,
        } => {
            let dom = commands::domain(time, energy)?;
            let mc = McArgs {
                paths,
                steps,
                seed,
                epsilon,
                bin_width,
            };
            let t = commands::moment(&model.model()?, order, dom, &at.placement(), grid, &mc)?;
            out.sink().emit(&t, "local-time moment")?;
        }
        Command::Simulate {
            model,
            time,
            steps,
            paths,
            seed,
            xa,
            xb,
            endpoint,
            grid,
            out,
        } => {
            if grid.is_some() && out.output.is_none() {
                return Err(CliError::Usage(
                    "--grid needs --output for the profile file".into(),
                ));
            }
            let args = SimulateArgs {
                t: time,
                steps,
                paths,
                seed,
                x_a: xa,
                x_b: xb.unwrap_or(xa),
                endpoint,
            };
            let samples = commands::sample_paths(&model.model()?, &args)?;
            let sink = out.sink();
            Sink { svg: None, ..sink }.emit(&commands::paths_table(&samples), "")?;
            if let Some(p) = &out.svg {
                table::write_atomic(
                    p,
                    &svg::line_chart(&commands::paths_wide(&samples), "sample paths"),
                )?;
            }
            if let (Some(g), Some(p)) = (grid, &out.output) {
                let prof = commands::profiles_table(&samples, g)?;
                table::write_atomic(
                    &commands::profile_path(p, out.format),
                    &prof.render(out.format),
                )?;
            }
        }
        Command::Verify {
            suite,
            tolerance,
            paths,
            steps,
            seed,
        } => {
            let mut o = VerifyOptions {
                tolerance_factor: tolerance,
                ..VerifyOptions::default()
            };
            o.mc_paths = paths.unwrap_or(o.mc_paths);
            o.mc_steps = steps.unwrap_or(o.mc_steps);
            o.seed = seed.unwrap_or(o.seed);
            let mut failed = 0;
            let reports = commands::run_verify(suite, &o);
            for r in &reports {
                println!("{r}");
                failed += usize::from(!r.passed);
            }
            println!(
                "{} checks, {} passed, {} failed",
                reports.len(),
                reports.len() - failed,
                failed
            );
            return Ok(u8::from(failed > 0));
        }
        Command::Figures {
            recipe,
            output,
            format,
            svg,
            list,
        } => {
            if list {
                for r in figures::figure_recipes() {
                    println!("{:<6} {}", r.name(), r.title());
                }
                return Ok(0);
            }
            let dir = output.expect("required unless --list");
            for p in commands::figures(&recipe, &dir, format, svg)? {
                eprintln!("wrote {}", p.display());
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("levy-lt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
