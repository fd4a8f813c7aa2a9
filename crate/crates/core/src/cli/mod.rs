//! Command-line front end.
//!
//! Exit status 0 on success, 1 for invalid input (usage, documents,
//! carpets, weights), 2 when an enumeration budget or depth capacity is
//! exceeded.

pub mod doc;
pub mod invariance;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::boxlab::{
    compare_with_hausdorff, exact_box_counts, fit_dimension_slope, fit_level_range,
    partition_entropy_series, sampled_box_counts, BoxError, CountSeries, EntropySeries,
    DEFAULT_BUDGET, DEFAULT_FIT_MIN_LEVEL,
};
use crate::carpet::{sample_points, CarpetSpec, SampleError, DEFAULT_DEPTH};
use crate::dimension::{
    dimension_report, hausdorff_dimension, ly_dimension, optimal_weights, row_profile,
    shannon_entropy, Weights,
};
use crate::numopt::{maximize_dimension, AscentConfig, AscentTrace, NumoptError};
use doc::DocError;
use render::RenderError;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "CARPETLAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Numopt(#[from] NumoptError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Box(BoxError::Budget { .. } | BoxError::Depth(_))
            | CliError::Box(BoxError::SampleResolution { .. })
            | CliError::Render(RenderError::Budget { .. } | RenderError::Depth(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "carpetlab",
    version,
    about = "Dimension toolkit for reflected Bedford-McMullen carpets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct WeightChoice {
    /// JSON array of digit weights (canonical digit order)
    #[arg(long, value_name = "FILE", conflicts_with = "uniform")]
    weights: Option<PathBuf>,
    /// Equal weight on every digit
    #[arg(long)]
    uniform: bool,
}

impl WeightChoice {
    fn resolve(&self, spec: &CarpetSpec, default_optimal: bool) -> Result<Weights, CliError> {
        if let Some(path) = &self.weights {
            return Ok(doc::load_weights(spec, path)?);
        }
        if self.uniform || !default_optimal {
            return Ok(Weights::uniform(spec));
        }
        Ok(optimal_weights(&row_profile(spec)))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form Hausdorff dimension
    Dim { spec: PathBuf },
    /// Dimension-maximising Bernoulli weights
    Weights { spec: PathBuf },
    /// Dimension of a Bernoulli measure
    Lydim {
        spec: PathBuf,
        #[command(flatten)]
        choice: WeightChoice,
    },
    /// Numerical ascent towards the optimal weights
    Optimize {
        spec: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 0.5)]
        backtrack: f64,
        /// Start from these weights instead of uniform
        #[arg(long, value_name = "FILE")]
        init: Option<PathBuf>,
        /// Write the `iter,objective` trace here
        #[arg(long = "trace-out", value_name = "PATH")]
        trace_out: Option<PathBuf>,
    },
    /// Box counts per level and the fitted slope
    Boxcount {
        spec: PathBuf,
        #[arg(long)]
        lmin: u32,
        #[arg(long)]
        lmax: u32,
        /// Enumerate every word (default)
        #[arg(long, conflicts_with = "sample")]
        exact: bool,
        /// Count grid cells hit by this many chaos-game points
        #[arg(long, value_name = "N")]
        sample: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        choice: WeightChoice,
        /// Lowest level used by the slope fit
        #[arg(long = "fit-min", default_value_t = DEFAULT_FIT_MIN_LEVEL)]
        fit_min: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Partition entropy of a measure per level
    Entropy {
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        lmin: u32,
        #[arg(long)]
        lmax: u32,
        #[command(flatten)]
        choice: WeightChoice,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Write a PGM image of the level-K approximation
    Render {
        spec: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 512)]
        size: u32,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Draw an orientation glyph in each cylinder
        #[arg(long)]
        glyph: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Random signature reassignments of a fixed cell set
    Invariance {
        spec: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `text` to `path`, or to `out` when no path is given.
fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(io_err(p)),
        None => out
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn count_csv(series: &CountSeries) -> String {
    let mut s = String::from("l,side,count\n");
    for e in &series.entries {
        s.push_str(&format!("{},{},{}\n", e.level, e.side, e.count));
    }
    s
}

pub fn entropy_csv(series: &EntropySeries) -> String {
    let mut s = String::from("l,H,estimate,collisions\n");
    for lv in &series.levels {
        s.push_str(&format!(
            "{},{},{},{}\n",
            lv.level, lv.entropy, lv.estimate, lv.collisions
        ));
    }
    s
}

pub fn trace_csv(trace: &AscentTrace) -> String {
    let mut s = String::from("iter,objective\n");
    for (i, v) in trace.objective.iter().enumerate() {
        s.push_str(&format!("{i},{v}\n"));
    }
    s
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let o = io_err(Path::new("<stdout>"));
    match cli.command {
        Command::Dim { spec } => {
            let spec = doc::load_spec(&spec)?;
            let rep = dimension_report(&row_profile(&spec));
            let text = format!(
                "dimension = {}\nS = {}\nbeta = {}\nt = {}\n",
                rep.hausdorff,
                rep.row_sum,
                rep.beta,
                join(&rep.t)
            );
            out.write_all(text.as_bytes()).map_err(o)
        }
        Command::Weights { spec } => {
            let spec = doc::load_spec(&spec)?;
            let rep = dimension_report(&row_profile(&spec));
            let mut s = String::from("row,t,q\n");
            for (j, (t, q)) in rep.t.iter().zip(&rep.optimal_q).enumerate() {
                s.push_str(&format!("{j},{t},{q}\n"));
            }
            s.push_str("\nindex,i,j,sx,sy,p\n");
            for (k, (d, p)) in spec.digits().iter().zip(rep.optimal.p()).enumerate() {
                s.push_str(&format!(
                    "{k},{},{},{},{},{p}\n",
                    d.i,
                    d.j,
                    d.sx.as_i8(),
                    d.sy.as_i8()
                ));
            }
            s.push_str(&format!(
                "\nH(p) = {}\nH(q) = {}\ndimension = {}\n",
                rep.entropy_p, rep.entropy_q, rep.hausdorff
            ));
            out.write_all(s.as_bytes()).map_err(o)
        }
        Command::Lydim { spec, choice } => {
            let spec = doc::load_spec(&spec)?;
            let prof = row_profile(&spec);
            let w = choice.resolve(&spec, false)?;
            let value = ly_dimension(&prof, &w).map_err(DocError::from)?;
            let text = format!(
                "ly_dimension = {value}\nH(p) = {}\nH(q) = {}\nhausdorff = {}\n",
                shannon_entropy(w.p()).unwrap_or(f64::NAN),
                shannon_entropy(w.q()).unwrap_or(f64::NAN),
                hausdorff_dimension(&prof)
            );
            out.write_all(text.as_bytes()).map_err(o)
        }
        Command::Optimize {
            spec,
            eta,
            tol,
            max_iter,
            backtrack,
            init,
            trace_out,
        } => {
            let spec = doc::load_spec(&spec)?;
            let prof = row_profile(&spec);
            let start = match init {
                Some(p) => doc::load_weights(&spec, &p)?,
                None => Weights::uniform(&spec),
            };
            let cfg = AscentConfig {
                max_iter,
                eta,
                tol,
                backtrack,
            };
            let trace = maximize_dimension(&prof, &start, &cfg)?;
            let closed = optimal_weights(&prof);
            let dist = trace
                .weights
                .p()
                .iter()
                .zip(closed.p())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let h = hausdorff_dimension(&prof);
            let text = format!(
                "iterations = {}\nconverged = {}\nbacktracks = {}\nobjective = {}\nhausdorff = {h}\ngap = {}\nmax_weight_distance = {dist}\np = {}\n",
                trace.iterations,
                trace.converged,
                trace.backtracks,
                trace.final_objective(),
                h - trace.final_objective(),
                join(trace.weights.p()),
            );
            out.write_all(text.as_bytes()).map_err(o)?;
            if let Some(path) = trace_out {
                std::fs::write(&path, trace_csv(&trace)).map_err(io_err(&path))?;
            }
            Ok(())
        }
        Command::Boxcount {
            spec,
            lmin,
            lmax,
            exact: _,
            sample,
            depth,
            seed,
            choice,
            fit_min,
            budget,
            out: path,
        } => {
            let spec = doc::load_spec(&spec)?;
            let prof = row_profile(&spec);
            let series = match sample {
                Some(count) => {
                    let w = choice.resolve(&spec, true)?;
                    let pts = sample_points(&spec, &w, count, depth, seed)?;
                    sampled_box_counts(&pts, lmin, lmax, spec.m())?
                }
                None => exact_box_counts(&spec, lmin, lmax, budget)?,
            };
            emit(out, path.as_deref(), &count_csv(&series))?;

            let fit = fit_level_range(&series, spec.m(), fit_min.max(lmin), lmax)
                .or_else(|_| fit_dimension_slope(&series, spec.m()));
            let mut report = String::new();
            match fit {
                Ok(fit) => {
                    let cmp = compare_with_hausdorff(&prof, &fit);
                    report.push_str(&format!(
                        "slope = {} +/- {} (levels {}..={})\nhausdorff = {}\ncounting_exponent = {}\ngap = {}\n",
                        fit.slope, fit.std_error, fit.levels.0, fit.levels.1,
                        cmp.hausdorff, cmp.counting_exponent, cmp.gap
                    ));
                    if cmp.discrepancy {
                        report.push_str(
                            "discrepancy: row counts are unequal, so box counts grow like |D|^k r^(l-k) and the box-counting exponent exceeds the Hausdorff value\n",
                        );
                    }
                }
                Err(e) => report.push_str(&format!("slope = unavailable ({e})\n")),
            }
            err.write_all(report.as_bytes())
                .map_err(io_err(Path::new("<stderr>")))
        }
        Command::Entropy {
            spec,
            lmin,
            lmax,
            choice,
            budget,
            out: path,
        } => {
            let spec = doc::load_spec(&spec)?;
            let prof = row_profile(&spec);
            let w = choice.resolve(&spec, false)?;
            let series = partition_entropy_series(&spec, &w, lmin, lmax, budget)?;
            emit(out, path.as_deref(), &entropy_csv(&series))?;
            let target = ly_dimension(&prof, &w).map_err(DocError::from)?;
            writeln!(err, "ly_dimension = {target}").map_err(io_err(Path::new("<stderr>")))
        }
        Command::Render {
            spec,
            level,
            size,
            out: path,
            glyph,
            budget,
        } => {
            let spec = doc::load_spec(&spec)?;
            let img = render::render_raster(&spec, level, size, glyph, budget)?;
            std::fs::write(&path, img.to_pgm()).map_err(io_err(&path))?;
            writeln!(
                out,
                "wrote {} ({}x{}, {} painted)",
                path.display(),
                img.width,
                img.height,
                img.painted_count()
            )
            .map_err(o)
        }
        Command::Invariance {
            spec,
            trials,
            seed,
            budget,
            out: path,
        } => {
            let spec = doc::load_spec(&spec)?;
            if trials < 2 {
                return Err(CliError::Usage("--trials must be at least 2".into()));
            }
            let rep = invariance::invariance_report(&spec, trials, seed, budget)?;
            let mut text = serde_json::to_string_pretty(&rep).expect("report serialises");
            text.push('\n');
            emit(out, path.as_deref(), &text)
        }
    }
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
