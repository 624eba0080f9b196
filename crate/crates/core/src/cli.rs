//! Command-line front end. Exit codes: 0 ok, 1 usage, 2 input or parse
//! error, 3 numeric or analysis failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::accuracy::deviation_report;
use crate::areal::{ArealForm, Heightmap};
use crate::error::{Error, Result};
use crate::io::{
    analyze_areal, analyze_profile, compare_reports, deviation_parameters, read_heightmap, read_profile,
    write_heightmap, ArealOptions, Method, ParameterReport, PlotKind, ProfileOptions, RunConfig, ToothSetManifest,
};
use crate::profile::{Profile, ReferenceForm, SlopeStencil};
use crate::sim::{engagement_count, feed_mark_height, profile_scallop_height, simulate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gearflank", version, about = "Gear flank generation and surface metrology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Hob,
    Fellows,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    Line,
    Poly5,
    Circle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ArealFormArg {
    Plane,
    Poly2,
    Poly5,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TraceArg {
    Profile,
    Helix,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one generated flank and write it as a heightmap.
    Simulate {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Profile parameters of a trace file, or of one trace of a heightmap.
    AnalyzeProfile {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "poly5")]
        form: FormArg,
        /// Gaussian cutoff in mm; omit to evaluate the primitive profile.
        #[arg(long)]
        lc: Option<f64>,
        #[arg(long, default_value_t = 7)]
        slope_points: u32,
        /// Trace direction when the input is a heightmap.
        #[arg(long, value_enum, default_value = "profile")]
        trace: TraceArg,
        /// Trace index when the input is a heightmap; defaults to the middle.
        #[arg(long)]
        at: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Areal parameters of a heightmap.
    AnalyzeAreal {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        lc: Option<f64>,
        #[arg(long, value_enum, default_value = "plane")]
        form: ArealFormArg,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Accuracy deviations of a tooth-set directory.
    Deviations {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Differences between two JSON reports.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_ANALYSIS
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn provenance(rep: &mut ParameterReport, command: &str, input: &Path) {
    rep.provenance("command", command);
    rep.provenance("input", input.display().to_string());
    rep.provenance("gearflank", env!("CARGO_PKG_VERSION"));
}

fn emit(rep: &ParameterReport, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => rep.write(p),
        None => out
            .write_all(rep.to_table().as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn plots_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn is_heightmap(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().next().is_some_and(|l| l.trim_start().starts_with("# nx=")))
}

fn trace_of(map: &Heightmap, trace: TraceArg, at: Option<usize>) -> Result<Profile> {
    // x runs along the helix, y along the profile.
    let (z, dx) = match trace {
        TraceArg::Profile => {
            let ix = at.unwrap_or(map.nx / 2);
            if ix >= map.nx {
                return Err(Error::OutOfRange(format!("trace index {ix} outside 0..{}", map.nx)));
            }
            (map.column(ix), map.dy)
        }
        TraceArg::Helix => {
            let iy = at.unwrap_or(map.ny / 2);
            if iy >= map.ny {
                return Err(Error::OutOfRange(format!("trace index {iy} outside 0..{}", map.ny)));
            }
            (map.row(iy).to_vec(), map.dx)
        }
    };
    Profile::primitive(z, dx)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Simulate { method, config, out: path } => {
            let cfg = RunConfig::read(&config)?;
            let method = match method {
                MethodArg::Hob => Method::Hob,
                MethodArg::Fellows => Method::Fellows,
            };
            let gear = cfg.gear()?;
            let tool = cfg.tool(method)?;
            let params = cfg.params(&tool)?;
            let run = simulate(&gear, &tool, cfg.side(), &params)?;
            let mut map = run.grid.to_heightmap()?;
            let m = &mut map.metadata;
            m.insert("method".into(), if method == Method::Hob { "hob" } else { "fellows" }.into());
            m.insert("step_deg".into(), format!("{}", params.wheel_step_dphi));
            m.insert("passes".into(), run.passes.len().to_string());
            m.insert("engagements".into(), engagement_count(&run).to_string());
            write_heightmap(&path, &map)?;
            writeln!(
                out,
                "wrote {} ({}x{}); engagements {}; feed marks {} um; profile scallop {} um",
                path.display(),
                map.nx,
                map.ny,
                engagement_count(&run),
                crate::io::sig(feed_mark_height(&run.grid)),
                crate::io::sig(profile_scallop_height(&run.grid)),
            )
            .map_err(|e| Error::io("<stdout>", e))?;
            Ok(())
        }
        Command::AnalyzeProfile {
            input,
            form,
            lc,
            slope_points,
            trace,
            at,
            report,
            plots,
        } => {
            let profile = if is_heightmap(&input)? {
                trace_of(&read_heightmap(&input)?, trace, at)?
            } else {
                read_profile(&input)?
            };
            let opts = ProfileOptions {
                form: match form {
                    FormArg::Line => ReferenceForm::Line,
                    FormArg::Poly5 => ReferenceForm::Poly5,
                    FormArg::Circle => ReferenceForm::Circle,
                },
                lc_mm: lc,
                slope: SlopeStencil::from_points(slope_points)?,
            };
            let analysis = analyze_profile(&profile, &opts)?;
            let mut rep = analysis.report()?;
            provenance(&mut rep, "analyze-profile", &input);
            if let Some(dir) = &plots {
                plots_dir(dir)?;
                for kind in [
                    PlotKind::Acf,
                    PlotKind::Psd,
                    PlotKind::Cumpsd,
                    PlotKind::MaterialCurve,
                    PlotKind::SlopeIncrease,
                ] {
                    if let Some(s) = analysis.plot(kind) {
                        s.write(&dir.join(format!("{}.txt", kind.as_str())))?;
                    }
                }
            }
            emit(&rep, report.as_deref(), out)
        }
        Command::AnalyzeAreal {
            input,
            lc,
            form,
            report,
            plots,
        } => {
            let map = read_heightmap(&input)?;
            let opts = ArealOptions {
                form: match form {
                    ArealFormArg::Plane => ArealForm::Plane,
                    ArealFormArg::Poly2 => ArealForm::Poly2,
                    ArealFormArg::Poly5 => ArealForm::Poly5,
                },
                lc_mm: lc,
                ..Default::default()
            };
            let analysis = analyze_areal(&map, &opts)?;
            let mut rep = analysis.report()?;
            provenance(&mut rep, "analyze-areal", &input);
            if let Some(dir) = &plots {
                plots_dir(dir)?;
                for (kind, name) in [
                    (PlotKind::AngularPsd, "angular-psd"),
                    (PlotKind::MaterialCurve, "material-curve"),
                    (PlotKind::Psd, "psd-x"),
                    (PlotKind::Cumpsd, "cumpsd-x"),
                ] {
                    if let Some(s) = analysis.plot(kind) {
                        s.write(&dir.join(format!("{name}.txt")))?;
                    }
                }
            }
            emit(&rep, report.as_deref(), out)
        }
        Command::Deviations { input, report } => {
            let manifest = ToothSetManifest::read_dir(&input)?;
            let set = manifest.load(&input)?;
            let dev = deviation_report(&set, &manifest.options(set.gear()))?;
            let mut rep = deviation_parameters(&dev)?;
            provenance(&mut rep, "deviations", &input);
            emit(&rep, report.as_deref(), out)
        }
        Command::Compare { a, b, out: path } => {
            let ra = ParameterReport::read(&a)?;
            let rb = ParameterReport::read(&b)?;
            let table = compare_reports(&ra, &rb)?.to_table();
            match path {
                Some(p) => std::fs::write(&p, table).map_err(|e| Error::io(&p, e)),
                None => out.write_all(table.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
            }
        }
    }
}
