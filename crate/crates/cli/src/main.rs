//! `geodloom`: diagnostics for hypersurfaces of hyperbolic space and their
//! Gauss maps, driven by scene files or the built-in gallery.
//!
//! Exit codes: 0 success, 1 schema or usage error, 2 geometric precondition
//! failure, 3 identity check over tolerance.

mod commands;
mod error;
mod report;
mod scene;
mod svg;
mod tensors;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geodloom::config::{set_config, Config};
use geodloom::GeomError;

use crate::commands::{FlowArgs, Output};
use crate::error::CliError;
use crate::scene::{ChartArgs, Context, Scene, TolOverrides};

#[derive(Parser)]
#[command(name = "geodloom", version, about = "Gauss maps of hypersurfaces in hyperbolic space")]
struct Cli {
    /// Scene file (JSON, schema 1). Names not found there resolve to the built-in gallery.
    #[arg(long, global = true)]
    scene: Option<PathBuf>,
    /// Emit the report as JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit the command's table as CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Write an SVG plot of the charts involved (n = 1 or 2).
    #[arg(long, global = true, value_name = "FILE")]
    svg: Option<PathBuf>,
    #[command(flatten)]
    chart: GalleryFlags,
    #[command(subcommand)]
    command: Command,
}

/// Parameters for built-in gallery charts.
#[derive(Args)]
struct GalleryFlags {
    /// Hypersurface dimension (ignored with --scene).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Distance of the r-cap.
    #[arg(long, global = true, allow_hyphen_values = true)]
    r: Option<f64>,
    /// Dimension of Q in normal_bundle_NQ.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Angle of the constant-angle curve (start angle for the built-in isotopy).
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta0: Option<f64>,
    /// End angle of the built-in constant-angle isotopy.
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta1: Option<f64>,
    /// Translation length of the built-in representation.
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Samples per axis.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Half width of the parameter box.
    #[arg(long, global = true)]
    half_width: Option<f64>,
    /// Seed of random_perturbed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Perturbation amplitude of random_perturbed and equivariant_wavy.
    #[arg(long, global = true, allow_hyphen_values = true)]
    amplitude: Option<f64>,
    /// Stage count of the built-in isotopy.
    #[arg(long, global = true)]
    stages: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Identity suite on the unit tangent bundle and the space of geodesics.
    TensorsCheck {
        /// Random samples, cycling through n = 1, 2, 3 (seeded by --seed, default 7).
        #[arg(long, default_value_t = 300)]
        draws: usize,
    },
    /// Gauss map residuals and the pulled-back metric.
    Gauss { chart: String },
    /// Normal evolution to time t with the curvature table.
    Evolve {
        chart: String,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Flat section, desingularization and recovery of σ.
    Integrate {
        chart: String,
        /// Grid index of the node where the flat section starts.
        #[arg(long, default_value_t = 0)]
        basepoint: usize,
    },
    /// Maslov 1-form and its checks.
    Maslov { chart: String },
    /// Holonomy along a loop by three methods, and the integrability verdict.
    Holonomy {
        chart: String,
        #[arg(long = "loop", default_value = "gen0")]
        lp: String,
    },
    /// Flux of a Lagrangian isotopy along a loop.
    Flux {
        isotopy: String,
        #[arg(long = "loop", default_value = "gen0")]
        lp: String,
    },
    /// Normal-speed flow with a CSV time series.
    Flow {
        chart: String,
        /// fsigma, const:<c> or a number.
        #[arg(long, default_value = "fsigma", allow_hyphen_values = true)]
        speed: String,
        #[arg(long = "T", default_value_t = 0.1)]
        t_end: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// rk4 or euler.
        #[arg(long, default_value = "rk4")]
        scheme: String,
    },
    /// Summary of every gallery entry.
    Examples,
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let scene = match &cli.scene {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Schema(format!("{}: {e}", p.display())))?;
            Some(Scene::parse(&text)?)
        }
        None => None,
    };
    let mut cfg = Config::default();
    if let Some(s) = &scene {
        s.tolerances.apply(&mut cfg.tol);
    }
    if let Ok(env) = std::env::var("GEODLOOM_TOL") {
        TolOverrides::parse_env(&env)?.apply(&mut cfg.tol);
    }
    set_config(cfg);
    let f = &cli.chart;
    if let Some(n) = f.n {
        geodloom::lorentz::check_n(n)?;
    }
    let args = ChartArgs {
        n: f.n,
        r: f.r,
        k: f.k,
        theta0: f.theta0,
        theta1: f.theta1,
        c: f.c,
        samples: f.samples,
        half_width: f.half_width,
        seed: f.seed,
        amplitude: f.amplitude,
        stages: f.stages,
    };
    Ok(Context { scene, args })
}

fn dispatch(cli: &Cli, ctx: &Context) -> Result<Output, CliError> {
    match &cli.command {
        Command::TensorsCheck { draws } => commands::tensors_check(*draws, ctx.args.seed.unwrap_or(7)),
        Command::Gauss { chart } => commands::gauss(ctx, chart),
        Command::Evolve { chart, t } => commands::evolve(ctx, chart, *t),
        Command::Integrate { chart, basepoint } => commands::integrate(ctx, chart, *basepoint),
        Command::Maslov { chart } => commands::maslov(ctx, chart),
        Command::Holonomy { chart, lp } => commands::holonomy(ctx, chart, lp),
        Command::Flux { isotopy, lp } => commands::flux_cmd(ctx, isotopy, lp),
        Command::Flow { chart, speed, t_end, dt, scheme } => {
            commands::flow(ctx, chart, &FlowArgs { speed, t_end: *t_end, dt: *dt, scheme })
        }
        Command::Examples => commands::examples(ctx),
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    if cli.csv {
        let table = out.table.as_ref().ok_or_else(|| CliError::Schema("this command has no CSV table".into()))?;
        report::write_csv(&mut w, table)?;
    } else if cli.json {
        report::write_json(&mut w, &out.report)?;
    } else {
        report::write_text(&mut w, &out.report)?;
    }
    w.flush()?;
    if let Some(path) = &cli.svg {
        if out.layers.is_empty() {
            return Err(CliError::Schema("this command has nothing to plot".into()));
        }
        std::fs::write(path, svg::render(&out.layers)?)?;
    }
    Ok(())
}

/// Error text, with the worst node of each scan time for failed desingularizations.
fn describe(e: &CliError) -> String {
    let mut s = e.to_string();
    if let CliError::Precondition(GeomError::NoAdmissibleTime { report, .. }) = e {
        for f in report.iter().take(12) {
            s.push_str(&format!(
                "\n  t = {:+.6}: node {:?}, smallest singular value {:.3e}{}",
                f.t,
                f.node,
                f.min_singular,
                if f.orientation_flip { ", orientation flip" } else { "" }
            ));
        }
        if report.len() > 12 {
            s.push_str(&format!("\n  ... {} more scan times", report.len() - 12));
        }
    }
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = context(&cli).and_then(|ctx| {
        let mut out = dispatch(&cli, &ctx)?;
        if let (Some(d), serde_json::Value::Object(m)) =
            (ctx.scene.as_ref().and_then(|s| s.description.clone()), &mut out.report)
        {
            m.insert("scene_description".into(), d.into());
        }
        emit(&cli, &out)?;
        report::require(&out.checks)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("geodloom: {}", describe(&e));
            ExitCode::from(e.exit_code())
        }
    }
}
