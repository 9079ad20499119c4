use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use phasebin::commands::{self, DiagnoseOptions, DiagnoseSource, Global, OutputFormat, StateSpec, Sweep};
use phasebin::diagnostics::SmoothnessOptions;
use phasebin::Method;

#[derive(Parser)]
#[command(name = "phasebin", version, about = "Number distributions from phase-space samples")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Samples or trajectories.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    ntraj: usize,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// P_n of one state by one or more methods.
    Pn {
        #[command(flatten)]
        state: StateSpec,
        /// Comma-separated methods, or "all".
        #[arg(long, default_value = "all")]
        method: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Bhattacharyya distance against a sweep parameter, with a power-law fit.
    Scaling {
        #[arg(long, value_enum)]
        sweep: Sweep,
        /// Override the sweep points.
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<f64>>,
    },
    /// Radial smoothness of the Wigner function against the Fock rings.
    Diagnose {
        #[command(flatten)]
        state: Option<StateSpec>,
        /// Ensemble CSV written by `sample` instead of a state.
        #[arg(long, conflicts_with = "kind")]
        ensemble: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        mode: usize,
        /// Comma-separated occupation numbers to test.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = SmoothnessOptions::default().threshold)]
        threshold: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Two-site Bose-Hubbard dynamics: TWA against exact evolution.
    BoseHubbard {
        /// JSON config.
        #[arg(long)]
        config: PathBuf,
    },
    /// Draw Wigner samples of a state.
    Sample {
        #[command(flatten)]
        state: StateSpec,
    },
}

fn parse_methods(s: &str) -> phasebin::Result<Vec<Method>> {
    if s == "all" {
        return Ok(vec![
            Method::Analytic,
            Method::Quadrature,
            Method::Binned,
            Method::WignerAverage,
        ]);
    }
    s.split(',').map(|m| m.trim().parse()).collect()
}

fn run(cli: Cli) -> phasebin::Result<()> {
    let g = cli.global;
    if let Some(t) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| phasebin::Error::Config(e.to_string()))?;
    }
    let global = Global {
        seed: g.seed,
        ntraj: g.ntraj,
        out: g.out,
        format: g.format,
    };
    let manifest = match cli.command {
        Command::Pn { state, method, n_max } => commands::cmd_pn(&global, &state, &parse_methods(&method)?, n_max)?,
        Command::Scaling { sweep, points } => commands::cmd_scaling(&global, sweep, points)?,
        Command::Diagnose {
            state,
            ensemble,
            mode,
            n,
            threshold,
            points,
        } => {
            let source = match (&ensemble, &state) {
                (Some(path), _) => DiagnoseSource::Ensemble { path, mode },
                (None, Some(spec)) => DiagnoseSource::State(spec),
                (None, None) => return Err(phasebin::Error::Config("diagnose needs --state or --ensemble".into())),
            };
            let opts = DiagnoseOptions {
                points,
                smoothness: SmoothnessOptions {
                    threshold,
                    ..SmoothnessOptions::default()
                },
                ..DiagnoseOptions::default()
            };
            commands::cmd_diagnose(&global, source, &n, opts)?
        }
        Command::BoseHubbard { config } => commands::cmd_bose_hubbard(&global, &config)?,
        Command::Sample { state } => commands::cmd_sample(&global, &state)?,
    };
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    for p in &manifest.outputs {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
