use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use irspace::pipeline::{geodesic_probe, run_stages, PipelineConfig, PipelineError, Stage, StageOutcome};

#[derive(Parser)]
#[command(name = "irspace", version, about = "Query-log spacetime pipeline")]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config value, e.g. --set distance.bm25.k1=1.5 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (same as --set output_dir=DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Re-run stages even when their manifest is up to date.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic log with planted geometry.
    Synth,
    /// Parse a query log into normalized events.
    Ingest {
        /// Log to read instead of the synth stage output.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Split events into clickstreams.
    Sessionize,
    /// Build the layered pre-space of distances.
    Prespace,
    /// Link, triangulate and embed each layer.
    Embed,
    /// Fit the metric field on a grid.
    Fit,
    /// Integrate a geodesic on the fitted field.
    Geodesic(GeodesicArgs),
    /// Roughness and distortion diagnostics.
    Diagnose {
        /// roughness.jsonl of an earlier run to compare against.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Compare against another environment's embedding.
    Compare {
        /// space.json of the other environment.
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Run several stages in order; `all` runs every stage but compare.
    Run {
        #[arg(required = true, value_name = "STAGE")]
        stages: Vec<String>,
    },
}

#[derive(Args)]
struct GeodesicArgs {
    /// Start point, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    /// Start velocity, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    v0: Option<Vec<f64>>,
    /// Parameter span to integrate over.
    #[arg(long)]
    t_end: Option<f64>,
    /// RK4 step size.
    #[arg(long)]
    step: Option<f64>,
}

fn report(stage: Stage, outcome: StageOutcome) {
    match outcome {
        StageOutcome::Ran => println!("{stage}: done"),
        StageOutcome::UpToDate => println!("{stage}: up to date"),
    }
}

fn parse_stages(names: &[String]) -> Result<Vec<Stage>, PipelineError> {
    let mut out = Vec::new();
    for name in names {
        if name == "all" {
            out.extend(Stage::ALL.iter().copied().filter(|s| *s != Stage::Compare));
        } else {
            out.push(name.parse()?);
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    let single = |cfg: &PipelineConfig, stage| run_stages(&[stage], cfg, cli.force, report);
    match cli.cmd {
        Cmd::Synth => single(&cfg, Stage::Synth),
        Cmd::Ingest { input } => {
            if input.is_some() {
                cfg.input.path = input;
            }
            single(&cfg, Stage::Ingest)
        }
        Cmd::Sessionize => single(&cfg, Stage::Sessionize),
        Cmd::Prespace => single(&cfg, Stage::Prespace),
        Cmd::Embed => single(&cfg, Stage::Embed),
        Cmd::Fit => single(&cfg, Stage::Fit),
        Cmd::Geodesic(a) => {
            let outcome = geodesic_probe(&cfg, a.x0, a.v0, a.t_end, a.step, cli.force)?;
            report(Stage::Geodesic, outcome);
            Ok(())
        }
        Cmd::Diagnose { baseline } => {
            if baseline.is_some() {
                cfg.diagnose.baseline = baseline;
            }
            single(&cfg, Stage::Diagnose)
        }
        Cmd::Compare { other } => {
            if other.is_some() {
                cfg.compare.other = other;
            }
            single(&cfg, Stage::Compare)
        }
        Cmd::Run { stages } => run_stages(&parse_stages(&stages)?, &cfg, cli.force, report),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
