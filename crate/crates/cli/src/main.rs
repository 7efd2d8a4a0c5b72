use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use udngc_core::harness::{
    apply_seed_override, exit_code, figure_scenario, parse_config, parse_pairs, run_analytic, run_figure,
    run_simulate, validate, write_rows, Preset, RunOptions, SweepRow,
};
use udngc_core::{exec, Error, Result, ScenarioParams};

/// Group-cell handover analytics and Monte Carlo validation for
/// user-centric cooperative ultra-dense networks.
#[derive(Debug, Parser)]
#[command(name = "udngc", version, about)]
struct Cli {
    /// Worker threads; 0 uses every core, 1 is the bit-exact sequential mode.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every closed form for a scenario.
    Analytic {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Monte Carlo engine for a scenario.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a figure sweep (fig3, fig5..fig13).
    Figure {
        preset: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a scenario field, e.g. `--set trials=200`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run the analytic-vs-simulation check suite; exits 1 on any failure.
    Validate {
        config: PathBuf,
        /// Report destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// `key=value` file of recorded scenario fields and check values.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(config: &Path) -> Result<ScenarioParams> {
    let mut s = parse_config(config)?;
    apply_seed_override(&mut s, std::env::var("UDNGC_SEED").ok().as_deref())?;
    Ok(s)
}

fn emit(rows: &[SweepRow], out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    write_rows(&mut w, rows)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    exec::configure_threads(cli.threads);
    let opts = RunOptions::from_threads(cli.threads);
    match cli.command {
        Command::Analytic { config, out } => {
            let s = load(&config)?;
            emit(&run_analytic(&s, &opts)?, out.as_deref())?;
        }
        Command::Simulate { config, out } => {
            let s = load(&config)?;
            emit(&run_simulate(&s, &opts)?, out.as_deref())?;
        }
        Command::Figure { preset, out, set } => {
            let preset: Preset = preset.parse()?;
            let overrides = set
                .iter()
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| Error::Config(format!("--set expects key=value, got `{kv}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut s = figure_scenario(preset, &overrides)?;
            apply_seed_override(&mut s, std::env::var("UDNGC_SEED").ok().as_deref())?;
            emit(&run_figure(preset, &s, &opts)?, out.as_deref())?;
        }
        Command::Validate { config, out, golden } => {
            let s = load(&config)?;
            let golden = match golden {
                Some(p) => {
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                    Some(parse_pairs(&text)?)
                }
                None => None,
            };
            let report = validate(&s, golden.as_ref(), &opts)?;
            let mut w = output(out.as_deref())?;
            report.write_csv(&mut w)?;
            w.flush()?;
            let failures: Vec<_> = report.failures().collect();
            if !failures.is_empty() {
                for c in &failures {
                    eprintln!(
                        "FAIL {}: expected {}, observed {}, tolerance {}",
                        c.name, c.expected, c.observed, c.tolerance
                    );
                }
                eprintln!("{} of {} checks failed", failures.len(), report.checks.len());
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
