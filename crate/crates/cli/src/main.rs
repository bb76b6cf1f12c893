use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qclock_core::experiments::{preset, read_config, run, write_csv, RowStatus, RunOptions};
use qclock_core::{Error, ExperimentConfig, SpinSign};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ALL_ROWS_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "qclock", version, about = "Larmor and rotating-field clock sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write a CSV (plus a .meta.json sidecar).
    Run(RunArgs),
    /// Print a built-in config as JSON.
    Preset {
        #[arg(value_parser = ["fig1", "fig2", "fig3", "fig5"])]
        name: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpinArg {
    Up,
    Down,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Built-in experiment (fig1, fig2, fig3, fig5).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV; defaults to the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the row pool.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Grid points per shortest wavelength (overrides the config).
    #[arg(long)]
    ppw: Option<f64>,
    /// Write wavefunction snapshots for every row into this directory.
    #[arg(long)]
    dump_snapshots: Option<PathBuf>,
    /// Add closed-form reference columns.
    #[arg(long)]
    overlay_oracle: bool,
    /// Override the initial spin sign.
    #[arg(long, value_enum)]
    spin_sign: Option<SpinArg>,
    /// Override the fixed omega0/E0 ratio (ignored if it is the sweep axis).
    #[arg(long)]
    omega0_over_e0: Option<f64>,
    /// Replace the sweep values (comma separated).
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut config = match (&args.preset, &args.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => read_config(path)?,
        (None, None) => return Err(Error::Config("need --preset or --config".into())),
    };
    if let Some(s) = args.spin_sign {
        config.physics.spin_sign = match s {
            SpinArg::Up => SpinSign::Up,
            SpinArg::Down => SpinSign::Down,
        };
    }
    if let Some(r) = args.omega0_over_e0 {
        config.physics.omega0_over_e0 = r;
    }
    if let Some(v) = &args.values {
        config.sweep.values = v.clone();
    }
    config.validate()?;
    Ok(config)
}

fn run_command(args: RunArgs) -> ExitCode {
    let config = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let Some(out) = args.out.clone().or_else(|| config.output.clone()) else {
        eprintln!("error: no output path (use --out or set `output` in the config)");
        return ExitCode::from(EXIT_CONFIG);
    };
    let opts = RunOptions {
        threads: args.threads.map(|n| n as usize),
        ppw: args.ppw,
        dump_snapshots: args.dump_snapshots.clone(),
        overlay_oracle: args.overlay_oracle,
    };
    let result = match run(&config, &opts) {
        Ok(r) => r,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    for (row, meta) in result.rows.iter().zip(&result.metadata.rows) {
        if row.status != RowStatus::Ok {
            eprintln!(
                "row {} ({} = {}): {}",
                row.index,
                config.sweep.parameter.as_str(),
                row.sweep_value,
                meta.message.as_deref().unwrap_or("failed")
            );
        }
    }
    if let Err(e) = write_csv(&result, &out) {
        eprintln!("error: writing {}: {e}", out.display());
        return ExitCode::from(EXIT_FAILURE);
    }
    if result.all_failed() {
        eprintln!("error: every row failed");
        return ExitCode::from(EXIT_ALL_ROWS_FAILED);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run_command(args),
        Command::Preset { name } => match preset(&name) {
            Ok(c) => {
                println!("{}", c.to_json_pretty());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
