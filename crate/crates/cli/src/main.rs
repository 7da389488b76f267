use bosonet_cli::run::{read_config, run, RunOptions};
use bosonet_cli::selftest::selftest;
use bosonet_cli::sweep::{sweep, SweepAxis};
use bosonet_cli::CliError;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bosonet", version, about = "Dissipative bosonic networks: widths, phase-space functions, decoherence times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Evaluate sequentially; results are then bit-for-bit reproducible
    #[arg(long, global = true)]
    serial: bool,
    /// Seed for `selftest`
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the outputs listed in a config
    Run { config: PathBuf },
    /// Cross-product sweep; each axis is path[,path]=start:stop:steps
    Sweep {
        config: PathBuf,
        #[arg(long = "axis")]
        axes: Vec<String>,
    },
    /// Parse and check a config without running it
    Validate { config: PathBuf },
    /// Randomized consistency checks
    Selftest {
        #[arg(long, default_value_t = 32)]
        cases: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let opts = RunOptions { out: cli.out.clone(), serial: cli.serial };
    let result: Result<(), CliError> = match &cli.command {
        Command::Run { config } => read_config(config).and_then(|cfg| run(&cfg, &opts)).map(|s| {
            for f in s.files {
                println!("{}", f.display());
            }
        }),
        Command::Sweep { config, axes } => (|| {
            let cfg = read_config(config)?;
            let axes = axes.iter().map(|a| a.parse()).collect::<Result<Vec<SweepAxis>, _>>()?;
            for f in sweep(&cfg, &axes, &opts)? {
                println!("{}", f.display());
            }
            Ok(())
        })(),
        Command::Validate { config } => read_config(config).and_then(|cfg| cfg.resolve().map(|_| println!("ok"))),
        Command::Selftest { cases } => {
            let checks = selftest(cli.seed, *cases);
            let mut ok = true;
            for c in &checks {
                println!("{:<34} {}  worst {:.2e} (tol {:.0e})", c.name, if c.pass() { "PASS" } else { "FAIL" }, c.worst, c.tolerance);
                ok &= c.pass();
            }
            if !ok {
                return ExitCode::from(1);
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
