use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsq::harness::{self, parse_config_text, parse_override, Command, ExperimentConfig};
use qsq::oracle::NoiseModel;

#[derive(Parser)]
#[command(name = "qsq", version, about = "Seeded experiments for QSQ learning of unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Goldreich-Levin prediction error against 1/γ on shallow circuits
    Figure1(Common),
    /// Two-phase k-junta learner success rate
    Junta(Common),
    /// Completeness, soundness and query count of Goldreich-Levin
    Gl(Common),
    /// Certified marginal matching for brickwork circuits
    Shallow(Common),
    /// Pauli tomography of Haar-random pure states
    Tomo(Common),
    /// Unitarity and Choi-purity identities on random channels
    Unitarity(Common),
    /// Quadratic-form gap and variance decay
    Separation(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for CSV files and the manifest
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads (all cores by default)
    #[arg(long)]
    jobs: Option<usize>,
    /// exact, gaussian, bounded or adversarial
    #[arg(long)]
    noise: Option<NoiseModel>,
    /// Flat `key = value` file; overrides on the command line win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter overrides
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn build(command: Command, c: &Common) -> qsq::Result<ExperimentConfig> {
    let file = match &c.config {
        Some(p) => parse_config_text(&std::fs::read_to_string(p)?)?,
        None => Default::default(),
    };
    let overrides = c.overrides.iter().map(|s| parse_override(s)).collect::<qsq::Result<Vec<_>>>()?;
    let mut cfg = ExperimentConfig::new(command, c.seed).with_params(file, overrides);
    cfg.jobs = c.jobs;
    if let Some(noise) = c.noise {
        cfg.noise = noise;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match &cli.command {
        Sub::Figure1(c) => (Command::Figure1, c),
        Sub::Junta(c) => (Command::Junta, c),
        Sub::Gl(c) => (Command::Gl, c),
        Sub::Shallow(c) => (Command::Shallow, c),
        Sub::Tomo(c) => (Command::Tomo, c),
        Sub::Unitarity(c) => (Command::Unitarity, c),
        Sub::Separation(c) => (Command::Separation, c),
    };
    let result = build(command, common).and_then(|cfg| {
        let out = harness::run(&cfg)?;
        let files = out.write(&common.out)?;
        Ok((out, files))
    });
    match result {
        Ok((out, files)) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            for a in &out.assertions {
                println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
            }
            if out.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
