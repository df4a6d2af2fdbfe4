// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncvalue::models::build_oscillator;
use ncvalue_cli::{run_suite, ConfigError, Suite, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "ncvalue",
    version,
    about = "Verification suites for noncommutative values of observables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Star product against the operator product
    Homomorphism(SuiteArgs),
    /// Jet reconstruction, tangency and finite differences
    Jets(SuiteArgs),
    /// Schrodinger, Heisenberg and real-coordinate flows
    Dynamics(SuiteArgs),
    /// Commutation relations of the truncated oscillator
    Ccr(SuiteArgs),
    /// Coherent-state expectations against the classical flow
    Ehrenfest(SuiteArgs),
    /// States with equal expectations but different jets
    Degeneracy(SuiteArgs),
    /// Simulated measurements and state reconstruction
    Tomography(SuiteArgs),
    /// Every suite
    All(SuiteArgs),
    /// Print what a suite checks
    Describe { name: String },
    /// Write X, P, H and a of the truncated oscillator as operator files
    BuildOscillator {
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SuiteArgs {
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated dimensions
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports and traces
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SuiteArgs {
    fn config(&self) -> Result<SuiteConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => SuiteConfig::from_file(path)?,
            None => SuiteConfig::default(),
        };
        if let Some(d) = &self.dims {
            cfg.dims = d.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn run(suite: Suite, args: &SuiteArgs) -> ExitCode {
    let cfg = match args.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cfg.output_dir) {
        eprintln!("error: cannot create {}: {e}", cfg.output_dir.display());
        return ExitCode::from(EXIT_USAGE);
    }
    let mut all_pass = true;
    for out in run_suite(suite, &cfg) {
        let r = &out.report;
        let written = r.write(&cfg.output_dir).and_then(|_| {
            out.traces
                .iter()
                .try_for_each(|(name, text)| std::fs::write(cfg.output_dir.join(name), text))
        });
        if let Err(e) = written {
            eprintln!("error: cannot write to {}: {e}", cfg.output_dir.display());
            return ExitCode::from(EXIT_USAGE);
        }
        println!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.suite);
        for f in &r.failures {
            println!("  {}: {} {}", f.case, f.message, f.inputs);
        }
        all_pass &= r.pass;
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn build(n: usize, hbar: f64, mass: f64, omega: f64, out: &PathBuf) -> ExitCode {
    let sys = match build_oscillator(n, hbar, mass, omega) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let files = [
        ("X", sys.x()),
        ("P", sys.p()),
        ("H", sys.h()),
        ("a", sys.a()),
    ];
    let result = std::fs::create_dir_all(out)
        .map_err(ncvalue::Error::from)
        .and_then(|_| {
            files
                .iter()
                .try_for_each(|(name, op)| ncvalue::save(out.join(format!("{name}.json")), *op))
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Homomorphism(a) => run(Suite::Homomorphism, a),
        Command::Jets(a) => run(Suite::Jets, a),
        Command::Dynamics(a) => run(Suite::Dynamics, a),
        Command::Ccr(a) => run(Suite::Ccr, a),
        Command::Ehrenfest(a) => run(Suite::Ehrenfest, a),
        Command::Degeneracy(a) => run(Suite::Degeneracy, a),
        Command::Tomography(a) => run(Suite::Tomography, a),
        Command::All(a) => run(Suite::All, a),
        Command::Describe { name } => match name.parse::<Suite>() {
            Ok(s) => {
                println!("{}: {}", s.name(), s.describe());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_USAGE)
            }
        },
        Command::BuildOscillator {
            n,
            hbar,
            mass,
            omega,
            out,
        } => build(*n, *hbar, *mass, *omega, out),
    }
}
