use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loopstar_cli::config::{Overrides, RunConfig};
use loopstar_cli::suites::Params;

#[derive(Parser)]
#[command(name = "loopstar", version, about = "Verification driver for truncated star products on the disk and loop-group extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Radial Gauss–Legendre nodes.
    #[arg(long, global = true)]
    nr: Option<usize>,
    /// Angular trapezoid nodes.
    #[arg(long, global = true)]
    ntheta: Option<usize>,
    /// Nodes in the homotopy parameter.
    #[arg(long, global = true)]
    nt: Option<usize>,
    /// Truncation order K of ν-series.
    #[arg(long, global = true)]
    order_k: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Star product, trace and boundary checks.
    DiskVerify,
    /// WZW and determinant winding numbers.
    Winding {
        /// How often the generator loop is traversed.
        #[arg(long, value_delimiter = ',', default_value = "1,2", allow_negative_numbers = true)]
        repeats: Vec<i32>,
    },
    /// Lie and group cocycles and determinant structure.
    Cocycle {
        #[arg(long, default_value_t = 3)]
        max_mode: i32,
        /// Scales for the group-cocycle extrapolation.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3")]
        eps: Vec<f64>,
    },
    /// Fuzzy-sphere relations and the matrix-valued loop cocycle.
    Fuzzy {
        #[arg(long, default_value_t = 20)]
        max_twice_j: u32,
        /// Spin of the fuzzy sphere used for the cocycle comparison.
        #[arg(long, default_value_t = 1.0)]
        j: f64,
    },
    /// Current-algebra deformation on the three-torus.
    Deform {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        cutoffs: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        defect_cutoffs: Vec<usize>,
    },
    /// Every suite.
    All,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::DiskVerify => "disk-verify",
            Command::Winding { .. } => "winding",
            Command::Cocycle { .. } => "cocycle",
            Command::Fuzzy { .. } => "fuzzy",
            Command::Deform { .. } => "deform",
            Command::All => "all",
        }
    }

    fn params(&self) -> Params {
        let mut p = Params::default();
        match self {
            Command::Winding { repeats } => p.repeats = repeats.clone(),
            Command::Cocycle { max_mode, eps } => {
                p.max_mode = *max_mode;
                p.eps = eps.clone();
            }
            Command::Fuzzy { max_twice_j, j } => {
                p.max_twice_j = *max_twice_j;
                p.fuzzy_spin = *j;
            }
            Command::Deform { cutoffs, defect_cutoffs } => {
                p.cutoffs = cutoffs.clone();
                p.defect_cutoffs = defect_cutoffs.clone();
            }
            Command::DiskVerify | Command::All => {}
        }
        p
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = &cli.global;
    let overrides = Overrides { jobs: g.jobs, out: g.out.clone(), nr: g.nr, ntheta: g.ntheta, nt: g.nt, order_k: g.order_k, seed: g.seed };
    let config = match RunConfig::resolve(g.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match loopstar_cli::run(cli.command.name(), &config, &cli.command.params()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = report.to_json();
    if let Some(path) = &config.out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if g.json {
        print!("{json}");
    } else {
        print!("{}", report.summary());
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
