use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sbox_ga::harness::{cmd_evaluate, cmd_generate, cmd_sweep, SweepGrid};
use sbox_ga::{CostParams, RngSeed, SearchParams};

#[derive(Parser)]
#[command(version, about = "Generate and analyse bijective S-boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SearchArgs {
    /// Input/output bit width
    #[arg(long, default_value_t = 8)]
    n: u32,
    /// Iteration cap
    #[arg(long, default_value_t = 150_000)]
    kiter: u64,
    /// Stop once an S-box reaches this nonlinearity
    #[arg(long, default_value_t = 104)]
    target_nl: u32,
    /// Cost exponent R
    #[arg(long, default_value_t = 12)]
    cost_exponent: u32,
    /// Cost offset X
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    cost_offset: f64,
    /// Worker threads
    #[arg(long, default_value_t = 8)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Search for one S-box and write it to a file
    Generate {
        #[command(flatten)]
        search: SearchArgs,
        /// Elite population size
        #[arg(long, default_value_t = 1)]
        kpop: usize,
        /// Children per elite per iteration
        #[arg(long, default_value_t = 7)]
        kmut: usize,
        /// Random seed (drawn from the OS when omitted)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the cryptographic properties of an S-box file
    Evaluate { input: PathBuf },
    /// Run many searches over a (k_pop, k_mut) grid
    Sweep {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,3,5,7,9,11,13,15,17,19,21")]
        grid_kpop: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,4,7,10,13,16,19,22,25,28,31")]
        grid_kmut: Vec<usize>,
        /// Independent runs per grid cell
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Base seed of the per-run seeds
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Aggregate table
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        /// Per-run log (defaults to <out>.runs.csv)
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

impl SearchArgs {
    fn params(&self, k_pop: usize, k_mut: usize, seed: u64) -> SearchParams {
        SearchParams {
            n: self.n,
            k_pop,
            k_iter: self.kiter,
            k_mut,
            target_nl: self.target_nl,
            cost: CostParams {
                offset: self.cost_offset,
                exponent: self.cost_exponent,
            },
            seed: RngSeed(seed),
            lanes: self.threads.max(1),
            record_trace: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::Generate {
            search,
            kpop,
            kmut,
            seed,
            out,
        } => {
            let seed = seed.unwrap_or_else(rand::random);
            cmd_generate(&search.params(kpop, kmut, seed), &out, &mut stdout)
        }
        Command::Evaluate { input } => cmd_evaluate(&input, &mut stdout),
        Command::Sweep {
            search,
            grid_kpop,
            grid_kmut,
            runs,
            seed,
            out,
            log,
        } => {
            let grid = SweepGrid {
                k_pop_values: grid_kpop,
                k_mut_values: grid_kmut,
                runs_per_cell: runs,
                base_seed: RngSeed(seed),
            };
            let log = log.unwrap_or_else(|| {
                let mut name = out.clone().into_os_string();
                name.push(".runs.csv");
                PathBuf::from(name)
            });
            let defaults = search.params(1, 1, seed);
            cmd_sweep(&grid, &defaults, search.threads, &out, &log, &mut stdout)
        }
    };
    match result {
        Ok(exit) => ExitCode::from(exit.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit().code() as u8)
        }
    }
}
