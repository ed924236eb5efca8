mod commands;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Body, Failure};

#[derive(Parser, Debug)]
#[command(name = "groupdens", version, about = "Exact invariant densities on groups")]
pub struct Cli {
    /// Worker threads for parallel scans (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Build and validate finite groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Convolution and translate suprema of finitely supported measures.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// The five densities on finite groups.
    #[command(subcommand)]
    Density(DensityCmd),
    /// Matrix games, intersection numbers and extremal densities.
    #[command(subcommand)]
    Game(GameCmd),
    /// Eventually periodic subsets of the integers.
    #[command(subcommand)]
    Zline(ZlineCmd),
    /// Free group certificates.
    #[command(subcommand)]
    Words(WordsCmd),
    /// Finitely supported permutations of the positive integers.
    #[command(subcommand)]
    Perms(PermsCmd),
    /// Covering, packing and partition checks.
    #[command(subcommand)]
    Partitions(PartitionsCmd),
    /// Run an experiment suite from a JSON config.
    Suite { config: PathBuf },
    /// Run the full invariant battery.
    VerifyAll {
        #[arg(long, default_value_t = 6)]
        max_order: usize,
        /// Seed for sampled checks (default 0, or the suite seed).
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GroupArg {
    /// `cyclic:6`, `dihedral:4`, `s3`, `q8`, `cyclic:2*cyclic:4`, …
    #[arg(long)]
    pub group: String,
}

#[derive(Args, Debug, Clone)]
pub struct GroupSetArgs {
    #[command(flatten)]
    pub group: GroupArg,
    /// Comma-separated element indices.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub set: String,
}

#[derive(Subcommand, Debug, Clone)]
pub enum GroupCmd {
    /// Print the group as `{order, table, label}`.
    Show(GroupArg),
    /// Validate a group JSON file.
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
    /// The subgroup generated by a set, with its index and normality.
    Subgroup(GroupSetArgs),
}

#[derive(Subcommand, Debug, Clone)]
pub enum MeasureCmd {
    /// `μ ∗ ν`; measures are inline JSON or `@file`.
    Convolve {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
    },
    /// `sup μ(xAy)` over the selected translates.
    Sup {
        #[command(flatten)]
        target: GroupSetArgs,
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "two-sided")]
        pattern: String,
    },
    /// The uniform measure on the group.
    Haar(GroupArg),
}

#[derive(Subcommand, Debug, Clone)]
pub enum DensityCmd {
    /// Closed form `|A|/|G|`.
    Exact {
        #[command(flatten)]
        target: GroupSetArgs,
        #[arg(long, default_value = "sigma")]
        kind: String,
    },
    /// Minimum over uniform witnesses, with the least optimal witness.
    Bruteforce {
        #[command(flatten)]
        target: GroupSetArgs,
        #[arg(long, default_value = "sigma")]
        kind: String,
        /// Largest witness size tried (default `|G|`).
        #[arg(long)]
        max_witness: Option<usize>,
    },
    /// A verified upper certificate from an explicit witness set.
    Certificate {
        #[command(flatten)]
        target: GroupSetArgs,
        #[arg(long, default_value = "sigma")]
        kind: String,
        #[arg(long)]
        witness: String,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum GameCmd {
    /// Solve `{rows, cols, payoff}`, given inline or as `@file`.
    Solve {
        #[arg(long)]
        game: String,
    },
    /// `σ_R(A)` through both sides of the minimax identity.
    SigmaR(GroupSetArgs),
    /// Evaluate an extremal density pattern such as `is12` or `Ssi231`.
    Extremal {
        #[command(flatten)]
        target: GroupSetArgs,
        #[arg(long)]
        pattern: String,
    },
    /// Duality certificates for every σ_R game on groups up to an order.
    Duality {
        #[arg(long, default_value_t = 8)]
        max_order: usize,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum ZlineCmd {
    /// Upper Banach density.
    Dstar {
        /// `m:r,r;add=…;remove=…` or ZSet JSON.
        #[arg(long, allow_hyphen_values = true)]
        set: String,
    },
    /// `Δ_ε(A)`, or the null-ideal difference set without `--eps`.
    Delta {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long)]
        eps: Option<String>,
    },
    /// `A + B`.
    Sumset {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Smallest `F` with `F + A + B` thick.
    Jin {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 64)]
        len: u64,
    },
    /// Thick, large and small, with witnesses.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long, default_value_t = 64)]
        len: u64,
    },
    /// Primorial bound table for the primes.
    Primes {
        #[arg(long)]
        kmax: usize,
        /// Last window start (default `max(10⁵, n_kmax)`).
        #[arg(long)]
        horizon: Option<u64>,
        /// Emit JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// `x₁ < ⋯ < x_k` with every finite sum in `A`.
    Ip {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        bound: i64,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum WordsCmd {
    /// Upper certificates for both partition classes at `1/n`.
    FgroupCert {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 8)]
        check_len: usize,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum PermsCmd {
    /// `f` with every `f·s·f⁻¹` supported in the target domain.
    ConjugateWitness {
        /// Permutation in cycle notation, e.g. `(1 2 3)(4 5)`; repeatable.
        #[arg(long = "perm", required = true)]
        perms: Vec<String>,
        /// `tail:N` or `residue:M:R`.
        #[arg(long)]
        target: String,
        /// Points removed from the target, comma-separated.
        #[arg(long, default_value = "")]
        exclude: String,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum PartitionsCmd {
    /// Check the partition bound on every partition into at most `n` cells.
    Verify {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        cells: usize,
        /// `13.7` (bound n) or `13.9` (general bound).
        #[arg(long, default_value = "13.7")]
        theorem: String,
    },
    /// Odd order versus the 2-partition difference-set property.
    Odd(GroupArg),
    /// Search for a partition whose cells all have `cov(AA⁻¹) > n`.
    Protasov {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        cells: usize,
    },
    /// Covering number of a set.
    Cov(GroupSetArgs),
    /// Packing index of a set.
    Pack(GroupSetArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Suite { config } => suite::run(config),
        cmd => commands::execute(cmd, 0).map(|out| {
            print_body(&out.body);
            out.pass
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message());
            if let Failure::Invariant { violation, .. } = &f {
                emit(&(commands::pretty(violation) + "\n"));
            }
            ExitCode::from(f.code())
        }
    }
}

fn print_body(body: &Body) {
    match body {
        Body::Json(v) => emit(&(commands::pretty(v) + "\n")),
        Body::Csv(s) => emit(s),
    }
}

/// Writes to stdout, ignoring a closed pipe.
pub fn emit(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}
