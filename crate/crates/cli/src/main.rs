//! `hasse`: command-line front end for hasse-core.
//!
//! Exit codes: 0 success or affirmative answer, 1 definitive negative answer,
//! 2 usage or runtime error, 3 undecided at the requested precision.

mod commands;
mod config;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "hasse", version, about = "Local-global solubility and Brauer-Manin tools over Q")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// TOML file with defaults (prime_bound, level, sample_count, seed, work_budget, partitions).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hasse invariants of the quaternion algebra (a, b).
    Hilbert {
        #[arg(allow_negative_numbers = true)]
        a: String,
        #[arg(allow_negative_numbers = true)]
        b: String,
        /// Only this place (a prime, or `inf`).
        #[arg(long)]
        place: Option<String>,
    },
    /// Local solubility of a_1 x_1^d + ... + a_m x_m^d = 0.
    Solve(SolveArgs),
    /// Brauer-Manin obstruction on 2y^2 = x^4 - 17z^4.
    LrVerify {
        #[arg(long)]
        prime_bound: Option<u64>,
        #[arg(long)]
        level: Option<u32>,
    },
    /// Residues of the symbol (a, f) over Q(t), f given as e.g. "(t-1)/(t+1)".
    Residue {
        #[arg(allow_negative_numbers = true)]
        a: String,
        f: String,
        /// A single divisor: an irreducible polynomial in t, or `inf`.
        #[arg(long, conflicts_with = "reduction")]
        divisor: Option<String>,
        /// Residue of (a, f) along the fibre over a = p (a must be an odd prime).
        #[arg(long)]
        reduction: bool,
    },
    /// Count everywhere locally soluble fibres of a family up to each height bound.
    Census {
        /// conic, cubic4, cubic3 or diag:D:M.
        family: String,
        /// Comma-separated height bounds.
        #[arg(long = "B", value_name = "B1,B2,...")]
        bounds: String,
        #[arg(long)]
        partitions: Option<u64>,
        /// Write one JSON record per bound to this file.
        #[arg(long, value_name = "FILE")]
        jsonl: Option<PathBuf>,
        /// Write `B,ratio` rows to this file.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// The split-fibre invariants delta_D and their defect sum.
    Delta { family: String },
    /// Local densities c_v, or their truncated product.
    Density(DensityArgs),
    /// Schanuel's constant for P^n(Q), optionally against a point count.
    Schanuel {
        n: usize,
        #[arg(long = "B")]
        bound: Option<u64>,
    },
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("scope").required(true).args(["place", "everywhere"])))]
struct SolveArgs {
    degree: u32,
    #[arg(required = true, allow_negative_numbers = true, num_args = 1..)]
    coefficients: Vec<i64>,
    #[arg(long)]
    place: Option<String>,
    #[arg(long)]
    everywhere: bool,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("scope").required(true).args(["place", "product"])))]
struct DensityArgs {
    family: String,
    #[arg(long)]
    place: Option<String>,
    #[arg(long)]
    product: bool,
    /// `exhaustive` or `sample`.
    #[arg(long, default_value = "exhaustive")]
    method: String,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    prime_bound: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = commands::Output { json: cli.json };
    let result = match cli.command {
        Command::Hilbert { a, b, place } => commands::hilbert(&out, &a, &b, place.as_deref()),
        Command::Solve(s) => commands::solve(&out, s.degree, s.coefficients, s.place.as_deref()),
        Command::LrVerify { prime_bound, level } => {
            commands::lr_verify(&out, prime_bound.unwrap_or(cfg.prime_bound), level.unwrap_or(cfg.level))
        }
        Command::Residue { a, f, divisor, reduction } => {
            commands::residue(&out, &a, &f, divisor.as_deref(), reduction)
        }
        Command::Census { family, bounds, partitions, jsonl, csv } => commands::census(
            &out,
            &family,
            &bounds,
            partitions.unwrap_or(cfg.partitions),
            jsonl.as_deref(),
            csv.as_deref(),
        ),
        Command::Delta { family } => commands::delta(&out, &family),
        Command::Density(d) => {
            let opts = commands::DensityOpts {
                method: d.method,
                level: d.level.unwrap_or(cfg.level),
                level_given: d.level.is_some(),
                count: d.count.unwrap_or(cfg.sample_count),
                seed: d.seed.unwrap_or(cfg.seed),
                budget: cfg.work_budget,
            };
            match d.place {
                Some(v) => commands::density_place(&out, &d.family, &v, &opts),
                None => commands::density_product(&out, &d.family, d.prime_bound.unwrap_or(cfg.prime_bound), &opts),
            }
        }
        Command::Schanuel { n, bound } => commands::schanuel(&out, n, bound),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
