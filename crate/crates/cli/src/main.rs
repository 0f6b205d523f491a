//! `orbai`: Monte Carlo experiments for ORBGRAND-AI decoding.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use orbai_core::harness::{self, entropy_rows, write_entropy_csv, write_results};
use orbai_core::{CodeDescriptor, CodeKind, ExperimentConfig, OutputFormat};

#[derive(Debug, Parser)]
#[command(
    name = "orbai",
    version,
    about = "ORBGRAND-AI decoding over Gauss-Markov channels"
)]
struct Cli {
    /// Worker threads for trial execution (results do not depend on this)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a BLER sweep described by a config file
    Simulate(SimulateArgs),
    /// Find the highest code rate meeting a BLER target
    RateSearch(RateSearchArgs),
    /// Tabulate Gauss-Markov differential entropy rates
    Entropy(EntropyArgs),
    /// Print a code descriptor
    GenCode(GenCodeArgs),
}

/// Overrides shared by `simulate` and `rate-search`.
#[derive(Debug, Args)]
struct Overrides {
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    b: Option<Vec<usize>>,
    /// Abandonment threshold in fetched patterns
    #[arg(long)]
    tau: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    base_seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = &self.rho {
            cfg.rho = v.clone();
        }
        if let Some(v) = &self.b {
            cfg.b = v.clone();
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.max_trials {
            cfg.max_trials = v;
        }
        if let Some(v) = self.min_errors {
            cfg.min_errors = v;
        }
        if let Some(v) = self.base_seed {
            cfg.base_seed = v;
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// TOML experiment config
    #[arg(long)]
    config: PathBuf,
    /// Eb/N0 values in dB
    #[arg(long, value_delimiter = ',')]
    ebno: Option<Vec<f64>>,
    #[command(flatten)]
    overrides: Overrides,
    /// Output file; CSV on stdout when neither this nor the config sets one
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
struct RateSearchArgs {
    /// TOML experiment config; flags below fill or override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    target_bler: f64,
    /// Eb/N0 in dB at which the target must be met
    #[arg(long)]
    ebno: f64,
    #[arg(long, default_value = "rlc")]
    kind: CodeKind,
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Code dimensions to scan
    #[arg(long, value_delimiter = ',')]
    k_grid: Option<Vec<usize>>,
    /// RLC seed
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    overrides: Overrides,
    /// JSON output file (stdout otherwise)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EntropyArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    rho: Vec<f64>,
    /// Full-correlation lengths
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Block sizes under block independence
    #[arg(long, value_delimiter = ',')]
    b: Vec<usize>,
    /// Per-real-dimension noise variance
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
}

#[derive(Debug, Args)]
struct GenCodeArgs {
    #[arg(long)]
    kind: CodeKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// CRC polynomial in hex with the leading term, e.g. 0x180f
    #[arg(long)]
    polynomial: Option<String>,
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(v) = args.ebno {
        cfg.ebno_db = v;
    }
    args.overrides.apply(&mut cfg);
    if let Some(out) = args.out {
        cfg.output = Some(out);
    }
    if let Some(f) = args.format {
        cfg.format = Some(f);
    }
    let points = harness::simulate(&cfg)?;
    if cfg.output.is_none() {
        write_results(&points, cfg.output_format(), std::io::stdout().lock())?;
    }
    Ok(())
}

fn rate_search(args: RateSearchArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let k = args
                .k_grid
                .as_ref()
                .and_then(|g| g.iter().copied().max())
                .context("--k-grid is required without --config")?;
            let code = CodeDescriptor {
                kind: args.kind,
                n: args.n,
                k,
                seed: args.seed,
                polynomial: None,
            };
            ExperimentConfig::new(code, 0.0, args.ebno, 4)
        }
    };
    if let Some(grid) = args.k_grid {
        cfg.k_grid = grid;
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    args.overrides.apply(&mut cfg);
    let results = harness::rate_search(&cfg, args.target_bler, args.ebno)?;
    let text = serde_json::to_string_pretty(&results)?;
    match args.out {
        Some(path) => std::fs::write(&path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn entropy(args: EntropyArgs) -> Result<()> {
    if args.n.is_empty() && args.b.is_empty() {
        bail!("give at least one --n or --b");
    }
    // Block independence at size b has the same rate as full correlation over b samples.
    let lengths: Vec<usize> = args.n.iter().chain(&args.b).copied().collect();
    let rows = entropy_rows(&args.rho, &lengths, args.sigma2)?;
    write_entropy_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}

fn gen_code(args: GenCodeArgs) -> Result<()> {
    let descriptor = CodeDescriptor {
        kind: args.kind,
        n: args.n,
        k: args.k,
        seed: args.seed,
        polynomial: args.polynomial,
    };
    let code = descriptor.build()?;
    let mut out = std::io::stdout().lock();
    write!(out, "{}", code.descriptor().to_toml())?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon_pool(n)?;
    }
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::RateSearch(a) => rate_search(a),
        Command::Entropy(a) => entropy(a),
        Command::GenCode(a) => gen_code(a),
    }
}

fn rayon_pool(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring worker threads")
}
