use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sosgraph::graph::BuildOptions;
use sosgraph::RootSystemKind;
use sosgraph_cli::cache::{Cache, CACHE_ENV};
use sosgraph_cli::commands::{self, Outcome, Settings, Which, DEFAULT_MAX_PAIRS};
use sosgraph_cli::table::Format;

/// Build and survey the graphs Γ(R, k) of strongly orthogonal subset sums.
#[derive(Parser)]
#[command(name = "sosgraph", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for cached vertex sets and graphs.
    #[arg(long, global = true, env = CACHE_ENV, default_value = ".sosgraph-cache")]
    cache_dir: PathBuf,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Memory budget for materializing adjacency, in GiB.
    #[arg(long, global = true)]
    max_memory_gb: Option<f64>,

    /// Skip graphs with more vertex pairs than this.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_PAIRS)]
    max_pairs: u64,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build Γ(R, k) and store it in the cache.
    Build {
        #[arg(long)]
        system: RootSystemKind,
        #[arg(long)]
        k: usize,
        /// Also write the graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Vertex and edge counts, degrees and components.
    Stats {
        #[arg(long)]
        system: RootSystemKind,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Clique number and maximum-clique census by orbit.
    Cliques {
        #[arg(long)]
        system: RootSystemKind,
        #[arg(long)]
        k: Option<usize>,
        /// Cross-check against full enumeration (small graphs only).
        #[arg(long)]
        brute_force: bool,
    },
    /// Maximum cliques that are sunflowers.
    Sunflowers {
        #[arg(long)]
        system: RootSystemKind,
        #[arg(long)]
        k: Option<usize>,
        /// JSON file with a rational basis-change matrix.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Run the structural checks and print a JSON report.
    Verify {
        #[arg(long)]
        system: Option<RootSystemKind>,
    },
    /// Print a summary table over all exceptional systems.
    Table {
        #[arg(value_enum)]
        which: Which,
        #[arg(long)]
        system: Option<RootSystemKind>,
        #[arg(long)]
        k: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let settings = Settings {
        cache: Cache::open(&cli.cache_dir)?,
        format: cli.format,
        max_pairs: cli.max_pairs,
        build: BuildOptions {
            max_memory_bytes: cli.max_memory_gb.map(|g| (g * (1u64 << 30) as f64) as u64),
            ..BuildOptions::default()
        },
    };
    match cli.command {
        Command::Build { system, k, dot } => commands::build(&settings, system, k, dot.as_deref()),
        Command::Stats { system, k } => commands::stats(&settings, system, k),
        Command::Cliques { system, k, brute_force } => commands::cliques(&settings, system, k, brute_force),
        Command::Sunflowers { system, k, basis } => commands::sunflowers(&settings, system, k, basis.as_deref()),
        Command::Verify { system } => commands::verify(&settings, system),
        Command::Table { which, system, k } => commands::table(&settings, which, system, k),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    match run(cli) {
        Ok(outcome) => {
            let written = match &output {
                Some(path) => std::fs::write(path, &outcome.text).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{}", outcome.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
