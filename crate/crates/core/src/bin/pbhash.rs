use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pbhash::bench::{
    cmd_analyze, cmd_build, cmd_query_bench, render_analysis, render_build, render_query, BenchConfig, BenchError,
    OutputFormat,
};
use pbhash::keys::KeyCorpus;
use pbhash::{gen_keys, AssignmentKind, SeedEncoding};

#[derive(Parser)]
#[command(name = "pbhash", version, about = "Build and benchmark minimal perfect hash functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build over a random string corpus and report space and construction time.
    Build {
        #[command(flatten)]
        common: Common,
        /// Write the function to this file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Time one pass of queries in random order.
    QueryBench {
        #[command(flatten)]
        common: Common,
        /// Read the function from this file instead of building it.
        #[arg(long)]
        load: Option<PathBuf>,
        /// Key file, one key per line (default: the corpus from --n and --seed).
        #[arg(long)]
        keys: Option<PathBuf>,
    },
    /// Search work per assignment function and λ, as CSV by default.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Assignment functions to compare.
        #[arg(long, value_delimiter = ',', default_value = "uniform,skew,beta-eps")]
        assignments: Vec<AssignmentKind>,
        /// λ values to sweep (default: --lambda).
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<f64>,
    },
    /// Print the random string corpus, one key per line.
    GenKeys {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 8.0)]
    lambda: f64,
    #[arg(long = "partition-size", default_value_t = 2500.0)]
    partition_size: f64,
    /// ic-r, ic-c, mixed:<t>, mono-r or mono-c.
    #[arg(long, default_value = "ic-r")]
    encoder: SeedEncoding,
    /// uniform, skew or beta-eps.
    #[arg(long, default_value = "beta-eps")]
    assignment: AssignmentKind,
    /// ε for beta-eps (default λ/(5√P)).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// human, csv or json.
    #[arg(long)]
    output: Option<OutputFormat>,
}

impl Common {
    fn config(&self, default_output: OutputFormat) -> BenchConfig {
        BenchConfig {
            n: self.n,
            lambda: self.lambda,
            partition_size: self.partition_size,
            encoder: self.encoder,
            assignment: self.assignment,
            epsilon: self.epsilon,
            threads: self.threads,
            seed: self.seed,
            output: self.output.unwrap_or(default_output),
        }
    }
}

fn run(cli: Cli) -> Result<String, BenchError> {
    match cli.command {
        Command::Build { common, save } => {
            let cfg = common.config(OutputFormat::Human);
            let (report, _) = cmd_build(&cfg, save.as_deref())?;
            Ok(render_build(&report, cfg.output))
        }
        Command::QueryBench { common, load, keys } => {
            let cfg = common.config(OutputFormat::Human);
            let corpus = match keys {
                Some(path) => {
                    let file = std::fs::File::open(&path)
                        .map_err(|e| BenchError::Io(format!("cannot open {}: {e}", path.display())))?;
                    Some(KeyCorpus::read_lines(std::io::BufReader::new(file)).map_err(|e| BenchError::Io(e.to_string()))?)
                }
                None => None,
            };
            let report = cmd_query_bench(&cfg, load.as_deref(), corpus)?;
            Ok(render_query(&report, cfg.output))
        }
        Command::Analyze { common, assignments, lambdas } => {
            let cfg = common.config(OutputFormat::Csv);
            let lambdas = if lambdas.is_empty() { vec![cfg.lambda] } else { lambdas };
            let reports = cmd_analyze(&cfg, &assignments, &lambdas)?;
            Ok(render_analysis(&reports, cfg.output))
        }
        Command::GenKeys { n, seed } => {
            if n == 0 {
                return Err(BenchError::Validation("n must be at least 1".into()));
            }
            let mut out = Vec::new();
            gen_keys(n, seed).write_lines(&mut out).map_err(|e| BenchError::Io(e.to_string()))?;
            Ok(String::from_utf8(out).expect("printable keys"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
