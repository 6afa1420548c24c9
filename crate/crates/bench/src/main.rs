use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pdadapt_bench::{
    compare_runs, read_trace_file, run_experiment, write_trace_file, Algorithm, Measure, ProblemKind, RunConfig,
    StopReason, Strategy,
};

#[derive(Parser)]
#[command(name = "pdbench", version, about = "Run and compare adaptive primal-dual solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration; prints a key=value summary.
    Run(RunArgs),
    /// Run one configuration for several seeds.
    Batch {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated seeds. `{seed}` in --trace is replaced per run.
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
    },
    /// Iterations and time each trace needs to reach each decade of the gap.
    Compare {
        #[arg(required = true, num_args = 2..)]
        traces: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML file with [problem] and [run] sections; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    tau0: Option<f64>,
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long)]
    s0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// gap, distance or residual.
    #[arg(long)]
    measure: Option<String>,
    /// CSV trace output.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    trace_every: Option<usize>,
    /// LIBSVM data file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// PGM image for the TV problems.
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Toy problem dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Side of the synthetic image.
    #[arg(long)]
    size: Option<usize>,
    /// Write zeros in the time column so reruns are byte-identical.
    #[arg(long)]
    no_time: bool,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.merge_file(path)?;
        }
        if let Some(p) = &self.problem {
            c.problem.kind = p.parse::<ProblemKind>()?;
        }
        if let Some(a) = &self.algo {
            c.algorithm = a.parse::<Algorithm>()?;
        }
        if let Some(s) = &self.strategy {
            c.strategy = s.parse::<Strategy>()?;
        }
        if let Some(m) = &self.measure {
            c.measure = m.parse::<Measure>()?;
        }
        c.tau0 = self.tau0.or(c.tau0);
        c.sigma0 = self.sigma0.or(c.sigma0);
        c.s0 = self.s0.or(c.s0);
        c.seed = self.seed.unwrap_or(c.seed);
        c.max_iters = self.max_iters.unwrap_or(c.max_iters);
        c.time_budget = self.time_budget.or(c.time_budget);
        c.tol = self.tol.unwrap_or(c.tol);
        c.trace = self.trace.clone().or(c.trace);
        c.trace_every = self.trace_every.unwrap_or(c.trace_every);
        c.problem.data = self.data.clone().or(c.problem.data);
        c.problem.image = self.image.clone().or(c.problem.image);
        c.problem.lambda = self.lambda.or(c.problem.lambda);
        c.problem.n = self.n.unwrap_or(c.problem.n);
        c.problem.size = self.size.unwrap_or(c.problem.size);
        if self.no_time {
            c.record_time = false;
        }
        c.validate()?;
        Ok(c)
    }
}

fn run_one(config: &RunConfig) -> Result<StopReason> {
    let out = run_experiment(config)?;
    if let Some(path) = &config.trace {
        write_trace_file(path, &out.rows)?;
    }
    println!("{}", out.summary);
    if let Some(path) = &config.trace {
        println!("trace={}", path.display());
    }
    Ok(out.summary.stop_reason)
}

fn median(mut v: Vec<usize>) -> f64 {
    v.sort_unstable();
    let k = v.len();
    if k % 2 == 1 { v[k / 2] as f64 } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) as f64 }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(args) => Ok(run_one(&args.config()?)?.exit_code()),
        Command::Batch { run, seeds } => {
            let base = run.config()?;
            let mut iterations = Vec::new();
            let mut code = 0;
            for seed in seeds {
                let mut c = base.clone();
                c.seed = seed;
                c.trace = base.trace.as_ref().map(|p| PathBuf::from(p.to_string_lossy().replace("{seed}", &seed.to_string())));
                let out = run_experiment(&c)?;
                if let Some(path) = &c.trace {
                    write_trace_file(path, &out.rows)?;
                }
                println!(
                    "seed={seed} stop_reason={} iterations={} final_gap={:e}",
                    out.summary.stop_reason.as_str(),
                    out.summary.iterations,
                    out.summary.final_gap
                );
                code = code.max(out.summary.stop_reason.exit_code());
                iterations.push(out.summary.iterations);
            }
            println!("median_iterations={}", median(iterations));
            Ok(code)
        }
        Command::Compare { traces, format } => {
            let mut loaded = Vec::new();
            let mut seen = HashSet::new();
            for (k, path) in traces.iter().enumerate() {
                let mut label = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
                if !seen.insert(label.clone()) {
                    label = format!("{label}#{}", k + 1);
                }
                loaded.push((label, read_trace_file(path)?));
            }
            let table = compare_runs(&loaded)?;
            match format {
                Format::Text => print!("{}", table.to_text()),
                Format::Csv => print!("{}", table.to_csv()),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
