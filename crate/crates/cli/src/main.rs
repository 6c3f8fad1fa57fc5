use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abcd::ingest::{generate_planted, write_canonical, PlantedParams, SourceFormat};
use abcd::purge::{Criterion, Profile, TopK};
use abcd_cli::bench::{run_bench, BenchOptions, Manifest};
use abcd_cli::commands::{cmd_oracle, cmd_run, cmd_stats, cmd_verify, RunOptions};
use abcd_cli::report::{read_reports, write_reports};
use abcd_cli::CliError;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "abcd", version, about = "Largest balanced connected sub-graph of a signed network")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    path: PathBuf,
    #[arg(long, default_value = "konect")]
    format: SourceFormat,
}

#[derive(Args)]
struct Tuning {
    #[arg(long, default_value = "harary")]
    criterion: Criterion,
    /// Spanning trees to sample (defaults to the profile's value).
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long, default_value = "auto")]
    top_k: TopK,
    #[arg(long, env = "ABCD_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "paper")]
    profile: Profile,
    /// Leave wall-clock timings out of the report.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Raw and LCC statistics.
    Stats {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the pipeline and write a report line.
    Run {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive maximum balanced sub-graph (tiny graphs only).
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        connected: bool,
    },
    /// Check every report in a report file against a graph.
    Verify {
        #[command(flatten)]
        input: Input,
        report: PathBuf,
    },
    /// Run every cell of a benchmark manifest.
    Bench {
        manifest: PathBuf,
        #[arg(long, default_value = "paper")]
        profile: Profile,
        #[arg(long)]
        repeats: Option<usize>,
        /// Run cells concurrently; timings become incomparable.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a planted-core graph in canonical format.
    Generate {
        #[arg(long)]
        n_core: usize,
        #[arg(long, default_value_t = 0)]
        n_noise: usize,
        #[arg(long)]
        p_core: f64,
        #[arg(long, default_value_t = 0.0)]
        p_noise: f64,
        #[arg(long, default_value_t = 0.5)]
        neg_noise: f64,
        #[arg(long, env = "ABCD_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Data(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn json_line<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = sink(out)?;
    writeln!(w, "{}", serde_json::to_string(value).expect("record serializes"))?;
    Ok(w.flush()?)
}

fn execute(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Stats { input, out } => {
            let record = cmd_stats(&input.path, input.format)?;
            eprintln!("{}", record.summary());
            json_line(&record, out.as_deref())?;
        }
        Command::Run { input, tuning, out } => {
            let opts = RunOptions {
                criterion: tuning.criterion,
                iterations: tuning.iterations,
                top_k: tuning.top_k,
                seed: tuning.seed,
                profile: tuning.profile,
                timing: !tuning.no_timing,
            };
            let report = cmd_run(&input.path, input.format, &opts)?;
            eprintln!("{}", report.summary());
            write_reports([&report], sink(out.as_deref())?)?;
        }
        Command::Oracle { input, connected } => {
            let record = cmd_oracle(&input.path, input.format, connected)?;
            println!("{}", record.size);
            println!("{}", record.labels.join(" "));
        }
        Command::Verify { input, report } => {
            let file =
                File::open(&report).map_err(|e| CliError::Data(format!("cannot read {}: {e}", report.display())))?;
            let reports = read_reports(BufReader::new(file))?;
            let n = cmd_verify(&input.path, input.format, &reports)?;
            println!("pass: {n} report(s) verified");
        }
        Command::Bench { manifest, profile, repeats, parallel, no_timing, out } => {
            let manifest = Manifest::load(&manifest)?;
            let outcome = run_bench(&manifest, &BenchOptions { profile, repeats, parallel, timing: !no_timing });
            print!("{}", outcome.table());
            if let Some(out) = out {
                write_reports(outcome.reports(), sink(Some(&out))?)?;
            }
            return Ok(ExitCode::from(outcome.exit_code()));
        }
        Command::Generate { n_core, n_noise, p_core, p_noise, neg_noise, seed, out } => {
            let params = PlantedParams { n_core, n_noise, p_core, p_noise, neg_noise_fraction: neg_noise };
            let g = generate_planted(&params, seed)?.to_graph();
            write_canonical(&g, sink(out.as_deref())?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
