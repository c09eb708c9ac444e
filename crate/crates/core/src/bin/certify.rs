use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zonecert::bench::{bench_cdf, write_bench_csv};
use zonecert::config::RunConfig;
use zonecert::netsim::{make_zone, ZoneSpec, REFERENCE_ZONE_SEED};
use zonecert::run::{comparison_table, execute, prepare_output_dir, write_artifacts, ProcessSelection};
use zonecert::sweep::{sweep_precision, SweepConfig};
use zonecert::Error;

#[derive(Parser)]
#[command(name = "certify", version, about = "Certify the safety probability of a congestion controller")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the brute-force and/or proxy process from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        process: Process,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean simulation counts to reach a relative precision on a synthetic coin.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.75,0.95")]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.35,0.1,0.05")]
        precision: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time rectangle-probability evaluations against dimension.
    BenchCdf {
        #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,35,40,45,50,55,60,65,70,75,80,85,90,95")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a random zone file.
    MakeZone {
        #[arg(long, default_value_t = REFERENCE_ZONE_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        lines: usize,
        #[arg(long, default_value_t = 10)]
        nodes: usize,
        #[arg(long, default_value_t = ZoneSpec::default().ptdf_low)]
        ptdf_low: f64,
        #[arg(long, default_value_t = ZoneSpec::default().ptdf_high)]
        ptdf_high: f64,
        #[arg(long, default_value_t = ZoneSpec::default().noise_sigma)]
        noise_sigma: f64,
        #[arg(long, default_value_t = ZoneSpec::default().history_size)]
        history: usize,
        #[arg(long, default_value_t = ZoneSpec::default().eta)]
        eta: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Process {
    Brute,
    Proxy,
    Both,
}

impl From<Process> for ProcessSelection {
    fn from(p: Process) -> Self {
        match p {
            Process::Brute => ProcessSelection::Brute,
            Process::Proxy => ProcessSelection::Proxy,
            Process::Both => ProcessSelection::Both,
        }
    }
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Runtime(Error::io(p, e)))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run { config, process, seed, budget, out } => {
            let mut cfg = RunConfig::load(&config).map_err(Failure::Config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(b) = budget {
                cfg.budget = b;
            }
            if let Some(dir) = out {
                cfg.set_output_dir(dir);
            }
            cfg.validate().map_err(Failure::Config)?;
            let dir = cfg.output_path();
            prepare_output_dir(&dir).map_err(Failure::Config)?;
            let ctx = cfg.build_context().map_err(Failure::Config)?;

            let mut runs = Vec::new();
            for &kind in ProcessSelection::from(process).kinds() {
                let run = execute(&ctx, &cfg, kind).map_err(Failure::Runtime)?;
                let (csv, json) = write_artifacts(&run, &dir).map_err(Failure::Runtime)?;
                println!(
                    "{}: [{:.5}, {:.5}] after {} iterations, {} simulations ({}, {})",
                    kind.name(),
                    run.summary.p_min,
                    run.summary.p_max,
                    run.summary.iterations,
                    run.summary.simulations,
                    csv.display(),
                    json.display()
                );
                runs.push(run);
            }
            if runs.len() > 1 {
                println!();
                print!("{}", comparison_table(&runs, cfg.reference_p_safe));
            }
            Ok(())
        }
        Command::Sweep { p, precision, repeats, seed, out } => {
            let cfg = SweepConfig { p_values: p, precisions: precision, repeats, seed, ..Default::default() };
            cfg.validate().map_err(Failure::Config)?;
            let table = sweep_precision(&cfg).map_err(Failure::Runtime)?;
            table.write_csv(output(out.as_ref())?).map_err(Failure::Runtime)
        }
        Command::BenchCdf { dims, repeats, seed, out } => {
            let rows = bench_cdf(&dims, repeats, seed).map_err(Failure::Config)?;
            write_bench_csv(&rows, output(out.as_ref())?).map_err(Failure::Runtime)
        }
        Command::MakeZone { seed, lines, nodes, ptdf_low, ptdf_high, noise_sigma, history, eta, out } => {
            let spec = ZoneSpec {
                num_lines: lines,
                num_nodes: nodes,
                ptdf_low,
                ptdf_high,
                noise_sigma,
                history_size: history,
                eta,
            };
            if ptdf_low.partial_cmp(&ptdf_high) != Some(std::cmp::Ordering::Less) {
                return Err(Failure::Config(Error::invalid("ptdf_low", "must be below ptdf_high")));
            }
            let zone = make_zone(&spec, seed);
            zone.validate().map_err(Failure::Config)?;
            zone.save(&out).map_err(Failure::Runtime)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}
