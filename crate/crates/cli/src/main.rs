//! `cwcu`: runs the estimator simulations, checks the LLR equality between
//! paired estimators, emits histogram data and inspects model files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use cwcu_core::io::{read_json, write_json};
use cwcu_core::linalg::{Cholesky, MatrixFile};
use cwcu_core::llr::write_llr_dump;
use cwcu_core::sim::output::{histogram_csv, write_tables};
use cwcu_core::sim::{self, EstimatorPair, LlrCheckSpec, RunReport, SimConfig};
use cwcu_core::{CMatrix, Constellation, Error};
use serde_json::{json, Value};

/// Exit code for malformed input (config, files, flags).
const EXIT_CONFIG: u8 = 2;
/// Exit code for numerically degenerate models.
const EXIT_NUMERICAL: u8 = 3;
/// Exit code of `llr-check` when the tripwire fires.
const EXIT_DISCREPANCY: u8 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "cwcu",
    version,
    about = "CWCU (widely) linear MMSE estimators and soft-decision simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a Monte Carlo simulation and write report.json plus CSV tables.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (overrides `seed` in the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; results are identical for any value.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Validate the config and build the estimator banks without trials.
        #[arg(long)]
        dry_run: bool,
    },
    /// Compare paired-estimator LLRs on random models.
    LlrCheck {
        #[arg(long, default_value_t = 200)]
        models: usize,
        #[arg(long, default_value_t = 100)]
        observations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_m: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Comma-separated built-in constellations, cycled over the models.
        #[arg(long, value_delimiter = ',', default_value = "qpsk,16qam,8qam-rect")]
        constellations: Vec<String>,
        /// Exit nonzero when any discrepancy exceeds this value.
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        /// Write per-bit LLRs of one pair to this CSV file.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PairArg::Widely)]
        dump_pair: PairArg,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Collect per-symbol 2-D histograms of WLMMSE and CWCU WLMMSE estimates.
    Histogram {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Describe a matrix or constellation JSON file.
    Inspect { file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PairArg {
    Linear,
    Widely,
}

/// Failure reported as JSON on stderr.
struct Failure {
    code: u8,
    body: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG },
            body: json!({
                "error": e.kind(),
                "message": e.to_string(),
                "path": e.path(),
            }),
        }
    }
}

type CliResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            jobs,
            dry_run,
        } => simulate(&config, out, seed, jobs, dry_run),
        Command::LlrCheck {
            models,
            observations,
            seed,
            max_m,
            max_n,
            constellations,
            threshold,
            dump,
            dump_pair,
            jobs,
        } => {
            let spec = LlrCheckSpec {
                models,
                observations,
                seed,
                max_m,
                max_n,
                constellations,
                dump: dump.as_ref().map(|_| match dump_pair {
                    PairArg::Linear => EstimatorPair::Linear,
                    PairArg::Widely => EstimatorPair::Widely,
                }),
            };
            llr_check(&spec, threshold, dump.as_deref(), jobs)
        }
        Command::Histogram {
            config,
            bins,
            out,
            seed,
            jobs,
        } => histogram(&config, bins, out, seed, jobs),
        Command::Inspect { file } => inspect(&file),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.body);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<SimConfig, Failure> {
    let mut cfg = SimConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn output_dir(cfg: &SimConfig, out: Option<PathBuf>) -> Result<PathBuf, Failure> {
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    Ok(dir)
}

fn with_pool<T>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, Failure>
where
    T: Send,
{
    let pool = rayon_pool(jobs)?;
    Ok(pool.install(f))
}

fn rayon_pool(jobs: usize) -> Result<cwcu_core::sim::run::Pool, Failure> {
    cwcu_core::sim::run::pool(jobs).map_err(Failure::from)
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn write_report(dir: &Path, report: &RunReport) -> Result<PathBuf, Failure> {
    let path = dir.join("report.json");
    write_json(&path, &json!({ "generated_unix": unix_now(), "report": report }))?;
    Ok(path)
}

fn simulate(config: &Path, out: Option<PathBuf>, seed: Option<u64>, jobs: usize, dry_run: bool) -> CliResult {
    let cfg = load_config(config, seed)?;
    let dir = output_dir(&cfg, out)?;
    let report = if dry_run {
        sim::dry_run(&cfg)?
    } else {
        sim::run_trials(&cfg, jobs)?
    };
    let mut written = vec![write_report(&dir, &report)?];
    if !dry_run {
        written.extend(write_tables(&report, &dir)?);
    }
    print_summary(&report);
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(0)
}

fn print_summary(report: &RunReport) {
    println!(
        "{} symbols, {}x{} observation matrix, {} bits/symbol",
        report.constellation, report.m, report.n, report.bits_per_symbol
    );
    for p in &report.points {
        println!("Eb/N0 {} dB (sigma2 {:.6e}, {} trials)", p.ebn0_db, p.sigma2, p.trials);
        for e in &p.estimators {
            println!(
                "  {:<20} BER {:.6e}  bit errors {:>10}  BMSE theory {:.6e}",
                e.estimator, e.ber, e.bit_errors, e.bmse_theory_mean
            );
        }
        for s in &p.propriety {
            println!(
                "  propriety ratio {:<14} max {:.3e}  mean {:.3e}",
                s.estimator, s.max, s.mean
            );
        }
        println!("  paired BER identical: {}", p.paired_ber_identical);
    }
}

fn llr_check(spec: &LlrCheckSpec, threshold: f64, dump: Option<&Path>, jobs: usize) -> CliResult {
    let report = with_pool(jobs, || sim::llr_check(spec))??;
    if let Some(path) = dump {
        let file = fs::File::create(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        write_llr_dump(std::io::BufWriter::new(file), &report.dump).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    println!(
        "{}",
        json!({
            "models": report.models,
            "observations_per_model": report.observations_per_model,
            "linear": report.linear,
            "widely": report.widely,
            "threshold": threshold,
        })
    );
    Ok(if report.max_discrepancy() > threshold {
        EXIT_DISCREPANCY
    } else {
        0
    })
}

fn histogram(config: &Path, bins: usize, out: Option<PathBuf>, seed: Option<u64>, jobs: usize) -> CliResult {
    let mut cfg = load_config(config, seed)?;
    if bins == 0 {
        return Err(Error::BadSpec("--bins must be at least 1".into()).into());
    }
    let range = cfg.histogram.as_ref().map_or(2.0, |h| h.range);
    cfg.histogram = Some(sim::HistogramSpec { bins, range });
    let dir = output_dir(&cfg, out)?;
    let report = sim::run_trials(&cfg, jobs)?;
    let csv = dir.join("histogram.csv");
    cwcu_core::io::write_text(&csv, &histogram_csv(&report))?;
    let moments = dir.join("histogram.json");
    let hists: Vec<_> = report.points.iter().flat_map(|p| &p.histograms).collect();
    write_json(&moments, &json!({ "generated_unix": unix_now(), "histograms": hists }))?;
    for h in &hists {
        let worst = h
            .symbols
            .iter()
            .map(|s| {
                let d = ((s.mean[0] - s.symbol[0]).powi(2) + (s.mean[1] - s.symbol[1]).powi(2)).sqrt();
                if s.std_error > 0.0 {
                    d / s.std_error
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        println!(
            "{:<12} Eb/N0 {} dB: max |mean - symbol| = {:.2} standard errors",
            h.estimator, h.ebn0_db, worst
        );
    }
    println!("wrote {}", csv.display());
    println!("wrote {}", moments.display());
    Ok(0)
}

fn inspect(file: &Path) -> CliResult {
    let value: Value = read_json(file)?;
    let name = file.display().to_string();
    let bad = |e: serde_json::Error| Error::Json {
        path: name.clone(),
        source: e,
    };
    if value.get("symbols").is_some() {
        let c: Constellation = cwcu_core::io::read_constellation(file)?;
        let pv = c.pseudo_variance();
        println!("kind: constellation");
        println!("name: {}", c.name());
        println!("symbols: {}", c.len());
        println!("bits_per_symbol: {}", c.bits_per_symbol());
        println!("variance: {}", c.variance());
        println!("pseudo_variance: {} {:+}i", pv.re, pv.im);
        println!("proper: {}", c.is_proper());
        return Ok(0);
    }
    let file_form: MatrixFile = serde_json::from_value(value).map_err(bad)?;
    let m: CMatrix = CMatrix::try_from(file_form)?;
    println!("kind: matrix");
    println!("shape: {}x{}", m.rows(), m.cols());
    println!("frobenius_norm: {}", m.frobenius_norm());
    if m.is_square() {
        let hermitian = m.is_hermitian(1e-10);
        println!("hermitian: {hermitian}");
        println!("positive_definite: {}", hermitian && Cholesky::new(&m).is_ok());
        if m.rows() == 2 && hermitian && Cholesky::new(&m).is_ok() {
            println!("propriety_ratio: {}", sim::propriety_ratio(&m));
        }
    } else {
        let gram = &m.hermitian() * &m;
        let orthonormal = m.rows() > m.cols() && gram.max_abs_diff(&CMatrix::identity(m.cols())) < 1e-10;
        println!("orthonormal_columns: {orthonormal}");
    }
    Ok(0)
}
