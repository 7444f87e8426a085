//! Single binary exposing the library's experiments as reproducible,
//! seed-deterministic subcommands with machine-readable output.
//!
//! Every run writes its data to `--out` (default stdout) and, when a path
//! was given, a sibling `<out>.manifest.json` recording the full flag set,
//! seed, version and an FNV-1a digest of the bytes written. Identical
//! flags and seed produce byte-identical data files on one platform, for
//! any `--threads` value.

use clap::{Args, Parser, Subcommand};
use clifford_spectra::identities::{self, GeneratorCase, SuiteConfig};
use clifford_spectra::matrix::{sample_blocks_indexed, EnsembleConfig, EnsembleProcess};
use clifford_spectra::poly::{self, MonicPolynomial};
use clifford_spectra::signature::{AssociativityMode, CliffordSignature, SignatureKind};
use clifford_spectra::simulate::{
    simulate_coefficients_path, simulate_matrix_from, SimConfig, SimProcess,
};
use clifford_spectra::spectral::{
    bott_table, bott_table_verified, sample_distinct_spectra, BottVerifyConfig,
};
use clifford_spectra::subset::SubsetId;
use clifford_spectra::CliffordMatrix;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

const EXIT_OK: u8 = 0;
const EXIT_USAGE_OR_IO: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "clifford-spectra",
    version,
    about = "Random symmetric matrices over Clifford algebras: sampling, diffusions and generator-identity verification"
)]
struct Cli {
    /// Worker threads (default: all logical cores). Outputs are identical
    /// for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat key=value file supplying defaults; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print a ready-to-use gnuplot recipe for the produced file.
    #[arg(long, global = true)]
    gnuplot_hint: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify a sign structure: associativity sweep, self-sign sum and
    /// H(C) spot checks, emitted as JSON.
    Algebra(AlgebraArgs),
    /// Sample Gaussian matrices and write their spectra as CSV.
    Sample(SampleArgs),
    /// Check the closed forms for Γ(P(X),P(Y)) and L(P(X)) on sampled
    /// matrices; residual table on stdout, records as JSON.
    Identities(IdentitiesArgs),
    /// Euler–Maruyama trajectories of the matrix or coefficient processes.
    Simulate(SimulateArgs),
    /// Distinct eigenvalues of the Gaussian ensemble as CSV.
    Spectra(SpectraArgs),
    /// The period-8 structure table, optionally with empirical
    /// verification of multiplicities and spectral laws.
    Bott(BottArgs),
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    /// Number of generators.
    #[arg(long)]
    p: Option<u32>,
    /// Run the exhaustive 8^p associativity sweep (p ≤ 7).
    #[arg(long)]
    exhaustive: bool,
    /// Sample this many random triples instead of sweeping.
    #[arg(long)]
    sampled: Option<u64>,
    /// Custom pair table as JSON `[[i, j, sign], …]` (0-based, i ≤ j).
    #[arg(long)]
    custom_table: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Variance scale of the Gaussian ensemble.
    #[arg(long)]
    t: Option<f64>,
    /// gaussian | ou | sphere | brownian
    #[arg(long)]
    process: Option<String>,
    /// Relative eigenvalue-clustering tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IdentitiesArgs {
    /// real | hermitian | quaternion | an integer p (p ≡ 3 mod 4 runs the
    /// ideal-factor case).
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation points per grid axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Relative residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the IdentityReport records to this JSON-lines file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// bm | ou | sphere | coeff
    #[arg(long)]
    process: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Matrix processes: number of generators.
    #[arg(long)]
    p: Option<u32>,
    /// Matrix processes: block size.
    #[arg(long)]
    n: Option<usize>,
    /// Coefficient process: comma-separated real roots of the start
    /// polynomial.
    #[arg(long, allow_hyphen_values = true)]
    roots: Option<String>,
    /// Coefficient process: generator case (as in `identities --case`).
    #[arg(long)]
    case: Option<String>,
    /// csv | jsonl
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectraArgs {
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rescale onto the unit Gaussian-weight law.
    #[arg(long)]
    unit_scale: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BottArgs {
    #[arg(long)]
    pmax: Option<u32>,
    /// Empirically confirm multiplicities (all rows up to 8) and spectral
    /// laws (rows up to 6).
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    n: Option<usize>,
    /// Matrices per row for the multiplicity check.
    #[arg(long)]
    samples: Option<usize>,
    /// Two-sample size per side for the law check.
    #[arg(long)]
    law_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Emit JSON-lines instead of CSV.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: String,
    argv: Vec<String>,
    seed: Option<u64>,
    version: String,
    wall_clock_ms: u128,
    output_digest: String,
}

struct Outcome {
    /// Data written to --out (or stdout).
    data: String,
    /// Subcommand name for the manifest.
    subcommand: &'static str,
    seed: Option<u64>,
    out: Option<PathBuf>,
    verification_failed: bool,
    /// Extra human-readable lines for stdout when data goes to a file.
    notes: Vec<String>,
    gnuplot: Option<String>,
}

enum CliError {
    Usage(String),
    Run(String),
}

impl From<clifford_spectra::Error> for CliError {
    fn from(e: clifford_spectra::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(format!("io: {e}"))
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn load_config(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            None => {
                return Err(CliError::Usage(format!(
                    "config line {} is not key=value: {line}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(map)
}

/// Flag value, else config-file value, else default.
fn resolve<T: std::str::FromStr + Copy>(
    flag: Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match cfg.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|_| CliError::Usage(format!("config {key}={raw} does not parse"))),
        None => Ok(default),
    }
}

fn resolve_string(
    flag: Option<String>,
    cfg: &HashMap<String, String>,
    key: &str,
    default: &str,
) -> String {
    flag.or_else(|| cfg.get(key).cloned()).unwrap_or_else(|| default.to_string())
}

fn parse_case(s: &str) -> Result<GeneratorCase, CliError> {
    match s {
        "real" => Ok(GeneratorCase::real_symmetric()),
        "hermitian" => Ok(GeneratorCase::hermitian()),
        "quaternion" => Ok(GeneratorCase::quaternion()),
        "diagonal" => Ok(GeneratorCase::diagonal()),
        other => {
            let p: u32 = other.parse().map_err(|_| {
                CliError::Usage(format!(
                    "--case must be real|hermitian|quaternion|diagonal or an integer p, got {other}"
                ))
            })?;
            Ok(GeneratorCase::clifford(p)?)
        }
    }
}

/// Entry point mirroring the process interface: parses `argv`, runs the
/// subcommand, writes data and manifest, and returns the exit code
/// (0 ok, 1 usage/io error, 2 verification failure).
pub fn run(argv: &[String]) -> u8 {
    let started = Instant::now();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap's rendered help/version go to stdout with success.
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { EXIT_OK } else { EXIT_USAGE_OR_IO };
        }
    };
    let cfg = match &cli.config {
        Some(path) => match load_config(path) {
            Ok(map) => map,
            Err(CliError::Usage(msg)) | Err(CliError::Run(msg)) => {
                eprintln!("error: {msg}");
                return EXIT_USAGE_OR_IO;
            }
        },
        None => HashMap::new(),
    };
    let threads = match resolve(cli.threads, &cfg, "threads", 0usize) {
        Ok(t) => t,
        Err(CliError::Usage(msg)) | Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE_OR_IO;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_USAGE_OR_IO;
        }
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Algebra(a) => run_algebra(a, &cfg),
        Command::Sample(a) => run_sample(a, &cfg),
        Command::Identities(a) => run_identities(a, &cfg),
        Command::Simulate(a) => run_simulate(a, &cfg),
        Command::Spectra(a) => run_spectra(a, &cfg),
        Command::Bott(a) => run_bott(a, &cfg),
    });
    let outcome = match outcome {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            return EXIT_USAGE_OR_IO;
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE_OR_IO;
        }
    };

    match &outcome.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, outcome.data.as_bytes()) {
                eprintln!("error: writing {}: {e}", path.display());
                return EXIT_USAGE_OR_IO;
            }
            let manifest = RunManifest {
                subcommand: outcome.subcommand.to_string(),
                argv: argv.to_vec(),
                seed: outcome.seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                wall_clock_ms: started.elapsed().as_millis(),
                output_digest: format!("{:016x}", fnv1a64(outcome.data.as_bytes())),
            };
            let manifest_path = manifest_path_for(path);
            match serde_json::to_string_pretty(&manifest) {
                Ok(json) => {
                    if let Err(e) = std::fs::write(&manifest_path, json) {
                        eprintln!("error: writing {}: {e}", manifest_path.display());
                        return EXIT_USAGE_OR_IO;
                    }
                }
                Err(e) => {
                    eprintln!("error: manifest: {e}");
                    return EXIT_USAGE_OR_IO;
                }
            }
            for note in &outcome.notes {
                println!("{note}");
            }
        }
        None => {
            print!("{}", outcome.data);
            for note in &outcome.notes {
                eprintln!("{note}");
            }
        }
    }
    if cli.gnuplot_hint {
        if let Some(hint) = &outcome.gnuplot {
            println!("gnuplot: {hint}");
        }
    }
    if outcome.verification_failed {
        EXIT_VERIFICATION
    } else {
        EXIT_OK
    }
}

fn manifest_path_for(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".manifest.json");
    PathBuf::from(os)
}

#[derive(Serialize)]
struct AlgebraReport {
    p: u32,
    kind: SignatureKind,
    associativity: &'static str,
    checked: u64,
    counterexample: Option<(SubsetId, SubsetId, SubsetId)>,
    self_sign_sum: i64,
    /// Closed-form prediction, for standard signatures.
    self_sign_sum_closed: Option<i64>,
    h_spotchecks: Vec<HSpotCheck>,
}

#[derive(Serialize)]
struct HSpotCheck {
    subset_bits: u32,
    value: i64,
}

fn run_algebra(args: &AlgebraArgs, cfg: &HashMap<String, String>) -> Result<Outcome, CliError> {
    let p = resolve(args.p, cfg, "p", 3u32)?;
    let seed = resolve(args.seed, cfg, "seed", 0u64)?;
    let sig = match &args.custom_table {
        None => CliffordSignature::standard(p)?,
        Some(json) => {
            let table: Vec<(u32, u32, i8)> = serde_json::from_str(json)
                .map_err(|e| CliError::Usage(format!("--custom-table: {e}")))?;
            CliffordSignature::custom(p, &table)?
        }
    };
    let mode = match (args.exhaustive, args.sampled) {
        (true, Some(_)) => {
            return Err(CliError::Usage("choose one of --exhaustive / --sampled".into()))
        }
        (true, None) => AssociativityMode::Exhaustive,
        (false, Some(count)) => AssociativityMode::Sampled { count, seed },
        (false, None) => {
            if p <= clifford_spectra::signature::MAX_EXHAUSTIVE_P {
                AssociativityMode::Exhaustive
            } else {
                AssociativityMode::Sampled { count: 100_000, seed }
            }
        }
    };
    let assoc = sig.verify_associativity(mode)?;
    let full = SubsetId::full(p);
    let mut spots = vec![SubsetId::EMPTY, full];
    if p >= 1 {
        spots.push(SubsetId(1));
    }
    if p >= 2 {
        spots.push(SubsetId(0b11));
    }
    let report = AlgebraReport {
        p,
        kind: sig.kind(),
        associativity: if assoc.pass { "pass" } else { "fail" },
        checked: assoc.checked,
        counterexample: assoc.counterexample,
        self_sign_sum: sig.self_sign_sum(),
        self_sign_sum_closed: sig
            .is_standard()
            .then(|| clifford_spectra::signature::self_sign_sum_closed(p)),
        h_spotchecks: spots
            .into_iter()
            .map(|c| HSpotCheck { subset_bits: c.bits(), value: sig.h_value(c) })
            .collect(),
    };
    let mut data = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Run(format!("serialize: {e}")))?;
    data.push('\n');
    Ok(Outcome {
        data,
        subcommand: "algebra",
        seed: Some(seed),
        out: args.out.clone(),
        verification_failed: !assoc.pass,
        notes: vec![],
        gnuplot: None,
    })
}

fn parse_ensemble_process(name: &str, t: f64) -> Result<EnsembleProcess, CliError> {
    match name {
        "gaussian" => Ok(EnsembleProcess::Gaussian { t }),
        "brownian" => Ok(EnsembleProcess::BrownianPath { t }),
        "ou" => Ok(EnsembleProcess::Ou),
        "sphere" => Ok(EnsembleProcess::Sphere),
        other => Err(CliError::Usage(format!(
            "--process must be gaussian|brownian|ou|sphere, got {other}"
        ))),
    }
}

fn run_sample(args: &SampleArgs, cfg: &HashMap<String, String>) -> Result<Outcome, CliError> {
    let p = resolve(args.p, cfg, "p", 1u32)?;
    let n = resolve(args.n, cfg, "n", 2usize)?;
    let samples = resolve(args.samples, cfg, "samples", 100usize)?;
    let seed = resolve(args.seed, cfg, "seed", 0u64)?;
    let t = resolve(args.t, cfg, "t", 1.0f64)?;
    let tol = resolve(args.tol, cfg, "tol", 1e-7f64)?;
    let process = resolve_string(args.process.clone(), cfg, "process", "gaussian");
    let ens = EnsembleConfig { n, p, process: parse_ensemble_process(&process, t)?, seed };
    use rayon::prelude::*;
    let rows: Vec<String> = (0..samples as u64)
        .into_par_iter()
        .map(|i| -> Result<String, clifford_spectra::Error> {
            let m = sample_blocks_indexed(&ens, i)?;
            let spectrum = poly::spectrum_of(&m.realize_raw(), tol)?;
            let mut row = i.to_string();
            for ev in &spectrum.eigenvalues {
                let _ = write!(row, ",{ev}");
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dim = n << p;
    let mut data = String::from("sample");
    for i in 0..dim {
        let _ = write!(data, ",eig_{i}");
    }
    data.push('\n');
    for row in rows {
        data.push_str(&row);
        data.push('\n');
    }
    Ok(Outcome {
        data,
        subcommand: "sample",
        seed: Some(seed),
        out: args.out.clone(),
        verification_failed: false,
        notes: vec![],
        gnuplot: Some("plot 'OUT' using 0:2 with points title 'lowest eigenvalue'".into()),
    })
}

fn run_identities(args: &IdentitiesArgs, cfg: &HashMap<String, String>) -> Result<Outcome, CliError> {
    let case_name = resolve_string(args.case.clone(), cfg, "case", "real");
    let case = parse_case(&case_name)?;
    let suite = SuiteConfig {
        n: resolve(args.n, cfg, "n", 2usize)?,
        samples: resolve(args.samples, cfg, "samples", 20u64)?,
        seed: resolve(args.seed, cfg, "seed", 1u64)?,
        grid: resolve(args.grid, cfg, "grid", 5usize)?,
        tolerance: resolve(args.tol, cfg, "tol", 1e-6f64)?,
    };
    let reports = identities::identity_suite(&case, &suite)?;
    let mut table = format!(
        "{:<14} {:<16} {:>6} {:>14} {:>6}\n",
        "case", "identity", "sample", "max_rel_resid", "pass"
    );
    let mut failed = false;
    for r in &reports {
        failed |= !r.pass;
        let _ = writeln!(
            table,
            "{:<14} {:<16} {:>6} {:>14.3e} {:>6}",
            r.case, r.identity, r.sample_index, r.max_rel_residual, r.pass
        );
    }
    let notes = vec![format!(
        "{} reports, tolerance {:.1e}: {}",
        reports.len(),
        suite.tolerance,
        if failed { "FAIL" } else { "pass" }
    )];
    if let Some(json_path) = &args.json {
        let mut lines = String::new();
        for r in &reports {
            lines.push_str(
                &serde_json::to_string(r).map_err(|e| CliError::Run(format!("serialize: {e}")))?,
            );
            lines.push('\n');
        }
        // The JSON file is the data artifact; the table goes to stdout.
        print!("{table}");
        return Ok(Outcome {
            data: lines,
            subcommand: "identities",
            seed: Some(suite.seed),
            out: Some(json_path.clone()),
            verification_failed: failed,
            notes,
            gnuplot: None,
        });
    }
    Ok(Outcome {
        data: table,
        subcommand: "identities",
        seed: Some(suite.seed),
        out: None,
        verification_failed: failed,
        notes,
        gnuplot: None,
    })
}

fn run_simulate(args: &SimulateArgs, cfg: &HashMap<String, String>) -> Result<Outcome, CliError> {
    let process_name = resolve_string(args.process.clone(), cfg, "process", "ou");
    let dt = resolve(args.dt, cfg, "dt", 0.01f64)?;
    let steps = resolve(args.steps, cfg, "steps", 100usize)?;
    let paths = resolve(args.paths, cfg, "paths", 1usize)?;
    let stride = resolve(args.stride, cfg, "stride", 10usize)?;
    let seed = resolve(args.seed, cfg, "seed", 0u64)?;
    let format = resolve_string(args.format.clone(), cfg, "format", "csv");
    if format != "csv" && format != "jsonl" {
        return Err(CliError::Usage(format!("--format must be csv or jsonl, got {format}")));
    }
    use rayon::prelude::*;

    #[derive(Serialize)]
    struct SnapLine<'a> {
        path: u64,
        time: f64,
        values: &'a [f64],
    }

    let mut lines: Vec<(u64, f64, Vec<f64>)> = Vec::new();
    let (subname, value_label): (&'static str, &'static str) = match process_name.as_str() {
        "coeff" => {
            let case_name = resolve_string(args.case.clone(), cfg, "case", "diagonal");
            let case = parse_case(&case_name)?;
            let roots_text = resolve_string(args.roots.clone(), cfg, "roots", "-1,1");
            let roots: Vec<f64> = roots_text
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("--roots: {e}")))?;
            let p0 = MonicPolynomial::from_roots(&roots)?;
            let sim = SimConfig::new(SimProcess::CoeffSde, dt, steps, stride, seed);
            let trajs: Vec<_> = (0..paths as u64)
                .into_par_iter()
                .map(|i| simulate_coefficients_path(&sim, &p0, &case, i))
                .collect::<Result<Vec<_>, _>>()?;
            for (i, traj) in trajs.into_iter().enumerate() {
                for (t, snap) in traj.times.iter().zip(traj.snapshots.iter()) {
                    lines.push((i as u64, *t, snap.coeffs().to_vec()));
                }
            }
            ("simulate", "a")
        }
        name => {
            let process = match name {
                "bm" => SimProcess::Bm,
                "ou" => SimProcess::Ou,
                "sphere" => SimProcess::Sphere,
                other => {
                    return Err(CliError::Usage(format!(
                        "--process must be bm|ou|sphere|coeff, got {other}"
                    )))
                }
            };
            let p = resolve(args.p, cfg, "p", 1u32)?;
            let n = resolve(args.n, cfg, "n", 2usize)?;
            let sim = SimConfig::new(process, dt, steps, stride, seed);
            let sig = CliffordSignature::standard(p)?;
            let trajs: Vec<_> = (0..paths as u64)
                .into_par_iter()
                .map(|i| {
                    let start = if let SimProcess::Sphere = process {
                        let ens = EnsembleConfig { n, p, process: EnsembleProcess::Sphere, seed };
                        sample_blocks_indexed(&ens, u64::MAX - i)?
                    } else {
                        CliffordMatrix::zero(sig.clone(), n)
                    };
                    simulate_matrix_from(&sim, &start, i)
                })
                .collect::<Result<Vec<_>, _>>()?;
            for (i, traj) in trajs.into_iter().enumerate() {
                for (t, snap) in traj.times.iter().zip(traj.snapshots.iter()) {
                    lines.push((i as u64, *t, snap.eigenvalues.clone()));
                }
            }
            ("simulate", "eig")
        }
    };

    let mut data = String::new();
    if format == "csv" {
        let width = lines.first().map(|(_, _, v)| v.len()).unwrap_or(0);
        data.push_str("path,time");
        for i in 0..width {
            let _ = write!(data, ",{value_label}_{i}");
        }
        data.push('\n');
        for (path, time, values) in &lines {
            let _ = write!(data, "{path},{time}");
            for v in values {
                let _ = write!(data, ",{v}");
            }
            data.push('\n');
        }
    } else {
        for (path, time, values) in &lines {
            let line = SnapLine { path: *path, time: *time, values };
            data.push_str(
                &serde_json::to_string(&line).map_err(|e| CliError::Run(format!("{e}")))?,
            );
            data.push('\n');
        }
    }
    Ok(Outcome {
        data,
        subcommand: subname,
        seed: Some(seed),
        out: args.out.clone(),
        verification_failed: false,
        notes: vec![],
        gnuplot: Some("plot 'OUT' using 2:3 with lines title 'first component'".into()),
    })
}

fn run_spectra(args: &SpectraArgs, cfg: &HashMap<String, String>) -> Result<Outcome, CliError> {
    let p = resolve(args.p, cfg, "p", 2u32)?;
    let n = resolve(args.n, cfg, "n", 2usize)?;
    let samples = resolve(args.samples, cfg, "samples", 1000usize)?;
    let seed = resolve(args.seed, cfg, "seed", 0u64)?;
    let vectors = sample_distinct_spectra(p, n, samples, seed, args.unit_scale)?;
    let k = vectors.first().map(|v| v.len()).unwrap_or(0);
    let mut data = String::from("sample");
    for i in 1..=k {
        let _ = write!(data, ",lambda_{i}");
    }
    data.push('\n');
    for (i, v) in vectors.iter().enumerate() {
        let _ = write!(data, "{i}");
        for x in v {
            let _ = write!(data, ",{x}");
        }
        data.push('\n');
    }
    Ok(Outcome {
        data,
        subcommand: "spectra",
        seed: Some(seed),
        out: args.out.clone(),
        verification_failed: false,
        notes: vec![],
        gnuplot: Some(
            "plot 'OUT' using 2:3 with dots title 'distinct eigenvalue pairs'".into(),
        ),
    })
}

fn run_bott(args: &BottArgs, cfg: &HashMap<String, String>) -> Result<Outcome, CliError> {
    let pmax = resolve(args.pmax, cfg, "pmax", 8u32)?;
    let seed = resolve(args.seed, cfg, "seed", 42u64)?;
    let rows = if args.verify {
        let vcfg = BottVerifyConfig {
            n: resolve(args.n, cfg, "n", 1usize)?,
            samples: resolve(args.samples, cfg, "samples", 200usize)?,
            law_samples: resolve(args.law_samples, cfg, "law_samples", 4000usize)?,
            seed,
            ..Default::default()
        };
        bott_table_verified(pmax, &vcfg)?
    } else {
        bott_table(pmax)?
    };
    let mut failed = false;
    let mut data = String::new();
    if args.json {
        for row in &rows {
            data.push_str(
                &serde_json::to_string(row).map_err(|e| CliError::Run(format!("{e}")))?,
            );
            data.push('\n');
        }
    } else {
        data.push_str("p,structure,d,alpha,a,splits,mult_fraction,law_p,verified\n");
        for row in &rows {
            let (frac, law_p, pass) = match &row.verification {
                Some(v) => (
                    format!("{}", v.multiplicity_fraction),
                    v.law_p_value.map(|p| p.to_string()).unwrap_or_default(),
                    v.pass.to_string(),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            let _ = writeln!(
                data,
                "{},{},{},{},{},{},{},{},{}",
                row.p, row.structure, row.d, row.alpha, row.a, row.splits, frac, law_p, pass
            );
        }
    }
    for row in &rows {
        if let Some(v) = &row.verification {
            failed |= !v.pass;
        }
    }
    Ok(Outcome {
        data,
        subcommand: "bott",
        seed: Some(seed),
        out: args.out.clone(),
        verification_failed: failed,
        notes: vec![],
        gnuplot: None,
    })
}
