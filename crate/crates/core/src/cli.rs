//! Command-line front end. Every run writes `manifest.json` next to its
//! output (or in the working directory) recording the arguments, resolved
//! configuration, seed and wall-clock; `replay` re-executes a manifest.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cramer::{solve_gamma, DEFAULT_TOL};
use crate::embedding::{poisson_method, run_embedding, write_embedded_csv, EmbedConfig};
use crate::error::{Error, Result};
use crate::laws::StepLaw;
use crate::spitzer::{
    linear_grid, write_transform_csv, SeriesConfig, SpitzerSeries, Truncation, DEFAULT_SAMPLES_PER_TERM,
    DEFAULT_TAIL_TARGET,
};
use crate::stats::DEFAULT_BOOTSTRAP;
use crate::verify::{self, Verdict};
use crate::walk::{run_batch, write_triplets_csv, BatchConfig, PassageMode};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_LAW: &str = "gaussian_drift:mu=-0.5,sigma=1";
pub const DEFAULT_LATTICE_LAW: &str = "two_point_lattice:p=0.3";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "segscore", version, about = "Maximal segmental score statistics of negative-drift random walks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Master seed of all random streams.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Where to write the run manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cramér root and MGF minimum of a step law, as JSON.
    Gamma {
        #[arg(long, default_value = DEFAULT_LAW)]
        law: StepLaw,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Simulate triplets `(R_n, R*_n - y, O_{x+y})` to CSV.
    Simulate {
        #[arg(long, default_value = DEFAULT_LAW)]
        law: StepLaw,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        paths: u64,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long, value_enum, default_value_t = PassageArg::Regenerative)]
        passage: PassageArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Transforms of the limiting overshoot or reflected value on a grid, to CSV.
    SpitzerCf {
        #[arg(long, default_value = DEFAULT_LAW)]
        law: StepLaw,
        #[arg(long, value_enum, default_value_t = TransformArg::O)]
        transform: TransformArg,
        #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Fixed number of series terms; overrides --tail-target.
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TAIL_TARGET)]
        tail_target: f64,
        #[arg(long, value_enum, default_value_t = EstimatorArg::MonteCarlo)]
        estimator: EstimatorArg,
        #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_TERM)]
        samples_per_term: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compound-Poisson embedded paths to CSV.
    Embed {
        #[arg(long, default_value = DEFAULT_LAW)]
        law: StepLaw,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        paths: u64,
        #[arg(long, value_enum, default_value_t = PassageArg::Regenerative)]
        passage: PassageArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Statistical checks; exit code 1 when the check fails.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Args, Clone)]
pub struct VerifyCommon {
    #[arg(long)]
    pub law: Option<StepLaw>,
    #[arg(long)]
    pub paths: Option<u64>,
    /// JSON report destination; the report is always printed to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// KS of gamma (R_n + O_{x+y}) against Exp(1).
    Factorization {
        #[arg(long, default_value_t = 2000)]
        n: u64,
        /// Total level x + y, split evenly; ignored when --x and --y are set.
        #[arg(long, default_value_t = 25.0)]
        level: f64,
        #[arg(long, requires = "y")]
        x: Option<f64>,
        #[arg(long, requires = "x")]
        y: Option<f64>,
        #[arg(long, value_enum, default_value_t = PassageArg::Regenerative)]
        passage: PassageArg,
        #[command(flatten)]
        v: VerifyCommon,
    },
    /// Joint CDF of the triplet against the product of its marginals.
    Independence {
        #[arg(long, default_value_t = 2000)]
        n: u64,
        #[arg(long, default_value_t = 13.0)]
        x: f64,
        #[arg(long, default_value_t = 12.0)]
        y: f64,
        #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
        n_boot: usize,
        #[arg(long, value_enum, default_value_t = PassageArg::Regenerative)]
        passage: PassageArg,
        #[command(flatten)]
        v: VerifyCommon,
    },
    /// Location-fitted KS of gamma R*_n - ln n against the Gumbel law.
    Gumbel {
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[command(flatten)]
        v: VerifyCommon,
    },
    /// Two-sample KS between overshoots at two levels.
    OvershootLimit {
        #[arg(long, default_value_t = 10.0)]
        level_a: f64,
        #[arg(long, default_value_t = 25.0)]
        level_b: f64,
        #[arg(long, value_enum, default_value_t = PassageArg::Regenerative)]
        passage: PassageArg,
        #[command(flatten)]
        v: VerifyCommon,
    },
    /// Monte Carlo CDF of R_n against the exact lattice law.
    Oracle {
        #[arg(long, default_value_t = 20)]
        n: u64,
        /// Smallest per-point tolerance; --threshold overrides it.
        #[arg(long, default_value_t = 0.005)]
        floor: f64,
        #[command(flatten)]
        v: VerifyCommon,
    },
    /// Laplace transform of embedded overshoots against the series.
    Zinf {
        #[arg(long, default_value_t = 25.0)]
        level: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
        v_grid: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_TERM)]
        samples_per_term: usize,
        #[command(flatten)]
        v: VerifyCommon,
    },
    /// Empirical CF of overshoots against the series for the limiting overshoot.
    OvershootCf {
        #[arg(long, default_value_t = 25.0)]
        level: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_TERM)]
        samples_per_term: usize,
        #[command(flatten)]
        v: VerifyCommon,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PassageArg {
    Direct,
    Regenerative,
}

impl From<PassageArg> for PassageMode {
    fn from(p: PassageArg) -> Self {
        match p {
            PassageArg::Direct => PassageMode::Direct,
            PassageArg::Regenerative => PassageMode::Regenerative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformArg {
    /// Characteristic function of the limiting overshoot.
    O,
    /// Characteristic function of the limiting reflected value.
    R,
    /// Laplace transform of the limiting overshoot; the grid holds `v`.
    LaplaceO,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name; `replay` re-parses them.
    pub args: Vec<String>,
    pub resolved: Value,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub outputs: Vec<PathBuf>,
    pub exit_code: i32,
    pub started_unix: f64,
    pub wall_clock_seconds: f64,
}

/// What a command produced, for the manifest.
struct Outcome {
    name: &'static str,
    resolved: Value,
    seed: Option<u64>,
    workers: Option<usize>,
    outputs: Vec<PathBuf>,
    manifest: Option<PathBuf>,
    pass: bool,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidParameter("--workers must be at least 1".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn emit_report<T: Serialize>(report: &T, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    println!("{text}");
    if let Some(path) = out {
        let mut w = create(path)?;
        writeln!(w, "{text}")?;
        w.flush()?;
    }
    Ok(())
}

fn write_csv_to(out: &Option<PathBuf>, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
        }
    }
    Ok(())
}

fn law_or(law: &Option<StepLaw>, default: &str) -> StepLaw {
    law.unwrap_or_else(|| default.parse().expect("default law parses"))
}

fn verdict<T: Serialize + Verdict + Send>(
    name: &'static str,
    v: &VerifyCommon,
    resolved: Value,
    run: impl FnOnce() -> Result<T> + Send,
) -> Result<Outcome> {
    let report = with_workers(v.common.workers, run)??;
    emit_report(&report, &v.out)?;
    Ok(Outcome {
        name,
        resolved,
        seed: Some(v.common.seed),
        workers: v.common.workers,
        outputs: v.out.iter().cloned().collect(),
        manifest: v.common.manifest.clone(),
        pass: report.pass(),
    })
}

fn run_check(check: Check) -> Result<Outcome> {
    match check {
        Check::Factorization { n, level, x, y, passage, v } => {
            let law = law_or(&v.law, DEFAULT_LAW);
            let (x, y) = match (x, y) {
                (Some(x), Some(y)) => (x, y),
                _ => (level / 2.0, level / 2.0),
            };
            let paths = v.paths.unwrap_or(100_000);
            let threshold = v.threshold.unwrap_or(0.01);
            let resolved = json!({"law": law, "n": n, "x": x, "y": y, "paths": paths, "threshold": threshold, "passage": PassageMode::from(passage)});
            let seed = v.common.seed;
            verdict("verify factorization", &v, resolved, move || {
                verify::factorization(&law, n, x, y, paths, seed, threshold, passage.into())
            })
        }
        Check::Independence { n, x, y, n_boot, passage, v } => {
            let law = law_or(&v.law, DEFAULT_LAW);
            let paths = v.paths.unwrap_or(100_000);
            let abs = v.threshold.unwrap_or(0.02);
            let resolved = json!({"law": law, "n": n, "x": x, "y": y, "paths": paths, "n_boot": n_boot, "abs_threshold": abs, "passage": PassageMode::from(passage)});
            let seed = v.common.seed;
            verdict("verify independence", &v, resolved, move || {
                verify::independence(&law, n, x, y, paths, seed, n_boot, abs, passage.into())
            })
        }
        Check::Gumbel { n, v } => {
            let law = law_or(&v.law, DEFAULT_LAW);
            let paths = v.paths.unwrap_or(10_000);
            let threshold = v.threshold.unwrap_or(0.02);
            let resolved = json!({"law": law, "n": n, "paths": paths, "threshold": threshold});
            let seed = v.common.seed;
            verdict("verify gumbel", &v, resolved, move || verify::gumbel(&law, n, paths, seed, threshold))
        }
        Check::OvershootLimit { level_a, level_b, passage, v } => {
            let law = law_or(&v.law, DEFAULT_LAW);
            positive("level-a", level_a)?;
            positive("level-b", level_b)?;
            let paths = v.paths.unwrap_or(100_000);
            let threshold = v.threshold.unwrap_or(0.01);
            let resolved = json!({"law": law, "levels": [level_a, level_b], "paths": paths, "threshold": threshold, "passage": PassageMode::from(passage)});
            let seed = v.common.seed;
            verdict("verify overshoot-limit", &v, resolved, move || {
                verify::overshoot_limit(&law, (level_a, level_b), paths, seed, threshold, passage.into())
            })
        }
        Check::Oracle { n, floor, v } => {
            let law = law_or(&v.law, DEFAULT_LATTICE_LAW);
            let floor = v.threshold.unwrap_or(floor);
            let paths = v.paths.unwrap_or(100_000);
            let resolved = json!({"law": law, "n": n, "paths": paths, "floor": floor});
            let seed = v.common.seed;
            verdict("verify oracle", &v, resolved, move || verify::oracle(&law, n, paths, seed, floor))
        }
        Check::Zinf { level, v_grid, samples_per_term, v } => {
            let law = law_or(&v.law, DEFAULT_LAW);
            positive("level", level)?;
            let paths = v.paths.unwrap_or(100_000);
            let threshold = v.threshold.unwrap_or(0.01);
            let resolved = json!({"law": law, "level": level, "v_grid": v_grid, "paths": paths, "samples_per_term": samples_per_term, "threshold": threshold});
            let seed = v.common.seed;
            verdict("verify zinf", &v, resolved, move || {
                verify::zinf(&law, &v_grid, paths, level, seed, samples_per_term, threshold)
            })
        }
        Check::OvershootCf { level, points, samples_per_term, v } => {
            let law = law_or(&v.law, DEFAULT_LAW);
            positive("level", level)?;
            let paths = v.paths.unwrap_or(100_000);
            let threshold = v.threshold.unwrap_or(0.02);
            let resolved = json!({"law": law, "level": level, "points": points, "paths": paths, "samples_per_term": samples_per_term, "threshold": threshold});
            let seed = v.common.seed;
            verdict("verify overshoot-cf", &v, resolved, move || {
                let cfg = SeriesConfig::monte_carlo(
                    Truncation::TailTarget(DEFAULT_TAIL_TARGET),
                    samples_per_term,
                    seed.wrapping_add(1),
                );
                verify::overshoot_cf(
                    &law,
                    level,
                    paths,
                    seed,
                    &linear_grid(-5.0, 5.0, points),
                    &cfg,
                    threshold,
                    DEFAULT_TAIL_TARGET,
                )
            })
        }
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Gamma { law, tol, manifest } => {
            let sol = solve_gamma(&law, tol)?;
            let out = json!({"gamma": sol.gamma, "rho": sol.rho, "s_at_min": sol.s_at_min, "tolerance": sol.tolerance});
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(Outcome {
                name: "gamma",
                resolved: json!({"law": law, "tol": tol}),
                seed: None,
                workers: None,
                outputs: vec![],
                manifest,
                pass: true,
            })
        }
        Command::Simulate { law, n, x, y, paths, max_steps, passage, out, common } => {
            let mut cfg = BatchConfig::new(law, n, x, y, paths, common.seed).with_passage(passage.into());
            cfg.max_steps = max_steps;
            cfg.validate()?;
            let samples = with_workers(common.workers, || run_batch(&cfg))??;
            write_csv_to(&out, |w| write_triplets_csv(w, &samples))?;
            let mut resolved = serde_json::to_value(&cfg)?;
            resolved["max_steps"] = json!(cfg.resolved_max_steps());
            Ok(Outcome {
                name: "simulate",
                resolved,
                seed: Some(common.seed),
                workers: common.workers,
                outputs: out.into_iter().collect(),
                manifest: common.manifest,
                pass: true,
            })
        }
        Command::SpitzerCf {
            law,
            transform,
            min,
            max,
            points,
            terms,
            tail_target,
            estimator,
            samples_per_term,
            out,
            common,
        } => {
            if points == 0 || !(min.is_finite() && max.is_finite() && min <= max) {
                return Err(Error::InvalidParameter("need points >= 1 and finite min <= max".into()));
            }
            let truncation = match terms {
                Some(n) => Truncation::Fixed(n),
                None => Truncation::TailTarget(tail_target),
            };
            let cfg = match estimator {
                EstimatorArg::Exact => SeriesConfig::exact(truncation),
                EstimatorArg::MonteCarlo => SeriesConfig::monte_carlo(truncation, samples_per_term, common.seed),
            };
            let grid = linear_grid(min, max, points);
            let evals = with_workers(common.workers, || -> Result<Vec<_>> {
                let series = SpitzerSeries::new(&law, &cfg)?;
                grid.iter()
                    .map(|&a| match transform {
                        TransformArg::O => Ok(series.cf_o_infinity(a)),
                        TransformArg::R => Ok(series.cf_r_infinity(a)),
                        TransformArg::LaplaceO => series.laplace_o_infinity(a),
                    })
                    .collect()
            })??;
            write_csv_to(&out, |w| write_transform_csv(w, &evals))?;
            let transform_name = match transform {
                TransformArg::O => "cf_o_infinity",
                TransformArg::R => "cf_r_infinity",
                TransformArg::LaplaceO => "laplace_o_infinity",
            };
            Ok(Outcome {
                name: "spitzer-cf",
                resolved: json!({"law": law, "transform": transform_name, "grid": [min, max, points], "series": cfg}),
                seed: Some(common.seed),
                workers: common.workers,
                outputs: out.into_iter().collect(),
                manifest: common.manifest,
                pass: true,
            })
        }
        Command::Embed { law, t, x, paths, passage, out, common } => {
            positive("t", t)?;
            positive("x", x)?;
            let cfg = EmbedConfig {
                law,
                t,
                x,
                paths,
                master_seed: common.seed,
                passage: passage.into(),
            };
            let samples = with_workers(common.workers, || run_embedding(&cfg))??;
            write_csv_to(&out, |w| write_embedded_csv(w, &samples))?;
            let mut resolved = serde_json::to_value(&cfg)?;
            resolved["poisson_method"] = json!(poisson_method(t));
            Ok(Outcome {
                name: "embed",
                resolved,
                seed: Some(common.seed),
                workers: common.workers,
                outputs: out.into_iter().collect(),
                manifest: common.manifest,
                pass: true,
            })
        }
        Command::Verify { check } => run_check(check),
        Command::Replay { .. } => unreachable!("handled by run"),
    }
}

fn manifest_path(outcome: &Outcome) -> PathBuf {
    if let Some(p) = &outcome.manifest {
        return p.clone();
    }
    match outcome.outputs.first().and_then(|o| o.parent()) {
        Some(dir) if !dir.as_os_str().is_empty() => dir.join("manifest.json"),
        _ => PathBuf::from("manifest.json"),
    }
}

fn load_manifest(path: &Path) -> Result<Manifest> {
    Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
}

fn error_code(e: &Error) -> i32 {
    if e.is_config() {
        EXIT_USAGE
    } else {
        EXIT_RUNTIME
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Command::Replay { manifest } = cli.command {
        return match load_manifest(&manifest) {
            Ok(m) => {
                let mut argv = vec![OsString::from(m.tool)];
                argv.extend(m.args.into_iter().map(OsString::from));
                run(argv)
            }
            Err(e) => {
                eprintln!("error: cannot read manifest {}: {e}", manifest.display());
                EXIT_USAGE
            }
        };
    }
    let started = SystemTime::now();
    let clock = Instant::now();
    let outcome = match execute(cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    let code = if outcome.pass { EXIT_OK } else { EXIT_FAIL };
    let manifest = Manifest {
        tool: "segscore".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: outcome.name.into(),
        args: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
        resolved: outcome.resolved.clone(),
        seed: outcome.seed,
        workers: outcome.workers,
        outputs: outcome.outputs.clone(),
        exit_code: code,
        started_unix: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
    };
    let path = manifest_path(&outcome);
    let written = create(&path).and_then(|mut w| {
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    });
    if let Err(e) = written {
        eprintln!("error: cannot write manifest {}: {e}", path.display());
        return EXIT_RUNTIME;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_subcommand() {
        let cases: &[&[&str]] = &[
            &["segscore", "gamma", "--law", "gaussian_drift:mu=-0.5,sigma=1"],
            &["segscore", "simulate", "--n", "10", "--x", "1", "--y", "1", "--paths", "5", "--seed", "1"],
            &["segscore", "spitzer-cf", "--transform", "laplace-o", "--min", "-1", "--max", "2"],
            &["segscore", "embed", "--t", "5", "--x", "2", "--paths", "3"],
            &["segscore", "verify", "factorization", "--level", "25", "--paths", "10"],
            &["segscore", "verify", "independence"],
            &["segscore", "verify", "gumbel", "--n", "100"],
            &["segscore", "verify", "overshoot-limit"],
            &["segscore", "verify", "oracle", "--law", "two_point_lattice:p=0.3"],
            &["segscore", "verify", "zinf", "--v-grid", "0.5,1,2"],
            &["segscore", "verify", "overshoot-cf"],
            &["segscore", "replay", "m.json"],
        ];
        for c in cases {
            Cli::try_parse_from(*c).unwrap_or_else(|e| panic!("{c:?}: {e}"));
        }
    }

    #[test]
    fn bad_law_is_usage_error() {
        assert!(Cli::try_parse_from(["segscore", "gamma", "--law", "cauchy:x=1"]).is_err());
        assert_eq!(run(["segscore", "gamma", "--law", "cauchy:x=1"]), EXIT_USAGE);
    }
}
