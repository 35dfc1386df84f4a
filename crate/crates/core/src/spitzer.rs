//! Transforms of the limiting overshoot `O_inf` and of the stationary reflected
//! walk `R_inf` through series over the positive parts `S_n^+`:
//!
//! ```text
//! E[exp(i t O_inf)]  = gamma / (gamma - i t) * exp{ sum_n (1 - E[exp(i t S_n^+)]) / n }
//! E[exp(i t R_inf)]  = exp{ sum_n (E[exp(i t S_n^+)] - 1) / n }
//! E[exp(-v O_inf)]   = gamma / (gamma + v)   * exp{ sum_n (1 - E[exp(-v S_n^+)]) / n }
//! ```
//!
//! The series are truncated at `N` terms. Since `|1 - E[exp(i t S_n^+)]| <=
//! 2 P(S_n > 0) <= 2 rho^n` with `rho` the minimum of the MGF on `[0, gamma]`,
//! the remainder is at most `2 rho^{N+1} / ((N + 1)(1 - rho))` for every `t`.
//!
//! Every term is evaluated in the split form `1 - E[e^{i t S_n^+}] =
//! E[(1 - e^{i t S_n}) 1{S_n > 0}]`, so only positive partial sums enter and
//! the transforms equal one exactly at the origin.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cramer::{solve_gamma, CramerSolution, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lattice::{partial_sum_laws, LatticePmf};
use crate::laws::StepLaw;
use crate::output::fmt_real;
use crate::rng::{Purpose, RngStream};

pub const MAX_TERMS: usize = 500;
pub const DEFAULT_TAIL_TARGET: f64 = 1e-6;
pub const DEFAULT_SAMPLES_PER_TERM: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    MonteCarlo { samples_per_term: usize },
    ExactLattice,
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Estimator::MonteCarlo { samples_per_term } => write!(f, "monte_carlo({samples_per_term})"),
            Estimator::ExactLattice => write!(f, "exact_lattice"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    Fixed(usize),
    /// Smallest `N <= MAX_TERMS` whose remainder bound is at most the target.
    TailTarget(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub truncation: Truncation,
    pub estimator: Estimator,
    /// Seed of the Monte Carlo pool; unused for exact terms.
    pub master_seed: u64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            truncation: Truncation::TailTarget(DEFAULT_TAIL_TARGET),
            estimator: Estimator::MonteCarlo {
                samples_per_term: DEFAULT_SAMPLES_PER_TERM,
            },
            master_seed: 0,
        }
    }
}

impl SeriesConfig {
    pub fn exact(truncation: Truncation) -> Self {
        Self {
            truncation,
            estimator: Estimator::ExactLattice,
            master_seed: 0,
        }
    }

    pub fn default_exact() -> Self {
        Self::exact(Truncation::TailTarget(DEFAULT_TAIL_TARGET))
    }

    pub fn monte_carlo(truncation: Truncation, samples_per_term: usize, master_seed: u64) -> Self {
        Self {
            truncation,
            estimator: Estimator::MonteCarlo { samples_per_term },
            master_seed,
        }
    }
}

/// One transform value with its error bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformEval {
    /// `theta` for characteristic functions, `v` for Laplace transforms.
    pub arg: f64,
    pub value: Complex64,
    pub n_terms: usize,
    pub tail_bound: f64,
    pub mc_stderr: f64,
    pub estimator: Estimator,
}

/// Uniform bound on the series remainder after `n_terms` terms.
pub fn truncation_bound(rho: f64, n_terms: usize) -> f64 {
    let m = (n_terms + 1) as f64;
    2.0 * rho.powf(m) / (m * (1.0 - rho))
}

pub fn terms_for_target(rho: f64, target: f64) -> usize {
    (1..=MAX_TERMS)
        .find(|&n| truncation_bound(rho, n) <= target)
        .unwrap_or(MAX_TERMS)
}

/// Estimate of `E[exp(i theta S_n^+)]` and its standard error.
pub fn moment_plus_cf(
    law: &StepLaw,
    n: usize,
    theta: f64,
    estimator: &Estimator,
    stream: &RngStream,
) -> Result<(Complex64, f64)> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    match *estimator {
        Estimator::ExactLattice => {
            let step = LatticePmf::from_step_law(law)?;
            let sn = partial_sum_laws(&step, n)?.pop().expect("n >= 1");
            Ok((exact_term(&sn, theta), 0.0))
        }
        Estimator::MonteCarlo { samples_per_term } => {
            if samples_per_term < 2 {
                return Err(Error::InvalidParameter("need at least 2 samples per term".into()));
            }
            let mut rng = stream.rng_for(Purpose::SeriesPool);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sum_sq = 0.0;
            for _ in 0..samples_per_term {
                let s: f64 = (0..n).map(|_| law.sample(&mut rng)).sum();
                let z = Complex64::from_polar(1.0, theta * s.max(0.0));
                sum += z;
                sum_sq += z.norm_sqr();
            }
            let m = samples_per_term as f64;
            let mean = sum / m;
            let var = (sum_sq - m * mean.norm_sqr()).max(0.0) / (m - 1.0);
            Ok((mean, (var / m).sqrt()))
        }
    }
}

fn exact_term(sn: &LatticePmf, theta: f64) -> Complex64 {
    Complex64::new(1.0, 0.0) - exact_deficit(sn, |s| Complex64::from_polar(1.0, theta * s))
}

/// `E[(1 - k(S_n)) 1{S_n > 0}]` for an exact lattice law.
fn exact_deficit<K: Fn(f64) -> Complex64>(sn: &LatticePmf, kernel: K) -> Complex64 {
    sn.iter()
        .filter(|(v, _)| *v > 0)
        .map(|(v, p)| p * (Complex64::new(1.0, 0.0) - kernel(v as f64)))
        .sum()
}

enum TermSource {
    Exact(Vec<LatticePmf>),
    /// Positive partial sums of each pooled walk, as `(n, S_n)` pairs.
    Pool {
        paths: usize,
        starts: Vec<usize>,
        entries: Vec<(u32, f64)>,
    },
}

/// Truncated series with its term estimates computed once and shared by
/// every transform and every argument (common random numbers).
pub struct SpitzerSeries {
    law: StepLaw,
    cramer: CramerSolution,
    gamma: f64,
    n_terms: usize,
    tail_bound: f64,
    estimator: Estimator,
    source: TermSource,
}

impl SpitzerSeries {
    pub fn new(law: &StepLaw, cfg: &SeriesConfig) -> Result<Self> {
        let cramer = solve_gamma(law, DEFAULT_TOL)?;
        let n_terms = match cfg.truncation {
            Truncation::Fixed(n) if n >= 1 => n,
            Truncation::Fixed(_) => return Err(Error::InvalidParameter("need at least one term".into())),
            Truncation::TailTarget(t) if t > 0.0 => terms_for_target(cramer.rho, t),
            Truncation::TailTarget(t) => {
                return Err(Error::InvalidParameter(format!("tail target must be positive, got {t}")))
            }
        };
        let source = match cfg.estimator {
            Estimator::ExactLattice => {
                let step = LatticePmf::from_step_law(law)?;
                TermSource::Exact(partial_sum_laws(&step, n_terms)?)
            }
            Estimator::MonteCarlo { samples_per_term } => {
                if samples_per_term < 2 {
                    return Err(Error::InvalidParameter("need at least 2 samples per term".into()));
                }
                build_pool(law, n_terms, samples_per_term, cfg.master_seed)
            }
        };
        Ok(Self {
            law: *law,
            cramer,
            gamma: cramer.gamma,
            n_terms,
            tail_bound: truncation_bound(cramer.rho, n_terms),
            estimator: cfg.estimator,
            source,
        })
    }

    /// Uses `gamma` in the `gamma / (gamma -+ ...)` prefactors instead of the
    /// solver's root.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn law(&self) -> &StepLaw {
        &self.law
    }

    pub fn cramer(&self) -> &CramerSolution {
        &self.cramer
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Term estimate `E[exp(i theta S_n^+)]`, `1 <= n <= n_terms`.
    pub fn term(&self, n: usize, theta: f64) -> Complex64 {
        assert!((1..=self.n_terms).contains(&n), "term index {n} out of range");
        match &self.source {
            TermSource::Exact(laws) => exact_term(&laws[n - 1], theta),
            TermSource::Pool {
                paths,
                starts,
                entries,
            } => {
                let deficit: Complex64 = (0..*paths)
                    .flat_map(|j| &entries[starts[j]..starts[j + 1]])
                    .filter(|(k, _)| *k as usize == n)
                    .map(|&(_, s)| Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta * s))
                    .sum();
                Complex64::new(1.0, 0.0) - deficit / *paths as f64
            }
        }
    }

    /// `sum_{n <= N} E[(1 - k(S_n)) 1{S_n > 0}] / n` and its standard error.
    fn exponent<K: Fn(f64) -> Complex64>(&self, kernel: K) -> (Complex64, f64) {
        match &self.source {
            TermSource::Exact(laws) => {
                let sum = laws
                    .iter()
                    .enumerate()
                    .map(|(i, sn)| exact_deficit(sn, &kernel) / (i + 1) as f64)
                    .sum();
                (sum, 0.0)
            }
            TermSource::Pool {
                paths,
                starts,
                entries,
            } => {
                let per_path = |j: usize| -> Complex64 {
                    entries[starts[j]..starts[j + 1]]
                        .iter()
                        .map(|&(n, s)| (Complex64::new(1.0, 0.0) - kernel(s)) / n as f64)
                        .sum()
                };
                let m = *paths as f64;
                let mean: Complex64 = (0..*paths).map(per_path).sum::<Complex64>() / m;
                let ss: f64 = (0..*paths).map(|j| (per_path(j) - mean).norm_sqr()).sum();
                (mean, (ss / (m - 1.0) / m).sqrt())
            }
        }
    }

    fn eval(&self, arg: f64, value: Complex64, exponent_stderr: f64) -> TransformEval {
        TransformEval {
            arg,
            value,
            n_terms: self.n_terms,
            tail_bound: self.tail_bound,
            mc_stderr: value.norm() * exponent_stderr,
            estimator: self.estimator,
        }
    }

    pub fn cf_o_infinity(&self, theta: f64) -> TransformEval {
        let (a, se) = self.exponent(|s| Complex64::from_polar(1.0, theta * s));
        let prefactor = Complex64::new(self.gamma, 0.0) / Complex64::new(self.gamma, -theta);
        self.eval(theta, prefactor * a.exp(), se)
    }

    pub fn cf_r_infinity(&self, theta: f64) -> TransformEval {
        let (a, se) = self.exponent(|s| Complex64::from_polar(1.0, theta * s));
        self.eval(theta, (-a).exp(), se)
    }

    pub fn laplace_o_infinity(&self, v: f64) -> Result<TransformEval> {
        if v.is_nan() || v < 0.0 {
            return Err(Error::InvalidParameter(format!("need v >= 0, got {v}")));
        }
        let (a, se) = self.exponent(|s| Complex64::new((-v * s).exp(), 0.0));
        let value = self.gamma / (self.gamma + v) * a.re.exp();
        Ok(self.eval(v, Complex64::new(value, 0.0), se))
    }
}

fn build_pool(law: &StepLaw, n_terms: usize, paths: usize, master_seed: u64) -> TermSource {
    let per_path: Vec<Vec<(u32, f64)>> = (0..paths as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = RngStream::new(master_seed, j).rng_for(Purpose::SeriesPool);
            let mut s = 0.0;
            let mut positives = Vec::new();
            for n in 1..=n_terms {
                s += law.sample(&mut rng);
                if s > 0.0 {
                    positives.push((n as u32, s));
                }
            }
            positives
        })
        .collect();
    let mut starts = Vec::with_capacity(paths + 1);
    let mut entries = Vec::new();
    starts.push(0);
    for p in per_path {
        entries.extend(p);
        starts.push(entries.len());
    }
    TermSource::Pool {
        paths,
        starts,
        entries,
    }
}

pub fn cf_o_infinity(law: &StepLaw, gamma: f64, theta: f64, cfg: &SeriesConfig) -> Result<TransformEval> {
    Ok(SpitzerSeries::new(law, cfg)?.with_gamma(gamma).cf_o_infinity(theta))
}

pub fn cf_r_infinity(law: &StepLaw, theta: f64, cfg: &SeriesConfig) -> Result<TransformEval> {
    Ok(SpitzerSeries::new(law, cfg)?.cf_r_infinity(theta))
}

pub fn laplace_o_infinity(law: &StepLaw, gamma: f64, v: f64, cfg: &SeriesConfig) -> Result<TransformEval> {
    SpitzerSeries::new(law, cfg)?.with_gamma(gamma).laplace_o_infinity(v)
}

pub const TRANSFORM_CSV_HEADER: &str = "arg,re,im,n_terms,tail_bound,mc_stderr,estimator";

pub fn write_transform_csv<W: std::io::Write>(mut out: W, evals: &[TransformEval]) -> std::io::Result<()> {
    writeln!(out, "{TRANSFORM_CSV_HEADER}")?;
    for e in evals {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_real(e.arg),
            fmt_real(e.value.re),
            fmt_real(e.value.im),
            e.n_terms,
            fmt_real(e.tail_bound),
            fmt_real(e.mc_stderr),
            e.estimator
        )?;
    }
    Ok(())
}

/// Empirical characteristic function `mean(exp(i theta x))`.
pub fn empirical_cf(samples: &[f64], theta: f64) -> Complex64 {
    let sum: Complex64 = samples.iter().map(|&x| Complex64::from_polar(1.0, theta * x)).sum();
    sum / samples.len() as f64
}

/// Evenly spaced grid of `points` values on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}
