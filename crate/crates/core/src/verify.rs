//! End-to-end checks of the limit laws. Each procedure simulates what it
//! needs from a master seed and returns a serializable report with a verdict.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cramer::{solve_gamma, DEFAULT_TOL};
use crate::embedding::{run_embedding, simulate_and_verify_zinf, EmbedConfig, ZinfReport};
use crate::error::{Error, Result};
use crate::lattice::{law_of_rn, LatticePmf};
use crate::laws::StepLaw;
use crate::rng::RngStream;
use crate::spitzer::{empirical_cf, linear_grid, SeriesConfig, SpitzerSeries, Truncation};
use crate::stats::{
    exp1_cdf, gumbel_test, independence_test, ks_statistic, two_sample_ks, GumbelReport, IndependenceReport,
    KsReport,
};
use crate::walk::{max_scores, run_batch, BatchConfig, PassageMode, TripletSample};

pub trait Verdict {
    fn pass(&self) -> bool;
}

/// Offset between the seeds of two batches that must be independent.
const SECOND_BATCH: u64 = 0x5851_F42D_4C95_7F2D;

fn check_paths(paths: u64) -> Result<()> {
    if paths < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 paths, got {paths}")));
    }
    Ok(())
}

fn batch(law: &StepLaw, n: u64, x: f64, y: f64, paths: u64, seed: u64, passage: PassageMode) -> Result<Vec<TripletSample>> {
    check_paths(paths)?;
    run_batch(&BatchConfig::new(*law, n, x, y, paths, seed).with_passage(passage))
}

/// Overshoots at `level` with a one-step prefix.
fn overshoots(law: &StepLaw, level: f64, paths: u64, seed: u64, passage: PassageMode) -> Result<Vec<f64>> {
    Ok(batch(law, 1, level, 0.0, paths, seed, passage)?.iter().map(|t| t.o_xy).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub law: StepLaw,
    pub gamma: f64,
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub paths: u64,
    pub seed: u64,
    /// KS test of `gamma (R_n + O_{x+y})` against Exp(1).
    pub ks: KsReport,
}

impl Verdict for FactorizationReport {
    fn pass(&self) -> bool {
        self.ks.pass
    }
}

#[allow(clippy::too_many_arguments)]
pub fn factorization(
    law: &StepLaw,
    n: u64,
    x: f64,
    y: f64,
    paths: u64,
    seed: u64,
    threshold: f64,
    passage: PassageMode,
) -> Result<FactorizationReport> {
    let gamma = solve_gamma(law, DEFAULT_TOL)?.gamma;
    let samples = batch(law, n, x, y, paths, seed, passage)?;
    let e: Vec<f64> = samples.iter().map(|t| gamma * (t.r_n + t.o_xy)).collect();
    let statistic = ks_statistic(&e, exp1_cdf)?;
    Ok(FactorizationReport {
        law: *law,
        gamma,
        n,
        x,
        y,
        paths,
        seed,
        ks: KsReport {
            statistic,
            n_samples: e.len(),
            threshold,
            pass: statistic < threshold,
            reference: "exp1".into(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    pub law: StepLaw,
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub paths: u64,
    pub seed: u64,
    /// Coordinates are `(R_n, R*_n - y, O_{x+y})`.
    pub report: IndependenceReport,
}

impl Verdict for IndependenceVerdict {
    fn pass(&self) -> bool {
        self.report.pass
    }
}

#[allow(clippy::too_many_arguments)]
pub fn independence(
    law: &StepLaw,
    n: u64,
    x: f64,
    y: f64,
    paths: u64,
    seed: u64,
    n_boot: usize,
    abs_threshold: f64,
    passage: PassageMode,
) -> Result<IndependenceVerdict> {
    let samples = batch(law, n, x, y, paths, seed, passage)?;
    let triples: Vec<[f64; 3]> = samples.iter().map(|t| [t.r_n, t.q_ny, t.o_xy]).collect();
    let report = independence_test(&triples, None, n_boot, seed)?.with_abs_threshold(abs_threshold);
    Ok(IndependenceVerdict {
        law: *law,
        n,
        x,
        y,
        paths,
        seed,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GumbelVerdict {
    pub law: StepLaw,
    pub gamma: f64,
    pub n: u64,
    pub paths: u64,
    pub seed: u64,
    pub report: GumbelReport,
}

impl Verdict for GumbelVerdict {
    fn pass(&self) -> bool {
        self.report.pass
    }
}

/// Samples of `R*_n`, one per path.
pub fn running_maxima(law: &StepLaw, n: u64, paths: u64, seed: u64) -> Vec<f64> {
    (0..paths)
        .into_par_iter()
        .map(|i| max_scores(law, n, &RngStream::new(seed, i)).1)
        .collect()
}

pub fn gumbel(law: &StepLaw, n: u64, paths: u64, seed: u64, threshold: f64) -> Result<GumbelVerdict> {
    law.require_negative_drift()?;
    check_paths(paths)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let gamma = solve_gamma(law, DEFAULT_TOL)?.gamma;
    let mut report = gumbel_test(&running_maxima(law, n, paths, seed), gamma, n)?;
    report.threshold = threshold;
    report.pass = report.statistic < threshold;
    Ok(GumbelVerdict {
        law: *law,
        gamma,
        n,
        paths,
        seed,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvershootLimitReport {
    pub law: StepLaw,
    pub levels: (f64, f64),
    pub paths: u64,
    pub seed: u64,
    pub ks: KsReport,
}

impl Verdict for OvershootLimitReport {
    fn pass(&self) -> bool {
        self.ks.pass
    }
}

/// Two-sample KS between overshoots at two levels, from independent batches.
pub fn overshoot_limit(
    law: &StepLaw,
    levels: (f64, f64),
    paths: u64,
    seed: u64,
    threshold: f64,
    passage: PassageMode,
) -> Result<OvershootLimitReport> {
    let a = overshoots(law, levels.0, paths, seed, passage)?;
    let b = overshoots(law, levels.1, paths, seed.wrapping_add(SECOND_BATCH), passage)?;
    let mut ks = two_sample_ks(&a, &b)?;
    ks.threshold = threshold;
    ks.pass = ks.statistic < threshold;
    ks.reference = format!("overshoot at level {}", levels.1);
    Ok(OvershootLimitReport {
        law: *law,
        levels,
        paths,
        seed,
        ks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub w: i64,
    pub exact_cdf: f64,
    pub empirical_cdf: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub law: StepLaw,
    pub n: u64,
    pub paths: u64,
    pub seed: u64,
    pub rows: Vec<OracleRow>,
    pub max_gap: f64,
    pub pass: bool,
}

impl Verdict for OracleReport {
    fn pass(&self) -> bool {
        self.pass
    }
}

/// Monte Carlo CDF of `R_n` against the exact lattice law at every support
/// point, within `max(3 binomial stderr, floor)`.
pub fn oracle(law: &StepLaw, n: u64, paths: u64, seed: u64, floor: f64) -> Result<OracleReport> {
    check_paths(paths)?;
    let step = LatticePmf::from_step_law(law)?;
    let exact = law_of_rn(&step, n as usize)?;
    let mut counts = vec![0u64; exact.max_value() as usize + 1];
    let draws: Vec<f64> = (0..paths)
        .into_par_iter()
        .map(|i| max_scores(law, n, &RngStream::new(seed, i)).0)
        .collect();
    for r in draws {
        let w = r.round() as usize;
        if w < counts.len() {
            counts[w] += 1;
        } else {
            return Err(Error::InvalidParameter(format!("sample {r} outside the lattice support")));
        }
    }
    let m = paths as f64;
    let mut cum = 0u64;
    let mut rows = Vec::with_capacity(counts.len());
    for (w, c) in counts.iter().enumerate() {
        cum += c;
        let f = exact.cdf(w as i64);
        rows.push(OracleRow {
            w: w as i64,
            exact_cdf: f,
            empirical_cdf: cum as f64 / m,
            tolerance: (3.0 * (f * (1.0 - f) / m).sqrt()).max(floor),
        });
    }
    let max_gap = rows.iter().map(|r| (r.exact_cdf - r.empirical_cdf).abs()).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| (r.exact_cdf - r.empirical_cdf).abs() <= r.tolerance);
    Ok(OracleReport {
        law: *law,
        n,
        paths,
        seed,
        rows,
        max_gap,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfRow {
    pub theta: f64,
    pub series_re: f64,
    pub series_im: f64,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvershootCfReport {
    pub law: StepLaw,
    pub level: f64,
    pub paths: u64,
    pub seed: u64,
    pub n_terms: usize,
    pub tail_bound: f64,
    pub rows: Vec<CfRow>,
    pub sup_gap: f64,
    pub threshold: f64,
    pub tail_target: f64,
    pub pass: bool,
}

impl Verdict for OvershootCfReport {
    fn pass(&self) -> bool {
        self.pass
    }
}

/// Empirical characteristic function of overshoots at `level` against the
/// series for the limiting overshoot, on `thetas`. The series terms come from
/// their own Monte Carlo pool seeded independently of the paths.
#[allow(clippy::too_many_arguments)]
pub fn overshoot_cf(
    law: &StepLaw,
    level: f64,
    paths: u64,
    seed: u64,
    thetas: &[f64],
    series_cfg: &SeriesConfig,
    threshold: f64,
    tail_target: f64,
) -> Result<OvershootCfReport> {
    let o = overshoots(law, level, paths, seed, PassageMode::Regenerative)?;
    let series = SpitzerSeries::new(law, series_cfg)?;
    let rows: Vec<CfRow> = thetas
        .iter()
        .map(|&theta| {
            let s = series.cf_o_infinity(theta).value;
            let e = empirical_cf(&o, theta);
            CfRow {
                theta,
                series_re: s.re,
                series_im: s.im,
                empirical_re: e.re,
                empirical_im: e.im,
                gap: (s - e).norm(),
            }
        })
        .collect();
    let sup_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(OvershootCfReport {
        law: *law,
        level,
        paths,
        seed,
        n_terms: series.n_terms(),
        tail_bound: series.tail_bound(),
        pass: sup_gap < threshold && series.tail_bound() < tail_target,
        rows,
        sup_gap,
        threshold,
        tail_target,
    })
}

/// The default grid for [`overshoot_cf`]: 41 points on `[-5, 5]`.
pub fn default_theta_grid() -> Vec<f64> {
    linear_grid(-5.0, 5.0, 41)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZinfVerdict {
    pub law: StepLaw,
    pub seed: u64,
    pub report: ZinfReport,
}

impl Verdict for ZinfVerdict {
    fn pass(&self) -> bool {
        self.report.pass
    }
}

#[allow(clippy::too_many_arguments)]
pub fn zinf(
    law: &StepLaw,
    v_grid: &[f64],
    paths: u64,
    level: f64,
    seed: u64,
    samples_per_term: usize,
    threshold: f64,
) -> Result<ZinfVerdict> {
    check_paths(paths)?;
    let series_cfg = SeriesConfig::monte_carlo(
        Truncation::TailTarget(crate::spitzer::DEFAULT_TAIL_TARGET),
        samples_per_term,
        seed.wrapping_add(SECOND_BATCH),
    );
    let report = simulate_and_verify_zinf(law, v_grid, paths, level, seed, &series_cfg, threshold)?;
    Ok(ZinfVerdict {
        law: *law,
        seed,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub law: StepLaw,
    pub t: f64,
    pub n: u64,
    pub paths: u64,
    pub seed: u64,
    /// Two-sample KS between `Y(t)` and `R_n`.
    pub ks: KsReport,
}

impl Verdict for DualityReport {
    fn pass(&self) -> bool {
        self.ks.pass
    }
}

/// Compares the embedded reflected value at time `t` with the walk's `R_n`
/// from an independent batch.
pub fn embedding_duality(law: &StepLaw, t: f64, n: u64, paths: u64, seed: u64, threshold: f64) -> Result<DualityReport> {
    check_paths(paths)?;
    let cfg = EmbedConfig {
        law: *law,
        t,
        x: 1.0,
        paths,
        master_seed: seed,
        passage: PassageMode::Regenerative,
    };
    let y_t: Vec<f64> = run_embedding(&cfg)?.iter().map(|s| s.y_t).collect();
    let other = seed.wrapping_add(SECOND_BATCH);
    let r_n: Vec<f64> = (0..paths)
        .into_par_iter()
        .map(|i| max_scores(law, n, &RngStream::new(other, i)).0)
        .collect();
    let mut ks = two_sample_ks(&y_t, &r_n)?;
    ks.threshold = threshold;
    ks.pass = ks.statistic < threshold;
    ks.reference = format!("R_n at n={n}");
    Ok(DualityReport {
        law: *law,
        t,
        n,
        paths,
        seed,
        ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_small_run_passes() {
        let law = StepLaw::two_point_lattice(0.3).unwrap();
        let r = oracle(&law, 10, 20_000, 1, 0.005).unwrap();
        assert_eq!(r.rows.len(), 11);
        assert!(r.pass, "{r:?}");
        assert!((r.rows.last().unwrap().empirical_cdf - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_continuous_law() {
        let law = StepLaw::gaussian_drift(-0.5, 1.0).unwrap();
        assert!(matches!(oracle(&law, 10, 100, 1, 0.005), Err(Error::ExactUnavailable)));
    }

    #[test]
    fn factorization_small_run() {
        let law = StepLaw::gaussian_drift(-0.5, 1.0).unwrap();
        let r = factorization(&law, 200, 6.0, 6.0, 5_000, 3, 0.03, PassageMode::Regenerative).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!((r.gamma - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overshoot_limit_detects_wrong_law() {
        let law = StepLaw::gaussian_drift(-0.5, 1.0).unwrap();
        let same = overshoot_limit(&law, (6.0, 12.0), 5_000, 4, 0.03, PassageMode::Regenerative).unwrap();
        assert!(same.pass(), "{same:?}");
        let a = overshoots(&law, 8.0, 5_000, 5, PassageMode::Regenerative).unwrap();
        let other = StepLaw::gaussian_drift(-0.5, 2.0).unwrap();
        let b = overshoots(&other, 8.0, 5_000, 6, PassageMode::Regenerative).unwrap();
        assert!(two_sample_ks(&a, &b).unwrap().statistic > 0.05);
    }

    #[test]
    fn reports_serialize() {
        let law = StepLaw::two_point_lattice(0.3).unwrap();
        let r = oracle(&law, 5, 100, 1, 0.5).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: OracleReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
