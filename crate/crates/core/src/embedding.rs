//! Compound-Poisson embedding `X(t) = S_{N(t)}` with a unit-rate Poisson
//! clock `N`, its reflection `Y(t) = R_{N(t)}`, running maximum `Y*(t)`, and
//! first-passage overshoot `Z(x)`.
//!
//! The clock is drawn from its own generator while the steps come from the
//! same stream the walk engine uses, so `Z(x)` coincides pathwise with the
//! walk's `O_x` whenever the walk is run with `n = N(t)`.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::StepLaw;
use crate::output::fmt_real;
use crate::rng::{Purpose, RngStream};
use crate::spitzer::{SeriesConfig, SpitzerSeries};
use crate::walk::{passage_on_rng, Passage, PassageMode};

/// Largest mean sampled by inversion.
pub const INVERSION_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoissonMethod {
    /// Sequential search on the CDF.
    Inversion,
    /// Ahrens-Dieter exact rejection (via `rand_distr`).
    Rejection,
}

pub fn poisson_method(t: f64) -> PoissonMethod {
    if t <= INVERSION_LIMIT {
        PoissonMethod::Inversion
    } else {
        PoissonMethod::Rejection
    }
}

pub fn sample_poisson<R: Rng + ?Sized>(t: f64, rng: &mut R) -> u64 {
    match poisson_method(t) {
        PoissonMethod::Inversion => {
            let u: f64 = rng.random();
            let mut k = 0u64;
            let mut p = (-t).exp();
            let mut cdf = p;
            while u > cdf && p > 0.0 {
                k += 1;
                p *= t / k as f64;
                cdf += p;
            }
            k
        }
        PoissonMethod::Rejection => {
            let dist = Poisson::new(t).expect("t is positive and finite");
            let k: f64 = dist.sample(rng);
            k as u64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedSample {
    pub path_id: u64,
    pub t: f64,
    pub x: f64,
    pub n_of_t: u64,
    pub y_t: f64,
    pub ystar_t: f64,
    pub z_x: f64,
    /// Step index of the first passage above `x`, when observed.
    pub tau_hit_index: Option<u64>,
}

fn default_extra_steps(law: &StepLaw, x: f64) -> u64 {
    (50.0 * x / law.mean().abs()).ceil() as u64
}

/// One embedded path. `max_steps` defaults to `N(t) + ceil(50 x / |E xi|)`.
pub fn embed_path(
    law: &StepLaw,
    t: f64,
    x: f64,
    stream: &RngStream,
    passage: &Passage,
    max_steps: Option<u64>,
) -> Result<EmbeddedSample> {
    if !(t > 0.0 && t.is_finite()) || !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("need t > 0 and x > 0, got t={t} x={x}")));
    }
    let n_of_t = sample_poisson(t, &mut stream.rng_for(Purpose::PoissonClock));
    let cap = max_steps.unwrap_or(n_of_t + default_extra_steps(law, x)).max(n_of_t);
    let mut rng = stream.rng();
    let (y_t, ystar_t, z_x, tau) = passage_on_rng(law, n_of_t, x, &mut rng, cap, passage, stream.stream_index)?;
    Ok(EmbeddedSample {
        path_id: stream.stream_index,
        t,
        x,
        n_of_t,
        y_t,
        ystar_t,
        z_x,
        tau_hit_index: tau,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub law: StepLaw,
    pub t: f64,
    pub x: f64,
    pub paths: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub passage: PassageMode,
}

pub fn run_embedding(cfg: &EmbedConfig) -> Result<Vec<EmbeddedSample>> {
    cfg.law.validated()?;
    cfg.law.require_negative_drift()?;
    if cfg.paths == 0 {
        return Err(Error::InvalidParameter("paths must be at least 1".into()));
    }
    let passage = match cfg.passage {
        PassageMode::Direct => Passage::Direct,
        PassageMode::Regenerative => Passage::regenerative(&cfg.law)?,
    };
    let results: Vec<Result<EmbeddedSample>> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| embed_path(&cfg.law, cfg.t, cfg.x, &RngStream::new(cfg.master_seed, i), &passage, None))
        .collect();
    results.into_iter().collect()
}

pub const EMBED_CSV_HEADER: &str = "path_id,t,x,n_of_t,y_t,ystar_t,z_x,tau_hit_index";

pub fn write_embedded_csv<W: Write>(mut out: W, samples: &[EmbeddedSample]) -> std::io::Result<()> {
    writeln!(out, "{EMBED_CSV_HEADER}")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.path_id,
            fmt_real(s.t),
            fmt_real(s.x),
            s.n_of_t,
            fmt_real(s.y_t),
            fmt_real(s.ystar_t),
            fmt_real(s.z_x),
            s.tau_hit_index.map(|k| k.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZinfRow {
    pub v: f64,
    /// Sample mean of `exp(-v Z(x))`.
    pub empirical: f64,
    pub empirical_stderr: f64,
    /// Series value of `E[exp(-v Z(inf))]`.
    pub series: f64,
    pub series_mc_stderr: f64,
    pub tail_bound: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZinfReport {
    pub level_x: f64,
    pub paths: u64,
    pub rows: Vec<ZinfRow>,
    pub max_gap: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Compares the empirical Laplace transform of overshoots `Z(x)` with the
/// series for `E[exp(-v Z(inf))]` on `v_grid`.
pub fn verify_zinf(
    overshoots: &[f64],
    level_x: f64,
    series: &SpitzerSeries,
    v_grid: &[f64],
    threshold: f64,
) -> Result<ZinfReport> {
    if overshoots.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = overshoots.len() as f64;
    let rows = v_grid
        .iter()
        .map(|&v| {
            let vals: Vec<f64> = overshoots.iter().map(|z| (-v * z).exp()).collect();
            let mean = vals.iter().sum::<f64>() / m;
            let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
            let eval = series.laplace_o_infinity(v)?;
            Ok(ZinfRow {
                v,
                empirical: mean,
                empirical_stderr: (var / m).sqrt(),
                series: eval.value.re,
                series_mc_stderr: eval.mc_stderr,
                tail_bound: eval.tail_bound,
                gap: (mean - eval.value.re).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(ZinfReport {
        level_x,
        paths: overshoots.len() as u64,
        rows,
        max_gap,
        threshold,
        pass: max_gap < threshold,
    })
}

/// Simulates `paths` embedded overshoots at `level_x` and runs
/// [`verify_zinf`] against a freshly built series.
pub fn simulate_and_verify_zinf(
    law: &StepLaw,
    v_grid: &[f64],
    paths: u64,
    level_x: f64,
    master_seed: u64,
    series_cfg: &SeriesConfig,
    threshold: f64,
) -> Result<ZinfReport> {
    let cfg = EmbedConfig {
        law: *law,
        t: 1.0,
        x: level_x,
        paths,
        master_seed,
        passage: PassageMode::Regenerative,
    };
    let z: Vec<f64> = run_embedding(&cfg)?.iter().map(|s| s.z_x).collect();
    let series = SpitzerSeries::new(law, series_cfg)?;
    verify_zinf(&z, level_x, &series, v_grid, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{max_scores, reflect_step, run_path};

    fn gaussian() -> StepLaw {
        StepLaw::gaussian_drift(-0.5, 1.0).unwrap()
    }

    #[test]
    fn poisson_moments_both_methods() {
        for t in [3.0, 50.0] {
            let mut rng = RngStream::new(1, 0).rng_for(Purpose::Auxiliary);
            let n = 40_000;
            let draws: Vec<f64> = (0..n).map(|_| sample_poisson(t, &mut rng) as f64).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
            assert!((mean - t).abs() < 4.0 * (t / n as f64).sqrt(), "t={t} mean={mean}");
            assert!((var / t - 1.0).abs() < 0.05, "t={t} var={var}");
        }
        assert_eq!(poisson_method(10.0), PoissonMethod::Inversion);
        assert_eq!(poisson_method(10.5), PoissonMethod::Rejection);
    }

    #[test]
    fn clock_mean_at_t_50() {
        let law = gaussian();
        let passage = Passage::regenerative(&law).unwrap();
        let n = 10_000;
        let mean = (0..n)
            .map(|i| embed_path(&law, 50.0, 3.0, &RngStream::new(2, i), &passage, None).unwrap().n_of_t as f64)
            .sum::<f64>()
            / n as f64;
        assert!((mean - 50.0).abs() < 3.0 * 50f64.sqrt() / 100.0, "{mean}");
    }

    #[test]
    fn overshoot_matches_walk_pathwise() {
        let law = gaussian();
        let mut cfg_rng = RngStream::new(3, 0).rng_for(Purpose::Auxiliary);
        for i in 0..1000u64 {
            let t = cfg_rng.random_range(0.5..300.0);
            let x = cfg_rng.random_range(0.5..8.0);
            let passage = if i % 2 == 0 { Passage::Direct } else { Passage::regenerative(&law).unwrap() };
            let stream = RngStream::new(4, i);
            let e = embed_path(&law, t, x, &stream, &passage, Some(u64::MAX)).unwrap();
            let w = run_path(&law, e.n_of_t.max(1), x, 0.0, &stream, u64::MAX, &passage).unwrap();
            if e.n_of_t >= 1 {
                assert_eq!(e.z_x, w.o_xy);
                assert_eq!(e.y_t, w.r_n);
                assert_eq!(e.ystar_t, w.rstar_n());
            }
        }
    }

    #[test]
    fn ystar_is_max_of_reflected_values() {
        let law = gaussian();
        let passage = Passage::regenerative(&law).unwrap();
        for i in 0..200u64 {
            let stream = RngStream::new(5, i);
            let e = embed_path(&law, 40.0, 4.0, &stream, &passage, None).unwrap();
            let mut rng = stream.rng();
            let mut r = 0.0;
            let mut top = 0.0f64;
            for _ in 0..e.n_of_t {
                r = reflect_step(r, law.sample(&mut rng));
                top = top.max(r);
            }
            assert_eq!(e.ystar_t, top);
            assert_eq!(e.y_t, r);
            assert!(e.y_t <= e.ystar_t && e.z_x > 0.0);
            assert_eq!(max_scores(&law, e.n_of_t, &stream), (r, top));
        }
    }

    #[test]
    fn csv_layout() {
        let law = gaussian();
        let cfg = EmbedConfig {
            law,
            t: 20.0,
            x: 3.0,
            paths: 3,
            master_seed: 1,
            passage: PassageMode::Regenerative,
        };
        let samples = run_embedding(&cfg).unwrap();
        let mut buf = Vec::new();
        write_embedded_csv(&mut buf, &samples).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some(EMBED_CSV_HEADER));
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 8));
    }

    #[test]
    fn zinf_at_zero_and_error_budget() {
        let law = gaussian();
        let series = SpitzerSeries::new(
            &law,
            &SeriesConfig::monte_carlo(crate::spitzer::Truncation::TailTarget(1e-6), 50_000, 11),
        )
        .unwrap();
        let cfg = EmbedConfig {
            law,
            t: 1.0,
            x: 20.0,
            paths: 20_000,
            master_seed: 12,
            passage: PassageMode::Regenerative,
        };
        let z: Vec<f64> = run_embedding(&cfg).unwrap().iter().map(|s| s.z_x).collect();
        let report = verify_zinf(&z, 20.0, &series, &[0.0, 0.5, 1.0, 2.0], 0.01).unwrap();
        assert_eq!(report.rows[0].gap, 0.0);
        for row in &report.rows {
            let budget = 3.0 * (row.empirical_stderr.powi(2) + row.series_mc_stderr.powi(2)).sqrt() + row.tail_bound;
            assert!(row.gap <= budget + 1e-12, "{row:?}");
        }
    }
}
