//! Path simulation of the reflected walk `R_k = (R_{k-1} + xi_k)^+`.
//!
//! One path yields the triplet `(R_n, R*_n - y, O_{x+y})`: the reflected value
//! at time `n`, the excess of the running maximum over `y`, and the overshoot
//! of `R` over `x + y` at its first passage above that level.
//!
//! The first passage can be found in two ways:
//!
//! * [`Passage::Direct`] keeps stepping until the level is crossed. The hit
//!   time is exact, but the expected cost grows like `exp(gamma * level)`.
//! * [`Passage::Regenerative`] steps directly through time `n` and through the
//!   excursion that straddles `n`. If that excursion returns to zero first, the
//!   walk has regenerated and the first excursion that crosses the level is an
//!   excursion conditioned on crossing. It is drawn exactly by proposing from
//!   the exponentially tilted step law and accepting a crossing with
//!   probability `M(gamma)^tau * exp(-gamma * overshoot)`. The resulting triplet
//!   has the same joint law as under `Direct`. The hit time is not observed in
//!   that case and is reported as `None`.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cramer::{solve_gamma, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::laws::{StepLaw, TiltedLaw};
use crate::output::fmt_real;
use crate::rng::RngStream;

pub const DEFAULT_MAX_TRIALS: u64 = 1_000_000;

/// One Lindley step: `(r + xi)^+`.
#[inline]
pub fn reflect_step(r: f64, xi: f64) -> f64 {
    (r + xi).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletSample {
    pub path_id: u64,
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub r_n: f64,
    /// `R*_n - y`; negative when the running maximum stays below `y`.
    pub q_ny: f64,
    /// Overshoot of `R` over `x + y` at first passage, strictly positive.
    pub o_xy: f64,
    /// First `k` with `R_k > x + y`, when observed.
    pub hit_time: Option<u64>,
}

impl TripletSample {
    pub fn rstar_n(&self) -> f64 {
        self.q_ny + self.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Passage {
    Direct,
    Regenerative { gamma: f64, max_trials: u64 },
}

impl Passage {
    /// Regenerative passage with the Cramér root of `law`.
    pub fn regenerative(law: &StepLaw) -> Result<Self> {
        let gamma = solve_gamma(law, DEFAULT_TOL)?.gamma;
        Ok(Passage::Regenerative {
            gamma,
            max_trials: DEFAULT_MAX_TRIALS,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassageMode {
    Direct,
    #[default]
    Regenerative,
}

/// State after the first `n` steps.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Prefix {
    pub r_n: f64,
    pub rstar_n: f64,
    /// `(overshoot, time)` if the level was crossed within the prefix.
    pub crossing: Option<(f64, u64)>,
}

pub(crate) fn run_prefix<S: FnMut() -> f64>(steps: &mut S, n: u64, level: f64) -> Prefix {
    let mut r = 0.0;
    let mut rstar = 0.0f64;
    let mut crossing = None;
    for k in 1..=n {
        r = reflect_step(r, steps());
        rstar = rstar.max(r);
        if crossing.is_none() && r > level {
            crossing = Some((r - level, k));
        }
    }
    Prefix {
        r_n: r,
        rstar_n: rstar,
        crossing,
    }
}

enum Continuation {
    Crossed { overshoot: f64, time: u64 },
    Regenerated,
    Capped,
}

/// Steps on from `(r, k)` until the level is crossed, the cap is hit, or (if
/// `stop_at_zero`) the reflected walk sits at zero.
fn continue_walk<S: FnMut() -> f64>(
    steps: &mut S,
    mut r: f64,
    mut k: u64,
    level: f64,
    max_steps: u64,
    stop_at_zero: bool,
) -> Continuation {
    loop {
        if stop_at_zero && r == 0.0 {
            return Continuation::Regenerated;
        }
        if k >= max_steps {
            return Continuation::Capped;
        }
        k += 1;
        r = reflect_step(r, steps());
        if r > level {
            return Continuation::Crossed {
                overshoot: r - level,
                time: k,
            };
        }
    }
}

/// Draws the overshoot of an excursion from zero conditioned on crossing
/// `level`, by rejection from the tilted law.
fn conditioned_overshoot<R: Rng + ?Sized>(
    tilted: &TiltedLaw,
    gamma: f64,
    log_mgf_gamma: f64,
    level: f64,
    rng: &mut R,
    max_trials: u64,
) -> Option<f64> {
    for _ in 0..max_trials {
        let mut s = 0.0;
        let mut tau = 0u64;
        loop {
            s += tilted.sample(rng);
            tau += 1;
            if s <= 0.0 {
                break;
            }
            if s > level {
                let overshoot = s - level;
                let log_accept = (tau as f64 * log_mgf_gamma - gamma * overshoot).min(0.0);
                if rng.random::<f64>() < log_accept.exp() {
                    return Some(overshoot);
                }
                break;
            }
        }
    }
    None
}

pub fn default_max_steps(law: &StepLaw, n: u64, x: f64, y: f64) -> u64 {
    n + (50.0 * (x + y) / law.mean().abs()).ceil() as u64
}

/// Simulates one path and returns its triplet.
///
/// `max_steps` caps the number of steps drawn from the original law; the
/// tilted proposals of the regenerative sampler are capped by trial count.
pub fn run_path(
    law: &StepLaw,
    n: u64,
    x: f64,
    y: f64,
    stream: &RngStream,
    max_steps: u64,
    passage: &Passage,
) -> Result<TripletSample> {
    let mut rng = stream.rng();
    let (r_n, rstar_n, overshoot, hit_time) =
        passage_on_rng(law, n, x + y, &mut rng, max_steps, passage, stream.stream_index)?;
    Ok(TripletSample {
        path_id: stream.stream_index,
        n,
        x,
        y,
        r_n,
        q_ny: rstar_n - y,
        o_xy: overshoot,
        hit_time,
    })
}

/// Shared by the walk and the Poisson embedding: prefix of `n` steps then
/// first passage above `level`, all drawn from `rng`.
pub(crate) fn passage_on_rng<R: Rng>(
    law: &StepLaw,
    n: u64,
    level: f64,
    rng: &mut R,
    max_steps: u64,
    passage: &Passage,
    path: u64,
) -> Result<(f64, f64, f64, Option<u64>)> {
    let stop_at_zero = matches!(passage, Passage::Regenerative { .. });
    let mut steps = || law.sample(&mut *rng);
    let prefix = run_prefix(&mut steps, n, level);
    if let Some((o, k)) = prefix.crossing {
        return Ok((prefix.r_n, prefix.rstar_n, o, Some(k)));
    }
    let cont = continue_walk(&mut steps, prefix.r_n, n, level, max_steps, stop_at_zero);
    let overshoot = match cont {
        Continuation::Crossed { overshoot, time } => {
            return Ok((prefix.r_n, prefix.rstar_n, overshoot, Some(time)));
        }
        Continuation::Capped => return Err(Error::HitCapExceeded { path, max_steps }),
        Continuation::Regenerated => {
            let Passage::Regenerative { gamma, max_trials } = *passage else {
                unreachable!("direct passage never stops at zero")
            };
            let tilted = law.tilted(gamma)?;
            let log_m = law.mgf(gamma).ln();
            conditioned_overshoot(&tilted, gamma, log_m, level, rng, max_trials)
                .ok_or(Error::RejectionCapExceeded { path, max_trials })?
        }
    };
    Ok((prefix.r_n, prefix.rstar_n, overshoot, None))
}

/// Triplet of a fixed step sequence under direct passage; the cap is the
/// sequence length.
pub fn triplet_from_steps(steps: &[f64], n: u64, x: f64, y: f64) -> Result<TripletSample> {
    let mut it = steps.iter().copied();
    let mut next = || it.next().unwrap_or(f64::NEG_INFINITY);
    let level = x + y;
    let max_steps = steps.len() as u64;
    let prefix = run_prefix(&mut next, n.min(max_steps), level);
    let (o, k) = match prefix.crossing {
        Some(c) => c,
        None => match continue_walk(&mut next, prefix.r_n, n, level, max_steps, false) {
            Continuation::Crossed { overshoot, time } => (overshoot, time),
            _ => return Err(Error::HitCapExceeded { path: 0, max_steps }),
        },
    };
    Ok(TripletSample {
        path_id: 0,
        n,
        x,
        y,
        r_n: prefix.r_n,
        q_ny: prefix.rstar_n - y,
        o_xy: o,
        hit_time: Some(k),
    })
}

/// `(R_n, R*_n)` for one path, without any first-passage work.
pub fn max_scores(law: &StepLaw, n: u64, stream: &RngStream) -> (f64, f64) {
    let mut rng = stream.rng();
    let mut steps = || law.sample(&mut rng);
    let prefix = run_prefix(&mut steps, n, f64::INFINITY);
    (prefix.r_n, prefix.rstar_n)
}

/// `max_{0 <= m <= n} S_m` for one path.
pub fn walk_maximum(law: &StepLaw, n: u64, stream: &RngStream) -> f64 {
    let mut rng = stream.rng();
    let mut s = 0.0;
    let mut best = 0.0f64;
    for _ in 0..n {
        s += law.sample(&mut rng);
        best = best.max(s);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub law: StepLaw,
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub paths: u64,
    pub master_seed: u64,
    /// Defaults to `n + ceil(50 (x + y) / |E xi|)`.
    pub max_steps: Option<u64>,
    #[serde(default)]
    pub passage: PassageMode,
}

impl BatchConfig {
    pub fn new(law: StepLaw, n: u64, x: f64, y: f64, paths: u64, master_seed: u64) -> Self {
        Self {
            law,
            n,
            x,
            y,
            paths,
            master_seed,
            max_steps: None,
            passage: PassageMode::default(),
        }
    }

    pub fn with_passage(mut self, passage: PassageMode) -> Self {
        self.passage = passage;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.law.validated()?;
        self.law.require_negative_drift()?;
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.x > 0.0 && self.x.is_finite()) || !(self.y >= 0.0 && self.y.is_finite()) {
            return bad(format!("need x > 0 and y >= 0, got x={} y={}", self.x, self.y));
        }
        if self.paths == 0 {
            return bad("paths must be at least 1".into());
        }
        if self.resolved_max_steps() < self.n {
            return bad("max_steps must be at least n".into());
        }
        Ok(())
    }

    pub fn resolved_max_steps(&self) -> u64 {
        self.max_steps
            .unwrap_or_else(|| default_max_steps(&self.law, self.n, self.x, self.y))
    }

    pub fn resolved_passage(&self) -> Result<Passage> {
        match self.passage {
            PassageMode::Direct => Ok(Passage::Direct),
            PassageMode::Regenerative => Passage::regenerative(&self.law),
        }
    }
}

/// Runs `cfg.paths` paths; path `i` reads stream `i`. Output order and values
/// do not depend on the rayon pool size.
pub fn run_batch(cfg: &BatchConfig) -> Result<Vec<TripletSample>> {
    cfg.validate()?;
    let passage = cfg.resolved_passage()?;
    let max_steps = cfg.resolved_max_steps();
    let results: Vec<Result<TripletSample>> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| {
            let stream = RngStream::new(cfg.master_seed, i);
            run_path(&cfg.law, cfg.n, cfg.x, cfg.y, &stream, max_steps, &passage)
        })
        .collect();
    results.into_iter().collect()
}

pub const TRIPLET_CSV_HEADER: &str = "path_id,n,x,y,r_n,q_ny,o_xy,hit_time";

pub fn write_triplets_csv<W: Write>(mut out: W, samples: &[TripletSample]) -> std::io::Result<()> {
    writeln!(out, "{TRIPLET_CSV_HEADER}")?;
    for s in samples {
        let hit = s.hit_time.map(|h| h.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.path_id,
            s.n,
            fmt_real(s.x),
            fmt_real(s.y),
            fmt_real(s.r_n),
            fmt_real(s.q_ny),
            fmt_real(s.o_xy),
            hit
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn gaussian() -> StepLaw {
        StepLaw::gaussian_drift(-0.5, 1.0).unwrap()
    }

    /// `max_{m < k} (S_k - S_m)^+` by double loop.
    fn brute_force_segment_max(steps: &[f64], k: usize) -> f64 {
        let partial: Vec<f64> = std::iter::once(0.0)
            .chain(steps.iter().scan(0.0, |s, &x| {
                *s += x;
                Some(*s)
            }))
            .collect();
        (0..k)
            .map(|m| (partial[k] - partial[m]).max(0.0))
            .fold(0.0, f64::max)
    }

    #[test]
    fn reflect_step_examples() {
        assert_eq!(reflect_step(0.0, -3.2), 0.0);
        let r1 = reflect_step(0.0, 2.0);
        let r2 = reflect_step(r1, -1.0);
        let r3 = reflect_step(r2, 3.0);
        assert_eq!([r1, r2, r3], [2.0, 1.0, 4.0]);
    }

    #[test]
    fn reflect_step_matches_segment_maximum() {
        let mut rng = RngStream::new(3, 0).rng();
        for _ in 0..1000 {
            let len = rng.random_range(1..=12);
            let steps: Vec<f64> = (0..len).map(|_| rng.random_range(-3.0..2.0)).collect();
            let mut r = 0.0;
            for k in 1..=len {
                r = reflect_step(r, steps[k - 1]);
                let oracle = brute_force_segment_max(&steps, k);
                assert!((r - oracle).abs() < 1e-12, "{steps:?} k={k}");
            }
        }
    }

    #[test]
    fn hand_computed_triplet() {
        let t = triplet_from_steps(&[2.0, -1.0, 3.0], 3, 2.0, 1.0).unwrap();
        assert_eq!(t.r_n, 4.0);
        assert_eq!(t.rstar_n(), 4.0);
        assert_eq!(t.q_ny, 3.0);
        assert_eq!(t.o_xy, 1.0);
        assert_eq!(t.hit_time, Some(3));
    }

    #[test]
    fn all_negative_steps_never_cross() {
        let steps = vec![-0.5; 10];
        let err = triplet_from_steps(&steps, 10, 1.0, 2.0).unwrap_err();
        assert!(matches!(err, Error::HitCapExceeded { .. }));
        let mut it = steps.iter().copied();
        let mut next = || it.next().unwrap();
        let prefix = run_prefix(&mut next, 10, 3.0);
        assert_eq!(prefix.r_n, 0.0);
        assert_eq!(prefix.rstar_n - 2.0, -2.0);
    }

    #[test]
    fn direct_cap_is_reported_with_path_index() {
        let law = StepLaw::gaussian_drift(-3.0, 0.1).unwrap();
        let cfg = BatchConfig {
            max_steps: Some(50),
            ..BatchConfig::new(law, 10, 5.0, 1.0, 4, 1)
        }
        .with_passage(PassageMode::Direct);
        assert!(matches!(run_batch(&cfg), Err(Error::HitCapExceeded { path: 0, max_steps: 50 })));
    }

    #[test]
    fn batch_invariants_hold() {
        let cfg = BatchConfig::new(gaussian(), 200, 4.0, 2.0, 2000, 9);
        for s in run_batch(&cfg).unwrap() {
            assert!(s.r_n >= 0.0);
            assert!(s.r_n <= s.q_ny + s.y + 1e-12);
            assert!(s.o_xy > 0.0);
            if let Some(h) = s.hit_time {
                assert!(h >= 1);
                if h <= s.n {
                    assert!(s.q_ny > s.x);
                }
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let cfg = BatchConfig::new(gaussian(), 500, 6.0, 3.0, 8, 42);
        let pool = |k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
        let one = pool(1).install(|| run_batch(&cfg)).unwrap();
        let eight = pool(8).install(|| run_batch(&cfg)).unwrap();
        let csv = |s: &[TripletSample]| {
            let mut buf = Vec::new();
            write_triplets_csv(&mut buf, s).unwrap();
            buf
        };
        assert_eq!(csv(&one), csv(&eight));
        assert!(one.iter().enumerate().all(|(i, s)| s.path_id == i as u64));
    }

    #[test]
    fn independent_seeds_agree_in_mean() {
        let stats = |seed| {
            let cfg = BatchConfig::new(gaussian(), 2000, 20.0, 5.0, 10_000, seed);
            let r: Vec<f64> = run_batch(&cfg).unwrap().iter().map(|s| s.r_n).collect();
            let m = r.iter().sum::<f64>() / r.len() as f64;
            let v = r.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (r.len() - 1) as f64;
            (m, v / r.len() as f64)
        };
        let (m1, v1) = stats(1);
        let (m2, v2) = stats(2);
        assert!((m1 - m2).abs() < 3.0 * (v1 + v2).sqrt(), "{m1} vs {m2}");
    }

    #[test]
    fn running_maximum_rarely_exceeds_high_level() {
        let cfg = BatchConfig::new(gaussian(), 2000, 1.0, 25.0, 10_000, 4);
        let samples = run_batch(&cfg).unwrap();
        let frac = samples.iter().filter(|s| s.q_ny > 0.0).count() as f64 / samples.len() as f64;
        assert!(frac < 0.05, "{frac}");
    }

    #[test]
    fn csv_renders_all_columns() {
        let t = triplet_from_steps(&[2.0, -1.0, 3.0], 3, 2.0, 1.0).unwrap();
        let mut buf = Vec::new();
        write_triplets_csv(&mut buf, &[t, TripletSample { hit_time: None, ..t }]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRIPLET_CSV_HEADER);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[4].parse::<f64>().unwrap(), 4.0);
        assert_eq!(fields[7], "3");
        assert!(lines[2].ends_with(','));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn larger_level_never_hits_earlier(seed in 0u64..1000, x in 0.5f64..3.0, dx in 0.0f64..2.0) {
            let law = gaussian();
            let stream = RngStream::new(seed, 0);
            let a = run_path(&law, 20, x, 0.5, &stream, 1_000_000, &Passage::Direct).unwrap();
            let b = run_path(&law, 20, x + dx, 0.5, &stream, 1_000_000, &Passage::Direct).unwrap();
            prop_assert!(b.hit_time.unwrap() >= a.hit_time.unwrap());
            prop_assert_eq!(a.r_n, b.r_n);
        }
    }
}
