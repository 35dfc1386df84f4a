//! Goodness-of-fit and CDF-factorisation tests that turn samples into
//! pass/fail verdicts.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::{Purpose, RngStream};

/// Asymptotic 5% critical value of the scaled KS statistic.
pub const KS_CRITICAL_5PCT: f64 = 1.36;
/// Median of the standard Gumbel law, `-ln ln 2`.
pub const GUMBEL_MEDIAN: f64 = 0.366_512_920_581_664_3;
pub const DEFAULT_QUANTILE_RANKS: [f64; 3] = [0.25, 0.5, 0.75];
pub const DEFAULT_BOOTSTRAP: usize = 200;

pub fn exp1_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -(-t).exp_m1()
    }
}

pub fn gumbel_cdf(t: f64) -> f64 {
    (-(-t).exp()).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n_samples: usize,
    pub threshold: f64,
    pub pass: bool,
    pub reference: String,
}

impl KsReport {
    fn new(statistic: f64, n_samples: usize, threshold: f64, reference: impl Into<String>) -> Self {
        Self {
            statistic,
            n_samples,
            threshold,
            pass: statistic <= threshold,
            reference: reference.into(),
        }
    }
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Right-continuous empirical CDF at `t`.
pub fn ecdf(samples: &[f64], t: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(samples.iter().filter(|&&x| x <= t).count() as f64 / samples.len() as f64)
}

/// `sup_t |F_n(t) - F(t)|` for a continuous reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    let xs = sorted(samples)?;
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

/// One-sample KS test; `threshold` defaults to `1.36 / sqrt(n)`.
pub fn ks_test<F: Fn(f64) -> f64>(
    samples: &[f64],
    cdf: F,
    threshold: Option<f64>,
    reference: &str,
) -> Result<KsReport> {
    let stat = ks_statistic(samples, cdf)?;
    let n = samples.len();
    let threshold = threshold.unwrap_or(KS_CRITICAL_5PCT / (n as f64).sqrt());
    Ok(KsReport::new(stat, n, threshold, reference))
}

/// Two-sample KS statistic and test at `1.36 sqrt(1/n_a + 1/n_b)`.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> Result<KsReport> {
    let xa = sorted(a)?;
    let xb = sorted(b)?;
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let t = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= t {
            i += 1;
        }
        while j < xb.len() && xb[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let threshold = KS_CRITICAL_5PCT * (1.0 / na + 1.0 / nb).sqrt();
    Ok(KsReport::new(d, xa.len() + xb.len(), threshold, "two_sample"))
}

/// CDF evaluation point that may be `+inf`; JSON writes infinities as strings.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Level(pub f64);

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Level(v)),
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" => Ok(Level(f64::INFINITY)),
                "-inf" => Ok(Level(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!("bad level `{other}`"))),
            },
        }
    }
}

/// Product grid `levels[0] x levels[1] x levels[2]` of CDF evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceGrid {
    pub levels: [Vec<f64>; 3],
}

impl IndependenceGrid {
    pub fn new(levels: [Vec<f64>; 3]) -> Result<Self> {
        let mut levels = levels;
        for l in &mut levels {
            if l.is_empty() || l.iter().any(|v| v.is_nan()) {
                return Err(Error::InvalidParameter("grid levels must be non-empty and not NaN".into()));
            }
            l.sort_by(f64::total_cmp);
        }
        Ok(Self { levels })
    }

    /// Empirical quantiles (lower order statistics) of each coordinate at the
    /// given ranks; the default ranks give the 27-point grid.
    pub fn from_quantiles(samples: &[[f64; 3]], ranks: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        let levels = [0, 1, 2].map(|c| {
            let mut col: Vec<f64> = samples.iter().map(|s| s[c]).collect();
            col.sort_by(f64::total_cmp);
            ranks.iter().map(|&q| order_statistic(&col, q)).collect::<Vec<f64>>()
        });
        Self::new(levels)
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::new();
        for &a in &self.levels[0] {
            for &b in &self.levels[1] {
                for &c in &self.levels[2] {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }
}

/// `ceil(q n)`-th order statistic of sorted data.
fn order_statistic(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let k = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub grid: Vec<[Level; 3]>,
    pub joint_cdf: Vec<f64>,
    pub product_cdf: Vec<f64>,
    pub sup_diff: f64,
    /// 99th percentile of `sup_diff` under independently permuted coordinates.
    pub threshold: f64,
    /// Optional absolute ceiling on `sup_diff`.
    pub abs_threshold: Option<f64>,
    pub n_samples: usize,
    pub n_boot: usize,
    pub pass: bool,
}

/// Per-coordinate bin codes: code `c` means the value is `<=` exactly the
/// levels with index `>= c`.
struct Coded {
    codes: [Vec<u8>; 3],
    sizes: [usize; 3],
}

impl Coded {
    fn new(samples: &[[f64; 3]], grid: &IndependenceGrid) -> Self {
        let codes = [0, 1, 2].map(|c| {
            let levels = &grid.levels[c];
            samples
                .iter()
                .map(|s| levels.partition_point(|&l| l < s[c]) as u8)
                .collect::<Vec<u8>>()
        });
        let sizes = [0, 1, 2].map(|c| grid.levels[c].len());
        Self { codes, sizes }
    }

    /// Joint CDF on the grid, in `points()` order, for codes read through the
    /// given permutations of coordinates 1 and 2.
    fn joint(&self, perm1: Option<&[u32]>, perm2: Option<&[u32]>) -> Vec<f64> {
        let [m0, m1, m2] = self.sizes;
        let (s1, s2) = (m1 + 1, m2 + 1);
        let mut hist = vec![0u32; (m0 + 1) * s1 * s2];
        let n = self.codes[0].len();
        for i in 0..n {
            let i1 = perm1.map_or(i, |p| p[i] as usize);
            let i2 = perm2.map_or(i, |p| p[i] as usize);
            let (a, b, c) = (
                self.codes[0][i] as usize,
                self.codes[1][i1] as usize,
                self.codes[2][i2] as usize,
            );
            hist[(a * s1 + b) * s2 + c] += 1;
        }
        // Inclusive prefix sums along each axis turn cell counts into CDF counts.
        let idx = |a: usize, b: usize, c: usize| (a * s1 + b) * s2 + c;
        for a in 0..=m0 {
            for b in 0..s1 {
                for c in 1..s2 {
                    hist[idx(a, b, c)] += hist[idx(a, b, c - 1)];
                }
            }
        }
        for a in 0..=m0 {
            for b in 1..s1 {
                for c in 0..s2 {
                    hist[idx(a, b, c)] += hist[idx(a, b - 1, c)];
                }
            }
        }
        for a in 1..=m0 {
            for b in 0..s1 {
                for c in 0..s2 {
                    hist[idx(a, b, c)] += hist[idx(a - 1, b, c)];
                }
            }
        }
        let mut out = Vec::with_capacity(m0 * m1 * m2);
        for j0 in 0..m0 {
            for j1 in 0..m1 {
                for j2 in 0..m2 {
                    out.push(hist[idx(j0, j1, j2)] as f64 / n as f64);
                }
            }
        }
        out
    }

    fn product(&self) -> Vec<f64> {
        let n = self.codes[0].len() as f64;
        let marg = |c: usize| -> Vec<f64> {
            (0..self.sizes[c])
                .map(|j| self.codes[c].iter().filter(|&&k| (k as usize) <= j).count() as f64 / n)
                .collect()
        };
        let (f0, f1, f2) = (marg(0), marg(1), marg(2));
        let mut out = Vec::new();
        for a in &f0 {
            for b in &f1 {
                for c in &f2 {
                    out.push(a * b * c);
                }
            }
        }
        out
    }
}

fn sup_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Compares the empirical joint CDF of three coordinates with the product of
/// their empirical marginals on `grid` (defaults to the 27-point quantile
/// grid). The threshold is the 99th percentile of the same statistic over
/// `n_boot` resamples in which coordinates 2 and 3 are independently permuted.
pub fn independence_test(
    samples: &[[f64; 3]],
    grid: Option<IndependenceGrid>,
    n_boot: usize,
    bootstrap_seed: u64,
) -> Result<IndependenceReport> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    for c in 0..3 {
        let first = samples[0][c];
        if samples.iter().all(|s| s[c] == first) {
            return Err(Error::DegenerateCoordinate { index: c });
        }
    }
    if n_boot == 0 {
        return Err(Error::InvalidParameter("n_boot must be positive".into()));
    }
    let grid = match grid {
        Some(g) => g,
        None => IndependenceGrid::from_quantiles(samples, &DEFAULT_QUANTILE_RANKS)?,
    };
    if grid.levels.iter().any(|l| l.len() > 250) {
        return Err(Error::InvalidParameter("at most 250 levels per coordinate".into()));
    }
    let coded = Coded::new(samples, &grid);
    let joint = coded.joint(None, None);
    let product = coded.product();
    let sup_diff = sup_abs_diff(&joint, &product);

    let n = samples.len();
    let mut null: Vec<f64> = (0..n_boot as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(bootstrap_seed, b).rng_for(Purpose::Bootstrap);
            let mut p1: Vec<u32> = (0..n as u32).collect();
            let mut p2 = p1.clone();
            p1.shuffle(&mut rng);
            p2.shuffle(&mut rng);
            sup_abs_diff(&coded.joint(Some(&p1), Some(&p2)), &product)
        })
        .collect();
    null.sort_by(f64::total_cmp);
    let threshold = order_statistic(&null, 0.99);

    Ok(IndependenceReport {
        grid: grid.points().into_iter().map(|p| p.map(Level)).collect(),
        joint_cdf: joint,
        product_cdf: product,
        sup_diff,
        threshold,
        abs_threshold: None,
        n_samples: n,
        n_boot,
        pass: sup_diff <= threshold,
    })
}

impl IndependenceReport {
    pub fn with_abs_threshold(mut self, abs: f64) -> Self {
        self.abs_threshold = Some(abs);
        self.pass = self.sup_diff <= self.threshold && self.sup_diff < abs;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GumbelReport {
    pub location_hat: f64,
    pub statistic: f64,
    pub threshold: f64,
    pub n_samples: usize,
    pub pass: bool,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// KS test of `gamma R*_n - ln n`, shifted by a median-matched location,
/// against the standard Gumbel law.
pub fn gumbel_test(rstar_samples: &[f64], gamma: f64, n: u64) -> Result<GumbelReport> {
    let z: Vec<f64> = rstar_samples.iter().map(|&r| gamma * r - (n as f64).ln()).collect();
    gumbel_fit(&z)
}

/// Location-fitted KS test of already standardised samples.
pub fn gumbel_fit(z: &[f64]) -> Result<GumbelReport> {
    let zs = sorted(z)?;
    let location_hat = median(&zs) - GUMBEL_MEDIAN;
    let shifted: Vec<f64> = zs.iter().map(|v| v - location_hat).collect();
    let statistic = ks_statistic(&shifted, gumbel_cdf)?;
    let threshold = KS_CRITICAL_5PCT / (zs.len() as f64).sqrt();
    Ok(GumbelReport {
        location_hat,
        statistic,
        threshold,
        n_samples: zs.len(),
        pass: statistic <= threshold,
    })
}
