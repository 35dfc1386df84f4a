//! Exact laws for integer-lattice step distributions by dynamic programming:
//! partial sums `S_n`, the reflected walk `R_n`, the joint CDF of
//! `(R_n, R*_n)`, and the first-passage overshoot `O_x`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::StepLaw;
use crate::output::fmt_real;

/// Largest support (in lattice points) any computation may produce.
pub const SUPPORT_CAP: usize = 100_000;
const MASS_TOL: f64 = 1e-10;
const MAX_ABSORB_ITERATIONS: usize = 1_000_000;

/// Finitely supported distribution on consecutive integers starting at
/// `offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePmf {
    pub offset: i64,
    pub probs: Vec<f64>,
}

impl LatticePmf {
    pub fn new(offset: i64, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter("pmf needs non-negative finite masses".into()));
        }
        let pmf = Self { offset, probs };
        if (pmf.mass() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("pmf mass is {}", pmf.mass())));
        }
        Ok(pmf)
    }

    pub fn point_mass(value: i64) -> Self {
        Self {
            offset: value,
            probs: vec![1.0],
        }
    }

    /// Lattice pmf of a lattice step law.
    pub fn from_step_law(law: &StepLaw) -> Result<Self> {
        match *law {
            StepLaw::TwoPointLattice { p } => Ok(Self {
                offset: -1,
                probs: vec![1.0 - p, 0.0, p],
            }),
            _ => Err(Error::ExactUnavailable),
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn min_value(&self) -> i64 {
        self.offset
    }

    pub fn max_value(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.offset + i as i64, p))
    }

    pub fn prob(&self, value: i64) -> f64 {
        let idx = value - self.offset;
        if idx < 0 {
            return 0.0;
        }
        self.probs.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(v, p)| v as f64 * p).sum()
    }

    /// `P(X <= value)`.
    pub fn cdf(&self, value: i64) -> f64 {
        self.iter().take_while(|(v, _)| *v <= value).map(|(_, p)| p).sum()
    }

    /// `E[exp(i theta X^+)]`, summed in index order.
    pub fn plus_cf(&self, theta: f64) -> Complex64 {
        self.iter()
            .map(|(v, p)| p * Complex64::from_polar(1.0, theta * v.max(0) as f64))
            .sum()
    }

    /// `E[exp(-v X^+)]`.
    pub fn plus_laplace(&self, v: f64) -> f64 {
        self.iter().map(|(x, p)| p * (-v * x.max(0) as f64).exp()).sum()
    }

    pub fn total_variation(&self, other: &LatticePmf) -> f64 {
        let lo = self.min_value().min(other.min_value());
        let hi = self.max_value().max(other.max_value());
        0.5 * (lo..=hi).map(|v| (self.prob(v) - other.prob(v)).abs()).sum::<f64>()
    }

    pub fn convolve(&self, other: &LatticePmf) -> Result<LatticePmf> {
        let len = self.len() + other.len() - 1;
        check_support(len)?;
        let mut probs = vec![0.0; len];
        for (i, &a) in self.probs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.probs.iter().enumerate() {
                probs[i + j] += a * b;
            }
        }
        Ok(LatticePmf {
            offset: self.offset + other.offset,
            probs,
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "value,probability")?;
        for (v, p) in self.iter() {
            writeln!(out, "{v},{}", fmt_real(p))?;
        }
        Ok(())
    }

    fn assert_conserved(&self, what: &str) {
        let mass = self.mass();
        assert!((mass - 1.0).abs() <= MASS_TOL, "{what}: mass drifted to {mass}");
    }
}

fn check_support(len: usize) -> Result<()> {
    if len > SUPPORT_CAP {
        Err(Error::SupportOverflow {
            len,
            cap: SUPPORT_CAP,
        })
    } else {
        Ok(())
    }
}

/// Laws of `S_1, ..., S_{n_max}`.
pub fn partial_sum_laws(step: &LatticePmf, n_max: usize) -> Result<Vec<LatticePmf>> {
    let mut laws: Vec<LatticePmf> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let next = match laws.last() {
            None => step.clone(),
            Some(prev) => prev.convolve(step)?,
        };
        next.assert_conserved("S_n");
        laws.push(next);
        debug_assert_eq!(laws.len(), n);
    }
    Ok(laws)
}

/// Exact law of `S_n`.
pub fn law_of_sn(step: &LatticePmf, n: usize) -> Result<LatticePmf> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(partial_sum_laws(step, n)?.pop().expect("n >= 1"))
}

/// One Lindley transition `r -> (r + xi)^+` applied to a law on `{0, 1, ...}`.
fn reflect_law(current: &[f64], step: &LatticePmf) -> Result<Vec<f64>> {
    let top = (current.len() as i64 - 1 + step.max_value()).max(0) as usize;
    check_support(top + 1)?;
    let mut next = vec![0.0; top + 1];
    for (r, &a) in current.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (v, b) in step.iter() {
            let target = (r as i64 + v).max(0) as usize;
            next[target] += a * b;
        }
    }
    while next.len() > 1 && *next.last().unwrap() == 0.0 {
        next.pop();
    }
    Ok(next)
}

/// Exact law of `R_n` started from `R_0 = 0`.
pub fn law_of_rn(step: &LatticePmf, n: usize) -> Result<LatticePmf> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut law = vec![1.0];
    for _ in 0..n {
        law = reflect_law(&law, step)?;
    }
    let pmf = LatticePmf {
        offset: 0,
        probs: law,
    };
    pmf.assert_conserved("R_n");
    Ok(pmf)
}

/// Table of `P(R_n <= w, R*_n <= y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointCdfTable {
    pub n: usize,
    /// `w = 0, 1, ..., w_max`.
    pub w_values: Vec<i64>,
    pub y_levels: Vec<i64>,
    /// `cdf[j][i] = P(R_n <= w_values[i], R*_n <= y_levels[j])`.
    pub cdf: Vec<Vec<f64>>,
}

impl JointCdfTable {
    pub fn get(&self, w: i64, y: i64) -> Option<f64> {
        let j = self.y_levels.iter().position(|&l| l == y)?;
        let w = w.min(*self.w_values.last()?);
        if w < 0 {
            return Some(0.0);
        }
        Some(self.cdf[j][w as usize])
    }
}

/// Joint CDF of `(R_n, R*_n)` by a killed recursion per level: paths whose
/// reflected value ever exceeds `y` are removed.
pub fn joint_rn_rstar(step: &LatticePmf, n: usize, y_levels: &[i64]) -> Result<JointCdfTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let w_max = (n as i64 * step.max_value()).max(0);
    check_support(w_max as usize + 1)?;
    let w_values: Vec<i64> = (0..=w_max).collect();
    let mut cdf = Vec::with_capacity(y_levels.len());
    for &y in y_levels {
        let mut row = vec![0.0; w_values.len()];
        if y >= 0 {
            let mut law = vec![1.0];
            for _ in 0..n {
                law = reflect_law(&law, step)?;
                law.truncate(y as usize + 1);
            }
            let mut acc = 0.0;
            for (w, slot) in row.iter_mut().enumerate() {
                acc += law.get(w).copied().unwrap_or(0.0);
                *slot = acc;
            }
        }
        cdf.push(row);
    }
    Ok(JointCdfTable {
        n,
        w_values,
        y_levels: y_levels.to_vec(),
        cdf,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvershootLaw {
    /// Law of `O_x`, supported on `1, 2, ...`, renormalised.
    pub pmf: LatticePmf,
    /// Mass still unabsorbed when the recursion stopped (`< eps`).
    pub unabsorbed: f64,
    pub iterations: usize,
    pub eps: f64,
}

/// Law of the overshoot of `R` over level `x`, from `R_0 = 0`.
pub fn law_of_ox(step: &LatticePmf, x: i64, eps: f64) -> Result<OvershootLaw> {
    if x < 0 || eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("need x >= 0 and eps > 0, got {x}, {eps}")));
    }
    let up = step.max_value();
    if up <= 0 {
        return Err(Error::NonConvergence {
            iterations: 0,
            remaining: 1.0,
        });
    }
    let states = x as usize + 1;
    let mut alive = vec![0.0; states];
    alive[0] = 1.0;
    let mut excess = vec![0.0; up as usize];
    let mut remaining = 1.0;
    let mut iterations = 0;
    while remaining >= eps {
        if iterations >= MAX_ABSORB_ITERATIONS {
            return Err(Error::NonConvergence {
                iterations,
                remaining,
            });
        }
        let mut next = vec![0.0; states];
        for (r, &a) in alive.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (v, b) in step.iter() {
                let target = (r as i64 + v).max(0);
                if target > x {
                    excess[(target - x - 1) as usize] += a * b;
                } else {
                    next[target as usize] += a * b;
                }
            }
        }
        alive = next;
        remaining = alive.iter().sum();
        iterations += 1;
    }
    let absorbed: f64 = excess.iter().sum();
    let probs: Vec<f64> = excess.iter().map(|p| p / absorbed).collect();
    Ok(OvershootLaw {
        pmf: LatticePmf { offset: 1, probs },
        unabsorbed: remaining,
        iterations,
        eps,
    })
}
