//! Parametric step-size laws with exact means and moment generating functions.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of a single increment of the walk.
///
/// The JSON form is internally tagged by `family`, e.g.
/// `{"family":"gaussian_drift","mu":-0.5,"sigma":1.0}`; the compact form is
/// `gaussian_drift:mu=-0.5,sigma=1.0` (see [`StepLaw::from_str`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepLaw {
    /// `N(mu, sigma^2)`.
    GaussianDrift { mu: f64, sigma: f64 },
    /// `E - c` with `E ~ Exp(lambda)`.
    ExpMinusDrift { lambda: f64, c: f64 },
    /// `mu + L` with `L` a centred Laplace variable of scale `b`.
    LaplaceDrift { mu: f64, b: f64 },
    /// `+1` with probability `p`, `-1` otherwise.
    TwoPointLattice { p: f64 },
}

impl StepLaw {
    pub fn gaussian_drift(mu: f64, sigma: f64) -> Result<Self> {
        Self::GaussianDrift { mu, sigma }.validated()
    }

    pub fn exp_minus_drift(lambda: f64, c: f64) -> Result<Self> {
        Self::ExpMinusDrift { lambda, c }.validated()
    }

    pub fn laplace_drift(mu: f64, b: f64) -> Result<Self> {
        Self::LaplaceDrift { mu, b }.validated()
    }

    pub fn two_point_lattice(p: f64) -> Result<Self> {
        Self::TwoPointLattice { p }.validated()
    }

    /// Checks parameter domains. Drift sign is checked separately by
    /// [`StepLaw::require_negative_drift`] so that the Cramér solver can
    /// report it as its own error.
    pub fn validated(self) -> Result<Self> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{}: {what}", self.family())));
        match self {
            Self::GaussianDrift { mu, sigma } => {
                if !mu.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
                    return bad("need finite mu and sigma > 0");
                }
            }
            Self::ExpMinusDrift { lambda, c } => {
                if !(lambda.is_finite() && lambda > 0.0) || !(c.is_finite() && c > 0.0) {
                    return bad("need lambda > 0 and c > 0");
                }
            }
            Self::LaplaceDrift { mu, b } => {
                if !mu.is_finite() || !(b.is_finite() && b > 0.0) {
                    return bad("need finite mu and b > 0");
                }
            }
            Self::TwoPointLattice { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return bad("need 0 <= p <= 1");
                }
            }
        }
        Ok(self)
    }

    pub fn require_negative_drift(&self) -> Result<()> {
        let mean = self.mean();
        if mean < 0.0 {
            Ok(())
        } else {
            Err(Error::NegDriftViolated { mean })
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::GaussianDrift { .. } => "gaussian_drift",
            Self::ExpMinusDrift { .. } => "exp_minus_drift",
            Self::LaplaceDrift { .. } => "laplace_drift",
            Self::TwoPointLattice { .. } => "two_point_lattice",
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, Self::TwoPointLattice { .. })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::GaussianDrift { mu, .. } => mu,
            Self::ExpMinusDrift { lambda, c } => 1.0 / lambda - c,
            Self::LaplaceDrift { mu, .. } => mu,
            Self::TwoPointLattice { p } => 2.0 * p - 1.0,
        }
    }

    /// Right end of the MGF domain: `mgf(s)` is finite exactly for `s < s_hi`.
    pub fn mgf_domain_end(&self) -> f64 {
        match *self {
            Self::GaussianDrift { .. } | Self::TwoPointLattice { .. } => f64::INFINITY,
            Self::ExpMinusDrift { lambda, .. } => lambda,
            Self::LaplaceDrift { b, .. } => 1.0 / b,
        }
    }

    /// `E[exp(s * xi)]` in closed form; `+inf` outside the domain.
    pub fn mgf(&self, s: f64) -> f64 {
        if s >= self.mgf_domain_end() {
            return f64::INFINITY;
        }
        match *self {
            Self::GaussianDrift { mu, sigma } => (s * mu + 0.5 * s * s * sigma * sigma).exp(),
            Self::ExpMinusDrift { lambda, c } => lambda * (-s * c).exp() / (lambda - s),
            Self::LaplaceDrift { mu, b } => (s * mu).exp() / (1.0 - b * b * s * s),
            Self::TwoPointLattice { p } => p * s.exp() + (1.0 - p) * (-s).exp(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::GaussianDrift { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            Self::ExpMinusDrift { lambda, c } => {
                let e: f64 = Exp1.sample(rng);
                e / lambda - c
            }
            Self::LaplaceDrift { mu, b } => {
                let e: f64 = Exp1.sample(rng);
                if rng.random::<bool>() {
                    mu + b * e
                } else {
                    mu - b * e
                }
            }
            Self::TwoPointLattice { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// The exponentially tilted law with density `exp(gamma * x) / mgf(gamma)`
    /// relative to this one.
    pub fn tilted(&self, gamma: f64) -> Result<TiltedLaw> {
        let m = self.mgf(gamma);
        if !(gamma >= 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tilt {gamma} is outside the mgf domain of {}",
                self.family()
            )));
        }
        Ok(match *self {
            Self::GaussianDrift { mu, sigma } => TiltedLaw::Gaussian {
                mu: mu + gamma * sigma * sigma,
                sigma,
            },
            Self::ExpMinusDrift { lambda, c } => TiltedLaw::ShiftedExp {
                rate: lambda - gamma,
                c,
            },
            Self::LaplaceDrift { mu, b } => TiltedLaw::AsymmetricLaplace {
                mu,
                p_up: 0.5 * (1.0 + gamma * b),
                rate_up: 1.0 / b - gamma,
                rate_down: 1.0 / b + gamma,
            },
            Self::TwoPointLattice { p } => TiltedLaw::TwoPoint {
                p: p * gamma.exp() / m,
            },
        })
    }
}

/// Exponentially tilted version of a [`StepLaw`]; used by the regenerative
/// first-passage sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TiltedLaw {
    Gaussian { mu: f64, sigma: f64 },
    ShiftedExp { rate: f64, c: f64 },
    AsymmetricLaplace { mu: f64, p_up: f64, rate_up: f64, rate_down: f64 },
    TwoPoint { p: f64 },
}

impl TiltedLaw {
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Gaussian { mu, .. } => mu,
            Self::ShiftedExp { rate, c } => 1.0 / rate - c,
            Self::AsymmetricLaplace {
                mu,
                p_up,
                rate_up,
                rate_down,
            } => mu + p_up / rate_up - (1.0 - p_up) / rate_down,
            Self::TwoPoint { p } => 2.0 * p - 1.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            Self::ShiftedExp { rate, c } => {
                let e: f64 = Exp1.sample(rng);
                e / rate - c
            }
            Self::AsymmetricLaplace {
                mu,
                p_up,
                rate_up,
                rate_down,
            } => {
                let e: f64 = Exp1.sample(rng);
                if rng.random::<f64>() < p_up {
                    mu + e / rate_up
                } else {
                    mu - e / rate_down
                }
            }
            Self::TwoPoint { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

impl fmt::Display for StepLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::GaussianDrift { mu, sigma } => write!(f, "gaussian_drift:mu={mu},sigma={sigma}"),
            Self::ExpMinusDrift { lambda, c } => write!(f, "exp_minus_drift:lambda={lambda},c={c}"),
            Self::LaplaceDrift { mu, b } => write!(f, "laplace_drift:mu={mu},b={b}"),
            Self::TwoPointLattice { p } => write!(f, "two_point_lattice:p={p}"),
        }
    }
}

impl FromStr for StepLaw {
    type Err = Error;

    /// Accepts `<family>:<key>=<value>,...` or the JSON object form.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let fail = |reason: String| Error::LawParse {
            spec: spec.to_string(),
            reason,
        };
        if spec.starts_with('{') {
            let law: StepLaw = serde_json::from_str(spec).map_err(|e| fail(e.to_string()))?;
            return law.validated();
        }
        let (family, rest) = spec
            .split_once(':')
            .ok_or_else(|| fail("expected `<family>:<key>=<value>,...`".into()))?;
        let mut params: Vec<(&str, f64)> = Vec::new();
        for kv in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| fail(format!("`{kv}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| fail(format!("`{v}` is not a number")))?;
            if params.iter().any(|(name, _)| *name == k.trim()) {
                return Err(fail(format!("duplicate key `{k}`")));
            }
            params.push((k.trim(), v));
        }
        let mut take = |key: &str| -> Result<f64> {
            let idx = params
                .iter()
                .position(|(k, _)| *k == key)
                .ok_or_else(|| fail(format!("missing key `{key}`")))?;
            Ok(params.swap_remove(idx).1)
        };
        let law = match family.trim() {
            "gaussian_drift" => Self::GaussianDrift {
                mu: take("mu")?,
                sigma: take("sigma")?,
            },
            "exp_minus_drift" => Self::ExpMinusDrift {
                lambda: take("lambda")?,
                c: take("c")?,
            },
            "laplace_drift" => Self::LaplaceDrift {
                mu: take("mu")?,
                b: take("b")?,
            },
            "two_point_lattice" => Self::TwoPointLattice { p: take("p")? },
            other => return Err(fail(format!("unknown family `{other}`"))),
        };
        if let Some((k, _)) = params.first() {
            return Err(fail(format!("unexpected key `{k}`")));
        }
        law.validated()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn catalog() -> Vec<StepLaw> {
        vec![
            StepLaw::gaussian_drift(-0.5, 1.0).unwrap(),
            StepLaw::exp_minus_drift(1.0, 2.0).unwrap(),
            StepLaw::laplace_drift(-1.0, 1.0).unwrap(),
            StepLaw::two_point_lattice(0.3).unwrap(),
        ]
    }

    #[test]
    fn closed_form_mgf_values() {
        let g = StepLaw::gaussian_drift(-0.5, 1.0).unwrap();
        assert_abs_diff_eq!(g.mgf(1.0), 1.0, epsilon = 1e-15);
        let e = StepLaw::exp_minus_drift(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(e.mgf(0.5), (-1.0f64).exp() / 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.mgf(0.5), 0.7358, epsilon = 1e-4);
        assert_eq!(e.mgf(1.0), f64::INFINITY);
        assert_eq!(e.mgf(3.0), f64::INFINITY);
    }

    #[test]
    fn exact_means() {
        assert_eq!(StepLaw::gaussian_drift(-0.5, 1.0).unwrap().mean(), -0.5);
        assert_abs_diff_eq!(StepLaw::two_point_lattice(0.3).unwrap().mean(), -0.4, epsilon = 1e-15);
        assert_eq!(StepLaw::laplace_drift(-1.0, 1.0).unwrap().mean(), -1.0);
        assert_eq!(StepLaw::exp_minus_drift(1.0, 2.0).unwrap().mean(), -1.0);
    }

    #[test]
    fn mgf_at_zero_is_one_and_slope_is_mean() {
        for law in catalog() {
            assert_eq!(law.mgf(0.0), 1.0, "{law}");
            let h = 1e-6;
            let slope = (law.mgf(h) - law.mgf(0.0)) / h;
            assert!((slope - law.mean()).abs() < 1e-4, "{law}: {slope}");
        }
    }

    #[test]
    fn lattice_flag() {
        let flags: Vec<bool> = catalog().iter().map(StepLaw::is_lattice).collect();
        assert_eq!(flags, vec![false, false, false, true]);
    }

    #[test]
    fn sampling_is_reproducible() {
        let law = StepLaw::gaussian_drift(-0.5, 1.0).unwrap();
        let draw = || {
            let mut rng = RngStream::new(42, 0).rng();
            [law.sample(&mut rng), law.sample(&mut rng)]
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn two_point_frequency() {
        let law = StepLaw::two_point_lattice(0.3).unwrap();
        let mut rng = RngStream::new(11, 0).rng();
        let n = 1_000_000;
        let ups = (0..n).filter(|_| law.sample(&mut rng) > 0.0).count();
        let freq = ups as f64 / n as f64;
        assert!((freq - 0.3).abs() < 0.002, "{freq}");
    }

    #[test]
    fn exp_minus_drift_sample_mean() {
        let law = StepLaw::exp_minus_drift(1.0, 2.0).unwrap();
        let mut rng = RngStream::new(12, 0).rng();
        let n = 1_000_000;
        let mean = (0..n).map(|_| law.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean + 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn sample_means_match_for_all_families() {
        for (i, law) in catalog().into_iter().enumerate() {
            let mut rng = RngStream::new(13, i as u64).rng();
            let n = 200_000;
            let mean = (0..n).map(|_| law.sample(&mut rng)).sum::<f64>() / n as f64;
            assert!((mean - law.mean()).abs() < 0.02, "{law}: {mean}");
        }
    }

    #[test]
    fn tilted_law_mean_is_mgf_log_derivative() {
        for law in catalog() {
            let gamma = 0.4;
            let tilted = law.tilted(gamma).unwrap();
            let h = 1e-6;
            let dlog = (law.mgf(gamma + h).ln() - law.mgf(gamma - h).ln()) / (2.0 * h);
            assert!((tilted.mean() - dlog).abs() < 1e-6, "{law}");
            let mut rng = RngStream::new(14, 0).rng();
            let n = 200_000;
            let mean = (0..n).map(|_| tilted.sample(&mut rng)).sum::<f64>() / n as f64;
            assert!((mean - dlog).abs() < 0.02, "{law}: {mean} vs {dlog}");
        }
    }

    #[test]
    fn parse_compact_and_json() {
        let a: StepLaw = "gaussian_drift:mu=-0.5,sigma=1.0".parse().unwrap();
        let b: StepLaw = r#"{"family":"gaussian_drift","mu":-0.5,"sigma":1.0}"#.parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a, StepLaw::GaussianDrift { mu: -0.5, sigma: 1.0 });
        for law in catalog() {
            assert_eq!(law.to_string().parse::<StepLaw>().unwrap(), law);
            let json = serde_json::to_string(&law).unwrap();
            assert_eq!(json.parse::<StepLaw>().unwrap(), law);
        }
    }

    #[test]
    fn parse_rejects_bad_specs() {
        for bad in [
            "gaussian_drift",
            "gaussian_drift:mu=-0.5",
            "gaussian_drift:mu=-0.5,sigma=0",
            "gaussian_drift:mu=-0.5,sigma=1,extra=2",
            "gaussian_drift:mu=x,sigma=1",
            "cauchy:loc=0",
            "two_point_lattice:p=1.5",
            r#"{"family":"gaussian_drift","mu":-0.5}"#,
        ] {
            assert!(bad.parse::<StepLaw>().is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn mgf_is_midpoint_convex(idx in 0usize..4, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let law = catalog()[idx];
            let hi = law.mgf_domain_end().min(3.0);
            let (s1, s2) = (a.min(b) * hi * 0.999, a.max(b) * hi * 0.999);
            let mid = law.mgf(0.5 * (s1 + s2));
            prop_assert!(mid <= 0.5 * (law.mgf(s1) + law.mgf(s2)) + 1e-12);
        }
    }
}
