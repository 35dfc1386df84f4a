//! Root of the Cramér equation `E[exp(gamma * xi)] = 1` and the Chernoff
//! constant `rho = min_{0 <= s <= gamma} E[exp(s * xi)]`.
//!
//! The MGF is convex with `M(0) = 1` and `M'(0) = E[xi] < 0`, so the positive
//! root is unique and bisection on a sign-changing bracket is always safe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::StepLaw;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative margin kept below an MGF pole.
const POLE_MARGIN: f64 = 1e-9;
/// Largest bracket end tried for laws with an unbounded MGF domain.
const MAX_SEARCH: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CramerSolution {
    pub gamma: f64,
    pub rho: f64,
    pub s_at_min: f64,
    pub tolerance: f64,
    /// Final bisection bracket, `mgf(lo) < 1 < mgf(hi)`.
    pub bracket: (f64, f64),
}

/// Solves for the Cramér coefficient and fills in `rho`.
pub fn solve_gamma(law: &StepLaw, tol: f64) -> Result<CramerSolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    law.require_negative_drift()?;

    let f = |s: f64| law.mgf(s) - 1.0;
    let cap = law.mgf_domain_end() * (1.0 - POLE_MARGIN);

    // Expand upward until the MGF exceeds one.
    let mut lo = 0.0;
    let mut hi = 1.0f64.min(0.5 * law.mgf_domain_end());
    loop {
        if f(hi) > 0.0 {
            break;
        }
        lo = hi;
        if hi >= cap || hi >= MAX_SEARCH {
            return Err(Error::NoRoot { searched_to: hi });
        }
        hi = (2.0 * hi).min(cap).min(MAX_SEARCH);
    }
    // If the very first guess already overshoots, walk down to a point with
    // mgf < 1 (it exists because M'(0) < 0).
    if lo == 0.0 {
        let mut s = hi;
        for _ in 0..1100 {
            s *= 0.5;
            if f(s) < 0.0 {
                lo = s;
                break;
            }
            hi = s;
        }
        if lo == 0.0 {
            return Err(Error::NoRoot { searched_to: hi });
        }
    }

    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v < 0.0 {
            lo = mid;
        } else if v > 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
            break;
        }
        if hi - lo <= tol && f(0.5 * (lo + hi)).abs() <= tol {
            break;
        }
    }
    let gamma = 0.5 * (lo + hi);
    let (s_at_min, rho) = minimize_mgf(law, gamma);
    Ok(CramerSolution {
        gamma,
        rho,
        s_at_min,
        tolerance: tol,
        bracket: (lo, hi),
    })
}

/// Minimum of the MGF over `[0, gamma]`.
pub fn compute_rho(law: &StepLaw, gamma: f64) -> f64 {
    minimize_mgf(law, gamma).1
}

/// Golden-section search; the MGF is convex so the bracket never loses the
/// minimiser.
fn minimize_mgf(law: &StepLaw, gamma: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (0.0, gamma);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (law.mgf(c), law.mgf(d));
    for _ in 0..200 {
        if b - a <= 1e-13 * gamma.max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = law.mgf(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = law.mgf(d);
        }
    }
    let s = 0.5 * (a + b);
    (s, law.mgf(s))
}
