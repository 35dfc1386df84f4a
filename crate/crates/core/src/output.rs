//! Small helpers shared by the CSV writers.

/// Decimal rendering with 17 significant digits, enough to round-trip any
/// `f64`.
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn specials() {
        assert_eq!(fmt_real(f64::INFINITY), "inf");
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
    }

    proptest! {
        #[test]
        fn round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt_real(v).parse::<f64>().unwrap(), v);
        }
    }
}
