//! Regenerative and direct first passage must produce the same joint law.

use segscore::stats::{two_sample_ks, KS_CRITICAL_5PCT};
use segscore::walk::{run_batch, walk_maximum, BatchConfig, PassageMode};
use segscore::{RngStream, StepLaw};

fn compare(law: StepLaw, n: u64, x: f64, y: f64, paths: u64) {
    let mut base = BatchConfig::new(law, n, x, y, paths, 100);
    base.max_steps = Some(u64::MAX);
    let direct = run_batch(&base.clone().with_passage(PassageMode::Direct)).unwrap();
    let mut other = base.with_passage(PassageMode::Regenerative);
    other.master_seed = 200;
    let regen = run_batch(&other).unwrap();
    // Bonferroni over the three coordinates at the 5% level.
    let crit = 1.63 * (2.0 / paths as f64).sqrt();
    let cols: [fn(&segscore::TripletSample) -> f64; 3] = [|t| t.r_n, |t| t.q_ny, |t| t.o_xy];
    for (c, f) in cols.iter().enumerate() {
        let a: Vec<f64> = direct.iter().map(f).collect();
        let b: Vec<f64> = regen.iter().map(f).collect();
        let ks = two_sample_ks(&a, &b).unwrap();
        assert!(ks.statistic < crit, "{law} coordinate {c}: {}", ks.statistic);
    }
    let sums = |v: &[segscore::TripletSample]| {
        let a: Vec<f64> = v.iter().map(|t| t.r_n + t.o_xy).collect();
        a
    };
    let ks = two_sample_ks(&sums(&direct), &sums(&regen)).unwrap();
    assert!(ks.statistic < crit, "{law} sum: {}", ks.statistic);
}

#[test]
fn gaussian_regenerative_matches_direct() {
    compare(StepLaw::gaussian_drift(-0.5, 1.0).unwrap(), 50, 3.0, 2.0, 20_000);
}

#[test]
fn exp_minus_drift_regenerative_matches_direct() {
    compare(StepLaw::exp_minus_drift(1.0, 2.0).unwrap(), 30, 2.5, 1.5, 20_000);
}

#[test]
fn laplace_regenerative_matches_direct() {
    compare(StepLaw::laplace_drift(-1.0, 1.0).unwrap(), 30, 3.0, 1.0, 20_000);
}

#[test]
fn lattice_regenerative_matches_direct() {
    compare(StepLaw::two_point_lattice(0.3).unwrap(), 30, 3.0, 2.0, 20_000);
}

#[test]
fn reflected_value_has_law_of_walk_maximum() {
    let law = StepLaw::gaussian_drift(-0.5, 1.0).unwrap();
    let paths = 20_000u64;
    let r: Vec<f64> = run_batch(&BatchConfig::new(law, 100, 1.0, 0.0, paths, 1))
        .unwrap()
        .iter()
        .map(|t| t.r_n)
        .collect();
    let m: Vec<f64> = (0..paths).map(|i| walk_maximum(&law, 100, &RngStream::new(2, i))).collect();
    let ks = two_sample_ks(&r, &m).unwrap();
    assert!(ks.statistic < 2.0 * KS_CRITICAL_5PCT / (paths as f64).sqrt(), "{}", ks.statistic);
}
