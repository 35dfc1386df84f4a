use segscore::embedding::{run_embedding, EmbedConfig};
use segscore::stats::ecdf;
use segscore::walk::PassageMode;
use segscore::StepLaw;

fn y_samples(t: f64, seed: u64) -> Vec<f64> {
    let cfg = EmbedConfig {
        law: StepLaw::gaussian_drift(-0.5, 1.0).unwrap(),
        t,
        x: 2.0,
        paths: 20_000,
        master_seed: seed,
        passage: PassageMode::Regenerative,
    };
    run_embedding(&cfg).unwrap().iter().map(|s| s.y_t).collect()
}

#[test]
fn reflected_value_grows_stochastically_in_t() {
    let early = y_samples(500.0, 1);
    let late = y_samples(2000.0, 2);
    let m = early.len() as f64;
    let top = early.iter().chain(&late).cloned().fold(0.0, f64::max);
    for k in 0..50 {
        let w = top * k as f64 / 49.0;
        let f_early = ecdf(&early, w).unwrap();
        let f_late = ecdf(&late, w).unwrap();
        let se = (f_early * (1.0 - f_early) / m).sqrt().max(1.0 / m);
        assert!(f_late <= f_early + 3.0 * se, "w={w}: {f_late} > {f_early}");
    }
}

#[test]
fn invariants_hold_on_every_path() {
    let cfg = EmbedConfig {
        law: StepLaw::laplace_drift(-1.0, 1.0).unwrap(),
        t: 30.0,
        x: 4.0,
        paths: 5_000,
        master_seed: 9,
        passage: PassageMode::Regenerative,
    };
    for s in run_embedding(&cfg).unwrap() {
        assert!(s.y_t >= 0.0 && s.y_t <= s.ystar_t && s.z_x > 0.0);
        if let Some(k) = s.tau_hit_index {
            assert!(k >= 1);
        }
    }
}
