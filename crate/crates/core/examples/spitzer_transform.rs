//! Series for the characteristic functions of the limiting overshoot and
//! reflected value, checked against the product identity and, for the
//! lattice walk, against the geometric closed form.
//!
//!     cargo run --release --example spitzer_transform

use num_complex::Complex64;
use segscore::spitzer::{linear_grid, SeriesConfig, SpitzerSeries, Truncation};
use segscore::StepLaw;

fn main() -> segscore::Result<()> {
    let lattice = StepLaw::two_point_lattice(0.3)?;
    let exact = SpitzerSeries::new(&lattice, &SeriesConfig::exact(Truncation::Fixed(200)))?;
    println!("lattice p=0.3, {} exact terms, tail bound {:.2e}", exact.n_terms(), exact.tail_bound());
    for theta in [0.5, 1.0, 2.0] {
        let got = exact.cf_r_infinity(theta).value;
        let want = Complex64::new(4.0 / 7.0, 0.0) / (1.0 - Complex64::new(0.0, theta).exp() * (3.0 / 7.0));
        println!("  theta {theta:>4}: cf_R = {got:.8}, geometric = {want:.8}");
    }

    let gaussian = StepLaw::gaussian_drift(-0.5, 1.0)?;
    let series = SpitzerSeries::new(&gaussian, &SeriesConfig::monte_carlo(Truncation::TailTarget(1e-6), 50_000, 7))?;
    let g = series.gamma();
    println!("\ngaussian, {} Monte Carlo terms, tail bound {:.2e}", series.n_terms(), series.tail_bound());
    println!("{:>6} {:>24} {:>10} {:>12}", "theta", "cf_O", "stderr", "identity");
    for theta in linear_grid(-4.0, 4.0, 9) {
        let o = series.cf_o_infinity(theta);
        let r = series.cf_r_infinity(theta);
        let gap = (o.value * r.value - Complex64::new(g, 0.0) / Complex64::new(g, -theta)).norm();
        println!("{theta:>6.2} {:>24.6} {:>10.2e} {gap:>12.2e}", o.value, o.mc_stderr);
    }
    Ok(())
}
