//! Running maximum of the reflected walk: `gamma R*_n - ln n` against the
//! Gumbel law after fitting a location.
//!
//!     cargo run --release --example gumbel_maximum -- 10000 10000

use segscore::verify;
use segscore::StepLaw;

fn main() -> segscore::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer"));
    let n = args.next().unwrap_or(10_000);
    let paths = args.next().unwrap_or(5_000);
    let law = StepLaw::gaussian_drift(-0.5, 1.0)?;
    let v = verify::gumbel(&law, n, paths, 42, 0.02)?;
    println!(
        "n={n} paths={paths}: location {:.4}, KS {:.5}, pass {}",
        v.report.location_hat, v.report.statistic, v.report.pass
    );
    Ok(())
}
