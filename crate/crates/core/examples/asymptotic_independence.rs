//! Joint CDF of `(R_n, R*_n - y, O_{x+y})` against the product of its
//! marginals on the 27-point quantile grid.
//!
//!     cargo run --release --example asymptotic_independence -- 100000

use segscore::verify;
use segscore::walk::PassageMode;
use segscore::StepLaw;

fn main() -> segscore::Result<()> {
    let paths: u64 = std::env::args().nth(1).map(|a| a.parse().expect("paths")).unwrap_or(20_000);
    let law = StepLaw::gaussian_drift(-0.5, 1.0)?;
    let v = verify::independence(&law, 2000, 13.0, 12.0, paths, 42, 200, 0.02, PassageMode::Regenerative)?;
    let r = &v.report;
    for ((p, j), q) in r.grid.iter().zip(&r.joint_cdf).zip(&r.product_cdf) {
        println!("({:>8.4}, {:>8.4}, {:>8.4})  joint {j:.5}  product {q:.5}", p[0].0, p[1].0, p[2].0);
    }
    println!("sup_diff {:.5}, bootstrap threshold {:.5}, pass {}", r.sup_diff, r.threshold, r.pass);
    Ok(())
}
