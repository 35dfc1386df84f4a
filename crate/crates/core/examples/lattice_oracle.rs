//! Exact laws of the lattice walk by dynamic programming, compared with
//! simulation.
//!
//!     cargo run --release --example lattice_oracle

use segscore::lattice::{joint_rn_rstar, law_of_ox, law_of_rn, LatticePmf};
use segscore::verify;
use segscore::StepLaw;

fn main() -> segscore::Result<()> {
    let law = StepLaw::two_point_lattice(0.3)?;
    let step = LatticePmf::from_step_law(&law)?;

    let r20 = law_of_rn(&step, 20)?;
    println!("R_20: mean {:.6}, P(R_20 = 0) = {:.6} (stationary 4/7 = {:.6})", r20.mean(), r20.prob(0), 4.0 / 7.0);

    let joint = joint_rn_rstar(&step, 20, &[2, 4, 6])?;
    for y in [2, 4, 6] {
        println!("P(R_20 <= 1, R*_20 <= {y}) = {:.6}", joint.get(1, y).unwrap());
    }

    let skewed = LatticePmf::new(-2, vec![0.5, 0.2, 0.0, 0.2, 0.0, 0.1])?;
    let o = law_of_ox(&skewed, 3, 1e-12)?;
    println!("overshoot over 3 for steps {{-2,-1,1,3}}: {:?}", o.pmf.probs);

    let report = verify::oracle(&law, 20, 100_000, 1, 0.005)?;
    println!("\nMonte Carlo vs exact CDF of R_20 (100000 paths)");
    for row in report.rows.iter().take(8) {
        println!("  w={:>2}  exact {:.5}  simulated {:.5}  tol {:.5}", row.w, row.exact_cdf, row.empirical_cdf, row.tolerance);
    }
    println!("max gap {:.5}, pass {}", report.max_gap, report.pass);
    Ok(())
}
