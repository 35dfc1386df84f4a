//! Cramér root and MGF minimum for each step-law family.
//!
//!     cargo run --release --example cramer_roots

use segscore::cramer::{solve_gamma, DEFAULT_TOL};
use segscore::StepLaw;

fn main() -> segscore::Result<()> {
    let laws = [
        "gaussian_drift:mu=-0.5,sigma=1",
        "exp_minus_drift:lambda=1,c=2",
        "laplace_drift:mu=-1,b=1",
        "two_point_lattice:p=0.3",
    ];
    println!("{:<36} {:>14} {:>12} {:>12}", "law", "gamma", "rho", "argmin");
    for spec in laws {
        let law: StepLaw = spec.parse()?;
        let sol = solve_gamma(&law, DEFAULT_TOL)?;
        println!("{:<36} {:>14.10} {:>12.8} {:>12.8}", law.to_string(), sol.gamma, sol.rho, sol.s_at_min);
    }
    println!("ln(7/3) = {:.10}", (7.0f64 / 3.0).ln());
    Ok(())
}
