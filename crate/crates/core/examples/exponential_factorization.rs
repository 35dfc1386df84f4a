//! `gamma (R_n + O_{x+y})` is standard exponential in the limit although the
//! two summands are asymptotically independent.
//!
//!     cargo run --release --example exponential_factorization -- 100000

use segscore::verify;
use segscore::walk::PassageMode;
use segscore::StepLaw;

fn main() -> segscore::Result<()> {
    let paths: u64 = std::env::args().nth(1).map(|a| a.parse().expect("paths")).unwrap_or(20_000);
    let law = StepLaw::gaussian_drift(-0.5, 1.0)?;
    let r = verify::factorization(&law, 2000, 13.0, 12.0, paths, 42, 0.01, PassageMode::Regenerative)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}
