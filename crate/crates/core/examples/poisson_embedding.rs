//! Compound-Poisson embedding: overshoots agree pathwise with the walk, the
//! embedded reflected value matches `R_n`, and the Laplace transform of the
//! overshoot matches the series.
//!
//!     cargo run --release --example poisson_embedding

use segscore::embedding::{embed_path, EMBED_CSV_HEADER};
use segscore::verify;
use segscore::walk::{run_path, Passage};
use segscore::{RngStream, StepLaw};

fn main() -> segscore::Result<()> {
    let law = StepLaw::gaussian_drift(-0.5, 1.0)?;
    let passage = Passage::regenerative(&law)?;

    println!("{EMBED_CSV_HEADER}");
    for i in 0..5 {
        let stream = RngStream::new(1, i);
        let e = embed_path(&law, 50.0, 6.0, &stream, &passage, None)?;
        let w = run_path(&law, e.n_of_t, 6.0, 0.0, &stream, u64::MAX, &passage)?;
        assert_eq!(e.z_x, w.o_xy);
        println!(
            "{},{},{},{},{:.6},{:.6},{:.6},{}",
            e.path_id,
            e.t,
            e.x,
            e.n_of_t,
            e.y_t,
            e.ystar_t,
            e.z_x,
            e.tau_hit_index.map(|k| k.to_string()).unwrap_or_default()
        );
    }

    let dual = verify::embedding_duality(&law, 2000.0, 2000, 20_000, 42, 0.02)?;
    println!("\nKS(Y(2000), R_2000) = {:.5}", dual.ks.statistic);

    let z = verify::zinf(&law, &[0.5, 1.0, 2.0], 20_000, 25.0, 42, 50_000, 0.02)?;
    for row in &z.report.rows {
        println!("v={:<4} empirical {:.5}  series {:.5}  gap {:.5}", row.v, row.empirical, row.series, row.gap);
    }
    Ok(())
}
