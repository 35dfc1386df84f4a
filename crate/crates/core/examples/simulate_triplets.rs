//! Simulate triplets `(R_n, R*_n - y, O_{x+y})` and write them as CSV.
//!
//!     cargo run --release --example simulate_triplets -- 10000 triplets.csv

use std::fs::File;
use std::io::BufWriter;

use segscore::walk::{run_batch, write_triplets_csv, BatchConfig};
use segscore::StepLaw;

fn main() -> segscore::Result<()> {
    let mut args = std::env::args().skip(1);
    let paths: u64 = args.next().map(|a| a.parse().expect("paths")).unwrap_or(10_000);
    let out = args.next().unwrap_or_else(|| "triplets.csv".into());

    let law = StepLaw::gaussian_drift(-0.5, 1.0)?;
    let cfg = BatchConfig::new(law, 2000, 13.0, 12.0, paths, 42);
    let samples = run_batch(&cfg)?;
    write_triplets_csv(BufWriter::new(File::create(&out)?), &samples)?;

    let m = samples.len() as f64;
    let mean = |f: fn(&segscore::TripletSample) -> f64| samples.iter().map(f).sum::<f64>() / m;
    println!("wrote {} paths to {out}", samples.len());
    println!("mean R_n        {:.4}", mean(|t| t.r_n));
    println!("mean O_(x+y)    {:.4}", mean(|t| t.o_xy));
    println!("P(R*_n > y)     {:.5}", samples.iter().filter(|t| t.q_ny > 0.0).count() as f64 / m);
    println!(
        "hit time seen   {:.2}%",
        100.0 * samples.iter().filter(|t| t.hit_time.is_some()).count() as f64 / m
    );
    Ok(())
}
