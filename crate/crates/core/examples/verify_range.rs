//! Exhaustive deviation survey over a start range. Confirms that the two
//! parity branches agree with the closed form on every integer, and reports
//! where |eps| peaks.
//!
//!     cargo run --release --example verify_range [-- HI]

use collatz_rotation::phase::MapFamily;
use collatz_rotation::survey::exhaustive_verify;
use collatz_rotation::Result;

fn main() -> Result<()> {
    let hi: u128 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("HI must be an integer"))
        .unwrap_or(1_000_000);

    let fam = MapFamily::classic();
    let rep = exhaustive_verify(1, hi, &fam)?;

    println!("range          [{}, {}]", rep.range.0, rep.range.1);
    println!("values checked {}", rep.count);
    println!("max |eps|      {:.15}  at x = {}", rep.max_abs_eps, rep.argmax_x);
    println!("mean |eps|     {:.6e}", rep.mean_abs_eps);
    for (q, v) in &rep.quantiles.probes {
        println!("q{:<5}        {:.6e}", q * 100.0, v);
    }
    if rep.overflow_count > 0 {
        println!("overflowed     {}", rep.overflow_count);
    }
    Ok(())
}
