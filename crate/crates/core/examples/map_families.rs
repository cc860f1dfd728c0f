//! The (a, b) generalization: x -> x/2 on evens, a*x + b on odds, with phase
//! transform base 2a and shift b/(2a - 1). Each family rotates by
//! alpha = log_{2a}(a); the deviation scale tracks the shift.
//!
//! Fractional a leaves the integers, so the deviation here is evaluated on
//! the real-valued branch formula rather than by orbit following.

use collatz_rotation::phase::{eps_real, rat_to_f64, MapFamily};
use collatz_rotation::Result;

fn main() -> Result<()> {
    println!(
        "{:>9} {:>6} {:>9} {:>10} {:>12} {:>8}",
        "(a, b)", "base", "shift", "alpha", "max |eps|", "at x"
    );
    for (a, b) in [("3", "1"), ("5", "1"), ("7", "1"), ("3", "5"), ("1", "1"), ("1.5", "1")] {
        let fam = MapFamily::from_decimals(a, b)?;
        let mut sup = 0f64;
        let mut arg = 1u128;
        for x in 1..=10_000u128 {
            let e = eps_real(&fam, x).value().abs();
            if e > sup {
                sup = e;
                arg = x;
            }
        }
        println!(
            "{:>9} {:>6.1} {:>9.4} {:>10.6} {:>12.6} {:>8}",
            format!("({a}, {b})"),
            rat_to_f64(fam.base()),
            rat_to_f64(fam.shift()),
            fam.alpha(),
            sup,
            arg
        );
    }
    println!();
    println!("a = 1 degenerates: alpha = 0, so the whole phase step is");
    println!("deviation and the family is the worst of the six, not exact.");
    Ok(())
}
