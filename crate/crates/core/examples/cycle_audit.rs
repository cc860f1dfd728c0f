//! Cycle arithmetic on the circle. Around any p-cycle the deviations must sum
//! to an integer minus p*alpha; since alpha is irrational, the residue is
//! bounded away from 0 for every p, and its size caps how small the mean
//! deviation along a hypothetical cycle could be.

use collatz_rotation::analytics::{cycle_eps_sum, cycle_feasibility};
use collatz_rotation::phase::alpha;
use collatz_rotation::Result;

fn main() -> Result<()> {
    // The trivial cycle 1 -> 4 -> 2 -> 1 realizes the identity exactly.
    let (total, residual) = cycle_eps_sum(&[1, 4, 2])?;
    println!("trivial cycle 1 -> 4 -> 2:");
    println!("  sum eps        = {:.15}", total);
    println!("  2 - 3*alpha    = {:.15}", 2.0 - 3.0 * alpha());
    println!("  circle residual {:.3e}", residual);
    println!();

    println!(
        "{:>3} {:>12} {:>4} {:>12} {:>12}  {}",
        "p", "p*alpha", "m", "residue", "bound", "feasible?"
    );
    for row in cycle_feasibility(8) {
        println!(
            "{:>3} {:>12.6} {:>4} {:>12.6} {:>12.6}  {}",
            row.p,
            row.p_alpha,
            row.m,
            row.residue,
            row.bound,
            if row.feasible { "yes" } else { "no" }
        );
    }
    println!();
    println!("the uniform bound only rules out p = 1; the trivial cycle sits");
    println!("at p = 3 with m = 2, realizing sum eps = 2 - 3*alpha.");
    Ok(())
}
