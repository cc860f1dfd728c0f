//! Census of the termination zones Z_delta: starts whose phase lies within
//! delta of T(1). Membership is decided by circle distance, and every member
//! found in range is run to 1 to record stopping-time extremes.
//!
//! Two size measures are printed. The counting fraction stays far below the
//! naive 2*delta because T is logarithmically distributed over integer
//! inputs; the 1/x-weighted density corrects for that but is held up by the
//! family 1, 7, 43, 259, ... (each 6x + 1 of the last) sitting exactly at
//! the zone center.

use collatz_rotation::analytics::{termination_zone_report, zone_log_fraction, zone_membership};
use collatz_rotation::collatz::ORBIT_CAP;
use collatz_rotation::Result;

fn main() -> Result<()> {
    let (lo, hi) = (1u128, 100_000u128);
    let deltas = [0.002, 0.01, 0.02, 0.05, 0.10];

    let zones = termination_zone_report(&deltas, lo, hi, ORBIT_CAP)?;
    let logf = zone_log_fraction(lo, hi, &deltas)?;

    println!("range [{lo}, {hi}]");
    println!(
        "{:>6} {:>9} {:>10} {:>10} {:>11} {:>10}",
        "delta", "members", "count %", "log %", "max steps", "at x"
    );
    for (z, (_, lf)) in zones.iter().zip(&logf) {
        println!(
            "{:>6} {:>9} {:>10.3} {:>10.2} {:>11} {:>10}",
            z.delta,
            z.members_tested,
            100.0 * z.member_fraction,
            100.0 * lf,
            z.max_steps_to_1,
            z.max_steps_x
        );
    }

    // The exact-center family: 6x + 1 maps T-value to itself.
    println!();
    print!("center members:");
    let mut x = 1u128;
    while x <= hi {
        debug_assert!(zone_membership(x, 1e-9));
        print!(" {x}");
        x = 6 * x + 1;
    }
    println!();
    Ok(())
}
