//! Orbit statistics for the usual suspects, plus a full-range resolution
//! check: every start in [1, 10^5] reaches 1 under the cap.

use collatz_rotation::analytics::all_resolve;
use collatz_rotation::collatz::{orbit_stats, Resolution, ORBIT_CAP};
use collatz_rotation::Result;

fn fmt_res(r: Resolution) -> String {
    match r {
        Resolution::Steps(n) => n.to_string(),
        Resolution::CapExceeded => "cap".to_string(),
        Resolution::Overflow => "overflow".to_string(),
    }
}

fn main() -> Result<()> {
    println!(
        "{:>8} {:>9} {:>8} {:>12} {:>12} {:>9}",
        "start", "stopping", "terras", "peak", "peak/x", "odd run"
    );
    for x in [27u128, 97, 703, 9_663, 83_779, 459_759] {
        let s = orbit_stats(x, ORBIT_CAP);
        println!(
            "{:>8} {:>9} {:>8} {:>12} {:>12.4} {:>9}",
            s.start,
            fmt_res(s.total_steps),
            fmt_res(s.terras_steps),
            s.peak,
            s.peak_ratio,
            s.max_odd_run
        );
    }

    let (resolved, failures) = all_resolve(1, 100_000, ORBIT_CAP)?;
    println!();
    println!("[1, 100000]: {} starts resolved, {} failures", resolved, failures.len());
    Ok(())
}
