//! Cumulative-error extremes over a start range. For each start the sweep
//! accumulates E_n = sum of deviations along the orbit, keeps the running
//! sup of |E_n| (also at fixed iteration cutoffs), checks the telescoping
//! identity, and histograms stopping times.

use collatz_rotation::survey::{trajectory_sweep, SweepOptions, REPORT_CUTOFFS};
use collatz_rotation::Result;

fn main() -> Result<()> {
    let (lo, hi) = (1u128, 100_000u128);
    let opts = SweepOptions {
        cutoffs: REPORT_CUTOFFS.to_vec(),
        ..SweepOptions::default()
    };
    let rep = trajectory_sweep(lo, hi, &opts)?;

    println!("range [{}, {}]: {} orbits", lo, hi, rep.count);
    println!(
        "sup |E_n|      {:.9}  (start {}, n = {})",
        rep.sup_abs_cum, rep.sup_argmax_start, rep.sup_argmax_n
    );
    println!("worst residual {:.3e}", rep.max_residual);
    println!();

    println!("{:>7} {:>14} {:>10}", "depth", "sup |E_n|", "at start");
    for c in &rep.cutoff_sups {
        println!("{:>7} {:>14.9} {:>10}", c.depth, c.sup_abs_cum, c.argmax_start);
    }

    let longest = rep.stopping_counts.keys().max().copied().unwrap_or(0);
    let busiest = rep
        .stopping_counts
        .iter()
        .max_by_key(|(_, &n)| n)
        .map(|(&s, &n)| (s, n))
        .unwrap_or((0, 0));
    println!();
    println!("longest stopping time {}", longest);
    println!("modal stopping time   {} ({} starts)", busiest.0, busiest.1);
    Ok(())
}
