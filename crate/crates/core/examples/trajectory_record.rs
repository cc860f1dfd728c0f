//! Follow one orbit on the circle. Each Collatz step advances the phase by
//! alpha plus a deviation eps_n; the running sum E_n telescopes back to
//! T(x_n) - T(x_0) - n*alpha up to float roundoff.
//!
//!     cargo run --release --example trajectory_record [-- START]

use collatz_rotation::cumulative::{max_abs_cum, max_telescope_residual, record_rows, track};
use collatz_rotation::collatz::ORBIT_CAP;

fn main() {
    let start: u128 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("START must be an integer"))
        .unwrap_or(27);

    let rec = track(start, ORBIT_CAP);
    let steps = rec.values.len() - 1;
    println!(
        "start {} reaches 1 after {} steps (resolved: {})",
        start, steps, rec.resolved
    );

    println!();
    println!("{:>4} {:>10} {:>7} {:>10} {:>12} {:>12}", "n", "x_n", "parity", "T(x_n)", "eps_n", "E_n");
    let rows = record_rows(&rec);
    let shown = rows.len().min(12);
    for row in &rows[..shown] {
        println!(
            "{:>4} {:>10} {:>7} {:>10.6} {:>12} {:>12.6e}",
            row.n,
            row.value,
            if row.parity == 1 { "odd" } else { "even" },
            row.phase,
            row.eps.map_or("-".to_string(), |e| format!("{:.4e}", e)),
            row.cum_error
        );
    }
    if rows.len() > shown {
        println!("  ... {} more rows", rows.len() - shown);
    }

    let (sup, at) = max_abs_cum(&rec);
    println!();
    println!("sup_n |E_n|          = {:.9}  at n = {}", sup, at);
    println!("worst telescope gap  = {:.3e}", max_telescope_residual(&rec));
}
