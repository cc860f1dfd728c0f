//! Recompute every table printed in the reference manuscript from the
//! definitions and report, cell by cell, which values reproduce. Tolerance
//! is one unit in the last printed decimal place. Expect a mixed verdict:
//! structural identities (the trivial-cycle table, map columns) come back
//! exact, while most per-x deviation listings do not.

use collatz_rotation::report::{compare_all, CompareScale};
use collatz_rotation::Result;

fn main() -> Result<()> {
    let report = compare_all(CompareScale::Standard)?;

    for line in report.summary_lines() {
        println!("{line}");
    }

    println!();
    for table in &report.tables {
        for note in &table.notes {
            println!("note [{}]: {}", table.table, note);
        }
    }

    // Drill into one table: the cycle-feasibility rows reproduce exactly.
    let cycles = report.find("7.3").expect("table 7.3 present");
    println!();
    println!(
        "table 7.3 detail: {} of {} cells match",
        cycles.matched(),
        cycles.cells.len()
    );
    Ok(())
}
