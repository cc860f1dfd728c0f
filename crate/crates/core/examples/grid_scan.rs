//! Scan the transform rectangle: candidate phase maps frac(log_a(x + b)),
//! scored by how far the induced phase step strays from a rigid rotation on
//! a fixed sample. A coarse pass plus two refinements around the incumbent
//! land near the classic transform, base 6 with shift close to 1/5.

use collatz_rotation::survey::{refine_scan, RefineSpec, SampleSpec, ScanObjective};
use collatz_rotation::Result;

fn main() -> Result<()> {
    let sample = SampleSpec::exhaustive(100, 10_000);
    let scan = refine_scan(&RefineSpec::default(), &sample, ScanObjective::Sup)?;

    for (i, stage) in scan.stages.iter().enumerate() {
        let inc = stage.argmin_cell().expect("non-degenerate stage");
        println!(
            "stage {} (step {:>4}): {} cells, argmin (a, b) = ({:.2}, {:.2}), sup = {:.6e}",
            i,
            stage.a_step,
            stage.cells.len(),
            inc.a,
            inc.b,
            inc.sup_dev
        );
    }

    let best = scan.argmin.expect("refined argmin");
    println!();
    println!("refined argmin  (a, b) = ({:.2}, {:.2})", best.a, best.b);
    println!("sup deviation   {:.9}", best.sup_dev);
    println!("mean deviation  {:.9}", best.mean_dev);
    println!("alpha_hat       {:.9}", best.alpha_hat);
    Ok(())
}
