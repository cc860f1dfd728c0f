//! Continuous interpolation check. The flow phi_t(x) = base^t (x + 1/5) - 1/5
//! is exactly conjugate to phase translation: T(phi_t(x)) = T(x) + rate*t
//! mod 1, with (base, rate) = (3, alpha) in the corrected variant and
//! (6, 1) in the printed one. A unit of flow time is a rigid scaling, not a
//! Collatz step, so phi_1 lands far from C(x); the point of the check is
//! that the conjugacy itself holds to roundoff.

use collatz_rotation::flow::{flow_vs_map, max_conjugacy_residual, FlowVariant};
use collatz_rotation::collatz::step;
use collatz_rotation::Result;

fn main() -> Result<()> {
    let times = [0.25, 0.5, 0.75, 1.0];
    for variant in [FlowVariant::Corrected, FlowVariant::Printed] {
        let r = max_conjugacy_residual(1, 10_000, &times, variant);
        println!(
            "{:?}: base {}, rate {:.6}, worst conjugacy residual {:.3e}",
            variant,
            variant.scale_base(),
            variant.rate(),
            r
        );
    }

    println!();
    println!("{:>6} {:>10} {:>14} {:>14}", "x", "C(x)", "phi_1(x)", "gap");
    for x in [1u128, 2, 3, 5, 10, 100, 1_000] {
        let (phi, gap) = flow_vs_map(x, FlowVariant::Corrected)?;
        println!("{:>6} {:>10} {:>14.1} {:>14.1}", x, step(x)?, phi, gap);
    }
    Ok(())
}
