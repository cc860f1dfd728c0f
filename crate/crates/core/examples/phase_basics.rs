//! The phase transform in one screen: T(x) = frac(log6(x + 1/5)), the
//! rotation number alpha = log6(3), and the deviation eps(x) between one
//! Collatz step and one rigid rotation on the circle.

use collatz_rotation::collatz::step;
use collatz_rotation::phase::{
    alpha, circle_dist, classic_eps, classic_phase, eps_exact_branch, wrap_signed,
};

fn main() {
    println!("alpha = log6(3) = {:.16}", alpha());
    println!();
    println!("{:>6}  {:>10}  {:>10}  {:>13}  {:>13}", "x", "T(x)", "T(C(x))", "eps(x)", "branch form");
    for x in [1u128, 2, 3, 6, 7, 27, 100, 1_000_000] {
        let t = classic_phase(x);
        let tc = classic_phase(step(x).unwrap());
        let e = classic_eps(x);
        // Both parities collapse to ln(1 + 1/(5x+1)) / ln 6.
        let b = eps_exact_branch(x);
        println!(
            "{:>6}  {:>10.6}  {:>10.6}  {:>13.4e}  {:>13.4e}",
            x,
            t.value(),
            tc.value(),
            e.value(),
            b.value()
        );
    }
    println!();

    // eps(x) is the wrapped gap between the actual phase step and alpha.
    let x = 27u128;
    let raw = classic_phase(step(x).unwrap()).value() - classic_phase(x).value() - alpha();
    println!("x = 27: wrapped gap = {:.6e}", wrap_signed(raw).value());
    println!(
        "        circle distance of T(82) from T(27) + alpha = {:.6e}",
        circle_dist(
            classic_phase(82),
            collatz_rotation::PhaseAngle::new(classic_phase(27).value() + alpha())
        )
    );

    // The deviation is largest at x = 1 and falls off like 1/(5x ln 6).
    println!();
    println!("eps(1) = ln(7/6)/ln 6 = {:.18}", classic_eps(1).value());
}
