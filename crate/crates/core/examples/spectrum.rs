//! Spectral structure of the deviation sequence: autocorrelation along
//! orbits and Walsh coefficients of eps as a function of the trailing
//! m bits of x. The empty-set coefficient is the plain mean.

use collatz_rotation::analytics::{default_walsh_sets, set_label, spectral_estimates};
use collatz_rotation::survey::SampleSpec;
use collatz_rotation::Result;

fn main() -> Result<()> {
    let spec = SampleSpec::exhaustive(1, 1_000_000);
    let est = spectral_estimates(&spec, 8, 6, &default_walsh_sets())?;

    println!("sample [1, 10^6], m = {} trailing bits", est.m);
    println!("mean eps = {:.9e}", est.mean_eps);
    println!();

    println!("autocorrelation R(k) along orbits:");
    for &(k, r) in &est.autocorr {
        println!("  k = {:>2}  R = {:>13.6e}", k, r);
    }

    let mut rows: Vec<_> = est.walsh.iter().collect();
    rows.sort_by(|l, r| r.coefficient.abs().total_cmp(&l.coefficient.abs()));
    println!();
    println!("largest Walsh coefficients (of {} sets):", est.walsh.len());
    for row in rows.iter().take(8) {
        println!("  {:<12} {:>13.6e}", set_label(&row.set), row.coefficient);
    }
    if est.dropped > 0 {
        println!();
        println!("dropped {} overflow-truncated terms", est.dropped);
    }
    Ok(())
}
