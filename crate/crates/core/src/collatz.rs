//! Exact integer dynamics: the Collatz map, generalized (a,b) maps,
//! trajectories, stopping times, and orbit statistics.
//!
//! All arithmetic is 128-bit and overflow-checked; an orbit that leaves the
//! representable range reports that outcome instead of wrapping or panicking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::MapFamily;

/// Orbit values are plain `u128`; every public operation requires `x >= 1`.
pub type OrbitValue = u128;

/// Default step cap for single-orbit tools.
pub const ORBIT_CAP: u64 = 100_000;
/// Default step cap used by range sweeps.
pub const SWEEP_CAP: u64 = 20_000;

/// Outcome of bounded orbit iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    /// Target reached after this many steps.
    Steps(u64),
    /// The step cap was hit first.
    CapExceeded,
    /// An iterate left the 128-bit range.
    Overflow,
}

impl Resolution {
    pub fn steps(self) -> Option<u64> {
        match self {
            Resolution::Steps(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_resolved(self) -> bool {
        matches!(self, Resolution::Steps(_))
    }
}

/// One application of the Collatz map: x/2 for even x, 3x+1 for odd x.
#[inline]
pub fn step(x: OrbitValue) -> Result<OrbitValue> {
    debug_assert!(x >= 1);
    if x % 2 == 0 {
        Ok(x / 2)
    } else {
        x.checked_mul(3)
            .and_then(|v| v.checked_add(1))
            .ok_or(Error::Overflow { start: x, step: 1 })
    }
}

/// One application of the generalized map: x/2 for even x, a*x+b for odd x.
///
/// Only families with positive integer coefficients iterate; fractional
/// families such as (1.5, 1) have well-defined transform parameters but no
/// integer orbit, and are refused here.
pub fn gen_step(fam: &MapFamily, x: OrbitValue) -> Result<OrbitValue> {
    debug_assert!(x >= 1);
    let (a, b) = fam.integer_coefficients().ok_or(Error::NonIntegerFamily {
        a: fam.a_f64(),
        b: fam.b_f64(),
    })?;
    if x % 2 == 0 {
        Ok(x / 2)
    } else {
        x.checked_mul(a)
            .and_then(|v| v.checked_add(b))
            .ok_or(Error::Overflow { start: x, step: 1 })
    }
}

/// Least n <= cap with C^n(x) = 1. For x = 1 this is 0.
pub fn total_stopping_time(x: OrbitValue, cap: u64) -> Resolution {
    debug_assert!(x >= 1);
    let mut cur = x;
    let mut n = 0u64;
    while cur != 1 {
        if n == cap {
            return Resolution::CapExceeded;
        }
        cur = match step(cur) {
            Ok(v) => v,
            Err(_) => return Resolution::Overflow,
        };
        n += 1;
    }
    Resolution::Steps(n)
}

/// Least n <= cap with C^n(x) < x. By convention 0 for x = 1.
pub fn terras_stopping_time(x: OrbitValue, cap: u64) -> Resolution {
    debug_assert!(x >= 1);
    if x == 1 {
        return Resolution::Steps(0);
    }
    let mut cur = x;
    let mut n = 0u64;
    loop {
        if n == cap {
            return Resolution::CapExceeded;
        }
        cur = match step(cur) {
            Ok(v) => v,
            Err(_) => return Resolution::Overflow,
        };
        n += 1;
        if cur < x {
            return Resolution::Steps(n);
        }
    }
}

/// Orbit of x under C, starting at x, ending at the first arrival at 1
/// (n >= 1) or after `cap` steps. Overflow truncates and sets the marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub values: Vec<OrbitValue>,
    pub overflowed: bool,
}

pub fn trajectory(x: OrbitValue, cap: u64) -> Trajectory {
    debug_assert!(x >= 1);
    let mut values = Vec::with_capacity(32);
    values.push(x);
    let mut cur = x;
    let mut overflowed = false;
    for _ in 0..cap {
        match step(cur) {
            Ok(v) => {
                values.push(v);
                cur = v;
                if v == 1 {
                    break;
                }
            }
            Err(_) => {
                overflowed = true;
                break;
            }
        }
    }
    Trajectory { values, overflowed }
}

/// Summary statistics of one orbit.
///
/// `max_odd_run` counts the longest run of consecutive odd values in the
/// shortcut orbit (odd x -> (3x+1)/2, even x -> x/2), including the start
/// value. Two consecutive iterates of the plain map are never both odd, so
/// a literal reading of "consecutive odd steps" under C is always <= 1;
/// published growth tables that report larger runs may use yet another
/// convention, and the comparison report checks rather than assumes it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitStats {
    pub start: OrbitValue,
    pub total_steps: Resolution,
    pub terras_steps: Resolution,
    pub peak: OrbitValue,
    pub peak_ratio: f64,
    pub max_odd_run: u64,
}

pub fn orbit_stats(x: OrbitValue, cap: u64) -> OrbitStats {
    debug_assert!(x >= 1);
    let mut peak = x;
    let mut terras: Option<u64> = if x == 1 { Some(0) } else { None };
    let mut cur = x;
    let mut n = 0u64;
    let total_steps = loop {
        if cur == 1 {
            break Resolution::Steps(n);
        }
        if n == cap {
            break Resolution::CapExceeded;
        }
        match step(cur) {
            Ok(v) => {
                cur = v;
                n += 1;
                peak = peak.max(v);
                if terras.is_none() && v < x {
                    terras = Some(n);
                }
            }
            Err(_) => break Resolution::Overflow,
        }
    };
    let terras_steps = match terras {
        Some(n) => Resolution::Steps(n),
        None => match total_steps {
            Resolution::Steps(_) => Resolution::CapExceeded, // x > 1 reached 1 without dipping below x: impossible, but keep total's cap/overflow semantics
            other => other,
        },
    };

    // Longest odd run in the shortcut orbit, bounded by the same cap.
    let mut run = if x % 2 == 1 { 1u64 } else { 0 };
    let mut best = run;
    let mut v = x;
    let mut k = 0u64;
    while v != 1 && k < cap {
        let next = if v % 2 == 1 {
            match v.checked_mul(3).and_then(|t| t.checked_add(1)) {
                Some(t) => t / 2,
                None => break,
            }
        } else {
            v / 2
        };
        v = next;
        run = if v % 2 == 1 { run + 1 } else { 0 };
        best = best.max(run);
        k += 1;
    }

    OrbitStats {
        start: x,
        total_steps,
        terras_steps,
        peak,
        peak_ratio: peak as f64 / x as f64,
        max_odd_run: best,
    }
}
