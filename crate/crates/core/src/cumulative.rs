//! Per-trajectory phase records: compensated cumulative error E_n(x) and the
//! exact telescoping identity T(C^n(x)) = T(x) + n*alpha + E_n (mod 1).

use serde::{Deserialize, Serialize};

use crate::collatz::{self, OrbitValue};
use crate::phase::{alpha, circle_dist, classic_phase, wrap_signed, PhaseAngle};

/// Kahan compensated accumulator. Adding n terms of magnitude <= 0.5 keeps
/// the result within a couple of ulps of the exact sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let y = v - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    /// Folds another partial sum in. Used by the deterministic partition
    /// merge: partials are always absorbed in fixed partition order.
    pub fn absorb(&mut self, other: KahanSum) {
        self.add(other.sum);
        self.compensation += other.compensation;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// One orbit with phases, per-step deviations, and running cumulative error.
///
/// `cum_errors` has the same length as `values`, with `cum_errors[0] = 0` and
/// `cum_errors[n] = cum_errors[n-1] + eps_seq[n-1]`; `eps_seq` is one shorter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPhaseRecord {
    pub start: OrbitValue,
    pub values: Vec<OrbitValue>,
    pub parities: Vec<bool>,
    pub phases: Vec<PhaseAngle>,
    pub eps_seq: Vec<f64>,
    pub cum_errors: Vec<f64>,
    /// Reached 1.
    pub resolved: bool,
    pub overflowed: bool,
}

/// Tracks the classic orbit of x until the first arrival at 1 (n >= 1) or
/// until `cap` steps. Starting at x = 1 therefore records the trivial cycle
/// 1 -> 4 -> 2 -> 1 once.
///
/// Deviations are taken from the stored phases (wrap(T(next) - T(cur) - a)),
/// so the record is internally consistent for the telescoping check, and the
/// cumulative error is accumulated with compensated summation.
pub fn track(x: OrbitValue, cap: u64) -> TrajectoryPhaseRecord {
    debug_assert!(x >= 1);
    let a = alpha();
    let traj = collatz::trajectory(x, cap);
    let n = traj.values.len();
    let mut phases = Vec::with_capacity(n);
    let mut parities = Vec::with_capacity(n);
    for &v in &traj.values {
        phases.push(classic_phase(v));
        parities.push(v % 2 == 1);
    }
    let mut eps_seq = Vec::with_capacity(n.saturating_sub(1));
    let mut cum_errors = Vec::with_capacity(n);
    cum_errors.push(0.0);
    let mut acc = KahanSum::new();
    for i in 1..n {
        let e = wrap_signed(phases[i].value() - phases[i - 1].value() - a).value();
        eps_seq.push(e);
        acc.add(e);
        cum_errors.push(acc.value());
    }
    let resolved = traj.values.last() == Some(&1) && n > 1;
    TrajectoryPhaseRecord {
        start: x,
        values: traj.values,
        parities,
        phases,
        eps_seq,
        cum_errors,
        resolved,
        overflowed: traj.overflowed,
    }
}

/// Circular residual of the telescoping identity at step n:
/// d(T(C^n(x)), frac(T(x) + n*alpha + E_n)). Exact in real arithmetic; any
/// nonzero value is floating-point noise.
pub fn telescope_residual(rec: &TrajectoryPhaseRecord, n: usize) -> f64 {
    assert!(n < rec.values.len(), "record has no step {n}");
    let predicted = PhaseAngle::new(rec.phases[0].value() + n as f64 * alpha() + rec.cum_errors[n]);
    circle_dist(rec.phases[n], predicted)
}

/// Largest telescoping residual over the whole record.
pub fn max_telescope_residual(rec: &TrajectoryPhaseRecord) -> f64 {
    (0..rec.values.len())
        .map(|n| telescope_residual(rec, n))
        .fold(0.0, f64::max)
}

/// (max |E_n|, argmax n) over the record.
pub fn max_abs_cum(rec: &TrajectoryPhaseRecord) -> (f64, usize) {
    let mut best = 0.0_f64;
    let mut arg = 0usize;
    for (n, &e) in rec.cum_errors.iter().enumerate() {
        if e.abs() > best {
            best = e.abs();
            arg = n;
        }
    }
    (best, arg)
}

/// Row view of a record in the (n, value, parity, phase, eps, cum_error)
/// schema; `eps` is empty on the final row, which has no outgoing step.
#[derive(Debug, Clone, Serialize)]
pub struct RecordRow {
    pub n: usize,
    pub value: OrbitValue,
    pub parity: u8,
    pub phase: f64,
    pub eps: Option<f64>,
    pub cum_error: f64,
}

pub fn record_rows(rec: &TrajectoryPhaseRecord) -> Vec<RecordRow> {
    (0..rec.values.len())
        .map(|n| RecordRow {
            n,
            value: rec.values[n],
            parity: rec.parities[n] as u8,
            phase: rec.phases[n].value(),
            eps: rec.eps_seq.get(n).copied(),
            cum_error: rec.cum_errors[n],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_matches_exact_on_adversarial_input() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..10 {
            k.add(1e-16);
        }
        // naive summation would still be exactly 1.0 here
        assert!(k.value() > 1.0);
        assert!((k.value() - (1.0 + 1e-15)).abs() < 2.3e-16);
    }

    #[test]
    fn kahan_absorb_matches_whole_sum() {
        let terms: Vec<f64> = (1..=1000).map(|i| ((i * 2654435761u64) % 997) as f64 * 1e-7).collect();
        let mut whole = KahanSum::new();
        for &t in &terms {
            whole.add(t);
        }
        let mut left = KahanSum::new();
        let mut right = KahanSum::new();
        for &t in &terms[..500] {
            left.add(t);
        }
        for &t in &terms[500..] {
            right.add(t);
        }
        let mut merged = left;
        merged.absorb(right);
        assert!((merged.value() - whole.value()).abs() < 1e-12);
    }

    #[test]
    fn track_trivial_cycle() {
        let rec = track(1, 3);
        assert_eq!(rec.values, vec![1, 4, 2, 1]);
        let want = [0.0, 0.086033132501691839, 0.11199644757485572, 0.16055842170362475];
        for (got, want) in rec.cum_errors.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(rec.resolved);
    }

    #[test]
    fn track_single_step_examples() {
        let rec27 = track(27, 1);
        assert!((rec27.cum_errors[1] - 0.0040887408259263668).abs() < 1e-12);
        let rec2 = track(2, 1);
        assert!((rec2.cum_errors[1] - 0.048561974128769045).abs() < 1e-12);
    }

    #[test]
    fn max_abs_cum_examples() {
        let (m1, n1) = max_abs_cum(&track(1, 10));
        assert!((m1 - 0.16055842170362475).abs() < 1e-12);
        assert_eq!(n1, 3);
        let (m4, n4) = max_abs_cum(&track(4, 10));
        assert!((m4 - 0.074525289201932923).abs() < 1e-12);
        assert_eq!(n4, 2);
        let (m16, n16) = max_abs_cum(&track(16, 10));
        assert!((m16 - 0.0948224578763327).abs() < 1e-12);
        assert_eq!(n16, 4);
        let (m27, _) = max_abs_cum(&track(27, 200));
        assert!((m27 - 0.198857).abs() < 1e-6);
        let (m97, _) = max_abs_cum(&track(97, 200));
        assert!((m97 - 0.196042).abs() < 1e-6);
    }

    #[test]
    fn telescoping_known_orbits() {
        for x in [27u128, 97] {
            let rec = track(x, 100_000);
            assert!(rec.resolved);
            assert!(max_telescope_residual(&rec) < 1e-9);
        }
        assert_eq!(telescope_residual(&track(5, 10), 0), 0.0);
    }

    #[test]
    fn cumulative_error_is_monotone_for_classic_map() {
        // every per-step deviation is positive, so E_n increases strictly
        for x in [7u128, 27, 97, 703, 9999] {
            let rec = track(x, 100_000);
            for w in rec.cum_errors.windows(2) {
                assert!(w[1] > w[0], "x={x}");
            }
        }
    }

    #[test]
    fn record_rows_schema() {
        let rec = track(27, 5);
        let rows = record_rows(&rec);
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].n, 0);
        assert_eq!(rows[0].value, 27);
        assert_eq!(rows[0].parity, 1);
        assert_eq!(rows[0].cum_error, 0.0);
        assert!(rows[0].eps.is_some());
        assert!(rows[5].eps.is_none());
        assert_eq!(rows[5].value, 31);
    }

    #[test]
    fn split_tracking_matches_whole() {
        let whole = track(27, 100_000);
        let first = track(27, 50);
        let rest = track(*first.values.last().unwrap(), 100_000);
        let n1 = first.cum_errors.len() - 1;
        for (i, e) in rest.cum_errors.iter().enumerate() {
            let merged = first.cum_errors[n1] + e;
            assert!((merged - whole.cum_errors[n1 + i]).abs() < 1e-12);
        }
    }
}
