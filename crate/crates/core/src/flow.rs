//! The continuous interpolating flow and its conjugacy checks.
//!
//! Two variants exist because the published closed form (6^t scaling) and
//! the published conjugacy identity (translation by t*alpha) contradict each
//! other. The corrected variant scales by 3^t and satisfies the identity at
//! rate alpha; the printed variant keeps 6^t and translates at rate 1. Both
//! are exact; the printed numeric table matches neither.

use serde::{Deserialize, Serialize};

use crate::collatz::{self, OrbitValue};
use crate::error::Result;
use crate::phase::{alpha, circle_dist, classic_transform, PhaseAngle};

pub const FLOW_SHIFT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowVariant {
    /// 3^t scaling; T(flow) = T(x) + t*alpha mod 1
    Corrected,
    /// 6^t scaling as printed; T(flow) = T(x) + t mod 1
    Printed,
}

impl FlowVariant {
    pub fn scale_base(self) -> f64 {
        match self {
            FlowVariant::Corrected => 3.0,
            FlowVariant::Printed => 6.0,
        }
    }

    /// Phase translation rate per unit of flow time.
    pub fn rate(self) -> f64 {
        match self {
            FlowVariant::Corrected => alpha(),
            FlowVariant::Printed => 1.0,
        }
    }
}

/// phi_t(x) = base^t * (x + 1/5) - 1/5, evaluated as base^t * x +
/// (base^t - 1)/5 so that t = 0 is the exact identity.
pub fn flow(x: f64, t: f64, variant: FlowVariant) -> f64 {
    // natural domain: x + 1/5 > 0, preserved by the flow in both directions
    debug_assert!(x > -FLOW_SHIFT);
    let p = variant.scale_base().powf(t);
    p * x + (p - 1.0) * FLOW_SHIFT
}

/// Distance between T(phi_t(x)) and the translated phase T(x) + t*rate.
/// Zero up to float noise for both variants.
pub fn flow_conjugacy_residual(x: f64, t: f64, variant: FlowVariant) -> f64 {
    let tr = classic_transform();
    let moved = tr.phase_real(flow(x, t, variant));
    let translated = PhaseAngle::new(tr.phase_real(x).value() + t * variant.rate());
    circle_dist(moved, translated)
}

/// (phi_1(x), phi_1(x) - C(x)): how far one unit of flow time lands from one
/// map step. For odd x under the corrected variant the gap is exactly -0.6;
/// for even x the flow triples where the map halves.
pub fn flow_vs_map(x: OrbitValue, variant: FlowVariant) -> Result<(f64, f64)> {
    let f = flow(x as f64, 1.0, variant);
    let c = collatz::step(x)?;
    Ok((f, f - c as f64))
}

/// Worst conjugacy residual over an integer grid, at both integer phases and
/// a fixed fractional time set.
pub fn max_conjugacy_residual(
    lo: OrbitValue,
    hi: OrbitValue,
    times: &[f64],
    variant: FlowVariant,
) -> f64 {
    let mut worst = 0.0_f64;
    let mut x = lo.max(1);
    while x <= hi {
        for &t in times {
            worst = worst.max(flow_conjugacy_residual(x as f64, t, variant));
        }
        x += 1;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((flow(1.0, 1.0, FlowVariant::Corrected) - 3.4).abs() < 1e-14);
        assert!((flow(1.0, 1.0, FlowVariant::Printed) - 7.0).abs() < 1e-14);
        // t = 0 is the exact identity
        assert_eq!(flow(123.456, 0.0, FlowVariant::Corrected), 123.456);
        assert_eq!(flow(123.456, 0.0, FlowVariant::Printed), 123.456);
    }

    #[test]
    fn conjugacy_rates() {
        // T(3.4) = T(1) + alpha: ln(3.6)/ln 6
        let t34 = classic_transform().phase_real(3.4).value();
        assert!((t34 - 0.71490279106153121).abs() < 1e-15);
        assert!(flow_conjugacy_residual(1.0, 1.0, FlowVariant::Corrected) < 1e-12);
        // T(7.2) wraps back to T(1)
        assert!(flow_conjugacy_residual(1.0, 1.0, FlowVariant::Printed) < 1e-12);
        assert_eq!(flow_conjugacy_residual(5.0, 0.0, FlowVariant::Corrected), 0.0);
        for &t in &[-1.7, -0.3, 0.25, 0.5, 1.9] {
            assert!(flow_conjugacy_residual(41.0, t, FlowVariant::Corrected) < 1e-12);
            assert!(flow_conjugacy_residual(41.0, t, FlowVariant::Printed) < 1e-12);
        }
    }

    #[test]
    fn group_law() {
        for &(s, t) in &[(0.5, 0.25), (-1.0, 2.0), (1.3, -0.4)] {
            for &x in &[1.0, 10.0, 999_983.0] {
                for variant in [FlowVariant::Corrected, FlowVariant::Printed] {
                    let direct = flow(x, s + t, variant);
                    let composed = flow(flow(x, s, variant), t, variant);
                    assert!(
                        (direct - composed).abs() < 1e-10 * (1.0 + direct.abs()),
                        "x={x} s={s} t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn flow_against_map() {
        let (f1, d1) = flow_vs_map(1, FlowVariant::Corrected).unwrap();
        assert!((f1 - 3.4).abs() < 1e-14 && (d1 + 0.6).abs() < 1e-14);
        let (f3, d3) = flow_vs_map(3, FlowVariant::Corrected).unwrap();
        assert!((f3 - 9.4).abs() < 1e-12 && (d3 + 0.6).abs() < 1e-12);
        let (f10, d10) = flow_vs_map(10, FlowVariant::Corrected).unwrap();
        assert!((f10 - 30.4).abs() < 1e-12 && (d10 - 25.4).abs() < 1e-12);
        // odd x: constant gap of exactly 0.6 against 3x+1
        for x in [5u128, 7, 9, 1001, 99_999] {
            let f = flow(x as f64, 1.0, FlowVariant::Corrected);
            assert!((f - (3 * x + 1) as f64 + 0.6).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_residual_small() {
        let times = [0.25, 0.5, 1.0, 1.75];
        let w = max_conjugacy_residual(1, 2_000, &times, FlowVariant::Corrected);
        assert!(w < 1e-12, "worst residual {w}");
    }
}
