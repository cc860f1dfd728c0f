//! Derived statistics: quantiles, termination zones, cycle feasibility,
//! stopping-time distributions, autocorrelation, Walsh coefficients, and
//! growth tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collatz::{self, OrbitStats, OrbitValue, Resolution};
use crate::cumulative::KahanSum;
use crate::error::{Error, Result};
use crate::phase::{alpha, circle_dist, classic_eps, classic_phase, PhaseAngle};
use crate::survey::{stratified_sample, SampleSpec, BLOCK};

/// Nearest-rank quantiles (no interpolation): the q-quantile of n values is
/// the value at rank ceil(q*n), so every result is an exact sample statistic.
pub fn quantiles(values: &[f64], qs: &[f64]) -> Result<Vec<f64>> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN values"));
    quantiles_sorted(&sorted, qs)
}

/// Nearest-rank lookup into an already ascending-sorted slice, for callers
/// that keep a large sorted sample around.
pub fn quantiles_sorted(sorted: &[f64], qs: &[f64]) -> Result<Vec<f64>> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = sorted.len();
    Ok(qs
        .iter()
        .map(|&q| {
            let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
            sorted[rank - 1]
        })
        .collect())
}

/// Zone center: the phase of 1.
pub fn zone_center() -> PhaseAngle {
    classic_phase(1)
}

/// Circular distance from phase(x) to the zone center.
pub fn zone_distance(x: OrbitValue) -> f64 {
    circle_dist(classic_phase(x), zone_center())
}

/// Z_delta membership: circle_dist(T(x), T(1)) < delta (strict).
pub fn zone_membership(x: OrbitValue, delta: f64) -> bool {
    zone_distance(x) < delta
}

/// Termination-zone statistics for one delta over one start range.
/// Steps-to-1 is the total stopping time of the member integer itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneReport {
    pub delta: f64,
    pub center: f64,
    pub range: (OrbitValue, OrbitValue),
    pub members_tested: u64,
    pub member_fraction: f64,
    pub max_steps_to_1: u64,
    pub max_steps_x: OrbitValue,
    pub mean_steps_to_1: f64,
    pub unresolved: u64,
}

#[derive(Clone)]
struct ZoneAgg {
    members: u64,
    max_steps: u64,
    max_x: OrbitValue,
    steps_sum: u64,
    resolved: u64,
    unresolved: u64,
}

impl ZoneAgg {
    fn new() -> Self {
        ZoneAgg {
            members: 0,
            max_steps: 0,
            max_x: 0,
            steps_sum: 0,
            resolved: 0,
            unresolved: 0,
        }
    }

    fn record(&mut self, x: OrbitValue, steps: Option<u64>) {
        self.members += 1;
        match steps {
            Some(s) => {
                self.resolved += 1;
                self.steps_sum += s;
                if s > self.max_steps || self.max_x == 0 {
                    self.max_steps = s;
                    self.max_x = x;
                }
            }
            None => self.unresolved += 1,
        }
    }

    fn absorb(&mut self, other: &ZoneAgg) {
        self.members += other.members;
        if other.resolved > 0 && (other.max_steps > self.max_steps || self.max_x == 0) {
            self.max_steps = other.max_steps;
            self.max_x = other.max_x;
        }
        self.steps_sum += other.steps_sum;
        self.resolved += other.resolved;
        self.unresolved += other.unresolved;
    }
}

/// One pass over [lo, hi]: each x is classified against every delta, and the
/// stopping time is computed once per x that lands in the widest zone.
pub fn termination_zone_report(
    deltas: &[f64],
    lo: OrbitValue,
    hi: OrbitValue,
    cap: u64,
) -> Result<Vec<ZoneReport>> {
    if lo < 1 || lo > hi {
        return Err(Error::EmptyRange);
    }
    if deltas.is_empty() {
        return Err(Error::EmptyInput);
    }
    if deltas.iter().any(|&d| !(0.0..=0.5).contains(&d) || d == 0.0) {
        return Err(Error::BadInput("zone delta must lie in (0, 0.5]".into()));
    }
    let widest = deltas.iter().cloned().fold(0.0_f64, f64::max);
    let blocks = block_list(lo, hi);
    let parts: Vec<Vec<ZoneAgg>> = blocks
        .par_iter()
        .map(|&(a, b)| {
            let mut aggs = vec![ZoneAgg::new(); deltas.len()];
            let mut x = a;
            loop {
                let dist = zone_distance(x);
                if dist < widest {
                    let steps = collatz::total_stopping_time(x, cap).steps();
                    for (agg, &d) in aggs.iter_mut().zip(deltas) {
                        if dist < d {
                            agg.record(x, steps);
                        }
                    }
                }
                if x == b {
                    break;
                }
                x += 1;
            }
            aggs
        })
        .collect();
    let mut totals = vec![ZoneAgg::new(); deltas.len()];
    for part in &parts {
        for (t, p) in totals.iter_mut().zip(part) {
            t.absorb(p);
        }
    }
    let n = (hi - lo + 1) as f64;
    Ok(totals
        .into_iter()
        .zip(deltas)
        .map(|(agg, &delta)| ZoneReport {
            delta,
            center: zone_center().value(),
            range: (lo, hi),
            members_tested: agg.members,
            member_fraction: agg.members as f64 / n,
            max_steps_to_1: agg.max_steps,
            max_steps_x: agg.max_x,
            mean_steps_to_1: if agg.resolved == 0 {
                0.0
            } else {
                agg.steps_sum as f64 / agg.resolved as f64
            },
            unresolved: agg.unresolved,
        })
        .collect())
}

/// Zone mass under logarithmic density: sum of 1/x over members divided by
/// sum of 1/x over the range. Converges to 2*delta where the counting
/// fraction does not, but only at rate 1/log(hi): the members 1, 7, 43,
/// 259, ... sit exactly at the zone center and hold the small-x mass up.
pub fn zone_log_fraction(lo: OrbitValue, hi: OrbitValue, deltas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if lo < 1 || lo > hi {
        return Err(Error::EmptyRange);
    }
    let parts: Vec<(Vec<KahanSum>, KahanSum)> = block_list(lo, hi)
        .par_iter()
        .map(|&(a, b)| {
            let mut num = vec![KahanSum::new(); deltas.len()];
            let mut den = KahanSum::new();
            let mut x = a;
            loop {
                let w = 1.0 / x as f64;
                den.add(w);
                let dist = zone_distance(x);
                for (acc, &d) in num.iter_mut().zip(deltas) {
                    if dist < d {
                        acc.add(w);
                    }
                }
                if x == b {
                    break;
                }
                x += 1;
            }
            (num, den)
        })
        .collect();
    let mut num = vec![KahanSum::new(); deltas.len()];
    let mut den = KahanSum::new();
    for (pn, pd) in &parts {
        for (acc, p) in num.iter_mut().zip(pn) {
            acc.absorb(*p);
        }
        den.absorb(*pd);
    }
    Ok(deltas
        .iter()
        .zip(num)
        .map(|(&d, acc)| (d, acc.value() / den.value()))
        .collect())
}

fn block_list(lo: OrbitValue, hi: OrbitValue) -> Vec<(OrbitValue, OrbitValue)> {
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start + (BLOCK - 1));
        out.push((start, end));
        if end == hi {
            break;
        }
        start = end + 1;
    }
    out
}

/// Per-step uniform deviation bound used in the cycle argument.
pub const UNIFORM_EPS_BOUND: f64 = 0.275;

/// One row of the cycle-length feasibility table: a p-cycle would force
/// |p*alpha - m| <= 0.275*p for the nearest integer m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    pub p: u32,
    pub p_alpha: f64,
    pub m: i64,
    pub residue: f64,
    pub bound: f64,
    pub feasible: bool,
}

pub fn cycle_feasibility(p_max: u32) -> Vec<CycleRow> {
    (1..=p_max)
        .map(|p| {
            let pa = p as f64 * alpha();
            let m = pa.round() as i64;
            let residue = (pa - m as f64).abs();
            let bound = UNIFORM_EPS_BOUND * p as f64;
            CycleRow {
                p,
                p_alpha: pa,
                m,
                residue,
                bound,
                feasible: residue <= bound,
            }
        })
        .collect()
}

/// Sums eps over a verified cycle and returns (sum, circular residual of
/// sum + p*alpha), the quantity that must vanish on any true cycle.
pub fn cycle_eps_sum(cycle: &[OrbitValue]) -> Result<(f64, f64)> {
    if cycle.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, &x) in cycle.iter().enumerate() {
        let next = cycle[(i + 1) % cycle.len()];
        if collatz::step(x)? != next {
            return Err(Error::NotACycle { at: i });
        }
    }
    let mut sum = KahanSum::new();
    for &x in cycle {
        sum.add(classic_eps(x).value());
    }
    let total = sum.value();
    let residual = circle_dist(
        PhaseAngle::new(total + cycle.len() as f64 * alpha()),
        PhaseAngle::new(0.0),
    );
    Ok((total, residual))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoppingMode {
    Total,
    Terras,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub k: u64,
    pub count: u64,
    /// empirical P(sigma > k) among resolved starts
    pub survival: f64,
    /// 2B/(k*alpha) tail model, clamped to 1
    pub model: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingReport {
    pub range: (OrbitValue, OrbitValue),
    pub mode: StoppingMode,
    pub tail_b: f64,
    pub resolved: u64,
    pub unresolved: u64,
    pub rows: Vec<SurvivalRow>,
}

/// Stopping-time distribution over [lo, hi] with the published exponential
/// tail model. `tail_b` defaults to 0.281 at the CLI; pass any B to refit.
pub fn stopping_histogram(
    lo: OrbitValue,
    hi: OrbitValue,
    mode: StoppingMode,
    cap: u64,
    tail_b: f64,
) -> Result<StoppingReport> {
    if lo < 1 || lo > hi {
        return Err(Error::EmptyRange);
    }
    let parts: Vec<(std::collections::BTreeMap<u64, u64>, u64)> = block_list(lo, hi)
        .par_iter()
        .map(|&(a, b)| {
            let mut hist = std::collections::BTreeMap::new();
            let mut unresolved = 0u64;
            let mut x = a;
            loop {
                let res = match mode {
                    StoppingMode::Total => collatz::total_stopping_time(x, cap),
                    StoppingMode::Terras => collatz::terras_stopping_time(x, cap),
                };
                match res.steps() {
                    Some(s) => *hist.entry(s).or_insert(0) += 1,
                    None => unresolved += 1,
                }
                if x == b {
                    break;
                }
                x += 1;
            }
            (hist, unresolved)
        })
        .collect();
    let mut hist = std::collections::BTreeMap::new();
    let mut unresolved = 0u64;
    for (h, u) in parts {
        for (k, v) in h {
            *hist.entry(k).or_insert(0) += v;
        }
        unresolved += u;
    }
    let resolved: u64 = hist.values().sum();
    let model = |k: u64| {
        if k == 0 {
            1.0
        } else {
            (2.0 * tail_b / (k as f64 * alpha())).min(1.0)
        }
    };
    let mut rows = Vec::with_capacity(hist.len() + 1);
    let mut seen = 0u64;
    if !hist.contains_key(&0) {
        rows.push(SurvivalRow {
            k: 0,
            count: 0,
            survival: 1.0,
            model: model(0),
        });
    }
    for (&k, &c) in &hist {
        seen += c;
        rows.push(SurvivalRow {
            k,
            count: c,
            survival: (resolved - seen) as f64 / resolved.max(1) as f64,
            model: model(k),
        });
    }
    Ok(StoppingReport {
        range: (lo, hi),
        mode,
        tail_b,
        resolved,
        unresolved,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrReport {
    pub sample: SampleSpec,
    /// (k, R_hat(k)) pairs for k = 0..=k_max
    pub lags: Vec<(u32, f64)>,
    pub dropped: u64,
}

/// R_hat(k) = sample mean of eps(x) * eps(C^k(x)). Orbits continue through
/// the trivial cycle, so every lag is defined; terms an overflow would
/// truncate are dropped and counted.
pub fn autocorrelation(spec: &SampleSpec, k_max: u32) -> Result<AutocorrReport> {
    let sample = stratified_sample(spec)?;
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let parts: Vec<(Vec<KahanSum>, Vec<u64>, u64)> = sample
        .par_chunks(BLOCK as usize)
        .map(|chunk| {
            let mut sums = vec![KahanSum::new(); k_max as usize + 1];
            let mut counts = vec![0u64; k_max as usize + 1];
            let mut dropped = 0u64;
            for &x in chunk {
                let e0 = classic_eps(x).value();
                let mut cur = x;
                for k in 0..=k_max {
                    if k > 0 {
                        cur = match collatz::step(cur) {
                            Ok(v) => v,
                            Err(_) => {
                                dropped += (k_max - k + 1) as u64;
                                break;
                            }
                        };
                    }
                    sums[k as usize].add(e0 * classic_eps(cur).value());
                    counts[k as usize] += 1;
                }
            }
            (sums, counts, dropped)
        })
        .collect();
    let mut sums = vec![KahanSum::new(); k_max as usize + 1];
    let mut counts = vec![0u64; k_max as usize + 1];
    let mut dropped = 0u64;
    for (ps, pc, pd) in &parts {
        for (acc, p) in sums.iter_mut().zip(ps) {
            acc.absorb(*p);
        }
        for (acc, p) in counts.iter_mut().zip(pc) {
            *acc += p;
        }
        dropped += pd;
    }
    Ok(AutocorrReport {
        sample: *spec,
        lags: (0..=k_max)
            .map(|k| {
                let c = counts[k as usize];
                (k, if c == 0 { 0.0 } else { sums[k as usize].value() / c as f64 })
            })
            .collect(),
        dropped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalshRow {
    pub set: Vec<u8>,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalshReport {
    pub sample: SampleSpec,
    pub m: u8,
    pub rows: Vec<WalshRow>,
    /// plain mean of eps over the sample; accumulated on the same path as
    /// the empty set's coefficient, so the two agree bitwise
    pub mean_eps: f64,
    pub dropped: u64,
}

impl WalshReport {
    pub fn coefficient_of(&self, set: &[u8]) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.set == set)
            .map(|r| r.coefficient)
    }
}

/// Default index sets: all subsets of {1..6} of size at most 3, empty set
/// first, then lexicographic.
pub fn default_walsh_sets() -> Vec<Vec<u8>> {
    let mut sets = vec![vec![]];
    for i in 1..=6u8 {
        sets.push(vec![i]);
    }
    for i in 1..=6u8 {
        for j in i + 1..=6 {
            sets.push(vec![i, j]);
        }
    }
    for i in 1..=6u8 {
        for j in i + 1..=6 {
            for k in j + 1..=6 {
                sets.push(vec![i, j, k]);
            }
        }
    }
    sets
}

/// Walsh coefficients of eps against parity words.
///
/// The word of x is the parity sequence of C^0(x)..C^(m-1)(x), bit value 1
/// for odd, indexed from 1. a_hat(I) = mean of eps(x) * prod_{i in I}
/// (-1)^(omega_i).
pub fn walsh_coefficients(
    spec: &SampleSpec,
    m: u8,
    sets: &[Vec<u8>],
) -> Result<WalshReport> {
    if m == 0 {
        return Err(Error::BadInput("word length m must be positive".into()));
    }
    for set in sets {
        if set.iter().any(|&i| i == 0 || i > m) {
            return Err(Error::BadInput(format!(
                "walsh set {set:?} exceeds word length {m}"
            )));
        }
    }
    let sample = stratified_sample(spec)?;
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let parts: Vec<(Vec<KahanSum>, KahanSum, u64, u64)> = sample
        .par_chunks(BLOCK as usize)
        .map(|chunk| {
            let mut sums = vec![KahanSum::new(); sets.len()];
            let mut mean_acc = KahanSum::new();
            let mut count = 0u64;
            let mut dropped = 0u64;
            let mut word = vec![false; m as usize];
            'outer: for &x in chunk {
                let mut cur = x;
                for slot in word.iter_mut() {
                    *slot = cur % 2 == 1;
                    cur = match collatz::step(cur) {
                        Ok(v) => v,
                        Err(_) => {
                            dropped += 1;
                            continue 'outer;
                        }
                    };
                }
                let e = classic_eps(x).value();
                mean_acc.add(e);
                count += 1;
                for (acc, set) in sums.iter_mut().zip(sets) {
                    let mut sign = 1.0;
                    for &i in set {
                        if word[i as usize - 1] {
                            sign = -sign;
                        }
                    }
                    acc.add(e * sign);
                }
            }
            (sums, mean_acc, count, dropped)
        })
        .collect();
    let mut sums = vec![KahanSum::new(); sets.len()];
    let mut mean_acc = KahanSum::new();
    let mut count = 0u64;
    let mut dropped = 0u64;
    for (ps, pm, pc, pd) in &parts {
        for (acc, p) in sums.iter_mut().zip(ps) {
            acc.absorb(*p);
        }
        mean_acc.absorb(*pm);
        count += pc;
        dropped += pd;
    }
    if count == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(WalshReport {
        sample: *spec,
        m,
        rows: sets
            .iter()
            .zip(sums)
            .map(|(set, acc)| WalshRow {
                set: set.clone(),
                coefficient: acc.value() / count as f64,
            })
            .collect(),
        mean_eps: mean_acc.value() / count as f64,
        dropped,
    })
}

/// "{1,3}" style label for report output.
pub fn set_label(set: &[u8]) -> String {
    let inner: Vec<String> = set.iter().map(u8::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// Combined spectral summary backing the spectrum report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimates {
    pub sample: SampleSpec,
    pub m: u8,
    pub autocorr: Vec<(u32, f64)>,
    pub walsh: Vec<WalshRow>,
    pub mean_eps: f64,
    pub dropped: u64,
}

pub fn spectral_estimates(
    spec: &SampleSpec,
    k_max: u32,
    m: u8,
    sets: &[Vec<u8>],
) -> Result<SpectralEstimates> {
    let ac = autocorrelation(spec, k_max)?;
    let w = walsh_coefficients(spec, m, sets)?;
    Ok(SpectralEstimates {
        sample: *spec,
        m,
        autocorr: ac.lags,
        walsh: w.rows,
        mean_eps: w.mean_eps,
        dropped: ac.dropped + w.dropped,
    })
}

/// Per-start orbit statistics rows (peaks, growth ratios, odd runs).
pub fn growth_table(xs: &[OrbitValue], cap: u64) -> Result<Vec<OrbitStats>> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(xs.iter().map(|&x| collatz::orbit_stats(x, cap)).collect())
}

/// Resolution of every start in a range; the sanity sweep behind "all
/// trajectories reach 1".
pub fn all_resolve(lo: OrbitValue, hi: OrbitValue, cap: u64) -> Result<(u64, Vec<OrbitValue>)> {
    if lo < 1 || lo > hi {
        return Err(Error::EmptyRange);
    }
    let parts: Vec<(u64, Vec<OrbitValue>)> = block_list(lo, hi)
        .par_iter()
        .map(|&(a, b)| {
            let mut ok = 0u64;
            let mut failures = Vec::new();
            let mut x = a;
            loop {
                match collatz::total_stopping_time(x, cap) {
                    Resolution::Steps(_) => ok += 1,
                    _ => failures.push(x),
                }
                if x == b {
                    break;
                }
                x += 1;
            }
            (ok, failures)
        })
        .collect();
    let mut ok = 0u64;
    let mut failures = Vec::new();
    for (o, f) in parts {
        ok += o;
        failures.extend(f);
    }
    Ok((ok, failures))
}
