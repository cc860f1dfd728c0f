//! Large-scale sweeps: exhaustive verification, reproducible sampling,
//! trajectory sweeps, and the transform-parameter grid scan.
//!
//! Everything here follows one concurrency contract: work is cut into static
//! contiguous blocks (~2^16 integers), blocks are evaluated independently, and
//! partial results are merged in partition order. Reports are therefore
//! bitwise identical for any worker count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collatz::{self, OrbitValue};
use crate::cumulative::KahanSum;
use crate::error::{Error, Result};
use crate::phase::{
    alpha, circle_dist, classic_eps, classic_phase, eps, wrap_signed, MapFamily, PhaseAngle,
    PhaseTransform, Rat,
};

/// Static partition block size.
pub const BLOCK: u128 = 1 << 16;

fn blocks(lo: OrbitValue, hi: OrbitValue) -> Vec<(OrbitValue, OrbitValue)> {
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

/// Fixed-resolution histogram of |eps| over [0, 0.5]: 500 bins of width 1e-3,
/// with exact extremes tracked on the side. Mergeable and deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileSketch {
    bins: Vec<u64>,
    count: u64,
    exact_min: f64,
    exact_max: f64,
}

pub const SKETCH_BINS: usize = 500;
pub const SKETCH_WIDTH: f64 = 1e-3;

impl Default for QuantileSketch {
    fn default() -> Self {
        QuantileSketch {
            bins: vec![0; SKETCH_BINS],
            count: 0,
            exact_min: f64::INFINITY,
            exact_max: f64::NEG_INFINITY,
        }
    }
}

impl QuantileSketch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, v: f64) {
        debug_assert!((0.0..=0.5).contains(&v));
        let idx = ((v / SKETCH_WIDTH) as usize).min(SKETCH_BINS - 1);
        self.bins[idx] += 1;
        self.count += 1;
        self.exact_min = self.exact_min.min(v);
        self.exact_max = self.exact_max.max(v);
    }

    pub fn merge(&mut self, other: &QuantileSketch) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.count += other.count;
        self.exact_min = self.exact_min.min(other.exact_min);
        self.exact_max = self.exact_max.max(other.exact_max);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Nearest-rank quantile, reported at bin-center resolution; q = 0 and
    /// q = 1 return the exact extremes.
    pub fn quantile(&self, q: f64) -> Option<f64> {
        if self.count == 0 {
            return None;
        }
        if q <= 0.0 {
            return Some(self.exact_min);
        }
        if q >= 1.0 {
            return Some(self.exact_max);
        }
        let rank = ((q * self.count as f64).ceil() as u64).clamp(1, self.count);
        let mut seen = 0u64;
        for (i, &c) in self.bins.iter().enumerate() {
            seen += c;
            if seen >= rank {
                return Some((i as f64 + 0.5) * SKETCH_WIDTH);
            }
        }
        Some(self.exact_max)
    }

    /// The fixed probe set used in reports.
    pub fn summary(&self) -> QuantileSummary {
        const PROBES: [f64; 11] = [0.0, 0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.99, 1.0];
        QuantileSummary {
            probes: PROBES
                .iter()
                .map(|&q| (q, self.quantile(q).unwrap_or(f64::NAN)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileSummary {
    /// (q, |eps| quantile) pairs, nondecreasing in q.
    pub probes: Vec<(f64, f64)>,
}

/// Aggregate of a verification sweep over one integer range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub range: (OrbitValue, OrbitValue),
    pub count: u64,
    pub max_abs_eps: f64,
    pub argmax_x: OrbitValue,
    pub mean_abs_eps: f64,
    pub quantiles: QuantileSummary,
    pub overflow_count: u64,
}

#[derive(Debug, Clone)]
struct EpsAgg {
    max: f64,
    argmax: OrbitValue,
    sum_abs: KahanSum,
    sketch: QuantileSketch,
    count: u64,
    overflow: u64,
}

impl EpsAgg {
    fn new() -> Self {
        EpsAgg {
            max: f64::NEG_INFINITY,
            argmax: 0,
            sum_abs: KahanSum::new(),
            sketch: QuantileSketch::new(),
            count: 0,
            overflow: 0,
        }
    }

    fn record(&mut self, x: OrbitValue, e: f64) {
        let a = e.abs();
        if a > self.max {
            self.max = a;
            self.argmax = x;
        }
        self.sum_abs.add(a);
        self.sketch.record(a);
        self.count += 1;
    }

    /// Partition-order merge; ties keep the earlier argmax.
    fn absorb(&mut self, other: &EpsAgg) {
        if other.max > self.max {
            self.max = other.max;
            self.argmax = other.argmax;
        }
        self.sum_abs.absorb(other.sum_abs);
        self.sketch.merge(&other.sketch);
        self.count += other.count;
        self.overflow += other.overflow;
    }

    fn into_report(self, range: (OrbitValue, OrbitValue)) -> RangeReport {
        RangeReport {
            range,
            count: self.count,
            max_abs_eps: if self.count == 0 { 0.0 } else { self.max },
            argmax_x: self.argmax,
            mean_abs_eps: if self.count == 0 {
                0.0
            } else {
                self.sum_abs.value() / self.count as f64
            },
            quantiles: self.sketch.summary(),
            overflow_count: self.overflow,
        }
    }
}

fn eps_agg_block(fam: &MapFamily, lo: OrbitValue, hi: OrbitValue) -> EpsAgg {
    let classic = fam.is_classic();
    let mut agg = EpsAgg::new();
    let mut x = lo;
    loop {
        if classic {
            agg.record(x, classic_eps(x).value());
        } else {
            match eps(fam, x) {
                Ok(e) => agg.record(x, e.value()),
                Err(_) => agg.overflow += 1,
            }
        }
        if x == hi {
            break;
        }
        x += 1;
    }
    agg
}

/// Exact per-x deviation statistics over [lo, hi]. Deterministic under any
/// worker count.
pub fn exhaustive_verify(lo: OrbitValue, hi: OrbitValue, fam: &MapFamily) -> Result<RangeReport> {
    if lo < 1 || lo > hi {
        return Err(Error::EmptyRange);
    }
    let parts: Vec<EpsAgg> = blocks(lo, hi)
        .par_iter()
        .map(|&(a, b)| eps_agg_block(fam, a, b))
        .collect();
    let mut total = EpsAgg::new();
    for p in &parts {
        total.absorb(p);
    }
    Ok(total.into_report((lo, hi)))
}

/// Same statistics over an explicit sample.
pub fn sample_verify(spec: &SampleSpec, fam: &MapFamily) -> Result<RangeReport> {
    let sample = stratified_sample(spec)?;
    let parts: Vec<EpsAgg> = sample
        .par_chunks(BLOCK as usize)
        .map(|chunk| {
            let classic = fam.is_classic();
            let mut agg = EpsAgg::new();
            for &x in chunk {
                if classic {
                    agg.record(x, classic_eps(x).value());
                } else {
                    match eps(fam, x) {
                        Ok(e) => agg.record(x, e.value()),
                        Err(_) => agg.overflow += 1,
                    }
                }
            }
            agg
        })
        .collect();
    let mut total = EpsAgg::new();
    for p in &parts {
        total.absorb(p);
    }
    Ok(total.into_report((spec.lo, spec.hi)))
}

/// Sup of x * |eps(x)| over [lo, hi] with its argmax: the decay-rate check.
pub fn sup_x_abs_eps(lo: OrbitValue, hi: OrbitValue) -> Result<(f64, OrbitValue)> {
    if lo < 1 || lo > hi {
        return Err(Error::EmptyRange);
    }
    let parts: Vec<(f64, OrbitValue)> = blocks(lo, hi)
        .par_iter()
        .map(|&(a, b)| {
            let mut best = (f64::NEG_INFINITY, a);
            let mut x = a;
            loop {
                let v = x as f64 * classic_eps(x).value().abs();
                if v > best.0 {
                    best = (v, x);
                }
                if x == b {
                    break;
                }
                x += 1;
            }
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, lo);
    for p in parts {
        if p.0 > best.0 {
            best = p;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleScheme {
    Exhaustive,
    Uniform,
    PerDecadeStratified,
}

/// A reproducible sample: same spec, same multiset, always.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub lo: OrbitValue,
    pub hi: OrbitValue,
    pub n: u64,
    pub seed: u64,
    pub scheme: SampleScheme,
}

impl SampleSpec {
    pub fn exhaustive(lo: OrbitValue, hi: OrbitValue) -> Self {
        SampleSpec {
            lo,
            hi,
            n: (hi - lo + 1) as u64,
            seed: 0,
            scheme: SampleScheme::Exhaustive,
        }
    }
}

/// Generates the sample described by `spec`.
///
/// The stratified scheme splits [lo, hi] at powers of ten and draws an equal
/// share of uniform integers from each decade slice (any remainder goes to
/// the earliest decades).
pub fn stratified_sample(spec: &SampleSpec) -> Result<Vec<OrbitValue>> {
    if spec.lo < 1 || spec.lo > spec.hi {
        return Err(Error::EmptyRange);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.scheme {
        SampleScheme::Exhaustive => {
            let mut v = Vec::with_capacity((spec.hi - spec.lo + 1) as usize);
            let mut x = spec.lo;
            loop {
                v.push(x);
                if x == spec.hi {
                    break;
                }
                x += 1;
            }
            Ok(v)
        }
        SampleScheme::Uniform => Ok((0..spec.n)
            .map(|_| rng.random_range(spec.lo..=spec.hi))
            .collect()),
        SampleScheme::PerDecadeStratified => {
            let mut slices: Vec<(OrbitValue, OrbitValue)> = Vec::new();
            let mut decade_lo: OrbitValue = 1;
            loop {
                let decade_hi = decade_lo.saturating_mul(10).saturating_sub(1); // [10^k, 10^(k+1) - 1]
                let a = spec.lo.max(decade_lo);
                let b = spec.hi.min(decade_hi);
                if a <= b {
                    slices.push((a, b));
                }
                if decade_hi >= spec.hi {
                    break;
                }
                decade_lo = decade_hi + 1;
            }
            let share = spec.n / slices.len() as u64;
            let extra = (spec.n % slices.len() as u64) as usize;
            let mut out = Vec::with_capacity(spec.n as usize);
            for (i, &(a, b)) in slices.iter().enumerate() {
                let k = share + (i < extra) as u64;
                for _ in 0..k {
                    out.push(rng.random_range(a..=b));
                }
            }
            Ok(out)
        }
    }
}

/// Circular mean of the per-step phase advances of `fam` over `sample`:
/// the angle of the averaged unit vectors at T(C(x)) - T(x).
pub fn estimate_alpha_hat(fam: &MapFamily, sample: &[OrbitValue]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let tr = fam.transform();
    let mut cos_sum = KahanSum::new();
    let mut sin_sum = KahanSum::new();
    for &x in sample {
        let next = collatz::gen_step(fam, x)?;
        let d = tr.phase(next).value() - tr.phase(x).value();
        let angle = std::f64::consts::TAU * d;
        cos_sum.add(angle.cos());
        sin_sum.add(angle.sin());
    }
    circular_mean(cos_sum.value(), sin_sum.value(), sample.len() as f64)
}

fn circular_mean(cos_sum: f64, sin_sum: f64, n: f64) -> Result<f64> {
    let (c, s) = (cos_sum / n, sin_sum / n);
    if (c * c + s * s).sqrt() < 1e-9 {
        return Err(Error::DegenerateMean);
    }
    Ok(PhaseAngle::new(s.atan2(c) / std::f64::consts::TAU).value())
}

/// One grid cell of the transform-parameter scan T_{a,b}(x) = frac(log_a(x+b))
/// applied to the classic map. `alpha_hat` is estimated per cell; deviations
/// are measured around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCell {
    pub a: f64,
    pub b: f64,
    pub alpha_hat: f64,
    pub sup_dev: f64,
    pub mean_dev: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanObjective {
    Sup,
    Mean,
}

impl ScanObjective {
    fn of(self, cell: &ScanCell) -> f64 {
        match self {
            ScanObjective::Sup => cell.sup_dev,
            ScanObjective::Mean => cell.mean_dev,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridScan {
    pub a_step: f64,
    pub b_step: f64,
    pub objective: ScanObjective,
    pub cells: Vec<ScanCell>,
    pub argmin: Option<usize>,
}

impl GridScan {
    pub fn argmin_cell(&self) -> Option<&ScanCell> {
        self.argmin.map(|i| &self.cells[i])
    }
}

/// Evaluates one transform cell against precomputed (x, C(x)) pairs.
fn eval_cell(a: Rat, b: Rat, pairs: &[(OrbitValue, OrbitValue)]) -> ScanCell {
    let tr = match PhaseTransform::new(a, b) {
        Ok(t) => t,
        Err(_) => {
            return ScanCell {
                a: rat_f64(a),
                b: rat_f64(b),
                alpha_hat: f64::NAN,
                sup_dev: f64::NAN,
                mean_dev: f64::NAN,
                degenerate: true,
            }
        }
    };
    let mut deltas = Vec::with_capacity(pairs.len());
    let mut cos_sum = KahanSum::new();
    let mut sin_sum = KahanSum::new();
    for &(x, cx) in pairs {
        let d = tr.phase(cx).value() - tr.phase(x).value();
        let angle = std::f64::consts::TAU * d;
        cos_sum.add(angle.cos());
        sin_sum.add(angle.sin());
        deltas.push(d);
    }
    match circular_mean(cos_sum.value(), sin_sum.value(), pairs.len() as f64) {
        Ok(ah) => {
            let mut sup = 0.0_f64;
            let mut mean = KahanSum::new();
            for &d in &deltas {
                let dev = wrap_signed(d - ah).value().abs();
                sup = sup.max(dev);
                mean.add(dev);
            }
            ScanCell {
                a: rat_f64(a),
                b: rat_f64(b),
                alpha_hat: ah,
                sup_dev: sup,
                mean_dev: mean.value() / pairs.len() as f64,
                degenerate: false,
            }
        }
        Err(_) => ScanCell {
            a: rat_f64(a),
            b: rat_f64(b),
            alpha_hat: f64::NAN,
            sup_dev: f64::NAN,
            mean_dev: f64::NAN,
            degenerate: true,
        },
    }
}

fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn rat_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<Rat>> {
    let lo = snap_rat(lo)?;
    let hi = snap_rat(hi)?;
    let step = snap_rat(step)?;
    if step <= Rat::from_integer(0) {
        return Err(Error::BadInput("grid step must be positive".into()));
    }
    let mut out = Vec::new();
    let mut v = lo;
    while v <= hi {
        out.push(v);
        v += step;
    }
    if out.is_empty() {
        return Err(Error::EmptyRange);
    }
    Ok(out)
}

fn snap_rat(v: f64) -> Result<Rat> {
    if !v.is_finite() || v.abs() > 1e9 {
        return Err(Error::BadInput(format!("value out of range: {v}")));
    }
    Ok(Rat::new((v * 1e9).round() as i128, 1_000_000_000))
}

fn sample_pairs(sample: &SampleSpec) -> Result<Vec<(OrbitValue, OrbitValue)>> {
    stratified_sample(sample)?
        .into_iter()
        .map(|x| collatz::step(x).map(|cx| (x, cx)))
        .collect()
}

/// Evaluates a single exact-rational (a, b) transform cell on the sample.
pub fn scan_cell(a: Rat, b: Rat, sample: &SampleSpec) -> Result<ScanCell> {
    Ok(eval_cell(a, b, &sample_pairs(sample)?))
}

/// Scans the (a, b) transform rectangle at the given steps. Grid coordinates
/// are exact rationals, so a cell like (6.00, 0.20) evaluates the transform
/// with shift exactly 1/5. The argmin ignores degenerate cells; ties go to
/// the smaller a, then the smaller b.
pub fn grid_scan(
    a_range: (f64, f64),
    b_range: (f64, f64),
    a_step: f64,
    b_step: f64,
    sample: &SampleSpec,
    objective: ScanObjective,
) -> Result<GridScan> {
    let a_vals = rat_grid(a_range.0, a_range.1, a_step)?;
    let b_vals = rat_grid(b_range.0, b_range.1, b_step)?;
    let pairs = sample_pairs(sample)?;
    let coords: Vec<(Rat, Rat)> = a_vals
        .iter()
        .flat_map(|&a| b_vals.iter().map(move |&b| (a, b)))
        .collect();
    let cells: Vec<ScanCell> = coords
        .par_iter()
        .map(|&(a, b)| eval_cell(a, b, &pairs))
        .collect();
    let argmin = pick_argmin(&cells, objective);
    Ok(GridScan {
        a_step,
        b_step,
        objective,
        cells,
        argmin,
    })
}

fn pick_argmin(cells: &[ScanCell], objective: ScanObjective) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in cells.iter().enumerate() {
        if c.degenerate {
            continue;
        }
        let v = objective.of(c);
        // cells are laid out in lexicographic (a, b) order, so strict
        // comparison breaks ties toward smaller a, then smaller b
        if best.is_none() || v < objective.of(&cells[best.unwrap()]) {
            best = Some(i);
        }
    }
    best
}

/// Coarse-to-fine scan driver.
///
/// Stage k+1 searches the incumbent cell plus-minus one stage-k step (the
/// bracket that contains the continuous minimizer of a unimodal landscape),
/// clamped to the domain. Defaults: domain [2,10] x [0,1], steps 0.5, 0.1,
/// 0.01.
#[derive(Debug, Clone, Serialize)]
pub struct RefineSpec {
    pub a_domain: (f64, f64),
    pub b_domain: (f64, f64),
    pub steps: Vec<f64>,
}

impl Default for RefineSpec {
    fn default() -> Self {
        RefineSpec {
            a_domain: (2.0, 10.0),
            b_domain: (0.0, 1.0),
            steps: vec![0.5, 0.1, 0.01],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefineScan {
    pub stages: Vec<GridScan>,
    pub argmin: Option<ScanCell>,
}

pub fn refine_scan(
    spec: &RefineSpec,
    sample: &SampleSpec,
    objective: ScanObjective,
) -> Result<RefineScan> {
    if spec.steps.is_empty() {
        return Err(Error::BadInput("refine needs at least one stage".into()));
    }
    let mut stages = Vec::with_capacity(spec.steps.len());
    let mut a_box = spec.a_domain;
    let mut b_box = spec.b_domain;
    let mut prev_step: Option<f64> = None;
    for &step in &spec.steps {
        if let Some(p) = prev_step {
            let inc = stages
                .last()
                .and_then(|s: &GridScan| s.argmin_cell())
                .ok_or(Error::DegenerateMean)?;
            a_box = (
                (inc.a - p).max(spec.a_domain.0),
                (inc.a + p).min(spec.a_domain.1),
            );
            b_box = (
                (inc.b - p).max(spec.b_domain.0),
                (inc.b + p).min(spec.b_domain.1),
            );
        }
        stages.push(grid_scan(a_box, b_box, step, step, sample, objective)?);
        prev_step = Some(step);
    }
    let argmin = stages.last().and_then(|s| s.argmin_cell()).copied();
    Ok(RefineScan { stages, argmin })
}

/// Sup of max_{n <= depth} |E_n(x)| over the sweep range, with its attaining
/// start. Published cumulative-error tables are organised by these depths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSup {
    pub depth: u64,
    pub sup_abs_cum: f64,
    pub argmax_start: OrbitValue,
}

/// Streaming per-trajectory aggregates over a start-value range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeSweepReport {
    pub range: (OrbitValue, OrbitValue),
    pub count: u64,
    pub sup_abs_cum: f64,
    pub sup_argmax_start: OrbitValue,
    pub sup_argmax_n: u64,
    pub max_residual: f64,
    pub resolved: u64,
    pub unresolved: u64,
    pub overflowed: u64,
    /// total stopping time -> how many starts in range attain it
    pub stopping_counts: BTreeMap<u64, u64>,
    /// per-depth sups, in the order requested by `SweepOptions::cutoffs`
    pub cutoff_sups: Vec<CutoffSup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub cap: u64,
    /// When set, a start at 1 walks the trivial cycle once (contributing the
    /// cycle sum 0.160558... to the sup); otherwise it stops immediately.
    pub follow_trivial_cycle: bool,
    /// Iteration depths at which to report intermediate sups alongside the
    /// unbounded one. Duplicates are ignored; order does not matter.
    pub cutoffs: Vec<u64>,
}

/// The depth set used by the published cumulative-error tables.
pub const REPORT_CUTOFFS: [u64; 6] = [10, 50, 100, 500, 1000, 5000];

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            cap: collatz::SWEEP_CAP,
            follow_trivial_cycle: false,
            cutoffs: Vec::new(),
        }
    }
}

struct SweepAgg {
    count: u64,
    sup: f64,
    sup_start: OrbitValue,
    sup_n: u64,
    max_residual: f64,
    resolved: u64,
    unresolved: u64,
    overflowed: u64,
    hist: BTreeMap<u64, u64>,
    /// (sup, argmax start) per cutoff depth
    cut: Vec<(f64, OrbitValue)>,
}

impl SweepAgg {
    fn new(n_cutoffs: usize) -> Self {
        SweepAgg {
            count: 0,
            sup: f64::NEG_INFINITY,
            sup_start: 0,
            sup_n: 0,
            max_residual: 0.0,
            resolved: 0,
            unresolved: 0,
            overflowed: 0,
            hist: BTreeMap::new(),
            cut: vec![(f64::NEG_INFINITY, 0); n_cutoffs],
        }
    }

    fn absorb(&mut self, other: SweepAgg) {
        self.count += other.count;
        if other.sup > self.sup {
            self.sup = other.sup;
            self.sup_start = other.sup_start;
            self.sup_n = other.sup_n;
        }
        self.max_residual = self.max_residual.max(other.max_residual);
        self.resolved += other.resolved;
        self.unresolved += other.unresolved;
        self.overflowed += other.overflowed;
        for (k, v) in other.hist {
            *self.hist.entry(k).or_insert(0) += v;
        }
        for (mine, theirs) in self.cut.iter_mut().zip(other.cut) {
            // strict: the earlier start (absorbed in partition order) wins ties
            if theirs.0 > mine.0 {
                *mine = theirs;
            }
        }
    }

    fn record_cutoffs_from(&mut self, idx: usize, best: f64, x: OrbitValue) {
        for slot in &mut self.cut[idx..] {
            if best > slot.0 {
                *slot = (best, x);
            }
        }
    }
}

/// `cutoffs` must be sorted and deduplicated.
fn sweep_one(x: OrbitValue, opts: &SweepOptions, cutoffs: &[u64], agg: &mut SweepAgg) {
    agg.count += 1;
    if x == 1 && !opts.follow_trivial_cycle {
        agg.resolved += 1;
        *agg.hist.entry(0).or_insert(0) += 1;
        if agg.sup < 0.0 {
            agg.sup = 0.0;
            agg.sup_start = x;
            agg.sup_n = 0;
        }
        for slot in &mut agg.cut {
            if slot.0 < 0.0 {
                *slot = (0.0, x);
            }
        }
        return;
    }
    let a = alpha();
    let t0 = classic_phase(x).value();
    let mut cur = x;
    let mut prev_phase = t0;
    let mut acc = KahanSum::new();
    let mut best = 0.0_f64;
    let mut best_n = 0u64;
    let mut n = 0u64;
    let mut cut_idx = 0usize;
    let outcome = loop {
        if n == opts.cap {
            break 1; // unresolved
        }
        let next = match collatz::step(cur) {
            Ok(v) => v,
            Err(_) => break 2, // overflow
        };
        let ph = classic_phase(next).value();
        acc.add(wrap_signed(ph - prev_phase - a).value());
        n += 1;
        let e = acc.value();
        if e.abs() > best {
            best = e.abs();
            best_n = n;
        }
        while cut_idx < cutoffs.len() && n == cutoffs[cut_idx] {
            if best > agg.cut[cut_idx].0 {
                agg.cut[cut_idx] = (best, x);
            }
            cut_idx += 1;
        }
        let pred = PhaseAngle::new(t0 + n as f64 * a + e);
        let resid = circle_dist(PhaseAngle::new(ph), pred);
        agg.max_residual = agg.max_residual.max(resid);
        cur = next;
        prev_phase = ph;
        if cur == 1 {
            break 0;
        }
    };
    match outcome {
        0 => {
            agg.resolved += 1;
            *agg.hist.entry(n).or_insert(0) += 1;
        }
        1 => agg.unresolved += 1,
        _ => agg.overflowed += 1,
    }
    // orbit ended before the remaining depths; its running max stands for them
    agg.record_cutoffs_from(cut_idx, best, x);
    if best > agg.sup {
        agg.sup = best;
        agg.sup_start = x;
        agg.sup_n = best_n;
    }
}

/// Sweeps [lo, hi], aggregating per-start cumulative-error extremes, the
/// worst telescoping residual, and the stopping-time histogram.
pub fn trajectory_sweep(
    lo: OrbitValue,
    hi: OrbitValue,
    opts: &SweepOptions,
) -> Result<CumulativeSweepReport> {
    if lo < 1 || lo > hi {
        return Err(Error::EmptyRange);
    }
    let mut cutoffs = opts.cutoffs.clone();
    cutoffs.sort_unstable();
    cutoffs.dedup();
    let parts: Vec<SweepAgg> = blocks(lo, hi)
        .par_iter()
        .map(|&(a, b)| {
            let mut agg = SweepAgg::new(cutoffs.len());
            let mut x = a;
            loop {
                sweep_one(x, opts, &cutoffs, &mut agg);
                if x == b {
                    break;
                }
                x += 1;
            }
            agg
        })
        .collect();
    let mut total = SweepAgg::new(cutoffs.len());
    for p in parts {
        total.absorb(p);
    }
    let cutoff_sups = cutoffs
        .iter()
        .zip(&total.cut)
        .map(|(&depth, &(sup, start))| CutoffSup {
            depth,
            sup_abs_cum: if sup.is_finite() { sup } else { 0.0 },
            argmax_start: start,
        })
        .collect();
    Ok(CumulativeSweepReport {
        range: (lo, hi),
        count: total.count,
        sup_abs_cum: if total.sup.is_finite() { total.sup } else { 0.0 },
        sup_argmax_start: total.sup_start,
        sup_argmax_n: total.sup_n,
        max_residual: total.max_residual,
        resolved: total.resolved,
        unresolved: total.unresolved,
        overflowed: total.overflowed,
        stopping_counts: total.hist,
        cutoff_sups,
    })
}

/// Parses "lo,hi,n,seed,scheme" or the short forms used by the CLI.
pub fn parse_sample_spec(s: &str) -> Result<SampleSpec> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = |m: &str| Error::BadInput(format!("sample spec {s:?}: {m}"));
    if parts.len() < 2 {
        return Err(bad("need at least lo,hi"));
    }
    let lo: u128 = parts[0].parse().map_err(|_| bad("bad lo"))?;
    let hi: u128 = parts[1].parse().map_err(|_| bad("bad hi"))?;
    let mut spec = SampleSpec::exhaustive(lo, hi);
    if parts.len() > 2 {
        spec.n = parts[2].parse().map_err(|_| bad("bad n"))?;
        spec.scheme = SampleScheme::Uniform;
    }
    if parts.len() > 3 {
        spec.seed = parts[3].parse().map_err(|_| bad("bad seed"))?;
    }
    if parts.len() > 4 {
        spec.scheme = match parts[4] {
            "exhaustive" => SampleScheme::Exhaustive,
            "uniform" => SampleScheme::Uniform,
            "per-decade-stratified" | "stratified" => SampleScheme::PerDecadeStratified,
            other => return Err(bad(&format!("unknown scheme {other:?}"))),
        };
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_partition_covers_range() {
        let bs = blocks(1, 200_000);
        assert_eq!(bs[0], (1, 65_536));
        assert_eq!(bs.last().unwrap().1, 200_000);
        let total: u128 = bs.iter().map(|(a, b)| b - a + 1).sum();
        assert_eq!(total, 200_000);
    }

    #[test]
    fn sketch_quantiles_nearest_rank() {
        let mut s = QuantileSketch::new();
        for v in [0.1004, 0.2004, 0.3004, 0.4004] {
            s.record(v);
        }
        assert_eq!(s.quantile(0.5).unwrap(), 0.2005); // bin center of 0.2004's bin
        assert_eq!(s.quantile(0.0).unwrap(), 0.1004); // exact min
        assert_eq!(s.quantile(1.0).unwrap(), 0.4004); // exact max
        let mut t = QuantileSketch::new();
        t.record(0.05);
        s.merge(&t);
        assert_eq!(s.count(), 5);
    }

    #[test]
    fn exhaustive_report_small_ranges() {
        let classic = MapFamily::classic();
        let r = exhaustive_verify(100, 10_000, &classic).unwrap();
        assert_eq!(r.count, 9_901);
        assert!((r.max_abs_eps - 0.0011128829740319338).abs() < 1e-12);
        assert_eq!(r.argmax_x, 100);
        let single = exhaustive_verify(1_000_000, 1_000_000, &classic).unwrap();
        assert_eq!(single.count, 1);
        assert!((single.max_abs_eps - 1.1162209182362227e-07).abs() < 1e-15);
    }

    #[test]
    fn exhaustive_merge_consistency() {
        // max over [lo,hi] equals max over the two halves
        let classic = MapFamily::classic();
        let whole = exhaustive_verify(1, 30_000, &classic).unwrap();
        let left = exhaustive_verify(1, 14_999, &classic).unwrap();
        let right = exhaustive_verify(15_000, 30_000, &classic).unwrap();
        assert_eq!(whole.max_abs_eps, left.max_abs_eps.max(right.max_abs_eps));
        assert_eq!(whole.count, left.count + right.count);
    }

    #[test]
    fn exhaustive_deterministic_across_pools() {
        let classic = MapFamily::classic();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| exhaustive_verify(1, 150_000, &classic).unwrap())
        };
        let a = serde_json::to_string(&run(1)).unwrap();
        let b = serde_json::to_string(&run(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = SampleSpec {
            lo: 1_000,
            hi: 999_999,
            n: 3_000,
            seed: 42,
            scheme: SampleScheme::PerDecadeStratified,
        };
        let s1 = stratified_sample(&spec).unwrap();
        let s2 = stratified_sample(&spec).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.len(), 3_000);
        // equal share per decade
        assert_eq!(s1.iter().filter(|&&x| x < 10_000).count(), 1_000);
        assert_eq!(
            s1.iter().filter(|&&x| (10_000..100_000).contains(&x)).count(),
            1_000
        );
    }

    #[test]
    fn degenerate_uniform_sample() {
        let spec = SampleSpec {
            lo: 5,
            hi: 5,
            n: 3,
            seed: 7,
            scheme: SampleScheme::Uniform,
        };
        assert_eq!(stratified_sample(&spec).unwrap(), vec![5, 5, 5]);
    }

    #[test]
    fn alpha_hat_values() {
        let classic = MapFamily::classic();
        let single = estimate_alpha_hat(&classic, &[1]).unwrap();
        assert!((single - 0.69918032526715024).abs() < 1e-12);
        let sample: Vec<u128> = (100..=10_000).collect();
        let ah = estimate_alpha_hat(&classic, &sample).unwrap();
        assert!((ah - alpha()).abs() < 1e-3);
        // even-only dynamics: deltas cluster at 0
        let f11 = MapFamily::from_integers(1, 1).unwrap();
        let ah11 = estimate_alpha_hat(&f11, &(2..200).collect::<Vec<_>>()).unwrap();
        assert!(ah11 < 0.05 || ah11 > 0.95, "alpha_hat = {ah11}");
    }

    #[test]
    fn grid_single_cell_matches_range_report() {
        let spec = SampleSpec::exhaustive(100, 10_000);
        let scan = grid_scan((6.0, 6.0), (0.2, 0.2), 0.01, 0.01, &spec, ScanObjective::Sup).unwrap();
        assert_eq!(scan.cells.len(), 1);
        let cell = scan.argmin_cell().unwrap();
        // free alpha_hat absorbs the mean deviation, so the sup sits slightly
        // below max|eps| = 0.00111288 over this sample
        assert!((cell.sup_dev - 0.0010609417073217386).abs() < 1e-9);
        assert!(cell.alpha_hat > alpha());
    }

    #[test]
    fn coarse_scan_finds_base_six() {
        let spec = SampleSpec::exhaustive(100, 10_000);
        let scan = grid_scan((2.0, 10.0), (0.0, 1.0), 0.5, 0.5, &spec, ScanObjective::Sup).unwrap();
        let best = scan.argmin_cell().unwrap();
        assert_eq!((best.a, best.b), (6.0, 0.0));
    }

    #[test]
    fn grid_exactness_at_fifth() {
        // (6.00, 0.20) must evaluate with shift exactly 1/5
        let g = rat_grid(0.0, 0.4, 0.05).unwrap();
        assert!(g.contains(&Rat::new(1, 5)));
        assert_eq!(g.len(), 9);
    }

    #[test]
    fn sweep_examples() {
        let opts = SweepOptions::default();
        let r27 = trajectory_sweep(27, 27, &opts).unwrap();
        assert_eq!(r27.stopping_counts.get(&111), Some(&1));
        assert!((r27.sup_abs_cum - 0.198857).abs() < 1e-6);
        assert!(r27.max_residual < 1e-9);

        let r1 = trajectory_sweep(1, 1, &opts).unwrap();
        assert_eq!(r1.sup_abs_cum, 0.0);
        let r1c = trajectory_sweep(
            1,
            1,
            &SweepOptions {
                follow_trivial_cycle: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r1c.sup_abs_cum - 0.16055842170362475).abs() < 1e-12);

        let r1000 = trajectory_sweep(1, 1_000, &opts).unwrap();
        assert!((r1000.sup_abs_cum - 0.227583).abs() < 1e-6);
        assert_eq!(r1000.sup_argmax_start, 993);
        assert!(r1000.max_residual < 1e-9);
        assert_eq!(r1000.resolved, 1_000);
    }

    #[test]
    fn cutoff_sups_match_per_trajectory_records() {
        let opts = SweepOptions {
            cutoffs: vec![1_000_000, 10, 50, 10], // unsorted with a duplicate
            ..Default::default()
        };
        let r = trajectory_sweep(1, 300, &opts).unwrap();
        let depths: Vec<u64> = r.cutoff_sups.iter().map(|c| c.depth).collect();
        assert_eq!(depths, vec![10, 50, 1_000_000]);

        // brute force from full trajectory records
        let mut want = vec![(0.0_f64, 0u128); 3];
        for x in 1..=300u128 {
            if x == 1 {
                continue; // sweep convention: x = 1 contributes 0
            }
            let rec = crate::cumulative::track(x, 100_000);
            for (slot, depth) in want.iter_mut().zip([10usize, 50, usize::MAX]) {
                let upto = depth.min(rec.cum_errors.len() - 1);
                let m = rec.cum_errors[..=upto]
                    .iter()
                    .fold(0.0_f64, |acc, e| acc.max(e.abs()));
                if m > slot.0 {
                    *slot = (m, x);
                }
            }
        }
        for (got, want) in r.cutoff_sups.iter().zip(want) {
            assert_eq!(got.sup_abs_cum, want.0, "depth {}", got.depth);
            assert_eq!(got.argmax_start, want.1, "depth {}", got.depth);
        }
        // the deepest cutoff exceeds every stopping time in range, so it
        // coincides with the unbounded sup
        assert_eq!(r.cutoff_sups[2].sup_abs_cum, r.sup_abs_cum);
        assert!(r.cutoff_sups[0].sup_abs_cum <= r.cutoff_sups[1].sup_abs_cum);
    }

    #[test]
    fn sample_spec_parsing() {
        let s = parse_sample_spec("100,10000").unwrap();
        assert_eq!(s.scheme, SampleScheme::Exhaustive);
        assert_eq!((s.lo, s.hi, s.n), (100, 10_000, 9_901));
        let s2 = parse_sample_spec("1000,999999,3000,9,stratified").unwrap();
        assert_eq!(s2.scheme, SampleScheme::PerDecadeStratified);
        assert!(parse_sample_spec("xyz").is_err());
    }
}
