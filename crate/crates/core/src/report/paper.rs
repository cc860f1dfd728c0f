//! Recomputes every printed table from definitions and reports agreement.
//!
//! The printed values live in `data/paper_values.tsv`, one cell per line with
//! its table id, row, column, and source citation; nothing in the comparators
//! hardcodes a printed number. Each comparator classifies every cell of its
//! table as match, mismatch, or skipped (skips cover labels and coordinates
//! that are not recomputable claims). Tolerance per cell is one unit in the
//! last printed decimal place: some published entries are truncated rather
//! than rounded, so a half unit would flag correctly reproduced cells, while
//! a full unit still leaves genuinely different values flagged.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::analytics::{
    cycle_feasibility, default_walsh_sets, quantiles_sorted, termination_zone_report,
    walsh_coefficients, zone_log_fraction, WalshReport, ZoneReport,
};
use crate::collatz::{self, OrbitValue, ORBIT_CAP};
use crate::cumulative::{track, KahanSum};
use crate::error::{Error, Result};
use crate::flow::{flow_vs_map, FlowVariant};
use crate::phase::{
    alpha, classic_eps, classic_eps_real, eps_real, eps_series_coefficients, parse_decimal,
    rat_to_f64, MapFamily, Parity, PhaseAngle,
};
use crate::report::table::format_sig;
use crate::survey::{
    refine_scan, scan_cell, trajectory_sweep, CumulativeSweepReport, RefineSpec, SampleSpec,
    ScanCell, ScanObjective, SweepOptions, REPORT_CUTOFFS,
};

/// Scan comparisons sample the transform pairs exhaustively over this range.
pub const SCAN_RANGE: (OrbitValue, OrbitValue) = (100, 10_000);

/// Per-family deviation suprema are taken over [1, this].
pub const FAMILY_SUP_HI: OrbitValue = 10_000;

/// Union of the zone radii appearing in the membership and basin tables.
pub const ZONE_DELTAS: [f64; 12] = [
    0.002, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10,
];

/// Range endpoints of the cumulative-error sweeps the tables read.
pub const SWEEP_RANGES: [OrbitValue; 4] = [1_000, 10_000, 100_000, 1_000_000];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperValue {
    pub table: &'static str,
    pub row: &'static str,
    pub col: &'static str,
    pub value: &'static str,
    pub citation: &'static str,
}

static DATASET: LazyLock<Vec<PaperValue>> = LazyLock::new(|| {
    include_str!("../../data/paper_values.tsv")
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut f = l.split('\t');
            let mut next = || f.next().expect("paper_values.tsv has five fields per line");
            PaperValue {
                table: next(),
                row: next(),
                col: next(),
                value: next(),
                citation: next(),
            }
        })
        .collect()
});

pub fn dataset() -> &'static [PaperValue] {
    &DATASET
}

/// All cells of one table, in transcription (row-major) order.
pub fn table_values(table: &str) -> Vec<&'static PaperValue> {
    DATASET.iter().filter(|v| v.table == table).collect()
}

pub fn lookup(table: &str, row: &str, col: &str) -> Option<&'static PaperValue> {
    DATASET
        .iter()
        .find(|v| v.table == table && v.row == row && v.col == col)
}

/// Numeric reading of a printed cell: plain decimals, scientific notation,
/// and integer fractions like 1/5. Text cells (parities, labels) are None.
pub fn printed_number(s: &str) -> Option<f64> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: f64 = n.trim().parse().ok()?;
        let d: f64 = d.trim().parse().ok()?;
        return (d != 0.0).then(|| n / d);
    }
    t.parse().ok()
}

/// One unit in the last printed place; 0.5 for bare integers (an integer
/// claim is exact), 1e-9 for fractions (likewise exact).
pub fn printed_tolerance(s: &str) -> f64 {
    let t = s.trim();
    if t.contains('/') {
        return 1e-9;
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (t, 0),
    };
    match mantissa.split_once('.') {
        Some((_, frac)) => 10f64.powi(exp - frac.len() as i32),
        None if exp == 0 => 0.5,
        None => 10f64.powi(exp),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellOutcome {
    Match,
    Mismatch,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub row: String,
    pub col: String,
    pub printed: String,
    pub computed: String,
    pub abs_diff: Option<f64>,
    pub tolerance: Option<f64>,
    pub outcome: CellOutcome,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableComparison {
    pub table: String,
    /// Source label, from the citation of the table's first cell.
    pub label: String,
    pub notes: Vec<String>,
    pub cells: Vec<CellComparison>,
}

impl TableComparison {
    fn new(table: &str) -> TableComparison {
        let label = table_values(table)
            .first()
            .and_then(|v| v.citation.split_whitespace().next())
            .unwrap_or("")
            .to_string();
        TableComparison {
            table: table.to_string(),
            label,
            notes: Vec::new(),
            cells: Vec::new(),
        }
    }

    pub fn matched(&self) -> usize {
        self.count(CellOutcome::Match)
    }

    pub fn mismatched(&self) -> usize {
        self.count(CellOutcome::Mismatch)
    }

    pub fn skipped(&self) -> usize {
        self.count(CellOutcome::Skipped)
    }

    fn count(&self, o: CellOutcome) -> usize {
        self.cells.iter().filter(|c| c.outcome == o).count()
    }

    pub fn cell(&self, row: &str, col: &str) -> Option<&CellComparison> {
        self.cells.iter().find(|c| c.row == row && c.col == col)
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn push_num(&mut self, pv: &PaperValue, computed: f64) {
        let Some(printed) = printed_number(pv.value) else {
            self.push_skip(pv, "printed cell is not numeric");
            return;
        };
        let tolerance = printed_tolerance(pv.value);
        let abs_diff = (computed - printed).abs();
        let outcome = if abs_diff <= tolerance {
            CellOutcome::Match
        } else {
            CellOutcome::Mismatch
        };
        self.cells.push(CellComparison {
            row: pv.row.to_string(),
            col: pv.col.to_string(),
            printed: pv.value.to_string(),
            computed: format_sig(computed, 9),
            abs_diff: Some(abs_diff),
            tolerance: Some(tolerance),
            outcome,
            citation: pv.citation.to_string(),
        });
    }

    fn push_text(&mut self, pv: &PaperValue, computed: &str) {
        let outcome = if pv.value.trim() == computed {
            CellOutcome::Match
        } else {
            CellOutcome::Mismatch
        };
        self.cells.push(CellComparison {
            row: pv.row.to_string(),
            col: pv.col.to_string(),
            printed: pv.value.to_string(),
            computed: computed.to_string(),
            abs_diff: None,
            tolerance: None,
            outcome,
            citation: pv.citation.to_string(),
        });
    }

    fn push_skip(&mut self, pv: &PaperValue, why: &str) {
        self.cells.push(CellComparison {
            row: pv.row.to_string(),
            col: pv.col.to_string(),
            printed: pv.value.to_string(),
            computed: format!("skipped: {why}"),
            abs_diff: None,
            tolerance: None,
            outcome: CellOutcome::Skipped,
            citation: pv.citation.to_string(),
        });
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub tables: Vec<TableComparison>,
}

impl DiscrepancyReport {
    /// (matched, mismatched, skipped) over all tables.
    pub fn totals(&self) -> (usize, usize, usize) {
        self.tables.iter().fold((0, 0, 0), |(m, d, s), t| {
            (m + t.matched(), d + t.mismatched(), s + t.skipped())
        })
    }

    pub fn find(&self, table: &str) -> Option<&TableComparison> {
        self.tables.iter().find(|t| t.table == table)
    }

    /// One line per table plus a grand total, ready to print.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .tables
            .iter()
            .map(|t| {
                format!(
                    "table {} ({}): {} match, {} differ, {} skipped",
                    t.table,
                    t.label,
                    t.matched(),
                    t.mismatched(),
                    t.skipped()
                )
            })
            .collect();
        let (m, d, s) = self.totals();
        out.push(format!(
            "total across {} tables: {} cells match, {} differ, {} skipped",
            self.tables.len(),
            m,
            d,
            s
        ));
        out
    }
}

/// Table 3.1, the parameter-scan ranking. Max and mean deviation recompute
/// per printed (a, b) cell; the rank-1 coordinates check against a refined
/// scan's argmin when one is supplied, and lower-rank coordinates are
/// ranking choices rather than recomputable claims.
pub fn compare_scan(refined: Option<&ScanCell>) -> Result<TableComparison> {
    let mut cmp = TableComparison::new("3.1");
    let sample = SampleSpec::exhaustive(SCAN_RANGE.0, SCAN_RANGE.1);
    let mut cells: BTreeMap<&str, _> = BTreeMap::new();
    for pv in table_values("3.1") {
        match pv.col {
            "a" | "b" => match (pv.row, refined) {
                ("1", Some(best)) => {
                    cmp.push_num(pv, if pv.col == "a" { best.a } else { best.b })
                }
                ("1", None) => cmp.push_skip(pv, "no refined scan supplied"),
                _ => cmp.push_skip(pv, "ranking coordinate, not a recomputed value"),
            },
            "max_error" | "mean_error" => {
                let (Some(a), Some(b)) =
                    (lookup("3.1", pv.row, "a"), lookup("3.1", pv.row, "b"))
                else {
                    cmp.push_skip(pv, "row has no printed coordinates");
                    continue;
                };
                if !cells.contains_key(pv.row) {
                    let cell = scan_cell(parse_decimal(a.value)?, parse_decimal(b.value)?, &sample)?;
                    cells.insert(pv.row, cell);
                }
                let cell = &cells[pv.row];
                let got = if pv.col == "max_error" {
                    cell.sup_dev
                } else {
                    cell.mean_dev
                };
                cmp.push_num(pv, got);
            }
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp.note(format!(
        "deviations recomputed over trajectory pairs from x in [{}, {}], exact rational grid coordinates",
        SCAN_RANGE.0, SCAN_RANGE.1
    ));
    if let Some(best) = refined {
        cmp.note(format!(
            "refined argmin: (a, b) = ({:.2}, {:.2}) with sup {} and mean {}",
            best.a,
            best.b,
            format_sig(best.sup_dev, 6),
            format_sig(best.mean_dev, 6)
        ));
    }
    Ok(cmp)
}

fn sweep_for(sweeps: &[CumulativeSweepReport], hi: OrbitValue) -> Option<&CumulativeSweepReport> {
    sweeps.iter().find(|s| s.range == (1, hi))
}

fn depth_sup(s: &CumulativeSweepReport, row: &str) -> Option<(f64, OrbitValue)> {
    if row == "all" {
        return Some((s.sup_abs_cum, s.sup_argmax_start));
    }
    let depth: u64 = row.parse().ok()?;
    s.cutoff_sups
        .iter()
        .find(|c| c.depth == depth)
        .map(|c| (c.sup_abs_cum, c.argmax_start))
}

/// Tables 4.2 and 6.3, sups of the cumulative error |E_n| by depth cutoff.
/// 4.2 reads the [1, 1e6] sweep; 6.3 reads one sweep per range column.
pub fn compare_cumulative(
    sweeps: &[CumulativeSweepReport],
) -> (TableComparison, TableComparison) {
    let mut t42 = TableComparison::new("4.2");
    for pv in table_values("4.2") {
        let Some(s) = sweep_for(sweeps, 1_000_000) else {
            t42.push_skip(pv, "no sweep over [1, 1000000] supplied");
            continue;
        };
        let Some((sup, at)) = depth_sup(s, pv.row) else {
            t42.push_skip(pv, "depth cutoff not tracked by the sweep");
            continue;
        };
        match pv.col {
            "max_cum" => t42.push_num(pv, sup),
            "attained_at" => t42.push_num(pv, at as f64),
            _ => t42.push_skip(pv, "unrecognized column"),
        }
    }
    t42.note("attained_at is the earliest start realizing the sup, ties broken upward");

    let mut t63 = TableComparison::new("6.3");
    for pv in table_values("6.3") {
        let Some(hi) = pv.col.parse::<f64>().ok().map(|h| h as OrbitValue) else {
            t63.push_skip(pv, "unrecognized column");
            continue;
        };
        let Some(s) = sweep_for(sweeps, hi) else {
            t63.push_skip(pv, "no sweep over this range supplied");
            continue;
        };
        match depth_sup(s, pv.row) {
            Some((sup, _)) => t63.push_num(pv, sup),
            None => t63.push_skip(pv, "depth cutoff not tracked by the sweep"),
        }
    }
    (t42, t63)
}

/// Table 5.1, the deviation series coefficients in the half index y with
/// x = 2y or 2y + 1. The printed per-x leading constant is half the exact
/// 0.2/ln 6, and the printed odd quadratic and cubic entries are half of
/// the exact expansion values.
pub fn compare_taylor() -> TableComparison {
    let mut cmp = TableComparison::new("5.1");
    for pv in table_values("5.1") {
        let parity = match pv.row {
            "even" => Parity::Even,
            "odd" => Parity::Odd,
            _ => {
                cmp.push_skip(pv, "unrecognized parity row");
                continue;
            }
        };
        let [c1, c2, c3] = eps_series_coefficients(parity);
        match pv.col {
            "c1" => cmp.push_num(pv, c1),
            "c2" => cmp.push_num(pv, c2),
            "c3" => cmp.push_num(pv, c3),
            // eps ~ c1/y with y ~ x/2, so the per-x constant is 2*c1
            "leading_per_x" => cmp.push_num(pv, 2.0 * c1),
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp.note("coefficients are exact rationals over ln 6: even (1/10, -3/200, 7/3000), odd (1/10, -13/200, 127/3000)");
    cmp
}

fn stat_prob(row: &str) -> Option<f64> {
    Some(match row {
        "min" => 0.0,
        "p1" => 0.01,
        "p5" => 0.05,
        "p10" => 0.10,
        "q1" => 0.25,
        "median" | "p50" => 0.50,
        "q3" | "p75" => 0.75,
        "p90" => 0.90,
        "p95" => 0.95,
        "p99" => 0.99,
        "p999" => 0.999,
        _ => return None,
    })
}

/// Tables 5.3, 6.1, and A.2: distribution statistics of |eps| over an
/// integer range, recomputed exactly (full sort, nearest-rank quantiles).
pub fn compare_deviation_stats(
    lo: OrbitValue,
    hi: OrbitValue,
) -> Result<[TableComparison; 3]> {
    if lo < 1 || lo > hi {
        return Err(Error::EmptyRange);
    }
    let mut vals = Vec::with_capacity((hi - lo + 1) as usize);
    let mut mean = KahanSum::new();
    let mut max = f64::NEG_INFINITY;
    let mut argmax = lo;
    let mut x = lo;
    loop {
        let e = classic_eps(x).value().abs();
        vals.push(e);
        mean.add(e);
        if e > max {
            max = e;
            argmax = x;
        }
        if x == hi {
            break;
        }
        x += 1;
    }
    let mean = mean.value() / vals.len() as f64;
    vals.sort_unstable_by(f64::total_cmp);
    let q = |p: f64| quantiles_sorted(&vals, &[p]).expect("nonempty sample")[0];

    let range_note = format!("recomputed from |eps(x)| for every integer x in [{lo}, {hi}]");
    let decreasing_note = format!(
        "eps is strictly positive and strictly decreasing, so the max sits at x = {lo} and \
         the bulk of the distribution is within a few multiples of 1/{hi}"
    );

    let build = |table: &str| -> TableComparison {
        let mut cmp = TableComparison::new(table);
        for pv in table_values(table) {
            match (pv.row, pv.col) {
                ("max", "argmax_x") => cmp.push_num(pv, argmax as f64),
                ("max", _) => cmp.push_num(pv, max),
                ("mean", _) => cmp.push_num(pv, mean),
                (row, _) => match stat_prob(row) {
                    Some(p) => cmp.push_num(pv, q(p)),
                    None => cmp.push_skip(pv, "unrecognized statistic row"),
                },
            }
        }
        cmp.note(range_note.clone());
        cmp.note(decreasing_note.clone());
        cmp
    };

    Ok([build("5.3"), build("6.1"), build("A.2")])
}

/// Table 6.4, per-decade-band sup of |eps| and its ratio to the published
/// k/x prediction (k read from table 5.1). Monotonicity puts each sup at
/// the band's lower endpoint, evaluated in closed form: the defining phase
/// difference is pure cancellation noise past about 1e12.
pub fn compare_asymptotics() -> TableComparison {
    let mut cmp = TableComparison::new("6.4");
    let pred = lookup("5.1", "even", "leading_per_x")
        .and_then(|pv| printed_number(pv.value))
        .unwrap_or(0.0558);
    for pv in table_values("6.4") {
        let Some(lo) = pv
            .row
            .split('-')
            .next()
            .and_then(|s| s.parse::<f64>().ok())
        else {
            cmp.push_skip(pv, "unrecognized range row");
            continue;
        };
        let sup = classic_eps_real(lo);
        match pv.col {
            "max_eps" => cmp.push_num(pv, sup),
            "ratio" => cmp.push_num(pv, sup * lo / pred),
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp.note(format!(
        "ratio divides the sup by the published prediction {pred}/x at the attaining x; \
         the true per-x constant is 0.2/ln 6 = {}, twice {pred}, so recomputed ratios sit near 2",
        format_sig(0.2 / 6f64.ln(), 6)
    ));
    cmp
}

fn zone_for(zones: &[ZoneReport], delta: f64) -> Option<&ZoneReport> {
    zones.iter().find(|z| (z.delta - delta).abs() < 1e-9)
}

fn success_pct(z: &ZoneReport) -> Option<f64> {
    (z.members_tested > 0)
        .then(|| 100.0 * (z.members_tested - z.unresolved) as f64 / z.members_tested as f64)
}

/// Table 7.1, termination-zone membership and stopping statistics per radius.
pub fn compare_zones(zones: &[ZoneReport], log_fracs: &[(f64, f64)]) -> TableComparison {
    let mut cmp = TableComparison::new("7.1");
    for pv in table_values("7.1") {
        let Some(z) = printed_number(pv.row).and_then(|d| zone_for(zones, d)) else {
            cmp.push_skip(pv, "zone radius not computed");
            continue;
        };
        match pv.col {
            "pct_members" => cmp.push_num(pv, 100.0 * z.member_fraction),
            "max_steps" => cmp.push_num(pv, z.max_steps_to_1 as f64),
            "mean_steps" => cmp.push_num(pv, z.mean_steps_to_1),
            "success_pct" => match success_pct(z) {
                Some(p) => cmp.push_num(pv, p),
                None => cmp.push_skip(pv, "zone has no members in range"),
            },
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    if let Some(z) = zones.first() {
        cmp.note(format!(
            "membership tested for every integer in [{}, {}]",
            z.range.0, z.range.1
        ));
    }
    let probe = zone_for(zones, 0.01).map(|z| {
        let lf = log_fracs
            .iter()
            .find(|(d, _)| (*d - 0.01).abs() < 1e-9)
            .map_or(f64::NAN, |&(_, f)| f);
        (100.0 * z.member_fraction, 100.0 * lf)
    });
    if let Some((count_pct, log_pct)) = probe {
        cmp.note(format!(
            "the printed percentage column equals 200*delta exactly; neither measure of \
             membership reproduces that: at delta = 0.01 the counting fraction here is \
             {count_pct:.2}% (T is logarithmically distributed, so arc mass scales with \
             6^phase and the range endpoint), and the 1/x-weighted density is {log_pct:.2}% \
             (it approaches 2*delta only at rate 1/log, offset by the exact-center members \
             1, 7, 43, 259, ..., each 6x + 1 of the last)"
        ));
    }
    cmp
}

/// Table 10.2, basin-of-attraction statistics per zone radius.
pub fn compare_basin(zones: &[ZoneReport]) -> TableComparison {
    let mut cmp = TableComparison::new("10.2");
    for pv in table_values("10.2") {
        let Some(z) = printed_number(pv.row).and_then(|d| zone_for(zones, d)) else {
            cmp.push_skip(pv, "zone radius not computed");
            continue;
        };
        match pv.col {
            "max_steps" => cmp.push_num(pv, z.max_steps_to_1 as f64),
            "mean_steps" => cmp.push_num(pv, z.mean_steps_to_1),
            "success_pct" => match success_pct(z) {
                Some(p) => cmp.push_num(pv, p),
                None => cmp.push_skip(pv, "zone has no members in range"),
            },
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    if let Some(z) = zone_for(zones, 0.05) {
        cmp.note(format!(
            "no uniform step bound holds on a zone: at delta = 0.05 the member x = {} needs {} steps to reach 1",
            z.max_steps_x, z.max_steps_to_1
        ));
    }
    cmp
}

/// Table 7.2, growth statistics of selected orbits. Odd runs are counted in
/// the orbit of C including the start.
pub fn compare_growth() -> Result<TableComparison> {
    let mut cmp = TableComparison::new("7.2");
    let mut stats: BTreeMap<&str, _> = BTreeMap::new();
    for pv in table_values("7.2") {
        let Ok(start) = pv.row.parse::<OrbitValue>() else {
            cmp.push_skip(pv, "unrecognized start row");
            continue;
        };
        if !stats.contains_key(pv.row) {
            stats.insert(pv.row, collatz::orbit_stats(start, ORBIT_CAP));
        }
        let s = &stats[pv.row];
        match pv.col {
            "max_odd_run" => cmp.push_num(pv, s.max_odd_run as f64),
            "peak" => cmp.push_num(pv, s.peak as f64),
            "peak_ratio" => cmp.push_num(pv, s.peak_ratio),
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp.note("peak_ratio = peak / start; odd runs counted over the full orbit, start included");
    Ok(cmp)
}

/// Table 7.3, the p-cycle feasibility test: distance of p*alpha from the
/// nearest integer against the uniform deviation bound times p.
pub fn compare_cycles() -> TableComparison {
    let mut cmp = TableComparison::new("7.3");
    let rows = cycle_feasibility(8);
    for pv in table_values("7.3") {
        let Some(r) = pv
            .row
            .parse::<u32>()
            .ok()
            .and_then(|p| rows.iter().find(|r| r.p == p))
        else {
            cmp.push_skip(pv, "cycle length not computed");
            continue;
        };
        match pv.col {
            "p_alpha" => cmp.push_num(pv, r.p_alpha),
            "m" => cmp.push_num(pv, r.m as f64),
            "residue" => cmp.push_num(pv, r.residue),
            "bound" => cmp.push_num(pv, r.bound),
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp
}

/// Table 8.1, the generalized (a, b) families: conjugacy base 2a, fixed
/// shift b/(2a - 1), rotation number, and deviation sup.
pub fn compare_families() -> Result<TableComparison> {
    let mut cmp = TableComparison::new("8.1");
    for pv in table_values("8.1") {
        let Some((a, b)) = pv.row.split_once(',') else {
            cmp.push_skip(pv, "unrecognized family row");
            continue;
        };
        let fam = MapFamily::from_decimals(a, b)?;
        match pv.col {
            "base" => cmp.push_num(pv, rat_to_f64(fam.base())),
            "shift" => cmp.push_num(pv, rat_to_f64(fam.shift())),
            "alpha" => cmp.push_num(pv, fam.alpha()),
            "max_eps" => {
                let mut sup = 0f64;
                for x in 1..=FAMILY_SUP_HI {
                    sup = sup.max(eps_real(&fam, x).value().abs());
                }
                cmp.push_num(pv, sup);
            }
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp.note(format!(
        "max|eps| taken over x in [1, {FAMILY_SUP_HI}]; fractional a evaluates the odd branch in floating point"
    ));
    cmp.note("log_14 7 = 0.737350, not the printed 0.749636; the classic max_eps row prints the uniform bound 0.2749 where the attained maximum is eps(1) = 0.086033");
    Ok(cmp)
}

/// Table 8.2, one unit of flow time against one map step. c_x recomputes
/// C(x); phi_1 follows the corrected flow 3^t (x + 1/5) - 1/5.
pub fn compare_flow() -> Result<TableComparison> {
    let mut cmp = TableComparison::new("8.2");
    for pv in table_values("8.2") {
        let Ok(x) = pv.row.parse::<OrbitValue>() else {
            cmp.push_skip(pv, "unrecognized x row");
            continue;
        };
        let (phi, gap) = flow_vs_map(x, FlowVariant::Corrected)?;
        match pv.col {
            "c_x" => cmp.push_num(pv, collatz::step(x)? as f64),
            "phi_1" => cmp.push_num(pv, phi),
            "abs_diff" => cmp.push_num(pv, gap.abs()),
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp.note(
        "the printed phi_1 column matches neither the corrected flow (3x + 0.4, conjugate to \
         rotation by alpha) nor the printed 6^t closed form (6x + 1); the flow tracks phase, \
         not orbit values, so a gap from C(x) is expected",
    );
    Ok(cmp)
}

/// Table 9.1, selected iterates C^n(x).
pub fn compare_terras() -> Result<TableComparison> {
    let mut cmp = TableComparison::new("9.1");
    for pv in table_values("9.1") {
        let parsed = pv.row.split_once(":n").and_then(|(x, n)| {
            Some((x.parse::<OrbitValue>().ok()?, n.parse::<u32>().ok()?))
        });
        let Some((x, n)) = parsed else {
            cmp.push_skip(pv, "unrecognized iterate row");
            continue;
        };
        let mut cur = x;
        for _ in 0..n {
            cur = collatz::step(cur)?;
        }
        cmp.push_num(pv, cur as f64);
    }
    cmp.note("iterates of the standard map: x/2 for even x, 3x + 1 for odd x");
    Ok(cmp)
}

fn parse_set(s: &str) -> Option<Vec<u8>> {
    let inner = s.trim().strip_prefix('{')?.strip_suffix('}')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner
        .split(',')
        .map(|t| t.trim().parse::<u8>().ok())
        .collect()
}

/// Table 10.1, Walsh coefficients of eps over parity words, with the
/// normalized column |a_I| * 2^|I|.
pub fn compare_walsh(report: &WalshReport) -> TableComparison {
    let mut cmp = TableComparison::new("10.1");
    for pv in table_values("10.1") {
        let Some(a) = parse_set(pv.row).and_then(|set| report.coefficient_of(&set)) else {
            cmp.push_skip(pv, "index set missing from the computed report");
            continue;
        };
        let size = parse_set(pv.row).map(|s| s.len()).unwrap_or(0);
        match pv.col {
            "abs_a" => cmp.push_num(pv, a.abs()),
            "normalized" => cmp.push_num(pv, a.abs() * 2f64.powi(size as i32)),
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp.note(format!(
        "coefficients estimated from parity words of length {} over x in [{}, {}]",
        report.m, report.sample.lo, report.sample.hi
    ));
    cmp
}

/// Table A.1, the per-integer deviation listing for x = 1..100.
pub fn compare_eps_table() -> TableComparison {
    let mut cmp = TableComparison::new("A.1");
    for pv in table_values("A.1") {
        match pv.row.parse::<OrbitValue>() {
            Ok(x) => cmp.push_num(pv, classic_eps(x).value().abs()),
            Err(_) => cmp.push_skip(pv, "unrecognized x row"),
        }
    }
    cmp
}

/// Tables B.1 and B.2, step-by-step trajectory records. The start is read
/// from the table's own row 0. Deviation at row n is the step arriving at
/// the row's value (0 at the start by convention), cum its running sum.
pub fn compare_trajectory(table: &str) -> Result<TableComparison> {
    let start = lookup(table, "0", "value")
        .and_then(|pv| pv.value.parse::<OrbitValue>().ok())
        .ok_or_else(|| Error::BadInput(format!("table {table} has no integer start at row 0")))?;
    let mut cmp = TableComparison::new(table);
    let rec = track(start, ORBIT_CAP);
    let t0 = rec.phases[0].value();
    for pv in table_values(table) {
        let Ok(n) = pv.row.parse::<usize>() else {
            cmp.push_skip(pv, "unrecognized step row");
            continue;
        };
        if n >= rec.values.len() {
            cmp.push_skip(pv, "orbit record ends before this row");
            continue;
        }
        match pv.col {
            "value" => cmp.push_num(pv, rec.values[n] as f64),
            "parity" => cmp.push_text(pv, if rec.parities[n] { "Odd" } else { "Even" }),
            "phase" => cmp.push_num(pv, rec.phases[n].value()),
            "predicted" => {
                cmp.push_num(pv, PhaseAngle::new(t0 + n as f64 * alpha()).value())
            }
            "eps" => cmp.push_num(pv, if n == 0 { 0.0 } else { rec.eps_seq[n - 1] }),
            "cum" => cmp.push_num(pv, rec.cum_errors[n]),
            _ => cmp.push_skip(pv, "unrecognized column"),
        }
    }
    cmp.note(format!(
        "phases recomputed from T(x) = frac(log_6(x + 1/5)); T({start}) = {}, so the printed \
         phase column is offset from step 0 onward while values and parities reproduce",
        format_sig(t0, 6)
    ));
    Ok(cmp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareScale {
    /// Deviation statistics and zones over [1, 1e6]; runs in seconds.
    Standard,
    /// The published ranges: [1, 1e7] for deviation statistics and zones.
    Full,
}

/// Recomputes every table and assembles the full discrepancy report, in the
/// manuscript's table order.
pub fn compare_all(scale: CompareScale) -> Result<DiscrepancyReport> {
    let stat_hi: OrbitValue = match scale {
        CompareScale::Standard => 1_000_000,
        CompareScale::Full => 10_000_000,
    };

    let scan_sample = SampleSpec::exhaustive(SCAN_RANGE.0, SCAN_RANGE.1);
    let refined = refine_scan(&RefineSpec::default(), &scan_sample, ScanObjective::Sup)?;

    let opts = SweepOptions {
        cutoffs: REPORT_CUTOFFS.to_vec(),
        ..SweepOptions::default()
    };
    let mut sweeps = Vec::new();
    for hi in SWEEP_RANGES {
        sweeps.push(trajectory_sweep(1, hi, &opts)?);
    }

    let [t53, t61, ta2] = compare_deviation_stats(1, stat_hi)?;

    let zones = termination_zone_report(&ZONE_DELTAS, 1, stat_hi, ORBIT_CAP)?;
    let log_fracs = zone_log_fraction(1, stat_hi, &ZONE_DELTAS)?;

    let walsh = walsh_coefficients(
        &SampleSpec::exhaustive(1, 1_000_000),
        6,
        &default_walsh_sets(),
    )?;

    let (t42, t63) = compare_cumulative(&sweeps);
    let tables = vec![
        compare_scan(refined.argmin.as_ref())?,
        t42,
        compare_taylor(),
        t53,
        t61,
        t63,
        compare_asymptotics(),
        compare_zones(&zones, &log_fracs),
        compare_growth()?,
        compare_cycles(),
        compare_families()?,
        compare_flow()?,
        compare_terras()?,
        compare_walsh(&walsh),
        compare_basin(&zones),
        compare_eps_table(),
        ta2,
        compare_trajectory("B.1")?,
        compare_trajectory("B.2")?,
    ];
    Ok(DiscrepancyReport { tables })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_loads_completely() {
        assert_eq!(dataset().len(), 594);
        let v = lookup("7.3", "1", "p_alpha").unwrap();
        assert_eq!(v.value, "0.613147");
        assert!(v.citation.starts_with("tab:cycle-test"));
        // every cell appears once
        let mut seen = std::collections::BTreeSet::new();
        for v in dataset() {
            assert!(seen.insert((v.table, v.row, v.col)), "duplicate {v:?}");
        }
    }

    #[test]
    fn printed_parsing() {
        assert_eq!(printed_number("1/5"), Some(0.2));
        assert_eq!(printed_number("-0.0182"), Some(-0.0182));
        assert_eq!(printed_number("1.12e-4"), Some(1.12e-4));
        assert_eq!(printed_number("Odd"), None);
        assert!((printed_tolerance("0.613147") / 1e-6 - 1.0).abs() < 1e-12);
        assert!((printed_tolerance("1.12e-4") / 1e-6 - 1.0).abs() < 1e-12);
        assert_eq!(printed_tolerance("9232"), 0.5);
        assert_eq!(printed_tolerance("1/5"), 1e-9);
    }

    #[test]
    fn full_unit_tolerance_accepts_truncation_but_not_error() {
        // printed 4.905177 truncates 4.905177542; one final-digit unit accepts it
        let truncated = PaperValue {
            table: "t",
            row: "r",
            col: "c",
            value: "4.905177",
            citation: "tab:test",
        };
        let mut cmp = TableComparison::new("t");
        cmp.push_num(&truncated, 4.905177542);
        assert_eq!(cmp.cells[0].outcome, CellOutcome::Match);
        let wrong = PaperValue {
            value: "0.0012",
            ..truncated
        };
        cmp.push_num(&wrong, 0.0010609);
        assert_eq!(cmp.cells[1].outcome, CellOutcome::Mismatch);
    }

    #[test]
    fn cycle_table_reproduces_exactly() {
        let cmp = compare_cycles();
        assert_eq!(cmp.cells.len(), 32);
        assert_eq!(cmp.matched(), 32);
        assert_eq!(cmp.mismatched(), 0);
    }

    #[test]
    fn terras_table_flags_the_bad_iterate() {
        let cmp = compare_terras().unwrap();
        assert_eq!(cmp.matched(), 4);
        assert_eq!(cmp.mismatched(), 1);
        let bad = cmp.cell("703:n3", "iterate").unwrap();
        assert_eq!(bad.outcome, CellOutcome::Mismatch);
        assert_eq!(bad.computed, "3166.00000");
    }

    #[test]
    fn flow_table_matches_only_the_map_column() {
        let cmp = compare_flow().unwrap();
        for cell in &cmp.cells {
            let want = if cell.col == "c_x" {
                CellOutcome::Match
            } else {
                CellOutcome::Mismatch
            };
            assert_eq!(cell.outcome, want, "cell {cell:?}");
        }
        assert_eq!(cmp.matched(), 7);
        assert_eq!(cmp.mismatched(), 14);
    }

    #[test]
    fn taylor_table_splits_as_expected() {
        let cmp = compare_taylor();
        assert_eq!(cmp.matched(), 4);
        assert_eq!(cmp.mismatched(), 4);
        for (row, col) in [
            ("odd", "c2"),
            ("odd", "c3"),
            ("even", "leading_per_x"),
            ("odd", "leading_per_x"),
        ] {
            assert_eq!(cmp.cell(row, col).unwrap().outcome, CellOutcome::Mismatch);
        }
        assert_eq!(cmp.cell("even", "c1").unwrap().outcome, CellOutcome::Match);
    }

    #[test]
    fn family_table_alpha_column() {
        let cmp = compare_families().unwrap();
        for row in ["3,1", "5,1", "3,5", "1,1", "1.5,1"] {
            assert_eq!(
                cmp.cell(row, "alpha").unwrap().outcome,
                CellOutcome::Match,
                "alpha for {row}"
            );
        }
        // log_14 7 = 0.737350, printed 0.749636
        assert_eq!(cmp.cell("7,1", "alpha").unwrap().outcome, CellOutcome::Mismatch);
        for row in ["3,1", "5,1", "7,1", "3,5", "1,1", "1.5,1"] {
            assert_eq!(cmp.cell(row, "base").unwrap().outcome, CellOutcome::Match);
        }
        // classic row prints the uniform bound, not the attained sup
        assert_eq!(cmp.cell("3,1", "max_eps").unwrap().outcome, CellOutcome::Mismatch);
    }

    #[test]
    fn asymptotics_ratios_sit_near_two() {
        let cmp = compare_asymptotics();
        for cell in cmp.cells.iter().filter(|c| c.col == "ratio") {
            assert_eq!(cell.outcome, CellOutcome::Mismatch);
            let got: f64 = cell.computed.parse().unwrap();
            assert!((got - 2.0).abs() < 0.01, "ratio {got}");
        }
    }

    #[test]
    fn growth_table_selected_cells() {
        let cmp = compare_growth().unwrap();
        assert_eq!(cmp.cell("27", "peak").unwrap().outcome, CellOutcome::Match);
        assert_eq!(
            cmp.cell("27", "peak_ratio").unwrap().outcome,
            CellOutcome::Match
        );
        assert_eq!(
            cmp.cell("27", "max_odd_run").unwrap().outcome,
            CellOutcome::Mismatch
        );
        assert_eq!(cmp.cell("703", "peak").unwrap().outcome, CellOutcome::Mismatch);
    }

    #[test]
    fn trajectory_values_reproduce_and_phases_do_not() {
        let cmp = compare_trajectory("B.1").unwrap();
        for cell in &cmp.cells {
            match cell.col.as_str() {
                "value" | "parity" => assert_eq!(cell.outcome, CellOutcome::Match, "{cell:?}"),
                _ => {}
            }
        }
        assert_eq!(cmp.cell("0", "phase").unwrap().outcome, CellOutcome::Mismatch);
        // the printed predicted column is consistent with its own phase 0,
        // ours with the recomputed T(27)
        assert_eq!(
            cmp.cell("0", "predicted").unwrap().outcome,
            CellOutcome::Mismatch
        );
    }

    #[test]
    fn eps_listing_has_all_hundred_rows() {
        let cmp = compare_eps_table();
        assert_eq!(cmp.cells.len(), 100);
        assert!(cmp.cells.iter().all(|c| c.abs_diff.is_some()));
    }

    #[test]
    fn scan_table_flags_rank_one_error() {
        let cmp = compare_scan(None).unwrap();
        // coordinates skipped without a refined scan, deviations recomputed
        assert_eq!(cmp.skipped(), 10);
        let bad = cmp.cell("1", "max_error").unwrap();
        assert_eq!(bad.outcome, CellOutcome::Mismatch);
        let sup: f64 = bad.computed.parse().unwrap();
        assert!((sup - 0.00106).abs() < 5e-5, "sup {sup}");
    }

    #[test]
    fn summary_lines_cover_every_table_plus_total() {
        let report = DiscrepancyReport {
            tables: vec![compare_cycles(), compare_taylor()],
        };
        let lines = report.summary_lines();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("table 7.3 (tab:cycle-test): 32 match"));
        assert!(lines[2].starts_with("total across 2 tables:"));
        assert_eq!(report.totals(), (36, 4, 0));
        assert!(report.find("5.1").is_some());
        assert!(report.find("9.9").is_none());
    }
}
