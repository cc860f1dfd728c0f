//! Command-line front end. Every run resolves its options (flags beat the
//! config file, which beats `COLLATZ_ROTATION_*` environment variables,
//! which beat defaults), writes its reports under the output directory, and
//! finishes by writing a manifest with a checksum of each output.
//!
//! Exit codes: 0 on success (including when compare-paper finds
//! discrepancies; those are results, not failures), 1 on execution errors,
//! 2 on usage errors.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analytics::{
    all_resolve, cycle_eps_sum, cycle_feasibility, default_walsh_sets, set_label,
    spectral_estimates, termination_zone_report, zone_log_fraction, ZoneReport,
};
use crate::collatz::{OrbitValue, Resolution, ORBIT_CAP};
use crate::cumulative::{record_rows, track};
use crate::error::Error;
use crate::flow::{flow_vs_map, max_conjugacy_residual, FlowVariant};
use crate::phase::MapFamily;
use crate::report::paper::{compare_all, CompareScale, ZONE_DELTAS};
use crate::report::plot::emit_plot_data;
use crate::report::table::{format_sig, write_json_file, Cell, Column, TableSchema};
use crate::report::ManifestBuilder;
use crate::survey::{
    exhaustive_verify, grid_scan, parse_sample_spec, refine_scan, sample_verify,
    trajectory_sweep, RefineSpec, SampleScheme, SampleSpec, ScanObjective, SweepOptions,
};

#[derive(Debug, Parser)]
#[command(
    name = "collatz-rotation",
    version,
    about = "Deviation laboratory for the Collatz phase rotation"
)]
pub struct Cli {
    /// TOML file supplying defaults for out, workers, and seed
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory for reports and the run manifest
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads; results are identical for any value
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    /// Seed for commands that sample (ignored when a sample spec names one)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deviation sweep over an integer range: sup, mean, quantile sketch
    Verify(VerifyArgs),
    /// Grid scan of the (a, b) transform plane, optionally refined
    Scan(ScanArgs),
    /// Phase record of a single orbit: phases, deviations, cumulative error
    Trajectory(TrajectoryArgs),
    /// Cumulative-error sweep: sup |E_n| over a start range, by depth cutoff
    Cumulative(CumulativeArgs),
    /// Termination-zone membership and stopping statistics per radius
    Zones(ZonesArgs),
    /// p-cycle feasibility rows and the trivial-cycle deviation sum
    Cycles(CyclesArgs),
    /// Orbit statistics for selected starts, plus a full-range resolution check
    Stats(StatsArgs),
    /// Walsh coefficients and autocorrelation of the deviation sequence
    Spectrum(SpectrumArgs),
    /// Interpolating-flow conjugacy residuals and flow-versus-map rows
    Flow(FlowArgs),
    /// Recompute every published table and report agreement cell by cell
    ComparePaper(CompareArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Sample spec: lo,hi for exhaustive, lo,hi,n[,seed] for uniform
    #[arg(long, default_value = "1,1000000")]
    pub range: String,
    /// Family parameter a as an exact decimal
    #[arg(long, default_value = "3")]
    pub a: String,
    /// Family parameter b as an exact decimal
    #[arg(long, default_value = "1")]
    pub b: String,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 2.0)]
    pub a_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub a_step: f64,
    #[arg(long, default_value_t = 0.1)]
    pub b_step: f64,
    /// Cascade through finer steps (0.5, 0.1, 0.01) around each argmin
    #[arg(long)]
    pub refine: bool,
    /// Objective: sup or mean
    #[arg(long, default_value = "sup")]
    pub objective: String,
    /// Trajectory-pair sample: lo,hi[,n[,seed]]
    #[arg(long, default_value = "100,10000")]
    pub sample: String,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub start: OrbitValue,
    #[arg(long, default_value_t = ORBIT_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct CumulativeArgs {
    #[arg(long, default_value_t = 1)]
    pub lo: OrbitValue,
    #[arg(long, default_value_t = 100_000)]
    pub hi: OrbitValue,
    /// Depth cutoffs for per-depth sups, comma separated
    #[arg(long, default_value = "10,50,100,500,1000,5000")]
    pub cutoffs: String,
}

#[derive(Debug, Args)]
pub struct ZonesArgs {
    #[arg(long, default_value_t = 1)]
    pub lo: OrbitValue,
    #[arg(long, default_value_t = 1_000_000)]
    pub hi: OrbitValue,
    /// Zone radii, comma separated; default covers the published tables
    #[arg(long)]
    pub deltas: Option<String>,
    #[arg(long, default_value_t = ORBIT_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct CyclesArgs {
    #[arg(long, default_value_t = 8)]
    pub p_max: u32,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Starts to profile, comma separated
    #[arg(long, default_value = "27,97,703,9663,83779,459759")]
    pub starts: String,
    /// Also check that every start in lo,hi reaches 1
    #[arg(long, value_name = "LO,HI")]
    pub resolve: Option<String>,
    #[arg(long, default_value_t = ORBIT_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Sample spec: lo,hi[,n[,seed]]
    #[arg(long, default_value = "1,1000000")]
    pub sample: String,
    /// Parity word length
    #[arg(long, default_value_t = 6)]
    pub m: u8,
    /// Largest autocorrelation lag
    #[arg(long, default_value_t = 8)]
    pub k_max: u32,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// corrected (3^t, rotation by alpha) or printed (6^t, rotation by 1)
    #[arg(long, default_value = "corrected")]
    pub variant: String,
    #[arg(long, default_value_t = 1)]
    pub grid_lo: OrbitValue,
    #[arg(long, default_value_t = 10_000)]
    pub grid_hi: OrbitValue,
    /// Flow times for the residual grid, comma separated
    #[arg(long, default_value = "0.25,0.5,0.75,1.0")]
    pub times: String,
    /// x rows for the flow-versus-map table, comma separated
    #[arg(long, default_value = "1,2,3,5,10,100,1000")]
    pub rows: String,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Use the published ranges (1e7 statistics) instead of 1e6
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    out: Option<PathBuf>,
    workers: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub seed: u64,
}

impl Cli {
    pub fn settings(&self) -> anyhow::Result<Settings> {
        let file: FileConfig = match &self.config {
            Some(p) => toml::from_str(
                &fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
            )
            .with_context(|| format!("parsing {}", p.display()))?,
            None => FileConfig::default(),
        };
        let out = self
            .out
            .clone()
            .or(file.out)
            .or_else(|| std::env::var_os("COLLATZ_ROTATION_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        let workers = self.workers.or(file.workers).or_else(|| {
            std::env::var("COLLATZ_ROTATION_WORKERS")
                .ok()?
                .parse()
                .ok()
        });
        let seed = self.seed.or(file.seed).unwrap_or(0);
        Ok(Settings { out, workers, seed })
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    let st = cli.settings()?;
    if let Some(n) = st.workers.filter(|&n| n > 0) {
        // the global pool can only be built once per process; later runs in
        // the same process keep the first width, which never changes results
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    fs::create_dir_all(&st.out)
        .with_context(|| format!("creating output directory {}", st.out.display()))?;
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, &st),
        Command::Scan(a) => cmd_scan(a, &st),
        Command::Trajectory(a) => cmd_trajectory(a, &st),
        Command::Cumulative(a) => cmd_cumulative(a, &st),
        Command::Zones(a) => cmd_zones(a, &st),
        Command::Cycles(a) => cmd_cycles(a, &st),
        Command::Stats(a) => cmd_stats(a, &st),
        Command::Spectrum(a) => cmd_spectrum(a, &st),
        Command::Flow(a) => cmd_flow(a, &st),
        Command::ComparePaper(a) => cmd_compare(a, &st),
    }
}

fn manifest(st: &Settings, command: &str) -> ManifestBuilder {
    let mut mb = ManifestBuilder::new(command, st.seed);
    mb.config(
        "workers",
        st.workers.map_or("auto".to_string(), |n| n.to_string()),
    );
    mb
}

fn seeded(mut spec: SampleSpec, st: &Settings) -> SampleSpec {
    if spec.seed == 0 {
        spec.seed = st.seed;
    }
    spec
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| anyhow::anyhow!("bad {what} entry {t:?}"))
        })
        .collect()
}

fn parse_objective(s: &str) -> anyhow::Result<ScanObjective> {
    match s {
        "sup" => Ok(ScanObjective::Sup),
        "mean" => Ok(ScanObjective::Mean),
        other => anyhow::bail!("objective must be sup or mean, got {other:?}"),
    }
}

fn parse_variant(s: &str) -> anyhow::Result<FlowVariant> {
    match s {
        "corrected" => Ok(FlowVariant::Corrected),
        "printed" => Ok(FlowVariant::Printed),
        other => anyhow::bail!("variant must be corrected or printed, got {other:?}"),
    }
}

fn resolution_text(r: Resolution) -> String {
    match r {
        Resolution::Steps(n) => n.to_string(),
        Resolution::CapExceeded => "cap".into(),
        Resolution::Overflow => "overflow".into(),
    }
}

fn resolution_cell(r: Resolution) -> Cell {
    match r {
        Resolution::Steps(n) => Cell::from(n),
        other => Cell::Text(resolution_text(other)),
    }
}

fn cmd_verify(args: &VerifyArgs, st: &Settings) -> anyhow::Result<()> {
    let spec = seeded(parse_sample_spec(&args.range)?, st);
    let fam = MapFamily::from_decimals(&args.a, &args.b)?;
    let report = match spec.scheme {
        SampleScheme::Exhaustive => exhaustive_verify(spec.lo, spec.hi, &fam)?,
        _ => sample_verify(&spec, &fam)?,
    };

    let json = st.out.join("verify.json");
    write_json_file(&report, &json)?;
    let schema = TableSchema::new(
        "verify-quantiles",
        vec![Column::fixed("q", "", 4), Column::num("abs_eps", "")],
    );
    let rows: Vec<Vec<Cell>> = report
        .quantiles
        .probes
        .iter()
        .map(|&(q, v)| vec![Cell::from(q), Cell::from(v)])
        .collect();
    let csv = st.out.join("verify.csv");
    schema.write_csv_file(&rows, &csv)?;

    let mut mb = manifest(st, "verify");
    mb.config("range", &args.range)
        .config("a", &args.a)
        .config("b", &args.b);
    mb.record(&json)?.record(&csv)?;
    mb.finish(&st.out)?;

    println!(
        "range [{}, {}] ({} tested): max |eps| = {} at x = {}, mean {}, {} overflows",
        report.range.0,
        report.range.1,
        report.count,
        format_sig(report.max_abs_eps, 9),
        report.argmax_x,
        format_sig(report.mean_abs_eps, 6),
        report.overflow_count
    );
    Ok(())
}

fn cmd_scan(args: &ScanArgs, st: &Settings) -> anyhow::Result<()> {
    let objective = parse_objective(&args.objective)?;
    let sample = seeded(parse_sample_spec(&args.sample)?, st);

    let schema = TableSchema::new(
        "scan-cells",
        vec![
            Column::num("stage_step", ""),
            Column::fixed("a", "", 4),
            Column::fixed("b", "", 4),
            Column::num("alpha_hat", ""),
            Column::num("sup_dev", ""),
            Column::num("mean_dev", ""),
            Column::int("degenerate", ""),
        ],
    );
    let cell_rows = |step: f64, cells: &[crate::survey::ScanCell]| -> Vec<Vec<Cell>> {
        cells
            .iter()
            .map(|c| {
                vec![
                    Cell::from(step),
                    Cell::from(c.a),
                    Cell::from(c.b),
                    Cell::from(c.alpha_hat),
                    Cell::from(c.sup_dev),
                    Cell::from(c.mean_dev),
                    Cell::Int(c.degenerate as i128),
                ]
            })
            .collect()
    };

    let json = st.out.join("scan.json");
    let csv = st.out.join("scan.csv");
    let best = if args.refine {
        let spec = RefineSpec {
            a_domain: (args.a_min, args.a_max),
            b_domain: (args.b_min, args.b_max),
            ..RefineSpec::default()
        };
        let scan = refine_scan(&spec, &sample, objective)?;
        let mut rows = Vec::new();
        for stage in &scan.stages {
            rows.extend(cell_rows(stage.a_step, &stage.cells));
        }
        schema.write_csv_file(&rows, &csv)?;
        write_json_file(&scan, &json)?;
        scan.argmin
    } else {
        let scan = grid_scan(
            (args.a_min, args.a_max),
            (args.b_min, args.b_max),
            args.a_step,
            args.b_step,
            &sample,
            objective,
        )?;
        schema.write_csv_file(&cell_rows(args.a_step, &scan.cells), &csv)?;
        write_json_file(&scan, &json)?;
        scan.argmin_cell().cloned()
    };

    let mut mb = manifest(st, "scan");
    mb.config("a_domain", format!("{}..{}", args.a_min, args.a_max))
        .config("b_domain", format!("{}..{}", args.b_min, args.b_max))
        .config("objective", &args.objective)
        .config("sample", &args.sample)
        .config("refine", args.refine);
    mb.record(&json)?.record(&csv)?;
    mb.finish(&st.out)?;

    match best {
        Some(c) => println!(
            "argmin (a, b) = ({:.4}, {:.4}): sup {} mean {}",
            c.a,
            c.b,
            format_sig(c.sup_dev, 6),
            format_sig(c.mean_dev, 6)
        ),
        None => println!("no non-degenerate cell in the scanned rectangle"),
    }
    Ok(())
}

fn cmd_trajectory(args: &TrajectoryArgs, st: &Settings) -> anyhow::Result<()> {
    if args.start < 1 {
        return Err(Error::BadInput("start must be at least 1".into()).into());
    }
    let rec = track(args.start, args.cap);
    let rows = record_rows(&rec);

    let json = st.out.join("trajectory.json");
    write_json_file(&rec, &json)?;
    let schema = TableSchema::new(
        "trajectory",
        vec![
            Column::int("n", ""),
            Column::int("value", ""),
            Column::int("parity", "1=odd"),
            Column::fixed("phase", "", 17),
            Column::fixed("eps", "", 17),
            Column::fixed("cum_error", "", 17),
        ],
    );
    let csv_rows: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.n as i128),
                Cell::from(r.value),
                Cell::Int(r.parity as i128),
                Cell::from(r.phase),
                r.eps.map_or(Cell::Text(String::new()), Cell::from),
                Cell::from(r.cum_error),
            ]
        })
        .collect();
    let csv = st.out.join("trajectory.csv");
    schema.write_csv_file(&csv_rows, &csv)?;

    let plot = st.out.join("trajectory_phase.dat");
    let plot_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.n as f64, r.phase, r.cum_error])
        .collect();
    emit_plot_data(&plot, "phase-vs-step", &["n", "phase", "cum_error"], &plot_rows)?;

    let mut mb = manifest(st, "trajectory");
    mb.config("start", args.start).config("cap", args.cap);
    mb.partition("single orbit, sequential");
    mb.record(&json)?.record(&csv)?.record(&plot)?;
    mb.finish(&st.out)?;

    let max_cum = rec.cum_errors.iter().fold(0f64, |m, &e| m.max(e.abs()));
    println!(
        "start {}: {} steps, resolved = {}, max |E_n| = {}",
        args.start,
        rec.values.len() - 1,
        rec.resolved,
        format_sig(max_cum, 6)
    );
    Ok(())
}

fn cmd_cumulative(args: &CumulativeArgs, st: &Settings) -> anyhow::Result<()> {
    let cutoffs: Vec<u64> = parse_list(&args.cutoffs, "cutoff")?;
    let opts = SweepOptions {
        cutoffs,
        ..SweepOptions::default()
    };
    let report = trajectory_sweep(args.lo, args.hi, &opts)?;

    let json = st.out.join("cumulative.json");
    write_json_file(&report, &json)?;

    let schema = TableSchema::new(
        "cumulative-cutoffs",
        vec![
            Column::text("depth"),
            Column::fixed("sup_abs_cum", "", 17),
            Column::int("argmax_start", ""),
        ],
    );
    let mut rows: Vec<Vec<Cell>> = report
        .cutoff_sups
        .iter()
        .map(|c| {
            vec![
                Cell::Text(c.depth.to_string()),
                Cell::from(c.sup_abs_cum),
                Cell::from(c.argmax_start),
            ]
        })
        .collect();
    rows.push(vec![
        Cell::Text("all".into()),
        Cell::from(report.sup_abs_cum),
        Cell::from(report.sup_argmax_start),
    ]);
    let csv = st.out.join("cumulative.csv");
    schema.write_csv_file(&rows, &csv)?;

    let hist_schema = TableSchema::new(
        "stopping-histogram",
        vec![Column::int("total_steps", ""), Column::int("count", "")],
    );
    let hist_rows: Vec<Vec<Cell>> = report
        .stopping_counts
        .iter()
        .map(|(&steps, &count)| vec![Cell::from(steps), Cell::from(count)])
        .collect();
    let hist = st.out.join("stopping.csv");
    hist_schema.write_csv_file(&hist_rows, &hist)?;

    let mut mb = manifest(st, "cumulative");
    mb.config("lo", args.lo)
        .config("hi", args.hi)
        .config("cutoffs", &args.cutoffs);
    mb.record(&json)?.record(&csv)?.record(&hist)?;
    mb.finish(&st.out)?;

    println!(
        "starts [{}, {}]: sup |E_n| = {} at x = {} (n = {}), max telescoping residual {}",
        args.lo,
        args.hi,
        format_sig(report.sup_abs_cum, 9),
        report.sup_argmax_start,
        report.sup_argmax_n,
        format_sig(report.max_residual, 3)
    );
    Ok(())
}

fn cmd_zones(args: &ZonesArgs, st: &Settings) -> anyhow::Result<()> {
    let deltas: Vec<f64> = match &args.deltas {
        Some(s) => parse_list(s, "delta")?,
        None => ZONE_DELTAS.to_vec(),
    };
    let zones = termination_zone_report(&deltas, args.lo, args.hi, args.cap)?;
    let log_fracs = zone_log_fraction(args.lo, args.hi, &deltas)?;

    #[derive(Serialize)]
    struct ZonesOut<'a> {
        zones: &'a [ZoneReport],
        log_density: &'a [(f64, f64)],
    }
    let json = st.out.join("zones.json");
    write_json_file(
        &ZonesOut {
            zones: &zones,
            log_density: &log_fracs,
        },
        &json,
    )?;

    let schema = TableSchema::new(
        "zones",
        vec![
            Column::fixed("delta", "", 3),
            Column::int("members", ""),
            Column::num("member_pct", "%"),
            Column::num("log_density_pct", "%"),
            Column::int("max_steps", ""),
            Column::int("max_steps_x", ""),
            Column::num("mean_steps", ""),
            Column::num("success_pct", "%"),
            Column::int("unresolved", ""),
        ],
    );
    let rows: Vec<Vec<Cell>> = zones
        .iter()
        .zip(&log_fracs)
        .map(|(z, &(_, lf))| {
            let success = if z.members_tested == 0 {
                100.0
            } else {
                100.0 * (z.members_tested - z.unresolved) as f64 / z.members_tested as f64
            };
            vec![
                Cell::from(z.delta),
                Cell::from(z.members_tested),
                Cell::from(100.0 * z.member_fraction),
                Cell::from(100.0 * lf),
                Cell::from(z.max_steps_to_1),
                Cell::from(z.max_steps_x),
                Cell::from(z.mean_steps_to_1),
                Cell::from(success),
                Cell::from(z.unresolved),
            ]
        })
        .collect();
    let csv = st.out.join("zones.csv");
    schema.write_csv_file(&rows, &csv)?;

    let mut mb = manifest(st, "zones");
    mb.config("lo", args.lo).config("hi", args.hi).config(
        "deltas",
        deltas
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    mb.record(&json)?.record(&csv)?;
    mb.finish(&st.out)?;

    for (z, &(_, lf)) in zones.iter().zip(&log_fracs) {
        println!(
            "delta {:.3}: {} members ({}% counting, {}% log density), max steps {} at x = {}",
            z.delta,
            z.members_tested,
            format_sig(100.0 * z.member_fraction, 4),
            format_sig(100.0 * lf, 4),
            z.max_steps_to_1,
            z.max_steps_x
        );
    }
    Ok(())
}

fn cmd_cycles(args: &CyclesArgs, st: &Settings) -> anyhow::Result<()> {
    let rows = cycle_feasibility(args.p_max);
    let (triv_sum, triv_residual) = cycle_eps_sum(&[1, 4, 2])?;

    #[derive(Serialize)]
    struct CyclesOut<'a> {
        rows: &'a [crate::analytics::CycleRow],
        trivial_cycle_eps_sum: f64,
        trivial_cycle_residual: f64,
    }
    let json = st.out.join("cycles.json");
    write_json_file(
        &CyclesOut {
            rows: &rows,
            trivial_cycle_eps_sum: triv_sum,
            trivial_cycle_residual: triv_residual,
        },
        &json,
    )?;

    let schema = TableSchema::new(
        "cycle-feasibility",
        vec![
            Column::int("p", ""),
            Column::fixed("p_alpha", "", 6),
            Column::int("m", ""),
            Column::fixed("residue", "", 6),
            Column::fixed("bound", "", 6),
            Column::text("feasible"),
        ],
    );
    let csv_rows: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.p as i128),
                Cell::from(r.p_alpha),
                Cell::Int(r.m as i128),
                Cell::from(r.residue),
                Cell::from(r.bound),
                Cell::Text(if r.feasible { "yes" } else { "no" }.into()),
            ]
        })
        .collect();
    let csv = st.out.join("cycles.csv");
    schema.write_csv_file(&csv_rows, &csv)?;

    let mut mb = manifest(st, "cycles");
    mb.config("p_max", args.p_max);
    mb.partition("single threaded");
    mb.record(&json)?.record(&csv)?;
    mb.finish(&st.out)?;

    println!(
        "trivial cycle 1 -> 4 -> 2 -> 1: eps sum = {} (2 - 3*alpha = {}), circular residual {}",
        format_sig(triv_sum, 12),
        format_sig(2.0 - 3.0 * crate::phase::alpha(), 12),
        format_sig(triv_residual, 3)
    );
    let infeasible = rows.iter().filter(|r| !r.feasible).count();
    println!(
        "p = 1..{}: {} of {} lengths fail the feasibility test",
        args.p_max,
        infeasible,
        rows.len()
    );
    Ok(())
}

fn cmd_stats(args: &StatsArgs, st: &Settings) -> anyhow::Result<()> {
    let starts: Vec<OrbitValue> = parse_list(&args.starts, "start")?;
    let rows: Vec<_> = starts
        .iter()
        .map(|&x| crate::collatz::orbit_stats(x, args.cap))
        .collect();

    let resolve = match &args.resolve {
        Some(s) => {
            let ends: Vec<OrbitValue> = parse_list(s, "resolve bound")?;
            if ends.len() != 2 {
                anyhow::bail!("--resolve wants exactly lo,hi");
            }
            Some((ends[0], ends[1], all_resolve(ends[0], ends[1], args.cap)?))
        }
        None => None,
    };

    #[derive(Serialize)]
    struct StatsOut<'a> {
        rows: &'a [crate::collatz::OrbitStats],
        resolve_range: Option<(OrbitValue, OrbitValue)>,
        resolved: Option<u64>,
        unresolved: Option<Vec<OrbitValue>>,
    }
    let json = st.out.join("stats.json");
    write_json_file(
        &StatsOut {
            rows: &rows,
            resolve_range: resolve.as_ref().map(|r| (r.0, r.1)),
            resolved: resolve.as_ref().map(|r| r.2 .0),
            unresolved: resolve.as_ref().map(|r| r.2 .1.clone()),
        },
        &json,
    )?;

    let schema = TableSchema::new(
        "orbit-stats",
        vec![
            Column::int("start", ""),
            Column::text("total_steps"),
            Column::text("terras_steps"),
            Column::int("peak", ""),
            Column::num("peak_ratio", ""),
            Column::int("max_odd_run", ""),
        ],
    );
    let csv_rows: Vec<Vec<Cell>> = rows
        .iter()
        .map(|s| {
            vec![
                Cell::from(s.start),
                resolution_cell(s.total_steps),
                resolution_cell(s.terras_steps),
                Cell::from(s.peak),
                Cell::from(s.peak_ratio),
                Cell::from(s.max_odd_run),
            ]
        })
        .collect();
    let csv = st.out.join("stats.csv");
    schema.write_csv_file(&csv_rows, &csv)?;

    let mut mb = manifest(st, "stats");
    mb.config("starts", &args.starts).config("cap", args.cap);
    if let Some(s) = &args.resolve {
        mb.config("resolve", s);
    }
    mb.record(&json)?.record(&csv)?;
    mb.finish(&st.out)?;

    for s in &rows {
        println!(
            "start {}: stopping {}, terras {}, peak {} ({}x), longest odd run {}",
            s.start,
            resolution_text(s.total_steps),
            resolution_text(s.terras_steps),
            s.peak,
            format_sig(s.peak_ratio, 6),
            s.max_odd_run
        );
    }
    if let Some((lo, hi, (ok, failures))) = &resolve {
        println!(
            "resolution check [{lo}, {hi}]: {ok} reached 1, {} did not",
            failures.len()
        );
    }
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs, st: &Settings) -> anyhow::Result<()> {
    let spec = seeded(parse_sample_spec(&args.sample)?, st);
    let est = spectral_estimates(&spec, args.k_max, args.m, &default_walsh_sets())?;

    let json = st.out.join("spectrum.json");
    write_json_file(&est, &json)?;

    let walsh_schema = TableSchema::new(
        "walsh",
        vec![
            Column::text("set"),
            Column::fixed("coefficient", "", 17),
            Column::fixed("normalized", "", 17),
        ],
    );
    let walsh_rows: Vec<Vec<Cell>> = est
        .walsh
        .iter()
        .map(|r| {
            vec![
                Cell::Text(set_label(&r.set)),
                Cell::from(r.coefficient),
                Cell::from(r.coefficient.abs() * 2f64.powi(r.set.len() as i32)),
            ]
        })
        .collect();
    let walsh_csv = st.out.join("walsh.csv");
    walsh_schema.write_csv_file(&walsh_rows, &walsh_csv)?;

    let ac_schema = TableSchema::new(
        "autocorrelation",
        vec![Column::int("lag", ""), Column::fixed("r_hat", "", 17)],
    );
    let ac_rows: Vec<Vec<Cell>> = est
        .autocorr
        .iter()
        .map(|&(k, r)| vec![Cell::Int(k as i128), Cell::from(r)])
        .collect();
    let ac_csv = st.out.join("autocorr.csv");
    ac_schema.write_csv_file(&ac_rows, &ac_csv)?;

    let mut mb = manifest(st, "spectrum");
    mb.config("sample", &args.sample)
        .config("m", args.m)
        .config("k_max", args.k_max);
    mb.record(&json)?.record(&walsh_csv)?.record(&ac_csv)?;
    mb.finish(&st.out)?;

    let r0 = est
        .autocorr
        .iter()
        .find(|&&(k, _)| k == 0)
        .map_or(f64::NAN, |&(_, r)| r);
    println!(
        "mean eps = {}, R(0) = {}, {} Walsh sets, {} samples dropped",
        format_sig(est.mean_eps, 9),
        format_sig(r0, 9),
        est.walsh.len(),
        est.dropped
    );
    Ok(())
}

fn cmd_flow(args: &FlowArgs, st: &Settings) -> anyhow::Result<()> {
    let variant = parse_variant(&args.variant)?;
    let times: Vec<f64> = parse_list(&args.times, "time")?;
    let xs: Vec<OrbitValue> = parse_list(&args.rows, "row")?;

    let max_residual = max_conjugacy_residual(args.grid_lo, args.grid_hi, &times, variant);

    #[derive(Serialize)]
    struct FlowRow {
        x: OrbitValue,
        c_x: OrbitValue,
        phi_1: f64,
        gap: f64,
    }
    let mut rows = Vec::new();
    for &x in &xs {
        let (phi, gap) = flow_vs_map(x, variant)?;
        rows.push(FlowRow {
            x,
            c_x: crate::collatz::step(x)?,
            phi_1: phi,
            gap,
        });
    }

    #[derive(Serialize)]
    struct FlowOut<'a> {
        variant: FlowVariant,
        grid: (OrbitValue, OrbitValue),
        times: &'a [f64],
        max_conjugacy_residual: f64,
        rows: &'a [FlowRow],
    }
    let json = st.out.join("flow.json");
    write_json_file(
        &FlowOut {
            variant,
            grid: (args.grid_lo, args.grid_hi),
            times: &times,
            max_conjugacy_residual: max_residual,
            rows: &rows,
        },
        &json,
    )?;

    let schema = TableSchema::new(
        "flow-vs-map",
        vec![
            Column::int("x", ""),
            Column::int("c_x", ""),
            Column::num("phi_1", ""),
            Column::num("gap", ""),
        ],
    );
    let csv_rows: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.x),
                Cell::from(r.c_x),
                Cell::from(r.phi_1),
                Cell::from(r.gap),
            ]
        })
        .collect();
    let csv = st.out.join("flow.csv");
    schema.write_csv_file(&csv_rows, &csv)?;

    let mut mb = manifest(st, "flow");
    mb.config("variant", &args.variant)
        .config("grid", format!("{}..{}", args.grid_lo, args.grid_hi))
        .config("times", &args.times);
    mb.partition("single threaded");
    mb.record(&json)?.record(&csv)?;
    mb.finish(&st.out)?;

    println!(
        "{} flow: max conjugacy residual {} over x in [{}, {}] at {} times",
        args.variant,
        format_sig(max_residual, 3),
        args.grid_lo,
        args.grid_hi,
        times.len()
    );
    Ok(())
}

fn cmd_compare(args: &CompareArgs, st: &Settings) -> anyhow::Result<()> {
    let scale = if args.full {
        CompareScale::Full
    } else {
        CompareScale::Standard
    };
    let report = compare_all(scale)?;

    let json = st.out.join("compare_paper.json");
    write_json_file(&report, &json)?;

    let schema = TableSchema::new(
        "compare-paper",
        vec![
            Column::text("table"),
            Column::text("row"),
            Column::text("col"),
            Column::text("printed"),
            Column::text("computed"),
            Column::text("abs_diff"),
            Column::text("tolerance"),
            Column::text("outcome"),
            Column::text("citation"),
        ],
    );
    let mut rows = Vec::new();
    for t in &report.tables {
        for c in &t.cells {
            rows.push(vec![
                Cell::Text(t.table.clone()),
                Cell::Text(c.row.clone()),
                Cell::Text(c.col.clone()),
                Cell::Text(c.printed.clone()),
                Cell::Text(c.computed.clone()),
                Cell::Text(c.abs_diff.map_or(String::new(), |d| format_sig(d, 6))),
                Cell::Text(c.tolerance.map_or(String::new(), |t| format_sig(t, 3))),
                Cell::Text(format!("{:?}", c.outcome).to_lowercase()),
                Cell::Text(c.citation.clone()),
            ]);
        }
    }
    let csv = st.out.join("compare_paper.csv");
    schema.write_csv_file(&rows, &csv)?;

    let mut mb = manifest(st, "compare-paper");
    mb.config("scale", if args.full { "full" } else { "standard" });
    mb.record(&json)?.record(&csv)?;
    mb.finish(&st.out)?;

    for line in report.summary_lines() {
        println!("{line}");
    }
    for t in &report.tables {
        for note in &t.notes {
            println!("note [{}]: {}", t.table, note);
        }
    }
    Ok(())
}
