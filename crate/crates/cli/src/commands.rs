use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use polar_srm::codes::CodeSpec;
use polar_srm::flip_decoder::write_frame_records_csv;
use polar_srm::perf_model::{exec_reduction, memory_footprint, Quantization};
use polar_srm::presets::{self, CodePreset, DecoderPreset};
use polar_srm::sc_engine::{lsc_closed_form, Schedule};
use polar_srm::sim_harness::{
    record_frames, run_point, run_sweep, write_rows_csv, ExperimentPlan, HarnessError, PointResult,
    Progress, StatsRow,
};
use serde::Serialize;
use thiserror::Error;

use crate::config::{Config, ConfigError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("conformance failure: {0}")]
    Conformance(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Conformance(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Conformance { .. } => CliError::Conformance(e.to_string()),
            HarnessError::Checkpoint { .. } | HarnessError::CheckpointFormat { .. } => CliError::Io {
                context: "checkpoint".into(),
                source: io::Error::other(e.to_string()),
            },
            other => CliError::Config(ConfigError::Invalid(other.to_string())),
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(format!("cannot create {}", dir.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(io_err(format!("cannot write {}", path.display())))
}

/// Writes `rows` as CSV to stdout and, with an output directory, to `name`
/// inside it.
fn emit_csv<T: Serialize>(rows: &[T], out: Option<&Path>, name: &str) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io {
            context: "csv".into(),
            source: io::Error::other(e),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io {
        context: "csv".into(),
        source: io::Error::other(e.to_string()),
    })?;
    if let Some(dir) = out {
        create_dir(dir)?;
        write_file(&dir.join(name), &bytes)?;
    }
    io::stdout().write_all(&bytes).map_err(io_err("stdout"))
}

fn progress_line(plans: &[ExperimentPlan]) -> impl FnMut(Progress<'_>) + '_ {
    move |p| {
        let plan = &plans[p.plan_index];
        eprintln!(
            "{} {} {} dB: {} frames, {} errors{}",
            plan.code.label(),
            plan.decoder.label(),
            p.ebno_db,
            p.state.frames,
            p.state.errors,
            if p.state.done { " (done)" } else { "" }
        );
    }
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"))
}

fn print_rows(out: &mut dyn Write, rows: &[StatsRow]) -> io::Result<()> {
    writeln!(
        out,
        "{:<10} {:<7} {:>5} {:>6} {:>7} {:>9} {:>7} {:>11} {:>11} {:>11}",
        "code", "decoder", "srm", "tmax", "Eb/N0", "frames", "errors", "FER", "avg exec", "avg extra"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<10} {:<7} {:>5} {:>6} {:>7.3} {:>9} {:>7} {:>11.4e} {:>11.1} {:>11}{}",
            r.code,
            r.decoder,
            r.srm,
            r.t_max,
            r.ebno_db,
            r.stats.frames,
            r.stats.errors,
            r.stats.fer,
            r.stats.avg_exec,
            fmt_opt(r.stats.avg_additional, 1),
            if r.censored { "  censored" } else { "" }
        )?;
    }
    Ok(())
}

pub struct SimulateArgs {
    pub config: PathBuf,
    pub overrides: Vec<String>,
    pub out: PathBuf,
    pub paired: bool,
    pub dry_run: bool,
    pub frame_log: Option<u64>,
    pub workers: usize,
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut overrides = args.overrides.clone();
    if args.paired {
        overrides.push("paired=true".into());
    }
    let cfg = Config::load(&args.config, &overrides)?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let plans = cfg.plans(base, args.workers)?;
    let manifest = format!(
        "# config = {:?}\n# out = {:?}\n# overrides = {:?}\n{}",
        args.config.display().to_string(),
        args.out.display().to_string(),
        args.overrides,
        cfg.to_toml()
    );
    print!("{manifest}");
    if args.dry_run {
        return Ok(());
    }
    create_dir(&args.out)?;
    write_file(&args.out.join("manifest.toml"), manifest.as_bytes())?;

    let checkpoint = cfg.checkpoint_path(base);
    let results = run_sweep(&plans, checkpoint.as_deref(), &mut progress_line(&plans))?;
    let rows: Vec<StatsRow> = results.iter().flat_map(|p| p.rows.iter().cloned()).collect();
    let path = args.out.join("results.csv");
    let file = fs::File::create(&path).map_err(io_err(format!("cannot write {}", path.display())))?;
    write_rows_csv(file, &rows).map_err(io_err(format!("cannot write {}", path.display())))?;

    if let Some(count) = args.frame_log {
        for plan in &plans {
            for &e in &plan.ebno_points {
                let recs = record_frames(plan, e, count)?;
                let path = args.out.join(format!("frames_{}_{}.csv", plan.decoder.label(), e));
                let file = fs::File::create(&path).map_err(io_err(format!("cannot write {}", path.display())))?;
                write_frame_records_csv(file, &recs).map_err(io_err(format!("cannot write {}", path.display())))?;
            }
        }
    }
    println!();
    print_rows(&mut io::stdout(), &rows).map_err(io_err("stdout"))?;
    println!("results written to {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct MemoryRow {
    n: u64,
    decoder: String,
    tmax: u64,
    omega: u64,
    bits: u64,
    bits_srm: u64,
    srm_bits: u64,
    overhead_percent: String,
    reference_bits: Option<u64>,
    reference_bits_srm: Option<u64>,
    reference_percent: Option<f64>,
    matches: Option<bool>,
}

/// Parses `N,TMAX,OMEGA`.
pub fn parse_memory_config(s: &str) -> Result<(u64, u64, u64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n, t, w] = parts.as_slice() else {
        return Err(format!("expected N,TMAX,OMEGA, got {s:?}"));
    };
    let num = |v: &str| v.parse::<u64>().map_err(|e| format!("{v:?}: {e}"));
    let (n, t, w) = (num(n)?, num(t)?, num(w)?);
    if n < 2 || !n.is_power_of_two() || t == 0 || w == 0 {
        return Err(format!("{s:?}: N must be a power of two, TMAX and OMEGA positive"));
    }
    Ok((n, t, w))
}

pub fn memory(custom: &[(u64, u64, u64)], quant: Quantization, out: Option<&Path>, check: bool) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut mismatches = 0;
    let reference_quant = quant == Quantization::default();
    for r in presets::TABLE3 {
        let plain = memory_footprint(r.block_len, r.t_max, r.omega, quant, false);
        let srm = memory_footprint(r.block_len, r.t_max, r.omega, quant, true);
        let pct = format!("{:.2}", srm.overhead_percent.unwrap_or(0.0));
        let ok = reference_quant.then(|| {
            plain.total_bits == r.bits
                && srm.total_bits == r.bits_srm
                && pct == format!("{:.2}", r.overhead_percent)
        });
        if ok == Some(false) {
            mismatches += 1;
        }
        rows.push(MemoryRow {
            n: r.block_len,
            decoder: r.decoder.to_string(),
            tmax: r.t_max,
            omega: r.omega,
            bits: plain.total_bits,
            bits_srm: srm.total_bits,
            srm_bits: srm.total_bits - plain.total_bits,
            overhead_percent: pct,
            reference_bits: reference_quant.then_some(r.bits),
            reference_bits_srm: reference_quant.then_some(r.bits_srm),
            reference_percent: reference_quant.then_some(r.overhead_percent),
            matches: ok,
        });
    }
    for &(n, t, w) in custom {
        let plain = memory_footprint(n, t, w, quant, false);
        let srm = memory_footprint(n, t, w, quant, true);
        rows.push(MemoryRow {
            n,
            decoder: "custom".into(),
            tmax: t,
            omega: w,
            bits: plain.total_bits,
            bits_srm: srm.total_bits,
            srm_bits: srm.total_bits - plain.total_bits,
            overhead_percent: format!("{:.2}", srm.overhead_percent.unwrap_or(0.0)),
            reference_bits: None,
            reference_bits_srm: None,
            reference_percent: None,
            matches: None,
        });
    }
    eprintln!(
        "Memory (Q_ch={}, Q_int={}, Q_flip={})\n{:>5} {:<7} {:>5} {:>5} {:>8} {:>8} {:>9}",
        quant.q_ch, quant.q_int, quant.q_flip, "N", "decoder", "T", "omega", "bits", "w/ SRM", "overhead"
    );
    for r in &rows {
        eprintln!(
            "{:>5} {:<7} {:>5} {:>5} {:>8} {:>8} {:>8}%{}",
            r.n,
            r.decoder,
            r.tmax,
            r.omega,
            r.bits,
            r.bits_srm,
            r.overhead_percent,
            match r.matches {
                Some(false) => "  MISMATCH",
                _ => "",
            }
        );
    }
    emit_csv(&rows, out, "memory.csv")?;
    if check && mismatches > 0 {
        return Err(CliError::Conformance(format!("{mismatches} memory row(s) differ from the reference")));
    }
    Ok(())
}

#[derive(Serialize)]
struct LatencyRow {
    n: usize,
    p: usize,
    closed_form: u64,
    counter: u64,
    midpoint: u64,
    matches: bool,
}

pub fn latency(pe_counts: &[usize], max_n: usize, out: Option<&Path>) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for &p in pe_counts {
        if p == 0 || !p.is_power_of_two() {
            return Err(ConfigError::Invalid(format!("PE count {p} is not a power of two")).into());
        }
        let mut n = (4 * p).max(8);
        while n <= max_n {
            let sched = Schedule::new(n, p).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let closed = lsc_closed_form(n, p).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            rows.push(LatencyRow {
                n,
                p,
                closed_form: closed,
                counter: sched.full_cycles(),
                midpoint: sched.midpoint_cycles(),
                matches: closed == sched.full_cycles(),
            });
            n *= 2;
        }
    }
    eprintln!("{:>6} {:>5} {:>12} {:>9} {:>9}", "N", "P", "closed form", "counter", "midpoint");
    for r in &rows {
        eprintln!(
            "{:>6} {:>5} {:>12} {:>9} {:>9}{}",
            r.n,
            r.p,
            r.closed_form,
            r.counter,
            r.midpoint,
            if r.matches { "" } else { "  MISMATCH" }
        );
    }
    emit_csv(&rows, out, "latency.csv")?;
    let bad = rows.iter().filter(|r| !r.matches).count();
    if bad > 0 {
        return Err(CliError::Conformance(format!("{bad} latency row(s) disagree with the cycle counter")));
    }
    Ok(())
}

/// Shared knobs of the Monte Carlo subcommands.
#[derive(Debug, Clone)]
pub struct RunKnobs {
    pub frames: u64,
    pub min_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub workers: usize,
}

fn select<T: Copy>(all: &[T], wanted: &Option<String>, label: impl Fn(&T) -> &str) -> Result<Vec<T>, CliError> {
    match wanted {
        None => Ok(all.to_vec()),
        Some(w) => {
            let hits: Vec<T> = all.iter().copied().filter(|x| label(x).eq_ignore_ascii_case(w)).collect();
            if hits.is_empty() {
                Err(ConfigError::Invalid(format!("unknown name {w:?}")).into())
            } else {
                Ok(hits)
            }
        }
    }
}

fn build(code: &CodePreset) -> Result<CodeSpec, CliError> {
    code.build().map_err(|e| ConfigError::Invalid(e.to_string()).into())
}

fn paired_plan(spec: &CodeSpec, dec: &DecoderPreset, points: Vec<f64>, k: &RunKnobs) -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(spec.clone(), dec.config(true), points);
    plan.min_frames = k.frames;
    plan.min_frame_errors = k.min_errors;
    plan.max_frames = k.max_frames.max(k.frames);
    plan.seed = k.seed;
    plan.paired = true;
    plan.workers = k.workers;
    plan
}

#[derive(Serialize)]
struct ConformanceRow {
    code: String,
    decoder: String,
    ebno_db: f64,
    frames: u64,
    mismatches: u64,
    fer: f64,
    avg_exec_baseline: f64,
    avg_exec_srm: f64,
}

pub fn conformance(code: &Option<String>, decoder: &Option<String>, knobs: &RunKnobs, out: Option<&Path>) -> Result<(), CliError> {
    let codes = select(&presets::CODES, code, |c| c.label)?;
    let decoders = select(&presets::DECODERS, decoder, |d| d.label)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for c in &codes {
        let spec = build(c)?;
        for d in &decoders {
            let reference = presets::delta_reference(c.label, d.label).expect("every preset pair has a point");
            let plan = paired_plan(&spec, d, vec![reference.ebno_db], knobs);
            eprintln!("{} {} at {} dB: {} paired frames", c.label, d.label, reference.ebno_db, knobs.frames);
            match run_point(&plan, reference.ebno_db) {
                Ok(res) => {
                    let (b, s) = (res.baseline(), res.srm().expect("paired"));
                    rows.push(ConformanceRow {
                        code: c.label.into(),
                        decoder: d.label.into(),
                        ebno_db: reference.ebno_db,
                        frames: res.paired_frames,
                        mismatches: 0,
                        fer: b.stats.fer,
                        avg_exec_baseline: b.stats.avg_exec,
                        avg_exec_srm: s.stats.avg_exec,
                    })
                }
                Err(HarnessError::Conformance { count, .. }) => {
                    failures.push(format!("{} {}: {count} mismatching frames", c.label, d.label));
                    rows.push(ConformanceRow {
                        code: c.label.into(),
                        decoder: d.label.into(),
                        ebno_db: reference.ebno_db,
                        frames: knobs.frames,
                        mismatches: count,
                        fer: f64::NAN,
                        avg_exec_baseline: f64::NAN,
                        avg_exec_srm: f64::NAN,
                    });
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    emit_csv(&rows, out, "conformance.csv")?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Conformance(failures.join("; ")))
    }
}

#[derive(Serialize)]
struct DeltaRow {
    code: String,
    decoder: String,
    ebno_db: f64,
    frames: u64,
    errors: u64,
    fer: f64,
    avg_exec_baseline: f64,
    avg_exec_srm: f64,
    d_avg_exec: f64,
    d_avg_add_exec: Option<f64>,
    d_var_exec: Option<f64>,
    ref_d_avg_exec: f64,
    ref_d_avg_add_exec: f64,
    ref_d_var_exec: f64,
}

pub fn reproduce_deltas(
    table: &[presets::DeltaReference],
    code: &Option<String>,
    decoder: &Option<String>,
    knobs: &RunKnobs,
    out: Option<&Path>,
    name: &str,
) -> Result<(), CliError> {
    let refs = select(table, code, |r| r.code)?;
    let refs = select(&refs, decoder, |r| r.decoder)?;
    let mut rows = Vec::new();
    for r in refs {
        let c = presets::code_by_label(r.code).expect("reference codes are presets");
        let d = presets::decoder_by_label(r.decoder).expect("reference decoders are presets");
        let plan = paired_plan(&build(&c)?, &d, vec![r.ebno_db], knobs);
        let res = run_sweep(std::slice::from_ref(&plan), None, &mut progress_line(std::slice::from_ref(&plan)))?;
        let (b, s) = (res[0].baseline(), res[0].srm().expect("paired"));
        let red = exec_reduction(&b.stats, &s.stats);
        rows.push(DeltaRow {
            code: r.code.into(),
            decoder: r.decoder.into(),
            ebno_db: r.ebno_db,
            frames: b.stats.frames,
            errors: b.stats.errors,
            fer: b.stats.fer,
            avg_exec_baseline: b.stats.avg_exec,
            avg_exec_srm: s.stats.avg_exec,
            d_avg_exec: red.avg_exec,
            d_avg_add_exec: red.avg_additional,
            d_var_exec: red.variance,
            ref_d_avg_exec: r.avg_exec,
            ref_d_avg_add_exec: r.avg_additional,
            ref_d_var_exec: r.variance,
        });
    }
    eprintln!("{:<10} {:<7} {:>7} {:>9} {:>17} {:>17} {:>17}", "code", "decoder", "Eb/N0", "FER", "d avg (ref)", "d extra (ref)", "d var (ref)");
    for r in &rows {
        eprintln!(
            "{:<10} {:<7} {:>7.3} {:>9.3e} {:>8.2} ({:>6.2}) {:>8} ({:>6.2}) {:>8} ({:>6.2})",
            r.code,
            r.decoder,
            r.ebno_db,
            r.fer,
            r.d_avg_exec,
            r.ref_d_avg_exec,
            fmt_opt(r.d_avg_add_exec, 2),
            r.ref_d_avg_add_exec,
            fmt_opt(r.d_var_exec, 2),
            r.ref_d_var_exec
        );
    }
    emit_csv(&rows, out, name)
}

#[derive(Serialize)]
struct CurveRow {
    code: String,
    decoder: String,
    srm: bool,
    ebno_db: f64,
    frames: u64,
    errors: u64,
    fer: f64,
    avg_exec: f64,
    l_sc: u64,
    ref_fer: Option<f64>,
}

/// Paired sweeps over the reference Eb/N0 grid of every decoder.
pub fn reproduce_curves(
    code: &Option<String>,
    decoder: &Option<String>,
    knobs: &RunKnobs,
    out: Option<&Path>,
    name: &str,
) -> Result<(), CliError> {
    let c = match code {
        Some(label) => presets::code_by_label(label)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown code {label:?}")))?,
        None => presets::P1024_128,
    };
    let spec = build(&c)?;
    let decoders = select(&presets::DECODERS, decoder, |d| d.label)?;
    let plans: Vec<ExperimentPlan> = decoders
        .iter()
        .map(|d| {
            let grid = presets::fig3_reference(d.label).expect("every preset decoder has a curve");
            paired_plan(&spec, d, grid.iter().map(|&(e, _)| e).collect(), knobs)
        })
        .collect();
    let results: Vec<PointResult> = run_sweep(&plans, None, &mut progress_line(&plans))?;
    let mut rows = Vec::new();
    for pr in &results {
        for r in &pr.rows {
            let ref_fer = (c == presets::P1024_128)
                .then(|| presets::fig3_reference(&r.decoder))
                .flatten()
                .and_then(|curve| curve.iter().find(|&&(e, _)| e == r.ebno_db).map(|&(_, f)| f));
            rows.push(CurveRow {
                code: r.code.clone(),
                decoder: r.decoder.clone(),
                srm: r.srm,
                ebno_db: r.ebno_db,
                frames: r.stats.frames,
                errors: r.stats.errors,
                fer: r.stats.fer,
                avg_exec: r.stats.avg_exec,
                l_sc: r.accumulator.l_sc,
                ref_fer,
            });
        }
    }
    let all: Vec<StatsRow> = results.iter().flat_map(|p| p.rows.iter().cloned()).collect();
    print_rows(&mut io::stderr(), &all).map_err(io_err("stderr"))?;
    emit_csv(&rows, out, name)
}
