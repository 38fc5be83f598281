//! Monte Carlo runner: Eb/N0 sweeps over encode, AWGN and decode, with
//! stopping rules, paired SRM/baseline runs and checkpointed resumption.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{frame_rng, llr_from_channel, modulate_bpsk, noise_sigma, transmit};
use crate::codes::{assemble_input_vector, polar_encode, CodeSpec};
use crate::flip_decoder::{DecodeError, DecoderConfig, FlipDecoder, FrameOutcome, FrameRecord};
use crate::perf_model::{ExecStats, StatsAccumulator};

pub const DEFAULT_MIN_FRAMES: u64 = 100_000;
pub const DEFAULT_MIN_FRAME_ERRORS: u64 = 1_000;
pub const DEFAULT_MAX_FRAMES: u64 = 100_000_000;

pub const CSV_HEADER: &str =
    "code,decoder,omega,tmax,srm,ebno_db,frames,errors,fer,avg_exec,avg_add_exec,var_exec,srm_restart_rate";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(
        "SRM changed the decoding outcome: {code} {decoder} at {ebno_db} dB, \
         {count} mismatching frame(s), first at frame {first_frame}"
    )]
    Conformance {
        code: String,
        decoder: String,
        ebno_db: f64,
        count: u64,
        first_frame: u64,
    },
    #[error("checkpoint {path}: {source}")]
    Checkpoint {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("checkpoint {path} is not valid: {message}")]
    CheckpointFormat { path: PathBuf, message: String },
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub code: CodeSpec,
    pub decoder: DecoderConfig,
    pub ebno_points: Vec<f64>,
    pub min_frames: u64,
    pub min_frame_errors: u64,
    /// Hard cap on frames per point.
    pub max_frames: u64,
    pub seed: u64,
    /// Decode every frame with SRM off and on and compare the outcomes.
    pub paired: bool,
    pub workers: usize,
}

impl ExperimentPlan {
    pub fn new(code: CodeSpec, decoder: DecoderConfig, ebno_points: Vec<f64>) -> Self {
        ExperimentPlan {
            code,
            decoder,
            ebno_points,
            min_frames: DEFAULT_MIN_FRAMES,
            min_frame_errors: DEFAULT_MIN_FRAME_ERRORS,
            max_frames: DEFAULT_MAX_FRAMES,
            seed: 0,
            paired: false,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Plan(m.to_string()));
        if self.ebno_points.is_empty() {
            return bad("no Eb/N0 points");
        }
        if self.ebno_points.iter().any(|v| !v.is_finite()) {
            return bad("Eb/N0 points must be finite");
        }
        if self.min_frames == 0 {
            return bad("min_frames must be at least 1");
        }
        if self.max_frames < self.min_frames {
            return bad("max_frames must not be below min_frames");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        self.decoder.validate(&self.code)?;
        Ok(())
    }

    fn decoders(&self) -> Vec<DecoderConfig> {
        if self.paired {
            vec![self.decoder.with_srm(false), self.decoder.with_srm(true)]
        } else {
            vec![self.decoder]
        }
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub code: String,
    pub decoder: String,
    pub omega: usize,
    pub t_max: usize,
    pub srm: bool,
    pub ebno_db: f64,
    pub accumulator: StatsAccumulator,
    pub stats: ExecStats,
    /// The frame cap was hit before the error target.
    pub censored: bool,
}

/// Rows of one Eb/N0 point: one row, or baseline then SRM when paired.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub ebno_db: f64,
    pub rows: Vec<StatsRow>,
    /// Frames compared between the SRM and baseline decodes.
    pub paired_frames: u64,
}

impl PointResult {
    pub fn baseline(&self) -> &StatsRow {
        &self.rows[0]
    }

    pub fn srm(&self) -> Option<&StatsRow> {
        self.rows.iter().find(|r| r.srm)
    }
}

/// Everything that matters about a decode for comparing SRM on and off.
fn same_outcome(a: &FrameOutcome, b: &FrameOutcome) -> bool {
    a.success == b.success && a.t_req == b.t_req && a.u_hat == b.u_hat && a.payload == b.payload
}

#[derive(Debug, Clone, Copy)]
struct FrameSummary {
    cycles: [u64; 2],
    t_req: [usize; 2],
    restarts: [usize; 2],
    success: [bool; 2],
    payload_ok: [bool; 2],
    mismatch: bool,
}

/// Regenerates frame `index`: random payload, encoding, AWGN, channel LLRs.
pub fn generate_frame(
    spec: &CodeSpec,
    ebno_db: f64,
    seed: u64,
    index: u64,
) -> (Vec<u8>, Vec<f64>) {
    let mut rng = frame_rng(seed, index);
    let payload: Vec<u8> = (0..spec.k()).map(|_| u8::from(rng.random::<bool>())).collect();
    let u = assemble_input_vector(&payload, spec).expect("payload length matches the code");
    let x = polar_encode(u.bits()).expect("block length is a power of two");
    let sigma = noise_sigma(ebno_db, spec.rate());
    let y = transmit(&modulate_bpsk(&x), sigma, &mut rng);
    let llr = llr_from_channel(&y, sigma).expect("sigma is positive for finite Eb/N0");
    (payload, llr)
}

fn simulate_frame(
    decoders: &mut [FlipDecoder],
    ebno_db: f64,
    seed: u64,
    index: u64,
) -> Result<FrameSummary, DecodeError> {
    let (payload, llr) = generate_frame(decoders[0].spec(), ebno_db, seed, index);
    let mut s = FrameSummary {
        cycles: [0; 2],
        t_req: [0; 2],
        restarts: [0; 2],
        success: [false; 2],
        payload_ok: [false; 2],
        mismatch: false,
    };
    let mut first: Option<FrameOutcome> = None;
    for (slot, dec) in decoders.iter_mut().enumerate() {
        let out = dec.decode_frame(&llr)?;
        s.cycles[slot] = out.total_cycles;
        s.t_req[slot] = out.t_req;
        s.restarts[slot] = out.srm_restarts;
        s.success[slot] = out.success;
        s.payload_ok[slot] = out.payload == payload;
        match &first {
            None => first = Some(out),
            Some(f) => s.mismatch |= !same_outcome(f, &out),
        }
    }
    Ok(s)
}

/// Progress of a point, reported after every chunk and when restored from
/// a checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointState {
    pub frames: u64,
    pub errors: u64,
    pub done: bool,
    pub accumulators: Vec<StatsAccumulator>,
    pub mismatches: u64,
    pub first_mismatch: Option<u64>,
}

fn chunk_len(workers: usize) -> u64 {
    (256 * workers as u64).max(1024)
}

fn run_point_from(
    plan: &ExperimentPlan,
    ebno_db: f64,
    pool: &rayon::ThreadPool,
    mut state: PointState,
    on_chunk: &mut dyn FnMut(&PointState) -> Result<(), HarnessError>,
) -> Result<PointState, HarnessError> {
    let configs = plan.decoders();
    let prototypes: Vec<FlipDecoder> = configs
        .iter()
        .map(|&c| FlipDecoder::new(plan.code.clone(), c))
        .collect::<Result<_, _>>()?;
    let chunk = chunk_len(plan.workers);

    while !state.done {
        let start = state.frames;
        let end = (start + chunk).min(plan.max_frames);
        let summaries: Vec<FrameSummary> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map_init(
                    || prototypes.clone(),
                    |decs, idx| simulate_frame(decs, ebno_db, plan.seed, idx),
                )
                .collect::<Result<Vec<_>, _>>()
        })?;
        for (offset, s) in summaries.iter().enumerate() {
            for (slot, acc) in state.accumulators.iter_mut().enumerate() {
                acc.push(s.cycles[slot], s.t_req[slot], s.restarts[slot], s.success[slot], s.payload_ok[slot]);
            }
            if s.mismatch {
                state.mismatches += 1;
                state.first_mismatch.get_or_insert(start + offset as u64);
            }
            state.frames += 1;
            if !(s.success[0] && s.payload_ok[0]) {
                state.errors += 1;
            }
            if (state.frames >= plan.min_frames && state.errors >= plan.min_frame_errors)
                || state.frames >= plan.max_frames
            {
                state.done = true;
                break;
            }
        }
        on_chunk(&state)?;
    }
    Ok(state)
}

fn fresh_state(plan: &ExperimentPlan, l_sc: u64) -> PointState {
    PointState {
        frames: 0,
        errors: 0,
        done: false,
        accumulators: vec![StatsAccumulator::new(l_sc); if plan.paired { 2 } else { 1 }],
        mismatches: 0,
        first_mismatch: None,
    }
}

fn finish_point(plan: &ExperimentPlan, ebno_db: f64, state: PointState) -> Result<PointResult, HarnessError> {
    if state.mismatches > 0 {
        return Err(HarnessError::Conformance {
            code: plan.code.label(),
            decoder: plan.decoder.label(),
            ebno_db,
            count: state.mismatches,
            first_frame: state.first_mismatch.unwrap_or(0),
        });
    }
    let censored = state.errors < plan.min_frame_errors;
    let rows = plan
        .decoders()
        .iter()
        .zip(&state.accumulators)
        .map(|(cfg, acc)| StatsRow {
            code: plan.code.label(),
            decoder: cfg.label(),
            omega: cfg.omega,
            t_max: cfg.t_max,
            srm: cfg.srm_enabled,
            ebno_db,
            accumulator: acc.clone(),
            stats: acc.finalize(),
            censored,
        })
        .collect();
    Ok(PointResult {
        ebno_db,
        rows,
        paired_frames: if plan.paired { state.frames } else { 0 },
    })
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Plan(format!("cannot start {workers} workers: {e}")))
}

fn l_sc(plan: &ExperimentPlan) -> Result<u64, HarnessError> {
    Ok(FlipDecoder::new(plan.code.clone(), plan.decoder)?.full_pass_cycles())
}

/// Simulates one Eb/N0 point until both the frame and the error targets
/// are met, or the frame cap is hit.
pub fn run_point(plan: &ExperimentPlan, ebno_db: f64) -> Result<PointResult, HarnessError> {
    plan.validate()?;
    let pool = build_pool(plan.workers)?;
    let state = fresh_state(plan, l_sc(plan)?);
    let state = run_point_from(plan, ebno_db, &pool, state, &mut |_| Ok(()))?;
    finish_point(plan, ebno_db, state)
}

/// Decodes frames `0..count` of a point with the plan's decoder and returns
/// one record per frame.
pub fn record_frames(plan: &ExperimentPlan, ebno_db: f64, count: u64) -> Result<Vec<FrameRecord>, HarnessError> {
    plan.validate()?;
    let pool = build_pool(plan.workers)?;
    let proto = FlipDecoder::new(plan.code.clone(), plan.decoder)?;
    let records = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map_init(
                || proto.clone(),
                |dec, idx| {
                    let (_, llr) = generate_frame(dec.spec(), ebno_db, plan.seed, idx);
                    dec.decode_frame(&llr).map(|o| FrameRecord::new(idx, &o))
                },
            )
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(records)
}

/// Progress notification of [`run_sweep`].
#[derive(Debug, Clone, Copy)]
pub struct Progress<'a> {
    pub plan_index: usize,
    pub ebno_db: f64,
    pub state: &'a PointState,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Checkpoint {
    points: BTreeMap<String, PointState>,
}

fn checkpoint_key(plan: &ExperimentPlan, ebno_db: f64) -> String {
    format!(
        "{}|{}|T{}|srm={}|paired={}|seed={}|min={}/{}|max={}|{:?}",
        plan.code.label(),
        plan.decoder.label(),
        plan.decoder.t_max,
        plan.decoder.srm_enabled,
        plan.paired,
        plan.seed,
        plan.min_frames,
        plan.min_frame_errors,
        plan.max_frames,
        ebno_db
    )
}

fn load_checkpoint(path: &Path) -> Result<Checkpoint, HarnessError> {
    match fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| HarnessError::CheckpointFormat {
            path: path.to_path_buf(),
            message: e.to_string(),
        }),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Checkpoint::default()),
        Err(source) => Err(HarnessError::Checkpoint {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn save_checkpoint(path: &Path, ck: &Checkpoint) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Checkpoint {
        path: path.to_path_buf(),
        source,
    };
    let text = serde_json::to_string_pretty(ck).expect("checkpoint serializes");
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

/// Runs every plan at every one of its points. With a checkpoint path,
/// progress is saved after every chunk and finished or partial points are
/// picked up again on the next call.
pub fn run_sweep(
    plans: &[ExperimentPlan],
    checkpoint: Option<&Path>,
    progress: &mut dyn FnMut(Progress<'_>),
) -> Result<Vec<PointResult>, HarnessError> {
    for p in plans {
        p.validate()?;
    }
    let mut ck = match checkpoint {
        Some(path) => load_checkpoint(path)?,
        None => Checkpoint::default(),
    };
    let mut results = Vec::new();
    for (plan_index, plan) in plans.iter().enumerate() {
        let pool = build_pool(plan.workers)?;
        let l_sc = l_sc(plan)?;
        for &ebno_db in &plan.ebno_points {
            let key = checkpoint_key(plan, ebno_db);
            let state = ck
                .points
                .get(&key)
                .cloned()
                .unwrap_or_else(|| fresh_state(plan, l_sc));
            let state = if state.done {
                progress(Progress {
                    plan_index,
                    ebno_db,
                    state: &state,
                });
                state
            } else {
                run_point_from(plan, ebno_db, &pool, state, &mut |st| {
                    progress(Progress {
                        plan_index,
                        ebno_db,
                        state: st,
                    });
                    if let Some(path) = checkpoint {
                        ck.points.insert(key.clone(), st.clone());
                        save_checkpoint(path, &ck)?;
                    }
                    Ok(())
                })?
            };
            results.push(finish_point(plan, ebno_db, state)?);
        }
    }
    Ok(results)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    code: &'a str,
    decoder: &'a str,
    omega: usize,
    tmax: usize,
    srm: bool,
    ebno_db: f64,
    frames: u64,
    errors: u64,
    fer: f64,
    avg_exec: f64,
    avg_add_exec: Option<f64>,
    var_exec: Option<f64>,
    srm_restart_rate: f64,
}

/// Writes the results table with [`CSV_HEADER`].
pub fn write_rows_csv<W: Write>(out: W, rows: &[StatsRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            code: &r.code,
            decoder: &r.decoder,
            omega: r.omega,
            tmax: r.t_max,
            srm: r.srm,
            ebno_db: r.ebno_db,
            frames: r.stats.frames,
            errors: r.stats.errors,
            fer: r.stats.fer,
            avg_exec: r.stats.avg_exec,
            avg_add_exec: r.stats.avg_additional,
            var_exec: r.stats.variance,
            srm_restart_rate: r.stats.srm_restart_rate,
        })?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_plan(paired: bool) -> ExperimentPlan {
        let code = CodeSpec::gaussian_approx(128, 24, 16, 2.0).unwrap();
        let mut plan = ExperimentPlan::new(code, DecoderConfig::dscf(2, 20, true, 16), vec![1.0, 2.0]);
        plan.min_frames = 500;
        plan.min_frame_errors = 20;
        plan.max_frames = 3000;
        plan.seed = 99;
        plan.paired = paired;
        plan
    }

    #[test]
    fn error_free_regime_is_censored() {
        let code = CodeSpec::gaussian_approx(256, 32, 16, 2.0).unwrap();
        let mut plan = ExperimentPlan::new(code, DecoderConfig::scf(8, true, 64), vec![10.0]);
        plan.min_frames = 100;
        plan.max_frames = 100;
        let res = run_point(&plan, 10.0).unwrap();
        let row = res.baseline();
        assert!(row.censored);
        assert_eq!(row.stats.frames, 100);
        assert_eq!(row.stats.fer, 0.0);
        assert_eq!(row.stats.avg_exec, row.accumulator.l_sc as f64);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut plan = small_plan(true);
        let one = run_point(&plan, 1.0).unwrap();
        plan.workers = 4;
        let four = run_point(&plan, 1.0).unwrap();
        assert_eq!(one, four);
        assert!(one.baseline().stats.errors >= 20);
    }

    #[test]
    fn stopping_rule_is_conjunctive() {
        let plan = small_plan(false);
        let r = run_point(&plan, 1.0).unwrap();
        let st = r.baseline().stats;
        assert!(st.frames >= plan.min_frames && st.errors >= plan.min_frame_errors);
        // The point stops on the first frame meeting both targets.
        assert!(st.frames == plan.min_frames || st.errors == plan.min_frame_errors);
        assert!(!r.baseline().censored);
    }

    #[test]
    fn paired_rows_agree_on_errors() {
        let r = run_point(&small_plan(true), 2.0).unwrap();
        let (b, s) = (r.baseline(), r.srm().unwrap());
        assert!(!b.srm);
        assert_eq!(b.stats.errors, s.stats.errors);
        assert_eq!(b.stats.frames, s.stats.frames);
        assert_eq!(r.paired_frames, b.stats.frames);
        assert!(s.stats.avg_exec <= b.stats.avg_exec);
        assert_eq!(b.stats.srm_restart_rate, 0.0);
    }

    #[test]
    fn sweep_is_union_of_points_and_resumes() {
        let plan = small_plan(false);
        let dir = tempfile::tempdir().unwrap();
        let ck = dir.path().join("ck.json");
        let mut seen = 0;
        let swept = run_sweep(std::slice::from_ref(&plan), Some(&ck), &mut |_| seen += 1).unwrap();
        assert!(seen >= 2);
        let singles: Vec<PointResult> =
            plan.ebno_points.iter().map(|&e| run_point(&plan, e).unwrap()).collect();
        assert_eq!(swept, singles);
        // A second call finds both points complete.
        let again = run_sweep(std::slice::from_ref(&plan), Some(&ck), &mut |_| {}).unwrap();
        assert_eq!(again, swept);
    }

    #[test]
    fn partial_checkpoint_resumes_to_same_result() {
        let plan = small_plan(false);
        let dir = tempfile::tempdir().unwrap();
        let ck = dir.path().join("ck.json");
        let pool = build_pool(1).unwrap();
        let l = l_sc(&plan).unwrap();
        // Stop after 200 frames as if interrupted, short of the frame target.
        let mut capped = plan.clone();
        capped.min_frames = 200;
        capped.max_frames = 200;
        let mut partial = run_point_from(&capped, 1.0, &pool, fresh_state(&plan, l), &mut |_| Ok(())).unwrap();
        assert_eq!(partial.frames, 200);
        partial.done = false;
        let mut state = Checkpoint::default();
        state.points.insert(checkpoint_key(&plan, 1.0), partial);
        save_checkpoint(&ck, &state).unwrap();
        let mut p1 = plan.clone();
        p1.ebno_points = vec![1.0];
        let resumed = run_sweep(std::slice::from_ref(&p1), Some(&ck), &mut |_| {}).unwrap();
        assert_eq!(resumed[0], run_point(&plan, 1.0).unwrap());
    }

    #[test]
    fn plan_validation() {
        let mut plan = small_plan(false);
        plan.ebno_points.clear();
        assert!(matches!(plan.validate(), Err(HarnessError::Plan(_))));
        let mut plan = small_plan(false);
        plan.min_frames = 0;
        assert!(plan.validate().is_err());
        let mut plan = small_plan(false);
        plan.max_frames = 10;
        assert!(plan.validate().is_err());
        let mut plan = small_plan(false);
        plan.workers = 0;
        assert!(plan.validate().is_err());
        let mut plan = small_plan(false);
        plan.decoder.omega = 4;
        assert!(matches!(plan.validate(), Err(HarnessError::Decode(_))));
    }

    #[test]
    fn csv_layout() {
        let r = run_point(&small_plan(true), 2.0).unwrap();
        let mut buf = Vec::new();
        write_rows_csv(&mut buf, &r.rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("P128_24,dscf2,2,20,false,2.0,"));
        assert!(lines[2].starts_with("P128_24,dscf2,2,20,true,2.0,"));
        let mut empty = Vec::new();
        write_rows_csv(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim(), CSV_HEADER);
    }

    #[test]
    fn frames_are_regenerable() {
        let code = CodeSpec::gaussian_approx(64, 8, 16, 2.0).unwrap();
        assert_eq!(generate_frame(&code, 1.0, 3, 11), generate_frame(&code, 1.0, 3, 11));
        assert_ne!(generate_frame(&code, 1.0, 3, 11).1, generate_frame(&code, 1.0, 3, 12).1);
    }

    #[test]
    fn frame_records_agree_with_stats() {
        let mut plan = small_plan(false);
        plan.min_frames = 300;
        plan.min_frame_errors = 0;
        plan.max_frames = 300;
        plan.workers = 2;
        let recs = record_frames(&plan, 1.0, 300).unwrap();
        let row = run_point(&plan, 1.0).unwrap().rows.remove(0);
        assert_eq!(recs.iter().map(|r| u128::from(r.cycles)).sum::<u128>(), row.accumulator.sum_l);
        assert!(recs.iter().enumerate().all(|(i, r)| r.frame == i as u64));
    }
}
