//! SCF / DSCF-ω frame decoding with the simplified restart mechanism.
//!
//! After a failed initial pass the decoder keeps the left-half partial sums
//! and bit estimates. Any later trial whose flip set starts in the right half
//! reloads them and resumes at leaf `N/2` instead of starting over.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use thiserror::Error;

use crate::codes::{extract_payload, CodeSpec};
use crate::flip_strategies::{
    dscf_build_candidates, dscf_extend_candidates, scf_build_candidates, FlipError, FlipList,
    FlipSet, PenaltyMode, TrialRecord, MAX_OMEGA,
};
use crate::sc_engine::{RestartSnapshot, ScEngine, ScError, Start};

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("invalid decoder configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sc(#[from] ScError),
    #[error(transparent)]
    Flip(#[from] FlipError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Sc,
    Scf,
    Dscf,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Sc => "sc",
            Algorithm::Scf => "scf",
            Algorithm::Dscf => "dscf",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sc" => Ok(Algorithm::Sc),
            "scf" => Ok(Algorithm::Scf),
            "dscf" => Ok(Algorithm::Dscf),
            other => Err(format!("unknown algorithm {other:?} (sc, scf, dscf)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    /// Maximum flip-set size ω.
    pub omega: usize,
    /// Maximum number of trials, the initial pass included.
    pub t_max: usize,
    pub srm_enabled: bool,
    pub penalty: PenaltyMode,
    /// Processing elements of the latency model.
    pub pe_count: usize,
}

impl DecoderConfig {
    pub fn sc(pe_count: usize) -> Self {
        DecoderConfig {
            algorithm: Algorithm::Sc,
            omega: 1,
            t_max: 1,
            srm_enabled: false,
            penalty: PenaltyMode::Approx,
            pe_count,
        }
    }

    pub fn scf(t_max: usize, srm_enabled: bool, pe_count: usize) -> Self {
        DecoderConfig {
            algorithm: Algorithm::Scf,
            t_max,
            srm_enabled,
            ..Self::sc(pe_count)
        }
    }

    pub fn dscf(omega: usize, t_max: usize, srm_enabled: bool, pe_count: usize) -> Self {
        DecoderConfig {
            algorithm: Algorithm::Dscf,
            omega,
            t_max,
            srm_enabled,
            ..Self::sc(pe_count)
        }
    }

    pub fn with_srm(self, srm_enabled: bool) -> Self {
        DecoderConfig {
            srm_enabled,
            ..self
        }
    }

    pub fn validate(&self, spec: &CodeSpec) -> Result<(), DecodeError> {
        let bad = |m: String| Err(DecodeError::Config(m));
        if self.t_max == 0 {
            return bad("t_max must be at least 1".into());
        }
        if self.omega == 0 || self.omega > MAX_OMEGA {
            return bad(format!("omega must be in 1..={MAX_OMEGA}, got {}", self.omega));
        }
        if self.pe_count == 0 || !self.pe_count.is_power_of_two() {
            return bad(format!("PE count {} is not a power of two", self.pe_count));
        }
        let k_total = spec.info_set().len();
        match self.algorithm {
            Algorithm::Sc if self.t_max != 1 || self.omega != 1 => {
                return bad("SC decoding uses t_max = 1 and omega = 1".into());
            }
            Algorithm::Scf if self.omega != 1 => {
                return bad("SCF flips a single bit per trial (omega = 1)".into());
            }
            _ => {}
        }
        if self.omega == 1 && self.t_max > k_total + 1 {
            return bad(format!(
                "t_max = {} exceeds k + r + 1 = {} for single-bit flipping",
                self.t_max,
                k_total + 1
            ));
        }
        self.penalty.validate()?;
        Ok(())
    }

    /// Label such as `scf`, `dscf3` or `sc`.
    pub fn label(&self) -> String {
        match self.algorithm {
            Algorithm::Dscf => format!("dscf{}", self.omega),
            a => a.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub u_hat: Vec<u8>,
    pub payload: Vec<u8>,
    pub success: bool,
    /// Trials executed, the initial pass included.
    pub t_req: usize,
    pub total_cycles: u64,
    /// Trials that restarted from the midpoint.
    pub srm_restarts: usize,
    /// Whether restart state and a candidate list were set up, which happens
    /// only when the initial pass fails.
    pub flip_state_built: bool,
}

/// Reusable decoder for one code and configuration.
#[derive(Debug, Clone)]
pub struct FlipDecoder {
    spec: CodeSpec,
    config: DecoderConfig,
    engine: ScEngine,
}

impl FlipDecoder {
    pub fn new(spec: CodeSpec, config: DecoderConfig) -> Result<Self, DecodeError> {
        config.validate(&spec)?;
        let engine = ScEngine::new(&spec, config.pe_count)?;
        Ok(FlipDecoder {
            spec,
            config,
            engine,
        })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    /// Latency of one full pass.
    pub fn full_pass_cycles(&self) -> u64 {
        self.engine.schedule().full_cycles()
    }

    pub fn decode_frame(&mut self, alpha_ch: &[f64]) -> Result<FrameOutcome, DecodeError> {
        self.decode_inner(alpha_ch, None)
    }

    /// Same as [`decode_frame`](Self::decode_frame), also returning one record
    /// per trial (the initial pass has an empty set).
    pub fn decode_frame_traced(
        &mut self,
        alpha_ch: &[f64],
    ) -> Result<(FrameOutcome, Vec<TrialRecord>), DecodeError> {
        let mut rows = Vec::new();
        let outcome = self.decode_inner(alpha_ch, Some(&mut rows))?;
        Ok((outcome, rows))
    }

    fn decode_inner(
        &mut self,
        alpha_ch: &[f64],
        mut trace: Option<&mut Vec<TrialRecord>>,
    ) -> Result<FrameOutcome, DecodeError> {
        let cfg = self.config;
        let mut total_cycles = self.engine.run(alpha_ch, &[], Start::Full, None)?;
        if let Some(rows) = trace.as_deref_mut() {
            rows.push(TrialRecord {
                trial: 1,
                indices: FlipSet::new(),
                metric: 0.0,
                restarted: false,
                cycles: total_cycles,
            });
        }
        let (mut payload, mut success) = extract_payload(self.engine.u_hat(), &self.spec);
        let mut t_req = 1;
        let mut srm_restarts = 0;
        let mut flip_state_built = false;

        if !success && cfg.t_max > 1 && cfg.algorithm != Algorithm::Sc {
            flip_state_built = true;
            let snapshot: Option<RestartSnapshot> = if cfg.srm_enabled {
                self.engine.lhs_snapshot().cloned()
            } else {
                None
            };
            let mut list = self.initial_list()?;
            let psi_rest = self.spec.psi_rest();

            while t_req < cfg.t_max {
                let Some(candidate) = list.pop_next() else {
                    break;
                };
                t_req += 1;
                let restart = snapshot.is_some() && candidate.first() > psi_rest;
                let cycles = if restart {
                    srm_restarts += 1;
                    self.engine
                        .run(alpha_ch, &candidate.indices, Start::Midpoint, snapshot.as_ref())?
                } else {
                    self.engine.run(alpha_ch, &candidate.indices, Start::Full, None)?
                };
                total_cycles += cycles;
                if let Some(rows) = trace.as_deref_mut() {
                    rows.push(TrialRecord {
                        trial: t_req,
                        indices: candidate.indices.clone(),
                        metric: candidate.metric,
                        restarted: restart,
                        cycles,
                    });
                }
                (payload, success) = extract_payload(self.engine.u_hat(), &self.spec);
                if success {
                    break;
                }
                if cfg.algorithm == Algorithm::Dscf && candidate.indices.len() < cfg.omega {
                    dscf_extend_candidates(
                        &mut list,
                        &candidate,
                        self.engine.alpha_dec(),
                        self.spec.info_set(),
                        cfg.omega,
                        cfg.penalty,
                    )?;
                }
            }
        }

        Ok(FrameOutcome {
            u_hat: self.engine.u_hat().to_vec(),
            payload,
            success,
            t_req,
            total_cycles,
            srm_restarts,
            flip_state_built,
        })
    }

    fn initial_list(&self) -> Result<FlipList, DecodeError> {
        let count = self.config.t_max - 1;
        let alpha_dec = self.engine.alpha_dec();
        let info = self.spec.info_set();
        Ok(match self.config.algorithm {
            Algorithm::Dscf => dscf_build_candidates(alpha_dec, info, count, self.config.penalty)?,
            _ => scf_build_candidates(alpha_dec, info, count),
        })
    }
}

/// Per-frame line of a frame log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame: u64,
    pub success: bool,
    pub t_req: usize,
    pub cycles: u64,
    pub srm_restarts: usize,
}

impl FrameRecord {
    pub fn new(frame: u64, outcome: &FrameOutcome) -> Self {
        FrameRecord {
            frame,
            success: outcome.success,
            t_req: outcome.t_req,
            cycles: outcome.total_cycles,
            srm_restarts: outcome.srm_restarts,
        }
    }
}

pub fn write_frame_records_csv<W: Write>(out: W, records: &[FrameRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(["frame", "success", "t_req", "cycles", "srm_restarts"])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()
}

/// One JSON object per line.
pub fn write_frame_records_jsonl<W: Write>(mut out: W, records: &[FrameRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// One-shot decode that builds a fresh decoder.
pub fn decode_frame(
    alpha_ch: &[f64],
    spec: &CodeSpec,
    config: DecoderConfig,
) -> Result<FrameOutcome, DecodeError> {
    FlipDecoder::new(spec.clone(), config)?.decode_frame(alpha_ch)
}
