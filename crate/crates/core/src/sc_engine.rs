//! Successive-cancellation decoding on a precomputed schedule.
//!
//! The depth-first traversal of the decoding tree is flattened once per code
//! into a list of [`Step`]s. A full pass executes the whole list; a restart
//! from the midpoint executes the suffix that begins with the root `g` stage,
//! after the left-half partial sums and bit estimates have been reloaded.
//!
//! Memory follows the semi-parallel layout: one region of `2^s` LLRs per layer
//! `s < n` (`N - 1` entries in total) for intermediate LLRs, and the same
//! layout for the partial sums of left children. Partial sums of right
//! children are kept at their natural leaf positions in a scratch vector.
//!
//! Every step carries its cost in clock cycles under `P` processing elements:
//! an `f` or `g` stage producing `2^(s-1)` LLRs takes `ceil(2^(s-1) / P)`, a
//! partial-sum combine takes one cycle when its output is consumed later, and
//! leaf decisions are free.

use std::io::{self, Write};

use thiserror::Error;

use crate::codes::CodeSpec;

#[derive(Debug, Error, PartialEq)]
pub enum ScError {
    #[error("channel LLR vector has length {got}, expected {expected}")]
    LlrLength { got: usize, expected: usize },
    #[error("flip index {0} is frozen or out of range")]
    FrozenFlip(usize),
    #[error("flip index {index} lies before the restart point {psi_rest}")]
    FlipBeforeRestart { index: usize, psi_rest: usize },
    #[error("midpoint start requested without a restart snapshot")]
    MissingSnapshot,
    #[error("restart snapshot has {got} entries, expected {expected}")]
    SnapshotSize { got: usize, expected: usize },
    #[error("processing-element count {0} is not a positive power of two")]
    BadPeCount(usize),
    #[error("closed-form latency needs powers of two with 4P <= N (N={block_len}, P={pe_count})")]
    ClosedFormDomain { block_len: usize, pe_count: usize },
    #[error("partial-sum halves differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}

/// `sign(a) sign(d) min(|a|, |d|)`.
#[inline]
pub fn f_func(a: f64, d: f64) -> f64 {
    let m = a.abs().min(d.abs());
    if (a < 0.0) != (d < 0.0) {
        -m
    } else {
        m
    }
}

/// `(1 - 2b) a + d`.
#[inline]
pub fn g_func(a: f64, d: f64, b: u8) -> f64 {
    if b & 1 == 0 {
        d + a
    } else {
        d - a
    }
}

/// `[beta_l ^ beta_r, beta_r]`.
pub fn combine_partial_sums(beta_l: &[u8], beta_r: &[u8]) -> Result<Vec<u8>, ScError> {
    if beta_l.len() != beta_r.len() {
        return Err(ScError::LengthMismatch {
            left: beta_l.len(),
            right: beta_r.len(),
        });
    }
    let mut out: Vec<u8> = beta_l.iter().zip(beta_r).map(|(l, r)| l ^ r).collect();
    out.extend_from_slice(beta_r);
    Ok(out)
}

/// Hard decision; an LLR of exactly zero decides 0.
#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

/// Closed-form latency of one full pass:
/// `2N + (N/P) log2(N / 4P) + (N - n - 1)`.
pub fn lsc_closed_form(block_len: usize, pe_count: usize) -> Result<u64, ScError> {
    let domain = ScError::ClosedFormDomain {
        block_len,
        pe_count,
    };
    if !block_len.is_power_of_two() || !pe_count.is_power_of_two() || 4 * pe_count > block_len {
        return Err(domain);
    }
    let n = block_len.trailing_zeros() as u64;
    let big_n = block_len as u64;
    let p = pe_count as u64;
    let log_term = (block_len / (4 * pe_count)).trailing_zeros() as u64;
    Ok(2 * big_n + (big_n / p) * log_term + (big_n - n - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    F,
    G,
    Leaf,
    Combine,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::F => "f",
            Stage::G => "g",
            Stage::Leaf => "leaf",
            Stage::Combine => "combine",
        }
    }
}

/// One operation of the flattened traversal, acting on the node at `layer`
/// whose first leaf is `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub stage: Stage,
    pub layer: u32,
    pub base: usize,
    pub cycles: u64,
}

/// Where a pass begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    Full,
    Midpoint,
}

#[derive(Debug, Clone)]
pub struct Schedule {
    log2_len: u32,
    pe_count: usize,
    steps: Vec<Step>,
    midpoint_start: usize,
    full_cycles: u64,
    midpoint_cycles: u64,
}

impl Schedule {
    pub fn new(block_len: usize, pe_count: usize) -> Result<Self, ScError> {
        if pe_count == 0 || !pe_count.is_power_of_two() {
            return Err(ScError::BadPeCount(pe_count));
        }
        assert!(block_len >= 2 && block_len.is_power_of_two());
        let log2_len = block_len.trailing_zeros();
        let mut steps = Vec::with_capacity(4 * block_len);
        push_node(&mut steps, log2_len, log2_len, 0, pe_count);
        let midpoint_start = steps
            .iter()
            .position(|s| s.stage == Stage::G && s.layer == log2_len)
            .expect("root g stage");
        let full_cycles = steps.iter().map(|s| s.cycles).sum();
        let midpoint_cycles = steps[midpoint_start..].iter().map(|s| s.cycles).sum();
        Ok(Schedule {
            log2_len,
            pe_count,
            steps,
            midpoint_start,
            full_cycles,
            midpoint_cycles,
        })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn pe_count(&self) -> usize {
        self.pe_count
    }

    /// Index of the root `g` stage, the first step of a midpoint restart.
    pub fn midpoint_start(&self) -> usize {
        self.midpoint_start
    }

    pub fn full_cycles(&self) -> u64 {
        self.full_cycles
    }

    pub fn midpoint_cycles(&self) -> u64 {
        self.midpoint_cycles
    }

    /// Heap-style id: root is 1, children of `v` are `2v` and `2v + 1`.
    pub fn node_id(&self, step: &Step) -> usize {
        (1usize << (self.log2_len - step.layer)) + (step.base >> step.layer)
    }

    /// Per-step dump: `step,node,layer,base,stage,cycles`.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "step,node,layer,base,stage,cycles")?;
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                i,
                self.node_id(s),
                s.layer,
                s.base,
                s.stage.as_str(),
                s.cycles
            )?;
        }
        Ok(())
    }
}

fn push_node(steps: &mut Vec<Step>, root: u32, layer: u32, base: usize, pe_count: usize) {
    if layer == 0 {
        steps.push(Step {
            stage: Stage::Leaf,
            layer,
            base,
            cycles: 0,
        });
        return;
    }
    let half = 1usize << (layer - 1);
    let llr_cycles = half.div_ceil(pe_count) as u64;
    steps.push(Step {
        stage: Stage::F,
        layer,
        base,
        cycles: llr_cycles,
    });
    push_node(steps, root, layer - 1, base, pe_count);
    steps.push(Step {
        stage: Stage::G,
        layer,
        base,
        cycles: llr_cycles,
    });
    push_node(steps, root, layer - 1, base + half, pe_count);
    if layer < root {
        // Nodes on the rightmost root-to-leaf path feed nothing.
        let consumed = base + (1usize << layer) != 1usize << root;
        steps.push(Step {
            stage: Stage::Combine,
            layer,
            base,
            cycles: u64::from(consumed),
        });
    }
}

/// Left-half state stored after the initial pass.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartSnapshot {
    /// Partial sums of the root's left child (`N/2` bits).
    pub beta_rest: Vec<u8>,
    /// Bit estimates `u_hat[0..N/2)`.
    pub u_hat_rest: Vec<u8>,
    /// Decision LLRs `alpha_dec[0..N/2)`. Not part of the hardware memory
    /// budget; kept so flip metrics computed after a restart see the same
    /// left-half values as after a full pass.
    pub alpha_dec_rest: Vec<f64>,
    /// `N/2 - 1`.
    pub psi_rest: usize,
}

impl RestartSnapshot {
    fn empty(half: usize) -> Self {
        RestartSnapshot {
            beta_rest: vec![0; half],
            u_hat_rest: vec![0; half],
            alpha_dec_rest: vec![0.0; half],
            psi_rest: half - 1,
        }
    }
}

/// Owned result of one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ScResult {
    pub u_hat: Vec<u8>,
    pub alpha_dec: Vec<f64>,
    pub cycles: u64,
    /// Left-half state, present after a full pass.
    pub snapshot: Option<RestartSnapshot>,
}

#[inline]
fn region(s: u32) -> usize {
    (1usize << s) - 1
}

/// SC decoder workspace bound to one code and one PE count.
#[derive(Debug, Clone)]
pub struct ScEngine {
    schedule: Schedule,
    frozen: Vec<bool>,
    block_len: usize,
    alpha_int: Vec<f64>,
    beta: Vec<u8>,
    beta_right: Vec<u8>,
    u_hat: Vec<u8>,
    alpha_dec: Vec<f64>,
    flip_mask: Vec<bool>,
    lhs: RestartSnapshot,
    lhs_valid: bool,
}

impl ScEngine {
    pub fn new(spec: &CodeSpec, pe_count: usize) -> Result<Self, ScError> {
        let block_len = spec.block_len();
        let schedule = Schedule::new(block_len, pe_count)?;
        Ok(ScEngine {
            schedule,
            frozen: spec.frozen_mask().to_vec(),
            block_len,
            alpha_int: vec![0.0; block_len - 1],
            beta: vec![0; block_len - 1],
            beta_right: vec![0; block_len],
            u_hat: vec![0; block_len],
            alpha_dec: vec![0.0; block_len],
            flip_mask: vec![false; block_len],
            lhs: RestartSnapshot::empty(block_len / 2),
            lhs_valid: false,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn u_hat(&self) -> &[u8] {
        &self.u_hat
    }

    pub fn alpha_dec(&self) -> &[f64] {
        &self.alpha_dec
    }

    /// Left-half state of the most recent full pass.
    pub fn lhs_snapshot(&self) -> Option<&RestartSnapshot> {
        self.lhs_valid.then_some(&self.lhs)
    }

    /// Runs one pass and returns its cycle count. Outputs stay in the
    /// workspace until the next call.
    pub fn run(
        &mut self,
        alpha_ch: &[f64],
        flips: &[usize],
        start: Start,
        snapshot: Option<&RestartSnapshot>,
    ) -> Result<u64, ScError> {
        let block_len = self.block_len;
        if alpha_ch.len() != block_len {
            return Err(ScError::LlrLength {
                got: alpha_ch.len(),
                expected: block_len,
            });
        }
        let half = block_len / 2;
        for &j in flips {
            if j >= block_len || self.frozen[j] {
                return Err(ScError::FrozenFlip(j));
            }
            if start == Start::Midpoint && j < half {
                return Err(ScError::FlipBeforeRestart {
                    index: j,
                    psi_rest: half - 1,
                });
            }
        }
        let first = match start {
            Start::Full => 0,
            Start::Midpoint => {
                let snap = snapshot.ok_or(ScError::MissingSnapshot)?;
                for got in [
                    snap.beta_rest.len(),
                    snap.u_hat_rest.len(),
                    snap.alpha_dec_rest.len(),
                ] {
                    if got != half {
                        return Err(ScError::SnapshotSize {
                            got,
                            expected: half,
                        });
                    }
                }
                let top = self.schedule.log2_len - 1;
                self.beta[region(top)..region(top) + half].copy_from_slice(&snap.beta_rest);
                self.u_hat[..half].copy_from_slice(&snap.u_hat_rest);
                self.alpha_dec[..half].copy_from_slice(&snap.alpha_dec_rest);
                self.schedule.midpoint_start
            }
        };

        for &j in flips {
            self.flip_mask[j] = true;
        }
        let cycles = self.execute(alpha_ch, first, start == Start::Full);
        for &j in flips {
            self.flip_mask[j] = false;
        }
        Ok(cycles)
    }

    fn execute(&mut self, alpha_ch: &[f64], first: usize, capture: bool) -> u64 {
        let root = self.schedule.log2_len;
        let midpoint = self.schedule.midpoint_start;
        let mut cycles = 0;
        for idx in first..self.schedule.steps.len() {
            if capture && idx == midpoint {
                self.capture_lhs();
            }
            let step = self.schedule.steps[idx];
            cycles += step.cycles;
            match step.stage {
                Stage::F | Stage::G => {
                    let layer = step.layer;
                    let half = 1usize << (layer - 1);
                    let out_at = region(layer - 1);
                    let (lo, hi) = self.alpha_int.split_at_mut(region(layer));
                    let input: &[f64] = if layer == root {
                        alpha_ch
                    } else {
                        &hi[..2 * half]
                    };
                    let (a, d) = input.split_at(half);
                    let out = &mut lo[out_at..out_at + half];
                    if step.stage == Stage::F {
                        for ((o, &x), &y) in out.iter_mut().zip(a).zip(d) {
                            *o = f_func(x, y);
                        }
                    } else {
                        let beta_l = &self.beta[out_at..out_at + half];
                        for (((o, &x), &y), &b) in out.iter_mut().zip(a).zip(d).zip(beta_l) {
                            *o = g_func(x, y, b);
                        }
                    }
                }
                Stage::Leaf => {
                    let j = step.base;
                    let llr = self.alpha_int[0];
                    self.alpha_dec[j] = llr;
                    let bit = if self.frozen[j] {
                        0
                    } else {
                        hard_decision(llr) ^ u8::from(self.flip_mask[j])
                    };
                    self.u_hat[j] = bit;
                    if j & 1 == 0 {
                        self.beta[0] = bit;
                    } else {
                        self.beta_right[j] = bit;
                    }
                }
                Stage::Combine => {
                    let layer = step.layer;
                    let half = 1usize << (layer - 1);
                    let base = step.base;
                    let l_at = region(layer - 1);
                    if (base >> layer) & 1 == 0 {
                        let (lo, hi) = self.beta.split_at_mut(region(layer));
                        let beta_l = &lo[l_at..l_at + half];
                        let beta_r = &self.beta_right[base + half..base + 2 * half];
                        let (first_half, second_half) = hi[..2 * half].split_at_mut(half);
                        for ((o, &l), &r) in first_half.iter_mut().zip(beta_l).zip(beta_r) {
                            *o = l ^ r;
                        }
                        second_half.copy_from_slice(beta_r);
                    } else {
                        let beta_l = &self.beta[l_at..l_at + half];
                        let (out, beta_r) =
                            self.beta_right[base..base + 2 * half].split_at_mut(half);
                        for ((o, &l), &r) in out.iter_mut().zip(beta_l).zip(beta_r.iter()) {
                            *o = l ^ r;
                        }
                    }
                }
            }
        }
        cycles
    }

    fn capture_lhs(&mut self) {
        let half = self.block_len / 2;
        let top = region(self.schedule.log2_len - 1);
        self.lhs.beta_rest.copy_from_slice(&self.beta[top..top + half]);
        self.lhs.u_hat_rest.copy_from_slice(&self.u_hat[..half]);
        self.lhs.alpha_dec_rest.copy_from_slice(&self.alpha_dec[..half]);
        self.lhs_valid = true;
    }
}

/// One-shot pass that allocates its own workspace.
pub fn sc_pass(
    alpha_ch: &[f64],
    spec: &CodeSpec,
    flips: &[usize],
    start: Start,
    snapshot: Option<&RestartSnapshot>,
    pe_count: usize,
) -> Result<ScResult, ScError> {
    let mut engine = ScEngine::new(spec, pe_count)?;
    let cycles = engine.run(alpha_ch, flips, start, snapshot)?;
    Ok(ScResult {
        u_hat: engine.u_hat.clone(),
        alpha_dec: engine.alpha_dec.clone(),
        cycles,
        snapshot: (start == Start::Full).then(|| engine.lhs.clone()),
    })
}
