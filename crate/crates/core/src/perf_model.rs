//! Execution-time statistics and memory estimates.

use serde::{Deserialize, Serialize};

use crate::flip_decoder::FrameOutcome;

/// Streaming sufficient statistics of per-frame execution times.
///
/// All sums are kept as integers (cycle counts are integers), so merging
/// accumulators from any number of workers in any order is exact.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsAccumulator {
    /// Latency of one full SC pass.
    pub l_sc: u64,
    pub frames: u64,
    /// Frames that needed more than one trial.
    pub extra_frames: u64,
    pub errors: u64,
    /// Frames that passed the CRC with a wrong payload.
    pub undetected: u64,
    pub sum_l: u128,
    pub sum_l_sq: u128,
    /// `Σ (l - L_SC)` over frames with more than one trial.
    pub sum_additional: u128,
    pub additional_trials: u64,
    pub srm_restarts: u64,
}

/// Finalized execution-time characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecStats {
    pub frames: u64,
    pub errors: u64,
    pub undetected: u64,
    pub fer: f64,
    /// Average execution time.
    pub avg_exec: f64,
    /// Average additional execution time; absent when no frame needed an
    /// additional trial.
    pub avg_additional: Option<f64>,
    /// Execution-time variance (`S - 1` divisor); absent below two frames.
    pub variance: Option<f64>,
    /// Midpoint restarts per additional trial.
    pub srm_restart_rate: f64,
}

impl StatsAccumulator {
    pub fn new(l_sc: u64) -> Self {
        StatsAccumulator {
            l_sc,
            ..Default::default()
        }
    }

    /// Adds one frame. The frame is in error when decoding failed or the
    /// decoded payload differs from the transmitted one.
    pub fn accumulate(&mut self, outcome: &FrameOutcome, payload_matches: bool) {
        self.push(
            outcome.total_cycles,
            outcome.t_req,
            outcome.srm_restarts,
            outcome.success,
            payload_matches,
        );
    }

    /// Adds one frame from its raw figures.
    pub fn push(
        &mut self,
        cycles: u64,
        t_req: usize,
        srm_restarts: usize,
        success: bool,
        payload_matches: bool,
    ) {
        let l = u128::from(cycles);
        self.frames += 1;
        self.sum_l += l;
        self.sum_l_sq += l * l;
        if t_req > 1 {
            self.extra_frames += 1;
            self.sum_additional += l - u128::from(self.l_sc);
            self.additional_trials += t_req as u64 - 1;
        }
        self.srm_restarts += srm_restarts as u64;
        if !success || !payload_matches {
            self.errors += 1;
        }
        if success && !payload_matches {
            self.undetected += 1;
        }
    }

    pub fn merge(&mut self, other: &StatsAccumulator) {
        assert_eq!(self.l_sc, other.l_sc, "merging accumulators of different codes");
        self.frames += other.frames;
        self.extra_frames += other.extra_frames;
        self.errors += other.errors;
        self.undetected += other.undetected;
        self.sum_l += other.sum_l;
        self.sum_l_sq += other.sum_l_sq;
        self.sum_additional += other.sum_additional;
        self.additional_trials += other.additional_trials;
        self.srm_restarts += other.srm_restarts;
    }

    pub fn finalize(&self) -> ExecStats {
        let s = self.frames;
        let avg_exec = if s == 0 {
            0.0
        } else {
            self.sum_l as f64 / s as f64
        };
        let avg_additional =
            (self.extra_frames > 0).then(|| self.sum_additional as f64 / self.extra_frames as f64);
        let variance = (s >= 2).then(|| {
            // S Σl² - (Σl)² is exact in integers; only the division rounds.
            let num = u128::from(s) * self.sum_l_sq - self.sum_l * self.sum_l;
            num as f64 / (s as f64 * (s - 1) as f64)
        });
        ExecStats {
            frames: s,
            errors: self.errors,
            undetected: self.undetected,
            fer: if s == 0 { 0.0 } else { self.errors as f64 / s as f64 },
            avg_exec,
            avg_additional,
            variance,
            srm_restart_rate: if self.additional_trials == 0 {
                0.0
            } else {
                self.srm_restarts as f64 / self.additional_trials as f64
            },
        }
    }
}

/// Percentage reduction `100 (baseline - improved) / baseline`.
pub fn reduction_percent(baseline: f64, improved: f64) -> f64 {
    100.0 * (baseline - improved) / baseline
}

/// Reductions of average time, average additional time and variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecReduction {
    pub avg_exec: f64,
    pub avg_additional: Option<f64>,
    pub variance: Option<f64>,
}

pub fn exec_reduction(baseline: &ExecStats, improved: &ExecStats) -> ExecReduction {
    let pair = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) if a > 0.0 => Some(reduction_percent(a, b)),
        _ => None,
    };
    ExecReduction {
        avg_exec: reduction_percent(baseline.avg_exec, improved.avg_exec),
        avg_additional: pair(baseline.avg_additional, improved.avg_additional),
        variance: pair(baseline.variance, improved.variance),
    }
}

/// Quantization widths of the memory model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantization {
    pub q_ch: u64,
    pub q_int: u64,
    pub q_flip: u64,
}

impl Default for Quantization {
    fn default() -> Self {
        Quantization {
            q_ch: 6,
            q_int: 7,
            q_flip: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryProfile {
    pub quantization: Quantization,
    /// Labeled bit counts in a fixed order.
    pub components: Vec<(String, u64)>,
    pub total_bits: u64,
    /// Restart-state bits over the total without them, in percent. Present
    /// only when the restart memory is included.
    pub overhead_percent: Option<f64>,
}

impl MemoryProfile {
    pub fn component(&self, label: &str) -> Option<u64> {
        self.components.iter().find(|(l, _)| l == label).map(|&(_, b)| b)
    }
}

/// Bit count of the decoder memories:
/// `N Q_ch + (N-1) Q_int + (N-1) + N + (T_max-1) Q_flip + (T_max-1) ω n`,
/// plus `N/2 + N/2` restart bits when `srm` is set.
pub fn memory_footprint(
    block_len: u64,
    t_max: u64,
    omega: u64,
    quant: Quantization,
    srm: bool,
) -> MemoryProfile {
    assert!(block_len >= 2 && block_len.is_power_of_two() && t_max >= 1 && omega >= 1);
    let n = u64::from(block_len.trailing_zeros());
    let list = t_max - 1;
    let mut components = vec![
        ("alpha_ch".to_string(), block_len * quant.q_ch),
        ("alpha_int".to_string(), (block_len - 1) * quant.q_int),
        ("beta".to_string(), block_len - 1),
        ("u_hat".to_string(), block_len),
        ("m_flip".to_string(), list * quant.q_flip),
        ("b_flip".to_string(), list * omega * n),
    ];
    let base: u64 = components.iter().map(|(_, b)| b).sum();
    if srm {
        components.push(("beta_rest".to_string(), block_len / 2));
        components.push(("u_hat_rest".to_string(), block_len / 2));
    }
    let total_bits = components.iter().map(|(_, b)| b).sum();
    MemoryProfile {
        quantization: quant,
        components,
        total_bits,
        overhead_percent: srm.then(|| 100.0 * (total_bits - base) as f64 / base as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_pass(ls: &[u64], l_sc: u64, extra: &[bool]) -> (f64, Option<f64>, f64) {
        let s = ls.len() as f64;
        let mean = ls.iter().map(|&l| l as f64).sum::<f64>() / s;
        let var = ls.iter().map(|&l| (l as f64 - mean).powi(2)).sum::<f64>() / (s - 1.0);
        let add: Vec<f64> = ls
            .iter()
            .zip(extra)
            .filter(|(_, &e)| e)
            .map(|(&l, _)| (l - l_sc) as f64)
            .collect();
        let avg_add = (!add.is_empty()).then(|| add.iter().sum::<f64>() / add.len() as f64);
        (mean, avg_add, var)
    }

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }

    #[test]
    fn single_pass_frames() {
        let mut acc = StatsAccumulator::new(3093);
        for _ in 0..10 {
            acc.push(3093, 1, 0, true, true);
        }
        let st = acc.finalize();
        assert_eq!(st.avg_exec, 3093.0);
        assert_eq!(st.variance, Some(0.0));
        assert_eq!(st.avg_additional, None);
        assert_eq!(st.fer, 0.0);
    }

    #[test]
    fn two_frame_example() {
        let l = 1000u64;
        let mut acc = StatsAccumulator::new(l);
        acc.push(l, 1, 0, true, true);
        acc.push(3 * l, 3, 0, true, true);
        let st = acc.finalize();
        assert_eq!(st.avg_exec, 2.0 * l as f64);
        assert_eq!(st.variance, Some(2.0 * (l * l) as f64));
        assert_eq!(st.avg_additional, Some(2.0 * l as f64));
    }

    #[test]
    fn error_accounting() {
        let mut acc = StatsAccumulator::new(10);
        acc.push(10, 1, 0, true, true);
        acc.push(30, 3, 1, false, false);
        acc.push(20, 2, 1, true, false);
        let st = acc.finalize();
        assert_eq!(st.errors, 2);
        assert_eq!(st.undetected, 1);
        assert!((st.fer - 2.0 / 3.0).abs() < 1e-15);
        assert!((st.srm_restart_rate - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(StatsAccumulator::new(1).finalize().variance, None);
    }

    #[test]
    fn ten_thousand_synthetic_frames_match_two_pass() {
        let l_sc = 3093u64;
        let mut state = 0x1234_5678u64;
        let mut ls = Vec::new();
        let mut extra = Vec::new();
        let mut acc = StatsAccumulator::new(l_sc);
        for _ in 0..10_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let t = if (state >> 40) % 10 < 8 { 1 } else { 1 + (state >> 20) % 300 };
            let midpoint_trials = (state >> 8) % t;
            let l = l_sc + (t - 1 - midpoint_trials) * l_sc + midpoint_trials * 1542;
            acc.push(l, t as usize, midpoint_trials as usize, true, true);
            ls.push(l);
            extra.push(t > 1);
        }
        let st = acc.finalize();
        let (mean, add, var) = two_pass(&ls, l_sc, &extra);
        assert!(rel(st.avg_exec, mean) < 1e-9);
        assert!(rel(st.avg_additional.unwrap(), add.unwrap()) < 1e-9);
        assert!(rel(st.variance.unwrap(), var) < 1e-9);
    }

    #[test]
    fn table3_memory() {
        let q = Quantization::default();
        let cases = [
            (1024, 13, 1, 15556, 16580, 6.58),
            (1024, 8, 1, 15471, 16495, 6.62),
            (1024, 51, 2, 16702, 17726, 6.13),
            (1024, 301, 3, 26452, 27476, 3.87),
            (512, 13, 1, 7864, 8376, 6.51),
            (512, 8, 1, 7784, 8296, 6.58),
            (512, 51, 2, 8922, 9434, 5.74),
            (512, 301, 3, 17872, 18384, 2.86),
        ];
        for (n, t, w, plain, with, pct) in cases {
            assert_eq!(memory_footprint(n, t, w, q, false).total_bits, plain);
            let m = memory_footprint(n, t, w, q, true);
            assert_eq!(m.total_bits, with);
            assert_eq!(format!("{:.2}", m.overhead_percent.unwrap()), format!("{pct:.2}"));
            assert_eq!(m.component("beta_rest").unwrap() + m.component("u_hat_rest").unwrap(), n);
        }
    }

    #[test]
    fn custom_memory_config() {
        // 256*6 + 255*7 + 255 + 256 + 4*7 + 4*1*8.
        let m = memory_footprint(256, 5, 1, Quantization::default(), false);
        assert_eq!(m.total_bits, 1536 + 1785 + 255 + 256 + 28 + 32);
        assert_eq!(m.overhead_percent, None);
    }

    #[test]
    fn reductions() {
        assert_eq!(reduction_percent(200.0, 150.0), 25.0);
        let a = ExecStats {
            frames: 10,
            errors: 0,
            undetected: 0,
            fer: 0.0,
            avg_exec: 100.0,
            avg_additional: None,
            variance: Some(50.0),
            srm_restart_rate: 0.0,
        };
        let b = ExecStats { avg_exec: 90.0, variance: Some(25.0), ..a };
        let r = exec_reduction(&a, &b);
        assert_eq!(r.avg_exec, 10.0);
        assert_eq!(r.avg_additional, None);
        assert_eq!(r.variance, Some(50.0));
    }

    proptest! {
        #[test]
        fn merge_equals_single_stream(
            frames in proptest::collection::vec((1u64..400, 0u64..100, proptest::bool::ANY), 2..300),
            split in 1usize..8,
        ) {
            let l_sc = 500;
            let mut whole = StatsAccumulator::new(l_sc);
            let mut parts = vec![StatsAccumulator::new(l_sc); split];
            for (i, &(t, r, ok)) in frames.iter().enumerate() {
                let restarts = (r % t) as usize;
                let l = l_sc * t - 100 * restarts as u64;
                whole.push(l, t as usize, restarts, ok, ok);
                parts[i % split].push(l, t as usize, restarts, ok, ok);
            }
            // Merge in reverse to exercise order independence.
            let mut merged = StatsAccumulator::new(l_sc);
            for p in parts.iter().rev() {
                merged.merge(p);
            }
            prop_assert_eq!(&merged, &whole);
            let (a, b) = (merged.finalize(), whole.finalize());
            prop_assert!(rel(a.variance.unwrap(), b.variance.unwrap()) < 1e-9);
        }
    }
}
