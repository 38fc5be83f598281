//! Bit-flipping candidate lists for SCF and DSCF-ω.
//!
//! A candidate is an ascending set of information indices flipped together in
//! one additional trial. Lists hold untried candidates only, ordered by metric
//! and then by the lexicographically smaller index set.

use std::cmp::Ordering;
use std::io::{self, Write};

use arrayvec::ArrayVec;
use thiserror::Error;

/// Largest supported decoding order ω.
pub const MAX_OMEGA: usize = 3;

/// Decision-LLR magnitude at or below which the approximated penalty applies.
pub const APPROX_THRESHOLD: f64 = 5.0;

/// Per-index penalty of the approximated metric.
pub const APPROX_PENALTY: f64 = 1.5;

pub type FlipSet = ArrayVec<usize, MAX_OMEGA>;

#[derive(Debug, Error, PartialEq)]
pub enum FlipError {
    #[error("penalty constant c = {0} is outside (0, 1]")]
    BadPenaltyConstant(f64),
    #[error("index {0} is not an information index")]
    NotInformation(usize),
    #[error("flip set {0:?} is empty, unsorted or larger than the decoding order")]
    BadSet(Vec<usize>),
    #[error("candidate list violates its invariants: {0}")]
    Audit(String),
}

/// How the DSCF penalty term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyMode {
    /// `(1/c) Σ ln(1 + exp(-c |α|))`.
    Exact { c: f64 },
    /// Each log term replaced by 1.5 when `|α| <= 5.0`, else 0.
    Approx,
}

impl PenaltyMode {
    pub fn validate(self) -> Result<(), FlipError> {
        match self {
            PenaltyMode::Exact { c } if !(c > 0.0 && c <= 1.0) => {
                Err(FlipError::BadPenaltyConstant(c))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    fn term(self, llr: f64) -> f64 {
        match self {
            PenaltyMode::Exact { c } => (-c * llr.abs()).exp().ln_1p(),
            PenaltyMode::Approx => {
                if llr.abs() <= APPROX_THRESHOLD {
                    APPROX_PENALTY
                } else {
                    0.0
                }
            }
        }
    }

    #[inline]
    fn scale(self, sum: f64) -> f64 {
        match self {
            PenaltyMode::Exact { c } => sum / c,
            PenaltyMode::Approx => sum,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlipCandidate {
    pub indices: FlipSet,
    pub metric: f64,
    pub attempted: bool,
}

impl FlipCandidate {
    pub fn new(indices: FlipSet, metric: f64) -> Self {
        FlipCandidate {
            indices,
            metric,
            attempted: false,
        }
    }

    pub fn singleton(index: usize, metric: f64) -> Self {
        let mut indices = FlipSet::new();
        indices.push(index);
        Self::new(indices, metric)
    }

    /// First (smallest) index `i_1`.
    pub fn first(&self) -> usize {
        self.indices[0]
    }

    /// Last (largest) index `i_λ`.
    pub fn last(&self) -> usize {
        self.indices[self.indices.len() - 1]
    }

    /// Metric first, then the lexicographically smaller index set.
    pub fn priority_cmp(&self, other: &Self) -> Ordering {
        self.metric
            .total_cmp(&other.metric)
            .then_with(|| self.indices.as_slice().cmp(other.indices.as_slice()))
    }
}

/// Bounded, sorted list of untried candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipList {
    candidates: Vec<FlipCandidate>,
    capacity: usize,
    clamped: bool,
}

impl FlipList {
    pub fn with_capacity(capacity: usize) -> Self {
        FlipList {
            candidates: Vec::with_capacity(capacity),
            capacity,
            clamped: false,
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn candidates(&self) -> &[FlipCandidate] {
        &self.candidates
    }

    /// True when the builder was asked for more candidates than there are
    /// information indices.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    /// Inserts in sorted position. A candidate that would land past the end of
    /// a full list is discarded; otherwise the worst entry is dropped to make
    /// room. Returns whether the candidate was kept.
    pub fn insert(&mut self, candidate: FlipCandidate) -> bool {
        if self.capacity == 0 {
            return false;
        }
        let full = self.candidates.len() == self.capacity;
        if full
            && candidate.priority_cmp(self.candidates.last().expect("non-empty")) != Ordering::Less
        {
            return false;
        }
        let at = self
            .candidates
            .partition_point(|c| c.priority_cmp(&candidate) == Ordering::Less);
        if full {
            self.candidates.pop();
        }
        self.candidates.insert(at, candidate);
        true
    }

    /// Removes and returns the best untried candidate, marked as attempted.
    pub fn pop_next(&mut self) -> Option<FlipCandidate> {
        if self.candidates.is_empty() {
            return None;
        }
        let mut c = self.candidates.remove(0);
        c.attempted = true;
        Some(c)
    }

    /// Checks ordering, capacity, set shape and uniqueness.
    pub fn audit(&self, info_set: &[usize], omega: usize) -> Result<(), FlipError> {
        if self.candidates.len() > self.capacity {
            return Err(FlipError::Audit(format!(
                "{} candidates exceed capacity {}",
                self.candidates.len(),
                self.capacity
            )));
        }
        for w in self.candidates.windows(2) {
            if w[0].priority_cmp(&w[1]) != Ordering::Less {
                return Err(FlipError::Audit(format!(
                    "{:?} not before {:?}",
                    w[0].indices, w[1].indices
                )));
            }
        }
        let mut seen: Vec<&[usize]> = Vec::with_capacity(self.candidates.len());
        for c in &self.candidates {
            check_set(&c.indices, info_set, omega)?;
            if c.attempted {
                return Err(FlipError::Audit(format!("{:?} already attempted", c.indices)));
            }
            if c.metric.is_nan() || c.metric < 0.0 {
                return Err(FlipError::Audit(format!("bad metric {}", c.metric)));
            }
            seen.push(c.indices.as_slice());
        }
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(FlipError::Audit("duplicate index set".into()));
        }
        Ok(())
    }
}

fn check_set(indices: &[usize], info_set: &[usize], omega: usize) -> Result<(), FlipError> {
    if indices.is_empty() || indices.len() > omega || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FlipError::BadSet(indices.to_vec()));
    }
    for &j in indices {
        if info_set.binary_search(&j).is_err() {
            return Err(FlipError::NotInformation(j));
        }
    }
    Ok(())
}

/// SCF list: the `count` information indices with the smallest `|α_dec|`.
pub fn scf_build_candidates(alpha_dec: &[f64], info_set: &[usize], count: usize) -> FlipList {
    let take = count.min(info_set.len());
    let mut order: Vec<usize> = info_set.to_vec();
    order.sort_by(|&a, &b| alpha_dec[a].abs().total_cmp(&alpha_dec[b].abs()).then(a.cmp(&b)));
    let mut list = FlipList::with_capacity(count);
    list.clamped = count > info_set.len();
    list.candidates.extend(
        order[..take]
            .iter()
            .map(|&j| FlipCandidate::singleton(j, alpha_dec[j].abs())),
    );
    list
}

/// Running penalty sums over `A` in ascending order: entry `m` covers the
/// first `m + 1` information indices, before scaling by `1/c`.
pub fn penalty_prefix(alpha_dec: &[f64], info_set: &[usize], mode: PenaltyMode) -> Vec<f64> {
    let mut acc = 0.0;
    info_set
        .iter()
        .map(|&j| {
            acc += mode.term(alpha_dec[j]);
            acc
        })
        .collect()
}

fn penalty(alpha_dec: &[f64], info_set: &[usize], i_lambda: usize, mode: PenaltyMode) -> f64 {
    let mut acc = 0.0;
    for &j in info_set.iter().take_while(|&&j| j <= i_lambda) {
        acc += mode.term(alpha_dec[j]);
    }
    mode.scale(acc)
}

/// `(1/c) Σ_{j <= i_λ, j ∈ A} ln(1 + exp(-c |α_dec(j)|))`.
pub fn dscf_penalty_exact(
    alpha_dec: &[f64],
    info_set: &[usize],
    i_lambda: usize,
    c: f64,
) -> Result<f64, FlipError> {
    let mode = PenaltyMode::Exact { c };
    mode.validate()?;
    Ok(penalty(alpha_dec, info_set, i_lambda, mode))
}

/// `Σ_{j <= i_λ, j ∈ A} (1.5 if |α_dec(j)| <= 5.0 else 0)`.
pub fn dscf_penalty_approx(alpha_dec: &[f64], info_set: &[usize], i_lambda: usize) -> f64 {
    penalty(alpha_dec, info_set, i_lambda, PenaltyMode::Approx)
}

#[inline]
fn magnitude_sum(alpha_dec: &[f64], indices: &[usize]) -> f64 {
    indices.iter().map(|&j| alpha_dec[j].abs()).sum()
}

/// `Σ_{j ∈ ε} |α_dec(j)| + Π(ε)`.
pub fn dscf_metric(
    indices: &[usize],
    alpha_dec: &[f64],
    info_set: &[usize],
    mode: PenaltyMode,
) -> Result<f64, FlipError> {
    mode.validate()?;
    check_set(indices, info_set, MAX_OMEGA)?;
    let last = indices[indices.len() - 1];
    Ok(magnitude_sum(alpha_dec, indices) + penalty(alpha_dec, info_set, last, mode))
}

/// DSCF initial list: every information index as a singleton with the full
/// metric, keeping the best `count`.
pub fn dscf_build_candidates(
    alpha_dec: &[f64],
    info_set: &[usize],
    count: usize,
    mode: PenaltyMode,
) -> Result<FlipList, FlipError> {
    mode.validate()?;
    let prefix = penalty_prefix(alpha_dec, info_set, mode);
    let mut all: Vec<FlipCandidate> = info_set
        .iter()
        .zip(&prefix)
        .map(|(&j, &p)| FlipCandidate::singleton(j, alpha_dec[j].abs() + mode.scale(p)))
        .collect();
    all.sort_by(FlipCandidate::priority_cmp);
    all.truncate(count);
    let mut list = FlipList::with_capacity(count);
    list.clamped = count > info_set.len();
    list.candidates = all;
    Ok(list)
}

/// Grows a failed set by one information index beyond its last one, for
/// every such index, and offers each extension to the list. Metrics use the
/// decision LLRs of the trial in which `failed` was applied. Sets already at
/// size `omega` are not extended. Returns the number of extensions kept.
pub fn dscf_extend_candidates(
    list: &mut FlipList,
    failed: &FlipCandidate,
    alpha_dec: &[f64],
    info_set: &[usize],
    omega: usize,
    mode: PenaltyMode,
) -> Result<usize, FlipError> {
    if failed.indices.len() >= omega.min(MAX_OMEGA) {
        return Ok(0);
    }
    mode.validate()?;
    let prefix = penalty_prefix(alpha_dec, info_set, mode);
    let start = info_set.partition_point(|&j| j <= failed.last());
    let mut kept = 0;
    for (pos, &i) in info_set.iter().enumerate().skip(start) {
        let mut indices = failed.indices.clone();
        indices.push(i);
        let metric = magnitude_sum(alpha_dec, &indices) + mode.scale(prefix[pos]);
        if list.insert(FlipCandidate::new(indices, metric)) {
            kept += 1;
        }
    }
    Ok(kept)
}

/// One row of a candidate-evolution dump.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// Trial number, 2 for the first additional trial.
    pub trial: usize,
    pub indices: FlipSet,
    pub metric: f64,
    pub restarted: bool,
    pub cycles: u64,
}

/// Writes `trial,set,metric,restart,cycles`, with the set as
/// space-separated indices.
pub fn write_candidate_trace<W: Write>(mut out: W, frame: u64, rows: &[TrialRecord]) -> io::Result<()> {
    for r in rows {
        let set: Vec<String> = r.indices.iter().map(|j| j.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            frame,
            r.trial,
            set.join(" "),
            r.metric,
            r.restarted,
            r.cycles
        )?;
    }
    Ok(())
}

pub const CANDIDATE_TRACE_HEADER: &str = "frame,trial,set,metric,restart,cycles";

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> FlipSet {
        v.iter().copied().collect()
    }

    #[test]
    fn scf_examples() {
        let list = scf_build_candidates(&[9.0, -0.5, 2.0, -1.5], &[1, 2, 3], 2);
        let got: Vec<(Vec<usize>, f64)> = list
            .candidates()
            .iter()
            .map(|c| (c.indices.to_vec(), c.metric))
            .collect();
        assert_eq!(got, vec![(vec![1], 0.5), (vec![3], 1.5)]);
        assert!(scf_build_candidates(&[1.0, 2.0], &[0, 1], 0).is_empty());
        let clamped = scf_build_candidates(&[1.0, 2.0], &[0, 1], 5);
        assert!(clamped.clamped());
        assert_eq!(clamped.len(), 2);
    }

    #[test]
    fn scf_ties_prefer_lower_index() {
        let list = scf_build_candidates(&[1.0, -1.0, 1.0, 0.5], &[0, 1, 2, 3], 3);
        let order: Vec<usize> = list.candidates().iter().map(|c| c.first()).collect();
        assert_eq!(order, vec![3, 0, 1]);
    }

    #[test]
    fn exact_penalty_examples() {
        let p = dscf_penalty_exact(&[0.0, 8.0], &[0], 1, 1.0).unwrap();
        assert!((p - 2f64.ln()).abs() < 1e-15);
        let p = dscf_penalty_exact(&[1e6, -1e6], &[0, 1], 1, 1.0).unwrap();
        assert!(p < 1e-300);
        // Direct summation of 2 (ln(1+e^-0.5) + ln(1+e^-1) + ln(1+e^-1.5)).
        let p = dscf_penalty_exact(&[1.0, -2.0, 3.0], &[0, 1, 2], 2, 0.5).unwrap();
        let oracle = 2.0
            * ((1.0 + (-0.5f64).exp()).ln()
                + (1.0 + (-1.0f64).exp()).ln()
                + (1.0 + (-1.5f64).exp()).ln());
        assert!((p - oracle).abs() < 1e-14, "{p} vs {oracle}");
        assert!((p - 1.977_503_899_362_164).abs() < 1e-12);
        assert_eq!(
            dscf_penalty_exact(&[1.0], &[0], 0, 0.0),
            Err(FlipError::BadPenaltyConstant(0.0))
        );
        assert!(dscf_penalty_exact(&[1.0], &[0], 0, 1.5).is_err());
    }

    #[test]
    fn approx_penalty_examples() {
        assert_eq!(dscf_penalty_approx(&[6.0, -2.0, 4.0], &[0, 1, 2], 2), 3.0);
        assert_eq!(dscf_penalty_approx(&[6.0, -7.0, 5.5], &[0, 1, 2], 2), 0.0);
        assert_eq!(dscf_penalty_approx(&[-5.0], &[0], 0), 1.5);
        // Only indices up to i_λ count.
        assert_eq!(dscf_penalty_approx(&[1.0, 1.0, 1.0], &[0, 1, 2], 1), 3.0);
    }

    #[test]
    fn metric_examples() {
        let alpha = [9.0, 2.0, -8.0, 6.0];
        let info = [1, 2, 3];
        assert_eq!(dscf_metric(&[1], &alpha, &info, PenaltyMode::Approx).unwrap(), 3.5);
        let alpha = [9.0, 7.0, -8.0, 6.0];
        assert_eq!(dscf_metric(&[1], &alpha, &info, PenaltyMode::Approx).unwrap(), 7.0);
        assert_eq!(
            dscf_metric(&[0], &alpha, &info, PenaltyMode::Approx),
            Err(FlipError::NotInformation(0))
        );
        assert!(dscf_metric(&[3, 2], &alpha, &info, PenaltyMode::Approx).is_err());
    }

    #[test]
    fn metric_eight_element_exact() {
        let alpha = [0.3, -1.2, 2.5, -0.7, 4.0, 1.1, -3.3, 0.2];
        let info = [1, 2, 3, 5, 6, 7];
        let got = dscf_metric(&[2, 5], &alpha, &info, PenaltyMode::Exact { c: 1.0 }).unwrap();
        // |α2| + |α5| + Σ_{j ∈ {1,2,3,5}} ln(1 + e^-|αj|), summed directly.
        let oracle = 2.5
            + 1.1
            + [1.2f64, 2.5, 0.7, 1.1]
                .iter()
                .map(|a| (1.0 + (-a).exp()).ln())
                .sum::<f64>();
        assert!((got - oracle).abs() < 1e-13, "{got} vs {oracle}");
    }

    #[test]
    fn extension_respects_omega() {
        let alpha = [1.0, 2.0, 3.0, 4.0];
        let info = [0, 1, 2, 3];
        let mut list = dscf_build_candidates(&alpha, &info, 3, PenaltyMode::Approx).unwrap();
        let before = list.clone();
        let failed = list.pop_next().unwrap();
        let mut after_pop = list.clone();
        assert_eq!(
            dscf_extend_candidates(&mut after_pop, &failed, &alpha, &info, 1, PenaltyMode::Approx),
            Ok(0)
        );
        assert_eq!(after_pop, list);
        assert_eq!(before.len(), 3);
    }

    #[test]
    fn extension_discarded_when_worse_than_full_list() {
        let alpha = [0.1, 0.2, 0.3, 9.0, 9.5];
        let info = [0, 1, 2, 3, 4];
        let mut list = FlipList::with_capacity(2);
        list.insert(FlipCandidate::singleton(0, 0.1));
        list.insert(FlipCandidate::singleton(1, 0.2));
        let before = list.clone();
        let failed = FlipCandidate::singleton(2, 0.3);
        let kept =
            dscf_extend_candidates(&mut list, &failed, &alpha, &info, 2, PenaltyMode::Approx).unwrap();
        assert_eq!(kept, 0);
        assert_eq!(list, before);
    }

    #[test]
    fn extension_metrics_and_order() {
        let alpha = [0.5, -6.0, 1.0, -2.0, 7.0];
        let info = [0, 2, 3, 4];
        let mut list = FlipList::with_capacity(10);
        let failed = FlipCandidate::singleton(0, 0.0);
        dscf_extend_candidates(&mut list, &failed, &alpha, &info, 3, PenaltyMode::Approx).unwrap();
        let got: Vec<(Vec<usize>, f64)> =
            list.candidates().iter().map(|c| (c.indices.to_vec(), c.metric)).collect();
        // {0,2}: 0.5+1+3.0; {0,3}: 0.5+2+4.5; {0,4}: 0.5+7+4.5.
        assert_eq!(
            got,
            vec![(vec![0, 2], 4.5), (vec![0, 3], 7.0), (vec![0, 4], 12.0)]
        );
        list.audit(&info, 3).unwrap();
    }

    #[test]
    fn insert_ties_and_capacity() {
        let mut list = FlipList::with_capacity(2);
        assert!(list.insert(FlipCandidate::new(set(&[3, 4]), 1.0)));
        assert!(list.insert(FlipCandidate::new(set(&[2, 9]), 1.0)));
        // Same metric, lexicographically after both: rejected at capacity.
        assert!(!list.insert(FlipCandidate::new(set(&[5]), 1.0)));
        assert!(list.insert(FlipCandidate::new(set(&[1]), 1.0)));
        let order: Vec<Vec<usize>> = list.candidates().iter().map(|c| c.indices.to_vec()).collect();
        assert_eq!(order, vec![vec![1], vec![2, 9]]);
        let mut zero = FlipList::with_capacity(0);
        assert!(!zero.insert(FlipCandidate::singleton(1, 0.0)));
    }

    #[test]
    fn audit_catches_violations() {
        let info = [1, 2, 3];
        let mut list = FlipList::with_capacity(3);
        list.candidates.push(FlipCandidate::singleton(2, 2.0));
        list.candidates.push(FlipCandidate::singleton(1, 1.0));
        assert!(list.audit(&info, 1).is_err());
        let mut list = FlipList::with_capacity(3);
        list.candidates.push(FlipCandidate::singleton(0, 1.0));
        assert_eq!(list.audit(&info, 1), Err(FlipError::NotInformation(0)));
        let mut list = FlipList::with_capacity(3);
        list.candidates.push(FlipCandidate::new(set(&[1, 2]), 1.0));
        assert!(list.audit(&info, 1).is_err());
    }

    #[test]
    fn trace_rows() {
        let rows = [TrialRecord {
            trial: 2,
            indices: set(&[5, 9]),
            metric: 3.5,
            restarted: true,
            cycles: 1542,
        }];
        let mut out = Vec::new();
        write_candidate_trace(&mut out, 7, &rows).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "7,2,5 9,3.5,true,1542\n");
    }

    fn alpha_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-12.0f64..12.0, 64)
    }

    proptest! {
        #[test]
        fn scf_full_count_is_sorted_permutation(alpha in alpha_strategy()) {
            let info: Vec<usize> = (0..64).filter(|j| j % 3 != 0).collect();
            let list = scf_build_candidates(&alpha, &info, info.len());
            let mut got: Vec<usize> = list.candidates().iter().map(|c| c.first()).collect();
            // Full-sort oracle on (|α|, index) pairs.
            let mut pairs: Vec<(f64, usize)> = info.iter().map(|&j| (alpha[j].abs(), j)).collect();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let oracle: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            prop_assert_eq!(&got, &oracle);
            got.sort_unstable();
            prop_assert_eq!(got, info);
        }

        #[test]
        fn scf_lists_are_nested(alpha in alpha_strategy(), count in 0usize..40) {
            let info: Vec<usize> = (0..64).step_by(2).collect();
            let a = scf_build_candidates(&alpha, &info, count);
            let b = scf_build_candidates(&alpha, &info, count + 1);
            let n = a.len();
            prop_assert_eq!(a.candidates(), &b.candidates()[..n]);
        }

        #[test]
        fn penalty_never_decreases(alpha in alpha_strategy(), c in 0.01f64..=1.0) {
            let info: Vec<usize> = (0..64).collect();
            let mut prev = 0.0;
            for i in 0..64 {
                let p = dscf_penalty_exact(&alpha, &info, i, c).unwrap();
                prop_assert!(p >= prev);
                prev = p;
            }
        }

        #[test]
        fn lists_stay_sorted_and_bounded(alpha in alpha_strategy(), cap in 1usize..30, omega in 1usize..=3) {
            let info: Vec<usize> = (0..64).filter(|j| j % 4 != 1).collect();
            let mode = PenaltyMode::Approx;
            let mut list = dscf_build_candidates(&alpha, &info, cap, mode).unwrap();
            list.audit(&info, omega).unwrap();
            for round in 0..10 {
                let Some(failed) = list.pop_next() else { break };
                // Perturb the LLRs as a new trial would.
                let trial: Vec<f64> = alpha.iter().map(|a| a * (1.0 + round as f64 * 0.1)).collect();
                dscf_extend_candidates(&mut list, &failed, &trial, &info, omega, mode).unwrap();
                prop_assert!(list.audit(&info, omega).is_ok());
            }
        }

        #[test]
        fn approx_order_depends_on_magnitudes_only(alpha in alpha_strategy(), signs in proptest::collection::vec(proptest::bool::ANY, 64)) {
            let info: Vec<usize> = (0..64).collect();
            let flipped: Vec<f64> = alpha.iter().zip(&signs).map(|(a, &s)| if s { -a } else { *a }).collect();
            let a = dscf_build_candidates(&alpha, &info, 20, PenaltyMode::Approx).unwrap();
            let b = dscf_build_candidates(&flipped, &info, 20, PenaltyMode::Approx).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn dscf1_matches_scf_without_penalties() {
        // Every magnitude above the threshold: approx penalties vanish.
        let alpha: Vec<f64> = (0..32).map(|i| if i % 3 == 0 { 5.5 + i as f64 } else { -(6.0 + (i * 7 % 11) as f64) }).collect();
        let info: Vec<usize> = (0..32).filter(|i| i % 4 != 1).collect();
        for count in [0, 5, info.len()] {
            let scf = scf_build_candidates(&alpha, &info, count);
            let dscf = dscf_build_candidates(&alpha, &info, count, PenaltyMode::Approx).unwrap();
            assert_eq!(scf.candidates(), dscf.candidates());
        }
    }
}
