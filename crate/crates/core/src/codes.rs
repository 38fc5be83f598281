//! Polar code construction, CRC-16 and the polar transform.
//!
//! Bits are stored one per `u8` (0 or 1) throughout the crate. Indices are in
//! natural order: bit `j` of the input vector is decoded at leaf `j` of the SC
//! tree.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Generator polynomial z^16 + z^15 + z^2 + 1, top bit implicit.
pub const CRC16_POLY: u16 = 0x8005;

/// Width of the only CRC supported besides "none".
pub const CRC16_WIDTH: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum CodeError {
    #[error("block length {0} is not a power of two >= 2")]
    BadBlockLength(usize),
    #[error("information set size {k_total} out of range 1..={block_len}")]
    InfoSetSize { k_total: usize, block_len: usize },
    #[error("unsupported CRC width {0} (expected 0 or 16)")]
    CrcWidth(usize),
    #[error("information set is not strictly ascending or has an index >= {0}")]
    BadInfoSet(usize),
    #[error("payload has {got} bits, code expects {expected}")]
    PayloadLength { got: usize, expected: usize },
    #[error("malformed frozen-set file {path}: {reason}")]
    FrozenFile { path: PathBuf, reason: String },
}

/// How the information set is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    /// Gaussian-approximation density evolution on a BPSK/AWGN channel. The
    /// channel LLR mean is `2 / sigma^2` with `sigma^2 = 1 / (2 R Eb/N0)`.
    GaussianApprox { design_ebno_db: f64, rate: f64 },
    /// Bhattacharyya-parameter recursion from a channel parameter `z0`
    /// (the erasure probability of a BEC, or `exp(-R Eb/N0)` for BI-AWGN).
    Bhattacharyya { initial_z: f64 },
    /// Externally produced information set.
    File(PathBuf),
}

impl Construction {
    pub fn bhattacharyya_awgn(design_ebno_db: f64, rate: f64) -> Self {
        let ebno = 10f64.powf(design_ebno_db / 10.0);
        Construction::Bhattacharyya {
            initial_z: (-rate * ebno).exp(),
        }
    }
}

/// Parameters of a CRC-aided polar code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    block_len: usize,
    log2_len: u32,
    k: usize,
    crc_bits: usize,
    info_set: Vec<usize>,
    frozen: Vec<bool>,
    design_ebno_db: f64,
}

impl CodeSpec {
    /// Builds a code from an explicit information set of size `k + crc_bits`.
    pub fn new(
        block_len: usize,
        k: usize,
        crc_bits: usize,
        info_set: Vec<usize>,
        design_ebno_db: f64,
    ) -> Result<Self, CodeError> {
        let log2_len = check_block_len(block_len)?;
        if crc_bits != 0 && crc_bits != CRC16_WIDTH {
            return Err(CodeError::CrcWidth(crc_bits));
        }
        let k_total = k + crc_bits;
        if k == 0 || k_total > block_len || info_set.len() != k_total {
            return Err(CodeError::InfoSetSize {
                k_total: info_set.len(),
                block_len,
            });
        }
        if info_set.windows(2).any(|w| w[0] >= w[1])
            || info_set.last().is_some_and(|&j| j >= block_len)
        {
            return Err(CodeError::BadInfoSet(block_len));
        }
        let mut frozen = vec![true; block_len];
        for &j in &info_set {
            frozen[j] = false;
        }
        Ok(CodeSpec {
            block_len,
            log2_len,
            k,
            crc_bits,
            info_set,
            frozen,
            design_ebno_db,
        })
    }

    /// Builds a code whose information set comes from `method`.
    pub fn construct(
        block_len: usize,
        k: usize,
        crc_bits: usize,
        design_ebno_db: f64,
        method: &Construction,
    ) -> Result<Self, CodeError> {
        let info_set = construct_info_set(block_len, k + crc_bits, method)?;
        Self::new(block_len, k, crc_bits, info_set, design_ebno_db)
    }

    /// Gaussian-approximation construction at the payload rate `k / N`.
    pub fn gaussian_approx(
        block_len: usize,
        k: usize,
        crc_bits: usize,
        design_ebno_db: f64,
    ) -> Result<Self, CodeError> {
        let method = Construction::GaussianApprox {
            design_ebno_db,
            rate: k as f64 / block_len as f64,
        };
        Self::construct(block_len, k, crc_bits, design_ebno_db, &method)
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// `n = log2(N)`.
    pub fn log2_len(&self) -> u32 {
        self.log2_len
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn crc_bits(&self) -> usize {
        self.crc_bits
    }

    /// Information set `A` in ascending order; payload first, CRC last.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.block_len).filter(|&j| self.frozen[j]).collect()
    }

    pub fn is_frozen(&self, j: usize) -> bool {
        self.frozen[j]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn design_ebno_db(&self) -> f64 {
        self.design_ebno_db
    }

    /// Payload rate `k / N`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.block_len as f64
    }

    /// Last index of the left half of the tree, `N/2 - 1`.
    pub fn psi_rest(&self) -> usize {
        self.block_len / 2 - 1
    }

    /// Short label in the `P<N>_<k>` form used by result tables.
    pub fn label(&self) -> String {
        format!("P{}_{}", self.block_len, self.k)
    }
}

fn check_block_len(block_len: usize) -> Result<u32, CodeError> {
    if block_len < 2 || !block_len.is_power_of_two() {
        return Err(CodeError::BadBlockLength(block_len));
    }
    Ok(block_len.trailing_zeros())
}

/// Returns the `k_total` most reliable synthetic channels, ascending.
pub fn construct_info_set(
    block_len: usize,
    k_total: usize,
    method: &Construction,
) -> Result<Vec<usize>, CodeError> {
    check_block_len(block_len)?;
    if k_total == 0 || k_total > block_len {
        return Err(CodeError::InfoSetSize {
            k_total,
            block_len,
        });
    }
    let mut order: Vec<usize> = match method {
        Construction::GaussianApprox {
            design_ebno_db,
            rate,
        } => {
            let ebno = 10f64.powf(design_ebno_db / 10.0);
            let mean = 4.0 * rate * ebno;
            let means = ga_channel_means(block_len, mean);
            reliability_order(&means, |a, b| b.total_cmp(a))
        }
        Construction::Bhattacharyya { initial_z } => {
            let z = bhattacharyya_parameters(block_len, *initial_z);
            reliability_order(&z, |a, b| a.total_cmp(b))
        }
        Construction::File(path) => {
            let set = read_frozen_file(path)?;
            if set.block_len != block_len || set.info_set.len() != k_total {
                return Err(CodeError::FrozenFile {
                    path: path.clone(),
                    reason: format!(
                        "file describes N={} with |A|={}, expected N={} with |A|={}",
                        set.block_len,
                        set.info_set.len(),
                        block_len,
                        k_total
                    ),
                });
            }
            return Ok(set.info_set);
        }
    };
    order.truncate(k_total);
    order.sort_unstable();
    Ok(order)
}

/// Indices sorted from most to least reliable. Ties go to the larger index,
/// which keeps the order total and the construction nested in `k_total`.
fn reliability_order(values: &[f64], better: impl Fn(&f64, &f64) -> std::cmp::Ordering) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| better(&values[a], &values[b]).then(b.cmp(&a)));
    idx
}

/// Bhattacharyya parameters of the `N` synthetic channels. Child `2i` takes the
/// degraded transform `2z - z^2`, child `2i + 1` the upgraded `z^2`.
pub fn bhattacharyya_parameters(block_len: usize, initial_z: f64) -> Vec<f64> {
    let mut z = vec![initial_z];
    while z.len() < block_len {
        z = z
            .iter()
            .flat_map(|&p| [2.0 * p - p * p, p * p])
            .collect();
    }
    z
}

/// Mean LLR of each synthetic channel under the Gaussian approximation.
pub fn ga_channel_means(block_len: usize, channel_mean: f64) -> Vec<f64> {
    let mut m = vec![channel_mean];
    while m.len() < block_len {
        m = m
            .iter()
            .flat_map(|&x| [ga_check_mean(x), 2.0 * x])
            .collect();
    }
    m
}

// ln(phi(x)) with Chung's two-piece approximation of
// phi(x) = 1 - E[tanh(L/2)], L ~ N(x, 2x).
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

// Solves ln_phi(x) = target by bisection; ln_phi is decreasing.
fn ln_phi_inverse(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while ln_phi(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Check-node update `phi^-1(1 - (1 - phi(m))^2)`, evaluated in the log
/// domain so large means do not underflow.
fn ga_check_mean(m: f64) -> f64 {
    let lp = ln_phi(m);
    let phi = lp.exp();
    ln_phi_inverse(lp + (2.0 - phi).ln())
}

/// A parsed frozen-set file.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenSetFile {
    pub block_len: usize,
    pub info_set: Vec<usize>,
}

/// Parses the two-line frozen-set format: `N`, then ascending info indices.
pub fn parse_frozen_set(text: &str, path: &Path) -> Result<FrozenSetFile, CodeError> {
    let bad = |reason: String| CodeError::FrozenFile {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let block_len: usize = header
        .trim()
        .parse()
        .map_err(|_| bad(format!("bad block length {:?}", header.trim())))?;
    if check_block_len(block_len).is_err() {
        return Err(bad(format!("block length {block_len} is not a power of two")));
    }
    let body = lines.next().ok_or_else(|| bad("missing index line".into()))?;
    if lines.next().is_some() {
        return Err(bad("trailing content after index line".into()));
    }
    let info_set = body
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| bad(format!("bad index {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if info_set.is_empty() {
        return Err(bad("empty information set".into()));
    }
    if info_set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("indices are not strictly ascending".into()));
    }
    if info_set.last().is_some_and(|&j| j >= block_len) {
        return Err(bad(format!("index out of range for N={block_len}")));
    }
    Ok(FrozenSetFile {
        block_len,
        info_set,
    })
}

pub fn read_frozen_file(path: &Path) -> Result<FrozenSetFile, CodeError> {
    let text = std::fs::read_to_string(path).map_err(|e| CodeError::FrozenFile {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    parse_frozen_set(&text, path)
}

pub fn format_frozen_set(spec: &CodeSpec) -> String {
    let mut out = format!("{}\n", spec.block_len());
    for (i, j) in spec.info_set().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{j}");
    }
    out.push('\n');
    out
}

/// CRC-16 of a bit sequence: `M(z) z^16 mod g(z)`, MSB first, zero initial
/// register, no reflection, no final XOR.
pub fn crc16_compute(bits: &[u8]) -> u16 {
    let mut reg: u16 = 0;
    for &b in bits {
        let feedback = ((reg >> 15) as u8 ^ b) & 1;
        reg <<= 1;
        if feedback == 1 {
            reg ^= CRC16_POLY;
        }
    }
    reg
}

/// Checks `message || crc` where the last 16 bits are the CRC, MSB first.
pub fn crc16_check(bits_with_crc: &[u8]) -> bool {
    if bits_with_crc.len() < CRC16_WIDTH {
        return false;
    }
    let (msg, crc) = bits_with_crc.split_at(bits_with_crc.len() - CRC16_WIDTH);
    crc16_compute(msg) == bits_to_u16(crc)
}

pub fn u16_to_bits(value: u16) -> [u8; 16] {
    std::array::from_fn(|i| ((value >> (15 - i)) & 1) as u8)
}

fn bits_to_u16(bits: &[u8]) -> u16 {
    bits.iter().fold(0u16, |acc, &b| (acc << 1) | u16::from(b & 1))
}

/// Input vector `u`: payload and CRC on `A`, zeros on the frozen set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputVector(Vec<u8>);

impl InputVector {
    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }
}

pub fn assemble_input_vector(payload: &[u8], spec: &CodeSpec) -> Result<InputVector, CodeError> {
    if payload.len() != spec.k() {
        return Err(CodeError::PayloadLength {
            got: payload.len(),
            expected: spec.k(),
        });
    }
    let mut u = vec![0u8; spec.block_len()];
    let info = spec.info_set();
    for (&j, &b) in info.iter().zip(payload) {
        u[j] = b & 1;
    }
    if spec.crc_bits() == CRC16_WIDTH {
        let crc = u16_to_bits(crc16_compute(payload));
        for (&j, &b) in info[spec.k()..].iter().zip(crc.iter()) {
            u[j] = b;
        }
    }
    Ok(InputVector(u))
}

/// Reads `u` on `A` and returns `(payload, crc_ok)`. A code without CRC
/// always reports `crc_ok`.
pub fn extract_payload(u_hat: &[u8], spec: &CodeSpec) -> (Vec<u8>, bool) {
    let info_bits: Vec<u8> = spec.info_set().iter().map(|&j| u_hat[j]).collect();
    let ok = spec.crc_bits() == 0 || crc16_check(&info_bits);
    let mut payload = info_bits;
    payload.truncate(spec.k());
    (payload, ok)
}

/// `x = u G^{(x)n}` over GF(2), butterfly form, in place.
pub fn polar_transform_in_place(bits: &mut [u8]) -> Result<(), CodeError> {
    let len = bits.len();
    check_block_len(len)?;
    let mut half = 1;
    while half < len {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, &b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= b;
            }
        }
        half *= 2;
    }
    Ok(())
}

pub fn polar_encode(u: &[u8]) -> Result<Vec<u8>, CodeError> {
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x)?;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Plain Kronecker power of [[1,0],[1,1]] and a row-vector product.
    fn kron_matrix(n: usize) -> Vec<Vec<u8>> {
        let mut g = vec![vec![1u8]];
        while g.len() < n {
            let m = g.len();
            let mut next = vec![vec![0u8; 2 * m]; 2 * m];
            for r in 0..m {
                for c in 0..m {
                    next[r][c] = g[r][c];
                    next[r + m][c] = g[r][c];
                    next[r + m][c + m] = g[r][c];
                }
            }
            g = next;
        }
        g
    }

    fn matrix_encode(u: &[u8]) -> Vec<u8> {
        let g = kron_matrix(u.len());
        (0..u.len())
            .map(|c| (0..u.len()).fold(0u8, |acc, r| acc ^ (u[r] & g[r][c])))
            .collect()
    }

    // Bitwise long division of an arbitrary dividend by g(z).
    fn poly_remainder(dividend: &[u8]) -> u16 {
        let gen: u32 = 0x1_8005;
        let mut rem: u32 = 0;
        for &b in dividend {
            rem = (rem << 1) | u32::from(b);
            if rem & 0x1_0000 != 0 {
                rem ^= gen;
            }
        }
        rem as u16
    }

    fn splitmix_bits(seed: u64, count: usize) -> Vec<u8> {
        let mut state = seed;
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            for i in (0..64).rev() {
                if out.len() < count {
                    out.push(((z >> i) & 1) as u8);
                }
            }
        }
        out
    }

    #[test]
    fn fig1_info_set() {
        for method in [
            Construction::GaussianApprox { design_ebno_db: 1.25, rate: 0.5 },
            Construction::GaussianApprox { design_ebno_db: 5.0, rate: 0.25 },
            Construction::Bhattacharyya { initial_z: 0.5 },
        ] {
            assert_eq!(construct_info_set(8, 4, &method).unwrap(), vec![3, 5, 6, 7]);
        }
    }

    #[test]
    fn two_channel_code() {
        let m = Construction::GaussianApprox { design_ebno_db: 0.0, rate: 0.5 };
        assert_eq!(construct_info_set(2, 1, &m).unwrap(), vec![1]);
    }

    #[test]
    fn bhattacharyya_n4() {
        let z = bhattacharyya_parameters(4, 0.5);
        let expected = [0.9375, 0.5625, 0.4375, 0.0625];
        for (a, b) in z.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let m = Construction::Bhattacharyya { initial_z: 0.5 };
        assert_eq!(construct_info_set(4, 2, &m).unwrap(), vec![2, 3]);
    }

    #[test]
    fn ga_matches_exact_phi_at_small_mean() {
        // phi(0) = 1, so the check node of an erasure stays an erasure.
        assert_eq!(ga_check_mean(0.0), 0.0);
        // The check-node mean never exceeds the input and the bit node doubles.
        for m in [0.1, 1.0, 5.0, 20.0, 300.0, 4000.0] {
            let c = ga_check_mean(m);
            assert!(c > 0.0 && c < m, "m={m} c={c}");
        }
    }

    #[test]
    fn info_set_range_errors() {
        let m = Construction::Bhattacharyya { initial_z: 0.5 };
        assert!(matches!(construct_info_set(8, 0, &m), Err(CodeError::InfoSetSize { .. })));
        assert!(matches!(construct_info_set(8, 9, &m), Err(CodeError::InfoSetSize { .. })));
        assert!(matches!(construct_info_set(12, 4, &m), Err(CodeError::BadBlockLength(12))));
    }

    #[test]
    fn frozen_file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p8.txt");
        std::fs::write(&path, "8\n3 5 6 7\n").unwrap();
        let set = construct_info_set(8, 4, &Construction::File(path.clone())).unwrap();
        assert_eq!(set, vec![3, 5, 6, 7]);
        let spec = CodeSpec::new(8, 4, 0, set, 0.0).unwrap();
        assert_eq!(format_frozen_set(&spec), "8\n3 5 6 7\n");

        for bad in ["", "8\n", "7\n1 2\n", "8\n3 3 5\n", "8\n1 9\n", "8\n2 x\n", "8\n5 3\n"] {
            assert!(
                matches!(parse_frozen_set(bad, &path), Err(CodeError::FrozenFile { .. })),
                "{bad:?} accepted"
            );
        }
        // Size mismatch with the requested code.
        assert!(construct_info_set(8, 3, &Construction::File(path)).is_err());
    }

    #[test]
    fn crc_vectors() {
        assert_eq!(crc16_compute(&[]), 0);
        assert_eq!(crc16_compute(&[0; 77]), 0);
        // One division step: the dividend "1" followed by 16 zeros.
        assert_eq!(crc16_compute(&[1]), 0x8005);
        let mut dividend = vec![1u8];
        dividend.extend([0u8; 16]);
        assert_eq!(poly_remainder(&dividend), 0x8005);
    }

    #[test]
    fn crc_random_message_against_long_division() {
        let msg = splitmix_bits(42, 128);
        let mut dividend = msg.clone();
        dividend.extend([0u8; 16]);
        // Frozen from an offline integer long division of the same dividend.
        assert_eq!(poly_remainder(&dividend), 0xBD1A);
        assert_eq!(crc16_compute(&msg), 0xBD1A);
    }

    #[test]
    fn crc_detects_every_single_bit_error() {
        for len in [1usize, 8, 64, 128, 240] {
            let msg = splitmix_bits(len as u64, len);
            let mut word = msg.clone();
            word.extend(u16_to_bits(crc16_compute(&msg)));
            assert!(crc16_check(&word));
            for i in 0..word.len() {
                word[i] ^= 1;
                assert!(!crc16_check(&word), "len {len} flip {i}");
                word[i] ^= 1;
            }
        }
    }

    #[test]
    fn encoder_small_vectors() {
        assert_eq!(polar_encode(&[0, 1]).unwrap(), vec![1, 1]);
        assert_eq!(polar_encode(&[1, 0, 0, 1]).unwrap(), vec![0, 1, 1, 1]);
        assert_eq!(matrix_encode(&[1, 0, 0, 1]), vec![0, 1, 1, 1]);
        assert_eq!(polar_encode(&[0; 16]).unwrap(), vec![0; 16]);
        assert_eq!(polar_encode(&[1, 0, 1]), Err(CodeError::BadBlockLength(3)));
    }

    #[test]
    fn encoder_matches_matrix_exhaustively_up_to_8() {
        for n in [2usize, 4, 8] {
            for word in 0u32..(1 << n) {
                let u: Vec<u8> = (0..n).map(|i| ((word >> i) & 1) as u8).collect();
                assert_eq!(polar_encode(&u).unwrap(), matrix_encode(&u));
            }
        }
    }

    #[test]
    fn assemble_examples() {
        let spec = CodeSpec::new(2, 1, 0, vec![1], 0.0).unwrap();
        assert_eq!(assemble_input_vector(&[1], &spec).unwrap().bits(), &[0, 1]);

        let spec = CodeSpec::gaussian_approx(32, 4, 16, 1.0).unwrap();
        assert_eq!(assemble_input_vector(&[0; 4], &spec).unwrap().bits(), &[0u8; 32][..]);
        assert_eq!(
            assemble_input_vector(&[1, 0], &spec),
            Err(CodeError::PayloadLength { got: 2, expected: 4 })
        );
        let p = [1, 0, 1, 1];
        let u = assemble_input_vector(&p, &spec).unwrap();
        for j in spec.frozen_set() {
            assert_eq!(u.bits()[j], 0);
        }
        let (payload, ok) = extract_payload(u.bits(), &spec);
        assert!(ok);
        assert_eq!(payload, p);
    }

    #[test]
    fn code_spec_validation() {
        assert!(CodeSpec::new(8, 2, 0, vec![3, 5], 0.0).is_ok());
        assert_eq!(CodeSpec::new(8, 2, 8, vec![3, 5], 0.0), Err(CodeError::CrcWidth(8)));
        assert!(CodeSpec::new(8, 2, 0, vec![5, 3], 0.0).is_err());
        assert!(CodeSpec::new(8, 2, 0, vec![3, 8], 0.0).is_err());
        assert!(CodeSpec::new(8, 2, 0, vec![3], 0.0).is_err());
        let spec = CodeSpec::gaussian_approx(1024, 128, 16, 1.25).unwrap();
        assert_eq!(spec.info_set().len(), 144);
        assert_eq!(spec.frozen_set().len(), 1024 - 144);
        assert_eq!(spec.psi_rest(), 511);
        assert_eq!(spec.label(), "P1024_128");
    }

    proptest! {
        #[test]
        fn encoder_is_an_involution(bits in proptest::collection::vec(0u8..2, 1..=1024), n in 1u32..=10) {
            let len = 1usize << n;
            let u: Vec<u8> = bits.iter().cycle().take(len).copied().collect();
            let x = polar_encode(&u).unwrap();
            prop_assert_eq!(polar_encode(&x).unwrap(), u);
        }

        #[test]
        fn encoder_matches_matrix(bits in proptest::collection::vec(0u8..2, 16..=32)) {
            let len = if bits.len() >= 32 { 32 } else { 16 };
            let u = &bits[..len];
            prop_assert_eq!(polar_encode(u).unwrap(), matrix_encode(u));
        }

        #[test]
        fn crc_accepts_own_codewords(msg in proptest::collection::vec(0u8..2, 0..300)) {
            let mut word = msg.clone();
            word.extend(u16_to_bits(crc16_compute(&msg)));
            prop_assert!(crc16_check(&word));
        }

        #[test]
        fn construction_is_nested(k in 2usize..=256, db in -1.0f64..4.0, ga in proptest::bool::ANY) {
            let method = if ga {
                Construction::GaussianApprox { design_ebno_db: db, rate: 0.25 }
            } else {
                Construction::bhattacharyya_awgn(db, 0.25)
            };
            let big = construct_info_set(256, k, &method).unwrap();
            let small = construct_info_set(256, k - 1, &method).unwrap();
            prop_assert!(small.iter().all(|j| big.binary_search(j).is_ok()));
        }
    }
}
