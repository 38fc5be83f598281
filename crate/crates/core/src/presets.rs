//! Reference codes, decoders and published figures used by the reproduction
//! scenarios.

use crate::codes::{CodeError, CodeSpec};
use crate::flip_decoder::DecoderConfig;

pub const PE_COUNT: usize = 64;
pub const CRC_BITS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodePreset {
    pub label: &'static str,
    pub block_len: usize,
    pub k: usize,
    pub design_ebno_db: f64,
}

impl CodePreset {
    pub fn build(&self) -> Result<CodeSpec, CodeError> {
        CodeSpec::gaussian_approx(self.block_len, self.k, CRC_BITS, self.design_ebno_db)
    }
}

pub const P1024_128: CodePreset = CodePreset {
    label: "P1024_128",
    block_len: 1024,
    k: 128,
    design_ebno_db: 1.25,
};
pub const P1024_256: CodePreset = CodePreset {
    label: "P1024_256",
    block_len: 1024,
    k: 256,
    design_ebno_db: 1.25,
};
pub const P1024_512: CodePreset = CodePreset {
    label: "P1024_512",
    block_len: 1024,
    k: 512,
    design_ebno_db: 2.5,
};
pub const P512_64: CodePreset = CodePreset {
    label: "P512_64",
    block_len: 512,
    k: 64,
    design_ebno_db: 1.25,
};

pub const CODES: [CodePreset; 4] = [P1024_128, P1024_256, P1024_512, P512_64];

pub fn code_by_label(label: &str) -> Option<CodePreset> {
    CODES.iter().copied().find(|c| c.label.eq_ignore_ascii_case(label))
}

/// Decoder variant with the list size used throughout the reference runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderPreset {
    pub label: &'static str,
    pub omega: usize,
    pub t_max: usize,
}

impl DecoderPreset {
    pub fn config(&self, srm: bool) -> DecoderConfig {
        if self.label == "scf" {
            DecoderConfig::scf(self.t_max, srm, PE_COUNT)
        } else {
            DecoderConfig::dscf(self.omega, self.t_max, srm, PE_COUNT)
        }
    }
}

pub const SCF: DecoderPreset = DecoderPreset {
    label: "scf",
    omega: 1,
    t_max: 13,
};
pub const DSCF1: DecoderPreset = DecoderPreset {
    label: "dscf1",
    omega: 1,
    t_max: 8,
};
pub const DSCF2: DecoderPreset = DecoderPreset {
    label: "dscf2",
    omega: 2,
    t_max: 51,
};
pub const DSCF3: DecoderPreset = DecoderPreset {
    label: "dscf3",
    omega: 3,
    t_max: 301,
};

pub const DECODERS: [DecoderPreset; 4] = [SCF, DSCF1, DSCF2, DSCF3];

pub fn decoder_by_label(label: &str) -> Option<DecoderPreset> {
    DECODERS.iter().copied().find(|d| d.label.eq_ignore_ascii_case(label))
}

/// Published reductions of average time, average additional time and
/// variance, in percent, at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaReference {
    pub code: &'static str,
    pub decoder: &'static str,
    pub ebno_db: f64,
    pub avg_exec: f64,
    pub avg_additional: f64,
    pub variance: f64,
}

const fn d(
    code: &'static str,
    decoder: &'static str,
    ebno_db: f64,
    avg_exec: f64,
    avg_additional: f64,
    variance: f64,
) -> DeltaReference {
    DeltaReference {
        code,
        decoder,
        ebno_db,
        avg_exec,
        avg_additional,
        variance,
    }
}

/// Rate 1/8, 1/4 and 1/2 codes of length 1024.
pub const TABLE1: [DeltaReference; 12] = [
    d("P1024_128", "scf", 2.0, 11.17, 48.30, 73.50),
    d("P1024_128", "dscf1", 1.875, 7.57, 43.57, 67.28),
    d("P1024_128", "dscf2", 1.5, 22.73, 40.71, 63.26),
    d("P1024_128", "dscf3", 1.25, 31.70, 37.08, 57.28),
    d("P1024_256", "scf", 1.875, 9.00, 44.68, 69.15),
    d("P1024_256", "dscf1", 1.75, 5.01, 33.33, 50.87),
    d("P1024_256", "dscf2", 1.44, 14.74, 27.60, 41.74),
    d("P1024_256", "dscf3", 1.25, 19.09, 22.57, 34.78),
    d("P1024_512", "scf", 2.375, 6.54, 37.44, 59.71),
    d("P1024_512", "dscf1", 2.25, 2.95, 22.04, 32.35),
    d("P1024_512", "dscf2", 2.0, 6.96, 13.83, 19.00),
    d("P1024_512", "dscf3", 1.875, 7.33, 9.03, 12.20),
];

/// Rate 1/8 code of length 512.
pub const TABLE2: [DeltaReference; 4] = [
    d("P512_64", "scf", 2.625, 10.36, 47.49, 72.27),
    d("P512_64", "dscf1", 2.625, 6.03, 43.93, 67.94),
    d("P512_64", "dscf2", 2.0, 24.01, 40.52, 63.08),
    d("P512_64", "dscf3", 1.75, 32.33, 37.59, 58.67),
];

pub fn delta_reference(code: &str, decoder: &str) -> Option<DeltaReference> {
    TABLE1
        .iter()
        .chain(TABLE2.iter())
        .copied()
        .find(|r| r.code.eq_ignore_ascii_case(code) && r.decoder.eq_ignore_ascii_case(decoder))
}

/// Memory estimate published for one configuration, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryReference {
    pub block_len: u64,
    pub decoder: &'static str,
    pub t_max: u64,
    pub omega: u64,
    pub bits: u64,
    pub bits_srm: u64,
    pub overhead_percent: f64,
}

const fn m(
    block_len: u64,
    decoder: &'static str,
    t_max: u64,
    omega: u64,
    bits: u64,
    bits_srm: u64,
    overhead_percent: f64,
) -> MemoryReference {
    MemoryReference {
        block_len,
        decoder,
        t_max,
        omega,
        bits,
        bits_srm,
        overhead_percent,
    }
}

pub const TABLE3: [MemoryReference; 8] = [
    m(1024, "scf", 13, 1, 15556, 16580, 6.58),
    m(1024, "dscf1", 8, 1, 15471, 16495, 6.62),
    m(1024, "dscf2", 51, 2, 16702, 17726, 6.13),
    m(1024, "dscf3", 301, 3, 26452, 27476, 3.87),
    m(512, "scf", 13, 1, 7864, 8376, 6.51),
    m(512, "dscf1", 8, 1, 7784, 8296, 6.58),
    m(512, "dscf2", 51, 2, 8922, 9434, 5.74),
    m(512, "dscf3", 301, 3, 17872, 18384, 2.86),
];

/// Published FER curves of the length-1024 rate-1/8 code: `(Eb/N0, FER)`.
pub const FIG3_SCF: [(f64, f64); 10] = [
    (0.25, 0.53378),
    (0.5, 0.40108),
    (0.75, 0.27675),
    (1.0, 0.178),
    (1.25, 0.1027),
    (1.5, 0.05485),
    (1.75, 0.02692),
    (2.0, 0.01166),
    (2.25, 0.004823),
    (2.5, 0.001827),
];
pub const FIG3_DSCF1: [(f64, f64); 11] = [
    (0.25, 0.54405),
    (0.5, 0.39867),
    (0.75, 0.26845),
    (1.0, 0.16336),
    (1.25, 0.08787),
    (1.5, 0.04245),
    (1.75, 0.0191),
    (2.0, 0.007371),
    (2.25, 0.002819),
    (2.5, 0.001005),
    (2.75, 0.000302),
];
pub const FIG3_DSCF2: [(f64, f64); 9] = [
    (0.25, 0.38299),
    (0.5, 0.24646),
    (0.75, 0.14031),
    (1.0, 0.07065),
    (1.25, 0.03057),
    (1.5, 0.01162),
    (1.75, 0.004046),
    (2.0, 0.001174),
    (2.25, 0.000329),
];
pub const FIG3_DSCF3: [(f64, f64); 8] = [
    (0.25, 0.2606),
    (0.5, 0.14649),
    (0.75, 0.07261),
    (1.0, 0.03111),
    (1.25, 0.01172),
    (1.5, 0.003501),
    (1.75, 0.000986),
    (2.0, 0.000232),
];

pub fn fig3_reference(decoder: &str) -> Option<&'static [(f64, f64)]> {
    match decoder.to_ascii_lowercase().as_str() {
        "scf" => Some(&FIG3_SCF),
        "dscf1" => Some(&FIG3_DSCF1),
        "dscf2" => Some(&FIG3_DSCF2),
        "dscf3" => Some(&FIG3_DSCF3),
        _ => None,
    }
}
