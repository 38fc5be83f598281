//! Experiment configuration files.
//!
//! A config has a `[code]` table, a `[simulation]` table and one
//! `[[decoder]]` table per decoder variant. Overrides name a key alone
//! (`tmax=13`) or with its table (`decoder.tmax=13`); a bare `ebno_db` is the
//! simulation list. Decoder overrides apply to every variant.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use polar_srm::codes::{CodeSpec, Construction};
use polar_srm::flip_decoder::{Algorithm, DecoderConfig};
use polar_srm::flip_strategies::PenaltyMode;
use polar_srm::presets;
use polar_srm::sim_harness::{
    ExperimentPlan, DEFAULT_MAX_FRAMES, DEFAULT_MIN_FRAMES, DEFAULT_MIN_FRAME_ERRORS,
};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Code,
    Simulation,
    Decoder,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Section::Code => "code",
            Section::Simulation => "simulation",
            Section::Decoder => "decoder",
        }
    }
}

pub struct KeyInfo {
    pub section: Section,
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(section: Section, key: &'static str, default: &'static str, help: &'static str) -> KeyInfo {
    KeyInfo {
        section,
        key,
        default,
        help,
    }
}

pub const KEYS: &[KeyInfo] = &[
    key(Section::Code, "block_len", "1024", "code length N, a power of two"),
    key(Section::Code, "k", "128", "payload bits"),
    key(Section::Code, "crc_bits", "16", "CRC length, 0 or 16"),
    key(Section::Code, "construction", "\"ga\"", "ga, bhattacharyya or file"),
    key(Section::Code, "design_ebno_db", "1.25", "design Eb/N0 of the construction"),
    key(Section::Code, "frozen_file", "\"\"", "information set file for construction = \"file\""),
    key(Section::Simulation, "ebno_db", "[1.25]", "Eb/N0 points in dB"),
    key(Section::Simulation, "min_frames", "100000", "frames simulated at least per point"),
    key(Section::Simulation, "min_frame_errors", "1000", "frame errors collected at least per point"),
    key(Section::Simulation, "max_frames", "100000000", "frame cap per point"),
    key(Section::Simulation, "seed", "0", "base seed of the per-frame random streams"),
    key(Section::Simulation, "paired", "false", "decode each frame with SRM off and on and compare"),
    key(Section::Simulation, "workers", "0", "worker threads, 0 for the command-line default"),
    key(Section::Simulation, "pe_count", "64", "processing elements of the latency model"),
    key(Section::Simulation, "checkpoint", "\"\"", "checkpoint file for resumable sweeps"),
    key(Section::Decoder, "algorithm", "\"dscf\"", "sc, scf or dscf"),
    key(Section::Decoder, "omega", "1", "maximum bits flipped per trial"),
    key(Section::Decoder, "tmax", "1", "maximum trials including the first pass"),
    key(Section::Decoder, "srm", "true", "restart trials from the midpoint when possible"),
    key(Section::Decoder, "penalty", "\"approx\"", "approx or exact"),
    key(Section::Decoder, "c", "1.0", "scale of the exact penalty, in (0, 1]"),
    key(Section::Decoder, "ebno_db", "[]", "points for this variant, empty to use the simulation list"),
];

/// Help text listing every key with its default.
pub fn keys_help() -> String {
    let mut s = String::from("Config keys (table.key = default):\n");
    for k in KEYS {
        let _ = writeln!(s, "  {:<38} {}", format!("{}.{} = {}", k.section.name(), k.key, k.default), k.help);
    }
    s.push_str("\nDecoder keys go in one [[decoder]] table per variant. Any key can be\n");
    s.push_str("overridden with --override key=value or --override table.key=value.\n");
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodeSection {
    pub block_len: usize,
    pub k: usize,
    pub crc_bits: usize,
    pub construction: String,
    pub design_ebno_db: f64,
    pub frozen_file: String,
}

impl Default for CodeSection {
    fn default() -> Self {
        CodeSection {
            block_len: 1024,
            k: 128,
            crc_bits: 16,
            construction: "ga".into(),
            design_ebno_db: 1.25,
            frozen_file: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub ebno_db: Vec<f64>,
    pub min_frames: u64,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub paired: bool,
    pub workers: usize,
    pub pe_count: usize,
    pub checkpoint: String,
}

impl Default for SimulationSection {
    fn default() -> Self {
        SimulationSection {
            ebno_db: vec![1.25],
            min_frames: DEFAULT_MIN_FRAMES,
            min_frame_errors: DEFAULT_MIN_FRAME_ERRORS,
            max_frames: DEFAULT_MAX_FRAMES,
            seed: 0,
            paired: false,
            workers: 0,
            pe_count: presets::PE_COUNT,
            checkpoint: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderSection {
    pub algorithm: String,
    pub omega: usize,
    pub tmax: usize,
    pub srm: bool,
    pub penalty: String,
    pub c: f64,
    pub ebno_db: Vec<f64>,
}

impl Default for DecoderSection {
    fn default() -> Self {
        DecoderSection {
            algorithm: "dscf".into(),
            omega: 1,
            tmax: 1,
            srm: true,
            penalty: "approx".into(),
            c: 1.0,
            ebno_db: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub code: CodeSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub decoder: Vec<DecoderSection>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("bad override {0:?}: expected key=value")]
    OverrideSyntax(String),
    #[error("unknown config key {0:?} (see --help for the list)")]
    UnknownKey(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn find_key(name: &str) -> Result<&'static KeyInfo, ConfigError> {
    let (section, bare) = match name.split_once('.') {
        Some((s, k)) => (Some(s), k),
        None => (None, name),
    };
    KEYS.iter()
        .find(|k| k.key == bare && section.is_none_or(|s| s == k.section.name()))
        .ok_or_else(|| ConfigError::UnknownKey(name.into()))
}

fn parse_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(raw.to_string()),
    }
}

/// Applies `key=value` overrides to a parsed TOML document.
pub fn apply_overrides(doc: &mut Table, overrides: &[String]) -> Result<(), ConfigError> {
    for o in overrides {
        let (name, raw) = o
            .split_once('=')
            .ok_or_else(|| ConfigError::OverrideSyntax(o.clone()))?;
        let info = find_key(name.trim())?;
        let value = parse_value(raw.trim());
        match info.section {
            Section::Decoder => {
                let list = doc
                    .entry("decoder")
                    .or_insert_with(|| Value::Array(vec![Value::Table(Table::new())]));
                let Value::Array(items) = list else {
                    return Err(ConfigError::Invalid("decoder must be an array of tables".into()));
                };
                if items.is_empty() {
                    items.push(Value::Table(Table::new()));
                }
                for item in items.iter_mut() {
                    let Value::Table(t) = item else {
                        return Err(ConfigError::Invalid("decoder entries must be tables".into()));
                    };
                    t.insert(info.key.to_string(), value.clone());
                }
            }
            s => {
                let table = doc
                    .entry(s.name())
                    .or_insert_with(|| Value::Table(Table::new()));
                let Value::Table(t) = table else {
                    return Err(ConfigError::Invalid(format!("{} must be a table", s.name())));
                };
                t.insert(info.key.to_string(), value);
            }
        }
    }
    Ok(())
}

impl Config {
    pub fn from_toml(text: &str, path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut doc: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        apply_overrides(&mut doc, overrides)?;
        let cfg: Config = Value::Table(doc).try_into().map_err(|e: toml::de::Error| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        if cfg.decoder.is_empty() {
            return Err(ConfigError::Invalid("no [[decoder]] table".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn code_spec(&self, base_dir: &Path) -> Result<CodeSpec, ConfigError> {
        let c = &self.code;
        let rate = c.k as f64 / c.block_len as f64;
        let method = match c.construction.to_ascii_lowercase().as_str() {
            "ga" => Construction::GaussianApprox {
                design_ebno_db: c.design_ebno_db,
                rate,
            },
            "bhattacharyya" => Construction::bhattacharyya_awgn(c.design_ebno_db, rate),
            "file" => {
                if c.frozen_file.is_empty() {
                    return Err(ConfigError::Invalid("construction = \"file\" needs frozen_file".into()));
                }
                Construction::File(base_dir.join(&c.frozen_file))
            }
            other => {
                return Err(ConfigError::Invalid(format!(
                    "unknown construction {other:?} (ga, bhattacharyya, file)"
                )))
            }
        };
        CodeSpec::construct(c.block_len, c.k, c.crc_bits, c.design_ebno_db, &method)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn decoder_config(&self, d: &DecoderSection) -> Result<DecoderConfig, ConfigError> {
        let algorithm: Algorithm = d.algorithm.parse().map_err(ConfigError::Invalid)?;
        let penalty = match d.penalty.to_ascii_lowercase().as_str() {
            "approx" => PenaltyMode::Approx,
            "exact" => PenaltyMode::Exact { c: d.c },
            other => return Err(ConfigError::Invalid(format!("unknown penalty {other:?} (approx, exact)"))),
        };
        Ok(DecoderConfig {
            algorithm,
            omega: d.omega,
            t_max: d.tmax,
            srm_enabled: d.srm,
            penalty,
            pe_count: self.simulation.pe_count,
        })
    }

    /// One plan per decoder variant, validated.
    pub fn plans(&self, base_dir: &Path, default_workers: usize) -> Result<Vec<ExperimentPlan>, ConfigError> {
        let spec = self.code_spec(base_dir)?;
        let s = &self.simulation;
        self.decoder
            .iter()
            .map(|d| {
                let points = if d.ebno_db.is_empty() {
                    s.ebno_db.clone()
                } else {
                    d.ebno_db.clone()
                };
                let mut plan = ExperimentPlan::new(spec.clone(), self.decoder_config(d)?, points);
                plan.min_frames = s.min_frames;
                plan.min_frame_errors = s.min_frame_errors;
                plan.max_frames = s.max_frames;
                plan.seed = s.seed;
                plan.paired = s.paired;
                plan.workers = if s.workers == 0 { default_workers } else { s.workers };
                plan.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Ok(plan)
            })
            .collect()
    }

    pub fn checkpoint_path(&self, base_dir: &Path) -> Option<PathBuf> {
        (!self.simulation.checkpoint.is_empty()).then(|| base_dir.join(&self.simulation.checkpoint))
    }
}
