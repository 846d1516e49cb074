//! Successive-cancellation decoders: SC, list decoding with the polarized
//! metric, fast list decoding over special nodes and the two metric-based
//! pruning variants, all instrumented with sort and node-visit counters.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::CodeSpec;
use crate::error::{Error, Result};
use crate::metric::PruneThresholds;

pub mod kernels;
mod list;
mod sc;
mod tree;

pub use list::Decoder;
pub use sc::sc_decode_reference;
pub use tree::{classify_segment, classify_tree, leaf_tree, DecodingTree, NodeClass, NodeKind};

/// Decoding algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Single-path successive cancellation.
    Sc,
    /// List decoding bit by bit.
    Scl,
    /// List decoding over the special-node frontier.
    Fscl,
    /// Fast list decoding that drops branches whose metric falls below a
    /// constant threshold.
    Pfscl,
    /// Bit-by-bit list decoding that drops paths whose bit metric falls below
    /// a per-bit varentropy margin.
    Vpscl,
}

impl Mode {
    /// True for the modes that walk the special-node frontier.
    pub fn is_fast(self) -> bool {
        matches!(self, Mode::Fscl | Mode::Pfscl)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sc => "sc",
            Mode::Scl => "scl",
            Mode::Fscl => "fscl",
            Mode::Pfscl => "pfscl",
            Mode::Vpscl => "vpscl",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sc" => Ok(Mode::Sc),
            "scl" => Ok(Mode::Scl),
            "fscl" => Ok(Mode::Fscl),
            "pfscl" => Ok(Mode::Pfscl),
            "vpscl" => Ok(Mode::Vpscl),
            _ => Err(Error::InvalidParameter(format!("unknown decoder mode `{s}`"))),
        }
    }
}

/// LLR arithmetic of the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    /// Exact check-node rule and exact metric.
    #[default]
    Exact,
    /// Min-sum check-node rule and max-log metric.
    MinSum,
}

/// Scale of the per-bit metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricForm {
    /// `1 - log2(1 + 2^(-z))`.
    #[default]
    Polarized,
    /// `-log2(1 + 2^(-z))`, the conventional list-decoding penalty.
    Penalty,
}

/// Decoder parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub list_size: usize,
    pub mode: Mode,
    pub arithmetic: Arithmetic,
    pub metric: MetricForm,
    /// Constant branch threshold of [`Mode::Pfscl`].
    pub prune_threshold: f64,
    /// Per-bit margins of [`Mode::Vpscl`].
    pub thresholds: Option<Arc<PruneThresholds>>,
    /// Whether [`Mode::Vpscl`] also tests the forced metric of frozen bits.
    pub prune_frozen: bool,
    /// Record the per-position metric increments of the returned path.
    pub record_increments: bool,
    /// Record the surviving path set after every decision.
    pub record_survivors: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            list_size: 1,
            mode: Mode::Sc,
            arithmetic: Arithmetic::Exact,
            metric: MetricForm::Polarized,
            prune_threshold: -10.0,
            thresholds: None,
            prune_frozen: false,
            record_increments: false,
            record_survivors: false,
        }
    }
}

impl DecoderConfig {
    pub fn new(mode: Mode, list_size: usize) -> Self {
        Self { mode, list_size, ..Self::default() }
    }

    pub fn with_prune_threshold(mut self, m_t: f64) -> Self {
        self.prune_threshold = m_t;
        self
    }

    pub fn with_thresholds(mut self, thresholds: PruneThresholds) -> Self {
        self.thresholds = Some(Arc::new(thresholds));
        self
    }

    pub fn with_arithmetic(mut self, arithmetic: Arithmetic) -> Self {
        self.arithmetic = arithmetic;
        self
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.list_size == 0 {
            return Err(Error::Config("list size must be at least 1".into()));
        }
        match self.mode {
            Mode::Pfscl if !self.prune_threshold.is_finite() => Err(Error::Config(
                "constant-threshold pruning needs a finite threshold".into(),
            )),
            Mode::Vpscl => match &self.thresholds {
                None => Err(Error::Config("varentropy pruning needs a threshold table".into())),
                Some(t) if t.margins.len() != len => Err(Error::LengthMismatch {
                    expected: len,
                    actual: t.margins.len(),
                }),
                Some(_) => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

/// Work counters of one decode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeCounters {
    /// Top-L selections among more than L candidates.
    pub sort_ops: u64,
    /// Decoding-tree nodes below the root that were entered (the root alone
    /// when it is a special node).
    pub node_visits: u64,
    /// Candidates discarded by threshold pruning.
    pub paths_pruned: u64,
}

impl std::ops::AddAssign for DecodeCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.sort_ops += rhs.sort_ops;
        self.node_visits += rhs.node_visits;
        self.paths_pruned += rhs.paths_pruned;
    }
}

/// Result of one decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    /// Data bits of the best path.
    pub data: Vec<u8>,
    /// Carrier bits of the best path.
    pub carrier: Vec<u8>,
    /// Cumulative metric of the best path.
    pub metric: f64,
    /// Final list metrics, best first.
    pub list_metrics: Vec<f64>,
    pub counters: DecodeCounters,
    /// Per-position metric increments of the best path, when recorded.
    pub increments: Option<Vec<f64>>,
    /// Sorted fingerprints of the surviving paths after each decision, when
    /// recorded.
    pub survivors: Option<Vec<Vec<u64>>>,
}

fn run(spec: &CodeSpec, config: DecoderConfig, llrs: &[f64]) -> Result<DecodeOutput> {
    Decoder::new(spec, config)?.decode(llrs)
}

/// Successive-cancellation decoding.
pub fn sc_decode(spec: &CodeSpec, llrs: &[f64]) -> Result<Vec<u8>> {
    Ok(run(spec, DecoderConfig::new(Mode::Sc, 1), llrs)?.data)
}

/// List decoding with list size `list_size`.
pub fn scl_decode(spec: &CodeSpec, llrs: &[f64], list_size: usize) -> Result<DecodeOutput> {
    run(spec, DecoderConfig::new(Mode::Scl, list_size), llrs)
}

/// Fast list decoding over the special-node frontier.
pub fn fscl_decode(spec: &CodeSpec, llrs: &[f64], list_size: usize) -> Result<DecodeOutput> {
    run(spec, DecoderConfig::new(Mode::Fscl, list_size), llrs)
}

/// Fast list decoding with constant-threshold pruning at `m_t`.
pub fn pfscl_decode(
    spec: &CodeSpec,
    llrs: &[f64],
    list_size: usize,
    m_t: f64,
) -> Result<DecodeOutput> {
    run(spec, DecoderConfig::new(Mode::Pfscl, list_size).with_prune_threshold(m_t), llrs)
}

/// List decoding with per-bit varentropy pruning.
pub fn vpscl_decode(
    spec: &CodeSpec,
    llrs: &[f64],
    list_size: usize,
    thresholds: PruneThresholds,
) -> Result<DecodeOutput> {
    run(spec, DecoderConfig::new(Mode::Vpscl, list_size).with_thresholds(thresholds), llrs)
}

/// Decodes with an arbitrary configuration and returns the data together with
/// the work counters.
pub fn decode_with_counters(
    config: &DecoderConfig,
    spec: &CodeSpec,
    llrs: &[f64],
) -> Result<(Vec<u8>, DecodeCounters)> {
    let out = run(spec, config.clone(), llrs)?;
    Ok((out.data, out.counters))
}
