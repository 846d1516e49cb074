//! The polarized per-bit metric, expected metric trees and profiles, and
//! the varentropy-based pruning thresholds.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::codes::CodeSpec;
use crate::decode::{
    classify_tree, Arithmetic, Decoder, DecoderConfig, Mode, NodeKind,
};
use crate::error::{Error, Result};
use crate::polarize::{BitChannelStats, StatsTree};
use crate::sim::{fmt_sig, trial_rng};

const LN_2: f64 = std::f64::consts::LN_2;

/// `1 - log2(1 + 2^(-z))` for `z = llr * (-1)^bit`, evaluated stably for any
/// `llr` including infinities.
#[inline]
pub fn bit_metric(llr: f64, bit: u8) -> f64 {
    let z = if bit == 0 { llr } else { -llr };
    if z >= 0.0 {
        if z == f64::INFINITY {
            1.0
        } else {
            1.0 - (-z * LN_2).exp().ln_1p() / LN_2
        }
    } else if z == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        1.0 + z - (z * LN_2).exp().ln_1p() / LN_2
    }
}

/// Conventional list-decoding penalty `-log2(1 + 2^(-z))`, equal to
/// `bit_metric - 1`.
#[inline]
pub fn penalty_metric(llr: f64, bit: u8) -> f64 {
    let z = if bit == 0 { llr } else { -llr };
    if z >= 0.0 {
        if z == f64::INFINITY {
            0.0
        } else {
            -(-z * LN_2).exp().ln_1p() / LN_2
        }
    } else if z == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        z - (z * LN_2).exp().ln_1p() / LN_2
    }
}

/// Max-log form of [`bit_metric`]: `min(1, 1 + z)`.
#[inline]
pub fn max_log_metric(llr: f64, bit: u8) -> f64 {
    let z = if bit == 0 { llr } else { -llr };
    (1.0 + z).min(1.0)
}

/// Expected metric and variance of one node of the decoding tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricNode {
    /// Heap number of the node (root = 1).
    pub node_id: usize,
    pub depth: usize,
    /// 1-based first bit of the segment.
    pub start: usize,
    /// 1-based last bit of the segment.
    pub end: usize,
    pub kind: NodeKind,
    /// Mutual information of the node channel.
    pub mean: f64,
    pub variance: f64,
}

/// The pruned decoding tree annotated with per-node metric statistics, in
/// depth-first order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTree {
    pub nodes: Vec<MetricNode>,
}

impl MetricTree {
    /// Frontier (special-node) entries in decoding order.
    pub fn leaves(&self) -> impl Iterator<Item = &MetricNode> {
        self.nodes.iter().filter(|n| n.kind != NodeKind::Internal)
    }

    pub fn node(&self, node_id: usize) -> Option<&MetricNode> {
        self.nodes.iter().find(|n| n.node_id == node_id)
    }

    /// Writes `node_id,depth,start,end,kind,mean,variance`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["node_id", "depth", "start", "end", "kind", "mean", "variance"])
            .map_err(|e| Error::csv(path, e))?;
        for n in &self.nodes {
            w.write_record([
                n.node_id.to_string(),
                n.depth.to_string(),
                n.start.to_string(),
                n.end.to_string(),
                n.kind.to_string(),
                fmt_sig(n.mean),
                fmt_sig(n.variance),
            ])
            .map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Annotates the fast-decoding tree of `spec` with the capacities and
/// variances of the corresponding synthesized channels.
pub fn expected_metric_tree(spec: &CodeSpec, stats: &StatsTree) -> Result<MetricTree> {
    if stats.depth() != spec.n() {
        return Err(Error::Config(format!(
            "statistics tree has depth {}, code needs depth {}",
            stats.depth(),
            spec.n()
        )));
    }
    let tree = classify_tree(spec.profile());
    let nodes = tree
        .nodes()
        .iter()
        .map(|c| {
            let s = stats.node(c.id);
            MetricNode {
                node_id: c.id,
                depth: c.depth,
                start: c.start + 1,
                end: c.start + c.len,
                kind: c.kind,
                mean: s.capacity,
                variance: s.variance,
            }
        })
        .collect();
    Ok(MetricTree { nodes })
}

/// Running sum of the expected per-bit metric over the frontier, one entry per
/// bit position (1-based).
pub fn cumulative_metric_profile(tree: &MetricTree) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    for leaf in tree.leaves() {
        for pos in leaf.start..=leaf.end {
            acc += leaf.mean;
            out.push((pos, acc));
        }
    }
    out
}

/// Per-position statistics of the metric increments along correctly decoded
/// paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleProfile {
    /// Mean of the running metric sum at each position.
    pub cumulative_mean: Vec<f64>,
    /// Mean of the per-position increment.
    pub increment_mean: Vec<f64>,
    /// Sample variance of the per-position increment.
    pub increment_variance: Vec<f64>,
    pub correct: u64,
    pub discarded: u64,
}

/// Mergeable per-position accumulator of count, sum and sum of squares.
#[derive(Debug, Clone, Default)]
struct ProfileAccumulator {
    count: u64,
    discarded: u64,
    cum_sum: Vec<f64>,
    inc_sum: Vec<f64>,
    inc_sq: Vec<f64>,
}

impl ProfileAccumulator {
    fn new(len: usize) -> Self {
        Self {
            count: 0,
            discarded: 0,
            cum_sum: vec![0.0; len],
            inc_sum: vec![0.0; len],
            inc_sq: vec![0.0; len],
        }
    }

    fn add(&mut self, increments: &[f64]) {
        let mut acc = 0.0;
        for (i, &x) in increments.iter().enumerate() {
            acc += x;
            self.cum_sum[i] += acc;
            self.inc_sum[i] += x;
            self.inc_sq[i] += x * x;
        }
        self.count += 1;
    }

    fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.discarded += other.discarded;
        for i in 0..self.cum_sum.len() {
            self.cum_sum[i] += other.cum_sum[i];
            self.inc_sum[i] += other.inc_sum[i];
            self.inc_sq[i] += other.inc_sq[i];
        }
        self
    }
}

/// Options for [`sample_metric_profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    pub trials: u64,
    pub seed: u64,
    /// Decode with the special-node frontier (`Fscl`) or bit by bit (`Sc`).
    pub mode: Mode,
    pub arithmetic: Arithmetic,
}

/// Monte-Carlo estimate of the metric profile of single-path decoding,
/// keeping only correctly decoded frames.
pub fn sample_metric_profile(
    spec: &CodeSpec,
    channel: &Channel,
    options: &SampleOptions,
) -> Result<SampleProfile> {
    let len = spec.len();
    let config = DecoderConfig {
        list_size: 1,
        mode: options.mode,
        arithmetic: options.arithmetic,
        record_increments: true,
        ..DecoderConfig::default()
    };
    let base = Decoder::new(spec, config.clone())?;
    let chunks: Vec<(u64, u64)> = chunk_ranges(options.trials, 256);
    let acc = chunks
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut decoder = base.clone();
            let mut acc = ProfileAccumulator::new(len);
            let mut llrs = vec![0.0; len];
            let mut data = vec![0u8; spec.k()];
            for trial in lo..hi {
                let mut rng = trial_rng(options.seed, 0, trial);
                data.iter_mut().for_each(|b| *b = rng.random_range(0..2));
                let cw = spec.encode(&data).expect("data length matches");
                channel.transmit(&cw, &mut rng, &mut llrs);
                let out = decoder.decode(&llrs).expect("frame length matches");
                if out.data == data {
                    acc.add(out.increments.as_deref().expect("increments recorded"));
                } else {
                    acc.discarded += 1;
                }
            }
            acc
        })
        .reduce(|| ProfileAccumulator::new(len), ProfileAccumulator::merge);
    if acc.count == 0 {
        return Err(Error::NoSamples);
    }
    let n = acc.count as f64;
    let increment_mean: Vec<f64> = acc.inc_sum.iter().map(|s| s / n).collect();
    let increment_variance = acc
        .inc_sq
        .iter()
        .zip(&increment_mean)
        .map(|(sq, m)| {
            if acc.count > 1 {
                ((sq - n * m * m) / (n - 1.0)).max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(SampleProfile {
        cumulative_mean: acc.cum_sum.iter().map(|s| s / n).collect(),
        increment_mean,
        increment_variance,
        correct: acc.count,
        discarded: acc.discarded,
    })
}

pub(crate) fn chunk_ranges(total: u64, chunk: u64) -> Vec<(u64, u64)> {
    (0..total.div_ceil(chunk))
        .map(|c| (c * chunk, ((c + 1) * chunk).min(total)))
        .collect()
}

/// Writes `position,expected_cum,sample_cum,sample_var`.
pub fn write_profile_csv(
    expected: &[(usize, f64)],
    sample: &SampleProfile,
    path: &Path,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["position", "expected_cum", "sample_cum", "sample_var"])
        .map_err(|e| Error::csv(path, e))?;
    for (i, &(pos, exp)) in expected.iter().enumerate() {
        w.write_record([
            pos.to_string(),
            fmt_sig(exp),
            fmt_sig(sample.cumulative_mean[i]),
            fmt_sig(sample.increment_variance[i]),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per-bit pruning margins `m_i = sqrt(V_i / P_th)`: a path is dropped when
/// its bit metric falls below `-m_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneThresholds {
    pub p_th: f64,
    pub margins: Vec<f64>,
}

impl PruneThresholds {
    pub fn margin(&self, index: usize) -> f64 {
        self.margins[index]
    }

    /// True when `metric` falls below `-m_i` at 0-based bit `index`.
    #[inline]
    pub fn prunes(&self, index: usize, metric: f64) -> bool {
        metric < -self.margins[index]
    }
}

pub fn vpscl_thresholds(stats: &[BitChannelStats], p_th: f64) -> Result<PruneThresholds> {
    if !(p_th > 0.0 && p_th < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "pruning probability must lie in (0, 1), got {p_th}"
        )));
    }
    Ok(PruneThresholds {
        p_th,
        margins: stats.iter().map(|s| (s.variance / p_th).sqrt()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Direct evaluation of the defining expression.
    fn naive_metric(llr: f64, bit: u8) -> f64 {
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        1.0 - (1.0 + 2f64.powf(-llr * sign)).log2()
    }

    #[test]
    fn metric_examples() {
        assert_eq!(bit_metric(0.0, 0), 0.0);
        assert_eq!(bit_metric(f64::INFINITY, 0), 1.0);
        assert_eq!(bit_metric(f64::NEG_INFINITY, 1), 1.0);
        assert_eq!(bit_metric(f64::INFINITY, 1), f64::NEG_INFINITY);
        assert_abs_diff_eq!(bit_metric(1.0, 0), 1.0 - 1.5f64.log2(), epsilon = 1e-15);
        assert_abs_diff_eq!(bit_metric(1.0, 0), 0.41504, epsilon = 1e-5);
        assert_abs_diff_eq!(bit_metric(-2000.0, 0), -1999.0, epsilon = 1e-9);
        assert_eq!(penalty_metric(f64::INFINITY, 0), 0.0);
        assert_eq!(max_log_metric(3.0, 0), 1.0);
        assert_eq!(max_log_metric(3.0, 1), -2.0);
    }

    #[test]
    fn threshold_examples() {
        let stats = [
            BitChannelStats { index: 1, capacity: 1.0, variance: 0.0 },
            BitChannelStats { index: 2, capacity: 0.5, variance: 0.25 },
        ];
        let t = vpscl_thresholds(&stats, 1e-6).unwrap();
        assert_eq!(t.margin(0), 0.0);
        assert_abs_diff_eq!(t.margin(1), 500.0, epsilon = 1e-9);
        assert!(t.prunes(0, -1e-9));
        assert!(!t.prunes(0, 0.0));
        assert!(vpscl_thresholds(&stats, 0.0).is_err());
        assert!(vpscl_thresholds(&stats, 1.0).is_err());
    }

    #[test]
    fn chunking_covers_range() {
        assert_eq!(chunk_ranges(0, 4), vec![]);
        assert_eq!(chunk_ranges(10, 4), vec![(0, 4), (4, 8), (8, 10)]);
    }

    proptest! {
        #[test]
        fn stable_form_matches_definition(llr in -60.0f64..60.0, bit in 0u8..2) {
            prop_assert!((bit_metric(llr, bit) - naive_metric(llr, bit)).abs() < 1e-12);
            prop_assert!((penalty_metric(llr, bit) - (bit_metric(llr, bit) - 1.0)).abs() < 1e-12);
            prop_assert!(bit_metric(llr, bit) <= 1.0);
        }

        #[test]
        fn hypothesis_gap_and_sum(llr in -1e4f64..1e4) {
            let a = bit_metric(llr, 0);
            let b = bit_metric(llr, 1);
            let hd_gap = if llr >= 0.0 { a - b } else { b - a };
            prop_assert!((hd_gap - llr.abs()).abs() <= 1e-9 * llr.abs().max(1.0));
            prop_assert!(a + b <= 1e-12);
            if llr.abs() < 50.0 {
                let exact = 2.0 - (2.0 + 2f64.powf(llr) + 2f64.powf(-llr)).log2();
                prop_assert!((a + b - exact).abs() < 1e-9);
            }
            prop_assert_eq!(a > b, llr > 0.0);
        }

        #[test]
        fn conditional_entropy_identity(llr in -80.0f64..80.0, bit in 0u8..2) {
            let z = if bit == 0 { llr } else { -llr };
            let h = (1.0 + 2f64.powf(-z)).log2();
            prop_assert!((bit_metric(llr, bit) - (1.0 - h)).abs() < 1e-12);
        }
    }
}
