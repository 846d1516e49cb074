//! Channel polarization: exact BEC recursion, quantized discrete-channel
//! construction with degrading merges, and Gaussian-approximation reliability
//! construction.
//!
//! Bit-channels use natural index order: at depth `d`, node `j` is the
//! channel reached by the transform sequence given by the bits of `j`
//! (most significant first), where `0` selects the minus transform. Tree nodes
//! are numbered as a binary heap: the root is `1`, node `j` at depth `d` is
//! `2^d + j`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::channel::{AwgnChannel, BecChannel, BscChannel};
use crate::error::{Error, Result};

/// One conjugate pair of outputs of a symmetric binary-input channel.
///
/// The pair stands for two outputs `y` and `y'` with `W(y|0) = W(y'|1) = p0`
/// and `W(y|1) = W(y'|0) = p1`, normalized so that `p0 >= p1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputPair {
    pub p0: f64,
    pub p1: f64,
}

impl OutputPair {
    fn new(x: f64, y: f64) -> Self {
        if x >= y {
            Self { p0: x, p1: y }
        } else {
            Self { p0: y, p1: x }
        }
    }

    /// Likelihood ratio `p0 / p1`, infinite when `p1 == 0`.
    pub fn ratio(&self) -> f64 {
        if self.p1 == 0.0 {
            f64::INFINITY
        } else {
            self.p0 / self.p1
        }
    }

    fn mass(&self) -> f64 {
        self.p0 + self.p1
    }

    /// Contribution of this pair to the channel capacity.
    fn capacity(&self) -> f64 {
        let s = self.mass();
        if s == 0.0 {
            return 0.0;
        }
        xlog2(self.p0, 2.0 * self.p0 / s) + xlog2(self.p1, 2.0 * self.p1 / s)
    }
}

fn xlog2(x: f64, arg: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * arg.log2()
    }
}

/// Finite-output symmetric binary-input channel stored as conjugate output
/// pairs sorted by decreasing likelihood ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteChannel {
    pairs: Vec<OutputPair>,
}

const PROBABILITY_TOLERANCE: f64 = 1e-12;
const RATIO_MERGE_TOLERANCE: f64 = 1e-9;

impl DiscreteChannel {
    /// Builds a channel from a list of outputs `(W(y|0), W(y|1))`.
    ///
    /// Non-symmetric inputs are symmetrized: every output contributes a pair
    /// with half its mass, which preserves mutual information and metric
    /// variance under uniform input.
    pub fn from_outputs(outputs: &[(f64, f64)]) -> Result<Self> {
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        for &(p0, p1) in outputs {
            if !(p0 >= 0.0 && p1 >= 0.0 && p0.is_finite() && p1.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "transition probabilities must be finite and non-negative, got ({p0}, {p1})"
                )));
            }
            s0 += p0;
            s1 += p1;
        }
        if (s0 - 1.0).abs() > PROBABILITY_TOLERANCE || (s1 - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "transition probabilities must sum to 1, got {s0} and {s1}"
            )));
        }
        let pairs = outputs
            .iter()
            .map(|&(p0, p1)| OutputPair::new(0.5 * p0, 0.5 * p1))
            .collect();
        Ok(Self::from_pairs(pairs))
    }

    /// Builds a channel from conjugate pairs whose total mass is 1; sorts them
    /// and merges pairs with equal likelihood ratio.
    pub fn from_pairs(pairs: Vec<OutputPair>) -> Self {
        let mut ch = Self { pairs };
        ch.normalize();
        ch
    }

    pub fn bec(ch: &BecChannel) -> Self {
        let e = ch.epsilon();
        Self::from_pairs(vec![OutputPair::new(1.0 - e, 0.0), OutputPair::new(0.5 * e, 0.5 * e)])
    }

    pub fn bsc(ch: &BscChannel) -> Self {
        let d = ch.delta();
        Self::from_pairs(vec![OutputPair::new(1.0 - d, d)])
    }

    /// Conjugate pairs in decreasing likelihood-ratio order.
    pub fn pairs(&self) -> &[OutputPair] {
        &self.pairs
    }

    /// Full output list `(W(y|0), W(y|1))`, two entries per pair.
    pub fn outputs(&self) -> Vec<(f64, f64)> {
        self.pairs
            .iter()
            .flat_map(|p| [(p.p0, p.p1), (p.p1, p.p0)])
            .collect()
    }

    /// Number of channel outputs.
    pub fn output_count(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Symmetric capacity in bits.
    pub fn capacity(&self) -> f64 {
        pairs_capacity(&self.pairs)
    }

    /// Varentropy of `h(x|y) = -log2 p(x|y)` under uniform input, which equals
    /// the variance of the per-symbol metric.
    pub fn variance(&self) -> f64 {
        pairs_variance(&self.pairs)
    }

    /// Drops empty pairs, sorts by decreasing likelihood ratio and merges
    /// pairs whose ratios agree to within the merge tolerance.
    fn normalize(&mut self) {
        self.pairs.retain(|p| p.mass() > 0.0);
        self.pairs.sort_by(compare_ratio_desc);
        let mut merged: Vec<OutputPair> = Vec::with_capacity(self.pairs.len());
        for p in self.pairs.drain(..) {
            if let Some(last) = merged.last_mut() {
                let (ra, rb) = (last.ratio(), p.ratio());
                let same = (ra.is_infinite() && rb.is_infinite())
                    || (ra - rb).abs() < RATIO_MERGE_TOLERANCE;
                if same {
                    last.p0 += p.p0;
                    last.p1 += p.p1;
                    continue;
                }
            }
            merged.push(p);
        }
        self.pairs = merged;
    }
}

fn pairs_capacity(pairs: &[OutputPair]) -> f64 {
    pairs.iter().map(OutputPair::capacity).sum::<f64>().clamp(0.0, 1.0)
}

fn pairs_variance(pairs: &[OutputPair]) -> f64 {
    let mean = 1.0 - pairs_capacity(pairs);
    let mut acc = 0.0;
    for p in pairs {
        let s = p.mass();
        if s == 0.0 {
            continue;
        }
        for w in [p.p0, p.p1] {
            if w > 0.0 {
                let h = -(w / s).log2();
                acc += w * (h - mean) * (h - mean);
            }
        }
    }
    acc.max(0.0)
}

/// Orders pairs by decreasing `p0/p1`.
fn compare_ratio_desc(a: &OutputPair, b: &OutputPair) -> Ordering {
    b.ratio().total_cmp(&a.ratio())
}

/// Check-node combination `W^-`: output alphabet squared.
pub fn polar_minus(w: &DiscreteChannel) -> DiscreteChannel {
    DiscreteChannel::from_pairs(minus_pairs(&w.pairs))
}

fn minus_pairs(p: &[OutputPair]) -> Vec<OutputPair> {
    let mut out = Vec::with_capacity(p.len() * (p.len() + 1) / 2);
    for i in 0..p.len() {
        for j in i..p.len() {
            let k = if i == j { 1.0 } else { 2.0 };
            let (a, b) = (p[i], p[j]);
            out.push(OutputPair::new(
                k * (a.p0 * b.p0 + a.p1 * b.p1),
                k * (a.p0 * b.p1 + a.p1 * b.p0),
            ));
        }
    }
    out
}

/// Variable-node combination `W^+`, whose output includes the first bit.
pub fn polar_plus(w: &DiscreteChannel) -> DiscreteChannel {
    DiscreteChannel::from_pairs(plus_pairs(&w.pairs))
}

fn plus_pairs(p: &[OutputPair]) -> Vec<OutputPair> {
    let mut out = Vec::with_capacity(p.len() * (p.len() + 1));
    for i in 0..p.len() {
        for j in i..p.len() {
            let k = if i == j { 1.0 } else { 2.0 };
            let (a, b) = (p[i], p[j]);
            out.push(OutputPair::new(k * a.p0 * b.p0, k * a.p1 * b.p1));
            out.push(OutputPair::new(k * a.p1 * b.p0, k * a.p0 * b.p1));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct MergeCandidate {
    cost: f64,
    left: usize,
    stamp: (u32, u32),
}

impl Eq for MergeCandidate {}

impl Ord for MergeCandidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on cost, then on position.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.left.cmp(&self.left))
    }
}

impl PartialOrd for MergeCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degrading quantization: greedily merges the adjacent pair (in ratio
/// order) whose merge loses the least capacity until at most `mu` outputs
/// remain.
pub fn degrade_merge(w: &DiscreteChannel, mu: usize) -> Result<DiscreteChannel> {
    if mu < 2 {
        return Err(Error::Config(format!(
            "output alphabet size must be at least 2, got {mu}"
        )));
    }
    let target = mu / 2;
    if w.pairs.len() <= target {
        return Ok(w.clone());
    }
    let m = w.pairs.len();
    let mut pairs = w.pairs.clone();
    let mut next: Vec<usize> = (1..=m).collect();
    let mut prev: Vec<usize> = (0..m).map(|i| i.wrapping_sub(1)).collect();
    let mut alive = vec![true; m];
    let mut version = vec![0u32; m];
    let mut caps: Vec<f64> = pairs.iter().map(OutputPair::capacity).collect();
    let merge_cost = |pairs: &[OutputPair], caps: &[f64], i: usize, j: usize| {
        let joint = OutputPair {
            p0: pairs[i].p0 + pairs[j].p0,
            p1: pairs[i].p1 + pairs[j].p1,
        };
        (caps[i] + caps[j] - joint.capacity()).max(0.0)
    };
    let mut heap = BinaryHeap::with_capacity(m);
    for i in 0..m - 1 {
        heap.push(MergeCandidate {
            cost: merge_cost(&pairs, &caps, i, i + 1),
            left: i,
            stamp: (0, 0),
        });
    }
    let mut remaining = m;
    while remaining > target {
        let Some(c) = heap.pop() else { break };
        let i = c.left;
        if !alive[i] {
            continue;
        }
        let j = next[i];
        if j >= m || c.stamp != (version[i], version[j]) {
            continue;
        }
        pairs[i].p0 += pairs[j].p0;
        pairs[i].p1 += pairs[j].p1;
        caps[i] = pairs[i].capacity();
        alive[j] = false;
        next[i] = next[j];
        if next[i] < m {
            prev[next[i]] = i;
        }
        version[i] += 1;
        remaining -= 1;
        let pi = prev[i];
        if pi < m {
            heap.push(MergeCandidate {
                cost: merge_cost(&pairs, &caps, pi, i),
                left: pi,
                stamp: (version[pi], version[i]),
            });
        }
        let ni = next[i];
        if ni < m {
            heap.push(MergeCandidate {
                cost: merge_cost(&pairs, &caps, i, ni),
                left: i,
                stamp: (version[i], version[ni]),
            });
        }
    }
    let out = pairs
        .into_iter()
        .zip(alive)
        .filter_map(|(p, a)| a.then_some(p))
        .collect();
    Ok(DiscreteChannel { pairs: out })
}

const QUANTIZE_FINE_BINS: usize = 4096;
const QUANTIZE_SPAN_SIGMAS: f64 = 10.0;

/// Gaussian upper tail `Q(x)`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Discretizes BI-AWGN into at most `mu` outputs: the non-negative output
/// half-line is cut into fine uniform bins (plus a tail bin), each paired with
/// its mirror image, and the result is reduced with [`degrade_merge`].
pub fn quantize_awgn(ch: &AwgnChannel, mu: usize) -> Result<DiscreteChannel> {
    if mu < 2 {
        return Err(Error::Config(format!(
            "output alphabet size must be at least 2, got {mu}"
        )));
    }
    let s = ch.sigma();
    let y_max = 1.0 + QUANTIZE_SPAN_SIGMAS * s;
    let step = y_max / QUANTIZE_FINE_BINS as f64;
    // P(Y >= y | x) for x = +1 (bit 0) and x = -1 (bit 1).
    let tail0 = |y: f64| gaussian_q((y - 1.0) / s);
    let tail1 = |y: f64| gaussian_q((y + 1.0) / s);
    let mut pairs = Vec::with_capacity(QUANTIZE_FINE_BINS + 1);
    for k in 0..QUANTIZE_FINE_BINS {
        let lo = k as f64 * step;
        let hi = lo + step;
        pairs.push(OutputPair::new(tail0(lo) - tail0(hi), tail1(lo) - tail1(hi)));
    }
    pairs.push(OutputPair::new(tail0(y_max), tail1(y_max)));
    let w = DiscreteChannel::from_pairs(pairs);
    degrade_merge(&w, mu)
}

/// Mutual information and metric variance of one bit-channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitChannelStats {
    /// 1-based bit-channel index.
    pub index: usize,
    pub capacity: f64,
    pub variance: f64,
}

/// Capacity and metric variance of one node of the polarization tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    pub capacity: f64,
    pub variance: f64,
}

/// Per-node statistics of the full polarization tree, stored in heap order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsTree {
    depth: usize,
    nodes: Vec<NodeStats>,
}

impl StatsTree {
    /// Quantized construction: every node channel is reduced to at most `mu`
    /// outputs before it is transformed further.
    pub fn from_channel(w: &DiscreteChannel, n: usize, mu: usize) -> Result<Self> {
        let root = degrade_merge(w, mu)?;
        let mut nodes = vec![NodeStats { capacity: 0.0, variance: 0.0 }; 2usize << n];
        fill_quantized(&root, 1, n, mu, &mut nodes)?;
        Ok(Self { depth: n, nodes })
    }

    /// Exact construction for the BEC via `e^- = 2e - e^2`, `e^+ = e^2`.
    pub fn from_bec(epsilon: f64, n: usize) -> Self {
        let mut eps = vec![0.0; 2usize << n];
        eps[1] = epsilon;
        for id in 1..(1usize << n) {
            let e = eps[id];
            eps[2 * id] = 2.0 * e - e * e;
            eps[2 * id + 1] = e * e;
        }
        let mut nodes: Vec<NodeStats> = eps
            .iter()
            .map(|&e| NodeStats { capacity: 1.0 - e, variance: e * (1.0 - e) })
            .collect();
        nodes[0] = NodeStats { capacity: 0.0, variance: 0.0 };
        Self { depth: n, nodes }
    }

    /// Tree depth `n`; the tree has `2^n` leaves.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Statistics of heap-numbered node `id` (root = 1).
    pub fn node(&self, id: usize) -> NodeStats {
        self.nodes[id]
    }

    /// Statistics of node `index` (0-based) at `depth`.
    pub fn at(&self, depth: usize, index: usize) -> NodeStats {
        self.nodes[(1usize << depth) + index]
    }

    /// Leaf statistics in natural index order.
    pub fn leaves(&self) -> Vec<BitChannelStats> {
        let base = 1usize << self.depth;
        (0..base)
            .map(|i| {
                let s = self.nodes[base + i];
                BitChannelStats { index: i + 1, capacity: s.capacity, variance: s.variance }
            })
            .collect()
    }

    /// Writes `node_id,depth,capacity,variance` rows for every node.
    pub fn write_tree_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["node_id", "depth", "capacity", "variance"])
            .map_err(|e| Error::csv(path, e))?;
        for id in 1..self.nodes.len() {
            let depth = usize::BITS as usize - 1 - id.leading_zeros() as usize;
            let s = self.nodes[id];
            w.write_record([
                id.to_string(),
                depth.to_string(),
                crate::sim::fmt_sig(s.capacity),
                crate::sim::fmt_sig(s.variance),
            ])
            .map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn fill_quantized(
    w: &DiscreteChannel,
    id: usize,
    remaining: usize,
    mu: usize,
    nodes: &mut [NodeStats],
) -> Result<()> {
    nodes[id] = NodeStats { capacity: w.capacity(), variance: w.variance() };
    if remaining == 0 {
        return Ok(());
    }
    if remaining == 1 {
        // Leaf channels are evaluated on the full transform output.
        for (child, pairs) in [(2 * id, minus_pairs(&w.pairs)), (2 * id + 1, plus_pairs(&w.pairs))] {
            nodes[child] = NodeStats {
                capacity: pairs_capacity(&pairs),
                variance: pairs_variance(&pairs),
            };
        }
        return Ok(());
    }
    let minus = degrade_merge(&prebin(polar_minus(w), mu), mu)?;
    fill_quantized(&minus, 2 * id, remaining - 1, mu, nodes)?;
    drop(minus);
    let plus = degrade_merge(&prebin(polar_plus(w), mu), mu)?;
    fill_quantized(&plus, 2 * id + 1, remaining - 1, mu, nodes)
}

const PREBIN_FACTOR: usize = 16;

/// Coarse degrading pre-merge of large alphabets: pairs whose per-unit-mass
/// capacity `1 - h2(p0 / (p0 + p1))` falls in the same of `PREBIN_FACTOR * mu`
/// uniform bins are combined. Runs before the greedy merge to bound its cost.
fn prebin(w: DiscreteChannel, mu: usize) -> DiscreteChannel {
    let bins = PREBIN_FACTOR * mu;
    if w.pairs.len() <= bins {
        return w;
    }
    let mut merged: Vec<OutputPair> = Vec::with_capacity(bins + 1);
    let mut last_bin = usize::MAX;
    // Pairs are sorted by decreasing ratio, so bin indices are monotone.
    for p in w.pairs {
        let post = p.p0 / p.mass();
        let c = 1.0 - crate::channel::binary_entropy(post);
        let bin = ((c * bins as f64) as usize).min(bins - 1);
        match merged.last_mut() {
            Some(last) if bin == last_bin => {
                last.p0 += p.p0;
                last.p1 += p.p1;
            }
            _ => {
                merged.push(p);
                last_bin = bin;
            }
        }
    }
    DiscreteChannel { pairs: merged }
}

/// Leaf statistics of the quantized construction of depth `n`.
pub fn bit_channel_stats(w: &DiscreteChannel, n: usize, mu: usize) -> Result<Vec<BitChannelStats>> {
    Ok(StatsTree::from_channel(w, n, mu)?.leaves())
}

/// Exact leaf statistics of a polarized BEC.
pub fn bec_stats(epsilon: f64, n: usize) -> Vec<BitChannelStats> {
    StatsTree::from_bec(epsilon, n).leaves()
}

/// Writes `index,capacity,variance` rows.
pub fn write_stats_csv(stats: &[BitChannelStats], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut body = String::from("index,capacity,variance\n");
    for s in stats {
        body.push_str(&format!(
            "{},{},{}\n",
            s.index,
            crate::sim::fmt_sig(s.capacity),
            crate::sim::fmt_sig(s.variance)
        ));
    }
    out.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Mean natural-log LLR of every bit-channel under the Gaussian approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaProfileState {
    pub means: Vec<f64>,
}

impl GaProfileState {
    /// 0-based indices sorted from most to least reliable; ties favour the
    /// higher index.
    pub fn reliability_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.means.len()).collect();
        idx.sort_by(|&a, &b| self.means[b].total_cmp(&self.means[a]).then(b.cmp(&a)));
        idx
    }
}

const GA_SWITCH: f64 = 10.0;

/// `ln` of the check-node transfer function `E[tanh(U/2)]` complement for
/// `U ~ N(m, 2m)`, via the two-regime closed-form approximation.
fn ga_ln_phi(m: f64) -> f64 {
    if m <= 0.0 {
        0.0
    } else if m <= GA_SWITCH {
        -0.4527 * m.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / m).ln() - 0.25 * m + (1.0 - 10.0 / (7.0 * m)).ln()
    }
}

/// Inverse of [`ga_ln_phi`] by bisection.
fn ga_ln_phi_inv(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while ga_ln_phi(hi) > target {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ga_ln_phi(mid) > target {
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

fn ga_minus(m: f64) -> f64 {
    // 1 - (1 - phi)^2 = phi (2 - phi), kept in the log domain.
    let lp = ga_ln_phi(m);
    let p = lp.exp();
    ga_ln_phi_inv(lp + (2.0 - p).ln())
}

/// Gaussian-approximation density evolution of the mean natural-log LLR,
/// starting from `2 / sigma^2`.
pub fn ga_construct(ch: &AwgnChannel, n: usize) -> GaProfileState {
    let s = ch.sigma();
    let mut means = vec![2.0 / (s * s)];
    for _ in 0..n {
        // Node j has its minus child at 2j and its plus child at 2j + 1.
        let mut next = Vec::with_capacity(means.len() * 2);
        for &m in &means {
            next.push(ga_minus(m));
            next.push(2.0 * m);
        }
        means = next;
    }
    GaProfileState { means }
}
