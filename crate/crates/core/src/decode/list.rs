//! The list-decoding engine shared by every mode.

use crate::codes::{polar_transform_in_place, CodeSpec};
use crate::error::{Error, Result};
use crate::metric::{bit_metric, max_log_metric};

use super::kernels::{check_exact, check_min_sum, hard_decision, variable, LLR_CLAMP};
use super::tree::{classify_tree, leaf_tree, NodeClass, NodeKind};
use super::{Arithmetic, DecodeCounters, DecodeOutput, DecoderConfig, MetricForm, Mode};

/// One decoding path.
#[derive(Debug, Clone)]
struct Path {
    /// LLRs of the active node of length `l` at `[l, 2l)`; channel LLRs at
    /// `[N, 2N)`.
    alpha: Vec<f64>,
    /// Re-encoded output of the last finished node of length `l` at `[l, 2l)`.
    beta: Vec<u8>,
    u: Vec<u8>,
    v: Vec<u8>,
    /// `v_{j-k}` at bit `k - 1`.
    reg: u64,
    metric: f64,
    /// Fingerprint of the carrier prefix.
    hash: u64,
    increments: Vec<f64>,
}

impl Path {
    fn new(len: usize, record: bool) -> Self {
        Self {
            alpha: vec![0.0; 2 * len],
            beta: vec![0; 2 * len],
            u: vec![0; len],
            v: vec![0; len],
            reg: 0,
            metric: 0.0,
            hash: 0,
            increments: if record { vec![0.0; len] } else { Vec::new() },
        }
    }
}

/// A candidate extension of a path by one node output.
#[derive(Debug, Clone, Copy)]
struct Item {
    parent: u32,
    /// Offset of the candidate node output in the arena.
    off: u32,
    metric: f64,
    /// Score used to pick the survivor when every candidate is pruned.
    key: f64,
    pruned: bool,
}

#[inline]
fn parity(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}

#[inline]
fn mix(hash: u64, bit: u8) -> u64 {
    let mut z = (hash ^ (u64::from(bit) + 1)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^ (z >> 31)
}

/// Reusable decoder for one code and configuration.
///
/// A decoder holds per-frame scratch state, so each thread needs its own
/// instance; cloning is cheap relative to a decode.
#[derive(Debug, Clone)]
pub struct Decoder {
    len: usize,
    info: Vec<usize>,
    reg_mask: u64,
    config: DecoderConfig,
    list_size: usize,
    tree: Vec<NodeClass>,
    paths: Vec<Path>,
    spare: Vec<Path>,
    slots: Vec<Option<Path>>,
    uses: Vec<u32>,
    items: Vec<Item>,
    next_items: Vec<Item>,
    arena: Vec<u8>,
    next_arena: Vec<u8>,
    orders: Vec<u32>,
    scratch: Vec<u8>,
    counters: DecodeCounters,
    survivors: Vec<Vec<u64>>,
}

impl Decoder {
    pub fn new(spec: &CodeSpec, config: DecoderConfig) -> Result<Self> {
        config.validate(spec.len())?;
        let list_size = if config.mode == Mode::Sc { 1 } else { config.list_size };
        let tree = if config.mode.is_fast() {
            classify_tree(spec.profile())
        } else {
            leaf_tree(spec.profile())
        };
        Ok(Self {
            len: spec.len(),
            info: spec.profile().info_positions().to_vec(),
            reg_mask: spec.poly().mask() >> 1,
            config,
            list_size,
            tree: tree.nodes().to_vec(),
            paths: Vec::new(),
            spare: Vec::new(),
            slots: Vec::new(),
            uses: Vec::new(),
            items: Vec::new(),
            next_items: Vec::new(),
            arena: Vec::new(),
            next_arena: Vec::new(),
            orders: Vec::new(),
            scratch: Vec::new(),
            counters: DecodeCounters::default(),
            survivors: Vec::new(),
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    /// Decodes one frame of base-2 channel LLRs.
    pub fn decode(&mut self, llrs: &[f64]) -> Result<DecodeOutput> {
        if llrs.len() != self.len {
            return Err(Error::LengthMismatch { expected: self.len, actual: llrs.len() });
        }
        self.spare.append(&mut self.paths);
        let mut root = self
            .spare
            .pop()
            .unwrap_or_else(|| Path::new(self.len, self.config.record_increments));
        root.reg = 0;
        root.metric = 0.0;
        root.hash = 0;
        for (a, &l) in root.alpha[self.len..].iter_mut().zip(llrs) {
            *a = if l.is_nan() { 0.0 } else { l.clamp(-LLR_CLAMP, LLR_CLAMP) };
        }
        self.paths.push(root);
        self.counters = DecodeCounters::default();
        self.survivors.clear();

        let mut cursor = 0;
        self.walk(&mut cursor);

        let mut best = 0;
        for (i, p) in self.paths.iter().enumerate() {
            if p.metric > self.paths[best].metric {
                best = i;
            }
        }
        let path = &self.paths[best];
        let mut list_metrics: Vec<f64> = self.paths.iter().map(|p| p.metric).collect();
        list_metrics.sort_by(|a, b| b.total_cmp(a));
        Ok(DecodeOutput {
            data: self.info.iter().map(|&i| path.v[i]).collect(),
            carrier: path.v.clone(),
            metric: path.metric,
            list_metrics,
            counters: self.counters,
            increments: self.config.record_increments.then(|| path.increments.clone()),
            survivors: self.config.record_survivors.then(|| self.survivors.clone()),
        })
    }

    #[inline]
    fn phi(&self, llr: f64, bit: u8) -> f64 {
        let m = match self.config.arithmetic {
            Arithmetic::Exact => bit_metric(llr, bit),
            Arithmetic::MinSum => max_log_metric(llr, bit),
        };
        match self.config.metric {
            MetricForm::Polarized => m,
            MetricForm::Penalty => m - 1.0,
        }
    }

    fn walk(&mut self, cursor: &mut usize) {
        let node = self.tree[*cursor];
        *cursor += 1;
        if node.depth > 0 || node.kind != NodeKind::Internal {
            self.counters.node_visits += 1;
        }
        if node.kind != NodeKind::Internal {
            self.leaf(node);
            return;
        }
        let len = node.len;
        let half = len / 2;
        let min_sum = self.config.arithmetic == Arithmetic::MinSum;
        for p in &mut self.paths {
            let (lo, hi) = p.alpha.split_at_mut(len);
            for j in 0..half {
                lo[half + j] = if min_sum {
                    check_min_sum(hi[j], hi[j + half])
                } else {
                    check_exact(hi[j], hi[j + half])
                };
            }
        }
        self.walk(cursor);
        for p in &mut self.paths {
            p.beta.copy_within(half..len, len);
            let (lo, hi) = p.alpha.split_at_mut(len);
            for j in 0..half {
                lo[half + j] = variable(hi[j], hi[j + half], p.beta[len + j]);
            }
        }
        self.walk(cursor);
        for p in &mut self.paths {
            for j in 0..half {
                let r = p.beta[half + j];
                p.beta[len + j] ^= r;
                p.beta[len + half + j] = r;
            }
        }
    }

    fn leaf(&mut self, node: NodeClass) {
        self.items.clear();
        self.arena.clear();
        match node.kind {
            NodeKind::Rate0 => self.fixed_candidates(node, 0),
            NodeKind::Rep => self.fixed_candidates(node, 1),
            NodeKind::TypeI => self.fixed_candidates(node, 2),
            NodeKind::Rate1 => self.rate1_candidates(node),
            NodeKind::Spc => self.spc_candidates(node),
            NodeKind::Internal => unreachable!("internal nodes are not leaves"),
        }
        self.commit(node);
    }

    /// Bit-level varentropy test, applicable when the node is a single bit.
    #[inline]
    fn vp_prunes(&self, node: &NodeClass, frozen: bool, inc: f64) -> bool {
        if self.config.mode != Mode::Vpscl || node.len != 1 {
            return false;
        }
        if frozen && !self.config.prune_frozen {
            return false;
        }
        let t = self.config.thresholds.as_ref().expect("validated");
        t.prunes(node.start, inc)
    }

    /// Candidates of a node whose `free` trailing bits carry data and whose
    /// other bits are frozen: one per assignment of the free bits.
    fn fixed_candidates(&mut self, node: NodeClass, free: usize) {
        let len = node.len;
        let pfscl = self.config.mode == Mode::Pfscl && free > 0;
        let m_t = self.config.prune_threshold;
        for pi in 0..self.paths.len() {
            let mut reg = self.paths[pi].reg;
            self.scratch.clear();
            for _ in 0..len - free {
                self.scratch.push(parity(reg & self.reg_mask));
                reg <<= 1;
            }
            self.scratch.resize(len, 0);
            polar_transform_in_place(&mut self.scratch);
            for combo in 0..1u8 << free {
                let ones = combo & 1;
                let even = (combo >> 1) & 1;
                let off = self.arena.len();
                let mut inc = 0.0;
                for j in 0..len {
                    let mut x = self.scratch[j] ^ ones;
                    if j % 2 == 0 {
                        x ^= even;
                    }
                    self.arena.push(x);
                    inc += self.phi(self.paths[pi].alpha[len + j], x);
                }
                let metric = self.paths[pi].metric + inc;
                let pruned = (pfscl && inc < m_t) || self.vp_prunes(&node, free == 0, inc);
                let key = if self.config.mode == Mode::Pfscl { inc } else { metric };
                self.items.push(Item { parent: pi as u32, off: off as u32, metric, key, pruned });
            }
        }
        self.select();
    }

    /// Hard decisions with bits sorted by reliability, one candidate per path.
    fn hard_candidates(&mut self, len: usize, parity_fix: bool) {
        self.orders.clear();
        for pi in 0..self.paths.len() {
            let base = self.orders.len();
            self.orders.extend(0..len as u32);
            let alpha = &self.paths[pi].alpha[len..2 * len];
            self.orders[base..].sort_by(|&a, &b| {
                alpha[a as usize].abs().total_cmp(&alpha[b as usize].abs())
            });
            let off = self.arena.len();
            self.arena.extend(alpha.iter().map(|&a| hard_decision(a)));
            if parity_fix {
                let target = parity(self.paths[pi].reg & self.reg_mask);
                let have = self.arena[off..].iter().fold(0, |acc, &b| acc ^ b);
                if have != target {
                    self.arena[off + self.orders[base] as usize] ^= 1;
                }
            }
            let mut inc = 0.0;
            for j in 0..len {
                inc += self.phi(self.paths[pi].alpha[len + j], self.arena[off + j]);
            }
            let metric = self.paths[pi].metric + inc;
            self.items.push(Item { parent: pi as u32, off: off as u32, metric, key: metric, pruned: false });
        }
    }

    fn rate1_candidates(&mut self, node: NodeClass) {
        let len = node.len;
        self.hard_candidates(len, false);
        for i in 0..self.items.len() {
            let it = self.items[i];
            let inc = it.metric - self.paths[it.parent as usize].metric;
            self.items[i].pruned = self.vp_prunes(&node, false, inc);
        }
        let steps = if self.list_size == 1 { 0 } else { (self.list_size - 1).min(len) };
        for t in 0..steps {
            self.split_step(node, t, None);
        }
        if steps == 0 {
            self.select();
        }
    }

    fn spc_candidates(&mut self, node: NodeClass) {
        let len = node.len;
        self.hard_candidates(len, true);
        let steps = if self.list_size == 1 { 0 } else { (self.list_size - 1).min(len - 1) };
        for t in 1..=steps {
            self.split_step(node, t, Some(0));
        }
        if steps == 0 {
            self.select();
        }
    }

    /// Each candidate spawns a copy with the `t`-th least reliable bit
    /// flipped, together with the `partner`-th when given. Under constant
    /// threshold pruning a copy is dropped when its metric over the node falls
    /// below the threshold.
    fn split_step(&mut self, node: NodeClass, t: usize, partner: Option<usize>) {
        let len = node.len;
        let m_t = self.config.prune_threshold;
        let pfscl = self.config.mode == Mode::Pfscl;
        self.next_items.clear();
        self.next_arena.clear();
        for i in 0..self.items.len() {
            let it = self.items[i];
            let pi = it.parent as usize;
            let src = it.off as usize;
            let base = pi * len;
            let pos = self.orders[base + t] as usize;
            let alpha = &self.paths[pi].alpha[len..2 * len];

            let keep = self.next_arena.len();
            self.next_arena.extend_from_slice(&self.arena[src..src + len]);
            self.next_items.push(Item { off: keep as u32, ..it });

            let flip = self.next_arena.len();
            self.next_arena.extend_from_slice(&self.arena[src..src + len]);
            let old = self.next_arena[flip + pos];
            let new_phi = self.phi(alpha[pos], old ^ 1);
            let mut delta = new_phi - self.phi(alpha[pos], old);
            self.next_arena[flip + pos] ^= 1;
            if let Some(k) = partner {
                let r = self.orders[base + k] as usize;
                let old_r = self.next_arena[flip + r];
                delta += self.phi(alpha[r], old_r ^ 1) - self.phi(alpha[r], old_r);
                self.next_arena[flip + r] ^= 1;
            }
            let metric = it.metric + delta;
            let node_inc = metric - self.paths[pi].metric;
            let pruned = (pfscl && node_inc < m_t) || self.vp_prunes(&node, false, new_phi);
            self.next_items.push(Item {
                parent: it.parent,
                off: flip as u32,
                metric,
                key: metric,
                pruned,
            });
        }
        std::mem::swap(&mut self.items, &mut self.next_items);
        std::mem::swap(&mut self.arena, &mut self.next_arena);
        self.select();
    }

    /// Applies pruning, then keeps the `L` best candidates.
    fn select(&mut self) {
        let n = self.items.len();
        let kept = self.items.iter().filter(|i| !i.pruned).count();
        if kept == 0 {
            let mut best = 0;
            for (i, it) in self.items.iter().enumerate() {
                if it.key > self.items[best].key {
                    best = i;
                }
            }
            let mut it = self.items[best];
            it.pruned = false;
            self.items.clear();
            self.items.push(it);
            self.counters.paths_pruned += (n - 1) as u64;
        } else if kept < n {
            self.items.retain(|i| !i.pruned);
            self.counters.paths_pruned += (n - kept) as u64;
        }
        if self.items.len() > self.list_size {
            self.counters.sort_ops += 1;
            self.items.sort_by(|a, b| b.metric.total_cmp(&a.metric));
            self.items.truncate(self.list_size);
        }
    }

    /// Replaces the path list by the selected candidates, updating the
    /// carrier, register and partial sums of each.
    fn commit(&mut self, node: NodeClass) {
        let len = node.len;
        let start = node.start;
        let count = self.paths.len();
        self.uses.clear();
        self.uses.resize(count, 0);
        for it in &self.items {
            self.uses[it.parent as usize] += 1;
        }
        self.slots.clear();
        self.slots.extend(self.paths.drain(..).map(Some));
        let record = self.config.record_increments;
        for i in 0..self.items.len() {
            let it = self.items[i];
            let pi = it.parent as usize;
            self.uses[pi] -= 1;
            let mut p = if self.uses[pi] == 0 {
                self.slots[pi].take().expect("parent still present")
            } else {
                let src = self.slots[pi].as_ref().expect("parent still present");
                match self.spare.pop() {
                    Some(mut q) => {
                        q.clone_from(src);
                        q
                    }
                    None => src.clone(),
                }
            };
            let x = &self.arena[it.off as usize..it.off as usize + len];
            p.beta[len..2 * len].copy_from_slice(x);
            self.scratch.clear();
            self.scratch.extend_from_slice(x);
            polar_transform_in_place(&mut self.scratch);
            for j in 0..len {
                let pos = start + j;
                let ub = self.scratch[j];
                let vb = ub ^ parity(p.reg & self.reg_mask);
                p.u[pos] = ub;
                p.v[pos] = vb;
                p.reg = (p.reg << 1) | u64::from(vb);
                p.hash = mix(p.hash, vb);
            }
            if record {
                for j in 0..len {
                    let inc = self.phi(p.alpha[len + j], p.beta[len + j]);
                    p.increments[start + j] = inc;
                }
            }
            p.metric = it.metric;
            self.paths.push(p);
        }
        self.spare.extend(self.slots.drain(..).flatten());
        if self.config.record_survivors {
            let mut ids: Vec<u64> = self.paths.iter().map(|p| p.hash).collect();
            ids.sort_unstable();
            self.survivors.push(ids);
        }
    }
}
