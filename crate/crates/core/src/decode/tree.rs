//! Special-node classification of the decoding tree.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::RateProfile;

/// Kind of a decoding-tree node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    /// Every bit frozen.
    Rate0,
    /// Every bit carries data.
    Rate1,
    /// A single data bit, in the last position.
    Rep,
    /// A single frozen bit, in the first position.
    Spc,
    /// Exactly two data bits, in the last two positions.
    TypeI,
    /// Not a special node; decoded through its children.
    Internal,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Rate0 => "rate0",
            NodeKind::Rate1 => "rate1",
            NodeKind::Rep => "rep",
            NodeKind::Spc => "spc",
            NodeKind::TypeI => "type1",
            NodeKind::Internal => "internal",
        })
    }
}

/// Classifies an information mask, checking the patterns in the order
/// Rate-0, Rate-1, REP, SPC, Type-I.
pub fn classify_segment(mask: &[bool]) -> NodeKind {
    let len = mask.len();
    let info = mask.iter().filter(|&&b| b).count();
    if info == 0 {
        NodeKind::Rate0
    } else if info == len {
        NodeKind::Rate1
    } else if info == 1 && mask[len - 1] {
        NodeKind::Rep
    } else if info == len - 1 && !mask[0] {
        NodeKind::Spc
    } else if info == 2 && len >= 2 && mask[len - 1] && mask[len - 2] {
        NodeKind::TypeI
    } else {
        NodeKind::Internal
    }
}

/// One node of the pruned decoding tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeClass {
    /// Heap number (root = 1).
    pub id: usize,
    pub depth: usize,
    /// 0-based first bit.
    pub start: usize,
    pub len: usize,
    pub kind: NodeKind,
}

/// Pruned decoding tree in depth-first order; internal nodes precede their
/// children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodingTree {
    nodes: Vec<NodeClass>,
}

impl DecodingTree {
    pub fn nodes(&self) -> &[NodeClass] {
        &self.nodes
    }

    /// Special nodes in decoding order.
    pub fn frontier(&self) -> Vec<NodeClass> {
        self.nodes
            .iter()
            .copied()
            .filter(|n| n.kind != NodeKind::Internal)
            .collect()
    }

    /// Nodes touched by one decode: every node below the root, or the root
    /// alone when it is itself a special node.
    pub fn node_visits(&self) -> usize {
        (self.nodes.len() - 1).max(1)
    }
}

/// Greedy top-down classification: a segment is split until it matches one
/// of the special-node patterns.
pub fn classify_tree(profile: &RateProfile) -> DecodingTree {
    build_tree(profile.info_mask(), true)
}

/// Tree whose frontier is every single bit, as used by bit-by-bit decoding.
pub fn leaf_tree(profile: &RateProfile) -> DecodingTree {
    build_tree(profile.info_mask(), false)
}

fn build_tree(mask: &[bool], special: bool) -> DecodingTree {
    let mut nodes = Vec::new();
    visit(mask, 1, 0, 0, mask.len(), special, &mut nodes);
    DecodingTree { nodes }
}

fn visit(
    mask: &[bool],
    id: usize,
    depth: usize,
    start: usize,
    len: usize,
    special: bool,
    out: &mut Vec<NodeClass>,
) {
    let seg = &mask[start..start + len];
    let kind = if len == 1 {
        if seg[0] {
            NodeKind::Rate1
        } else {
            NodeKind::Rate0
        }
    } else if special {
        classify_segment(seg)
    } else {
        NodeKind::Internal
    };
    out.push(NodeClass { id, depth, start, len, kind });
    if kind == NodeKind::Internal {
        let half = len / 2;
        visit(mask, 2 * id, depth + 1, start, half, special, out);
        visit(mask, 2 * id + 1, depth + 1, start + half, half, special, out);
    }
}
