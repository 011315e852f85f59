//! Binary decision tree trained with greedy Gini splits (CART style).
//!
//! Candidate thresholds are the midpoints between consecutive distinct
//! values of each feature. The best split minimizes the weighted Gini
//! impurity of the children; ties resolve to the dv feature before mp, then
//! to the lowest threshold. Splitting continues while any candidate exists
//! (equal-impurity splits are taken: they still shrink both children, and
//! they are what lets a depth-2 tree shatter an XOR-shaped sample), stopping
//! at pure nodes, the depth limit, or nodes whose feature values are all
//! identical.

use crate::error::{Error, Result};
use crate::learn::dataset::{Dataset, Label, Sample};

pub const DEFAULT_MAX_DEPTH: usize = 8;

/// The two features a node can split on, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feature {
    Dv,
    Mp,
}

impl Feature {
    fn value(&self, dv: f64, mp: u8) -> f64 {
        match self {
            Feature::Dv => dv,
            Feature::Mp => mp as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        label: Label,
        /// (straight, turn) sample counts that reached this leaf in training.
        counts: (usize, usize),
    },
    Split {
        feature: Feature,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtModel {
    root: Node,
    max_depth: usize,
}

fn gini(straight: usize, turn: usize) -> f64 {
    let n = (straight + turn) as f64;
    let ps = straight as f64 / n;
    let pt = turn as f64 / n;
    1.0 - ps * ps - pt * pt
}

fn majority(straight: usize, turn: usize) -> Label {
    if turn > straight {
        Label::Turn
    } else {
        Label::Straight
    }
}

struct BestSplit {
    weighted_gini: f64,
    feature: Feature,
    threshold: f64,
}

/// Scan one feature for its best midpoint split; first strictly better wins,
/// so ascending threshold order makes the lowest threshold the tie winner.
fn scan_feature(
    samples: &[Sample],
    indices: &[usize],
    feature: Feature,
    best: &mut Option<BestSplit>,
) {
    let mut order: Vec<usize> = indices.to_vec();
    order.sort_by(|&a, &b| {
        feature
            .value(samples[a].dv, samples[a].mp)
            .total_cmp(&feature.value(samples[b].dv, samples[b].mp))
    });
    let n = order.len();
    let total_turn: usize = order.iter().filter(|&&i| samples[i].label == Label::Turn).count();
    let total_straight = n - total_turn;

    let mut left_straight = 0usize;
    let mut left_turn = 0usize;
    for w in 0..n - 1 {
        let i = order[w];
        match samples[i].label {
            Label::Straight => left_straight += 1,
            Label::Turn => left_turn += 1,
        }
        let here = feature.value(samples[i].dv, samples[i].mp);
        let next = feature.value(samples[order[w + 1]].dv, samples[order[w + 1]].mp);
        if here == next {
            continue;
        }
        let threshold = here + (next - here) / 2.0;
        let right_straight = total_straight - left_straight;
        let right_turn = total_turn - left_turn;
        let nl = (left_straight + left_turn) as f64;
        let nr = (right_straight + right_turn) as f64;
        let weighted =
            (nl * gini(left_straight, left_turn) + nr * gini(right_straight, right_turn))
                / n as f64;
        if best.as_ref().map_or(true, |b| weighted < b.weighted_gini) {
            *best = Some(BestSplit { weighted_gini: weighted, feature, threshold });
        }
    }
}

fn build(samples: &[Sample], indices: Vec<usize>, depth: usize, max_depth: usize) -> Node {
    let turn = indices.iter().filter(|&&i| samples[i].label == Label::Turn).count();
    let straight = indices.len() - turn;
    let leaf = |straight, turn| Node::Leaf { label: majority(straight, turn), counts: (straight, turn) };

    if straight == 0 || turn == 0 || depth == max_depth {
        return leaf(straight, turn);
    }
    let mut best: Option<BestSplit> = None;
    scan_feature(samples, &indices, Feature::Dv, &mut best);
    scan_feature(samples, &indices, Feature::Mp, &mut best);
    let Some(split) = best else {
        // Every feature value identical: nothing to cut on.
        return leaf(straight, turn);
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| split.feature.value(samples[i].dv, samples[i].mp) <= split.threshold);
    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(build(samples, left_idx, depth + 1, max_depth)),
        right: Box::new(build(samples, right_idx, depth + 1, max_depth)),
    }
}

impl DtModel {
    pub fn fit(data: &Dataset, max_depth: usize) -> Result<Self> {
        if max_depth < 1 {
            return Err(Error::InvalidParameter(format!(
                "max depth must be at least 1, got {max_depth}"
            )));
        }
        let (straight, turn) = data.class_counts();
        if straight == 0 || turn == 0 {
            return Err(Error::DegenerateDataset(
                "decision tree needs both classes present".into(),
            ));
        }
        let indices: Vec<usize> = (0..data.len()).collect();
        Ok(Self { root: build(data.samples(), indices, 0, max_depth), max_depth })
    }

    pub fn from_parts(root: Node, max_depth: usize) -> Self {
        Self { root, max_depth }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn walk(node: &Node) -> usize {
            match node {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }

    pub fn predict(&self, dv: f64, mp: u8) -> Label {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { label, .. } => return *label,
                Node::Split { feature, threshold, left, right } => {
                    node = if feature.value(dv, mp) <= *threshold { left } else { right };
                }
            }
        }
    }
}
