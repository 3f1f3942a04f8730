//! Binary information-gain decision tree with numeric thresholds.
//!
//! Greedy top-down induction: at each node every (feature, threshold) pair is
//! scored by entropy reduction and the best one is taken. Candidate features
//! are visited in a per-node seeded random order and only a strictly better
//! gain replaces the incumbent, so equally good features are chosen at random
//! but reproducibly. No pruning.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::seed;
use crate::stats::entropy;

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 10,
            min_leaf: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: Label,
        negatives: usize,
        positives: usize,
    },
}

/// Nodes are stored in a flat arena; index 0 is the root. `x[feature] <=
/// threshold` goes left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    dim: usize,
    nodes: Vec<Node>,
}

impl TreeModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    fn leaf(&self, x: &[f64]) -> Result<&Node> {
        if x.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
                leaf => return Ok(leaf),
            }
        }
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<Label> {
        match self.leaf(x)? {
            Node::Leaf { label, .. } => Ok(*label),
            Node::Split { .. } => unreachable!("leaf() only returns leaves"),
        }
    }

    /// Fraction of positive training samples in the leaf `x` falls into.
    pub fn probability_positive(&self, x: &[f64]) -> Result<f64> {
        match self.leaf(x)? {
            Node::Leaf {
                negatives,
                positives,
                ..
            } => {
                let n = negatives + positives;
                Ok(if n == 0 {
                    0.5
                } else {
                    *positives as f64 / n as f64
                })
            }
            Node::Split { .. } => unreachable!("leaf() only returns leaves"),
        }
    }
}

struct Builder<'a> {
    xs: Vec<&'a [f64]>,
    ys: Vec<Label>,
    config: TreeConfig,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    features: Vec<usize>,
}

fn counts(ys: &[Label], idx: &[usize]) -> (usize, usize) {
    let pos = idx.iter().filter(|&&i| ys[i] == Label::Positive).count();
    (idx.len() - pos, pos)
}

fn make_leaf(neg: usize, pos: usize) -> Node {
    Node::Leaf {
        label: if pos >= neg {
            Label::Positive
        } else {
            Label::Negative
        },
        negatives: neg,
        positives: pos,
    }
}

impl Builder<'_> {
    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let (neg, pos) = counts(&self.ys, &idx);
        let slot = self.nodes.len();
        self.nodes.push(make_leaf(neg, pos));
        if neg == 0
            || pos == 0
            || depth >= self.config.max_depth
            || idx.len() < 2 * self.config.min_leaf
        {
            return slot;
        }
        let Some((feature, threshold)) = self.best_split(&idx, neg, pos) else {
            return slot;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.xs[i][feature] <= threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[slot] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        slot
    }

    fn best_split(&mut self, idx: &[usize], neg: usize, pos: usize) -> Option<(usize, f64)> {
        let n = idx.len() as f64;
        let parent = entropy(&[neg as f64, pos as f64]);
        let min_leaf = self.config.min_leaf.max(1);
        self.features.shuffle(&mut self.rng);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = idx.to_vec();
        for &f in &self.features {
            sorted.sort_by(|&a, &b| self.xs[a][f].total_cmp(&self.xs[b][f]));
            let (mut ln, mut lp) = (0usize, 0usize);
            for k in 0..sorted.len() - 1 {
                match self.ys[sorted[k]] {
                    Label::Negative => ln += 1,
                    Label::Positive => lp += 1,
                }
                let left_n = k + 1;
                let v = self.xs[sorted[k]][f];
                let next = self.xs[sorted[k + 1]][f];
                if v == next || left_n < min_leaf || sorted.len() - left_n < min_leaf {
                    continue;
                }
                let (rn, rp) = (neg - ln, pos - lp);
                let child = (left_n as f64 / n) * entropy(&[ln as f64, lp as f64])
                    + ((sorted.len() - left_n) as f64 / n) * entropy(&[rn as f64, rp as f64]);
                let gain = parent - child;
                if gain > MIN_GAIN && best.is_none_or(|(g, _, _)| gain > g + 1e-15) {
                    best = Some((gain, f, 0.5 * (v + next)));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

/// Fits a tree. Single-class input yields a single leaf.
pub fn train_tree(data: &Dataset, config: &TreeConfig, seed: u64) -> Result<TreeModel> {
    if data.is_empty() {
        return Err(Error::EmptyInput("no training rows".into()));
    }
    let ys = data.labels()?;
    let mut builder = Builder {
        xs: data.instances().iter().map(|i| i.features.as_slice()).collect(),
        ys,
        config: *config,
        rng: seed::rng(seed),
        nodes: Vec::new(),
        features: (0..data.dim()).collect(),
    };
    builder.build((0..data.len()).collect(), 0);
    Ok(TreeModel {
        dim: data.dim(),
        nodes: builder.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Instance;

    fn ds(rows: &[(&[f64], Label)]) -> Dataset {
        let d = rows[0].0.len();
        Dataset::from_instances(
            rows.iter()
                .map(|(x, y)| Instance::labeled(x.to_vec(), *y))
                .collect(),
            d,
        )
        .unwrap()
    }

    #[test]
    fn perfect_axis_split() {
        let mut rows = Vec::new();
        for k in 0..20 {
            let v = 0.1 + 0.015 * k as f64; // 0.1 .. 0.385
            rows.push(vec![v]);
        }
        let mut data = Vec::new();
        for r in &rows {
            data.push(Instance::labeled(r.clone(), Label::Negative));
            data.push(Instance::labeled(vec![r[0] + 0.5], Label::Positive));
        }
        let data = Dataset::from_instances(data, 1).unwrap();
        let t = train_tree(&data, &TreeConfig::default(), 0).unwrap();
        assert_eq!(t.depth(), 1);
        match &t.nodes()[0] {
            Node::Split { threshold, .. } => assert!(*threshold > 0.4 && *threshold < 0.6),
            other => panic!("expected split, got {other:?}"),
        }
        for inst in data.instances() {
            assert_eq!(t.predict_label(&inst.features).unwrap(), inst.label.unwrap());
        }
    }

    #[test]
    fn pure_input_is_single_leaf() {
        let data = ds(&[(&[0.1], Label::Negative), (&[0.9], Label::Negative)]);
        let t = train_tree(&data, &TreeConfig::default(), 0).unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert_eq!(t.predict_label(&[0.5]).unwrap(), Label::Negative);
    }

    #[test]
    fn xor_clusters_need_more_than_one_split() {
        // Four clusters at the unit-square corners with XOR labels. Cluster
        // sizes are unequal so the root split has non-zero gain.
        let mut rows = Vec::new();
        for ((cx, cy), size) in [((0.2, 0.2), 6), ((0.8, 0.8), 4), ((0.2, 0.8), 5), ((0.8, 0.2), 5)] {
            let label = if (cx > 0.5) == (cy > 0.5) {
                Label::Negative
            } else {
                Label::Positive
            };
            for k in 0..size {
                let e = 0.01 * k as f64;
                rows.push(Instance::labeled(vec![cx + e, cy - e], label));
            }
        }
        let data = Dataset::from_instances(rows, 2).unwrap();

        // Oracle: no single axis threshold yields pure sides, while the pair
        // x <= 0.5 then y <= 0.5 does.
        let pure = |pts: Vec<&Instance>| pts.iter().all(|i| i.label == pts[0].label);
        for f in 0..2 {
            for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let (l, r): (Vec<&Instance>, Vec<&Instance>) =
                    data.instances().iter().partition(|i| i.features[f] <= t);
                assert!(l.is_empty() || r.is_empty() || !(pure(l) && pure(r)));
            }
        }
        for xl in [true, false] {
            for yl in [true, false] {
                let cell: Vec<&Instance> = data
                    .instances()
                    .iter()
                    .filter(|i| (i.features[0] <= 0.5) == xl && (i.features[1] <= 0.5) == yl)
                    .collect();
                assert!(pure(cell));
            }
        }

        let cfg = TreeConfig {
            max_depth: 10,
            min_leaf: 1,
        };
        let t = train_tree(&data, &cfg, 1).unwrap();
        assert!(t.depth() >= 2);
        for i in data.instances() {
            assert_eq!(t.predict_label(&i.features).unwrap(), i.label.unwrap());
        }
    }

    #[test]
    fn leaf_frequencies_sum_to_samples() {
        let data = ds(&[
            (&[0.1, 0.3], Label::Negative),
            (&[0.2, 0.9], Label::Positive),
            (&[0.2, 0.9], Label::Negative),
            (&[0.8, 0.1], Label::Positive),
        ]);
        let t = train_tree(&data, &TreeConfig::default(), 3).unwrap();
        let total: usize = t
            .nodes()
            .iter()
            .map(|n| match n {
                Node::Leaf {
                    negatives,
                    positives,
                    ..
                } => negatives + positives,
                _ => 0,
            })
            .sum();
        assert_eq!(total, 4);
        for n in t.nodes() {
            if let Node::Split { feature, .. } = n {
                assert!(*feature < 2);
            }
        }
    }

    #[test]
    fn depth_limit_respected() {
        let cfg = TreeConfig {
            max_depth: 1,
            min_leaf: 1,
        };
        let data = ds(&[
            (&[0.1], Label::Negative),
            (&[0.3], Label::Positive),
            (&[0.5], Label::Negative),
            (&[0.7], Label::Positive),
        ]);
        assert!(train_tree(&data, &cfg, 0).unwrap().depth() <= 1);
    }
}
