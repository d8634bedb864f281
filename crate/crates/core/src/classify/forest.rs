//! CART trees with Gini impurity and a bootstrap-aggregated forest.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax_canonical, check_training_input, present_classes};
use crate::corpus::Label;
use crate::error::Result;
use crate::features::SparseVector;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    /// Weighted training rows per class, in the forest's class order.
    Leaf { counts: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Root at index 0.
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    /// Features examined per split.
    pub max_features: usize,
}

fn gini(counts: &[u32], total: u32) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

struct Candidate {
    feature: u32,
    threshold: f64,
    impurity: f64,
}

/// Column-major view of the rows that carry bootstrap weight.
struct Columns {
    entries: Vec<Vec<(u32, f64)>>,
}

impl Columns {
    fn new(x: &[SparseVector], weight: &[u32], dim: usize) -> Self {
        let mut entries = vec![Vec::new(); dim];
        for (r, row) in x.iter().enumerate() {
            if weight[r] == 0 {
                continue;
            }
            for (i, v) in row.iter() {
                entries[i].push((r as u32, v));
            }
        }
        Self { entries }
    }
}

struct Builder<'a> {
    y: &'a [usize],
    weight: &'a [u32],
    n_classes: usize,
    columns: Columns,
    params: TreeParams,
    in_node: Vec<bool>,
    feature_pool: Vec<u32>,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn class_counts(&self, rows: &[u32]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_classes];
        for &r in rows {
            counts[self.y[r as usize]] += self.weight[r as usize];
        }
        counts
    }

    /// Best threshold on one feature, or `None` if the feature is constant
    /// within the node.
    fn best_threshold(&self, feature: u32, node_counts: &[u32], total: u32) -> Option<(f64, f64)> {
        let mut nonzero: Vec<(f64, u32, usize)> = self.columns.entries[feature as usize]
            .iter()
            .filter(|(r, _)| self.in_node[*r as usize])
            .map(|&(r, v)| (v, self.weight[r as usize], self.y[r as usize]))
            .collect();
        if nonzero.is_empty() {
            return None;
        }
        // rows absent from the column sit at value 0
        let mut zero_counts = node_counts.to_vec();
        for &(_, w, c) in &nonzero {
            zero_counts[c] -= w;
        }
        let zero_total: u32 = zero_counts.iter().sum();
        if zero_total > 0 {
            nonzero.push((0.0, 0, usize::MAX));
        }
        nonzero.sort_by(|a, b| a.0.total_cmp(&b.0));

        // group equal values; the zero marker carries the implicit rows
        let mut groups: Vec<(f64, Vec<u32>)> = Vec::new();
        for (v, w, c) in nonzero {
            if groups.last().is_none_or(|g| g.0 != v) {
                groups.push((v, vec![0; self.n_classes]));
            }
            let g = &mut groups.last_mut().unwrap().1;
            if c == usize::MAX {
                for (gi, zi) in g.iter_mut().zip(&zero_counts) {
                    *gi += zi;
                }
            } else {
                g[c] += w;
            }
        }
        if groups.len() < 2 {
            return None;
        }

        let mut left = vec![0u32; self.n_classes];
        let mut best: Option<(f64, f64)> = None;
        for k in 0..groups.len() - 1 {
            for (l, g) in left.iter_mut().zip(&groups[k].1) {
                *l += g;
            }
            let left_total: u32 = left.iter().sum();
            let right: Vec<u32> = node_counts.iter().zip(&left).map(|(n, l)| n - l).collect();
            let right_total = total - left_total;
            let impurity = (left_total as f64 * gini(&left, left_total)
                + right_total as f64 * gini(&right, right_total))
                / total as f64;
            if best.is_none_or(|b| impurity < b.1) {
                let threshold = groups[k].0 + (groups[k + 1].0 - groups[k].0) / 2.0;
                best = Some((threshold, impurity));
            }
        }
        best
    }

    fn choose_split(&mut self, rows: &[u32], counts: &[u32], rng: &mut SplitMix64) -> Option<Candidate> {
        let total: u32 = counts.iter().sum();
        let dim = self.feature_pool.len();
        for &r in rows {
            self.in_node[r as usize] = true;
        }
        let mut best: Option<Candidate> = None;
        let mut visited = 0;
        // partial Fisher–Yates over the feature pool; keep drawing past
        // `max_features` until one non-constant feature has been seen
        while visited < dim && (visited < self.params.max_features || best.is_none()) {
            let j = visited + rng.below_usize(dim - visited);
            self.feature_pool.swap(visited, j);
            let feature = self.feature_pool[visited];
            visited += 1;
            if let Some((threshold, impurity)) = self.best_threshold(feature, counts, total) {
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    best = Some(Candidate {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        for &r in rows {
            self.in_node[r as usize] = false;
        }
        best
    }

    fn build(&mut self, rows: Vec<u32>, rng: &mut SplitMix64) {
        // (node slot, rows, depth)
        let mut stack = vec![(0usize, rows, 0usize)];
        self.nodes.push(Node::Leaf { counts: vec![] });
        while let Some((slot, rows, depth)) = stack.pop() {
            let counts = self.class_counts(&rows);
            let total: u32 = counts.iter().sum();
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
            let split = if pure || depth_reached || total < 2 {
                None
            } else {
                self.choose_split(&rows, &counts, rng)
            };
            let Some(split) = split else {
                self.nodes[slot] = Node::Leaf { counts };
                continue;
            };
            let (mut left_rows, mut right_rows) = (Vec::new(), Vec::new());
            let column = &self.columns.entries[split.feature as usize];
            for &r in &rows {
                let value = column
                    .binary_search_by_key(&r, |e| e.0)
                    .map_or(0.0, |pos| column[pos].1);
                if value <= split.threshold {
                    left_rows.push(r);
                } else {
                    right_rows.push(r);
                }
            }
            if left_rows.is_empty() || right_rows.is_empty() {
                self.nodes[slot] = Node::Leaf { counts };
                continue;
            }
            let left = self.nodes.len();
            self.nodes.push(Node::Leaf { counts: vec![] });
            let right = self.nodes.len();
            self.nodes.push(Node::Leaf { counts: vec![] });
            self.nodes[slot] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: left as u32,
                right: right as u32,
            };
            stack.push((right, right_rows, depth + 1));
            stack.push((left, left_rows, depth + 1));
        }
    }
}

impl DecisionTree {
    /// `y` holds class positions in `0..n_classes`; `weight` holds per-row
    /// multiplicities (bootstrap counts; zero rows are ignored).
    pub fn fit(
        x: &[SparseVector],
        y: &[usize],
        weight: &[u32],
        n_classes: usize,
        dim: usize,
        params: TreeParams,
        rng: &mut SplitMix64,
    ) -> Self {
        let rows: Vec<u32> = (0..x.len() as u32).filter(|&r| weight[r as usize] > 0).collect();
        let mut builder = Builder {
            y,
            weight,
            n_classes,
            columns: Columns::new(x, weight, dim),
            params,
            in_node: vec![false; x.len()],
            feature_pool: (0..dim as u32).collect(),
            nodes: Vec::new(),
        };
        builder.build(rows, rng);
        Self {
            nodes: builder.nodes,
        }
    }

    pub fn leaf_counts(&self, x: &SparseVector) -> &[u32] {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x.get(*feature as usize) <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    /// Majority class position at the reached leaf; ties go to the lowest.
    pub fn predict_class(&self, x: &SparseVector) -> usize {
        let counts = self.leaf_counts(x);
        let mut best = 0;
        for (k, &c) in counts.iter().enumerate() {
            if c > counts[best] {
                best = k;
            }
        }
        best
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub classes: Vec<Label>,
    pub dim: usize,
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Tree `k` draws from `SplitMix64::derive(seed, k)`, so the forest does
    /// not depend on how trees are scheduled across threads.
    pub fn fit(
        x: &[SparseVector],
        y: &[Label],
        dim: usize,
        n_trees: usize,
        max_depth: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        check_training_input(x, y, dim)?;
        let classes = present_classes(y);
        let y_pos: Vec<usize> = y
            .iter()
            .map(|l| classes.binary_search(l).expect("class present"))
            .collect();
        let params = TreeParams {
            max_depth,
            max_features: ((dim as f64).sqrt() as usize).max(1),
        };
        let n = x.len();
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|k| {
                let mut rng = SplitMix64::derive(seed, k as u64);
                let mut weight = vec![0u32; n];
                for _ in 0..n {
                    weight[rng.below_usize(n)] += 1;
                }
                DecisionTree::fit(x, &y_pos, &weight, classes.len(), dim, params, &mut rng)
            })
            .collect();
        Ok(Self {
            classes,
            dim,
            trees,
        })
    }

    /// Fraction of trees voting for each class.
    pub fn vote_fractions(&self, x: &SparseVector) -> Vec<f64> {
        let mut votes = vec![0usize; self.classes.len()];
        for tree in &self.trees {
            votes[tree.predict_class(x)] += 1;
        }
        let n = self.trees.len().max(1) as f64;
        votes.into_iter().map(|v| v as f64 / n).collect()
    }

    pub fn predict(&self, x: &SparseVector) -> Label {
        let scores: Vec<(Label, f64)> = self
            .classes
            .iter()
            .copied()
            .zip(self.vote_fractions(x))
            .collect();
        argmax_canonical(&scores)
    }
}
