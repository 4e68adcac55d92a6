//! Greedy binary CART on Gini impurity.
//!
//! Hyperparameters: `max_depth` (default 5) and `min_samples_leaf`
//! (default 1). A leaf scores the positive rate of its training rows.

use crate::data::Dataset;
use crate::space::Configuration;

use super::{hyper_usize, FeatureEncoder, LearnerError, Scorer, TrainInput};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split { feature: usize, threshold: f64, left: Box<Node>, right: Box<Node> },
}

#[derive(Debug, Clone)]
pub struct TreeModel {
    encoder: FeatureEncoder,
    root: Node,
}

struct Builder<'a> {
    x: &'a [f64],
    y: &'a [u8],
    width: usize,
    max_depth: usize,
    min_leaf: usize,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

impl Builder<'_> {
    fn value(&self, row: usize, feature: usize) -> f64 {
        self.x[row * self.width + feature]
    }

    fn build(&self, rows: &mut [usize], depth: usize) -> Node {
        let n = rows.len();
        let pos = rows.iter().filter(|&&r| self.y[r] == 1).count();
        let leaf = Node::Leaf(pos as f64 / n as f64);
        if depth >= self.max_depth || pos == 0 || pos == n || n < 2 * self.min_leaf {
            return leaf;
        }
        let parent = gini(pos, n) * n as f64;
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in 0..self.width {
            rows.sort_by(|&a, &b| self.value(a, feature).total_cmp(&self.value(b, feature)).then(a.cmp(&b)));
            let mut left_pos = 0;
            for i in 1..n {
                left_pos += usize::from(self.y[rows[i - 1]] == 1);
                let (lo, hi) = (self.value(rows[i - 1], feature), self.value(rows[i], feature));
                if i < self.min_leaf || n - i < self.min_leaf || lo == hi {
                    continue;
                }
                let impurity = gini(left_pos, i) * i as f64 + gini(pos - left_pos, n - i) * (n - i) as f64;
                if impurity < parent - 1e-12 && best.is_none_or(|(b, _, _)| impurity < b) {
                    best = Some((impurity, feature, 0.5 * (lo + hi)));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return leaf;
        };
        let mut left: Vec<usize> = Vec::new();
        let mut right: Vec<usize> = Vec::new();
        for &r in rows.iter() {
            if self.value(r, feature) <= threshold {
                left.push(r);
            } else {
                right.push(r);
            }
        }
        Node::Split {
            feature,
            threshold,
            left: Box::new(self.build(&mut left, depth + 1)),
            right: Box::new(self.build(&mut right, depth + 1)),
        }
    }
}

pub fn fit(config: &Configuration, input: TrainInput<'_>) -> Result<TreeModel, LearnerError> {
    let max_depth = hyper_usize(config, "max_depth", 5)?;
    let min_leaf = hyper_usize(config, "min_samples_leaf", 1)?.max(1);
    let encoder = FeatureEncoder::fit(input.train, input.rows);
    let x = encoder.transform(input.train, input.rows)?;
    let y: Vec<u8> = input.rows.iter().map(|&r| input.train.labels()[r]).collect();
    let builder = Builder { x: &x, y: &y, width: encoder.width(), max_depth, min_leaf };
    let mut rows: Vec<usize> = (0..y.len()).collect();
    let root = builder.build(&mut rows, 0);
    Ok(TreeModel { encoder, root })
}

impl TreeModel {
    pub fn depth(&self) -> usize {
        fn walk(node: &Node) -> usize {
            match node {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }
}

impl Scorer for TreeModel {
    fn score_rows(&self, rows: &Dataset) -> Result<Vec<f64>, LearnerError> {
        let x = self.encoder.transform_all(rows)?;
        let width = self.encoder.width();
        Ok((0..rows.len())
            .map(|r| {
                let mut node = &self.root;
                loop {
                    match node {
                        Node::Leaf(p) => break *p,
                        Node::Split { feature, threshold, left, right } => {
                            node = if x[r * width + feature] <= *threshold { left } else { right };
                        }
                    }
                }
            })
            .collect())
    }
}
