use rand::seq::index::sample;
use rand::Rng as _;

use super::lag::LagEmbedding;
use super::ModelError;
use crate::exec::Execution;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub trees: usize,
    /// `None` grows until leaves are pure or hit `min_leaf`.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Share of features tried at each node, in `(0, 1]`.
    pub feature_frac: f64,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            trees: 50,
            max_depth: None,
            min_leaf: 1,
            feature_frac: 1.0,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// CART regression tree grown by variance reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

/// Training data laid out for split search: feature columns and, per
/// feature, sample indices sorted by that feature.
struct Presorted<'a> {
    samples: &'a LagEmbedding,
    columns: Vec<Vec<f64>>,
    sorted: Vec<Vec<usize>>,
    /// `1 / k` for node sizes `k`, shared by every tree.
    recip: Vec<f64>,
}

impl<'a> Presorted<'a> {
    fn new(samples: &'a LagEmbedding) -> Self {
        let columns: Vec<Vec<f64>> = (0..samples.lag)
            .map(|f| (0..samples.len()).map(|i| samples.row(i)[f]).collect())
            .collect();
        let sorted = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<usize> = (0..col.len()).collect();
                idx.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
                idx
            })
            .collect();
        let recip = (0..=samples.len()).map(|k| 1.0 / k as f64).collect();
        Self {
            samples,
            columns,
            sorted,
            recip,
        }
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    at: usize,
}

/// Growth state of one tree. Every node owns the same segment `lo..hi` of
/// each per-feature slot ordering; a slot is one draw of the bootstrap.
struct Grower<'a, R> {
    recip: &'a [f64],
    params: &'a ForestParams,
    rng: &'a mut R,
    /// Target of each slot.
    targets: Vec<f64>,
    /// Per feature, `(value, slot)` ordered by value.
    order: Vec<Vec<(f64, usize)>>,
    goes_left: Vec<bool>,
    scratch: Vec<(f64, usize)>,
}

impl<R: rand::Rng> Grower<'_, R> {
    fn grow(mut self) -> RegressionTree {
        let mut nodes = vec![Node::Leaf(0.0)];
        let mut stack = vec![(0usize, 0usize, self.targets.len(), 0usize)];
        while let Some((id, lo, hi, depth)) = stack.pop() {
            let slots = &self.order[0][lo..hi];
            let first = self.targets[slots[0].1];
            let mut sum = 0.0;
            let mut pure = true;
            for &(_, s) in slots {
                let y = self.targets[s];
                sum += y;
                pure &= y == first;
            }
            nodes[id] = Node::Leaf(sum / (hi - lo) as f64);
            let depth_left = self.params.max_depth.is_none_or(|d| depth < d);
            if pure || !depth_left || hi - lo < 2 * self.params.min_leaf {
                continue;
            }
            let Some(best) = self.best_split(lo, hi, sum) else {
                continue;
            };
            self.partition(lo, hi, &best);
            let (left, right) = (nodes.len(), nodes.len() + 1);
            nodes.push(Node::Leaf(0.0));
            nodes.push(Node::Leaf(0.0));
            nodes[id] = Node::Split {
                feature: best.feature,
                threshold: best.threshold,
                left,
                right,
            };
            stack.push((right, lo + best.at, hi, depth + 1));
            stack.push((left, lo, lo + best.at, depth + 1));
        }
        RegressionTree { nodes }
    }

    /// Best split over a random feature subset; if none of those features can
    /// split the node, the remaining features are tried.
    fn best_split(&mut self, lo: usize, hi: usize, total: f64) -> Option<BestSplit> {
        let d = self.order.len();
        let k = ((self.params.feature_frac * d as f64).ceil() as usize).clamp(1, d);
        let mut order: Vec<usize> = sample(self.rng, d, d).into_vec();
        let (tried, rest) = order.split_at_mut(k);
        tried.sort_unstable();
        rest.sort_unstable();
        self.best_among(tried, lo, hi, total)
            .or_else(|| self.best_among(rest, lo, hi, total))
    }

    fn best_among(&self, features: &[usize], lo: usize, hi: usize, total: f64) -> Option<BestSplit> {
        let n = hi - lo;
        let min_leaf = self.params.min_leaf;
        let mut best: Option<BestSplit> = None;
        for &f in features {
            let slots = &self.order[f][lo..hi];
            let mut left_sum = 0.0;
            for at in 1..n {
                left_sum += self.targets[slots[at - 1].1];
                if at < min_leaf || n - at < min_leaf {
                    continue;
                }
                let (a, b) = (slots[at - 1].0, slots[at].0);
                if a == b {
                    continue;
                }
                // SSE reduction up to the constant term
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum * self.recip[at] + right_sum * right_sum * self.recip[n - at]
                    - total * total * self.recip[n];
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mid = a + (b - a) / 2.0;
                    best = Some(BestSplit {
                        feature: f,
                        threshold: if mid < b { mid } else { a },
                        gain,
                        at,
                    });
                }
            }
        }
        best
    }

    /// Stable partition of every feature ordering into left and right parts.
    fn partition(&mut self, lo: usize, hi: usize, split: &BestSplit) {
        let chosen = &self.order[split.feature][lo..hi];
        for (k, &(_, s)) in chosen.iter().enumerate() {
            self.goes_left[s] = k < split.at;
        }
        for f in 0..self.order.len() {
            if f == split.feature {
                continue;
            }
            let seg = &mut self.order[f][lo..hi];
            self.scratch.clear();
            let mut w = 0;
            for r in 0..seg.len() {
                let item = seg[r];
                if self.goes_left[item.1] {
                    seg[w] = item;
                    w += 1;
                } else {
                    self.scratch.push(item);
                }
            }
            seg[w..].copy_from_slice(&self.scratch);
        }
    }
}

impl RegressionTree {
    /// Grows a tree on the samples drawn `counts[i]` times each.
    fn grow_counts<R: rand::Rng>(data: &Presorted<'_>, counts: &[usize], params: &ForestParams, rng: &mut R) -> Self {
        let y = data.samples.targets();
        let mut first_slot = Vec::with_capacity(counts.len());
        let mut targets = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            first_slot.push(targets.len());
            targets.extend(std::iter::repeat_n(y[i], c));
        }
        let order = data
            .sorted
            .iter()
            .zip(&data.columns)
            .map(|(idx, col)| {
                idx.iter()
                    .flat_map(|&i| (first_slot[i]..first_slot[i] + counts[i]).map(move |s| (col[i], s)))
                    .collect()
            })
            .collect();
        let slots = targets.len();
        Grower {
            recip: &data.recip,
            params,
            rng,
            targets,
            order,
            goes_left: vec![false; slots],
            scratch: Vec::with_capacity(slots),
        }
        .grow()
    }

    /// Grows a tree on the samples listed in `rows` (repeats allowed).
    pub fn grow<R: rand::Rng>(samples: &LagEmbedding, rows: &[usize], params: &ForestParams, rng: &mut R) -> Self {
        let mut counts = vec![0; samples.len()];
        for &r in rows {
            counts[r] += 1;
        }
        Self::grow_counts(&Presorted::new(samples), &counts, params, rng)
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(0, 0)];
        while let Some((at, d)) = stack.pop() {
            match self.nodes[at] {
                Node::Leaf(_) => deepest = deepest.max(d),
                Node::Split { left, right, .. } => {
                    stack.push((left, d + 1));
                    stack.push((right, d + 1));
                }
            }
        }
        deepest
    }

    pub fn leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }
}

/// Bagged CART trees; predicts the mean of the tree outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<RegressionTree>,
}

impl RandomForest {
    /// Tree `t` draws its bootstrap sample and feature subsets from a seed
    /// derived from `(seed, t)`, so the forest does not depend on `exec`.
    pub fn fit(samples: &LagEmbedding, params: &ForestParams, seed: u64, exec: Execution) -> Result<Self, ModelError> {
        if params.trees == 0 {
            return Err(ModelError::InvalidHyper {
                name: "trees".into(),
                reason: "need at least one tree".into(),
            });
        }
        if samples.len() < 2 {
            return Err(ModelError::Degenerate(format!("{} training sample(s)", samples.len())));
        }
        let m = samples.len();
        let data = Presorted::new(samples);
        let trees = exec.map_range(params.trees, |t| {
            let mut rng = seed::rng(seed::derive(seed, &[t as u64]));
            let mut counts = vec![if params.bootstrap { 0 } else { 1 }; m];
            if params.bootstrap {
                for _ in 0..m {
                    counts[rng.random_range(0..m)] += 1;
                }
            }
            RegressionTree::grow_counts(&data, &counts, params, &mut rng)
        });
        Ok(Self { trees })
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}
