use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A node of a flattened binary tree; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        class: u32,
    },
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

/// Axis-aligned classification tree grown with the Gini criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

/// Scratch state shared by every node of one tree.
struct Grower<'a> {
    x: &'a [Vec<f64>],
    y: &'a [u32],
    n_classes: usize,
    n_features: usize,
    mtry: usize,
    pairs: Vec<(f64, u32)>,
    left: Vec<u64>,
}

fn gini(counts: &[u64], n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    1.0 - sq / (n * n)
}

fn majority(counts: &[u64]) -> u32 {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best as u32
}

impl<'a> Grower<'a> {
    fn counts(&self, samples: &[usize]) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_classes];
        for &i in samples {
            counts[self.y[i] as usize] += 1;
        }
        counts
    }

    /// Best threshold on one feature, scored by `Σ_left c²/n_l + Σ_right c²/n_r`
    /// (larger is purer). `None` if the feature is constant on `samples`.
    fn best_on_feature(&mut self, samples: &[usize], parent: &[u64], f: usize) -> Option<Split> {
        self.pairs.clear();
        self.pairs.extend(samples.iter().map(|&i| (self.x[i][f], self.y[i])));
        self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        self.left.iter_mut().for_each(|c| *c = 0);

        let n = self.pairs.len();
        let mut sq_left = 0.0f64;
        let mut sq_right: f64 = parent.iter().map(|&c| (c as f64) * (c as f64)).sum();
        let mut best: Option<Split> = None;

        for i in 0..n - 1 {
            let (v, c) = self.pairs[i];
            let c = c as usize;
            let lc = self.left[c] as f64;
            let rc = (parent[c] - self.left[c]) as f64;
            sq_left += 2.0 * lc + 1.0;
            sq_right -= 2.0 * rc - 1.0;
            self.left[c] += 1;

            let next = self.pairs[i + 1].0;
            if v < next {
                let nl = (i + 1) as f64;
                let nr = (n - i - 1) as f64;
                let score = sq_left / nl + sq_right / nr;
                if best.as_ref().map_or(true, |b| score > b.score) {
                    let mut threshold = 0.5 * (v + next);
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(Split {
                        feature: f,
                        threshold,
                        score,
                    });
                }
            }
        }
        best
    }

    fn choose_split<R: Rng>(&mut self, samples: &[usize], parent: &[u64], rng: &mut R) -> Option<Split> {
        let mut order: Vec<usize> = (0..self.n_features).collect();
        order.shuffle(rng);
        let (first, rest) = order.split_at_mut(self.mtry.min(self.n_features));
        first.sort_unstable();

        let mut best: Option<Split> = None;
        for &f in first.iter() {
            if let Some(s) = self.best_on_feature(samples, parent, f) {
                if best.as_ref().map_or(true, |b| s.score > b.score) {
                    best = Some(s);
                }
            }
        }
        // every candidate was constant here: keep drawing until one is not
        if best.is_none() {
            for &f in rest.iter() {
                if let Some(s) = self.best_on_feature(samples, parent, f) {
                    return Some(s);
                }
            }
        }
        best
    }
}

impl DecisionTree {
    pub fn leaf(class: u32) -> Self {
        Self {
            nodes: vec![Node::Leaf { class }],
        }
    }

    /// Build from explicit nodes (root first). Child indices are not checked
    /// until prediction.
    pub fn from_nodes(nodes: Vec<Node>) -> Self {
        assert!(!nodes.is_empty(), "a tree needs at least one node");
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn predict(&self, x: &[f64]) -> u32 {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { class } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x[*feature as usize] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    /// Grow a tree on `samples` (indices into `x`, duplicates allowed) until
    /// nodes are pure or hold fewer than two samples. Impurity decrease
    /// weighted by node size is added to `importance`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn fit<R: Rng>(
        x: &[Vec<f64>],
        y: &[u32],
        n_classes: usize,
        samples: Vec<usize>,
        mtry: usize,
        rng: &mut R,
        importance: &mut [f64],
    ) -> Self {
        let n_features = importance.len();
        let mut g = Grower {
            x,
            y,
            n_classes,
            n_features,
            mtry,
            pairs: Vec::with_capacity(samples.len()),
            left: vec![0; n_classes],
        };

        let mut nodes = vec![Node::Leaf { class: 0 }];
        let mut stack = vec![(0usize, samples)];
        while let Some((slot, samples)) = stack.pop() {
            let counts = g.counts(&samples);
            let n = samples.len() as u64;
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            if pure || samples.len() < 2 {
                nodes[slot] = Node::Leaf {
                    class: majority(&counts),
                };
                continue;
            }
            let Some(split) = g.choose_split(&samples, &counts, rng) else {
                nodes[slot] = Node::Leaf {
                    class: majority(&counts),
                };
                continue;
            };

            let (left, right): (Vec<usize>, Vec<usize>) = samples
                .iter()
                .partition(|&&i| x[i][split.feature] <= split.threshold);
            let lc = g.counts(&left);
            let rc = g.counts(&right);
            importance[split.feature] += n as f64 * gini(&counts, n)
                - left.len() as f64 * gini(&lc, left.len() as u64)
                - right.len() as f64 * gini(&rc, right.len() as u64);

            let li = nodes.len();
            nodes.push(Node::Leaf { class: 0 });
            nodes.push(Node::Leaf { class: 0 });
            nodes[slot] = Node::Split {
                feature: split.feature as u32,
                threshold: split.threshold,
                left: li as u32,
                right: (li + 1) as u32,
            };
            stack.push((li + 1, right));
            stack.push((li, left));
        }
        Self { nodes }
    }
}
