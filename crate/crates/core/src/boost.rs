//! Hash-function learners: decision stumps over quantized bins, depth-limited
//! trees, discrete AdaBoost ensembles of trees, and a linear hinge-loss
//! perceptron.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, QuantizedFeatures, BINS};

/// `sign` with `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Test `bin <= threshold_bin`; examples passing it get `polarity`, the rest
/// `-polarity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stump {
    pub dim: u32,
    pub threshold_bin: u8,
    pub polarity: i8,
}

impl Stump {
    #[inline]
    pub fn goes_left(&self, bin: u8) -> bool {
        bin <= self.threshold_bin
    }

    #[inline]
    pub fn predict(&self, bin: u8) -> i8 {
        if self.goes_left(bin) {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

/// Best split of one candidate dimension: `(cut, polarity, weighted error)`.
fn best_cut(column: &[u8], labels: &[i8], weights: &[f64], subset: &[u32]) -> (u8, i8, f64) {
    let mut pos = [0.0f64; BINS];
    let mut neg = [0.0f64; BINS];
    for &i in subset {
        let i = i as usize;
        let w = weights[i];
        if w == 0.0 {
            continue;
        }
        let b = column[i] as usize;
        if labels[i] > 0 {
            pos[b] += w;
        } else {
            neg[b] += w;
        }
    }
    let total_pos: f64 = pos.iter().sum();
    let total_neg: f64 = neg.iter().sum();
    let mut best = (0u8, 1i8, f64::INFINITY);
    let (mut left_pos, mut left_neg) = (0.0, 0.0);
    for cut in 0..BINS - 1 {
        left_pos += pos[cut];
        left_neg += neg[cut];
        // polarity +1: left predicts +1, right predicts -1
        let err_plus = left_neg + (total_pos - left_pos);
        let err_minus = left_pos + (total_neg - left_neg);
        if err_plus < best.2 {
            best = (cut as u8, 1, err_plus);
        }
        if err_minus < best.2 {
            best = (cut as u8, -1, err_minus);
        }
    }
    best
}

/// Searches `dims` for the stump with the smallest weighted error over the
/// examples in `subset`. Ties go to the lowest dimension, then the lowest
/// cut, then polarity +1. Returns the raw (unnormalized) weighted error.
fn search_stump(
    q: &QuantizedFeatures,
    labels: &[i8],
    weights: &[f64],
    subset: &[u32],
    dims: &[usize],
) -> (Stump, f64) {
    let results: Vec<(u8, i8, f64)> = dims
        .par_iter()
        .map(|&k| best_cut(q.column(k), labels, weights, subset))
        .collect();
    let mut best: Option<(Stump, f64)> = None;
    let mut order: Vec<usize> = (0..dims.len()).collect();
    order.sort_by_key(|&t| dims[t]);
    for t in order {
        let (cut, polarity, err) = results[t];
        if best.as_ref().is_none_or(|b| err < b.1) {
            best = Some((
                Stump {
                    dim: dims[t] as u32,
                    threshold_bin: cut,
                    polarity,
                },
                err,
            ));
        }
    }
    best.expect("at least one candidate dimension")
}

fn check_training_inputs(q: &QuantizedFeatures, labels: &[i8], weights: &[f64]) -> Result<f64> {
    if labels.len() != q.n() || weights.len() != q.n() {
        return Err(Error::contract("labels and weights must have one entry per example"));
    }
    if labels.iter().any(|&y| y != 1 && y != -1) {
        return Err(Error::contract("labels must be ±1"));
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::contract("weights must be finite and non-negative"));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::contract("all weights are zero"));
    }
    Ok(total)
}

/// Trains the stump minimizing weighted 0/1 error over `dims`; the error is
/// returned as a fraction of the total weight.
pub fn train_stump(q: &QuantizedFeatures, labels: &[i8], weights: &[f64], dims: &[usize]) -> Result<(Stump, f64)> {
    let total = check_training_inputs(q, labels, weights)?;
    if dims.is_empty() || dims.iter().any(|&k| k >= q.d()) {
        return Err(Error::contract("candidate dimensions must be nonempty and in range"));
    }
    let subset: Vec<u32> = (0..q.n() as u32).collect();
    let (stump, err) = search_stump(q, labels, weights, &subset, dims);
    Ok((stump, err / total))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    /// Slot below a leaf; never reached.
    Unused,
    Split(Stump),
    Leaf(i8),
}

/// Binary tree in heap order: the children of node `k` are `2k + 1`
/// (bins `<= threshold`) and `2k + 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    depth: u32,
    nodes: Vec<Node>,
}

impl Tree {
    pub fn from_nodes(depth: u32, nodes: Vec<Node>) -> Result<Self> {
        if nodes.len() != (1usize << (depth + 1)) - 1 {
            return Err(Error::data("tree node count does not match its depth"));
        }
        let tree = Tree { depth, nodes };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<()> {
        let mut stack = vec![0usize];
        while let Some(k) = stack.pop() {
            match self.nodes.get(k) {
                Some(Node::Leaf(v)) if *v == 1 || *v == -1 => {}
                Some(Node::Split(s)) if s.polarity == 1 || s.polarity == -1 => {
                    stack.push(2 * k + 1);
                    stack.push(2 * k + 2);
                }
                _ => return Err(Error::data(format!("tree node {k} is unreachable or malformed"))),
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Largest feature dimension referenced, if any.
    pub fn max_dim(&self) -> Option<u32> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split(s) => Some(s.dim),
                _ => None,
            })
            .max()
    }

    #[inline]
    pub fn eval_with(&self, bin: impl Fn(usize) -> u8) -> i8 {
        let mut k = 0;
        loop {
            match self.nodes[k] {
                Node::Leaf(v) => return v,
                Node::Split(s) => {
                    k = if s.goes_left(bin(s.dim as usize)) {
                        2 * k + 1
                    } else {
                        2 * k + 2
                    }
                }
                Node::Unused => unreachable!("validated trees never reach unused slots"),
            }
        }
    }

    pub fn eval(&self, q: &QuantizedFeatures, i: usize) -> i8 {
        self.eval_with(|k| q.get(i, k))
    }
}

/// Which dimensions a tree node may split on.
#[derive(Clone, Copy, Debug)]
enum DimSampling {
    All,
    /// ⌈fraction · d⌉ random dimensions per node.
    Lazy(f64),
}

struct TreeGrower<'a, R> {
    q: &'a QuantizedFeatures,
    labels: &'a [i8],
    weights: &'a [f64],
    max_depth: u32,
    sampling: DimSampling,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

impl<R: Rng> TreeGrower<'_, R> {
    fn leaf_value(&self, subset: &[u32]) -> i8 {
        let s: f64 = subset
            .iter()
            .map(|&i| self.weights[i as usize] * self.labels[i as usize] as f64)
            .sum();
        sign(s)
    }

    fn dims(&mut self) -> Vec<usize> {
        let d = self.q.d();
        match self.sampling {
            DimSampling::All => (0..d).collect(),
            DimSampling::Lazy(f) => {
                let count = ((f * d as f64).ceil() as usize).clamp(1, d);
                let mut dims = index::sample(self.rng, d, count).into_vec();
                dims.sort_unstable();
                dims
            }
        }
    }

    fn grow(&mut self, k: usize, depth: u32, subset: Vec<u32>) {
        let weight = |s: &[u32]| s.iter().map(|&i| self.weights[i as usize]).sum::<f64>();
        let (mut pos, mut neg) = (0.0, 0.0);
        for &i in &subset {
            let w = self.weights[i as usize];
            if self.labels[i as usize] > 0 {
                pos += w;
            } else {
                neg += w;
            }
        }
        if depth == self.max_depth || pos == 0.0 || neg == 0.0 {
            self.nodes[k] = Node::Leaf(self.leaf_value(&subset));
            return;
        }
        let dims = self.dims();
        let (stump, _) = search_stump(self.q, self.labels, self.weights, &subset, &dims);
        let column = self.q.column(stump.dim as usize);
        let (left, right): (Vec<u32>, Vec<u32>) =
            subset.iter().partition(|&&i| stump.goes_left(column[i as usize]));
        if weight(&left) == 0.0 || weight(&right) == 0.0 {
            self.nodes[k] = Node::Leaf(self.leaf_value(&subset));
            return;
        }
        self.nodes[k] = Node::Split(stump);
        self.grow(2 * k + 1, depth + 1, left);
        self.grow(2 * k + 2, depth + 1, right);
    }
}

fn grow_tree<R: Rng>(
    q: &QuantizedFeatures,
    labels: &[i8],
    weights: &[f64],
    max_depth: u32,
    sampling: DimSampling,
    rng: &mut R,
) -> Tree {
    let subset: Vec<u32> = (0..q.n() as u32).filter(|&i| weights[i as usize] > 0.0).collect();
    let mut grower = TreeGrower {
        q,
        labels,
        weights,
        max_depth,
        sampling,
        rng,
        nodes: vec![Node::Unused; (1usize << (max_depth + 1)) - 1],
    };
    grower.grow(0, 0, subset);
    Tree {
        depth: max_depth,
        nodes: grower.nodes,
    }
}

/// Greedy tree growth using every dimension at every node. Splitting stops
/// at `max_depth`, at pure nodes and when a split would leave one side
/// without weight; leaves vote with the sign of their weighted label sum.
pub fn train_tree(q: &QuantizedFeatures, labels: &[i8], weights: &[f64], max_depth: u32) -> Result<Tree> {
    check_training_inputs(q, labels, weights)?;
    if max_depth == 0 {
        return Err(Error::contract("tree depth must be at least 1"));
    }
    if q.d() == 0 {
        return Err(Error::contract("no feature dimensions"));
    }
    Ok(grow_tree(q, labels, weights, max_depth, DimSampling::All, &mut ChaCha8Rng::seed_from_u64(0)))
}

/// `sign(Σ_q w_q T_q(x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostedHash {
    trees: Vec<Tree>,
    weights: Vec<f64>,
}

impl BoostedHash {
    pub fn new(trees: Vec<Tree>, weights: Vec<f64>) -> Result<Self> {
        if trees.is_empty() || trees.len() != weights.len() {
            return Err(Error::data("an ensemble needs one weight per tree and at least one tree"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::data("ensemble weights must be finite and non-negative"));
        }
        Ok(BoostedHash { trees, weights })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn score_with(&self, bin: impl Fn(usize) -> u8 + Copy) -> f64 {
        self.trees
            .iter()
            .zip(&self.weights)
            .map(|(t, &w)| w * t.eval_with(bin) as f64)
            .sum()
    }

    pub fn eval_with(&self, bin: impl Fn(usize) -> u8 + Copy) -> i8 {
        sign(self.score_with(bin))
    }

    /// Evaluates on one example's bins (training edges applied).
    pub fn eval(&self, bins: &[u8]) -> Result<i8> {
        if let Some(k) = self.trees.iter().filter_map(Tree::max_dim).max() {
            if k as usize >= bins.len() {
                return Err(Error::contract(format!(
                    "example has {} dimensions, model uses dimension {k}",
                    bins.len()
                )));
            }
        }
        Ok(self.eval_with(|k| bins[k]))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BoostOptions {
    pub rounds: usize,
    pub max_depth: u32,
    /// Fraction of smallest weights zeroed for each round.
    pub trim_fraction: f64,
    /// Fraction of dimensions evaluated per node split.
    pub lazy_fraction: f64,
    pub seed: u64,
}

impl Default for BoostOptions {
    fn default() -> Self {
        BoostOptions {
            rounds: 200,
            max_depth: 4,
            trim_fraction: 0.10,
            lazy_fraction: 0.2,
            seed: 0,
        }
    }
}

/// Per-round record of a boosting run.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostRound {
    pub error: f64,
    pub alpha: f64,
    /// `Σ_i exp(-z_i F(x_i)) / n` after the round.
    pub exp_loss: f64,
}

#[derive(Clone, Debug)]
pub struct BoostReport {
    pub rounds: Vec<BoostRound>,
    /// Targets were constant; the model is a single leaf.
    pub constant_targets: bool,
    /// The first round could not beat chance; its tree was kept anyway.
    pub weak_first_round: bool,
}

const MIN_ERROR: f64 = 1e-10;

/// Discrete AdaBoost over trees fitted to ±1 `targets`.
///
/// Each round trims the smallest weights to zero, grows a tree on the
/// remaining weight with lazily sampled split dimensions, and sets
/// `α = ½ ln((1 - ε) / ε)` from the error `ε` on the full distribution.
/// Boosting stops when `ε ≥ 0.5` (the tree is dropped) or `ε = 0`.
pub fn train_boosted_hash(
    q: &QuantizedFeatures,
    targets: &[i8],
    opts: &BoostOptions,
) -> Result<(BoostedHash, BoostReport)> {
    let n = q.n();
    if opts.rounds == 0 || opts.max_depth == 0 {
        return Err(Error::contract("boosting needs at least one round and depth >= 1"));
    }
    if !(0.0..1.0).contains(&opts.trim_fraction) || !(0.0..1.0).contains(&opts.lazy_fraction) {
        return Err(Error::contract("trim and lazy fractions must lie in [0, 1)"));
    }
    if n == 0 || q.d() == 0 {
        return Err(Error::contract("boosting needs examples and dimensions"));
    }
    let mut weights = vec![1.0 / n as f64; n];
    check_training_inputs(q, targets, &weights)?;

    let mut report = BoostReport {
        rounds: Vec::new(),
        constant_targets: false,
        weak_first_round: false,
    };
    if targets.iter().all(|&t| t == targets[0]) {
        report.constant_targets = true;
        let tree = Tree {
            depth: 0,
            nodes: vec![Node::Leaf(targets[0])],
        };
        return Ok((BoostedHash::new(vec![tree], vec![1.0])?, report));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sampling = if opts.lazy_fraction > 0.0 {
        DimSampling::Lazy(opts.lazy_fraction)
    } else {
        DimSampling::All
    };
    let trim_count = (opts.trim_fraction * n as f64).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut scores = vec![0.0f64; n];
    let mut trees = Vec::new();
    let mut alphas = Vec::new();

    for _ in 0..opts.rounds {
        let round_weights = if trim_count > 0 {
            let mut w = weights.clone();
            order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
            for &i in &order[..trim_count] {
                w[i] = 0.0;
            }
            w
        } else {
            weights.clone()
        };
        let tree = grow_tree(q, targets, &round_weights, opts.max_depth, sampling, &mut rng);
        let outputs: Vec<i8> = (0..n).map(|i| tree.eval(q, i)).collect();
        let error: f64 = (0..n)
            .filter(|&i| outputs[i] != targets[i])
            .map(|i| weights[i])
            .sum();
        if error >= 0.5 {
            if trees.is_empty() {
                // keep a usable model; its weight only fixes the sign
                report.weak_first_round = true;
                trees.push(tree);
                alphas.push(1.0);
            }
            break;
        }
        let eps = error.max(MIN_ERROR);
        let alpha = 0.5 * ((1.0 - eps) / eps).ln();
        let mut total = 0.0;
        for i in 0..n {
            let margin = (targets[i] * outputs[i]) as f64;
            scores[i] += alpha * outputs[i] as f64;
            weights[i] *= (-alpha * margin).exp();
            total += weights[i];
        }
        weights.iter_mut().for_each(|w| *w /= total);
        let exp_loss = (0..n)
            .map(|i| (-(targets[i] as f64) * scores[i]).exp())
            .sum::<f64>()
            / n as f64;
        report.rounds.push(BoostRound { error, alpha, exp_loss });
        trees.push(tree);
        alphas.push(alpha);
        if error == 0.0 {
            break;
        }
    }
    Ok((BoostedHash::new(trees, alphas)?, report))
}

/// `sign(w · x + b)` on raw features.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearHash {
    pub w: Vec<f64>,
    pub b: f64,
}

impl LinearHash {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if w.iter().any(|x| !x.is_finite()) || !b.is_finite() {
            return Err(Error::data("linear hash parameters must be finite"));
        }
        Ok(LinearHash { w, b })
    }

    #[inline]
    pub fn score(&self, x: &[f32]) -> f64 {
        self.w.iter().zip(x).map(|(w, &v)| w * v as f64).sum::<f64>() + self.b
    }

    pub fn eval(&self, x: &[f32]) -> Result<i8> {
        if x.len() != self.w.len() {
            return Err(Error::contract(format!(
                "example has {} dimensions, model expects {}",
                x.len(),
                self.w.len()
            )));
        }
        Ok(sign(self.score(x)))
    }
}

/// `½ reg ‖w‖² + Σ_i max(0, 1 - z_i (w · x_i + b))`.
pub fn linear_objective(h: &LinearHash, x: &FeatureMatrix, targets: &[i8], reg_strength: f64) -> f64 {
    let norm: f64 = h.w.iter().map(|w| w * w).sum();
    let hinge: f64 = (0..x.n())
        .map(|i| (1.0 - targets[i] as f64 * h.score(x.row(i))).max(0.0))
        .sum();
    0.5 * reg_strength * norm + hinge
}

#[derive(Clone, Copy, Debug)]
pub struct LinearOptions {
    pub reg_strength: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for LinearOptions {
    fn default() -> Self {
        LinearOptions {
            reg_strength: 1.0,
            epochs: 20,
            seed: 0,
        }
    }
}

/// Stochastic subgradient descent (Pegasos) on [`linear_objective`].
///
/// The objective divided by `n` is `λ/2 ‖w‖² + mean hinge` with
/// `λ = reg / n`; step `t` uses `1 / (λ t)` and the bias is treated as the
/// weight of a constant feature. The best end-of-epoch iterate (including
/// the zero start) is returned.
pub fn train_linear_hash(x: &FeatureMatrix, targets: &[i8], opts: &LinearOptions) -> Result<LinearHash> {
    let (n, d) = (x.n(), x.d());
    if opts.epochs == 0 {
        return Err(Error::contract("linear training needs at least one epoch"));
    }
    if targets.len() != n || n == 0 {
        return Err(Error::contract("one target per example is required"));
    }
    if !(opts.reg_strength > 0.0) {
        return Err(Error::contract("regularization strength must be positive"));
    }
    let lambda = opts.reg_strength / n as f64;
    let radius = 1.0 / lambda.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut w = vec![0.0f64; d + 1];
    let mut best = LinearHash { w: vec![0.0; d], b: 0.0 };
    let mut best_obj = linear_objective(&best, x, targets, opts.reg_strength);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0usize;
    for _ in 0..opts.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let xi = x.row(i);
            let z = targets[i] as f64;
            let margin = z * (w[..d].iter().zip(xi).map(|(a, &v)| a * v as f64).sum::<f64>() + w[d]);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|a| *a *= shrink);
            if margin < 1.0 {
                for (a, &v) in w[..d].iter_mut().zip(xi) {
                    *a += eta * z * v as f64;
                }
                w[d] += eta * z;
            }
            let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > radius {
                w.iter_mut().for_each(|a| *a *= radius / norm);
            }
        }
        let candidate = LinearHash { w: w[..d].to_vec(), b: w[d] };
        let obj = linear_objective(&candidate, x, targets, opts.reg_strength);
        if obj < best_obj {
            best_obj = obj;
            best = candidate;
        }
    }
    Ok(best)
}
