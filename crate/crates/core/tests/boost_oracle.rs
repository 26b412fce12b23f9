mod common;

use common::rng;
use fasthash::boost::*;
use fasthash::features::QuantizedFeatures;
use fasthash::{quantize, FeatureMatrix, XorClusters};
use proptest::prelude::*;
use rand::Rng;

fn stump_error(q: &QuantizedFeatures, labels: &[i8], weights: &[f64], s: &Stump) -> f64 {
    let total: f64 = weights.iter().sum();
    (0..q.n())
        .filter(|&i| s.predict(q.get(i, s.dim as usize)) != labels[i])
        .map(|i| weights[i])
        .sum::<f64>()
        / total
}

fn random_problem(seed: u64) -> (QuantizedFeatures, Vec<i8>, Vec<f64>) {
    let mut r = rng(seed);
    let n = r.random_range(2..=64usize);
    let d = r.random_range(1..=8usize);
    // few distinct bins so ties are common
    let bins = (0..n * d).map(|_| r.random_range(0..6u8) * 40).collect();
    let labels = (0..n).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    let weights = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
    (QuantizedFeatures::from_columns(n, d, bins).unwrap(), labels, weights)
}

proptest! {
    #[test]
    fn stump_matches_exhaustive_search(seed in any::<u64>()) {
        let (q, labels, weights) = random_problem(seed);
        let dims: Vec<usize> = (0..q.d()).collect();
        let (stump, err) = train_stump(&q, &labels, &weights, &dims).unwrap();
        let mut best = f64::INFINITY;
        for dim in 0..q.d() as u32 {
            for threshold_bin in 0..=254u8 {
                for polarity in [1i8, -1] {
                    let s = Stump { dim, threshold_bin, polarity };
                    best = best.min(stump_error(&q, &labels, &weights, &s));
                }
            }
        }
        prop_assert!((err - best).abs() < 1e-12);
        prop_assert!((stump_error(&q, &labels, &weights, &stump) - err).abs() < 1e-12);
    }
}

// two informative dimensions, no noise dimensions
fn xor_problem(seed: u64) -> (FeatureMatrix, QuantizedFeatures, Vec<i8>) {
    let (x, y) = XorClusters { n: 400, d: 2, ..XorClusters::default() }.generate(seed).unwrap();
    let (_, q) = quantize(&x).unwrap();
    let targets = y.iter().map(|&c| if c == 0 { 1 } else { -1 }).collect();
    (x, q, targets)
}

fn training_error(h: &BoostedHash, q: &QuantizedFeatures, targets: &[i8]) -> f64 {
    (0..q.n()).filter(|&i| h.eval(&q.row(i)).unwrap() != targets[i]).count() as f64 / q.n() as f64
}

#[test]
fn exp_loss_strictly_decreases() {
    let (_, q, t) = xor_problem(1);
    let opts = BoostOptions { rounds: 30, max_depth: 2, trim_fraction: 0.1, lazy_fraction: 0.0, seed: 1 };
    let (_, report) = train_boosted_hash(&q, &t, &opts).unwrap();
    assert!(report.rounds.len() > 1);
    let mut prev = 1.0;
    for r in &report.rounds {
        assert!(r.exp_loss < prev, "{} !< {}", r.exp_loss, prev);
        prev = r.exp_loss;
    }
}

#[test]
fn reweighting_makes_last_tree_a_coin_flip() {
    // with no trimming, the updated distribution is ∝ exp(-z F) and the
    // newest tree has weighted error exactly one half under it
    let (_, q, t) = xor_problem(2);
    let opts = BoostOptions { rounds: 8, max_depth: 1, trim_fraction: 0.0, lazy_fraction: 0.0, seed: 2 };
    let (h, report) = train_boosted_hash(&q, &t, &opts).unwrap();
    let mut scores = vec![0.0; q.n()];
    for (k, (tree, &alpha)) in h.trees().iter().zip(h.weights()).enumerate() {
        if report.rounds[k].error == 0.0 {
            break;
        }
        let out: Vec<i8> = (0..q.n()).map(|i| tree.eval(&q, i)).collect();
        for i in 0..q.n() {
            scores[i] += alpha * out[i] as f64;
        }
        let w: Vec<f64> = (0..q.n()).map(|i| (-(t[i] as f64) * scores[i]).exp()).collect();
        let total: f64 = w.iter().sum();
        let err: f64 = (0..q.n()).filter(|&i| out[i] != t[i]).map(|i| w[i]).sum::<f64>() / total;
        assert!((err - 0.5).abs() < 1e-9, "round {k}: {err}");
    }
}

#[test]
fn depth_two_solves_xor_where_stumps_cannot() {
    // boosted stumps are additive per dimension, so no number of rounds fits XOR
    let (_, q, t) = xor_problem(3);
    let fit = |depth| {
        let opts = BoostOptions { rounds: 30, max_depth: depth, seed: 3, ..BoostOptions::default() };
        let (h, _) = train_boosted_hash(&q, &t, &opts).unwrap();
        training_error(&h, &q, &t)
    };
    let (one, two) = (fit(1), fit(2));
    assert!(one > 0.3, "boosted stumps fit XOR too well: {one}");
    assert!(two < 0.05, "boosted depth-2 trees miss XOR: {two}");
}

#[test]
fn linear_hash_cannot_fit_xor() {
    let (x, q, t) = xor_problem(4);
    let lin = train_linear_hash(&x, &t, &LinearOptions::default()).unwrap();
    let lin_err = (0..x.n()).filter(|&i| lin.eval(x.row(i)).unwrap() != t[i]).count() as f64 / x.n() as f64;
    let opts = BoostOptions { rounds: 30, max_depth: 2, seed: 4, ..BoostOptions::default() };
    let (h, _) = train_boosted_hash(&q, &t, &opts).unwrap();
    assert!(lin_err > 0.3);
    assert!(training_error(&h, &q, &t) < 0.05);
}

#[test]
fn training_is_deterministic() {
    let (_, q, t) = xor_problem(5);
    let opts = BoostOptions { rounds: 10, max_depth: 3, seed: 9, ..BoostOptions::default() };
    let (a, ra) = train_boosted_hash(&q, &t, &opts).unwrap();
    let (b, rb) = train_boosted_hash(&q, &t, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra.rounds, rb.rounds);
}

#[test]
fn constant_targets_give_a_leaf() {
    let (_, q, _) = xor_problem(6);
    let t = vec![-1i8; q.n()];
    let (h, report) = train_boosted_hash(&q, &t, &BoostOptions::default()).unwrap();
    assert!(report.constant_targets);
    assert_eq!(h.eval(&q.row(0)).unwrap(), -1);
}

#[test]
fn invalid_inputs_are_rejected() {
    let (_, q, t) = xor_problem(7);
    let w = vec![1.0; q.n()];
    assert!(train_stump(&q, &t, &w, &[]).is_err());
    assert!(train_stump(&q, &t, &w, &[q.d()]).is_err());
    assert!(train_stump(&q, &t, &vec![0.0; q.n()], &[0]).is_err());
    assert!(train_stump(&q, &t[1..], &w, &[0]).is_err());
    let bad = BoostOptions { rounds: 0, ..BoostOptions::default() };
    assert!(train_boosted_hash(&q, &t, &bad).is_err());
}

