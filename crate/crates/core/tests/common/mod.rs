#![allow(dead_code)]

use fasthash::dataset::split;
use fasthash::inference::BqpInstance;
use fasthash::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random similarity graph: each unordered pair defined with probability
/// `density`, similar with probability one half.
pub fn random_graph<R: Rng>(n: usize, density: f64, rng: &mut R) -> SimilarityGraph {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                pairs.push((i, j, if rng.random::<bool>() { 1 } else { -1 }));
            }
        }
    }
    SimilarityGraph::from_pairs(n, pairs).unwrap()
}

/// A BQP for a random bit of a random graph: loss, bit index and previous
/// distances are all drawn at random.
pub fn random_bqp<R: Rng>(n: usize, rng: &mut R) -> (SimilarityGraph, BqpInstance) {
    let sim = random_graph(n, rng.random_range(0.2..0.8), rng);
    let kind = LossKind::ALL[rng.random_range(0..4)];
    let r = rng.random_range(1..=8u32);
    let prev: Vec<u32> = (0..sim.pair_count()).map(|_| rng.random_range(0..r)).collect();
    let bqp = BqpInstance::build(&sim, kind, r, &prev).unwrap();
    (sim, bqp)
}

pub fn random_codes<R: Rng>(n: usize, rng: &mut R) -> Vec<i8> {
    (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

/// Every assignment of `n` variables.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u32..1 << n).map(move |mask| (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect())
}

/// Splits a labelled dataset, trains on the database part and evaluates
/// query retrieval against it.
pub fn train_and_evaluate(
    x: &FeatureMatrix,
    y: &[u32],
    queries: usize,
    cfg: &TrainConfig,
) -> Result<RetrievalReport> {
    let (db, q) = split(x.n(), queries, &mut rng(cfg.seed ^ 0x5eed))?;
    let (xd, xq) = (x.select(&db), x.select(&q));
    let yd: Vec<u32> = db.iter().map(|&i| y[i]).collect();
    let yq: Vec<u32> = q.iter().map(|&i| y[i]).collect();
    let sim = build_similarity(&Labels::Classes(yd.clone()), cfg.max_neighbors, cfg.seed)?;
    let (model, _) = train(&xd, &sim, cfg)?;
    let rel = RelevanceOracle::Classes { queries: yq, db: yd };
    evaluate(&encode(&model, &xq)?, &encode(&model, &xd)?, &rel, 100, None)
}

/// Average precision straight from the definition: mean over relevant
/// positions `p` of the precision of the top `p`.
pub fn ap_by_definition(relevant: &[bool]) -> Option<f64> {
    let positions: Vec<usize> = (0..relevant.len()).filter(|&p| relevant[p]).collect();
    if positions.is_empty() {
        return None;
    }
    let precision_at = |p: usize| relevant[..=p].iter().filter(|&&r| r).count() as f64 / (p + 1) as f64;
    Some(positions.iter().map(|&p| precision_at(p)).sum::<f64>() / positions.len() as f64)
}

/// PR area from an explicit point list: one (recall, precision) point per
/// cutoff, prefixed by (0, precision of the first cutoff), then trapezoids.
pub fn pr_auc_by_definition(relevant: &[bool]) -> Option<f64> {
    let total = relevant.iter().filter(|&&r| r).count();
    if total == 0 {
        return None;
    }
    let mut points = Vec::new();
    for k in 1..=relevant.len() {
        let hits = relevant[..k].iter().filter(|&&r| r).count() as f64;
        points.push((hits / total as f64, hits / k as f64));
    }
    points.insert(0, (0.0, points[0].1));
    Some(
        points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum(),
    )
}
