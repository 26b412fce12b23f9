//! End to end: train a 32-bit model on clustered data, save and reload it,
//! encode a held-out query set and report retrieval quality.
//!
//! ```bash
//! cargo run --release --example train_and_retrieve
//! ```

use fasthash::dataset::split;
use fasthash::{build_similarity, encode, evaluate, train, GaussianClusters, HashModel, Labels, TrainConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fasthash::Result<()> {
    let (x, y) = GaussianClusters { n: 1500, ..GaussianClusters::default() }.generate(11)?;
    let (db, queries) = split(x.n(), 300, &mut ChaCha8Rng::seed_from_u64(11))?;
    let labels = Labels::Classes(y);
    let (db_labels, query_labels) = (labels.select(&db), labels.select(&queries));
    let (xd, xq) = (x.select(&db), x.select(&queries));

    let cfg = TrainConfig { bits: 32, tree_depth: 2, rounds: 50, seed: 11, ..TrainConfig::default() };
    let sim = build_similarity(&db_labels, cfg.max_neighbors, cfg.seed)?;
    let (model, report) = train(&xd, &sim, &cfg)?;
    println!(
        "trained {} bits: {} blocks, final loss per pair {:.2}",
        model.bits(),
        report.block_count,
        report.bits.last().unwrap().loss_objective / sim.pair_count() as f64
    );

    let path = std::env::temp_dir().join("fasthash_example.fhsh");
    model.save(&path)?;
    let model = HashModel::load(&path)?;

    let rel = db_labels.relevance(&query_labels)?;
    let retrieval = evaluate(&encode(&model, &xq)?, &encode(&model, &xd)?, &rel, 100, Some(10))?;
    print!("{}", retrieval.to_table());
    std::fs::remove_file(&path)?;
    Ok(())
}
