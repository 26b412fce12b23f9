//! Solving one bit's binary quadratic problem three ways: Block GraphCut,
//! ICM and the spectral relaxation.
//!
//! ```bash
//! cargo run --release --example block_graphcut
//! ```

use fasthash::bench::{infer_bench, BenchOptions};
use fasthash::inference::{block_graphcut_observed, build_blocks, BlockGcOptions, BqpInstance};
use fasthash::trainer::random_codes;
use fasthash::{build_similarity, Labels, LossKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fasthash::Result<()> {
    let labels = Labels::Classes((0..1000).map(|i| (i % 10) as u32).collect());
    let sim = build_similarity(&labels, 50, 7)?;
    let bqp = BqpInstance::build(&sim, LossKind::Ksh, 1, &vec![0; sim.pair_count()])?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cover = build_blocks(&sim, &mut rng);
    println!(
        "{} pairs, {} blocks, mean block size {:.1}",
        sim.pair_count(),
        cover.len(),
        cover.mean_block_size()
    );

    let init = random_codes(sim.n(), &mut rng);
    println!("random start objective {:.0}", bqp.objective(&init));
    let mut moved = 0;
    let z = block_graphcut_observed(&bqp, &cover, &init, BlockGcOptions::default(), &mut rng, |u| {
        if u.before != u.after {
            moved += 1;
        }
    })?;
    println!("Block-GC objective     {:.0} ({moved} block updates changed codes)", bqp.objective(&z));

    println!();
    for row in infer_bench(&sim, BenchOptions::default(), 7)? {
        println!(
            "{:<9} objective {:>10.0}  per pair {:>8.3}  {:.4}s",
            row.method.name(),
            row.objective,
            row.normalized,
            row.secs
        );
    }
    Ok(())
}
