//! Side-by-side comparison of the code inference methods on one bit.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::InferenceMethod;
use crate::error::{Error, Result};
use crate::inference::{
    block_graphcut_bit, build_blocks, icm_bit, spectral_bit, BlockGcOptions, BqpInstance, SpectralOptions,
};
use crate::loss::LossKind;
use crate::similarity::SimilarityGraph;
use crate::trainer::random_codes;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub method: InferenceMethod,
    pub seed: u64,
    pub objective: f64,
    /// Objective divided by the number of defined pairs.
    pub normalized: f64,
    pub secs: f64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "method,seed,objective,normalized_objective,secs";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6}",
            self.method, self.seed, self.objective, self.normalized, self.secs
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BenchOptions {
    pub loss: LossKind,
    pub sweeps: usize,
    pub spectral_refine_iters: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            loss: LossKind::Ksh,
            sweeps: 2,
            spectral_refine_iters: 50,
        }
    }
}

/// Solves the first-bit problem of `sim` with Block GraphCut, ICM and the
/// spectral method. Block GraphCut and ICM start from the same random codes;
/// Block GraphCut's time includes building its blocks.
pub fn infer_bench(sim: &SimilarityGraph, opts: BenchOptions, seed: u64) -> Result<Vec<BenchRow>> {
    if sim.is_empty() {
        return Err(Error::data("similarity graph has no defined pairs"));
    }
    let n = sim.n();
    let bqp = BqpInstance::build(sim, opts.loss, 1, &vec![0; sim.pair_count()])?;
    let pairs = sim.pair_count() as f64;
    let gc = BlockGcOptions {
        sweeps: opts.sweeps,
        verify: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = random_codes(n, &mut rng);
    let mut rows = Vec::with_capacity(3);
    let mut push = |method, z: &[i8], started: Instant| {
        let objective = bqp.objective(z);
        rows.push(BenchRow {
            method,
            seed,
            objective,
            normalized: objective / pairs,
            secs: started.elapsed().as_secs_f64(),
        });
    };

    let started = Instant::now();
    let mut gc_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6263);
    let cover = build_blocks(sim, &mut gc_rng);
    let z = block_graphcut_bit(&bqp, &cover, &init, gc, &mut gc_rng)?;
    push(InferenceMethod::BlockGc, &z, started);

    let started = Instant::now();
    let mut icm_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6963);
    let z = icm_bit(&bqp, &init, gc, &mut icm_rng)?;
    push(InferenceMethod::Icm, &z, started);

    let started = Instant::now();
    let out = spectral_bit(
        &bqp,
        SpectralOptions {
            refine_iters: opts.spectral_refine_iters,
            seed,
            ..SpectralOptions::default()
        },
    )?;
    push(InferenceMethod::Spectral, &out.codes, started);
    Ok(rows)
}
