//! The bit-by-bit training loop and code generation.
//!
//! For each bit the trainer infers target codes for all training examples
//! (conditioned on the codes of earlier bits), fits one hash function to
//! them, and then replaces the targets with what the learned function
//! actually outputs, so later bits see the codes the model will produce.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::{pack_code, BitMatrix};
use crate::boost::{train_boosted_hash, train_linear_hash, BoostOptions, LinearOptions};
use crate::config::{InferenceMethod, Learner, TrainConfig};
use crate::error::{Error, Result};
use crate::features::{BinEdges, FeatureMatrix};
use crate::inference::{
    block_graphcut_bit, build_blocks, icm_bit, spectral_bit, BlockCover, BlockGcOptions, BqpInstance,
    SpectralOptions,
};
use crate::loss::loss_value;
use crate::model::{HashFunction, HashModel};
use crate::similarity::SimilarityGraph;

/// What happened while learning one bit.
#[derive(Clone, Debug, PartialEq)]
pub struct BitDiagnostics {
    /// 1-based bit index.
    pub bit: usize,
    pub bqp_init: f64,
    pub bqp_inferred: f64,
    /// Objective of the codes after they were replaced by the hash outputs.
    pub bqp_final: f64,
    /// Fraction of inferred targets the learned function disagrees with.
    pub train_error: f64,
    /// Total pair loss over the first `bit` bits of the final codes.
    pub loss_objective: f64,
    pub spectral_fallback: bool,
    pub inference_secs: f64,
    pub learner_secs: f64,
}

impl BitDiagnostics {
    pub const CSV_HEADER: &'static str =
        "bit,bqp_init,bqp_inferred,bqp_final,train_error,loss_objective,spectral_fallback,inference_secs,learner_secs";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.6}",
            self.bit,
            self.bqp_init,
            self.bqp_inferred,
            self.bqp_final,
            self.train_error,
            self.loss_objective,
            self.spectral_fallback as u8,
            self.inference_secs,
            self.learner_secs
        )
    }
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub bits: Vec<BitDiagnostics>,
    /// Training codes after every overwrite; equals `encode(model, features)`.
    pub codes: BitMatrix,
    pub block_count: usize,
    pub mean_block_size: f64,
}

impl TrainReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(BitDiagnostics::CSV_HEADER);
        out.push('\n');
        for b in &self.bits {
            out.push_str(&b.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Random ±1 codes.
pub fn random_codes<R: Rng>(n: usize, rng: &mut R) -> Vec<i8> {
    (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

/// Learns `cfg.bits` hash functions from features and pairwise labels.
pub fn train(features: &FeatureMatrix, sim: &SimilarityGraph, cfg: &TrainConfig) -> Result<(HashModel, TrainReport)> {
    cfg.validate()?;
    let n = features.n();
    if sim.n() != n {
        return Err(Error::data(format!(
            "similarity graph has {} examples, features have {n}",
            sim.n()
        )));
    }
    if sim.is_empty() {
        return Err(Error::data("similarity graph has no defined pairs"));
    }
    let edges = BinEdges::fit(features)?;
    let (quantized, _) = edges.apply(features)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cover = match cfg.inference {
        InferenceMethod::BlockGc => build_blocks(sim, &mut rng),
        _ => BlockCover::singletons(n),
    };
    log::info!(
        "training {} bits on {n} examples, {} pairs, {} blocks (mean size {:.1})",
        cfg.bits,
        sim.pair_count(),
        cover.len(),
        cover.mean_block_size()
    );

    let gc_opts = BlockGcOptions {
        sweeps: cfg.sweeps,
        verify: cfg.debug_checks,
    };
    let mut prev_distance = vec![0u32; sim.pair_count()];
    let mut rows: Vec<Vec<i8>> = Vec::with_capacity(cfg.bits);
    let mut functions = Vec::with_capacity(cfg.bits);
    let mut diagnostics = Vec::with_capacity(cfg.bits);

    for bit in 1..=cfg.bits {
        let started = Instant::now();
        let bqp = BqpInstance::build(sim, cfg.loss, bit as u32, &prev_distance)?;
        let spectral_opts = SpectralOptions {
            refine_iters: cfg.spectral_refine_iters,
            seed: rng.random(),
            ..SpectralOptions::default()
        };
        let mut spectral_fallback = false;
        let init = match rows.last() {
            None if n <= cfg.init_spectral_max_n && n >= 2 && cfg.inference != InferenceMethod::Spectral => {
                let out = spectral_bit(&bqp, spectral_opts)?;
                spectral_fallback = out.fell_back;
                out.codes
            }
            None => random_codes(n, &mut rng),
            Some(prev) => {
                let mut z = prev.clone();
                for zi in z.iter_mut() {
                    if rng.random::<f64>() < cfg.flip_fraction {
                        *zi = -*zi;
                    }
                }
                z
            }
        };
        let bqp_init = bqp.objective(&init);
        let inferred = match cfg.inference {
            InferenceMethod::BlockGc => block_graphcut_bit(&bqp, &cover, &init, gc_opts, &mut rng)?,
            InferenceMethod::Icm => icm_bit(&bqp, &init, gc_opts, &mut rng)?,
            InferenceMethod::Spectral => {
                let out = spectral_bit(&bqp, spectral_opts)?;
                spectral_fallback |= out.fell_back;
                out.codes
            }
        };
        let bqp_inferred = bqp.objective(&inferred);
        let inference_secs = started.elapsed().as_secs_f64();

        let started = Instant::now();
        let learner_seed: u64 = rng.random();
        let function = match cfg.learner {
            Learner::Tree => {
                let opts = BoostOptions {
                    rounds: cfg.rounds,
                    max_depth: cfg.tree_depth,
                    trim_fraction: cfg.trim_fraction,
                    lazy_fraction: cfg.lazy_fraction,
                    seed: learner_seed,
                };
                let (h, report) = train_boosted_hash(&quantized, &inferred, &opts)
                    .map_err(|e| Error::Learner { bit, source: Box::new(e) })?;
                if report.constant_targets {
                    log::warn!("bit {bit}: inferred codes are constant; using a single-leaf hash");
                }
                HashFunction::Boosted(h)
            }
            Learner::Linear => {
                let opts = LinearOptions {
                    reg_strength: cfg.reg_strength,
                    epochs: cfg.epochs,
                    seed: learner_seed,
                };
                let h = train_linear_hash(features, &inferred, &opts)
                    .map_err(|e| Error::Learner { bit, source: Box::new(e) })?;
                HashFunction::Linear(h)
            }
        };
        let learner_secs = started.elapsed().as_secs_f64();

        let codes: Vec<i8> = (0..n)
            .into_par_iter()
            .map(|i| function.eval_unchecked(features.row(i), |k| quantized.get(i, k)))
            .collect();
        let train_error = codes.iter().zip(&inferred).filter(|(a, b)| a != b).count() as f64 / n as f64;
        let bqp_final = bqp.objective(&codes);

        let mut loss_objective = 0.0;
        for (p, d) in sim.pairs().iter().zip(prev_distance.iter_mut()) {
            if codes[p.i as usize] != codes[p.j as usize] {
                *d += 1;
            }
            loss_objective += loss_value(cfg.loss, bit as u32, p.y, *d)?;
        }
        rows.push(codes);
        if cfg.debug_checks {
            check_distances(sim, &rows, &prev_distance)?;
        }

        let diag = BitDiagnostics {
            bit,
            bqp_init,
            bqp_inferred,
            bqp_final,
            train_error,
            loss_objective,
            spectral_fallback,
            inference_secs,
            learner_secs,
        };
        log::debug!("{}", diag.csv_row());
        diagnostics.push(diag);
        functions.push(function);
    }

    let model = HashModel::new(features.d(), edges, cfg.clone(), functions)?;
    let report = TrainReport {
        bits: diagnostics,
        codes: BitMatrix::from_bit_rows(&rows)?,
        block_count: cover.len(),
        mean_block_size: cover.mean_block_size(),
    };
    Ok((model, report))
}

fn check_distances(sim: &SimilarityGraph, rows: &[Vec<i8>], prev_distance: &[u32]) -> Result<()> {
    for (p, &d) in sim.pairs().iter().zip(prev_distance) {
        let fresh = rows
            .iter()
            .filter(|row| row[p.i as usize] != row[p.j as usize])
            .count() as u32;
        if fresh != d {
            return Err(Error::Numeric(format!(
                "pair ({}, {}): accumulated distance {d} != recomputed {fresh}",
                p.i, p.j
            )));
        }
    }
    Ok(())
}

/// Codes of every example under `model`, one column per example.
pub fn encode(model: &HashModel, features: &FeatureMatrix) -> Result<BitMatrix> {
    if features.d() != model.d() {
        return Err(Error::contract(format!(
            "features have {} dimensions, model expects {}",
            features.d(),
            model.d()
        )));
    }
    let (quantized, _) = model.edges().apply(features)?;
    let m = model.bits();
    let words: Vec<u64> = (0..features.n())
        .into_par_iter()
        .flat_map_iter(|i| {
            let code: Vec<i8> = model
                .functions()
                .iter()
                .map(|f| f.eval_unchecked(features.row(i), |k| quantized.get(i, k)))
                .collect();
            pack_code(&code)
        })
        .collect();
    BitMatrix::from_words(m, features.n(), words)
}
