mod common;

use common::*;
use fasthash::inference::{brute_force_bqp, BqpInstance};
use fasthash::*;

fn small_config(bits: usize) -> TrainConfig {
    TrainConfig {
        bits,
        tree_depth: 2,
        rounds: 10,
        ..TrainConfig::default()
    }
}

fn clusters(n: usize, seed: u64) -> (FeatureMatrix, Vec<u32>, SimilarityGraph) {
    let (x, y) = GaussianClusters { n, d: 8, classes: 3, spread: 0.5, ..GaussianClusters::default() }
        .generate(seed)
        .unwrap();
    let sim = build_similarity(&Labels::Classes(y.clone()), 20, seed).unwrap();
    (x, y, sim)
}

#[test]
fn two_similar_points_share_codes() {
    let x = FeatureMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let sim = SimilarityGraph::from_pairs(2, [(0, 1, 1)]).unwrap();
    for inference in [InferenceMethod::BlockGc, InferenceMethod::Icm, InferenceMethod::Spectral] {
        let cfg = TrainConfig { inference, ..small_config(1) };
        let (model, report) = train(&x, &sim, &cfg).unwrap();
        let bqp = BqpInstance::build(&sim, cfg.loss, 1, &[0]).unwrap();
        let (_, best) = brute_force_bqp(&bqp).unwrap();
        assert_eq!(report.bits[0].bqp_inferred, best, "{inference}");
        let codes = encode(&model, &x).unwrap();
        assert_eq!(codes.code(0), codes.code(1));
    }
}

#[test]
fn encode_reproduces_training_codes() {
    let (x, _, sim) = clusters(150, 1);
    for learner in [Learner::Tree, Learner::Linear] {
        let cfg = TrainConfig { learner, ..small_config(8) };
        let (model, report) = train(&x, &sim, &cfg).unwrap();
        assert_eq!(encode(&model, &x).unwrap(), report.codes);
        let loaded = HashModel::from_bytes(&model.to_bytes()).unwrap();
        assert_eq!(encode(&loaded, &x).unwrap(), report.codes);
    }
}

#[test]
fn inference_never_worsens_its_start() {
    let (x, _, sim) = clusters(200, 2);
    for inference in [InferenceMethod::BlockGc, InferenceMethod::Icm] {
        let cfg = TrainConfig { inference, debug_checks: true, ..small_config(6) };
        let (_, report) = train(&x, &sim, &cfg).unwrap();
        for b in &report.bits {
            assert!(b.bqp_inferred <= b.bqp_init + 1e-9, "{inference} bit {}", b.bit);
        }
    }
}

#[test]
fn training_is_deterministic() {
    let (x, _, sim) = clusters(120, 3);
    let cfg = small_config(4);
    let (a, ra) = train(&x, &sim, &cfg).unwrap();
    let (b, rb) = train(&x, &sim, &cfg).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_eq!(ra.codes, rb.codes);
}

#[test]
fn mismatched_inputs_are_data_errors() {
    let (x, _, _) = clusters(30, 4);
    let other = SimilarityGraph::from_pairs(5, [(0, 1, 1)]).unwrap();
    assert!(matches!(train(&x, &other, &small_config(2)), Err(Error::Data(_))));
    let empty = SimilarityGraph::from_pairs(30, Vec::<(usize, usize, i8)>::new()).unwrap();
    assert!(matches!(train(&x, &empty, &small_config(2)), Err(Error::Data(_))));
    let bad = TrainConfig { bits: 0, ..small_config(2) };
    let (_, _, sim) = clusters(30, 4);
    assert!(matches!(train(&x, &sim, &bad), Err(Error::Config(_))));
}

#[test]
fn model_file_corruption_is_detected() {
    let (x, _, sim) = clusters(60, 5);
    for learner in [Learner::Tree, Learner::Linear] {
        let (model, _) = train(&x, &sim, &TrainConfig { learner, ..small_config(3) }).unwrap();
        let bytes = model.to_bytes();
        for len in 0..bytes.len() {
            let err = HashModel::from_bytes(&bytes[..len]).unwrap_err();
            assert!(matches!(err, Error::Truncated(_)), "length {len}: {err}");
        }
        let mut bumped = bytes.clone();
        bumped[4] = bumped[4].wrapping_add(1);
        assert!(matches!(HashModel::from_bytes(&bumped), Err(Error::VersionMismatch { .. })));
        let mut magic = bytes.clone();
        magic[0] ^= 0xff;
        assert!(matches!(HashModel::from_bytes(&magic), Err(Error::CorruptHeader(_))));
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(HashModel::from_bytes(&trailing).is_err());
    }
}

#[test]
fn model_round_trips_through_a_file() {
    let (x, _, sim) = clusters(80, 6);
    let (model, _) = train(&x, &sim, &small_config(5)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.fhsh");
    model.save(&path).unwrap();
    let loaded = HashModel::load(&path).unwrap();
    assert_eq!(loaded.to_bytes(), model.to_bytes());
    assert_eq!(loaded.config(), model.config());
}

#[test]
fn encode_rejects_wrong_dimension() {
    let (x, _, sim) = clusters(40, 7);
    let (model, _) = train(&x, &sim, &small_config(2)).unwrap();
    let narrow = FeatureMatrix::from_rows(&[vec![0.0; 3]]).unwrap();
    assert!(encode(&model, &narrow).is_err());
}

#[test]
fn clustered_codes_retrieve_their_class() {
    let (x, y, _) = clusters(300, 8);
    let report = train_and_evaluate(&x, &y, 60, &small_config(16)).unwrap();
    assert!(report.map.value > 0.8, "{}", report.to_table());
}
