//! Supervised hashing: learn compact binary codes that preserve label
//! similarity, then search by Hamming distance.
//!
//! Training alternates two steps per bit. Step 1 infers the bit's codes for
//! all training examples by minimizing a binary quadratic program built
//! from a pairwise loss ([`loss`], [`inference`]), using block-wise graph
//! cuts ([`maxflow`]). Step 2 fits a hash function to those codes: a
//! boosted ensemble of shallow decision trees over quantized features, or a
//! linear classifier ([`boost`]). [`trainer`] runs the loop; [`eval`]
//! scores retrieval.
//!
//! ```no_run
//! use fasthash::{build_similarity, encode, train, GaussianClusters, Labels, TrainConfig};
//!
//! let (x, y) = GaussianClusters::default().generate(0)?;
//! let sim = build_similarity(&Labels::Classes(y), 100, 0)?;
//! let cfg = TrainConfig { bits: 16, ..TrainConfig::default() };
//! let (model, _report) = train(&x, &sim, &cfg)?;
//! let codes = encode(&model, &x)?;
//! assert_eq!(codes.bits(), 16);
//! # Ok::<(), fasthash::Error>(())
//! ```
//!
//! ## Examples
//!
//! One runnable program per capability, `cargo run --release --example <name>`:
//!
//! - `hamming_codes` - packed codes and distances
//! - `losses_and_coefficients` - the four losses and their per-bit coefficients
//! - `graph_cut_energy` - exact minimization of a submodular energy by min cut
//! - `block_graphcut` - Block GraphCut, ICM and spectral on one bit
//! - `boosted_trees` - trees vs a linear hash on XOR data
//! - `train_and_retrieve` - train, save, load, encode, evaluate
//! - `multilabel_similarity` - tag labels and the pairs they define
//! - `file_formats` - feature and code files

pub mod bench;
pub mod bits;
pub mod boost;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod inference;
pub mod loss;
pub mod maxflow;
pub mod model;
pub mod similarity;
pub mod synthetic;
pub mod trainer;

pub use bits::{hamming_affinity, hamming_distance, BitMatrix};
pub use boost::{BoostedHash, LinearHash, Stump, Tree};
pub use config::{InferenceMethod, Learner, SimilarityMode, TrainConfig};
pub use dataset::{build_similarity, Labels};
pub use error::{Error, Result};
pub use eval::{evaluate, RelevanceOracle, RetrievalReport};
pub use features::{quantize, BinEdges, FeatureMatrix, QuantizedFeatures};
pub use inference::BqpInstance;
pub use loss::LossKind;
pub use model::{HashFunction, HashModel};
pub use similarity::SimilarityGraph;
pub use synthetic::{GaussianClusters, XorClusters};
pub use trainer::{encode, train, TrainReport};
