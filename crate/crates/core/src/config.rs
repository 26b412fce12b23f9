//! Training configuration and its flat `key = value` text form.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys,
//! repeated keys and malformed values are errors.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::loss::LossKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InferenceMethod {
    BlockGc,
    Icm,
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Learner {
    Tree,
    Linear,
}

/// How labels turn into pairwise similarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimilarityMode {
    /// Same class is similar, different class dissimilar.
    Multiclass,
    /// At least two shared tags is similar, none is dissimilar, exactly one
    /// is undefined.
    Multilabel,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    other => Err(Error::config(format!(
                        concat!("unknown ", stringify!($ty), " '{}' (expected one of: ", $($name, " ",)+ ")"),
                        other
                    ))),
                }
            }
        }
    };
}

keyword_enum!(InferenceMethod { BlockGc => "blockgc", Icm => "icm", Spectral => "spectral" });
keyword_enum!(Learner { Tree => "tree", Linear => "linear" });
keyword_enum!(SimilarityMode { Multiclass => "multiclass", Multilabel => "multilabel" });

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub bits: usize,
    pub loss: LossKind,
    pub inference: InferenceMethod,
    /// Block GraphCut / ICM passes per bit.
    pub sweeps: usize,
    pub learner: Learner,
    pub tree_depth: u32,
    pub rounds: usize,
    pub trim_fraction: f64,
    pub lazy_fraction: f64,
    pub seed: u64,
    /// Cap on sampled similar and on sampled dissimilar partners per example.
    pub max_neighbors: usize,
    pub similarity: SimilarityMode,
    pub reg_strength: f64,
    pub epochs: usize,
    pub spectral_refine_iters: usize,
    /// First-bit codes start from the spectral solution up to this size,
    /// random codes above it.
    pub init_spectral_max_n: usize,
    /// Fraction of the previous bit's codes flipped to initialize the next bit.
    pub flip_fraction: f64,
    /// Cross-check incremental state and objective monotonicity (slow).
    pub debug_checks: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            bits: 32,
            loss: LossKind::Ksh,
            inference: InferenceMethod::BlockGc,
            sweeps: 2,
            learner: Learner::Tree,
            tree_depth: 4,
            rounds: 200,
            trim_fraction: 0.10,
            lazy_fraction: 0.2,
            seed: 0,
            max_neighbors: 100,
            similarity: SimilarityMode::Multiclass,
            reg_strength: 1.0,
            epochs: 20,
            spectral_refine_iters: 50,
            init_spectral_max_n: 4096,
            flip_fraction: 0.1,
            debug_checks: false,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("invalid value '{value}' for '{key}'")))
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fraction = |name: &str, v: f64| {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must lie in [0, 1), got {v}")))
            }
        };
        fraction("trim_fraction", self.trim_fraction)?;
        fraction("lazy_fraction", self.lazy_fraction)?;
        fraction("flip_fraction", self.flip_fraction)?;
        let positive = [
            ("bits", self.bits),
            ("sweeps", self.sweeps),
            ("tree_depth", self.tree_depth as usize),
            ("rounds", self.rounds),
            ("epochs", self.epochs),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::config(format!("{name} must be at least 1")));
            }
        }
        if !(self.reg_strength > 0.0 && self.reg_strength.is_finite()) {
            return Err(Error::config("reg_strength must be positive"));
        }
        if self.tree_depth > 16 {
            return Err(Error::config("tree_depth above 16 is not supported"));
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults and validates the result.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = TrainConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::config(format!("line {}: repeated key '{key}'", lineno + 1)));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "bits" => self.bits = parse_value(key, value)?,
            "loss" => self.loss = value.parse()?,
            "inference" => self.inference = value.parse()?,
            "sweeps" => self.sweeps = parse_value(key, value)?,
            "learner" => self.learner = value.parse()?,
            "tree_depth" => self.tree_depth = parse_value(key, value)?,
            "rounds" => self.rounds = parse_value(key, value)?,
            "trim_fraction" => self.trim_fraction = parse_value(key, value)?,
            "lazy_fraction" => self.lazy_fraction = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "max_neighbors" => self.max_neighbors = parse_value(key, value)?,
            "similarity" => self.similarity = value.parse()?,
            "reg_strength" => self.reg_strength = parse_value(key, value)?,
            "epochs" => self.epochs = parse_value(key, value)?,
            "spectral_refine_iters" => self.spectral_refine_iters = parse_value(key, value)?,
            "init_spectral_max_n" => self.init_spectral_max_n = parse_value(key, value)?,
            "flip_fraction" => self.flip_fraction = parse_value(key, value)?,
            "debug_checks" => self.debug_checks = parse_value(key, value)?,
            other => return Err(Error::config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Canonical text form; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("bits", &self.bits);
        put("loss", &self.loss);
        put("inference", &self.inference);
        put("sweeps", &self.sweeps);
        put("learner", &self.learner);
        put("tree_depth", &self.tree_depth);
        put("rounds", &self.rounds);
        put("trim_fraction", &self.trim_fraction);
        put("lazy_fraction", &self.lazy_fraction);
        put("seed", &self.seed);
        put("max_neighbors", &self.max_neighbors);
        put("similarity", &self.similarity);
        put("reg_strength", &self.reg_strength);
        put("epochs", &self.epochs);
        put("spectral_refine_iters", &self.spectral_refine_iters);
        put("init_spectral_max_n", &self.init_spectral_max_n);
        put("flip_fraction", &self.flip_fraction);
        put("debug_checks", &self.debug_checks);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_text() {
        let mut cfg = TrainConfig::default();
        cfg.trim_fraction = 0.02;
        cfg.loss = LossKind::Hinge;
        cfg.inference = InferenceMethod::Spectral;
        assert_eq!(TrainConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn comments_and_partial_overrides() {
        let cfg = TrainConfig::parse("# experiment\nbits = 8\n\nloss = exph\n").unwrap();
        assert_eq!(cfg.bits, 8);
        assert_eq!(cfg.loss, LossKind::ExpH);
        assert_eq!(cfg.rounds, 200);
    }

    #[test]
    fn rejects_typos_and_bad_values() {
        for bad in [
            "bitz = 8",
            "bits = eight",
            "bits = 0",
            "trim_fraction = 1.0",
            "inference = graphcut",
            "bits = 8\nbits = 9",
            "just a line",
        ] {
            assert!(matches!(TrainConfig::parse(bad), Err(Error::Config(_))), "{bad}");
        }
    }
}
