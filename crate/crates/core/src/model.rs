//! Trained models and their binary file format.
//!
//! Layout (integers little-endian, reals IEEE-754 binary64):
//!
//! ```text
//! "FHSH"  u32 version
//! u32 config length, config text (UTF-8, key = value lines)
//! u32 d, then d × 257 f64 bin edges
//! u32 m, then m function records:
//!   u8 tag 0 (tree ensemble): u32 tree count, per tree
//!        u32 depth, 2^(depth+1) - 1 nodes, each
//!          u8 0 (unused) | u8 1, u32 dim, u8 threshold bin, i8 polarity | u8 2, i8 leaf
//!        f64 tree weight
//!   u8 tag 1 (linear): u32 d, d × f64 weights, f64 bias
//! ```

use std::fs;
use std::path::Path;

use crate::boost::{BoostedHash, LinearHash, Node, Stump, Tree};
use crate::config::TrainConfig;
use crate::error::{Error, Result};
use crate::features::{BinEdges, BINS};

pub const MODEL_MAGIC: &[u8; 4] = b"FHSH";
pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum HashFunction {
    Boosted(BoostedHash),
    Linear(LinearHash),
}

impl HashFunction {
    /// Evaluates on one example given its raw features and a bin lookup.
    #[inline]
    pub(crate) fn eval_unchecked(&self, raw: &[f32], bin: impl Fn(usize) -> u8 + Copy) -> i8 {
        match self {
            HashFunction::Boosted(h) => h.eval_with(bin),
            HashFunction::Linear(h) => crate::boost::sign(h.score(raw)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HashModel {
    version: u32,
    d: usize,
    edges: BinEdges,
    config: TrainConfig,
    functions: Vec<HashFunction>,
}

impl HashModel {
    pub fn new(d: usize, edges: BinEdges, config: TrainConfig, functions: Vec<HashFunction>) -> Result<Self> {
        if edges.d() != d {
            return Err(Error::data("edge table dimension does not match the model"));
        }
        if functions.is_empty() {
            return Err(Error::data("a model needs at least one hash function"));
        }
        for f in &functions {
            match f {
                HashFunction::Boosted(h) => {
                    if h.trees().iter().filter_map(Tree::max_dim).any(|k| k as usize >= d) {
                        return Err(Error::data("tree splits on a dimension beyond d"));
                    }
                }
                HashFunction::Linear(h) => {
                    if h.w.len() != d {
                        return Err(Error::data("linear hash dimension does not match the model"));
                    }
                }
            }
        }
        Ok(HashModel {
            version: MODEL_VERSION,
            d,
            edges,
            config,
            functions,
        })
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn bits(&self) -> usize {
        self.functions.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &BinEdges {
        &self.edges
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn functions(&self) -> &[HashFunction] {
        &self.functions
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MODEL_MAGIC);
        put_u32(&mut out, self.version);
        let text = self.config.to_text();
        put_u32(&mut out, text.len() as u32);
        out.extend_from_slice(text.as_bytes());
        put_u32(&mut out, self.d as u32);
        for &e in self.edges.raw() {
            out.extend_from_slice(&e.to_le_bytes());
        }
        put_u32(&mut out, self.functions.len() as u32);
        for f in &self.functions {
            match f {
                HashFunction::Boosted(h) => {
                    out.push(0);
                    put_u32(&mut out, h.trees().len() as u32);
                    for (tree, &w) in h.trees().iter().zip(h.weights()) {
                        put_u32(&mut out, tree.depth());
                        for node in tree.nodes() {
                            match node {
                                Node::Unused => out.push(0),
                                Node::Split(s) => {
                                    out.push(1);
                                    put_u32(&mut out, s.dim);
                                    out.push(s.threshold_bin);
                                    out.push(s.polarity as u8);
                                }
                                Node::Leaf(v) => {
                                    out.push(2);
                                    out.push(*v as u8);
                                }
                            }
                        }
                        out.extend_from_slice(&w.to_le_bytes());
                    }
                }
                HashFunction::Linear(h) => {
                    out.push(1);
                    put_u32(&mut out, h.w.len() as u32);
                    for w in &h.w {
                        out.extend_from_slice(&w.to_le_bytes());
                    }
                    out.extend_from_slice(&h.b.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let magic = r.take(4, "magic")?;
        if magic != MODEL_MAGIC {
            return Err(Error::CorruptHeader(format!("bad magic {magic:?}")));
        }
        let version = r.u32("version")?;
        if version != MODEL_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: MODEL_VERSION,
            });
        }
        let len = r.u32("config length")? as usize;
        let text = std::str::from_utf8(r.take(len, "config")?)
            .map_err(|_| Error::CorruptHeader("config is not UTF-8".into()))?;
        let config = TrainConfig::parse(text).map_err(|e| Error::CorruptHeader(format!("config: {e}")))?;
        let d = r.u32("dimension")? as usize;
        let edge_count = d
            .checked_mul(BINS + 1)
            .ok_or_else(|| Error::CorruptHeader("dimension too large".into()))?;
        let mut edges = Vec::with_capacity(edge_count.min(bytes.len() / 8));
        for _ in 0..edge_count {
            edges.push(r.f64("edge table")?);
        }
        let edges = BinEdges::from_raw(d, edges)?;
        let m = r.u32("bit count")? as usize;
        let mut functions = Vec::with_capacity(m.min(bytes.len()));
        for _ in 0..m {
            let f = match r.u8("function tag")? {
                0 => {
                    let count = r.u32("tree count")? as usize;
                    let mut trees = Vec::with_capacity(count.min(bytes.len()));
                    let mut weights = Vec::with_capacity(count.min(bytes.len()));
                    for _ in 0..count {
                        let depth = r.u32("tree depth")?;
                        if depth > 24 {
                            return Err(Error::Data(format!("tree depth {depth} is implausible")));
                        }
                        let slots = (1usize << (depth + 1)) - 1;
                        let mut nodes = Vec::with_capacity(slots);
                        for _ in 0..slots {
                            nodes.push(match r.u8("tree node")? {
                                0 => Node::Unused,
                                1 => Node::Split(Stump {
                                    dim: r.u32("split dimension")?,
                                    threshold_bin: r.u8("split threshold")?,
                                    polarity: r.u8("split polarity")? as i8,
                                }),
                                2 => Node::Leaf(r.u8("leaf value")? as i8),
                                t => return Err(Error::Data(format!("unknown tree node kind {t}"))),
                            });
                        }
                        trees.push(Tree::from_nodes(depth, nodes)?);
                        weights.push(r.f64("tree weight")?);
                    }
                    HashFunction::Boosted(BoostedHash::new(trees, weights)?)
                }
                1 => {
                    let k = r.u32("linear dimension")? as usize;
                    let mut w = Vec::with_capacity(k.min(bytes.len()));
                    for _ in 0..k {
                        w.push(r.f64("linear weights")?);
                    }
                    let b = r.f64("linear bias")?;
                    HashFunction::Linear(LinearHash::new(w, b)?)
                }
                t => return Err(Error::Data(format!("unknown function record type {t}"))),
            };
            functions.push(f);
        }
        if !r.is_done() {
            return Err(Error::Data("trailing bytes after the last function record".into()));
        }
        if m != config.bits {
            return Err(Error::Data(format!(
                "model holds {m} functions but its config says {} bits",
                config.bits
            )));
        }
        HashModel::new(d, edges, config, functions)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

pub(crate) fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Little-endian cursor that reports truncation with what it was reading.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, len: usize, what: &'static str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Truncated(what)),
        }
    }

    pub(crate) fn u8(&mut self, what: &'static str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    pub(crate) fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self, what: &'static str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    pub(crate) fn f32(&mut self, what: &'static str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    pub(crate) fn f64(&mut self, what: &'static str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    pub(crate) fn is_done(&self) -> bool {
        self.pos == self.bytes.len()
    }
}
