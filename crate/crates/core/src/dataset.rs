//! Dataset files, labels and ground-truth similarity construction.
//!
//! Feature file: `"FHFM"`, u32 version, u32 n, u32 d, then `n * d` f32
//! values row by row. Code file: `"FHBC"`, u32 m, u32 n, then each
//! example's packed code as little-endian u64 words. Labels are text, one
//! example per line: an integer class, or comma-separated tags.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::BitMatrix;
use crate::config::SimilarityMode;
use crate::error::{Error, Result};
use crate::eval::RelevanceOracle;
use crate::features::FeatureMatrix;
use crate::model::{put_u32, Reader};
use crate::similarity::SimilarityGraph;

pub const FEATURE_MAGIC: &[u8; 4] = b"FHFM";
pub const FEATURE_VERSION: u32 = 1;
pub const CODES_MAGIC: &[u8; 4] = b"FHBC";

pub fn features_to_bytes(x: &FeatureMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 4 * x.values().len());
    out.extend_from_slice(FEATURE_MAGIC);
    put_u32(&mut out, FEATURE_VERSION);
    put_u32(&mut out, x.n() as u32);
    put_u32(&mut out, x.d() as u32);
    for v in x.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn features_from_bytes(bytes: &[u8]) -> Result<FeatureMatrix> {
    let mut r = Reader::new(bytes);
    if r.take(4, "magic")? != FEATURE_MAGIC {
        return Err(Error::CorruptHeader("not a feature file".into()));
    }
    let version = r.u32("version")?;
    if version != FEATURE_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: FEATURE_VERSION,
        });
    }
    let n = r.u32("n")? as usize;
    let d = r.u32("d")? as usize;
    let count = n
        .checked_mul(d)
        .ok_or_else(|| Error::CorruptHeader("n * d overflows".into()))?;
    let mut values = Vec::with_capacity(count.min(bytes.len() / 4));
    for _ in 0..count {
        values.push(r.f32("feature values")?);
    }
    if !r.is_done() {
        return Err(Error::data("trailing bytes after feature values"));
    }
    FeatureMatrix::new(n, d, values)
}

pub fn write_features(path: impl AsRef<Path>, x: &FeatureMatrix) -> Result<()> {
    fs::write(path, features_to_bytes(x))?;
    Ok(())
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    features_from_bytes(&fs::read(path)?)
}

pub fn codes_to_bytes(codes: &BitMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * codes.words().len());
    out.extend_from_slice(CODES_MAGIC);
    put_u32(&mut out, codes.bits() as u32);
    put_u32(&mut out, codes.len() as u32);
    for w in codes.words() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

pub fn codes_from_bytes(bytes: &[u8]) -> Result<BitMatrix> {
    let mut r = Reader::new(bytes);
    if r.take(4, "magic")? != CODES_MAGIC {
        return Err(Error::CorruptHeader("not a code file".into()));
    }
    let m = r.u32("m")? as usize;
    let n = r.u32("n")? as usize;
    if m == 0 {
        return Err(Error::CorruptHeader("code length 0".into()));
    }
    let count = n
        .checked_mul(m.div_ceil(64))
        .ok_or_else(|| Error::CorruptHeader("code size overflows".into()))?;
    let mut words = Vec::with_capacity(count.min(bytes.len() / 8));
    for _ in 0..count {
        words.push(r.u64("code words")?);
    }
    if !r.is_done() {
        return Err(Error::data("trailing bytes after code words"));
    }
    BitMatrix::from_words(m, n, words)
}

pub fn write_codes(path: impl AsRef<Path>, codes: &BitMatrix) -> Result<()> {
    fs::write(path, codes_to_bytes(codes))?;
    Ok(())
}

pub fn read_codes(path: impl AsRef<Path>) -> Result<BitMatrix> {
    codes_from_bytes(&fs::read(path)?)
}

/// Per-example ground truth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Labels {
    Classes(Vec<u32>),
    Tags(Vec<BTreeSet<String>>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Classes(c) => c.len(),
            Labels::Tags(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parses label text; `mode` decides between integer classes and tags.
    pub fn parse(text: &str, mode: SimilarityMode) -> Result<Self> {
        let lines = text.lines().map(str::trim).enumerate();
        match mode {
            SimilarityMode::Multiclass => lines
                .filter(|(_, l)| !l.is_empty())
                .map(|(no, l)| {
                    l.parse()
                        .map_err(|_| Error::data(format!("line {}: '{l}' is not a class id", no + 1)))
                })
                .collect::<Result<_>>()
                .map(Labels::Classes),
            // an empty line is an example with no tags
            SimilarityMode::Multilabel => Ok(Labels::Tags(
                lines
                    .map(|(_, l)| {
                        l.split(',')
                            .map(str::trim)
                            .filter(|t| !t.is_empty())
                            .map(String::from)
                            .collect()
                    })
                    .collect(),
            )),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Labels::Classes(c) => c.iter().for_each(|c| out.push_str(&format!("{c}\n"))),
            Labels::Tags(t) => {
                for tags in t {
                    out.push_str(&tags.iter().cloned().collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn read(path: impl AsRef<Path>, mode: SimilarityMode) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, mode)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn mode(&self) -> SimilarityMode {
        match self {
            Labels::Classes(_) => SimilarityMode::Multiclass,
            Labels::Tags(_) => SimilarityMode::Multilabel,
        }
    }

    pub fn select(&self, indices: &[usize]) -> Labels {
        match self {
            Labels::Classes(c) => Labels::Classes(indices.iter().map(|&i| c[i]).collect()),
            Labels::Tags(t) => Labels::Tags(indices.iter().map(|&i| t[i].clone()).collect()),
        }
    }

    /// Relevance of `queries` against `self` as the database.
    pub fn relevance(&self, queries: &Labels) -> Result<RelevanceOracle> {
        match (queries, self) {
            (Labels::Classes(q), Labels::Classes(db)) => Ok(RelevanceOracle::Classes {
                queries: q.clone(),
                db: db.clone(),
            }),
            (Labels::Tags(q), Labels::Tags(db)) => Ok(RelevanceOracle::Tags {
                queries: q.clone(),
                db: db.clone(),
                min_shared: MIN_SHARED_TAGS,
            }),
            _ => Err(Error::data("query and database labels are of different kinds")),
        }
    }
}

/// Shared tags needed for two examples to count as similar.
pub const MIN_SHARED_TAGS: usize = 2;

/// Samples ground-truth pairs: for each example up to `max_neighbors`
/// similar and `max_neighbors` dissimilar partners, uniformly without
/// replacement, then the union of both directions.
///
/// Multilabel pairs sharing exactly one tag stay undefined. Multilabel
/// candidates are found by a full scan, which is quadratic in n.
pub fn build_similarity(labels: &Labels, max_neighbors: usize, seed: u64) -> Result<SimilarityGraph> {
    let n = labels.len();
    let per_example: Vec<Vec<(usize, usize, i8)>> = match labels {
        Labels::Classes(classes) => {
            let groups = ClassGroups::new(classes);
            let singletons = groups.sizes().filter(|&s| s == 1).count();
            if singletons > 0 {
                log::warn!("{singletons} classes have a single member and get no similar pairs");
            }
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = example_rng(seed, i);
                    let (own, others) = groups.partition(classes[i]);
                    let mut out = Vec::new();
                    // own class, minus i itself
                    let mates: Vec<usize> = own.iter().map(|&j| j as usize).filter(|&j| j != i).collect();
                    for k in sample(&mut rng, mates.len(), max_neighbors.min(mates.len())) {
                        out.push((i, mates[k], 1));
                    }
                    let total = others.0.len() + others.1.len();
                    for k in sample(&mut rng, total, max_neighbors.min(total)) {
                        let j = if k < others.0.len() {
                            others.0[k]
                        } else {
                            others.1[k - others.0.len()]
                        };
                        out.push((i, j as usize, -1));
                    }
                    out
                })
                .collect()
        }
        Labels::Tags(tags) => {
            let lonely = tags.iter().filter(|t| t.len() < MIN_SHARED_TAGS).count();
            if lonely > 0 {
                log::warn!("{lonely} examples have fewer than {MIN_SHARED_TAGS} tags and get no similar pairs");
            }
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = example_rng(seed, i);
                    let (mut similar, mut dissimilar) = (Vec::new(), Vec::new());
                    for j in (0..n).filter(|&j| j != i) {
                        match tags[i].intersection(&tags[j]).take(MIN_SHARED_TAGS).count() {
                            0 => dissimilar.push(j),
                            c if c >= MIN_SHARED_TAGS => similar.push(j),
                            _ => {}
                        }
                    }
                    let mut out = Vec::new();
                    for (pool, y) in [(similar, 1i8), (dissimilar, -1)] {
                        for k in sample(&mut rng, pool.len(), max_neighbors.min(pool.len())) {
                            out.push((i, pool[k], y));
                        }
                    }
                    out
                })
                .collect()
        }
    };
    SimilarityGraph::from_pairs(n, per_example.into_iter().flatten())
}

fn example_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// Examples grouped by class in one array, so "every other class" is two
/// contiguous slices.
struct ClassGroups {
    order: Vec<u32>,
    ranges: std::collections::HashMap<u32, (usize, usize)>,
}

impl ClassGroups {
    fn new(classes: &[u32]) -> Self {
        let mut order: Vec<u32> = (0..classes.len() as u32).collect();
        order.sort_by_key(|&i| (classes[i as usize], i));
        let mut ranges = std::collections::HashMap::new();
        let mut start = 0;
        while start < order.len() {
            let c = classes[order[start] as usize];
            let end = start + order[start..].partition_point(|&i| classes[i as usize] == c);
            ranges.insert(c, (start, end));
            start = end;
        }
        ClassGroups { order, ranges }
    }

    fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranges.values().map(|(a, b)| b - a)
    }

    fn partition(&self, c: u32) -> (&[u32], (&[u32], &[u32])) {
        let (a, b) = self.ranges[&c];
        (&self.order[a..b], (&self.order[..a], &self.order[b..]))
    }
}

/// Random database/query split: `(database, queries)` index lists, each sorted.
pub fn split<R: Rng>(n: usize, queries: usize, rng: &mut R) -> Result<(Vec<usize>, Vec<usize>)> {
    if queries > n {
        return Err(Error::data(format!("cannot take {queries} queries from {n} examples")));
    }
    let mut picked = vec![false; n];
    for k in sample(rng, n, queries) {
        picked[k] = true;
    }
    let (q, db): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| picked[i]);
    Ok((db, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(t: &[&[&str]]) -> Labels {
        Labels::Tags(t.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect())
    }

    #[test]
    fn two_classes_of_two() {
        let g = build_similarity(&Labels::Classes(vec![0, 0, 1, 1]), 100, 7).unwrap();
        assert_eq!(g.pair_count(), 6);
        assert_eq!(g.get(0, 1), 1);
        assert_eq!(g.get(2, 3), 1);
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert_eq!(g.get(i, j), -1);
        }
    }

    #[test]
    fn multilabel_rule() {
        let g = build_similarity(&tags(&[&["a", "b"], &["a", "b"], &["a", "c"], &["x", "y"]]), 100, 1).unwrap();
        assert_eq!(g.get(0, 1), 1);
        assert_eq!(g.get(0, 2), 0);
        assert_eq!(g.get(0, 3), -1);
    }

    #[test]
    fn neighbor_cap_bounds_own_samples() {
        let classes: Vec<u32> = (0..200).map(|i| i % 4).collect();
        let g = build_similarity(&Labels::Classes(classes.clone()), 5, 3).unwrap();
        // each example drew 5 + 5; union with others' draws can only add
        for i in 0..200 {
            let nb = g.neighbors(i);
            assert!(nb.iter().filter(|e| e.y == 1).count() >= 5);
            assert!(nb.iter().filter(|e| e.y == -1).count() >= 5);
            for e in nb {
                assert_eq!(e.y == 1, classes[i] == classes[e.node as usize]);
            }
        }
        assert_eq!(g, build_similarity(&Labels::Classes(classes), 5, 3).unwrap());
    }

    #[test]
    fn files_roundtrip() {
        let x = FeatureMatrix::from_rows(&[vec![1.0, -2.5], vec![0.0, 3.25]]).unwrap();
        let bytes = features_to_bytes(&x);
        assert_eq!(features_from_bytes(&bytes).unwrap(), x);
        assert_eq!(features_to_bytes(&features_from_bytes(&bytes).unwrap()), bytes);
        assert!(matches!(features_from_bytes(&bytes[..bytes.len() - 1]), Err(Error::Truncated(_))));

        let c = BitMatrix::from_codes(&[vec![1, -1, 1], vec![-1, -1, 1]]).unwrap();
        assert_eq!(codes_from_bytes(&codes_to_bytes(&c)).unwrap(), c);
        assert!(matches!(codes_from_bytes(b"FHSH\0\0\0\0"), Err(Error::CorruptHeader(_))));
    }

    #[test]
    fn label_text() {
        let l = Labels::parse("3\n1\n\n2\n", SimilarityMode::Multiclass).unwrap();
        assert_eq!(l, Labels::Classes(vec![3, 1, 2]));
        assert!(Labels::parse("1\nx\n", SimilarityMode::Multiclass).is_err());
        let t = Labels::parse("a, b\nc\n", SimilarityMode::Multilabel).unwrap();
        assert_eq!(t, tags(&[&["a", "b"], &["c"]]));
        assert_eq!(Labels::parse(&t.to_text(), SimilarityMode::Multilabel).unwrap(), t);
    }

    #[test]
    fn split_is_disjoint_and_covering() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (db, q) = split(50, 12, &mut rng).unwrap();
        assert_eq!((db.len(), q.len()), (38, 12));
        let mut all: Vec<usize> = db.iter().chain(&q).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
    }
}
