//! Retrieval evaluation by Hamming ranking.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::bits::{packed_distance, BitMatrix};
use crate::error::{Error, Result};

/// Database indices by ascending distance to a query; equal distances keep
/// ascending database order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    pub indices: Vec<u32>,
    pub distances: Vec<u32>,
}

impl Ranking {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Ranks `db` against code `q` of `queries`, keeping the first `k` entries
/// (`None` keeps all). Counting sort over the `m + 1` possible distances.
pub fn rank(queries: &BitMatrix, q: usize, db: &BitMatrix, k: Option<usize>) -> Result<Ranking> {
    if queries.bits() != db.bits() {
        return Err(Error::contract(format!(
            "query codes have {} bits, database codes {}",
            queries.bits(),
            db.bits()
        )));
    }
    let query = queries.code_words(q);
    let distances: Vec<u32> = (0..db.len()).map(|j| packed_distance(query, db.code_words(j))).collect();
    let mut start = vec![0usize; db.bits() + 2];
    for &d in &distances {
        start[d as usize + 1] += 1;
    }
    for b in 0..=db.bits() {
        start[b + 1] += start[b];
    }
    let mut indices = vec![0u32; db.len()];
    for (j, &d) in distances.iter().enumerate() {
        indices[start[d as usize]] = j as u32;
        start[d as usize] += 1;
    }
    indices.truncate(k.unwrap_or(db.len()).min(db.len()));
    let dist = indices.iter().map(|&j| distances[j as usize]).collect();
    Ok(Ranking {
        indices,
        distances: dist,
    })
}

/// Ground-truth relevance between queries and database items.
#[derive(Clone, Debug)]
pub enum RelevanceOracle {
    /// Same class id.
    Classes { queries: Vec<u32>, db: Vec<u32> },
    /// At least `min_shared` common tags.
    Tags {
        queries: Vec<BTreeSet<String>>,
        db: Vec<BTreeSet<String>>,
        min_shared: usize,
    },
}

impl RelevanceOracle {
    pub fn relevant(&self, q: usize, j: usize) -> bool {
        match self {
            RelevanceOracle::Classes { queries, db } => queries[q] == db[j],
            RelevanceOracle::Tags { queries, db, min_shared } => {
                queries[q].intersection(&db[j]).take(*min_shared).count() >= *min_shared
            }
        }
    }

    pub fn query_count(&self) -> usize {
        match self {
            RelevanceOracle::Classes { queries, .. } => queries.len(),
            RelevanceOracle::Tags { queries, .. } => queries.len(),
        }
    }

    pub fn db_count(&self) -> usize {
        match self {
            RelevanceOracle::Classes { db, .. } => db.len(),
            RelevanceOracle::Tags { db, .. } => db.len(),
        }
    }

    /// Number of relevant database items for query `q`.
    pub fn relevant_count(&self, q: usize) -> usize {
        (0..self.db_count()).filter(|&j| self.relevant(q, j)).count()
    }
}

/// Fraction of relevant items among the first `k` ranked (or all of them,
/// when the ranking is shorter).
pub fn precision_at_k(ranking: &Ranking, rel: &RelevanceOracle, q: usize, k: usize) -> Result<f64> {
    if ranking.is_empty() || k == 0 {
        return Err(Error::contract("precision needs a nonempty ranking and k >= 1"));
    }
    let k = k.min(ranking.len());
    let hits = ranking.indices[..k]
        .iter()
        .filter(|&&j| rel.relevant(q, j as usize))
        .count();
    Ok(hits as f64 / k as f64)
}

/// Relevance flags along a ranking.
fn hits(ranking: &Ranking, rel: &RelevanceOracle, q: usize) -> Vec<bool> {
    ranking.indices.iter().map(|&j| rel.relevant(q, j as usize)).collect()
}

/// Average precision of one full ranking; `None` when nothing is relevant.
pub fn average_precision(ranking: &Ranking, rel: &RelevanceOracle, q: usize) -> Option<f64> {
    let mut found = 0usize;
    let mut sum = 0.0;
    for (p, hit) in hits(ranking, rel, q).into_iter().enumerate() {
        if hit {
            found += 1;
            sum += found as f64 / (p + 1) as f64;
        }
    }
    (found > 0).then(|| sum / found as f64)
}

/// Area under the precision-recall curve of one full ranking, trapezoidal
/// over the points of every cutoff, with the curve started at recall 0
/// at the first cutoff's precision. `None` when nothing is relevant.
pub fn pr_area(ranking: &Ranking, rel: &RelevanceOracle, q: usize) -> Option<f64> {
    let flags = hits(ranking, rel, q);
    let total = flags.iter().filter(|&&h| h).count();
    if total == 0 {
        return None;
    }
    let mut found = 0usize;
    let mut prev: Option<(f64, f64)> = None;
    let mut area = 0.0;
    for (p, hit) in flags.into_iter().enumerate() {
        found += hit as usize;
        let point = (found as f64 / total as f64, found as f64 / (p + 1) as f64);
        let (r0, p0) = prev.unwrap_or((0.0, point.1));
        area += (point.0 - r0) * (p0 + point.1) / 2.0;
        prev = Some(point);
    }
    Some(area)
}

/// Average of a per-query score over queries that have a relevant item.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Averaged {
    pub value: f64,
    pub queries: usize,
    pub skipped: usize,
}

fn average(scores: impl Iterator<Item = Option<f64>>) -> Averaged {
    let (mut sum, mut used, mut skipped) = (0.0, 0, 0);
    for s in scores {
        match s {
            Some(v) => {
                sum += v;
                used += 1;
            }
            None => skipped += 1,
        }
    }
    Averaged {
        value: if used > 0 { sum / used as f64 } else { 0.0 },
        queries: used,
        skipped,
    }
}

/// MAP over full rankings; `rankings[q]` belongs to query `q`.
pub fn mean_average_precision(rankings: &[Ranking], rel: &RelevanceOracle) -> Averaged {
    average(rankings.iter().enumerate().map(|(q, r)| average_precision(r, rel, q)))
}

pub fn precision_recall_auc(rankings: &[Ranking], rel: &RelevanceOracle) -> Averaged {
    average(rankings.iter().enumerate().map(|(q, r)| pr_area(r, rel, q)))
}

/// Majority label among the `k` nearest database codes. A tie between
/// labels goes to the tied label seen first in rank order.
pub fn knn_classify(queries: &BitMatrix, q: usize, db: &BitMatrix, db_labels: &[u32], k: usize) -> Result<u32> {
    if db.is_empty() || k == 0 {
        return Err(Error::contract("knn needs a nonempty database and k >= 1"));
    }
    if db_labels.len() != db.len() {
        return Err(Error::contract("one label per database code is required"));
    }
    let ranking = rank(queries, q, db, Some(k))?;
    let mut votes: HashMap<u32, usize> = HashMap::new();
    for &j in &ranking.indices {
        *votes.entry(db_labels[j as usize]).or_default() += 1;
    }
    let top = votes.values().copied().max().unwrap_or(0);
    let label = ranking
        .indices
        .iter()
        .map(|&j| db_labels[j as usize])
        .find(|l| votes[l] == top)
        .expect("ranking is nonempty");
    Ok(label)
}

/// Headline retrieval numbers for a query set against a database.
#[derive(Clone, Debug, PartialEq)]
pub struct RetrievalReport {
    pub precision_at_k: f64,
    pub k: usize,
    pub map: Averaged,
    pub pr_auc: Averaged,
    /// Fraction of misclassified queries, when class labels and a KNN k were given.
    pub knn_error: Option<f64>,
}

/// Ranks every query against the whole database and evaluates.
pub fn evaluate(
    queries: &BitMatrix,
    db: &BitMatrix,
    rel: &RelevanceOracle,
    k: usize,
    knn: Option<usize>,
) -> Result<RetrievalReport> {
    if db.is_empty() {
        return Err(Error::contract("empty database"));
    }
    if rel.query_count() != queries.len() || rel.db_count() != db.len() {
        return Err(Error::contract("label counts do not match code counts"));
    }
    let rankings: Vec<Ranking> = (0..queries.len())
        .into_par_iter()
        .map(|q| rank(queries, q, db, None))
        .collect::<Result<_>>()?;
    let precision: f64 = rankings
        .iter()
        .enumerate()
        .map(|(q, r)| precision_at_k(r, rel, q, k))
        .sum::<Result<f64>>()?
        / queries.len().max(1) as f64;
    let knn_error = match (knn, rel) {
        (Some(kk), RelevanceOracle::Classes { queries: ql, db: dl }) => {
            let wrong = (0..queries.len())
                .into_par_iter()
                .map(|q| knn_classify(queries, q, db, dl, kk).map(|l| (l != ql[q]) as usize))
                .sum::<Result<usize>>()?;
            Some(wrong as f64 / queries.len().max(1) as f64)
        }
        (Some(_), RelevanceOracle::Tags { .. }) => {
            return Err(Error::contract("KNN classification needs class labels"));
        }
        (None, _) => None,
    };
    Ok(RetrievalReport {
        precision_at_k: precision,
        k,
        map: mean_average_precision(&rankings, rel),
        pr_auc: precision_recall_auc(&rankings, rel),
        knn_error,
    })
}

impl RetrievalReport {
    /// `(metric, value)` rows in a fixed order.
    pub fn metrics(&self) -> Vec<(String, f64)> {
        let mut rows = vec![
            (format!("precision@{}", self.k), self.precision_at_k),
            ("map".to_string(), self.map.value),
            ("pr_auc".to_string(), self.pr_auc.value),
        ];
        if let Some(e) = self.knn_error {
            rows.push(("knn_error".to_string(), e));
        }
        rows
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<16} {:>10}\n", "metric", "value");
        for (name, v) in self.metrics() {
            out.push_str(&format!("{name:<16} {v:>10.6}\n"));
        }
        if self.map.skipped > 0 {
            out.push_str(&format!("({} queries without relevant items skipped)\n", self.map.skipped));
        }
        out
    }

    /// CSV with columns `metric,value,bits,method,seed`.
    pub fn to_csv(&self, bits: usize, method: &str, seed: u64) -> String {
        let mut out = String::from("metric,value,bits,method,seed\n");
        for (name, v) in self.metrics() {
            out.push_str(&format!("{name},{v},{bits},{method},{seed}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(c: &[&[i8]]) -> BitMatrix {
        BitMatrix::from_codes(&c.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn classes(queries: &[u32], db: &[u32]) -> RelevanceOracle {
        RelevanceOracle::Classes {
            queries: queries.to_vec(),
            db: db.to_vec(),
        }
    }

    fn ranking(indices: &[u32]) -> Ranking {
        Ranking {
            indices: indices.to_vec(),
            distances: vec![0; indices.len()],
        }
    }

    #[test]
    fn rank_by_hand() {
        let db = codes(&[&[1, 1], &[1, -1], &[-1, -1]]);
        let q = codes(&[&[1, 1]]);
        let r = rank(&q, 0, &db, None).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2]);
        assert_eq!(r.distances, vec![0, 1, 2]);
        let exact = codes(&[&[-1, 1], &[1, -1], &[1, 1]]);
        assert_eq!(rank(&q, 0, &exact, Some(1)).unwrap().indices, vec![2]);
        assert!(rank(&codes(&[&[1, 1, 1]]), 0, &db, None).is_err());
    }

    #[test]
    fn precision_examples() {
        let rel = classes(&[1], &[1, 0, 1, 0, 1]);
        let r = ranking(&[0, 1, 2, 3, 4]);
        assert_eq!(precision_at_k(&r, &rel, 0, 5).unwrap(), 0.6);
        assert_eq!(precision_at_k(&ranking(&[0, 2]), &rel, 0, 2).unwrap(), 1.0);
        assert_eq!(precision_at_k(&ranking(&[1, 3]), &rel, 0, 2).unwrap(), 0.0);
        // shorter than k: use what there is
        assert_eq!(precision_at_k(&ranking(&[0, 1]), &rel, 0, 100).unwrap(), 0.5);
        assert!(precision_at_k(&ranking(&[]), &rel, 0, 1).is_err());
    }

    #[test]
    fn average_precision_examples() {
        let rel = classes(&[1], &[1, 1, 0]);
        assert_eq!(average_precision(&ranking(&[0, 1, 2]), &rel, 0), Some(1.0));
        let single = classes(&[1], &[0, 1, 0]);
        assert_eq!(average_precision(&ranking(&[0, 1, 2]), &single, 0), Some(0.5));
        let none = classes(&[1], &[0, 0]);
        assert_eq!(average_precision(&ranking(&[0, 1]), &none, 0), None);
        let m = mean_average_precision(&[ranking(&[0, 1])], &none);
        assert_eq!((m.queries, m.skipped), (0, 1));
    }

    #[test]
    fn pr_area_examples() {
        let rel = classes(&[1], &[1, 1, 0, 0]);
        assert_eq!(pr_area(&ranking(&[0, 1, 2, 3]), &rel, 0), Some(1.0));
        // one relevant item ranked last of four: points (0,0) x3 then (1, 1/4)
        let last = classes(&[1], &[0, 0, 0, 1]);
        assert_eq!(pr_area(&ranking(&[0, 1, 2, 3]), &last, 0), Some(0.125));
    }

    #[test]
    fn knn_examples() {
        let db = codes(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, -1], &[-1, -1, -1]]);
        let q = codes(&[&[1, 1, 1]]);
        assert_eq!(knn_classify(&q, 0, &db, &[7, 8, 9, 9], 1).unwrap(), 7);
        assert_eq!(knn_classify(&q, 0, &db, &[1, 1, 2, 2], 3).unwrap(), 1);
        assert_eq!(knn_classify(&q, 0, &db, &[5, 4, 4, 4], 2).unwrap(), 5);
        let empty = BitMatrix::new(3, 0);
        assert!(knn_classify(&q, 0, &empty, &[], 1).is_err());
    }

    #[test]
    fn tag_relevance_needs_two_shared() {
        let set = |t: &[&str]| t.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let rel = RelevanceOracle::Tags {
            queries: vec![set(&["a", "b"])],
            db: vec![set(&["a", "b", "c"]), set(&["a", "c"])],
            min_shared: 2,
        };
        assert!(rel.relevant(0, 0));
        assert!(!rel.relevant(0, 1));
    }
}
