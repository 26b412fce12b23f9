use std::collections::HashMap;

use crate::error::{Error, Result};

/// A defined pair `(i, j)` with `i < j` and its similarity sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub i: u32,
    pub j: u32,
    pub y: i8,
}

/// Neighbor entry in the adjacency of one example.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub node: u32,
    pub y: i8,
    /// Index into [`SimilarityGraph::pairs`].
    pub pair: u32,
}

/// Sparse symmetric pairwise labels. Pairs that are not stored are undefined
/// (`y = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityGraph {
    n: usize,
    pairs: Vec<Pair>,
    offsets: Vec<usize>,
    adjacency: Vec<Neighbor>,
}

impl SimilarityGraph {
    /// Builds the graph from `(i, j, y)` triples in either orientation.
    ///
    /// Repeating a pair with the same sign is accepted once; conflicting
    /// signs, self pairs, zero signs and out-of-range indices are errors.
    pub fn from_pairs<I>(n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, i8)>,
    {
        let mut seen: HashMap<(u32, u32), i8> = HashMap::new();
        for (a, b, y) in triples {
            if a >= n || b >= n {
                return Err(Error::data(format!("pair ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::data(format!("self pair ({a}, {a})")));
            }
            if y != 1 && y != -1 {
                return Err(Error::data(format!("pair ({a}, {b}) has sign {y}, expected ±1")));
            }
            let key = (a.min(b) as u32, a.max(b) as u32);
            match seen.insert(key, y) {
                Some(prev) if prev != y => {
                    return Err(Error::data(format!("pair ({a}, {b}) labelled both {prev} and {y}")))
                }
                _ => {}
            }
        }
        let mut pairs: Vec<Pair> = seen
            .into_iter()
            .map(|((i, j), y)| Pair { i, j, y })
            .collect();
        pairs.sort_unstable_by_key(|p| (p.i, p.j));
        Ok(Self::from_sorted(n, pairs))
    }

    fn from_sorted(n: usize, pairs: Vec<Pair>) -> Self {
        let mut degree = vec![0usize; n + 1];
        for p in &pairs {
            degree[p.i as usize + 1] += 1;
            degree[p.j as usize + 1] += 1;
        }
        for k in 0..n {
            degree[k + 1] += degree[k];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut adjacency = vec![
            Neighbor {
                node: 0,
                y: 0,
                pair: 0
            };
            offsets[n]
        ];
        for (e, p) in pairs.iter().enumerate() {
            let e = e as u32;
            adjacency[fill[p.i as usize]] = Neighbor { node: p.j, y: p.y, pair: e };
            fill[p.i as usize] += 1;
            adjacency[fill[p.j as usize]] = Neighbor { node: p.i, y: p.y, pair: e };
            fill[p.j as usize] += 1;
        }
        SimilarityGraph {
            n,
            pairs,
            offsets,
            adjacency,
        }
    }

    /// Number of examples.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Neighbors of `i`, ordered by pair index.
    pub fn neighbors(&self, i: usize) -> &[Neighbor] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Sign of pair `(i, j)`, 0 when undefined.
    pub fn get(&self, i: usize, j: usize) -> i8 {
        if i == j || i >= self.n || j >= self.n {
            return 0;
        }
        let (a, b) = if self.neighbors(i).len() <= self.neighbors(j).len() {
            (i, j)
        } else {
            (j, i)
        };
        self.neighbors(a)
            .iter()
            .find(|nb| nb.node as usize == b)
            .map_or(0, |nb| nb.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_input() {
        assert!(SimilarityGraph::from_pairs(3, [(0, 0, 1)]).is_err());
        assert!(SimilarityGraph::from_pairs(3, [(0, 3, 1)]).is_err());
        assert!(SimilarityGraph::from_pairs(3, [(0, 1, 0)]).is_err());
        assert!(SimilarityGraph::from_pairs(3, [(0, 1, 1), (1, 0, -1)]).is_err());
    }

    #[test]
    fn duplicate_orientations_collapse() {
        let g = SimilarityGraph::from_pairs(3, [(0, 1, 1), (1, 0, 1), (2, 1, -1)]).unwrap();
        assert_eq!(g.pair_count(), 2);
        assert_eq!(g.get(1, 0), 1);
        assert_eq!(g.get(1, 2), -1);
        assert_eq!(g.get(0, 2), 0);
        assert_eq!(g.get(1, 1), 0);
        assert_eq!(g.neighbors(1).len(), 2);
    }

    proptest! {
        #[test]
        fn symmetric_and_duplicate_free(
            triples in prop::collection::vec((0usize..12, 0usize..12, prop::bool::ANY), 0..60)
        ) {
            // keep the first sign given to each unordered pair
            let mut first = HashMap::new();
            let clean: Vec<_> = triples
                .into_iter()
                .filter(|(a, b, _)| a != b)
                .map(|(a, b, s)| {
                    let y = *first.entry((a.min(b), a.max(b))).or_insert(if s { 1i8 } else { -1 });
                    (a, b, y)
                })
                .collect();
            let g = SimilarityGraph::from_pairs(12, clean).unwrap();
            for i in 0..12 {
                for j in 0..12 {
                    prop_assert_eq!(g.get(i, j), g.get(j, i));
                }
            }
            let mut keys: Vec<_> = g.pairs().iter().map(|p| (p.i, p.j)).collect();
            prop_assert!(g.pairs().iter().all(|p| p.i < p.j));
            keys.dedup();
            prop_assert_eq!(keys.len(), g.pair_count());
            let total: usize = (0..12).map(|i| g.neighbors(i).len()).sum();
            prop_assert_eq!(total, 2 * g.pair_count());
        }
    }
}
