//! Dense real-valued features and their 256-bin linear quantization.

use crate::error::{Error, Result};

/// Number of quantization bins per dimension.
pub const BINS: usize = 256;

/// Dense `n × d` matrix, one row per example.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    n: usize,
    d: usize,
    values: Vec<f32>,
}

impl FeatureMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::data(format!(
                "feature buffer has {} values, expected {n} x {d}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "non-finite feature at row {}, column {}",
                k / d.max(1),
                k % d.max(1)
            )));
        }
        Ok(FeatureMatrix { n, d, values })
    }

    pub fn from_rows(rows: &[Vec<f32>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::data("feature rows have different lengths"));
        }
        Self::new(rows.len(), d, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    /// Rows picked by `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            n: indices.len(),
            d: self.d,
            values,
        }
    }
}

/// Per-dimension bin edges: `BINS + 1` linearly spaced values from the
/// training minimum to the training maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct BinEdges {
    d: usize,
    edges: Vec<f64>,
}

impl BinEdges {
    /// Fits edges to the range of each dimension.
    pub fn fit(x: &FeatureMatrix) -> Result<Self> {
        if x.n() == 0 {
            return Err(Error::data("cannot quantize an empty feature matrix"));
        }
        let d = x.d();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for i in 0..x.n() {
            for (k, &v) in x.row(i).iter().enumerate() {
                let v = v as f64;
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let mut edges = Vec::with_capacity(d * (BINS + 1));
        for k in 0..d {
            let step = (hi[k] - lo[k]) / BINS as f64;
            edges.extend((0..=BINS).map(|b| lo[k] + b as f64 * step));
            // pin the top edge to the exact maximum
            edges[k * (BINS + 1) + BINS] = hi[k];
        }
        Ok(BinEdges { d, edges })
    }

    pub fn from_raw(d: usize, edges: Vec<f64>) -> Result<Self> {
        if edges.len() != d * (BINS + 1) {
            return Err(Error::data("edge table has the wrong size"));
        }
        for k in 0..d {
            let row = &edges[k * (BINS + 1)..(k + 1) * (BINS + 1)];
            if row.iter().any(|e| !e.is_finite()) || row.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::data(format!("edges of dimension {k} are not monotone")));
            }
        }
        Ok(BinEdges { d, edges })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn raw(&self) -> &[f64] {
        &self.edges
    }

    pub fn dimension(&self, k: usize) -> &[f64] {
        &self.edges[k * (BINS + 1)..(k + 1) * (BINS + 1)]
    }

    /// Bin of `value` in dimension `k`, plus whether it fell outside the
    /// fitted range and was clamped.
    ///
    /// Intervals are `[e_b, e_{b+1})` except the last, which is closed.
    /// Constant dimensions map everything to bin 0.
    #[inline]
    pub fn bin(&self, k: usize, value: f64) -> (u8, bool) {
        let e = self.dimension(k);
        let (lo, hi) = (e[0], e[BINS]);
        if lo == hi {
            return (0, value != lo);
        }
        if value < lo {
            return (0, true);
        }
        if value > hi {
            return ((BINS - 1) as u8, true);
        }
        let b = e[1..BINS].partition_point(|&edge| edge <= value);
        (b as u8, false)
    }

    /// Quantizes `x` with these edges, returning the number of clamped values.
    pub fn apply(&self, x: &FeatureMatrix) -> Result<(QuantizedFeatures, usize)> {
        if x.d() != self.d {
            return Err(Error::contract(format!(
                "feature dimension {} does not match edge table dimension {}",
                x.d(),
                self.d
            )));
        }
        let n = x.n();
        let mut bins = vec![0u8; n * self.d];
        let mut clamped = 0;
        for i in 0..n {
            for (k, &v) in x.row(i).iter().enumerate() {
                let (b, c) = self.bin(k, v as f64);
                bins[k * n + i] = b;
                clamped += c as usize;
            }
        }
        if clamped > 0 {
            log::info!("quantization clamped {clamped} out-of-range feature values");
        }
        Ok((QuantizedFeatures { n, d: self.d, bins }, clamped))
    }
}

/// Bin indices stored per dimension, so one dimension's column is contiguous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizedFeatures {
    n: usize,
    d: usize,
    bins: Vec<u8>,
}

impl QuantizedFeatures {
    pub fn from_columns(n: usize, d: usize, bins: Vec<u8>) -> Result<Self> {
        if bins.len() != n * d {
            return Err(Error::data("bin buffer has the wrong size"));
        }
        Ok(QuantizedFeatures { n, d, bins })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> u8 {
        self.bins[k * self.n + i]
    }

    #[inline]
    pub fn column(&self, k: usize) -> &[u8] {
        &self.bins[k * self.n..(k + 1) * self.n]
    }

    /// Bins of example `i` across all dimensions.
    pub fn row(&self, i: usize) -> Vec<u8> {
        (0..self.d).map(|k| self.get(i, k)).collect()
    }
}

/// Fits edges on `x` and quantizes it.
pub fn quantize(x: &FeatureMatrix) -> Result<(BinEdges, QuantizedFeatures)> {
    let edges = BinEdges::fit(x)?;
    let (q, _) = edges.apply(x)?;
    Ok((edges, q))
}
