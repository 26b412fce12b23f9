//! Small labelled datasets for demos and acceptance runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Isotropic Gaussian blobs, one per class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianClusters {
    pub n: usize,
    pub d: usize,
    pub classes: usize,
    /// Standard deviation of the cluster centers around the origin.
    pub center_scale: f64,
    /// Standard deviation of points around their center.
    pub spread: f64,
}

impl Default for GaussianClusters {
    fn default() -> Self {
        GaussianClusters {
            n: 2500,
            d: 100,
            classes: 10,
            center_scale: 1.0,
            spread: 2.0,
        }
    }
}

impl GaussianClusters {
    /// Examples are assigned to classes round-robin.
    pub fn generate(&self, seed: u64) -> Result<(FeatureMatrix, Vec<u32>)> {
        if self.classes == 0 || self.d == 0 {
            return Err(Error::config("need at least one class and one dimension"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = gaussian(&mut rng, self.classes * self.d, self.center_scale)?;
        let noise = Normal::new(0.0, self.spread).map_err(|e| Error::config(e.to_string()))?;
        let mut values = Vec::with_capacity(self.n * self.d);
        let labels: Vec<u32> = (0..self.n).map(|i| (i % self.classes) as u32).collect();
        for &c in &labels {
            let center = &centers[c as usize * self.d..(c as usize + 1) * self.d];
            values.extend(center.iter().map(|&m| (m + noise.sample(&mut rng)) as f32));
        }
        Ok((FeatureMatrix::new(self.n, self.d, values)?, labels))
    }
}

/// Two classes laid out like XOR in the first two dimensions: class 0 sits
/// at `(+a, +a)` and `(-a, -a)`, class 1 at `(+a, -a)` and `(-a, +a)`.
/// Remaining dimensions are pure noise. No single hyperplane separates the
/// classes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XorClusters {
    pub n: usize,
    pub d: usize,
    pub offset: f64,
    pub spread: f64,
}

impl Default for XorClusters {
    fn default() -> Self {
        XorClusters {
            n: 1200,
            d: 10,
            offset: 2.0,
            spread: 0.8,
        }
    }
}

impl XorClusters {
    pub fn generate(&self, seed: u64) -> Result<(FeatureMatrix, Vec<u32>)> {
        if self.d < 2 {
            return Err(Error::config("XOR clusters need at least two dimensions"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, self.spread).map_err(|e| Error::config(e.to_string()))?;
        let mut values = Vec::with_capacity(self.n * self.d);
        let mut labels = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let class = (i % 2) as u32;
            let s1: f64 = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let s2 = if class == 0 { s1 } else { -s1 };
            values.push((s1 * self.offset + noise.sample(&mut rng)) as f32);
            values.push((s2 * self.offset + noise.sample(&mut rng)) as f32);
            for _ in 2..self.d {
                values.push(noise.sample(&mut rng) as f32);
            }
            labels.push(class);
        }
        Ok((FeatureMatrix::new(self.n, self.d, values)?, labels))
    }
}

fn gaussian<R: Rng>(rng: &mut R, len: usize, sd: f64) -> Result<Vec<f64>> {
    let dist = Normal::new(0.0, sd).map_err(|e| Error::config(e.to_string()))?;
    Ok((0..len).map(|_| dist.sample(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_determinism() {
        let g = GaussianClusters {
            n: 30,
            d: 4,
            classes: 3,
            ..Default::default()
        };
        let (x, y) = g.generate(5).unwrap();
        assert_eq!((x.n(), x.d()), (30, 4));
        assert_eq!(&y[..4], &[0, 1, 2, 0]);
        assert_eq!(g.generate(5).unwrap().0, x);
        assert_ne!(g.generate(6).unwrap().0, x);
    }

    #[test]
    fn xor_quadrants() {
        let (x, y) = XorClusters {
            n: 200,
            d: 3,
            offset: 5.0,
            spread: 0.1,
        }
        .generate(1)
        .unwrap();
        for i in 0..200 {
            let r = x.row(i);
            assert_eq!((r[0] * r[1] > 0.0) as u32, 1 - y[i]);
        }
    }
}
