//! Bit-packed binary codes.
//!
//! Codes take values in {-1, +1} at the API level. Internally a stored bit
//! `b` encodes the code value `z = 2b - 1`, so `+1` is a set bit. Each
//! example's code is one column and occupies `words_per_code` consecutive
//! `u64` words; bit `r` of a code lives in word `r / 64` at position `r % 64`.

use crate::error::{Error, Result};

#[inline]
pub fn words_for_bits(m: usize) -> usize {
    m.div_ceil(64)
}

/// Packs a {-1, +1} code into words. Any non-positive value is read as -1.
pub fn pack_code(code: &[i8]) -> Vec<u64> {
    let mut words = vec![0u64; words_for_bits(code.len())];
    for (r, &z) in code.iter().enumerate() {
        if z > 0 {
            words[r / 64] |= 1 << (r % 64);
        }
    }
    words
}

/// Hamming distance between two packed codes of equal word length.
#[inline]
pub fn packed_distance(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Number of positions where the two ±1 codes differ.
pub fn hamming_distance(a: &[i8], b: &[i8]) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::contract(format!(
            "code lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(packed_distance(&pack_code(a), &pack_code(b)))
}

/// Inner product of two ±1 codes, `m - 2 * distance`.
pub fn hamming_affinity(a: &[i8], b: &[i8]) -> Result<i64> {
    let d = hamming_distance(a, b)?;
    Ok(a.len() as i64 - 2 * d as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    bits: usize,
    len: usize,
    words_per_code: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    /// All-(-1) codes.
    pub fn new(bits: usize, len: usize) -> Self {
        let words_per_code = words_for_bits(bits);
        BitMatrix {
            bits,
            len,
            words_per_code,
            words: vec![0; words_per_code * len],
        }
    }

    /// Builds a matrix from per-bit rows: `rows[r][j]` is bit `r` of example `j`.
    pub fn from_bit_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let len = rows.first().map_or(0, Vec::len);
        let mut out = BitMatrix::new(rows.len(), len);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != len {
                return Err(Error::contract("bit rows have different lengths"));
            }
            for (j, &z) in row.iter().enumerate() {
                out.set(r, j, z);
            }
        }
        Ok(out)
    }

    /// Builds a matrix from per-example codes.
    pub fn from_codes(codes: &[Vec<i8>]) -> Result<Self> {
        let bits = codes.first().map_or(0, Vec::len);
        let mut out = BitMatrix::new(bits, codes.len());
        for (j, code) in codes.iter().enumerate() {
            if code.len() != bits {
                return Err(Error::contract("codes have different lengths"));
            }
            out.code_words_mut(j).copy_from_slice(&pack_code(code));
        }
        Ok(out)
    }

    /// Wraps raw packed words. Padding bits beyond `bits` must be zero.
    pub fn from_words(bits: usize, len: usize, words: Vec<u64>) -> Result<Self> {
        let words_per_code = words_for_bits(bits);
        if words.len() != words_per_code * len {
            return Err(Error::data(format!(
                "expected {} packed words, found {}",
                words_per_code * len,
                words.len()
            )));
        }
        if !bits.is_multiple_of(64) {
            let pad_mask = !0u64 << (bits % 64);
            for j in 0..len {
                if words[j * words_per_code + words_per_code - 1] & pad_mask != 0 {
                    return Err(Error::data(format!("nonzero padding bits in code {j}")));
                }
            }
        }
        Ok(BitMatrix {
            bits,
            len,
            words_per_code,
            words,
        })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Number of codes (examples).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words_per_code(&self) -> usize {
        self.words_per_code
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn code_words(&self, j: usize) -> &[u64] {
        &self.words[j * self.words_per_code..(j + 1) * self.words_per_code]
    }

    #[inline]
    pub(crate) fn code_words_mut(&mut self, j: usize) -> &mut [u64] {
        &mut self.words[j * self.words_per_code..(j + 1) * self.words_per_code]
    }

    #[inline]
    pub fn get(&self, r: usize, j: usize) -> i8 {
        debug_assert!(r < self.bits && j < self.len);
        let w = self.words[j * self.words_per_code + r / 64];
        if (w >> (r % 64)) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, j: usize, z: i8) {
        debug_assert!(r < self.bits && j < self.len);
        let w = &mut self.words[j * self.words_per_code + r / 64];
        let mask = 1u64 << (r % 64);
        if z > 0 {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// The code of example `j` as ±1 values.
    pub fn code(&self, j: usize) -> Vec<i8> {
        (0..self.bits).map(|r| self.get(r, j)).collect()
    }

    /// Bit `r` across all examples.
    pub fn bit_row(&self, r: usize) -> Vec<i8> {
        (0..self.len).map(|j| self.get(r, j)).collect()
    }

    /// Distance between code `i` of `self` and code `j` of `other`.
    pub fn distance_to(&self, i: usize, other: &BitMatrix, j: usize) -> Result<u32> {
        if self.bits != other.bits {
            return Err(Error::contract(format!(
                "bit lengths differ: {} vs {}",
                self.bits, other.bits
            )));
        }
        Ok(packed_distance(self.code_words(i), other.code_words(j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&[1, 1, -1], &[1, -1, -1]).unwrap(), 1);
        assert_eq!(hamming_distance(&[1, -1, 1, 1, -1], &[1, -1, 1, 1, -1]).unwrap(), 0);
        assert_eq!(hamming_distance(&[1, 1, 1, 1], &[-1, -1, -1, -1]).unwrap(), 4);
    }

    #[test]
    fn affinity_examples() {
        assert_eq!(hamming_affinity(&[1, 1, -1, 1, -1], &[1, 1, -1, 1, -1]).unwrap(), 5);
        assert_eq!(hamming_affinity(&[1, -1], &[-1, 1]).unwrap(), -2);
        assert_eq!(hamming_affinity(&[1, 1, -1], &[1, -1, -1]).unwrap(), 1);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            hamming_distance(&[1, 1], &[1]),
            Err(Error::Contract(_))
        ));
        assert!(hamming_affinity(&[1], &[1, -1]).is_err());
        let a = BitMatrix::new(3, 1);
        let b = BitMatrix::new(4, 1);
        assert!(a.distance_to(0, &b, 0).is_err());
    }

    #[test]
    fn padding_stays_zero() {
        let codes = vec![vec![1i8; 70], vec![-1i8; 70]];
        let m = BitMatrix::from_codes(&codes).unwrap();
        assert_eq!(m.words_per_code(), 2);
        assert_eq!(m.code_words(0)[1] >> 6, 0);
        let mut words = m.words().to_vec();
        words[1] |= 1 << 63;
        assert!(BitMatrix::from_words(70, 2, words).is_err());
    }

    fn code(m: usize) -> impl Strategy<Value = Vec<i8>> {
        prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), m)
    }

    proptest! {
        #[test]
        fn packed_matches_naive((a, b) in (1usize..200).prop_flat_map(|m| (code(m), code(m)))) {
            let naive = a.iter().zip(&b).filter(|(x, y)| x != y).count() as u32;
            prop_assert_eq!(hamming_distance(&a, &b).unwrap(), naive);
            let aff: i64 = a.iter().zip(&b).map(|(&x, &y)| (x * y) as i64).sum();
            prop_assert_eq!(hamming_affinity(&a, &b).unwrap(), aff);
            prop_assert_eq!(aff, a.len() as i64 - 2 * naive as i64);
        }

        #[test]
        fn matrix_roundtrips_codes(codes in (1usize..130, 1usize..6)
            .prop_flat_map(|(m, n)| prop::collection::vec(code(m), n))) {
            let mat = BitMatrix::from_codes(&codes).unwrap();
            for (j, c) in codes.iter().enumerate() {
                prop_assert_eq!(&mat.code(j), c);
            }
            let again = BitMatrix::from_words(mat.bits(), mat.len(), mat.words().to_vec()).unwrap();
            prop_assert_eq!(again, mat);
        }
    }
}
