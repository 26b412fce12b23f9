//! Pairwise hashing losses and their per-bit quadratic coefficients.
//!
//! Every loss here depends on a pair of codes only through their Hamming
//! distance, so for bit `r` the loss of a pair is one of two values: `l11`
//! when the two new bits agree and `l_neg11` when they differ. The loss of
//! the pair is then `½ z_i z_j (l11 - l_neg11) + ½ (l11 + l_neg11)`, and
//! the coefficient `l11 - l_neg11` is what enters the binary quadratic
//! program for that bit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LossKind {
    /// `(m y - affinity)²`
    Ksh,
    /// `d²` for similar pairs, `max(m/2 - d, 0)²` for dissimilar pairs.
    Hinge,
    /// `(m [y < 0] - d)²`
    Bre,
    /// `exp(y d / m + [y < 0])`
    ExpH,
}

impl LossKind {
    pub const ALL: [LossKind; 4] = [LossKind::Ksh, LossKind::Hinge, LossKind::Bre, LossKind::ExpH];

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Ksh => "ksh",
            LossKind::Hinge => "hinge",
            LossKind::Bre => "bre",
            LossKind::ExpH => "exph",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ksh" => Ok(LossKind::Ksh),
            "hinge" => Ok(LossKind::Hinge),
            "bre" => Ok(LossKind::Bre),
            "exph" => Ok(LossKind::ExpH),
            other => Err(Error::config(format!(
                "unknown loss '{other}' (expected ksh, hinge, bre or exph)"
            ))),
        }
    }
}

/// Loss of a pair with similarity `y` whose `m`-bit codes are `d` apart.
pub fn loss_value(kind: LossKind, m: u32, y: i8, d: u32) -> Result<f64> {
    if d > m {
        return Err(Error::contract(format!("distance {d} exceeds bit length {m}")));
    }
    if y != 1 && y != -1 {
        return Err(Error::contract(format!("similarity sign {y} is not ±1")));
    }
    Ok(loss_unchecked(kind, m, y, d))
}

#[inline]
fn loss_unchecked(kind: LossKind, m: u32, y: i8, d: u32) -> f64 {
    let (m, d, yf) = (m as f64, d as f64, y as f64);
    let dissimilar = if y < 0 { 1.0 } else { 0.0 };
    match kind {
        LossKind::Ksh => {
            let affinity = m - 2.0 * d;
            (m * yf - affinity).powi(2)
        }
        LossKind::Hinge => {
            if y > 0 {
                d * d
            } else {
                (0.5 * m - d).max(0.0).powi(2)
            }
        }
        LossKind::Bre => (m * dissimilar - d).powi(2),
        LossKind::ExpH => (yf * d / m + dissimilar).exp(),
    }
}

/// Per-pair state while solving bit `r` (1-based): the pair's sign and the
/// Hamming distance accumulated over bits `1..r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairState {
    y: i8,
    prev_distance: u32,
    r: u32,
}

impl PairState {
    pub fn new(y: i8, r: u32, prev_distance: u32) -> Result<Self> {
        if y != 1 && y != -1 {
            return Err(Error::contract(format!("similarity sign {y} is not ±1")));
        }
        if r == 0 || prev_distance >= r {
            return Err(Error::contract(format!(
                "previous distance {prev_distance} invalid for bit {r}"
            )));
        }
        Ok(PairState { y, prev_distance, r })
    }

    pub fn y(&self) -> i8 {
        self.y
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn prev_distance(&self) -> u32 {
        self.prev_distance
    }

    /// Affinity over the previous `r - 1` bits.
    pub fn prev_affinity(&self) -> i64 {
        (self.r as i64 - 1) - 2 * self.prev_distance as i64
    }
}

/// `(l11, l_neg11)`: the pair's loss at bit length `r` when its new bits
/// agree and when they differ.
pub fn bit_loss_terms(kind: LossKind, s: PairState) -> (f64, f64) {
    (
        loss_unchecked(kind, s.r, s.y, s.prev_distance),
        loss_unchecked(kind, s.r, s.y, s.prev_distance + 1),
    )
}

/// Quadratic coefficient `l11 - l_neg11` of the pair for the current bit.
#[inline]
pub fn pair_coefficient(kind: LossKind, s: PairState) -> f64 {
    let (same, diff) = bit_loss_terms(kind, s);
    same - diff
}
