//! Bi-infinite periodic binary sequences.
//!
//! A point is stored as a finite word `w` plus an offset `o` and denotes the
//! sequence `x_j = w[(j + o) mod |w|]`. These are exactly the periodic points
//! of the two-sided full shift, a dense subset on which shifts, inverses and
//! the series metric `sum_j |x_j - y_j| / 2^|j|` are all exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bi-infinite periodic sequence over {0,1}, kept in canonical form:
/// the word is the primitive root in its lexicographically minimal rotation,
/// with the offset reduced accordingly. Two points are equal iff they induce
/// the same sequence, so derived equality is semantic equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicPoint {
    word: Vec<u8>,
    offset: usize,
}

impl SymbolicPoint {
    pub fn new(bits: Vec<u8>, offset: usize) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidPoint("symbolic word must be nonempty".into()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidPoint(
                "symbolic word bits must be 0 or 1".into(),
            ));
        }
        let offset = offset % bits.len();
        Ok(Self::canonical(bits, offset))
    }

    pub fn from_bit_str(s: &str, offset: usize) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::InvalidPoint(format!(
                    "invalid symbolic character {other:?}"
                ))),
            })
            .collect::<Result<_>>()?;
        Self::new(bits, offset)
    }

    pub fn all_zeros() -> Self {
        Self {
            word: vec![0],
            offset: 0,
        }
    }

    pub fn all_ones() -> Self {
        Self {
            word: vec![1],
            offset: 0,
        }
    }

    /// Builds the periodic point whose values on `[start, start + bits.len())`
    /// are `bits` and whose period is exactly `bits.len()`.
    pub fn from_window(bits: Vec<u8>, start: i64) -> Result<Self> {
        let n = bits.len() as i64;
        if n == 0 {
            return Err(Error::InvalidPoint(
                "symbolic window must be nonempty".into(),
            ));
        }
        // x_j = bits[j - start] on the window; with word = bits this needs
        // offset o with (j + o) = (j - start) mod n, i.e. o = -start mod n.
        let offset = (-start).rem_euclid(n) as usize;
        Self::new(bits, offset)
    }

    fn canonical(word: Vec<u8>, offset: usize) -> Self {
        let root_len = primitive_root_len(&word);
        let n = word.len();
        let mut root = Vec::with_capacity(root_len);
        root.extend_from_slice(&word[..root_len]);
        debug_assert!(n.is_multiple_of(root_len));
        let offset = offset % root_len;
        let s = minimal_rotation(&root);
        let p = root.len();
        let rotated: Vec<u8> = (0..p).map(|i| root[(i + s) % p]).collect();
        let offset = (offset + p - s % p) % p;
        // x_j = root[(j+offset') mod p] with offset' shifted so the rotated
        // word induces the same sequence: rotated[(j + o - s)] = root[(j + o)].
        SymbolicPoint {
            word: rotated,
            offset,
        }
    }

    /// Value at index `j` of the induced bi-infinite sequence.
    pub fn at(&self, j: i64) -> u8 {
        let n = self.word.len() as i64;
        let idx = (j + self.offset as i64).rem_euclid(n) as usize;
        self.word[idx]
    }

    /// Minimal period of the sequence.
    pub fn period(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// The shift `sigma^m`: `sigma(x)_j = x_{j+1}`, exact for any `m`.
    pub fn shifted(&self, m: i64) -> Self {
        let n = self.word.len() as i64;
        let offset = (self.offset as i64 + m).rem_euclid(n) as usize;
        SymbolicPoint {
            word: self.word.clone(),
            offset,
        }
    }

    /// Values on the inclusive index window `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<u8> {
        (lo..=hi).map(|j| self.at(j)).collect()
    }
}

fn primitive_root_len(word: &[u8]) -> usize {
    let n = word.len();
    for p in 1..=n {
        if !n.is_multiple_of(p) {
            continue;
        }
        if (0..n).all(|i| word[i] == word[(i + p) % n]) {
            return p;
        }
    }
    n
}

/// Index of the lexicographically minimal rotation. Words here are short, so
/// the quadratic scan is fine.
fn minimal_rotation(word: &[u8]) -> usize {
    let p = word.len();
    let mut best = 0usize;
    for s in 1..p {
        for i in 0..p {
            let a = word[(s + i) % p];
            let b = word[(best + i) % p];
            if a < b {
                best = s;
                break;
            }
            if a > b {
                break;
            }
        }
    }
    best
}

/// Smallest window radius `w` with `2^(1-w) < eps`: two sequences agreeing on
/// all `|j| <= w` are strictly closer than `eps`.
pub fn window_radius_for(eps: f64) -> i64 {
    assert!(eps > 0.0, "window radius needs eps > 0");
    let mut w = 1i64;
    while 2f64.powi(1 - w as i32) >= eps {
        w += 1;
        if w > 1100 {
            break; // below subnormal range; cannot tighten further
        }
    }
    w
}

/// The metric `rho(x, y) = sum_j |x_j - y_j| / 2^|j|`, evaluated in closed
/// form over one common period (both sequences are periodic, so the tails are
/// geometric series). Accurate to a few ulps; use [`distance_exact`] when a
/// rational value is needed.
pub fn distance_f64(x: &SymbolicPoint, y: &SymbolicPoint) -> f64 {
    if x == y {
        return 0.0;
    }
    let l = lcm(x.period(), y.period());
    let diff = |j: i64| -> f64 {
        if x.at(j) == y.at(j) {
            0.0
        } else {
            1.0
        }
    };
    // rho = d_0 + sum_{r=1..L} (d_r + d_{-r}) * 2^-r / (1 - 2^-L)
    let mut weighted = 0.0f64;
    for r in 1..=l as i64 {
        let e = diff(r) + diff(-r);
        if e != 0.0 {
            weighted += e * 2f64.powi(-(r as i32));
        }
    }
    let denom = if l >= 1075 {
        1.0
    } else {
        1.0 - 2f64.powi(-(l as i32))
    };
    diff(0) + weighted / denom
}

/// Exact rational value of the metric.
pub fn distance_exact(x: &SymbolicPoint, y: &SymbolicPoint) -> BigRational {
    let l = lcm(x.period(), y.period());
    let diff = |j: i64| -> u32 {
        if x.at(j) == y.at(j) {
            0
        } else {
            1
        }
    };
    let two = BigInt::from(2);
    let pow_l = two.pow(l as u32);
    let denom = &pow_l - BigInt::one();
    let mut total = BigRational::from_integer(BigInt::from(diff(0)));
    for r in 1..=l as i64 {
        let e = diff(r) + diff(-r);
        if e > 0 {
            // (d_r + d_{-r}) * 2^(L-r) / (2^L - 1)
            let num = BigInt::from(e) * two.pow((l as i64 - r) as u32);
            total += BigRational::new(num, denom.clone());
        }
    }
    total
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One index constraint of a splice: the sequence must read `bits` starting
/// at absolute index `start`.
#[derive(Clone, Debug)]
pub struct SpliceConstraint {
    pub start: i64,
    pub bits: Vec<u8>,
}

/// Builds a point of period exactly `period` satisfying all constraints
/// (indices taken mod `period`). Returns `None` on conflicting constraints.
pub fn splice_periodic(
    constraints: &[SpliceConstraint],
    period: usize,
    fill: u8,
) -> Option<SymbolicPoint> {
    assert!(period > 0);
    let mut slots: Vec<Option<u8>> = vec![None; period];
    for c in constraints {
        for (i, &b) in c.bits.iter().enumerate() {
            let j = c.start + i as i64;
            let idx = j.rem_euclid(period as i64) as usize;
            match slots[idx] {
                Some(prev) if prev != b => return None,
                _ => slots[idx] = Some(b),
            }
        }
    }
    let word: Vec<u8> = slots.into_iter().map(|s| s.unwrap_or(fill)).collect();
    // x_j = word[j mod period] => offset 0 on the raw word.
    Some(SymbolicPoint::new(word, 0).expect("bits validated"))
}

/// Builds a point matching all constraints on their (non-wrapping) span,
/// padded by `margin` fill bits on each side; the word repeats beyond.
pub fn splice_spanning(
    constraints: &[SpliceConstraint],
    margin: usize,
    fill: u8,
) -> Option<SymbolicPoint> {
    let lo = constraints.iter().map(|c| c.start).min()? - margin as i64;
    let hi = constraints
        .iter()
        .map(|c| c.start + c.bits.len() as i64 - 1)
        .max()?
        + margin as i64;
    let span = (hi - lo + 1) as usize;
    let mut slots: Vec<Option<u8>> = vec![None; span];
    for c in constraints {
        for (i, &b) in c.bits.iter().enumerate() {
            let idx = (c.start + i as i64 - lo) as usize;
            match slots[idx] {
                Some(prev) if prev != b => return None,
                _ => slots[idx] = Some(b),
            }
        }
    }
    let word: Vec<u8> = slots.into_iter().map(|s| s.unwrap_or(fill)).collect();
    SymbolicPoint::from_window(word, lo).ok()
}

#[derive(Serialize, Deserialize)]
struct SymbolicPointRepr {
    word: String,
    offset: usize,
}

impl Serialize for SymbolicPoint {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let word: String = self
            .word
            .iter()
            .map(|&b| if b == 0 { '0' } else { '1' })
            .collect();
        SymbolicPointRepr {
            word,
            offset: self.offset,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymbolicPoint {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = SymbolicPointRepr::deserialize(deserializer)?;
        SymbolicPoint::from_bit_str(&repr.word, repr.offset).map_err(serde::de::Error::custom)
    }
}
