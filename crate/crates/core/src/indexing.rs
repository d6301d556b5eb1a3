//! The index set {0,1}^m of local solutions and matrix rows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element I = (i₁, …, iₘ) of {0,1}^m. Bit i₁ is the least significant
/// bit of [`BinaryIndex::position`], so (0,…,0), (1,0,…,0), (0,1,0,…,0),
/// (1,1,0,…,0), … enumerate positions 0, 1, 2, 3, ….
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryIndex {
    m: usize,
    bits: u32,
}

impl BinaryIndex {
    pub const MAX_M: usize = 16;

    pub fn new(bits: &[u8]) -> Result<Self> {
        let m = bits.len();
        if m == 0 || m > Self::MAX_M {
            return Err(Error::InvalidArgument(format!("index length {m} out of range")));
        }
        let mut packed = 0u32;
        for (k, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => packed |= 1 << k,
                _ => return Err(Error::InvalidArgument(format!("index entry {b} is not 0 or 1"))),
            }
        }
        Ok(BinaryIndex { m, bits: packed })
    }

    /// The index at `position` in the enumeration order.
    pub fn from_position(m: usize, position: usize) -> Self {
        assert!((1..=Self::MAX_M).contains(&m) && position < (1 << m));
        BinaryIndex {
            m,
            bits: position as u32,
        }
    }

    pub fn zero(m: usize) -> Self {
        Self::from_position(m, 0)
    }

    pub fn ones(m: usize) -> Self {
        Self::from_position(m, (1 << m) - 1)
    }

    /// The unit index e_k (1 ≤ k ≤ m).
    pub fn unit(m: usize, k: usize) -> Self {
        assert!((1..=m).contains(&k));
        Self::from_position(m, 1 << (k - 1))
    }

    /// All 2^m indices in enumeration order.
    pub fn all(m: usize) -> impl Iterator<Item = BinaryIndex> {
        (0..1usize << m).map(move |p| Self::from_position(m, p))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn position(&self) -> usize {
        self.bits as usize
    }

    /// i_k for 1 ≤ k ≤ m.
    pub fn bit(&self, k: usize) -> u8 {
        debug_assert!((1..=self.m).contains(&k));
        ((self.bits >> (k - 1)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.m).map(|k| self.bit(k)).collect()
    }

    /// |I| = Σ iₖ.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    fn check_same_m(&self, other: &Self) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(Error::LengthMismatch(self.m, other.m))
        }
    }

    /// J ≤ I componentwise (`self` is J).
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.check_same_m(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    /// Componentwise product I·I′.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same_m(other)?;
        Ok(BinaryIndex {
            m: self.m,
            bits: self.bits & other.bits,
        })
    }

    /// All J with J ≤ self.
    pub fn lower_set(&self) -> impl Iterator<Item = BinaryIndex> + '_ {
        BinaryIndex::all(self.m).filter(move |j| j.bits & !self.bits == 0)
    }

    /// Flips i_k.
    pub fn toggle(&self, k: usize) -> Self {
        BinaryIndex {
            m: self.m,
            bits: self.bits ^ (1 << (k - 1)),
        }
    }
}

impl fmt::Display for BinaryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 1..=self.m {
            write!(f, "{}", self.bit(k))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I({self})")
    }
}

impl FromStr for BinaryIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("bad index character {ch:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        BinaryIndex::new(&bits)
    }
}

impl Serialize for BinaryIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BinaryIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
