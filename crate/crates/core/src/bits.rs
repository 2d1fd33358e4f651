//! Fixed-width bit vectors used for spin and excitation configurations.

use crate::error::{Error, Result};

/// A fixed-length bit vector backed by `u64` words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. XOR is the group
/// operation everywhere in this crate, so the type is deliberately minimal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i >> 6] >> (i & 63) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Iterate indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Lowercase hex encoding, one nibble per 4 bits, bit `i` in nibble `i/4`.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut out = String::with_capacity(nibbles);
        for ni in 0..nibbles {
            let mut v = 0u8;
            for j in 0..4 {
                let bit = ni * 4 + j;
                if bit < self.len && self.get(bit) {
                    v |= 1 << j;
                }
            }
            out.push(char::from_digit(v as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let nibbles = len.div_ceil(4);
        if hex.len() != nibbles {
            return Err(Error::ParseConfig(format!(
                "expected {} hex digits for {} bits, got {}",
                nibbles,
                len,
                hex.len()
            )));
        }
        let mut bits = Bits::new(len);
        for (ni, ch) in hex.chars().enumerate() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::ParseConfig(format!("invalid hex digit {ch:?}")))?
                as u8;
            for j in 0..4 {
                let bit = ni * 4 + j;
                if v >> j & 1 != 0 {
                    if bit >= len {
                        return Err(Error::ParseConfig(
                            "set bit beyond declared length".into(),
                        ));
                    }
                    bits.set(bit, true);
                }
            }
        }
        Ok(bits)
    }
}

impl std::fmt::Debug for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bits[{}; {}]", self.len, self.to_hex())
    }
}
