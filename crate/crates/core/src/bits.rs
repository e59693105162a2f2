use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A fixed-length binary genome.
///
/// Genes are packed most-significant-first: gene `j` lives in word `j / 64`
/// at bit `63 - j % 64`. With this layout the lexicographic order of the word
/// slices is the order of the strings read as binary numbers, which is what
/// BinaryValue selection compares. Padding bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn mask_of(j: usize) -> u64 {
    1u64 << (WORD - 1 - j % WORD)
}

pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// Mask of the valid (non-padding) bits of word `w` for a vector of `len` genes.
#[inline]
pub(crate) fn valid_mask(len: usize, w: usize) -> u64 {
    let start = w * WORD;
    let remaining = len.saturating_sub(start);
    if remaining >= WORD {
        u64::MAX
    } else if remaining == 0 {
        0
    } else {
        !(u64::MAX >> remaining)
    }
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let words = (0..words_for(len)).map(|w| valid_mask(len, w)).collect();
        BitVector { words, len }
    }

    /// Builds a vector from 0/1 gene values; any other value is rejected.
    pub fn from_genes(genes: &[u8]) -> Result<Self> {
        let mut v = BitVector::zeros(genes.len());
        for (j, &g) in genes.iter().enumerate() {
            match g {
                0 => {}
                1 => v.set(j, true),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "gene {j} has value {other}, expected 0 or 1"
                    )))
                }
            }
        }
        Ok(v)
    }

    pub fn from_bools(genes: &[bool]) -> Self {
        let mut v = BitVector::zeros(genes.len());
        for (j, &g) in genes.iter().enumerate() {
            v.set(j, g);
        }
        v
    }

    /// Low `len` bits of `value`, gene 0 being the most significant.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 genes");
        let mut v = BitVector::zeros(len);
        if len > 0 {
            v.words[0] = value << (WORD - len);
        }
        v
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut v = BitVector { words, len };
        v.clear_padding();
        v
    }

    fn clear_padding(&mut self) {
        if let Some(last) = self.words.len().checked_sub(1) {
            self.words[last] &= valid_mask(self.len, last);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len, "gene index {j} out of range for {}", self.len);
        self.words[j / WORD] & mask_of(j) != 0
    }

    #[inline]
    pub fn set(&mut self, j: usize, value: bool) {
        assert!(j < self.len, "gene index {j} out of range for {}", self.len);
        let m = mask_of(j);
        if value {
            self.words[j / WORD] |= m;
        } else {
            self.words[j / WORD] &= !m;
        }
    }

    pub fn flip(&mut self, j: usize) {
        let v = self.get(j);
        self.set(j, !v);
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Length of the maximal all-ones prefix.
    pub fn leading_ones(&self) -> usize {
        let mut total = 0;
        for &w in &self.words {
            let l = w.leading_ones() as usize;
            total += l;
            if l < WORD {
                break;
            }
        }
        total.min(self.len)
    }

    pub fn is_all_ones(&self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(w, &x)| x == valid_mask(self.len, w))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |j| self.get(j))
    }

    /// Indices of the one-genes, ascending.
    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let lz = rest.leading_zeros() as usize;
                    rest &= !(1u64 << (WORD - 1 - lz));
                    Some(w * WORD + lz)
                }
            })
        })
    }

    pub fn complement(&self) -> BitVector {
        let words = self.words.iter().map(|w| !w).collect();
        BitVector::from_words(words, self.len)
    }

    pub fn to_genes(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &BitVector, b: &BitVector) -> Result<usize> {
    if a.len != b.len {
        return Err(Error::DimensionMismatch {
            left: a.len,
            right: b.len,
        });
    }
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in self.iter() {
            f.write_str(if g { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let genes = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::InvalidParameter(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        BitVector::from_genes(&genes)
    }
}
