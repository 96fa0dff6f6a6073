use std::fmt;
use std::str::FromStr;

use rand::Rng;

const WORD_BITS: usize = 64;

/// A fixed-length bit string. Locus `i` is bit `i % 64` of word `i / 64`.
///
/// The textual form writes locus 0 first, so `"1010"` has alleles
/// `x0 = 1, x1 = 0, x2 = 1, x3 = 0`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    len: usize,
    words: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid genotype character {found:?} at position {position}")]
pub struct GenotypeParseError {
    pub position: usize,
    pub found: char,
}

impl Genotype {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut g = Self {
            len,
            words: vec![u64::MAX; len.div_ceil(WORD_BITS)],
        };
        g.clear_padding();
        g
    }

    /// Uniformly random genotype of the given length.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut g = Self {
            len,
            words: (0..len.div_ceil(WORD_BITS)).map(|_| rng.gen()).collect(),
        };
        g.clear_padding();
        g
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut g = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            g.set(i, b);
        }
        g
    }

    /// Builds a genotype whose locus `i` is bit `i` of `value`. Requires `len <= 64`.
    pub fn from_index(value: u64, len: usize) -> Self {
        assert!(len <= WORD_BITS, "from_index supports at most 64 loci");
        let mut g = Self::zeros(len);
        if len > 0 {
            g.words[0] = value;
            g.clear_padding();
        }
        g
    }

    /// Integer value with locus `i` as bit `i`, or `None` for more than 64 loci.
    pub fn to_index(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, locus: usize) -> bool {
        debug_assert!(locus < self.len);
        (self.words[locus / WORD_BITS] >> (locus % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub(crate) fn bit(&self, locus: usize) -> usize {
        ((self.words[locus / WORD_BITS] >> (locus % WORD_BITS)) & 1) as usize
    }

    pub fn set(&mut self, locus: usize, allele: bool) {
        assert!(locus < self.len, "locus {locus} out of range");
        let mask = 1u64 << (locus % WORD_BITS);
        if allele {
            self.words[locus / WORD_BITS] |= mask;
        } else {
            self.words[locus / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, locus: usize) {
        assert!(locus < self.len, "locus {locus} out of range");
        self.words[locus / WORD_BITS] ^= 1u64 << (locus % WORD_BITS);
    }

    /// Copy of `self` with one locus flipped.
    pub fn flipped(&self, locus: usize) -> Self {
        let mut g = self.clone();
        g.flip(locus);
        g
    }

    pub fn hamming(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn clear_padding(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genotype({self})")
    }
}

impl FromStr for Genotype {
    type Err = GenotypeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(GenotypeParseError { position, found }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(&bits))
    }
}
