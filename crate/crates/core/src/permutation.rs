use std::fmt;

use crate::error::{Error, Result};

/// A bijection on `1..=dim`. `rank(i)` is the rank assigned to feature `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    ranks: Vec<u32>,
}

impl Permutation {
    /// Validates that `ranks` is a rearrangement of `1..=ranks.len()`.
    pub fn new(ranks: Vec<u32>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::invalid("permutation must have dimension >= 1"));
        }
        let dim = ranks.len();
        let mut seen = vec![false; dim];
        for &r in &ranks {
            if r == 0 || r as usize > dim {
                return Err(Error::IndexOutOfRange {
                    index: u64::from(r),
                    dim,
                });
            }
            if std::mem::replace(&mut seen[r as usize - 1], true) {
                return Err(Error::invalid(format!("rank {r} appears twice")));
            }
        }
        Ok(Self { ranks })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ranks: (1..=dim as u32).collect(),
        }
    }

    pub(crate) fn from_ranks_unchecked(ranks: Vec<u32>) -> Self {
        debug_assert!(Self::new(ranks.clone()).is_ok());
        Self { ranks }
    }

    pub fn dim(&self) -> usize {
        self.ranks.len()
    }

    /// Rank of the 1-based feature index `i`.
    ///
    /// Panics if `i` is outside `1..=dim`.
    #[inline]
    pub fn rank(&self, i: u32) -> u32 {
        self.ranks[i as usize - 1]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn into_ranks(self) -> Vec<u32> {
        self.ranks
    }

    /// `inverse()[r - 1]` is the feature index holding rank `r`.
    pub fn inverse(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.ranks.len()];
        for (i, &r) in self.ranks.iter().enumerate() {
            inv[r as usize - 1] = i as u32 + 1;
        }
        inv
    }

    pub(crate) fn check_index(&self, i: u32) -> Result<()> {
        if i == 0 || i as usize > self.dim() {
            return Err(Error::IndexOutOfRange {
                index: u64::from(i),
                dim: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.ranks)
    }
}
