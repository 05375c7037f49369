//! Sparse binary feature vectors and the column edits applied to them.
//!
//! Every index in this module is 1-based. A vector of dimension `d` stores the
//! sorted set of positions in `1..=d` whose bit is set.

use std::fmt;

use crate::error::{Error, Result};

/// A point in `{0,1}^dim` stored as its sorted support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseBinaryVector {
    dim: usize,
    support: Vec<u32>,
}

impl SparseBinaryVector {
    /// Builds a vector from an already sorted, duplicate-free support.
    pub fn new(dim: usize, support: Vec<u32>) -> Result<Self> {
        check_positions(&support, dim)?;
        Ok(Self { dim, support })
    }

    /// Builds a vector from support indices in any order; duplicates collapse.
    pub fn from_unsorted(dim: usize, mut support: Vec<u32>) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        Self::new(dim, support)
    }

    /// Reads a dense 0/1 slice, e.g. `[1,0,0,1]`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut support = Vec::new();
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => support.push(i as u32 + 1),
                other => return Err(Error::invalid(format!("bit value {other} is not 0 or 1"))),
            }
        }
        Ok(Self {
            dim: bits.len(),
            support,
        })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            support: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn count_ones(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, index: u32) -> bool {
        self.support.binary_search(&index).is_ok()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        let mut bits = vec![0u8; self.dim];
        for &s in &self.support {
            bits[s as usize - 1] = 1;
        }
        bits
    }
}

impl fmt::Display for SparseBinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.to_bits().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

/// Positions and bit values of features inserted in one batch.
///
/// Positions are given in the pre-insertion frame and must be strictly
/// increasing; the `i`-th inserted feature (0-based) lands at index
/// `positions[i] + i` of the edited vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionBatch {
    positions: Vec<u32>,
    bits: Vec<bool>,
}

impl InsertionBatch {
    pub fn new(positions: Vec<u32>, bits: Vec<bool>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("insertion batch must not be empty"));
        }
        if positions.len() != bits.len() {
            return Err(Error::invalid(format!(
                "insertion batch has {} positions but {} bits",
                positions.len(),
                bits.len()
            )));
        }
        check_increasing(&positions)?;
        Ok(Self { positions, bits })
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Checks that every position addresses an existing feature of a `dim`-dimensional vector.
    pub fn validate(&self, dim: usize) -> Result<()> {
        check_positions(&self.positions, dim)
    }

    /// Indices in the edited `(dim + n)`-dimensional frame where the new features sit.
    pub fn post_insertion_positions(&self) -> Vec<u32> {
        self.positions
            .iter()
            .enumerate()
            .map(|(i, &m)| m + i as u32)
            .collect()
    }
}

/// Positions of features deleted in one batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionBatch {
    positions: Vec<u32>,
}

impl DeletionBatch {
    pub fn new(positions: Vec<u32>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("deletion batch must not be empty"));
        }
        check_increasing(&positions)?;
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        check_positions(&self.positions, dim)
    }
}

/// Inserts the batch's features into `x`, returning a vector of dimension `x.dim() + n`.
///
/// Old feature `j` moves to `j + |{i : m_i <= j}|`.
pub fn insert_features(x: &SparseBinaryVector, batch: &InsertionBatch) -> Result<SparseBinaryVector> {
    batch.validate(x.dim)?;
    let n = batch.len();
    let mut support = Vec::with_capacity(x.support.len() + n);
    let mut old = x.support.iter().copied().peekable();
    for (i, (&m, &bit)) in batch.positions.iter().zip(&batch.bits).enumerate() {
        // old features strictly before m keep the shift accumulated so far
        while let Some(&j) = old.peek() {
            if j >= m {
                break;
            }
            support.push(j + i as u32);
            old.next();
        }
        if bit {
            support.push(m + i as u32);
        }
    }
    support.extend(old.map(|j| j + n as u32));
    Ok(SparseBinaryVector {
        dim: x.dim + n,
        support,
    })
}

/// Removes the batch's features from `x`, returning a vector of dimension `x.dim() - n`.
///
/// Surviving feature `j` maps to `j - |{m in M : m < j}|`.
pub fn delete_features(x: &SparseBinaryVector, batch: &DeletionBatch) -> Result<SparseBinaryVector> {
    batch.validate(x.dim)?;
    let deleted = &batch.positions;
    let mut support = Vec::with_capacity(x.support.len());
    let mut below = 0usize;
    for &j in &x.support {
        while below < deleted.len() && deleted[below] < j {
            below += 1;
        }
        if below < deleted.len() && deleted[below] == j {
            continue;
        }
        support.push(j - below as u32);
    }
    Ok(SparseBinaryVector {
        dim: x.dim - deleted.len(),
        support,
    })
}

fn check_increasing(positions: &[u32]) -> Result<()> {
    for w in positions.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::NotStrictlyIncreasing { index: w[1] });
        }
    }
    Ok(())
}

pub(crate) fn check_positions(positions: &[u32], dim: usize) -> Result<()> {
    check_increasing(positions)?;
    if let (Some(&first), Some(&last)) = (positions.first(), positions.last()) {
        if first == 0 {
            return Err(Error::IndexOutOfRange { index: 0, dim });
        }
        if last as usize > dim {
            return Err(Error::IndexOutOfRange {
                index: u64::from(last),
                dim,
            });
        }
    }
    Ok(())
}
