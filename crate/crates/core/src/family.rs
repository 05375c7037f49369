//! Batch updates for a whole sketch at once.
//!
//! [`LiftFamily`] and [`DropFamily`] hold the per-permutation plans for one
//! edit in flat tables, so updating a sketch of `K` values touches contiguous
//! memory and each inserted 1 costs one pass of `K` mins. The results match
//! [`crate::sketch::LiftPlan`] and [`crate::sketch::DropPlan`] slot for slot.

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::sketch::{min_surviving, HashValue};
use crate::vector::check_positions;

const NONE: u32 = u32::MAX;

fn to_hash(r: u32) -> HashValue {
    if r == NONE {
        HashValue::Empty
    } else {
        HashValue::Rank(r)
    }
}

fn check_len(values: &[HashValue], k: usize) -> Result<()> {
    if values.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: values.len(),
        });
    }
    Ok(())
}

/// The ranks `pi_j(M)` of every permutation `j`, sorted and bucketed by value.
///
/// A prefix count locates the bucket of a value, and since each row is sorted
/// and ends in a sentinel, counting the ranks below it only compares forward
/// from there. Buckets hold at most about one rank on average, so that is
/// usually one or two comparisons. Building a row is a counting sort, linear in
/// `n` and the bucket count.
#[derive(Debug, Clone)]
struct RankTable {
    /// Row length: `n` ranks and the sentinel.
    stride: usize,
    buckets: usize,
    /// Bucket `b` covers values `[b << shift, (b + 1) << shift)`.
    shift: u32,
    entries: Vec<u32>,
    /// `starts[j * (buckets + 1) + b]` counts ranks of row `j` in buckets before `b`.
    starts: Vec<u32>,
}

impl RankTable {
    fn new(dim: usize, n: usize, rows: usize) -> Self {
        let target = (dim / n.max(1)).max(1);
        let shift = usize::BITS - 1 - target.leading_zeros();
        let buckets = (dim >> shift) + 1;
        Self {
            stride: n + 1,
            buckets,
            shift,
            entries: Vec::with_capacity((n + 1) * rows),
            starts: Vec::with_capacity((buckets + 1) * rows),
        }
    }

    /// Appends a row; `cursor` is scratch space reused across rows.
    fn push_row(&mut self, ranks: &[u32], cursor: &mut Vec<u32>) {
        let base = self.starts.len();
        self.starts.resize(base + self.buckets + 1, 0);
        let starts = &mut self.starts[base..];
        for &a in ranks {
            starts[(a >> self.shift) as usize + 1] += 1;
        }
        for b in 1..=self.buckets {
            starts[b] += starts[b - 1];
        }
        cursor.clear();
        cursor.extend_from_slice(&starts[..self.buckets]);
        let row = self.entries.len();
        self.entries.resize(row + self.stride, NONE);
        let entries = &mut self.entries[row..];
        for &a in ranks {
            let b = (a >> self.shift) as usize;
            let lo = starts[b] as usize;
            let mut p = cursor[b] as usize;
            cursor[b] += 1;
            while p > lo && entries[p - 1] > a {
                entries[p] = entries[p - 1];
                p -= 1;
            }
            entries[p] = a;
        }
    }

    /// Row `j` from the first rank in `v`'s bucket onward, and its offset in the row.
    #[inline(always)]
    fn tail(&self, j: usize, v: u32) -> (usize, &[u32]) {
        let lo = self.starts[j * (self.buckets + 1) + (v >> self.shift) as usize] as usize;
        (lo, &self.entries[j * self.stride + lo..(j + 1) * self.stride])
    }

    /// Number of ranks in row `j` that are `<= v`.
    #[inline(always)]
    fn count_le(&self, j: usize, v: u32) -> usize {
        let (lo, rest) = self.tail(j, v);
        let mut c = (rest[0] <= v) as usize;
        while rest[c] <= v {
            c += 1;
        }
        lo + c
    }

    /// Number of ranks in row `j` that are `< v`, and whether `v` itself is one.
    #[inline(always)]
    fn count_lt(&self, j: usize, v: u32) -> (usize, bool) {
        let (lo, rest) = self.tail(j, v);
        let mut c = (rest[0] < v) as usize;
        while rest[c] < v {
            c += 1;
        }
        (lo + c, rest[c] == v)
    }
}

/// Batch insertion at fixed positions, planned for every permutation of a family.
#[derive(Debug, Clone)]
pub struct LiftFamily {
    n: usize,
    k: usize,
    table: RankTable,
    /// Row `i` holds the final rank of the `i`-th inserted feature under each permutation.
    inserted: Vec<u32>,
}

impl LiftFamily {
    pub fn new(perms: &[Permutation], positions: &[u32]) -> Result<Self> {
        let (n, k) = (positions.len(), perms.len());
        let mut table = RankTable::new(perms.first().map_or(0, Permutation::dim), n, k);
        let mut inserted = vec![0; n * k];
        let (mut ranks, mut cursor) = (Vec::with_capacity(n), Vec::new());
        for (j, pi) in perms.iter().enumerate() {
            check_positions(positions, pi.dim())?;
            ranks.clear();
            ranks.extend(positions.iter().map(|&m| pi.rank(m)));
            table.push_row(&ranks, &mut cursor);
            for (i, &a) in ranks.iter().enumerate() {
                inserted[i * k + j] = a + table.count_lt(j, a).0 as u32;
            }
        }
        Ok(Self { n, k, table, inserted })
    }

    pub fn num_perms(&self) -> usize {
        self.k
    }

    /// `bits[i]` is the value inserted at the `i`-th position of the batch.
    pub fn apply(&self, values: &[HashValue], bits: &[bool]) -> Result<Vec<HashValue>> {
        check_len(values, self.k)?;
        if bits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: bits.len(),
            });
        }
        let mut out: Vec<u32> = values
            .iter()
            .enumerate()
            .map(|(j, h)| match h.rank() {
                Some(h) => h + self.table.count_le(j, h) as u32,
                None => NONE,
            })
            .collect();
        for (row, _) in self.inserted.chunks_exact(self.k).zip(bits).filter(|(_, &b)| b) {
            for (o, &r) in out.iter_mut().zip(row) {
                *o = (*o).min(r);
            }
        }
        Ok(out.into_iter().map(to_hash).collect())
    }
}

/// Batch deletion at fixed positions, planned for every permutation of a family.
#[derive(Debug, Clone)]
pub struct DropFamily<'a> {
    perms: &'a [Permutation],
    positions: &'a [u32],
    table: RankTable,
}

impl<'a> DropFamily<'a> {
    pub fn new(perms: &'a [Permutation], positions: &'a [u32]) -> Result<Self> {
        let n = positions.len();
        let mut table = RankTable::new(perms.first().map_or(0, Permutation::dim), n, perms.len());
        let (mut ranks, mut cursor) = (Vec::with_capacity(n), Vec::new());
        for pi in perms {
            check_positions(positions, pi.dim())?;
            ranks.clear();
            ranks.extend(positions.iter().map(|&m| pi.rank(m)));
            table.push_row(&ranks, &mut cursor);
        }
        Ok(Self { perms, positions, table })
    }

    pub fn num_perms(&self) -> usize {
        self.perms.len()
    }

    #[inline]
    fn slot(&self, j: usize, hv: HashValue, support: &[u32]) -> u32 {
        let h = match hv {
            HashValue::Empty => return NONE,
            HashValue::Rank(h) => h,
        };
        let (below, deleted) = self.table.count_lt(j, h);
        if !deleted {
            return h - below as u32;
        }
        // The minimum itself was deleted.
        match min_surviving(support, self.positions, &self.perms[j]) {
            Some(v) => v - self.table.count_lt(j, v).0 as u32,
            None => NONE,
        }
    }

    /// `support` is the pre-deletion support of the vector the sketch was built from.
    pub fn apply(&self, values: &[HashValue], support: &[u32]) -> Result<Vec<HashValue>> {
        check_len(values, self.perms.len())?;
        Ok(values
            .iter()
            .enumerate()
            .map(|(j, &h)| to_hash(self.slot(j, h, support)))
            .collect())
    }
}
