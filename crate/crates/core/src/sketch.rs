//! MinHash values, sketches, and the in-place update rules for feature edits.
//!
//! Every rule here returns exactly the minhash of the edited vector under the
//! lifted or dropped permutation from [`crate::permgen`]. None of them build
//! that permutation: an insertion needs only the ranks `pi(m)` of the touched
//! positions, and a deletion additionally needs the support of the vector
//! when the current minimum itself is removed.
//!
//! Two facts drive the batch rules. After lifting at positions `M`, each new
//! feature sits directly below the old feature it displaced, so its final
//! rank is `pi(m_i) + |{j : pi(m_j) < pi(m_i)}|` and an old rank `h` becomes
//! `h + |{x in pi_M : x <= h}|`. Dropping is the mirror image.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::permutation::Permutation;
use crate::vector::{check_positions, DeletionBatch, InsertionBatch, SparseBinaryVector};

/// Minimum rank over a support, or `Empty` for a vector with no set bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashValue {
    Empty,
    Rank(u32),
}

impl HashValue {
    pub fn rank(self) -> Option<u32> {
        match self {
            HashValue::Empty => None,
            HashValue::Rank(r) => Some(r),
        }
    }

    pub fn is_empty(self) -> bool {
        self == HashValue::Empty
    }
}

impl From<Option<u32>> for HashValue {
    fn from(v: Option<u32>) -> Self {
        v.map_or(HashValue::Empty, HashValue::Rank)
    }
}

impl fmt::Display for HashValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HashValue::Empty => f.write_str("EMPTY"),
            HashValue::Rank(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for HashValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "EMPTY" => Ok(HashValue::Empty),
            t => t
                .parse::<u32>()
                .ok()
                .filter(|&r| r >= 1)
                .map(HashValue::Rank)
                .ok_or_else(|| Error::invalid(format!("invalid hash value {s:?}"))),
        }
    }
}

/// One point's minhash under each of `K` permutations of dimension `dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sketch {
    dim: usize,
    values: Vec<HashValue>,
}

impl Sketch {
    pub fn new(dim: usize, values: Vec<HashValue>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sketch needs at least one slot"));
        }
        if let Some(bad) = values
            .iter()
            .filter_map(|v| v.rank())
            .find(|&r| r == 0 || r as usize > dim)
        {
            return Err(Error::IndexOutOfRange {
                index: u64::from(bad),
                dim,
            });
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_perms(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[HashValue] {
        &self.values
    }
}

/// Smallest rank `pi(s)` over the support of `x`.
pub fn min_hash(x: &SparseBinaryVector, pi: &Permutation) -> Result<HashValue> {
    check_dims(pi.dim(), x.dim())?;
    Ok(min_rank(x.support(), pi))
}

#[inline]
fn min_rank(support: &[u32], pi: &Permutation) -> HashValue {
    support.iter().map(|&s| pi.rank(s)).min().into()
}

pub fn build_sketch(x: &SparseBinaryVector, perms: &[Permutation]) -> Result<Sketch> {
    if perms.is_empty() {
        return Err(Error::invalid("sketch needs at least one permutation"));
    }
    let values = perms
        .iter()
        .map(|pi| min_hash(x, pi))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sketch {
        dim: x.dim(),
        values,
    })
}

/// Single-feature insertion rule. `a_m` is the rank `pi(m)` of the insertion slot.
#[inline]
pub fn lift_hash(h_old: HashValue, a_m: u32, bit: bool) -> HashValue {
    match h_old {
        HashValue::Rank(h) if h < a_m => h_old,
        HashValue::Rank(h) => HashValue::Rank(if bit { a_m } else { h + 1 }),
        HashValue::Empty if bit => HashValue::Rank(a_m),
        HashValue::Empty => HashValue::Empty,
    }
}

/// Single-feature deletion rule. `recompute` is called only when the deleted
/// feature held the minimum; it must return the minimum over the remaining
/// support in the pre-deletion ranking (always above `a_m`).
#[inline]
pub fn drop_hash_with<F>(h_old: HashValue, a_m: u32, recompute: F) -> HashValue
where
    F: FnOnce() -> HashValue,
{
    match h_old {
        HashValue::Empty => HashValue::Empty,
        HashValue::Rank(h) if h < a_m => h_old,
        HashValue::Rank(h) if h > a_m => HashValue::Rank(h - 1),
        HashValue::Rank(_) => match recompute() {
            HashValue::Rank(v) => HashValue::Rank(v - 1),
            HashValue::Empty => HashValue::Empty,
        },
    }
}

/// Minhash of `x` after deleting feature `m`, under `drop_perm(pi, m)`.
pub fn drop_hash(h_old: HashValue, x: &SparseBinaryVector, pi: &Permutation, m: u32) -> Result<HashValue> {
    check_dims(pi.dim(), x.dim())?;
    pi.check_index(m)?;
    Ok(drop_hash_with(h_old, pi.rank(m), || {
        x.support()
            .iter()
            .filter(|&&j| j != m)
            .map(|&j| pi.rank(j))
            .min()
            .into()
    }))
}

/// Per-permutation precomputation for a batch insertion at fixed positions.
///
/// Building the plan is `O(n log n)`; applying it to one hash value costs
/// `O(1 + |{x in pi_M : x <= h}|)` plus one lookup per inserted set bit.
#[derive(Debug, Clone)]
pub struct LiftPlan {
    sorted_ranks: Vec<u32>,
    inserted: Vec<u32>,
}

impl LiftPlan {
    pub fn new(pi: &Permutation, positions: &[u32]) -> Result<Self> {
        check_positions(positions, pi.dim())?;
        let ranks: Vec<u32> = positions.iter().map(|&m| pi.rank(m)).collect();
        let mut sorted_ranks = ranks.clone();
        sorted_ranks.sort_unstable();
        let inserted = ranks
            .iter()
            .map(|&a| a + sorted_ranks.partition_point(|&x| x < a) as u32)
            .collect();
        Ok(Self {
            sorted_ranks,
            inserted,
        })
    }

    /// Final rank of each inserted feature in the lifted permutation, in batch order.
    pub fn inserted_ranks(&self) -> &[u32] {
        &self.inserted
    }

    /// Where an old rank `h` lands after the lift.
    #[inline]
    pub fn shift(&self, h: u32) -> u32 {
        h + self.sorted_ranks.iter().take_while(|&&x| x <= h).count() as u32
    }

    /// Minimum lifted rank over inserted features whose bit is set.
    pub fn partial_min(&self, bits: &[bool]) -> Option<u32> {
        self.inserted
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(&r, _)| r)
            .min()
    }

    pub fn apply(&self, h_old: HashValue, bits: &[bool]) -> HashValue {
        combine_lift(h_old.rank().map(|h| self.shift(h)), self.partial_min(bits))
    }
}

#[inline]
fn combine_lift(shifted: Option<u32>, partial: Option<u32>) -> HashValue {
    match (shifted, partial) {
        (Some(a), Some(b)) => HashValue::Rank(a.min(b)),
        (a, b) => a.or(b).into(),
    }
}

/// Minimum final rank among inserted features with a set bit, `None` when all bits are zero.
pub fn partial_min_hash(pi: &Permutation, batch: &InsertionBatch) -> Result<Option<u32>> {
    batch.validate(pi.dim())?;
    Ok(LiftPlan::new(pi, batch.positions())?.partial_min(batch.bits()))
}

/// Minhash of the edited vector under `multiple_lift_perm(pi, M)`.
pub fn multiple_lift_hash(h_old: HashValue, pi: &Permutation, batch: &InsertionBatch) -> Result<HashValue> {
    batch.validate(pi.dim())?;
    Ok(LiftPlan::new(pi, batch.positions())?.apply(h_old, batch.bits()))
}

/// Current rank of the slot each step of a sequential lift touches.
///
/// Step `i` (0-based) inserts at `m_i + i`, whose rank before that step is
/// `pi(m_i) + |{j < i : pi(m_j) < pi(m_i)}|`.
pub fn lift_step_ranks(pi: &Permutation, positions: &[u32]) -> Result<Vec<u32>> {
    step_ranks(pi, positions, |a, below| a + below)
}

/// Current rank of the slot each step of a sequential drop removes.
pub fn drop_step_ranks(pi: &Permutation, positions: &[u32]) -> Result<Vec<u32>> {
    step_ranks(pi, positions, |a, below| a - below)
}

fn step_ranks(pi: &Permutation, positions: &[u32], adjust: impl Fn(u32, u32) -> u32) -> Result<Vec<u32>> {
    check_positions(positions, pi.dim())?;
    let ranks: Vec<u32> = positions.iter().map(|&m| pi.rank(m)).collect();
    let mut sorted = ranks.clone();
    sorted.sort_unstable();
    let mut tree = Fenwick::new(ranks.len());
    Ok(ranks
        .iter()
        .map(|&a| {
            let key = sorted.partition_point(|&x| x < a);
            let below = tree.count_below(key);
            tree.add(key);
            adjust(a, below)
        })
        .collect())
}

/// Sequential application of [`lift_hash`], one step per inserted feature.
#[derive(Debug, Clone)]
pub struct LiftSteps {
    ranks: Vec<u32>,
}

impl LiftSteps {
    pub fn new(pi: &Permutation, positions: &[u32]) -> Result<Self> {
        Ok(Self {
            ranks: lift_step_ranks(pi, positions)?,
        })
    }

    pub fn step_ranks(&self) -> &[u32] {
        &self.ranks
    }

    #[inline]
    pub fn apply(&self, h_old: HashValue, bits: &[bool]) -> HashValue {
        self.ranks
            .iter()
            .zip(bits)
            .fold(h_old, |h, (&a, &b)| lift_hash(h, a, b))
    }
}

/// Per-permutation precomputation for a batch deletion at fixed positions.
#[derive(Debug, Clone)]
pub struct DropPlan<'a> {
    pi: &'a Permutation,
    positions: &'a [u32],
    sorted_ranks: Vec<u32>,
}

impl<'a> DropPlan<'a> {
    pub fn new(pi: &'a Permutation, positions: &'a [u32]) -> Result<Self> {
        check_positions(positions, pi.dim())?;
        let mut sorted_ranks: Vec<u32> = positions.iter().map(|&m| pi.rank(m)).collect();
        sorted_ranks.sort_unstable();
        Ok(Self {
            pi,
            positions,
            sorted_ranks,
        })
    }

    #[inline]
    fn count_below(&self, v: u32) -> u32 {
        self.sorted_ranks.iter().take_while(|&&x| x < v).count() as u32
    }

    /// `support` is the pre-deletion support of the vector `h_old` was taken from.
    pub fn apply(&self, h_old: HashValue, support: &[u32]) -> HashValue {
        let h = match h_old {
            HashValue::Empty => return HashValue::Empty,
            HashValue::Rank(h) => h,
        };
        if self.sorted_ranks.first().is_none_or(|&lo| h < lo) {
            return h_old;
        }
        if self.sorted_ranks.binary_search(&h).is_err() {
            return HashValue::Rank(h - self.count_below(h));
        }
        // The minimum was deleted: rescan survivors. Deleted ranks strictly
        // below the new minimum are what it shifts by.
        match min_surviving(support, self.positions, self.pi) {
            Some(v) => HashValue::Rank(v - self.count_below(v)),
            None => HashValue::Empty,
        }
    }
}

/// Minimum rank over `support` skipping `deleted`; both sorted ascending.
pub(crate) fn min_surviving(support: &[u32], deleted: &[u32], pi: &Permutation) -> Option<u32> {
    let mut k = 0;
    let mut best: Option<u32> = None;
    for &j in support {
        while k < deleted.len() && deleted[k] < j {
            k += 1;
        }
        if k < deleted.len() && deleted[k] == j {
            continue;
        }
        let r = pi.rank(j);
        best = Some(best.map_or(r, |b| b.min(r)));
    }
    best
}

/// Minhash of the edited vector under `multiple_drop_perm(pi, M)`.
pub fn multiple_drop_hash(
    h_old: HashValue,
    x: &SparseBinaryVector,
    pi: &Permutation,
    batch: &DeletionBatch,
) -> Result<HashValue> {
    check_dims(pi.dim(), x.dim())?;
    batch.validate(pi.dim())?;
    Ok(DropPlan::new(pi, batch.positions())?.apply(h_old, x.support()))
}

/// Sequential application of the single-feature deletion rule.
#[derive(Debug, Clone)]
pub struct DropSteps<'a> {
    pi: &'a Permutation,
    positions: &'a [u32],
    ranks: Vec<u32>,
}

impl<'a> DropSteps<'a> {
    pub fn new(pi: &'a Permutation, positions: &'a [u32]) -> Result<Self> {
        Ok(Self {
            pi,
            positions,
            ranks: drop_step_ranks(pi, positions)?,
        })
    }

    pub fn step_ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// `support` is in the original (pre-batch) frame.
    pub fn apply(&self, h_old: HashValue, support: &[u32]) -> HashValue {
        let mut h = h_old;
        for (i, &a) in self.ranks.iter().enumerate() {
            h = drop_hash_with(h, a, || {
                // Minimum over survivors of steps 0..=i, re-expressed in the
                // frame before step i: that frame has lost steps 0..i already.
                let done = &self.positions[..=i];
                match min_surviving(support, done, self.pi) {
                    Some(v) => {
                        let removed_below = done[..i].iter().filter(|&&m| self.pi.rank(m) < v).count();
                        HashValue::Rank(v - removed_below as u32)
                    }
                    None => HashValue::Empty,
                }
            });
        }
        h
    }
}

/// Applies [`multiple_lift_hash`] slot by slot. The sketch's permutations
/// should afterwards be replaced by `multiple_lift_perm(perms[j], M)` if
/// they are needed for further explicit work.
pub fn update_sketch_insert(sk: &Sketch, perms: &[Permutation], batch: &InsertionBatch) -> Result<Sketch> {
    check_family(sk, perms)?;
    batch.validate(sk.dim)?;
    let values = sk
        .values
        .iter()
        .zip(perms)
        .map(|(&h, pi)| Ok(LiftPlan::new(pi, batch.positions())?.apply(h, batch.bits())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sketch {
        dim: sk.dim + batch.len(),
        values,
    })
}

/// Applies [`multiple_drop_hash`] slot by slot. `x` is the pre-deletion vector.
pub fn update_sketch_delete(
    sk: &Sketch,
    perms: &[Permutation],
    x: &SparseBinaryVector,
    batch: &DeletionBatch,
) -> Result<Sketch> {
    check_family(sk, perms)?;
    check_dims(sk.dim, x.dim())?;
    batch.validate(sk.dim)?;
    if batch.len() >= sk.dim {
        return Err(Error::invalid("deletion would leave a 0-dimensional sketch"));
    }
    let values = sk
        .values
        .iter()
        .zip(perms)
        .map(|(&h, pi)| Ok(DropPlan::new(pi, batch.positions())?.apply(h, x.support())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sketch {
        dim: sk.dim - batch.len(),
        values,
    })
}

fn check_family(sk: &Sketch, perms: &[Permutation]) -> Result<()> {
    if sk.num_perms() != perms.len() {
        return Err(Error::invalid(format!(
            "sketch has {} slots but {} permutations were given",
            sk.num_perms(),
            perms.len()
        )));
    }
    perms.iter().try_for_each(|pi| check_dims(sk.dim, pi.dim()))
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgen::{drop_perm, lift_perm, multiple_drop_perm, multiple_lift_perm};
    use crate::vector::{delete_features, insert_features};

    fn v(bits: &[u8]) -> SparseBinaryVector {
        SparseBinaryVector::from_bits(bits).unwrap()
    }

    fn p(r: &[u32]) -> Permutation {
        Permutation::new(r.to_vec()).unwrap()
    }

    fn x0() -> SparseBinaryVector {
        v(&[1, 0, 0, 1, 0, 1, 0])
    }

    fn pi0() -> Permutation {
        p(&[6, 3, 1, 7, 2, 5, 4])
    }

    fn ins(positions: &[u32], bits: &[u8]) -> InsertionBatch {
        InsertionBatch::new(positions.to_vec(), bits.iter().map(|&b| b == 1).collect()).unwrap()
    }

    /// Rank-insertion simulation over just the inserted values, quadratic in n.
    fn simulated_partial_min(pi: &Permutation, batch: &InsertionBatch) -> Option<u32> {
        let mut placed: Vec<u32> = Vec::new();
        for &m in batch.positions() {
            let base = pi.rank(m);
            let mut v = base;
            loop {
                let next = base + placed.iter().filter(|&&x| x <= v).count() as u32;
                if next == v {
                    break;
                }
                v = next;
            }
            for x in placed.iter_mut() {
                if *x >= v {
                    *x += 1;
                }
            }
            placed.push(v);
        }
        placed
            .iter()
            .zip(batch.bits())
            .filter(|(_, &b)| b)
            .map(|(&r, _)| r)
            .min()
    }

    #[test]
    fn min_hash_examples() {
        assert_eq!(min_hash(&x0(), &pi0()).unwrap(), HashValue::Rank(5));
        assert_eq!(min_hash(&v(&[0, 0, 1]), &p(&[2, 3, 1])).unwrap(), HashValue::Rank(1));
        assert_eq!(min_hash(&v(&[0, 0, 0]), &p(&[2, 3, 1])).unwrap(), HashValue::Empty);
        assert!(matches!(
            min_hash(&v(&[1, 0]), &pi0()),
            Err(Error::DimensionMismatch { expected: 7, found: 2 })
        ));
    }

    #[test]
    fn build_sketch_examples() {
        let perms = [pi0(), p(&[6, 2, 1, 7, 3, 5, 4])];
        let sk = build_sketch(&x0(), &perms).unwrap();
        // ranks over support {1,4,6}: (6,7,5) and (6,7,5)
        assert_eq!(sk.values(), &[HashValue::Rank(5), HashValue::Rank(5)]);
        let single = build_sketch(&x0(), &perms[..1]).unwrap();
        assert_eq!(single.values(), &[min_hash(&x0(), &pi0()).unwrap()]);
        let empty = build_sketch(&SparseBinaryVector::empty(7), &perms).unwrap();
        assert!(empty.values().iter().all(|h| h.is_empty()));
        assert!(build_sketch(&x0(), &[]).is_err());
    }

    #[test]
    fn lift_hash_examples() {
        assert_eq!(lift_hash(HashValue::Rank(5), 3, true), HashValue::Rank(3));
        assert_eq!(lift_hash(HashValue::Rank(2), 5, false), HashValue::Rank(2));
        assert_eq!(lift_hash(HashValue::Rank(2), 5, true), HashValue::Rank(2));
        assert_eq!(lift_hash(HashValue::Rank(5), 3, false), HashValue::Rank(6));
        assert_eq!(lift_hash(HashValue::Empty, 3, true), HashValue::Rank(3));
        assert_eq!(lift_hash(HashValue::Empty, 3, false), HashValue::Empty);

        // b = 0 case against the explicit oracle
        let x1 = insert_features(&x0(), &ins(&[2], &[0])).unwrap();
        let lifted = lift_perm(&pi0(), 2).unwrap();
        assert_eq!(min_hash(&x1, &lifted).unwrap(), HashValue::Rank(6));
    }

    #[test]
    fn partial_min_examples() {
        let pi = pi0();
        assert_eq!(partial_min_hash(&pi, &ins(&[2, 4], &[0, 1])).unwrap(), Some(8));
        assert_eq!(partial_min_hash(&pi, &ins(&[2, 4], &[0, 0])).unwrap(), None);
        assert_eq!(partial_min_hash(&pi, &ins(&[2, 4], &[1, 1])).unwrap(), Some(3));
        assert!(partial_min_hash(&pi, &ins(&[2, 8], &[1, 1])).is_err());
    }

    #[test]
    fn partial_min_matches_simulation() {
        use crate::permgen::{random_permutation, PermutationSeed};
        for seed in 0..300u64 {
            let d = 4 + seed as usize % 40;
            let pi = random_permutation(d, PermutationSeed::new(seed, 7)).unwrap();
            let n = 1 + seed as usize % d.min(12);
            let step = d / n;
            let positions: Vec<u32> = (0..n).map(|i| (1 + i * step) as u32).collect();
            let bits: Vec<bool> = (0..n).map(|i| (seed >> (i % 8)) & 1 == 1).collect();
            let batch = InsertionBatch::new(positions, bits).unwrap();
            assert_eq!(
                partial_min_hash(&pi, &batch).unwrap(),
                simulated_partial_min(&pi, &batch),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn multiple_lift_hash_examples() {
        let pi = pi0();
        let h = HashValue::Rank(5);
        assert_eq!(multiple_lift_hash(h, &pi, &ins(&[2, 4], &[0, 1])).unwrap(), HashValue::Rank(6));
        assert_eq!(multiple_lift_hash(h, &pi, &ins(&[2, 4], &[1, 1])).unwrap(), HashValue::Rank(3));
        assert_eq!(multiple_lift_hash(h, &pi, &ins(&[2, 4], &[0, 0])).unwrap(), HashValue::Rank(6));

        for bits in [[0u8, 1], [1, 1], [0, 0]] {
            let batch = ins(&[2, 4], &bits);
            let oracle = min_hash(
                &insert_features(&x0(), &batch).unwrap(),
                &multiple_lift_perm(&pi, batch.positions()).unwrap(),
            )
            .unwrap();
            assert_eq!(multiple_lift_hash(h, &pi, &batch).unwrap(), oracle);
        }
        assert_eq!(
            multiple_lift_hash(HashValue::Empty, &pi, &ins(&[2, 4], &[0, 0])).unwrap(),
            HashValue::Empty
        );
    }

    #[test]
    fn drop_hash_examples() {
        let pi = p(&[6, 2, 1, 7, 3, 5, 4]);
        assert_eq!(drop_hash(HashValue::Rank(5), &x0(), &pi, 5).unwrap(), HashValue::Rank(4));
        assert_eq!(drop_hash_with(HashValue::Rank(2), 5, || unreachable!()), HashValue::Rank(2));
        assert_eq!(drop_hash(HashValue::Rank(5), &x0(), &pi0(), 6).unwrap(), HashValue::Rank(5));
        let oracle = min_hash(
            &delete_features(&x0(), &DeletionBatch::new(vec![6]).unwrap()).unwrap(),
            &drop_perm(&pi0(), 6).unwrap(),
        )
        .unwrap();
        assert_eq!(oracle, HashValue::Rank(5));
        assert_eq!(drop_hash(HashValue::Empty, &v(&[0; 7]), &pi0(), 3).unwrap(), HashValue::Empty);
        assert_eq!(drop_hash(HashValue::Rank(2), &v(&[0, 1]), &p(&[1, 2]), 2).unwrap(), HashValue::Empty);
        assert!(drop_hash(HashValue::Rank(5), &x0(), &pi0(), 8).is_err());
    }

    #[test]
    fn multiple_drop_hash_examples() {
        let pi = pi0();
        let h = HashValue::Rank(5);
        let del = |m: &[u32]| DeletionBatch::new(m.to_vec()).unwrap();
        assert_eq!(multiple_drop_hash(h, &x0(), &pi, &del(&[2, 4])).unwrap(), HashValue::Rank(4));
        assert_eq!(multiple_drop_hash(h, &x0(), &pi, &del(&[4])).unwrap(), HashValue::Rank(5));
        assert_eq!(multiple_drop_hash(h, &x0(), &pi, &del(&[6])).unwrap(), HashValue::Rank(5));
        for m in [&[2u32, 4][..], &[4], &[6], &[1, 6], &[1, 4, 6]] {
            let batch = del(m);
            let oracle = min_hash(
                &delete_features(&x0(), &batch).unwrap(),
                &multiple_drop_perm(&pi, m).unwrap(),
            )
            .unwrap();
            assert_eq!(multiple_drop_hash(h, &x0(), &pi, &batch).unwrap(), oracle, "M = {m:?}");
        }
    }

    #[test]
    fn literal_recompute_count_is_wrong() {
        // identity permutation, X = [1,0,1,0], delete {1,2}: counting deleted
        // ranks <= h_old instead of < v gives 3 - 1 = 2, the oracle says 1.
        let pi = Permutation::identity(4);
        let x = v(&[1, 0, 1, 0]);
        let batch = DeletionBatch::new(vec![1, 2]).unwrap();
        let oracle = min_hash(
            &delete_features(&x, &batch).unwrap(),
            &multiple_drop_perm(&pi, &[1, 2]).unwrap(),
        )
        .unwrap();
        assert_eq!(oracle, HashValue::Rank(1));
        assert_eq!(multiple_drop_hash(HashValue::Rank(1), &x, &pi, &batch).unwrap(), oracle);
        let literal = 3 - [1u32, 2].iter().filter(|&&r| r <= 1).count() as u32;
        assert_ne!(HashValue::Rank(literal), oracle);
    }

    #[test]
    fn sketch_updates() {
        let perms = [pi0(), p(&[6, 2, 1, 7, 3, 5, 4])];
        let sk = build_sketch(&x0(), &perms).unwrap();
        let batch = ins(&[2, 4], &[0, 1]);
        let up = update_sketch_insert(&sk, &perms, &batch).unwrap();
        let x1 = insert_features(&x0(), &batch).unwrap();
        assert_eq!(up.dim(), 9);
        assert_eq!(up.values()[0], HashValue::Rank(6));
        for (j, pi) in perms.iter().enumerate() {
            let lifted = multiple_lift_perm(pi, batch.positions()).unwrap();
            assert_eq!(up.values()[j], min_hash(&x1, &lifted).unwrap());
        }
        let k1 = update_sketch_insert(&build_sketch(&x0(), &perms[..1]).unwrap(), &perms[..1], &batch).unwrap();
        assert_eq!(k1.values(), &[multiple_lift_hash(sk.values()[0], &perms[0], &batch).unwrap()]);

        let empty = build_sketch(&SparseBinaryVector::empty(7), &perms).unwrap();
        let still = update_sketch_insert(&empty, &perms, &ins(&[1, 3], &[0, 0])).unwrap();
        assert!(still.values().iter().all(|h| h.is_empty()));

        let del = DeletionBatch::new(vec![1, 6]).unwrap();
        let down = update_sketch_delete(&sk, &perms, &x0(), &del).unwrap();
        let x2 = delete_features(&x0(), &del).unwrap();
        for (j, pi) in perms.iter().enumerate() {
            let dropped = multiple_drop_perm(pi, del.positions()).unwrap();
            assert_eq!(down.values()[j], min_hash(&x2, &dropped).unwrap());
        }
        let empty_down =
            update_sketch_delete(&empty, &perms, &SparseBinaryVector::empty(7), &del).unwrap();
        assert!(empty_down.values().iter().all(|h| h.is_empty()));

        assert!(update_sketch_insert(&sk, &perms[..1], &batch).is_err());
        assert!(update_sketch_delete(&sk, &perms, &v(&[1, 0]), &del).is_err());
    }

    #[test]
    fn sequential_steps_match_batch() {
        let pi = pi0();
        let batch = ins(&[2, 4], &[0, 1]);
        let steps = LiftSteps::new(&pi, batch.positions()).unwrap();
        // old 2 has rank 3, old 4 has rank 7 with one new rank (3) below it
        assert_eq!(steps.step_ranks(), &[3, 8]);
        assert_eq!(
            steps.apply(HashValue::Rank(5), batch.bits()),
            multiple_lift_hash(HashValue::Rank(5), &pi, &batch).unwrap()
        );
        let positions = [2u32, 4];
        let down = DropSteps::new(&pi, &positions).unwrap();
        assert_eq!(down.step_ranks(), &[3, 6]);
        assert_eq!(down.apply(HashValue::Rank(5), x0().support()), HashValue::Rank(4));
    }

    #[test]
    fn hash_value_text_form() {
        assert_eq!(HashValue::Empty.to_string(), "EMPTY");
        assert_eq!("EMPTY".parse::<HashValue>().unwrap(), HashValue::Empty);
        assert_eq!("17".parse::<HashValue>().unwrap(), HashValue::Rank(17));
        assert!("0".parse::<HashValue>().is_err());
        assert!("x".parse::<HashValue>().is_err());
    }

    #[test]
    fn sketch_constructor_checks_range() {
        assert!(Sketch::new(3, vec![HashValue::Rank(4)]).is_err());
        assert!(Sketch::new(3, vec![]).is_err());
        assert!(Sketch::new(3, vec![HashValue::Rank(3), HashValue::Empty]).is_ok());
    }
}
