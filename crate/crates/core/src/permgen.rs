//! Seeded random permutations and the explicit lift/drop constructions.
//!
//! `lift_perm` and `drop_perm` build the permutation that the fast sketch
//! updates in [`crate::sketch`] implicitly use. They cost `O(d)` each and are
//! not needed to maintain a sketch; they exist so every update rule can be
//! checked against a from-scratch minhash under the rebuilt permutation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::vector::check_positions;

/// Identifies one permutation of a sketch: the experiment-wide seed and the slot it feeds.
///
/// The generator is ChaCha8 keyed by `seed` with `index` selecting the stream,
/// so slots are independent and any slot can be regenerated on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PermutationSeed {
    pub seed: u64,
    pub index: u64,
}

impl PermutationSeed {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }
}

/// Uniform random permutation of `1..=d` (Fisher-Yates over the seeded stream).
pub fn random_permutation(d: usize, seed: PermutationSeed) -> Result<Permutation> {
    let mut rng = seed.rng();
    random_permutation_with(d, &mut rng)
}

/// Same as [`random_permutation`] but draws from a caller-owned generator.
pub fn random_permutation_with<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Permutation> {
    if d == 0 {
        return Err(Error::invalid("permutation dimension must be >= 1"));
    }
    if d > u32::MAX as usize {
        return Err(Error::invalid("permutation dimension exceeds u32 range"));
    }
    let mut ranks: Vec<u32> = (1..=d as u32).collect();
    ranks.shuffle(rng);
    Ok(Permutation::from_ranks_unchecked(ranks))
}

/// The `K` permutations of a sketch over dimension `d`: slot `j` uses `(seed, j)`.
pub fn permutation_family(d: usize, k: usize, seed: u64) -> Result<Vec<Permutation>> {
    (0..k as u64)
        .map(|j| random_permutation(d, PermutationSeed::new(seed, j)))
        .collect()
}

/// Extends `pi` to `d + 1` dimensions for a feature inserted at index `r`.
///
/// The new feature takes rank `pi(r)`; every old rank `>= pi(r)` moves up by one.
/// Old features at `r..=d` shift one index to the right.
pub fn lift_perm(pi: &Permutation, r: u32) -> Result<Permutation> {
    pi.check_index(r)?;
    Ok(lift_unchecked(pi.ranks(), r))
}

fn lift_unchecked(ranks: &[u32], r: u32) -> Permutation {
    let r = r as usize;
    let pivot = ranks[r - 1];
    let bump = |v: u32| v + u32::from(v >= pivot);
    let mut out = Vec::with_capacity(ranks.len() + 1);
    out.extend(ranks[..r - 1].iter().map(|&v| bump(v)));
    out.push(pivot);
    out.extend(ranks[r - 1..].iter().map(|&v| bump(v)));
    Permutation::from_ranks_unchecked(out)
}

/// Shrinks `pi` to `d - 1` dimensions by removing feature `r`; ranks above `pi(r)` move down.
pub fn drop_perm(pi: &Permutation, r: u32) -> Result<Permutation> {
    pi.check_index(r)?;
    if pi.dim() == 1 {
        return Err(Error::invalid("cannot drop the only feature of a 1-dimensional permutation"));
    }
    Ok(drop_unchecked(pi.ranks(), r))
}

fn drop_unchecked(ranks: &[u32], r: u32) -> Permutation {
    let r = r as usize;
    let pivot = ranks[r - 1];
    let out = ranks
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != r - 1)
        .map(|(_, &v)| v - u32::from(v > pivot))
        .collect();
    Permutation::from_ranks_unchecked(out)
}

/// Applies [`lift_perm`] once per position, shifting the `i`-th (0-based) position by `i`.
pub fn multiple_lift_perm(pi: &Permutation, positions: &[u32]) -> Result<Permutation> {
    if positions.is_empty() {
        return Err(Error::invalid("position list must not be empty"));
    }
    check_positions(positions, pi.dim())?;
    let mut cur = pi.clone();
    for (i, &m) in positions.iter().enumerate() {
        cur = lift_unchecked(cur.ranks(), m + i as u32);
    }
    Ok(cur)
}

/// Applies [`drop_perm`] once per position, shifting the `i`-th (0-based) position by `-i`.
pub fn multiple_drop_perm(pi: &Permutation, positions: &[u32]) -> Result<Permutation> {
    if positions.is_empty() {
        return Err(Error::invalid("position list must not be empty"));
    }
    check_positions(positions, pi.dim())?;
    if positions.len() >= pi.dim() {
        return Err(Error::invalid(format!(
            "cannot drop {} of {} features",
            positions.len(),
            pi.dim()
        )));
    }
    let mut cur = pi.clone();
    for (i, &m) in positions.iter().enumerate() {
        cur = drop_unchecked(cur.ranks(), m - i as u32);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: &[u32]) -> Permutation {
        Permutation::new(r.to_vec()).unwrap()
    }

    // Line-by-line transcription of the two-loop listing, kept as a cross-check
    // for the single-pass rank-insertion form.
    fn lift_listing(pi: &[u32], r: usize) -> Vec<u32> {
        let d = pi.len();
        let mut out = vec![0u32; d + 1];
        for i in 1..=d + 1 {
            out[i - 1] = if i <= r { pi[i - 1] } else { pi[i - 2] };
        }
        let at_r = out[r - 1];
        for i in (1..=d + 1).filter(|&i| i != r) {
            if out[i - 1] >= at_r {
                out[i - 1] += 1;
            }
        }
        out
    }

    fn drop_listing(pi: &[u32], r: usize) -> Vec<u32> {
        let d = pi.len();
        let mut out = vec![0u32; d - 1];
        for i in 1..d {
            out[i - 1] = if i < r { pi[i - 1] } else { pi[i] };
        }
        for v in out.iter_mut() {
            if *v > pi[r - 1] {
                *v -= 1;
            }
        }
        out
    }

    #[test]
    fn trivial_dimension_one() {
        for s in 0..5 {
            let pi = random_permutation(1, PermutationSeed::new(s, 0)).unwrap();
            assert_eq!(pi.ranks(), &[1]);
        }
        assert!(random_permutation(0, PermutationSeed::new(1, 0)).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let s0 = PermutationSeed::new(0xdead_beef, 3);
        let a = random_permutation(7, s0).unwrap();
        assert_eq!(a, random_permutation(7, s0).unwrap());
        let other = random_permutation(64, PermutationSeed::new(0xdead_beef, 4)).unwrap();
        assert_ne!(random_permutation(64, s0).unwrap(), other);
    }

    #[test]
    fn first_rank_is_uniform() {
        let trials = 100_000u64;
        let hits = (0..trials)
            .filter(|&s| random_permutation(32, PermutationSeed::new(s, 0)).unwrap().rank(1) == 1)
            .count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 1.0 / 32.0).abs() <= 0.005, "freq = {freq}");
    }

    #[test]
    fn lift_examples() {
        let pi = p(&[6, 3, 1, 7, 2, 5, 4]);
        assert_eq!(lift_perm(&pi, 2).unwrap().ranks(), &[7, 3, 4, 1, 8, 2, 6, 5]);
        assert_eq!(lift_perm(&p(&[1, 2, 3]), 2).unwrap().ranks(), &[1, 2, 3, 4]);
        assert_eq!(lift_perm(&p(&[2, 1]), 1).unwrap().ranks(), &[2, 3, 1]);
        assert!(lift_perm(&pi, 0).is_err());
        assert!(lift_perm(&pi, 8).is_err());
    }

    #[test]
    fn drop_examples() {
        let pi = p(&[6, 2, 1, 7, 3, 5, 4]);
        assert_eq!(drop_perm(&pi, 5).unwrap().ranks(), &[5, 2, 1, 6, 4, 3]);
        assert_eq!(drop_perm(&p(&[1, 2, 3]), 2).unwrap().ranks(), &[1, 2]);
        let base = p(&[6, 3, 1, 7, 2, 5, 4]);
        assert_eq!(drop_perm(&lift_perm(&base, 2).unwrap(), 2).unwrap(), base);
        assert!(drop_perm(&p(&[1]), 1).is_err());
        assert!(drop_perm(&base, 9).is_err());
    }

    #[test]
    fn multiple_examples() {
        let pi = p(&[6, 3, 1, 7, 2, 5, 4]);
        assert_eq!(
            multiple_lift_perm(&pi, &[2, 4]).unwrap().ranks(),
            &[7, 3, 4, 1, 8, 9, 2, 6, 5]
        );
        assert_eq!(multiple_lift_perm(&pi, &[3]).unwrap(), lift_perm(&pi, 3).unwrap());
        assert_eq!(
            multiple_lift_perm(&Permutation::identity(4), &[1, 3]).unwrap(),
            Permutation::identity(6)
        );
        assert_eq!(multiple_drop_perm(&pi, &[2, 4]).unwrap().ranks(), &[5, 1, 2, 4, 3]);
        assert_eq!(multiple_drop_perm(&pi, &[6]).unwrap(), drop_perm(&pi, 6).unwrap());

        let lifted = multiple_lift_perm(&pi, &[2, 4]).unwrap();
        assert_eq!(multiple_drop_perm(&lifted, &[2, 5]).unwrap(), pi);
        assert!(multiple_lift_perm(&pi, &[4, 2]).is_err());
        assert!(multiple_drop_perm(&pi, &[1, 2, 3, 4, 5, 6, 7]).is_err());
    }

    #[test]
    fn matches_listing_transcription() {
        for seed in 0..200u64 {
            let d = 1 + (seed as usize % 20);
            let pi = random_permutation(d, PermutationSeed::new(seed, 1)).unwrap();
            for r in 1..=d {
                assert_eq!(lift_perm(&pi, r as u32).unwrap().ranks(), &lift_listing(pi.ranks(), r)[..]);
                if d > 1 {
                    assert_eq!(drop_perm(&pi, r as u32).unwrap().ranks(), &drop_listing(pi.ranks(), r)[..]);
                }
            }
        }
    }
}
