//! Jaccard ground truth, sketch-based estimates, and error aggregation.

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::sketch::{HashValue, Sketch};
use crate::vector::SparseBinaryVector;

/// Exact Jaccard similarity of two supports. Two empty supports give 0.
pub fn jaccard_true(x: &SparseBinaryVector, y: &SparseBinaryVector) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let (a, b) = (x.support(), y.support());
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    Ok(if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    })
}

/// Slot agreement between two sketches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Collisions {
    pub collisions: usize,
    /// Slots where at least one side is non-empty.
    pub comparable_slots: usize,
}

impl Collisions {
    pub fn fraction(&self) -> f64 {
        if self.comparable_slots == 0 {
            0.0
        } else {
            self.collisions as f64 / self.comparable_slots as f64
        }
    }
}

/// Counts matching slots. Both-empty slots are skipped; one-sided empties count as misses.
pub fn jaccard_estimate(sa: &Sketch, sb: &Sketch) -> Result<Collisions> {
    if sa.num_perms() != sb.num_perms() {
        return Err(Error::invalid(format!(
            "sketch sizes differ: {} vs {}",
            sa.num_perms(),
            sb.num_perms()
        )));
    }
    Ok(count_collisions(sa.values(), sb.values()))
}

/// [`jaccard_estimate`] over raw slot arrays of equal length.
pub fn count_collisions(a: &[HashValue], b: &[HashValue]) -> Collisions {
    debug_assert_eq!(a.len(), b.len());
    let mut out = Collisions {
        collisions: 0,
        comparable_slots: 0,
    };
    for (&x, &y) in a.iter().zip(b) {
        if x.is_empty() && y.is_empty() {
            continue;
        }
        out.comparable_slots += 1;
        if x == y {
            out.collisions += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEstimate {
    pub true_jaccard: f64,
    pub estimated_jaccard: f64,
    pub collisions: usize,
    pub comparable_slots: usize,
}

impl PairEstimate {
    pub fn new(true_jaccard: f64, c: Collisions) -> Self {
        Self {
            true_jaccard,
            estimated_jaccard: c.fraction(),
            collisions: c.collisions,
            comparable_slots: c.comparable_slots,
        }
    }

    pub fn error(&self) -> f64 {
        self.estimated_jaccard - self.true_jaccard
    }
}

/// Root mean squared estimation error.
pub fn rmse(pairs: &[PairEstimate]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::invalid("rmse of an empty pair set"));
    }
    let sum: f64 = pairs.iter().map(|p| p.error() * p.error()).sum();
    Ok((sum / pairs.len() as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    /// Feature indices of the tested set, in the order given.
    pub support: Vec<u32>,
    /// How often each element held the minimum rank.
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub max_deviation: f64,
    pub trials: u64,
}

/// Empirical distribution of `argmin_{u in U} pi(u)` over permutations drawn from `source`.
///
/// `source` receives the trial number. Every produced permutation must cover `support`.
pub fn minwise_uniformity_test<F>(mut source: F, support: &[u32], trials: u64) -> Result<UniformityReport>
where
    F: FnMut(u64) -> Permutation,
{
    let k = support.len();
    if k <= 1 {
        return Err(Error::invalid("uniformity test needs |U| >= 2"));
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted[0] == 0 {
        return Err(Error::invalid("test set must hold distinct 1-based indices"));
    }
    let needed = 10 * (k as u64) * (k as u64);
    if trials < needed {
        return Err(Error::invalid(format!(
            "uniformity test over |U| = {k} needs at least {needed} trials, got {trials}"
        )));
    }
    let top = *sorted.last().unwrap();
    let mut counts = vec![0u64; k];
    for t in 0..trials {
        let pi = source(t);
        pi.check_index(top)?;
        let (winner, _) = support
            .iter()
            .enumerate()
            .min_by_key(|&(_, &u)| pi.rank(u))
            .unwrap();
        counts[winner] += 1;
    }
    let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let target = 1.0 / k as f64;
    let max_deviation = frequencies
        .iter()
        .map(|f| (f - target).abs())
        .fold(0.0, f64::max);
    Ok(UniformityReport {
        support: support.to_vec(),
        counts,
        frequencies,
        max_deviation,
        trials,
    })
}
