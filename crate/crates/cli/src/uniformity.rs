//! Min-wise uniformity checks for the permutation constructions.

use dynsketch_core::estimate::{minwise_uniformity_test, UniformityReport};
use dynsketch_core::permgen::{drop_perm, lift_perm, random_permutation_with};
use dynsketch_core::PermutationSeed;
use rand::Rng;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermSource {
    /// Fresh uniform permutations of `1..=dim`.
    Random,
    /// `lift_perm(pi, r)` with `pi` uniform and `r` uniform in `1..=dim`; yields `dim + 1` ranks.
    Lift,
    /// `drop_perm(pi, r)` with `pi` uniform and `r` fixed; yields `dim - 1` ranks.
    Drop { r: u32 },
}

impl PermSource {
    pub fn output_dim(self, dim: usize) -> usize {
        match self {
            PermSource::Random => dim,
            PermSource::Lift => dim + 1,
            PermSource::Drop { .. } => dim - 1,
        }
    }
}

/// Runs the uniformity test over `trials` permutations; trial `t` draws from stream `(seed, t)`.
pub fn run_uniformity(
    source: PermSource,
    dim: usize,
    support: &[u32],
    trials: u64,
    seed: u64,
) -> Result<UniformityReport> {
    if let PermSource::Drop { r } = source {
        if dim < 2 || r == 0 || r as usize > dim {
            return Err(CliError::validation(format!("drop position {r} invalid for dimension {dim}")));
        }
    }
    if dim == 0 {
        return Err(CliError::validation("dimension must be >= 1"));
    }
    let out_dim = source.output_dim(dim);
    if let Some(&bad) = support.iter().find(|&&u| u == 0 || u as usize > out_dim) {
        return Err(CliError::validation(format!(
            "test set element {bad} outside 1..={out_dim}"
        )));
    }
    let report = minwise_uniformity_test(
        |t| {
            let mut rng = PermutationSeed::new(seed, t).rng();
            let pi = random_permutation_with(dim, &mut rng).expect("dim >= 1");
            match source {
                PermSource::Random => pi,
                PermSource::Lift => {
                    let r = rng.random_range(1..=dim as u32);
                    lift_perm(&pi, r).expect("r in range")
                }
                PermSource::Drop { r } => drop_perm(&pi, r).expect("r in range"),
            }
        },
        support,
        trials,
    )?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(run_uniformity(PermSource::Drop { r: 9 }, 8, &[1, 2], 100, 0).is_err());
        assert!(run_uniformity(PermSource::Drop { r: 3 }, 8, &[1, 8], 100, 0).is_err());
        assert!(run_uniformity(PermSource::Lift, 8, &[1, 9], 100, 0).is_ok());
    }
}
