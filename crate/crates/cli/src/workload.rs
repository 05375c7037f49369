//! Synthetic corpora and the random edits every update path consumes.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use dynsketch_core::{Corpus, SparseBinaryVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

/// Independent sub-seed for one consumer of the master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.next_u64()
}

/// `points` vectors over `1..=dim`, each with `ones` features drawn uniformly without replacement.
pub fn synthetic_corpus(dim: usize, ones: usize, points: usize, seed: u64) -> Result<Corpus> {
    if ones > dim {
        return Err(CliError::validation(format!(
            "cannot draw {ones} features out of {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors = (0..points)
        .map(|_| {
            let idx = rand::seq::index::sample(&mut rng, dim, ones)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect();
            SparseBinaryVector::from_unsorted(dim, idx)
        })
        .collect::<dynsketch_core::Result<Vec<_>>>()?;
    Ok(Corpus::new(dim, vectors)?)
}

/// `n` distinct positions from `1..=dim`, ascending.
pub fn draw_positions<R: Rng>(rng: &mut R, dim: usize, n: usize) -> Result<Vec<u32>> {
    if n > dim {
        return Err(CliError::validation(format!(
            "cannot choose {n} distinct positions among {dim} features"
        )));
    }
    let mut pos: Vec<u32> = rand::seq::index::sample(rng, dim, n)
        .into_iter()
        .map(|i| i as u32 + 1)
        .collect();
    pos.sort_unstable();
    Ok(pos)
}

/// Shared insertion positions plus each point's inserted bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionWorkload {
    pub positions: Vec<u32>,
    /// `bits[p][i]` is the value point `p` receives at `positions[i]`.
    pub bits: Vec<Vec<bool>>,
}

impl InsertionWorkload {
    pub fn draw(seed: u64, dim: usize, n: usize, points: usize, one_prob: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = draw_positions(&mut rng, dim, n)?;
        let bits: Vec<Vec<bool>> = (0..points)
            .map(|_| (0..n).map(|_| rng.random_bool(one_prob)).collect())
            .collect();
        Ok(Self { positions, bits })
    }

    pub fn checksum(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.positions.hash(&mut h);
        self.bits.hash(&mut h);
        h.finish()
    }
}

/// Deletion positions shared by every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionWorkload {
    pub positions: Vec<u32>,
}

impl DeletionWorkload {
    pub fn draw(seed: u64, dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(CliError::validation(format!(
                "deleting {n} of {dim} features leaves nothing to sketch"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            positions: draw_positions(&mut rng, dim, n)?,
        })
    }

    pub fn checksum(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.positions.hash(&mut h);
        h.finish()
    }
}
