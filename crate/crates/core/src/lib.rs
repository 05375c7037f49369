//! MinHash sketches over sparse binary vectors that can be updated in place
//! when features are inserted into or deleted from the feature space.
//!
//! A sketch built under permutations `pi_1..pi_K` can follow a column edit
//! without regenerating any permutation: [`sketch::lift_hash`] and
//! [`sketch::multiple_lift_hash`] handle insertions, [`sketch::drop_hash`]
//! and [`sketch::multiple_drop_hash`] handle deletions. Each result equals
//! the plain minhash of the edited vector under the permutation produced by
//! the matching constructor in [`permgen`].
//!
//! All feature indices and ranks are 1-based.

pub mod error;
pub mod estimate;
pub mod family;
mod fenwick;
pub mod ingest;
pub mod permgen;
pub mod permutation;
pub mod sketch;
pub mod vector;

pub use error::{Error, Result};
pub use estimate::{jaccard_estimate, jaccard_true, rmse, Collisions, PairEstimate};
pub use family::{DropFamily, LiftFamily};
pub use ingest::Corpus;
pub use permgen::PermutationSeed;
pub use permutation::Permutation;
pub use sketch::{HashValue, Sketch};
pub use vector::{delete_features, insert_features, DeletionBatch, InsertionBatch, SparseBinaryVector};
