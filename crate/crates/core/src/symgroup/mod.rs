//! Combinatorics and representation theory of the symmetric group `S_n`.
//!
//! Permutations are stored 0-based in one-line notation and printed 1-based in
//! cycle notation. Composition follows `(σγ)(i) = σ(γ(i))`, and every
//! representation here satisfies `D(σγ) = D(σ)·D(γ)`.

mod character;
mod irrep;
mod partition;
mod permutation;

pub use character::{character, character_of_cycle_type};
pub use irrep::{conjugate_intertwiner, irrep_matrices, IrrepMatrixSet, StandardTableau};
pub use partition::{
    conjugate, dominates, gl_dimension, partitions_of, standard_tableau_count, Partition,
};
pub use permutation::{all_permutations, GroupOrdering, Permutation, MAX_GROUP_DEGREE};
