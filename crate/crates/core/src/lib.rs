//! Exact coincidence rates for partially distinguishable bosons and fermions
//! scattered by an `m`-channel linear interferometer.
//!
//! The crate evaluates the rate `v(s)† R(τ; p) v(s)` in two independent ways:
//!
//! - **direct**: the `n! × n!` rate matrix `R`, whose entries are monomials in
//!   the pairwise wave-packet overlaps (the delay matrix `r`), contracted with
//!   the monomial vector `v(s)` of the scattering submatrix `A(s)`;
//! - **blocked**: a group Fourier transform over the symmetric group that
//!   block-diagonalizes `R` into one block `K^λ = D^λ(r)` per partition
//!   `λ ⊢ n`, each repeated `s_λ` times.
//!
//! When arrival times are binned, blocks whose partition does not dominate the
//! delay partition vanish identically and are skipped ([`rates::rate_truncated`]).
//!
//! On top of the rate engine sit exact output distributions over collision-free
//! detector strings ([`sampling`]), the combinatorial analysis of delay
//! partitions under uniform arrivals ([`analysis`]), and the command surface
//! used by the `coincidence` binary ([`cli`]).
//!
//! ```
//! use coincidence::prelude::*;
//!
//! // Hong–Ou–Mandel: two simultaneous bosons on a balanced beam splitter.
//! let s = std::f64::consts::FRAC_1_SQRT_2;
//! let bs = Interferometer::from_rows(&[
//!     vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
//!     vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
//! ]).unwrap();
//! let out = OutputString::from_bits(vec![1, 1]).unwrap();
//! let a = bs.submatrix(&out, 2).unwrap();
//! let spec = ArrivalSpec::dimensionless(vec![0.0, 0.0]).unwrap();
//! let ordering = GroupOrdering::canonical(2).unwrap();
//! let v = monomial_vector(&a, &ordering);
//! let r = rate_matrix(&delay_matrix(&spec), Species::Boson, &ordering).unwrap();
//! assert!(rate_direct(&v, &r).unwrap().abs() < 1e-12);
//! ```

pub mod analysis;
pub mod cli;
pub mod delays;
pub mod error;
pub mod interferometer;
pub mod matfun;
pub mod rates;
pub mod sampling;
pub mod symgroup;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        delay_partition_probability, requires_witness, witness_partition, witness_probability,
    };
    pub use crate::delays::{
        delay_matrix, discretize, snapped_delay_matrix, ArrivalSpec, DelayMatrix, DelayPartition,
    };
    pub use crate::error::{Error, Result};
    pub use crate::interferometer::{
        enumerate_outputs, haar_unitary, monomial_vector, Interferometer, MonomialVector,
        OutputString,
    };
    pub use crate::matfun::{
        determinant, dfunction_block, immanant, permanent, permuted_immanant, ComplexMatrix,
    };
    pub use crate::rates::{
        block_decompose, build_transform, gamas_vanishes, rate_blocked, rate_direct,
        rate_fully_distinguishable, rate_matrix, rate_streaming, rate_truncated, Species,
    };
    pub use crate::sampling::{build_distribution, sample, OutputDistribution};
    pub use crate::symgroup::{
        all_permutations, character, conjugate, dominates, gl_dimension, irrep_matrices,
        partitions_of, standard_tableau_count, GroupOrdering, Partition, Permutation,
    };
    pub use num_complex::Complex64;
}
