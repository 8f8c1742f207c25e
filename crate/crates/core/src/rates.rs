//! The coincidence-rate engine.
//!
//! With `R[γ][σ] = r_{γ⁻¹σ}` (bosons) or `sgn(γσ)·r_{γ⁻¹σ}` (fermions) and the
//! monomial vector `v(s)`, the rate is `v† R v`. The group Fourier transform
//! `T` with rows `√(s_λ/n!)·D^λ_ij(γ)` turns `R` into `s_λ` copies of
//! `K^λ = Σ_π D^λ(π)·r_π` per partition; for fermions copy `i` of slot `λ`
//! equals `Q·K^{λ*}·Qᵀ` with `Q` the conjugate intertwiner.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::delays::{DelayMatrix, DISTINGUISHABLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::interferometer::MonomialVector;
use crate::matfun::{permanent, ComplexMatrix};
use crate::symgroup::{
    all_permutations, conjugate_intertwiner, irrep_matrices, partitions_of, standard_tableau_count,
    GroupOrdering, IrrepMatrixSet, Partition, Permutation,
};

/// Largest `n` for which a dense `n! × n!` matrix is materialized.
pub const MAX_DENSE_DEGREE: usize = 7;
/// Largest `n` for the streaming direct sum.
pub const MAX_DIRECT_DEGREE: usize = 8;
/// Rates in `[-NEGATIVE_TOLERANCE, 0)` are roundoff and clamp to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-10;
/// Largest entry a block may have and still count as vanishing.
pub const ZERO_BLOCK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Boson,
    Fermion,
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::Boson => "boson",
            Species::Fermion => "fermion",
        })
    }
}

impl std::str::FromStr for Species {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "boson" | "b" => Ok(Species::Boson),
            "fermion" | "f" => Ok(Species::Fermion),
            other => Err(Error::config(
                "species",
                format!("unknown species {other:?}"),
            )),
        }
    }
}

fn check_degree(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::SizeLimit {
            what,
            value: n as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// `r_π = Π_k r[π(k)][k]`.
fn delay_monomial(r: &DelayMatrix, pi: &Permutation) -> f64 {
    pi.images()
        .iter()
        .enumerate()
        .map(|(k, &i)| r.get(i, k))
        .product()
}

/// Dense `n! × n!` rate matrix over a fixed ordering.
#[derive(Clone, Debug)]
pub struct RateMatrix {
    pub species: Species,
    pub ordering: GroupOrdering,
    pub entries: DMatrix<f64>,
}

pub fn rate_matrix(
    r: &DelayMatrix,
    species: Species,
    ordering: &GroupOrdering,
) -> Result<RateMatrix> {
    let n = r.n();
    if ordering.degree() != n {
        return Err(Error::domain(
            "rate_matrix: ordering degree differs from delay matrix",
        ));
    }
    check_degree(n, MAX_DENSE_DEGREE, "dense rate-matrix degree")?;
    let len = ordering.len();
    let elems = ordering.elements();
    let inverses: Vec<Permutation> = elems.iter().map(Permutation::inverse).collect();
    let signs: Vec<f64> = elems.iter().map(|p| p.sign() as f64).collect();
    let rows: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .map(|i| {
            (0..len)
                .map(|j| {
                    let x = delay_monomial(r, &inverses[i].compose(&elems[j]));
                    match species {
                        Species::Boson => x,
                        Species::Fermion => signs[i] * signs[j] * x,
                    }
                })
                .collect()
        })
        .collect();
    let entries = DMatrix::from_fn(len, len, |i, j| rows[i][j]);
    Ok(RateMatrix {
        species,
        ordering: ordering.clone(),
        entries,
    })
}

fn finish_rate(x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -NEGATIVE_TOLERANCE {
        if x < -1e-13 {
            eprintln!("warning: rate {x:e} clamped to 0");
        }
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "rate evaluated to {x:e}, below tolerance"
        )))
    }
}

/// `v† R v`.
pub fn rate_direct(v: &MonomialVector, r: &RateMatrix) -> Result<f64> {
    if !v.ordering.same_as(&r.ordering) && v.ordering.elements() != r.ordering.elements() {
        return Err(Error::domain(
            "rate_direct: vector and matrix use different orderings",
        ));
    }
    let len = v.values.len();
    let rows: Vec<Complex64> = (0..len)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..len {
                acc += v.values[j] * r.entries[(i, j)];
            }
            v.values[i].conj() * acc
        })
        .collect();
    finish_rate(rows.iter().sum::<Complex64>().re)
}

/// The direct rate without materializing `R`, for `n ≤ 8`:
/// `Σ_π (±) r_π · per(N^π)` with `N^π[i][k] = conj(A[i][π⁻¹(k)])·A[i][k]`.
pub fn rate_streaming(a: &ComplexMatrix, r: &DelayMatrix, species: Species) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n || r.n() != n {
        return Err(Error::domain("rate_streaming: A and r must both be n x n"));
    }
    check_degree(n, MAX_DIRECT_DEGREE, "direct rate degree")?;
    let group = all_permutations(n)?;
    let terms: Vec<f64> = group
        .elements()
        .par_iter()
        .map(|pi| -> Result<f64> {
            let w = delay_monomial(r, pi);
            if w == 0.0 {
                return Ok(0.0);
            }
            let inv = pi.inverse();
            let nm = ComplexMatrix::from_fn(n, n, |i, k| a[(i, inv.apply(k))].conj() * a[(i, k)]);
            let sign = match species {
                Species::Boson => 1.0,
                Species::Fermion => pi.sign() as f64,
            };
            Ok(sign * w * permanent(&nm)?.re)
        })
        .collect::<Result<_>>()?;
    finish_rate(terms.iter().sum())
}

/// The classical limit `per(|A_ij|²)`.
pub fn rate_fully_distinguishable(a: &ComplexMatrix) -> Result<f64> {
    let weights = a.map(|z| Complex64::new(z.norm_sqr(), 0.0));
    Ok(permanent(&weights)?.re)
}

/// Irreps of every `λ ⊢ n` on one ordering; the data behind the transform `T`.
#[derive(Clone, Debug)]
pub struct Transform {
    ordering: GroupOrdering,
    irreps: Vec<IrrepMatrixSet>,
    intertwiners: Vec<DMatrix<f64>>,
}

impl Transform {
    pub fn ordering(&self) -> &GroupOrdering {
        &self.ordering
    }

    /// Partitions in block order (reverse lexicographic).
    pub fn partitions(&self) -> impl Iterator<Item = &Partition> {
        self.irreps.iter().map(IrrepMatrixSet::partition)
    }

    pub fn irreps(&self) -> &[IrrepMatrixSet] {
        &self.irreps
    }

    fn slot_of(&self, lambda: &Partition) -> usize {
        self.irreps
            .iter()
            .position(|d| d.partition() == lambda)
            .expect("every partition of n has a slot")
    }

    /// The dense orthogonal matrix `T`: rows `(λ, i, j)` row-major within `λ`.
    pub fn dense(&self) -> DMatrix<f64> {
        let len = self.ordering.len();
        let mut t = DMatrix::zeros(len, len);
        let mut row = 0;
        for d in &self.irreps {
            let s = d.dim();
            let scale = (s as f64 / len as f64).sqrt();
            for (col, _) in self.ordering.iter().enumerate() {
                let e = d.entries_at(col);
                for k in 0..s * s {
                    t[(row + k, col)] = scale * e[k];
                }
            }
            row += s * s;
        }
        t
    }
}

pub fn build_transform(ordering: &GroupOrdering) -> Result<Transform> {
    let n = ordering.degree();
    check_degree(n, MAX_DENSE_DEGREE, "block transform degree")?;
    let parts = partitions_of(n);
    let irreps: Vec<IrrepMatrixSet> = parts
        .par_iter()
        .map(|lambda| irrep_matrices(lambda, ordering))
        .collect();
    let intertwiners = parts.iter().map(conjugate_intertwiner).collect();
    Ok(Transform {
        ordering: ordering.clone(),
        irreps,
        intertwiners,
    })
}

/// `K^λ(r) = Σ_π D^λ(π)·r_π`, the bosonic block of partition `λ`.
pub fn k_block(irreps: &IrrepMatrixSet, r: &DelayMatrix) -> DMatrix<f64> {
    let s = irreps.dim();
    let mut k = vec![0.0; s * s];
    for (pos, pi) in irreps.ordering().iter().enumerate() {
        let w = delay_monomial(r, pi);
        if w == 0.0 {
            continue;
        }
        for (acc, d) in k.iter_mut().zip(irreps.entries_at(pos)) {
            *acc += w * d;
        }
    }
    DMatrix::from_row_slice(s, s, &k)
}

/// Copies `𝔳_{λ;i}` for one slot: row `i` of `√(s_λ/n!)·D^λ(A)`.
fn projected_vectors(irreps: &IrrepMatrixSet, v: &MonomialVector) -> Vec<DVector<Complex64>> {
    let s = irreps.dim();
    let scale = (s as f64 / v.values.len() as f64).sqrt();
    let mut acc = vec![Complex64::new(0.0, 0.0); s * s];
    for (pos, &x) in v.values.iter().enumerate() {
        if x == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (a, d) in acc.iter_mut().zip(irreps.entries_at(pos)) {
            *a += x * d;
        }
    }
    (0..s)
        .map(|i| DVector::from_fn(s, |j, _| acc[i * s + j] * scale))
        .collect()
}

/// One irrep slot of the decomposition: `s_λ` vectors against one block.
#[derive(Clone, Debug)]
pub struct BlockTerm {
    /// The irrep labelling the vectors.
    pub slot: Partition,
    /// Partition `ν` of the paired block `K^ν`; `λ` for bosons, `λ*` for fermions.
    pub block_partition: Partition,
    pub block: DMatrix<f64>,
    pub vectors: Vec<DVector<Complex64>>,
}

impl BlockTerm {
    /// `Σ_i 𝔳_i† K 𝔳_i`.
    pub fn contribution(&self) -> f64 {
        let k = self.block.map(|x| Complex64::new(x, 0.0));
        self.vectors
            .iter()
            .map(|v| (v.adjoint() * &k * v)[(0, 0)].re)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.block.amax()
    }

    pub fn multiplicity(&self) -> usize {
        self.vectors.len()
    }
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub species: Species,
    pub terms: Vec<BlockTerm>,
}

impl BlockDecomposition {
    pub fn term(&self, slot: &Partition) -> Option<&BlockTerm> {
        self.terms.iter().find(|t| &t.slot == slot)
    }
}

/// Splits `v† R v` into per-irrep contributions.
///
/// Bosons pair `𝔳_{λ;i}` with `K^λ`. Fermions pair `Qᵀ𝔳_{λ;i}` with `K^{λ*}`,
/// which is the same quadratic form as the `λ`-block `Q K^{λ*} Qᵀ` of `T R Tᵀ`.
pub fn block_decompose(
    v: &MonomialVector,
    r: &DelayMatrix,
    transform: &Transform,
    species: Species,
) -> Result<BlockDecomposition> {
    if v.ordering.elements() != transform.ordering.elements() || r.n() != v.degree() {
        return Err(Error::domain(
            "block_decompose: inconsistent sizes or orderings",
        ));
    }
    let blocks: Vec<DMatrix<f64>> = transform.irreps.par_iter().map(|d| k_block(d, r)).collect();
    let terms = transform
        .irreps
        .iter()
        .enumerate()
        .map(|(slot, d)| {
            let vectors = projected_vectors(d, v);
            match species {
                Species::Boson => BlockTerm {
                    slot: d.partition().clone(),
                    block_partition: d.partition().clone(),
                    block: blocks[slot].clone(),
                    vectors,
                },
                Species::Fermion => {
                    let conj = d.partition().conjugate();
                    let q_t = transform.intertwiners[slot]
                        .transpose()
                        .map(|x| Complex64::new(x, 0.0));
                    BlockTerm {
                        slot: d.partition().clone(),
                        block: blocks[transform.slot_of(&conj)].clone(),
                        block_partition: conj,
                        vectors: vectors.iter().map(|x| &q_t * x).collect(),
                    }
                }
            }
        })
        .collect();
    Ok(BlockDecomposition { species, terms })
}

pub fn rate_blocked(decomp: &BlockDecomposition) -> Result<f64> {
    finish_rate(decomp.terms.iter().map(BlockTerm::contribution).sum())
}

/// `imm^λ` of a Gram matrix with delay partition `μ` vanishes iff `μ ⋬ λ`.
pub fn gamas_vanishes(lambda: &Partition, mu: &Partition) -> Result<bool> {
    Ok(!lambda.dominates(mu)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncatedRate {
    pub rate: f64,
    /// Block partitions that were summed.
    pub kept: Vec<Partition>,
    /// Block partitions skipped, with the largest entry of each block.
    pub dropped: Vec<(Partition, f64)>,
    /// Upper bound on the skipped contribution, `Σ ‖K‖_F·Σ_i ‖𝔳_i‖²`.
    pub error_bound: f64,
}

fn truncate(decomp: &BlockDecomposition, mu: &Partition) -> Result<TruncatedRate> {
    let mut rate = 0.0;
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut error_bound = 0.0;
    for term in &decomp.terms {
        if gamas_vanishes(&term.block_partition, mu)? {
            let weight: f64 = term.vectors.iter().map(|v| v.norm_squared()).sum();
            error_bound += term.block.norm() * weight;
            if !dropped.iter().any(|(p, _)| p == &term.block_partition) {
                dropped.push((term.block_partition.clone(), term.max_abs()));
            }
        } else {
            rate += term.contribution();
            if !kept.contains(&term.block_partition) {
                kept.push(term.block_partition.clone());
            }
        }
    }
    Ok(TruncatedRate {
        rate: finish_rate(rate)?,
        kept,
        dropped,
        error_bound,
    })
}

/// Sums only the blocks `K^ν` with `μ ⊴ ν`.
///
/// Exact when `r` comes from binned times with delay partition `μ`; a dropped
/// block with an entry above [`ZERO_BLOCK_TOLERANCE`] is reported as a
/// precondition failure.
pub fn rate_truncated(decomp: &BlockDecomposition, mu: &Partition) -> Result<TruncatedRate> {
    let out = truncate(decomp, mu)?;
    if let Some((p, m)) = out.dropped.iter().find(|(_, m)| *m > ZERO_BLOCK_TOLERANCE) {
        return Err(Error::Precondition(format!(
            "block {p} should vanish for delay partition {mu} but has entry {m:e}; \
             use binned (snapped) arrival times"
        )));
    }
    Ok(out)
}

/// Like [`rate_truncated`] but tolerates non-vanishing dropped blocks, for
/// continuous arrival times. See `error_bound`.
pub fn rate_truncated_approx(decomp: &BlockDecomposition, mu: &Partition) -> Result<TruncatedRate> {
    truncate(decomp, mu)
}

/// Number of distinct block entries up to symmetry: `Σ_λ s_λ(s_λ+1)/2`.
pub fn distinct_function_count(n: usize) -> u128 {
    partitions_of(n)
        .iter()
        .map(|l| {
            let s = standard_tableau_count(l);
            (s * s + s) / 2
        })
        .sum()
}

/// An `n`-particle problem with one fully distinguishable particle removed.
#[derive(Clone, Debug)]
pub struct ReducedProblem {
    pub removed: usize,
    pub reduced: DelayMatrix,
    /// The rate matrix splits into this many identical copies of the reduced one.
    pub copies: usize,
}

pub fn reduce_distinguishable_particle(r: &DelayMatrix, k: usize) -> Result<ReducedProblem> {
    let n = r.n();
    if k >= n {
        return Err(Error::domain(format!("particle {} out of range", k + 1)));
    }
    if !r.is_isolated(k, DISTINGUISHABLE_THRESHOLD) {
        return Err(Error::Precondition(format!(
            "particle {} still overlaps another particle",
            k + 1
        )));
    }
    let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let reduced = r.principal_submatrix(&keep);
    Ok(ReducedProblem {
        removed: k,
        reduced,
        copies: n,
    })
}

/// Rate obtained by peeling off fully distinguishable particles one at a time:
/// `rate(A, r) = Σ_j |A[j][k]|²·rate(A without row j, column k; r without k)`.
pub fn rate_by_reduction(a: &ComplexMatrix, r: &DelayMatrix, species: Species) -> Result<f64> {
    let n = a.nrows();
    if n == 1 {
        return Ok(a[(0, 0)].norm_sqr());
    }
    let Some(k) = (0..n).find(|&k| r.is_isolated(k, DISTINGUISHABLE_THRESHOLD)) else {
        return rate_streaming(a, r, species);
    };
    let reduced = reduce_distinguishable_particle(r, k)?.reduced;
    let cols: Vec<usize> = (0..n).filter(|&c| c != k).collect();
    let mut total = 0.0;
    for j in 0..n {
        let w = a[(j, k)].norm_sqr();
        if w == 0.0 {
            continue;
        }
        let rows: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        let minor = ComplexMatrix::from_fn(n - 1, n - 1, |i, c| a[(rows[i], cols[c])]);
        total += w * rate_by_reduction(&minor, &reduced, species)?;
    }
    Ok(total)
}
