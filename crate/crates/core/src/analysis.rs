//! Delay partitions under uniformly random arrivals, the witness partition,
//! and the cost model for evaluating the associated group functions.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symgroup::{gl_dimension, partitions_of, standard_tableau_count, Partition};

/// `(⌈n/2⌉, ⌊n/2⌋)`.
pub fn witness_partition(n: usize) -> Result<Partition> {
    if n < 2 {
        return Err(Error::domain("the witness partition needs n >= 2"));
    }
    Partition::new(vec![n.div_ceil(2), n / 2])
}

/// Whether `μ` forces witness-class group functions: `μ₁ ≤ ⌈n/2⌉`.
pub fn requires_witness(mu: &Partition) -> bool {
    mu.width() <= mu.size().div_ceil(2)
}

/// The same predicate as `μ ⊴ μ_w`.
pub fn requires_witness_by_dominance(mu: &Partition) -> Result<bool> {
    witness_partition(mu.size())?.dominates(mu)
}

/// The same predicate through conjugation, `μ_w* ⊴ μ*`.
pub fn requires_witness_by_conjugate(mu: &Partition) -> Result<bool> {
    mu.conjugate()
        .dominates(&witness_partition(mu.size())?.conjugate())
}

pub fn factorial_big(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial_big(n) / (factorial_big(k) * factorial_big(n - k))
}

/// `C_k = binom(2k, k)/(k+1)`.
pub fn catalan(k: usize) -> BigUint {
    binomial_big(2 * k, k) / (k + 1)
}

fn multinomial(total: usize, parts: impl IntoIterator<Item = usize>) -> BigUint {
    parts
        .into_iter()
        .fold(factorial_big(total), |acc, p| acc / factorial_big(p))
}

/// Probability that `n` uniform arrivals in `b` bins produce delay partition `μ`:
/// `binom(n; μ)·binom(b; b_0, …, b_n) / bⁿ`, or 0 when `μ` has more parts than bins.
pub fn delay_partition_probability(mu: &Partition, bins: usize) -> BigRational {
    let n = mu.size();
    if bins < mu.len() {
        return BigRational::zero();
    }
    let mut occupancy = vec![0usize; n + 1];
    for &p in mu.parts() {
        occupancy[p] += 1;
    }
    occupancy[0] = bins - mu.len();
    let num = multinomial(n, mu.parts().iter().copied()) * multinomial(bins, occupancy);
    let den = BigUint::from(bins).pow(n as u32);
    BigRational::new(num.into(), den.into())
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessProbability {
    pub n: usize,
    pub bins: usize,
    /// Probability that no bin holds more than `⌈n/2⌉` particles.
    #[serde(serialize_with = "ser_ratio")]
    pub exact: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub tail_exact: BigRational,
    /// `√(2/(nπ))·(4/b)^{n/2}`.
    pub tail_asymptotic: f64,
    /// False when `b ≤ 4`, where the asymptotic tail does not decay.
    pub tail_decays: bool,
}

fn ser_ratio<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl WitnessProbability {
    pub fn exact_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::NAN)
    }

    pub fn tail_f64(&self) -> f64 {
        self.tail_exact.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn tail_asymptotic(n: usize, bins: usize) -> f64 {
    (2.0 / (n as f64 * std::f64::consts::PI)).sqrt() * (4.0 / bins as f64).powf(n as f64 / 2.0)
}

pub fn witness_probability(n: usize, bins: usize) -> Result<WitnessProbability> {
    if n < 2 || bins < 2 {
        return Err(Error::domain("witness probability needs n >= 2 and b >= 2"));
    }
    let exact = partitions_of(n)
        .iter()
        .filter(|mu| requires_witness(mu))
        .map(|mu| delay_partition_probability(mu, bins))
        .fold(BigRational::zero(), |a, b| a + b);
    Ok(WitnessProbability {
        n,
        bins,
        tail_exact: BigRational::one() - &exact,
        exact,
        tail_asymptotic: tail_asymptotic(n, bins),
        tail_decays: bins > 4,
    })
}

/// Operation-count estimate `[mult(λ) + log₂ n]·n²·s_λ·d_λ`, with the
/// multiplicity taken as `s_λ`.
#[derive(Clone, Debug, Serialize)]
pub struct CostEstimate {
    pub partition: Partition,
    pub s_lambda: u128,
    #[serde(serialize_with = "ser_big")]
    pub d_lambda: BigUint,
    pub operations: f64,
}

fn ser_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn burgisser_cost(lambda: &Partition) -> CostEstimate {
    let n = lambda.size();
    let s = standard_tableau_count(lambda);
    let d = gl_dimension(lambda, n);
    let operations = (s as f64 + (n as f64).log2())
        * (n * n) as f64
        * s as f64
        * d.to_f64().unwrap_or(f64::INFINITY);
    CostEstimate {
        partition: lambda.clone(),
        s_lambda: s,
        d_lambda: d,
        operations,
    }
}

/// `d_{(2^{n/2})} = C_{n/2}·binom(n+1, n/2)` for even `n`.
pub fn two_column_dimension(n: usize) -> BigUint {
    assert!(n.is_multiple_of(2), "two_column_dimension needs even n");
    catalan(n / 2) * binomial_big(n + 1, n / 2)
}

/// `2^{2n+3}/(n²π)`.
pub fn two_column_dimension_estimate(n: usize) -> f64 {
    2f64.powi(2 * n as i32 + 3) / ((n * n) as f64 * std::f64::consts::PI)
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionRow {
    pub partition: Partition,
    #[serde(serialize_with = "ser_ratio")]
    pub probability: BigRational,
    pub probability_f64: f64,
    pub requires_witness: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub n: usize,
    pub b: usize,
    pub witness: Partition,
    pub witness_conjugate: Partition,
    pub p_exact: String,
    pub p_float: f64,
    pub tail_exact: f64,
    pub tail_asymptotic: f64,
    pub tail_decays: bool,
    pub witness_cost: Option<CostEstimate>,
    pub partitions: Vec<PartitionRow>,
}

/// Largest `n` accepted by [`analyze`].
pub const MAX_ANALYSIS_N: usize = 12;

pub fn analyze(n: usize, bins: usize) -> Result<WitnessReport> {
    if n > MAX_ANALYSIS_N {
        return Err(Error::SizeLimit {
            what: "analysis particle count",
            value: n as u128,
            limit: MAX_ANALYSIS_N as u128,
        });
    }
    let witness = witness_partition(n)?;
    let wp = witness_probability(n, bins)?;
    let partitions = partitions_of(n)
        .into_iter()
        .map(|mu| {
            let probability = delay_partition_probability(&mu, bins);
            PartitionRow {
                probability_f64: probability.to_f64().unwrap_or(f64::NAN),
                requires_witness: requires_witness(&mu),
                probability,
                partition: mu,
            }
        })
        .collect();
    Ok(WitnessReport {
        n,
        b: bins,
        witness_conjugate: witness.conjugate(),
        witness_cost: n.is_multiple_of(2).then(|| burgisser_cost(&witness.conjugate())),
        witness,
        p_exact: wp.exact.to_string(),
        p_float: wp.exact_f64(),
        tail_exact: wp.tail_f64(),
        tail_asymptotic: wp.tail_asymptotic,
        tail_decays: wp.tail_decays,
        partitions,
    })
}
