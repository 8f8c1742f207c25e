//! Exact output distributions over collision-free detector strings and
//! inverse-CDF sampling from them.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::delays::{delay_matrix, ArrivalSpec, DelayMatrix};
use crate::error::{Error, Result};
use crate::interferometer::{binomial, enumerate_outputs, Interferometer, OutputString};
use crate::matfun::{determinant, ComplexMatrix};
use crate::rates::{rate_streaming, Species};

pub const MAX_DISTRIBUTION_STRINGS: u128 = 100_000;
pub const MAX_DISTRIBUTION_PARTICLES: usize = 7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub s: OutputString,
    pub rate: f64,
    pub prob: f64,
}

/// `Pr[s] = rate(s) / Σ_{s' ∈ G_{m,n}} rate(s')`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputDistribution {
    pub m: usize,
    pub n: usize,
    pub species: Species,
    /// Short SHA-256 of the arrival parameters (or delay matrix) used.
    pub source_hash: String,
    pub entries: Vec<DistributionEntry>,
}

pub(crate) fn short_hash(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}

fn delay_hash(r: &DelayMatrix) -> String {
    let bytes: Vec<u8> = r.matrix().iter().flat_map(|x| x.to_le_bytes()).collect();
    short_hash(&bytes)
}

/// Builds the distribution with a caller-supplied rate for each `A(s)`.
pub fn build_distribution_with<F>(
    interferometer: &Interferometer,
    n: usize,
    species: Species,
    source_hash: String,
    rate: F,
) -> Result<OutputDistribution>
where
    F: Fn(&ComplexMatrix) -> Result<f64> + Sync,
{
    let m = interferometer.channels();
    if n == 0 || n > m {
        return Err(Error::domain(format!(
            "need 1 <= n <= m, got n = {n}, m = {m}"
        )));
    }
    if n > MAX_DISTRIBUTION_PARTICLES {
        return Err(Error::SizeLimit {
            what: "distribution particle count",
            value: n as u128,
            limit: MAX_DISTRIBUTION_PARTICLES as u128,
        });
    }
    let count = binomial(m, n);
    if count > MAX_DISTRIBUTION_STRINGS {
        return Err(Error::SizeLimit {
            what: "distribution strings C(m, n)",
            value: count,
            limit: MAX_DISTRIBUTION_STRINGS,
        });
    }
    let outputs = enumerate_outputs(m, n)?;
    let rates: Vec<f64> = outputs
        .par_iter()
        .map(|s| rate(&interferometer.submatrix(s, n)?))
        .collect::<Result<_>>()?;
    let total: f64 = rates.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Numerical(format!(
            "total rate over G_{{m,n}} is {total}"
        )));
    }
    let entries = outputs
        .into_iter()
        .zip(rates)
        .map(|(s, rate)| DistributionEntry {
            s,
            rate,
            prob: rate / total,
        })
        .collect();
    Ok(OutputDistribution {
        m,
        n,
        species,
        source_hash,
        entries,
    })
}

pub fn build_distribution_for_delay(
    interferometer: &Interferometer,
    n: usize,
    r: &DelayMatrix,
    species: Species,
) -> Result<OutputDistribution> {
    if r.n() != n {
        return Err(Error::domain(
            "delay matrix size differs from particle count",
        ));
    }
    build_distribution_with(interferometer, n, species, delay_hash(r), |a| {
        rate_streaming(a, r, species)
    })
}

pub fn build_distribution(
    interferometer: &Interferometer,
    n: usize,
    spec: &ArrivalSpec,
    species: Species,
) -> Result<OutputDistribution> {
    if spec.particles() != n {
        return Err(Error::domain(format!(
            "arrival spec has {} times for {n} particles",
            spec.particles()
        )));
    }
    let r = delay_matrix(spec);
    let hash = short_hash(serde_json::to_string(spec)?.as_bytes());
    build_distribution_with(interferometer, n, species, hash, |a| {
        rate_streaming(a, &r, species)
    })
}

impl OutputDistribution {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.prob).collect()
    }

    pub fn prob_of(&self, s: &OutputString) -> Option<f64> {
        self.entries.iter().find(|e| &e.s == s).map(|e| e.prob)
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        -self
            .entries
            .iter()
            .filter(|e| e.prob > 0.0)
            .map(|e| e.prob * e.prob.log2())
            .sum::<f64>()
    }

    pub fn most_likely(&self) -> &DistributionEntry {
        self.entries
            .iter()
            .reduce(|best, e| if e.prob > best.prob { e } else { best })
            .expect("a distribution over G_{m,n} is never empty")
    }

    /// `½ Σ_s |p(s) − q(s)|`; both must cover the same strings in the same order.
    pub fn total_variation(&self, other: &OutputDistribution) -> Result<f64> {
        if self.entries.len() != other.entries.len()
            || self
                .entries
                .iter()
                .zip(&other.entries)
                .any(|(a, b)| a.s != b.s)
        {
            return Err(Error::domain(
                "distributions cover different output strings",
            ));
        }
        Ok(0.5
            * self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a.prob - b.prob).abs())
                .sum::<f64>())
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.entries {
            let line = serde_json::json!({"s": e.s.to_string(), "rate": e.rate, "prob": e.prob});
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["s", "rate", "prob"])?;
        for e in &self.entries {
            out.write_record([e.s.to_string(), e.rate.to_string(), e.prob.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `count` i.i.d. draws by inverse CDF; deterministic given `seed`.
pub fn sample(dist: &OutputDistribution, count: usize, seed: u64) -> Vec<OutputString> {
    let mut cdf = Vec::with_capacity(dist.entries.len());
    let mut acc = 0.0;
    for e in &dist.entries {
        acc += e.prob;
        cdf.push(acc);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            dist.entries[k].s.clone()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FermionCheck {
    pub max_deviation: f64,
    pub matches: bool,
    /// Indistinguishable fermions follow a determinant distribution, which is
    /// efficiently computable.
    pub classically_easy: bool,
}

/// Compares a fermion distribution at simultaneous arrival against
/// `|det A(s)|² / Σ`.
pub fn indistinguishable_fermion_check(
    dist: &OutputDistribution,
    interferometer: &Interferometer,
    spec: &ArrivalSpec,
) -> Result<FermionCheck> {
    if dist.species != Species::Fermion {
        return Err(Error::Precondition("distribution is not fermionic".into()));
    }
    if spec.taus.iter().any(|&t| t != spec.taus[0]) {
        return Err(Error::Precondition(
            "arrival times are not all equal".into(),
        ));
    }
    let dets: Vec<f64> = dist
        .entries
        .iter()
        .map(|e| Ok(determinant(&interferometer.submatrix(&e.s, dist.n)?).norm_sqr()))
        .collect::<Result<_>>()?;
    let total: f64 = dets.iter().sum();
    let max_deviation = dist
        .entries
        .iter()
        .zip(&dets)
        .map(|(e, d)| (e.prob - d / total).abs())
        .fold(0.0, f64::max);
    Ok(FermionCheck {
        max_deviation,
        matches: max_deviation < 1e-9,
        classically_easy: true,
    })
}
