//! Arrival times, the Gaussian delay matrix and time-bin discretization.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symgroup::Partition;

/// Overlaps below this are treated as exactly zero when deciding whether a
/// particle is fully distinguishable.
pub const DISTINGUISHABLE_THRESHOLD: f64 = 1e-12;

/// `1/δω² = 1/ΔΩ² + 1/Δω²`.
pub fn effective_width(source: f64, detector: f64) -> f64 {
    1.0 / (1.0 / (source * source) + 1.0 / (detector * detector)).sqrt()
}

/// Arrival times `τ̄`, effective width `δω`, observation window `𝒯` and bin
/// count `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrivalSpec {
    pub taus: Vec<f64>,
    pub delta_omega: f64,
    pub window: f64,
    pub bins: usize,
}

impl ArrivalSpec {
    pub fn new(taus: Vec<f64>, delta_omega: f64, window: f64, bins: usize) -> Result<Self> {
        let spec = ArrivalSpec {
            taus,
            delta_omega,
            window,
            bins,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `δω = 1`, so the times carry the scale. The window is the smallest
    /// integer strictly above every time, split into two bins.
    pub fn dimensionless(taus: Vec<f64>) -> Result<Self> {
        let top = taus.iter().cloned().fold(0.0f64, f64::max);
        Self::new(taus, 1.0, top.floor() + 1.0, 2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.taus.is_empty() {
            return Err(Error::config(
                "taus",
                "at least one arrival time is required",
            ));
        }
        if !(self.delta_omega > 0.0 && self.delta_omega.is_finite()) {
            return Err(Error::config(
                "delta_omega",
                "must be a positive finite number",
            ));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::config("window", "must be a positive finite number"));
        }
        if self.bins < 2 {
            return Err(Error::config("bins", "at least two time bins are required"));
        }
        if let Some(t) = self
            .taus
            .iter()
            .find(|&&t| !(0.0..self.window).contains(&t))
        {
            return Err(Error::domain(format!(
                "arrival time {t} outside the window [0, {})",
                self.window
            )));
        }
        Ok(())
    }

    pub fn particles(&self) -> usize {
        self.taus.len()
    }

    pub fn bin_width(&self) -> f64 {
        self.window / self.bins as f64
    }
}

/// Symmetric overlap (Gram) matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayMatrix {
    r: DMatrix<f64>,
}

impl DelayMatrix {
    /// Accepts any symmetric matrix with unit diagonal and entries in `[0, 1]`.
    pub fn from_matrix(r: DMatrix<f64>) -> Result<Self> {
        let n = r.nrows();
        if r.ncols() != n || n == 0 {
            return Err(Error::domain("delay matrix must be square and non-empty"));
        }
        for i in 0..n {
            if (r[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "delay matrix diagonal entry {} is not 1",
                    i + 1
                )));
            }
            for j in 0..n {
                let x = r[(i, j)];
                if !(-1e-12..=1.0 + 1e-12).contains(&x) || (x - r[(j, i)]).abs() > 1e-12 {
                    return Err(Error::domain(format!(
                        "delay matrix entry ({}, {}) = {x} breaks symmetry or [0, 1]",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(DelayMatrix { r })
    }

    pub fn identity(n: usize) -> Self {
        DelayMatrix {
            r: DMatrix::identity(n, n),
        }
    }

    pub fn ones(n: usize) -> Self {
        DelayMatrix {
            r: DMatrix::from_element(n, n, 1.0),
        }
    }

    pub fn from_times(taus: &[f64], delta_omega: f64) -> Self {
        let n = taus.len();
        let r = DMatrix::from_fn(n, n, |i, j| {
            let d = delta_omega * (taus[i] - taus[j]);
            (-d * d / 2.0).exp()
        });
        DelayMatrix { r }
    }

    /// Restriction to the particles in `keep`.
    pub fn principal_submatrix(&self, keep: &[usize]) -> DelayMatrix {
        let k = keep.len();
        DelayMatrix {
            r: DMatrix::from_fn(k, k, |i, j| self.r[(keep[i], keep[j])]),
        }
    }

    pub fn n(&self) -> usize {
        self.r.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.r[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Whether particle `k` overlaps nobody else.
    pub fn is_isolated(&self, k: usize, threshold: f64) -> bool {
        (0..self.n()).all(|j| j == k || self.r[(k, j)] < threshold)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.r.clone().symmetric_eigenvalues().min()
    }
}

/// `r_ij = exp(−δω²(τ_i − τ_j)²/2)`.
pub fn delay_matrix(spec: &ArrivalSpec) -> DelayMatrix {
    DelayMatrix::from_times(&spec.taus, spec.delta_omega)
}

/// The delay partition `μ_τ` together with the bin count it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayPartition {
    partition: Partition,
    bins: usize,
}

impl DelayPartition {
    pub fn new(partition: Partition, bins: usize) -> Result<Self> {
        if bins < partition.len() {
            return Err(Error::domain(format!(
                "{partition} has {} parts but only {bins} bins exist",
                partition.len()
            )));
        }
        Ok(DelayPartition { partition, bins })
    }

    /// From 1-based bin labels; label values and particle order are irrelevant.
    pub fn from_bin_labels(labels: &[usize], bins: usize) -> Result<Self> {
        let mut tallies = std::collections::BTreeMap::<usize, usize>::new();
        for &c in labels {
            *tallies.entry(c).or_default() += 1;
        }
        let partition = Partition::from_tallies(tallies.into_values().collect())?;
        Self::new(partition, bins)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// `b_0, …, b_n`: the number of bins holding exactly `i` particles.
    pub fn occupancy(&self) -> Vec<usize> {
        let n = self.partition.size();
        let mut counts = vec![0usize; n + 1];
        for &p in self.partition.parts() {
            counts[p] += 1;
        }
        counts[0] = self.bins - self.partition.len();
        counts
    }
}

/// Occupancy numbers `b_0..b_n` of `μ` spread over `b` bins.
pub fn occupancy(mu: &Partition, bins: usize) -> Result<Vec<usize>> {
    Ok(DelayPartition::new(mu.clone(), bins)?.occupancy())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    /// 1-based bin `c` for each particle: `(c−1)𝒯/b ≤ τ < c𝒯/b`.
    pub bin_of: Vec<usize>,
    pub partition: DelayPartition,
}

pub fn discretize(spec: &ArrivalSpec) -> Result<Discretization> {
    spec.validate()?;
    let b = spec.bins;
    let bin_of: Vec<usize> = spec
        .taus
        .iter()
        .map(|&t| ((t * b as f64 / spec.window).floor() as usize).min(b - 1) + 1)
        .collect();
    let partition = DelayPartition::from_bin_labels(&bin_of, b)?;
    Ok(Discretization { bin_of, partition })
}

/// Bin-center times `(c − ½)𝒯/b`.
pub fn snapped_times(bin_of: &[usize], spec: &ArrivalSpec) -> Vec<f64> {
    let w = spec.bin_width();
    bin_of.iter().map(|&c| (c as f64 - 0.5) * w).collect()
}

/// Delay matrix of the bin-center times; same-bin pairs get exactly 1.
pub fn snapped_delay_matrix(bin_of: &[usize], spec: &ArrivalSpec) -> DelayMatrix {
    DelayMatrix::from_times(&snapped_times(bin_of, spec), spec.delta_omega)
}
