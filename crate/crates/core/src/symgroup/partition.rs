use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer partition `λ = (λ_1 ≥ λ_2 ≥ … ≥ λ_k ≥ 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::domain("a partition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(Error::domain(format!("{parts:?}: parts must be positive")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain(format!(
                "{parts:?}: parts must be weakly decreasing"
            )));
        }
        Ok(Partition { parts })
    }

    /// Sorts arbitrary positive tallies into a partition, dropping zeros.
    pub fn from_tallies(mut tallies: Vec<usize>) -> Result<Self> {
        tallies.retain(|&t| t > 0);
        tallies.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(tallies)
    }

    /// The single-row partition `(n)`.
    pub fn row(n: usize) -> Self {
        Partition { parts: vec![n] }
    }

    /// The single-column partition `(1^n)`.
    pub fn column(n: usize) -> Self {
        Partition { parts: vec![1; n] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Largest part `λ_1`.
    pub fn width(&self) -> usize {
        self.parts[0]
    }

    /// Number of parts `k`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.width();
        let parts = (0..width)
            .map(|c| self.parts.iter().filter(|&&p| p > c).count())
            .collect();
        Partition { parts }
    }

    /// `self ⊵ other` in dominance order. Sizes must agree.
    pub fn dominates(&self, other: &Partition) -> Result<bool> {
        if self.size() != other.size() {
            return Err(Error::domain(format!(
                "dominance compares partitions of one n, got {self} and {other}"
            )));
        }
        let len = self.len().max(other.len());
        let (mut a, mut b) = (0usize, 0usize);
        for i in 0..len {
            a += self.parts.get(i).copied().unwrap_or(0);
            b += other.parts.get(i).copied().unwrap_or(0);
            if a < b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cells `(row, col)` of the Young diagram, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
    }

    pub fn hook_length(&self, row: usize, col: usize) -> usize {
        let arm = self.parts[row] - col - 1;
        let leg = self.parts[row + 1..].iter().filter(|&&p| p > col).count();
        arm + leg + 1
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition{self}")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `3,2,1`, `(3,2,1)` or `3 2 1`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::domain(format!("cannot parse partition from {s:?}")))?;
        Partition::new(parts)
    }
}

/// All partitions of `n` in reverse-lexicographic order, `(n)` first.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    fn go(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for part in (1..=remaining.min(max)).rev() {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

pub fn conjugate(lambda: &Partition) -> Partition {
    lambda.conjugate()
}

/// `lambda ⊵ mu`.
pub fn dominates(lambda: &Partition, mu: &Partition) -> Result<bool> {
    lambda.dominates(mu)
}

/// Number of standard Young tableaux `s_λ`, by the hook-length formula.
pub fn standard_tableau_count(lambda: &Partition) -> u128 {
    let mut num = BigUint::one();
    for k in 2..=lambda.size() {
        num *= k as u64;
    }
    let mut den = BigUint::one();
    for (r, c) in lambda.cells() {
        den *= lambda.hook_length(r, c) as u64;
    }
    let q = num / den;
    u128::try_from(q).expect("s_λ exceeds u128")
}

/// Dimension `d_λ` of the `GL_n` irrep `λ` (number of semistandard tableaux
/// with entries in `1..=n`), by the hook-content formula. Zero when `λ` has
/// more than `n` parts, since no such irrep exists.
pub fn gl_dimension(lambda: &Partition, n: usize) -> BigUint {
    if lambda.len() > n {
        return BigUint::default();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for (r, c) in lambda.cells() {
        // content c - r, shifted by n; nonnegative because r < n
        num *= (n + c - r) as u64;
        den *= lambda.hook_length(r, c) as u64;
    }
    num / den
}
