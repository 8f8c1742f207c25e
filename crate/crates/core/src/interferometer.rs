//! Linear interferometers: the unitary `U`, detector strings, scattering
//! submatrices `A(s)` and their permutation monomials.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::{monomial, ComplexMatrix};
use crate::symgroup::GroupOrdering;

pub const UNITARITY_TOL: f64 = 1e-10;
/// Largest `C(m, n)` that [`enumerate_outputs`] will materialize.
pub const MAX_OUTPUTS: u128 = 1_000_000;

#[derive(Clone, Debug)]
pub struct Interferometer {
    m: usize,
    u: ComplexMatrix,
    seed: Option<u64>,
}

impl Interferometer {
    /// Wraps a unitary, rejecting anything with `‖U†U − I‖_max > 1e-10`.
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        let m = u.nrows();
        if m == 0 || u.ncols() != m {
            return Err(Error::domain(format!(
                "interferometer needs a non-empty square matrix, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let dev = unitarity_defect(&u);
        if dev > UNITARITY_TOL {
            return Err(Error::domain(format!(
                "matrix is not unitary: max |U†U - I| = {dev:e}"
            )));
        }
        Ok(Interferometer { m, u, seed: None })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::domain(
                "interferometer rows must form a square matrix",
            ));
        }
        Self::new(ComplexMatrix::from_fn(m, m, |i, j| rows[i][j]))
    }

    pub fn channels(&self) -> usize {
        self.m
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `A(s)` with inputs in ports `1..=n`: `A[β][α] = U[S_β][α]`.
    pub fn submatrix(&self, s: &OutputString, n: usize) -> Result<ComplexMatrix> {
        let inputs: Vec<usize> = (0..n).collect();
        self.submatrix_with_inputs(s, &inputs)
    }

    /// `A(s)` for an explicit list of 0-based input ports.
    pub fn submatrix_with_inputs(
        &self,
        s: &OutputString,
        inputs: &[usize],
    ) -> Result<ComplexMatrix> {
        let n = inputs.len();
        if s.len() != self.m {
            return Err(Error::domain(format!(
                "output string has {} modes, interferometer has {}",
                s.len(),
                self.m
            )));
        }
        if s.ones() != n {
            return Err(Error::domain(format!(
                "output string {s} has {} detections but there are {n} inputs",
                s.ones()
            )));
        }
        let mut seen = vec![false; self.m];
        for &p in inputs {
            if p >= self.m || std::mem::replace(&mut seen[p], true) {
                return Err(Error::domain(format!(
                    "invalid or repeated input port {}",
                    p + 1
                )));
            }
        }
        let rows = s.positions();
        Ok(ComplexMatrix::from_fn(n, n, |b, a| {
            self.u[(rows[b], inputs[a])]
        }))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.m)
            .map(|i| {
                (0..self.m)
                    .map(|j| [self.u[(i, j)].re, self.u[(i, j)].im])
                    .collect()
            })
            .collect();
        serde_json::json!(rows)
    }

    /// Parses an array of rows of `[re, im]` pairs.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        Self::from_rows(&rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json_value())?)?;
        Ok(())
    }
}

/// `max |U†U − I|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// Haar-random `m × m` unitary from the QR factorization of a complex
/// Ginibre matrix, with the phases of `R`'s diagonal pushed into `Q`.
pub fn haar_unitary(m: usize, seed: u64) -> Result<Interferometer> {
    if m == 0 {
        return Err(Error::domain("haar_unitary needs m >= 1"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = ComplexMatrix::from_fn(m, m, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    Ok(Interferometer {
        m,
        u: q,
        seed: Some(seed),
    })
}

/// A collision-free detector pattern `s ∈ {0,1}^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct OutputString {
    bits: Vec<u8>,
}

impl OutputString {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::domain(format!(
                "detector count {b} not allowed; only collision-free strings are supported"
            )));
        }
        Ok(OutputString { bits })
    }

    /// From 1-based detector positions `S`.
    pub fn from_positions(m: usize, positions: &[usize]) -> Result<Self> {
        let mut bits = vec![0u8; m];
        for &p in positions {
            if p == 0 || p > m || bits[p - 1] == 1 {
                return Err(Error::domain(format!("invalid or repeated detector {p}")));
            }
            bits[p - 1] = 1;
        }
        Ok(OutputString { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// 0-based indices of the firing detectors, ascending.
    pub fn positions(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
            .collect()
    }
}

impl TryFrom<Vec<u8>> for OutputString {
    type Error = Error;
    fn try_from(bits: Vec<u8>) -> Result<Self> {
        Self::from_bits(bits)
    }
}

impl From<OutputString> for Vec<u8> {
    fn from(s: OutputString) -> Self {
        s.bits
    }
}

impl fmt::Display for OutputString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for OutputString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '(' | ')'))
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::domain(format!("bad detector symbol {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(bits)
    }
}

/// All of `G_{m,n}`: strings with exactly `n` ones, lexicographic by bits.
pub fn enumerate_outputs(m: usize, n: usize) -> Result<Vec<OutputString>> {
    if n > m {
        return Err(Error::domain(format!(
            "cannot place {n} particles in {m} modes"
        )));
    }
    let count = binomial(m, n);
    if count > MAX_OUTPUTS {
        return Err(Error::SizeLimit {
            what: "output strings C(m, n)",
            value: count,
            limit: MAX_OUTPUTS,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut bits = vec![0u8; m];
    fn go(pos: usize, left: usize, bits: &mut Vec<u8>, out: &mut Vec<OutputString>) {
        let m = bits.len();
        if left == 0 {
            out.push(OutputString { bits: bits.clone() });
            return;
        }
        if m - pos < left {
            return;
        }
        // 0 before 1 keeps the list lexicographic
        go(pos + 1, left, bits, out);
        bits[pos] = 1;
        go(pos + 1, left - 1, bits, out);
        bits[pos] = 0;
    }
    go(0, n, &mut bits, &mut out);
    Ok(out)
}

pub(crate) fn binomial(m: usize, n: usize) -> u128 {
    if n > m {
        return 0;
    }
    let k = n.min(m - n) as u128;
    (0..k).fold(1u128, |acc, i| acc * (m as u128 - i) / (i + 1))
}

/// `v(s)`: one monomial `A_γ` per group element, in the ordering's order.
#[derive(Clone, Debug)]
pub struct MonomialVector {
    pub ordering: GroupOrdering,
    pub values: Vec<Complex64>,
}

impl MonomialVector {
    pub fn degree(&self) -> usize {
        self.ordering.degree()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn monomial_vector(a: &ComplexMatrix, ordering: &GroupOrdering) -> MonomialVector {
    assert_eq!(
        a.nrows(),
        a.ncols(),
        "monomial vector of a non-square matrix"
    );
    assert_eq!(
        a.nrows(),
        ordering.degree(),
        "ordering degree does not match matrix"
    );
    MonomialVector {
        ordering: ordering.clone(),
        values: ordering.iter().map(|g| monomial(a, g)).collect(),
    }
}
