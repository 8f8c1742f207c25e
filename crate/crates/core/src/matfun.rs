//! Matrix functionals on square complex matrices: determinant, permanent,
//! immanants, permuted immanants and the `D^λ` group-function blocks.
//!
//! Throughout, the monomial of `M` at a permutation `γ` is
//! `M_γ = M[γ(1),1]·M[γ(2),2]···M[γ(n),n]`, and the group-function block of an
//! irrep is `D^λ(M) = Σ_γ D^λ(γ)·M_γ`. With that convention `trace D^λ(M)` is
//! the immanant and `D^λ(P_σ)·D^λ(M) = D^λ(P_σ·M)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symgroup::{
    character_of_cycle_type, partitions_of, GroupOrdering, IrrepMatrixSet, Partition, Permutation,
};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Largest matrix handed to Ryser's formula.
pub const MAX_PERMANENT_DIM: usize = 20;
/// Largest matrix for the character-sum immanant.
pub const MAX_IMMANANT_DIM: usize = 10;

pub fn to_complex(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

fn require_square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::domain(format!(
            "{what} needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// `M_γ = Π_k M[γ(k), k]`.
#[inline]
pub fn monomial(m: &ComplexMatrix, gamma: &Permutation) -> Complex64 {
    gamma
        .images()
        .iter()
        .enumerate()
        .fold(Complex64::new(1.0, 0.0), |acc, (k, &row)| acc * m[(row, k)])
}

/// LU determinant.
pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Permanent by Ryser's formula with Gray-code subset updates, `O(2^n·n)`.
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(m, "permanent")?;
    if n > MAX_PERMANENT_DIM {
        return Err(Error::SizeLimit {
            what: "permanent dimension",
            value: n as u128,
            limit: MAX_PERMANENT_DIM as u128,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut in_set = vec![false; n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut set_size = 0usize;
    for k in 1u64..(1u64 << n) {
        // the Gray code g(k) = k ^ (k >> 1) flips exactly the lowest set bit of k
        let j = k.trailing_zeros() as usize;
        let sign = if in_set[j] { -1.0 } else { 1.0 };
        in_set[j] = !in_set[j];
        if in_set[j] {
            set_size += 1;
        } else {
            set_size -= 1;
        }
        for (i, s) in row_sums.iter_mut().enumerate() {
            *s += m[(i, j)] * sign;
        }
        let prod = row_sums
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &s| acc * s);
        if set_size.is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

/// Next permutation in lexicographic order; false once wrapped around.
fn next_lex(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn cycle_type_of(images: &[usize], scratch: &mut [bool]) -> Vec<usize> {
    scratch.iter_mut().for_each(|s| *s = false);
    let mut lens = Vec::new();
    for start in 0..images.len() {
        if scratch[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !scratch[j] {
            scratch[j] = true;
            j = images[j];
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

/// Character-weighted sum over all of `S_n` with rows fed through `row_of`.
///
/// Work is split by the image of column 0; chunks are reduced in a fixed
/// order so the result does not depend on thread scheduling.
fn character_sum(lambda: &Partition, m: &ComplexMatrix, row_of: &[usize]) -> Complex64 {
    let n = m.nrows();
    let chars: std::collections::HashMap<Vec<usize>, f64> = partitions_of(n)
        .into_iter()
        .map(|ct| {
            let v = character_of_cycle_type(lambda, &ct) as f64;
            (ct.parts().to_vec(), v)
        })
        .collect();
    let chunk = |first: usize| -> Complex64 {
        let mut rest: Vec<usize> = (0..n).filter(|&x| x != first).collect();
        let mut images = vec![0; n];
        let mut scratch = vec![false; n];
        let mut acc = Complex64::new(0.0, 0.0);
        loop {
            images[0] = first;
            images[1..].copy_from_slice(&rest);
            let chi = chars[&cycle_type_of(&images, &mut scratch)];
            if chi != 0.0 {
                let mut prod = Complex64::new(chi, 0.0);
                for (k, &g) in images.iter().enumerate() {
                    prod *= m[(row_of[g], k)];
                }
                acc += prod;
            }
            if !next_lex(&mut rest) {
                break;
            }
        }
        acc
    };
    let parts: Vec<Complex64> = (0..n).into_par_iter().map(chunk).collect();
    parts.into_iter().sum()
}

fn check_immanant_args(lambda: &Partition, m: &ComplexMatrix) -> Result<usize> {
    let n = require_square(m, "immanant")?;
    if lambda.size() != n {
        return Err(Error::domain(format!(
            "immanant: {lambda} is not a partition of {n}"
        )));
    }
    if n > MAX_IMMANANT_DIM {
        return Err(Error::SizeLimit {
            what: "immanant dimension",
            value: n as u128,
            limit: MAX_IMMANANT_DIM as u128,
        });
    }
    Ok(n)
}

/// `imm^λ(M) = Σ_σ χ_λ(σ) Π_i M[σ(i), i]`, evaluated term by term.
pub fn immanant(lambda: &Partition, m: &ComplexMatrix) -> Result<Complex64> {
    let n = check_immanant_args(lambda, m)?;
    let identity: Vec<usize> = (0..n).collect();
    Ok(character_sum(lambda, m, &identity))
}

/// `imm^λ(P_σ M)`, where row `i` of `P_σ M` is row `σ(i)` of `M`.
pub fn permuted_immanant(
    lambda: &Partition,
    sigma: &Permutation,
    m: &ComplexMatrix,
) -> Result<Complex64> {
    let n = check_immanant_args(lambda, m)?;
    if sigma.degree() != n {
        return Err(Error::domain(
            "permuted_immanant: permutation degree mismatch",
        ));
    }
    Ok(character_sum(lambda, m, sigma.images()))
}

/// `P_σ M` with row `i` replaced by row `σ(i)`.
pub fn permute_rows(sigma: &Permutation, m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(sigma.apply(i), j)])
}

/// `D^λ(M) = Σ_γ D^λ(γ)·M_γ` straight from the irrep matrices.
pub fn group_function_block(irreps: &IrrepMatrixSet, m: &ComplexMatrix) -> ComplexMatrix {
    let dim = irreps.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (pos, gamma) in irreps.ordering().iter().enumerate() {
        let mono = monomial(m, gamma);
        if mono == Complex64::new(0.0, 0.0) {
            continue;
        }
        let d = irreps.entries_at(pos);
        for (k, x) in out.iter_mut().enumerate() {
            // nalgebra is column-major; `d` is row-major
            let (row, col) = (k % dim, k / dim);
            *x += mono * d[row * dim + col];
        }
    }
    out
}

/// The `s_λ × s_λ` block of `D`-functions of `M` on the weight-(1,…,1)
/// subspace.
#[derive(Clone, Debug)]
pub struct DFunctionBlock {
    pub partition: Partition,
    pub values: ComplexMatrix,
    /// Relative least-squares residual of the permuted-immanant system.
    pub residual: f64,
}

impl DFunctionBlock {
    pub fn trace(&self) -> Complex64 {
        self.values.trace()
    }
}

/// Recovers `D^λ(M)` from the permuted immanants of `M`.
///
/// Every `σ ∈ S_n` contributes one equation
/// `imm^λ(P_σ M) = Σ_ij D^λ_ij(P_σ)·D^λ_ji(M)`, whose coefficients are the
/// orthogonal-form entries `D^λ(P_σ) = D^λ(σ⁻¹)`. The `n! × s_λ²` system is
/// solved in the least-squares sense.
pub fn dfunction_block(
    lambda: &Partition,
    m: &ComplexMatrix,
    irreps: &IrrepMatrixSet,
) -> Result<DFunctionBlock> {
    let n = check_immanant_args(lambda, m)?;
    if irreps.partition() != lambda || irreps.ordering().degree() != n {
        return Err(Error::domain(
            "dfunction_block: irreps do not match the partition",
        ));
    }
    let ordering: &GroupOrdering = irreps.ordering();
    let dim = irreps.dim();
    let unknowns = dim * dim;
    let rows = ordering.len();

    let mut design = DMatrix::<f64>::zeros(rows, unknowns);
    let mut rhs_re = DMatrix::<f64>::zeros(rows, 1);
    let mut rhs_im = DMatrix::<f64>::zeros(rows, 1);
    for (r, sigma) in ordering.iter().enumerate() {
        let coeff = irreps.matrix(&sigma.inverse());
        for i in 0..dim {
            for j in 0..dim {
                // unknown (j, i) stored at j*dim + i
                design[(r, j * dim + i)] = coeff[(i, j)];
            }
        }
        let y = permuted_immanant(lambda, sigma, m)?;
        rhs_re[(r, 0)] = y.re;
        rhs_im[(r, 0)] = y.im;
    }

    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-10 * smax {
        return Err(Error::Numerical(format!(
            "permuted-immanant system for {lambda} is rank deficient (σ_min/σ_max = {:e})",
            smin / smax
        )));
    }
    let eps = 1e-12 * smax;
    let x_re = svd
        .solve(&rhs_re, eps)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let x_im = svd
        .solve(&rhs_im, eps)
        .map_err(|e| Error::Numerical(e.to_string()))?;

    let fit_re = &design * &x_re - &rhs_re;
    let fit_im = &design * &x_im - &rhs_im;
    let scale = 1.0 + rhs_re.norm().hypot(rhs_im.norm());
    let residual = fit_re.norm().hypot(fit_im.norm()) / scale;
    if residual > 1e-8 {
        return Err(Error::Numerical(format!(
            "permuted-immanant system for {lambda} left residual {residual:e}"
        )));
    }

    let values = ComplexMatrix::from_fn(dim, dim, |j, i| {
        Complex64::new(x_re[(j * dim + i, 0)], x_im[(j * dim + i, 0)])
    });
    Ok(DFunctionBlock {
        partition: lambda.clone(),
        values,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symgroup::{all_permutations, irrep_matrices, standard_tableau_count};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_delay(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let t: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        DMatrix::from_fn(n, n, |i, j| (-(t[i] - t[j]).powi(2) / 2.0).exp())
    }

    /// Leibniz-style oracle: Σ over permutations with a caller-supplied weight.
    fn weighted_sum(m: &ComplexMatrix, weight: impl Fn(&Permutation) -> f64) -> Complex64 {
        let g = all_permutations(m.nrows()).unwrap();
        g.iter().map(|p| monomial(m, p) * weight(p)).sum()
    }

    fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])
    }

    #[test]
    fn determinant_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((determinant(&ComplexMatrix::identity(4, 4)) - c(1.0)).norm() < 1e-14);
        assert!((determinant(&hadamard()) - c(-1.0)).norm() < 1e-14);
        let m = random_matrix(4, &mut rng);
        let sigma: Permutation = "4:(124)".parse().unwrap();
        let lhs = determinant(&permute_rows(&sigma, &m));
        assert!((lhs - determinant(&m) * sigma.sign() as f64).norm() < 1e-12);
        let leibniz = weighted_sum(&m, |p| p.sign() as f64);
        assert!((determinant(&m) - leibniz).norm() < 1e-12);
    }

    #[test]
    fn permanent_examples() {
        let mut fact = 1.0;
        for n in 1..=8 {
            fact *= n as f64;
            let j = ComplexMatrix::from_element(n, n, c(1.0));
            assert!((permanent(&j).unwrap() - c(fact)).norm() < 1e-9 * fact);
        }
        assert!(permanent(&hadamard()).unwrap().norm() < 1e-15);
        assert!(matches!(
            permanent(&ComplexMatrix::zeros(21, 21)),
            Err(Error::SizeLimit { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let m = random_matrix(4, &mut rng);
            let per = permanent(&m).unwrap();
            let oracle = weighted_sum(&m, |_| 1.0);
            let imm = immanant(&Partition::row(4), &m).unwrap();
            assert!((per - oracle).norm() < 1e-10 * (1.0 + oracle.norm()));
            assert!((per - imm).norm() < 1e-10 * (1.0 + per.norm()));
        }
    }

    #[test]
    fn permanent_of_gram_is_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(2..=6);
            let v = random_matrix(n, &mut rng);
            let gram = v.adjoint() * &v;
            let per = permanent(&gram).unwrap();
            assert!(per.re >= -1e-12 && per.im.abs() < 1e-9, "{per}");
        }
    }

    #[test]
    fn two_one_immanant_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = random_matrix(3, &mut rng);
        let expected = b[(0, 0)] * b[(1, 1)] * b[(2, 2)] * 2.0
            - b[(1, 0)] * b[(2, 1)] * b[(0, 2)]
            - b[(2, 0)] * b[(0, 1)] * b[(1, 2)];
        let got = immanant(&Partition::new(vec![2, 1]).unwrap(), &b).unwrap();
        assert!((got - expected).norm() < 1e-13);
    }

    #[test]
    fn immanant_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for lambda in partitions_of(5) {
            let v = immanant(&lambda, &ComplexMatrix::identity(5, 5)).unwrap();
            assert!((v - c(standard_tableau_count(&lambda) as f64)).norm() < 1e-12);
        }
        let m = random_matrix(4, &mut rng);
        let col = immanant(&Partition::column(4), &m).unwrap();
        assert!((col - determinant(&m)).norm() < 1e-12);
        assert!(immanant(&Partition::row(3), &m).is_err());
    }

    #[test]
    fn permuted_immanant_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_matrix(4, &mut rng);
        let e = Permutation::identity(4);
        let lambda = Partition::new(vec![2, 1, 1]).unwrap();
        assert_eq!(
            permuted_immanant(&lambda, &e, &m).unwrap(),
            immanant(&lambda, &m).unwrap()
        );
        for sigma in all_permutations(4).unwrap().iter() {
            let got = permuted_immanant(&Partition::column(4), sigma, &m).unwrap();
            assert!((got - determinant(&m) * sigma.sign() as f64).norm() < 1e-12);
            let direct = immanant(&lambda, &permute_rows(sigma, &m)).unwrap();
            assert!((permuted_immanant(&lambda, sigma, &m).unwrap() - direct).norm() < 1e-12);
        }
        // K^(2,1)_11 of a delay matrix from two permuted immanants
        let r = random_delay(3, &mut rng);
        let rc = to_complex(&r);
        let two_one = Partition::new(vec![2, 1]).unwrap();
        let t12: Permutation = "3:(12)".parse().unwrap();
        let half_sum = (permuted_immanant(&two_one, &Permutation::identity(3), &rc).unwrap()
            + permuted_immanant(&two_one, &t12, &rc).unwrap())
            * 0.5;
        let (r12, r13, r23) = (r[(0, 1)], r[(0, 2)], r[(1, 2)]);
        let poly = 1.0 + r12 * r12 - 0.5 * r13 * r13 - 0.5 * r23 * r23 - r12 * r23 * r13;
        assert!((half_sum - c(poly)).norm() < 1e-12);
    }

    #[test]
    fn dfunction_block_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = all_permutations(3).unwrap();
        let z = random_matrix(3, &mut rng);
        let row = dfunction_block(
            &Partition::row(3),
            &z,
            &irrep_matrices(&Partition::row(3), &g),
        )
        .unwrap();
        assert!((row.values[(0, 0)] - permanent(&z).unwrap()).norm() < 1e-10);
        let col = dfunction_block(
            &Partition::column(3),
            &z,
            &irrep_matrices(&Partition::column(3), &g),
        )
        .unwrap();
        assert!((col.values[(0, 0)] - determinant(&z)).norm() < 1e-10);

        let two_one = Partition::new(vec![2, 1]).unwrap();
        let irreps = irrep_matrices(&two_one, &g);
        let r = random_delay(3, &mut rng);
        let block = dfunction_block(&two_one, &to_complex(&r), &irreps).unwrap();
        let expected = 3f64.sqrt() / 2.0 * (r[(1, 2)].powi(2) - r[(0, 2)].powi(2));
        assert!((block.values[(0, 1)] - c(expected)).norm() < 1e-10);
        let trace = immanant(&two_one, &to_complex(&r)).unwrap();
        assert!((block.trace() - trace).norm() < 1e-10);
    }

    #[test]
    fn solver_route_matches_group_function_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=4 {
            let g = all_permutations(n).unwrap();
            for lambda in partitions_of(n) {
                let irreps = irrep_matrices(&lambda, &g);
                let m = random_matrix(n, &mut rng);
                let solved = dfunction_block(&lambda, &m, &irreps).unwrap();
                let direct = group_function_block(&irreps, &m);
                let diff = (&solved.values - &direct)
                    .iter()
                    .fold(0.0f64, |a, x| a.max(x.norm()));
                assert!(diff < 1e-9, "{lambda}: {diff}");
            }
        }
    }
}
