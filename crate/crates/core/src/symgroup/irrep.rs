use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;

use super::{GroupOrdering, Partition, Permutation};

/// A standard Young tableau, stored as the row index of each entry
/// `1..=n` (its Yamanouchi word).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StandardTableau {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl StandardTableau {
    /// 0-based `(row, col)` of entry `value` (0-based, so entry `value + 1`).
    pub fn position(&self, value: usize) -> (usize, usize) {
        (self.rows[value], self.cols[value])
    }

    pub fn yamanouchi_word(&self) -> &[usize] {
        &self.rows
    }

    /// Content `col - row` of entry `value`.
    fn content(&self, value: usize) -> i64 {
        self.cols[value] as i64 - self.rows[value] as i64
    }

    fn swapped(&self, value: usize) -> StandardTableau {
        let mut t = self.clone();
        t.rows.swap(value, value + 1);
        t.cols.swap(value, value + 1);
        t
    }

    fn transposed(&self) -> StandardTableau {
        StandardTableau {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    /// Standard tableaux of shape `lambda`, ordered lexicographically by
    /// Yamanouchi word (so the row-reading tableau comes first).
    pub fn all(lambda: &Partition) -> Vec<StandardTableau> {
        fn go(
            shape: &[usize],
            filled: &mut Vec<usize>,
            rows: &mut Vec<usize>,
            cols: &mut Vec<usize>,
            out: &mut Vec<StandardTableau>,
        ) {
            if rows.len() == shape.iter().sum::<usize>() {
                out.push(StandardTableau {
                    rows: rows.clone(),
                    cols: cols.clone(),
                });
                return;
            }
            for r in 0..shape.len() {
                if filled[r] < shape[r] && (r == 0 || filled[r - 1] > filled[r]) {
                    rows.push(r);
                    cols.push(filled[r]);
                    filled[r] += 1;
                    go(shape, filled, rows, cols, out);
                    filled[r] -= 1;
                    rows.pop();
                    cols.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(
            lambda.parts(),
            &mut vec![0; lambda.len()],
            &mut Vec::new(),
            &mut Vec::new(),
            &mut out,
        );
        out
    }
}

/// One adjacent transposition `s_i = (i+1, i+2)` in Young's orthogonal form,
/// kept sparse: each basis row has a diagonal entry and at most one
/// off-diagonal partner.
struct AdjacentGenerator {
    diag: Vec<f64>,
    partner: Vec<Option<(usize, f64)>>,
}

fn generators(tableaux: &[StandardTableau], n: usize) -> Vec<AdjacentGenerator> {
    let index: HashMap<&StandardTableau, usize> =
        tableaux.iter().enumerate().map(|(i, t)| (t, i)).collect();
    (0..n.saturating_sub(1))
        .map(|i| {
            let mut diag = Vec::with_capacity(tableaux.len());
            let mut partner = Vec::with_capacity(tableaux.len());
            for t in tableaux {
                let (ra, ca) = t.position(i);
                let (rb, cb) = t.position(i + 1);
                if ra == rb {
                    diag.push(1.0);
                    partner.push(None);
                } else if ca == cb {
                    diag.push(-1.0);
                    partner.push(None);
                } else {
                    let axial = (t.content(i + 1) - t.content(i)) as f64;
                    diag.push(1.0 / axial);
                    let other = index[&t.swapped(i)];
                    partner.push(Some((other, (1.0 - 1.0 / (axial * axial)).sqrt())));
                }
            }
            AdjacentGenerator { diag, partner }
        })
        .collect()
}

/// Young's orthogonal form of the irrep `λ` evaluated on every element of an
/// ordering of `S_n`.
#[derive(Clone, Debug)]
pub struct IrrepMatrixSet {
    partition: Partition,
    ordering: GroupOrdering,
    dim: usize,
    // row-major dim×dim blocks, one per ordering position
    data: Vec<f64>,
}

impl IrrepMatrixSet {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn ordering(&self) -> &GroupOrdering {
        &self.ordering
    }

    /// `s_λ`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries of `D(γ)` for the element at `position`.
    pub fn entries_at(&self, position: usize) -> &[f64] {
        let d2 = self.dim * self.dim;
        &self.data[position * d2..(position + 1) * d2]
    }

    pub fn matrix_at(&self, position: usize) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, self.entries_at(position))
    }

    pub fn matrix(&self, sigma: &Permutation) -> DMatrix<f64> {
        self.matrix_at(self.ordering.index_of(sigma))
    }
}

/// Young's orthogonal form of `λ` on every element of `ordering`.
///
/// Each `D(σ)` is built by peeling one adjacent transposition off `σ` on the
/// left, so `D(σ) = D(s_i)·D(s_i σ)` with `s_i σ` one inversion shorter.
pub fn irrep_matrices(lambda: &Partition, ordering: &GroupOrdering) -> IrrepMatrixSet {
    let n = ordering.degree();
    assert_eq!(
        lambda.size(),
        n,
        "irrep_matrices: partition size != group degree"
    );
    let tableaux = StandardTableau::all(lambda);
    let dim = tableaux.len();
    let gens = generators(&tableaux, n);
    let d2 = dim * dim;
    let total = ordering.len();
    let mut data = vec![0.0; total * d2];
    let mut done = vec![false; total];

    let mut by_length: Vec<usize> = (0..total).collect();
    let lengths: Vec<usize> = ordering.iter().map(Permutation::inversions).collect();
    by_length.sort_by_key(|&i| lengths[i]);

    for pos in by_length {
        let sigma = ordering.get(pos);
        if sigma.is_identity() {
            for k in 0..dim {
                data[pos * d2 + k * dim + k] = 1.0;
            }
            done[pos] = true;
            continue;
        }
        let inv = sigma.inverse();
        // a left descent: value i+1 sits before value i in one-line notation
        let i = (0..n - 1)
            .find(|&i| inv.apply(i + 1) < inv.apply(i))
            .expect("non-identity permutation has a descent");
        let swap = Permutation::from_images(
            sigma
                .images()
                .iter()
                .map(|&v| {
                    if v == i {
                        i + 1
                    } else if v == i + 1 {
                        i
                    } else {
                        v
                    }
                })
                .collect(),
        )
        .expect("swapping values keeps a bijection");
        let prev = ordering.index_of(&swap);
        debug_assert!(done[prev]);
        let g = &gens[i];
        let (before, after) = data.split_at_mut(pos.max(prev) * d2);
        let (src, dst) = if prev < pos {
            (&before[prev * d2..(prev + 1) * d2], &mut after[..d2])
        } else {
            (&after[..d2], &mut before[pos * d2..(pos + 1) * d2])
        };
        for row in 0..dim {
            for col in 0..dim {
                let mut v = g.diag[row] * src[row * dim + col];
                if let Some((other, w)) = g.partner[row] {
                    v += w * src[other * dim + col];
                }
                dst[row * dim + col] = v;
            }
        }
        done[pos] = true;
    }

    IrrepMatrixSet {
        partition: lambda.clone(),
        ordering: ordering.clone(),
        dim,
        data,
    }
}

/// Signed permutation matrix `Q` with `sgn(σ)·D^λ(σ) = Q·D^{λ*}(σ)·Qᵀ` for all
/// `σ`, in Young's orthogonal form. Rows index tableaux of `λ`, columns index
/// tableaux of `λ*`; `Q` sends each tableau to its transpose, with a sign
/// that flips across every adjacent-transposition edge.
pub fn conjugate_intertwiner(lambda: &Partition) -> DMatrix<f64> {
    let n = lambda.size();
    let tableaux = StandardTableau::all(lambda);
    let conj = StandardTableau::all(&lambda.conjugate());
    let conj_index: HashMap<&StandardTableau, usize> =
        conj.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let gens = generators(&tableaux, n);
    let dim = tableaux.len();

    let mut sign = vec![0i8; dim];
    sign[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        for g in &gens {
            if let Some((u, _)) = g.partner[t] {
                if sign[u] == 0 {
                    sign[u] = -sign[t];
                    queue.push_back(u);
                }
            }
        }
    }

    let mut q = DMatrix::zeros(dim, dim);
    for (i, t) in tableaux.iter().enumerate() {
        let j = conj_index[&t.transposed()];
        q[(i, j)] = sign[i] as f64;
    }
    q
}
