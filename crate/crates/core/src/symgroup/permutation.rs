use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::Partition;

/// Largest `n` for which all of `S_n` is ever enumerated.
pub const MAX_GROUP_DEGREE: usize = 10;

/// A permutation of `{0, …, n-1}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::domain(format!(
                    "{images:?} is not a bijection on 0..{n}"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_line(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::domain("one-line notation is 1-based"));
        }
        Self::from_images(images.iter().map(|&i| i - 1).collect())
    }

    /// Builds a permutation of degree `n` from 1-based disjoint cycles, so that
    /// `[[1, 2, 3]]` maps 1→2, 2→3, 3→1.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a == 0 || b == 0 || a > n || b > n || touched[a - 1] {
                    return Err(Error::domain(format!("bad cycle {cycle:?} for degree {n}")));
                }
                touched[a - 1] = true;
                images[a - 1] = b - 1;
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based image of `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Disjoint cycles (0-based), each starting at its smallest element,
    /// including fixed points.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.images[start];
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> Partition {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(lens).expect("cycle lengths form a partition")
    }

    pub fn sign(&self) -> i32 {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn inversions(&self) -> usize {
        let n = self.degree();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Position of this permutation in lexicographic order of one-line
    /// notation (Lehmer code).
    pub fn lex_rank(&self) -> usize {
        let n = self.degree();
        let mut rank = 0;
        let mut fact = 1;
        for i in (0..n).rev() {
            let smaller = self.images[i + 1..]
                .iter()
                .filter(|&&x| x < self.images[i])
                .count();
            rank += smaller * fact;
            fact *= n - i;
        }
        rank
    }

    pub fn from_lex_rank(n: usize, mut rank: usize) -> Permutation {
        let mut pool: Vec<usize> = (0..n).collect();
        let mut fact: usize = (1..n).product::<usize>().max(1);
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let k = rank / fact;
            rank %= fact;
            images.push(pool.remove(k));
            if i + 1 < n {
                fact /= n - 1 - i;
            }
        }
        Permutation { images }
    }

    /// Permutation matrix `P` with `(P·M)` row `i` equal to row `σ(i)` of `M`.
    pub fn row_selector(&self) -> nalgebra::DMatrix<f64> {
        let n = self.degree();
        nalgebra::DMatrix::from_fn(n, n, |i, j| if self.images[i] == j { 1.0 } else { 0.0 })
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation with fixed points omitted; the identity is `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        let wide = self.degree() > 9;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            write!(f, "(")?;
            for (k, i) in cycle.iter().enumerate() {
                if wide && k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<usize> = self.images.iter().map(|i| i + 1).collect();
        write!(f, "Permutation{one_based:?}")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses `n:` followed by cycle notation, e.g. `3:(123)` or `4:e`.
    fn from_str(s: &str) -> Result<Self> {
        let (deg, body) = s
            .split_once(':')
            .ok_or_else(|| Error::domain(format!("expected `n:cycles`, got {s:?}")))?;
        let n: usize = deg
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("bad degree in {s:?}")))?;
        let body = body.trim();
        if body == "e" {
            return Ok(Permutation::identity(n));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for chunk in body.split(')').filter(|c| !c.trim().is_empty()) {
            let inner = chunk
                .trim()
                .strip_prefix('(')
                .ok_or_else(|| Error::domain(format!("bad cycle syntax in {s:?}")))?;
            let entries: Vec<usize> = if inner.contains(' ') || inner.contains(',') {
                inner
                    .split([' ', ','])
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::domain(format!("bad cycle entry in {s:?}")))?
            } else {
                inner
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::domain(format!("bad cycle entry in {s:?}")))?
            };
            cycles.push(entries);
        }
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Permutation::from_cycles(n, &refs)
    }
}

#[derive(Debug)]
struct OrderingInner {
    degree: usize,
    elements: Vec<Permutation>,
    // lex rank -> position in `elements`
    position_of_rank: Vec<usize>,
}

/// A fixed enumeration of all of `S_n`, identity first, with O(n) index lookup.
///
/// Cloning is cheap; the element table is shared.
#[derive(Clone, Debug)]
pub struct GroupOrdering(Arc<OrderingInner>);

impl GroupOrdering {
    /// Identity first, then lexicographic one-line order (the identity is
    /// already lexicographically smallest, so this is plain lex order).
    pub fn canonical(n: usize) -> Result<Self> {
        check_degree(n)?;
        let total = factorial(n);
        let elements: Vec<Permutation> = (0..total)
            .map(|r| Permutation::from_lex_rank(n, r))
            .collect();
        Self::from_elements(n, elements)
    }

    /// The `S_3` order `e, (12), (13), (23), (123), (132)` used for the
    /// worked three-particle tables.
    pub fn three_particle_table_order() -> Self {
        let cycles: [&[&[usize]]; 6] = [
            &[],
            &[&[1, 2]],
            &[&[1, 3]],
            &[&[2, 3]],
            &[&[1, 2, 3]],
            &[&[1, 3, 2]],
        ];
        let elements = cycles
            .iter()
            .map(|c| Permutation::from_cycles(3, c).expect("valid S_3 cycles"))
            .collect();
        Self::from_elements(3, elements).expect("complete S_3")
    }

    /// Builds an ordering from an explicit list, which must contain every
    /// element of `S_n` once with the identity first.
    pub fn from_elements(n: usize, elements: Vec<Permutation>) -> Result<Self> {
        check_degree(n)?;
        let total = factorial(n);
        if elements.len() != total {
            return Err(Error::domain(format!(
                "ordering of S_{n} needs {total} elements, got {}",
                elements.len()
            )));
        }
        if !elements[0].is_identity() {
            return Err(Error::domain("ordering must start with the identity"));
        }
        let mut position_of_rank = vec![usize::MAX; total];
        for (pos, p) in elements.iter().enumerate() {
            if p.degree() != n {
                return Err(Error::domain("mixed degrees in ordering"));
            }
            let r = p.lex_rank();
            if position_of_rank[r] != usize::MAX {
                return Err(Error::domain(format!("duplicate element {p} in ordering")));
            }
            position_of_rank[r] = pos;
        }
        Ok(GroupOrdering(Arc::new(OrderingInner {
            degree: n,
            elements,
            position_of_rank,
        })))
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn len(&self) -> usize {
        self.0.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.0.elements
    }

    pub fn get(&self, index: usize) -> &Permutation {
        &self.0.elements[index]
    }

    pub fn index_of(&self, p: &Permutation) -> usize {
        self.0.position_of_rank[p.lex_rank()]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Permutation> {
        self.0.elements.iter()
    }

    pub fn same_as(&self, other: &GroupOrdering) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.elements == other.0.elements
    }
}

/// All `n!` permutations in canonical order.
pub fn all_permutations(n: usize) -> Result<GroupOrdering> {
    GroupOrdering::canonical(n)
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("S_n needs n >= 1"));
    }
    if n > MAX_GROUP_DEGREE {
        return Err(Error::SizeLimit {
            what: "group degree n",
            value: n as u128,
            limit: MAX_GROUP_DEGREE as u128,
        });
    }
    Ok(())
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}
