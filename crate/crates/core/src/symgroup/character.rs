use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::{Partition, Permutation};

type Memo = HashMap<(Vec<usize>, Vec<usize>), i64>;

fn memo() -> &'static Mutex<Memo> {
    static MEMO: OnceLock<Mutex<Memo>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Irreducible character `χ_λ(σ)` by the Murnaghan–Nakayama rule.
pub fn character(lambda: &Partition, sigma: &Permutation) -> i64 {
    assert_eq!(
        lambda.size(),
        sigma.degree(),
        "character: partition size and permutation degree differ"
    );
    character_of_cycle_type(lambda, &sigma.cycle_type())
}

/// `χ_λ` evaluated on the conjugacy class with the given cycle type.
pub fn character_of_cycle_type(lambda: &Partition, cycle_type: &Partition) -> i64 {
    assert_eq!(lambda.size(), cycle_type.size());
    let key = (lambda.parts().to_vec(), cycle_type.parts().to_vec());
    if let Some(&v) = memo().lock().expect("character memo poisoned").get(&key) {
        return v;
    }
    let v = mn(lambda.parts(), cycle_type.parts());
    memo()
        .lock()
        .expect("character memo poisoned")
        .insert(key, v);
    v
}

/// Removes border strips of length `cycles[0]` through the beta-set
/// (abacus) encoding: a strip of length `k` is a bead moved from `b` to an
/// empty `b - k`, with sign `(-1)^(beads strictly between)`.
fn mn(shape: &[usize], cycles: &[usize]) -> i64 {
    if cycles.is_empty() {
        return if shape.iter().all(|&p| p == 0) { 1 } else { 0 };
    }
    let k = cycles[0];
    let rest = &cycles[1..];
    let len = shape.len();
    let beta: Vec<usize> = shape
        .iter()
        .enumerate()
        .map(|(i, &p)| p + len - 1 - i)
        .collect();
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < k {
            continue;
        }
        let target = b - k;
        if beta.contains(&target) {
            continue;
        }
        let between = beta.iter().filter(|&&x| x > target && x < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut next = beta.clone();
        next[idx] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let new_shape: Vec<usize> = next
            .iter()
            .enumerate()
            .map(|(i, &x)| x - (len - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        total += sign * mn_cached(&new_shape, rest);
    }
    total
}

fn mn_cached(shape: &[usize], cycles: &[usize]) -> i64 {
    if shape.is_empty() {
        return if cycles.is_empty() { 1 } else { 0 };
    }
    let lambda = Partition::new(shape.to_vec()).expect("strip removal keeps a partition");
    let ct = Partition::new(cycles.to_vec()).expect("cycle type suffix is a partition");
    character_of_cycle_type(&lambda, &ct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symgroup::{all_permutations, partitions_of, standard_tableau_count};

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn s3_character_values() {
        let e = Permutation::identity(3);
        let c3: Permutation = "3:(123)".parse().unwrap();
        let t: Permutation = "3:(12)".parse().unwrap();
        assert_eq!(character(&p(&[2, 1]), &e), 2);
        assert_eq!(character(&p(&[2, 1]), &c3), -1);
        assert_eq!(character(&p(&[2, 1]), &t), 0);
    }

    #[test]
    fn alternating_and_trivial() {
        let g = all_permutations(5).unwrap();
        for s in g.iter() {
            assert_eq!(character(&Partition::column(5), s), s.sign() as i64);
            assert_eq!(character(&Partition::row(5), s), 1);
        }
    }

    #[test]
    fn degree_is_standard_count_and_conjugate_sign_rule() {
        for n in 1..=6 {
            let g = all_permutations(n).unwrap();
            for lambda in partitions_of(n) {
                assert_eq!(
                    character(&lambda, g.get(0)) as u128,
                    standard_tableau_count(&lambda)
                );
                for s in g.iter() {
                    assert_eq!(
                        character(&lambda, s),
                        s.sign() as i64 * character(&lambda.conjugate(), s)
                    );
                }
            }
        }
    }

    #[test]
    fn column_orthogonality() {
        // Σ_λ χ_λ(σ)^2 = |centralizer of σ|
        let n = 5;
        let g = all_permutations(n).unwrap();
        for s in g.iter() {
            let sum: i64 = partitions_of(n)
                .iter()
                .map(|l| character(l, s).pow(2))
                .sum();
            let class_size = g
                .iter()
                .filter(|t| t.cycle_type() == s.cycle_type())
                .count();
            assert_eq!(sum as usize * class_size, 120);
        }
    }
}
