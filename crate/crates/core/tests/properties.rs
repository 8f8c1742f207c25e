use coincidence::delays::DelayMatrix;
use coincidence::interferometer::monomial_vector;
use coincidence::matfun::{determinant, permanent, ComplexMatrix};
use coincidence::rates::{
    block_decompose, build_transform, rate_blocked, rate_direct, rate_matrix, Species,
};
use coincidence::symgroup::{
    all_permutations, character, irrep_matrices, partitions_of, Partition, Permutation,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn permutation(max: usize) -> impl Strategy<Value = Permutation> {
    (1..=max).prop_flat_map(|n| {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    })
}

fn same_degree_pair(max: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (1..=max).prop_flat_map(|n| {
        let shuffle = || {
            Just((0..n).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap())
        };
        (shuffle(), shuffle())
    })
}

fn partition(max: usize) -> impl Strategy<Value = Partition> {
    (1..=max).prop_flat_map(|n| {
        let all = partitions_of(n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn partition_pair(max: usize) -> impl Strategy<Value = (Partition, Partition)> {
    (1..=max).prop_flat_map(|n| {
        let all = partitions_of(n);
        let k = all.len();
        (0..k, 0..k).prop_map(move |(i, j)| (all[i].clone(), all[j].clone()))
    })
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |xs| {
        ComplexMatrix::from_iterator(n, n, xs.into_iter().map(|(re, im)| Complex64::new(re, im)))
    })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #[test]
    fn inverse_cancels(p in permutation(8)) {
        prop_assert!(p.compose(&p.inverse()).is_identity());
        prop_assert!(p.inverse().compose(&p).is_identity());
    }

    #[test]
    fn sign_is_multiplicative((a, b) in same_degree_pair(8)) {
        prop_assert_eq!(a.compose(&b).sign(), a.sign() * b.sign());
    }

    #[test]
    fn lex_rank_round_trips(p in permutation(8)) {
        prop_assert_eq!(Permutation::from_lex_rank(p.degree(), p.lex_rank()), p);
    }

    #[test]
    fn conjugation_is_an_involution(l in partition(12)) {
        prop_assert_eq!(l.conjugate().conjugate(), l.clone());
        prop_assert_eq!(l.conjugate().size(), l.size());
    }

    #[test]
    fn conjugation_reverses_dominance((a, b) in partition_pair(8)) {
        prop_assert_eq!(a.dominates(&b).unwrap(), b.conjugate().dominates(&a.conjugate()).unwrap());
    }

    #[test]
    fn characters_twist_by_sign(l in partition(6), seed in 0usize..720) {
        let n = l.size();
        let p = Permutation::from_lex_rank(n, seed % (1..=n).product::<usize>());
        prop_assert_eq!(character(&l.conjugate(), &p), p.sign() as i64 * character(&l, &p));
    }

    #[test]
    fn permanent_and_determinant_transpose(m in matrix(4)) {
        prop_assert!(close(permanent(&m).unwrap(), permanent(&m.transpose()).unwrap()));
        prop_assert!(close(determinant(&m), determinant(&m.transpose())));
    }

    #[test]
    fn blocked_rate_matches_dense(m in matrix(3), taus in proptest::collection::vec(-1.5f64..1.5, 3), fermion in any::<bool>()) {
        let species = if fermion { Species::Fermion } else { Species::Boson };
        let ordering = all_permutations(3).unwrap();
        let r = DelayMatrix::from_times(&taus, 1.0);
        let v = monomial_vector(&m, &ordering);
        let dense = rate_direct(&v, &rate_matrix(&r, species, &ordering).unwrap()).unwrap();
        let transform = build_transform(&ordering).unwrap();
        let blocked = rate_blocked(&block_decompose(&v, &r, &transform, species).unwrap()).unwrap();
        prop_assert!((dense - blocked).abs() <= 1e-9 * (1.0 + dense.abs()));
    }
}

#[test]
fn irreps_are_orthogonal_for_s4() {
    let ordering = all_permutations(4).unwrap();
    for l in partitions_of(4) {
        let set = irrep_matrices(&l, &ordering);
        for p in ordering.iter() {
            let d = set.matrix(p);
            let defect =
                (&d * d.transpose() - nalgebra::DMatrix::identity(d.nrows(), d.nrows())).norm();
            assert!(defect < 1e-12, "{l} {p}");
        }
    }
}
