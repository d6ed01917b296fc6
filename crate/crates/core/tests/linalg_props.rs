mod common;

use hamsuper::fpexact::{binom_mod_p, rref, PrimeField, RowEchelon, SparseMatrixFp, Subspace};
use hamsuper::lsa::StructureAlgebra;
use hamsuper::superspace::Parity;
use proptest::prelude::*;

fn triplets(rows: usize, cols: usize) -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    proptest::collection::vec((0..rows, 0..cols, -6i64..6), 0..(rows * cols + 4))
}

fn dense_mul(field: PrimeField, m: &SparseMatrixFp, v: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; m.rows()];
    for &(r, c, x) in m.entries() {
        out[r] = field.mul_add(out[r], x, v[c]);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_plus_nullity(entries in triplets(5, 7), p in prop::sample::select(vec![3u32, 5, 7])) {
        let f = PrimeField::new(p).unwrap();
        let m = SparseMatrixFp::from_triplets(f, 5, 7, entries).unwrap();
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), 7);
        for v in &kernel {
            prop_assert!(dense_mul(f, &m, v).iter().all(|&c| c == 0));
        }
        prop_assert_eq!(Subspace::span(f, 7, kernel.clone()).dim(), kernel.len());
    }

    #[test]
    fn kernel_is_independent_of_entry_order(entries in triplets(4, 6), seed in any::<u64>()) {
        let f = PrimeField::new(5).unwrap();
        let mut shuffled = entries.clone();
        let n = shuffled.len();
        if n > 1 {
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
        }
        let a = SparseMatrixFp::from_triplets(f, 4, 6, entries).unwrap();
        let b = SparseMatrixFp::from_triplets(f, 4, 6, shuffled).unwrap();
        prop_assert_eq!(a.kernel_basis(), b.kernel_basis());
    }

    #[test]
    fn small_kernels_match_enumeration(entries in triplets(4, 4)) {
        let f = PrimeField::new(3).unwrap();
        let m = SparseMatrixFp::from_triplets(f, 4, 4, entries).unwrap();
        let found: Vec<Vec<u32>> = common::all_vectors(3, 4)
            .filter(|v| dense_mul(f, &m, v).iter().all(|&c| c == 0))
            .collect();
        prop_assert!(common::set_equals_span(f, 4, &m.kernel_basis(), &found));
    }

    #[test]
    fn row_insertion_order_does_not_change_kernel(entries in triplets(6, 5)) {
        let f = PrimeField::new(7).unwrap();
        let m = SparseMatrixFp::from_triplets(f, 6, 5, entries).unwrap();
        let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); 6];
        for &(r, c, v) in m.entries() {
            rows[r].push((c, v));
        }
        let mut forward = RowEchelon::new(f, 5);
        let mut backward = RowEchelon::new(f, 5);
        for r in &rows {
            forward.insert(r);
        }
        for r in rows.iter().rev() {
            backward.insert(r);
        }
        prop_assert_eq!(forward.rank(), backward.rank());
        prop_assert_eq!(forward.kernel_basis(), backward.kernel_basis());
        prop_assert_eq!(forward.kernel_basis(), m.kernel_basis());
    }

    #[test]
    fn rref_is_idempotent(rows in proptest::collection::vec(proptest::collection::vec(0u32..5, 6), 0..6)) {
        let f = PrimeField::new(5).unwrap();
        let (once, pivots) = rref(f, rows);
        let (twice, pivots2) = rref(f, once.clone());
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(pivots, pivots2);
    }

    #[test]
    fn lucas_matches_exact_binomials(a in 0u64..60, b in 0u64..60) {
        let f = PrimeField::new(5).unwrap();
        let exact = if b > a { 0u128 } else {
            (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128)
        };
        prop_assert_eq!(binom_mod_p(a, b, f) as u128, exact % 5);
    }

    #[test]
    fn centralizer_shrinks_as_the_set_grows(pick in proptest::collection::vec(0usize..34, 1..5), extra in 0usize..34) {
        let h = desk();
        let alg = &h.algebra;
        let small: Vec<Vec<u32>> = pick.iter().map(|&i| hamsuper::fpexact::unit(34, i)).collect();
        let mut large = small.clone();
        large.push(hamsuper::fpexact::unit(34, extra));
        prop_assert!(alg.centralizer(&large).is_subspace_of(&alg.centralizer(&small)));
    }
}

fn desk() -> &'static hamsuper::Hamiltonian {
    use std::sync::OnceLock;
    static H: OnceLock<hamsuper::Hamiltonian> = OnceLock::new();
    H.get_or_init(|| hamsuper::build_h(common::desk_params()).unwrap())
}

#[test]
fn abelian_centralizer_is_everything() {
    let f = PrimeField::new(3).unwrap();
    let alg = StructureAlgebra::abelian(f, vec![Parity::Even, Parity::Odd, Parity::Even]);
    assert_eq!(alg.centralizer(&[vec![1, 2, 0]]).dim(), 3);
    assert_eq!(alg.center().dim(), 3);
}
