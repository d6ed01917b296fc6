mod common;

use std::sync::Arc;

use hamsuper::fpexact::Subspace;
use hamsuper::superspace::{enumerate_basis, Params, SuperPolynomial};
use hamsuper::weights;
use hamsuper::wittham::{build_h, d_h, witt_bracket, GradingInfo};

#[test]
fn witt_algebra_satisfies_jacobi() {
    let w = common::witt_algebra(common::desk_params());
    assert_eq!(w.dim(), 144);
    let report = w.jacobi_check();
    assert!(report.passed(), "{report}");
}

#[test]
fn hamiltonian_operator_is_a_homomorphism() {
    let params = Arc::new(common::desk_params());
    let basis = enumerate_basis(&params);
    for a in &basis {
        let f = SuperPolynomial::from_monomial(params.clone(), a.clone());
        let df = d_h(&f);
        for b in &basis {
            let g = SuperPolynomial::from_monomial(params.clone(), b.clone());
            let lhs = witt_bracket(&df, &d_h(&g)).unwrap();
            let rhs = d_h(&df.apply(&g).unwrap());
            assert_eq!(lhs, rhs, "[D_H({a}), D_H({b})]");
        }
    }
}

#[test]
fn h_bar_basis_elements_are_images_of_monomials() {
    let h = build_h(common::desk_params()).unwrap();
    assert_eq!(h.hbar.generators.len(), 35);
    assert!(h.hbar.generators.iter().all(|m| !m.is_one()));
    // the top monomial is the only one whose image falls outside [H̄, H̄]
    let outside: Vec<_> = h
        .hbar
        .generators
        .iter()
        .filter(|m| h.element_of(m).is_none())
        .map(|m| m.to_string())
        .collect();
    assert_eq!(outside, vec!["x^(2,2)*x<3,4>".to_string()]);
}

#[test]
fn hamiltonian_is_graded_perfect_and_centerless() {
    let h = build_h(common::desk_params()).unwrap();
    let alg = &h.algebra;
    assert!(alg.jacobi_check().passed());
    assert_eq!(alg.derived_span().dim(), alg.dim());
    assert_eq!(alg.center().dim(), 0);
    let z = alg.zdegrees().expect("homogeneous basis");
    for (i, j, k, _) in alg.constants() {
        assert_eq!(z[k], z[i] + z[j], "[e{i}, e{j}] -> e{k}");
    }
    let (lo, hi) = GradingInfo::new(&common::desk_params()).h_range();
    assert_eq!((lo, hi), (-1, 3));
    assert!(z.iter().all(|&d| (lo..=hi).contains(&d)));
}

#[test]
fn centralizer_of_negative_part() {
    let h = build_h(common::desk_params()).unwrap();
    let alg = &h.algebra;
    let d = alg.dim();
    let z = alg.zdegrees().unwrap();
    let minus_one = Subspace::span(
        alg.field(),
        d,
        (0..d)
            .filter(|&i| z[i] == -1)
            .map(|i| hamsuper::fpexact::unit(d, i)),
    );
    assert_eq!(minus_one.dim(), 4);
    assert_eq!(alg.centralizer(minus_one.basis()), minus_one);
}

#[test]
fn weights_match_closed_formula_on_every_monomial() {
    let h = build_h(common::desk_params()).unwrap();
    let geo = h.geometry();
    let w = h.algebra.weights().unwrap();
    for (b, mono) in h.monomials.iter().enumerate() {
        let mono = mono
            .as_ref()
            .expect("every basis element is D_H of a monomial here");
        assert_eq!(
            weights::closed_form_weight(&geo, mono, h.field()).0,
            w[b],
            "{mono}"
        );
    }
    let torus = h.algebra.torus().unwrap();
    let dec = weights::decompose(&h.algebra, torus).unwrap();
    assert!(dec.is_direct_and_complete());
    for (wa, ia) in &dec.spaces {
        for (wb, ib) in &dec.spaces {
            let target = dec.subspace(&wa.add(wb, h.field()));
            for &x in ia {
                for &y in ib {
                    let v = h.algebra.bracket(
                        &hamsuper::fpexact::unit(34, x),
                        &hamsuper::fpexact::unit(34, y),
                    );
                    assert!(target.contains(&v), "[H_{wa}, H_{wb}] not in H_(sum)");
                }
            }
        }
    }
}

#[test]
fn larger_prime_has_expected_shape() {
    let h = build_h(Params::new(5, 2, 2, vec![1, 1]).unwrap()).unwrap();
    assert_eq!(h.hbar.algebra.dim(), 99);
    assert_eq!(h.dim(), 98);
    assert_eq!(h.algebra.torus().unwrap().len(), 2);
    assert_eq!(h.algebra.center().dim(), 0);
}
