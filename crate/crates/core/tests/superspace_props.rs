use std::sync::Arc;

use hamsuper::superspace::{
    enumerate_basis, Homogeneity, Monomial, Params, Parity, SuperPolynomial,
};
use proptest::prelude::*;

fn desk() -> Arc<Params> {
    Arc::new(Params::new(3, 2, 2, vec![1, 1]).unwrap())
}

fn tau(params: &Params, i: usize) -> Parity {
    Parity::from_odd(i > params.m())
}

fn monomials(params: &Arc<Params>) -> Vec<SuperPolynomial> {
    enumerate_basis(params)
        .into_iter()
        .map(|m| SuperPolynomial::from_monomial(params.clone(), m))
        .collect()
}

fn parity(f: &SuperPolynomial) -> Parity {
    match f.parity_of() {
        Homogeneity::Pure(p) => p,
        Homogeneity::Mixed => panic!("monomials are homogeneous"),
    }
}

fn signed(f: &SuperPolynomial, odd: bool) -> SuperPolynomial {
    if odd {
        f.scale(f.field().neg(1))
    } else {
        f.clone()
    }
}

#[test]
fn monomial_products_supercommute() {
    let p = desk();
    let basis = monomials(&p);
    for a in &basis {
        for b in &basis {
            let ab = a.multiply(b).unwrap();
            let ba = b.multiply(a).unwrap();
            assert_eq!(
                ab,
                signed(&ba, parity(a).times(parity(b)).is_odd()),
                "{a} * {b}"
            );
        }
    }
}

#[test]
fn monomial_products_associate() {
    let p = desk();
    let basis = monomials(&p);
    for a in &basis {
        for b in &basis {
            let ab = a.multiply(b).unwrap();
            for c in &basis {
                let left = ab.multiply(c).unwrap();
                let right = a.multiply(&b.multiply(c).unwrap()).unwrap();
                assert_eq!(left, right, "({a} * {b}) * {c}");
            }
        }
    }
}

#[test]
fn partials_are_superderivations() {
    let p = desk();
    let basis = monomials(&p);
    for i in 1..=p.s() {
        for a in &basis {
            let da = a.apply_d(i).unwrap();
            for b in &basis {
                let lhs = a.multiply(b).unwrap().apply_d(i).unwrap();
                let first = da.multiply(b).unwrap();
                let second = signed(
                    &a.multiply(&b.apply_d(i).unwrap()).unwrap(),
                    tau(&p, i).times(parity(a)).is_odd(),
                );
                assert_eq!(lhs, first.add(&second).unwrap(), "D_{i}({a} * {b})");
            }
        }
    }
}

#[test]
fn partials_supercommute() {
    let p = desk();
    for f in monomials(&p) {
        for i in 1..=p.s() {
            for j in 1..=p.s() {
                let ij = f.apply_d(j).unwrap().apply_d(i).unwrap();
                let ji = f.apply_d(i).unwrap().apply_d(j).unwrap();
                assert_eq!(ij, signed(&ji, tau(&p, i).times(tau(&p, j)).is_odd()));
            }
        }
    }
}

#[test]
fn unit_is_neutral_and_top_degree_annihilates_positive_degrees() {
    let p = desk();
    let one = SuperPolynomial::one(p.clone());
    let top = Monomial::new(&p, vec![2, 2], &[3, 4]).unwrap();
    let top = SuperPolynomial::from_monomial(p.clone(), top);
    for f in monomials(&p) {
        assert_eq!(one.multiply(&f).unwrap(), f);
        let is_unit = f.terms().all(|(m, _)| m.is_one());
        assert_eq!(top.multiply(&f).unwrap().is_zero(), !is_unit);
    }
}

fn poly_strategy(params: Arc<Params>) -> impl Strategy<Value = SuperPolynomial> {
    let basis = enumerate_basis(&params);
    let n = basis.len();
    let p = params.p() as i64;
    proptest::collection::vec((0..n, 0..p), 0..6).prop_map(move |terms| {
        SuperPolynomial::from_terms(
            params.clone(),
            terms.into_iter().map(|(i, c)| (basis[i].clone(), c)),
        )
    })
}

fn wide() -> Arc<Params> {
    Arc::new(Params::new(5, 2, 4, vec![1, 1]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_bilinear_and_associative(
        a in poly_strategy(wide()),
        b in poly_strategy(wide()),
        c in poly_strategy(wide()),
    ) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let distributed = a.multiply(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(distributed, a.multiply(&b).unwrap().add(&a.multiply(&c).unwrap()).unwrap());
    }

    #[test]
    fn homogeneous_parts_supercommute(a in poly_strategy(wide()), b in poly_strategy(wide())) {
        let (a0, a1) = a.split_parity();
        let (b0, b1) = b.split_parity();
        for (x, px) in [(&a0, false), (&a1, true)] {
            for (y, py) in [(&b0, false), (&b1, true)] {
                prop_assert_eq!(x.multiply(y).unwrap(), signed(&y.multiply(x).unwrap(), px && py));
            }
        }
    }

    #[test]
    fn partial_derivatives_are_linear(a in poly_strategy(wide()), b in poly_strategy(wide()), i in 1usize..=6) {
        let sum = a.add(&b).unwrap().apply_d(i).unwrap();
        prop_assert_eq!(sum, a.apply_d(i).unwrap().add(&b.apply_d(i).unwrap()).unwrap());
    }
}
