//! The Witt superalgebra W(m,n;t) of vector fields on Λ(m,n;t), the
//! Hamiltonian operator `D_H`, and the algebras H̄(m,n;t) and H(m,n;t).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fpexact::{PrimeField, SpanTracker, Subspace};
use crate::lsa::StructureAlgebra;
use crate::superspace::{
    derive_monomial, multiply_monomials, Homogeneity, Monomial, Params, Parity, SuperPolynomial,
    Superspace,
};
use crate::weights;

/// Index bookkeeping for the symplectic pairing `i <-> i'` on `Y = 1..=s`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct IndexGeometry {
    pub m: usize,
    pub n: usize,
    /// `m / 2`
    pub k: usize,
    /// `n / 2`
    pub r: usize,
    pub s: usize,
}

impl IndexGeometry {
    pub fn new(params: &Params) -> Self {
        let (m, n) = (params.m(), params.n());
        Self {
            m,
            n,
            k: m / 2,
            r: n / 2,
            s: m + n,
        }
    }

    /// The partner index `i'`.
    pub fn prime(&self, i: usize) -> usize {
        assert!(
            (1..=self.s).contains(&i),
            "index {i} outside 1..={}",
            self.s
        );
        let (k, r) = (self.k, self.r);
        if i <= k {
            i + k
        } else if i <= 2 * k {
            i - k
        } else if i <= 2 * k + r {
            i + r
        } else {
            i - r
        }
    }

    /// `sigma(i)`: `-1` on `k+1..=2k`, `+1` elsewhere.
    pub fn sigma(&self, i: usize) -> i64 {
        assert!((1..=self.s).contains(&i));
        if i > self.k && i <= 2 * self.k {
            -1
        } else {
            1
        }
    }

    pub fn tau(&self, i: usize) -> Parity {
        Parity::from_odd(i > self.m)
    }

    /// Indices whose pair elements `D_H(x_i x_i')` span the torus without
    /// repetition: `1..=k` and `2k+1..=2k+r`.
    pub fn canonical_torus_indices(&self) -> Vec<usize> {
        (1..=self.k).chain(self.m + 1..=self.m + self.r).collect()
    }
}

/// Z-grading data: `deg(x^(alpha) x^u) = |alpha| + |u|`, W-degree one less,
/// H-degree of `D_H(x^(alpha) x^u)` two less.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct GradingInfo {
    pub xi: i64,
}

impl GradingInfo {
    pub fn new(params: &Params) -> Self {
        Self {
            xi: params.xi() as i64,
        }
    }

    pub fn w_degree(mono: &Monomial) -> i64 {
        mono.degree() as i64 - 1
    }

    pub fn h_degree(mono: &Monomial) -> i64 {
        mono.degree() as i64 - 2
    }

    pub fn w_range(&self) -> (i64, i64) {
        (-1, self.xi - 1)
    }

    pub fn h_range(&self) -> (i64, i64) {
        (-1, self.xi - 3)
    }
}

/// `sum_i f_i D_i` with one coefficient polynomial per direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    components: Vec<SuperPolynomial>,
}

impl VectorField {
    pub fn zero(params: &Arc<Params>) -> Self {
        Self {
            components: (0..params.s())
                .map(|_| SuperPolynomial::zero(params.clone()))
                .collect(),
        }
    }

    /// `f D_i`
    pub fn single(i: usize, f: SuperPolynomial) -> Result<Self> {
        f.params().check_direction(i)?;
        let mut out = Self::zero(f.params());
        out.components[i - 1] = f;
        Ok(out)
    }

    /// `D_i`
    pub fn partial(params: &Arc<Params>, i: usize) -> Result<Self> {
        Self::single(i, SuperPolynomial::one(params.clone()))
    }

    pub fn params(&self) -> &Arc<Params> {
        self.components[0].params()
    }

    /// Coefficient of `D_i`.
    pub fn component(&self, i: usize) -> &SuperPolynomial {
        &self.components[i - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SuperPolynomial::is_zero)
    }

    /// Iterates over `(direction, monomial, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Monomial, u32)> {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(i, f)| f.terms().map(move |(m, c)| (i + 1, m, c)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    pub fn scale(&self, c: u32) -> Self {
        Self {
            components: self.components.iter().map(|f| f.scale(c)).collect(),
        }
    }

    fn add_term(&mut self, i: usize, mono: Monomial, c: u32) {
        self.components[i - 1].add_term(mono, c);
    }

    /// `d(f D_i) = d(f) + tau(i)`; the zero field counts as even.
    pub fn parity(&self) -> Homogeneity {
        let m = self.params().m();
        let mut it = self
            .terms()
            .map(|(i, mono, _)| mono.parity() + Parity::from_odd(i > m));
        match it.next() {
            None => Homogeneity::Pure(Parity::Even),
            Some(first) => {
                if it.all(|q| q == first) {
                    Homogeneity::Pure(first)
                } else {
                    Homogeneity::Mixed
                }
            }
        }
    }

    /// Dense coordinates in W, indexed by `(direction - 1) * dim Λ + monomial index`.
    pub fn coordinates(&self, space: &Superspace) -> Vec<u32> {
        let n = space.dim();
        let mut v = vec![0; space.params().s() * n];
        for (i, mono, c) in self.terms() {
            v[(i - 1) * n + space.index_of(mono).expect("monomial in range")] = c;
        }
        v
    }

    /// Action on Λ as a superderivation: `sum_i f_i D_i(g)`.
    pub fn apply(&self, g: &SuperPolynomial) -> Result<SuperPolynomial> {
        apply_field(self, g)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if c.len() == 1 {
                    format!("{c}*D{}", i + 1)
                } else {
                    format!("({c})*D{}", i + 1)
                }
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `[f D_i, g D_j] = f D_i(g) D_j - (-1)^{d(f D_i) d(g D_j)} g D_j(f) D_i`,
/// extended bilinearly. Inputs of mixed parity are handled term by term.
pub fn witt_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    if x.params() != y.params() {
        return Err(Error::ParameterMismatch {
            left: x.params().to_string(),
            right: y.params().to_string(),
        });
    }
    let params = x.params();
    let field = params.field();
    let m = params.m();
    let mut out = VectorField::zero(params);
    for (i, a, ca) in x.terms() {
        let da = a.parity() + Parity::from_odd(i > m);
        for (j, b, cb) in y.terms() {
            let db = b.parity() + Parity::from_odd(j > m);
            let c = field.mul(ca, cb);
            if let Some((dib, s1)) = derive_monomial(i, b, field) {
                if let Some((mono, s2)) = multiply_monomials(a, &dib, field) {
                    out.add_term(j, mono, field.mul(c, field.mul(s1, s2)));
                }
            }
            if let Some((dja, s1)) = derive_monomial(j, a, field) {
                if let Some((mono, s2)) = multiply_monomials(b, &dja, field) {
                    let sign = field.sign(!da.times(db).is_odd());
                    out.add_term(i, mono, field.mul(sign, field.mul(c, field.mul(s1, s2))));
                }
            }
        }
    }
    Ok(out)
}

/// `X(f) = sum_i X_i D_i(f)`.
pub fn apply_field(x: &VectorField, f: &SuperPolynomial) -> Result<SuperPolynomial> {
    let params = x.params();
    if **params != **f.params() {
        return Err(Error::ParameterMismatch {
            left: params.to_string(),
            right: f.params().to_string(),
        });
    }
    let field = params.field();
    let mut out = SuperPolynomial::zero(params.clone());
    for (i, a, ca) in x.terms() {
        for (b, cb) in f.terms() {
            if let Some((db, s1)) = derive_monomial(i, b, field) {
                if let Some((mono, s2)) = multiply_monomials(a, &db, field) {
                    out.add_term(mono, field.mul(field.mul(ca, cb), field.mul(s1, s2)));
                }
            }
        }
    }
    Ok(out)
}

/// `D_H(f) = sum_i f_i D_i` with `f_i = sigma(i') (-1)^{tau(i') d(f)} D_{i'}(f)`,
/// applied to each homogeneous term.
pub fn d_h(f: &SuperPolynomial) -> VectorField {
    let params = f.params();
    let geo = IndexGeometry::new(params);
    let field = params.field();
    let mut out = VectorField::zero(params);
    for (a, ca) in f.terms() {
        for i in 1..=geo.s {
            let ip = geo.prime(i);
            if let Some((mono, s)) = derive_monomial(ip, a, field) {
                let sign = geo.sigma(ip)
                    * if geo.tau(ip).times(a.parity()).is_odd() {
                        -1
                    } else {
                        1
                    };
                out.add_term(i, mono, field.mul(field.mul(ca, s), field.reduce(sign)));
            }
        }
    }
    out
}

/// H̄(m,n;t) = span{ D_H(f) }, with the generators `D_H(b)` selected in
/// monomial order.
#[derive(Clone, Debug)]
pub struct HbarAlgebra {
    pub space: Superspace,
    pub geometry: IndexGeometry,
    pub algebra: StructureAlgebra,
    /// `generators[a]` is the monomial `b` with basis element `D_H(b)`.
    pub generators: Vec<Monomial>,
    tracker: SpanTracker,
}

impl HbarAlgebra {
    /// Coordinates of a W-element in the H̄ basis, if it lies in H̄.
    pub fn coordinates_of_field(&self, x: &VectorField) -> Option<Vec<u32>> {
        self.tracker.express(&x.coordinates(&self.space))
    }

    pub fn coordinates_of_dh(&self, f: &SuperPolynomial) -> Option<Vec<u32>> {
        self.coordinates_of_field(&d_h(f))
    }
}

pub fn dh_label(mono: &Monomial) -> String {
    format!("DH[{mono}]")
}

pub fn build_hbar(params: Params) -> Result<HbarAlgebra> {
    let space = Superspace::new(params);
    let params = space.params().clone();
    let geometry = IndexGeometry::new(&params);
    let field = params.field();
    let wdim = params.s() * space.dim();
    let mut tracker = SpanTracker::new(field, wdim);
    let mut generators = Vec::new();
    let mut images = Vec::new();
    for b in space.basis() {
        let image = d_h(&space.poly(b));
        if tracker.try_add(&image.coordinates(&space)) {
            generators.push(b.clone());
            images.push(image);
        }
    }
    let dim = generators.len();
    // [D_H(f), D_H(g)] = D_H(D_H(f)(g))
    let constants: Vec<(usize, usize, usize, i64)> = {
        use rayon::prelude::*;
        type Constants = Vec<(usize, usize, usize, i64)>;
        let rows: Vec<Result<Constants>> = (0..dim)
            .into_par_iter()
            .map(|a| {
                let mut out = Vec::new();
                for (bidx, g) in generators.iter().enumerate() {
                    let inner = images[a].apply(&space.poly(g))?;
                    let coords = tracker
                        .express(&d_h(&inner).coordinates(&space))
                        .expect("D_H image lies in the span");
                    out.extend(
                        coords
                            .into_iter()
                            .enumerate()
                            .filter(|(_, c)| *c != 0)
                            .map(|(k, c)| (a, bidx, k, c as i64)),
                    );
                }
                Ok(out)
            })
            .collect();
        rows.into_iter().collect::<Result<Vec<_>>>()?.concat()
    };
    let parity = generators.iter().map(Monomial::parity).collect();
    let algebra = StructureAlgebra::new(field, parity, constants)?
        .with_labels(generators.iter().map(dh_label).collect())
        .with_zdegrees(Some(generators.iter().map(GradingInfo::h_degree).collect()))
        .with_params(Some((*params).clone()));
    Ok(HbarAlgebra {
        space,
        geometry,
        algebra,
        generators,
        tracker,
    })
}

/// The Hamiltonian superalgebra H(m,n;t) = [H̄, H̄] with its torus and weights.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub hbar: HbarAlgebra,
    pub algebra: StructureAlgebra,
    /// Basis of H in H̄ coordinates (canonical echelon form).
    pub span_in_hbar: Subspace,
    /// `Some(b)` when the basis element is exactly `D_H(b)`.
    pub monomials: Vec<Option<Monomial>>,
    pub grading: GradingInfo,
}

impl Hamiltonian {
    pub fn params(&self) -> &Arc<Params> {
        self.hbar.space.params()
    }

    pub fn field(&self) -> PrimeField {
        self.params().field()
    }

    pub fn geometry(&self) -> IndexGeometry {
        self.hbar.geometry
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Coordinates of `D_H(f)` in the basis of H, if it lies in H.
    pub fn element_of_poly(&self, f: &SuperPolynomial) -> Option<Vec<u32>> {
        let in_hbar = self.hbar.coordinates_of_dh(f)?;
        self.span_in_hbar.coordinates(&in_hbar)
    }

    /// Coordinates of `D_H(mono)` in the basis of H, if it lies in H.
    pub fn element_of(&self, mono: &Monomial) -> Option<Vec<u32>> {
        self.element_of_poly(&self.hbar.space.poly(mono))
    }

    /// Basis index of `D_H(mono)` when it is itself a basis element.
    pub fn basis_index_of(&self, mono: &Monomial) -> Option<usize> {
        self.monomials.iter().position(|m| m.as_ref() == Some(mono))
    }

    /// `dim H_r` for every degree `r` that occurs.
    pub fn grading_table(&self) -> BTreeMap<i64, usize> {
        let mut table = BTreeMap::new();
        for &z in self.algebra.zdegrees().expect("H carries Z-degrees") {
            *table.entry(z).or_insert(0) += 1;
        }
        table
    }
}

pub fn build_h(params: Params) -> Result<Hamiltonian> {
    let hbar = build_hbar(params)?;
    let span = hbar.algebra.derived_span();
    let sub = hbar.algebra.subalgebra(&span)?;
    let monomials = sub
        .inclusion
        .iter()
        .map(|row| {
            let mut nz = row.iter().enumerate().filter(|(_, &c)| c != 0);
            match (nz.next(), nz.next()) {
                (Some((a, &1)), None) => Some(hbar.generators[a].clone()),
                _ => None,
            }
        })
        .collect();
    let grading = GradingInfo::new(hbar.space.params());
    let mut h = Hamiltonian {
        hbar,
        algebra: sub.algebra,
        span_in_hbar: span,
        monomials,
        grading,
    };
    let torus = weights::torus_basis(&h)?;
    let labels = weights::decompose(&h.algebra, &torus)?.labels;
    h.algebra = h.algebra.with_weights(Some(labels)).with_torus(Some(torus));
    Ok(h)
}
