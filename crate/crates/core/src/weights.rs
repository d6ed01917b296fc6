//! The torus T_H spanned by `D_H(x_i x_i')`, its weights on H, and the
//! resulting weight-space decomposition.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpexact::{unit, PrimeField, Subspace};
use crate::lsa::StructureAlgebra;
use crate::superspace::{Monomial, Parity, SuperPolynomial};
use crate::wittham::{Hamiltonian, IndexGeometry};

/// Eigenvalues of one element under the canonical torus basis, as residues.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WeightVector(pub Vec<u32>);

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl WeightVector {
    pub fn add(&self, other: &Self, field: PrimeField) -> Self {
        WeightVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        )
    }
}

/// `D_H(x_i x_i')` for the canonical indices `i in 1..=k, 2k+1..=2k+r`, in H
/// coordinates. Also checks that the torus is abelian and that every
/// `D_H(x_i x_i')`, `i in Y`, is a multiple of a canonical element.
pub fn torus_basis(h: &Hamiltonian) -> Result<Vec<Vec<u32>>> {
    let geo = h.geometry();
    let params = h.params();
    let pair = |i: usize| -> Result<SuperPolynomial> {
        let xi = SuperPolynomial::variable(params.clone(), i)?;
        let xj = SuperPolynomial::variable(params.clone(), geo.prime(i))?;
        xi.multiply(&xj)
    };
    let mut torus = Vec::new();
    for i in geo.canonical_torus_indices() {
        let v = h.element_of_poly(&pair(i)?).ok_or_else(|| {
            Error::Invariant(format!("D_H(x_{i} x_{}) is not in H", geo.prime(i)))
        })?;
        torus.push(v);
    }
    for a in &torus {
        for b in &torus {
            if h.algebra.bracket(a, b).iter().any(|&c| c != 0) {
                return Err(Error::Invariant("torus is not abelian".into()));
            }
        }
    }
    let span = Subspace::span(h.field(), h.dim(), torus.iter().cloned());
    if span.dim() != torus.len() {
        return Err(Error::Invariant(
            "canonical torus elements are dependent".into(),
        ));
    }
    for i in 1..=geo.s {
        let v = h.element_of_poly(&pair(i)?).ok_or_else(|| {
            Error::Invariant(format!("D_H(x_{i} x_{}) is not in H", geo.prime(i)))
        })?;
        let canonical = &torus[canonical_slot(&geo, i)];
        let line = Subspace::span(h.field(), h.dim(), [canonical.clone()]);
        if !line.contains(&v) {
            return Err(Error::Invariant(format!(
                "D_H(x_{i} x_{}) is not proportional to its canonical partner",
                geo.prime(i)
            )));
        }
    }
    Ok(torus)
}

/// Position in the canonical torus list of the pair containing `i`.
pub fn canonical_slot(geo: &IndexGeometry, i: usize) -> usize {
    let lead = i.min(geo.prime(i));
    if lead <= geo.k {
        lead - 1
    } else {
        geo.k + (lead - geo.m - 1)
    }
}

/// Eigenvalues of `b` under each torus element, read off the bracket table.
pub fn weight_of(alg: &StructureAlgebra, b: &[u32], torus: &[Vec<u32>]) -> Result<WeightVector> {
    let f = alg.field();
    let lead = b.iter().position(|&c| c != 0);
    let mut out = Vec::with_capacity(torus.len());
    for t in torus {
        let image = alg.bracket(t, b);
        let Some(lead) = lead else {
            out.push(0);
            continue;
        };
        let lambda = f.mul(image[lead], f.inv(b[lead]));
        if image.iter().zip(b).any(|(&y, &x)| y != f.mul(lambda, x)) {
            return Err(Error::NotAnEigenvector);
        }
        out.push(lambda);
    }
    Ok(WeightVector(out))
}

/// `(alpha + <u>)(D_H(x_l x_l')) = sigma(l) (alpha_l' - alpha_l + [l' in u] - [l in u])`
/// for each canonical `l`, reduced mod p.
pub fn closed_form_weight(geo: &IndexGeometry, mono: &Monomial, field: PrimeField) -> WeightVector {
    let alpha = |i: usize| {
        if i <= geo.m {
            mono.alpha()[i - 1] as i64
        } else {
            0
        }
    };
    let delta = |i: usize| mono.contains_odd(i) as i64;
    WeightVector(
        geo.canonical_torus_indices()
            .into_iter()
            .map(|l| {
                let lp = geo.prime(l);
                field.reduce(geo.sigma(l) * (alpha(lp) - alpha(l) + delta(lp) - delta(l)))
            })
            .collect(),
    )
}

/// Grouping of the basis of H by weight.
#[derive(Clone, Debug)]
pub struct WeightDecomposition {
    pub dim: usize,
    /// Weight of each basis element.
    pub labels: Vec<Vec<u32>>,
    /// Basis indices per weight.
    pub spaces: BTreeMap<WeightVector, Vec<usize>>,
    field: PrimeField,
}

impl WeightDecomposition {
    pub fn subspace(&self, w: &WeightVector) -> Subspace {
        let idx = self.spaces.get(w).cloned().unwrap_or_default();
        Subspace::span(
            self.field,
            self.dim,
            idx.into_iter().map(|i| unit(self.dim, i)),
        )
    }

    pub fn weight_of_index(&self, i: usize) -> WeightVector {
        WeightVector(self.labels[i].clone())
    }

    /// Concatenated spanning sets have full rank.
    pub fn is_direct_and_complete(&self) -> bool {
        let all = self
            .spaces
            .keys()
            .fold(Subspace::zero(self.field, self.dim), |acc, w| {
                acc.sum(&self.subspace(w))
            });
        let total: usize = self.spaces.values().map(Vec::len).sum();
        all.dim() == self.dim && total == self.dim
    }

    /// One line per weight: `weight=(..) dim=d basis=[labels]`, sorted by weight.
    pub fn report(&self, labels: &[String]) -> String {
        let mut out = String::new();
        for (w, idx) in &self.spaces {
            let names: Vec<&str> = idx.iter().map(|&i| labels[i].as_str()).collect();
            out.push_str(&format!(
                "weight={w} dim={} basis=[{}]\n",
                idx.len(),
                names.join(", ")
            ));
        }
        out
    }
}

/// Decomposes the algebra into simultaneous eigenspaces of the torus; every
/// basis element must be a simultaneous eigenvector.
pub fn decompose(alg: &StructureAlgebra, torus: &[Vec<u32>]) -> Result<WeightDecomposition> {
    let d = alg.dim();
    let mut labels = Vec::with_capacity(d);
    let mut spaces: BTreeMap<WeightVector, Vec<usize>> = BTreeMap::new();
    for i in 0..d {
        let w = weight_of(alg, &unit(d, i), torus)?;
        labels.push(w.0.clone());
        spaces.entry(w).or_default().push(i);
    }
    let dec = WeightDecomposition {
        dim: d,
        labels,
        spaces,
        field: alg.field(),
    };
    if !dec.is_direct_and_complete() {
        return Err(Error::Invariant(
            "weight spaces do not form a direct sum".into(),
        ));
    }
    Ok(dec)
}

/// The three weight families `eps_i`, `<j>` and `eps_i + <j>`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightFamily {
    EpsI,
    OddJ,
    EpsIPlusJ,
}

impl FromStr for WeightFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps_i" => Ok(Self::EpsI),
            "odd_j" => Ok(Self::OddJ),
            "eps_i_plus_j" => Ok(Self::EpsIPlusJ),
            _ => Err(Error::UnknownValue {
                what: "weight family",
                value: s.into(),
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub family: WeightFamily,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub weight: WeightVector,
    /// Basis indices of the computed eigenspace.
    pub space: Vec<usize>,
    /// Basis indices of the monomials of the displayed spanning shape.
    pub displayed: Vec<usize>,
    pub agrees: bool,
}

/// Computes the weight space for `eps_i`, `<j>` or `eps_i + <j>` and compares it
/// with the monomials of the displayed spanning shape: even exponents paired up
/// to `beta_r = beta_r' (mod p)` off `{i, i'}`, `beta_i = beta_i' + 1 (mod p)`
/// for the `eps_i` kinds, and an odd part `{j}` plus complete pairs `{l, l'}`
/// avoiding `j, j'`.
pub fn family_space(
    h: &Hamiltonian,
    family: WeightFamily,
    i: Option<usize>,
    j: Option<usize>,
) -> Result<FamilyReport> {
    let geo = h.geometry();
    let params = h.params();
    let field = h.field();
    let p = field.modulus();
    let need_i = matches!(family, WeightFamily::EpsI | WeightFamily::EpsIPlusJ);
    let need_j = matches!(family, WeightFamily::OddJ | WeightFamily::EpsIPlusJ);
    let i = if need_i {
        match i {
            Some(i) if (1..=geo.m).contains(&i) => Some(i),
            _ => {
                return Err(Error::InvalidWeightSpace(format!(
                    "{family:?} needs an even index i in 1..={}",
                    geo.m
                )))
            }
        }
    } else {
        None
    };
    let j = if need_j {
        match j {
            Some(j) if (geo.m + 1..=geo.s).contains(&j) => Some(j),
            _ => {
                return Err(Error::InvalidWeightSpace(format!(
                    "{family:?} needs an odd index j in {}..={}",
                    geo.m + 1,
                    geo.s
                )))
            }
        }
    } else {
        None
    };
    let mut alpha = vec![0u32; geo.m];
    if let Some(i) = i {
        alpha[i - 1] = 1;
    }
    let u: Vec<usize> = j.into_iter().collect();
    let functional = Monomial::new(params, alpha, &u)?;
    let weight = closed_form_weight(&geo, &functional, field);

    let weights = h.algebra.weights().ok_or(Error::MissingWeights)?;
    let space: Vec<usize> = (0..h.dim()).filter(|&b| weights[b] == weight.0).collect();

    let excluded: Vec<usize> = match i {
        Some(i) => vec![i, geo.prime(i)],
        None => Vec::new(),
    };
    let displayed: Vec<usize> = h
        .monomials
        .iter()
        .enumerate()
        .filter_map(|(b, mono)| mono.as_ref().map(|m| (b, m)))
        .filter(|(_, mono)| {
            let beta = mono.alpha();
            let paired = (1..=geo.m)
                .filter(|r| !excluded.contains(r))
                .all(|r| beta[r - 1] % p == beta[geo.prime(r) - 1] % p);
            let shifted = match i {
                Some(i) => beta[i - 1] % p == (beta[geo.prime(i) - 1] + 1) % p,
                None => true,
            };
            let odd_ok = (geo.m + 1..=geo.s).all(|l| {
                let lp = geo.prime(l);
                match j {
                    Some(j) if l == j => mono.contains_odd(l) && !mono.contains_odd(lp),
                    Some(j) if lp == j => !mono.contains_odd(l) && mono.contains_odd(lp),
                    _ => mono.contains_odd(l) == mono.contains_odd(lp),
                }
            });
            paired && shifted && odd_ok
        })
        .map(|(b, _)| b)
        .collect();
    let agrees = displayed == space;
    Ok(FamilyReport {
        family,
        i,
        j,
        weight,
        space,
        displayed,
        agrees,
    })
}

/// Parity is constant on each weight space.
pub fn weight_spaces_are_homogeneous(alg: &StructureAlgebra, dec: &WeightDecomposition) -> bool {
    dec.spaces.values().all(|idx| {
        let first: Option<Parity> = idx.first().map(|&i| alg.parity(i));
        idx.iter().all(|&i| Some(alg.parity(i)) == first)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superspace::Params;
    use crate::wittham::build_h;

    fn desk() -> Hamiltonian {
        build_h(Params::new(3, 2, 2, vec![1, 1]).unwrap()).unwrap()
    }

    fn mono(h: &Hamiltonian, alpha: Vec<u32>, u: &[usize]) -> Monomial {
        Monomial::new(h.params(), alpha, u).unwrap()
    }

    #[test]
    fn torus_at_desk_point() {
        let h = desk();
        let torus = torus_basis(&h).unwrap();
        assert_eq!(torus.len(), 2);
        assert_eq!(torus[0], h.element_of(&mono(&h, vec![1, 1], &[])).unwrap());
        assert_eq!(
            torus[1],
            h.element_of(&mono(&h, vec![0, 0], &[3, 4])).unwrap()
        );
        assert!(h
            .algebra
            .bracket(&torus[0], &torus[1])
            .iter()
            .all(|&c| c == 0));
        for t in &torus {
            assert_eq!(h.algebra.parity_of(t), Some(Parity::Even));
        }
    }

    #[test]
    fn weight_examples() {
        let h = desk();
        let torus = torus_basis(&h).unwrap();
        let dx1 = h.element_of(&mono(&h, vec![1, 0], &[])).unwrap();
        assert_eq!(
            weight_of(&h.algebra, &dx1, &torus[..1]).unwrap(),
            WeightVector(vec![2])
        );
        let dx3 = h.element_of(&mono(&h, vec![0, 0], &[3])).unwrap();
        assert_eq!(
            weight_of(&h.algebra, &dx3, &torus[1..]).unwrap(),
            WeightVector(vec![2])
        );
        let zero = vec![0; h.dim()];
        assert_eq!(
            weight_of(&h.algebra, &dx1, &[zero]).unwrap(),
            WeightVector(vec![0])
        );
    }

    #[test]
    fn mixed_weight_vector_is_not_an_eigenvector() {
        let h = desk();
        let torus = torus_basis(&h).unwrap();
        let a = h.element_of(&mono(&h, vec![1, 0], &[])).unwrap();
        let b = h.element_of(&mono(&h, vec![0, 1], &[])).unwrap();
        let sum: Vec<u32> = a.iter().zip(&b).map(|(x, y)| (x + y) % 3).collect();
        assert_eq!(
            weight_of(&h.algebra, &sum, &torus),
            Err(Error::NotAnEigenvector)
        );
    }

    #[test]
    fn decomposition_sums_to_dimension() {
        let h = desk();
        let torus = torus_basis(&h).unwrap();
        let dec = decompose(&h.algebra, &torus).unwrap();
        assert_eq!(dec.spaces.values().map(Vec::len).sum::<usize>(), 34);
        let zero = WeightVector(vec![0, 0]);
        let z = dec.subspace(&zero);
        assert!(torus.iter().all(|t| z.contains(t)));
        assert!(weight_spaces_are_homogeneous(&h.algebra, &dec));
    }

    #[test]
    fn family_spaces_contain_generators() {
        let h = desk();
        let e1 = family_space(&h, WeightFamily::EpsI, Some(1), None).unwrap();
        assert!(e1
            .space
            .contains(&h.basis_index_of(&mono(&h, vec![1, 0], &[])).unwrap()));
        let o3 = family_space(&h, WeightFamily::OddJ, None, Some(3)).unwrap();
        assert!(o3
            .space
            .contains(&h.basis_index_of(&mono(&h, vec![0, 0], &[3])).unwrap()));
        let s13 = family_space(&h, WeightFamily::EpsIPlusJ, Some(1), Some(3)).unwrap();
        assert!(s13
            .space
            .contains(&h.basis_index_of(&mono(&h, vec![1, 0], &[3])).unwrap()));
        assert!(family_space(&h, WeightFamily::EpsI, Some(3), None).is_err());
        assert!(family_space(&h, WeightFamily::OddJ, None, Some(2)).is_err());
    }
}
