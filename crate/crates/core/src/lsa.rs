//! Finite-dimensional Lie superalgebras over F_p given by structure constants,
//! with the checks and subspace machinery the solvers build on.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpexact::{PrimeField, RowEchelon, SparseMatrixFp, Subspace};
use crate::superspace::{Params, Parity};

/// Sparse vector as sorted `(index, nonzero residue)` pairs.
pub type SparseVec = Vec<(usize, u32)>;

pub fn to_sparse(v: &[u32]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| (i, x))
        .collect()
}

/// Lie superalgebra with basis `e_0..e_{dim-1}` and `[e_i, e_j] = sum_k c_ij^k e_k`.
#[derive(Clone, Debug)]
pub struct StructureAlgebra {
    field: PrimeField,
    parity: Vec<Parity>,
    table: Vec<SparseVec>,
    labels: Vec<String>,
    zdegrees: Option<Vec<i64>>,
    weights: Option<Vec<Vec<u32>>>,
    torus: Option<Vec<Vec<u32>>>,
    params: Option<Params>,
}

fn skew_sign(field: PrimeField, pi: Parity, pj: Parity) -> u32 {
    // [e_j, e_i] = -(-1)^{|e_i||e_j|} [e_i, e_j]
    field.sign(!pi.times(pj).is_odd())
}

impl StructureAlgebra {
    /// Builds from a full table of constants `(i, j, k, c)`; both `(i,j)` and
    /// `(j,i)` must be supplied consistently. Duplicates are summed.
    pub fn new(
        field: PrimeField,
        parity: Vec<Parity>,
        constants: impl IntoIterator<Item = (usize, usize, usize, i64)>,
    ) -> Result<Self> {
        let alg = Self::from_constants_unchecked(field, parity, constants)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Builds from constants for `i <= j` only, filling `(j, i)` by super
    /// skew-symmetry.
    pub fn from_upper(
        field: PrimeField,
        parity: Vec<Parity>,
        constants: impl IntoIterator<Item = (usize, usize, usize, i64)>,
    ) -> Result<Self> {
        let mut full = Vec::new();
        for (i, j, k, c) in constants {
            if i > j {
                return Err(Error::Schema(format!(
                    "from_upper got lower entry ({i},{j})"
                )));
            }
            full.push((i, j, k, c));
            if i != j {
                let (pi, pj) = (
                    *parity
                        .get(i)
                        .ok_or(Error::Schema(format!("index {i} out of range")))?,
                    *parity
                        .get(j)
                        .ok_or(Error::Schema(format!("index {j} out of range")))?,
                );
                let s = skew_sign(field, pi, pj);
                full.push((j, i, k, field.mul(field.reduce(c), s) as i64));
            }
        }
        Self::new(field, parity, full)
    }

    /// Builds without checking the skew-symmetry and parity invariants.
    pub fn from_constants_unchecked(
        field: PrimeField,
        parity: Vec<Parity>,
        constants: impl IntoIterator<Item = (usize, usize, usize, i64)>,
    ) -> Result<Self> {
        let dim = parity.len();
        let mut dense: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); dim * dim];
        for (i, j, k, c) in constants {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Schema(format!(
                    "constant ({i},{j})->{k} out of range for dim {dim}"
                )));
            }
            let e = dense[i * dim + j].entry(k).or_insert(0);
            *e = field.add(*e, field.reduce(c));
        }
        let table = dense
            .into_iter()
            .map(|m| m.into_iter().filter(|&(_, c)| c != 0).collect())
            .collect();
        Ok(Self {
            field,
            labels: (1..=dim).map(|i| format!("e{i}")).collect(),
            parity,
            table,
            zdegrees: None,
            weights: None,
            torus: None,
            params: None,
        })
    }

    pub fn abelian(field: PrimeField, parity: Vec<Parity>) -> Self {
        Self::from_constants_unchecked(field, parity, std::iter::empty()).expect("empty table")
    }

    /// Three-dimensional Heisenberg algebra `[e1, e2] = e3`, all even.
    pub fn heisenberg(field: PrimeField) -> Self {
        Self::from_upper(field, vec![Parity::Even; 3], [(0, 1, 2, 1)]).expect("valid table")
    }

    /// Checks super skew-symmetry and parity compatibility of every constant.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                for &(k, c) in &self.table[i * d + j] {
                    if self.parity[k] != self.parity[i] + self.parity[j] {
                        return Err(Error::ParityCompatibility { i, j, k });
                    }
                    let want = self
                        .field
                        .mul(c, skew_sign(self.field, self.parity[i], self.parity[j]));
                    if self.constant(j, i, k) != want {
                        return Err(Error::SkewSymmetry { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim());
        self.labels = labels;
        self
    }

    pub fn with_zdegrees(mut self, z: Option<Vec<i64>>) -> Self {
        if let Some(z) = &z {
            assert_eq!(z.len(), self.dim());
        }
        self.zdegrees = z;
        self
    }

    pub fn with_weights(mut self, w: Option<Vec<Vec<u32>>>) -> Self {
        if let Some(w) = &w {
            assert_eq!(w.len(), self.dim());
        }
        self.weights = w;
        self
    }

    pub fn with_torus(mut self, torus: Option<Vec<Vec<u32>>>) -> Self {
        self.torus = torus;
        self
    }

    pub fn with_params(mut self, params: Option<Params>) -> Self {
        self.params = params;
        self
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parity[i]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn zdegrees(&self) -> Option<&[i64]> {
        self.zdegrees.as_deref()
    }

    pub fn weights(&self) -> Option<&[Vec<u32>]> {
        self.weights.as_deref()
    }

    pub fn torus(&self) -> Option<&[Vec<u32>]> {
        self.torus.as_deref()
    }

    pub fn params(&self) -> Option<&Params> {
        self.params.as_ref()
    }

    /// `[e_i, e_j]` as a sparse vector.
    #[inline]
    pub fn bracket_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i * self.dim() + j]
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> u32 {
        self.bracket_basis(i, j)
            .binary_search_by_key(&k, |e| e.0)
            .map(|pos| self.bracket_basis(i, j)[pos].1)
            .unwrap_or(0)
    }

    /// Iterates over all nonzero constants `(i, j, k, c)`.
    pub fn constants(&self) -> impl Iterator<Item = (usize, usize, usize, u32)> + '_ {
        let d = self.dim();
        self.table
            .iter()
            .enumerate()
            .flat_map(move |(ij, row)| row.iter().map(move |&(k, c)| (ij / d, ij % d, k, c)))
    }

    /// `acc += coef * [e_i, e_j]`.
    #[inline]
    pub fn add_bracket_into(&self, acc: &mut [u32], i: usize, j: usize, coef: u32) {
        if coef == 0 {
            return;
        }
        for &(k, c) in self.bracket_basis(i, j) {
            acc[k] = self.field.mul_add(acc[k], coef, c);
        }
    }

    /// `acc += coef * [x, y]` for sparse `x`, `y`.
    pub fn add_bracket_sparse_into(
        &self,
        acc: &mut [u32],
        x: &[(usize, u32)],
        y: &[(usize, u32)],
        coef: u32,
    ) {
        for &(i, a) in x {
            let ca = self.field.mul(a, coef);
            for &(j, b) in y {
                self.add_bracket_into(acc, i, j, self.field.mul(ca, b));
            }
        }
    }

    pub fn bracket(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let mut acc = vec![0; self.dim()];
        self.add_bracket_sparse_into(&mut acc, &to_sparse(x), &to_sparse(y), 1);
        acc
    }

    /// Parity of a coordinate vector, `None` if mixed; zero counts as even.
    pub fn parity_of(&self, x: &[u32]) -> Option<Parity> {
        let mut it = x
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| self.parity[i]);
        match it.next() {
            None => Some(Parity::Even),
            Some(first) => it.all(|q| q == first).then_some(first),
        }
    }

    /// Exhaustive check of `[x,[y,z]] = [[x,y],z] + (-1)^{|x||y|}[y,[x,z]]` on
    /// all basis triples.
    pub fn jacobi_check(&self) -> JacobiReport {
        let d = self.dim();
        let f = self.field;
        let failures: Vec<(usize, usize, usize)> = (0..d)
            .into_par_iter()
            .filter_map(|x| {
                let mut acc = vec![0u32; d];
                for y in 0..d {
                    let s = f.sign(self.parity[x].times(self.parity[y]).is_odd());
                    for z in 0..d {
                        for &(a, c) in self.bracket_basis(y, z) {
                            self.add_bracket_into(&mut acc, x, a, c);
                        }
                        for &(a, c) in self.bracket_basis(x, y) {
                            self.add_bracket_into(&mut acc, a, z, f.neg(c));
                        }
                        for &(a, c) in self.bracket_basis(x, z) {
                            self.add_bracket_into(&mut acc, y, a, f.neg(f.mul(s, c)));
                        }
                        if acc.iter().any(|&v| v != 0) {
                            return Some((x, y, z));
                        }
                    }
                }
                None
            })
            .collect();
        JacobiReport {
            triples_checked: d * d * d,
            counterexample: failures.into_iter().min(),
        }
    }

    /// Span of all `[e_i, e_j]`.
    pub fn derived_span(&self) -> Subspace {
        let d = self.dim();
        let vectors = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let row = self.bracket_basis(i, j);
                (!row.is_empty()).then(|| {
                    let mut v = vec![0u32; d];
                    for &(k, c) in row {
                        v[k] = c;
                    }
                    v
                })
            });
        Subspace::span(self.field, d, vectors)
    }

    /// Restricts the bracket to a subalgebra given by its echelon basis.
    pub fn subalgebra(&self, span: &Subspace) -> Result<Subalgebra> {
        let f = self.field;
        let rows = span.basis();
        let sdim = rows.len();
        let mut parity = Vec::with_capacity(sdim);
        for r in rows {
            parity.push(
                self.parity_of(r).ok_or_else(|| {
                    Error::Schema("subalgebra basis vector of mixed parity".into())
                })?,
            );
        }
        let sparse_rows: Vec<SparseVec> = rows.iter().map(|r| to_sparse(r)).collect();
        let mut constants = Vec::new();
        for a in 0..sdim {
            for b in 0..sdim {
                let mut acc = vec![0u32; self.dim()];
                self.add_bracket_sparse_into(&mut acc, &sparse_rows[a], &sparse_rows[b], 1);
                let coords = span.coordinates(&acc).ok_or_else(|| {
                    Error::Schema("subspace is not closed under the bracket".into())
                })?;
                for (k, c) in coords.into_iter().enumerate() {
                    if c != 0 {
                        constants.push((a, b, k, c as i64));
                    }
                }
            }
        }
        let labels = rows
            .iter()
            .map(|r| combination_label(f, &self.labels, r))
            .collect();
        let homogeneous = |vals: &[i64], r: &Vec<u32>| -> Option<i64> {
            let mut it = r
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, _)| vals[i]);
            let first = it.next()?;
            it.all(|v| v == first).then_some(first)
        };
        let zdegrees = self.zdegrees.as_ref().and_then(|z| {
            rows.iter()
                .map(|r| homogeneous(z, r))
                .collect::<Option<Vec<_>>>()
        });
        let weights = self.weights.as_ref().and_then(|w| {
            rows.iter()
                .map(|r| {
                    let mut it = r
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, _)| &w[i]);
                    let first = it.next()?;
                    it.all(|v| v == first).then(|| first.clone())
                })
                .collect::<Option<Vec<_>>>()
        });
        let algebra = StructureAlgebra::new(f, parity, constants)?
            .with_labels(labels)
            .with_zdegrees(zdegrees)
            .with_weights(weights)
            .with_params(self.params.clone());
        Ok(Subalgebra {
            algebra,
            inclusion: rows.to_vec(),
        })
    }

    /// `[L, L]` with its inclusion into `L`.
    pub fn derived_subalgebra(&self) -> Result<Subalgebra> {
        self.subalgebra(&self.derived_span())
    }

    /// `{x : [x, s] = 0 for all s in S}`, `S` given by spanning vectors.
    pub fn centralizer(&self, spanning: &[Vec<u32>]) -> Subspace {
        let d = self.dim();
        let f = self.field;
        let mut ech = RowEchelon::new(f, d);
        for s in spanning {
            let s = to_sparse(s);
            // row k of ad-transpose: coefficient of e_k in [e_i, s], over i
            let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); d];
            for i in 0..d {
                let mut acc = vec![0u32; d];
                self.add_bracket_sparse_into(&mut acc, &[(i, 1)], &s, 1);
                for (k, &c) in acc.iter().enumerate() {
                    if c != 0 {
                        rows[k].push((i, c));
                    }
                }
            }
            for r in rows.iter().filter(|r| !r.is_empty()) {
                ech.insert(r);
                if ech.is_full() {
                    return Subspace::zero(f, d);
                }
            }
        }
        Subspace::span(f, d, ech.kernel_basis())
    }

    pub fn center(&self) -> Subspace {
        let d = self.dim();
        let all: Vec<Vec<u32>> = (0..d).map(|i| crate::fpexact::unit(d, i)).collect();
        self.centralizer(&all)
    }

    /// Matrix of `ad x`; column `k` holds the coordinates of `[x, e_k]`.
    pub fn adjoint_matrix(&self, x: &[u32]) -> SparseMatrixFp {
        let d = self.dim();
        let xs = to_sparse(x);
        let mut triplets = Vec::new();
        for k in 0..d {
            let mut acc = vec![0u32; d];
            self.add_bracket_sparse_into(&mut acc, &xs, &[(k, 1)], 1);
            for (l, &c) in acc.iter().enumerate() {
                if c != 0 {
                    triplets.push((l, k, c as i64));
                }
            }
        }
        SparseMatrixFp::from_triplets(self.field, d, d, triplets).expect("indices in range")
    }
}

/// Renders `sum c_i * label_i` with `c = 1` and `c = p - 1` shortened.
pub fn combination_label(field: PrimeField, labels: &[String], v: &[u32]) -> String {
    let mut out = String::new();
    for (i, &c) in v.iter().enumerate().filter(|(_, &c)| c != 0) {
        let s = field.signed_repr(c);
        let term = match s {
            1 => labels[i].clone(),
            -1 => format!("-{}", labels[i]),
            _ => format!("{s}*{}", labels[i]),
        };
        if out.is_empty() {
            out = term;
        } else if let Some(rest) = term.strip_prefix('-') {
            out = format!("{out}-{rest}");
        } else {
            out = format!("{out}+{term}");
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiReport {
    pub triples_checked: usize,
    /// First failing `(x, y, z)` (0-based) in lexicographic order.
    pub counterexample: Option<(usize, usize, usize)>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for JacobiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.counterexample {
            None => write!(f, "pass ({} triples)", self.triples_checked),
            Some((x, y, z)) => write!(f, "fail at basis triple ({}, {}, {})", x + 1, y + 1, z + 1),
        }
    }
}

/// A subalgebra together with its basis expressed in the parent's coordinates.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    pub algebra: StructureAlgebra,
    pub inclusion: Vec<Vec<u32>>,
}

// --- JSON ---------------------------------------------------------------

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct BasisEntry {
    label: String,
    parity: Parity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    zdegree: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct AlgebraJson {
    p: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<Vec<u32>>,
    basis: Vec<BasisEntry>,
    brackets: BTreeMap<String, Vec<(usize, u32)>>,
}

impl StructureAlgebra {
    fn to_json_struct(&self) -> AlgebraJson {
        let d = self.dim();
        let basis = (0..d)
            .map(|i| BasisEntry {
                label: self.labels[i].clone(),
                parity: self.parity[i],
                zdegree: self.zdegrees.as_ref().map(|z| z[i]),
                weight: self.weights.as_ref().map(|w| w[i].clone()),
            })
            .collect();
        let mut brackets = BTreeMap::new();
        for i in 0..d {
            for j in 0..d {
                let row = self.bracket_basis(i, j);
                if !row.is_empty() {
                    brackets.insert(format!("{i},{j}"), row.clone());
                }
            }
        }
        AlgebraJson {
            p: self.field.modulus(),
            m: self.params.as_ref().map(Params::m),
            n: self.params.as_ref().map(Params::n),
            t: self.params.as_ref().map(|p| p.t().to_vec()),
            basis,
            brackets,
        }
    }

    /// Serializes to the algebra JSON schema. Output is deterministic.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_struct()).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses the algebra JSON schema, rejecting tables that break super
    /// skew-symmetry or parity compatibility.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlgebraJson =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let field = PrimeField::new(doc.p)?;
        let params = match (doc.m, doc.n, doc.t) {
            (Some(m), Some(n), Some(t)) => Some(Params::new(doc.p, m, n, t)?),
            (None, None, None) => None,
            _ => return Err(Error::Schema("m, n and t must appear together".into())),
        };
        let d = doc.basis.len();
        let mut constants = Vec::new();
        for (key, row) in &doc.brackets {
            let (i, j) = key
                .split_once(',')
                .and_then(|(a, b)| {
                    Some((
                        a.trim().parse::<usize>().ok()?,
                        b.trim().parse::<usize>().ok()?,
                    ))
                })
                .ok_or_else(|| Error::Schema(format!("bad bracket key {key:?}")))?;
            if i >= d || j >= d {
                return Err(Error::Schema(format!("bracket key {key:?} out of range")));
            }
            let mut last = None;
            for &(k, c) in row {
                if k >= d {
                    return Err(Error::Schema(format!("target index {k} out of range")));
                }
                if c == 0 || c >= doc.p {
                    return Err(Error::Schema(format!(
                        "coefficient {c} is not a nonzero residue mod {}",
                        doc.p
                    )));
                }
                if last.is_some_and(|l| l >= k) {
                    return Err(Error::Schema(format!(
                        "targets under {key:?} must increase strictly"
                    )));
                }
                last = Some(k);
                constants.push((i, j, k, c as i64));
            }
        }
        let parity = doc.basis.iter().map(|b| b.parity).collect();
        let labels = doc.basis.iter().map(|b| b.label.clone()).collect();
        let zdegrees = doc
            .basis
            .iter()
            .map(|b| b.zdegree)
            .collect::<Option<Vec<_>>>();
        let weights = doc
            .basis
            .iter()
            .map(|b| b.weight.clone())
            .collect::<Option<Vec<_>>>();
        if doc.basis.iter().any(|b| b.zdegree.is_some()) && zdegrees.is_none() {
            return Err(Error::Schema(
                "zdegree must be given for all basis elements or none".into(),
            ));
        }
        if doc.basis.iter().any(|b| b.weight.is_some()) && weights.is_none() {
            return Err(Error::Schema(
                "weight must be given for all basis elements or none".into(),
            ));
        }
        Ok(StructureAlgebra::new(field, parity, constants)?
            .with_labels(labels)
            .with_zdegrees(zdegrees)
            .with_weights(weights)
            .with_params(params))
    }
}
