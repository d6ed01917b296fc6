//! Exact arithmetic in the prime field F_p, Lucas binomials, and sparse
//! Gaussian elimination used by every solver in the crate.
//!
//! Residues are carried as bare `u32` values in `[0, p)` inside the hot
//! loops; [`FpScalar`] wraps a residue together with its modulus for the
//! public surface.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field F_p for an odd prime `p < 2^31`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p <= 2 || p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// `a + b * c`
    #[inline]
    pub fn mul_add(self, a: u32, b: u32, c: u32) -> u32 {
        ((a as u64 + b as u64 * c as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// `(-1)^e` as a residue.
    #[inline]
    pub fn sign(self, odd: bool) -> u32 {
        if odd {
            self.p - 1
        } else {
            1
        }
    }

    pub fn elem(self, v: i64) -> FpScalar {
        FpScalar {
            value: self.reduce(v),
            field: self,
        }
    }

    pub fn zero(self) -> FpScalar {
        self.elem(0)
    }

    pub fn one(self) -> FpScalar {
        self.elem(1)
    }

    /// Prints a residue as a signed representative when that is shorter,
    /// e.g. `p - 1` as `-1`. Only used for human-readable labels.
    pub fn signed_repr(self, a: u32) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

/// An element of F_p.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    field: PrimeField,
}

impl FpScalar {
    pub fn new(field: PrimeField, value: u32) -> Self {
        Self {
            value: value % field.p,
            field,
        }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn field(self) -> PrimeField {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Self> {
        (self.value != 0).then(|| Self {
            value: self.field.inv(self.value),
            field: self.field,
        })
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for FpScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.value)
    }
}

impl Add for FpScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Self {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl AddAssign for FpScalar {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for FpScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Self {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Mul for FpScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Self {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Neg for FpScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// `C(a, b) mod p` for `a, b < p`.
fn small_binom(a: u64, b: u64, field: PrimeField) -> u32 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let (mut num, mut den) = (1u32, 1u32);
    for i in 0..b {
        num = field.mul(num, ((a - i) % field.p as u64) as u32);
        den = field.mul(den, ((i + 1) % field.p as u64) as u32);
    }
    field.mul(num, field.inv(den))
}

/// `C(a, b) mod p` by Lucas' theorem (digitwise in base p).
pub fn binom_mod_p(mut a: u64, mut b: u64, field: PrimeField) -> u32 {
    let p = field.p as u64;
    let mut acc = 1u32;
    while b > 0 || a > 0 {
        let (ad, bd) = (a % p, b % p);
        if bd > ad {
            return 0;
        }
        acc = field.mul(acc, small_binom(ad, bd, field));
        a /= p;
        b /= p;
    }
    acc
}

/// Multi-index binomial `prod_i C(a_i, b_i) mod p`.
pub fn binom_multi_mod_p(a: &[u32], b: &[u32], field: PrimeField) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 1u32;
    for (&ai, &bi) in a.iter().zip(b) {
        acc = field.mul(acc, binom_mod_p(ai as u64, bi as u64, field));
        if acc == 0 {
            break;
        }
    }
    acc
}

/// Sparse matrix over F_p stored as consolidated coordinate triplets,
/// sorted row-major with no duplicate positions and no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrixFp {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, u32)>,
}

impl SparseMatrixFp {
    /// Builds a matrix from unordered triplets; duplicate positions are summed.
    pub fn from_triplets(
        field: PrimeField,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut raw = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::EntryOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            raw.push((r, c, field.reduce(v)));
        }
        raw.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(usize, usize, u32)> = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 = field.add(last.2, v),
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| e.2 != 0);
        Ok(Self {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self {
            field,
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, 1)).collect(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, u32)] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries
            .binary_search_by_key(&(r, c), |&(a, b, _)| (a, b))
            .map(|i| self.entries[i].2)
            .unwrap_or(0)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0u32; self.rows];
        for &(r, c, x) in &self.entries {
            out[r] = self.field.mul_add(out[r], x, v[c]);
        }
        out
    }

    fn echelon(&self) -> RowEchelon {
        let mut ech = RowEchelon::new(self.field, self.cols);
        let mut start = 0;
        while start < self.entries.len() {
            let r = self.entries[start].0;
            let mut end = start;
            while end < self.entries.len() && self.entries[end].0 == r {
                end += 1;
            }
            let row: Vec<(usize, u32)> = self.entries[start..end]
                .iter()
                .map(|&(_, c, v)| (c, v))
                .collect();
            ech.insert(&row);
            start = end;
        }
        ech
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Basis of `{v : M v = 0}` in reduced row echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        self.echelon().kernel_basis()
    }
}

pub fn rank(m: &SparseMatrixFp) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &SparseMatrixFp) -> Vec<Vec<u32>> {
    m.kernel_basis()
}

const NO_PIVOT: u32 = u32::MAX;

/// Incremental sparse row echelon form. Rows are fed one at a time, reduced
/// against the current pivots, and kept when independent. Every stored row
/// has leading coefficient 1 and only columns to the right of its pivot.
pub struct RowEchelon {
    field: PrimeField,
    ncols: usize,
    pivot_row: Vec<u32>,
    rows: Vec<Vec<(u32, u32)>>,
    acc: Vec<u32>,
    seen: Vec<bool>,
    touched: Vec<usize>,
    heap: BinaryHeap<Reverse<usize>>,
}

impl RowEchelon {
    pub fn new(field: PrimeField, ncols: usize) -> Self {
        Self {
            field,
            ncols,
            pivot_row: vec![NO_PIVOT; ncols],
            rows: Vec::new(),
            acc: vec![0; ncols],
            seen: vec![false; ncols],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut cols: Vec<usize> = self.rows.iter().map(|r| r[0].0 as usize).collect();
        cols.sort_unstable();
        cols
    }

    fn touch(&mut self, c: usize) {
        if !self.seen[c] {
            self.seen[c] = true;
            self.touched.push(c);
            self.heap.push(Reverse(c));
        }
    }

    /// Reduces `row` (column, residue) against the stored pivots and keeps the
    /// remainder if nonzero. Returns whether the rank grew.
    pub fn insert(&mut self, row: &[(usize, u32)]) -> bool {
        if self.is_full() {
            return false;
        }
        let f = self.field;
        for &(c, v) in row {
            assert!(c < self.ncols, "column {c} out of range");
            let v = v % f.p;
            if v != 0 {
                self.acc[c] = f.add(self.acc[c], v);
                self.touch(c);
            }
        }
        let mut lead = None;
        while let Some(Reverse(c)) = self.heap.pop() {
            let a = self.acc[c];
            if a == 0 {
                continue;
            }
            let piv = self.pivot_row[c];
            if piv == NO_PIVOT {
                lead = Some(c);
                break;
            }
            let factor = f.neg(a);
            let prow = std::mem::take(&mut self.rows[piv as usize]);
            for &(cc, pv) in &prow {
                let cc = cc as usize;
                self.acc[cc] = f.mul_add(self.acc[cc], factor, pv);
                self.touch(cc);
            }
            self.rows[piv as usize] = prow;
        }
        self.heap.clear();
        let grew = if let Some(lead) = lead {
            let scale = f.inv(self.acc[lead]);
            let mut out: Vec<(u32, u32)> = self
                .touched
                .iter()
                .filter(|&&c| self.acc[c] != 0)
                .map(|&c| (c as u32, f.mul(self.acc[c], scale)))
                .collect();
            out.sort_unstable_by_key(|e| e.0);
            debug_assert_eq!(out[0], (lead as u32, 1));
            self.pivot_row[lead] = self.rows.len() as u32;
            self.rows.push(out);
            true
        } else {
            false
        };
        for &c in &self.touched {
            self.acc[c] = 0;
            self.seen[c] = false;
        }
        self.touched.clear();
        grew
    }

    /// Basis of the common kernel of all inserted rows, in reduced row
    /// echelon form (leading entries 1, pivot columns cleared elsewhere).
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let free: Vec<usize> = (0..self.ncols)
            .filter(|&c| self.pivot_row[c] == NO_PIVOT)
            .collect();
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_unstable_by_key(|&r| Reverse(self.rows[r][0].0));
        let vectors: Vec<Vec<u32>> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![0u32; self.ncols];
                v[fc] = 1;
                for &r in &order {
                    let row = &self.rows[r];
                    let mut s = 0u32;
                    for &(c, x) in &row[1..] {
                        s = f.mul_add(s, x, v[c as usize]);
                    }
                    v[row[0].0 as usize] = f.neg(s);
                }
                v
            })
            .collect();
        rref(f, vectors).0
    }
}

/// Dense reduced row echelon form; returns nonzero rows and their pivots.
pub fn rref(field: PrimeField, mut rows: Vec<Vec<u32>>) -> (Vec<Vec<u32>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let s = field.inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, s);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = field.neg(row[c]);
                for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x = field.mul_add(*x, factor, y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// A linear subspace of F_p^n carried in canonical reduced row echelon form,
/// so equality of subspaces is equality of the stored rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(
        field: PrimeField,
        ambient: usize,
        vectors: impl IntoIterator<Item = Vec<u32>>,
    ) -> Self {
        let vs: Vec<Vec<u32>> = vectors
            .into_iter()
            .inspect(|v| assert_eq!(v.len(), ambient))
            .filter(|v| v.iter().any(|&x| x != 0))
            .collect();
        let (rows, pivots) = rref(field, vs);
        Self {
            field,
            ambient,
            rows,
            pivots,
        }
    }

    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Self::span(field, ambient, std::iter::empty())
    }

    pub fn whole(field: PrimeField, ambient: usize) -> Self {
        Self::span(field, ambient, (0..ambient).map(|i| unit(ambient, i)))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let f = self.field;
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = rest[pc];
            coords.push(c);
            if c != 0 {
                let factor = f.neg(c);
                for (x, &y) in rest.iter_mut().zip(row) {
                    *x = f.mul_add(*x, factor, y);
                }
            }
        }
        rest.iter().all(|&x| x == 0).then_some(coords)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(
            self.field,
            self.ambient,
            self.rows.iter().chain(&other.rows).cloned(),
        )
    }
}

pub fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Grows a linearly independent generating set one candidate at a time and
/// expresses vectors of the span in terms of the accepted generators.
#[derive(Clone, Debug)]
pub struct SpanTracker {
    field: PrimeField,
    ambient: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    combos: Vec<Vec<u32>>,
    generators: usize,
}

impl SpanTracker {
    pub fn new(field: PrimeField, ambient: usize) -> Self {
        Self {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: Vec::new(),
            generators: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators == 0
    }

    fn reduce(&self, v: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let f = self.field;
        let mut rest = v.to_vec();
        let mut combo = vec![0u32; self.generators];
        for ((row, &pc), rc) in self.rows.iter().zip(&self.pivots).zip(&self.combos) {
            let c = rest[pc];
            if c != 0 {
                let factor = f.neg(c);
                for (x, &y) in rest.iter_mut().zip(row) {
                    *x = f.mul_add(*x, factor, y);
                }
                for (x, &y) in combo.iter_mut().zip(rc) {
                    *x = f.mul_add(*x, c, y);
                }
            }
        }
        (rest, combo)
    }

    /// Accepts `v` as a new generator when it is independent of the current ones.
    pub fn try_add(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let f = self.field;
        let (mut rest, expr) = self.reduce(v);
        let Some(lead) = rest.iter().position(|&x| x != 0) else {
            return false;
        };
        // rest = v - sum expr_g * gen_g
        let g = self.generators;
        self.generators += 1;
        for c in &mut self.combos {
            c.push(0);
        }
        let mut combo: Vec<u32> = expr.iter().map(|&x| f.neg(x)).collect();
        combo.push(1);
        let s = f.inv(rest[lead]);
        for x in rest.iter_mut() {
            *x = f.mul(*x, s);
        }
        for x in combo.iter_mut() {
            *x = f.mul(*x, s);
        }
        debug_assert_eq!(combo.len(), g + 1);
        for (row, rc) in self.rows.iter_mut().zip(self.combos.iter_mut()) {
            let c = row[lead];
            if c != 0 {
                let factor = f.neg(c);
                for (x, &y) in row.iter_mut().zip(&rest) {
                    *x = f.mul_add(*x, factor, y);
                }
                for (x, &y) in rc.iter_mut().zip(&combo) {
                    *x = f.mul_add(*x, factor, y);
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < lead);
        self.pivots.insert(pos, lead);
        self.rows.insert(pos, rest);
        self.combos.insert(pos, combo);
        true
    }

    /// Coefficients of `v` over the accepted generators (in acceptance order).
    pub fn express(&self, v: &[u32]) -> Option<Vec<u32>> {
        let (rest, combo) = self.reduce(v);
        rest.iter().all(|&x| x == 0).then_some(combo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn exact_binom(a: u64, b: u64) -> u128 {
        if b > a {
            return 0;
        }
        let mut acc = 1u128;
        for i in 0..b {
            acc = acc * (a - i) as u128 / (i + 1) as u128;
        }
        acc
    }

    #[test]
    fn rejects_non_odd_primes() {
        for p in [0, 1, 2, 4, 9, 15] {
            assert_eq!(PrimeField::new(p), Err(Error::InvalidPrime(p)));
        }
        assert!(PrimeField::new(3).is_ok());
        assert!(PrimeField::new(7919).is_ok());
    }

    #[test]
    fn binomial_examples() {
        let f = f3();
        assert_eq!(binom_mod_p(2, 1, f), 2);
        assert_eq!(binom_mod_p(3, 1, f), 0);
        assert_eq!(binom_mod_p(4, 2, f), (exact_binom(4, 2) % 3) as u32);
        assert_eq!(binom_mod_p(4, 2, f), 0);
        assert_eq!(binom_mod_p(1, 2, f), 0);
    }

    #[test]
    fn lucas_matches_exact_integers() {
        for p in [3u32, 5, 7, 11] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..60u64 {
                for b in 0..=a + 1 {
                    let want = (exact_binom(a, b) % p as u128) as u32;
                    assert_eq!(binom_mod_p(a, b, f), want, "C({a},{b}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn multi_index_binomial_is_product() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(binom_multi_mod_p(&[4, 3], &[2, 1], f), (6 * 3) % 5);
        assert_eq!(binom_multi_mod_p(&[4, 0], &[2, 1], f), 0);
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let f = f3();
        assert!(SparseMatrixFp::identity(f, 2).kernel_basis().is_empty());
        let z = SparseMatrixFp::zero(f, 2, 3);
        assert_eq!(
            z.kernel_basis(),
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
        assert_eq!(z.rank(), 0);
        assert_eq!(SparseMatrixFp::identity(f, 5).rank(), 5);
    }

    #[test]
    fn triplets_are_consolidated() {
        let f = f3();
        let m =
            SparseMatrixFp::from_triplets(f, 2, 2, [(0, 0, 1), (0, 0, 2), (1, 1, 4), (1, 0, -1)])
                .unwrap();
        assert_eq!(m.entries(), &[(1, 0, 2), (1, 1, 1)]);
        assert!(SparseMatrixFp::from_triplets(f, 2, 2, [(2, 0, 1)]).is_err());
    }

    #[test]
    fn span_tracker_expresses_in_generators() {
        let f = PrimeField::new(5).unwrap();
        let mut t = SpanTracker::new(f, 3);
        assert!(t.try_add(&[1, 2, 0]));
        assert!(t.try_add(&[0, 1, 1]));
        assert!(!t.try_add(&[1, 3, 1]));
        assert_eq!(t.express(&[2, 1, 2]), Some(vec![2, 2]));
        assert_eq!(t.express(&[2, 3, 4]), Some(vec![2, 4]));
        assert_eq!(t.express(&[2, 0, 4]), None);
        assert_eq!(t.express(&[0, 0, 1]), None);
    }

    #[test]
    fn subspace_membership_and_equality() {
        let f = f3();
        let a = Subspace::span(f, 3, [vec![1, 1, 0], vec![0, 1, 1]]);
        let b = Subspace::span(f, 3, [vec![1, 2, 2], vec![1, 0, 2]]);
        assert_eq!(a.dim(), 2);
        assert!(a.contains(&[1, 2, 1]));
        assert_eq!(a == b, a.is_subspace_of(&b) && b.is_subspace_of(&a));
    }
}
