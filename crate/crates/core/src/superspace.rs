//! The truncated supercommutative algebra Λ(m,n;t) = U(m;t) ⊗ Λ(n): divided
//! powers in the even variables x_1..x_m, Grassmann variables x_{m+1}..x_s.
//!
//! Variable indices are 1-based throughout, matching the usual notation
//! (`Y0 = 1..=m`, `Y1 = m+1..=s`).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpexact::{binom_mod_p, FpScalar, PrimeField};

/// A Z/2 degree.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_odd(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// Product of two Z/2 degrees, as used in sign exponents.
    pub fn times(self, other: Parity) -> Parity {
        Parity::from_odd(self.is_odd() && other.is_odd())
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_odd(self.is_odd() != rhs.is_odd())
    }
}

impl From<Parity> for u8 {
    fn from(p: Parity) -> u8 {
        p.is_odd() as u8
    }
}

impl TryFrom<u8> for Parity {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            _ => Err(format!("parity must be 0 or 1, got {v}")),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_odd() { "1" } else { "0" })
    }
}

/// Validated parameters `(p, m, n, t)`: `p` an odd prime, `m` and `n` even and
/// at least 2, `t` a tuple of `m` positive truncation exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    field: PrimeField,
    m: usize,
    n: usize,
    t: Vec<u32>,
    pi: Vec<u32>,
}

impl Params {
    pub fn new(p: u32, m: usize, n: usize, t: Vec<u32>) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidEvenRank(m));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidOddRank(n));
        }
        // Grassmann subsets are bitmasks.
        if n > 30 {
            return Err(Error::InvalidOddRank(n));
        }
        if t.len() != m {
            return Err(Error::TruncationLength {
                expected: m,
                actual: t.len(),
            });
        }
        if t.contains(&0) {
            return Err(Error::TruncationEntry);
        }
        let pi = t
            .iter()
            .map(|&ti| {
                (p as u64)
                    .checked_pow(ti)
                    .filter(|&v| v <= u32::MAX as u64)
                    .map(|v| (v - 1) as u32)
                    .ok_or(Error::TruncationOverflow { p, t: ti })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { field, m, n, t, pi })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.m + self.n
    }

    pub fn t(&self) -> &[u32] {
        &self.t
    }

    /// Per-coordinate heights `p^{t_i} - 1`.
    pub fn pi(&self) -> &[u32] {
        &self.pi
    }

    /// `|pi| + n`, the top Z-degree of Λ(m,n;t).
    pub fn xi(&self) -> u64 {
        self.pi.iter().map(|&x| x as u64).sum::<u64>() + self.n as u64
    }

    pub fn is_even_index(&self, i: usize) -> bool {
        (1..=self.m).contains(&i)
    }

    pub fn check_direction(&self, i: usize) -> Result<()> {
        if (1..=self.s()).contains(&i) {
            Ok(())
        } else {
            Err(Error::DirectionOutOfRange {
                index: i,
                s: self.s(),
            })
        }
    }

    /// Number of basis monomials, `p^{|t|} * 2^n`.
    pub fn lambda_dim(&self) -> usize {
        self.pi.iter().map(|&x| x as usize + 1).product::<usize>() << self.n
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.t.iter().map(u32::to_string).collect();
        write!(
            f,
            "(p={}, m={}, n={}, t=({}))",
            self.p(),
            self.m,
            self.n,
            t.join(",")
        )
    }
}

/// Basis monomial `x^(alpha) x^u` of Λ(m,n;t). The Grassmann part is a bitmask
/// whose bit `b` stands for the odd variable `x_{m+1+b}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    alpha: Vec<u32>,
    odd: u32,
}

impl Monomial {
    pub fn one(m: usize) -> Self {
        Self {
            alpha: vec![0; m],
            odd: 0,
        }
    }

    /// Builds `x^(alpha) x_{u_1} ... x_{u_k}` with `u` strictly increasing odd indices.
    pub fn new(params: &Params, alpha: Vec<u32>, u: &[usize]) -> Result<Self> {
        if alpha.len() != params.m {
            return Err(Error::DimensionMismatch {
                expected: params.m,
                actual: alpha.len(),
            });
        }
        if alpha.iter().zip(params.pi()).any(|(a, p)| a > p) {
            return Err(Error::Schema(format!(
                "exponent {alpha:?} outside the truncation"
            )));
        }
        let mut odd = 0u32;
        let mut last = params.m;
        for &i in u {
            if i <= last || i > params.s() {
                return Err(Error::Schema(format!(
                    "odd indices must increase strictly inside {}..={}",
                    params.m + 1,
                    params.s()
                )));
            }
            odd |= 1 << (i - params.m - 1);
            last = i;
        }
        Ok(Self { alpha, odd })
    }

    /// The variable `x_i`, for any `i` in `1..=s`.
    pub fn variable(params: &Params, i: usize) -> Result<Self> {
        params.check_direction(i)?;
        let mut mono = Self::one(params.m);
        if i <= params.m {
            mono.alpha[i - 1] = 1;
        } else {
            mono.odd = 1 << (i - params.m - 1);
        }
        Ok(mono)
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn odd_mask(&self) -> u32 {
        self.odd
    }

    /// The odd subset `u` as strictly increasing 1-based indices.
    pub fn odd_indices(&self) -> Vec<usize> {
        let m = self.alpha.len();
        (0..32)
            .filter(|b| self.odd >> b & 1 == 1)
            .map(|b| m + 1 + b)
            .collect()
    }

    pub fn contains_odd(&self, i: usize) -> bool {
        let m = self.alpha.len();
        i > m && self.odd >> (i - m - 1) & 1 == 1
    }

    pub fn odd_len(&self) -> u32 {
        self.odd.count_ones()
    }

    pub fn parity(&self) -> Parity {
        Parity::from_odd(self.odd.count_ones() % 2 == 1)
    }

    /// `|alpha| + |u|`.
    pub fn degree(&self) -> u64 {
        self.alpha.iter().map(|&a| a as u64).sum::<u64>() + self.odd.count_ones() as u64
    }

    pub fn is_one(&self) -> bool {
        self.odd == 0 && self.alpha.iter().all(|&a| a == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.alpha.cmp(&other.alpha).then_with(|| {
            // lexicographic on the increasing index lists
            let (mut a, mut b) = (self.odd, other.odd);
            loop {
                match (a, b) {
                    (0, 0) => return Ordering::Equal,
                    (0, _) => return Ordering::Less,
                    (_, 0) => return Ordering::Greater,
                    _ => {
                        let (ta, tb) = (a.trailing_zeros(), b.trailing_zeros());
                        if ta != tb {
                            return ta.cmp(&tb);
                        }
                        a &= a - 1;
                        b &= b - 1;
                    }
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let has_alpha = self.alpha.iter().any(|&a| a != 0);
        if !has_alpha && self.odd == 0 {
            return f.write_str("1");
        }
        if has_alpha {
            let parts: Vec<String> = self.alpha.iter().map(u32::to_string).collect();
            write!(f, "x^({})", parts.join(","))?;
        }
        if self.odd != 0 {
            if has_alpha {
                f.write_str("*")?;
            }
            let parts: Vec<String> = self.odd_indices().iter().map(usize::to_string).collect();
            write!(f, "x<{}>", parts.join(","))?;
        }
        Ok(())
    }
}

/// Product of two basis monomials: `(monomial, coefficient)` or `None` when it
/// vanishes (repeated Grassmann variable or a divided-power carry).
pub fn multiply_monomials(
    a: &Monomial,
    b: &Monomial,
    field: PrimeField,
) -> Option<(Monomial, u32)> {
    if a.odd & b.odd != 0 {
        return None;
    }
    let mut coeff = 1u32;
    let mut alpha = Vec::with_capacity(a.alpha.len());
    for (&x, &y) in a.alpha.iter().zip(&b.alpha) {
        let sum = x + y;
        coeff = field.mul(coeff, binom_mod_p(sum as u64, x as u64, field));
        if coeff == 0 {
            return None;
        }
        alpha.push(sum);
    }
    // inversions between the concatenated odd lists u.v
    let mut inversions = 0u32;
    let mut rest = b.odd;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        inversions += (a.odd >> bit >> 1).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 1 {
        coeff = field.neg(coeff);
    }
    Some((
        Monomial {
            alpha,
            odd: a.odd | b.odd,
        },
        coeff,
    ))
}

/// `D_i` applied to a basis monomial, `None` when the result is zero.
pub fn derive_monomial(i: usize, a: &Monomial, field: PrimeField) -> Option<(Monomial, u32)> {
    let m = a.alpha.len();
    if i <= m {
        let k = i - 1;
        if a.alpha[k] == 0 {
            return None;
        }
        let mut alpha = a.alpha.clone();
        alpha[k] -= 1;
        Some((Monomial { alpha, odd: a.odd }, 1))
    } else {
        let bit = (i - m - 1) as u32;
        if a.odd >> bit & 1 == 0 {
            return None;
        }
        let before = (a.odd & ((1u32 << bit) - 1)).count_ones();
        Some((
            Monomial {
                alpha: a.alpha.clone(),
                odd: a.odd & !(1 << bit),
            },
            field.sign(before % 2 == 1),
        ))
    }
}

/// Homogeneity of a polynomial with respect to the Z/2 grading.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Pure(Parity),
    Mixed,
}

/// Sparse F_p-combination of basis monomials. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperPolynomial {
    params: Arc<Params>,
    terms: BTreeMap<Monomial, u32>,
}

impl SuperPolynomial {
    pub fn zero(params: Arc<Params>) -> Self {
        Self {
            params,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_monomial(params: Arc<Params>, mono: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(mono, 1);
        Self { params, terms }
    }

    pub fn one(params: Arc<Params>) -> Self {
        let m = params.m;
        Self::from_monomial(params, Monomial::one(m))
    }

    pub fn variable(params: Arc<Params>, i: usize) -> Result<Self> {
        let mono = Monomial::variable(&params, i)?;
        Ok(Self::from_monomial(params, mono))
    }

    pub fn from_terms(
        params: Arc<Params>,
        terms: impl IntoIterator<Item = (Monomial, i64)>,
    ) -> Self {
        let mut out = Self::zero(params);
        let field = out.params.field;
        for (mono, c) in terms {
            out.add_term(mono, field.reduce(c));
        }
        out
    }

    pub fn params(&self) -> &Arc<Params> {
        &self.params
    }

    pub fn field(&self) -> PrimeField {
        self.params.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> FpScalar {
        FpScalar::new(self.field(), self.terms.get(mono).copied().unwrap_or(0))
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: u32) {
        if c == 0 {
            return;
        }
        let field = self.params.field;
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.params, &other.params) || self.params == other.params {
            Ok(())
        } else {
            Err(Error::ParameterMismatch {
                left: self.params.to_string(),
                right: other.params.to_string(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u32) -> Self {
        let field = self.field();
        let c = c % field.modulus();
        let mut out = Self::zero(self.params.clone());
        if c != 0 {
            out.terms = self
                .terms
                .iter()
                .map(|(m, &x)| (m.clone(), field.mul(x, c)))
                .collect();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(self.field().modulus() - 1))
    }

    /// Supercommutative product; divided-power carries vanish automatically.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let field = self.field();
        let mut out = Self::zero(self.params.clone());
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if let Some((mono, c)) = multiply_monomials(a, b, field) {
                    out.add_term(mono, field.mul(c, field.mul(ca, cb)));
                }
            }
        }
        Ok(out)
    }

    /// The superderivation `D_i`, `i` in `1..=s`.
    pub fn apply_d(&self, i: usize) -> Result<Self> {
        self.params.check_direction(i)?;
        let field = self.field();
        let mut out = Self::zero(self.params.clone());
        for (a, ca) in self.terms() {
            if let Some((mono, c)) = derive_monomial(i, a, field) {
                out.add_term(mono, field.mul(c, ca));
            }
        }
        Ok(out)
    }

    /// Z/2 degree of the polynomial; the zero polynomial counts as even.
    pub fn parity_of(&self) -> Homogeneity {
        let mut parities = self.terms.keys().map(Monomial::parity);
        match parities.next() {
            None => Homogeneity::Pure(Parity::Even),
            Some(first) => {
                if parities.all(|q| q == first) {
                    Homogeneity::Pure(first)
                } else {
                    Homogeneity::Mixed
                }
            }
        }
    }

    /// Splits into (even part, odd part).
    pub fn split_parity(&self) -> (Self, Self) {
        let mut even = Self::zero(self.params.clone());
        let mut odd = Self::zero(self.params.clone());
        for (m, c) in self.terms() {
            match m.parity() {
                Parity::Even => even.add_term(m.clone(), c),
                Parity::Odd => odd.add_term(m.clone(), c),
            }
        }
        (even, odd)
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| {
                if c == 1 {
                    m.to_string()
                } else {
                    format!("{c}*{m}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// All basis monomials of Λ(m,n;t) in the canonical order: `alpha`
/// lexicographic first, then the odd subset lexicographic.
pub fn enumerate_basis(params: &Params) -> Vec<Monomial> {
    let mut alphas: Vec<Vec<u32>> = vec![Vec::new()];
    for &bound in params.pi() {
        alphas = alphas
            .into_iter()
            .flat_map(|a| {
                (0..=bound).map(move |x| {
                    let mut b = a.clone();
                    b.push(x);
                    b
                })
            })
            .collect();
    }
    let mut subsets: Vec<u32> = (0..1u32 << params.n).collect();
    subsets.sort_by(|&a, &b| {
        Monomial {
            alpha: Vec::new(),
            odd: a,
        }
        .cmp(&Monomial {
            alpha: Vec::new(),
            odd: b,
        })
    });
    let mut out = Vec::with_capacity(alphas.len() * subsets.len());
    for alpha in alphas {
        for &odd in &subsets {
            out.push(Monomial {
                alpha: alpha.clone(),
                odd,
            });
        }
    }
    out
}

/// Λ(m,n;t) with its enumerated monomial basis.
#[derive(Clone, Debug)]
pub struct Superspace {
    params: Arc<Params>,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Superspace {
    pub fn new(params: Params) -> Self {
        let basis = enumerate_basis(&params);
        let index = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        Self {
            params: Arc::new(params),
            basis,
            index,
        }
    }

    pub fn params(&self) -> &Arc<Params> {
        &self.params
    }

    pub fn field(&self) -> PrimeField {
        self.params.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn index_of(&self, mono: &Monomial) -> Option<usize> {
        self.index.get(mono).copied()
    }

    pub fn poly(&self, mono: &Monomial) -> SuperPolynomial {
        SuperPolynomial::from_monomial(self.params.clone(), mono.clone())
    }

    pub fn variable(&self, i: usize) -> Result<SuperPolynomial> {
        SuperPolynomial::variable(self.params.clone(), i)
    }

    /// Dense coordinates in the monomial basis.
    pub fn coordinates(&self, f: &SuperPolynomial) -> Vec<u32> {
        let mut v = vec![0; self.dim()];
        for (m, c) in f.terms() {
            v[self.index[m]] = c;
        }
        v
    }
}
