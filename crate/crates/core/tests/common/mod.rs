//! Brute-force oracles shared by the integration and acceptance targets.
//! They work from raw structure constants with naive loops, independently of
//! the library's solvers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hamsuper::bidersolve::{BilinearCoefficients, LinearMapMatrix};
use hamsuper::fpexact::{PrimeField, Subspace};
use hamsuper::lsa::StructureAlgebra;
use hamsuper::superspace::{Params, Parity, Superspace};
use hamsuper::wittham::{witt_bracket, VectorField};

pub fn desk_params() -> Params {
    Params::new(3, 2, 2, vec![1, 1]).unwrap()
}

fn sgn(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

fn naive_bracket(alg: &StructureAlgebra, x: &[i64], y: &[i64]) -> Vec<i64> {
    let d = alg.dim();
    let p = alg.field().modulus() as i64;
    let mut out = vec![0i64; d];
    for (i, &xi) in x.iter().enumerate().filter(|(_, &c)| c != 0) {
        for (j, &yj) in y.iter().enumerate().filter(|(_, &c)| c != 0) {
            for (k, o) in out.iter_mut().enumerate() {
                *o = (*o + xi * yj * alg.constant(i, j, k) as i64) % p;
            }
        }
    }
    out.iter().map(|v| v.rem_euclid(p)).collect()
}

fn unit(d: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

fn reduce(v: &[i64], p: i64) -> Vec<i64> {
    v.iter().map(|x| x.rem_euclid(p)).collect()
}

fn axpy(acc: &mut [i64], c: i64, v: &[i64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += c * b;
    }
}

/// Jacobi identity in the form `[x,[y,z]] = [[x,y],z] + (-1)^{|x||y|}[y,[x,z]]`.
pub fn naive_jacobi(alg: &StructureAlgebra) -> bool {
    let d = alg.dim();
    let p = alg.field().modulus() as i64;
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let (ex, ey, ez) = (unit(d, x), unit(d, y), unit(d, z));
                let mut r = naive_bracket(alg, &ex, &naive_bracket(alg, &ey, &ez));
                let a = naive_bracket(alg, &naive_bracket(alg, &ex, &ey), &ez);
                let b = naive_bracket(alg, &ey, &naive_bracket(alg, &ex, &ez));
                axpy(&mut r, -1, &a);
                axpy(
                    &mut r,
                    -sgn(alg.parity(x).is_odd() && alg.parity(y).is_odd()),
                    &b,
                );
                if reduce(&r, p).iter().any(|&c| c != 0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Iterates over all vectors in `F_p^len`.
pub fn all_vectors(p: u32, len: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as u64).pow(len as u32);
    (0..total).map(move |mut code| {
        (0..len)
            .map(|_| {
                let v = (code % p as u64) as u32;
                code /= p as u64;
                v
            })
            .collect()
    })
}

/// Every superderivation of the given parity, by enumerating all
/// parity-compatible matrices.
pub fn brute_force_derivations(alg: &StructureAlgebra, parity: Parity) -> Vec<Vec<u32>> {
    let d = alg.dim();
    let p = alg.field().modulus() as i64;
    let slots: Vec<(usize, usize)> = (0..d)
        .flat_map(|k| (0..d).map(move |i| (k, i)))
        .filter(|&(k, i)| alg.parity(k) == parity + alg.parity(i))
        .collect();
    let mut found = Vec::new();
    for values in all_vectors(p as u32, slots.len()) {
        let mut mat = vec![0i64; d * d];
        for (&(k, i), &v) in slots.iter().zip(&values) {
            mat[k * d + i] = v as i64;
        }
        let apply = |x: &[i64]| -> Vec<i64> {
            (0..d)
                .map(|k| (0..d).map(|i| mat[k * d + i] * x[i]).sum::<i64>())
                .collect()
        };
        let ok = (0..d).all(|i| {
            (0..d).all(|j| {
                let (ei, ej) = (unit(d, i), unit(d, j));
                let mut r = apply(&naive_bracket(alg, &ei, &ej));
                let a = naive_bracket(alg, &reduce(&apply(&ei), p), &ej);
                let b = naive_bracket(alg, &ei, &reduce(&apply(&ej), p));
                axpy(&mut r, -1, &a);
                axpy(&mut r, -sgn(parity.is_odd() && alg.parity(i).is_odd()), &b);
                reduce(&r, p).iter().all(|&c| c == 0)
            })
        });
        if ok {
            found.push(mat.iter().map(|&v| v as u32).collect());
        }
    }
    found
}

/// Every skew-symmetric super-biderivation of parity `gamma`, by enumerating
/// all parity-compatible tensors (skew-symmetry is filtered, not imposed).
pub fn brute_force_biderivations(alg: &StructureAlgebra, gamma: Parity) -> Vec<Vec<u32>> {
    let d = alg.dim();
    let p = alg.field().modulus() as i64;
    let slots: Vec<(usize, usize, usize)> = (0..d)
        .flat_map(|i| (0..d).flat_map(move |j| (0..d).map(move |k| (i, j, k))))
        .filter(|&(i, j, k)| alg.parity(k) == alg.parity(i) + alg.parity(j) + gamma)
        .collect();
    let mut found = Vec::new();
    for values in all_vectors(p as u32, slots.len()) {
        let mut t = vec![0i64; d * d * d];
        for (&(i, j, k), &v) in slots.iter().zip(&values) {
            t[(i * d + j) * d + k] = v as i64;
        }
        let phi =
            |i: usize, j: usize| -> Vec<i64> { t[(i * d + j) * d..(i * d + j + 1) * d].to_vec() };
        let skew = (0..d).all(|i| {
            (0..d).all(|j| {
                let (pi, pj, g) = (
                    alg.parity(i).is_odd(),
                    alg.parity(j).is_odd(),
                    gamma.is_odd(),
                );
                let s = -sgn((g && pi) ^ (g && pj) ^ (pi && pj));
                phi(i, j)
                    .iter()
                    .zip(phi(j, i))
                    .all(|(&a, b)| (a - s * b).rem_euclid(p) == 0)
            })
        });
        if !skew {
            continue;
        }
        let leibniz = (0..d).all(|x| {
            (0..d).all(|y| {
                (0..d).all(|z| {
                    let yz = naive_bracket(alg, &unit(d, y), &unit(d, z));
                    let mut r = vec![0i64; d];
                    for (a, &c) in yz.iter().enumerate() {
                        axpy(&mut r, c, &phi(x, a));
                    }
                    let a = naive_bracket(alg, &phi(x, y), &unit(d, z));
                    let b = naive_bracket(alg, &unit(d, y), &phi(x, z));
                    let e = (gamma.is_odd() ^ alg.parity(x).is_odd()) && alg.parity(y).is_odd();
                    axpy(&mut r, -1, &a);
                    axpy(&mut r, -sgn(e), &b);
                    reduce(&r, p).iter().all(|&c| c == 0)
                })
            })
        });
        if leibniz {
            found.push(t.iter().map(|&v| v as u32).collect());
        }
    }
    found
}

/// Every skew-symmetric super-biderivation of parity `gamma`, enumerating
/// only the free coefficients `(i <= j, k)` allowed by the skew sign; each
/// candidate is then checked by naive substitution.
pub fn brute_force_skew_biderivations(alg: &StructureAlgebra, gamma: Parity) -> Vec<Vec<u32>> {
    let d = alg.dim();
    let p = alg.field().modulus() as i64;
    let skew_sign = |i: usize, j: usize| -> i64 {
        let (pi, pj, g) = (
            alg.parity(i).is_odd(),
            alg.parity(j).is_odd(),
            gamma.is_odd(),
        );
        -sgn((g && pi) ^ (g && pj) ^ (pi && pj))
    };
    let slots: Vec<(usize, usize, usize)> = (0..d)
        .flat_map(|i| (i..d).flat_map(move |j| (0..d).map(move |k| (i, j, k))))
        .filter(|&(i, j, k)| alg.parity(k) == alg.parity(i) + alg.parity(j) + gamma)
        .filter(|&(i, j, _)| i != j || skew_sign(i, i) == 1)
        .collect();
    let mut found = Vec::new();
    for values in all_vectors(p as u32, slots.len()) {
        let mut t = vec![0i64; d * d * d];
        for (&(i, j, k), &v) in slots.iter().zip(&values) {
            t[(i * d + j) * d + k] = v as i64;
            t[(j * d + i) * d + k] = (skew_sign(i, j) * v as i64).rem_euclid(p);
        }
        let flat: Vec<u32> = t.iter().map(|&v| v as u32).collect();
        if satisfies_second_slot(alg, gamma, &flat) {
            found.push(flat);
        }
    }
    found
}

/// Naive substitution of a tensor into the second-argument Leibniz rule on all triples.
pub fn satisfies_second_slot(alg: &StructureAlgebra, gamma: Parity, tensor: &[u32]) -> bool {
    let d = alg.dim();
    let p = alg.field().modulus() as i64;
    let phi = |i: usize, j: usize| -> Vec<i64> {
        tensor[(i * d + j) * d..(i * d + j + 1) * d]
            .iter()
            .map(|&v| v as i64)
            .collect()
    };
    (0..d).all(|x| {
        (0..d).all(|y| {
            (0..d).all(|z| {
                let yz = naive_bracket(alg, &unit(d, y), &unit(d, z));
                let mut r = vec![0i64; d];
                for (a, &c) in yz.iter().enumerate() {
                    axpy(&mut r, c, &phi(x, a));
                }
                let a = naive_bracket(alg, &phi(x, y), &unit(d, z));
                let b = naive_bracket(alg, &unit(d, y), &phi(x, z));
                let e = (gamma.is_odd() ^ alg.parity(x).is_odd()) && alg.parity(y).is_odd();
                axpy(&mut r, -1, &a);
                axpy(&mut r, -sgn(e), &b);
                reduce(&r, p).iter().all(|&c| c == 0)
            })
        })
    })
}

/// The brute-force solution set equals the span of `basis` exactly.
pub fn set_equals_span(
    field: PrimeField,
    ambient: usize,
    basis: &[Vec<u32>],
    found: &[Vec<u32>],
) -> bool {
    let span = Subspace::span(field, ambient, basis.iter().cloned());
    if span.dim() != basis.len() {
        return false;
    }
    let expected = (field.modulus() as usize).pow(basis.len() as u32);
    let distinct: BTreeSet<&Vec<u32>> = found.iter().collect();
    distinct.len() == expected && found.iter().all(|v| span.contains(v))
}

pub fn flatten_derivation(m: &LinearMapMatrix) -> Vec<u32> {
    let d = m.dim();
    (0..d)
        .flat_map(|k| (0..d).map(move |i| (k, i)))
        .map(|(k, i)| m.entry(k, i))
        .collect()
}

pub fn flatten_bilinear(b: &BilinearCoefficients) -> Vec<u32> {
    b.flat().to_vec()
}

/// All super skew-symmetric, parity-compatible algebras of dimension 1 or 2
/// over `F_p` that satisfy the Jacobi identity, over every parity assignment.
pub fn small_algebras(field: PrimeField) -> Vec<StructureAlgebra> {
    let mut out = Vec::new();
    for dim in 1..=2usize {
        for mask in 0..(1u32 << dim) {
            let parity: Vec<Parity> = (0..dim)
                .map(|i| Parity::from_odd(mask >> i & 1 == 1))
                .collect();
            let upper: Vec<(usize, usize, usize)> = (0..dim)
                .flat_map(|i| (i..dim).flat_map(move |j| (0..dim).map(move |k| (i, j, k))))
                .filter(|&(i, j, k)| parity[k] == parity[i] + parity[j])
                .collect();
            for values in all_vectors(field.modulus(), upper.len()) {
                let consts = upper
                    .iter()
                    .zip(&values)
                    .filter(|(_, &v)| v != 0)
                    .map(|(&(i, j, k), &v)| (i, j, k, v as i64));
                if let Ok(alg) = StructureAlgebra::from_upper(field, parity.clone(), consts) {
                    if naive_jacobi(&alg) {
                        out.push(alg);
                    }
                }
            }
        }
    }
    out
}

/// The Witt superalgebra W(m,n;t) as a structure-constant algebra on the
/// basis `x^(a) x^u D_i`, ordered by direction then monomial.
pub fn witt_algebra(params: Params) -> StructureAlgebra {
    let space = Superspace::new(params);
    let n = space.dim();
    let s = space.params().s();
    let m = space.params().m();
    let basis: Vec<VectorField> = (1..=s)
        .flat_map(|i| space.basis().iter().map(move |mono| (i, mono.clone())))
        .map(|(i, mono)| VectorField::single(i, space.poly(&mono)).unwrap())
        .collect();
    let parity: Vec<Parity> = (1..=s)
        .flat_map(|i| {
            space
                .basis()
                .iter()
                .map(move |mono| mono.parity() + Parity::from_odd(i > m))
        })
        .collect();
    let mut consts = Vec::new();
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate() {
            let z = witt_bracket(x, y).unwrap().coordinates(&space);
            for (k, &c) in z.iter().enumerate() {
                if c != 0 {
                    consts.push((a, b, k, c as i64));
                }
            }
        }
    }
    assert_eq!(basis.len(), s * n);
    StructureAlgebra::new(space.field(), parity, consts).unwrap()
}
