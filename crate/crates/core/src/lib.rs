//! Exact construction of the modular Hamiltonian Lie superalgebras
//! `H(m, n; t)` over `F_p` and computation of their skew-symmetric
//! super-biderivations.
//!
//! The crate is layered bottom-up:
//!
//! - [`fpexact`]: prime-field arithmetic and exact sparse linear algebra
//! - [`superspace`]: the truncated divided-power superalgebra `Λ(m, n; t)`
//! - [`lsa`]: Lie superalgebras given by structure constants
//! - [`wittham`]: the Witt superalgebra, `D_H`, and the algebras `H̄` and `H`
//! - [`weights`]: the canonical torus and weight-space decompositions
//! - [`bidersolve`]: derivation and biderivation solvers
//! - [`cli`]: the `hamsuper` command-line front end

pub mod bidersolve;
pub mod cli;
pub mod error;
pub mod fpexact;
pub mod lsa;
pub mod superspace;
pub mod weights;
pub mod wittham;

pub use error::{Error, Result};
pub use fpexact::{FpScalar, PrimeField};
pub use lsa::StructureAlgebra;
pub use superspace::{Monomial, Params, Parity, SuperPolynomial};
pub use wittham::{build_h, build_hbar, Hamiltonian};
