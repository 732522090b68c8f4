//! Census of maximal-order elements in rational central simple algebras
//! with a prescribed irreducible characteristic polynomial and bounded
//! Frobenius norm, together with the closed-form asymptotic constant the
//! counts are compared against.
//!
//! The library side is organized along the pipeline:
//!
//! - [`poly`]: exact monic integer polynomials (discriminant, factorization
//!   over prime fields, Dedekind maximality, Sturm root counting);
//! - [`field`]: invariants of `K = Q[x]/(p)` (class number, regulator,
//!   torsion, zeta residue), computed for quadratics and fixture-loaded
//!   above;
//! - [`quaternion`]: quaternion algebras, Hilbert symbols, maximal-order
//!   verification, the real embedding and its Frobenius Gram matrix;
//! - [`local`]: per-prime profiles (ramification, feasibility, orbit
//!   counts, density and correction factors);
//! - [`constants`]: special functions and the assembled constant;
//! - [`census`]: the exact counting engines;
//! - [`finite`]: brute-force finite-quotient orbit oracles (test support);
//! - [`problem`]: the JSON problem-spec format and the pipeline driver.

pub mod arith;
pub mod census;
pub mod constants;
pub mod error;
pub mod field;
pub mod finite;
pub mod local;
pub mod poly;
pub mod problem;
pub mod qfield;
pub mod quaternion;
pub mod real;
