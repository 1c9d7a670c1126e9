//! Ramification breaks of nonabelian degree-`p^3` extensions of `F_q((t))`.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: `F_q` and truncated Laurent series;
//! * [`artin_schreier`]: the Weierstrass map, reduction over `K`, breaks;
//! * [`cp_ext`]: arithmetic in `L = K(y)` and the brute-force `L/K` reduction;
//! * [`decomp`]: splitting `beta_2` over powers of `beta_1`;
//! * [`classify`]: closed forms, the auxiliary break ladder, final sequences;
//! * [`genlab`]: generator packages and symbolic Galois checks;
//! * [`sample`]: random instances used by the test suites and the CLI;
//! * [`harness`]: closed form against oracle per instance, and sweep cells.

pub mod artin_schreier;
pub mod classify;
pub mod cp_ext;
pub mod decomp;
pub mod error;
pub mod field;
pub mod genlab;
pub mod harness;
pub mod sample;

pub use error::{Error, Result};
pub use num_rational::Rational64;
