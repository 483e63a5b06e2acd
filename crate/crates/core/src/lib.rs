//! Exact rational computation of arithmetic invariants of toric bundles:
//! adelic polytopes and roof functions, exact polytope integration, the
//! bundle BKK functionals, Okounkov bodies with concave transforms, heights
//! and successive minima of compactified semiabelian varieties.

#![allow(clippy::needless_range_loop)]

pub mod base_model;
pub mod bkk;
pub mod dd;
pub mod error;
pub mod fan;
pub mod linalg;
pub mod minima;
pub mod okounkov;
pub mod poly;
pub mod polyint;
pub mod polytope;
pub mod qp;
pub mod rational;
pub mod roofs;
pub mod semiabelian;
pub mod verify;

pub use error::{Error, Result};
pub use rational::{Point, Rational};
