//! Exact p-adic and S-adic arithmetic with the lattice, measure and
//! approximation machinery used in metric Diophantine approximation on
//! p-adic manifolds.

pub mod approx;
pub mod arith;
pub mod error;
pub mod lattice;
pub mod maps;
pub mod measure;
pub mod padic;
pub mod poly;
pub mod real;
pub mod ubiquity;

pub use error::{Error, Result};
pub use padic::{sadic_norm, quasinorm_v, Component, PAdic, PAdicBall, PAdicRecord, Place, SAdicVector};
pub use poly::{MultiIndex, Poly, Scalar};
pub use maps::AnalyticMap;
