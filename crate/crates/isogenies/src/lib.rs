//! Elliptic-curve isogenies over small finite fields.
//!
//! Constructions from kernel points (Velu) and kernel polynomials (Kohel and
//! a general-degree algorithm), recovery of kernels from domain/codomain
//! pairs (Stark's continued-fraction method plus a naive torsion search),
//! duals, and the truncated-series machinery backing the fast Weierstrass
//! p-function expansion.

pub mod curve;
pub mod field;
pub mod isogeny;
pub mod poly;
pub mod recover;
pub mod series;
