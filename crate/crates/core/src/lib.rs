//! Compactified trigonometric Ruijsenaars-Schneider systems obtained by
//! quasi-Hamiltonian reduction of the SU(n) double.
//!
//! The crate computes, classifies and verifies the structures attached to the
//! moment-map value μ₀(y) = diag(e^{2iy}, …, e^{2iy}, e^{-2(n-1)iy}):
//!
//! - [`alcove`]: coordinates on SU(n) conjugacy classes — the Weyl alcove, the
//!   diagonal representative δ(ξ), the spectral map Ξ, and the σ/ν symmetries;
//! - [`coupling`]: exact classification of the coupling y into irregular,
//!   type (i) and type (ii) cases, with exact-rational interval arithmetic;
//! - [`zpolytope`]: the z_ℓ functions, the moment polytope 𝒜_y, simplex
//!   vertices, vertex enumeration, Delzant edge counts and torus fixed points;
//! - [`double`]: the matrix-level core — constraint solving, the local Lax
//!   matrix, the RS Hamiltonian, the torus action and the duality map;
//! - [`toric`]: the CP^{n-1} toric model on the dense chart, with the
//!   old-versus-new Hamiltonian comparison;
//! - [`sampling`]: seeded, portable random sampling of the various domains;
//! - [`verify`]: batch residual suites used by the command-line front end.

pub mod alcove;
pub mod coupling;
pub mod double;
pub mod error;
pub mod linalg;
pub mod sampling;
pub mod toric;
pub mod verify;
pub mod zpolytope;

pub use error::{Error, Result};
