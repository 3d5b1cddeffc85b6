//! Desk-scale models of Gromov-hyperbolic spaces and the hyperbolic
//! product construction, with machinery to measure every quantitative
//! bound the construction promises.
//!
//! The crate is organized around five layers:
//!
//! - [`space`] — the supported model spaces (finite weighted graphs,
//!   regular trees, truncated line segments, the upper half-plane) behind
//!   one metric interface: distances, geodesics, arclength polylines,
//!   seeded sampling.
//! - [`hyperbolicity`] — Gromov products, tripod decompositions, δ
//!   estimation (four-point and tilde-point), T-function fitting and
//!   deviation measurement, and the Morse detour estimate.
//! - [`busemann`] — Busemann fields (closed-form or finite-horizon),
//!   B-rays, the Busemann–Gromov product and ideal-triangle comparison
//!   points.
//! - [`product`] — the level set `Y = {level₁ = level₂}` inside a product
//!   of two factors, its inner metric graph, the explicit curves
//!   Γ / Γ^c / Γ*, and the quantitative comparisons between the inner
//!   metric and the max/Euclidean product metrics.
//! - [`boundary`] — sequence-based boundary-at-infinity machinery and the
//!   classification of rays in a product (collapsing vs factorizing),
//!   with the finite factorization check.
//!
//! Everything is deterministic: all sampling takes explicit seeds, graph
//! geodesics use a fixed lexicographic tie-break, and estimators report
//! whether they were exhaustive.

pub mod boundary;
pub mod busemann;
pub mod error;
pub mod hyperbolicity;
pub mod product;
pub mod space;
pub mod tolerance;

pub use error::Error;
pub use space::{GeodesicPath, Point, PointRef, Space, SpaceDescription, SpaceKind};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
