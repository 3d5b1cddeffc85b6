//! Central tolerance and slack policy.
//!
//! Two regimes exist throughout the crate:
//!
//! - **exact models** (segment, upper half-plane closed forms): arithmetic
//!   identities are checked at [`EXACT_TOL`], inequality bounds get the
//!   tiny additive slack [`EXACT_SLACK`];
//! - **graph models** (finite graphs, regular trees, meshed half-plane
//!   polylines): each space exposes a resolution `h` and every inequality
//!   bound gets additive slack `4h` — one endpoint projection costs at
//!   most `h` and a bound involves up to four projected points.

/// Tolerance for identities that hold exactly in closed form.
pub const EXACT_TOL: f64 = 1e-9;

/// Additive slack on inequality bounds evaluated on exact models.
pub const EXACT_SLACK: f64 = 1e-6;

/// Round-trip tolerance for parameter fitting (pure arithmetic).
pub const FIT_ROUND_TRIP_TOL: f64 = 1e-12;

/// Additive slack on inequality bounds evaluated at resolution `h`.
pub fn slack_for_resolution(h: f64) -> f64 {
    if h <= 0.0 {
        EXACT_SLACK
    } else {
        4.0 * h
    }
}
