//! Upper half-plane model: closed-form distance and geodesics.
//!
//! Points are (x, y) with y > 0, metric ds² = (dx² + dy²)/y². Geodesics are
//! vertical lines and semicircles centered on the real axis.

/// Hyperbolic distance, acosh form.
pub fn distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let dx = p.0 - q.0;
    let dy = p.1 - q.1;
    let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p.1 * q.1);
    // Guard: arg may dip below 1 by rounding when p ≈ q.
    arg.max(1.0).acosh()
}

/// Point at arclength `t` along the geodesic from `p` toward `q`.
///
/// `t` may exceed d(p,q) (the geodesic extends); callers clamp if needed.
pub fn geodesic_point(p: (f64, f64), q: (f64, f64), t: f64) -> (f64, f64) {
    let dx = q.0 - p.0;
    if dx.abs() < 1e-13 * (1.0 + p.0.abs().max(q.0.abs())) {
        // Vertical geodesic: y moves exponentially in arclength.
        let sign = if q.1 >= p.1 { 1.0 } else { -1.0 };
        return (p.0, p.1 * (sign * t).exp());
    }
    // Semicircle centered at (c, 0) through both points.
    let c = (q.0 * q.0 + q.1 * q.1 - p.0 * p.0 - p.1 * p.1) / (2.0 * dx);
    let r = ((p.0 - c).powi(2) + p.1 * p.1).sqrt();
    // Angle θ ∈ (0, π); arclength coordinate u(θ) = ln tan(θ/2).
    let theta_p = (p.1).atan2(p.0 - c);
    let theta_q = (q.1).atan2(q.0 - c);
    let u_p = (theta_p / 2.0).tan().ln();
    let u_q = (theta_q / 2.0).tan().ln();
    let sign = if u_q >= u_p { 1.0 } else { -1.0 };
    let u_t = u_p + sign * t;
    let theta_t = 2.0 * u_t.exp().atan();
    (c + r * theta_t.cos(), r * theta_t.sin())
}

/// Vertical ray upward from `p`, at arclength `t` (the B-ray of the
/// boundary point at infinity, B(x,y) = −ln y).
pub fn vertical_ray_point(p: (f64, f64), t: f64) -> (f64, f64) {
    (p.0, p.1 * t.exp())
}
