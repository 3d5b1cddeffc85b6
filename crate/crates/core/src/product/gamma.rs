//! The explicit curves between points of Y: the (possibly discontinuous)
//! Γ, its continuous modification Γ^c with the two level-matched bridges,
//! and the reparameterized Γ* living on [0, d(p,p')].

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::product::{Flavor, Mode, ProductSpace, YPoint};
use crate::space::GeodesicPath;
use crate::tolerance::EXACT_TOL;
use crate::Result;

/// Shared data of the Γ-family for one pair (p, p').
#[derive(Clone, Debug)]
pub struct GammaCurves {
    pub p: YPoint,
    pub p_prime: YPoint,
    /// Per-factor level products a_i (from p) and b_i (from p').
    pub a_parts: [f64; 2],
    pub b_parts: [f64; 2],
    /// a = max a_i, b = max b_i; a + b = d_m(p, p').
    pub a: f64,
    pub b: f64,
    pub d_m: f64,
    /// Per-factor gap d_i(γ_i(a), γ_i'(b)) at the Γ splice.
    pub gap_parts: [f64; 2],
    /// max of the parts: the d_m jump of Γ.
    pub gap: f64,
    /// Level-decreasing legs from p (lengths cover every later use).
    pub legs: [GeodesicPath; 2],
    /// Legs from p'.
    pub legs_prime: [GeodesicPath; 2],
    pub continuous: Option<GammaC>,
    pub star: Option<GammaStar>,
}

/// The continuous modification Γ^c.
#[derive(Clone, Debug)]
pub struct GammaC {
    pub delta_used: f64,
    /// Some(τ) when the basepoint splice variant was taken (legs meet at z).
    pub tau: Option<f64>,
    /// Assembled polyline with its parameterization.
    pub params: Vec<f64>,
    pub points: Vec<YPoint>,
    /// d_m-length of the assembled polyline.
    pub length_dm: f64,
    /// Largest |level₁ − level₂| over the polyline samples.
    pub max_level_defect: f64,
    /// d_m-lengths of the two bridges.
    pub bridge_lengths: [f64; 2],
}

/// The reparameterized Γ* on [0, d(p,p')].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GammaStar {
    pub a_star: f64,
    pub b_star: f64,
    pub d_inner: f64,
    /// Per-factor gap d_i(γ_i(a*), γ_i'(b*)) at the Γ* splice.
    pub gap_parts: [f64; 2],
    pub gap: f64,
}

impl GammaCurves {
    /// Γ(t) on [0, a + b]: the γ-leg then the reversed γ'-leg.
    pub fn eval_gamma(&self, y: &ProductSpace, t: f64) -> YPoint {
        let t = t.clamp(0.0, self.a + self.b);
        if t <= self.a {
            YPoint::new(
                y.factors[0].path_eval(&self.legs[0], t),
                y.factors[1].path_eval(&self.legs[1], t),
            )
        } else {
            let s = self.a + self.b - t;
            YPoint::new(
                y.factors[0].path_eval(&self.legs_prime[0], s),
                y.factors[1].path_eval(&self.legs_prime[1], s),
            )
        }
    }

    /// Γ*(t) on [0, d(p,p')]; requires `star`.
    pub fn eval_star(&self, y: &ProductSpace, t: f64) -> Result<YPoint> {
        let star = self
            .star
            .ok_or_else(|| Error::domain("Γ* has not been computed for this pair"))?;
        let t = t.clamp(0.0, star.d_inner);
        if t <= star.a_star {
            Ok(YPoint::new(
                y.factors[0].path_eval(&self.legs[0], t),
                y.factors[1].path_eval(&self.legs[1], t),
            ))
        } else {
            let s = star.d_inner - t;
            Ok(YPoint::new(
                y.factors[0].path_eval(&self.legs_prime[0], s),
                y.factors[1].path_eval(&self.legs_prime[1], s),
            ))
        }
    }
}

/// Level products and legs for the pair; the Γ data every other curve
/// builds on. Leg lengths are `a` and `b` here; later stages extend them.
pub fn gamma_curve(y: &ProductSpace, p: &YPoint, p_prime: &YPoint) -> Result<GammaCurves> {
    build_gamma(y, p, p_prime, 0.0)
}

fn build_gamma(
    y: &ProductSpace,
    p: &YPoint,
    p_prime: &YPoint,
    extension: f64,
) -> Result<GammaCurves> {
    let mut a_parts = [0.0; 2];
    let mut b_parts = [0.0; 2];
    for i in 0..2 {
        let d_i = y.factors[i].distance(&p.factor(i), &p_prime.factor(i))?;
        let lp = y.level_of(i, &p.factor(i))?;
        let lq = y.level_of(i, &p_prime.factor(i))?;
        a_parts[i] = 0.5 * (d_i + lp - lq);
        b_parts[i] = 0.5 * (d_i + lq - lp);
    }
    let a = a_parts[0].max(a_parts[1]).max(0.0);
    let b = b_parts[0].max(b_parts[1]).max(0.0);
    let d_m = y.dm(p, p_prime)?;

    let mut legs = Vec::with_capacity(2);
    let mut legs_prime = Vec::with_capacity(2);
    for i in 0..2 {
        legs.push(ray_or_point(y, i, &p.factor(i), a + extension)?);
        legs_prime.push(ray_or_point(y, i, &p_prime.factor(i), b + extension)?);
    }
    let legs: [GeodesicPath; 2] = legs.try_into().unwrap();
    let legs_prime: [GeodesicPath; 2] = legs_prime.try_into().unwrap();

    let mut gap_parts = [0.0; 2];
    for i in 0..2 {
        let at_a = y.factors[i].path_eval(&legs[i], a);
        let at_b = y.factors[i].path_eval(&legs_prime[i], b);
        gap_parts[i] = y.factors[i].distance(&at_a, &at_b)?;
    }
    let gap = gap_parts[0].max(gap_parts[1]);

    Ok(GammaCurves {
        p: *p,
        p_prime: *p_prime,
        a_parts,
        b_parts,
        a,
        b,
        d_m,
        gap_parts,
        gap,
        legs,
        legs_prime,
        continuous: None,
        star: None,
    })
}

/// A level-decreasing leg of length `len`, degenerating to the start point
/// when `len` is zero.
fn ray_or_point(
    y: &ProductSpace,
    i: usize,
    from: &crate::space::Point,
    len: f64,
) -> Result<GeodesicPath> {
    if len <= EXACT_TOL {
        return Ok(GeodesicPath::new(
            y.factors[i].label().to_string(),
            vec![*from],
            vec![0.0],
        ));
    }
    y.factor_ray(i, from, len)
}

/// Γ^c: the continuous modification. In basepoint mode, when the legs
/// reach the basepoint before the 2δ extension (τ = level(p) − a < 2δ),
/// the curve splices at z instead of using bridges.
pub fn gamma_c_curve(
    y: &ProductSpace,
    p: &YPoint,
    p_prime: &YPoint,
    delta_est: f64,
) -> Result<GammaCurves> {
    let two_delta = 2.0 * delta_est;
    let splice = match &y.spec.mode {
        Mode::Basepoint { .. } => {
            let level_p = y.level_of(0, &p.p1)?;
            let base = build_gamma(y, p, p_prime, 0.0)?;
            let tau = level_p - base.a;
            tau < two_delta
        }
        Mode::Busemann => false,
    };

    if splice {
        return gamma_c_spliced(y, p, p_prime);
    }

    let mut curves = build_gamma(y, p, p_prime, two_delta)?;
    let (a, b) = (curves.a, curves.b);
    let f = &y.factors;

    // Bridge 1 moves factor 1 along η₁ while factor 2 tracks the matching
    // level on the γ₂ leg; bridge 2 mirrors it.
    let eta1_from = f[0].path_eval(&curves.legs[0], a + two_delta);
    let eta1_to = f[0].path_eval(&curves.legs_prime[0], b + two_delta);
    let eta1 = f[0].geodesic(&eta1_from, &eta1_to)?;

    let eta2_from = f[1].path_eval(&curves.legs[1], a + two_delta);
    let eta2_to = f[1].path_eval(&curves.legs_prime[1], b + two_delta);
    let eta2 = f[1].geodesic(&eta2_from, &eta2_to)?;

    let level_p = y.level_of(0, &p.p1)?;
    let level_p_prime = y.level_of(0, &p_prime.p1)?;

    // Partner parameters: s(t) = level(p) − level₁(η₁(t)) on the γ₂ leg.
    let mut s_max: f64 = 0.0;
    let mut bridge1_pairs = Vec::with_capacity(eta1.points.len());
    for q in &eta1.points {
        let s = level_p - y.level_of(0, q)?;
        if s < -y.spec.epsilon {
            return Err(Error::Discretization(format!(
                "bridge 1 needs a negative partner parameter {s} at {q:?}"
            )));
        }
        let s = s.max(0.0);
        s_max = s_max.max(s);
        bridge1_pairs.push((*q, s));
    }
    let gamma2_ext = ray_or_point(y, 1, &p.p2, s_max.max(a + two_delta))?;
    let bridge1: Vec<YPoint> = bridge1_pairs
        .iter()
        .map(|(q, s)| YPoint::new(*q, f[1].path_eval(&gamma2_ext, *s)))
        .collect();

    let mut s_max2: f64 = 0.0;
    let mut bridge2_pairs = Vec::with_capacity(eta2.points.len());
    for q in &eta2.points {
        let s = level_p_prime - y.level_of(1, q)?;
        if s < -y.spec.epsilon {
            return Err(Error::Discretization(format!(
                "bridge 2 needs a negative partner parameter {s} at {q:?}"
            )));
        }
        let s = s.max(0.0);
        s_max2 = s_max2.max(s);
        bridge2_pairs.push((*q, s));
    }
    let gamma1_prime_ext = ray_or_point(y, 0, &p_prime.p1, s_max2.max(b + two_delta))?;
    let bridge2: Vec<YPoint> = bridge2_pairs
        .iter()
        .map(|(q, s)| YPoint::new(f[0].path_eval(&gamma1_prime_ext, *s), *q))
        .collect();

    // Assemble: γ leg out, bridge 1, bridge 2, γ' leg back.
    let mut points: Vec<YPoint> = Vec::new();
    for t in leg_params(y, a + two_delta) {
        points.push(YPoint::new(
            f[0].path_eval(&curves.legs[0], t),
            f[1].path_eval(&curves.legs[1], t),
        ));
    }
    points.extend(bridge1.iter().copied());
    points.extend(bridge2.iter().copied());
    let back: Vec<f64> = leg_params(y, b + two_delta);
    for t in back.iter().rev() {
        points.push(YPoint::new(
            f[0].path_eval(&curves.legs_prime[0], *t),
            f[1].path_eval(&curves.legs_prime[1], *t),
        ));
    }

    let (params, length_dm) = parameterize(y, &points)?;
    let max_level_defect = self_level_defect(y, &points)?;
    if max_level_defect > y.spec.epsilon + EXACT_TOL {
        return Err(Error::Discretization(format!(
            "Γ^c leaves the level set by {max_level_defect} (ε = {})",
            y.spec.epsilon
        )));
    }
    let bridge_lengths = [
        polyline_dm_length(y, &bridge1)?,
        polyline_dm_length(y, &bridge2)?,
    ];
    curves.continuous = Some(GammaC {
        delta_used: delta_est,
        tau: None,
        params,
        points,
        length_dm,
        max_level_defect,
        bridge_lengths,
    });
    Ok(curves)
}

/// Basepoint splice: both legs run all the way to z and meet there.
fn gamma_c_spliced(y: &ProductSpace, p: &YPoint, p_prime: &YPoint) -> Result<GammaCurves> {
    let level_p = y.level_of(0, &p.p1)?;
    let level_p_prime = y.level_of(0, &p_prime.p1)?;
    let mut curves = build_gamma(y, p, p_prime, 0.0)?;
    let tau = (level_p - curves.a).max(0.0);

    let mut legs = Vec::with_capacity(2);
    let mut legs_prime = Vec::with_capacity(2);
    for i in 0..2 {
        legs.push(ray_or_point(y, i, &p.factor(i), level_p)?);
        legs_prime.push(ray_or_point(y, i, &p_prime.factor(i), level_p_prime)?);
    }
    let legs: [GeodesicPath; 2] = legs.try_into().unwrap();
    let legs_prime: [GeodesicPath; 2] = legs_prime.try_into().unwrap();

    let f = &y.factors;
    let mut points: Vec<YPoint> = Vec::new();
    for t in leg_params(y, level_p) {
        points.push(YPoint::new(
            f[0].path_eval(&legs[0], t),
            f[1].path_eval(&legs[1], t),
        ));
    }
    let back: Vec<f64> = leg_params(y, level_p_prime);
    for t in back.iter().rev() {
        points.push(YPoint::new(
            f[0].path_eval(&legs_prime[0], *t),
            f[1].path_eval(&legs_prime[1], *t),
        ));
    }
    let (params, length_dm) = parameterize(y, &points)?;
    let max_level_defect = self_level_defect(y, &points)?;
    if max_level_defect > y.spec.epsilon + EXACT_TOL {
        return Err(Error::Discretization(format!(
            "spliced Γ^c leaves the level set by {max_level_defect}"
        )));
    }
    curves.legs = legs;
    curves.legs_prime = legs_prime;
    curves.continuous = Some(GammaC {
        delta_used: 0.0,
        tau: Some(tau),
        params,
        points,
        length_dm,
        max_level_defect,
        bridge_lengths: [0.0, 0.0],
    });
    Ok(curves)
}

/// Γ*: legs of lengths a* = a + ½(d − d_m) and b* likewise, joined on
/// [0, d(p,p')] with endpoints exactly p and p'.
pub fn gamma_star(
    y: &ProductSpace,
    p: &YPoint,
    p_prime: &YPoint,
    flavor: Flavor,
) -> Result<GammaCurves> {
    let pid = y
        .node_id(p)
        .ok_or_else(|| Error::domain("p is not a node of the discretized product"))?;
    let qid = y
        .node_id(p_prime)
        .ok_or_else(|| Error::domain("p' is not a node of the discretized product"))?;
    let d_inner = y.inner_distance(pid, qid, flavor)?;

    let base = build_gamma(y, p, p_prime, 0.0)?;
    let half_excess = 0.5 * (d_inner - base.d_m).max(0.0);
    let a_star = base.a + half_excess;
    let b_star = base.b + half_excess;
    let mut curves = build_gamma(y, p, p_prime, half_excess)?;

    let mut gap_parts = [0.0; 2];
    for i in 0..2 {
        let at_a = y.factors[i].path_eval(&curves.legs[i], a_star);
        let at_b = y.factors[i].path_eval(&curves.legs_prime[i], b_star);
        gap_parts[i] = y.factors[i].distance(&at_a, &at_b)?;
    }
    curves.star = Some(GammaStar {
        a_star,
        b_star,
        d_inner,
        gap_parts,
        gap: gap_parts[0].max(gap_parts[1]),
    });
    Ok(curves)
}

/// Result of comparing a shortest path σ against Γ* at common times.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FellowTravelReport {
    /// sup over sampled t of (inner distance σ(t) to the node nearest
    /// Γ*(t)) + the snap error; an upper bound on d(σ(t), Γ*(t)).
    pub sup: f64,
    pub samples_used: usize,
    /// Samples where Γ*(t) left the discretization box.
    pub samples_skipped: usize,
    /// Parameter minimizing the dominant-factor distance to γ(a).
    pub t0: f64,
    /// d_i(σ_i(t0), γ_i(a)) for the dominant factor (30δ estimate).
    pub dominant_at_t0: f64,
    /// Same for the other factor (100δ estimate).
    pub other_at_t0: f64,
    /// Whether factors were swapped so factor "1" realizes d_m.
    pub swapped: bool,
    pub d_inner: f64,
    pub d_m: f64,
    pub a: f64,
    /// The sampled trace (t, measured gap) behind the sup.
    pub trace: Vec<(f64, f64)>,
}

/// Walk a shortest path σ from p to p' and measure how far it strays from
/// Γ* at matching parameters, plus the two intermediate factor estimates.
pub fn fellow_travel_check(
    y: &ProductSpace,
    p: &YPoint,
    p_prime: &YPoint,
    flavor: Flavor,
    max_samples: usize,
) -> Result<FellowTravelReport> {
    let pid = y
        .node_id(p)
        .ok_or_else(|| Error::domain("p is not a node"))?;
    let qid = y
        .node_id(p_prime)
        .ok_or_else(|| Error::domain("p' is not a node"))?;
    let curves = gamma_star(y, p, p_prime, flavor)?;
    let star = curves.star.unwrap();
    let (sigma_nodes, sigma_cum) = y.shortest_path_nodes(pid, qid, flavor)?;

    // The factor realizing d_m drives the dominant-side estimate.
    let d1 = y.factors[0].distance(&p.p1, &p_prime.p1)?;
    let d2 = y.factors[1].distance(&p.p2, &p_prime.p2)?;
    let swapped = d2 > d1;
    let big = usize::from(swapped);
    let small = 1 - big;

    let gamma_at_a = curves.eval_gamma(y, curves.a);

    // t0: σ sample minimizing the dominant-factor distance to γ(a).
    let mut t0 = 0.0;
    let mut best = f64::INFINITY;
    for (idx, &node) in sigma_nodes.iter().enumerate() {
        let s = y.node_point(node);
        let d = y.factors[big].distance(&s.factor(big), &gamma_at_a.factor(big))?;
        if d < best {
            best = d;
            t0 = sigma_cum[idx];
        }
    }
    let t0_node = nearest_cum_index(&sigma_cum, t0);
    let s_t0 = y.node_point(sigma_nodes[t0_node]);
    let dominant_at_t0 = best;
    let other_at_t0 = y.factors[small].distance(&s_t0.factor(small), &gamma_at_a.factor(small))?;

    // sup of d(σ(t), Γ*(t)) over σ's node parameters (subsampled).
    let stride = (sigma_nodes.len() / max_samples.max(1)).max(1);
    let mut sup = 0.0f64;
    let mut used = 0;
    let mut skipped = 0;
    let mut trace = Vec::new();
    for (idx, &node) in sigma_nodes.iter().enumerate() {
        if idx % stride != 0 && idx != sigma_nodes.len() - 1 {
            continue;
        }
        let t = sigma_cum[idx];
        let target = curves.eval_star(y, t)?;
        match y.snap(&target) {
            Some((snapped, snap_err)) => {
                let d = y.inner_distance(node, snapped, flavor)? + snap_err;
                sup = sup.max(d);
                trace.push((t, d));
                used += 1;
            }
            None => skipped += 1,
        }
    }

    Ok(FellowTravelReport {
        sup,
        samples_used: used,
        samples_skipped: skipped,
        t0,
        dominant_at_t0,
        other_at_t0,
        swapped,
        d_inner: star.d_inner,
        d_m: curves.d_m,
        a: curves.a,
        trace,
    })
}

fn nearest_cum_index(cum: &[f64], t: f64) -> usize {
    let mut best = 0;
    let mut gap = f64::INFINITY;
    for (i, &c) in cum.iter().enumerate() {
        let g = (c - t).abs();
        if g < gap {
            gap = g;
            best = i;
        }
    }
    best
}

/// Common parameter grid for sampling a leg of the given span.
fn leg_params(y: &ProductSpace, span: f64) -> Vec<f64> {
    if span <= EXACT_TOL {
        return vec![0.0];
    }
    let h = y
        .spec
        .mesh
        .max(y.factors[0].resolution().max(y.factors[1].resolution()));
    let n = (span / h).ceil().max(1.0) as usize;
    (0..=n).map(|i| (i as f64 / n as f64) * span).collect()
}

fn parameterize(y: &ProductSpace, points: &[YPoint]) -> Result<(Vec<f64>, f64)> {
    let mut params = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    params.push(0.0);
    for w in points.windows(2) {
        acc += y.dm(&w[0], &w[1])?;
        params.push(acc);
    }
    Ok((params, acc))
}

fn polyline_dm_length(y: &ProductSpace, points: &[YPoint]) -> Result<f64> {
    let mut acc = 0.0;
    for w in points.windows(2) {
        acc += y.dm(&w[0], &w[1])?;
    }
    Ok(acc)
}

fn self_level_defect(y: &ProductSpace, points: &[YPoint]) -> Result<f64> {
    let mut worst = 0.0f64;
    for q in points {
        let l1 = y.level_of(0, &q.p1)?;
        let l2 = y.level_of(1, &q.p2)?;
        worst = worst.max((l1 - l2).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::fixtures::{cross_product, diagonal_product};
    use crate::space::Point;

    #[test]
    fn diagonal_gamma_is_one_leg() {
        // p = (0,0), p' = (−3,−3): the level rises toward p', so a = 0 and
        // Γ is the reversed γ' leg with zero gap.
        let y = diagonal_product(10.0);
        let p = YPoint::new(Point::Real(0.0), Point::Real(0.0));
        let q = YPoint::new(Point::Real(-3.0), Point::Real(-3.0));
        let g = gamma_curve(&y, &p, &q).unwrap();
        assert_eq!((g.a, g.b), (0.0, 3.0));
        assert!(g.gap < EXACT_TOL);
        let mid = g.eval_gamma(&y, 1.5);
        assert_eq!(mid.p1, mid.p2);
    }

    #[test]
    fn cross_gamma_arm_arithmetic() {
        // Worked example: p = (3,3), p' = (2,−2) on the cross.
        let y = cross_product(10.0);
        let p = YPoint::new(Point::Real(3.0), Point::Real(3.0));
        let q = YPoint::new(Point::Real(2.0), Point::Real(-2.0));
        let g = gamma_curve(&y, &p, &q).unwrap();
        assert_eq!(g.a_parts, [1.0, 3.0]);
        assert_eq!(g.b_parts, [0.0, 2.0]);
        assert_eq!((g.a, g.b), (3.0, 2.0));
        assert_eq!(g.d_m, 5.0);
        // Γ passes through the origin continuously: gap 0.
        assert!(g.gap < EXACT_TOL);
        let at_a = g.eval_gamma(&y, 3.0);
        assert_eq!(at_a.p1, Point::Real(0.0));
        assert_eq!(at_a.p2, Point::Real(0.0));
    }

    #[test]
    fn diagonal_gamma_c_has_no_bridges() {
        let y = diagonal_product(10.0);
        let p = YPoint::new(Point::Real(1.0), Point::Real(1.0));
        let q = YPoint::new(Point::Real(6.0), Point::Real(6.0));
        let g = gamma_c_curve(&y, &p, &q, 0.0).unwrap();
        let c = g.continuous.as_ref().unwrap();
        assert!((c.length_dm - g.d_m).abs() < 1e-9);
        assert!(c.max_level_defect < 1e-9);
        assert_eq!(c.bridge_lengths, [0.0, 0.0]);
    }

    #[test]
    fn cross_gamma_c_splices_at_origin() {
        // δ = 0 on segment factors, so the splice variant runs whenever
        // τ = level(p) − a < 0 never happens; τ = 0 < 2δ is false for
        // δ = 0, but adjacent arms still glue with zero-length bridges.
        let y = cross_product(10.0);
        let p = YPoint::new(Point::Real(3.0), Point::Real(3.0));
        let q = YPoint::new(Point::Real(2.0), Point::Real(-2.0));
        let g = gamma_c_curve(&y, &p, &q, 0.0).unwrap();
        let c = g.continuous.as_ref().unwrap();
        assert!((c.length_dm - 5.0).abs() < 1e-9);
        assert!(c.max_level_defect < 1e-9);
        // With a positive δ the splice variant triggers (τ = 0 < 2δ).
        let g = gamma_c_curve(&y, &p, &q, 0.25).unwrap();
        let c = g.continuous.as_ref().unwrap();
        assert_eq!(c.tau, Some(0.0));
        assert!((c.length_dm - 5.0).abs() < 1e-9);
    }

    #[test]
    fn cross_gamma_star_equals_gamma() {
        let y = cross_product(10.0);
        let p = YPoint::new(Point::Real(3.0), Point::Real(3.0));
        let q = YPoint::new(Point::Real(2.0), Point::Real(-2.0));
        let g = gamma_star(&y, &p, &q, Flavor::Max).unwrap();
        let s = g.star.unwrap();
        // d = d_m on the cross, so a* = a and the endpoints are exact.
        assert_eq!(s.d_inner, 5.0);
        assert_eq!(s.a_star, g.a);
        let start = g.eval_star(&y, 0.0).unwrap();
        let end = g.eval_star(&y, s.d_inner).unwrap();
        assert_eq!(start, p);
        assert_eq!(end, q);
    }

    #[test]
    fn fellow_travel_zero_on_tree_products() {
        let y = cross_product(10.0);
        let p = YPoint::new(Point::Real(3.0), Point::Real(3.0));
        let q = YPoint::new(Point::Real(2.0), Point::Real(-2.0));
        let r = fellow_travel_check(&y, &p, &q, Flavor::Max, 16).unwrap();
        assert!(r.sup < 1e-9, "sup = {}", r.sup);
        assert_eq!(r.samples_skipped, 0);
        let y = diagonal_product(10.0);
        let p = YPoint::new(Point::Real(-2.0), Point::Real(-2.0));
        let q = YPoint::new(Point::Real(4.0), Point::Real(4.0));
        let r = fellow_travel_check(&y, &p, &q, Flavor::Max, 16).unwrap();
        assert!(r.sup < 1e-9);
    }
}
