//! Busemann fields, B-rays, and ideal-triangle comparison points.
//!
//! A field is either a closed-form rule on an exact model (the segment
//! toward ±∞, the half-plane vertical ray) or a finite-horizon evaluation
//! along an explicit base ray on a graph. Finite-horizon values carry a
//! Cauchy defect check so the truncation of the defining limit is audited
//! rather than assumed.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::space::{halfplane, GeodesicPath, Point, Space, SpaceKind};
use crate::tolerance::EXACT_TOL;
use crate::Result;

/// Closed-form Busemann rules for the exact models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// Segment, base ray toward +∞: B(x) = −x.
    LineToPlusInfinity,
    /// Segment, base ray toward −∞: B(x) = x.
    LineToMinusInfinity,
    /// Upper half-plane, vertical base ray: B(x, y) = −ln y.
    VerticalRay,
}

/// The "busemann" block of a space-spec document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BusemannSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedForm>,
    /// Explicit base ray as vertex ids (graph models).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

enum Rule {
    Closed(ClosedForm),
    Ray(GeodesicPath),
}

/// A base ray plus an evaluation rule for B.
pub struct BusemannField<'a> {
    space: &'a Space,
    rule: Rule,
    horizon: f64,
    tolerance: f64,
}

impl<'a> BusemannField<'a> {
    /// Build the field declared in the space's `busemann` block.
    pub fn from_space(space: &'a Space) -> Result<Self> {
        let spec = space.description().busemann.clone().ok_or_else(|| {
            Error::domain(format!(
                "space `{}` declares no busemann field",
                space.label()
            ))
        })?;
        Self::from_spec(space, &spec)
    }

    pub fn from_spec(space: &'a Space, spec: &BusemannSpec) -> Result<Self> {
        let tolerance = spec.tolerance.unwrap_or_else(|| {
            if space.is_graph_model() {
                space.resolution().max(EXACT_TOL)
            } else {
                1e-6
            }
        });
        if let Some(form) = spec.closed_form {
            let ok = matches!(
                (form, space.kind()),
                (
                    ClosedForm::LineToPlusInfinity | ClosedForm::LineToMinusInfinity,
                    SpaceKind::Segment { .. }
                ) | (ClosedForm::VerticalRay, SpaceKind::UpperHalfPlane { .. })
            );
            if !ok {
                return Err(Error::domain(format!(
                    "closed form {form:?} does not apply to space `{}`",
                    space.label()
                )));
            }
            let horizon = spec.horizon.unwrap_or(f64::INFINITY);
            return Ok(BusemannField {
                space,
                rule: Rule::Closed(form),
                horizon,
                tolerance,
            });
        }
        let ray_ids = spec
            .ray
            .as_ref()
            .ok_or_else(|| Error::Schema(vec!["busemann: needs closed_form or ray".into()]))?;
        if ray_ids.len() < 2 {
            return Err(Error::Schema(vec![
                "busemann.ray: needs at least two vertices".into(),
            ]));
        }
        let pts: Vec<Point> = ray_ids.iter().map(|&v| Point::Vertex(v)).collect();
        let ray = space.polyline_path(&pts)?;
        let horizon = spec.horizon.unwrap_or_else(|| 0.8 * ray.total_length());
        if horizon > ray.total_length() + EXACT_TOL {
            return Err(Error::Schema(vec![format!(
                "busemann.horizon {} exceeds base ray length {}",
                horizon,
                ray.total_length()
            )]));
        }
        Ok(BusemannField {
            space,
            rule: Rule::Ray(ray),
            horizon,
            tolerance,
        })
    }

    pub fn space(&self) -> &Space {
        self.space
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// B(x): closed form where tagged, otherwise the finite-horizon value
    /// d(x, γ(T)) − T with its Cauchy defect checked against the tolerance.
    pub fn value(&self, x: &Point) -> Result<f64> {
        match &self.rule {
            Rule::Closed(_) => self.level(x),
            Rule::Ray(_) => {
                let full = self.value_at_horizon(x, self.horizon)?;
                let half = self.value_at_horizon(x, self.horizon / 2.0)?;
                let defect = (full - half).abs();
                if defect > self.tolerance {
                    return Err(Error::HorizonTooShort {
                        defect,
                        tolerance: self.tolerance,
                    });
                }
                Ok(full)
            }
        }
    }

    /// Unaudited level function: the closed form, or the raw horizon value.
    /// Internal constructions (B-rays, product level sets) use this; on
    /// trees it agrees with the ideal Busemann function wherever the base
    /// ray dominates, including at the horizon anchor itself.
    pub fn level(&self, x: &Point) -> Result<f64> {
        match &self.rule {
            Rule::Closed(form) => {
                if !self.space.contains(x) {
                    return Err(Error::domain(format!(
                        "point {x:?} outside `{}`",
                        self.space.label()
                    )));
                }
                Ok(match form {
                    ClosedForm::LineToPlusInfinity => -x.real(),
                    ClosedForm::LineToMinusInfinity => x.real(),
                    ClosedForm::VerticalRay => -x.plane().1.ln(),
                })
            }
            Rule::Ray(_) => self.value_at_horizon(x, self.horizon),
        }
    }

    /// Finite-horizon evaluation d(x, γ(T)) − T along the base ray.
    pub fn value_at_horizon(&self, x: &Point, t: f64) -> Result<f64> {
        let at = self.base_ray_point(t)?;
        Ok(self.space.distance(x, &at)? - t)
    }

    /// Point at parameter `t` on the base ray.
    pub fn base_ray_point(&self, t: f64) -> Result<Point> {
        match &self.rule {
            Rule::Closed(ClosedForm::LineToPlusInfinity) => Ok(Point::Real(t)),
            Rule::Closed(ClosedForm::LineToMinusInfinity) => Ok(Point::Real(-t)),
            Rule::Closed(ClosedForm::VerticalRay) => Ok(Point::Plane(0.0, t.exp())),
            Rule::Ray(ray) => {
                if t > ray.total_length() + EXACT_TOL {
                    return Err(Error::TruncatedRay {
                        achieved: ray.total_length(),
                        requested: t,
                    });
                }
                Ok(self.space.path_eval(ray, t))
            }
        }
    }

    /// Unit-speed path of length `len` from `x` along which B decreases at
    /// unit rate. Closed forms are exact; graph rays are built by greedy
    /// steepest descent (lexicographic tie-break) and post-validated.
    pub fn b_ray_from(&self, x: &Point, len: f64) -> Result<GeodesicPath> {
        if !(len > 0.0) {
            return Err(Error::domain("B-ray length must be positive"));
        }
        if !self.space.contains(x) {
            return Err(Error::domain(format!(
                "point {x:?} outside `{}`",
                self.space.label()
            )));
        }
        match &self.rule {
            Rule::Closed(form) => self.closed_form_ray(*form, x, len),
            Rule::Ray(_) => self.greedy_descent_ray(x, len),
        }
    }

    fn closed_form_ray(&self, form: ClosedForm, x: &Point, len: f64) -> Result<GeodesicPath> {
        let label = self.space.label().to_string();
        match (form, self.space.kind()) {
            (ClosedForm::LineToPlusInfinity, SpaceKind::Segment { hi, .. }) => {
                let reach = hi - x.real();
                if reach + EXACT_TOL < len {
                    return Err(Error::TruncatedRay {
                        achieved: reach,
                        requested: len,
                    });
                }
                Ok(GeodesicPath::new(
                    label,
                    vec![*x, Point::Real((x.real() + len).min(*hi))],
                    vec![0.0, len],
                ))
            }
            (ClosedForm::LineToMinusInfinity, SpaceKind::Segment { lo, .. }) => {
                let reach = x.real() - lo;
                if reach + EXACT_TOL < len {
                    return Err(Error::TruncatedRay {
                        achieved: reach,
                        requested: len,
                    });
                }
                Ok(GeodesicPath::new(
                    label,
                    vec![*x, Point::Real((x.real() - len).max(*lo))],
                    vec![0.0, len],
                ))
            }
            (ClosedForm::VerticalRay, SpaceKind::UpperHalfPlane { mesh, .. }) => {
                let n = (len / mesh).ceil().max(1.0) as usize;
                let mut points = Vec::with_capacity(n + 1);
                let mut cum = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    let t = (i as f64 / n as f64) * len;
                    let p = halfplane::vertical_ray_point(x.plane(), t);
                    points.push(Point::Plane(p.0, p.1));
                    cum.push(t);
                }
                Ok(GeodesicPath::new(label, points, cum))
            }
            _ => unreachable!("closed form/space mismatch is rejected at construction"),
        }
    }

    fn greedy_descent_ray(&self, x: &Point, len: f64) -> Result<GeodesicPath> {
        let g = self
            .space
            .graph()
            .ok_or_else(|| Error::domain("greedy descent needs a graph model"))?;
        let mut points = vec![*x];
        let mut cum = vec![0.0];
        let mut current = x.vertex();
        let mut b_current = self.level(x)?;
        while *cum.last().unwrap() < len - EXACT_TOL {
            // Step to the neighbor with the smallest descent defect; ties go
            // to the smallest vertex id (sorted adjacency).
            let mut best: Option<(f64, usize, f64)> = None;
            for &(n, w) in g.neighbors(current) {
                let b_n = self.level(&Point::Vertex(n))?;
                let defect = (b_n - (b_current - w)).abs();
                if best.map_or(true, |(d, _, _)| defect < d - EXACT_TOL) {
                    best = Some((defect, n, w));
                }
            }
            let (defect, next, w) = best.ok_or_else(|| Error::TruncatedRay {
                achieved: *cum.last().unwrap(),
                requested: len,
            })?;
            if defect > self.tolerance {
                return Err(Error::TruncatedRay {
                    achieved: *cum.last().unwrap(),
                    requested: len,
                });
            }
            b_current -= w;
            current = next;
            points.push(Point::Vertex(next));
            cum.push(cum.last().unwrap() + w);
        }
        let ray = GeodesicPath::new(self.space.label().to_string(), points, cum);
        // Post-validation: a rejected ray is an error, never repaired.
        let defect = self.ray_rate_defect(&ray)?;
        if defect > self.tolerance + self.space.slack() {
            return Err(Error::infeasible(format!(
                "greedy descent from {x:?} is not a valid B-ray (rate defect {defect})"
            )));
        }
        Ok(ray)
    }

    /// max over samples of |B(path(t)) − B(path(0)) + t|.
    pub fn ray_rate_defect(&self, ray: &GeodesicPath) -> Result<f64> {
        let b0 = self.level(&ray.start())?;
        let mut worst = 0.0f64;
        let step = sample_step(self.space, ray.total_length());
        let mut t = 0.0;
        while t <= ray.total_length() + EXACT_TOL {
            let p = self.space.path_eval(ray, t);
            let b = self.level(&p)?;
            worst = worst.max((b - (b0 - t.min(ray.total_length()))).abs());
            t += step;
        }
        Ok(worst)
    }

    /// max over sampled pairs of |B(x)−B(y)| − d(x,y) (positive = violation).
    pub fn lipschitz_defect(&self, n: usize, seed: u64) -> Result<f64> {
        let pts = self.space.sample_points(n, seed)?;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let lhs = (self.level(&pts[i])? - self.level(&pts[j])?).abs();
                let d = self.space.distance(&pts[i], &pts[j])?;
                worst = worst.max(lhs - d);
            }
        }
        Ok(worst)
    }

    /// Cauchy audit over a sample: (stable count, total, max defect among
    /// stable points). Closed forms are always stable.
    pub fn audit_sample(&self, n: usize, seed: u64) -> Result<(usize, usize, f64)> {
        let pts = self.space.sample_points(n, seed)?;
        let mut stable = 0usize;
        let mut worst = 0.0f64;
        for p in &pts {
            match &self.rule {
                Rule::Closed(_) => {
                    stable += 1;
                }
                Rule::Ray(_) => {
                    let full = self.value_at_horizon(p, self.horizon)?;
                    let half = self.value_at_horizon(p, self.horizon / 2.0)?;
                    let defect = (full - half).abs();
                    if defect <= self.tolerance {
                        stable += 1;
                        worst = worst.max(defect);
                    }
                }
            }
        }
        Ok((stable, pts.len(), worst))
    }
}

/// (a, b) with a = ½(d(x,y) + B(x) − B(y)) and b its mirror; a + b = d(x,y).
///
/// Evaluates through the total level function, so it stays defined on ray
/// fields even where the per-point Cauchy audit would flag instability.
pub fn busemann_gromov_product(field: &BusemannField, x: &Point, y: &Point) -> Result<(f64, f64)> {
    let d = field.space().distance(x, y)?;
    let bx = field.level(x)?;
    let by = field.level(y)?;
    Ok((0.5 * (d + bx - by), 0.5 * (d + by - bx)))
}

/// Comparison points of the ideal triangle over x, y and the field's
/// boundary point, with the fellow-traveling sup sampled up to `span`.
#[derive(Clone, Debug)]
pub struct IdealTriangleData {
    pub a: f64,
    pub b: f64,
    /// On the xy-geodesic at distance a from x.
    pub tilde_u: Point,
    /// On the B-ray from x at parameter a.
    pub tilde_y: Point,
    /// On the B-ray from y at parameter b.
    pub tilde_x: Point,
    /// Pairwise distances (ũ–ỹ, ũ–x̃, ỹ–x̃).
    pub pairwise: [f64; 3],
    /// sup over sampled t ∈ [0, span] of d(γ_x(a+t), γ_y(b+t)).
    pub fellow_travel_sup: f64,
    pub span: f64,
}

pub fn ideal_triangle_points(
    field: &BusemannField,
    x: &Point,
    y: &Point,
    span: f64,
) -> Result<IdealTriangleData> {
    let space = field.space();
    let (a, b) = busemann_gromov_product(field, x, y)?;
    let a = a.max(0.0);
    let b = b.max(0.0);
    let ray_x = field.b_ray_from(x, (a + span).max(EXACT_TOL))?;
    let ray_y = field.b_ray_from(y, (b + span).max(EXACT_TOL))?;
    let tilde_u = space.geodesic_point(x, y, a)?;
    let tilde_y = space.path_eval(&ray_x, a);
    let tilde_x = space.path_eval(&ray_y, b);
    let pairwise = [
        space.distance(&tilde_u, &tilde_y)?,
        space.distance(&tilde_u, &tilde_x)?,
        space.distance(&tilde_y, &tilde_x)?,
    ];
    let step = sample_step(space, span);
    let mut sup = 0.0f64;
    let mut t = 0.0;
    while t <= span + EXACT_TOL {
        let px = space.path_eval(&ray_x, a + t);
        let py = space.path_eval(&ray_y, b + t);
        sup = sup.max(space.distance(&px, &py)?);
        t += step;
    }
    Ok(IdealTriangleData {
        a,
        b,
        tilde_u,
        tilde_y,
        tilde_x,
        pairwise,
        fellow_travel_sup: sup,
        span,
    })
}

/// Result of comparing a near-geodesic σ against the true geodesic.
#[derive(Clone, Debug)]
pub struct SigmaComparison {
    /// sup over common abscissae of d(γ_xy(t), σ(t)).
    pub sup: f64,
    /// (3/2)R + 4δ + slack, the asserted ceiling.
    pub bound: f64,
    pub holds: bool,
}

/// Compare a unit-speed curve σ from x (ending within R of y) against the
/// geodesic γ_xy at common abscissae.
pub fn sigma_comparison(
    space: &Space,
    x: &Point,
    y: &Point,
    sigma: &GeodesicPath,
    r: f64,
    delta_est: f64,
) -> Result<SigmaComparison> {
    let d = space.distance(x, y)?;
    let tol = space.identity_tol();
    if space.distance(&sigma.start(), x)? > tol {
        return Err(Error::domain("sigma must start at x"));
    }
    if (sigma.total_length() - d).abs() > tol + space.resolution() {
        return Err(Error::domain(format!(
            "sigma must be parameterized on [0, d(x,y)] (length {} vs d {})",
            sigma.total_length(),
            d
        )));
    }
    // Arclength parameterization check: cum increments match leg distances.
    for (w, c) in sigma.points.windows(2).zip(sigma.cum.windows(2)) {
        let leg = space.distance(&w[0], &w[1])?;
        if (leg - (c[1] - c[0])).abs() > tol {
            return Err(Error::domain(
                "sigma is not arclength-parameterized within tolerance",
            ));
        }
    }
    let end_gap = space.distance(&sigma.end(), y)?;
    if end_gap > r + tol {
        return Err(Error::domain(format!(
            "sigma ends {end_gap} from y, beyond R = {r}"
        )));
    }
    let step = sample_step(space, d);
    let mut sup = 0.0f64;
    let mut t = 0.0;
    while t <= d + EXACT_TOL {
        let gamma_t = space.geodesic_point(x, y, t.min(d))?;
        let sigma_t = space.path_eval(sigma, t);
        sup = sup.max(space.distance(&gamma_t, &sigma_t)?);
        t += step;
    }
    let bound = 1.5 * r + 4.0 * delta_est + space.slack();
    Ok(SigmaComparison {
        sup,
        bound,
        holds: sup <= bound,
    })
}

fn sample_step(space: &Space, span: f64) -> f64 {
    let h = space.resolution();
    if h > 0.0 {
        h
    } else {
        (span / 64.0).max(1e-3)
    }
}
