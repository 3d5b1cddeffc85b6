//! T-functions: unit-slope descent/ascent models for distance-along-geodesic.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::space::{GeodesicPath, Point, Space};
use crate::Result;

/// Piecewise-linear function on [alpha, omega] descending at slope −1 to a
/// kink at alpha + a, then ascending at slope +1.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TFunction {
    pub alpha: f64,
    pub omega: f64,
    /// Kink offset: the minimum sits at alpha + a.
    pub a: f64,
    /// Value at the kink.
    pub c: f64,
    /// Value at alpha.
    pub t1: f64,
    /// Value at omega.
    pub t2: f64,
}

impl TFunction {
    pub fn eval(&self, t: f64) -> f64 {
        self.c + (t - (self.alpha + self.a)).abs()
    }

    pub fn kink(&self) -> f64 {
        self.alpha + self.a
    }
}

/// The unique T-function through f(alpha) = t1, f(omega) = t2:
/// a = ½(L + t1 − t2), b = ½(L + t2 − t1), c = ½(t1 + t2 − L).
pub fn fit_t_function(alpha: f64, omega: f64, t1: f64, t2: f64) -> Result<TFunction> {
    let span = omega - alpha;
    if !(span >= 0.0) {
        return Err(Error::infeasible(format!(
            "interval [{alpha}, {omega}] is empty"
        )));
    }
    if (t1 - t2).abs() > span + 1e-12 {
        return Err(Error::infeasible(format!(
            "|t1 - t2| = {} exceeds the interval length {span}; no 1-Lipschitz fit",
            (t1 - t2).abs()
        )));
    }
    let a = (0.5 * (span + t1 - t2)).clamp(0.0, span);
    let c = 0.5 * (t1 + t2 - span);
    Ok(TFunction {
        alpha,
        omega,
        a,
        c,
        t1,
        t2,
    })
}

/// max |value − model(t)| over the samples.
pub fn t_deviation(samples: &[(f64, f64)], model: &TFunction) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(t, v) in samples {
        if t < model.alpha - 1e-9 || t > model.omega + 1e-9 {
            return Err(Error::domain(format!(
                "sample abscissa {t} outside [{}, {}]",
                model.alpha, model.omega
            )));
        }
        worst = worst.max((v - model.eval(t)).abs());
    }
    Ok(worst)
}

/// Result of checking d_z along a geodesic against its fitted T-function.
#[derive(Clone, Debug)]
pub struct TCheck {
    pub model: TFunction,
    pub deviation: f64,
    /// The sampled trace (t, d(z, path(t))), kept for plot export.
    pub samples: Vec<(f64, f64)>,
}

/// Fit the unique T-function through the endpoint distances and measure
/// the sup deviation of t ↦ d(z, path(t)) from it.
pub fn distance_function_t_check(space: &Space, z: &Point, path: &GeodesicPath) -> Result<TCheck> {
    let length = path.total_length();
    let d_ends = space.distance(&path.start(), &path.end())?;
    if (length - d_ends).abs() > space.identity_tol() + space.resolution() {
        return Err(Error::domain(format!(
            "path is not a geodesic: length {length} vs endpoint distance {d_ends}"
        )));
    }
    let t1 = space.distance(z, &path.start())?;
    let t2 = space.distance(z, &path.end())?;
    // Triangle inequality guarantees feasibility up to model tolerance.
    let (t1c, t2c) = clamp_endpoint_gap(t1, t2, length);
    let model = fit_t_function(0.0, length, t1c, t2c)?;
    let samples = sample_distance_along(space, z, path)?;
    let deviation = t_deviation(&samples, &model)?;
    Ok(TCheck {
        model,
        deviation,
        samples,
    })
}

fn clamp_endpoint_gap(t1: f64, t2: f64, span: f64) -> (f64, f64) {
    let gap = t1 - t2;
    if gap.abs() <= span {
        return (t1, t2);
    }
    // Rounding pushed the gap just past the span; shrink symmetrically.
    let excess = (gap.abs() - span) / 2.0;
    if gap > 0.0 {
        (t1 - excess, t2 + excess)
    } else {
        (t1 + excess, t2 - excess)
    }
}

fn sample_distance_along(space: &Space, z: &Point, path: &GeodesicPath) -> Result<Vec<(f64, f64)>> {
    let length = path.total_length();
    if space.is_graph_model() {
        // Vertex samples are exact.
        return path
            .points
            .iter()
            .zip(path.cum.iter())
            .map(|(p, &t)| Ok((t, space.distance(z, p)?)))
            .collect();
    }
    let h = space.resolution();
    let step = if h > 0.0 {
        h
    } else {
        (length / 64.0).max(1e-3)
    };
    let mut out = Vec::new();
    let mut t = 0.0;
    while t < length {
        out.push((t, space.distance(z, &space.path_eval(path, t))?));
        t += step;
    }
    out.push((length, space.distance(z, &path.end())?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{SpaceDescription, SpaceKind};
    use crate::tolerance::{EXACT_TOL, FIT_ROUND_TRIP_TOL};

    #[test]
    fn fit_worked_example() {
        let f = fit_t_function(0.0, 10.0, 7.0, 5.0).unwrap();
        assert_eq!(f.a, 6.0);
        assert_eq!(f.c, 1.0);
        assert_eq!(f.eval(6.0), 1.0);
        assert_eq!(f.eval(0.0), 7.0);
        assert_eq!(f.eval(10.0), 5.0);
    }

    #[test]
    fn fit_pure_descent_and_symmetric_v() {
        let l = 8.0;
        let f = fit_t_function(0.0, l, l, 0.0).unwrap();
        assert_eq!(f.a, l);
        assert_eq!(f.c, 0.0);
        assert_eq!(f.eval(3.0), l - 3.0);
        let f = fit_t_function(0.0, 4.0, 2.0, 2.0).unwrap();
        assert_eq!(f.a, 2.0);
        assert_eq!(f.c, 0.0);
    }

    #[test]
    fn fit_rejects_super_lipschitz_data() {
        assert!(fit_t_function(0.0, 2.0, 5.0, 0.0).is_err());
    }

    #[test]
    fn fit_round_trip_is_idempotent() {
        let f = fit_t_function(1.5, 11.25, 6.5, 3.25).unwrap();
        let g = fit_t_function(f.alpha, f.omega, f.eval(f.alpha), f.eval(f.omega)).unwrap();
        assert!((f.a - g.a).abs() < FIT_ROUND_TRIP_TOL);
        assert!((f.c - g.c).abs() < FIT_ROUND_TRIP_TOL);
    }

    #[test]
    fn deviation_of_model_and_shift() {
        let f = fit_t_function(0.0, 10.0, 7.0, 5.0).unwrap();
        let samples: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let t = i as f64 * 0.5;
                (t, f.eval(t))
            })
            .collect();
        assert_eq!(t_deviation(&samples, &f).unwrap(), 0.0);
        let shifted: Vec<(f64, f64)> = samples.iter().map(|&(t, v)| (t, v + 0.3)).collect();
        assert!((t_deviation(&shifted, &f).unwrap() - 0.3).abs() < EXACT_TOL);
        // Out-of-interval abscissa is rejected.
        assert!(t_deviation(&[(11.0, 0.0)], &f).is_err());
    }

    #[test]
    fn exact_v_on_segment() {
        let s = Space::from_description(SpaceDescription {
            label: "seg".into(),
            kind: SpaceKind::Segment {
                lo: -20.0,
                hi: 20.0,
            },
            busemann: None,
        })
        .unwrap();
        let path = s.geodesic(&Point::Real(0.0), &Point::Real(10.0)).unwrap();
        let check = distance_function_t_check(&s, &Point::Real(5.0), &path).unwrap();
        assert!(check.deviation < EXACT_TOL);
        assert_eq!(check.model.a, 5.0);
    }

    #[test]
    fn exact_on_trees() {
        let s = Space::from_description(SpaceDescription {
            label: "star".into(),
            kind: SpaceKind::FiniteGraph {
                vertices: 4,
                edges: vec![(0, 1, 2.0), (0, 2, 3.0), (0, 3, 4.0)],
            },
            busemann: None,
        })
        .unwrap();
        let path = s.geodesic(&Point::Vertex(1), &Point::Vertex(2)).unwrap();
        let check = distance_function_t_check(&s, &Point::Vertex(3), &path).unwrap();
        assert_eq!(check.deviation, 0.0);
    }
}
