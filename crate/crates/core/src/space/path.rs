//! Arclength-parameterized polylines.

use serde::{Deserialize, Serialize};

use crate::space::Point;

/// A polyline with cumulative arclengths, the uniform representation of
/// geodesic segments, rays, and detour curves in every model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicPath {
    /// Label of the space the points live in.
    pub space: String,
    /// Ordered points; at least one.
    pub points: Vec<Point>,
    /// Cumulative arclength; starts at 0, nondecreasing, same length as `points`.
    pub cum: Vec<f64>,
}

impl GeodesicPath {
    pub fn new(space: impl Into<String>, points: Vec<Point>, cum: Vec<f64>) -> Self {
        debug_assert_eq!(points.len(), cum.len());
        GeodesicPath {
            space: space.into(),
            points,
            cum,
        }
    }

    pub fn total_length(&self) -> f64 {
        *self.cum.last().unwrap_or(&0.0)
    }

    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn end(&self) -> Point {
        *self.points.last().unwrap()
    }

    /// Index of the sample whose cumulative arclength is nearest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        match self
            .cum
            .binary_search_by(|c| c.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i >= self.cum.len() {
                    self.cum.len() - 1
                } else if (self.cum[i] - t).abs() < (t - self.cum[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        }
    }

    /// Sample point nearest to arclength `t` (no interpolation; callers on
    /// exact models sample densely enough that snapping is below tolerance).
    pub fn point_at(&self, t: f64) -> Point {
        self.points[self.nearest_index(t)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_index_snaps_both_ways() {
        let p = GeodesicPath::new(
            "s",
            vec![Point::Real(0.0), Point::Real(1.0), Point::Real(2.0)],
            vec![0.0, 1.0, 2.0],
        );
        assert_eq!(p.nearest_index(-5.0), 0);
        assert_eq!(p.nearest_index(0.4), 0);
        assert_eq!(p.nearest_index(0.6), 1);
        assert_eq!(p.nearest_index(1.0), 1);
        assert_eq!(p.nearest_index(9.0), 2);
        assert_eq!(p.total_length(), 2.0);
    }
}
