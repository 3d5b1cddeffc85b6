//! Gromov products, tripod decompositions, and δ estimation.
//!
//! Two δ estimators are kept side by side and never conflated: the
//! four-point condition over quadruples (what downstream modules consume)
//! and the tilde-point spread over triangles. Estimates record their
//! sample size, seed, and whether enumeration was exhaustive.

pub mod morse;
pub mod tfunction;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::space::{Point, Space};
use crate::Result;

/// Graphs up to this many vertices get all-quadruples enumeration under
/// [`PointSelection::Auto`]; 60⁴ pairings stay comfortably desk-scale.
pub const EXHAUSTIVE_VERTEX_LIMIT: usize = 60;

/// (y·z)_x = ½ [d(y,x) + d(z,x) − d(y,z)].
pub fn gromov_product(space: &Space, y: &Point, z: &Point, basepoint: &Point) -> Result<f64> {
    let dyx = space.distance(y, basepoint)?;
    let dzx = space.distance(z, basepoint)?;
    let dyz = space.distance(y, z)?;
    Ok(0.5 * (dyx + dzx - dyz))
}

/// Tripod decomposition of a triangle: side lengths a+b, a+c, b+c and the
/// three comparison points at the prescribed arclengths.
#[derive(Clone, Debug)]
pub struct TripodData {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// On yz with d(x̃, y) = b.
    pub tilde_x: Point,
    /// On xz with d(ỹ, x) = a.
    pub tilde_y: Point,
    /// On xy with d(z̃, x) = a.
    pub tilde_z: Point,
    /// Pairwise tilde distances (x̃–ỹ, x̃–z̃, ỹ–z̃).
    pub pairwise: [f64; 3],
    /// d(v, ṽ) − (v's Gromov product) for v = x, y, z; each is ≤ 2δ in a
    /// δ-hyperbolic space.
    pub opposite_gap: [f64; 3],
}

impl TripodData {
    pub fn max_pairwise(&self) -> f64 {
        self.pairwise.iter().cloned().fold(0.0, f64::max)
    }
}

/// Comparison points via the defining distance conditions: each tilde
/// point sits on the side opposite its vertex, at arclength given by the
/// Gromov products. Coincident inputs degenerate cleanly (zero-length
/// sides, coincident tilde points).
pub fn tripod_decomposition(space: &Space, x: &Point, y: &Point, z: &Point) -> Result<TripodData> {
    let a = gromov_product(space, y, z, x)?.max(0.0);
    let b = gromov_product(space, x, z, y)?.max(0.0);
    let c = gromov_product(space, x, y, z)?.max(0.0);
    let tilde_z = space.geodesic_point(x, y, a)?;
    let tilde_y = space.geodesic_point(x, z, a)?;
    let tilde_x = space.geodesic_point(y, z, b)?;
    let pairwise = [
        space.distance(&tilde_x, &tilde_y)?,
        space.distance(&tilde_x, &tilde_z)?,
        space.distance(&tilde_y, &tilde_z)?,
    ];
    let opposite_gap = [
        space.distance(x, &tilde_x)? - a,
        space.distance(y, &tilde_y)? - b,
        space.distance(z, &tilde_z)? - c,
    ];
    Ok(TripodData {
        a,
        b,
        c,
        tilde_x,
        tilde_y,
        tilde_z,
        pairwise,
        opposite_gap,
    })
}

/// sup over t ∈ [0, (y·z)_x] of d(γ_xy(t), γ_xz(t)).
pub fn ray_comparison_sup(space: &Space, x: &Point, y: &Point, z: &Point) -> Result<f64> {
    let a = gromov_product(space, y, z, x)?.max(0.0);
    if a == 0.0 {
        return Ok(0.0);
    }
    let h = space.resolution();
    let step = if h > 0.0 { h } else { (a / 32.0).max(1e-3) };
    let mut sup = 0.0f64;
    let mut t = 0.0;
    while t <= a + 1e-12 {
        let p = space.geodesic_point(x, y, t.min(a))?;
        let q = space.geodesic_point(x, z, t.min(a))?;
        sup = sup.max(space.distance(&p, &q)?);
        t += step;
    }
    Ok(sup)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMethod {
    FourPoint,
    TildePoint,
    SlimTriangle,
    TDeviation,
}

/// A δ estimate with its provenance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub method: DeltaMethod,
    pub sample_size: usize,
    pub seed: u64,
    pub is_exhaustive: bool,
}

/// The two estimators reported side by side; downstream consumers read
/// `four_point.delta`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DeltaReport {
    pub four_point: DeltaEstimate,
    pub tilde: DeltaEstimate,
}

/// How to pick the points a δ estimate runs over.
#[derive(Clone, Copy, Debug)]
pub enum PointSelection {
    /// Every vertex of a finite graph model.
    All,
    /// Seeded sample of n points.
    Sample { n: usize, seed: u64 },
    /// All vertices when the graph is small enough, otherwise a sample.
    Auto { n: usize, seed: u64 },
}

fn select_points(space: &Space, selection: PointSelection) -> Result<(Vec<Point>, u64, bool)> {
    match selection {
        PointSelection::All => {
            if !space.is_graph_model() {
                return Err(Error::domain(
                    "exhaustive selection requires a finite graph model",
                ));
            }
            let pts = (0..space.vertex_count()).map(Point::Vertex).collect();
            Ok((pts, 0, true))
        }
        PointSelection::Sample { n, seed } => Ok((space.sample_points(n, seed)?, seed, false)),
        PointSelection::Auto { n, seed } => {
            if space.is_graph_model() && space.vertex_count() <= EXHAUSTIVE_VERTEX_LIMIT {
                select_points(space, PointSelection::All)
            } else {
                select_points(space, PointSelection::Sample { n, seed })
            }
        }
    }
}

/// Max four-point defect over all quadruples of a distance matrix:
/// (largest pairing sum − second largest) / 2.
pub fn four_point_defect_from_matrix(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = d[i][j];
            for k in (j + 1)..n {
                let dik = d[i][k];
                let djk = d[j][k];
                for l in (k + 1)..n {
                    let s1 = dij + d[k][l];
                    let s2 = dik + d[j][l];
                    let s3 = d[i][l] + djk;
                    let top = s1.max(s2).max(s3);
                    let mid = if s1 >= s2 && s1 >= s3 {
                        s2.max(s3)
                    } else if s2 >= s1 && s2 >= s3 {
                        s1.max(s3)
                    } else {
                        s1.max(s2)
                    };
                    let defect = 0.5 * (top - mid);
                    if defect > worst {
                        worst = defect;
                    }
                }
            }
        }
    }
    worst
}

/// Pairwise distance matrix over a point list.
pub fn distance_matrix(space: &Space, pts: &[Point]) -> Result<Vec<Vec<f64>>> {
    // Graph models: one Dijkstra per sampled source beats n² pair queries.
    if let Some(g) = space.graph() {
        let ids: Vec<usize> = pts.iter().map(|p| p.vertex()).collect();
        return Ok(ids
            .iter()
            .map(|&i| {
                let d = g.dijkstra(i).dist;
                ids.iter().map(|&j| d[j]).collect()
            })
            .collect());
    }
    let n = pts.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.distance(&pts[i], &pts[j])?;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    Ok(m)
}

/// Both δ estimators over the selected points: the standard four-point
/// max over quadruples, and the max pairwise tilde-point distance over
/// triangles.
pub fn four_point_delta(space: &Space, selection: PointSelection) -> Result<DeltaReport> {
    let (pts, seed, exhaustive) = select_points(space, selection)?;
    if pts.len() < 3 {
        return Err(Error::domain(format!(
            "δ estimation needs at least 3 points, got {}",
            pts.len()
        )));
    }
    let matrix = distance_matrix(space, &pts)?;
    let fp = four_point_defect_from_matrix(&matrix);

    // Tilde estimator: every triangle when exhaustive, otherwise a
    // deterministic stride keeps the tripod count desk-scale (tripods on
    // graphs cost a Dijkstra per side).
    let n = pts.len();
    let triangle_count = n * (n - 1) * (n - 2) / 6;
    let cap = if exhaustive { triangle_count } else { 600 };
    let stride = triangle_count.div_ceil(cap.max(1)).max(1);
    let mut tilde_worst = 0.0f64;
    let mut flat = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if flat % stride == 0 {
                    let t = tripod_decomposition(space, &pts[i], &pts[j], &pts[k])?;
                    tilde_worst = tilde_worst.max(t.max_pairwise());
                }
                flat += 1;
            }
        }
    }

    Ok(DeltaReport {
        four_point: DeltaEstimate {
            delta: fp,
            method: DeltaMethod::FourPoint,
            sample_size: pts.len(),
            seed,
            is_exhaustive: exhaustive,
        },
        tilde: DeltaEstimate {
            delta: tilde_worst,
            method: DeltaMethod::TildePoint,
            sample_size: pts.len(),
            seed,
            is_exhaustive: exhaustive,
        },
    })
}

/// Slimness of one triangle: max over sampled side points of the distance
/// to the union of the two other sides.
pub fn slim_triangle_delta(space: &Space, x: &Point, y: &Point, z: &Point) -> Result<f64> {
    let sides = [(x, y), (x, z), (y, z)];
    let mut sampled: Vec<Vec<Point>> = Vec::with_capacity(3);
    for (u, v) in sides {
        sampled.push(side_samples(space, u, v)?);
    }
    let mut worst = 0.0f64;
    for s in 0..3 {
        let others: Vec<&Point> = (0..3)
            .filter(|t| *t != s)
            .flat_map(|t| sampled[t].iter())
            .collect();
        for p in &sampled[s] {
            let mut best = f64::INFINITY;
            for q in &others {
                best = best.min(space.distance(p, q)?);
            }
            worst = worst.max(best);
        }
    }
    Ok(worst)
}

fn side_samples(space: &Space, u: &Point, v: &Point) -> Result<Vec<Point>> {
    if space.is_graph_model() {
        return Ok(space.geodesic(u, v)?.points);
    }
    let d = space.distance(u, v)?;
    if d == 0.0 {
        return Ok(vec![*u]);
    }
    let h = space.resolution();
    let step = if h > 0.0 { h } else { (d / 64.0).max(1e-3) };
    let n = (d / step).ceil() as usize;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = (i as f64 * step).min(d);
        out.push(space.geodesic_point(u, v, t)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{SpaceDescription, SpaceKind};
    use crate::tolerance::EXACT_TOL;

    fn segment() -> Space {
        Space::from_description(SpaceDescription {
            label: "seg".into(),
            kind: SpaceKind::Segment {
                lo: -20.0,
                hi: 20.0,
            },
            busemann: None,
        })
        .unwrap()
    }

    fn c4() -> Space {
        Space::from_description(SpaceDescription {
            label: "c4".into(),
            kind: SpaceKind::FiniteGraph {
                vertices: 4,
                edges: vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)],
            },
            busemann: None,
        })
        .unwrap()
    }

    fn star_tree() -> Space {
        // Center 0 with arms of lengths 2, 3, 4 to leaves 1, 2, 3.
        Space::from_description(SpaceDescription {
            label: "star".into(),
            kind: SpaceKind::FiniteGraph {
                vertices: 4,
                edges: vec![(0, 1, 2.0), (0, 2, 3.0), (0, 3, 4.0)],
            },
            busemann: None,
        })
        .unwrap()
    }

    #[test]
    fn gromov_product_on_the_line() {
        let s = segment();
        let x = Point::Real(0.0);
        assert_eq!(
            gromov_product(&s, &Point::Real(6.0), &Point::Real(10.0), &x).unwrap(),
            6.0
        );
        assert_eq!(
            gromov_product(&s, &Point::Real(6.0), &Point::Real(-4.0), &x).unwrap(),
            0.0
        );
    }

    #[test]
    fn gromov_product_on_star_tree() {
        // (y·z)_x = distance from x to the branch point.
        let s = star_tree();
        let v =
            gromov_product(&s, &Point::Vertex(2), &Point::Vertex(3), &Point::Vertex(1)).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn tripod_collinear_segment() {
        let s = segment();
        let t = tripod_decomposition(&s, &Point::Real(0.0), &Point::Real(10.0), &Point::Real(4.0))
            .unwrap();
        assert_eq!((t.a, t.b, t.c), (4.0, 6.0, 0.0));
        assert_eq!(t.tilde_z, Point::Real(4.0));
        for g in t.pairwise {
            assert!(g.abs() < EXACT_TOL);
        }
    }

    #[test]
    fn tripod_tree_median() {
        let s = star_tree();
        let t = tripod_decomposition(&s, &Point::Vertex(1), &Point::Vertex(2), &Point::Vertex(3))
            .unwrap();
        // All tilde points coincide at the center vertex.
        assert_eq!(t.tilde_x, Point::Vertex(0));
        assert_eq!(t.tilde_y, Point::Vertex(0));
        assert_eq!(t.tilde_z, Point::Vertex(0));
        assert_eq!(t.pairwise, [0.0, 0.0, 0.0]);
        // Sides reproduce: a+b = d(x,y) etc.
        assert_eq!(t.a + t.b, 5.0);
        assert_eq!(t.a + t.c, 6.0);
        assert_eq!(t.b + t.c, 7.0);
    }

    #[test]
    fn tripod_degenerate_coincident() {
        // x = y: the xy side has zero length, a = b = 0, c = d(x, z).
        let s = segment();
        let p = Point::Real(2.0);
        let t = tripod_decomposition(&s, &p, &p, &Point::Real(5.0)).unwrap();
        assert_eq!((t.a, t.b, t.c), (0.0, 0.0, 3.0));
        assert_eq!(t.tilde_z, p);
    }

    #[test]
    fn four_point_c4_exhaustive() {
        // Oracle: the quadruple 0,1,2,3 gives pairings 2+2 vs 1+1 vs 1+1.
        let s = c4();
        let rep = four_point_delta(&s, PointSelection::All).unwrap();
        assert_eq!(rep.four_point.delta, 1.0);
        assert!(rep.four_point.is_exhaustive);
        assert_eq!(rep.four_point.sample_size, 4);
    }

    #[test]
    fn four_point_tree_is_zero() {
        let s = star_tree();
        let rep = four_point_delta(&s, PointSelection::All).unwrap();
        assert_eq!(rep.four_point.delta, 0.0);
        assert_eq!(rep.tilde.delta, 0.0);
    }

    #[test]
    fn four_point_needs_three_points() {
        let s = segment();
        assert!(four_point_delta(&s, PointSelection::Sample { n: 2, seed: 0 }).is_err());
    }

    #[test]
    fn c4_tilde_within_four_delta() {
        let s = c4();
        let rep = four_point_delta(&s, PointSelection::All).unwrap();
        let t = tripod_decomposition(&s, &Point::Vertex(0), &Point::Vertex(2), &Point::Vertex(1))
            .unwrap();
        assert!(t.max_pairwise() <= 4.0 * rep.four_point.delta + EXACT_TOL);
    }

    #[test]
    fn slim_triangle_tree_and_c4() {
        let star = star_tree();
        let v = slim_triangle_delta(
            &star,
            &Point::Vertex(1),
            &Point::Vertex(2),
            &Point::Vertex(3),
        )
        .unwrap();
        assert_eq!(v, 0.0);
        // On C4, the triple (0,2,3) leaves vertex 1 (on the tie-broken
        // 0-1-2 side) at distance 1 from the other two sides; the triple
        // (0,1,2) is degenerate because every side runs through vertex 1.
        let c4 = c4();
        let v = slim_triangle_delta(&c4, &Point::Vertex(0), &Point::Vertex(2), &Point::Vertex(3))
            .unwrap();
        assert_eq!(v, 1.0);
        let v = slim_triangle_delta(&c4, &Point::Vertex(0), &Point::Vertex(1), &Point::Vertex(2))
            .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn ray_comparison_zero_on_trees() {
        let s = star_tree();
        let sup = ray_comparison_sup(&s, &Point::Vertex(1), &Point::Vertex(2), &Point::Vertex(3))
            .unwrap();
        assert_eq!(sup, 0.0);
    }
}
