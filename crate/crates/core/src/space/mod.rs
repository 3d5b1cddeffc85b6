//! The supported desk-scale model spaces behind one metric interface.
//!
//! Four kinds are shipped: finite weighted graphs, finite regular trees
//! (realized as graphs), truncated real segments, and the hyperbolic
//! upper half-plane. Segments and the half-plane are *exact* models
//! (closed-form distances and geodesics); graphs carry a resolution `h`
//! (their largest edge weight or mesh) that drives tolerance budgets.

pub mod graph;
pub mod halfplane;
mod path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::busemann::BusemannSpec;
use crate::error::Error;
use crate::tolerance;
use crate::Result;

pub use graph::Graph;
pub use path::GeodesicPath;

/// A position in one of the model spaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    /// Graph or tree vertex id.
    #[serde(rename = "v")]
    Vertex(usize),
    /// Coordinate on a segment.
    #[serde(rename = "x")]
    Real(f64),
    /// Upper half-plane coordinates (x, y), y > 0.
    #[serde(rename = "xy")]
    Plane(f64, f64),
}

impl Point {
    pub fn plane(self) -> (f64, f64) {
        match self {
            Point::Plane(x, y) => (x, y),
            _ => panic!("not a half-plane point"),
        }
    }

    pub fn real(self) -> f64 {
        match self {
            Point::Real(x) => x,
            _ => panic!("not a segment point"),
        }
    }

    pub fn vertex(self) -> usize {
        match self {
            Point::Vertex(v) => v,
            _ => panic!("not a vertex point"),
        }
    }
}

/// A point tagged with the label of the space it belongs to; the form
/// used in config files and reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRef {
    pub space: String,
    pub point: Point,
}

/// Declarative description of a model space (the space-spec document).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    FiniteGraph {
        vertices: usize,
        /// Undirected weighted edges (u, v, w), w > 0.
        edges: Vec<(usize, usize, f64)>,
    },
    RegularTree {
        /// Degree of every internal vertex (the root has `branching`
        /// children, every other internal vertex has `branching - 1`).
        branching: usize,
        edge_length: f64,
        depth: usize,
    },
    Segment {
        lo: f64,
        hi: f64,
    },
    UpperHalfPlane {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        /// Arclength step for geodesic polylines and grid pitch for sampling.
        mesh: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceDescription {
    pub label: String,
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub busemann: Option<BusemannSpec>,
}

/// A validated space, with graph kinds realized.
#[derive(Clone, Debug)]
pub struct Space {
    desc: SpaceDescription,
    graph: Option<Graph>,
}

impl Space {
    pub fn from_description(desc: SpaceDescription) -> Result<Self> {
        let mut errors = Vec::new();
        let graph = match &desc.kind {
            SpaceKind::FiniteGraph { vertices, edges } => {
                if *vertices == 0 {
                    errors.push("vertices: must be at least 1".into());
                }
                match Graph::new(*vertices, edges) {
                    Ok(g) => {
                        if !g.is_connected() {
                            errors.push("edges: graph is not connected".into());
                        }
                        Some(g)
                    }
                    Err(e) => {
                        errors.push(format!("edges: {e}"));
                        None
                    }
                }
            }
            SpaceKind::RegularTree {
                branching,
                edge_length,
                depth,
            } => {
                if *branching < 1 {
                    errors.push("branching: must be at least 1".into());
                }
                if !(*edge_length > 0.0) {
                    errors.push("edge_length: must be positive".into());
                }
                if errors.is_empty() {
                    Some(build_regular_tree(*branching, *edge_length, *depth))
                } else {
                    None
                }
            }
            SpaceKind::Segment { lo, hi } => {
                if !(lo < hi) {
                    errors.push(format!(
                        "segment endpoints must satisfy lo < hi (got {lo}, {hi})"
                    ));
                }
                None
            }
            SpaceKind::UpperHalfPlane {
                x_min,
                x_max,
                y_min,
                y_max,
                mesh,
            } => {
                if !(mesh > &0.0) {
                    errors.push("mesh: must be positive".into());
                }
                if !(x_min < x_max) || !(y_min < y_max) {
                    errors.push("sampling box must have positive area".into());
                }
                if !(y_min > &0.0) {
                    errors.push("y_min: lower boundary must be positive".into());
                }
                None
            }
        };
        if !errors.is_empty() {
            return Err(Error::Schema(errors));
        }
        Ok(Space { desc, graph })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let desc: SpaceDescription = serde_json::from_str(text)?;
        Space::from_description(desc)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Space::from_json(&text)
    }

    pub fn label(&self) -> &str {
        &self.desc.label
    }

    pub fn description(&self) -> &SpaceDescription {
        &self.desc
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.desc.kind
    }

    pub fn graph(&self) -> Option<&Graph> {
        self.graph.as_ref()
    }

    pub fn is_graph_model(&self) -> bool {
        self.graph.is_some()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.as_ref().map_or(0, |g| g.vertex_count())
    }

    /// Discretization granularity: 0 for exact models, max edge weight for
    /// graphs, the mesh for the half-plane (its polylines are sampled at h).
    pub fn resolution(&self) -> f64 {
        match (&self.desc.kind, &self.graph) {
            (SpaceKind::Segment { .. }, _) => 0.0,
            (SpaceKind::UpperHalfPlane { mesh, .. }, _) => *mesh,
            (_, Some(g)) => g.max_edge_weight(),
            _ => 0.0,
        }
    }

    /// Additive slack for inequality bounds evaluated on this space.
    pub fn slack(&self) -> f64 {
        tolerance::slack_for_resolution(self.resolution())
    }

    /// Identity tolerance (exact arithmetic vs graph granularity).
    pub fn identity_tol(&self) -> f64 {
        if self.is_graph_model() {
            self.resolution().max(tolerance::EXACT_TOL)
        } else {
            tolerance::EXACT_TOL
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (&self.desc.kind, p) {
            (SpaceKind::FiniteGraph { .. } | SpaceKind::RegularTree { .. }, Point::Vertex(v)) => {
                *v < self.vertex_count()
            }
            (SpaceKind::Segment { lo, hi }, Point::Real(x)) => {
                // Hairline tolerance absorbs rounding from ray arithmetic.
                *x >= *lo - 1e-9 && *x <= *hi + 1e-9
            }
            // The half-plane model is the whole upper half-plane; the box
            // only bounds sampling.
            (SpaceKind::UpperHalfPlane { .. }, Point::Plane(_, y)) => *y > 0.0,
            _ => false,
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "point {p:?} does not belong to space `{}`",
                self.desc.label
            )))
        }
    }

    /// The ambient metric d.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        match &self.desc.kind {
            SpaceKind::Segment { .. } => Ok((x.real() - y.real()).abs()),
            SpaceKind::UpperHalfPlane { .. } => Ok(halfplane::distance(x.plane(), y.plane())),
            _ => {
                let g = self.graph.as_ref().unwrap();
                let d = g.dijkstra(x.vertex()).dist[y.vertex()];
                if d.is_infinite() {
                    Err(Error::NoPath {
                        space: self.desc.label.clone(),
                        from: format!("{x:?}"),
                        to: format!("{y:?}"),
                    })
                } else {
                    Ok(d)
                }
            }
        }
    }

    /// Exact point at arclength `t` on the canonical geodesic from x to y.
    ///
    /// `t` outside [0, d(x,y)] is clamped for graphs and extended for exact
    /// models (the segment/half-plane geodesic continues past y).
    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(y)?;
        match &self.desc.kind {
            SpaceKind::Segment { lo, hi } => {
                // The model truncates: extension clamps at the endpoints.
                let (a, b) = (x.real(), y.real());
                let dir = if b >= a { 1.0 } else { -1.0 };
                Ok(Point::Real((a + dir * t).clamp(*lo, *hi)))
            }
            SpaceKind::UpperHalfPlane { .. } => {
                if x == y {
                    return Ok(*x);
                }
                Ok(Point::Plane(
                    halfplane::geodesic_point(x.plane(), y.plane(), t).0,
                    halfplane::geodesic_point(x.plane(), y.plane(), t).1,
                ))
            }
            _ => {
                let path = self.geodesic(x, y)?;
                Ok(path.point_at(t))
            }
        }
    }

    /// Geodesic from x to y as an arclength-parameterized polyline.
    ///
    /// Deterministic: graphs use the lexicographic predecessor tie-break,
    /// the half-plane samples the exact arc at step `mesh`.
    pub fn geodesic(&self, x: &Point, y: &Point) -> Result<GeodesicPath> {
        self.check_point(x)?;
        self.check_point(y)?;
        let label = self.desc.label.clone();
        match &self.desc.kind {
            SpaceKind::Segment { .. } => {
                let d = (x.real() - y.real()).abs();
                if d == 0.0 {
                    return Ok(GeodesicPath::new(label, vec![*x], vec![0.0]));
                }
                Ok(GeodesicPath::new(label, vec![*x, *y], vec![0.0, d]))
            }
            SpaceKind::UpperHalfPlane { mesh, .. } => {
                let d = halfplane::distance(x.plane(), y.plane());
                if d == 0.0 {
                    return Ok(GeodesicPath::new(label, vec![*x], vec![0.0]));
                }
                let n = (d / mesh).ceil() as usize;
                let mut points = Vec::with_capacity(n + 1);
                let mut cum = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    let t = (i as f64 * mesh).min(d);
                    let p = halfplane::geodesic_point(x.plane(), y.plane(), t);
                    points.push(Point::Plane(p.0, p.1));
                    cum.push(t);
                }
                // Snap the final sample onto y exactly.
                *points.last_mut().unwrap() = *y;
                *cum.last_mut().unwrap() = d;
                Ok(GeodesicPath::new(label, points, cum))
            }
            _ => {
                let g = self.graph.as_ref().unwrap();
                let sp = g.dijkstra(x.vertex());
                let vpath = sp.path_to(y.vertex()).map_err(|_| Error::NoPath {
                    space: self.desc.label.clone(),
                    from: format!("{x:?}"),
                    to: format!("{y:?}"),
                })?;
                let mut cum = vec![0.0];
                for w in vpath.windows(2) {
                    let step = g
                        .neighbors(w[0])
                        .iter()
                        .find(|(v, _)| *v == w[1])
                        .map(|(_, wt)| *wt)
                        .unwrap();
                    cum.push(cum.last().unwrap() + step);
                }
                let points = vpath.into_iter().map(Point::Vertex).collect();
                Ok(GeodesicPath::new(label, points, cum))
            }
        }
    }

    /// Evaluate a polyline at arclength `t`: exact re-parameterization on
    /// exact models, nearest-sample snapping on graphs.
    pub fn path_eval(&self, path: &GeodesicPath, t: f64) -> Point {
        let t = t.clamp(0.0, path.total_length());
        match &self.desc.kind {
            SpaceKind::Segment { .. } | SpaceKind::UpperHalfPlane { .. } => {
                // Locate the leg containing t and evaluate along it.
                let i = match path
                    .cum
                    .binary_search_by(|c| c.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
                {
                    Ok(i) => return path.points[i],
                    Err(i) => i,
                };
                if i == 0 {
                    return path.points[0];
                }
                if i >= path.points.len() {
                    return *path.points.last().unwrap();
                }
                let (a, b) = (path.points[i - 1], path.points[i]);
                let local = t - path.cum[i - 1];
                match &self.desc.kind {
                    SpaceKind::Segment { .. } => {
                        let dir = if b.real() >= a.real() { 1.0 } else { -1.0 };
                        Point::Real(a.real() + dir * local)
                    }
                    _ => {
                        if a == b {
                            a
                        } else {
                            let p = halfplane::geodesic_point(a.plane(), b.plane(), local);
                            Point::Plane(p.0, p.1)
                        }
                    }
                }
            }
            _ => path.point_at(t),
        }
    }

    /// Deterministic seeded sample: uniform over vertices (all of them,
    /// in shuffled order, when n ≥ vertex count), uniform over the segment,
    /// uniform over the half-plane box in (x, ln y).
    pub fn sample_points(&self, n: usize, seed: u64) -> Result<Vec<Point>> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match &self.desc.kind {
            SpaceKind::Segment { lo, hi } => Ok((0..n)
                .map(|_| Point::Real(rng.random_range(*lo..*hi)))
                .collect()),
            SpaceKind::UpperHalfPlane {
                x_min,
                x_max,
                y_min,
                y_max,
                ..
            } => {
                let (lv_min, lv_max) = (y_min.ln(), y_max.ln());
                Ok((0..n)
                    .map(|_| {
                        let x = rng.random_range(*x_min..*x_max);
                        let y = rng.random_range(lv_min..lv_max).exp();
                        Point::Plane(x, y)
                    })
                    .collect())
            }
            _ => {
                let count = self.vertex_count();
                let mut ids: Vec<usize> = (0..count).collect();
                ids.shuffle(&mut rng);
                if n <= count {
                    ids.truncate(n);
                } else {
                    for _ in count..n {
                        ids.push(rng.random_range(0..count));
                    }
                }
                Ok(ids.into_iter().map(Point::Vertex).collect())
            }
        }
    }

    /// Length of an arbitrary polyline: sum of consecutive distances.
    pub fn path_length(&self, polyline: &[Point]) -> Result<f64> {
        if polyline.is_empty() {
            return Err(Error::domain("path_length of an empty polyline"));
        }
        let mut total = 0.0;
        for w in polyline.windows(2) {
            total += self.distance(&w[0], &w[1])?;
        }
        Ok(total)
    }

    /// Wrap a polyline into an arclength-parameterized path.
    pub fn polyline_path(&self, polyline: &[Point]) -> Result<GeodesicPath> {
        if polyline.is_empty() {
            return Err(Error::domain("empty polyline"));
        }
        let mut cum = vec![0.0];
        for w in polyline.windows(2) {
            cum.push(cum.last().unwrap() + self.distance(&w[0], &w[1])?);
        }
        Ok(GeodesicPath::new(
            self.desc.label.clone(),
            polyline.to_vec(),
            cum,
        ))
    }
}

/// Discretize an upper half-plane box as a finite graph: king-move grid in
/// (x, ln y) at the box's mesh, edges weighted by the exact hyperbolic
/// distance. Vertices are numbered row-major from the bottom row.
pub fn half_plane_grid_graph(space: &Space, label: &str) -> Result<Space> {
    let SpaceKind::UpperHalfPlane {
        x_min,
        x_max,
        y_min,
        y_max,
        mesh,
    } = *space.kind()
    else {
        return Err(Error::domain(
            "half_plane_grid_graph needs an upper-half-plane space",
        ));
    };
    let nx = ((x_max - x_min) / mesh).round() as usize + 1;
    let v_min = y_min.ln();
    let nv = ((y_max.ln() - v_min) / mesh).round() as usize + 1;
    let coord = |ix: usize, iv: usize| (x_min + ix as f64 * mesh, (v_min + iv as f64 * mesh).exp());
    let mut edges = Vec::new();
    for iv in 0..nv {
        for ix in 0..nx {
            let a = iv * nx + ix;
            for (dx, dv) in [(1i64, 0i64), (0, 1), (1, 1), (-1, 1)] {
                let jx = ix as i64 + dx;
                let jv = iv as i64 + dv;
                if jx < 0 || jv < 0 || jx >= nx as i64 || jv >= nv as i64 {
                    continue;
                }
                let b = jv as usize * nx + jx as usize;
                let w = halfplane::distance(coord(ix, iv), coord(jx as usize, jv as usize));
                edges.push((a, b, w));
            }
        }
    }
    Space::from_description(SpaceDescription {
        label: label.into(),
        kind: SpaceKind::FiniteGraph {
            vertices: nx * nv,
            edges,
        },
        busemann: None,
    })
}

/// Regular tree: the root has `branching` children, every other internal
/// vertex has `branching - 1` children, all edges weigh `edge_length`,
/// leaves sit at graph depth `depth`. Vertices are numbered breadth-first.
fn build_regular_tree(branching: usize, edge_length: f64, depth: usize) -> Graph {
    let mut edges = Vec::new();
    let mut next_id = 1usize;
    let mut frontier = vec![0usize];
    for level in 0..depth {
        let mut next_frontier = Vec::new();
        for &v in &frontier {
            let kids = if level == 0 {
                branching
            } else {
                branching.saturating_sub(1)
            };
            for _ in 0..kids {
                edges.push((v, next_id, edge_length));
                next_frontier.push(next_id);
                next_id += 1;
            }
        }
        frontier = next_frontier;
    }
    Graph::new(next_id.max(1), &edges).expect("regular tree edges are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::EXACT_TOL;

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

    fn segment(lo: f64, hi: f64) -> Space {
        Space::from_description(SpaceDescription {
            label: "seg".into(),
            kind: SpaceKind::Segment { lo, hi },
            busemann: None,
        })
        .unwrap()
    }

    fn half_plane() -> Space {
        Space::from_description(SpaceDescription {
            label: "h2".into(),
            kind: SpaceKind::UpperHalfPlane {
                x_min: -5.0,
                x_max: 5.0,
                y_min: (-2.0f64).exp(),
                y_max: (2.0f64).exp(),
                mesh: 0.1,
            },
            busemann: None,
        })
        .unwrap()
    }

    #[test]
    fn segment_distance() {
        let s = segment(-10.0, 10.0);
        assert_eq!(
            s.distance(&Point::Real(0.0), &Point::Real(6.0)).unwrap(),
            6.0
        );
    }

    #[test]
    fn half_plane_vertical_distance() {
        let s = half_plane();
        let d = s
            .distance(
                &Point::Plane(0.0, 1.0),
                &Point::Plane(0.0, std::f64::consts::E),
            )
            .unwrap();
        assert!((d - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn c4_distance_matches_brute_force() {
        // Oracle: Floyd-Warshall on the 4-cycle.
        let s = c4();
        let inf = f64::INFINITY;
        let mut m = [[inf; 4]; 4];
        for i in 0..4 {
            m[i][i] = 0.0;
        }
        for (u, v) in [(0usize, 1usize), (1, 2), (2, 3), (3, 0)] {
            m[u][v] = 1.0;
            m[v][u] = 1.0;
        }
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    if m[i][k] + m[k][j] < m[i][j] {
                        m[i][j] = m[i][k] + m[k][j];
                    }
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let d = s.distance(&Point::Vertex(i), &Point::Vertex(j)).unwrap();
                assert_eq!(d, m[i][j], "({i},{j})");
            }
        }
        assert_eq!(
            s.distance(&Point::Vertex(0), &Point::Vertex(2)).unwrap(),
            2.0
        );
    }

    #[test]
    fn segment_geodesic_is_two_point_polyline() {
        let s = segment(-10.0, 10.0);
        let g = s.geodesic(&Point::Real(0.0), &Point::Real(4.0)).unwrap();
        assert_eq!(g.points, vec![Point::Real(0.0), Point::Real(4.0)]);
        assert_eq!(g.total_length(), 4.0);
    }

    #[test]
    fn star_tree_geodesic_through_center() {
        // Arms of lengths 2 and 3 from a center vertex; leaf-to-leaf is 5.
        let s = Space::from_description(SpaceDescription {
            label: "star".into(),
            kind: SpaceKind::FiniteGraph {
                vertices: 3,
                edges: vec![(0, 1, 2.0), (0, 2, 3.0)],
            },
            busemann: None,
        })
        .unwrap();
        let g = s.geodesic(&Point::Vertex(1), &Point::Vertex(2)).unwrap();
        assert_eq!(
            g.points,
            vec![Point::Vertex(1), Point::Vertex(0), Point::Vertex(2)]
        );
        assert_eq!(g.total_length(), 5.0);
    }

    #[test]
    fn c4_geodesic_tie_break() {
        let s = c4();
        let g = s.geodesic(&Point::Vertex(0), &Point::Vertex(2)).unwrap();
        assert_eq!(
            g.points,
            vec![Point::Vertex(0), Point::Vertex(1), Point::Vertex(2)]
        );
    }

    #[test]
    fn half_plane_geodesic_length_matches_distance() {
        let s = half_plane();
        let x = Point::Plane(-2.0, 0.5);
        let y = Point::Plane(3.0, 1.5);
        let g = s.geodesic(&x, &y).unwrap();
        let d = s.distance(&x, &y).unwrap();
        assert!((g.total_length() - d).abs() < EXACT_TOL);
        // Polyline length is within mesh of the true distance.
        let pl = s.path_length(&g.points).unwrap();
        assert!(pl <= d + EXACT_TOL);
        assert!(pl >= d - 0.1);
        // Exact evaluation between samples stays on the arc.
        let mid = s.path_eval(&g, d / 2.0);
        assert!((s.distance(&x, &mid).unwrap() - d / 2.0).abs() < 1e-6);
    }

    #[test]
    fn sample_points_exhausts_small_graphs() {
        let s = c4();
        let mut pts = s
            .sample_points(4, 0)
            .unwrap()
            .iter()
            .map(|p| p.vertex())
            .collect::<Vec<_>>();
        pts.sort_unstable();
        assert_eq!(pts, vec![0, 1, 2, 3]);
    }

    #[test]
    fn sample_points_deterministic_and_in_domain() {
        let s = segment(-5.0, 5.0);
        let a = s.sample_points(3, 7).unwrap();
        let b = s.sample_points(3, 7).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(s.contains(p));
        }
        let h = half_plane();
        let pts = h.sample_points(100, 1).unwrap();
        assert_eq!(pts.len(), 100);
        for p in &pts {
            let (_, y) = p.plane();
            assert!(y > 0.0);
        }
    }

    #[test]
    fn path_length_sums_legs() {
        let s = segment(-10.0, 10.0);
        let l = s
            .path_length(&[Point::Real(0.0), Point::Real(3.0), Point::Real(1.0)])
            .unwrap();
        assert_eq!(l, 5.0);
        assert!(s.path_length(&[]).is_err());
    }

    #[test]
    fn square_detour_in_half_plane() {
        // Oracle: closed-form acosh evaluation per leg.
        let s = half_plane();
        let legs = [
            Point::Plane(0.0, 1.0),
            Point::Plane(1.0, 1.0),
            Point::Plane(1.0, 2.0),
            Point::Plane(0.0, 2.0),
        ];
        let expect = halfplane::distance((0.0, 1.0), (1.0, 1.0))
            + halfplane::distance((1.0, 1.0), (1.0, 2.0))
            + halfplane::distance((1.0, 2.0), (0.0, 2.0));
        let got = s.path_length(&legs).unwrap();
        assert!((got - expect).abs() < EXACT_TOL);
    }

    #[test]
    fn regular_tree_counts() {
        let s = Space::from_description(SpaceDescription {
            label: "t3".into(),
            kind: SpaceKind::RegularTree {
                branching: 3,
                edge_length: 1.0,
                depth: 3,
            },
            busemann: None,
        })
        .unwrap();
        // 1 + 3 + 6 + 12
        assert_eq!(s.vertex_count(), 22);
    }

    #[test]
    fn invalid_descriptions_rejected() {
        assert!(Space::from_description(SpaceDescription {
            label: "bad".into(),
            kind: SpaceKind::Segment { lo: 3.0, hi: -3.0 },
            busemann: None,
        })
        .is_err());
        assert!(Space::from_description(SpaceDescription {
            label: "bad".into(),
            kind: SpaceKind::FiniteGraph {
                vertices: 3,
                edges: vec![(0, 1, 1.0)],
            },
            busemann: None,
        })
        .is_err());
    }

    #[test]
    fn points_outside_domain_error() {
        let s = segment(-1.0, 1.0);
        assert!(s.distance(&Point::Real(0.0), &Point::Real(5.0)).is_err());
        let h = half_plane();
        assert!(h
            .distance(&Point::Plane(0.0, -1.0), &Point::Plane(0.0, 1.0))
            .is_err());
    }
}
