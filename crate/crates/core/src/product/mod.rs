//! The hyperbolic product: the level set Y = {level₁(x₁) = level₂(x₂)}
//! inside X₁ × X₂, discretized as a metric graph.
//!
//! Levels come from Busemann fields (Busemann mode) or distance to chosen
//! basepoints (Basepoint mode). Nodes are pairs of factor grid points with
//! matching levels (within ε); edges connect product-adjacent pairs (each
//! factor stays or moves one grid step) and carry both max-metric and
//! Euclidean-metric weights, so the same discretization answers inner
//! distance queries under either flavor.

pub mod gamma;
pub mod verify;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::busemann::{BusemannField, ClosedForm};
use crate::error::Error;
use crate::space::{GeodesicPath, Point, Space, SpaceKind};
use crate::tolerance::EXACT_TOL;
use crate::Result;

/// A point of the ambient product X₁ × X₂.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YPoint {
    pub p1: Point,
    pub p2: Point,
}

impl YPoint {
    pub fn new(p1: Point, p2: Point) -> Self {
        YPoint { p1, p2 }
    }

    pub fn factor(&self, i: usize) -> Point {
        match i {
            0 => self.p1,
            1 => self.p2,
            _ => panic!("factor index out of range"),
        }
    }
}

/// How the common level function is defined.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mode {
    /// level_i = d_i(·, z_i).
    Basepoint { z1: Point, z2: Point },
    /// level_i = B_i from each factor's busemann block.
    Busemann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Max,
    Euclidean,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductSpec {
    pub label: String,
    pub mode: Mode,
    pub flavor: Flavor,
    /// Level tolerance; nodes satisfy |level₁ − level₂| ≤ ε.
    pub epsilon: f64,
    /// Grid pitch for discretizing exact factors (graphs use their vertices).
    pub mesh: f64,
}

/// Discretization of one factor: points, their levels, grid adjacency.
#[derive(Clone, Debug)]
pub struct FactorGrid {
    pub points: Vec<Point>,
    pub levels: Vec<f64>,
    adj: Vec<Vec<u32>>,
    layout: GridLayout,
}

#[derive(Clone, Debug)]
enum GridLayout {
    Segment {
        lo: f64,
        pitch: f64,
        count: usize,
    },
    HalfPlane {
        x_min: f64,
        v_min: f64,
        pitch: f64,
        nx: usize,
        nv: usize,
    },
    Graph,
}

impl FactorGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest grid index for a factor point, None when outside the grid box.
    pub fn nearest(&self, p: &Point) -> Option<usize> {
        match (&self.layout, p) {
            (GridLayout::Segment { lo, pitch, count }, Point::Real(x)) => {
                let i = ((x - lo) / pitch).round();
                if i < -0.5 || i > (*count as f64 - 0.5) {
                    None
                } else {
                    Some((i.max(0.0) as usize).min(count - 1))
                }
            }
            (
                GridLayout::HalfPlane {
                    x_min,
                    v_min,
                    pitch,
                    nx,
                    nv,
                },
                Point::Plane(x, y),
            ) => {
                let ix = ((x - x_min) / pitch).round();
                let iv = ((y.ln() - v_min) / pitch).round();
                if ix < -0.5 || ix > (*nx as f64 - 0.5) || iv < -0.5 || iv > (*nv as f64 - 0.5) {
                    return None;
                }
                let ix = (ix.max(0.0) as usize).min(nx - 1);
                let iv = (iv.max(0.0) as usize).min(nv - 1);
                Some(iv * nx + ix)
            }
            (GridLayout::Graph, Point::Vertex(v)) => {
                if *v < self.points.len() {
                    Some(*v)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// Index of a node in the discretized level set.
pub type NodeId = usize;

/// Output of a single-source shortest-path run on the product graph.
pub struct ProductPaths {
    pub dist: Vec<f64>,
    pub pred: Vec<u32>,
    source: NodeId,
}

impl ProductPaths {
    pub fn path_to(&self, target: NodeId) -> Result<Vec<NodeId>> {
        if self.dist[target].is_infinite() {
            return Err(Error::NoPath {
                space: "product".into(),
                from: self.source.to_string(),
                to: target.to_string(),
            });
        }
        let mut out = vec![target];
        let mut v = target;
        while v != self.source {
            v = self.pred[v] as usize;
            out.push(v);
        }
        out.reverse();
        Ok(out)
    }
}

/// The discretized level set with its inner metric graph.
pub struct ProductSpace {
    pub spec: ProductSpec,
    pub factors: [Space; 2],
    pub grids: [FactorGrid; 2],
    /// Node (i, j): factor-grid indices, sorted lexicographically.
    pub nodes: Vec<(u32, u32)>,
    /// Nodes discarded because they fell outside the main component.
    pub dropped_nodes: usize,
    node_of: std::collections::HashMap<(u32, u32), u32>,
    // CSR adjacency with both flavor weights.
    offsets: Vec<u32>,
    targets: Vec<u32>,
    w_max: Vec<f64>,
    w_euc: Vec<f64>,
}

impl ProductSpace {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_point(&self, id: NodeId) -> YPoint {
        let (i, j) = self.nodes[id];
        YPoint::new(
            self.grids[0].points[i as usize],
            self.grids[1].points[j as usize],
        )
    }

    pub fn node_levels(&self, id: NodeId) -> (f64, f64) {
        let (i, j) = self.nodes[id];
        (
            self.grids[0].levels[i as usize],
            self.grids[1].levels[j as usize],
        )
    }

    /// Node id for a product point that lies exactly on the grid.
    pub fn node_id(&self, yp: &YPoint) -> Option<NodeId> {
        let i = self.grids[0].nearest(&yp.p1)? as u32;
        let j = self.grids[1].nearest(&yp.p2)? as u32;
        self.node_of.get(&(i, j)).map(|&n| n as usize)
    }

    /// Nearest node (grid snap in both factors), with the d_m snap error.
    /// None when either factor coordinate leaves its grid box or the level
    /// pair is not represented in the node set.
    pub fn snap(&self, yp: &YPoint) -> Option<(NodeId, f64)> {
        let id = self.node_id(yp)?;
        let snapped = self.node_point(id);
        let err = self.dm(yp, &snapped).ok()?;
        Some((id, err))
    }

    /// Direct max-metric distance between ambient product points.
    pub fn dm(&self, a: &YPoint, b: &YPoint) -> Result<f64> {
        let d1 = self.factors[0].distance(&a.p1, &b.p1)?;
        let d2 = self.factors[1].distance(&a.p2, &b.p2)?;
        Ok(d1.max(d2))
    }

    /// Direct Euclidean product distance.
    pub fn de(&self, a: &YPoint, b: &YPoint) -> Result<f64> {
        let d1 = self.factors[0].distance(&a.p1, &b.p1)?;
        let d2 = self.factors[1].distance(&a.p2, &b.p2)?;
        Ok(d1.hypot(d2))
    }

    /// Level of a factor point under the product's level rule.
    pub fn level_of(&self, i: usize, p: &Point) -> Result<f64> {
        match &self.spec.mode {
            Mode::Basepoint { z1, z2 } => {
                let z = if i == 0 { z1 } else { z2 };
                self.factors[i].distance(z, p)
            }
            Mode::Busemann => factor_level(&self.factors[i], p),
        }
    }

    /// Unit-speed path of length `len` from `p` along which the level
    /// decreases at unit rate (a B-ray, or the geodesic toward the
    /// basepoint in Basepoint mode).
    pub fn factor_ray(&self, i: usize, p: &Point, len: f64) -> Result<GeodesicPath> {
        match &self.spec.mode {
            Mode::Basepoint { z1, z2 } => {
                let z = if i == 0 { z1 } else { z2 };
                let space = &self.factors[i];
                let reach = space.distance(p, z)?;
                if len > reach + EXACT_TOL {
                    return Err(Error::TruncatedRay {
                        achieved: reach,
                        requested: len,
                    });
                }
                let geo = space.geodesic(p, z)?;
                Ok(truncate_path(space, &geo, len))
            }
            Mode::Busemann => {
                let field = BusemannField::from_space(&self.factors[i])?;
                field.b_ray_from(p, len)
            }
        }
    }

    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = (NodeId, f64, f64)> + '_ {
        let lo = self.offsets[id] as usize;
        let hi = self.offsets[id + 1] as usize;
        (lo..hi).map(move |k| (self.targets[k] as usize, self.w_max[k], self.w_euc[k]))
    }

    fn weight(&self, k: usize, flavor: Flavor) -> f64 {
        match flavor {
            Flavor::Max => self.w_max[k],
            Flavor::Euclidean => self.w_euc[k],
        }
    }

    /// Dijkstra over the product graph; stops early once `target` settles.
    pub fn shortest_paths(
        &self,
        source: NodeId,
        target: Option<NodeId>,
        flavor: Flavor,
    ) -> ProductPaths {
        const TIE_EPS: f64 = 1e-12;
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![u32::MAX; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        pred[source] = source as u32;
        heap.push(PqEntry {
            cost: 0.0,
            node: source as u32,
        });
        while let Some(PqEntry { cost, node }) = heap.pop() {
            let node_us = node as usize;
            if settled[node_us] {
                continue;
            }
            settled[node_us] = true;
            if Some(node_us) == target {
                break;
            }
            let lo = self.offsets[node_us] as usize;
            let hi = self.offsets[node_us + 1] as usize;
            for k in lo..hi {
                let next = self.targets[k] as usize;
                let cand = cost + self.weight(k, flavor);
                if cand < dist[next] - TIE_EPS {
                    dist[next] = cand;
                    pred[next] = node;
                    heap.push(PqEntry {
                        cost: cand,
                        node: next as u32,
                    });
                } else if (cand - dist[next]).abs() <= TIE_EPS && node < pred[next] {
                    pred[next] = node;
                }
            }
        }
        ProductPaths { dist, pred, source }
    }

    /// Inner (length-metric) distance between two nodes.
    pub fn inner_distance(&self, p: NodeId, q: NodeId, flavor: Flavor) -> Result<f64> {
        let sp = self.shortest_paths(p, Some(q), flavor);
        let d = sp.dist[q];
        if d.is_infinite() {
            Err(Error::NoPath {
                space: self.spec.label.clone(),
                from: p.to_string(),
                to: q.to_string(),
            })
        } else {
            Ok(d)
        }
    }

    /// Shortest node path with its cumulative lengths.
    pub fn shortest_path_nodes(
        &self,
        p: NodeId,
        q: NodeId,
        flavor: Flavor,
    ) -> Result<(Vec<NodeId>, Vec<f64>)> {
        let sp = self.shortest_paths(p, Some(q), flavor);
        let path = sp.path_to(q)?;
        let mut cum = vec![0.0];
        for w in path.windows(2) {
            let lo = self.offsets[w[0]] as usize;
            let hi = self.offsets[w[0] + 1] as usize;
            let mut step = None;
            for k in lo..hi {
                if self.targets[k] as usize == w[1] {
                    step = Some(self.weight(k, flavor));
                    break;
                }
            }
            cum.push(cum.last().unwrap() + step.expect("path edge exists"));
        }
        Ok((path, cum))
    }

    /// Deterministic seeded node sample (distinct nodes, shuffled order).
    pub fn sample_nodes(&self, n: usize, seed: u64) -> Vec<NodeId> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ids: Vec<NodeId> = (0..self.nodes.len()).collect();
        ids.shuffle(&mut rng);
        ids.truncate(n.min(self.nodes.len()));
        ids
    }

    /// Seeded node pairs (p, p') with p ≠ p'.
    pub fn sample_pairs(&self, n: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = self.nodes.len();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let a = rand::Rng::random_range(&mut rng, 0..count);
            let b = rand::Rng::random_range(&mut rng, 0..count);
            if a != b {
                out.push((a, b));
            }
        }
        out
    }

    /// Largest level defect over all nodes (a build sanity check).
    pub fn max_level_defect(&self) -> f64 {
        self.nodes
            .iter()
            .map(|&(i, j)| {
                (self.grids[0].levels[i as usize] - self.grids[1].levels[j as usize]).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Copy, Clone, PartialEq)]
struct PqEntry {
    cost: f64,
    node: u32,
}

impl Eq for PqEntry {}

impl Ord for PqEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for PqEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Busemann level of a point via the factor's closed form (exact models)
/// or its finite-horizon field (graphs).
fn factor_level(space: &Space, p: &Point) -> Result<f64> {
    let spec = space.description().busemann.as_ref().ok_or_else(|| {
        Error::domain(format!(
            "space `{}` declares no busemann field",
            space.label()
        ))
    })?;
    if let Some(form) = spec.closed_form {
        return Ok(match form {
            ClosedForm::LineToPlusInfinity => -p.real(),
            ClosedForm::LineToMinusInfinity => p.real(),
            ClosedForm::VerticalRay => -p.plane().1.ln(),
        });
    }
    BusemannField::from_space(space)?.level(p)
}

/// Prefix of a path up to arclength `len` (exact tail point on exact
/// models, nearest vertex on graphs).
fn truncate_path(space: &Space, path: &GeodesicPath, len: f64) -> GeodesicPath {
    let len = len.clamp(0.0, path.total_length());
    let mut points = Vec::new();
    let mut cum = Vec::new();
    for (p, &t) in path.points.iter().zip(path.cum.iter()) {
        if t <= len + EXACT_TOL {
            points.push(*p);
            cum.push(t);
        }
    }
    if space.is_graph_model() {
        // Snap the cut to the last vertex not beyond len.
        if points.is_empty() {
            points.push(path.points[0]);
            cum.push(0.0);
        }
    } else if (cum.last().copied().unwrap_or(0.0) - len).abs() > EXACT_TOL {
        points.push(space.path_eval(path, len));
        cum.push(len);
    }
    GeodesicPath::new(path.space.clone(), points, cum)
}

fn build_factor_grid(space: &Space, spec: &ProductSpec, idx: usize) -> Result<FactorGrid> {
    match space.kind() {
        SpaceKind::Segment { lo, hi } => {
            let pitch = spec.mesh;
            let count = ((hi - lo) / pitch).round() as usize + 1;
            let points: Vec<Point> = (0..count)
                .map(|i| Point::Real((lo + i as f64 * pitch).min(*hi)))
                .collect();
            let adj = (0..count)
                .map(|i| {
                    let mut v = Vec::new();
                    if i > 0 {
                        v.push((i - 1) as u32);
                    }
                    if i + 1 < count {
                        v.push((i + 1) as u32);
                    }
                    v
                })
                .collect();
            let levels = levels_for(space, spec, idx, &points)?;
            Ok(FactorGrid {
                points,
                levels,
                adj,
                layout: GridLayout::Segment {
                    lo: *lo,
                    pitch,
                    count,
                },
            })
        }
        SpaceKind::UpperHalfPlane {
            x_min,
            x_max,
            y_min,
            y_max,
            ..
        } => {
            let pitch = spec.mesh;
            let nx = ((x_max - x_min) / pitch).round() as usize + 1;
            let v_min = y_min.ln();
            let v_max = y_max.ln();
            let nv = ((v_max - v_min) / pitch).round() as usize + 1;
            let mut points = Vec::with_capacity(nx * nv);
            for jv in 0..nv {
                let v = v_min + jv as f64 * pitch;
                for ix in 0..nx {
                    let x = x_min + ix as f64 * pitch;
                    points.push(Point::Plane(x, v.exp()));
                }
            }
            let mut adj = vec![Vec::new(); nx * nv];
            for jv in 0..nv {
                for ix in 0..nx {
                    let id = jv * nx + ix;
                    for dv in -1i64..=1 {
                        for dx in -1i64..=1 {
                            if dv == 0 && dx == 0 {
                                continue;
                            }
                            let nvx = ix as i64 + dx;
                            let nvv = jv as i64 + dv;
                            if nvx < 0 || nvv < 0 || nvx >= nx as i64 || nvv >= nv as i64 {
                                continue;
                            }
                            adj[id].push((nvv as usize * nx + nvx as usize) as u32);
                        }
                    }
                }
            }
            let levels = levels_for(space, spec, idx, &points)?;
            Ok(FactorGrid {
                points,
                levels,
                adj,
                layout: GridLayout::HalfPlane {
                    x_min: *x_min,
                    v_min,
                    pitch,
                    nx,
                    nv,
                },
            })
        }
        _ => {
            let g = space.graph().expect("graph model");
            let points: Vec<Point> = (0..g.vertex_count()).map(Point::Vertex).collect();
            let adj = (0..g.vertex_count())
                .map(|v| g.neighbors(v).iter().map(|&(n, _)| n as u32).collect())
                .collect();
            let levels = levels_for(space, spec, idx, &points)?;
            Ok(FactorGrid {
                points,
                levels,
                adj,
                layout: GridLayout::Graph,
            })
        }
    }
}

fn levels_for(space: &Space, spec: &ProductSpec, idx: usize, points: &[Point]) -> Result<Vec<f64>> {
    match &spec.mode {
        Mode::Basepoint { z1, z2 } => {
            let z = if idx == 0 { z1 } else { z2 };
            if !space.contains(z) {
                return Err(Error::domain(format!(
                    "basepoint {z:?} does not belong to factor `{}`",
                    space.label()
                )));
            }
            // One Dijkstra covers all vertices on graph factors.
            if let Some(g) = space.graph() {
                let d = g.dijkstra(z.vertex()).dist;
                return Ok(points.iter().map(|p| d[p.vertex()]).collect());
            }
            points.iter().map(|p| space.distance(z, p)).collect()
        }
        Mode::Busemann => {
            if space.description().busemann.is_none() {
                return Err(Error::Schema(vec![format!(
                    "busemann mode requires a busemann block on factor `{}`",
                    space.label()
                )]));
            }
            if space.is_graph_model() {
                let field = BusemannField::from_space(space)?;
                return points.iter().map(|p| field.level(p)).collect();
            }
            points.iter().map(|p| factor_level(space, p)).collect()
        }
    }
}

/// Build the discretized level set. Fails when the level set is empty at
/// tolerance ε; restricts to the largest connected component otherwise.
pub fn build_product(f1: &Space, f2: &Space, spec: &ProductSpec) -> Result<ProductSpace> {
    if !(spec.epsilon > 0.0) {
        return Err(Error::Schema(vec!["epsilon must be positive".into()]));
    }
    if !(spec.mesh > 0.0) {
        return Err(Error::Schema(vec!["mesh must be positive".into()]));
    }
    let grids = [
        build_factor_grid(f1, spec, 0)?,
        build_factor_grid(f2, spec, 1)?,
    ];

    // Pair grid points with matching levels via a sorted window.
    let mut order2: Vec<u32> = (0..grids[1].len() as u32).collect();
    order2.sort_by(|&a, &b| {
        grids[1].levels[a as usize]
            .partial_cmp(&grids[1].levels[b as usize])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let sorted_levels: Vec<f64> = order2
        .iter()
        .map(|&j| grids[1].levels[j as usize])
        .collect();

    let mut nodes: Vec<(u32, u32)> = Vec::new();
    for i in 0..grids[0].len() {
        let l1 = grids[0].levels[i];
        let lo = sorted_levels.partition_point(|&l| l < l1 - spec.epsilon - 1e-12);
        let hi = sorted_levels.partition_point(|&l| l <= l1 + spec.epsilon + 1e-12);
        for k in lo..hi {
            nodes.push((i as u32, order2[k]));
        }
    }
    if nodes.is_empty() {
        return Err(Error::infeasible(format!(
            "empty level set at tolerance ε = {}; increase ε or refine the mesh",
            spec.epsilon
        )));
    }
    nodes.sort_unstable();

    let mut node_of = std::collections::HashMap::with_capacity(nodes.len());
    for (id, &n) in nodes.iter().enumerate() {
        node_of.insert(n, id as u32);
    }

    // CSR edges: each factor stays or moves one grid step; the pair must
    // remain in the node set.
    let mut offsets = Vec::with_capacity(nodes.len() + 1);
    let mut targets: Vec<u32> = Vec::new();
    let mut w_max: Vec<f64> = Vec::new();
    let mut w_euc: Vec<f64> = Vec::new();
    offsets.push(0u32);
    let mut moves1: Vec<u32> = Vec::new();
    let mut moves2: Vec<u32> = Vec::new();
    for &(i, j) in &nodes {
        moves1.clear();
        moves1.push(i);
        moves1.extend_from_slice(&grids[0].adj[i as usize]);
        moves2.clear();
        moves2.push(j);
        moves2.extend_from_slice(&grids[1].adj[j as usize]);
        for &i2 in &moves1 {
            for &j2 in &moves2 {
                if i2 == i && j2 == j {
                    continue;
                }
                let Some(&t) = node_of.get(&(i2, j2)) else {
                    continue;
                };
                let d1 = if i2 == i {
                    0.0
                } else {
                    f1.distance(&grids[0].points[i as usize], &grids[0].points[i2 as usize])?
                };
                let d2 = if j2 == j {
                    0.0
                } else {
                    f2.distance(&grids[1].points[j as usize], &grids[1].points[j2 as usize])?
                };
                targets.push(t);
                w_max.push(d1.max(d2));
                w_euc.push(d1.hypot(d2));
            }
        }
        offsets.push(targets.len() as u32);
    }

    let mut product = ProductSpace {
        spec: spec.clone(),
        factors: [f1.clone(), f2.clone()],
        grids,
        nodes,
        dropped_nodes: 0,
        node_of,
        offsets,
        targets,
        w_max,
        w_euc,
    };
    restrict_to_main_component(&mut product);
    Ok(product)
}

/// Keep the largest connected component (ties: the one holding the
/// lexicographically smallest node), dropping stray level-set islands.
fn restrict_to_main_component(y: &mut ProductSpace) {
    let n = y.nodes.len();
    let mut comp = vec![u32::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    for start in 0..n {
        if comp[start] != u32::MAX {
            continue;
        }
        let c = sizes.len() as u32;
        let mut stack = vec![start];
        comp[start] = c;
        let mut size = 0usize;
        while let Some(v) = stack.pop() {
            size += 1;
            let lo = y.offsets[v] as usize;
            let hi = y.offsets[v + 1] as usize;
            for k in lo..hi {
                let t = y.targets[k] as usize;
                if comp[t] == u32::MAX {
                    comp[t] = c;
                    stack.push(t);
                }
            }
        }
        sizes.push(size);
    }
    if sizes.len() <= 1 {
        return;
    }
    let keep = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(c, _)| c as u32)
        .unwrap();

    let mut remap = vec![u32::MAX; n];
    let mut new_nodes = Vec::new();
    for (v, &(i, j)) in y.nodes.iter().enumerate() {
        if comp[v] == keep {
            remap[v] = new_nodes.len() as u32;
            new_nodes.push((i, j));
        }
    }
    let mut offsets = Vec::with_capacity(new_nodes.len() + 1);
    let mut targets = Vec::new();
    let mut w_max = Vec::new();
    let mut w_euc = Vec::new();
    offsets.push(0u32);
    for v in 0..n {
        if remap[v] == u32::MAX {
            continue;
        }
        let lo = y.offsets[v] as usize;
        let hi = y.offsets[v + 1] as usize;
        for k in lo..hi {
            let t = y.targets[k] as usize;
            if remap[t] != u32::MAX {
                targets.push(remap[t]);
                w_max.push(y.w_max[k]);
                w_euc.push(y.w_euc[k]);
            }
        }
        offsets.push(targets.len() as u32);
    }
    y.dropped_nodes = n - new_nodes.len();
    y.node_of = new_nodes
        .iter()
        .enumerate()
        .map(|(id, &nd)| (nd, id as u32))
        .collect();
    y.nodes = new_nodes;
    y.offsets = offsets;
    y.targets = targets;
    y.w_max = w_max;
    y.w_euc = w_euc;
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::busemann::BusemannSpec;
    use crate::space::SpaceDescription;

    pub fn line_space(label: &str, r: f64, toward_plus: bool) -> Space {
        Space::from_description(SpaceDescription {
            label: label.into(),
            kind: SpaceKind::Segment { lo: -r, hi: r },
            busemann: Some(BusemannSpec {
                closed_form: Some(if toward_plus {
                    ClosedForm::LineToPlusInfinity
                } else {
                    ClosedForm::LineToMinusInfinity
                }),
                ray: None,
                horizon: None,
                tolerance: None,
            }),
        })
        .unwrap()
    }

    pub fn diagonal_product(r: f64) -> ProductSpace {
        let f1 = line_space("l1", r, true);
        let f2 = line_space("l2", r, true);
        let spec = ProductSpec {
            label: "diag".into(),
            mode: Mode::Busemann,
            flavor: Flavor::Max,
            epsilon: 1e-9,
            mesh: 0.25,
        };
        build_product(&f1, &f2, &spec).unwrap()
    }

    pub fn cross_product(r: f64) -> ProductSpace {
        let f1 = line_space("l1", r, true);
        let f2 = line_space("l2", r, true);
        let spec = ProductSpec {
            label: "cross".into(),
            mode: Mode::Basepoint {
                z1: Point::Real(0.0),
                z2: Point::Real(0.0),
            },
            flavor: Flavor::Max,
            epsilon: 1e-9,
            mesh: 0.25,
        };
        build_product(&f1, &f2, &spec).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::busemann::BusemannSpec;
    use crate::space::SpaceDescription;

    #[test]
    fn diagonal_is_a_path_graph() {
        let y = diagonal_product(10.0);
        // 81 grid points on [-10, 10] at pitch 0.25 → 81 diagonal nodes.
        assert_eq!(y.node_count(), 81);
        for id in 0..y.node_count() {
            let p = y.node_point(id);
            assert_eq!(p.p1, p.p2);
        }
        assert_eq!(y.max_level_defect(), 0.0);
        // Endpoints have one neighbor, everything else two.
        let degrees: Vec<usize> = (0..y.node_count())
            .map(|v| y.neighbors(v).count())
            .collect();
        assert_eq!(degrees.iter().filter(|&&d| d == 1).count(), 2);
        assert!(degrees.iter().all(|&d| d <= 2));
    }

    #[test]
    fn diagonal_inner_distances() {
        let y = diagonal_product(10.0);
        let a = y
            .node_id(&YPoint::new(Point::Real(0.0), Point::Real(0.0)))
            .unwrap();
        let b = y
            .node_id(&YPoint::new(Point::Real(5.0), Point::Real(5.0)))
            .unwrap();
        let dm = y.inner_distance(a, b, Flavor::Max).unwrap();
        assert!((dm - 5.0).abs() < 1e-9);
        let de = y.inner_distance(a, b, Flavor::Euclidean).unwrap();
        assert!((de - 5.0 * 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn cross_has_four_arms() {
        let y = cross_product(10.0);
        // Arms: 4 × 40 nodes + center.
        assert_eq!(y.node_count(), 161);
        for id in 0..y.node_count() {
            let p = y.node_point(id);
            assert!((p.p1.real().abs() - p.p2.real().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_inner_distance_through_origin() {
        let y = cross_product(10.0);
        let p = y
            .node_id(&YPoint::new(Point::Real(3.0), Point::Real(3.0)))
            .unwrap();
        let q = y
            .node_id(&YPoint::new(Point::Real(2.0), Point::Real(-2.0)))
            .unwrap();
        let d = y.inner_distance(p, q, Flavor::Max).unwrap();
        assert_eq!(d, 5.0);
        let dm = y.dm(&y.node_point(p), &y.node_point(q)).unwrap();
        assert_eq!(dm, 5.0);
        let de = y.de(&y.node_point(p), &y.node_point(q)).unwrap();
        assert!((de - 26.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_level_set_is_rejected() {
        let f1 = line_space("l1", 1.0, true);
        let f2 = Space::from_description(SpaceDescription {
            label: "l2".into(),
            kind: SpaceKind::Segment { lo: 50.0, hi: 60.0 },
            busemann: Some(BusemannSpec {
                closed_form: Some(ClosedForm::LineToPlusInfinity),
                ray: None,
                horizon: None,
                tolerance: None,
            }),
        })
        .unwrap();
        let spec = ProductSpec {
            label: "empty".into(),
            mode: Mode::Busemann,
            flavor: Flavor::Max,
            epsilon: 1e-9,
            mesh: 0.25,
        };
        assert!(matches!(
            build_product(&f1, &f2, &spec),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn snap_reports_grid_error() {
        let y = diagonal_product(10.0);
        let (id, err) = y
            .snap(&YPoint::new(Point::Real(1.1), Point::Real(1.1)))
            .unwrap();
        let p = y.node_point(id);
        assert_eq!(p.p1, Point::Real(1.0));
        assert!((err - 0.1).abs() < 1e-9);
        assert!(y
            .snap(&YPoint::new(Point::Real(50.0), Point::Real(50.0)))
            .is_none());
    }

    #[test]
    fn factor_ray_basepoint_truncates_at_z() {
        let y = cross_product(10.0);
        let ray = y.factor_ray(0, &Point::Real(3.0), 3.0).unwrap();
        assert_eq!(ray.end(), Point::Real(0.0));
        assert!(matches!(
            y.factor_ray(0, &Point::Real(3.0), 4.0),
            Err(Error::TruncatedRay { .. })
        ));
    }
}
