//! Weighted undirected graphs with deterministic shortest paths.
//!
//! Dijkstra resolves ties by lexicographically smallest predecessor vertex
//! id, so every geodesic and every construction built on top of one is
//! reproducible run to run.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Error;
use crate::Result;

/// Tie tolerance when comparing path lengths built from f64 edge weights.
const TIE_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
    max_edge_weight: f64,
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    cost: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap by cost, vertex id breaking cost ties deterministically.
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest-path output.
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pub pred: Vec<usize>,
    source: usize,
}

impl ShortestPaths {
    /// Vertex path from the source to `target`, inclusive.
    pub fn path_to(&self, target: usize) -> Result<Vec<usize>> {
        if self.dist[target].is_infinite() {
            return Err(Error::NoPath {
                space: String::new(),
                from: self.source.to_string(),
                to: target.to_string(),
            });
        }
        let mut path = vec![target];
        let mut v = target;
        while v != self.source {
            v = self.pred[v];
            path.push(v);
        }
        path.reverse();
        Ok(path)
    }
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut max_w = 0.0f64;
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "edge ({u},{v}) references a vertex outside 0..{n}"
                )));
            }
            if !(w > 0.0) {
                return Err(Error::domain(format!(
                    "edge ({u},{v}) has non-positive weight {w}"
                )));
            }
            adj[u].push((v, w));
            adj[v].push((u, w));
            max_w = max_w.max(w);
        }
        // Sorted adjacency keeps relaxation order deterministic.
        for nbrs in &mut adj {
            nbrs.sort_by(|a, b| a.0.cmp(&b.0));
        }
        Ok(Graph {
            adj,
            max_edge_weight: max_w,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn max_edge_weight(&self) -> f64 {
        self.max_edge_weight
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let d = self.dijkstra(0);
        d.dist.iter().all(|x| x.is_finite())
    }

    /// Dijkstra with the lexicographic tie-break: among equal-length routes
    /// the one through the smallest predecessor id wins.
    pub fn dijkstra(&self, source: usize) -> ShortestPaths {
        self.dijkstra_bounded(source, None, f64::INFINITY)
    }

    /// Dijkstra that may stop once `target` is settled or `radius` exceeded.
    pub fn dijkstra_bounded(
        &self,
        source: usize,
        target: Option<usize>,
        radius: f64,
    ) -> ShortestPaths {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        pred[source] = source;
        heap.push(HeapEntry {
            cost: 0.0,
            vertex: source,
        });
        while let Some(HeapEntry { cost, vertex }) = heap.pop() {
            if settled[vertex] {
                continue;
            }
            settled[vertex] = true;
            if Some(vertex) == target {
                break;
            }
            if cost > radius {
                break;
            }
            for &(next, w) in &self.adj[vertex] {
                let cand = cost + w;
                if cand < dist[next] - TIE_EPS {
                    dist[next] = cand;
                    pred[next] = vertex;
                    heap.push(HeapEntry {
                        cost: cand,
                        vertex: next,
                    });
                } else if (cand - dist[next]).abs() <= TIE_EPS && vertex < pred[next] {
                    pred[next] = vertex;
                }
            }
        }
        ShortestPaths { dist, pred, source }
    }

    /// All-pairs distance matrix via repeated Dijkstra.
    pub fn all_pairs(&self) -> Vec<Vec<f64>> {
        (0..self.adj.len()).map(|s| self.dijkstra(s).dist).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn c4_distances() {
        let g = cycle(4);
        let d = g.dijkstra(0);
        assert_eq!(d.dist, vec![0.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn c4_tie_break_prefers_smaller_predecessor() {
        // 0 -> 2 has routes 0-1-2 and 0-3-2 of equal length; predecessor 1 wins.
        let g = cycle(4);
        let d = g.dijkstra(0);
        assert_eq!(d.path_to(2).unwrap(), vec![0, 1, 2]);
        // And from the other end: 2 -> 0 also routes through 1.
        let d2 = g.dijkstra(2);
        assert_eq!(d2.path_to(0).unwrap(), vec![2, 1, 0]);
    }

    #[test]
    fn disconnected_reports_no_path() {
        let g = Graph::new(3, &[(0, 1, 1.0)]).unwrap();
        let d = g.dijkstra(0);
        assert!(d.path_to(2).is_err());
        assert!(!g.is_connected());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::new(2, &[(0, 5, 1.0)]).is_err());
        assert!(Graph::new(2, &[(0, 1, 0.0)]).is_err());
        assert!(Graph::new(2, &[(0, 1, -2.0)]).is_err());
    }
}
