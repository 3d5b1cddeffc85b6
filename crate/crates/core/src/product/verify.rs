//! Quantitative verification over the discretized product: four-point δ of
//! the inner metric, the max{f,g} T-function mechanism along Γ*, the
//! two-sided d vs d_m comparison, flavor comparison, and the small-ball
//! property behind the same-topology statement.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hyperbolicity::tfunction::{fit_t_function, t_deviation};
use crate::hyperbolicity::{four_point_defect_from_matrix, DeltaEstimate, DeltaMethod};
use crate::product::gamma::gamma_star;
use crate::product::{Flavor, NodeId, ProductSpace};
use crate::Result;

/// Node selection for product-level estimates.
#[derive(Clone, Copy, Debug)]
pub enum NodeSelection {
    All,
    Sample { n: usize, seed: u64 },
}

/// One (q, p, p') probe of the hyperbolicity mechanism: the deviation of
/// max{f, g} from its fitted descent/ascent model along Γ*, and the jump
/// of the split at a*.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MechanismSample {
    pub deviation: f64,
    pub jump_at_a_star: f64,
    pub d_inner: f64,
}

#[derive(Clone, Debug)]
pub struct ProductDeltaReport {
    pub estimate: DeltaEstimate,
    pub mechanism: Vec<MechanismSample>,
}

/// Four-point δ of (Y, inner d) over selected nodes, plus mechanism probes.
pub fn product_delta(
    y: &ProductSpace,
    selection: NodeSelection,
    flavor: Flavor,
    mechanism_probes: usize,
    seed: u64,
) -> Result<ProductDeltaReport> {
    let (nodes, is_exhaustive, sel_seed) = match selection {
        NodeSelection::All => ((0..y.node_count()).collect::<Vec<_>>(), true, 0),
        NodeSelection::Sample { n, seed } => (y.sample_nodes(n, seed), false, seed),
    };
    if nodes.len() < 4 {
        return Err(Error::domain("product δ needs at least 4 nodes"));
    }
    // One full Dijkstra per selected node.
    let mut matrix = vec![vec![0.0f64; nodes.len()]; nodes.len()];
    for (row, &src) in nodes.iter().enumerate() {
        let sp = y.shortest_paths(src, None, flavor);
        for (col, &dst) in nodes.iter().enumerate() {
            let d = sp.dist[dst];
            if d.is_infinite() {
                return Err(Error::NoPath {
                    space: y.spec.label.clone(),
                    from: src.to_string(),
                    to: dst.to_string(),
                });
            }
            matrix[row][col] = d;
        }
    }
    let delta = four_point_defect_from_matrix(&matrix);

    let mut mechanism = Vec::new();
    let probe_nodes = y.sample_nodes(3 * mechanism_probes, seed ^ 0x9e37_79b9_7f4a_7c15);
    for chunk in probe_nodes.chunks(3).take(mechanism_probes) {
        if chunk.len() < 3 {
            break;
        }
        let (q, p, p_prime) = (chunk[0], chunk[1], chunk[2]);
        if p == p_prime {
            continue;
        }
        if let Some(sample) = mechanism_probe(y, q, p, p_prime, flavor)? {
            mechanism.push(sample);
        }
    }

    Ok(ProductDeltaReport {
        estimate: DeltaEstimate {
            delta,
            method: DeltaMethod::FourPoint,
            sample_size: nodes.len(),
            seed: sel_seed,
            is_exhaustive,
        },
        mechanism,
    })
}

/// Evaluate f(t) = d₁(q₁, Γ*₁(t)), g(t) = d₂(q₂, Γ*₂(t)) and measure how
/// far max{f, g} strays from its fitted T-function. Returns None when the
/// pair's Γ* cannot be built inside the truncation.
fn mechanism_probe(
    y: &ProductSpace,
    q: NodeId,
    p: NodeId,
    p_prime: NodeId,
    flavor: Flavor,
) -> Result<Option<MechanismSample>> {
    let qp = y.node_point(q);
    let pp = y.node_point(p);
    let pq = y.node_point(p_prime);
    let curves = match gamma_star(y, &pp, &pq, flavor) {
        Ok(c) => c,
        Err(Error::TruncatedRay { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let star = curves.star.unwrap();
    let d = star.d_inner;
    if d <= 0.0 {
        return Ok(None);
    }
    let steps = 48usize;
    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = d * i as f64 / steps as f64;
        let at = curves.eval_star(y, t)?;
        let f = y.factors[0].distance(&qp.p1, &at.p1)?;
        let g = y.factors[1].distance(&qp.p2, &at.p2)?;
        samples.push((t, f.max(g)));
    }
    let model = fit_with_clamp(d, samples[0].1, samples[steps].1)?;
    let deviation = t_deviation(&samples, &model)?;
    Ok(Some(MechanismSample {
        deviation,
        jump_at_a_star: star.gap,
        d_inner: d,
    }))
}

fn fit_with_clamp(
    span: f64,
    t1: f64,
    t2: f64,
) -> Result<crate::hyperbolicity::tfunction::TFunction> {
    // Endpoint values of max{f,g} can exceed the 1-Lipschitz budget by the
    // splice jump; shrink symmetrically like the distance checks do.
    let gap = t1 - t2;
    let (t1, t2) = if gap.abs() <= span {
        (t1, t2)
    } else {
        let excess = (gap.abs() - span) / 2.0 + 1e-12;
        if gap > 0.0 {
            (t1 - excess, t2 + excess)
        } else {
            (t1 + excess, t2 - excess)
        }
    };
    fit_t_function(0.0, span, t1, t2)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmallBallCheck {
    pub radius: f64,
    pub candidate_radius: f64,
    pub checked: usize,
    pub worst_inner: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricComparisonReport {
    pub pairs: usize,
    /// max over pairs of d − d_m (must stay below 20δ + slack).
    pub max_d_minus_dm: f64,
    /// min over pairs of d − d_m (must stay above −tolerance).
    pub min_d_minus_dm: f64,
    pub two_sided_ok: bool,
    /// Node pair realizing max_d_minus_dm (the witness on failure).
    pub worst_pair: Option<(usize, usize)>,
    /// max over pairs of d_euclid-inner / d_max-inner.
    pub max_flavor_ratio: f64,
    pub min_flavor_ratio: f64,
    pub flavor_ok: bool,
    pub small_ball: Vec<SmallBallCheck>,
    pub small_ball_ok: bool,
}

/// Sampled two-sided comparison d_m ≤ d ≤ d_m + 20δ + slack, the √2 flavor
/// comparison, and the small-ball property at three shrinking radii.
pub fn metric_comparison(
    y: &ProductSpace,
    n_pairs: usize,
    seed: u64,
    delta_est: f64,
    slack: f64,
) -> Result<MetricComparisonReport> {
    let pairs = y.sample_pairs(n_pairs, seed);
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_excess = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut min_ratio = f64::INFINITY;
    let mut worst_pair = None;
    for &(a, b) in &pairs {
        let dm = y.dm(&y.node_point(a), &y.node_point(b))?;
        let d_max = y.inner_distance(a, b, Flavor::Max)?;
        let d_euc = y.inner_distance(a, b, Flavor::Euclidean)?;
        let excess = d_max - dm;
        if excess > max_excess {
            worst_pair = Some((a, b));
        }
        max_excess = max_excess.max(excess);
        min_excess = min_excess.min(excess);
        if d_max > 0.0 {
            let ratio = d_euc / d_max;
            max_ratio = max_ratio.max(ratio);
            min_ratio = min_ratio.min(ratio);
        }
    }
    let two_sided_ok = min_excess >= -1e-9 && max_excess <= 20.0 * delta_est + slack;
    let flavor_ok = min_ratio >= 1.0 - 1e-9 && max_ratio <= 2.0f64.sqrt() + 1e-9;

    // Small-ball property at three shrinking radii: nodes d_m-close to a
    // center connect inside Y by short curves.
    let mesh = y.spec.mesh;
    let centers = y.sample_nodes(5, seed ^ 0x51ed_2701);
    let mut small_ball = Vec::new();
    for k in 0..3 {
        let radius = 16.0 * mesh / (1 << k) as f64;
        let rho = radius / 4.0;
        let mut checked = 0usize;
        let mut worst = 0.0f64;
        for &c in &centers {
            let sp = y.shortest_paths(c, None, Flavor::Max);
            let cp = y.node_point(c);
            for node in 0..y.node_count() {
                if node == c {
                    continue;
                }
                let dm = y.dm(&cp, &y.node_point(node))?;
                if dm <= rho {
                    checked += 1;
                    worst = worst.max(sp.dist[node]);
                }
            }
        }
        small_ball.push(SmallBallCheck {
            radius,
            candidate_radius: rho,
            checked,
            worst_inner: worst,
            ok: worst <= radius + 1e-9,
        });
    }
    let small_ball_ok = small_ball.iter().all(|c| c.ok);

    Ok(MetricComparisonReport {
        pairs: pairs.len(),
        max_d_minus_dm: max_excess,
        min_d_minus_dm: min_excess,
        two_sided_ok,
        worst_pair,
        max_flavor_ratio: max_ratio,
        min_flavor_ratio: min_ratio,
        flavor_ok,
        small_ball,
        small_ball_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::fixtures::{cross_product, diagonal_product};

    #[test]
    fn diagonal_delta_zero() {
        let y = diagonal_product(10.0);
        let rep = product_delta(&y, NodeSelection::All, Flavor::Max, 4, 7).unwrap();
        assert_eq!(rep.estimate.delta, 0.0);
        assert!(rep.estimate.is_exhaustive);
        for m in &rep.mechanism {
            assert!(m.deviation < 1e-9);
            assert!(m.jump_at_a_star < 1e-9);
        }
    }

    #[test]
    fn cross_delta_zero_exhaustive() {
        let y = cross_product(10.0);
        let rep = product_delta(&y, NodeSelection::All, Flavor::Max, 4, 7).unwrap();
        assert_eq!(rep.estimate.delta, 0.0);
        assert_eq!(rep.estimate.sample_size, 161);
    }

    #[test]
    fn cross_metric_comparison_exact() {
        let y = cross_product(10.0);
        let rep = metric_comparison(&y, 60, 3, 0.0, 1e-9).unwrap();
        assert!(rep.two_sided_ok);
        assert!(rep.max_d_minus_dm.abs() < 1e-9);
        assert!(
            rep.flavor_ok,
            "ratios in [{}, {}]",
            rep.min_flavor_ratio, rep.max_flavor_ratio
        );
        assert!(rep.small_ball_ok);
    }
}
