//! Sequence-based boundary machinery and the classification of rays in a
//! product.
//!
//! Convergence to infinity is approximated by tail-minimum Gromov products
//! at a finite truncation, with thresholds scaled to the truncation length
//! so verdicts stay stable under doubling. Rays in a product either follow
//! the common level direction (their a*-sequence grows with the truncation)
//! or factorize into a pair of factor boundary points witnessed by the
//! far legs of their Γ* curves.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::product::gamma::gamma_star;
use crate::product::{Flavor, NodeId, ProductSpace};
use crate::space::{GeodesicPath, Point};
use crate::Result;

/// Default convergence threshold as a fraction of the truncation length.
pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.25;

/// Default Case-1 detection threshold as a fraction of the truncation.
pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Tail used for cross-sequence checks (a short suffix keeps the number of
/// cross-distance queries desk-scale; monotonicity of the tail minimum
/// makes a short tail a valid proxy).
pub const CROSS_TAIL: usize = 6;

/// A sequence observed against a basepoint: distances to the basepoint and
/// the pairwise Gromov-product matrix at the truncation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundarySample {
    /// d(z, x^k).
    pub dz: Vec<f64>,
    /// (x^k · x^l)_z, symmetric, zero diagonal.
    pub gram: Vec<Vec<f64>>,
}

impl BoundarySample {
    /// From basepoint distances and the pairwise distance matrix.
    pub fn from_distances(dz: Vec<f64>, pairwise: &[Vec<f64>]) -> Self {
        let n = dz.len();
        let mut gram = vec![vec![0.0; n]; n];
        for k in 0..n {
            for l in 0..n {
                gram[k][l] = 0.5 * (dz[k] + dz[l] - pairwise[k][l]);
            }
        }
        BoundarySample { dz, gram }
    }

    /// For a unit-speed geodesic ray sampled at integer times 1..=k_max:
    /// d(z, x^k) = k and d(x^k, x^l) = |k − l|.
    pub fn from_unit_ray(k_max: usize) -> Self {
        let dz: Vec<f64> = (1..=k_max).map(|k| k as f64).collect();
        let pairwise: Vec<Vec<f64>> = (1..=k_max)
            .map(|k| (1..=k_max).map(|l| (k as f64 - l as f64).abs()).collect())
            .collect();
        BoundarySample::from_distances(dz, &pairwise)
    }

    pub fn len(&self) -> usize {
        self.dz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dz.is_empty()
    }

    pub fn tail_start(&self) -> usize {
        self.len() / 2
    }

    /// min over pairs k < l with k, l ≥ s of (x^k · x^l)_z.
    pub fn tail_min_from(&self, s: usize) -> f64 {
        let n = self.len();
        let mut m = f64::INFINITY;
        for k in s..n {
            for l in (k + 1)..n {
                m = m.min(self.gram[k][l]);
            }
        }
        m
    }

    /// The liminf proxy: the tail minimum over the second half.
    pub fn proxy(&self) -> f64 {
        self.tail_min_from(self.tail_start())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub converges: bool,
    pub proxy: f64,
    pub threshold: f64,
}

/// Does the sequence converge to infinity at the working threshold?
pub fn converges_to_infinity(
    sample: &BoundarySample,
    threshold: f64,
) -> Result<ConvergenceVerdict> {
    if sample.len() < 4 {
        return Err(Error::domain(format!(
            "convergence check needs at least 4 samples, got {}",
            sample.len()
        )));
    }
    let proxy = sample.proxy();
    Ok(ConvergenceVerdict {
        converges: proxy >= threshold,
        proxy,
        threshold,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub cross_proxy: f64,
    pub threshold: f64,
}

/// Are two convergent sequences equivalent? `cross(k, l)` returns
/// d(x^k, y^l); only a short tail is queried.
pub fn sequences_equivalent(
    s1: &BoundarySample,
    s2: &BoundarySample,
    mut cross: impl FnMut(usize, usize) -> Result<f64>,
    threshold: f64,
) -> Result<EquivalenceVerdict> {
    for (name, s) in [("first", s1), ("second", s2)] {
        let v = converges_to_infinity(s, threshold)?;
        if !v.converges {
            return Err(Error::domain(format!(
                "{name} sequence does not converge to infinity at threshold {threshold} (proxy {})",
                v.proxy
            )));
        }
    }
    let start1 = s1.len().saturating_sub(CROSS_TAIL);
    let start2 = s2.len().saturating_sub(CROSS_TAIL);
    let mut proxy = f64::INFINITY;
    for k in start1..s1.len() {
        for l in start2..s2.len() {
            let d = cross(k, l)?;
            proxy = proxy.min(0.5 * (s1.dz[k] + s2.dz[l] - d));
        }
    }
    Ok(EquivalenceVerdict {
        equivalent: proxy >= threshold,
        cross_proxy: proxy,
        threshold,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayCase {
    /// The a*-sequence grows with the truncation: the ray follows the
    /// common level direction and collapses to the single boundary point.
    Case1ToU,
    /// The a*-sequence stays bounded: the ray factorizes.
    Case2Factorized,
}

/// Case-2 witness data: the far legs of Γ*_{z σ(K)} in each factor.
#[derive(Clone, Debug)]
pub struct FactorWitness {
    pub rays: [GeodesicPath; 2],
    /// d_i(γ_i(a*_K), witness_i(b*_K)): how far the witness leg's far end
    /// sits from the z-leg at matching height.
    pub gap_at_a_star: [f64; 2],
    /// Factor projections σ_i(k), the sequences representing v_i.
    pub factor_sequences: [Vec<Point>; 2],
}

#[derive(Clone, Debug)]
pub struct RayClassification {
    pub case: RayCase,
    pub a_star_seq: Vec<f64>,
    pub b_star_seq: Vec<f64>,
    pub k_max: usize,
    pub lambda: f64,
    pub witness: Option<FactorWitness>,
}

/// Classify a ray σ in Y sampled at (approximately) unit-spaced parameters,
/// σ(0) = z. For each k the pair (z, σ(k)) yields a*_k; Case 1 when some
/// a*_k reaches λ·K, Case 2 otherwise, with factor witnesses from the last
/// sample's Γ* legs.
pub fn classify_ray(
    y: &ProductSpace,
    sigma: &[NodeId],
    lambda: f64,
    flavor: Flavor,
) -> Result<RayClassification> {
    if sigma.len() < 3 {
        return Err(Error::domain("ray classification needs at least 3 samples"));
    }
    let z = sigma[0];
    let zp = y.node_point(z);
    let sp = y.shortest_paths(z, None, flavor);

    let mut a_star_seq = Vec::with_capacity(sigma.len() - 1);
    let mut b_star_seq = Vec::with_capacity(sigma.len() - 1);
    for &node in &sigma[1..] {
        let q = y.node_point(node);
        let d = sp.dist[node];
        if d.is_infinite() {
            return Err(Error::NoPath {
                space: y.spec.label.clone(),
                from: z.to_string(),
                to: node.to_string(),
            });
        }
        let dm = y.dm(&zp, &q)?;
        let mut a_parts = [0.0f64; 2];
        let mut b_parts = [0.0f64; 2];
        for i in 0..2 {
            let d_i = y.factors[i].distance(&zp.factor(i), &q.factor(i))?;
            let lz = y.level_of(i, &zp.factor(i))?;
            let lq = y.level_of(i, &q.factor(i))?;
            a_parts[i] = 0.5 * (d_i + lz - lq);
            b_parts[i] = 0.5 * (d_i + lq - lz);
        }
        let half_excess = 0.5 * (d - dm).max(0.0);
        a_star_seq.push(a_parts[0].max(a_parts[1]).max(0.0) + half_excess);
        b_star_seq.push(b_parts[0].max(b_parts[1]).max(0.0) + half_excess);
    }

    let k_max = sigma.len() - 1;
    let peak = a_star_seq.iter().cloned().fold(0.0, f64::max);
    if peak >= lambda * k_max as f64 {
        return Ok(RayClassification {
            case: RayCase::Case1ToU,
            a_star_seq,
            b_star_seq,
            k_max,
            lambda,
            witness: None,
        });
    }

    // Case 2: witness legs from the last sample.
    let last = *sigma.last().unwrap();
    let last_p = y.node_point(last);
    let curves = gamma_star(y, &zp, &last_p, flavor)?;
    let star = curves.star.unwrap();
    let mut gap_at_a_star = [0.0f64; 2];
    for i in 0..2 {
        let z_leg_at = y.factors[i].path_eval(&curves.legs[i], star.a_star);
        let witness_at = y.factors[i].path_eval(&curves.legs_prime[i], star.b_star);
        gap_at_a_star[i] = y.factors[i].distance(&z_leg_at, &witness_at)?;
    }
    let factor_sequences = [
        sigma[1..].iter().map(|&n| y.node_point(n).p1).collect(),
        sigma[1..].iter().map(|&n| y.node_point(n).p2).collect(),
    ];
    Ok(RayClassification {
        case: RayCase::Case2Factorized,
        a_star_seq,
        b_star_seq,
        k_max,
        lambda,
        witness: Some(FactorWitness {
            rays: [curves.legs_prime[0].clone(), curves.legs_prime[1].clone()],
            gap_at_a_star,
            factor_sequences,
        }),
    })
}

/// Result of checking the factorization map v ↦ (v₁, v₂) on a finite ray
/// family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub ray_count: usize,
    pub case1: Vec<usize>,
    pub case1_mutually_equivalent: bool,
    /// Case-2 rays with their (factor-1 class, factor-2 class) indices.
    pub case2_pairs: Vec<(usize, (usize, usize))>,
    /// Distinct product classes map to distinct factor pairs.
    pub injective: bool,
    /// Equivalent product rays map to the same factor pair.
    pub respects_equivalence: bool,
    /// The tested relation is an equivalence on the family: symmetric by
    /// construction, checked transitive over all triples.
    pub transitive_on_sample: bool,
    /// Number of boundary classes among the given rays (Case-1 rays all
    /// count as one class when present).
    pub class_count: usize,
}

/// Classify every ray, partition them by product equivalence, and check
/// that Case-2 classes biject onto factor class pairs while every Case-1
/// ray lands in one common class.
pub fn factorization_check(
    y: &ProductSpace,
    rays: &[Vec<NodeId>],
    lambda: f64,
    threshold_fraction: f64,
    flavor: Flavor,
) -> Result<FactorizationReport> {
    if rays.is_empty() {
        return Err(Error::domain("factorization check needs at least one ray"));
    }
    let classifications: Vec<RayClassification> = rays
        .iter()
        .map(|r| classify_ray(y, r, lambda, flavor))
        .collect::<Result<_>>()?;

    // Product-level samples (σ is a geodesic ray from z in Y).
    let samples: Vec<BoundarySample> = rays
        .iter()
        .map(|r| y_ray_sample(y, r, flavor))
        .collect::<Result<_>>()?;

    let k_min = rays.iter().map(|r| r.len() - 1).min().unwrap();
    let threshold = threshold_fraction * k_min as f64;

    // Pairwise product equivalence.
    let n = rays.len();
    let mut equiv = vec![vec![false; n]; n];
    for i in 0..n {
        equiv[i][i] = true;
        for j in (i + 1)..n {
            let v = sequences_equivalent(
                &samples[i],
                &samples[j],
                |k, l| {
                    let a = rays[i][k + 1];
                    let b = rays[j][l + 1];
                    y.inner_distance(a, b, flavor)
                },
                threshold,
            )?;
            equiv[i][j] = v.equivalent;
            equiv[j][i] = v.equivalent;
        }
    }
    let classes = partition(&equiv);
    let mut transitive = true;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                if equiv[i][j] && equiv[j][l] && !equiv[i][l] {
                    transitive = false;
                }
            }
        }
    }

    let case1: Vec<usize> = classifications
        .iter()
        .enumerate()
        .filter(|(_, c)| c.case == RayCase::Case1ToU)
        .map(|(i, _)| i)
        .collect();
    let case1_mutually_equivalent = case1.iter().all(|&i| case1.iter().all(|&j| equiv[i][j]));

    // Factor-level equivalence classes for Case-2 rays.
    let case2: Vec<usize> = classifications
        .iter()
        .enumerate()
        .filter(|(_, c)| c.case == RayCase::Case2Factorized)
        .map(|(i, _)| i)
        .collect();
    let mut factor_class: Vec<Option<(usize, usize)>> = vec![None; n];
    for axis in 0..2 {
        let m = case2.len();
        let mut fequiv = vec![vec![false; m]; m];
        let fsamples: Vec<BoundarySample> = case2
            .iter()
            .map(|&i| factor_ray_sample(y, axis, &rays[i]))
            .collect::<Result<_>>()?;
        for (ii, &ri) in case2.iter().enumerate() {
            fequiv[ii][ii] = true;
            for (jj, &rj) in case2.iter().enumerate().skip(ii + 1) {
                let v = sequences_equivalent(
                    &fsamples[ii],
                    &fsamples[jj],
                    |k, l| {
                        let a = y.node_point(rays[ri][k + 1]).factor(axis);
                        let b = y.node_point(rays[rj][l + 1]).factor(axis);
                        y.factors[axis].distance(&a, &b)
                    },
                    threshold,
                )?;
                fequiv[ii][jj] = v.equivalent;
                fequiv[jj][ii] = v.equivalent;
            }
        }
        let fclasses = partition(&fequiv);
        for (ii, &ri) in case2.iter().enumerate() {
            let entry = factor_class[ri].get_or_insert((0, 0));
            if axis == 0 {
                entry.0 = fclasses[ii];
            } else {
                entry.1 = fclasses[ii];
            }
        }
    }

    // Injectivity and well-definedness of class ↦ factor pair.
    let mut injective = true;
    let mut respects = true;
    for (idx_a, &i) in case2.iter().enumerate() {
        for &j in case2.iter().skip(idx_a + 1) {
            let same_class = equiv[i][j];
            let same_pair = factor_class[i] == factor_class[j];
            if same_class && !same_pair {
                respects = false;
            }
            if !same_class && same_pair {
                injective = false;
            }
        }
    }

    let case2_pairs = case2
        .iter()
        .map(|&i| (i, factor_class[i].unwrap()))
        .collect();

    let mut class_ids: Vec<usize> = classes.clone();
    class_ids.sort_unstable();
    class_ids.dedup();
    Ok(FactorizationReport {
        ray_count: n,
        case1,
        case1_mutually_equivalent,
        case2_pairs,
        injective,
        respects_equivalence: respects,
        transitive_on_sample: transitive,
        class_count: class_ids.len(),
    })
}

/// Product boundary sample of a geodesic ray (node list from z).
fn y_ray_sample(y: &ProductSpace, ray: &[NodeId], flavor: Flavor) -> Result<BoundarySample> {
    let z = ray[0];
    let sp = y.shortest_paths(z, None, flavor);
    let dz: Vec<f64> = ray[1..].iter().map(|&n| sp.dist[n]).collect();
    if dz.iter().any(|d| d.is_infinite()) {
        return Err(Error::NoPath {
            space: y.spec.label.clone(),
            from: z.to_string(),
            to: "ray sample".into(),
        });
    }
    // σ is a shortest ray, so d(σ(k), σ(l)) = |d(z,σ(k)) − d(z,σ(l))|
    // along it; keep the short cross-tail exact via Dijkstra instead when
    // the caller compares different rays.
    let n = dz.len();
    let mut pairwise = vec![vec![0.0; n]; n];
    for k in 0..n {
        for l in 0..n {
            pairwise[k][l] = (dz[k] - dz[l]).abs();
        }
    }
    Ok(BoundarySample::from_distances(dz, &pairwise))
}

/// Factor-level boundary sample of a ray's projection.
fn factor_ray_sample(y: &ProductSpace, axis: usize, ray: &[NodeId]) -> Result<BoundarySample> {
    let z = y.node_point(ray[0]).factor(axis);
    let pts: Vec<Point> = ray[1..]
        .iter()
        .map(|&n| y.node_point(n).factor(axis))
        .collect();
    let mut dz = Vec::with_capacity(pts.len());
    for p in &pts {
        dz.push(y.factors[axis].distance(&z, p)?);
    }
    let n = pts.len();
    let mut pairwise = vec![vec![0.0; n]; n];
    for k in 0..n {
        for l in (k + 1)..n {
            let d = y.factors[axis].distance(&pts[k], &pts[l])?;
            pairwise[k][l] = d;
            pairwise[l][k] = d;
        }
    }
    Ok(BoundarySample::from_distances(dz, &pairwise))
}

/// Connected components of a reflexive symmetric relation.
fn partition(rel: &[Vec<bool>]) -> Vec<usize> {
    let n = rel.len();
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if class[i] != usize::MAX {
            continue;
        }
        let mut stack = vec![i];
        class[i] = next;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if rel[v][w] && class[w] == usize::MAX {
                    class[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    class
}
