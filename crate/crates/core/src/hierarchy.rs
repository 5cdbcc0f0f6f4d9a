//! Hierarchical k-median / k-means in Õ(nk) queries.
//!
//! Phase I halves the point range repeatedly into levels `Q_0 … Q_ℓ` with
//! `ℓ = ⌈log2(n/k)⌉`. Phase II walks the levels bottom-up and keeps `2k`
//! centers per part with restricted reverse greedy, where a part may only
//! keep centers its two children kept. Phase III projects every point onto
//! the `≤ 2k` survivors `V_0` and runs local search on that weighted set.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{composition_bound, local_search_on, measured_ratio};
use crate::error::{Error, Result};
use crate::greedy::{audit_certificate, res_greedy_on, BoundCertificate};
use crate::metric::{
    approx_le, cost, harmonic, nearest, opt_bruteforce, DistanceOracle, Objective, Solution, WeightedMetricSpace,
};

/// Smallest `ℓ` with `k·2^ℓ ≥ n`.
pub fn depth(n: usize, k: usize) -> usize {
    let mut l = 0;
    while k << l < n {
        l += 1;
    }
    l
}

/// ε used by the means-mode audits: `1/(1 + log2(n/k))`.
pub fn means_eps(n: usize, k: usize) -> f64 {
    1.0 / (1.0 + (n as f64 / k as f64).log2().max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionHierarchy {
    pub n: usize,
    pub k: usize,
    /// ℓ
    pub levels: usize,
    /// `parts[i][j]`: half-open range of point ids; children of `parts[i][j]`
    /// are `parts[i+1][2j]` and `parts[i+1][2j+1]`.
    pub parts: Vec<Vec<(usize, usize)>>,
    /// S_X per part, filled by [`phase2`]; empty for empty parts.
    pub solutions: Vec<Vec<Vec<usize>>>,
    pub certificates: Vec<Vec<Option<BoundCertificate>>>,
}

impl PartitionHierarchy {
    /// Phase I on `n` points; stable order, the first child takes the
    /// larger half.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!("need 1 <= k <= n (k = {k}, n = {n})")));
        }
        let levels = depth(n, k);
        let mut parts = Vec::with_capacity(levels + 1);
        parts.push(vec![(0, n)]);
        for i in 0..levels {
            let next: Vec<(usize, usize)> = parts[i]
                .iter()
                .flat_map(|&(a, b)| {
                    let mid = a + (b - a).div_ceil(2);
                    [(a, mid), (mid, b)]
                })
                .collect();
            parts.push(next);
        }
        Ok(PartitionHierarchy { n, k, levels, parts, solutions: Vec::new(), certificates: Vec::new() })
    }

    pub fn part(&self, level: usize, j: usize) -> Vec<usize> {
        let (a, b) = self.parts[level][j];
        (a..b).collect()
    }

    /// Violations of: `2^i` parts at level i, each level a partition refining
    /// the one above with sibling sizes within 1, and every part of size at
    /// most `n/2^i + 2`.
    pub fn check_structure(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (i, level) in self.parts.iter().enumerate() {
            if level.len() != 1 << i {
                bad.push(format!("level {i} has {} parts", level.len()));
            }
            let mut covered = 0;
            for &(a, b) in level {
                if a != covered || b < a {
                    bad.push(format!("level {i} is not a partition"));
                    break;
                }
                covered = b;
            }
            if covered != self.n {
                bad.push(format!("level {i} covers {covered} of {}", self.n));
            }
            let cap = self.n as f64 / level.len() as f64 + 2.0;
            if let Some(&(a, b)) = level.iter().find(|(a, b)| (b - a) as f64 > cap) {
                bad.push(format!("level {i}: part of size {} exceeds {cap}", b - a));
            }
            if i > 0 {
                for (j, pair) in level.chunks(2).enumerate() {
                    let (x1, x2) = (pair[0], pair[1]);
                    if (x1.0, x2.1) != self.parts[i - 1][j] || x1.1 != x2.0 {
                        bad.push(format!("level {i} does not refine level {}", i - 1));
                    }
                    if (x1.1 - x1.0).abs_diff(x2.1 - x2.0) > 1 {
                        bad.push(format!("level {i}: siblings {j} differ by more than 1"));
                    }
                }
            }
        }
        bad
    }
}

/// Phase I over the points of `space`. Makes no distance queries.
pub fn build_partitions<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
) -> Result<PartitionHierarchy> {
    PartitionHierarchy::new(space.n(), k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    pub parts: usize,
    pub nonempty_parts: usize,
    pub max_part: usize,
    /// Σ |candidates| over the parts of the level.
    pub candidates: usize,
    /// |V_i|
    pub survivors: usize,
    pub queries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub queries: u64,
    pub wall_micros: u64,
    pub levels: Vec<LevelStats>,
}

/// Phase II: fills `S_X` and its certificate for every part and returns
/// `V_0` (sorted) with per-level statistics.
pub fn phase2<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    hierarchy: &mut PartitionHierarchy,
    objective: Objective,
) -> Result<(Vec<usize>, Vec<LevelStats>)> {
    let k = hierarchy.k;
    let k_prime = 2 * k;
    let eps = means_eps(hierarchy.n, k);
    hierarchy.solutions = hierarchy.parts.iter().map(|l| vec![Vec::new(); l.len()]).collect();
    hierarchy.certificates = hierarchy.parts.iter().map(|l| vec![None; l.len()]).collect();
    let mut stats = Vec::with_capacity(hierarchy.levels + 1);
    for level in (0..=hierarchy.levels).rev() {
        let q0 = space.queries();
        let mut st = LevelStats {
            level,
            parts: hierarchy.parts[level].len(),
            nonempty_parts: 0,
            max_part: 0,
            candidates: 0,
            survivors: 0,
            queries: 0,
        };
        for j in 0..hierarchy.parts[level].len() {
            let domain = hierarchy.part(level, j);
            st.max_part = st.max_part.max(domain.len());
            if domain.is_empty() {
                continue;
            }
            st.nonempty_parts += 1;
            let candidates = if level == hierarchy.levels {
                domain.clone()
            } else {
                let below = &hierarchy.solutions[level + 1];
                [below[2 * j].as_slice(), below[2 * j + 1].as_slice()].concat()
            };
            st.candidates += candidates.len();
            let r = res_greedy_on(space, &domain, &candidates, k_prime, objective)?;
            let mut cert = r.certificate.with_target(k);
            if objective != Objective::Median {
                cert = cert.with_eps(eps);
            }
            st.survivors += r.centers.len();
            hierarchy.solutions[level][j] = r.centers;
            hierarchy.certificates[level][j] = Some(cert);
        }
        st.queries = space.queries() - q0;
        stats.push(st);
    }
    let mut v0 = hierarchy.solutions[0][0].clone();
    v0.sort_unstable();
    Ok((v0, stats))
}

/// The weighted projection of the space onto `V_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifiedSpace {
    /// V_0, sorted.
    pub points: Vec<usize>,
    /// w_0, parallel to `points`.
    pub weights: Vec<f64>,
    /// σ: `sigma[x]` is the nearest point of V_0 to `x`.
    pub sigma: Vec<usize>,
}

/// Projects every point onto its nearest member of `v0` (`n·|V_0|` queries)
/// and pushes the weights forward.
pub fn sparsify<O: DistanceOracle + ?Sized>(space: &WeightedMetricSpace<O>, v0: &[usize]) -> Result<SparsifiedSpace> {
    if v0.is_empty() {
        return Err(Error::EmptySet);
    }
    space.check_subset(v0)?;
    let mut points = v0.to_vec();
    points.sort_unstable();
    points.dedup();
    let mut weights = vec![0.0; points.len()];
    let mut sigma = Vec::with_capacity(space.n());
    for x in 0..space.n() {
        let (c, _) = nearest(space, x, &points)?;
        sigma.push(c);
        let slot = points.binary_search(&c).expect("nearest returns a member");
        weights[slot] += space.weight(x);
    }
    Ok(SparsifiedSpace { points, weights, sigma })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub centers: Vec<usize>,
    /// π: `pi[i]` is the center serving `points[i]` of the sparsified space.
    pub pi: Vec<usize>,
    pub swaps: usize,
}

/// Phase III: at most `k` centers from the sparsified space. Returns `V_0`
/// itself when it already has at most `k` points.
pub fn extract_k<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    sparsified: &SparsifiedSpace,
    k: usize,
    objective: Objective,
) -> Result<Extraction> {
    let r = local_search_on(space, &sparsified.points, &sparsified.weights, k, objective)?;
    Ok(Extraction { centers: r.centers, pi: r.assignment, swaps: r.swaps })
}

#[derive(Debug, Clone)]
pub struct HierarchicalRun {
    pub solution: Solution,
    pub hierarchy: PartitionHierarchy,
    pub v0: Vec<usize>,
    pub sparsified: SparsifiedSpace,
    pub extraction: Extraction,
    pub metrics: RunMetrics,
}

impl HierarchicalRun {
    /// π∘σ as a per-point center map.
    pub fn composed_map(&self) -> Vec<usize> {
        let sp = &self.sparsified;
        sp.sigma
            .iter()
            .map(|y| self.extraction.pi[sp.points.binary_search(y).expect("sigma maps into V_0")])
            .collect()
    }
}

/// Phases I–III without evaluating the final solution. This is the whole
/// algorithm as far as distance queries go.
pub fn hierarchical_centers<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
    objective: Objective,
) -> Result<(Vec<usize>, PartitionHierarchy, Vec<usize>, SparsifiedSpace, Extraction, Vec<LevelStats>)> {
    let mut hierarchy = build_partitions(space, k)?;
    let (v0, mut levels) = phase2(space, &mut hierarchy, objective)?;
    let q0 = space.queries();
    let sparsified = sparsify(space, &v0)?;
    let extraction = extract_k(space, &sparsified, k, objective)?;
    levels.push(LevelStats {
        level: 0,
        parts: 1,
        nonempty_parts: 1,
        max_part: space.n(),
        candidates: v0.len(),
        survivors: extraction.centers.len(),
        queries: space.queries() - q0,
    });
    Ok((extraction.centers.clone(), hierarchy, v0, sparsified, extraction, levels))
}

/// The full pipeline plus evaluation of the returned centers. The last
/// entry of `metrics.levels` covers Phase III.
pub fn hierarchical_cluster<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
    objective: Objective,
) -> Result<HierarchicalRun> {
    let start = Instant::now();
    let q0 = space.queries();
    let (centers, hierarchy, v0, sparsified, extraction, levels) = hierarchical_centers(space, k, objective)?;
    let solution = Solution::evaluate(space, centers, objective)?;
    let metrics = RunMetrics { queries: space.queries() - q0, wall_micros: start.elapsed().as_micros() as u64, levels };
    Ok(HierarchicalRun { solution, hierarchy, v0, sparsified, extraction, metrics })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeAudit {
    pub level: usize,
    pub index: usize,
    pub size: usize,
    pub candidates: usize,
    /// cost(S_X, X)
    pub cost: f64,
    /// cost(R, X); 0 at the deepest level where R = X.
    pub restricted_cost: f64,
    /// OPT_k(X)
    pub opt: f64,
    pub bound: f64,
    pub passed: bool,
    /// Per-removal certificate audit of this node.
    pub steps_passed: bool,
}

/// Every link of the approximation argument, measured on one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub objective: Objective,
    pub nodes: Vec<NodeAudit>,
    /// OPT_k(V)
    pub opt: f64,
    /// cost(V_0, V)
    pub bicriteria_cost: f64,
    /// Telescoped upper bound on cost(V_0, V) from the per-node bounds.
    pub bicriteria_bound: f64,
    /// Measured α of the extraction on (V_0, w_0).
    pub alpha: f64,
    /// Measured β = cost(V_0, V)/OPT.
    pub beta: f64,
    /// β implied by the telescoped bound.
    pub beta_chain: f64,
    /// cost(π∘σ)
    pub composed_cost: f64,
    /// (2α + (1+2α)β_chain)·OPT
    pub composed_bound: f64,
    pub solution_cost: f64,
    /// solution cost / OPT
    pub ratio: f64,
    /// composed_bound / OPT
    pub ratio_bound: f64,
    pub passed: bool,
}

/// Additive coefficient of OPT_k(X) for a part whose greedy run starts from
/// `m` candidates and keeps `2k`: median sums `2/(i−k)` over the removals;
/// means telescopes the per-removal bound with ε.
fn node_terms(objective: Objective, m: usize, k: usize, eps: f64, internal: bool) -> (f64, f64) {
    if m <= 2 * k {
        return (1.0, 0.0);
    }
    match objective {
        Objective::Median if internal => (1.0, 2.0 * (harmonic(3 * k) - harmonic(k))),
        Objective::Median => (1.0, ((2 * k + 1)..=m).map(|i| 2.0 / (i - k) as f64).sum()),
        _ => {
            let r = 1.0 + 3.0 * eps / k as f64;
            let steps = (m - 2 * k) as i32;
            let mult = r.powi(steps);
            (mult, (mult - 1.0) / (r - 1.0) * (4.0 + 2.0 / eps) / k as f64)
        }
    }
}

/// Measures every bound along the run with brute-force optima. Intended for
/// instances small enough to enumerate (a few dozen points).
///
/// Means objectives compose in normalized units for the extraction step.
pub fn audit_chain<O: DistanceOracle>(
    space: &WeightedMetricSpace<O>,
    run: &HierarchicalRun,
    objective: Objective,
) -> Result<ChainReport> {
    let h = &run.hierarchy;
    let k = h.k;
    let eps = means_eps(h.n, k);
    let raw = match objective {
        Objective::Median => Objective::Median,
        _ => Objective::Means,
    };
    let mut nodes = Vec::new();
    // chain[level][j]: telescoped bound on cost(S_X, X), raw units
    let mut chain: Vec<Vec<f64>> = h.parts.iter().map(|l| vec![0.0; l.len()]).collect();
    for level in (0..=h.levels).rev() {
        for j in 0..h.parts[level].len() {
            let domain = h.part(level, j);
            if domain.is_empty() {
                continue;
            }
            let internal = level < h.levels;
            let sx = &h.solutions[level][j];
            let cert = h.certificates[level][j].as_ref().ok_or(Error::MissingReference("phase II certificate"))?;
            let (opt, _) = opt_bruteforce(space, k, &domain, &domain, raw)?;
            let c = cost(space, sx, &domain, raw)?;
            let (restricted, below) = if internal {
                let r = [h.solutions[level + 1][2 * j].as_slice(), h.solutions[level + 1][2 * j + 1].as_slice()].concat();
                (cost(space, &r, &domain, raw)?, chain[level + 1][2 * j] + chain[level + 1][2 * j + 1])
            } else {
                (0.0, 0.0)
            };
            let (mult, add) = node_terms(objective, cert.m, k, eps, internal);
            let bound = mult * restricted + add * opt;
            chain[level][j] = mult * below + add * opt;
            let steps = audit_certificate(cert, Some(opt))?;
            nodes.push(NodeAudit {
                level,
                index: j,
                size: domain.len(),
                candidates: cert.m,
                cost: c,
                restricted_cost: restricted,
                opt,
                bound,
                passed: approx_le(c, bound),
                steps_passed: steps.passed(),
            });
        }
    }
    let all = space.points();
    let (opt_raw, _) = opt_bruteforce(space, k, &all, &all, raw)?;
    let bicriteria_raw = cost(space, &run.v0, &all, raw)?;
    let bound_raw = chain[0][0];

    // extraction step in objective units (normalized for means)
    let unit = if objective == Objective::Median { Objective::Median } else { Objective::NormalizedMeans };
    let opt = unit.finish(opt_raw);
    let sp = &run.sparsified;
    let mut w_full = vec![0.0; space.n()];
    for (&y, &w) in sp.points.iter().zip(&sp.weights) {
        w_full[y] = w;
    }
    let sparse = space.reweighted(w_full)?;
    let (opt_sparse, _) = opt_bruteforce(&sparse, k, &sp.points, &sp.points, unit)?;
    let mut pi_raw = 0.0;
    for (i, &y) in sp.points.iter().enumerate() {
        pi_raw += sp.weights[i] * unit.point_cost(space.d(y, run.extraction.pi[i])?);
    }
    let alpha = measured_ratio(unit.finish(pi_raw), opt_sparse);
    let beta = measured_ratio(unit.finish(bicriteria_raw), opt);
    let beta_chain = measured_ratio(unit.finish(bound_raw), opt).max(beta);
    let composed = run.composed_map();
    let mut comp_raw = 0.0;
    for (x, &c) in composed.iter().enumerate() {
        comp_raw += space.weight(x) * unit.point_cost(space.d(x, c)?);
    }
    let composed_cost = unit.finish(comp_raw);
    let composed_bound = composition_bound(alpha, beta_chain, opt);
    let solution_cost = unit.finish(cost(space, &run.solution.centers, &all, raw)?);
    let passed = nodes.iter().all(|n| n.passed && n.steps_passed)
        && approx_le(bicriteria_raw, bound_raw)
        && approx_le(composed_cost, composed_bound)
        && approx_le(solution_cost, composed_cost);
    Ok(ChainReport {
        objective,
        nodes,
        opt,
        bicriteria_cost: objective.finish(bicriteria_raw),
        bicriteria_bound: objective.finish(bound_raw),
        alpha,
        beta,
        beta_chain,
        composed_cost,
        composed_bound,
        solution_cost,
        ratio: measured_ratio(solution_cost, opt),
        ratio_bound: measured_ratio(composed_bound, opt),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{MatrixOracle, Norm, PointsOracle};

    fn line(xs: &[f64]) -> WeightedMetricSpace<PointsOracle> {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        WeightedMetricSpace::unit(PointsOracle::from_points(&pts, Norm::L1).unwrap())
    }

    fn sizes(h: &PartitionHierarchy, level: usize) -> Vec<usize> {
        h.parts[level].iter().map(|(a, b)| b - a).collect()
    }

    #[test]
    fn depth_values() {
        assert_eq!(depth(8, 1), 3);
        assert_eq!(depth(9, 1), 4);
        assert_eq!(depth(1000, 10), 7);
        assert_eq!(depth(4, 4), 0);
        assert_eq!(depth(5, 4), 1);
    }

    #[test]
    fn halving() {
        let h = PartitionHierarchy::new(8, 1).unwrap();
        assert_eq!(h.levels, 3);
        assert_eq!(sizes(&h, 3), vec![1; 8]);
        let h = PartitionHierarchy::new(5, 1).unwrap();
        assert_eq!(sizes(&h, 1), vec![3, 2]);
        assert_eq!(sizes(&h, 3), vec![1, 1, 1, 0, 1, 0, 1, 0]);
        assert!(h.check_structure().is_empty());
        let h = PartitionHierarchy::new(1000, 10).unwrap();
        assert_eq!(h.levels, 7);
        assert!(sizes(&h, 7).iter().all(|&s| s <= 9));
        assert!(PartitionHierarchy::new(3, 4).is_err());
    }

    #[test]
    fn phase_one_is_free() {
        let s = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        build_partitions(&s, 2).unwrap();
        assert_eq!(s.queries(), 0);
    }

    #[test]
    fn k_equals_n() {
        let s = line(&[0.0, 3.0, 7.0]);
        let run = hierarchical_cluster(&s, 3, Objective::Median).unwrap();
        assert_eq!(run.solution.centers, vec![0, 1, 2]);
        assert_eq!(run.solution.cost, 0.0);
    }

    #[test]
    fn separated_clusters() {
        let mut xs: Vec<f64> = (0..20).map(|i| (i % 10) as f64 * 0.1).collect();
        for x in xs.iter_mut().skip(10) {
            *x += 1000.0;
        }
        let s = line(&xs);
        let run = hierarchical_cluster(&s, 2, Objective::Median).unwrap();
        let left = run.solution.centers.iter().filter(|&&c| c < 10).count();
        assert_eq!(left, 1);
        assert!(run.solution.cost <= 20.0);
    }

    #[test]
    fn zero_metric() {
        let s = WeightedMetricSpace::unit(MatrixOracle::new(6, vec![0.0; 36]).unwrap());
        let run = hierarchical_cluster(&s, 1, Objective::Median).unwrap();
        assert_eq!(run.solution.cost, 0.0);
        let rep = audit_chain(&s, &run, Objective::Median).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.ratio, 0.0);
    }

    #[test]
    fn sparsify_weights() {
        let s = line(&[0.0, 1.0, 5.0, 6.0]);
        let sp = sparsify(&s, &[2]).unwrap();
        assert_eq!((sp.points.clone(), sp.weights.clone()), (vec![2], vec![4.0]));
        let sp = sparsify(&s, &[3, 0, 1, 2]).unwrap();
        assert_eq!(sp.sigma, vec![0, 1, 2, 3]);
        assert_eq!(sp.weights, vec![1.0; 4]);
    }

    #[test]
    fn small_chain_holds() {
        let xs = [0.0, 1.5, 2.0, 7.0, 7.5, 8.0, 20.0, 21.0, 22.5, 30.0, 31.0, 33.0];
        let s = line(&xs);
        for obj in [Objective::Median, Objective::Means] {
            let run = hierarchical_cluster(&s, 2, obj).unwrap();
            assert!(run.v0.len() <= 4);
            let rep = audit_chain(&s, &run, obj).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }
}
