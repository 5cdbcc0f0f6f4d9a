//! The multi-level partition algorithm with branching `q_i = ⌈γ^{1/2^i}⌉`.
//!
//! Each part of each level is solved on its surviving weighted points by
//! [`local_search_on`]; weights move onto the chosen centers and the next
//! level up only sees those centers. The output mapping is the composition
//! of the per-level assignments.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::local_search::local_search_on;
use crate::error::{Error, Result};
use crate::hierarchy::{LevelStats, RunMetrics};
use crate::metric::{DistanceOracle, Objective, Solution, WeightedMetricSpace};

/// Ceiling that ignores float noise just above an integer.
fn ceil_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuhaHierarchy {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    /// n/k
    pub gamma: f64,
    /// Number of refinement levels below the root.
    pub levels: usize,
    /// `q[i-1]` is the branching factor from level `i−1` to level `i`.
    pub q: Vec<usize>,
    /// `parts[i]` lists level-`i` parts as half-open ranges of point ids.
    pub parts: Vec<Vec<(usize, usize)>>,
}

impl GuhaHierarchy {
    /// Builds the partition levels; no distance queries.
    pub fn build(n: usize, k: usize, delta: f64) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(Error::InvalidParameter(format!("need 1 <= k <= n (k = {k}, n = {n})")));
        }
        let gamma = n as f64 / k as f64;
        if !(delta >= 2.0 && crate::metric::approx_le(delta, gamma)) {
            return Err(Error::InvalidParameter(format!("delta must lie in [2, n/k = {gamma}], got {delta}")));
        }
        let ratio = gamma.ln() / delta.ln();
        let levels = ceil_tol(ratio.log2()).max(0.0) as usize;
        let q: Vec<usize> = (1..=levels).map(|i| ceil_tol(gamma.powf(0.5f64.powi(i as i32))) as usize).collect();
        let mut parts = vec![vec![(0, n)]];
        for &qi in &q {
            let mut next = Vec::with_capacity(parts.last().unwrap().len() * qi);
            for &(a, b) in parts.last().unwrap() {
                let len = b - a;
                let (base, extra) = (len / qi, len % qi);
                let mut start = a;
                for j in 0..qi {
                    let size = base + usize::from(j < extra);
                    next.push((start, start + size));
                    start += size;
                }
            }
            parts.push(next);
        }
        Ok(GuhaHierarchy { n, k, delta, gamma, levels, q, parts })
    }

    /// Part-size bound `n/|Q_i| + i` and the product bounds
    /// `γ^{1−1/2^i} ≤ |Q_i| ≤ e^i·γ^{1−1/2^i}` at every level. Returns the
    /// violated statements.
    pub fn check_structure(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (i, level) in self.parts.iter().enumerate() {
            let count = level.len() as f64;
            let expected: usize = self.q[..i].iter().product();
            if level.len() != expected {
                bad.push(format!("level {i} has {} parts, expected {expected}", level.len()));
            }
            let mut covered = 0;
            for &(a, b) in level {
                if a != covered {
                    bad.push(format!("level {i} is not a partition"));
                    break;
                }
                covered = b;
            }
            if covered != self.n {
                bad.push(format!("level {i} covers {covered} of {} points", self.n));
            }
            let cap = self.n as f64 / count + i as f64;
            if let Some(&(a, b)) = level.iter().find(|(a, b)| !crate::metric::approx_le((b - a) as f64, cap)) {
                bad.push(format!("level {i}: part of size {} exceeds {cap}", b - a));
            }
            let expo = 1.0 - 0.5f64.powi(i as i32);
            let lo = self.gamma.powf(expo);
            let hi = (i as f64).exp() * lo;
            if !crate::metric::approx_le(lo, count) || !crate::metric::approx_le(count, hi) {
                bad.push(format!("level {i}: |Q_i| = {count} outside [{lo}, {hi}]"));
            }
        }
        bad
    }
}

/// One level of the bottom-up pass: the weighted points that entered it and
/// where each was sent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuhaLevel {
    pub level: usize,
    /// V_{i+1}, sorted.
    pub points: Vec<usize>,
    /// w_{i+1}, parallel to `points`.
    pub weights: Vec<f64>,
    /// σ_i, parallel to `points`.
    pub image: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GuhaRun {
    /// Final centers with nearest-center assignment.
    pub solution: Solution,
    /// Composed mapping σ: `sigma[x]` is the center `x` was routed to.
    pub sigma: Vec<usize>,
    /// Objective value of `sigma` itself.
    pub sigma_cost: f64,
    pub hierarchy: GuhaHierarchy,
    /// Bottom-up, starting at the deepest level.
    pub passes: Vec<GuhaLevel>,
    pub metrics: RunMetrics,
}

impl GuhaRun {
    /// Splits the composed mapping at the deepest level: `sigma` is that
    /// level's assignment and `pi[y]` sends each of its centers `y` through
    /// the remaining levels. Entries of `pi` outside the image are `y`.
    pub fn split_maps(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.sigma.len();
        let Some(first) = self.passes.first() else {
            let id: Vec<usize> = (0..n).collect();
            return (id.clone(), id);
        };
        let mut pi: Vec<usize> = (0..n).collect();
        for pass in &self.passes[1..] {
            let mut step: Vec<usize> = (0..n).collect();
            for (&p, &c) in pass.points.iter().zip(&pass.image) {
                step[p] = c;
            }
            for y in pi.iter_mut() {
                *y = step[*y];
            }
        }
        (first.image.clone(), pi)
    }
}

/// Runs the bottom-up pass and returns the final centers, the per-level
/// passes and the composed mapping, without evaluating the solution.
pub fn guha_centers<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
    delta: f64,
    objective: Objective,
) -> Result<(Vec<usize>, Vec<usize>, GuhaHierarchy, Vec<GuhaLevel>, Vec<LevelStats>)> {
    let n = space.n();
    if k >= n {
        let all = space.points();
        let trivial = GuhaHierarchy {
            n,
            k: n,
            delta,
            gamma: 1.0,
            levels: 0,
            q: vec![],
            parts: vec![vec![(0, n)]],
        };
        return Ok((all.clone(), all, trivial, Vec::new(), Vec::new()));
    }
    let hierarchy = GuhaHierarchy::build(n, k, delta)?;
    let mut current: Vec<usize> = space.points();
    let mut weight: Vec<f64> = space.weights().to_vec();
    // rep[x]: where x has been routed so far
    let mut rep: Vec<usize> = space.points();
    let mut passes = Vec::new();
    let mut stats = Vec::new();
    for level in (0..=hierarchy.levels).rev() {
        let q0 = space.queries();
        let mut image_of = vec![usize::MAX; n];
        let mut next_points = Vec::new();
        let mut next_weight = vec![0.0; n];
        let mut nonempty = 0;
        let mut max_part = 0;
        let mut cursor = 0;
        for &(a, b) in &hierarchy.parts[level] {
            let start = cursor;
            while cursor < current.len() && current[cursor] < b {
                cursor += 1;
            }
            let pts = &current[start..cursor];
            debug_assert!(pts.iter().all(|&p| p >= a));
            max_part = max_part.max(b - a);
            if pts.is_empty() {
                continue;
            }
            nonempty += 1;
            let ws: Vec<f64> = pts.iter().map(|&p| weight[p]).collect();
            let r = local_search_on(space, pts, &ws, k, objective)?;
            for (i, &p) in pts.iter().enumerate() {
                let c = r.assignment[i];
                image_of[p] = c;
                next_weight[c] += ws[i];
            }
            let mut centers = r.centers;
            centers.sort_unstable();
            next_points.extend(centers);
        }
        passes.push(GuhaLevel {
            level,
            points: current.clone(),
            weights: current.iter().map(|&p| weight[p]).collect(),
            image: current.iter().map(|&p| image_of[p]).collect(),
        });
        for r in rep.iter_mut() {
            *r = image_of[*r];
        }
        stats.push(LevelStats {
            level,
            parts: hierarchy.parts[level].len(),
            nonempty_parts: nonempty,
            max_part,
            candidates: current.len(),
            survivors: next_points.len(),
            queries: space.queries() - q0,
        });
        current = next_points;
        weight = next_weight;
    }
    Ok((current, rep, hierarchy, passes, stats))
}

/// Guha et al. hierarchical clustering with local search as the per-part
/// solver. Requires `2 ≤ δ ≤ n/k` unless `k ≥ n`, in which case every point
/// is returned.
pub fn guha_hierarchical<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
    delta: f64,
    objective: Objective,
) -> Result<GuhaRun> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let start = Instant::now();
    let q0 = space.queries();
    let (centers, sigma, hierarchy, passes, levels) = guha_centers(space, k, delta, objective)?;
    let mut sum = 0.0;
    for (x, &c) in sigma.iter().enumerate() {
        sum += space.weight(x) * objective.point_cost(space.d(x, c)?);
    }
    let solution = Solution::evaluate(space, centers, objective)?;
    let metrics = RunMetrics {
        queries: space.queries() - q0,
        wall_micros: start.elapsed().as_micros() as u64,
        levels,
    };
    Ok(GuhaRun { solution, sigma, sigma_cost: objective.finish(sum), hierarchy, passes, metrics })
}
