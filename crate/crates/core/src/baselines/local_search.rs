//! Deterministic single-swap local search.

use crate::error::{Error, Result};
use crate::metric::{DistanceOracle, Objective, Solution, WeightedMetricSpace};

/// A swap is applied only when it shrinks the cost by at least this factor.
pub const IMPROVEMENT_FACTOR: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchResult {
    /// Centers in slot order; a swap replaces its slot in place.
    pub centers: Vec<usize>,
    /// Weighted sum of point costs over the input points (squared distances
    /// for both means objectives).
    pub raw_cost: f64,
    pub swaps: usize,
    /// `assignment[i]` is the center serving `points[i]` (sorted order).
    pub assignment: Vec<usize>,
}

/// Pairwise point costs over a sorted point list; each unordered pair is
/// queried once.
struct Table {
    points: Vec<usize>,
    weights: Vec<f64>,
    pc: Vec<f64>,
}

impl Table {
    fn build<O: DistanceOracle + ?Sized>(
        space: &WeightedMetricSpace<O>,
        points: &[usize],
        weights: &[f64],
        objective: Objective,
    ) -> Result<Table> {
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by_key(|&i| points[i]);
        let pts: Vec<usize> = idx.iter().map(|&i| points[i]).collect();
        if pts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("local search points must be distinct".into()));
        }
        let ws: Vec<f64> = idx.iter().map(|&i| weights[i]).collect();
        let m = pts.len();
        let mut pc = vec![0.0; m * m];
        for i in 0..m {
            for j in (i + 1)..m {
                let c = objective.point_cost(space.d(pts[i], pts[j])?);
                pc[i * m + j] = c;
                pc[j * m + i] = c;
            }
        }
        Ok(Table { points: pts, weights: ws, pc })
    }

    fn m(&self) -> usize {
        self.points.len()
    }

    #[inline]
    fn at(&self, x: usize, c: usize) -> f64 {
        self.pc[x * self.m() + c]
    }

    /// Nearest slot (ties to the smaller point, i.e. smaller local index),
    /// its point cost, and the second-smallest point cost.
    fn nearest_two(&self, x: usize, slots: &[usize]) -> (usize, f64, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut second = f64::INFINITY;
        for (s, &c) in slots.iter().enumerate() {
            let v = self.at(x, c);
            if v < best.1 || (v == best.1 && c < slots.get(best.0).copied().unwrap_or(usize::MAX)) {
                second = second.min(best.1);
                best = (s, v);
            } else {
                second = second.min(v);
            }
        }
        (best.0, best.1, second)
    }

    fn cost(&self, slots: &[usize]) -> f64 {
        (0..self.m()).map(|x| self.weights[x] * self.nearest_two(x, slots).1).sum()
    }
}

fn search(table: &Table, k: usize) -> (Vec<usize>, f64, usize) {
    let m = table.m();
    let mut slots: Vec<usize> = (0..k).collect();
    let mut in_s = vec![false; m];
    for &s in &slots {
        in_s[s] = true;
    }
    let mut cost = table.cost(&slots);
    let mut swaps = 0;
    let mut n1 = vec![0usize; m];
    let mut d1 = vec![0.0; m];
    let mut d2 = vec![0.0; m];
    let mut per_slot = vec![0.0; k];
    loop {
        for x in 0..m {
            let (s, a, b) = table.nearest_two(x, &slots);
            n1[x] = s;
            d1[x] = a;
            d2[x] = b;
        }
        // delta(slot j -> p) = common(p) + per_slot(p)[j]
        let mut best: Option<(f64, usize, usize)> = None;
        for p in 0..m {
            if in_s[p] {
                continue;
            }
            let mut common = 0.0;
            per_slot.iter_mut().for_each(|v| *v = 0.0);
            for x in 0..m {
                let w = table.weights[x];
                let dp = table.at(x, p);
                if dp < d1[x] {
                    common += w * (dp - d1[x]);
                } else {
                    per_slot[n1[x]] += w * (dp.min(d2[x]) - d1[x]);
                }
            }
            for (j, extra) in per_slot.iter().enumerate() {
                let delta = common + extra;
                if best.is_none_or(|(b, _, _)| delta < b) {
                    best = Some((delta, j, p));
                }
            }
        }
        let Some((delta, j, p)) = best else { break };
        if cost < IMPROVEMENT_FACTOR * (cost + delta) {
            break;
        }
        let old = slots[j];
        slots[j] = p;
        let fresh = table.cost(&slots);
        if fresh >= cost {
            slots[j] = old;
            break;
        }
        in_s[old] = false;
        in_s[p] = true;
        cost = fresh;
        swaps += 1;
    }
    (slots, cost, swaps)
}

/// Local search on the weighted subspace `(points, weights)`: centers are
/// drawn from `points` and cost is measured over them. Starts from the `k`
/// smallest point ids and applies the best single swap while it improves
/// the cost by a factor of at least [`IMPROVEMENT_FACTOR`].
///
/// Makes `m(m−1)/2` queries for `m` points, none when `k ≥ m`.
pub fn local_search_on<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    points: &[usize],
    weights: &[f64],
    k: usize,
    objective: Objective,
) -> Result<LocalSearchResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if points.len() != weights.len() {
        return Err(Error::InvalidParameter("points and weights differ in length".into()));
    }
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    space.check_subset(points)?;
    if k >= points.len() {
        let mut centers = points.to_vec();
        centers.sort_unstable();
        centers.dedup();
        if centers.len() == points.len() {
            return Ok(LocalSearchResult { assignment: centers.clone(), centers, raw_cost: 0.0, swaps: 0 });
        }
    }
    let table = Table::build(space, points, weights, objective)?;
    let (slots, raw_cost, swaps) = search(&table, k.min(table.m()));
    let assignment = (0..table.m()).map(|x| table.points[slots[table.nearest_two(x, &slots).0]]).collect();
    Ok(LocalSearchResult { centers: slots.iter().map(|&s| table.points[s]).collect(), raw_cost, swaps, assignment })
}

/// Local search over the whole space with its own weights.
pub fn local_search_kmedian<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
    objective: Objective,
) -> Result<Solution> {
    let r = local_search_on(space, &space.points(), space.weights(), k, objective)?;
    Ok(Solution { centers: r.centers, assignment: r.assignment, cost: objective.finish(r.raw_cost), objective })
}
