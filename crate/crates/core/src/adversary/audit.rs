//! Checks run on a finalized adversary graph.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::final_metric::FinalMetric;
use super::graph::AdversaryGraph;
use crate::error::Result;
use crate::metric::{approx_le, verify_metric, DistanceOracle, MetricReport, Objective, VerifyMode, WeightedMetricSpace};

/// Largest n for the exhaustive metric and unit-path checks.
pub const EXHAUSTIVE_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborProfile {
    pub center: usize,
    /// `counts[i-1]`: points at distance exactly `i`, for `i = 1..=r`.
    pub counts: Vec<usize>,
    /// `M·(M−1)^{i−1}`
    pub bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitPathCheck {
    pub edges_checked: usize,
    /// Edges `(x, y, w)` with no unit-edge path of total weight `w`.
    pub violations: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryReport {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub objective: Objective,
    pub m: f64,
    /// log_M n
    pub gate: f64,
    /// ⌊log_M n⌋
    pub r: u32,
    /// `r = 0`: nothing is asserted about the ratio.
    pub trivial: bool,
    pub algorithm_queries: u64,
    pub logged: usize,
    pub centers: Vec<usize>,

    pub consistency_checked: usize,
    /// Logged `(x, y, answer, 𝔡(x,y))` that disagree.
    pub inconsistent: Vec<(usize, usize, f64, f64)>,

    /// Sum of 𝔡(x, S), squared in means mode.
    pub cost: f64,
    /// `(n/2)·r`, or `(n/2)·r²` in means mode.
    pub cost_lower_bound: f64,

    pub witness: Vec<usize>,
    pub witness_cost: f64,
    /// `3n`, or `5n` in means mode.
    pub witness_bound: f64,

    pub closed: usize,
    /// `(10kδ/M)·n`
    pub closed_bound: f64,

    pub profiles: Vec<NeighborProfile>,

    /// cost / witness_cost
    pub ratio: f64,
    /// `r/6`, or `r²/10` in means mode.
    pub ratio_bound: f64,

    /// Edges of G_f including the gate edges.
    pub edges: usize,
    /// `2·(algorithm queries) + 2nk + n`
    pub edge_bound: f64,

    /// Largest 𝔡 from a center; never above `2·log_M n`.
    pub max_distance: f64,

    pub unit_paths: Option<UnitPathCheck>,
    pub metric: Option<MetricReport>,
}

impl AdversaryReport {
    pub fn consistent(&self) -> bool {
        self.inconsistent.is_empty()
    }

    pub fn cost_ok(&self) -> bool {
        approx_le(self.cost_lower_bound, self.cost)
    }

    pub fn witness_ok(&self) -> bool {
        approx_le(self.witness_cost, self.witness_bound)
    }

    pub fn closed_ok(&self) -> bool {
        approx_le(self.closed as f64, self.closed_bound)
    }

    pub fn profile_ok(&self) -> bool {
        self.profiles.iter().all(|p| p.counts.iter().zip(&p.bounds).all(|(&c, &b)| approx_le(c as f64, b)))
    }

    pub fn ratio_ok(&self) -> bool {
        self.trivial || approx_le(self.ratio_bound, self.ratio)
    }

    pub fn edges_ok(&self) -> bool {
        approx_le(self.edges as f64, self.edge_bound)
    }

    pub fn diameter_ok(&self) -> bool {
        approx_le(self.max_distance, 2.0 * self.gate)
    }

    pub fn unit_paths_ok(&self) -> bool {
        self.unit_paths.as_ref().is_none_or(|u| u.violations.is_empty())
    }

    pub fn metric_ok(&self) -> bool {
        self.metric.as_ref().is_none_or(MetricReport::is_metric)
    }

    /// Named pass/fail lines in a fixed order.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("consistency", self.consistent()),
            ("cost lower bound", self.cost_ok()),
            ("witness upper bound", self.witness_ok()),
            ("closed nodes", self.closed_ok()),
            ("neighbor profile", self.profile_ok()),
            ("implied ratio", self.ratio_ok()),
            ("edge count", self.edges_ok()),
            ("diameter", self.diameter_ok()),
            ("unit paths", self.unit_paths_ok()),
            ("metric", self.metric_ok()),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.1)
    }
}

fn rows(metric: &FinalMetric<'_>, set: &[usize]) -> Vec<Vec<f64>> {
    let n = metric.len();
    set.iter().map(|&s| (0..n).map(|y| metric.value(s, y)).collect()).collect()
}

fn cost_of(rows: &[Vec<f64>], n: usize, means: bool) -> f64 {
    (0..n)
        .map(|y| {
            let d = rows.iter().map(|r| r[y]).fold(f64::INFINITY, f64::min);
            if means {
                d * d
            } else {
                d
            }
        })
        .sum()
}

/// Every edge of weight at most `log_M n` has a path of weight-1 edges with
/// the same total weight.
fn unit_paths(graph: &AdversaryGraph) -> UnitPathCheck {
    let n = graph.n();
    let mut unit = vec![Vec::new(); n];
    let edges = graph.edges();
    for &(x, y, w) in &edges {
        if w == 1.0 {
            unit[x].push(y);
            unit[y].push(x);
        }
    }
    let mut check = UnitPathCheck { edges_checked: 0, violations: Vec::new() };
    let mut dist = vec![usize::MAX; n];
    let mut last = usize::MAX;
    for &(x, y, w) in &edges {
        if !approx_le(w, graph.gate()) {
            continue;
        }
        if x != last {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[x] = 0;
            let mut queue = VecDeque::from([x]);
            while let Some(u) = queue.pop_front() {
                for &v in &unit[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            last = x;
        }
        check.edges_checked += 1;
        if dist[y] as f64 != w {
            check.violations.push((x, y, w));
        }
    }
    check
}

/// Runs every check on a finalized graph; errors with `NotFinalized`
/// otherwise. The exhaustive metric and unit-path checks run for
/// `n ≤ EXHAUSTIVE_LIMIT` only.
pub fn audit(graph: &AdversaryGraph) -> Result<AdversaryReport> {
    let metric = FinalMetric::new(graph)?;
    let p = *graph.params();
    let (n, k) = (p.n, p.k);
    let means = p.means();
    let r = p.depth();
    let rf = f64::from(r);
    let centers = graph.centers().expect("finalized").to_vec();

    let mut inconsistent = Vec::new();
    for q in graph.log() {
        let (x, y) = (q.x as usize, q.y as usize);
        let d = metric.value(x, y);
        if d != q.answer {
            inconsistent.push((x, y, q.answer, d));
        }
    }

    let center_rows = rows(&metric, &centers);
    let cost = cost_of(&center_rows, n, means);
    let max_distance = center_rows.iter().flatten().copied().fold(0.0, f64::max);
    let m = graph.m();
    let profiles = centers
        .iter()
        .zip(&center_rows)
        .map(|(&c, row)| NeighborProfile {
            center: c,
            counts: (1..=r).map(|i| row.iter().filter(|&&d| d == f64::from(i)).count()).collect(),
            bounds: (1..=r).map(|i| m * (m - 1.0).powi(i as i32 - 1)).collect(),
        })
        .collect();

    let first_open = (0..n).find(|&x| graph.is_open(x)).unwrap_or(0);
    let mut witness = vec![first_open];
    witness.extend((0..n).filter(|&x| x != first_open).take(k - 1));
    let witness_cost = cost_of(&rows(&metric, &witness), n, means);
    let witness_cost = if graph.open_count() == 0 { f64::INFINITY } else { witness_cost };

    let (cost_lower_bound, witness_bound, ratio_bound) = if means {
        (n as f64 / 2.0 * rf * rf, 5.0 * n as f64, rf * rf / 10.0)
    } else {
        (n as f64 / 2.0 * rf, 3.0 * n as f64, rf / 6.0)
    };

    let small = n <= EXHAUSTIVE_LIMIT;
    let metric_report = if small {
        let space = WeightedMetricSpace::unit(metric.to_matrix()?);
        Some(verify_metric(&space, VerifyMode::Exhaustive)?)
    } else {
        None
    };

    Ok(AdversaryReport {
        n,
        k,
        delta: p.delta,
        objective: p.objective,
        m,
        gate: graph.gate(),
        r,
        trivial: r == 0,
        algorithm_queries: graph.algorithm_queries(),
        logged: graph.log().len(),
        centers,
        consistency_checked: graph.log().len(),
        inconsistent,
        cost,
        cost_lower_bound,
        witness,
        witness_cost,
        witness_bound,
        closed: graph.closed_count(),
        closed_bound: p.closed_bound(),
        profiles,
        ratio: crate::baselines::measured_ratio(cost, witness_cost),
        ratio_bound,
        edges: graph.edge_count(),
        edge_bound: 2.0 * graph.algorithm_queries() as f64 + 2.0 * (n * k) as f64 + n as f64,
        max_distance,
        unit_paths: small.then(|| unit_paths(graph)),
        metric: metric_report,
    })
}
