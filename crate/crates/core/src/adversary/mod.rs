//! Adaptive adversary for deterministic k-median / k-means algorithms.
//!
//! The adversary answers distance queries while growing a weighted graph G
//! over the points plus a gate node `g*` at distance `log_M n` from
//! everyone. Every answer is a shortest-path distance in Ĝ, which is G plus
//! a weight-1 edge between every pair of open nodes; a node closes once its
//! degree reaches `M`. After the algorithm returns S, every center is
//! queried against every point, and the resulting shortest-path metric 𝔡
//! agrees with all answers while making S expensive.

mod audit;
mod final_metric;
mod graph;

use std::cell::{Ref, RefCell};

use serde::{Deserialize, Serialize};

pub use audit::{audit, AdversaryReport, NeighborProfile, UnitPathCheck, EXHAUSTIVE_LIMIT};
pub use final_metric::{FinalMetric, MATRIX_LIMIT};
pub use graph::{AdversaryGraph, Case, LoggedQuery};

use crate::error::{Error, Result};
use crate::metric::{DistanceOracle, Objective, QueryCounter, WeightedMetricSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversaryParams {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    /// Median uses `M = 10kδ·log2 n`; both means objectives use
    /// `M = 10kδ·(log2 n)²`.
    pub objective: Objective,
}

impl AdversaryParams {
    pub fn new(n: usize, k: usize, delta: f64, objective: Objective) -> Result<Self> {
        let p = AdversaryParams { n, k, delta, objective };
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n >= u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("adversary needs 2 <= n < 2^32, got {}", self.n)));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidParameter(format!("need 1 <= k <= n (k = {}, n = {})", self.k, self.n)));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }

    pub fn means(&self) -> bool {
        self.objective != Objective::Median
    }

    pub fn m(&self) -> f64 {
        let l = (self.n as f64).log2();
        let base = 10.0 * self.k as f64 * self.delta;
        if self.means() {
            base * l * l
        } else {
            base * l
        }
    }

    /// `log_M n`, the gate edge weight.
    pub fn gate(&self) -> f64 {
        (self.n as f64).ln() / self.m().ln()
    }

    /// `⌊log_M n⌋`, tolerant of float noise just below an integer.
    pub fn depth(&self) -> u32 {
        let g = self.gate();
        let r = g.round();
        let f = if (g - r).abs() <= 1e-9 * g.max(1.0) { r } else { g.floor() };
        f.max(0.0) as u32
    }

    /// `⌈n·k·δ⌉`
    pub fn query_budget(&self) -> u64 {
        (self.n as f64 * self.k as f64 * self.delta).ceil() as u64
    }

    /// `(10kδ/M)·n`
    pub fn closed_bound(&self) -> f64 {
        10.0 * self.k as f64 * self.delta / self.m() * self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Budget {
    /// Fail the call that would exceed this many algorithm queries.
    Enforced(u64),
    Unlimited,
}

/// [`DistanceOracle`] answering through an [`AdversaryGraph`].
#[derive(Debug)]
pub struct AdversaryOracle {
    graph: RefCell<AdversaryGraph>,
    counter: QueryCounter,
}

impl AdversaryOracle {
    pub fn new(params: AdversaryParams, budget: Budget) -> Result<Self> {
        Ok(AdversaryOracle { graph: RefCell::new(AdversaryGraph::new(params, budget)?), counter: QueryCounter::new() })
    }

    pub fn graph(&self) -> Ref<'_, AdversaryGraph> {
        self.graph.borrow()
    }

    pub fn into_graph(self) -> AdversaryGraph {
        self.graph.into_inner()
    }
}

impl DistanceOracle for AdversaryOracle {
    fn len(&self) -> usize {
        self.graph.borrow().n()
    }

    fn distance(&self, x: usize, y: usize) -> Result<f64> {
        self.counter.bump();
        self.graph.borrow_mut().answer(x, y, false)
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

/// Everything needed to replay a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub params: AdversaryParams,
    pub budget: Budget,
    pub algorithm_queries: u64,
    pub returned: Vec<usize>,
    pub centers: Vec<usize>,
    pub log: Vec<LoggedQuery>,
}

#[derive(Debug)]
pub struct Session {
    /// The finalized graph G_f.
    pub graph: AdversaryGraph,
    pub report: AdversaryReport,
}

impl Session {
    pub fn metric(&self) -> Result<FinalMetric<'_>> {
        FinalMetric::new(&self.graph)
    }

    pub fn transcript(&self) -> Transcript {
        Transcript {
            params: *self.graph.params(),
            budget: self.graph.budget(),
            algorithm_queries: self.graph.algorithm_queries(),
            returned: self.graph.returned().unwrap_or_default().to_vec(),
            centers: self.graph.centers().unwrap_or_default().to_vec(),
            log: self.graph.log().to_vec(),
        }
    }
}

/// Runs `algorithm` on the adversary with unit weights, finalizes with the
/// centers it returns and audits the result.
pub fn run_against<F>(params: AdversaryParams, budget: Budget, algorithm: F) -> Result<Session>
where
    F: FnOnce(&WeightedMetricSpace<AdversaryOracle>) -> Result<Vec<usize>>,
{
    let space = WeightedMetricSpace::unit(AdversaryOracle::new(params, budget)?);
    let returned = algorithm(&space)?;
    let mut graph = space.into_oracle().into_graph();
    graph.finalize(&returned)?;
    let report = audit(&graph)?;
    Ok(Session { graph, report })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub entries: usize,
    /// Log positions where the replayed answer differs.
    pub mismatches: Vec<usize>,
    pub report: AdversaryReport,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.report.passed()
    }
}

/// Re-answers the logged algorithm queries on a fresh adversary, finalizes
/// with the recorded centers and compares the whole log.
pub fn replay(t: &Transcript) -> Result<ReplayReport> {
    let mut graph = AdversaryGraph::new(t.params, Budget::Unlimited)?;
    for q in t.log.iter().filter(|q| !q.artificial) {
        graph.answer(q.x as usize, q.y as usize, false)?;
    }
    graph.set_algorithm_queries(t.algorithm_queries);
    graph.finalize(&t.returned)?;
    let got = graph.log();
    let mut mismatches: Vec<usize> = (0..got.len().min(t.log.len())).filter(|&i| got[i] != t.log[i]).collect();
    if got.len() != t.log.len() {
        mismatches.push(got.len().min(t.log.len()));
    }
    if graph.centers() != Some(&t.centers[..]) {
        mismatches.push(got.len());
    }
    let report = audit(&graph)?;
    Ok(ReplayReport { entries: t.log.len(), mismatches, report })
}
