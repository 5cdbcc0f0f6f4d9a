//! Restricted reverse greedy.
//!
//! Starting from `S = X`, repeatedly drop the center whose removal raises the
//! cost the least until `|S| = k'`. Each point keeps its candidate list sorted
//! by distance with two cursors (nearest and second-nearest live center), so
//! one removal costs O(n) plus amortized cursor movement, and the removal
//! deltas `change(y) = Σ_{x ∈ C(y)} w(x)·(obj(d₂(x)) − obj(d₁(x)))` are
//! rebuilt in a single pass over the points after every step.
//!
//! Every run records a [`BoundCertificate`]: the nested cost sequence
//! `cost(S_m) ≤ … ≤ cost(S_{k'})`, which [`audit_certificate`] checks against
//! the per-removal bound `cost(S_{i−1}) − cost(S_i) ≤ 2/(i−k)·OPT_k` and its
//! telescoped sum (or the squared-distance analogue for k-means).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{approx_le, DistanceOracle, Objective, Solution, WeightedMetricSpace};

/// Live data structures of one restricted reverse greedy run.
#[derive(Debug, Clone)]
pub struct GreedyState {
    objective: Objective,
    domain: Vec<usize>,
    weights: Vec<f64>,
    candidates: Vec<usize>,
    alive: Vec<bool>,
    size: usize,
    // Row x (m entries): candidate slots sorted by (distance, point id), and
    // the matching point costs obj(d).
    order: Vec<u32>,
    pcost: Vec<f64>,
    first: Vec<u32>,
    second: Vec<u32>,
    change: Vec<f64>,
    cost: f64,
}

impl GreedyState {
    /// Builds the sorted lists for every domain point over every candidate:
    /// exactly `|domain|·|candidates|` queries.
    pub fn new<O: DistanceOracle + ?Sized>(
        space: &WeightedMetricSpace<O>,
        domain: &[usize],
        candidates: &[usize],
        objective: Objective,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::EmptySet);
        }
        space.check_subset(domain)?;
        space.check_subset(candidates)?;
        let mut seen = std::collections::HashSet::with_capacity(candidates.len());
        let candidates: Vec<usize> = candidates.iter().copied().filter(|c| seen.insert(*c)).collect();
        let m = candidates.len();
        let n = domain.len();

        let mut order = Vec::with_capacity(n * m);
        let mut pcost = Vec::with_capacity(n * m);
        let mut row: Vec<(f64, usize, u32)> = Vec::with_capacity(m);
        for &x in domain {
            row.clear();
            for (slot, &c) in candidates.iter().enumerate() {
                row.push((space.d(x, c)?, c, slot as u32));
            }
            row.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(d, _, slot) in &row {
                order.push(slot);
                pcost.push(objective.point_cost(d));
            }
        }

        let mut state = GreedyState {
            objective,
            domain: domain.to_vec(),
            weights: domain.iter().map(|&x| space.weight(x)).collect(),
            candidates,
            alive: vec![true; m],
            size: m,
            order,
            pcost,
            first: vec![0; n],
            second: vec![1; n],
            change: vec![0.0; m],
            cost: 0.0,
        };
        state.refresh();
        Ok(state)
    }

    fn m(&self) -> usize {
        self.candidates.len()
    }

    /// Moves every cursor to the first two live entries and recomputes the
    /// cost and all removal deltas in one pass over the points.
    fn refresh(&mut self) {
        let m = self.m();
        for c in self.change.iter_mut() {
            *c = 0.0;
        }
        let mut cost = 0.0;
        for x in 0..self.domain.len() {
            let row = &self.order[x * m..(x + 1) * m];
            let mut f = self.first[x] as usize;
            while !self.alive[row[f] as usize] {
                f += 1;
            }
            let mut s = (self.second[x] as usize).max(f + 1);
            while s < m && !self.alive[row[s] as usize] {
                s += 1;
            }
            self.first[x] = f as u32;
            self.second[x] = s as u32;
            let w = self.weights[x];
            let d1 = self.pcost[x * m + f];
            cost += w * d1;
            if s < m {
                self.change[row[f] as usize] += w * (self.pcost[x * m + s] - d1);
            }
        }
        self.cost = cost;
    }

    /// Current center set, in candidate order.
    pub fn centers(&self) -> Vec<usize> {
        self.candidates.iter().zip(&self.alive).filter(|(_, &a)| a).map(|(&c, _)| c).collect()
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Σ_x w(x)·obj(d(x, S)) over the domain (squared distances for both
    /// means objectives; no square root).
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// `(center, cost(S − center) − cost(S))` for every live center.
    pub fn changes(&self) -> Vec<(usize, f64)> {
        self.candidates
            .iter()
            .enumerate()
            .filter(|(slot, _)| self.alive[*slot])
            .map(|(slot, &c)| (c, self.change[slot]))
            .collect()
    }

    /// Nearest live center of the `i`-th domain point.
    pub fn nearest_of(&self, i: usize) -> usize {
        let m = self.m();
        self.candidates[self.order[i * m + self.first[i] as usize] as usize]
    }

    /// Removes the center with the smallest removal delta (ties toward the
    /// smaller point id). Returns the removed center and the new cost.
    pub fn step(&mut self) -> Result<(usize, f64)> {
        if self.size <= 1 {
            return Err(Error::CannotEmpty);
        }
        let mut best: Option<usize> = None;
        for slot in 0..self.m() {
            if !self.alive[slot] {
                continue;
            }
            best = match best {
                Some(b)
                    if self.change[b] < self.change[slot]
                        || (self.change[b] == self.change[slot] && self.candidates[b] < self.candidates[slot]) =>
                {
                    Some(b)
                }
                _ => Some(slot),
            };
        }
        let slot = best.expect("at least two live centers");
        self.alive[slot] = false;
        self.size -= 1;
        self.refresh();
        Ok((self.candidates[slot], self.cost))
    }

    /// Solution over the whole space; only valid when the domain is every
    /// point in index order.
    fn to_solution(&self) -> Solution {
        let assignment = (0..self.domain.len()).map(|i| self.nearest_of(i)).collect();
        Solution {
            centers: self.centers(),
            assignment,
            cost: self.objective.finish(self.cost),
            objective: self.objective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalStep {
    /// |S_i| before the removal.
    pub size_before: usize,
    pub removed: usize,
    pub cost_before: f64,
    pub cost_after: f64,
}

/// Removal trace of one run, plus the reference values its audit needs.
///
/// Costs are raw weighted sums over the run's domain: distances for the
/// median objective, squared distances for both means objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub objective: Objective,
    pub k_prime: usize,
    /// |X|
    pub m: usize,
    /// cost(X); absent when |X| ≤ k' and nothing was evaluated.
    pub initial_cost: Option<f64>,
    pub final_cost: Option<f64>,
    pub trace: Vec<RemovalStep>,
    /// The k of OPT_k the audit compares against.
    #[serde(default)]
    pub k: Option<usize>,
    /// ε for the means-mode bound.
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub opt_ref: Option<f64>,
}

impl BoundCertificate {
    pub fn with_target(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn with_opt(mut self, opt: f64) -> Self {
        self.opt_ref = Some(opt);
        self
    }

    /// Final center set size.
    pub fn final_size(&self) -> usize {
        self.m.min(self.k_prime)
    }
}

/// Output of [`res_greedy_on`].
#[derive(Debug, Clone)]
pub struct RestrictedSolution {
    pub centers: Vec<usize>,
    pub certificate: BoundCertificate,
}

/// Restricted reverse greedy on the subspace `domain`, with centers drawn
/// from `candidates`. If `|candidates| ≤ k'` the candidates are returned
/// as-is without any query.
pub fn res_greedy_on<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    domain: &[usize],
    candidates: &[usize],
    k_prime: usize,
    objective: Objective,
) -> Result<RestrictedSolution> {
    let (state, certificate) = run(space, domain, candidates, k_prime, objective)?;
    let centers = match state {
        Some(s) => s.centers(),
        None => dedup(candidates),
    };
    Ok(RestrictedSolution { centers, certificate })
}

/// Restricted reverse greedy over the whole space: centers from `x`, cost
/// measured over every point.
pub fn res_greedy<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    x: &[usize],
    k_prime: usize,
    objective: Objective,
) -> Result<(Solution, BoundCertificate)> {
    let domain = space.points();
    let (state, cert) = run(space, &domain, x, k_prime, objective)?;
    let solution = match state {
        Some(s) => s.to_solution(),
        None => Solution::evaluate(space, dedup(x), objective)?,
    };
    Ok((solution, cert))
}

fn dedup(xs: &[usize]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::with_capacity(xs.len());
    xs.iter().copied().filter(|c| seen.insert(*c)).collect()
}

fn run<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    domain: &[usize],
    candidates: &[usize],
    k_prime: usize,
    objective: Objective,
) -> Result<(Option<GreedyState>, BoundCertificate)> {
    if k_prime < 1 {
        return Err(Error::InvalidParameter("k' must be at least 1".into()));
    }
    if candidates.is_empty() {
        return Err(Error::EmptySet);
    }
    space.check_subset(candidates)?;
    space.check_subset(domain)?;
    let m = dedup(candidates).len();
    let mut cert = BoundCertificate {
        objective,
        k_prime,
        m,
        initial_cost: None,
        final_cost: None,
        trace: Vec::new(),
        k: None,
        eps: None,
        opt_ref: None,
    };
    if m <= k_prime {
        return Ok((None, cert));
    }
    let mut state = GreedyState::new(space, domain, candidates, objective)?;
    cert.initial_cost = Some(state.cost());
    while state.len() > k_prime {
        let size_before = state.len();
        let cost_before = state.cost();
        let (removed, cost_after) = state.step()?;
        cert.trace.push(RemovalStep { size_before, removed, cost_before, cost_after });
    }
    cert.final_cost = Some(state.cost());
    Ok((Some(state), cert))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepViolation {
    pub size_before: usize,
    pub bound: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub steps_checked: usize,
    pub violations: Vec<StepViolation>,
    /// Internal inconsistencies of the trace itself (tampering, truncation).
    pub inconsistencies: Vec<String>,
    /// Telescoped median bound: final cost vs. cost(X) + Σ 2/(i−k)·OPT.
    pub aggregate_lhs: f64,
    pub aggregate_rhs: f64,
    pub aggregate_slack: f64,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.inconsistencies.is_empty() && approx_le(self.aggregate_lhs, self.aggregate_rhs)
    }
}

/// Checks the trace against the per-removal and telescoped bounds.
///
/// `opt_ref` (or the certificate's own) must be OPT_k of the run's domain
/// with the same objective. Median: `cost(S_{i−1}) − cost(S_i) ≤ 2/(i−k)·OPT`
/// per step and the summed bound overall. Means: for every step
/// `cost(S_{i−1}) ≤ cost(S_i) + (3ε·cost(S_i) + (4+2/ε)·OPT)/(i−k)`, and
/// for `i ≥ 2k+1` also `cost(S_{i−1}) ≤ (1+3ε/k)·cost(S_i) + (4+2/ε)/k·OPT`.
pub fn audit_certificate(cert: &BoundCertificate, opt_ref: Option<f64>) -> Result<CertificateReport> {
    let opt = opt_ref.or(cert.opt_ref).ok_or(Error::MissingReference("opt_ref"))?;
    let k = cert.k.ok_or(Error::MissingReference("target k"))?;
    if k == 0 || k > cert.k_prime {
        return Err(Error::InvalidParameter(format!("audit needs 1 <= k <= k' (k = {k}, k' = {})", cert.k_prime)));
    }
    let means = cert.objective != Objective::Median;
    let eps = if means {
        let e = cert.eps.ok_or(Error::MissingReference("eps"))?;
        if !(e > 0.0 && e <= 1.0) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0,1], got {e}")));
        }
        e
    } else {
        0.0
    };

    let mut inconsistencies = Vec::new();
    let expected_steps = cert.m.saturating_sub(cert.k_prime);
    if cert.trace.len() != expected_steps {
        inconsistencies.push(format!("trace has {} steps, expected {expected_steps}", cert.trace.len()));
    }
    if let (Some(first), Some(init)) = (cert.trace.first(), cert.initial_cost) {
        if first.cost_before != init {
            inconsistencies.push("first step does not start at cost(X)".into());
        }
    }
    if let (Some(last), Some(fin)) = (cert.trace.last(), cert.final_cost) {
        if last.cost_after != fin {
            inconsistencies.push("last step does not end at the final cost".into());
        }
    }
    for (j, step) in cert.trace.iter().enumerate() {
        if step.size_before != cert.m - j {
            inconsistencies.push(format!("step {j} starts at size {}, expected {}", step.size_before, cert.m - j));
        }
        if let Some(next) = cert.trace.get(j + 1) {
            if next.cost_before != step.cost_after {
                inconsistencies.push(format!("step {} does not continue from step {j}", j + 1));
            }
        }
        if !approx_le(step.cost_before, step.cost_after) {
            inconsistencies.push(format!("cost decreased at step {j}"));
        }
    }

    let mut violations = Vec::new();
    for step in &cert.trace {
        let i = step.size_before;
        let gap = (i - k) as f64;
        if !means {
            let lhs = step.cost_after - step.cost_before;
            let rhs = 2.0 / gap * opt;
            if !approx_le(lhs, rhs) {
                violations.push(StepViolation { size_before: i, bound: "median-step".into(), lhs, rhs });
            }
        } else {
            let lhs = step.cost_after;
            let rhs = step.cost_before + (3.0 * eps * step.cost_before + (4.0 + 2.0 / eps) * opt) / gap;
            if !approx_le(lhs, rhs) {
                violations.push(StepViolation { size_before: i, bound: "means-step".into(), lhs, rhs });
            }
            if i > 2 * k {
                let kf = k as f64;
                let rhs = (1.0 + 3.0 * eps / kf) * step.cost_before + (4.0 + 2.0 / eps) / kf * opt;
                if !approx_le(lhs, rhs) {
                    violations.push(StepViolation { size_before: i, bound: "means-claim".into(), lhs, rhs });
                }
            }
        }
    }

    let (aggregate_lhs, aggregate_rhs) = match (cert.initial_cost, cert.final_cost) {
        (Some(init), Some(fin)) if !means => {
            let sum: f64 = ((cert.k_prime + 1)..=cert.m).map(|i| 2.0 / (i - k) as f64).sum();
            (fin, init + sum * opt)
        }
        (Some(_), Some(fin)) => (fin, fin),
        _ => (0.0, 0.0),
    };
    Ok(CertificateReport {
        steps_checked: cert.trace.len(),
        violations,
        inconsistencies,
        aggregate_lhs,
        aggregate_rhs,
        aggregate_slack: aggregate_rhs - aggregate_lhs,
    })
}
