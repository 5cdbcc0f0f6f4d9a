//! Running one algorithm on one instance and recording the result.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::instance::Instance;
use crate::baselines::{audit_sparsifier, guha_hierarchical, local_search_kmedian, GuhaRun};
use crate::error::{Error, Result};
use crate::greedy::{audit_certificate, res_greedy, BoundCertificate};
use crate::hierarchy::{audit_chain, hierarchical_cluster, means_eps, HierarchicalRun};
use crate::metric::{opt_bruteforce, DistanceOracle, Objective, Solution, WeightedMetricSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "kebab-case")]
pub enum Algorithm {
    Hierarchical,
    Guha { delta: f64 },
    ReverseGreedy,
    LocalSearch,
}

impl Algorithm {
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Hierarchical => "hierarchical",
            Algorithm::Guha { .. } => "guha",
            Algorithm::ReverseGreedy => "reverse-greedy",
            Algorithm::LocalSearch => "local-search",
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            Algorithm::Guha { delta } => Some(*delta),
            _ => None,
        }
    }

    /// Parses an id; `guha` takes the given δ.
    pub fn parse(id: &str, delta: f64) -> Result<Self> {
        match id {
            "hierarchical" => Ok(Algorithm::Hierarchical),
            "guha" => Ok(Algorithm::Guha { delta }),
            "reverse-greedy" => Ok(Algorithm::ReverseGreedy),
            "local-search" => Ok(Algorithm::LocalSearch),
            other => Err(Error::InvalidParameter(format!("unknown algorithm {other:?}"))),
        }
    }

    /// Whether the parameters are in range for this algorithm.
    pub fn applicable(&self, n: usize, k: usize) -> bool {
        if k == 0 || k > n {
            return false;
        }
        match self {
            Algorithm::Guha { delta } => k == n || (*delta >= 2.0 && crate::metric::approx_le(*delta, n as f64 / k as f64)),
            _ => true,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Guha { delta } => write!(f, "guha(delta={delta})"),
            other => f.write_str(other.id()),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// `guha` defaults to δ = 2; `guha:4` sets δ.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("guha", d)) => {
                let delta = d.parse().map_err(|_| Error::InvalidParameter(format!("bad delta in {s:?}")))?;
                Ok(Algorithm::Guha { delta })
            }
            _ => Algorithm::parse(s, 2.0),
        }
    }
}

/// What an algorithm produced, with enough detail to audit it.
#[derive(Debug, Clone)]
pub enum Outcome {
    Hierarchical(Box<HierarchicalRun>),
    Guha(Box<GuhaRun>),
    ReverseGreedy(Solution, BoundCertificate),
    LocalSearch(Solution),
}

impl Outcome {
    pub fn solution(&self) -> &Solution {
        match self {
            Outcome::Hierarchical(r) => &r.solution,
            Outcome::Guha(r) => &r.solution,
            Outcome::ReverseGreedy(s, _) | Outcome::LocalSearch(s) => s,
        }
    }
}

pub fn run_algorithm<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    algorithm: Algorithm,
    k: usize,
    objective: Objective,
) -> Result<Outcome> {
    if k == 0 || k > space.n() {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n (k = {k}, n = {})", space.n())));
    }
    Ok(match algorithm {
        Algorithm::Hierarchical => Outcome::Hierarchical(Box::new(hierarchical_cluster(space, k, objective)?)),
        Algorithm::Guha { delta } => Outcome::Guha(Box::new(guha_hierarchical(space, k, delta, objective)?)),
        Algorithm::ReverseGreedy => {
            let (sol, cert) = res_greedy(space, &space.points(), k, objective)?;
            Outcome::ReverseGreedy(sol, cert.with_target(k).with_eps(means_eps(space.n(), k)))
        }
        Algorithm::LocalSearch => Outcome::LocalSearch(local_search_kmedian(space, k, objective)?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditFlag {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub delta: Option<f64>,
    pub instance: String,
    pub n: usize,
    pub k: usize,
    pub objective: Objective,
    pub cost: f64,
    /// Oracle calls made by the algorithm, solution evaluation included.
    pub queries: u64,
    pub wall_millis: f64,
    /// cost / OPT, present only when brute force succeeded.
    pub ratio: Option<f64>,
    pub audits: Vec<AuditFlag>,
    pub centers: Vec<usize>,
}

impl RunRecord {
    pub fn audits_passed(&self) -> bool {
        self.audits.iter().all(|a| a.passed)
    }

    /// The record with the wall-clock field cleared, for comparisons.
    pub fn without_timing(&self) -> RunRecord {
        RunRecord { wall_millis: 0.0, ..self.clone() }
    }
}

fn flag(name: &str, passed: bool) -> AuditFlag {
    AuditFlag { name: name.into(), passed }
}

/// Runs `algorithm` on `instance`. With `audit`, also brute-forces OPT when
/// the instance is small enough and runs the algorithm's bound audits;
/// those extra queries are not counted in the record.
pub fn execute(instance: &Instance, algorithm: Algorithm, k: usize, objective: Objective, audit: bool) -> Result<RunRecord> {
    let space = instance.space()?;
    let q0 = space.queries();
    let start = Instant::now();
    let outcome = run_algorithm(&space, algorithm, k, objective)?;
    let wall_millis = start.elapsed().as_secs_f64() * 1e3;
    let queries = space.queries() - q0;
    let sol = outcome.solution();
    let mut record = RunRecord {
        algorithm: algorithm.id().into(),
        delta: algorithm.delta(),
        instance: instance.id.clone(),
        n: space.n(),
        k,
        objective,
        cost: sol.cost,
        queries,
        wall_millis,
        ratio: None,
        audits: Vec::new(),
        centers: sol.centers.clone(),
    };
    if audit {
        record.audits = audit_outcome(&space, &outcome, k, objective, &mut record.ratio)?;
    }
    Ok(record)
}

/// Bound audits for one outcome; sets `ratio` when OPT is computable.
pub fn audit_outcome<O: DistanceOracle>(
    space: &WeightedMetricSpace<O>,
    outcome: &Outcome,
    k: usize,
    objective: Objective,
    ratio: &mut Option<f64>,
) -> Result<Vec<AuditFlag>> {
    let all = space.points();
    let opt = match opt_bruteforce(space, k, &all, &all, objective) {
        Ok((opt, _)) => Some(opt),
        Err(Error::OracleBudget { .. }) => None,
        Err(e) => return Err(e),
    };
    let cost = outcome.solution().cost;
    if let Some(opt) = opt {
        *ratio = Some(crate::baselines::measured_ratio(cost, opt));
    }
    let mut flags = Vec::new();
    match outcome {
        Outcome::Hierarchical(run) => {
            flags.push(flag("partition structure", run.hierarchy.check_structure().is_empty()));
            if opt.is_some() {
                flags.push(flag("chain bound", audit_chain(space, run, objective)?.passed));
            }
        }
        Outcome::Guha(run) => {
            flags.push(flag("guha structure", run.hierarchy.check_structure().is_empty()));
            if opt.is_some() {
                let (sigma, pi) = run.split_maps();
                flags.push(flag("sparsifier bound", audit_sparsifier(space, &sigma, &pi, k, objective)?.passed));
            }
        }
        Outcome::ReverseGreedy(_, cert) => {
            if let Some(opt) = opt {
                // the certificate works with raw squared costs in means mode
                let raw = if objective == Objective::NormalizedMeans { opt * opt } else { opt };
                flags.push(flag("greedy certificate", audit_certificate(cert, Some(raw))?.passed()));
            }
        }
        Outcome::LocalSearch(_) => {}
    }
    Ok(flags)
}
