//! Audit dispatch for the `verify` subcommand.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::instance::{Generator, Instance, InstanceSpec};
use super::run::{audit_outcome, run_algorithm, Algorithm};
use crate::adversary::{replay, run_against, AdversaryParams, Budget, Transcript};
use crate::error::Result;
use crate::greedy::{audit_certificate, BoundCertificate};
use crate::metric::{verify_metric, InputFormat, Objective, VerifyMode};

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyTarget {
    /// Metric axioms of a matrix or point file; exhaustive up to n = 1024,
    /// sampled beyond.
    Metric { path: PathBuf, format: InputFormat },
    /// A serialized [`BoundCertificate`]; `opt` overrides the stored value.
    Certificate { path: PathBuf, opt: Option<f64> },
    /// A serialized adversary [`Transcript`], replayed and re-audited.
    Transcript { path: PathBuf },
    /// Every audit on `count` generated instances of size `n`.
    Corpus { n: usize, k: usize, count: usize, seed: u64, objective: Objective },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub checks: Vec<(String, bool)>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }

    fn push(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }
}

/// Input problems surface as errors; failed audits as `passed() == false`.
pub fn verify(target: &VerifyTarget) -> Result<VerifyOutcome> {
    let mut out = VerifyOutcome::default();
    match target {
        VerifyTarget::Metric { path, format } => {
            let inst = Instance::load(path, *format)?;
            let mode = if inst.n() <= 1024 {
                VerifyMode::Exhaustive
            } else {
                VerifyMode::Sampled { triples: 1_000_000, seed: 0 }
            };
            out.push("metric", verify_metric(&inst.space()?, mode)?.is_metric());
        }
        VerifyTarget::Certificate { path, opt } => {
            let cert: BoundCertificate = serde_json::from_reader(BufReader::new(File::open(path)?))?;
            let r = audit_certificate(&cert, *opt)?;
            out.push("certificate consistency", r.inconsistencies.is_empty());
            out.push("certificate bounds", r.violations.is_empty() && r.passed());
        }
        VerifyTarget::Transcript { path } => {
            let t: Transcript = serde_json::from_reader(BufReader::new(File::open(path)?))?;
            let r = replay(&t)?;
            out.push("replay", r.mismatches.is_empty());
            for (name, ok) in r.report.checks() {
                out.push(name, ok);
            }
        }
        VerifyTarget::Corpus { n, k, count, seed, objective } => {
            for s in *seed..seed + *count as u64 {
                for g in [Generator::RandomMatrix { max_weight: 10 }, Generator::UniformPoints { dim: 2, extent: 10.0 }] {
                    let inst = InstanceSpec::new(g, *n, s).build()?;
                    let space = inst.space()?;
                    out.push(format!("{} metric", inst.id), verify_metric(&space, VerifyMode::Exhaustive)?.is_metric());
                    let algos = [Algorithm::Hierarchical, Algorithm::Guha { delta: 2.0 }, Algorithm::ReverseGreedy];
                    for algo in algos.into_iter().filter(|a| a.applicable(*n, *k)) {
                        let outcome = run_algorithm(&space, algo, *k, *objective)?;
                        let mut ratio = None;
                        for f in audit_outcome(&space, &outcome, *k, *objective, &mut ratio)? {
                            out.push(format!("{} {} {}", inst.id, algo.id(), f.name), f.passed);
                        }
                    }
                }
                if *n >= 2 {
                    let p = AdversaryParams::new(*n, *k, 1.0, *objective)?;
                    let session = run_against(p, Budget::Unlimited, |sp| {
                        Ok(run_algorithm(sp, Algorithm::Hierarchical, *k, *objective)?.solution().centers.clone())
                    })?;
                    let r = replay(&session.transcript())?;
                    out.push(format!("adversary n{n} replay"), r.mismatches.is_empty());
                    out.push(format!("adversary n{n} audit"), session.report.passed());
                }
            }
        }
    }
    Ok(out)
}
