//! Benchmark sweeps and their CSV output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::instance::{Generator, InstanceSpec};
use super::run::{execute, Algorithm, RunRecord};
use crate::error::Result;
use crate::metric::Objective;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub generator: Generator,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub objective: Objective,
    pub seed: u64,
    pub audit: bool,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: String,
    pub delta: Option<f64>,
    pub instance: String,
    pub n: usize,
    pub k: usize,
    pub objective: Objective,
    pub cost: f64,
    pub ratio: Option<f64>,
    pub queries: u64,
    pub millis: f64,
    pub audits_passed: bool,
}

impl From<&RunRecord> for BenchRow {
    fn from(r: &RunRecord) -> Self {
        BenchRow {
            algorithm: r.algorithm.clone(),
            delta: r.delta,
            instance: r.instance.clone(),
            n: r.n,
            k: r.k,
            objective: r.objective,
            cost: r.cost,
            ratio: r.ratio,
            queries: r.queries,
            millis: r.wall_millis,
            audits_passed: r.audits_passed(),
        }
    }
}

/// One record per applicable (n, k, algorithm) cell, in that nesting
/// order. Cells whose parameters are out of range (`k > n`, Guha's δ above
/// `n/k`) are skipped. Each n gets its own instance from `seed`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for &n in &spec.ns {
        let instance = InstanceSpec::new(spec.generator.clone(), n, spec.seed).build()?;
        for &k in &spec.ks {
            for &algo in &spec.algorithms {
                if algo.applicable(instance.n(), k) {
                    out.push(execute(&instance, algo, k, spec.objective, spec.audit)?);
                }
            }
        }
    }
    Ok(out)
}

const HEADER: [&str; 11] =
    ["algorithm", "delta", "instance", "n", "k", "objective", "cost", "ratio", "queries", "millis", "audits_passed"];

/// Writes the header even when `records` is empty.
pub fn write_bench_csv<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(HEADER)?;
    for r in records {
        w.serialize(BenchRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bench_csv<R: std::io::Read>(reader: R) -> Result<Vec<BenchRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}
