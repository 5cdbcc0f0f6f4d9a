//! A small benchmark sweep written as CSV to stdout.

use detmedian::harness::{run_sweep, write_bench_csv, Algorithm, Generator, SweepSpec};
use detmedian::metric::Objective;

fn main() -> detmedian::Result<()> {
    let spec = SweepSpec {
        generator: Generator::UniformPoints { dim: 2, extent: 100.0 },
        ns: vec![256, 512, 1024],
        ks: vec![2, 8],
        algorithms: vec![Algorithm::Hierarchical, Algorithm::Guha { delta: 2.0 }, Algorithm::Guha { delta: 4.0 }],
        objective: Objective::Median,
        seed: 0,
        audit: false,
    };
    let records = run_sweep(&spec)?;
    write_bench_csv(std::io::stdout().lock(), &records)
}
