//! The hierarchical algorithm on a clustered instance: per-level query
//! counts, then the full audit chain on a small instance.
//!
//!     cargo run --release --example hierarchical -- 4096 8

use detmedian::harness::{Generator, InstanceSpec};
use detmedian::hierarchy::{audit_chain, hierarchical_cluster};
use detmedian::metric::Objective;

fn main() -> detmedian::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let n = args.first().copied().unwrap_or(2048);
    let k = args.get(1).copied().unwrap_or(8);

    let gen = Generator::ClusteredPoints { clusters: k, spread: 2.0, dim: 2 };
    let space_inst = InstanceSpec::new(gen.clone(), n, 0).build()?;
    let space = space_inst.space()?;
    let run = hierarchical_cluster(&space, k, Objective::Median)?;
    println!("n={n} k={k}: cost {:.2}, {} queries, {} us", run.solution.cost, run.metrics.queries, run.metrics.wall_micros);
    for l in &run.metrics.levels {
        println!("  level {:>2}: {:>5} parts, max {:>5}, {:>6} candidates, {:>8} queries", l.level, l.parts, l.max_part, l.candidates, l.queries);
    }

    let small_inst = InstanceSpec::new(gen, 14, 0).build()?;
    let small = small_inst.space()?;
    let run = hierarchical_cluster(&small, 2, Objective::Median)?;
    let chain = audit_chain(&small, &run, Objective::Median)?;
    println!(
        "n=14 k=2: ratio {:.3} <= chain bound {:.3} (alpha {:.3}, beta {:.3}); passed {}",
        chain.ratio, chain.ratio_bound, chain.alpha, chain.beta_chain, chain.passed
    );
    Ok(())
}
