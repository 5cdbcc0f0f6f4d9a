//! k-means and normalized k-means through the same pipeline.

use detmedian::hierarchy::{audit_chain, hierarchical_cluster, means_eps};
use detmedian::harness::{Generator, InstanceSpec};
use detmedian::metric::Objective;

fn main() -> detmedian::Result<()> {
    let gen = Generator::ClusteredPoints { clusters: 4, spread: 1.5, dim: 3 };
    let space_inst = InstanceSpec::new(gen.clone(), 1000, 5).build()?;
    let space = space_inst.space()?;
    for o in [Objective::Means, Objective::NormalizedMeans] {
        let run = hierarchical_cluster(&space, 4, o)?;
        println!("{o}: centers {:?} cost {:.3}", run.solution.centers, run.solution.cost);
    }
    println!("audit eps at n=1000, k=4: {:.4}", means_eps(1000, 4));

    let small_inst = InstanceSpec::new(gen, 12, 5).build()?;
    let small = small_inst.space()?;
    let run = hierarchical_cluster(&small, 2, Objective::Means)?;
    let chain = audit_chain(&small, &run, Objective::Means)?;
    println!("n=12: normalized ratio {:.3}, bound {:.3}, passed {}", chain.ratio, chain.ratio_bound, chain.passed);
    Ok(())
}
