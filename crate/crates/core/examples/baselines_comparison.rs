//! All four algorithms on one instance, with cost, queries and ratio to the
//! brute-force optimum where that is cheap.

use detmedian::harness::{execute, Algorithm, Generator, InstanceSpec};
use detmedian::metric::Objective;

fn main() -> detmedian::Result<()> {
    let k = 3;
    for n in [24, 400] {
        let inst = InstanceSpec::new(Generator::ClusteredPoints { clusters: k, spread: 5.0, dim: 2 }, n, 3).build()?;
        println!("{}", inst.id);
        for algo in [Algorithm::Hierarchical, Algorithm::Guha { delta: 2.0 }, Algorithm::ReverseGreedy, Algorithm::LocalSearch] {
            // audits brute-force OPT, so only on the small instance
            let r = execute(&inst, algo, k, Objective::Median, n <= 30)?;
            let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.3}"));
            println!("  {:<14} cost {:>10.2}  queries {:>8}  ratio {ratio}", algo.to_string(), r.cost, r.queries);
        }
    }
    Ok(())
}
