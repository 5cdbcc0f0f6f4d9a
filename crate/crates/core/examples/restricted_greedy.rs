//! Restricted reverse greedy with its removal certificate and audit.

use detmedian::greedy::{audit_certificate, res_greedy};
use detmedian::harness::{Generator, InstanceSpec};
use detmedian::metric::{opt_bruteforce, Objective};

fn main() -> detmedian::Result<()> {
    let inst = InstanceSpec::new(Generator::ClusteredPoints { clusters: 3, spread: 4.0, dim: 2 }, 14, 1).build()?;
    let space = inst.space()?;
    let k = 3;
    // only even points may be centers
    let x: Vec<usize> = (0..space.n()).step_by(2).collect();
    let (sol, cert) = res_greedy(&space, &x, k, Objective::Median)?;
    println!("centers {:?} cost {:.3} ({} queries)", sol.centers, sol.cost, space.queries());
    for s in &cert.trace {
        println!("  |S|={:>2} remove {:>2}: {:.3} -> {:.3}", s.size_before, s.removed, s.cost_before, s.cost_after);
    }
    let all = space.points();
    let (opt, _) = opt_bruteforce(&space, k, &all, &all, Objective::Median)?;
    let report = audit_certificate(&cert.with_target(k), Some(opt))?;
    println!(
        "OPT_k(V) = {opt:.3}; per-step violations {}; telescoped {:.3} <= {:.3}: {}",
        report.violations.len(),
        report.aggregate_lhs,
        report.aggregate_rhs,
        report.passed()
    );
    Ok(())
}
