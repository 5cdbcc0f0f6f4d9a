//! Runs the hierarchical algorithm against the adaptive adversary and
//! prints the audit.
//!
//!     cargo run --release --example adversary_lower_bound -- 4096 2 1 median

use std::time::Instant;

use detmedian::adversary::{run_against, AdversaryParams, Budget};
use detmedian::hierarchy::hierarchical_cluster;
use detmedian::metric::Objective;

fn main() -> detmedian::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let n: usize = arg(0, "4096").parse().expect("n");
    let k: usize = arg(1, "2").parse().expect("k");
    let delta: f64 = arg(2, "1").parse().expect("delta");
    let objective: Objective = arg(3, "median").parse()?;

    let params = AdversaryParams::new(n, k, delta, objective)?;
    println!(
        "n={n} k={k} delta={delta} {objective}: M={:.1} log_M n={:.4} budget nkδ={}",
        params.m(),
        params.gate(),
        params.query_budget()
    );
    let start = Instant::now();
    // the hierarchy needs about 4nk·log(n/k) queries, more than nkδ
    let session = run_against(params, Budget::Unlimited, |space| Ok(hierarchical_cluster(space, k, objective)?.solution.centers))?;
    let r = &session.report;
    println!("algorithm queries {}  ({:.2?})", r.algorithm_queries, start.elapsed());
    println!("centers {:?}", r.centers);
    println!("cost(S) = {} >= {} ?", r.cost, r.cost_lower_bound);
    println!("witness {:?} cost {} <= {} ?", r.witness, r.witness_cost, r.witness_bound);
    println!("closed {} <= {:.1} ?", r.closed, r.closed_bound);
    println!("ratio {:.3} >= {:.3} ?{}", r.ratio, r.ratio_bound, if r.trivial { " (trivial regime)" } else { "" });
    for (name, ok) in r.checks() {
        println!("  {:<20} {}", name, if ok { "ok" } else { "FAIL" });
    }
    Ok(())
}
