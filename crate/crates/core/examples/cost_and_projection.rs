//! Costs, nearest-center projection and query counting on a small line.

use detmedian::metric::{cost, opt_bruteforce, project, Norm, Objective, PointsOracle, WeightedMetricSpace};

fn main() -> detmedian::Result<()> {
    let xs = [0.0, 1.0, 2.0, 10.0, 11.0, 30.0];
    let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let weights = vec![1.0, 1.0, 1.0, 2.0, 2.0, 0.5];
    let space = WeightedMetricSpace::new(PointsOracle::from_points(&pts, Norm::L1)?, weights)?;
    let all = space.points();

    let a = vec![1, 4];
    let b = vec![0, 2, 3, 5];
    let p = project(&space, &a, &b)?;
    println!("pi(A, B) = {p:?}");
    for o in [Objective::Median, Objective::Means, Objective::NormalizedMeans] {
        let (ca, cb, cp) = (cost(&space, &a, &all, o)?, cost(&space, &b, &all, o)?, cost(&space, &p, &all, o)?);
        println!("{o:>16}: cost(A) = {ca:.2}  cost(B) = {cb:.2}  cost(pi) = {cp:.2}");
    }
    // median: cost(pi) <= cost(B) + 2 cost(A)
    let q0 = space.queries();
    let (opt, s) = opt_bruteforce(&space, 2, &all, &all, Objective::Median)?;
    println!("OPT_2 = {opt} at {s:?}, {} queries", space.queries() - q0);
    Ok(())
}
