//! Audit of the sparsifier composition bound
//! `cost(π∘σ, V, w) ≤ (2α + (1+2α)β)·OPT_k(V, w)`.
//!
//! Both means objectives are audited in normalized units (square root of
//! the squared sums), the form in which the bound holds verbatim.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{approx_le, opt_bruteforce, DistanceOracle, Objective, WeightedMetricSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifierReport {
    /// OPT_k(V, w)
    pub opt: f64,
    /// OPT_k(V', w')
    pub opt_sparse: f64,
    pub sigma_cost: f64,
    pub pi_cost: f64,
    pub composed_cost: f64,
    /// cost(π)/OPT_k(V', w'); infinite when the optimum is 0 but π is not.
    pub alpha: f64,
    /// cost(σ)/OPT_k(V, w)
    pub beta: f64,
    pub bound: f64,
    pub passed: bool,
}

/// `a/b` with `0/0 = 0` and `a/0 = ∞`.
pub fn measured_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// `(2α + (1+2α)β)·opt`, infinite when either ratio is.
pub fn composition_bound(alpha: f64, beta: f64, opt: f64) -> f64 {
    if alpha.is_infinite() || beta.is_infinite() {
        f64::INFINITY
    } else {
        (2.0 * alpha + (1.0 + 2.0 * alpha) * beta) * opt
    }
}

fn unit(objective: Objective) -> Objective {
    match objective {
        Objective::Median => Objective::Median,
        _ => Objective::NormalizedMeans,
    }
}

/// Checks the composition bound with α and β measured by brute force.
///
/// `sigma[x]` maps every point to V' = image of σ; `pi[y]` is read only for
/// `y ∈ V'` and gives the final center of `y`. Weights w' are the pushed
/// forward weights of σ.
pub fn audit_sparsifier<O: DistanceOracle>(
    space: &WeightedMetricSpace<O>,
    sigma: &[usize],
    pi: &[usize],
    k: usize,
    objective: Objective,
) -> Result<SparsifierReport> {
    let n = space.n();
    if sigma.len() != n || pi.len() != n {
        return Err(Error::InvalidParameter(format!("sigma and pi must have {n} entries")));
    }
    space.check_subset(sigma)?;
    let obj = unit(objective);
    let mut w_sparse = vec![0.0; n];
    for (x, &y) in sigma.iter().enumerate() {
        w_sparse[y] += space.weight(x);
    }
    let mut image: Vec<usize> = sigma.to_vec();
    image.sort_unstable();
    image.dedup();
    space.check_subset(&image.iter().map(|&y| pi[y]).collect::<Vec<_>>())?;

    let all = space.points();
    let (opt, _) = opt_bruteforce(space, k, &all, &all, obj)?;
    let sparse = space.reweighted(w_sparse.clone())?;
    let (opt_sparse, _) = opt_bruteforce(&sparse, k, &image, &image, obj)?;

    let mut sig = 0.0;
    let mut comp = 0.0;
    for x in 0..n {
        sig += space.weight(x) * obj.point_cost(space.d(x, sigma[x])?);
        comp += space.weight(x) * obj.point_cost(space.d(x, pi[sigma[x]])?);
    }
    let mut pic = 0.0;
    for &y in &image {
        pic += w_sparse[y] * obj.point_cost(space.d(y, pi[y])?);
    }
    let (sigma_cost, composed_cost, pi_cost) = (obj.finish(sig), obj.finish(comp), obj.finish(pic));
    let alpha = measured_ratio(pi_cost, opt_sparse);
    let beta = measured_ratio(sigma_cost, opt);
    let bound = composition_bound(alpha, beta, opt);
    Ok(SparsifierReport {
        opt,
        opt_sparse,
        sigma_cost,
        pi_cost,
        composed_cost,
        alpha,
        beta,
        bound,
        passed: approx_le(composed_cost, bound),
    })
}
