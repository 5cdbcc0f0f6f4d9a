//! Comparison algorithms: single-swap local search, plain reverse greedy,
//! and the multi-level partition algorithm of Guha et al., plus the
//! sparsifier audit shared with [`crate::hierarchy`].

mod guha;
mod local_search;
mod sparsifier;

pub use guha::{guha_centers, guha_hierarchical, GuhaHierarchy, GuhaLevel, GuhaRun};
pub use local_search::{local_search_kmedian, local_search_on, LocalSearchResult, IMPROVEMENT_FACTOR};
pub use sparsifier::{audit_sparsifier, composition_bound, measured_ratio, SparsifierReport};

use crate::error::Result;
use crate::greedy::res_greedy;
use crate::metric::{DistanceOracle, Objective, Solution, WeightedMetricSpace};

/// Reverse greedy of Chrobak, Kenyon and Young: restricted reverse greedy
/// with every point as a candidate and `k' = k`.
pub fn plain_reverse_greedy<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
    objective: Objective,
) -> Result<Solution> {
    Ok(res_greedy(space, &space.points(), k, objective)?.0)
}
