//! Weighted metric spaces, distance oracles with query accounting, and the
//! cost, projection and exact-optimum primitives every other module builds on.

mod io;
mod ops;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{read_matrix_csv, read_points_csv, write_matrix_csv, write_points_csv, InputFormat};
pub use ops::{
    aspect_ratio, cost, nearest, opt_bruteforce, opt_bruteforce_with_budget, project, verify_metric, MetricReport,
    VerifyMode, DEFAULT_ENUMERATION_BUDGET,
};
pub use oracle::{DistanceOracle, MatrixOracle, Norm, PointsOracle, QueryCounter};

/// Relative tolerance for every inequality audit.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor under [`REL_TOL`].
pub const ABS_TOL: f64 = 1e-12;

/// `a <= b` up to float rounding.
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * a.abs().max(b.abs()) + ABS_TOL
}

/// `a == b` up to float rounding.
pub fn approx_eq(a: f64, b: f64) -> bool {
    approx_le(a, b) && approx_le(b, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Σ w(x)·d(x,S)
    Median,
    /// Σ w(x)·d(x,S)²
    Means,
    /// (Σ w(x)·d(x,S)²)^½
    NormalizedMeans,
}

impl Objective {
    /// Per-point contribution before weighting.
    #[inline]
    pub fn point_cost(self, d: f64) -> f64 {
        match self {
            Objective::Median => d,
            Objective::Means | Objective::NormalizedMeans => d * d,
        }
    }

    /// Maps a weighted sum of point costs to the objective value.
    #[inline]
    pub fn finish(self, sum: f64) -> f64 {
        match self {
            Objective::NormalizedMeans => sum.sqrt(),
            _ => sum,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Median => "median",
            Objective::Means => "means",
            Objective::NormalizedMeans => "normalized-means",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Objective::Median),
            "means" => Ok(Objective::Means),
            "normalized-means" => Ok(Objective::NormalizedMeans),
            other => Err(Error::InvalidParameter(format!("unknown objective {other:?}"))),
        }
    }
}

/// Points `0..n` with nonnegative weights and a distance oracle.
#[derive(Debug, Clone)]
pub struct WeightedMetricSpace<O: ?Sized> {
    weights: Vec<f64>,
    oracle: O,
}

impl<O: DistanceOracle> WeightedMetricSpace<O> {
    pub fn new(oracle: O, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != oracle.len() {
            return Err(Error::Input(format!(
                "{} weights for {} points",
                weights.len(),
                oracle.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Input(format!("weight {w} is not a nonnegative number")));
        }
        Ok(WeightedMetricSpace { weights, oracle })
    }

    /// Every weight set to 1.
    pub fn unit(oracle: O) -> Self {
        let weights = vec![1.0; oracle.len()];
        WeightedMetricSpace { weights, oracle }
    }

    /// Same oracle (borrowed) under different weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<WeightedMetricSpace<&O>> {
        WeightedMetricSpace::new(&self.oracle, weights)
    }
}

impl<O: DistanceOracle + ?Sized> WeightedMetricSpace<O> {
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    #[inline]
    pub fn d(&self, x: usize, y: usize) -> Result<f64> {
        self.oracle.distance(x, y)
    }

    pub fn queries(&self) -> u64 {
        self.oracle.queries()
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.n()).collect()
    }

    /// Errors unless every id in `set` is a point of the space.
    pub fn check_subset(&self, set: &[usize]) -> Result<()> {
        match set.iter().find(|&&x| x >= self.n()) {
            Some(&x) => Err(Error::UnknownPoint(x)),
            None => Ok(()),
        }
    }
}

impl<O> WeightedMetricSpace<O> {
    pub fn into_oracle(self) -> O {
        self.oracle
    }
}

/// A center set with the nearest-center assignment of every point of the
/// space and its cached cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Insertion order; deterministic for every algorithm in this crate.
    pub centers: Vec<usize>,
    /// `assignment[x]` is the center serving point `x`.
    pub assignment: Vec<usize>,
    pub cost: f64,
    pub objective: Objective,
}

impl Solution {
    /// Assigns every point to its nearest center (ties toward the smaller
    /// index) and caches the cost. Costs `n·|centers|` queries.
    pub fn evaluate<O: DistanceOracle + ?Sized>(
        space: &WeightedMetricSpace<O>,
        centers: Vec<usize>,
        objective: Objective,
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptySolution);
        }
        space.check_subset(&centers)?;
        let mut assignment = Vec::with_capacity(space.n());
        let mut sum = 0.0;
        for x in 0..space.n() {
            let (c, d) = nearest(space, x, &centers)?;
            assignment.push(c);
            sum += space.weight(x) * objective.point_cost(d);
        }
        Ok(Solution { centers, assignment, cost: objective.finish(sum), objective })
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }
}

/// Harmonic number H_j.
pub fn harmonic(j: usize) -> f64 {
    (1..=j).map(|i| 1.0 / i as f64).sum()
}
