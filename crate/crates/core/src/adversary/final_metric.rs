//! The final metric 𝔡 = shortest paths in Ĝ_f, evaluated lazily.

use std::cell::RefCell;

use super::graph::{bounded_distance, AdversaryGraph, Search};
use crate::error::{Error, Result};
use crate::metric::{DistanceOracle, MatrixOracle, QueryCounter};

/// Largest n for which [`FinalMetric::to_matrix`] is allowed.
pub const MATRIX_LIMIT: usize = 2048;

/// Distance oracle over a finalized adversary graph.
///
/// Computed independently of the answering code path: one multi-source pass
/// gives every node's distance to the open set, and each query runs a
/// bounded search in G.
#[derive(Debug)]
pub struct FinalMetric<'a> {
    graph: &'a AdversaryGraph,
    reach: Vec<u32>,
    search: RefCell<Search>,
    counter: QueryCounter,
}

impl<'a> FinalMetric<'a> {
    pub fn new(graph: &'a AdversaryGraph) -> Result<Self> {
        if !graph.is_finalized() {
            return Err(Error::NotFinalized);
        }
        Ok(FinalMetric {
            reach: graph.open_reach(),
            search: RefCell::new(Search::new(graph.n())),
            counter: QueryCounter::new(),
            graph,
        })
    }

    pub fn graph(&self) -> &AdversaryGraph {
        self.graph
    }

    /// 𝔡(x, y) without bounds checks or counting.
    pub(crate) fn value(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return 0.0;
        }
        let g = self.graph;
        let lmax = g.max_short();
        let (rx, ry) = (self.reach[x], self.reach[y]);
        let via_open = (rx != u32::MAX && ry != u32::MAX)
            .then(|| rx + 1 + ry)
            .filter(|&len| len <= lmax);
        let t = via_open.unwrap_or(lmax);
        let real = bounded_distance(
            g.adjacency(),
            g.weight_map(),
            lmax,
            &mut self.search.borrow_mut(),
            x as u32,
            y as u32,
            t,
        );
        match real.or(via_open) {
            Some(d) => f64::from(d),
            None => 2.0 * g.gate(),
        }
    }

    /// All distances from `x`.
    pub fn row(&self, x: usize) -> Result<Vec<f64>> {
        (0..self.len()).map(|y| self.distance(x, y)).collect()
    }

    /// Dense copy, for `n ≤ MATRIX_LIMIT`.
    pub fn to_matrix(&self) -> Result<MatrixOracle> {
        let n = self.len();
        if n > MATRIX_LIMIT {
            return Err(Error::InvalidParameter(format!("final metric matrix needs n <= {MATRIX_LIMIT}, got {n}")));
        }
        let mut data = vec![0.0; n * n];
        for x in 0..n {
            for y in (x + 1)..n {
                let d = self.value(x, y);
                data[x * n + y] = d;
                data[y * n + x] = d;
            }
        }
        MatrixOracle::new(n, data)
    }
}

impl DistanceOracle for FinalMetric<'_> {
    fn len(&self) -> usize {
        self.graph.n()
    }

    fn distance(&self, x: usize, y: usize) -> Result<f64> {
        self.counter.bump();
        let n = self.len();
        if x >= n {
            return Err(Error::UnknownPoint(x));
        }
        if y >= n {
            return Err(Error::UnknownPoint(y));
        }
        Ok(self.value(x, y))
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}
