use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source of pairwise distances over points `0..len()`.
///
/// Every call to [`distance`](DistanceOracle::distance) counts as one query,
/// including repeated pairs. Callers that want caching must do it themselves.
pub trait DistanceOracle {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn distance(&self, x: usize, y: usize) -> Result<f64>;

    /// Total number of `distance` calls answered so far.
    fn queries(&self) -> u64;
}

impl<O: DistanceOracle + ?Sized> DistanceOracle for &O {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn distance(&self, x: usize, y: usize) -> Result<f64> {
        (**self).distance(x, y)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

impl<O: DistanceOracle + ?Sized> DistanceOracle for Box<O> {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn distance(&self, x: usize, y: usize) -> Result<f64> {
        (**self).distance(x, y)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

/// Monotone query counter, safe to bump from several threads.
#[derive(Debug, Default)]
pub struct QueryCounter(AtomicU64);

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

impl Clone for QueryCounter {
    fn clone(&self) -> Self {
        QueryCounter(AtomicU64::new(self.get()))
    }
}

/// Dense symmetric distance matrix with zero diagonal.
#[derive(Debug, Clone)]
pub struct MatrixOracle {
    n: usize,
    data: Vec<f64>,
    counter: QueryCounter,
}

impl MatrixOracle {
    /// Builds from row-major `n*n` entries. Rejects negative, non-finite,
    /// asymmetric or nonzero-diagonal input.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Input(format!(
                "matrix has {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::NotAMetric(format!("d({i},{i}) = {} != 0", data[i * n + i])));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NotAMetric(format!("d({i},{j}) = {v} is not a nonnegative number")));
                }
                if j > i && v != data[j * n + i] {
                    return Err(Error::NotAMetric(format!(
                        "asymmetric entry d({i},{j}) = {v} but d({j},{i}) = {}",
                        data[j * n + i]
                    )));
                }
            }
        }
        Ok(MatrixOracle { n, data, counter: QueryCounter::new() })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Input(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    /// Materializes every pairwise distance of `oracle` (n² queries on it).
    pub fn materialize<O: DistanceOracle + ?Sized>(oracle: &O) -> Result<Self> {
        let n = oracle.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = oracle.distance(i, j)?;
            }
        }
        Self::new(n, data)
    }

    /// Uncounted read, for diagnostics and serialization.
    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.n + y]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }
}

impl DistanceOracle for MatrixOracle {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn distance(&self, x: usize, y: usize) -> Result<f64> {
        self.counter.bump();
        Ok(self.data[x * self.n + y])
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

/// Points in R^dim with an ℓ1 or ℓ2 distance.
#[derive(Debug, Clone)]
pub struct PointsOracle {
    dim: usize,
    coords: Vec<f64>,
    norm: Norm,
    counter: QueryCounter,
}

impl PointsOracle {
    pub fn new(dim: usize, coords: Vec<f64>, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("points need at least one coordinate".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Input(format!(
                "{} coordinates do not split into rows of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Input(format!("non-finite coordinate {c}")));
        }
        Ok(PointsOracle { dim, coords, norm, counter: QueryCounter::new() })
    }

    pub fn from_points(points: &[Vec<f64>], norm: Norm) -> Result<Self> {
        let dim = points.first().map_or(1, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Input("points have mixed dimensions".into()));
        }
        Self::new(dim, points.iter().flatten().copied().collect(), norm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn point(&self, x: usize) -> &[f64] {
        &self.coords[x * self.dim..(x + 1) * self.dim]
    }
}

impl DistanceOracle for PointsOracle {
    fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    fn distance(&self, x: usize, y: usize) -> Result<f64> {
        self.counter.bump();
        let (a, b) = (self.point(x), self.point(y));
        let d = match self.norm {
            Norm::L1 => a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum(),
            Norm::L2 => a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt(),
        };
        Ok(d)
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}
