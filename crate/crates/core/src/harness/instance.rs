//! Seeded instance generators and file-backed instances.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{
    read_matrix_csv, read_points_csv, write_matrix_csv, write_points_csv, DistanceOracle, InputFormat, MatrixOracle,
    Norm, PointsOracle, WeightedMetricSpace,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Generator {
    /// Coordinates uniform in `[0, extent)`, ℓ2 distance.
    UniformPoints { dim: usize, extent: f64 },
    /// `clusters` centers uniform in `[0, 100)^dim`, each point uniform in a
    /// box of half-width `spread` around a center chosen round-robin.
    ClusteredPoints { clusters: usize, spread: f64, dim: usize },
    /// Integer weights uniform in `[1, max_weight]`, closed under shortest
    /// paths.
    RandomMatrix { max_weight: u32 },
    /// `n` is taken from the file.
    File { path: PathBuf, format: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub generator: Generator,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub enum Backend {
    Points(PointsOracle),
    Matrix(MatrixOracle),
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub weights: Vec<f64>,
    pub backend: Backend,
}

impl Instance {
    pub fn from_matrix(id: impl Into<String>, matrix: MatrixOracle) -> Self {
        let weights = vec![1.0; matrix.len()];
        Instance { id: id.into(), weights, backend: Backend::Matrix(matrix) }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn oracle(&self) -> &dyn DistanceOracle {
        match &self.backend {
            Backend::Points(p) => p,
            Backend::Matrix(m) => m,
        }
    }

    pub fn space(&self) -> Result<WeightedMetricSpace<&dyn DistanceOracle>> {
        WeightedMetricSpace::new(self.oracle(), self.weights.clone())
    }

    /// Reads a matrix or point file.
    pub fn load(path: &std::path::Path, format: InputFormat) -> Result<Self> {
        let reader = BufReader::new(File::open(path)?);
        let id = path.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned());
        let (backend, weights) = match format {
            InputFormat::Matrix => {
                let (m, w) = read_matrix_csv(reader)?;
                (Backend::Matrix(m), w)
            }
            InputFormat::PointsL2 | InputFormat::PointsL1 => {
                let norm = if format == InputFormat::PointsL1 { Norm::L1 } else { Norm::L2 };
                let (p, w) = read_points_csv(reader, norm)?;
                (Backend::Points(p), w)
            }
        };
        Ok(Instance { id, weights, backend })
    }

    /// Writes in the format [`Instance::load`] reads back.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        match &self.backend {
            Backend::Points(p) => write_points_csv(writer, p, &self.weights),
            Backend::Matrix(m) => write_matrix_csv(writer, m, Some(&self.weights)),
        }
    }

    /// Format string matching this backend.
    pub fn format(&self) -> InputFormat {
        match &self.backend {
            Backend::Points(p) if p.norm() == Norm::L1 => InputFormat::PointsL1,
            Backend::Points(_) => InputFormat::PointsL2,
            Backend::Matrix(_) => InputFormat::Matrix,
        }
    }
}

/// Replaces every entry by its shortest-path distance.
pub fn floyd_warshall(n: usize, d: &mut [f64]) {
    for m in 0..n {
        for i in 0..n {
            let dim = d[i * n + m];
            if dim.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dim + d[m * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
}

impl InstanceSpec {
    pub fn new(generator: Generator, n: usize, seed: u64) -> Self {
        InstanceSpec { generator, n, seed }
    }

    pub fn id(&self) -> String {
        match &self.generator {
            Generator::UniformPoints { dim, .. } => format!("uniform-d{dim}-n{}-s{}", self.n, self.seed),
            Generator::ClusteredPoints { clusters, .. } => format!("clustered-c{clusters}-n{}-s{}", self.n, self.seed),
            Generator::RandomMatrix { .. } => format!("matrix-n{}-s{}", self.n, self.seed),
            Generator::File { path, .. } => path.display().to_string(),
        }
    }

    pub fn build(&self) -> Result<Instance> {
        let n = self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let id = self.id();
        let backend = match &self.generator {
            Generator::File { path, format } => {
                let mut inst = Instance::load(path, format.parse()?)?;
                inst.id = id;
                return Ok(inst);
            }
            _ if n == 0 => return Err(Error::InvalidParameter("n must be at least 1".into())),
            Generator::UniformPoints { dim, extent } => {
                if *dim == 0 || !(*extent > 0.0) {
                    return Err(Error::InvalidParameter("need dim >= 1 and extent > 0".into()));
                }
                let coords = (0..n * dim).map(|_| rng.gen::<f64>() * extent).collect();
                Backend::Points(PointsOracle::new(*dim, coords, Norm::L2)?)
            }
            Generator::ClusteredPoints { clusters, spread, dim } => {
                if *clusters == 0 || *dim == 0 || !(*spread >= 0.0) {
                    return Err(Error::InvalidParameter("need clusters >= 1, dim >= 1, spread >= 0".into()));
                }
                let centers: Vec<f64> = (0..clusters * dim).map(|_| rng.gen::<f64>() * 100.0).collect();
                let mut coords = Vec::with_capacity(n * dim);
                for i in 0..n {
                    let c = i % clusters;
                    for j in 0..*dim {
                        coords.push(centers[c * dim + j] + (rng.gen::<f64>() * 2.0 - 1.0) * spread);
                    }
                }
                Backend::Points(PointsOracle::new(*dim, coords, Norm::L2)?)
            }
            Generator::RandomMatrix { max_weight } => {
                if *max_weight == 0 {
                    return Err(Error::InvalidParameter("max_weight must be at least 1".into()));
                }
                let mut d = vec![0.0; n * n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        let w = f64::from(rng.gen_range(1..=*max_weight));
                        d[i * n + j] = w;
                        d[j * n + i] = w;
                    }
                }
                floyd_warshall(n, &mut d);
                Backend::Matrix(MatrixOracle::new(n, d)?)
            }
        };
        Ok(Instance { id, weights: vec![1.0; n], backend })
    }
}
