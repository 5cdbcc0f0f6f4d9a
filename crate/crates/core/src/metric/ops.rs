use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{approx_le, DistanceOracle, Objective, WeightedMetricSpace};
use crate::error::{Error, Result};

/// Default cap on the number of subsets [`opt_bruteforce`] may enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// Nearest member of `centers` to `x`, ties toward the smaller point index.
/// Costs `|centers|` queries.
pub fn nearest<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    x: usize,
    centers: &[usize],
) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for &c in centers {
        let d = space.d(x, c)?;
        best = match best {
            Some((bc, bd)) if bd < d || (bd == d && bc < c) => Some((bc, bd)),
            _ => Some((c, d)),
        };
    }
    best.ok_or(Error::EmptySolution)
}

/// Objective value of `centers` over the points of `domain`.
///
/// Makes exactly `|centers|·|domain|` queries.
pub fn cost<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    centers: &[usize],
    domain: &[usize],
    objective: Objective,
) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptySolution);
    }
    space.check_subset(centers)?;
    space.check_subset(domain)?;
    let mut sum = 0.0;
    for &x in domain {
        let (_, d) = nearest(space, x, centers)?;
        sum += space.weight(x) * objective.point_cost(d);
    }
    Ok(objective.finish(sum))
}

/// π(A, B): the set of nearest points in `b` of the members of `a`,
/// returned sorted by point index.
pub fn project<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    a: &[usize],
    b: &[usize],
) -> Result<Vec<usize>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    space.check_subset(a)?;
    space.check_subset(b)?;
    let mut out = a.iter().map(|&x| nearest(space, x, b).map(|(c, _)| c)).collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn binomial(m: usize, k: usize) -> u128 {
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// OPT_k(U, X) by enumerating every size-`k` subset of `candidates`.
///
/// Returns the optimum and the lexicographically smallest optimal set
/// (candidates are sorted first). If `k ≥ |X|` the whole candidate set is
/// returned.
pub fn opt_bruteforce<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
    domain: &[usize],
    candidates: &[usize],
    objective: Objective,
) -> Result<(f64, Vec<usize>)> {
    opt_bruteforce_with_budget(space, k, domain, candidates, objective, DEFAULT_ENUMERATION_BUDGET)
}

pub fn opt_bruteforce_with_budget<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    k: usize,
    domain: &[usize],
    candidates: &[usize],
    objective: Objective,
    budget: u128,
) -> Result<(f64, Vec<usize>)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if candidates.is_empty() {
        return Err(Error::EmptySolution);
    }
    space.check_subset(domain)?;
    space.check_subset(candidates)?;
    let mut cands = candidates.to_vec();
    cands.sort_unstable();
    cands.dedup();
    let m = cands.len();
    let k = k.min(m);
    let subsets = binomial(m, k);
    if subsets > budget {
        return Err(Error::OracleBudget { subsets, budget });
    }

    // point cost of domain point u w.r.t. candidate c, domain-major
    let u = domain.len();
    let mut pc = vec![0.0; u * m];
    for (i, &x) in domain.iter().enumerate() {
        for (j, &c) in cands.iter().enumerate() {
            pc[i * m + j] = objective.point_cost(space.d(x, c)?);
        }
    }
    let weights: Vec<f64> = domain.iter().map(|&x| space.weight(x)).collect();

    struct Search<'a> {
        m: usize,
        k: usize,
        pc: &'a [f64],
        weights: &'a [f64],
        chosen: Vec<usize>,
        mins: Vec<Vec<f64>>,
        best: f64,
        best_set: Vec<usize>,
    }

    impl Search<'_> {
        fn go(&mut self, depth: usize, start: usize) {
            if depth == self.k {
                let total: f64 = self.mins[depth].iter().zip(self.weights).map(|(d, w)| w * d).sum();
                if total < self.best {
                    self.best = total;
                    self.best_set.clone_from(&self.chosen);
                }
                return;
            }
            for j in start..=(self.m - (self.k - depth)) {
                let (prev, next) = self.mins.split_at_mut(depth + 1);
                for (i, slot) in next[0].iter_mut().enumerate() {
                    let v = self.pc[i * self.m + j];
                    *slot = if v < prev[depth][i] { v } else { prev[depth][i] };
                }
                self.chosen.push(j);
                self.go(depth + 1, j + 1);
                self.chosen.pop();
            }
        }
    }

    let mut s = Search {
        m,
        k,
        pc: &pc,
        weights: &weights,
        chosen: Vec::with_capacity(k),
        mins: vec![vec![f64::INFINITY; u]; k + 1],
        best: f64::INFINITY,
        best_set: Vec::new(),
    };
    s.go(0, 0);
    let set = s.best_set.iter().map(|&j| cands[j]).collect();
    let best = if u == 0 { 0.0 } else { s.best };
    Ok((objective.finish(best), set))
}

/// Ratio of the largest to the smallest nonzero distance, over all pairs.
pub fn aspect_ratio<O: DistanceOracle + ?Sized>(space: &WeightedMetricSpace<O>) -> Result<f64> {
    let n = space.n();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for x in 0..n {
        for y in (x + 1)..n {
            let d = space.d(x, y)?;
            if d > 0.0 {
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
    }
    if hi == 0.0 {
        return Err(Error::DegenerateSpace);
    }
    Ok(hi / lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every pair and triple; requires n ≤ 1024.
    Exhaustive,
    /// `triples` seeded random triples.
    Sampled { triples: usize, seed: u64 },
}

/// Violations found by [`verify_metric`]. Empty lists mean the checks passed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub checked_triples: u64,
    pub nonzero_diagonal: Vec<usize>,
    pub asymmetric_pairs: Vec<(usize, usize)>,
    /// (x, y, z) with d(x,z) > d(x,y) + d(y,z).
    pub triangle_violations: Vec<(usize, usize, usize)>,
}

impl MetricReport {
    pub fn is_metric(&self) -> bool {
        self.nonzero_diagonal.is_empty() && self.asymmetric_pairs.is_empty() && self.triangle_violations.is_empty()
    }
}

pub fn verify_metric<O: DistanceOracle + ?Sized>(
    space: &WeightedMetricSpace<O>,
    mode: VerifyMode,
) -> Result<MetricReport> {
    let n = space.n();
    let mut report = MetricReport::default();
    match mode {
        VerifyMode::Exhaustive => {
            if n > 1024 {
                return Err(Error::InvalidParameter(format!("exhaustive verification needs n <= 1024, got {n}")));
            }
            let mut d = vec![0.0; n * n];
            for x in 0..n {
                for y in 0..n {
                    d[x * n + y] = space.d(x, y)?;
                }
            }
            for x in 0..n {
                if d[x * n + x] != 0.0 {
                    report.nonzero_diagonal.push(x);
                }
                for y in (x + 1)..n {
                    if !approx_le(d[x * n + y], d[y * n + x]) || !approx_le(d[y * n + x], d[x * n + y]) {
                        report.asymmetric_pairs.push((x, y));
                    }
                }
            }
            for x in 0..n {
                for y in 0..n {
                    let dxy = d[x * n + y];
                    let row = &d[y * n..(y + 1) * n];
                    for z in 0..n {
                        if !approx_le(d[x * n + z], dxy + row[z]) {
                            report.triangle_violations.push((x, y, z));
                        }
                    }
                }
            }
            report.checked_triples = (n as u64).pow(3);
        }
        VerifyMode::Sampled { triples, seed } => {
            if n == 0 {
                return Ok(report);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..triples {
                let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                let (dxy, dyx) = (space.d(x, y)?, space.d(y, x)?);
                if !approx_le(dxy, dyx) || !approx_le(dyx, dxy) {
                    report.asymmetric_pairs.push((x.min(y), x.max(y)));
                }
                if space.d(x, x)? != 0.0 {
                    report.nonzero_diagonal.push(x);
                }
                if !approx_le(space.d(x, z)?, dxy + space.d(y, z)?) {
                    report.triangle_violations.push((x, y, z));
                }
            }
            report.nonzero_diagonal.sort_unstable();
            report.nonzero_diagonal.dedup();
            report.asymmetric_pairs.sort_unstable();
            report.asymmetric_pairs.dedup();
            report.checked_triples = triples as u64;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{MatrixOracle, Norm, PointsOracle};

    fn line(xs: &[f64]) -> WeightedMetricSpace<PointsOracle> {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        WeightedMetricSpace::unit(PointsOracle::from_points(&pts, Norm::L1).unwrap())
    }

    #[test]
    fn cost_examples() {
        let s = line(&[0.0, 1.0, 2.0]);
        assert_eq!(cost(&s, &[0], &[0, 1, 2], Objective::Median).unwrap(), 3.0);
        assert_eq!(cost(&s, &[0], &[0, 1, 2], Objective::Means).unwrap(), 5.0);
        assert_eq!(cost(&s, &[0, 1, 2], &[0, 1, 2], Objective::Median).unwrap(), 0.0);
        assert!((cost(&s, &[0], &[0, 1, 2], Objective::NormalizedMeans).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(cost(&s, &[], &[0], Objective::Median), Err(Error::EmptySolution)));
    }

    #[test]
    fn cost_query_count_is_exact() {
        let s = line(&[0.0, 1.0, 2.0, 5.0, 7.0]);
        let before = s.queries();
        cost(&s, &[1, 3], &[0, 2, 4], Objective::Median).unwrap();
        assert_eq!(s.queries() - before, 6);
    }

    #[test]
    fn project_examples() {
        let s = line(&[0.0, 4.0, 10.0]);
        assert_eq!(project(&s, &[1], &[0, 2]).unwrap(), vec![0]);
        assert_eq!(project(&s, &[0, 2], &[0, 1, 2]).unwrap(), vec![0, 2]);
        assert!(project(&s, &[], &[0]).is_err());
        // equidistant: tie toward the smaller index
        let s = line(&[0.0, 5.0, 10.0]);
        assert_eq!(project(&s, &[1], &[2, 0]).unwrap(), vec![0]);
    }

    #[test]
    fn bruteforce_two_points() {
        let o = PointsOracle::from_points(&[vec![0.0], vec![2.0]], Norm::L1).unwrap();
        let s = WeightedMetricSpace::new(o, vec![3.0, 1.0]).unwrap();
        let (c, set) = opt_bruteforce(&s, 1, &[0, 1], &[0, 1], Objective::Median).unwrap();
        assert_eq!(c, 2.0);
        assert_eq!(set, vec![0]);
    }

    #[test]
    fn bruteforce_line_lexicographic() {
        // enumerated by hand: {0,9}, {0,10}, {1,9}, {1,10} all cost 2
        let s = line(&[0.0, 1.0, 9.0, 10.0]);
        let (c, set) = opt_bruteforce(&s, 2, &[0, 1, 2, 3], &[3, 2, 1, 0], Objective::Median).unwrap();
        assert_eq!(c, 2.0);
        assert_eq!(set, vec![0, 2]);
    }

    #[test]
    fn bruteforce_cover_and_budget() {
        let s = line(&[0.0, 1.0, 9.0, 10.0]);
        let (c, set) = opt_bruteforce(&s, 4, &[1, 2], &[0, 1, 2, 3], Objective::Median).unwrap();
        assert_eq!((c, set), (0.0, vec![0, 1, 2, 3]));
        let (c, _) = opt_bruteforce(&s, 2, &[1, 2], &[0, 1, 2, 3], Objective::Median).unwrap();
        assert_eq!(c, 0.0);
        let err = opt_bruteforce_with_budget(&s, 2, &[0], &[0, 1, 2, 3], Objective::Median, 5).unwrap_err();
        assert!(matches!(err, Error::OracleBudget { subsets: 6, budget: 5 }));
    }

    #[test]
    fn aspect_ratio_examples() {
        assert_eq!(aspect_ratio(&line(&[0.0, 1.0, 10.0])).unwrap(), 10.0);
        let clique = MatrixOracle::from_rows(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap();
        assert_eq!(aspect_ratio(&WeightedMetricSpace::unit(clique)).unwrap(), 1.0);
        assert!(matches!(aspect_ratio(&line(&[3.0, 3.0])), Err(Error::DegenerateSpace)));
        // duplicates ignored
        assert_eq!(aspect_ratio(&line(&[0.0, 0.0, 2.0, 6.0])).unwrap(), 3.0);
    }

    #[test]
    fn verify_reports_triangle() {
        let m = MatrixOracle::from_rows(&[vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap();
        let r = verify_metric(&WeightedMetricSpace::unit(m), VerifyMode::Exhaustive).unwrap();
        assert!(!r.is_metric());
        assert!(r.triangle_violations.contains(&(0, 1, 2)));
        assert!(r.triangle_violations.contains(&(2, 1, 0)));
        let r = verify_metric(&line(&[0.0, 3.0, 4.0, 11.0]), VerifyMode::Exhaustive).unwrap();
        assert!(r.is_metric());
        let r = verify_metric(&line(&[0.0, 3.0, 4.0, 11.0]), VerifyMode::Sampled { triples: 100, seed: 1 }).unwrap();
        assert!(r.is_metric());
    }
}
