#![allow(dead_code)]

use detmedian::adversary::AdversaryParams;
use detmedian::metric::{MatrixOracle, Objective, WeightedMetricSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All-pairs shortest paths in place on a dense `n×n` matrix.
pub fn floyd_warshall(n: usize, d: &mut [f64]) {
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + m] + d[m * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
}

/// Random metric with small integer distances (plenty of exact ties).
pub fn int_matrix(n: usize, max: u32, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = f64::from(r.gen_range(1..=max));
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }
    floyd_warshall(n, &mut d);
    d
}

/// Random metric with real-valued distances: points in the plane, ℓ2.
pub fn float_matrix(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (r.gen::<f64>() * 10.0, r.gen::<f64>() * 10.0)).collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
        }
    }
    d
}

/// Integer points in `[0, side)^2` under ℓ1: integral distances, many ties.
pub fn grid_matrix(n: usize, side: i64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let pts: Vec<(i64, i64)> = (0..n).map(|_| (r.gen_range(0..side), r.gen_range(0..side))).collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = ((pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs()) as f64;
        }
    }
    d
}

pub fn space(n: usize, d: Vec<f64>, weights: Option<Vec<f64>>) -> WeightedMetricSpace<MatrixOracle> {
    let m = MatrixOracle::new(n, d).unwrap();
    match weights {
        Some(w) => WeightedMetricSpace::new(m, w).unwrap(),
        None => WeightedMetricSpace::unit(m),
    }
}

fn pc(obj: Objective, d: f64) -> f64 {
    match obj {
        Objective::Median => d,
        _ => d * d,
    }
}

/// Σ_x w(x)·obj(d(x, S)) straight from the matrix.
pub fn raw_cost(n: usize, d: &[f64], w: &[f64], s: &[usize], obj: Objective) -> f64 {
    (0..n)
        .map(|x| w[x] * pc(obj, s.iter().map(|&c| d[x * n + c]).fold(f64::INFINITY, f64::min)))
        .sum()
}

/// Quadratic reverse greedy: at each step recompute `cost(S − c)` from
/// scratch for every live `c`, remove the cheapest, ties to the smaller
/// id. Returns the final set (sorted) and the removal order.
pub fn naive_reverse_greedy(
    n: usize,
    d: &[f64],
    w: &[f64],
    candidates: &[usize],
    k_prime: usize,
    obj: Objective,
) -> (Vec<usize>, Vec<usize>) {
    let mut s: Vec<usize> = candidates.to_vec();
    s.sort_unstable();
    s.dedup();
    let mut order = Vec::new();
    while s.len() > k_prime {
        let mut best: Option<(f64, usize)> = None;
        for (i, &c) in s.iter().enumerate() {
            let rest: Vec<usize> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            let cost = raw_cost(n, d, w, &rest, obj);
            if best.is_none_or(|(b, bc)| cost < b || (cost == b && c < bc)) {
                best = Some((cost, c));
            }
        }
        let c = best.unwrap().1;
        s.retain(|&v| v != c);
        order.push(c);
    }
    (s, order)
}

/// Brute-force OPT over subsets of `cands` of size `k`.
pub fn brute_opt(n: usize, d: &[f64], w: &[f64], domain: &[usize], cands: &[usize], k: usize, obj: Objective) -> f64 {
    fn rec(
        start: usize,
        left: usize,
        cands: &[usize],
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if left == 0 {
            f(cur);
            return;
        }
        for i in start..cands.len() {
            if cands.len() - i < left {
                break;
            }
            cur.push(cands[i]);
            rec(i + 1, left - 1, cands, cur, f);
            cur.pop();
        }
    }
    let k = k.min(cands.len());
    let mut best = f64::INFINITY;
    let mut eval = |s: &[usize]| {
        let c: f64 = domain
            .iter()
            .map(|&x| w[x] * pc(obj, s.iter().map(|&c| d[x * n + c]).fold(f64::INFINITY, f64::min)))
            .sum();
        best = best.min(c);
    };
    rec(0, k, cands, &mut Vec::new(), &mut eval);
    best
}

/// Independent adversary that keeps G as a dense matrix and answers Case 3
/// with Dijkstra on an explicitly built Ĝ (gate node, every open–open pair
/// joined by weight 1).
pub struct ReferenceAdversary {
    pub n: usize,
    pub m: f64,
    pub gate: f64,
    /// `w[x*n+y]`, infinite when absent.
    pub w: Vec<f64>,
    pub degree: Vec<usize>,
    pub open: Vec<bool>,
}

impl ReferenceAdversary {
    pub fn new(p: &AdversaryParams) -> Self {
        let n = p.n;
        ReferenceAdversary {
            n,
            m: p.m(),
            gate: p.gate(),
            w: vec![f64::INFINITY; n * n],
            degree: vec![1; n],
            open: vec![true; n],
        }
    }

    /// Dijkstra from `src` on G (no gate) or on Ĝ (gate and virtual edges).
    fn dijkstra(&self, src: usize, hat: bool) -> Vec<f64> {
        let n = self.n;
        // node n is the gate
        let total = n + 1;
        let mut dist = vec![f64::INFINITY; total];
        let mut done = vec![false; total];
        dist[src] = 0.0;
        for _ in 0..total {
            let mut u = usize::MAX;
            for v in 0..total {
                if !done[v] && dist[v].is_finite() && (u == usize::MAX || dist[v] < dist[u]) {
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            let du = dist[u];
            for v in 0..total {
                if done[v] {
                    continue;
                }
                let wt = if u == n || v == n {
                    if hat {
                        self.gate
                    } else {
                        f64::INFINITY
                    }
                } else {
                    let mut wt = self.w[u * n + v];
                    if hat && self.open[u] && self.open[v] {
                        wt = wt.min(1.0);
                    }
                    wt
                };
                if du + wt < dist[v] {
                    dist[v] = du + wt;
                }
            }
        }
        dist.truncate(n);
        dist
    }

    fn add(&mut self, a: usize, b: usize, wt: f64) {
        let n = self.n;
        assert!(self.w[a * n + b].is_infinite());
        self.w[a * n + b] = wt;
        self.w[b * n + a] = wt;
        self.degree[a] += 1;
        self.degree[b] += 1;
    }

    /// Returns the answer and the materialized open–open edge, if any.
    pub fn answer(&mut self, x: usize, y: usize) -> (f64, Option<(usize, usize)>) {
        let n = self.n;
        if x == y {
            return (0.0, None);
        }
        if self.w[x * n + y].is_finite() {
            return (self.w[x * n + y], None);
        }
        let (ans, virt) = if self.open[x] && self.open[y] {
            (1.0f64.min(2.0 * self.gate), None)
        } else {
            let hat = self.dijkstra(x, true)[y];
            let gx = self.dijkstra(x, false);
            let real = gx[y].min(2.0 * self.gate);
            if hat < real {
                // nearest open node on each side, smallest index on ties
                let gy = self.dijkstra(y, false);
                let pick = |g: &Vec<f64>| {
                    (0..n).filter(|&u| self.open[u]).min_by(|&a, &b| g[a].total_cmp(&g[b]).then(a.cmp(&b))).unwrap()
                };
                let (u, v) = (pick(&gx), pick(&gy));
                assert_eq!(gx[u] + 1.0 + gy[v], hat);
                (hat, Some((u, v)))
            } else {
                (hat, None)
            }
        };
        if let Some((u, v)) = virt {
            self.add(u, v, 1.0);
        }
        self.add(x, y, ans);
        for z in [Some(x), Some(y), virt.map(|e| e.0), virt.map(|e| e.1)].into_iter().flatten() {
            if self.open[z] && self.degree[z] as f64 >= self.m {
                self.open[z] = false;
            }
        }
        (ans, virt)
    }

    /// All-pairs distances in Ĝ by Floyd–Warshall.
    pub fn final_metric(&self) -> Vec<f64> {
        let n = self.n;
        let t = n + 1;
        let mut d = vec![f64::INFINITY; t * t];
        for i in 0..t {
            d[i * t + i] = 0.0;
        }
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    let mut wt = self.w[x * n + y];
                    if self.open[x] && self.open[y] {
                        wt = wt.min(1.0);
                    }
                    d[x * t + y] = wt;
                }
            }
            d[x * t + n] = self.gate;
            d[n * t + x] = self.gate;
        }
        floyd_warshall(t, &mut d);
        let mut out = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                out[x * n + y] = d[x * t + y];
            }
        }
        out
    }
}
