//! The adversary graph G and the three answering cases.
//!
//! Edge weights are either integers below `2·log_M n` or exactly
//! `2·log_M n`. Only the integer ones can ever beat the gate path, so only
//! they go into the adjacency lists; every edge lives in the weight map.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{AdversaryParams, Budget};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// The pair already had an edge.
    Known,
    /// Both endpoints open.
    BothOpen,
    /// Shortest path in Ĝ.
    ShortestPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoggedQuery {
    pub x: u32,
    pub y: u32,
    pub answer: f64,
    pub case: Case,
    pub artificial: bool,
    /// Open–open edge added to G because the answer used it.
    pub virtual_edge: Option<(u32, u32)>,
}

#[inline]
pub(crate) fn key(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    (u64::from(lo) << 32) | u64::from(hi)
}

/// Largest integer strictly below `two_g`, treating values within float
/// noise of an integer as equal to it.
pub(crate) fn below(two_g: f64) -> u32 {
    let r = two_g.round();
    let l = if (two_g - r).abs() <= 1e-9 * two_g.abs().max(1.0) { r - 1.0 } else { two_g.floor() };
    l.max(0.0) as u32
}

/// Reusable layered Dijkstra state for small integer weights.
#[derive(Debug, Clone)]
pub(crate) struct Search {
    stamp: Vec<u32>,
    dist: Vec<u32>,
    gen: u32,
    buckets: Vec<Vec<u32>>,
    pub(crate) settled: Vec<(u32, u32)>,
}

impl Search {
    pub(crate) fn new(n: usize) -> Self {
        Search { stamp: vec![0; n], dist: vec![0; n], gen: 0, buckets: Vec::new(), settled: Vec::new() }
    }

    fn get(&self, v: u32) -> Option<u32> {
        (self.stamp[v as usize] == self.gen).then(|| self.dist[v as usize])
    }

    /// Settles nodes in order of distance from `src`, up to `limit`. `stop`
    /// sees each complete layer and ends the search by returning true.
    /// Settled `(node, dist)` pairs are left in `settled`.
    pub(crate) fn explore(
        &mut self,
        adj: &[Vec<(u32, u32)>],
        src: u32,
        limit: u32,
        mut stop: impl FnMut(u32, &[(u32, u32)]) -> bool,
    ) {
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.gen = 1;
        }
        let depth = limit as usize + 1;
        if self.buckets.len() < depth {
            self.buckets.resize_with(depth, Vec::new);
        }
        self.buckets[..depth].iter_mut().for_each(Vec::clear);
        self.settled.clear();
        self.stamp[src as usize] = self.gen;
        self.dist[src as usize] = 0;
        self.buckets[0].push(src);
        for d in 0..=limit {
            let bucket = std::mem::take(&mut self.buckets[d as usize]);
            let start = self.settled.len();
            for &u in &bucket {
                // a node enters a bucket only on strict improvement, so never twice
                if self.get(u) == Some(d) {
                    self.settled.push((u, d));
                }
            }
            self.buckets[d as usize] = bucket;
            if stop(d, &self.settled[start..]) {
                return;
            }
            if d == limit {
                break;
            }
            for i in start..self.settled.len() {
                let u = self.settled[i].0;
                for &(v, w) in &adj[u as usize] {
                    let nd = d + w;
                    if nd <= limit && self.get(v).is_none_or(|old| nd < old) {
                        self.stamp[v as usize] = self.gen;
                        self.dist[v as usize] = nd;
                        self.buckets[nd as usize].push(v);
                    }
                }
            }
        }
    }
}

/// Integer weight of edge `(a, b)` if it is below the gate path.
#[inline]
pub(crate) fn int_weight(weights: &FxHashMap<u64, f64>, lmax: u32, a: u32, b: u32) -> Option<u32> {
    weights.get(&key(a, b)).filter(|&&w| w <= f64::from(lmax)).map(|&w| w as u32)
}

/// Shortest `a`–`b` distance in G without the gate if it is at most `t`.
pub(crate) fn bounded_distance(
    adj: &[Vec<(u32, u32)>],
    weights: &FxHashMap<u64, f64>,
    lmax: u32,
    search: &mut Search,
    a: u32,
    b: u32,
    t: u32,
) -> Option<u32> {
    if t == 0 {
        return None;
    }
    // search from the endpoint with fewer edges; the last hop is a map lookup
    let (a, b) = if adj[a as usize].len() <= adj[b as usize].len() { (a, b) } else { (b, a) };
    search.explore(adj, a, t - 1, |_, _| false);
    let mut best: Option<u32> = None;
    for &(z, d) in &search.settled {
        let cand = if z == b { Some(d) } else { int_weight(weights, lmax, z, b).map(|w| d + w) };
        if let Some(c) = cand.filter(|&c| c <= t) {
            best = Some(best.map_or(c, |b| b.min(c)));
        }
    }
    best
}

/// The adversary's graph: one node per point plus the implicit gate node,
/// which is joined to every point by an edge of weight `log_M n`.
#[derive(Debug, Clone)]
pub struct AdversaryGraph {
    params: AdversaryParams,
    m: f64,
    gate: f64,
    lmax: u32,
    budget: Budget,
    open: Vec<bool>,
    /// Includes the gate edge.
    degree: Vec<u32>,
    adj: Vec<Vec<(u32, u32)>>,
    weights: FxHashMap<u64, f64>,
    /// For closed nodes: open neighbors across weight-1 edges.
    open_units: Vec<Option<BTreeSet<u32>>>,
    closed: usize,
    edges: usize,
    calls: u64,
    log: Vec<LoggedQuery>,
    search: Search,
    returned: Option<Vec<usize>>,
    centers: Option<Vec<usize>>,
}

impl AdversaryGraph {
    pub fn new(params: AdversaryParams, budget: Budget) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        Ok(AdversaryGraph {
            m: params.m(),
            gate: params.gate(),
            lmax: below(2.0 * params.gate()),
            params,
            budget,
            open: vec![true; n],
            degree: vec![1; n],
            adj: vec![Vec::new(); n],
            weights: FxHashMap::default(),
            open_units: vec![None; n],
            closed: 0,
            edges: n,
            calls: 0,
            log: Vec::new(),
            search: Search::new(n),
            returned: None,
            centers: None,
        })
    }

    pub fn params(&self) -> &AdversaryParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// Closing threshold M.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Weight `log_M n` of every gate edge.
    pub fn gate(&self) -> f64 {
        self.gate
    }

    /// Largest integer distance strictly shorter than the gate path.
    pub fn max_short(&self) -> u32 {
        self.lmax
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn is_open(&self, x: usize) -> bool {
        self.open[x]
    }

    pub fn open_count(&self) -> usize {
        self.n() - self.closed
    }

    pub fn closed_count(&self) -> usize {
        self.closed
    }

    /// Degree of `v_x` in G, counting its gate edge.
    pub fn degree(&self, x: usize) -> usize {
        self.degree[x] as usize
    }

    /// Edges of G including the `n` gate edges.
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Weight of the edge `(v_x, v_y)` if present.
    pub fn weight(&self, x: usize, y: usize) -> Option<f64> {
        self.weights.get(&key(x as u32, y as u32)).copied()
    }

    /// Every non-gate edge as `(x, y, w)` with `x < y`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out: Vec<(usize, usize, f64)> =
            self.weights.iter().map(|(&k, &w)| ((k >> 32) as usize, (k & 0xffff_ffff) as usize, w)).collect();
        out.sort_unstable_by_key(|e| (e.0, e.1));
        out
    }

    /// Oracle calls made by the algorithm, including `x == y` calls.
    pub fn algorithm_queries(&self) -> u64 {
        self.calls
    }

    /// Self-distance calls are not logged, so a replay restores the count.
    pub(crate) fn set_algorithm_queries(&mut self, calls: u64) {
        self.calls = calls;
    }

    pub fn log(&self) -> &[LoggedQuery] {
        &self.log
    }

    /// Centers as returned by the algorithm, once finalized.
    pub fn returned(&self) -> Option<&[usize]> {
        self.returned.as_deref()
    }

    /// The padded center set S used for G_f, once finalized.
    pub fn centers(&self) -> Option<&[usize]> {
        self.centers.as_deref()
    }

    pub fn is_finalized(&self) -> bool {
        self.centers.is_some()
    }

    pub(crate) fn adjacency(&self) -> &[Vec<(u32, u32)>] {
        &self.adj
    }

    pub(crate) fn weight_map(&self) -> &FxHashMap<u64, f64> {
        &self.weights
    }

    /// Answers `d(x, y)`. Artificial queries skip the budget.
    pub fn answer(&mut self, x: usize, y: usize, artificial: bool) -> Result<f64> {
        let n = self.n();
        if x >= n {
            return Err(Error::UnknownPoint(x));
        }
        if y >= n {
            return Err(Error::UnknownPoint(y));
        }
        if !artificial {
            self.calls += 1;
            if let Budget::Enforced(limit) = self.budget {
                if self.calls > limit {
                    return Err(Error::QueryBudgetExceeded(limit));
                }
            }
        }
        if x == y {
            return Ok(0.0);
        }
        let (xu, yu) = (x as u32, y as u32);
        if let Some(&w) = self.weights.get(&key(xu, yu)) {
            self.log.push(LoggedQuery { x: xu, y: yu, answer: w, case: Case::Known, artificial, virtual_edge: None });
            return Ok(w);
        }
        let (answer, case, virt) = if self.open[x] && self.open[y] {
            let w = if self.lmax >= 1 { 1.0 } else { 2.0 * self.gate };
            (w, Case::BothOpen, None)
        } else {
            let (w, virt) = self.shortest(xu, yu);
            (w, Case::ShortestPath, virt)
        };
        if let Some((u, v)) = virt {
            self.add_edge(u, v, 1.0);
        }
        self.add_edge(xu, yu, answer);
        for z in [Some(xu), Some(yu), virt.map(|e| e.0), virt.map(|e| e.1)].into_iter().flatten() {
            self.close_if_full(z);
        }
        self.log.push(LoggedQuery { x: xu, y: yu, answer, case, artificial, virtual_edge: virt });
        Ok(answer)
    }

    /// `min(2g, D'(x,y), o_x + 1 + o_y)` with the open–open edge to add when
    /// the last term is strictly the smallest.
    fn shortest(&mut self, x: u32, y: u32) -> (f64, Option<(u32, u32)>) {
        let lmax = self.lmax;
        let mut via_open = None;
        if lmax >= 1 {
            if let Some((ox, u)) = self.nearest_open(x, lmax - 1) {
                if let Some((oy, v)) = self.nearest_open(y, lmax - 1 - ox) {
                    if u != v {
                        via_open = Some((ox + 1 + oy, (u, v)));
                    }
                }
            }
        }
        let t = via_open.map_or(lmax, |(len, _)| len);
        // no direct edge, so any real path has length at least 2
        let real = if t >= 2 {
            bounded_distance(&self.adj, &self.weights, lmax, &mut self.search, x, y, t)
        } else {
            None
        };
        match (real, via_open) {
            (Some(d), _) => (f64::from(d), None),
            (None, Some((len, e))) => (f64::from(len), Some(e)),
            (None, None) => (2.0 * self.gate, None),
        }
    }

    /// Distance in G (no gate) to the nearest open node, if at most `cap`,
    /// with the smallest such node.
    fn nearest_open(&mut self, z: u32, cap: u32) -> Option<(u32, u32)> {
        if self.open[z as usize] {
            return Some((0, z));
        }
        if cap == 0 {
            return None;
        }
        if let Some(&u) = self.open_units[z as usize].as_ref().and_then(|s| s.first()) {
            return Some((1, u));
        }
        if cap == 1 {
            return None;
        }
        let open = &self.open;
        let mut found = None;
        self.search.explore(&self.adj, z, cap, |d, layer| {
            if let Some(u) = layer.iter().map(|&(u, _)| u).filter(|&u| open[u as usize]).min() {
                found = Some((d, u));
                true
            } else {
                false
            }
        });
        found
    }

    fn add_edge(&mut self, a: u32, b: u32, w: f64) {
        let prev = self.weights.insert(key(a, b), w);
        debug_assert!(prev.is_none(), "edge ({a},{b}) added twice");
        self.degree[a as usize] += 1;
        self.degree[b as usize] += 1;
        self.edges += 1;
        if w <= f64::from(self.lmax) {
            let wi = w as u32;
            self.adj[a as usize].push((b, wi));
            self.adj[b as usize].push((a, wi));
            if wi == 1 {
                for (p, q) in [(a, b), (b, a)] {
                    if self.open[q as usize] {
                        if let Some(set) = self.open_units[p as usize].as_mut() {
                            set.insert(q);
                        }
                    }
                }
            }
        }
    }

    fn close_if_full(&mut self, z: u32) {
        let zi = z as usize;
        if !self.open[zi] || f64::from(self.degree[zi]) < self.m {
            return;
        }
        self.open[zi] = false;
        self.closed += 1;
        let mut set = BTreeSet::new();
        for &(u, w) in &self.adj[zi] {
            if w == 1 {
                if self.open[u as usize] {
                    set.insert(u);
                }
                if let Some(s) = self.open_units[u as usize].as_mut() {
                    s.remove(&z);
                }
            }
        }
        self.open_units[zi] = Some(set);
    }

    /// Pads `returned` to `k` distinct centers with the smallest unused
    /// indices, then queries every center against every point (centers in
    /// order, points by index) outside the budget.
    pub fn finalize(&mut self, returned: &[usize]) -> Result<()> {
        if self.is_finalized() {
            return Err(Error::InvalidParameter("adversary already finalized".into()));
        }
        let (n, k) = (self.n(), self.params.k);
        let mut centers: Vec<usize> = Vec::with_capacity(k);
        let mut used = vec![false; n];
        for &s in returned {
            if s >= n {
                return Err(Error::UnknownPoint(s));
            }
            if !used[s] {
                used[s] = true;
                centers.push(s);
            }
        }
        if centers.len() > k {
            return Err(Error::InvalidParameter(format!("algorithm returned {} centers, k = {k}", centers.len())));
        }
        let mut next = 0;
        while centers.len() < k {
            while used[next] {
                next += 1;
            }
            used[next] = true;
            centers.push(next);
        }
        for &s in &centers {
            for y in 0..n {
                if y != s {
                    self.answer(s, y, true)?;
                }
            }
        }
        self.returned = Some(returned.to_vec());
        self.centers = Some(centers);
        Ok(())
    }

    /// Multi-source distance in G to the nearest open node, or `u32::MAX`
    /// beyond `lmax − 1`.
    pub(crate) fn open_reach(&self) -> Vec<u32> {
        let n = self.n();
        let mut reach = vec![u32::MAX; n];
        if self.lmax == 0 {
            return reach;
        }
        let cap = self.lmax - 1;
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); cap as usize + 1];
        for x in 0..n {
            if self.open[x] {
                reach[x] = 0;
                buckets[0].push(x as u32);
            }
        }
        for d in 0..=cap {
            let bucket = std::mem::take(&mut buckets[d as usize]);
            for &u in &bucket {
                if reach[u as usize] != d {
                    continue;
                }
                for &(v, w) in &self.adj[u as usize] {
                    let nd = d + w;
                    if nd <= cap && nd < reach[v as usize] {
                        reach[v as usize] = nd;
                        buckets[nd as usize].push(v);
                    }
                }
            }
        }
        reach
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Objective;

    fn graph(n: usize, k: usize) -> AdversaryGraph {
        AdversaryGraph::new(AdversaryParams::new(n, k, 1.0, Objective::Median).unwrap(), Budget::Unlimited).unwrap()
    }

    #[test]
    fn below_is_strict() {
        assert_eq!(below(3.0), 2);
        assert_eq!(below(3.0000000001), 2);
        assert_eq!(below(3.2), 3);
        assert_eq!(below(0.7), 0);
    }

    #[test]
    fn case_two_then_known() {
        let mut g = graph(64, 1);
        assert_eq!(g.answer(3, 5, false).unwrap(), 1.0);
        assert_eq!(g.answer(5, 3, false).unwrap(), 1.0);
        assert_eq!(g.log()[1].case, Case::Known);
        assert_eq!(g.degree(3), 2);
        assert_eq!(g.edge_count(), 65);
    }

    #[test]
    fn self_query_counts_but_is_not_logged() {
        let mut g = graph(16, 1);
        assert_eq!(g.answer(2, 2, false).unwrap(), 0.0);
        assert_eq!((g.algorithm_queries(), g.log().len()), (1, 0));
    }

    #[test]
    fn closed_node_gets_two_hop_answer() {
        // n = 1024, k = 1: M = 100, log_M n ≈ 1.505, so 2g ≈ 3.01 and
        // distances up to 3 beat the gate
        let mut g = graph(1024, 1);
        for y in 1..100 {
            assert_eq!(g.answer(0, y, false).unwrap(), 1.0);
        }
        assert!(!g.is_open(0));
        // 0 is closed, 500 open: path 0 - 1 - 500 via the virtual edge (1, 500)
        assert_eq!(g.answer(0, 500, false).unwrap(), 2.0);
        assert_eq!(g.log().last().unwrap().virtual_edge, Some((1, 500)));
        assert_eq!(g.weight(1, 500), Some(1.0));
        assert_eq!(g.answer(2, 500, false).unwrap(), 1.0);
    }

    #[test]
    fn budget_is_enforced() {
        let p = AdversaryParams::new(16, 1, 1.0, Objective::Median).unwrap();
        let mut g = AdversaryGraph::new(p, Budget::Enforced(2)).unwrap();
        g.answer(0, 1, false).unwrap();
        g.answer(0, 2, false).unwrap();
        assert!(matches!(g.answer(0, 3, false), Err(Error::QueryBudgetExceeded(2))));
        assert!(g.answer(0, 3, true).is_ok());
    }

    #[test]
    fn finalize_pads_and_queries_everything() {
        let mut g = graph(20, 3);
        g.answer(4, 7, false).unwrap();
        g.finalize(&[7, 7]).unwrap();
        assert_eq!(g.centers().unwrap(), &[7, 0, 1]);
        for &s in g.centers().unwrap() {
            for y in 0..20 {
                assert!(y == s || g.weight(s, y).is_some());
            }
        }
        assert!(g.finalize(&[1]).is_err());
    }

    #[test]
    fn search_layers() {
        let adj = vec![vec![(1, 1), (2, 3)], vec![(0, 1), (2, 1)], vec![(0, 3), (1, 1)]];
        let mut s = Search::new(3);
        s.explore(&adj, 0, 5, |_, _| false);
        let mut got = s.settled.clone();
        got.sort_unstable();
        assert_eq!(got, vec![(0, 0), (1, 1), (2, 2)]);
    }
}
