//! The greedy matching algorithms.
//!
//! Every matcher runs on a [`DynamicGraph`] and records a full
//! [`ExecutionTrace`]: first endpoint, its degree when selected, its mate, and
//! all edges deleted in that step.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamic::{DynamicGraph, TiePolicy};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::{ExecutionTrace, Matching};
use crate::rng::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    Mrg,
    #[serde(rename = "mingreedy")]
    MinGreedy,
    KarpSipser,
    Edsm,
    Mds,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Greedy, Algorithm::Mrg, Algorithm::MinGreedy, Algorithm::KarpSipser, Algorithm::Edsm, Algorithm::Mds];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Mrg => "mrg",
            Algorithm::MinGreedy => "mingreedy",
            Algorithm::KarpSipser => "karp-sipser",
            Algorithm::Edsm => "edsm",
            Algorithm::Mds => "mds",
        }
    }

    /// Whether every first endpoint has minimum nonzero degree.
    pub fn selects_min_degree(self) -> bool {
        matches!(self, Algorithm::MinGreedy | Algorithm::Edsm)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::ParameterViolation(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct MatcherConfig {
    pub algorithm: Algorithm,
    /// Tie-breaking for the first endpoint (or the edge, for edge-based rules).
    pub first: TiePolicy,
    /// Tie-breaking for the mate.
    pub second: TiePolicy,
    pub seed: u64,
}

impl MatcherConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        MatcherConfig { algorithm, first: TiePolicy::Uniform, second: TiePolicy::Uniform, seed }
    }

    pub fn with_policies(mut self, first: TiePolicy, second: TiePolicy) -> Self {
        self.first = first;
        self.second = second;
        self
    }
}

pub fn run(g: &Graph, cfg: &MatcherConfig) -> (Matching, ExecutionTrace) {
    match cfg.algorithm {
        Algorithm::Greedy => run_greedy(g, cfg),
        Algorithm::Mrg => run_mrg(g, cfg),
        Algorithm::MinGreedy => run_mingreedy(g, cfg),
        Algorithm::KarpSipser => run_karp_sipser(g, cfg),
        Algorithm::Edsm => run_edsm(g, cfg),
        Algorithm::Mds => run_mds(g, cfg),
    }
}

struct Runner {
    dg: DynamicGraph,
    trace: ExecutionTrace,
    buf: Vec<u32>,
    rng: RandomStream,
}

impl Runner {
    fn new(g: &Graph, cfg: &MatcherConfig) -> Runner {
        let alg = cfg.algorithm;
        Runner {
            dg: DynamicGraph::new(g),
            trace: ExecutionTrace::new(alg.name(), alg.selects_min_degree()),
            buf: Vec::new(),
            rng: RandomStream::new(cfg.seed),
        }
    }

    /// Matches `u` to `v` along live edge `e`; returns the deleted edges.
    fn take(&mut self, u: usize, v: usize, e: usize) -> &[u32] {
        let d = self.dg.degree(u);
        self.buf.clear();
        self.dg.remove_edge_pair_into(e, &mut self.buf).expect("matched edge is live");
        self.trace.push(u, d, v, e, &self.buf);
        &self.buf
    }

    fn finish(self, n: usize) -> (Matching, ExecutionTrace) {
        let m = self.trace.matching(n).expect("greedy picks are disjoint");
        (m, self.trace)
    }
}

/// Live edge ids with swap-delete, for uniform edge sampling.
struct LiveEdges {
    ids: Vec<u32>,
    pos: Vec<u32>,
}

impl LiveEdges {
    fn new(m: usize) -> Self {
        LiveEdges { ids: (0..m as u32).collect(), pos: (0..m as u32).collect() }
    }

    fn remove(&mut self, e: u32) {
        let i = self.pos[e as usize] as usize;
        let last = *self.ids.last().unwrap();
        self.ids[i] = last;
        self.pos[last as usize] = i as u32;
        self.ids.pop();
    }

    fn pick(&self, policy: &TiePolicy, rng: &mut RandomStream) -> usize {
        self.ids[policy.choose(&self.ids, rng)] as usize
    }
}

/// Uniform random edge at every step.
pub fn run_greedy(g: &Graph, cfg: &MatcherConfig) -> (Matching, ExecutionTrace) {
    let mut r = Runner::new(g, cfg);
    let mut live = LiveEdges::new(g.m());
    while !live.ids.is_empty() {
        let e = live.pick(&cfg.first, &mut r.rng);
        let (u, v) = r.dg.endpoints(e);
        let removed = r.take(u, v, e).to_vec();
        for f in removed {
            live.remove(f);
        }
    }
    r.finish(g.n())
}

fn pick_neighbor(r: &mut Runner, u: usize, policy: &TiePolicy) -> (usize, usize) {
    let d = r.dg.degree(u);
    let i = match policy {
        TiePolicy::Uniform => r.rng.below(d),
        TiePolicy::StoredIndex(i) => i % d,
        _ => {
            let ns: Vec<u32> = r.dg.live_neighbors(u).map(|x| x as u32).collect();
            policy.choose(&ns, &mut r.rng)
        }
    };
    r.dg.incident_at(u, i)
}

/// Uniform random non-isolated node, matched to a uniform random neighbor.
pub fn run_mrg(g: &Graph, cfg: &MatcherConfig) -> (Matching, ExecutionTrace) {
    let mut r = Runner::new(g, cfg);
    while r.dg.live_edge_count() > 0 {
        let nodes = r.dg.non_isolated_nodes();
        let u = nodes[cfg.first.choose(nodes, &mut r.rng)] as usize;
        let (v, e) = pick_neighbor(&mut r, u, &cfg.second);
        r.take(u, v, e);
    }
    r.finish(g.n())
}

/// Minimum-degree node, matched to a neighbor.
pub fn run_mingreedy(g: &Graph, cfg: &MatcherConfig) -> (Matching, ExecutionTrace) {
    let mut r = Runner::new(g, cfg);
    while r.dg.live_edge_count() > 0 {
        let u = r.dg.min_degree_node(&cfg.first, &mut r.rng).expect("edges remain");
        let (v, e) = pick_neighbor(&mut r, u, &cfg.second);
        r.take(u, v, e);
    }
    r.finish(g.n())
}

/// Edge at a degree-1 node when one exists, otherwise a random edge.
/// The degree-1 node is drawn uniformly among all degree-1 nodes.
pub fn run_karp_sipser(g: &Graph, cfg: &MatcherConfig) -> (Matching, ExecutionTrace) {
    let mut r = Runner::new(g, cfg);
    let mut live = LiveEdges::new(g.m());
    while !live.ids.is_empty() {
        let (u, v, e) = if r.dg.min_degree() == Some(1) {
            let u = r.dg.min_degree_node(&cfg.first, &mut r.rng).expect("edges remain");
            let (v, e) = r.dg.incident_at(u, 0);
            (u, v, e)
        } else {
            let e = live.pick(&cfg.first, &mut r.rng);
            let (u, v) = r.dg.endpoints(e);
            (u, v, e)
        };
        let removed = r.take(u, v, e).to_vec();
        for f in removed {
            live.remove(f);
        }
    }
    r.finish(g.n())
}

/// Minimum-degree node, matched to a neighbor of minimum current degree.
pub fn run_edsm(g: &Graph, cfg: &MatcherConfig) -> (Matching, ExecutionTrace) {
    let mut r = Runner::new(g, cfg);
    let mut best: Vec<u32> = Vec::new();
    let mut best_e: Vec<u32> = Vec::new();
    while r.dg.live_edge_count() > 0 {
        let u = r.dg.min_degree_node(&cfg.first, &mut r.rng).expect("edges remain");
        best.clear();
        best_e.clear();
        let mut bd = usize::MAX;
        for (w, e) in r.dg.live_incident(u) {
            let d = r.dg.degree(w);
            if d < bd {
                bd = d;
                best.clear();
                best_e.clear();
            }
            if d == bd {
                best.push(w as u32);
                best_e.push(e as u32);
            }
        }
        let i = cfg.second.choose(&best, &mut r.rng);
        let (v, e) = (best[i] as usize, best_e[i] as usize);
        r.take(u, v, e);
    }
    r.finish(g.n())
}

/// Edge with minimum current endpoint-degree sum.
///
/// Edges sit in buckets indexed by degree sum. Sums only decrease, so after
/// each step the live edges of every node that lost degree are re-bucketed.
pub fn run_mds(g: &Graph, cfg: &MatcherConfig) -> (Matching, ExecutionTrace) {
    let mut r = Runner::new(g, cfg);
    let m = g.m();
    let maxsum = 2 * g.max_degree();
    let mut bucket: Vec<Vec<u32>> = vec![Vec::new(); maxsum + 1];
    let mut pos = vec![0u32; m];
    let mut sum = vec![0u32; m];
    for e in 0..m {
        let (a, b) = g.edge(e);
        let s = g.degree(a) + g.degree(b);
        sum[e] = s as u32;
        pos[e] = bucket[s].len() as u32;
        bucket[s].push(e as u32);
    }
    fn unlink(bucket: &mut [Vec<u32>], pos: &mut [u32], sum: &[u32], e: usize) {
        let b = &mut bucket[sum[e] as usize];
        let i = pos[e] as usize;
        let last = *b.last().unwrap();
        b[i] = last;
        pos[last as usize] = i as u32;
        b.pop();
    }
    let mut lo = 0usize;
    let mut touched: Vec<usize> = Vec::new();
    let mut mark = vec![false; g.n()];
    while r.dg.live_edge_count() > 0 {
        while bucket[lo].is_empty() {
            lo += 1;
        }
        let cands = &bucket[lo];
        let e = cands[cfg.first.choose(cands, &mut r.rng)] as usize;
        let (a, b) = r.dg.endpoints(e);
        let (u, v) = if r.dg.degree(b) < r.dg.degree(a) { (b, a) } else { (a, b) };
        let removed = r.take(u, v, e).to_vec();
        touched.clear();
        for &f in &removed {
            unlink(&mut bucket, &mut pos, &sum, f as usize);
            let (x, y) = r.dg.endpoints(f as usize);
            for z in [x, y] {
                if z != u && z != v && !mark[z] {
                    mark[z] = true;
                    touched.push(z);
                }
            }
        }
        for &z in &touched {
            mark[z] = false;
            for (_, f) in r.dg.live_incident(z) {
                let (x, y) = r.dg.endpoints(f);
                let s = r.dg.degree(x) + r.dg.degree(y);
                if s != sum[f] as usize {
                    unlink(&mut bucket, &mut pos, &sum, f);
                    sum[f] = s as u32;
                    pos[f] = bucket[s].len() as u32;
                    bucket[s].push(f as u32);
                    lo = lo.min(s);
                }
            }
        }
    }
    r.finish(g.n())
}

/// All executions reachable when the first endpoint ranges over every
/// minimum-degree node and the mate over every live neighbor. Executions are
/// distinct sequences of matched edges.
pub fn enumerate_min_degree_executions(g: &Graph, limit: usize) -> Result<Vec<(Matching, ExecutionTrace)>> {
    let mut out = Vec::new();
    let dg = DynamicGraph::new(g);
    let trace = ExecutionTrace::new("mingreedy-exhaustive", true);
    explore(g, dg, trace, limit, &mut out)?;
    Ok(out)
}

fn explore(
    g: &Graph,
    dg: DynamicGraph,
    trace: ExecutionTrace,
    limit: usize,
    out: &mut Vec<(Matching, ExecutionTrace)>,
) -> Result<()> {
    if dg.live_edge_count() == 0 {
        if out.len() >= limit {
            return Err(Error::ExecutionLimit(limit));
        }
        let m = trace.matching(g.n())?;
        out.push((m, trace));
        return Ok(());
    }
    let mut seen: Vec<usize> = Vec::new();
    let mut moves: Vec<(usize, usize, usize)> = Vec::new();
    for &u in dg.min_degree_nodes() {
        let u = u as usize;
        for (v, e) in dg.live_incident(u) {
            if !seen.contains(&e) {
                seen.push(e);
                moves.push((u, v, e));
            }
        }
    }
    let last = moves.len() - 1;
    let mut dg = Some(dg);
    let mut trace = Some(trace);
    for (i, (u, v, e)) in moves.into_iter().enumerate() {
        let (mut d, mut t) = if i == last {
            (dg.take().unwrap(), trace.take().unwrap())
        } else {
            (dg.clone().unwrap(), trace.clone().unwrap())
        };
        let deg = d.degree(u);
        let mut buf = Vec::new();
        d.remove_edge_pair_into(e, &mut buf)?;
        t.push(u, deg, v, e, &buf);
        explore(g, d, t, limit, out)?;
    }
    Ok(())
}

/// Runs MinGreedy with uniform ties and seeds `seed, seed+1, …`.
pub fn sample_min_degree_executions(g: &Graph, count: usize, seed: u64) -> Vec<(Matching, ExecutionTrace)> {
    (0..count)
        .map(|i| {
            let cfg = MatcherConfig::new(Algorithm::MinGreedy, crate::rng::mix_seed(seed, &[i as u64]));
            run_mingreedy(g, &cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let es: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &es).unwrap()
    }

    #[test]
    fn single_edge_every_algorithm() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        for a in Algorithm::ALL {
            let (m, t) = run(&g, &MatcherConfig::new(a, 3));
            assert_eq!(m.size(), 1);
            t.validate(&g).unwrap();
        }
    }

    #[test]
    fn empty_graph() {
        let g = Graph::empty(4);
        for a in Algorithm::ALL {
            let (m, t) = run(&g, &MatcherConfig::new(a, 3));
            assert_eq!(m.size(), 0);
            assert!(t.is_empty());
        }
    }

    #[test]
    fn edsm_on_p4_is_optimal() {
        let g = path(4);
        for s in 0..50 {
            let (m, _) = run_edsm(&g, &MatcherConfig::new(Algorithm::Edsm, s));
            assert_eq!(m.size(), 2);
        }
    }

    #[test]
    fn mds_on_p4_picks_an_end_edge() {
        let g = path(4);
        for s in 0..50 {
            let (_, t) = run_mds(&g, &MatcherConfig::new(Algorithm::Mds, s));
            assert_ne!(t.steps()[0].edge, 1);
        }
    }

    #[test]
    fn karp_sipser_pendant_first() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        for s in 0..50 {
            let (m, t) = run_karp_sipser(&g, &MatcherConfig::new(Algorithm::KarpSipser, s));
            assert_eq!(m.size(), 2);
            assert_eq!(t.steps()[0].edge, 3);
        }
    }

    #[test]
    fn enumeration_small() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(enumerate_min_degree_executions(&g, 10).unwrap().len(), 1);
        let ex = enumerate_min_degree_executions(&path(3), 10).unwrap();
        assert_eq!(ex.len(), 2);
        assert!(enumerate_min_degree_executions(&path(3), 1).is_err());
    }

    #[test]
    fn determinism() {
        let g = path(30);
        for a in Algorithm::ALL {
            let c = MatcherConfig::new(a, 11);
            assert_eq!(run(&g, &c).1, run(&g, &c).1);
        }
    }
}
