//! Exact maximum matchings: Hopcroft–Karp for bipartite graphs, memoised
//! search for small general graphs, and a Tutte–Berge bound for certificates.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::Matching;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertSource {
    BipartiteSolver,
    BruteForce,
    GeneratorCertified,
    /// Size is only a lower bound given by the witness.
    LowerBound,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimumCertificate {
    pub size: usize,
    pub witness: Option<Matching>,
    pub source: CertSource,
}

impl OptimumCertificate {
    pub fn is_exact(&self) -> bool {
        self.source != CertSource::LowerBound
    }

    /// Checks that the witness, if present, is a matching of `g` of the stated size.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if let Some(w) = &self.witness {
            let rep = verify_matching(g, w);
            if !rep.valid {
                return Err(Error::InvalidMatching(rep.problems.join("; ")));
            }
            if w.size() != self.size {
                return Err(Error::InvalidMatching(format!("witness has {} edges, certificate says {}", w.size(), self.size)));
            }
        }
        Ok(())
    }
}

const NONE: u32 = u32::MAX;

/// Maximum matching of a bipartite graph; `sides[v]` is the colour of `v`.
pub fn max_matching_bipartite(g: &Graph, sides: &[bool]) -> Result<OptimumCertificate> {
    let n = g.n();
    if sides.len() != n {
        return Err(Error::InvalidBipartition("side vector has wrong length".into()));
    }
    if let Some((u, v)) = g.edges().find(|&(u, v)| sides[u] == sides[v]) {
        return Err(Error::InvalidBipartition(format!("edge ({u}, {v}) inside one side")));
    }
    let left: Vec<usize> = (0..n).filter(|&v| !sides[v]).collect();
    let mut mate = vec![NONE; n];
    let mut dist = vec![u32::MAX; n];
    let mut it = vec![0usize; n];
    loop {
        // BFS layering from free left nodes
        let mut q = VecDeque::new();
        for &l in &left {
            if mate[l] == NONE {
                dist[l] = 0;
                q.push_back(l);
            } else {
                dist[l] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = q.pop_front() {
            for &r in g.neighbors(l) {
                let m = mate[r as usize];
                if m == NONE {
                    found = true;
                } else if dist[m as usize] == u32::MAX {
                    dist[m as usize] = dist[l] + 1;
                    q.push_back(m as usize);
                }
            }
        }
        if !found {
            break;
        }
        for &l in &left {
            it[l] = 0;
        }
        // iterative DFS along the layers
        for &root in &left {
            if mate[root] != NONE {
                continue;
            }
            let mut stack: Vec<usize> = vec![root];
            let mut via: Vec<usize> = Vec::new();
            while let Some(&l) = stack.last() {
                let ns = g.neighbors(l);
                if it[l] == ns.len() {
                    dist[l] = u32::MAX;
                    stack.pop();
                    via.pop();
                    continue;
                }
                let r = ns[it[l]] as usize;
                it[l] += 1;
                let m = mate[r];
                if m == NONE {
                    via.push(r);
                    for (k, &ll) in stack.iter().enumerate() {
                        let rr = via[k];
                        mate[ll] = rr as u32;
                        mate[rr] = ll as u32;
                    }
                    break;
                } else if dist[m as usize] == dist[l] + 1 {
                    via.push(r);
                    stack.push(m as usize);
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for &l in &left {
        if mate[l] != NONE {
            pairs.push((l, mate[l] as usize));
        }
    }
    let m = Matching::from_pairs(n, &pairs)?;
    if let Some(path) = find_augmenting_path_bipartite(g, sides, &m) {
        return Err(Error::NotMaximum(format!("solver left augmenting path {path:?}")));
    }
    Ok(OptimumCertificate { size: m.size(), witness: Some(m), source: CertSource::BipartiteSolver })
}

/// Alternating BFS from free left nodes; returns an augmenting path if one exists.
pub fn find_augmenting_path_bipartite(g: &Graph, sides: &[bool], m: &Matching) -> Option<Vec<usize>> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut q = VecDeque::new();
    for v in 0..n {
        if !sides[v] && !m.is_covered(v) {
            seen[v] = true;
            q.push_back(v);
        }
    }
    while let Some(l) = q.pop_front() {
        for &r in g.neighbors(l) {
            let r = r as usize;
            if seen[r] {
                continue;
            }
            seen[r] = true;
            parent[r] = l;
            match m.mate(r) {
                None => {
                    let mut path = vec![r];
                    let mut x = r;
                    while parent[x] != usize::MAX {
                        x = parent[x];
                        path.push(x);
                    }
                    path.reverse();
                    return Some(path);
                }
                Some(l2) => {
                    if !seen[l2] {
                        seen[l2] = true;
                        parent[l2] = r;
                        q.push_back(l2);
                    }
                }
            }
        }
    }
    None
}

pub const BRUTE_MAX_NODES: usize = 18;
pub const BRUTE_MAX_EDGES: usize = 24;

/// Exact maximum matching by memoised search over sets of remaining nodes.
/// Accepts graphs with at most 18 nodes, or at most 24 edges.
pub fn max_matching_bruteforce(g: &Graph) -> Result<OptimumCertificate> {
    let active: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
    if !(g.n() <= BRUTE_MAX_NODES || g.m() <= BRUTE_MAX_EDGES) || active.len() > 64 {
        return Err(Error::TooLarge(format!("n = {}, m = {}", g.n(), g.m())));
    }
    let mut idx = vec![usize::MAX; g.n()];
    for (i, &v) in active.iter().enumerate() {
        idx[v] = i;
    }
    let adj: Vec<u64> = active
        .iter()
        .map(|&v| g.neighbors(v).iter().fold(0u64, |acc, &w| acc | 1u64 << idx[w as usize]))
        .collect();
    let full: u64 = if active.len() == 64 { u64::MAX } else { (1u64 << active.len()) - 1 };
    let mut memo: HashMap<u64, u8> = HashMap::new();
    fn best(mask: u64, adj: &[u64], memo: &mut HashMap<u64, u8>) -> u8 {
        if mask == 0 {
            return 0;
        }
        if let Some(&b) = memo.get(&mask) {
            return b;
        }
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1u64 << v);
        let mut b = best(rest, adj, memo);
        let mut ns = adj[v] & rest;
        while ns != 0 {
            let w = ns.trailing_zeros() as usize;
            ns &= ns - 1;
            let c = 1 + best(rest & !(1u64 << w), adj, memo);
            if c > b {
                b = c;
            }
        }
        memo.insert(mask, b);
        b
    }
    let size = best(full, &adj, &mut memo) as usize;
    // walk the memo to recover a witness
    let mut pairs = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1u64 << v);
        let target = best(mask, &adj, &mut memo);
        if best(rest, &adj, &mut memo) == target {
            mask = rest;
            continue;
        }
        let mut ns = adj[v] & rest;
        loop {
            let w = ns.trailing_zeros() as usize;
            ns &= ns - 1;
            let r2 = rest & !(1u64 << w);
            if 1 + best(r2, &adj, &mut memo) == target {
                pairs.push((active[v], active[w]));
                mask = r2;
                break;
            }
        }
    }
    let m = Matching::from_pairs(g.n(), &pairs)?;
    debug_assert_eq!(m.size(), size);
    Ok(OptimumCertificate { size, witness: Some(m), source: CertSource::BruteForce })
}

/// Bipartite solver when the graph is 2-colourable, brute force otherwise.
pub fn max_matching_exact(g: &Graph) -> Result<OptimumCertificate> {
    match g.two_coloring() {
        Some(sides) => max_matching_bipartite(g, &sides),
        None => max_matching_bruteforce(g),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub valid: bool,
    pub maximal: bool,
    pub size: usize,
    pub problems: Vec<String>,
}

/// Validity (disjoint pairs that are graph edges) and maximality.
pub fn verify_matching(g: &Graph, m: &Matching) -> MatchingReport {
    let mut problems = Vec::new();
    let mut covered = vec![false; g.n()];
    if m.n() != g.n() {
        problems.push(format!("matching is over {} nodes, graph has {}", m.n(), g.n()));
    }
    for &(u, v) in m.pairs() {
        if u >= g.n() || v >= g.n() {
            problems.push(format!("pair ({u}, {v}) out of range"));
            continue;
        }
        if !g.has_edge(u, v) {
            problems.push(format!("pair ({u}, {v}) is not an edge"));
        }
        for x in [u, v] {
            if covered[x] {
                problems.push(format!("node {x} covered twice"));
            }
            covered[x] = true;
        }
    }
    let valid = problems.is_empty();
    let free_edge = g.edges().find(|&(u, v)| !covered[u] && !covered[v]);
    if let Some((u, v)) = free_edge {
        problems.push(format!("edge ({u}, {v}) has both endpoints free"));
    }
    MatchingReport { valid, maximal: free_edge.is_none(), size: m.size(), problems }
}

/// `(n + |U| − odd(G − U)) / 2`, an upper bound on every matching of `g`.
pub fn tutte_berge_bound(g: &Graph, barrier: &[usize]) -> usize {
    let mut removed = vec![false; g.n()];
    for &u in barrier {
        removed[u] = true;
    }
    let k = removed.iter().filter(|&&r| r).count();
    let mut seen = removed.clone();
    let mut odd = 0;
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(x) = stack.pop() {
            size += 1;
            for &y in g.neighbors(x) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y as usize);
                }
            }
        }
        odd += size % 2;
    }
    (g.n() + k - odd) / 2
}
