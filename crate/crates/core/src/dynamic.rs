//! Deletion-only graph with constant-time minimum-degree selection.
//!
//! Adjacency lists live in one flat cell array. Each cell stores the
//! neighbor, the index of the mirror cell in the neighbor's list, and the
//! edge id; the first `deg[v]` cells of `v` are the live ones. Nodes are kept
//! in an array `S` sorted by current degree and split into contiguous
//! buckets, one per occurring nonzero degree, linked in a doubly linked list
//! `D`. Isolated nodes sit in front of the first bucket and have no bucket.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::RandomStream;

const NONE: u32 = u32::MAX;

pub type Chooser = Arc<dyn Fn(&[u32]) -> usize + Send + Sync>;

/// How to choose among equally good candidates.
#[derive(Clone, Default)]
pub enum TiePolicy {
    #[default]
    Uniform,
    LowestId,
    /// Candidate at this position of the stored order (taken modulo the count).
    StoredIndex(usize),
    /// Caller-supplied chooser returning a position into the candidate slice.
    Callback(Chooser),
}

impl fmt::Debug for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TiePolicy::Uniform => write!(f, "Uniform"),
            TiePolicy::LowestId => write!(f, "LowestId"),
            TiePolicy::StoredIndex(i) => write!(f, "StoredIndex({i})"),
            TiePolicy::Callback(_) => write!(f, "Callback"),
        }
    }
}

impl TiePolicy {
    /// Position of the chosen candidate. `cands` must be non-empty.
    pub fn choose(&self, cands: &[u32], rng: &mut RandomStream) -> usize {
        debug_assert!(!cands.is_empty());
        match self {
            TiePolicy::Uniform => rng.below(cands.len()),
            TiePolicy::LowestId => {
                let mut best = 0;
                for (i, &c) in cands.iter().enumerate() {
                    if c < cands[best] {
                        best = i;
                    }
                }
                best
            }
            TiePolicy::StoredIndex(i) => i % cands.len(),
            TiePolicy::Callback(f) => f(cands).min(cands.len() - 1),
        }
    }

    /// Parses `uniform`, `lowest-id` or `index:<i>`.
    pub fn parse(s: &str) -> Option<TiePolicy> {
        match s {
            "uniform" => Some(TiePolicy::Uniform),
            "lowest-id" => Some(TiePolicy::LowestId),
            _ => s.strip_prefix("index:").and_then(|i| i.parse().ok()).map(TiePolicy::StoredIndex),
        }
    }

    pub fn name(&self) -> String {
        match self {
            TiePolicy::Uniform => "uniform".into(),
            TiePolicy::LowestId => "lowest-id".into(),
            TiePolicy::StoredIndex(i) => format!("index:{i}"),
            TiePolicy::Callback(_) => "callback".into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    nbr: u32,
    mirror: u32,
    eid: u32,
}

#[derive(Clone, Copy, Debug)]
struct Bucket {
    deg: u32,
    start: u32,
    prev: u32,
    next: u32,
}

#[derive(Clone, Debug)]
pub struct DynamicGraph {
    n: usize,
    start: Vec<u32>,
    cells: Vec<Cell>,
    deg: Vec<u32>,
    ends: Vec<(u32, u32)>,
    edge_cell: Vec<u32>,
    s: Vec<u32>,
    ps: Vec<u32>,
    pd: Vec<u32>,
    buckets: Vec<Bucket>,
    free: Vec<u32>,
    head: u32,
    live_edges: usize,
}

impl DynamicGraph {
    pub fn new(g: &Graph) -> DynamicGraph {
        let n = g.n();
        let m = g.m();
        let mut start = Vec::with_capacity(n + 1);
        let mut cells = Vec::with_capacity(2 * m);
        let mut deg = Vec::with_capacity(n);
        for v in 0..n {
            start.push(g.offset(v) as u32);
            deg.push(g.degree(v) as u32);
            for (&w, &e) in g.neighbors(v).iter().zip(g.incident_edges(v)) {
                cells.push(Cell { nbr: w, mirror: NONE, eid: e });
            }
        }
        start.push(cells.len() as u32);
        let ends: Vec<(u32, u32)> = g.edges().map(|(u, v)| (u as u32, v as u32)).collect();
        let mut edge_cell = vec![NONE; m];
        let mut other = vec![NONE; m];
        for v in 0..n {
            for i in start[v]..start[v + 1] {
                let e = cells[i as usize].eid as usize;
                if ends[e].0 as usize == v {
                    edge_cell[e] = i;
                } else {
                    other[e] = i;
                }
            }
        }
        for e in 0..m {
            let (a, b) = (edge_cell[e] as usize, other[e] as usize);
            cells[a].mirror = b as u32;
            cells[b].mirror = a as u32;
        }

        // counting sort of nodes by degree
        let maxd = deg.iter().copied().max().unwrap_or(0) as usize;
        let mut count = vec![0u32; maxd + 2];
        for &d in &deg {
            count[d as usize + 1] += 1;
        }
        for d in 0..=maxd {
            count[d + 1] += count[d];
        }
        let first: Vec<u32> = count.clone();
        let mut s = vec![0u32; n];
        let mut ps = vec![0u32; n];
        for v in 0..n {
            let d = deg[v] as usize;
            s[count[d] as usize] = v as u32;
            ps[v] = count[d];
            count[d] += 1;
        }
        let mut buckets = Vec::new();
        let mut head = NONE;
        let mut last = NONE;
        let mut bucket_of = vec![NONE; maxd + 1];
        for d in 1..=maxd {
            if first[d + 1] > first[d] {
                let id = buckets.len() as u32;
                buckets.push(Bucket { deg: d as u32, start: first[d], prev: last, next: NONE });
                if last == NONE {
                    head = id;
                } else {
                    buckets[last as usize].next = id;
                }
                last = id;
                bucket_of[d] = id;
            }
        }
        let pd = deg.iter().map(|&d| if d == 0 { NONE } else { bucket_of[d as usize] }).collect();
        DynamicGraph {
            n,
            start,
            cells,
            deg,
            ends,
            edge_cell,
            s,
            ps,
            pd,
            buckets,
            free: Vec::new(),
            head,
            live_edges: m,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn live_edge_count(&self) -> usize {
        self.live_edges
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.deg[v] as usize
    }

    #[inline]
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.ends[e];
        (u as usize, v as usize)
    }

    #[inline]
    pub fn is_live_edge(&self, e: usize) -> bool {
        let u = self.ends[e].0 as usize;
        self.edge_cell[e] < self.start[u] + self.deg[u]
    }

    #[inline]
    fn live_cells(&self, v: usize) -> &[Cell] {
        let a = self.start[v] as usize;
        &self.cells[a..a + self.deg[v] as usize]
    }

    pub fn live_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.live_cells(v).iter().map(|c| c.nbr as usize)
    }

    /// Live edges at `v` as `(neighbor, edge id)`.
    pub fn live_incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.live_cells(v).iter().map(|c| (c.nbr as usize, c.eid as usize))
    }

    /// Neighbor stored at live position `i` of `v`.
    #[inline]
    pub fn neighbor_at(&self, v: usize, i: usize) -> usize {
        debug_assert!(i < self.deg[v] as usize);
        self.cells[self.start[v] as usize + i].nbr as usize
    }

    /// `(neighbor, edge id)` at live position `i` of `v`.
    #[inline]
    pub fn incident_at(&self, v: usize, i: usize) -> (usize, usize) {
        debug_assert!(i < self.deg[v] as usize);
        let c = self.cells[self.start[v] as usize + i];
        (c.nbr as usize, c.eid as usize)
    }

    #[inline]
    fn bucket_end(&self, b: u32) -> u32 {
        let nx = self.buckets[b as usize].next;
        if nx == NONE {
            self.n as u32
        } else {
            self.buckets[nx as usize].start
        }
    }

    /// Smallest nonzero current degree.
    #[inline]
    pub fn min_degree(&self) -> Option<usize> {
        (self.head != NONE).then(|| self.buckets[self.head as usize].deg as usize)
    }

    /// All nodes of minimum nonzero degree, in stored order.
    pub fn min_degree_nodes(&self) -> &[u32] {
        if self.head == NONE {
            return &[];
        }
        let b = &self.buckets[self.head as usize];
        &self.s[b.start as usize..self.bucket_end(self.head) as usize]
    }

    /// Nodes with at least one live edge, contiguous in `S`.
    pub fn non_isolated_nodes(&self) -> &[u32] {
        if self.head == NONE {
            return &[];
        }
        &self.s[self.buckets[self.head as usize].start as usize..]
    }

    /// Bucket contents in increasing degree order, as `(degree, nodes)`.
    pub fn buckets(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        let mut b = self.head;
        while b != NONE {
            let bk = self.buckets[b as usize];
            let nodes = self.s[bk.start as usize..self.bucket_end(b) as usize].iter().map(|&x| x as usize).collect();
            out.push((bk.deg as usize, nodes));
            b = bk.next;
        }
        out
    }

    pub fn min_degree_node(&self, policy: &TiePolicy, rng: &mut RandomStream) -> Result<usize> {
        let c = self.min_degree_nodes();
        if c.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(c[policy.choose(c, rng)] as usize)
    }

    pub fn random_neighbor(&self, u: usize, policy: &TiePolicy, rng: &mut RandomStream) -> Result<usize> {
        let d = self.deg[u] as usize;
        if d == 0 {
            return Err(Error::IsolatedNode(u));
        }
        let i = match policy {
            TiePolicy::Uniform => rng.below(d),
            TiePolicy::StoredIndex(i) => i % d,
            _ => {
                let ns: Vec<u32> = self.live_cells(u).iter().map(|c| c.nbr).collect();
                policy.choose(&ns, rng)
            }
        };
        Ok(self.neighbor_at(u, i))
    }

    fn swap_cells(&mut self, owner: usize, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.cells.swap(i, j);
        for k in [i, j] {
            let c = self.cells[k];
            self.cells[c.mirror as usize].mirror = k as u32;
            if self.ends[c.eid as usize].0 as usize == owner {
                self.edge_cell[c.eid as usize] = k as u32;
            }
        }
    }

    fn drop_cell(&mut self, x: usize, c: usize) {
        let last = (self.start[x] + self.deg[x] - 1) as usize;
        self.swap_cells(x, c, last);
        self.deg[x] -= 1;
        self.decrement_bucket(x);
    }

    fn decrement_bucket(&mut self, x: usize) {
        let b = self.pd[x];
        let bk = self.buckets[b as usize];
        let d = bk.deg;
        let bs = bk.start as usize;
        let y = self.s[bs] as usize;
        let px = self.ps[x] as usize;
        self.s[px] = y as u32;
        self.ps[y] = px as u32;
        self.s[bs] = x as u32;
        self.ps[x] = bs as u32;
        self.buckets[b as usize].start += 1;
        let prev = bk.prev;
        if d == 1 {
            debug_assert!(prev == NONE);
            self.pd[x] = NONE;
        } else if prev != NONE && self.buckets[prev as usize].deg == d - 1 {
            self.pd[x] = prev;
        } else {
            let nb = Bucket { deg: d - 1, start: bs as u32, prev, next: b };
            let id = match self.free.pop() {
                Some(id) => {
                    self.buckets[id as usize] = nb;
                    id
                }
                None => {
                    self.buckets.push(nb);
                    (self.buckets.len() - 1) as u32
                }
            };
            if prev == NONE {
                self.head = id;
            } else {
                self.buckets[prev as usize].next = id;
            }
            self.buckets[b as usize].prev = id;
            self.pd[x] = id;
        }
        if self.buckets[b as usize].start == self.bucket_end(b) {
            let Bucket { prev, next, .. } = self.buckets[b as usize];
            if prev == NONE {
                self.head = next;
            } else {
                self.buckets[prev as usize].next = next;
            }
            if next != NONE {
                self.buckets[next as usize].prev = prev;
            }
            self.free.push(b);
        }
    }

    /// Deletes a live edge by id.
    pub fn delete_edge_id(&mut self, e: usize) -> Result<()> {
        if e >= self.ends.len() || !self.is_live_edge(e) {
            let (u, v) = self.ends.get(e).map(|&(u, v)| (u as usize, v as usize)).unwrap_or((usize::MAX, usize::MAX));
            return Err(Error::EdgeNotPresent(u, v));
        }
        let (u, v) = self.endpoints(e);
        let cu = self.edge_cell[e] as usize;
        self.drop_cell(u, cu);
        let cv = self.cells[self.edge_cell[e] as usize].mirror as usize;
        self.drop_cell(v, cv);
        self.live_edges -= 1;
        Ok(())
    }

    /// Live edge id between `u` and `v`, scanning the shorter live list.
    pub fn live_edge_between(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (a, b) = if self.deg[u] <= self.deg[v] { (u, v) } else { (v, u) };
        self.live_cells(a).iter().find(|c| c.nbr as usize == b).map(|c| c.eid as usize)
    }

    pub fn delete_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let e = self.live_edge_between(u, v).ok_or(Error::EdgeNotPresent(u, v))?;
        self.delete_edge_id(e)
    }

    /// Deletes every edge at `u` or `v`, appending their ids to `out`.
    /// `{u, v}` must be a live edge.
    pub fn remove_pair_into(&mut self, u: usize, v: usize, out: &mut Vec<u32>) -> Result<()> {
        let e = self.live_edge_between(u, v).ok_or(Error::EdgeNotPresent(u, v))?;
        self.remove_edge_pair_into(e, out)
    }

    /// Like `remove_pair_into` for the endpoints of live edge `e`.
    pub fn remove_edge_pair_into(&mut self, e: usize, out: &mut Vec<u32>) -> Result<()> {
        if e >= self.ends.len() || !self.is_live_edge(e) {
            return Err(Error::EdgeNotPresent(usize::MAX, usize::MAX));
        }
        let (u, v) = self.endpoints(e);
        for x in [u, v] {
            while self.deg[x] > 0 {
                let last = (self.start[x] + self.deg[x] - 1) as usize;
                let e = self.cells[last].eid as usize;
                out.push(e as u32);
                self.delete_edge_id(e)?;
            }
        }
        Ok(())
    }

    pub fn remove_matched_pair(&mut self, u: usize, v: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        self.remove_pair_into(u, v, &mut out)?;
        Ok(out.into_iter().map(|e| e as usize).collect())
    }

    /// Full structural self-check; `Err` names the first broken invariant.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut live = 0usize;
        for v in 0..self.n {
            let a = self.start[v] as usize;
            if self.deg[v] > self.start[v + 1] - self.start[v] {
                return Err(format!("degree of {v} exceeds its list"));
            }
            for i in a..a + self.deg[v] as usize {
                let c = self.cells[i];
                let m = self.cells[c.mirror as usize];
                if m.mirror as usize != i || m.nbr as usize != v || m.eid != c.eid {
                    return Err(format!("mirror handle of cell {i} broken"));
                }
                let w = c.nbr as usize;
                let wa = self.start[w] as usize;
                if (c.mirror as usize) < wa || c.mirror as usize >= wa + self.deg[w] as usize {
                    return Err(format!("mirror of live cell {i} is not live"));
                }
                live += 1;
            }
        }
        if live != 2 * self.live_edges {
            return Err("live edge count mismatch".into());
        }
        for (i, &x) in self.s.iter().enumerate() {
            if self.ps[x as usize] as usize != i {
                return Err(format!("position handle of {x} broken"));
            }
        }
        let mut pos = if self.head == NONE { self.n as u32 } else { self.buckets[self.head as usize].start };
        for i in 0..pos as usize {
            let x = self.s[i] as usize;
            if self.deg[x] != 0 || self.pd[x] != NONE {
                return Err(format!("node {x} in zero region has degree {}", self.deg[x]));
            }
        }
        let mut b = self.head;
        let mut prev = NONE;
        let mut last_deg = 0;
        while b != NONE {
            let bk = self.buckets[b as usize];
            if bk.prev != prev {
                return Err("bucket list back link broken".into());
            }
            if bk.deg <= last_deg {
                return Err("bucket degrees not increasing".into());
            }
            if bk.start != pos {
                return Err("buckets not contiguous".into());
            }
            let end = self.bucket_end(b);
            if end <= bk.start {
                return Err("empty bucket in list".into());
            }
            for i in bk.start..end {
                let x = self.s[i as usize] as usize;
                if self.deg[x] != bk.deg || self.pd[x] != b {
                    return Err(format!("node {x} in wrong bucket"));
                }
            }
            last_deg = bk.deg;
            prev = b;
            pos = end;
            b = bk.next;
        }
        if pos as usize != self.n {
            return Err("buckets do not cover S".into());
        }
        Ok(())
    }
}

/// Reference structure that answers every query by recomputation.
#[derive(Clone, Debug)]
pub struct NaiveDegreeOracle {
    adj: Vec<BTreeSet<usize>>,
}

impl NaiveDegreeOracle {
    pub fn new(g: &Graph) -> Self {
        let mut adj = vec![BTreeSet::new(); g.n()];
        for (u, v) in g.edges() {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        NaiveDegreeOracle { adj }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adj.iter().map(|a| a.len()).filter(|&d| d > 0).min()
    }

    pub fn min_degree_set(&self) -> BTreeSet<usize> {
        match self.min_degree() {
            None => BTreeSet::new(),
            Some(d) => (0..self.adj.len()).filter(|&v| self.adj[v].len() == d).collect(),
        }
    }

    pub fn min_degree_node(&self) -> Result<usize> {
        self.min_degree_set().into_iter().next().ok_or(Error::EmptyGraph)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn buckets(&self) -> Vec<(usize, BTreeSet<usize>)> {
        let mut by: std::collections::BTreeMap<usize, BTreeSet<usize>> = Default::default();
        for (v, a) in self.adj.iter().enumerate() {
            if !a.is_empty() {
                by.entry(a.len()).or_default().insert(v);
            }
        }
        by.into_iter().collect()
    }

    pub fn delete_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.adj.len() || v >= self.adj.len() || !self.adj[u].remove(&v) {
            return Err(Error::EdgeNotPresent(u, v));
        }
        self.adj[v].remove(&u);
        Ok(())
    }

    pub fn remove_matched_pair(&mut self, u: usize, v: usize) -> Result<Vec<(usize, usize)>> {
        if !self.adj.get(u).is_some_and(|a| a.contains(&v)) {
            return Err(Error::EdgeNotPresent(u, v));
        }
        let mut out = Vec::new();
        for x in [u, v] {
            let ns: Vec<usize> = self.adj[x].iter().copied().collect();
            for y in ns {
                self.delete_edge(x, y)?;
                out.push((x, y));
            }
        }
        Ok(out)
    }
}
