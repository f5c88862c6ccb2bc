//! Immutable simple undirected graphs and the edge-list text format.
//!
//! Nodes are `0..n`. Edges keep the orientation and order they were given in,
//! so writing and re-reading a graph reproduces it exactly.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
    adj_eid: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Graph> {
        Graph::new(r.n, &r.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> RawGraph {
        RawGraph { n: g.n, edges: g.edge_list() }
    }
}

impl Graph {
    /// Validating constructor: rejects self-loops, duplicates and out-of-range ids.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n > u32::MAX as usize || edges.len() > u32::MAX as usize {
            return Err(Error::InvalidGraph("too many nodes or edges".into()));
        }
        let mut es = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            es.push((u as u32, v as u32));
        }
        let mut keys: Vec<u64> = es
            .iter()
            .map(|&(u, v)| {
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                ((a as u64) << 32) | b as u64
            })
            .collect();
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0] >> 32,
                w[0] & 0xFFFF_FFFF
            )));
        }
        Ok(Self::build(n, es))
    }

    fn build(n: usize, edges: Vec<(u32, u32)>) -> Graph {
        let mut deg = vec![0usize; n + 1];
        for &(u, v) in &edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets[..n].to_vec();
        let mut adj = vec![0u32; 2 * edges.len()];
        let mut adj_eid = vec![0u32; 2 * edges.len()];
        for (e, &(u, v)) in edges.iter().enumerate() {
            let (u, v) = (u as usize, v as usize);
            adj[fill[u]] = v as u32;
            adj_eid[fill[u]] = e as u32;
            fill[u] += 1;
            adj[fill[v]] = u as u32;
            adj_eid[fill[v]] = e as u32;
            fill[v] += 1;
        }
        Graph { n, edges, offsets, adj, adj_eid }
    }

    pub fn empty(n: usize) -> Graph {
        Self::build(n, Vec::new())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.edges[e];
        (u as usize, v as usize)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids parallel to `neighbors(v)`.
    #[inline]
    pub fn incident_edges(&self, v: usize) -> &[u32] {
        &self.adj_eid[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn offset(&self, v: usize) -> usize {
        self.offsets[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn is_regular(&self, d: usize) -> bool {
        (0..self.n).all(|v| self.degree(v) == d)
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a)
            .iter()
            .position(|&x| x as usize == b)
            .map(|i| self.incident_edges(a)[i] as usize)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    /// A proper 2-colouring if the graph is bipartite.
    pub fn two_coloring(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                let cx = color[x].unwrap();
                for &y in self.neighbors(x) {
                    let y = y as usize;
                    match color[y] {
                        None => {
                            color[y] = Some(!cx);
                            queue.push_back(y);
                        }
                        Some(cy) if cy == cx => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap()).collect())
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().filter(|c| !c.is_empty()).count() <= 1
    }

    /// Node sets of the connected components, in order of smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &y in self.neighbors(x) {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        comp.push(y as usize);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Same graph with node `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::InvalidGraph("permutation length mismatch".into()));
        }
        let es: Vec<(usize, usize)> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Graph::new(self.n, &es)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 * self.m() + 32);
        let _ = writeln!(s, "p {} {}", self.n, self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "e {u} {v}");
        }
        s
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Graph> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }

    pub fn parse(text: &str) -> Result<Graph> {
        Self::read_from(text.as_bytes())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            let mut parts = t.split_whitespace();
            let tag = parts.next().unwrap();
            let nums: std::result::Result<Vec<usize>, _> = parts.map(str::parse::<usize>).collect();
            let nums = nums.map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
            match (tag, nums.as_slice()) {
                ("p", [n, m]) => {
                    if header.is_some() {
                        return Err(Error::Parse { line: lineno, msg: "second header".into() });
                    }
                    header = Some((*n, *m));
                    edges.reserve(*m);
                }
                ("e", [u, v]) => {
                    if header.is_none() {
                        return Err(Error::Parse { line: lineno, msg: "edge before header".into() });
                    }
                    edges.push((*u, *v));
                }
                _ => return Err(Error::Parse { line: lineno, msg: format!("unrecognised line `{t}`") }),
            }
        }
        let (n, m) = header.ok_or(Error::Parse { line: 0, msg: "missing `p` header".into() })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Graph::new(n, &edges)
    }
}
