//! Matchings and per-step execution traces.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::dynamic::DynamicGraph;
use crate::error::{Error, Result};
use crate::graph::Graph;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    n: usize,
    pairs: Vec<(usize, usize)>,
    #[serde(skip)]
    mate: Vec<u32>,
}

impl Matching {
    pub fn new(n: usize) -> Matching {
        Matching { n, pairs: Vec::new(), mate: vec![NONE; n] }
    }

    /// Builds a matching from pairs, rejecting shared or out-of-range nodes.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Matching> {
        let mut m = Matching::new(n);
        for &(u, v) in pairs {
            m.add(u, v)?;
        }
        Ok(m)
    }

    fn ensure_mates(&mut self) {
        if self.mate.len() != self.n {
            self.mate = vec![NONE; self.n];
            for &(u, v) in &self.pairs {
                self.mate[u] = v as u32;
                self.mate[v] = u as u32;
            }
        }
    }

    pub fn add(&mut self, u: usize, v: usize) -> Result<()> {
        self.ensure_mates();
        if u >= self.n || v >= self.n || u == v {
            return Err(Error::InvalidMatching(format!("bad pair ({u}, {v})")));
        }
        if self.mate[u] != NONE || self.mate[v] != NONE {
            return Err(Error::InvalidMatching(format!("pair ({u}, {v}) shares a node")));
        }
        self.mate[u] = v as u32;
        self.mate[v] = u as u32;
        self.pairs.push((u, v));
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    #[inline]
    pub fn mate(&self, v: usize) -> Option<usize> {
        match self.mate.get(v) {
            Some(&m) if m != NONE => Some(m as usize),
            _ => None,
        }
    }

    #[inline]
    pub fn is_covered(&self, v: usize) -> bool {
        self.mate(v).is_some()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.mate(u) == Some(v)
    }

    /// Pairs normalised to `(min, max)` and sorted.
    pub fn normalized(&self) -> Vec<(usize, usize)> {
        let mut p: Vec<_> = self.pairs.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        p.sort_unstable();
        p
    }

    /// Restores the mate table after deserialisation.
    pub fn rebuild(mut self) -> Result<Matching> {
        let pairs = std::mem::take(&mut self.pairs);
        Matching::from_pairs(self.n, &pairs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// First endpoint.
    pub u: u32,
    /// Current degree of `u` when it was selected.
    pub deg_u: u32,
    /// Mate of `u`.
    pub v: u32,
    /// Edge id of `{u, v}`.
    pub edge: u32,
    removed_start: u32,
    removed_end: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExecutionTrace {
    pub algorithm: String,
    /// Whether every first endpoint was claimed to have minimum nonzero degree.
    pub min_degree: bool,
    steps: Vec<TraceStep>,
    removed: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct StepLine {
    step: usize,
    u: usize,
    deg_u: usize,
    v: usize,
    edge: usize,
    removed: Vec<(usize, String)>,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    algorithm: String,
    min_degree: bool,
    steps: usize,
}

impl ExecutionTrace {
    pub fn new(algorithm: &str, min_degree: bool) -> Self {
        ExecutionTrace { algorithm: algorithm.to_string(), min_degree, ..Default::default() }
    }

    pub fn push(&mut self, u: usize, deg_u: usize, v: usize, edge: usize, removed: &[u32]) {
        let a = self.removed.len() as u32;
        self.removed.extend_from_slice(removed);
        self.steps.push(TraceStep {
            u: u as u32,
            deg_u: deg_u as u32,
            v: v as u32,
            edge: edge as u32,
            removed_start: a,
            removed_end: self.removed.len() as u32,
        });
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Edge ids removed in step `i`.
    pub fn removed(&self, i: usize) -> &[u32] {
        let s = &self.steps[i];
        &self.removed[s.removed_start as usize..s.removed_end as usize]
    }

    /// Matched edge ids in pick order.
    pub fn matched_edges(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.edge as usize).collect()
    }

    pub fn matching(&self, n: usize) -> Result<Matching> {
        let pairs: Vec<(usize, usize)> = self.steps.iter().map(|s| (s.u as usize, s.v as usize)).collect();
        Matching::from_pairs(n, &pairs)
    }

    /// Step index at which each edge was removed.
    pub fn removal_steps(&self, m: usize) -> Result<Vec<u32>> {
        let mut at = vec![NONE; m];
        for (i, _) in self.steps.iter().enumerate() {
            for &e in self.removed(i) {
                let e = e as usize;
                if e >= m || at[e] != NONE {
                    return Err(Error::TraceMismatch(format!("edge {e} removed twice or out of range")));
                }
                at[e] = i as u32;
            }
        }
        if let Some(e) = at.iter().position(|&s| s == NONE) {
            return Err(Error::TraceMismatch(format!("edge {e} never removed")));
        }
        Ok(at)
    }

    /// Replays the trace on `g`, checking the edge bookkeeping and, if the
    /// trace claims min-degree selection, the recorded degrees.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.removal_steps(g.m())?;
        let mut dg = DynamicGraph::new(g);
        let mut buf = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            let (u, v, e) = (s.u as usize, s.v as usize, s.edge as usize);
            if e >= g.m() {
                return Err(Error::TraceMismatch(format!("step {i}: edge id {e} out of range")));
            }
            let (a, b) = g.edge(e);
            if !((a, b) == (u, v) || (a, b) == (v, u)) {
                return Err(Error::TraceMismatch(format!("step {i}: edge {e} is not ({u}, {v})")));
            }
            if dg.degree(u) != s.deg_u as usize {
                return Err(Error::TraceMismatch(format!(
                    "step {i}: recorded degree {} of {u}, actual {}",
                    s.deg_u,
                    dg.degree(u)
                )));
            }
            if self.min_degree && dg.min_degree() != Some(s.deg_u as usize) {
                return Err(Error::TraceMismatch(format!("step {i}: {u} does not have minimum degree")));
            }
            buf.clear();
            dg.remove_pair_into(u, v, &mut buf)
                .map_err(|_| Error::TraceMismatch(format!("step {i}: ({u}, {v}) not live")))?;
            let mut got = buf.clone();
            let mut want = self.removed(i).to_vec();
            got.sort_unstable();
            want.sort_unstable();
            if got != want {
                return Err(Error::TraceMismatch(format!("step {i}: removed edges differ")));
            }
        }
        if dg.live_edge_count() != 0 {
            return Err(Error::TraceMismatch("edges remain after the last step".into()));
        }
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let h = HeaderLine { algorithm: self.algorithm.clone(), min_degree: self.min_degree, steps: self.len() };
        serde_json::to_writer(&mut w, &h)?;
        writeln!(w)?;
        for (i, s) in self.steps.iter().enumerate() {
            let line = StepLine {
                step: i,
                u: s.u as usize,
                deg_u: s.deg_u as usize,
                v: s.v as usize,
                edge: s.edge as usize,
                removed: self
                    .removed(i)
                    .iter()
                    .map(|&e| {
                        let tag = if e == s.edge { "M" } else { "other" };
                        (e as usize, tag.to_string())
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut w, &line)?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<ExecutionTrace> {
        let mut lines = r.lines();
        let first = lines.next().ok_or(Error::Parse { line: 1, msg: "empty trace".into() })??;
        let h: HeaderLine = serde_json::from_str(&first)?;
        let mut t = ExecutionTrace::new(&h.algorithm, h.min_degree);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let s: StepLine = serde_json::from_str(&line)?;
            if s.step != t.len() {
                return Err(Error::Parse { line: i + 2, msg: "step numbers out of order".into() });
            }
            let rem: Vec<u32> = s.removed.iter().map(|&(e, _)| e as u32).collect();
            t.push(s.u, s.deg_u, s.v, s.edge, &rem);
        }
        if t.len() != h.steps {
            return Err(Error::Parse { line: 0, msg: "step count differs from header".into() });
        }
        Ok(t)
    }
}
