//! k-uniform hypergraph matching: greedy, brute force, the hard gadget and
//! its priority game.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
    #[serde(skip)]
    incident: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates uniformity, node range and distinctness; edges are stored sorted.
    pub fn new(n: usize, k: usize, edges: Vec<Vec<usize>>) -> Result<Hypergraph> {
        let bad = |m: String| Error::InvalidGraph(m);
        if k == 0 {
            return Err(bad("k must be positive".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (i, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            if e.len() != k {
                return Err(bad(format!("edge {i} has {} nodes, expected {k}", e.len())));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(bad(format!("edge {i} repeats a node")));
            }
            if e.last().is_some_and(|&x| x >= n) {
                return Err(bad(format!("edge {i} has a node outside 0..{n}")));
            }
            if !seen.insert(e.clone()) {
                return Err(bad(format!("edge {i} is a duplicate")));
            }
            out.push(e);
        }
        let mut h = Hypergraph { n, k, edges: out, incident: Vec::new() };
        h.index();
        Ok(h)
    }

    fn index(&mut self) {
        self.incident = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                self.incident[v].push(i);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn intersection(&self, a: usize, b: usize) -> usize {
        let (x, y) = (&self.edges[a], &self.edges[b]);
        x.iter().filter(|v| y.binary_search(v).is_ok()).count()
    }

    /// Pairwise disjoint edge indices.
    pub fn is_matching(&self, sel: &[usize]) -> bool {
        let mut used = HashSet::new();
        sel.iter().all(|&i| i < self.m() && self.edges[i].iter().all(|&v| used.insert(v)))
    }

    /// No edge can be added to `sel`.
    pub fn is_maximal(&self, sel: &[usize]) -> bool {
        let used: HashSet<usize> = sel.iter().flat_map(|&i| self.edges[i].iter().copied()).collect();
        self.edges.iter().all(|e| e.iter().any(|v| used.contains(v)))
    }

    pub fn relabel(&self, perm: &[usize]) -> Result<Hypergraph> {
        let es = self.edges.iter().map(|e| e.iter().map(|&v| perm[v]).collect()).collect();
        Hypergraph::new(self.n, self.k, es)
    }

    /// Item of node `u`: the other nodes of each incident edge.
    pub fn item(&self, u: usize) -> HyperDataItem {
        let mut edges: Vec<Vec<usize>> =
            self.incident[u].iter().map(|&i| self.edges[i].iter().copied().filter(|&x| x != u).collect()).collect();
        edges.sort();
        HyperDataItem { node: u, edges }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p {} {} {}\n", self.n, self.m(), self.k);
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Hypergraph> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn parse(text: &str) -> Result<Hypergraph> {
        Self::read_from(text.as_bytes())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Hypergraph> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            let perr = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            let nums = |s: &str| -> Result<Vec<usize>> {
                s.split_whitespace().map(|x| x.parse::<usize>().map_err(|_| perr(&format!("bad number `{x}`")))).collect()
            };
            if let Some(rest) = t.strip_prefix('p') {
                if header.is_some() {
                    return Err(perr("duplicate header"));
                }
                match nums(rest)?[..] {
                    [n, m, k] => header = Some((n, m, k)),
                    _ => return Err(perr("expected `p <n> <m> <k>`")),
                }
            } else {
                if header.is_none() {
                    return Err(perr("edge before header"));
                }
                edges.push(nums(t)?);
            }
        }
        let (n, m, k) = header.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
        if edges.len() != m {
            return Err(Error::Parse { line: 0, msg: format!("header says {m} edges, found {}", edges.len()) });
        }
        Hypergraph::new(n, k, edges)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperDataItem {
    pub node: usize,
    /// The sets `V_i`, each sorted; the list itself is sorted.
    pub edges: Vec<Vec<usize>>,
}

impl HyperDataItem {
    pub fn degree(&self) -> usize {
        self.edges.len()
    }
}

/// Greedy in uniformly random edge order.
pub fn hyper_greedy(h: &Hypergraph, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.m()).collect();
    RandomStream::new(seed).shuffle(&mut order);
    let mut used = vec![false; h.n()];
    let mut out = Vec::new();
    for i in order {
        if h.edge(i).iter().all(|&v| !used[v]) {
            for &v in h.edge(i) {
                used[v] = true;
            }
            out.push(i);
        }
    }
    out
}

pub const HYPER_BRUTE_MAX_EDGES: usize = 24;

/// Maximum number of pairwise disjoint edges.
pub fn hyper_bruteforce_optimum(h: &Hypergraph) -> Result<usize> {
    let m = h.m();
    if m > HYPER_BRUTE_MAX_EDGES {
        return Err(Error::TooLarge(format!("{m} edges exceed {HYPER_BRUTE_MAX_EDGES}")));
    }
    let conflict: Vec<u32> = (0..m)
        .map(|i| (0..m).filter(|&j| i == j || h.intersection(i, j) > 0).fold(0u32, |acc, j| acc | 1 << j))
        .collect();
    fn best(avail: u32, conflict: &[u32]) -> usize {
        if avail == 0 {
            return 0;
        }
        let i = avail.trailing_zeros() as usize;
        let take = 1 + best(avail & !conflict[i], conflict);
        if take > avail.count_ones() as usize - 1 {
            return take;
        }
        take.max(best(avail & !(1 << i), conflict))
    }
    let all = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    Ok(best(all, &conflict))
}

/// Named parts of the hard gadget.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperGadget {
    pub hypergraph: Hypergraph,
    pub optimum: usize,
    /// Index of the top edge `e`.
    pub top: usize,
    /// Indices of the vertical edges `e_0..e_{k−1}`.
    pub vertical: Vec<usize>,
    pub gray: Vec<usize>,
    pub black: Vec<usize>,
    /// e-node of each vertical edge.
    pub e_nodes: Vec<usize>,
    /// The sets `S_0..S_{k−2}` as node ids.
    pub s_sets: Vec<Vec<usize>>,
}

/// The gadget on which every greedy vertex-model strategy matches one edge
/// while `k` disjoint edges exist.
///
/// Node ids: vertical edge `e_i` owns `i·k .. i·k+k`, its first node being
/// the e-node; the `K = (k−1)(k−2)/2` new nodes follow.
pub fn gen_hyper_hard(k: usize) -> Result<HyperGadget> {
    if k < 3 {
        return Err(Error::ParameterViolation(format!("k = {k} must be at least 3")));
    }
    let enode = |i: usize| i * k;
    let nonenode = |i: usize, j: usize| i * k + 1 + j;
    let mut edges: Vec<Vec<usize>> = (0..k).map(|i| (i * k..i * k + k).collect()).collect();
    let vertical: Vec<usize> = (0..k).collect();
    let top = edges.len();
    edges.push((0..k).map(enode).collect());
    let mut next_free = vec![0usize; k];
    let mut gray = Vec::new();
    for i in 0..k - 1 {
        let mut g = vec![enode(i)];
        for j in (0..k).filter(|&j| j != i) {
            g.push(nonenode(j, next_free[j]));
            next_free[j] += 1;
        }
        gray.push(edges.len());
        edges.push(g);
    }
    // new node for the pair {i, j}, numbered row by row
    let base = k * k;
    let mut pair_id = vec![vec![usize::MAX; k - 1]; k - 1];
    let mut nxt = base;
    for i in 0..k - 1 {
        for j in i + 1..k - 1 {
            pair_id[i][j] = nxt;
            pair_id[j][i] = nxt;
            nxt += 1;
        }
    }
    let s_sets: Vec<Vec<usize>> = (0..k - 1).map(|i| (0..k - 1).filter(|&j| j != i).map(|j| pair_id[i][j]).collect()).collect();
    let mut black = Vec::new();
    for i in 0..k - 1 {
        debug_assert_eq!(next_free[i], k - 2);
        let mut b = vec![nonenode(i, k - 2), enode((i + 1) % (k - 1))];
        b.extend(&s_sets[i]);
        black.push(edges.len());
        edges.push(b);
    }
    let h = Hypergraph::new(nxt, k, edges)?;
    Ok(HyperGadget { hypergraph: h, optimum: k, top, vertical, gray, black, e_nodes: (0..k).map(enode).collect(), s_sets })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GadgetReport {
    pub degrees_four: bool,
    pub degrees_two: bool,
    pub pairwise_intersections: bool,
    pub top_meets_all: bool,
    pub s_family: bool,
    pub vertical_perfect: bool,
    pub problems: Vec<String>,
}

impl GadgetReport {
    pub fn ok(&self) -> bool {
        self.degrees_four && self.degrees_two && self.pairwise_intersections && self.top_meets_all && self.s_family && self.vertical_perfect
    }
}

/// Checks the structural properties of the gadget.
pub fn check_gadget(g: &HyperGadget) -> GadgetReport {
    let h = &g.hypergraph;
    let k = h.k();
    let mut r = GadgetReport::default();
    let four: BTreeSet<usize> = g.e_nodes[..k - 1].iter().copied().collect();
    r.degrees_four = four.iter().all(|&v| h.degree(v) == 4);
    r.degrees_two = (0..h.n()).filter(|v| !four.contains(v)).all(|v| h.degree(v) == 2);
    r.pairwise_intersections = (0..h.m()).all(|a| (a + 1..h.m()).all(|b| h.intersection(a, b) <= 1));
    r.top_meets_all = (0..h.m()).filter(|&i| i != g.top).all(|i| h.intersection(i, g.top) == 1);
    let mut occ = std::collections::HashMap::new();
    for s in &g.s_sets {
        for &v in s {
            *occ.entry(v).or_insert(0) += 1;
        }
    }
    let s_ok_sizes = g.s_sets.iter().all(|s| s.len() == k - 2);
    let s_ok_occ = occ.len() == (k - 1) * (k - 2) / 2 && occ.values().all(|&c| c == 2);
    let s_ok_meet = (0..g.s_sets.len())
        .all(|i| (i + 1..g.s_sets.len()).all(|j| g.s_sets[i].iter().filter(|v| g.s_sets[j].contains(v)).count() == 1));
    r.s_family = s_ok_sizes && s_ok_occ && s_ok_meet;
    let covered: HashSet<usize> = g.vertical.iter().flat_map(|&i| h.edge(i).iter().copied()).collect();
    r.vertical_perfect = h.is_matching(&g.vertical) && g.vertical.len() == k && covered.len() == k * k;
    for (name, ok) in [
        ("e-nodes of degree four", r.degrees_four),
        ("other nodes of degree two", r.degrees_two),
        ("pairwise intersections at most one", r.pairwise_intersections),
        ("top edge meets every edge once", r.top_meets_all),
        ("S-family", r.s_family),
        ("vertical edges disjoint", r.vertical_perfect),
    ] {
        if !ok {
            r.problems.push(format!("{name} violated"));
        }
    }
    r
}

pub trait HyperStrategy {
    fn name(&self) -> String;

    fn is_greedy(&self) -> bool {
        true
    }

    /// Lower is served first.
    fn key(&self, item: &HyperDataItem) -> Vec<i64>;

    /// Index into `item.edges`, or `None` to isolate.
    fn decide(&self, item: &HyperDataItem) -> Option<usize>;
}

/// Ranks items by degree (ascending or descending) and takes a fixed edge.
pub struct DegreeOrder {
    pub prefer_high: bool,
    pub take_last: bool,
}

impl HyperStrategy for DegreeOrder {
    fn name(&self) -> String {
        format!("degree-{}-first{}", if self.prefer_high { 4 } else { 2 }, if self.take_last { "-last" } else { "" })
    }
    fn key(&self, item: &HyperDataItem) -> Vec<i64> {
        let d = item.degree() as i64;
        vec![if self.prefer_high { -d } else { d }]
    }
    fn decide(&self, item: &HyperDataItem) -> Option<usize> {
        if item.edges.is_empty() {
            None
        } else if self.take_last {
            Some(item.edges.len() - 1)
        } else {
            Some(0)
        }
    }
}

pub struct HyperIsolate;

impl HyperStrategy for HyperIsolate {
    fn name(&self) -> String {
        "isolate".into()
    }
    fn is_greedy(&self) -> bool {
        false
    }
    fn key(&self, item: &HyperDataItem) -> Vec<i64> {
        vec![item.degree() as i64]
    }
    fn decide(&self, _: &HyperDataItem) -> Option<usize> {
        None
    }
}

pub fn hyper_strategy_zoo() -> Vec<Box<dyn HyperStrategy>> {
    let mut v: Vec<Box<dyn HyperStrategy>> = Vec::new();
    for prefer_high in [false, true] {
        for take_last in [false, true] {
            v.push(Box::new(DegreeOrder { prefer_high, take_last }));
        }
    }
    v
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperGameResult {
    pub k: usize,
    pub item: HyperDataItem,
    pub hypergraph: Hypergraph,
    pub matching: Vec<usize>,
    pub optimum_size: usize,
    pub maximal: bool,
}

impl HyperGameResult {
    pub fn matching_size(&self) -> usize {
        self.matching.len()
    }
}

/// The game on the hard gadget: the adversary offers the all-unknown items
/// of degree 2 and 4, then relabels the gadget so that the served node is the
/// e-node of `e_{k−1}` (degree 2) or `e_0` (degree 4) and the chosen edge is
/// the top edge.
pub fn hyper_greedy_priority_game(strategy: &dyn HyperStrategy, k: usize) -> Result<HyperGameResult> {
    if !strategy.is_greedy() {
        return Err(Error::NonGreedyStrategy);
    }
    let gad = gen_hyper_hard(k)?;
    let h = &gad.hypergraph;
    let fresh = |d: usize| HyperDataItem { node: 0, edges: (0..d).map(|i| (1 + i * (k - 1)..1 + (i + 1) * (k - 1)).collect()).collect() };
    let item = [fresh(2), fresh(4)]
        .into_iter()
        .min_by(|a, b| strategy.key(a).cmp(&strategy.key(b)))
        .expect("two candidates");
    let c = strategy.decide(&item).ok_or(Error::NonGreedyStrategy)?;
    if c >= item.degree() {
        return Err(Error::IllegalDecision(format!("edge index {c} out of range")));
    }
    let u = if item.degree() == 4 { gad.e_nodes[0] } else { gad.e_nodes[k - 1] };
    // the edges at u in the order the item lists them, the top edge at slot c
    let mut at_u: Vec<usize> = h.incident(u).iter().copied().filter(|&i| i != gad.top).collect();
    at_u.insert(c, gad.top);
    let mut perm = vec![usize::MAX; h.n()];
    perm[u] = item.node;
    for (slot, &ei) in at_u.iter().enumerate() {
        for (&x, &y) in h.edge(ei).iter().filter(|&&x| x != u).zip(&item.edges[slot]) {
            perm[x] = y;
        }
    }
    let mut next = 1 + item.degree() * (k - 1);
    for p in perm.iter_mut().filter(|p| **p == usize::MAX) {
        *p = next;
        next += 1;
    }
    let rh = h.relabel(&perm)?;
    let true_item = rh.item(item.node);
    if true_item != item {
        return Err(Error::AdversaryInconsistency(format!("served {item:?}, gadget has {true_item:?}")));
    }
    let mut chosen: Vec<usize> = item.edges[c].clone();
    chosen.push(item.node);
    chosen.sort_unstable();
    let mi = rh.edges().iter().position(|e| *e == chosen).expect("chosen edge exists");
    let top: Vec<usize> = {
        let mut t: Vec<usize> = h.edge(gad.top).iter().map(|&x| perm[x]).collect();
        t.sort_unstable();
        t
    };
    if chosen != top {
        return Err(Error::AdversaryInconsistency("chosen edge is not the top edge".into()));
    }
    let matching = vec![mi];
    let maximal = rh.is_maximal(&matching);
    Ok(HyperGameResult { k, item, matching, optimum_size: gad.optimum, maximal, hypergraph: rh })
}
