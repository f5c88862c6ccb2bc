//! The adaptive priority game in the vertex model.
//!
//! A strategy ranks data items `⟨u; v_1, …, v_d⟩` through a key (lower is
//! preferred); the adversary proposes the items it is willing to serve and the
//! engine hands the strategy its favourite one. Unknown nodes receive ids
//! lazily: the served node gets the smallest fresh id and its unknown
//! neighbours the next ones, so every strategy whose key only depends on the
//! shape of an item sees the same game regardless of labels.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::graph::Graph;
use crate::instances::{self, FIG2_EDGES, FIG2_NAMES, FIG2_OPT, FIG3_EDGES, FIG3_OPT};
use crate::rng::{mix_seed, RandomStream};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataItem {
    pub node: usize,
    /// Sorted neighbour ids.
    pub nbrs: Vec<usize>,
}

impl DataItem {
    pub fn new(node: usize, mut nbrs: Vec<usize>) -> Result<DataItem> {
        nbrs.sort_unstable();
        if nbrs.windows(2).any(|w| w[0] == w[1]) || nbrs.contains(&node) {
            return Err(Error::AdversaryInconsistency(format!("malformed item for node {node}: {nbrs:?}")));
        }
        Ok(DataItem { node, nbrs })
    }

    pub fn degree(&self) -> usize {
        self.nbrs.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    MatchTo(usize),
    Isolate,
}

/// What the algorithm has seen so far.
#[derive(Clone, Debug, Default)]
pub struct View {
    pub round: usize,
    pub known: BTreeSet<usize>,
    pub matched: BTreeSet<usize>,
    pub isolated: BTreeSet<usize>,
    pub next_fresh: usize,
}

impl View {
    pub fn is_known(&self, v: usize) -> bool {
        self.known.contains(&v)
    }

    pub fn is_live(&self, v: usize) -> bool {
        !self.matched.contains(&v) && !self.isolated.contains(&v)
    }

    pub fn live_degree(&self, item: &DataItem) -> usize {
        item.nbrs.iter().filter(|&&x| self.is_live(x)).count()
    }

    fn apply(&mut self, item: &DataItem, d: Decision) {
        self.known.insert(item.node);
        self.known.extend(item.nbrs.iter().copied());
        match d {
            Decision::MatchTo(v) => {
                self.matched.insert(item.node);
                self.matched.insert(v);
            }
            Decision::Isolate => {
                self.isolated.insert(item.node);
            }
        }
        self.next_fresh = self.known.iter().next_back().map_or(0, |&x| x + 1);
        self.round += 1;
    }
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> String;

    /// Greedy strategies must match whenever they can.
    fn is_greedy(&self) -> bool {
        true
    }

    /// Preference key; lower is served first.
    fn key(&self, view: &View, item: &DataItem) -> Vec<i64>;

    fn decide(&self, view: &View, item: &DataItem) -> Decision;
}

fn first_live(view: &View, item: &DataItem) -> Decision {
    item.nbrs.iter().find(|&&x| view.is_live(x)).map_or(Decision::Isolate, |&x| Decision::MatchTo(x))
}

/// Prefers items with few live neighbours, then low degree.
pub struct MinDegreeFirst;

impl Strategy for MinDegreeFirst {
    fn name(&self) -> String {
        "min-degree-first".into()
    }
    fn key(&self, view: &View, item: &DataItem) -> Vec<i64> {
        vec![view.live_degree(item) as i64, item.degree() as i64]
    }
    fn decide(&self, view: &View, item: &DataItem) -> Decision {
        first_live(view, item)
    }
}

pub struct MaxDegreeFirst;

impl Strategy for MaxDegreeFirst {
    fn name(&self) -> String {
        "max-degree-first".into()
    }
    fn key(&self, view: &View, item: &DataItem) -> Vec<i64> {
        vec![-(view.live_degree(item) as i64), -(item.degree() as i64)]
    }
    fn decide(&self, view: &View, item: &DataItem) -> Decision {
        first_live(view, item)
    }
}

/// Lexicographic on the sorted neighbour list, unknown ids counting as +∞.
pub struct Lexicographic;

impl Strategy for Lexicographic {
    fn name(&self) -> String {
        "lexicographic".into()
    }
    fn key(&self, view: &View, item: &DataItem) -> Vec<i64> {
        let mut k: Vec<i64> = item.nbrs.iter().map(|&x| if view.is_known(x) { x as i64 } else { i64::MAX }).collect();
        k.sort_unstable();
        k
    }
    fn decide(&self, view: &View, item: &DataItem) -> Decision {
        first_live(view, item)
    }
}

/// A fixed pseudo-random order on item shapes.
pub struct RandomOrder(pub u64);

impl Strategy for RandomOrder {
    fn name(&self) -> String {
        format!("random-order:{}", self.0)
    }
    fn key(&self, view: &View, item: &DataItem) -> Vec<i64> {
        let mut coords = vec![item.degree() as u64, view.live_degree(item) as u64];
        coords.extend(item.nbrs.iter().filter(|&&x| view.is_known(x)).map(|&x| x as u64 + 1));
        vec![(mix_seed(self.0, &coords) >> 1) as i64]
    }
    fn decide(&self, view: &View, item: &DataItem) -> Decision {
        let live: Vec<usize> = item.nbrs.iter().copied().filter(|&x| view.is_live(x)).collect();
        if live.is_empty() {
            return Decision::Isolate;
        }
        Decision::MatchTo(live[(mix_seed(self.0, &[item.degree() as u64, 7]) % live.len() as u64) as usize])
    }
}

/// Never matches anything.
pub struct IsolateAll;

impl Strategy for IsolateAll {
    fn name(&self) -> String {
        "isolate-all".into()
    }
    fn is_greedy(&self) -> bool {
        false
    }
    fn key(&self, _: &View, item: &DataItem) -> Vec<i64> {
        vec![item.degree() as i64]
    }
    fn decide(&self, _: &View, _: &DataItem) -> Decision {
        Decision::Isolate
    }
}

/// Isolates the first node it sees, then plays min-degree-first.
pub struct IsolateFirst;

impl Strategy for IsolateFirst {
    fn name(&self) -> String {
        "isolate-first".into()
    }
    fn is_greedy(&self) -> bool {
        false
    }
    fn key(&self, view: &View, item: &DataItem) -> Vec<i64> {
        MinDegreeFirst.key(view, item)
    }
    fn decide(&self, view: &View, item: &DataItem) -> Decision {
        if view.round == 0 {
            Decision::Isolate
        } else {
            first_live(view, item)
        }
    }
}

/// The bundled strategies: four greedy orders (three random seeds) and two
/// isolating variants.
pub fn strategy_zoo() -> Vec<Box<dyn Strategy>> {
    vec![
        Box::new(MinDegreeFirst),
        Box::new(MaxDegreeFirst),
        Box::new(Lexicographic),
        Box::new(RandomOrder(1)),
        Box::new(RandomOrder(2)),
        Box::new(RandomOrder(3)),
        Box::new(IsolateAll),
        Box::new(IsolateFirst),
    ]
}

pub fn strategy_by_name(name: &str) -> Option<Box<dyn Strategy>> {
    Some(match name {
        "min-degree-first" | "mingreedy" => Box::new(MinDegreeFirst),
        "max-degree-first" => Box::new(MaxDegreeFirst),
        "lexicographic" => Box::new(Lexicographic),
        "isolate-all" => Box::new(IsolateAll),
        "isolate-first" => Box::new(IsolateFirst),
        _ => {
            let seed = name.strip_prefix("random-order:").or(name.strip_prefix("random-order").map(|_| "0"))?;
            Box::new(RandomOrder(seed.parse().ok()?))
        }
    })
}

/// The graph an adversary commits to once the game is decided.
#[derive(Clone, Debug)]
pub struct FinalGraph {
    pub graph: Graph,
    pub opt_witness: Option<Vec<(usize, usize)>>,
    pub barrier: Option<Vec<usize>>,
    pub labels: Option<Vec<String>>,
}

pub trait Adversary {
    fn name(&self) -> String;

    fn requires_greedy(&self) -> bool {
        false
    }

    fn begin(&mut self, _seed: u64) {}

    /// Items the adversary is willing to serve; empty ends the game.
    fn candidates(&mut self, view: &View) -> Result<Vec<DataItem>>;

    fn commit(&mut self, view: &View, item: &DataItem, decision: Decision) -> Result<()>;

    fn finish(&mut self, view: &View) -> Result<FinalGraph>;
}

/// True items of all matchable nodes.
pub fn honest_candidates(g: &Graph, view: &View) -> Vec<DataItem> {
    (0..g.n())
        .filter(|&v| view.is_live(v) && g.neighbors(v).iter().any(|&x| view.is_live(x as usize)))
        .map(|v| DataItem { node: v, nbrs: g.neighbors(v).iter().map(|&x| x as usize).sorted().collect() })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Round {
    pub key: Vec<i64>,
    pub item: DataItem,
    pub decision: Decision,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameTranscript {
    pub strategy: String,
    pub adversary: String,
    pub seed: u64,
    pub rounds: Vec<Round>,
    pub graph: Graph,
    pub matching: Vec<(usize, usize)>,
    pub labels: Option<Vec<String>>,
    pub opt_witness: Option<Vec<(usize, usize)>>,
    pub barrier: Option<Vec<usize>>,
}

impl GameTranscript {
    pub fn matching_size(&self) -> usize {
        self.matching.len()
    }

    /// Optimum size from the witness, or by an exact solver.
    pub fn optimum_size(&self) -> Result<usize> {
        match &self.opt_witness {
            Some(w) => Ok(w.len()),
            None => Ok(exact::max_matching_exact(&self.graph)?.size),
        }
    }

    pub fn ratio(&self) -> Result<Ratio<i64>> {
        let opt = self.optimum_size()?;
        Ok(if opt == 0 { Ratio::from_integer(1) } else { Ratio::new(self.matching.len() as i64, opt as i64) })
    }
}

/// Hard cap on rounds; every round removes at least one node.
const MAX_ROUNDS: usize = 1 << 20;

pub fn play(strategy: &dyn Strategy, adversary: &mut dyn Adversary, seed: u64) -> Result<GameTranscript> {
    if adversary.requires_greedy() && !strategy.is_greedy() {
        return Err(Error::NonGreedyStrategy);
    }
    adversary.begin(seed);
    let mut view = View::default();
    let mut rounds = Vec::new();
    let mut matching = Vec::new();
    loop {
        if rounds.len() > MAX_ROUNDS {
            return Err(Error::AdversaryInconsistency("game does not terminate".into()));
        }
        let cands = adversary.candidates(&view)?;
        let Some((key, item)) = cands
            .into_iter()
            .map(|it| (strategy.key(&view, &it), it))
            .min_by(|a, b| (&a.0, a.1.node, &a.1.nbrs).cmp(&(&b.0, b.1.node, &b.1.nbrs)))
        else {
            break;
        };
        if !view.is_live(item.node) {
            return Err(Error::AdversaryInconsistency(format!("node {} is not matchable", item.node)));
        }
        let decision = strategy.decide(&view, &item);
        match decision {
            Decision::MatchTo(v) if !item.nbrs.contains(&v) || !view.is_live(v) => {
                return Err(Error::IllegalDecision(format!("{} cannot match {} to {v}", strategy.name(), item.node)));
            }
            Decision::Isolate if strategy.is_greedy() && item.nbrs.iter().any(|&x| view.is_live(x)) => {
                return Err(Error::IllegalDecision(format!("greedy {} isolated {}", strategy.name(), item.node)));
            }
            Decision::MatchTo(v) => matching.push((item.node, v)),
            Decision::Isolate => {}
        }
        adversary.commit(&view, &item, decision)?;
        view.apply(&item, decision);
        rounds.push(Round { key, item, decision });
    }
    let fin = adversary.finish(&view)?;
    let t = GameTranscript {
        strategy: strategy.name(),
        adversary: adversary.name(),
        seed,
        rounds,
        graph: fin.graph,
        matching,
        labels: fin.labels,
        opt_witness: fin.opt_witness,
        barrier: fin.barrier,
    };
    let rep = check_consistency(&t, Some(strategy));
    if !rep.ok {
        return Err(Error::AdversaryInconsistency(rep.problems.join("; ")));
    }
    Ok(t)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub ok: bool,
    pub problems: Vec<String>,
    /// First round with a problem.
    pub offending_round: Option<usize>,
}

/// Replays a transcript against its final graph. With a strategy, also checks
/// that every served item was the strategy's favourite among the true items
/// of all matchable nodes (ties go to the smaller node id).
pub fn check_consistency(t: &GameTranscript, strategy: Option<&dyn Strategy>) -> ConsistencyReport {
    let g = &t.graph;
    let n = g.n();
    let mut problems = Vec::new();
    let mut first_bad = None;
    let mut view = View::default();
    let true_item = |v: usize| DataItem { node: v, nbrs: g.neighbors(v).iter().map(|&x| x as usize).sorted().collect() };
    for (i, r) in t.rounds.iter().enumerate() {
        let before = problems.len();
        let u = r.item.node;
        if u >= n {
            problems.push(format!("round {i}: node {u} not in the final graph"));
            first_bad.get_or_insert(i);
            break;
        }
        let matchable = |v: usize, view: &View| view.is_live(v) && g.neighbors(v).iter().any(|&x| view.is_live(x as usize));
        if !matchable(u, &view) {
            problems.push(format!("round {i}: node {u} was not matchable"));
        }
        if true_item(u) != r.item {
            problems.push(format!("round {i}: item {:?} differs from the neighbourhood {:?} of {u}", r.item.nbrs, true_item(u).nbrs));
        }
        match r.decision {
            Decision::MatchTo(v) if !r.item.nbrs.contains(&v) || !view.is_live(v) => {
                problems.push(format!("round {i}: illegal match {u}-{v}"));
            }
            _ => {}
        }
        if let Some(s) = strategy {
            if s.key(&view, &r.item) != r.key {
                problems.push(format!("round {i}: recorded key differs from the strategy's key"));
            }
            if let Decision::Isolate = r.decision {
                if s.is_greedy() {
                    problems.push(format!("round {i}: greedy strategy isolated {u}"));
                }
            }
            for w in (0..n).filter(|&w| w != u && matchable(w, &view)) {
                let kw = s.key(&view, &true_item(w));
                if kw < r.key || (kw == r.key && w < u) {
                    problems.push(format!("round {i}: node {w} is preferred over served node {u}"));
                    break;
                }
            }
        }
        if problems.len() > before {
            first_bad.get_or_insert(i);
        }
        view.apply(&r.item, r.decision);
    }
    if problems.is_empty() {
        if let Some(w) = (0..n).find(|&w| view.is_live(w) && g.neighbors(w).iter().any(|&x| view.is_live(x as usize))) {
            problems.push(format!("game ended with matchable node {w}"));
        }
        let decided: Vec<(usize, usize)> = t
            .rounds
            .iter()
            .filter_map(|r| match r.decision {
                Decision::MatchTo(v) => Some((r.item.node, v)),
                Decision::Isolate => None,
            })
            .collect();
        if decided != t.matching {
            problems.push("matching differs from the decisions".into());
        }
        if let Some(w) = &t.opt_witness {
            if let Err(e) = crate::matching::Matching::from_pairs(n, w).and_then(|m| {
                let rep = exact::verify_matching(g, &m);
                if rep.valid {
                    Ok(())
                } else {
                    Err(Error::InvalidMatching(rep.problems.join("; ")))
                }
            }) {
                problems.push(format!("optimum witness: {e}"));
            }
        }
    }
    ConsistencyReport { ok: problems.is_empty(), problems, offending_round: first_bad }
}

/// A fixed graph played honestly.
pub struct StaticAdversary {
    name: String,
    graph: Graph,
    opt: Option<Vec<(usize, usize)>>,
    labels: Option<Vec<String>>,
}

impl StaticAdversary {
    pub fn new(name: &str, inst: &instances::Instance) -> StaticAdversary {
        StaticAdversary {
            name: name.to_string(),
            graph: inst.graph.clone(),
            opt: inst.optimum.as_ref().and_then(|c| c.witness.as_ref()).map(|w| w.normalized()),
            labels: inst.labels.clone(),
        }
    }
}

impl Adversary for StaticAdversary {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn candidates(&mut self, view: &View) -> Result<Vec<DataItem>> {
        Ok(honest_candidates(&self.graph, view))
    }
    fn commit(&mut self, _: &View, _: &DataItem, _: Decision) -> Result<()> {
        Ok(())
    }
    fn finish(&mut self, _: &View) -> Result<FinalGraph> {
        Ok(FinalGraph { graph: self.graph.clone(), opt_witness: self.opt.clone(), barrier: None, labels: self.labels.clone() })
    }
}

/// Offers a degree-2 and a degree-3 item first, then commits to the gadget
/// whose optimum the first decision misses.
#[derive(Default)]
pub struct Thm4Adversary {
    fin: Option<FinalGraph>,
}

pub fn thm4_adversary() -> Thm4Adversary {
    Thm4Adversary::default()
}

impl Adversary for Thm4Adversary {
    fn name(&self) -> String {
        "thm4".into()
    }
    fn begin(&mut self, _: u64) {
        self.fin = None;
    }
    fn candidates(&mut self, view: &View) -> Result<Vec<DataItem>> {
        match &self.fin {
            Some(f) => Ok(honest_candidates(&f.graph, view)),
            None => Ok(vec![DataItem::new(0, vec![1, 2])?, DataItem::new(0, vec![1, 2, 3])?]),
        }
    }
    fn commit(&mut self, _: &View, item: &DataItem, decision: Decision) -> Result<()> {
        if self.fin.is_some() {
            return Ok(());
        }
        let (edges, opt): (&[(usize, usize)], &[(usize, usize)]) =
            if item.degree() == 2 { (&FIG2_EDGES, &FIG2_OPT) } else { (&FIG3_EDGES, &FIG3_OPT) };
        // roles: u, then the chosen neighbour as v, then the others
        let chosen = match decision {
            Decision::MatchTo(v) => v,
            Decision::Isolate => item.nbrs[0],
        };
        let mut order = vec![item.node, chosen];
        order.extend(item.nbrs.iter().copied().filter(|&x| x != chosen));
        let mut next = 1 + item.degree();
        while order.len() < 6 {
            order.push(next);
            next += 1;
        }
        let es: Vec<_> = edges.iter().map(|&(a, b)| (order[a], order[b])).collect();
        let mut labels = vec![String::new(); 6];
        for (i, nm) in FIG2_NAMES.iter().enumerate() {
            labels[order[i]] = nm.to_string();
        }
        self.fin = Some(FinalGraph {
            graph: Graph::new(6, &es)?,
            opt_witness: Some(opt.iter().map(|&(a, b)| (order[a], order[b])).collect()),
            barrier: None,
            labels: Some(labels),
        });
        Ok(())
    }
    fn finish(&mut self, _: &View) -> Result<FinalGraph> {
        self.fin.clone().ok_or_else(|| Error::AdversaryInconsistency("game ended before any commitment".into()))
    }
}

/// Nodes are symbols; ids are attached when the algorithm first sees them.
#[derive(Default)]
struct Builder {
    id: Vec<Option<usize>>,
    label: Vec<String>,
    by_id: BTreeMap<usize, usize>,
    edges: Vec<(usize, usize)>,
    opt: Vec<(usize, usize)>,
}

impl Builder {
    fn hidden(&mut self, label: String) -> usize {
        self.id.push(None);
        self.label.push(label);
        self.id.len() - 1
    }

    fn known(&mut self, id: usize, label: String) -> usize {
        let s = self.hidden(label);
        self.reveal(s, id);
        s
    }

    fn reveal(&mut self, s: usize, id: usize) {
        self.id[s] = Some(id);
        self.by_id.insert(id, s);
    }

    fn finalize(&mut self, next_fresh: usize) -> Result<(Graph, Vec<(usize, usize)>, Vec<String>)> {
        let mut next = next_fresh;
        for s in 0..self.id.len() {
            if self.id[s].is_none() {
                self.reveal(s, next);
                next += 1;
            }
        }
        let n = self.id.len();
        let id = |s: usize| self.id[s].unwrap();
        if self.by_id.len() != n || self.by_id.keys().next_back().is_some_and(|&m| m + 1 != n) {
            return Err(Error::AdversaryInconsistency("ids are not contiguous".into()));
        }
        let es: Vec<_> = self.edges.iter().map(|&(a, b)| (id(a), id(b))).collect();
        let opt: Vec<_> = self.opt.iter().map(|&(a, b)| (id(a), id(b))).collect();
        let mut labels = vec![String::new(); n];
        for s in 0..n {
            labels[id(s)] = self.label[s].clone();
        }
        Ok((Graph::new(n, &es)?, opt, labels))
    }
}

/// Triangle round bookkeeping: the matched `r` node and its current degree.
struct RNode {
    sym: usize,
    id: usize,
    degree: usize,
}

/// Forces `Δ − 1` edges against an optimum of `2Δ − 3` on graphs of maximum
/// degree `Δ`: `Δ − 3` regular rounds of type-1/2/3 items, then two
/// endgame rounds around a six-node centre.
pub struct Thm6Adversary {
    delta: usize,
    b: Builder,
    round: usize,
    rs: Vec<RNode>,
    us: Vec<usize>,
    t1: usize,
    barrier: Vec<usize>,
    fin: Option<FinalGraph>,
}

pub fn thm6_adversary(delta: usize) -> Result<Thm6Adversary> {
    if delta < 3 {
        return Err(Error::ParameterViolation(format!("Δ = {delta} must be at least 3")));
    }
    Ok(Thm6Adversary { delta, b: Builder::default(), round: 0, rs: Vec::new(), us: Vec::new(), t1: 0, barrier: Vec::new(), fin: None })
}

impl Thm6Adversary {
    fn regular_rounds(&self) -> usize {
        self.delta - 3
    }

    fn shapes(&self, n: usize, min_d: usize) -> Result<Vec<DataItem>> {
        let mut out = Vec::new();
        for d in min_d..=self.delta {
            out.push(DataItem::new(n, (n + 1..=n + d).collect())?);
        }
        out.push(DataItem::new(n, vec![n + 1, n + 2])?);
        for r in self.rs.iter().filter(|r| r.degree < self.delta) {
            out.push(DataItem::new(n, vec![r.id, n + 1, n + 2])?);
        }
        Ok(out)
    }

    /// Splits a served item into (served, chosen, others, known neighbour).
    fn roles(&self, view: &View, item: &DataItem, d: Decision) -> Result<(usize, usize, Vec<usize>, Option<usize>)> {
        let Decision::MatchTo(c) = d else { return Err(Error::NonGreedyStrategy) };
        let known: Vec<usize> = item.nbrs.iter().copied().filter(|&x| x < view.next_fresh).collect();
        if known.len() > 1 || item.node != view.next_fresh || c < view.next_fresh {
            return Err(Error::AdversaryInconsistency(format!("unexpected item {item:?} / {d:?}")));
        }
        let others = item.nbrs.iter().copied().filter(|&x| x != c && x >= view.next_fresh).collect();
        Ok((item.node, c, others, known.first().copied()))
    }

    fn r_index(&self, id: usize) -> Result<usize> {
        self.rs.iter().position(|r| r.id == id).ok_or_else(|| Error::AdversaryInconsistency(format!("{id} is not an r-node")))
    }

    fn type1(&mut self, v: usize, v1: usize, rest: &[usize]) {
        self.t1 += 1;
        let k = self.t1;
        let b = &mut self.b;
        let sv = b.known(v, format!("t{k}.v"));
        let s1 = b.known(v1, format!("t{k}.v1"));
        b.edges.push((sv, s1));
        let mut others = Vec::new();
        for (i, &x) in rest.iter().enumerate() {
            let sx = b.known(x, format!("t{k}.v{}", i + 2));
            b.edges.push((sv, sx));
            b.edges.push((s1, sx));
            others.push(sx);
        }
        b.opt.push((sv, others[0]));
        b.opt.push((s1, others[1]));
        self.barrier.push(sv);
        self.barrier.push(s1);
    }

    fn triangle(&mut self, m: usize, r: usize, l: usize, rj: Option<usize>) -> Result<()> {
        let i = self.rs.len() + 1;
        let b = &mut self.b;
        let (sm, sr, sl) = (b.known(m, format!("m{i}")), b.known(r, format!("r{i}")), b.known(l, format!("l{i}")));
        let su = b.hidden(format!("u{i}"));
        b.edges.extend([(sl, sm), (sm, sr), (sl, sr), (sr, su)]);
        b.opt.extend([(sl, sm), (sr, su)]);
        if let Some(j) = rj {
            let k = self.r_index(j)?;
            self.b.edges.push((sm, self.rs[k].sym));
            self.rs[k].degree += 1;
        }
        self.rs.push(RNode { sym: sr, id: r, degree: 3 });
        self.barrier.push(sr);
        self.us.push(su);
        Ok(())
    }

    fn endgame(&mut self, view: &View, item: &DataItem, d: Decision) -> Result<()> {
        let (v, v1, rest, known) = self.roles(view, item, d)?;
        let t = self.us.len();
        let b = &mut self.b;
        let (sa, sb, sc, sd, sx, sy);
        let mut pads = Vec::new();
        if item.degree() >= 3 && known.is_none() {
            // case I: a is served and matched to b
            sa = b.known(v, "a".into());
            sb = b.known(v1, "b".into());
            sx = b.known(rest[0], "x".into());
            sy = b.known(rest[1], "y".into());
            for (k, &x) in rest[2..2 + t].iter().enumerate() {
                b.reveal(self.us[k], x);
            }
            for (k, &x) in rest[2 + t..].iter().enumerate() {
                pads.push(b.known(x, format!("p{}", k + 1)));
            }
            sc = b.hidden("c".into());
            sd = b.hidden("d".into());
        } else {
            // cases II and III: b is served and matched to a
            sb = b.known(v, "b".into());
            sa = b.known(v1, "a".into());
            sd = b.known(rest[0], "d".into());
            sc = b.hidden("c".into());
            sx = b.hidden("x".into());
            sy = b.hidden("y".into());
            if let Some(j) = known {
                let k = self.r_index(j)?;
                self.b.edges.push((sb, self.rs[k].sym));
                self.rs[k].degree += 1;
            }
        }
        let b = &mut self.b;
        b.edges.extend([(sa, sb), (sa, sx), (sa, sy), (sx, sc), (sy, sc), (sc, sd), (sb, sd)]);
        for &s in self.us.iter().chain(&pads) {
            b.edges.extend([(s, sa), (s, sc)]);
        }
        b.opt.extend([(sa, sx), (sb, sd), (sc, sy)]);
        self.barrier.extend([sa, sc]);
        let (graph, opt, labels) = self.b.finalize(view.next_fresh.max(item.nbrs.iter().max().unwrap() + 1))?;
        let barrier = self.barrier.iter().map(|&s| self.b.id[s].unwrap()).collect();
        self.fin = Some(FinalGraph { graph, opt_witness: Some(opt), barrier: Some(barrier), labels: Some(labels) });
        Ok(())
    }
}

impl Adversary for Thm6Adversary {
    fn name(&self) -> String {
        "thm6".into()
    }
    fn requires_greedy(&self) -> bool {
        true
    }
    fn begin(&mut self, _: u64) {
        *self = thm6_adversary(self.delta).expect("Δ was validated");
    }
    fn candidates(&mut self, view: &View) -> Result<Vec<DataItem>> {
        if let Some(f) = &self.fin {
            return Ok(honest_candidates(&f.graph, view));
        }
        let min_d = if self.round < self.regular_rounds() { 3 } else { 3 + self.us.len() };
        self.shapes(view.next_fresh, min_d)
    }
    fn commit(&mut self, view: &View, item: &DataItem, d: Decision) -> Result<()> {
        if self.fin.is_some() {
            return match d {
                Decision::Isolate => Err(Error::NonGreedyStrategy),
                _ => Ok(()),
            };
        }
        if self.round == self.regular_rounds() {
            self.round += 1;
            return self.endgame(view, item, d);
        }
        let (v, v1, rest, known) = self.roles(view, item, d)?;
        match (item.degree(), known) {
            (_, Some(rj)) => self.triangle(v, v1, rest[0], Some(rj))?,
            (2, None) => self.triangle(v, v1, rest[0], None)?,
            (_, None) => self.type1(v, v1, &rest),
        }
        self.round += 1;
        Ok(())
    }
    fn finish(&mut self, _: &View) -> Result<FinalGraph> {
        self.fin.clone().ok_or_else(|| Error::AdversaryInconsistency("endgame never reached".into()))
    }
}

/// Plays `strategy` against the Theorem-6 adversary and certifies the result.
pub fn play_thm6(strategy: &dyn Strategy, delta: usize) -> Result<(GameTranscript, instances::Instance)> {
    let mut adv = thm6_adversary(delta)?;
    let t = play(strategy, &mut adv, 0)?;
    let inst = instances::gen_thm6_graph(delta, &t)?;
    Ok((t, inst))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct YaoStats {
    pub strategy: String,
    pub trials: usize,
    pub mean: f64,
    pub std_err: f64,
    pub min: f64,
    pub max: f64,
}

fn fig2_ratio(strategy: &dyn Strategy, perm: &[usize]) -> Result<usize> {
    let inst = instances::gen_fig2_gadget(perm)?;
    let mut adv = StaticAdversary::new("yao", &inst);
    Ok(play(strategy, &mut adv, 0)?.matching_size())
}

/// Mean ratio over uniformly random relabelings of the Fig-2 gadget.
pub fn yao_expected_ratio(strategy: &dyn Strategy, trials: usize, seed: u64) -> Result<YaoStats> {
    let mut rng = RandomStream::new(seed);
    let mut cache: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let (mut sum, mut sq, mut lo, mut hi) = (0.0, 0.0, f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..trials {
        let mut perm: Vec<usize> = (0..6).collect();
        rng.shuffle(&mut perm);
        let m = match cache.get(&perm) {
            Some(&m) => m,
            None => {
                let m = fig2_ratio(strategy, &perm)?;
                cache.insert(perm, m);
                m
            }
        };
        let r = m as f64 / 3.0;
        sum += r;
        sq += r * r;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let k = trials.max(1) as f64;
    let mean = sum / k;
    let var = if trials > 1 { (sq - k * mean * mean).max(0.0) / (k - 1.0) } else { 0.0 };
    Ok(YaoStats { strategy: strategy.name(), trials, mean, std_err: (var / k).sqrt(), min: lo, max: hi })
}

/// Exact expectation over all 720 labelings.
pub fn yao_exact_ratio(strategy: &dyn Strategy) -> Result<Ratio<i64>> {
    let mut total = 0i64;
    let mut count = 0i64;
    for perm in (0..6).permutations(6) {
        total += fig2_ratio(strategy, &perm)? as i64;
        count += 1;
    }
    Ok(Ratio::new(total, 3 * count))
}
