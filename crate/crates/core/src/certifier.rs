//! Executable charging scheme for min-degree greedy matchings.
//!
//! Given a graph, an execution trace and a maximum matching, the certifier
//! decomposes `M ∪ M_opt` into one-one paths and augmenting paths, moves
//! `θ` units of M-funds along transfer edges, and checks the per-component
//! balance bounds and local ratios in exact rational arithmetic.

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::{ExecutionTrace, Matching};

pub type Q = Ratio<i64>;

pub fn fmt_q(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Direct transfers only; valid for max degree 3 or Δ-regular hosts.
    Regular,
    /// Creating edges send nothing; 1:2-paths with one direct credit get an
    /// indirect one.
    Indirect,
}

impl Mode {
    pub fn theta(self, delta: usize) -> Q {
        let d = delta as i64;
        match self {
            Mode::Regular => Q::new(1, 2 * (2 * d - 3)),
            Mode::Indirect => Q::new(1, 2 * (2 * d - 2)),
        }
    }

    /// Guaranteed global ratio.
    pub fn target(self, delta: usize) -> Q {
        let d = delta as i64;
        match self {
            Mode::Regular => Q::new(d - 1, 2 * d - 3),
            Mode::Indirect => Q::new(2 * d - 1, 4 * d - 4),
        }
    }

    /// Upper bound on `d_X − c_X` for a component with `m` M-edges.
    pub fn balance_bound(self, kind: ComponentKind, m: usize, delta: usize) -> i64 {
        let (d, m) = (delta as i64, m as i64);
        match (self, kind) {
            (Mode::Regular, ComponentKind::OneOne) => 2 * (d - 1) - 2,
            (Mode::Regular, ComponentKind::Augmenting) => 2 * m * (d - 2) - 2 * (d - 2) - 2,
            (Mode::Indirect, ComponentKind::OneOne) => 2 * (d - 1) - 2 + 1,
            (Mode::Indirect, ComponentKind::Augmenting) if m == 1 => -2,
            (Mode::Indirect, ComponentKind::Augmenting) => 2 * m * (d - 2) - 2 * (d - 2) - 1,
        }
    }

    /// Lower bound on the local ratio that the balance bound implies.
    pub fn local_target(self, kind: ComponentKind, m: usize, delta: usize) -> Q {
        match (self, kind, m) {
            (Mode::Indirect, ComponentKind::Augmenting, 1) => Q::new(1, 2) + self.theta(delta),
            _ => self.target(delta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    OneOne,
    Augmenting,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub m_x: usize,
    pub w_x: usize,
    /// Nodes in path order; augmenting paths start and end at their endpoints.
    pub nodes: Vec<usize>,
}

impl Component {
    pub fn endpoints(&self) -> Option<(usize, usize)> {
        match self.kind {
            ComponentKind::Augmenting => Some((self.nodes[0], *self.nodes.last().unwrap())),
            ComponentKind::OneOne => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    pub components: Vec<Component>,
    /// Component index of every node, `None` for dropped singletons.
    pub comp_of: Vec<Option<usize>>,
}

impl ComponentDecomposition {
    pub fn is_endpoint(&self, v: usize) -> bool {
        match self.comp_of[v] {
            Some(c) => self.components[c].endpoints().is_some_and(|(a, b)| a == v || b == v),
            None => false,
        }
    }
}

/// One component of `M ∪ M_opt` before canonicalisation.
struct RawComponent {
    nodes: Vec<usize>,
    m_edges: Vec<(usize, usize)>,
    o_edges: Vec<(usize, usize)>,
    cycle: bool,
    shared: bool,
}

fn raw_components(n: usize, m: &Matching, opt: &Matching) -> Vec<RawComponent> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let has = |v: usize| m.is_covered(v) || opt.is_covered(v);
    for s in 0..n {
        if seen[s] || !has(s) {
            continue;
        }
        let shared = m.mate(s).is_some() && m.mate(s) == opt.mate(s);
        // walk to one end of the path; cycles come back to `s`
        let mut start = s;
        if !shared {
            let mut cur = s;
            let mut use_m = m.is_covered(s);
            loop {
                let nxt = if use_m { m.mate(cur) } else { opt.mate(cur) };
                match nxt {
                    Some(x) if x == s => {
                        start = s;
                        break;
                    }
                    Some(x) => {
                        cur = x;
                        use_m = !use_m;
                    }
                    None => {
                        start = cur;
                        break;
                    }
                }
            }
        }
        let mut nodes = vec![start];
        seen[start] = true;
        let mut m_edges = Vec::new();
        let mut o_edges = Vec::new();
        let mut cycle = false;
        if shared {
            let x = m.mate(start).unwrap();
            nodes.push(x);
            seen[x] = true;
            m_edges.push((start, x));
            o_edges.push((start, x));
        } else {
            let mut cur = start;
            let mut use_m = m.is_covered(start);
            loop {
                let nxt = if use_m { m.mate(cur) } else { opt.mate(cur) };
                match nxt {
                    Some(x) if x == start => {
                        if use_m {
                            m_edges.push((cur, x));
                        } else {
                            o_edges.push((cur, x));
                        }
                        cycle = true;
                        break;
                    }
                    Some(x) => {
                        if use_m {
                            m_edges.push((cur, x));
                        } else {
                            o_edges.push((cur, x));
                        }
                        nodes.push(x);
                        seen[x] = true;
                        cur = x;
                        use_m = !use_m;
                    }
                    None => break,
                }
            }
        }
        out.push(RawComponent { nodes, m_edges, o_edges, cycle, shared });
    }
    out
}

/// Replaces `M_opt` by a maximum matching of the same size whose union with
/// `M` has only one-one paths and augmenting paths.
pub fn canonicalize_opt(g: &Graph, m: &Matching, opt: &Matching) -> Result<Matching> {
    check_pair(g, m, opt)?;
    let mut pairs = Vec::with_capacity(opt.size());
    for c in raw_components(g.n(), m, opt) {
        let (mm, ww) = (c.m_edges.len(), c.o_edges.len());
        if c.shared || c.cycle || mm == ww {
            pairs.extend(c.m_edges);
        } else if ww == mm + 1 {
            pairs.extend(c.o_edges);
        } else {
            return Err(Error::NotMaximum(format!("alternating path through {:?} augments the reference matching", c.nodes)));
        }
    }
    let out = Matching::from_pairs(g.n(), &pairs)?;
    debug_assert_eq!(out.size(), opt.size());
    Ok(out)
}

fn check_pair(g: &Graph, m: &Matching, opt: &Matching) -> Result<()> {
    for (name, x) in [("M", m), ("M_opt", opt)] {
        let rep = crate::exact::verify_matching(g, x);
        if !rep.valid {
            return Err(Error::InvalidMatching(format!("{name}: {}", rep.problems.join("; "))));
        }
    }
    Ok(())
}

/// Components of `M ∪ M_opt` for a canonical pair; singletons are dropped.
pub fn decompose(g: &Graph, m: &Matching, opt: &Matching) -> Result<ComponentDecomposition> {
    check_pair(g, m, opt)?;
    let mut comps = Vec::new();
    let mut comp_of = vec![None; g.n()];
    for c in raw_components(g.n(), m, opt) {
        let (mm, ww) = (c.m_edges.len(), c.o_edges.len());
        let kind = if c.shared {
            ComponentKind::OneOne
        } else if !c.cycle && ww == mm + 1 {
            if mm == 0 {
                return Err(Error::InvalidMatching(format!("M is not maximal: edge {:?} is free", c.o_edges[0])));
            }
            ComponentKind::Augmenting
        } else {
            return Err(Error::NonCanonical(format!(
                "component {:?} with {mm} M-edges and {ww} M_opt-edges{}",
                c.nodes,
                if c.cycle { " (cycle)" } else { "" }
            )));
        };
        for &v in &c.nodes {
            comp_of[v] = Some(comps.len());
        }
        comps.push(Component { kind, m_x: mm, w_x: ww, nodes: c.nodes });
    }
    Ok(ComponentDecomposition { components: comps, comp_of })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub from: usize,
    pub to: usize,
    /// Step in which `from` was matched (direct transfers).
    pub step: Option<usize>,
    pub indirect: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferLedger {
    pub mode: Mode,
    pub delta: usize,
    pub transfers: Vec<Transfer>,
    /// Per component: outgoing transfers.
    pub debits: Vec<usize>,
    /// Per component: incoming transfers.
    pub credits: Vec<usize>,
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    pub theta: Q,
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(q))
}

fn de_q<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
    let s = String::deserialize(d)?;
    let (p, q) = s.split_once('/').ok_or_else(|| serde::de::Error::custom("expected p/q"))?;
    let p: i64 = p.parse().map_err(serde::de::Error::custom)?;
    let q: i64 = q.parse().map_err(serde::de::Error::custom)?;
    Ok(Q::new(p, q))
}

/// Per-node step of matching and per-edge removal step, from the trace.
struct Timeline {
    matched_at: Vec<Option<usize>>,
    removed_at: Vec<u32>,
}

impl Timeline {
    fn new(g: &Graph, trace: &ExecutionTrace) -> Result<Timeline> {
        let removed_at = trace.removal_steps(g.m())?;
        let mut matched_at = vec![None; g.n()];
        for (i, s) in trace.steps().iter().enumerate() {
            matched_at[s.u as usize] = Some(i);
            matched_at[s.v as usize] = Some(i);
        }
        Ok(Timeline { matched_at, removed_at })
    }

    /// Degree of `w` once step `s` is complete.
    fn degree_after(&self, g: &Graph, w: usize, s: usize) -> usize {
        g.incident_edges(w).iter().filter(|&&e| self.removed_at[e as usize] as usize > s).count()
    }
}

/// Step at which each augmenting path got its first M-edge.
fn creation_steps(dec: &ComponentDecomposition, tl: &Timeline) -> Vec<Option<usize>> {
    dec.components
        .iter()
        .map(|c| match c.kind {
            ComponentKind::OneOne => None,
            ComponentKind::Augmenting => c.nodes[1..c.nodes.len() - 1].iter().filter_map(|&v| tl.matched_at[v]).min(),
        })
        .collect()
}

/// Transfers along `F`-edges (and indirect transfers in indirect mode).
pub fn compute_transfers(
    g: &Graph,
    trace: &ExecutionTrace,
    m: &Matching,
    opt: &Matching,
    dec: &ComponentDecomposition,
    mode: Mode,
    delta: usize,
) -> Result<TransferLedger> {
    let tl = Timeline::new(g, trace)?;
    let tm = trace.matching(g.n())?;
    if tm.normalized() != m.normalized() {
        return Err(Error::TraceMismatch("trace matching differs from M".into()));
    }
    let created = creation_steps(dec, &tl);
    let mut creator = vec![false; g.n()];
    if mode == Mode::Indirect {
        for (i, c) in dec.components.iter().enumerate() {
            if let Some(s) = created[i] {
                let st = trace.steps()[s];
                if dec.comp_of[st.u as usize] == Some(i) {
                    creator[st.u as usize] = true;
                    creator[st.v as usize] = true;
                } else {
                    return Err(Error::TraceMismatch(format!("creating edge of component {:?} not inside it", c.nodes)));
                }
            }
        }
    }
    let mut transfers = Vec::new();
    for (u, v) in g.edges() {
        if m.contains(u, v) || opt.contains(u, v) {
            continue;
        }
        for (x, w) in [(u, v), (v, u)] {
            if !m.is_covered(x) || !dec.is_endpoint(w) || creator[x] {
                continue;
            }
            let s = tl.matched_at[x].expect("covered nodes are matched in the trace");
            if tl.degree_after(g, w, s) + 2 <= delta {
                transfers.push(Transfer { from: x, to: w, step: Some(s), indirect: false });
            }
        }
    }
    if mode == Mode::Indirect {
        let mut direct_in: Vec<Vec<usize>> = vec![Vec::new(); dec.components.len()];
        for (i, t) in transfers.iter().enumerate() {
            direct_in[dec.comp_of[t.to].unwrap()].push(i);
        }
        let mut extra = Vec::new();
        for (ci, c) in dec.components.iter().enumerate() {
            if c.kind == ComponentKind::Augmenting && c.m_x == 1 && direct_in[ci].len() == 1 {
                let t = &transfers[direct_in[ci][0]];
                let u = m.mate(t.from).unwrap();
                extra.push(Transfer { from: u, to: t.to, step: None, indirect: true });
            }
        }
        transfers.extend(extra);
    }
    let k = dec.components.len();
    let mut debits = vec![0; k];
    let mut credits = vec![0; k];
    for t in &transfers {
        let a = dec.comp_of[t.from].ok_or_else(|| Error::TraceMismatch(format!("transfer source {} outside H", t.from)))?;
        let b = dec.comp_of[t.to].unwrap();
        debits[a] += 1;
        credits[b] += 1;
    }
    Ok(TransferLedger { mode, delta, transfers, debits, credits, theta: mode.theta(delta) })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentRow {
    pub kind: ComponentKind,
    pub m_x: usize,
    pub w_x: usize,
    pub d_x: usize,
    pub c_x: usize,
    pub balance_bound: i64,
    pub alpha: String,
    pub local_target: String,
    pub balance_ok: bool,
    pub local_ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertReport {
    pub mode: Mode,
    pub delta: usize,
    pub theta: String,
    pub matching_size: usize,
    pub optimum_size: usize,
    pub global_ratio: String,
    pub target: String,
    pub global_ok: bool,
    pub conservation_ok: bool,
    pub rows: Vec<ComponentRow>,
    pub violations: Vec<String>,
    pub passed: bool,
}

impl CertReport {
    pub fn global_ratio_q(&self) -> Q {
        if self.optimum_size == 0 {
            Q::one()
        } else {
            Q::new(self.matching_size as i64, self.optimum_size as i64)
        }
    }
}

/// Balance bounds, local ratios, conservation and the global ratio.
pub fn check_balances(dec: &ComponentDecomposition, ledger: &TransferLedger) -> CertReport {
    let (mode, delta, theta) = (ledger.mode, ledger.delta, ledger.theta);
    let mut rows = Vec::with_capacity(dec.components.len());
    let mut violations = Vec::new();
    let mut funds = Q::zero();
    let mut wsum = 0i64;
    let mut msum = 0usize;
    let mut net = 0i64;
    for (i, c) in dec.components.iter().enumerate() {
        let (d, cr) = (ledger.debits[i], ledger.credits[i]);
        let bal = d as i64 - cr as i64;
        let bound = mode.balance_bound(c.kind, c.m_x, delta);
        let local = (Q::from(c.m_x as i64) - theta * Q::from(bal)) / Q::from(c.w_x as i64);
        let lt = mode.local_target(c.kind, c.m_x, delta);
        let balance_ok = bal <= bound;
        let local_ok = local >= lt;
        if !balance_ok {
            violations.push(format!("component {:?}: balance {bal} exceeds {bound}", c.nodes));
        }
        if !local_ok {
            violations.push(format!("component {:?}: local ratio {} below {}", c.nodes, fmt_q(&local), fmt_q(&lt)));
        }
        funds += Q::from(c.m_x as i64) - theta * Q::from(bal);
        wsum += c.w_x as i64;
        msum += c.m_x;
        net += bal;
        rows.push(ComponentRow {
            kind: c.kind,
            m_x: c.m_x,
            w_x: c.w_x,
            d_x: d,
            c_x: cr,
            balance_bound: bound,
            alpha: fmt_q(&local),
            local_target: fmt_q(&lt),
            balance_ok,
            local_ok,
        });
    }
    let conservation_ok = net == 0 && funds == Q::from(msum as i64);
    if !conservation_ok {
        violations.push(format!("funds not conserved: net balance {net}"));
    }
    let target = mode.target(delta);
    let global = if wsum == 0 { Q::one() } else { funds / Q::from(wsum) };
    let global_ok = global >= target;
    if !global_ok {
        violations.push(format!("global ratio {} below {}", fmt_q(&global), fmt_q(&target)));
    }
    CertReport {
        mode,
        delta,
        theta: fmt_q(&theta),
        matching_size: msum,
        optimum_size: wsum as usize,
        global_ratio: fmt_q(&global),
        target: fmt_q(&target),
        global_ok,
        conservation_ok,
        passed: violations.is_empty(),
        rows,
        violations,
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LemmaReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl LemmaReport {
    fn from(violations: Vec<String>) -> Self {
        LemmaReport { ok: violations.is_empty(), violations }
    }
}

/// Every augmenting-path endpoint has degree at least two in `g`.
pub fn endpoint_degree_check(g: &Graph, dec: &ComponentDecomposition) -> LemmaReport {
    let mut v = Vec::new();
    for c in &dec.components {
        if let Some((a, b)) = c.endpoints() {
            for w in [a, b] {
                if g.degree(w) < 2 {
                    v.push(format!("endpoint {w} has degree {}", g.degree(w)));
                }
            }
        }
    }
    LemmaReport::from(v)
}

/// Every augmenting-path endpoint `w` receives at least
/// `min(d_G(w) − 1, Δ − 2)` direct credits.
pub fn credit_lower_bound_check(g: &Graph, dec: &ComponentDecomposition, ledger: &TransferLedger) -> LemmaReport {
    let mut got = vec![0usize; g.n()];
    for t in ledger.transfers.iter().filter(|t| !t.indirect) {
        got[t.to] += 1;
    }
    let mut v = Vec::new();
    for c in &dec.components {
        if let Some((a, b)) = c.endpoints() {
            for w in [a, b] {
                let need = (g.degree(w).saturating_sub(1)).min(ledger.delta.saturating_sub(2));
                if got[w] < need {
                    v.push(format!("endpoint {w} has {} credits, needs {need}", got[w]));
                }
            }
        }
    }
    LemmaReport::from(v)
}

/// When an augmenting path gets its first M-edge, at least one of its
/// endpoints keeps a live edge.
pub fn creation_isolation_check(g: &Graph, trace: &ExecutionTrace, dec: &ComponentDecomposition) -> Result<LemmaReport> {
    let tl = Timeline::new(g, trace)?;
    let created = creation_steps(dec, &tl);
    let mut v = Vec::new();
    for (i, c) in dec.components.iter().enumerate() {
        if let (Some((a, b)), Some(s)) = (c.endpoints(), created[i]) {
            if tl.degree_after(g, a, s) == 0 && tl.degree_after(g, b, s) == 0 {
                v.push(format!("both endpoints of {:?} isolated at step {s}", c.nodes));
            }
        }
    }
    Ok(LemmaReport::from(v))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certification {
    pub report: CertReport,
    pub endpoint_degrees: LemmaReport,
    pub credits: Option<LemmaReport>,
    pub isolation: LemmaReport,
    pub transfers: usize,
    pub indirect_transfers: usize,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.report.passed
            && self.endpoint_degrees.ok
            && self.isolation.ok
            && self.credits.as_ref().is_none_or(|c| c.ok)
    }
}

/// Full pipeline: canonicalise, decompose, transfer, check.
///
/// Regular mode requires max degree ≤ 3 with `delta = 3`, or a
/// `delta`-regular graph; indirect mode requires max degree ≤ `delta`.
pub fn certify(g: &Graph, trace: &ExecutionTrace, opt: &Matching, mode: Mode, delta: usize) -> Result<Certification> {
    if delta < 3 {
        return Err(Error::Precondition(format!("Δ = {delta} must be at least 3")));
    }
    let maxd = g.max_degree();
    match mode {
        Mode::Regular if !((delta == 3 && maxd <= 3) || g.is_regular(delta)) => {
            return Err(Error::Precondition(format!("regular mode needs Δ = 3 or a Δ-regular graph (Δ = {delta}, max degree {maxd})")));
        }
        Mode::Indirect if maxd > delta => {
            return Err(Error::Precondition(format!("max degree {maxd} exceeds Δ = {delta}")));
        }
        _ => {}
    }
    let m = trace.matching(g.n())?;
    let canon = canonicalize_opt(g, &m, opt)?;
    let dec = decompose(g, &m, &canon)?;
    let ledger = compute_transfers(g, trace, &m, &canon, &dec, mode, delta)?;
    let report = check_balances(&dec, &ledger);
    let credits = (mode == Mode::Regular).then(|| credit_lower_bound_check(g, &dec, &ledger));
    Ok(Certification {
        endpoint_degrees: endpoint_degree_check(g, &dec),
        isolation: creation_isolation_check(g, trace, &dec)?,
        credits,
        transfers: ledger.transfers.len(),
        indirect_transfers: ledger.transfers.iter().filter(|t| t.indirect).count(),
        report,
    })
}
