//! Instance generators with certified optima.
//!
//! Labelings:
//! * `G_{a,b}`: `S_1 = 0..a`, `S_2 = a..2a`, `S_3 = 2a..2a+c` with
//!   `c = 2⌈√a⌉`. Node `i` of `S_1` is joined to `a+i`; `S_2` is cut into
//!   consecutive cliques of size `b`; `S_3` is paired as `(2a+2j, 2a+2j+1)`.
//! * Bipartite double: copy `L` uses ids `0..n₀`, copy `R` ids `n₀..2n₀`.
//! * Bipartite `G_{a,2}`: as `G_{a,2}` without the `S_3` pairs, plus
//!   `S_3' = 2a+c..2a+2c`.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, CertSource, OptimumCertificate};
use crate::graph::Graph;
use crate::matching::Matching;
use crate::rng::RandomStream;

#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub optimum: Option<OptimumCertificate>,
    pub family: String,
    pub params: BTreeMap<String, i64>,
    pub labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    family: String,
    params: BTreeMap<String, i64>,
    labels: Option<Vec<String>>,
    optimum: Option<OptimumCertificate>,
}

impl Instance {
    pub fn new(graph: Graph, family: &str, params: &[(&str, i64)]) -> Instance {
        Instance {
            graph,
            optimum: None,
            family: family.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            labels: None,
        }
    }

    fn certified(mut self, pairs: &[(usize, usize)], source: CertSource) -> Result<Instance> {
        let w = Matching::from_pairs(self.graph.n(), pairs)?;
        let cert = OptimumCertificate { size: w.size(), witness: Some(w), source };
        cert.validate(&self.graph)?;
        self.optimum = Some(cert);
        Ok(self)
    }

    fn with_labels(mut self, labels: Vec<String>) -> Instance {
        self.labels = Some(labels);
        self
    }

    /// Exact optimum when cheap: bipartite graphs, or small enough for brute force.
    pub fn solved(mut self) -> Result<Instance> {
        let g = &self.graph;
        if let Some(sides) = g.two_coloring() {
            self.optimum = Some(exact::max_matching_bipartite(g, &sides)?);
        } else if g.n() <= exact::BRUTE_MAX_NODES || g.m() <= exact::BRUTE_MAX_EDGES {
            self.optimum = Some(exact::max_matching_bruteforce(g)?);
        }
        Ok(self)
    }

    pub fn optimum_size(&self) -> Option<usize> {
        self.optimum.as_ref().filter(|c| c.is_exact()).map(|c| c.size)
    }

    /// Checks labels and the certificate against the graph.
    pub fn validate(&self) -> Result<()> {
        if let Some(l) = &self.labels {
            if l.len() != self.graph.n() {
                return Err(Error::InvalidGraph("labels do not cover the node set".into()));
            }
        }
        if let Some(c) = &self.optimum {
            c.validate(&self.graph)?;
        }
        Ok(())
    }

    /// Writes `<name>.graph` and `<name>.meta.json` into `dir`.
    pub fn save(&self, dir: &Path, name: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.graph.save(&dir.join(format!("{name}.graph")))?;
        let meta = Meta {
            family: self.family.clone(),
            params: self.params.clone(),
            labels: self.labels.clone(),
            optimum: self.optimum.clone(),
        };
        let f = std::fs::File::create(dir.join(format!("{name}.meta.json")))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), &meta)?;
        Ok(())
    }

    pub fn load(dir: &Path, name: &str) -> Result<Instance> {
        let graph = Graph::load(&dir.join(format!("{name}.graph")))?;
        let meta_path = dir.join(format!("{name}.meta.json"));
        let inst = if meta_path.exists() {
            let meta: Meta = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(meta_path)?))?;
            let optimum = match meta.optimum {
                Some(mut c) => {
                    c.witness = c.witness.map(|w| w.rebuild()).transpose()?;
                    Some(c)
                }
                None => None,
            };
            Instance { graph, optimum, family: meta.family, params: meta.params, labels: meta.labels }
        } else {
            Instance::new(graph, "file", &[])
        };
        inst.validate()?;
        Ok(inst)
    }
}

pub fn ceil_sqrt(a: usize) -> usize {
    let mut r = (a as f64).sqrt() as usize;
    while r * r > a {
        r -= 1;
    }
    while r * r < a {
        r += 1;
    }
    r
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ParameterViolation(msg()))
    }
}

/// `G_{a,b}`; requires `b` even, `b | a`, `a ≥ 4`.
pub fn gen_gab(a: usize, b: usize) -> Result<Instance> {
    check(a >= 4, || format!("a = {a} must be at least 4"))?;
    check(b >= 2 && b % 2 == 0, || format!("b = {b} must be even and positive"))?;
    check(a % b == 0, || format!("b = {b} must divide a = {a}"))?;
    let c = 2 * ceil_sqrt(a);
    let n = 2 * a + c;
    let mut es = Vec::with_capacity(a * c + a + c / 2 + a * (b - 1) / 2);
    for i in 0..a {
        for j in 0..c {
            es.push((i, 2 * a + j));
        }
    }
    for i in 0..a {
        es.push((i, a + i));
    }
    for j in 0..c / 2 {
        es.push((2 * a + 2 * j, 2 * a + 2 * j + 1));
    }
    for k in 0..a / b {
        let base = a + k * b;
        for x in 0..b {
            for y in x + 1..b {
                es.push((base + x, base + y));
            }
        }
    }
    let g = Graph::new(n, &es)?;
    let mut labels = vec!["S1".to_string(); a];
    labels.extend(std::iter::repeat_n("S2".to_string(), a));
    labels.extend(std::iter::repeat_n("S3".to_string(), c));
    let mut w: Vec<(usize, usize)> = (0..a).map(|i| (i, a + i)).collect();
    w.extend((0..c / 2).map(|j| (2 * a + 2 * j, 2 * a + 2 * j + 1)));
    Instance::new(g, "gab", &[("a", a as i64), ("b", b as i64)])
        .with_labels(labels)
        .certified(&w, CertSource::GeneratorCertified)
}

/// Bipartite double of `G_{a,√a}`; requires `a` an even perfect square.
pub fn gen_gab_bipartite_double(a: usize) -> Result<Instance> {
    let r = ceil_sqrt(a);
    check(a >= 4 && r * r == a && a % 2 == 0, || format!("a = {a} must be an even perfect square"))?;
    let b = r;
    let c = 2 * r;
    let n0 = 2 * a + c;
    let mut es = Vec::new();
    for side in [0, n0] {
        for i in 0..a {
            for j in 0..c {
                es.push((side + i, side + 2 * a + j));
            }
            es.push((side + i, side + a + i));
        }
    }
    for j in 0..c {
        es.push((2 * a + j, n0 + 2 * a + j));
    }
    for k in 0..a / b {
        let base = a + k * b;
        for x in 0..b {
            for y in 0..b {
                es.push((base + x, n0 + base + y));
            }
        }
    }
    let g = Graph::new(2 * n0, &es)?;
    let mut labels = Vec::with_capacity(2 * n0);
    for side in ["L", "R"] {
        for (grp, cnt) in [("S1", a), ("S2", a), ("S3", c)] {
            labels.extend(std::iter::repeat_n(format!("{grp}{side}"), cnt));
        }
    }
    let mut w = Vec::new();
    for side in [0, n0] {
        w.extend((0..a).map(|i| (side + i, side + a + i)));
    }
    w.extend((0..c).map(|j| (2 * a + j, n0 + 2 * a + j)));
    Instance::new(g, "gab-bipartite-double", &[("a", a as i64)])
        .with_labels(labels)
        .certified(&w, CertSource::GeneratorCertified)
}

/// Bipartite variant of `G_{a,2}`. `S_1` nodes with even 0-based index are
/// joined to all of `S_3`, those with odd index to all of `S_3'`.
pub fn gen_ga2_bipartite(a: usize) -> Result<Instance> {
    check(a >= 16 && a % 2 == 0, || format!("a = {a} must be even and at least 16"))?;
    let c = 2 * ceil_sqrt(a);
    let n = 2 * a + 2 * c;
    let mut es = Vec::new();
    for i in 0..a {
        let base = if i % 2 == 0 { 2 * a } else { 2 * a + c };
        for j in 0..c {
            es.push((i, base + j));
        }
        es.push((i, a + i));
    }
    for k in 0..a / 2 {
        es.push((a + 2 * k, a + 2 * k + 1));
    }
    let g = Graph::new(n, &es)?;
    let mut labels = vec!["S1".to_string(); a];
    labels.extend(std::iter::repeat_n("S2".to_string(), a));
    labels.extend(std::iter::repeat_n("S3".to_string(), c));
    labels.extend(std::iter::repeat_n("S3'".to_string(), c));
    let inst = Instance::new(g, "ga2-bipartite", &[("a", a as i64)]).with_labels(labels);
    if a <= 10_000 {
        let sides = inst.graph.two_coloring().ok_or_else(|| Error::InvalidGraph("construction is not bipartite".into()))?;
        let cert = exact::max_matching_bipartite(&inst.graph, &sides)?;
        Ok(Instance { optimum: Some(cert), ..inst })
    } else {
        let w: Vec<(usize, usize)> = (0..a).map(|i| (i, a + i)).collect();
        inst.certified(&w, CertSource::LowerBound)
    }
}

/// Fig-2 gadget names, in id order of the identity labeling.
pub const FIG2_NAMES: [&str; 6] = ["u", "v", "w", "z", "b", "c"];
pub const FIG2_EDGES: [(usize, usize); 7] = [(0, 1), (0, 2), (1, 2), (1, 3), (3, 4), (3, 5), (4, 5)];
pub const FIG2_OPT: [(usize, usize); 3] = [(0, 2), (1, 3), (4, 5)];
/// Fig-3 gadget on the same names: `u` now has degree three.
pub const FIG3_EDGES: [(usize, usize); 7] = [(0, 1), (0, 2), (0, 3), (1, 2), (3, 4), (3, 5), (4, 5)];
pub const FIG3_OPT: [(usize, usize); 3] = [(1, 2), (0, 3), (4, 5)];

fn gadget(edges: &[(usize, usize)], opt: &[(usize, usize)], perm: &[usize], family: &str) -> Result<Instance> {
    let mut seen = [false; 6];
    check(perm.len() == 6 && perm.iter().all(|&p| p < 6 && !std::mem::replace(&mut seen[p], true)), || {
        format!("{perm:?} is not a permutation of 0..6")
    })?;
    let es: Vec<_> = edges.iter().map(|&(x, y)| (perm[x], perm[y])).collect();
    let g = Graph::new(6, &es)?;
    let mut labels = vec![String::new(); 6];
    for (i, name) in FIG2_NAMES.iter().enumerate() {
        labels[perm[i]] = name.to_string();
    }
    let w: Vec<_> = opt.iter().map(|&(x, y)| (perm[x], perm[y])).collect();
    Instance::new(g, family, &[]).with_labels(labels).certified(&w, CertSource::GeneratorCertified)
}

/// The six-node gadget with edges uv, uw, vw, vz, zb, zc, bc; node `x` of the
/// identity labeling is moved to `perm[x]`.
pub fn gen_fig2_gadget(perm: &[usize]) -> Result<Instance> {
    gadget(&FIG2_EDGES, &FIG2_OPT, perm, "fig2")
}

/// The companion gadget with edges uv, uw, uz, vw, zb, zc, bc.
pub fn gen_fig3_gadget(perm: &[usize]) -> Result<Instance> {
    gadget(&FIG3_EDGES, &FIG3_OPT, perm, "fig3")
}

pub fn gen_path(n: usize) -> Result<Instance> {
    let es: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    let w: Vec<_> = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
    Instance::new(Graph::new(n, &es)?, "path", &[("n", n as i64)]).certified(&w, CertSource::GeneratorCertified)
}

pub fn gen_cycle(n: usize) -> Result<Instance> {
    check(n >= 3, || format!("cycle needs n ≥ 3, got {n}"))?;
    let es: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let w: Vec<_> = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
    Instance::new(Graph::new(n, &es)?, "cycle", &[("n", n as i64)]).certified(&w, CertSource::GeneratorCertified)
}

/// Uniform graph with exactly `m` distinct edges.
pub fn gen_erdos_renyi(n: usize, m: usize, seed: u64) -> Result<Instance> {
    let max = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max {
        return Err(Error::Infeasible(format!("{m} edges do not fit on {n} nodes")));
    }
    let mut rng = RandomStream::new(seed);
    let mut set = HashSet::with_capacity(m);
    let mut es = Vec::with_capacity(m);
    while es.len() < m {
        let u = rng.below(n);
        let v = rng.below(n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if set.insert(key) {
            es.push(key);
        }
    }
    Instance::new(Graph::new(n, &es)?, "erdos-renyi", &[("n", n as i64), ("m", m as i64), ("seed", seed as i64)]).solved()
}

pub const REGULAR_BUDGET: usize = 10_000;

/// Random `d`-regular graph from the pairing model, resampled until simple.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Instance> {
    if (n * d) % 2 == 1 || d >= n.max(1) {
        return Err(Error::Infeasible(format!("no {d}-regular graph on {n} nodes")));
    }
    let mut rng = RandomStream::new(seed);
    let mut points: Vec<u32> = Vec::with_capacity(n * d);
    let mut keys: Vec<u64> = Vec::with_capacity(n * d / 2);
    for _ in 0..REGULAR_BUDGET {
        points.clear();
        for v in 0..n {
            points.extend(std::iter::repeat_n(v as u32, d));
        }
        rng.shuffle(&mut points);
        keys.clear();
        let mut ok = true;
        for p in points.chunks_exact(2) {
            if p[0] == p[1] {
                ok = false;
                break;
            }
            let (a, b) = (p[0].min(p[1]) as u64, p[0].max(p[1]) as u64);
            keys.push(a << 32 | b);
        }
        if !ok {
            continue;
        }
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let es: Vec<(usize, usize)> = points.chunks_exact(2).map(|p| (p[0] as usize, p[1] as usize)).collect();
        let inst = Instance::new(Graph::new(n, &es)?, "random-regular", &[("n", n as i64), ("d", d as i64), ("seed", seed as i64)]);
        return if n <= exact::BRUTE_MAX_NODES { inst.solved() } else { Ok(inst) };
    }
    Err(Error::ResamplingExhausted(REGULAR_BUDGET))
}

/// Random graph with up to `m` edges and maximum degree at most `cap`:
/// edges are proposed uniformly and kept while both endpoints have room.
pub fn gen_random_bounded(n: usize, m: usize, cap: usize, seed: u64) -> Result<Instance> {
    if n < 2 || cap == 0 {
        return Err(Error::Infeasible(format!("n = {n}, cap = {cap}")));
    }
    let mut rng = RandomStream::new(seed);
    let mut deg = vec![0usize; n];
    let mut set = HashSet::new();
    let mut es = Vec::new();
    let mut tries = 0;
    while es.len() < m && tries < 100 * (m + 1) {
        tries += 1;
        let u = rng.below(n);
        let v = rng.below(n);
        if u == v || deg[u] >= cap || deg[v] >= cap || !set.insert((u.min(v), u.max(v))) {
            continue;
        }
        deg[u] += 1;
        deg[v] += 1;
        es.push((u, v));
    }
    Instance::new(Graph::new(n, &es)?, "random-bounded", &[("n", n as i64), ("m", m as i64), ("cap", cap as i64), ("seed", seed as i64)])
        .solved()
}

/// Finalised graph of a Theorem-6 style game, certified by its witness and a
/// matching Tutte–Berge barrier.
pub fn gen_thm6_graph(delta: usize, transcript: &crate::priority::GameTranscript) -> Result<Instance> {
    let bad = |m: String| Error::InconsistentTranscript(m);
    if transcript.adversary != "thm6" {
        return Err(bad(format!("transcript comes from adversary `{}`", transcript.adversary)));
    }
    let g = transcript.graph.clone();
    if g.max_degree() > delta {
        return Err(bad(format!("max degree {} exceeds {delta}", g.max_degree())));
    }
    let w = transcript.opt_witness.as_ref().ok_or_else(|| bad("no optimum witness".into()))?;
    let barrier = transcript.barrier.as_ref().ok_or_else(|| bad("no barrier".into()))?;
    let bound = exact::tutte_berge_bound(&g, barrier);
    if bound != w.len() {
        return Err(bad(format!("witness has {} edges but the barrier bound is {bound}", w.len())));
    }
    let report = crate::priority::check_consistency(transcript, None);
    if !report.ok {
        return Err(bad(report.problems.join("; ")));
    }
    let mut inst = Instance::new(g, "thm6", &[("delta", delta as i64)]);
    inst.labels = transcript.labels.clone();
    inst.certified(w, CertSource::GeneratorCertified)
}
