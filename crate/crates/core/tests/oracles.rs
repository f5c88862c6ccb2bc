//! Worked examples checked against independent test-side oracles.

use std::collections::BTreeMap;

use greedy_lab::certifier::{self, ComponentKind, Mode};
use greedy_lab::exact::{self, CertSource};
use greedy_lab::hypergraph::{self, DegreeOrder, Hypergraph};
use greedy_lab::instances;
use greedy_lab::matchers::{self, Algorithm, MatcherConfig};
use greedy_lab::priority::{self, IsolateAll, IsolateFirst, Lexicographic, MaxDegreeFirst, MinDegreeFirst, Strategy};
use greedy_lab::{DynamicGraph, Error, ExecutionTrace, Graph, Matching, NaiveDegreeOracle, RandomStream, TiePolicy};
use num_rational::Ratio;

fn g(n: usize, es: &[(usize, usize)]) -> Graph {
    Graph::new(n, es).unwrap()
}

fn path(n: usize) -> Graph {
    let es: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    g(n, &es)
}

fn triangle() -> Graph {
    g(3, &[(0, 1), (1, 2), (0, 2)])
}

fn star3() -> Graph {
    g(4, &[(0, 1), (0, 2), (0, 3)])
}

fn k4() -> Graph {
    g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
}

fn freq<F: FnMut(&mut RandomStream) -> usize>(draws: usize, seed: u64, mut f: F) -> BTreeMap<usize, f64> {
    let mut rng = RandomStream::new(seed);
    let mut c = BTreeMap::new();
    for _ in 0..draws {
        *c.entry(f(&mut rng)).or_insert(0.0) += 1.0;
    }
    c.values_mut().for_each(|x| *x /= draws as f64);
    c
}

/// Pearson statistic against the uniform distribution on `k` outcomes.
fn chi_square_uniform(f: &BTreeMap<usize, f64>, draws: usize, k: usize) -> f64 {
    let e = draws as f64 / k as f64;
    f.values().map(|p| (p * draws as f64 - e).powi(2) / e).sum()
}

// ---------- degree structure ----------

#[test]
fn triangle_single_bucket() {
    let dg = DynamicGraph::new(&triangle());
    let b = dg.buckets();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].0, 2);
    assert_eq!(b[0].1.len(), 3);
}

#[test]
fn path_buckets() {
    let dg = DynamicGraph::new(&path(3));
    let mut b = dg.buckets();
    b.iter_mut().for_each(|x| x.1.sort());
    assert_eq!(b, vec![(1, vec![0, 2]), (2, vec![1])]);
}

#[test]
fn gab_4_2_bucket_degrees() {
    // degrees by the construction rules: S_2 gets b−1 clique neighbours and
    // one S_1 partner; S_1 gets all of S_3 and its partner; S_3 gets all of
    // S_1 and its pair.
    let (a, b, c) = (4usize, 2usize, 4usize);
    let mut expect = vec![0usize; 2 * a + c];
    for i in 0..a {
        expect[i] += c + 1;
        expect[a + i] += (b - 1) + 1;
    }
    for j in 0..c {
        expect[2 * a + j] += a + 1;
    }
    let inst = instances::gen_gab(a, b).unwrap();
    let dg = DynamicGraph::new(&inst.graph);
    let got: Vec<usize> = dg.buckets().iter().map(|x| x.0).collect();
    let mut want: Vec<usize> = expect.clone();
    want.sort();
    want.dedup();
    assert_eq!(got, want);
    assert_eq!(got, vec![2, 5]);
    for v in 0..inst.graph.n() {
        assert_eq!(inst.graph.degree(v), expect[v]);
    }
}

#[test]
fn min_degree_node_uniform_on_path() {
    let dg = DynamicGraph::new(&path(3));
    let f = freq(100_000, 1, |r| dg.min_degree_node(&TiePolicy::Uniform, r).unwrap());
    assert_eq!(f.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
    assert!((f[&0] - 0.5).abs() < 0.01);
}

#[test]
fn min_degree_node_indexed() {
    let dg = DynamicGraph::new(&triangle());
    let first = dg.buckets()[0].1[0];
    let mut rng = RandomStream::new(0);
    assert_eq!(dg.min_degree_node(&TiePolicy::StoredIndex(0), &mut rng).unwrap(), first);
}

#[test]
fn min_degree_node_star_leaves() {
    let dg = DynamicGraph::new(&star3());
    let draws = 100_000;
    let f = freq(draws, 2, |r| dg.min_degree_node(&TiePolicy::Uniform, r).unwrap());
    assert!(!f.contains_key(&0));
    for leaf in 1..4 {
        assert!((f[&leaf] - 1.0 / 3.0).abs() < 0.02);
    }
    // 2 degrees of freedom, 0.1% critical value
    assert!(chi_square_uniform(&f, draws, 3) < 13.82);
}

#[test]
fn random_neighbor_examples() {
    let mut rng = RandomStream::new(3);
    let dg = DynamicGraph::new(&path(3));
    assert_eq!(dg.random_neighbor(0, &TiePolicy::Uniform, &mut rng).unwrap(), 1);

    let dg = DynamicGraph::new(&k4());
    let draws = 100_000;
    let f = freq(draws, 4, |r| dg.random_neighbor(0, &TiePolicy::Uniform, r).unwrap());
    assert_eq!(f.len(), 3);
    for v in 1..4 {
        assert!((f[&v] - 1.0 / 3.0).abs() < 0.02);
    }
    assert!(chi_square_uniform(&f, draws, 3) < 13.82);

    let mut dg = DynamicGraph::new(&triangle());
    dg.delete_edge(0, 1).unwrap();
    assert_eq!(dg.random_neighbor(0, &TiePolicy::Uniform, &mut rng).unwrap(), 2);
}

#[test]
fn delete_edge_examples() {
    let mut dg = DynamicGraph::new(&triangle());
    dg.delete_edge(0, 1).unwrap();
    assert_eq!((dg.degree(0), dg.degree(1), dg.degree(2)), (1, 1, 2));
    let mut b = dg.buckets();
    b.iter_mut().for_each(|x| x.1.sort());
    assert_eq!(b, vec![(1, vec![0, 1]), (2, vec![2])]);
    assert!(matches!(dg.delete_edge(0, 1), Err(Error::EdgeNotPresent(..))));

    let mut dg = DynamicGraph::new(&star3());
    dg.delete_edge(0, 3).unwrap();
    assert_eq!(dg.degree(3), 0);
    assert_eq!(dg.degree(0), 2);
    assert!(dg.buckets().iter().all(|(_, ns)| !ns.contains(&3)));
    dg.check_invariants().unwrap();
}

fn sorted_pairs(g: &Graph, es: &[usize]) -> Vec<(usize, usize)> {
    let mut v: Vec<_> = es.iter().map(|&e| g.edge(e)).map(|(a, b)| (a.min(b), a.max(b))).collect();
    v.sort();
    v
}

#[test]
fn remove_matched_pair_examples() {
    let t = triangle();
    let mut dg = DynamicGraph::new(&t);
    let r = dg.remove_matched_pair(0, 1).unwrap();
    assert_eq!(sorted_pairs(&t, &r), vec![(0, 1), (0, 2), (1, 2)]);
    assert_eq!(dg.degree(2), 0);

    let p = path(4);
    let mut dg = DynamicGraph::new(&p);
    let r = dg.remove_matched_pair(1, 2).unwrap();
    assert_eq!(sorted_pairs(&p, &r), vec![(0, 1), (1, 2), (2, 3)]);

    let k = k4();
    let mut dg = DynamicGraph::new(&k);
    assert_eq!(dg.remove_matched_pair(0, 2).unwrap().len(), 5);
    assert_eq!(dg.live_edge_count(), 1);
    assert!(dg.live_edge_between(1, 3).is_some());
}

#[test]
fn naive_oracle_edge_cases() {
    let empty = Graph::new(3, &[]).unwrap();
    let mut rng = RandomStream::new(0);
    assert!(matches!(DynamicGraph::new(&empty).min_degree_node(&TiePolicy::Uniform, &mut rng), Err(Error::EmptyGraph)));
    assert!(NaiveDegreeOracle::new(&empty).min_degree_node().is_err());

    let e = g(2, &[(0, 1)]);
    let dg = DynamicGraph::new(&e);
    let mut b = dg.buckets();
    b[0].1.sort();
    assert_eq!(b, vec![(1, vec![0, 1])]);
    let naive = NaiveDegreeOracle::new(&e);
    assert_eq!(naive.buckets(), vec![(1, [0, 1].into_iter().collect())]);
}

// ---------- matchers ----------

fn mean_size(gr: &Graph, alg: Algorithm, trials: usize, seed: u64) -> f64 {
    (0..trials).map(|i| matchers::run(gr, &MatcherConfig::new(alg, seed + i as u64)).0.size() as f64).sum::<f64>()
        / trials as f64
}

/// Expected MRG size by exhaustive enumeration over (node, neighbour) picks.
fn mrg_expectation(n: usize, edges: &[(usize, usize)]) -> Ratio<i64> {
    let live: Vec<(usize, usize)> = edges.to_vec();
    fn rec(n: usize, live: &[(usize, usize)]) -> Ratio<i64> {
        if live.is_empty() {
            return Ratio::from_integer(0);
        }
        let nbrs = |v: usize| live.iter().filter_map(move |&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None });
        let active: Vec<usize> = (0..n).filter(|&v| nbrs(v).next().is_some()).collect();
        let mut total = Ratio::from_integer(0);
        for &u in &active {
            let ns: Vec<usize> = nbrs(u).collect();
            for &v in &ns {
                let rest: Vec<_> = live.iter().copied().filter(|&(a, b)| a != u && b != u && a != v && b != v).collect();
                total += (Ratio::from_integer(1) + rec(n, &rest)) / Ratio::from_integer((active.len() * ns.len()) as i64);
            }
        }
        total
    }
    rec(n, &live)
}

#[test]
fn greedy_examples() {
    let e = g(2, &[(0, 1)]);
    let (m, _) = matchers::run(&e, &MatcherConfig::new(Algorithm::Greedy, 0));
    assert_eq!(m.normalized(), vec![(0, 1)]);
    let (m, t) = matchers::run(&Graph::new(0, &[]).unwrap(), &MatcherConfig::new(Algorithm::Greedy, 0));
    assert_eq!((m.size(), t.len()), (0, 0));
    // first pick: middle edge w.p. 1/3 gives 1 edge, otherwise 2
    let want = 1.0 / 3.0 + 2.0 * 2.0 / 3.0;
    assert!((mean_size(&path(4), Algorithm::Greedy, 100_000, 11) - want).abs() < 0.03);
}

#[test]
fn mrg_examples() {
    let e = g(2, &[(0, 1)]);
    assert_eq!(matchers::run(&e, &MatcherConfig::new(Algorithm::Mrg, 0)).0.size(), 1);
    for s in 0..200 {
        assert_eq!(matchers::run(&star3(), &MatcherConfig::new(Algorithm::Mrg, s)).0.size(), 1);
    }
    let want = mrg_expectation(4, &[(0, 1), (1, 2), (2, 3)]);
    let want = *want.numer() as f64 / *want.denom() as f64;
    assert!((mean_size(&path(4), Algorithm::Mrg, 100_000, 12) - want).abs() < 0.03);
}

/// Maximum matching of a graph with max degree ≤ 2: ⌊k/2⌋ per component.
fn delta2_optimum(gr: &Graph) -> usize {
    gr.components().iter().map(|c| c.len() / 2).sum()
}

#[test]
fn mingreedy_examples() {
    for n in 2..20 {
        for s in 0..5 {
            let p = path(n);
            assert_eq!(matchers::run(&p, &MatcherConfig::new(Algorithm::MinGreedy, s)).0.size(), delta2_optimum(&p));
            if n >= 3 {
                let c = instances::gen_cycle(n).unwrap().graph;
                assert_eq!(matchers::run(&c, &MatcherConfig::new(Algorithm::MinGreedy, s)).0.size(), delta2_optimum(&c));
            }
        }
    }
    assert_eq!(matchers::run(&star3(), &MatcherConfig::new(Algorithm::MinGreedy, 1)).0.size(), 1);
}

#[test]
fn mingreedy_gab_2500_collapses() {
    let inst = instances::gen_gab(2500, 50).unwrap();
    let opt = inst.optimum_size().unwrap() as f64;
    let mean = (0..100)
        .map(|s| matchers::run(&inst.graph, &MatcherConfig::new(Algorithm::MinGreedy, s)).0.size() as f64 / opt)
        .sum::<f64>()
        / 100.0;
    assert!(mean <= 0.60, "mean ratio {mean}");
}

#[test]
fn karp_sipser_examples() {
    for s in 0..50 {
        let (m, _) = matchers::run(&path(3), &MatcherConfig::new(Algorithm::KarpSipser, s));
        assert_eq!(m.size(), 1);
        // triangle 0-1-2 with pendant 3 on 0: the pendant edge is forced first
        let tp = g(4, &[(0, 1), (1, 2), (0, 2), (0, 3)]);
        let (m, t) = matchers::run(&tp, &MatcherConfig::new(Algorithm::KarpSipser, s));
        assert_eq!(m.size(), 2);
        assert_eq!(t.steps()[0].u, 3);
    }
}

#[test]
fn edsm_and_mds_examples() {
    for s in 0..50 {
        let (m, t) = matchers::run(&path(4), &MatcherConfig::new(Algorithm::Edsm, s));
        assert_eq!(m.size(), 2);
        let first = t.steps()[0];
        assert!([(0, 1), (1, 0), (2, 3), (3, 2)].contains(&(first.u, first.v)));
        let (m, t) = matchers::run(&path(4), &MatcherConfig::new(Algorithm::Mds, s));
        assert_eq!(m.size(), 2);
        let e = path(4).edge(t.steps()[0].edge as usize);
        assert_ne!((e.0.min(e.1), e.0.max(e.1)), (1, 2));
        assert_eq!(matchers::run(&triangle(), &MatcherConfig::new(Algorithm::Mds, s)).0.size(), 1);
        let e = g(2, &[(0, 1)]);
        assert_eq!(matchers::run(&e, &MatcherConfig::new(Algorithm::Edsm, s)).0.size(), 1);
    }
    let inst = instances::gen_gab(100, 2).unwrap();
    for alg in [Algorithm::Edsm, Algorithm::Mds] {
        for s in 0..20 {
            assert!(matchers::run(&inst.graph, &MatcherConfig::new(alg, s)).0.size() <= 70);
        }
    }
}

#[test]
fn enumeration_examples() {
    let e = g(2, &[(0, 1)]);
    assert_eq!(matchers::enumerate_min_degree_executions(&e, 10).unwrap().len(), 1);
    let ex = matchers::enumerate_min_degree_executions(&path(3), 10).unwrap();
    assert_eq!(ex.len(), 2);
    let firsts: Vec<u32> = ex.iter().map(|(_, t)| t.steps()[0].u).collect();
    assert!(firsts.contains(&0) && firsts.contains(&2));
    assert!(matches!(matchers::enumerate_min_degree_executions(&path(3), 1), Err(Error::ExecutionLimit(1))));
}

#[test]
fn determinism() {
    let inst = instances::gen_erdos_renyi(200, 600, 5).unwrap();
    for alg in Algorithm::ALL {
        let a = matchers::run(&inst.graph, &MatcherConfig::new(alg, 9)).1;
        let b = matchers::run(&inst.graph, &MatcherConfig::new(alg, 9)).1;
        assert_eq!(a.to_jsonl(), b.to_jsonl());
    }
}

// ---------- exact oracles ----------

#[test]
fn exact_examples() {
    let k33 = g(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]);
    let sides: Vec<bool> = (0..6).map(|v| v >= 3).collect();
    assert_eq!(exact::max_matching_bipartite(&k33, &sides).unwrap().size, 3);
    assert_eq!(exact::max_matching_bipartite(&path(3), &[false, true, false]).unwrap().size, 1);
    assert!(matches!(exact::max_matching_bipartite(&triangle(), &[false, true, false]), Err(Error::InvalidBipartition(_))));

    let dbl = instances::gen_gab_bipartite_double(100).unwrap();
    let sides = dbl.graph.two_coloring().unwrap();
    assert_eq!(exact::max_matching_bipartite(&dbl.graph, &sides).unwrap().size, dbl.optimum_size().unwrap());
    assert_eq!(dbl.optimum_size(), Some(2 * 100 + 20));

    assert_eq!(exact::max_matching_bruteforce(&triangle()).unwrap().size, 1);
    let fig2 = g(6, &instances::FIG2_EDGES);
    assert_eq!(exact::max_matching_bruteforce(&fig2).unwrap().size, 3);
    let outer: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    let inner: Vec<_> = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5)).collect();
    let spokes: Vec<_> = (0..5).map(|i| (i, i + 5)).collect();
    let petersen = g(10, &[outer, inner, spokes].concat());
    let c = exact::max_matching_bruteforce(&petersen).unwrap();
    assert_eq!((c.size, c.source), (5, CertSource::BruteForce));
}

#[test]
fn verify_examples() {
    let e = g(2, &[(0, 1)]);
    let rep = exact::verify_matching(&e, &Matching::new(2));
    assert!(rep.valid && !rep.maximal);
    let inst = instances::gen_erdos_renyi(60, 150, 1).unwrap();
    let (m, _) = matchers::run(&inst.graph, &MatcherConfig::new(Algorithm::MinGreedy, 1));
    let rep = exact::verify_matching(&inst.graph, &m);
    assert!(rep.valid && rep.maximal);

    let a = 100;
    let gab = instances::gen_gab(a, 10).unwrap();
    let mut pairs: Vec<_> = (0..a).map(|i| (i, a + i)).collect();
    pairs.extend((0..10).map(|j| (2 * a + 2 * j, 2 * a + 2 * j + 1)));
    let rep = exact::verify_matching(&gab.graph, &Matching::from_pairs(gab.graph.n(), &pairs).unwrap());
    assert!(rep.valid && rep.maximal);
    assert_eq!(rep.size, a + 10);
}

// ---------- generators ----------

#[test]
fn gab_degree_profile() {
    let inst = instances::gen_gab(100, 10).unwrap();
    assert_eq!(inst.graph.degree(100), 10);
    assert_eq!(inst.graph.degree(0), 21);
    assert_eq!(inst.graph.degree(200), 101);
    assert!(instances::gen_gab(100, 3).is_err());
}

#[test]
fn bipartite_generators() {
    assert!(instances::gen_gab_bipartite_double(4).unwrap().graph.two_coloring().is_some());
    let d = instances::gen_gab_bipartite_double(100).unwrap();
    assert_eq!(d.graph.degree(100), 11);

    let b = instances::gen_ga2_bipartite(16).unwrap();
    assert!(b.graph.two_coloring().is_some());
    assert!((16..32).all(|v| b.graph.degree(v) == 2));
    assert!(instances::gen_ga2_bipartite(17).is_err());
}

#[test]
fn ga2_bipartite_edsm_bound() {
    let a = 100;
    let b = instances::gen_ga2_bipartite(a).unwrap();
    let opt = b.optimum_size().unwrap() as f64;
    let sides = b.graph.two_coloring().unwrap();
    assert_eq!(exact::max_matching_bipartite(&b.graph, &sides).unwrap().size as f64, opt);
    let bound = (a / 2 + 4 * 10) as f64;
    for s in 0..20 {
        let m = matchers::run(&b.graph, &MatcherConfig::new(Algorithm::Edsm, s)).0.size() as f64;
        assert!(m <= bound, "{m} > {bound}");
        assert!(m / opt <= bound / a as f64);
    }
}

#[test]
fn fig2_gadget() {
    let id = instances::gen_fig2_gadget(&[0, 1, 2, 3, 4, 5]).unwrap();
    let degs: Vec<usize> = (0..6).map(|v| id.graph.degree(v)).collect();
    assert_eq!(degs, vec![2, 3, 2, 3, 2, 2]);
    let mut rng = RandomStream::new(8);
    for _ in 0..20 {
        let mut p: Vec<usize> = (0..6).collect();
        rng.shuffle(&mut p);
        let inst = instances::gen_fig2_gadget(&p).unwrap();
        assert_eq!(exact::max_matching_bruteforce(&inst.graph).unwrap().size, 3);
    }
    // isolating the first node leaves at most two edges
    let inst = instances::gen_fig2_gadget(&[0, 1, 2, 3, 4, 5]).unwrap();
    let t = priority::play(&IsolateFirst, &mut priority::StaticAdversary::new("fig2", &inst), 0).unwrap();
    assert!(t.matching_size() <= 2);
}

#[test]
fn thm6_graph_examples() {
    for (delta, m, opt) in [(4, 3, 5), (3, 2, 3)] {
        let (t, inst) = priority::play_thm6(&MinDegreeFirst, delta).unwrap();
        assert_eq!(t.matching_size(), m);
        assert_eq!(inst.optimum_size(), Some(opt));
        let labels = inst.labels.as_ref().unwrap();
        for name in ["a", "c"] {
            let v = labels.iter().position(|l| l == name).unwrap();
            assert!(inst.graph.degree(v) <= delta);
        }
    }
}

#[test]
fn simple_generators() {
    assert!(matches!(instances::gen_random_regular(7, 3, 0), Err(Error::Infeasible(_))));
    assert_eq!(instances::gen_path(5).unwrap().optimum_size(), Some(2));
    let r = instances::gen_random_regular(20, 3, 4).unwrap();
    assert!(r.graph.is_regular(3));
}

// ---------- certifier ----------

fn square() -> Graph {
    g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
}

#[test]
fn canonicalize_examples() {
    let e = g(2, &[(0, 1)]);
    let m = Matching::from_pairs(2, &[(0, 1)]).unwrap();
    let c = certifier::canonicalize_opt(&e, &m, &m).unwrap();
    assert_eq!(c.normalized(), vec![(0, 1)]);

    let s = square();
    let m = Matching::from_pairs(4, &[(0, 1)]).unwrap();
    let opt = Matching::from_pairs(4, &[(0, 3), (1, 2)]).unwrap();
    assert_eq!(certifier::canonicalize_opt(&s, &m, &opt).unwrap().normalized(), opt.normalized());

    let m = Matching::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
    let opt = Matching::from_pairs(4, &[(1, 2), (3, 0)]).unwrap();
    let c = certifier::canonicalize_opt(&s, &m, &opt).unwrap();
    assert_eq!(c.normalized(), vec![(0, 1), (2, 3)]);
    let d = certifier::decompose(&s, &m, &c).unwrap();
    assert_eq!(d.components.len(), 2);
    assert!(d.components.iter().all(|x| x.kind == ComponentKind::OneOne));
}

#[test]
fn decompose_examples() {
    let p = path(4);
    let m = Matching::from_pairs(4, &[(1, 2)]).unwrap();
    let opt = Matching::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
    let d = certifier::decompose(&p, &m, &opt).unwrap();
    assert_eq!(d.components.len(), 1);
    assert_eq!((d.components[0].kind, d.components[0].m_x, d.components[0].w_x), (ComponentKind::Augmenting, 1, 2));

    let pm = Matching::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
    let d = certifier::decompose(&p, &pm, &pm).unwrap();
    assert!(d.components.iter().all(|x| x.kind == ComponentKind::OneOne));

    let inst = instances::gen_gab(4, 2).unwrap();
    let (m, _) = matchers::run(&inst.graph, &MatcherConfig::new(Algorithm::MinGreedy, 3));
    let opt = inst.optimum.as_ref().unwrap().witness.clone().unwrap();
    let c = certifier::canonicalize_opt(&inst.graph, &m, &opt).unwrap();
    let d = certifier::decompose(&inst.graph, &m, &c).unwrap();
    assert_eq!(d.components.iter().map(|x| x.m_x).sum::<usize>(), m.size());
    assert_eq!(d.components.iter().map(|x| x.w_x).sum::<usize>(), 6);
}

/// 1:2-path a–b–c–d (M = bc) next to a one-one path x–y, with an F-edge x–a.
fn fig8() -> (Graph, ExecutionTrace, Matching, Matching) {
    let (a, b, c, d, x, y) = (0, 1, 2, 3, 4, 5);
    let gr = g(6, &[(a, b), (b, c), (c, d), (x, y), (x, a)]);
    let eid = |u, v| gr.edge_id(u, v).unwrap() as u32;
    let mut t = ExecutionTrace::new("hand", false);
    t.push(y, 1, x, eid(x, y) as usize, &[eid(x, y), eid(x, a)]);
    t.push(b, 2, c, eid(b, c) as usize, &[eid(a, b), eid(b, c), eid(c, d)]);
    let m = t.matching(6).unwrap();
    let opt = Matching::from_pairs(6, &[(a, b), (c, d), (x, y)]).unwrap();
    (gr, t, m, opt)
}

#[test]
fn indirect_transfer_scenario() {
    let (gr, t, m, opt) = fig8();
    let d = certifier::decompose(&gr, &m, &opt).unwrap();
    let reg = certifier::compute_transfers(&gr, &t, &m, &opt, &d, Mode::Regular, 4).unwrap();
    assert_eq!(reg.transfers.len(), 1);
    assert_eq!((reg.transfers[0].from, reg.transfers[0].to), (4, 0));
    let ind = certifier::compute_transfers(&gr, &t, &m, &opt, &d, Mode::Indirect, 4).unwrap();
    let indirect: Vec<_> = ind.transfers.iter().filter(|x| x.indirect).collect();
    assert_eq!(indirect.len(), 1);
    assert_eq!((indirect[0].from, indirect[0].to), (5, 0));
    assert_eq!(ind.theta, Ratio::new(1, 12));
}

#[test]
fn no_augmenting_paths_no_transfers() {
    let p = path(4);
    let cfg = MatcherConfig::new(Algorithm::MinGreedy, 0);
    let (m, t) = matchers::run(&p, &cfg);
    assert_eq!(m.size(), 2);
    let d = certifier::decompose(&p, &m, &m).unwrap();
    let l = certifier::compute_transfers(&p, &t, &m, &m, &d, Mode::Regular, 3).unwrap();
    assert!(l.transfers.is_empty());
    let rep = certifier::check_balances(&d, &l);
    assert!(rep.passed);
    assert_eq!(rep.global_ratio, "1/1");
}

#[test]
fn balance_bound_values() {
    assert_eq!(Mode::Regular.balance_bound(ComponentKind::OneOne, 1, 3), 2);
    assert_eq!(Mode::Indirect.balance_bound(ComponentKind::Augmenting, 1, 5), -2);
    assert_eq!(Mode::Indirect.balance_bound(ComponentKind::OneOne, 1, 5), 7);
    assert_eq!(Mode::Indirect.local_target(ComponentKind::Augmenting, 1, 4), Ratio::new(1, 2) + Ratio::new(1, 12));
}

#[test]
fn lemma2_on_cubic_graphs() {
    for seed in 0..20 {
        let inst = instances::gen_random_regular(10, 3, seed).unwrap();
        let opt = exact::max_matching_bruteforce(&inst.graph).unwrap().witness.unwrap();
        for (_, t) in matchers::sample_min_degree_executions(&inst.graph, 10, seed) {
            let c = certifier::certify(&inst.graph, &t, &opt, Mode::Regular, 3).unwrap();
            assert!(c.credits.as_ref().unwrap().ok, "{:?}", c.credits);
            assert!(c.passed(), "{:?}", c.report.violations);
        }
    }
}

#[test]
fn endpoint_degree_negative() {
    let p = path(4);
    let m = Matching::from_pairs(4, &[(1, 2)]).unwrap();
    let opt = Matching::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
    let d = certifier::decompose(&p, &m, &opt).unwrap();
    let rep = certifier::endpoint_degree_check(&p, &d);
    assert!(!rep.ok);
    assert_eq!(rep.violations.len(), 2);
}

#[test]
fn endpoint_degree_on_random_runs() {
    for seed in 0..30 {
        let inst = instances::gen_erdos_renyi(16, 24, seed).unwrap();
        let opt = exact::max_matching_exact(&inst.graph).unwrap().witness.unwrap();
        let (m, _) = matchers::run(&inst.graph, &MatcherConfig::new(Algorithm::MinGreedy, seed));
        let c = certifier::canonicalize_opt(&inst.graph, &m, &opt).unwrap();
        let d = certifier::decompose(&inst.graph, &m, &c).unwrap();
        assert!(certifier::endpoint_degree_check(&inst.graph, &d).ok);
    }
    let c = instances::gen_cycle(9).unwrap();
    let (m, _) = matchers::run(&c.graph, &MatcherConfig::new(Algorithm::MinGreedy, 0));
    let opt = c.optimum.unwrap().witness.unwrap();
    let canon = certifier::canonicalize_opt(&c.graph, &m, &opt).unwrap();
    let d = certifier::decompose(&c.graph, &m, &canon).unwrap();
    assert!(d.components.iter().all(|x| x.kind == ComponentKind::OneOne));
}

#[test]
fn certifier_preconditions() {
    let inst = instances::gen_erdos_renyi(12, 30, 1).unwrap();
    let opt = exact::max_matching_exact(&inst.graph).unwrap().witness.unwrap();
    let (_, t) = matchers::run(&inst.graph, &MatcherConfig::new(Algorithm::MinGreedy, 0));
    if inst.graph.max_degree() > 3 && !inst.graph.is_regular(4) {
        assert!(matches!(certifier::certify(&inst.graph, &t, &opt, Mode::Regular, 4), Err(Error::Precondition(_))));
    }
    let too_big = Matching::from_pairs(12, &[]).unwrap();
    assert!(certifier::certify(&inst.graph, &t, &too_big, Mode::Indirect, inst.graph.max_degree()).is_err());
}

// ---------- priority game ----------

#[test]
fn play_static_fig2() {
    let inst = instances::gen_fig2_gadget(&[0, 1, 2, 3, 4, 5]).unwrap();
    let t = priority::play(&MinDegreeFirst, &mut priority::StaticAdversary::new("fig2", &inst), 0).unwrap();
    assert!([2, 3].contains(&t.matching_size()));
    let t = priority::play(&IsolateAll, &mut priority::StaticAdversary::new("fig2", &inst), 0).unwrap();
    assert!(t.matching_size() <= 2);
}

#[test]
fn thm4_examples() {
    let t = priority::play(&MinDegreeFirst, &mut priority::thm4_adversary(), 0).unwrap();
    assert_eq!(t.rounds[0].item.degree(), 2);
    let labels = t.labels.clone().unwrap();
    assert_eq!(labels[t.matching[0].1], "v");
    let mut es = t.graph.edge_list();
    es.iter_mut().for_each(|e| *e = (e.0.min(e.1), e.0.max(e.1)));
    es.sort();
    let name = |v: usize| labels[v].clone();
    let mut named: Vec<(String, String)> = es.iter().map(|&(a, b)| {
        let (x, y) = (name(a), name(b));
        if x < y { (x, y) } else { (y, x) }
    }).collect();
    named.sort();
    let fig2: Vec<(String, String)> = [("u", "v"), ("u", "w"), ("v", "w"), ("v", "z"), ("b", "z"), ("c", "z"), ("b", "c")]
        .iter()
        .map(|&(a, b)| if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    assert_eq!(named, fig2);
    assert_eq!((t.matching_size(), t.optimum_size().unwrap()), (2, 3));

    let t = priority::play(&MaxDegreeFirst, &mut priority::thm4_adversary(), 0).unwrap();
    assert_eq!(t.rounds[0].item.degree(), 3);
    assert_eq!((t.matching_size(), t.optimum_size().unwrap()), (2, 3));

    let t = priority::play(&IsolateAll, &mut priority::thm4_adversary(), 0).unwrap();
    assert!(t.matching_size() <= 2);
}

#[test]
fn thm6_examples() {
    let (t, _) = priority::play_thm6(&MinDegreeFirst, 4).unwrap();
    assert_eq!(t.ratio().unwrap(), Ratio::new(3, 5));
    let strategies: [&dyn Strategy; 3] = [&MinDegreeFirst, &MaxDegreeFirst, &Lexicographic];
    for s in strategies {
        let (t, inst) = priority::play_thm6(s, 6).unwrap();
        assert_eq!(t.ratio().unwrap(), Ratio::new(5, 9));
        assert!(priority::check_consistency(&t, Some(s)).ok);
        assert!(inst.graph.max_degree() <= 6);
    }
    assert!(matches!(priority::play_thm6(&IsolateAll, 4), Err(Error::NonGreedyStrategy)));
}

#[test]
fn consistency_checker() {
    let t = priority::play(&MinDegreeFirst, &mut priority::thm4_adversary(), 0).unwrap();
    assert!(priority::check_consistency(&t, Some(&MinDegreeFirst)).ok);
    let mut bad = t.clone();
    bad.rounds[1].item.nbrs.push(0);
    bad.rounds[1].item.nbrs.sort();
    bad.rounds[1].item.nbrs.dedup();
    if bad.rounds[1].item.nbrs == t.rounds[1].item.nbrs {
        bad.rounds[1].item.nbrs.pop();
    }
    let rep = priority::check_consistency(&bad, None);
    assert!(!rep.ok);
    assert_eq!(rep.offending_round, Some(1));

    let empty = priority::GameTranscript {
        strategy: "none".into(),
        adversary: "none".into(),
        seed: 0,
        rounds: vec![],
        graph: Graph::new(0, &[]).unwrap(),
        matching: vec![],
        labels: None,
        opt_witness: None,
        barrier: None,
    };
    assert!(priority::check_consistency(&empty, None).ok);
}

/// Ratio when the lowest-id degree-2 node is matched to its lowest-id
/// neighbour and the rest is completed optimally.
fn lowest_id_first_round(perm: &[usize]) -> Ratio<i64> {
    let inst = instances::gen_fig2_gadget(perm).unwrap();
    let gr = &inst.graph;
    let u = (0..6).filter(|&v| gr.degree(v) == 2).min().unwrap();
    let v = gr.neighbors(u).iter().map(|&x| x as usize).min().unwrap();
    let opt: Vec<(usize, usize)> = instances::FIG2_OPT.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    if opt.contains(&(u, v)) || opt.contains(&(v, u)) { Ratio::from_integer(1) } else { Ratio::new(2, 3) }
}

#[test]
fn yao_examples() {
    use itertools::Itertools;
    let perms: Vec<Vec<usize>> = (0..6).permutations(6).collect();
    let want = perms.iter().map(|p| lowest_id_first_round(p)).sum::<Ratio<i64>>() / Ratio::from_integer(perms.len() as i64);
    assert_eq!(priority::yao_exact_ratio(&MinDegreeFirst).unwrap(), want);
    let s = priority::yao_expected_ratio(&MinDegreeFirst, 100_000, 1).unwrap();
    assert!((s.mean - *want.numer() as f64 / *want.denom() as f64).abs() < 0.01);

    // a first-round mate chosen independently of the labels is right half the time
    let half = Ratio::new(1, 2) + Ratio::new(1, 2) * Ratio::new(2, 3);
    let zoo = priority::strategy_zoo();
    let best = zoo.iter().map(|s| priority::yao_exact_ratio(s.as_ref()).unwrap()).max().unwrap();
    assert_eq!(best, half);
    assert!(priority::yao_exact_ratio(&MaxDegreeFirst).unwrap() <= half);
    assert!(priority::yao_exact_ratio(&IsolateAll).unwrap() <= Ratio::new(2, 3));
    assert!(priority::yao_exact_ratio(&IsolateFirst).unwrap() <= Ratio::new(2, 3));
}

// ---------- hypergraph ----------

#[test]
fn hypergraph_gadget_examples() {
    let g3 = hypergraph::gen_hyper_hard(3).unwrap();
    assert_eq!(g3.hypergraph.n() - 9, 1);
    assert!(hypergraph::check_gadget(&g3).ok());
    for k in 3..=8 {
        let gd = hypergraph::gen_hyper_hard(k).unwrap();
        let h = &gd.hypergraph;
        for v in 0..h.n() {
            let want = if gd.e_nodes[..k - 1].contains(&v) { 4 } else { 2 };
            assert_eq!(h.degree(v), want);
        }
        for i in (0..h.m()).filter(|&i| i != gd.top) {
            assert_eq!(h.intersection(i, gd.top), 1);
        }
    }
}

#[test]
fn hypergraph_game_examples() {
    let r = hypergraph::hyper_greedy_priority_game(&DegreeOrder { prefer_high: false, take_last: false }, 3).unwrap();
    assert_eq!((r.matching_size(), r.optimum_size), (1, 3));
    assert!(r.maximal);
    let r = hypergraph::hyper_greedy_priority_game(&DegreeOrder { prefer_high: true, take_last: false }, 5).unwrap();
    assert_eq!((r.matching_size(), r.optimum_size), (1, 5));
    assert_eq!(r.item.degree(), 4);
    assert!(matches!(hypergraph::hyper_greedy_priority_game(&hypergraph::HyperIsolate, 3), Err(Error::NonGreedyStrategy)));
}

#[test]
fn hyper_greedy_examples() {
    let one = Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
    assert_eq!(hypergraph::hyper_greedy(&one, 0), vec![0]);
    let two = Hypergraph::new(6, 3, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
    let mut got = hypergraph::hyper_greedy(&two, 0);
    got.sort();
    assert_eq!(got, vec![0, 1]);
    let gd = hypergraph::gen_hyper_hard(3).unwrap();
    let mean = (0..2000).map(|s| hypergraph::hyper_greedy(&gd.hypergraph, s).len() as f64 / 3.0).sum::<f64>() / 2000.0;
    assert!(mean > 1.0 / 3.0 + 0.05, "mean {mean}");
}

#[test]
fn hyper_bruteforce_examples() {
    assert_eq!(hypergraph::hyper_bruteforce_optimum(&hypergraph::gen_hyper_hard(3).unwrap().hypergraph).unwrap(), 3);
    assert_eq!(hypergraph::hyper_bruteforce_optimum(&hypergraph::gen_hyper_hard(4).unwrap().hypergraph).unwrap(), 4);
    assert_eq!(hypergraph::hyper_bruteforce_optimum(&Hypergraph::new(0, 3, vec![]).unwrap()).unwrap(), 0);
    let big = Hypergraph::new(75, 3, (0..25).map(|i| vec![3 * i, 3 * i + 1, 3 * i + 2]).collect()).unwrap();
    assert!(matches!(hypergraph::hyper_bruteforce_optimum(&big), Err(Error::TooLarge(_))));
}
