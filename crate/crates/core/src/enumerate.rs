//! Exhaustive generation of small connected graphs with a degree cap, up to
//! isomorphism.

use std::collections::HashSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_NODES: usize = 10;

/// Adjacency as bit rows.
type Rows = Vec<u16>;

fn rows_of(n: usize, edges: &[(usize, usize)]) -> Rows {
    let mut r = vec![0u16; n];
    for &(a, b) in edges {
        r[a] |= 1 << b;
        r[b] |= 1 << a;
    }
    r
}

/// Stable colour refinement starting from degrees; colours are ranks of
/// label-free signatures.
fn refine(rows: &Rows) -> Vec<usize> {
    let n = rows.len();
    let mut col: Vec<usize> = rows.iter().map(|r| r.count_ones() as usize).collect();
    loop {
        let sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| (col[v], (0..n).filter(|&w| rows[v] >> w & 1 == 1).map(|w| col[w]).sorted().collect()))
            .collect();
        let uniq: Vec<_> = sig.iter().cloned().sorted().dedup().collect();
        let next: Vec<usize> = sig.iter().map(|s| uniq.binary_search(s).unwrap()).collect();
        let classes = |c: &[usize]| c.iter().collect::<HashSet<_>>().len();
        if classes(&next) == classes(&col) {
            return next;
        }
        col = next;
    }
}

fn code(rows: &Rows, order: &[usize]) -> u64 {
    let mut c = 0u64;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            c = c << 1 | (rows[order[i]] >> order[j] & 1) as u64;
        }
    }
    c
}

/// Canonical code and a node order realising it.
pub fn canonical_form(n: usize, edges: &[(usize, usize)]) -> (u64, Vec<usize>) {
    let rows = rows_of(n, edges);
    let col = refine(&rows);
    let ncol = col.iter().max().map_or(0, |&c| c + 1);
    let cells: Vec<Vec<usize>> = (0..ncol).map(|c| (0..n).filter(|&v| col[v] == c).collect()).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    for choice in cells.iter().map(|cell| cell.iter().copied().permutations(cell.len())).multi_cartesian_product() {
        let order: Vec<usize> = choice.concat();
        let c = code(&rows, &order);
        if best.as_ref().is_none_or(|(b, _)| c > *b) {
            best = Some((c, order));
        }
    }
    best.unwrap_or((0, Vec::new()))
}

fn canonical_graph(n: usize, edges: &[(usize, usize)]) -> (u64, Vec<(usize, usize)>) {
    let (c, order) = canonical_form(n, edges);
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let es = edges.iter().map(|&(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b]))).sorted().collect();
    (c, es)
}

/// All connected graphs on `1..=max_n` nodes with maximum degree at most
/// `cap`, one per isomorphism class, grouped by node count.
///
/// Every such graph on `n + 1` nodes arises from one on `n` nodes by adding a
/// vertex (a spanning-tree leaf), so extending each class by one vertex in
/// every admissible way and deduplicating is exhaustive.
pub fn connected_graphs(max_n: usize, cap: usize) -> Result<Vec<Vec<Graph>>> {
    if max_n > MAX_NODES {
        return Err(Error::TooLarge(format!("{max_n} nodes exceed {MAX_NODES}")));
    }
    let mut levels: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
    if max_n >= 1 {
        levels.push(vec![Vec::new()]);
    }
    for n in 1..max_n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for es in &levels[n - 1] {
            let mut deg = vec![0; n];
            for &(a, b) in es {
                deg[a] += 1;
                deg[b] += 1;
            }
            let open: Vec<usize> = (0..n).filter(|&v| deg[v] < cap).collect();
            for k in 1..=cap.min(open.len()) {
                for nb in open.iter().copied().combinations(k) {
                    let mut e2 = es.clone();
                    e2.extend(nb.iter().map(|&v| (v, n)));
                    let (c, ce) = canonical_graph(n + 1, &e2);
                    if seen.insert(c) {
                        next.push(ce);
                    }
                }
            }
        }
        levels.push(next);
    }
    levels.into_iter().enumerate().map(|(i, l)| l.iter().map(|es| Graph::new(i + 1, es)).collect()).collect()
}
