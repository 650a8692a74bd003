//! Exhaustive small multigraph corpus, deduplicated up to isomorphism.

use std::collections::HashSet;

use super::{canonical_key, FeynmanGraph};

/// Connected multigraphs (self-loops allowed) with 1..=`max_vertices` vertices and
/// at most `max_edges` edges; φ ≡ 1, common mass `m`, unit exponents, D = 4.
pub fn connected_multigraphs(max_vertices: usize, max_edges: usize) -> Vec<FeynmanGraph> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let mut chosen = Vec::new();
        extend(n, &pairs, 0, max_edges, &mut chosen, &mut seen, &mut out);
    }
    out
}

fn extend(
    n: usize,
    pairs: &[(usize, usize)],
    start: usize,
    budget: usize,
    chosen: &mut Vec<(usize, usize)>,
    seen: &mut HashSet<String>,
    out: &mut Vec<FeynmanGraph>,
) {
    let g = FeynmanGraph::from_pairs(n, chosen, "m", 4);
    if g.is_connected() && seen.insert(canonical_key(&g)) {
        out.push(g);
    }
    if budget == 0 {
        return;
    }
    for k in start..pairs.len() {
        chosen.push(pairs[k]);
        extend(n, pairs, k, budget - 1, chosen, seen, out);
        chosen.pop();
    }
}

/// 1PI graphs with 1 ≤ h1 ≤ `max_loops` from the connected corpus.
pub fn one_pi_corpus(max_vertices: usize, max_edges: usize, max_loops: usize) -> Vec<FeynmanGraph> {
    connected_multigraphs(max_vertices, max_edges)
        .into_iter()
        .filter(|g| g.is_one_pi() && (1..=max_loops).contains(&g.loops()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        // one vertex: 0..=2 self-loops; two vertices: connected with ≤2 edges
        let c = connected_multigraphs(2, 2);
        // 1 vertex: 3 graphs; 2 vertices: {ab}, {ab,ab}, {ab,aa}
        assert_eq!(c.len(), 6);
    }
}
