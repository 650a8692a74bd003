use num_rational::BigRational;
use num_traits::Zero;

use super::{components_of, FeynmanGraph};
use crate::error::{Error, Result};

/// Split an edge subset into the edge sets of its connected components.
pub(crate) fn edge_components(g: &FeynmanGraph, edges: &[usize]) -> Vec<Vec<usize>> {
    let label = components_of(g.num_vertices(), edges.iter().map(|&e| g.edges[e].ends));
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for &e in edges {
        let l = label[g.edges[e].ends.0];
        match groups.iter_mut().find(|(k, _)| *k == l) {
            Some((_, v)) => v.push(e),
            None => groups.push((l, vec![e])),
        }
    }
    groups.into_iter().map(|(_, v)| v).collect()
}

/// True if every component of the edge subset is 1PI, carries a loop and has ω ≤ 0.
pub fn is_divergent_union(g: &FeynmanGraph, edges: &[usize]) -> bool {
    !edges.is_empty()
        && edge_components(g, edges).iter().all(|comp| {
            let s = g.edge_subgraph(comp);
            s.loops() >= 1 && s.is_one_pi() && s.omega() <= BigRational::zero()
        })
}

/// Proper edge subsets that are disjoint unions of divergent 1PI loop subgraphs,
/// ordered by size, then lexicographically by edge index.
pub fn enumerate_divergent_subgraphs(g: &FeynmanGraph) -> Vec<Vec<usize>> {
    let m = g.num_edges();
    assert!(m < 31, "subgraph enumeration limited to 30 edges");
    let full: u32 = if m == 0 { 0 } else { (1u32 << m) - 1 };
    let mut out = Vec::new();
    for mask in 1..full {
        let edges: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        if is_divergent_union(g, &edges) {
            out.push(edges);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Contract the subgraph given by edge ids.
pub fn contract(g: &FeynmanGraph, edge_ids: &[String]) -> Result<FeynmanGraph> {
    let mut idx = Vec::with_capacity(edge_ids.len());
    for id in edge_ids {
        idx.push(g.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.clone()))?);
    }
    Ok(contract_indices(g, &idx))
}

/// Collapse each component of the edge subset to its earliest vertex; φ adds up.
pub fn contract_indices(g: &FeynmanGraph, edges: &[usize]) -> FeynmanGraph {
    let n = g.num_vertices();
    let mut in_gamma = vec![false; g.num_edges()];
    for &e in edges {
        in_gamma[e] = true;
    }
    let label = components_of(n, edges.iter().map(|&e| g.edges[e].ends));
    // representative = smallest vertex index with the same label, if touched
    let mut rep: Vec<usize> = (0..n).collect();
    for v in 0..n {
        if let Some(w) = (0..v).find(|&w| label[w] == label[v]) {
            rep[v] = rep[w];
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| rep[v] == v).collect();
    let new_index = |v: usize| keep.iter().position(|&k| k == rep[v]).unwrap();
    let mut external = vec![0u32; keep.len()];
    for v in 0..n {
        external[new_index(v)] += g.external[v];
    }
    let vertices = keep.iter().map(|&v| g.vertices[v].clone()).collect();
    let new_edges = g
        .edges
        .iter()
        .enumerate()
        .filter(|(i, _)| !in_gamma[*i])
        .map(|(_, e)| {
            let mut e = e.clone();
            e.ends = (new_index(e.ends.0), new_index(e.ends.1));
            e
        })
        .collect();
    FeynmanGraph { vertices, edges: new_edges, external, dimension: g.dimension }
}
