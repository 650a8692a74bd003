use std::collections::VecDeque;

use super::FeynmanGraph;
use crate::error::{Error, Result};

/// Spanning-tree momentum routing.
///
/// Edge `e` carries `K_e + P_e` in the direction `orientation[e].0 → orientation[e].1`,
/// with `K_e = Σ_i internal[e][i]·k_i` and `P_e = Σ_j external[e][j]·p_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Routing {
    pub base: usize,
    pub orientation: Vec<(usize, usize)>,
    pub tree: Vec<bool>,
    pub chords: Vec<usize>,
    pub internal: Vec<Vec<i32>>,
    pub external: Vec<Vec<i32>>,
    /// Vertices carrying an independent external momentum (φ > 0, not the base).
    pub external_vertices: Vec<usize>,
    pub loop_names: Vec<String>,
    pub external_names: Vec<String>,
}

/// Routing based at the last vertex.
pub fn build_routing_default(g: &FeynmanGraph) -> Result<Routing> {
    if g.num_vertices() == 0 {
        return Err(Error::Invalid("graph has no vertices".into()));
    }
    build_routing(g, g.num_vertices() - 1)
}

pub fn build_routing(g: &FeynmanGraph, base: usize) -> Result<Routing> {
    if base >= g.num_vertices() {
        return Err(Error::UnknownVertex(base.to_string()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.num_vertices();
    let inc = g.incident();
    let mut parent_edge: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree = vec![false; g.num_edges()];
    let mut order = Vec::with_capacity(n);
    seen[base] = true;
    let mut q = VecDeque::from([base]);
    while let Some(v) = q.pop_front() {
        order.push(v);
        for &e in inc[v].iter().rev() {
            let (a, b) = g.edges[e].ends;
            let w = if a == v { b } else { a };
            if !seen[w] {
                seen[w] = true;
                tree[e] = true;
                parent_edge[w] = Some(e);
                q.push_back(w);
            }
        }
    }
    let chords: Vec<usize> = (0..g.num_edges()).filter(|&e| !tree[e]).collect();
    let h = chords.len();
    let external_vertices: Vec<usize> = (0..n).filter(|&v| v != base && g.external[v] > 0).collect();
    let orientation: Vec<(usize, usize)> = g.edges.iter().map(|e| e.ends).collect();

    let mut internal = vec![vec![0i32; h]; g.num_edges()];
    let mut external = vec![vec![0i32; external_vertices.len()]; g.num_edges()];
    for (i, &c) in chords.iter().enumerate() {
        internal[c][i] = 1;
    }
    // Net inflow into each vertex from chords and external legs; accumulated
    // bottom-up so that a tree edge carries its subtree's total outflow.
    let mut inflow_k = vec![vec![0i32; h]; n];
    let mut inflow_p = vec![vec![0i32; external_vertices.len()]; n];
    for (i, &c) in chords.iter().enumerate() {
        let (t, hd) = orientation[c];
        if t != hd {
            inflow_k[hd][i] += 1;
            inflow_k[t][i] -= 1;
        }
    }
    for (j, &v) in external_vertices.iter().enumerate() {
        inflow_p[v][j] += 1;
    }
    for &v in order.iter().rev() {
        let Some(e) = parent_edge[v] else { continue };
        let (t, hd) = orientation[e];
        let parent = if t == v { hd } else { t };
        // flow leaving v through e towards the parent
        let sign = if t == v { 1 } else { -1 };
        for i in 0..h {
            internal[e][i] = sign * inflow_k[v][i];
            inflow_k[parent][i] += inflow_k[v][i];
        }
        for j in 0..external_vertices.len() {
            external[e][j] = sign * inflow_p[v][j];
            inflow_p[parent][j] += inflow_p[v][j];
        }
    }

    let loop_names = if h == 1 { vec!["k".to_string()] } else { (1..=h).map(|i| format!("k{i}")).collect() };
    let external_names = if external_vertices.len() == 1 {
        vec!["p".to_string()]
    } else {
        (1..=external_vertices.len()).map(|i| format!("p{i}")).collect()
    };
    Ok(Routing { base, orientation, tree, chords, internal, external, external_vertices, loop_names, external_names })
}

impl Routing {
    pub fn num_loops(&self) -> usize {
        self.loop_names.len()
    }

    pub fn num_external(&self) -> usize {
        self.external_names.len()
    }

    /// `K_e + P_e` as text, e.g. `p - k1 - k2`.
    pub fn momentum_text(&self, e: usize) -> String {
        let mut parts: Vec<(i32, &str)> = Vec::new();
        for (j, &c) in self.external[e].iter().enumerate() {
            parts.push((c, &self.external_names[j]));
        }
        for (i, &c) in self.internal[e].iter().enumerate() {
            parts.push((c, &self.loop_names[i]));
        }
        let mut out = String::new();
        for (c, name) in parts.into_iter().filter(|(c, _)| *c != 0) {
            let mag = c.abs();
            let coeff = if mag == 1 { String::new() } else { format!("{mag}*") };
            if out.is_empty() {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            out.push_str(&coeff);
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Σ_e 𝓔_{e,v}(K_e + P_e) + p_v as integer coefficient vectors (loop part, external part).
    pub fn conservation_at(&self, v: usize) -> (Vec<i32>, Vec<i32>) {
        let h = self.num_loops();
        let mut k = vec![0; h];
        let mut p = vec![0; self.num_external()];
        if let Some(j) = self.external_vertices.iter().position(|&w| w == v) {
            p[j] += 1;
        }
        for (e, &(t, hd)) in self.orientation.iter().enumerate() {
            if t == hd {
                continue;
            }
            let s = if hd == v {
                1
            } else if t == v {
                -1
            } else {
                0
            };
            for i in 0..h {
                k[i] += s * self.internal[e][i];
            }
            for j in 0..p.len() {
                p[j] += s * self.external[e][j];
            }
        }
        (k, p)
    }

    /// Reverse the orientation of one edge (negates its momentum).
    pub fn flipped(&self, e: usize) -> Routing {
        let mut r = self.clone();
        let (a, b) = r.orientation[e];
        r.orientation[e] = (b, a);
        r.internal[e].iter_mut().for_each(|c| *c = -*c);
        r.external[e].iter_mut().for_each(|c| *c = -*c);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubble_labels() {
        let g = FeynmanGraph::from_pairs(2, &[(0, 1), (0, 1)], "m", 4);
        let r = build_routing_default(&g).unwrap();
        assert_eq!(r.momentum_text(0), "k");
        assert_eq!(r.momentum_text(1), "p - k");
        for v in 0..2 {
            if v != r.base {
                let (k, p) = r.conservation_at(v);
                assert!(k.iter().chain(&p).all(|&c| c == 0));
            }
        }
    }

    #[test]
    fn sunrise_labels() {
        let g = FeynmanGraph::from_pairs(2, &[(0, 1), (0, 1), (0, 1)], "m", 4);
        let r = build_routing_default(&g).unwrap();
        let labels: Vec<String> = (0..3).map(|e| r.momentum_text(e)).collect();
        assert_eq!(labels, ["k1", "k2", "p - k1 - k2"]);
    }

    #[test]
    fn tree_edge_is_pure_external() {
        let g = FeynmanGraph::from_pairs(2, &[(0, 1)], "m", 4);
        let r = build_routing_default(&g).unwrap();
        assert_eq!(r.num_loops(), 0);
        assert_eq!(r.momentum_text(0), "p");
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = FeynmanGraph::from_pairs(3, &[(0, 1)], "m", 4);
        assert_eq!(build_routing_default(&g), Err(Error::Disconnected));
    }
}
