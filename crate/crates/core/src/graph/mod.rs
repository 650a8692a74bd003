//! Feynman multigraphs with external structure.

mod canon;
pub mod corpus;
mod routing;
mod subgraph;
mod symanzik;

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::GaussianRational;

pub use canon::canonical_key;
pub use routing::{build_routing, build_routing_default, Routing};
pub use subgraph::{contract, contract_indices, enumerate_divergent_subgraphs, is_divergent_union};
pub use symanzik::{loop_gram_matrix, spanning_trees, symanzik_first, symanzik_vars};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: (usize, usize),
    pub mass: String,
    pub exponent: GaussianRational,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }
}

/// Multigraph with masses, analytic exponents, external legs φ(v) and dimension D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    /// φ(v) indexed like `vertices`.
    pub external: Vec<u32>,
    pub dimension: u32,
}

impl FeynmanGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>, external: Vec<u32>, dimension: u32) -> Result<Self> {
        let g = FeynmanGraph { vertices, edges, external, dimension };
        g.validate()?;
        Ok(g)
    }

    /// Build from `(v, w)` vertex index pairs with a common mass and unit exponents.
    pub fn from_pairs(n_vertices: usize, pairs: &[(usize, usize)], mass: &str, dimension: u32) -> Self {
        let vertices = (1..=n_vertices).map(|i| i.to_string()).collect();
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Edge {
                id: format!("e{}", i + 1),
                ends: (a, b),
                mass: mass.to_string(),
                exponent: GaussianRational::one(),
            })
            .collect();
        FeynmanGraph { vertices, edges, external: vec![1; n_vertices], dimension }
    }

    fn validate(&self) -> Result<()> {
        if self.external.len() != self.vertices.len() {
            return Err(Error::Invalid("external counts do not match vertex list".into()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(v) {
                return Err(Error::Invalid(format!("duplicate vertex id '{v}'")));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.ends.0 >= self.vertices.len() || e.ends.1 >= self.vertices.len() {
                return Err(Error::UnknownVertex(format!("endpoint of edge '{}'", e.id)));
            }
            if self.edges[..i].iter().any(|f| f.id == e.id) {
                return Err(Error::Invalid(format!("duplicate edge id '{}'", e.id)));
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// N_G = Σ φ(v).
    pub fn external_total(&self) -> u32 {
        self.external.iter().sum()
    }

    /// Component label per vertex, numbered in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        components_of(self.num_vertices(), self.edges.iter().map(|e| e.ends))
    }

    pub fn num_components(&self) -> usize {
        self.components().iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() <= 1
    }

    /// First Betti number |E| − |V| + #components.
    pub fn loops(&self) -> usize {
        self.num_edges() + self.num_components() - self.num_vertices()
    }

    /// Connected and without bridges.
    pub fn is_one_pi(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        let base = self.num_components();
        (0..self.num_edges()).all(|skip| {
            let c = components_of(
                self.num_vertices(),
                self.edges.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, e)| e.ends),
            );
            c.iter().max().map_or(0, |m| m + 1) == base
        })
    }

    /// Superficial degree of divergence Σ Re λ_e − (D/2)·h1.
    pub fn omega(&self) -> BigRational {
        let sum: BigRational = self.edges.iter().fold(BigRational::zero(), |acc, e| acc + &e.exponent.re);
        sum - BigRational::new(BigInt::from(self.dimension) * BigInt::from(self.loops()), BigInt::from(2))
    }

    /// Distinct mass symbols in edge order.
    pub fn mass_symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.edges {
            if !out.contains(&e.mass) {
                out.push(e.mass.clone());
            }
        }
        out
    }

    /// Subgraph spanned by an edge subset: touched vertices in parent order, φ restricted.
    pub fn edge_subgraph(&self, edges: &[usize]) -> FeynmanGraph {
        let mut touched = vec![false; self.num_vertices()];
        for &i in edges {
            touched[self.edges[i].ends.0] = true;
            touched[self.edges[i].ends.1] = true;
        }
        let map: Vec<Option<usize>> = touched
            .iter()
            .scan(0usize, |n, &t| {
                Some(if t {
                    *n += 1;
                    Some(*n - 1)
                } else {
                    None
                })
            })
            .collect();
        let vertices = (0..self.num_vertices()).filter(|&v| touched[v]).map(|v| self.vertices[v].clone()).collect();
        let external = (0..self.num_vertices()).filter(|&v| touched[v]).map(|v| self.external[v]).collect();
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        let edges = sorted
            .iter()
            .map(|&i| {
                let e = &self.edges[i];
                Edge { ends: (map[e.ends.0].unwrap(), map[e.ends.1].unwrap()), ..e.clone() }
            })
            .collect();
        FeynmanGraph { vertices, edges, external, dimension: self.dimension }
    }

    /// Vertex-index BFS order of edges, used by routing.
    pub(crate) fn incident(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.ends.0].push(i);
            if e.ends.1 != e.ends.0 {
                inc[e.ends.1].push(i);
            }
        }
        inc
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.vertices.iter().map(|v| Id::Str(v.clone())).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeFile {
                    id: Id::Str(e.id.clone()),
                    ends: [Id::Str(self.vertices[e.ends.0].clone()), Id::Str(self.vertices[e.ends.1].clone())],
                    mass: Some(e.mass.clone()),
                    exponent: Some(e.exponent.to_string()),
                })
                .collect(),
            external: self
                .vertices
                .iter()
                .zip(&self.external)
                .filter(|(_, &c)| c > 0)
                .map(|(v, &c)| (v.clone(), c))
                .collect(),
            dimension: self.dimension,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| json_error(text, &e))?;
        file.into_graph()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("graph serializes")
    }
}

pub(crate) fn json_error(text: &str, e: &serde_json::Error) -> Error {
    let offset = text
        .lines()
        .take(e.line().saturating_sub(1))
        .map(|l| l.len() + 1)
        .sum::<usize>()
        + e.column().saturating_sub(1);
    Error::Parse(crate::error::ParseError::new(text, offset, &e.to_string()))
}

pub(crate) fn components_of(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for (a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    q.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Vertex or edge identifier: JSON string or integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Id {
    Int(i64),
    Str(String),
}

impl Id {
    fn text(&self) -> String {
        match self {
            Id::Int(i) => i.to_string(),
            Id::Str(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub id: Id,
    pub ends: [Id; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<String>,
}

/// On-disk graph description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<Id>,
    pub edges: Vec<EdgeFile>,
    #[serde(default)]
    pub external: BTreeMap<String, u32>,
    pub dimension: u32,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<FeynmanGraph> {
        let vertices: Vec<String> = self.vertices.iter().map(Id::text).collect();
        let find = |id: &Id| {
            let t = id.text();
            vertices.iter().position(|v| *v == t).ok_or(Error::UnknownVertex(t))
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let exponent = match &e.exponent {
                Some(s) => s.parse::<GaussianRational>().map_err(Error::Parse)?,
                None => GaussianRational::one(),
            };
            edges.push(Edge {
                id: e.id.text(),
                ends: (find(&e.ends[0])?, find(&e.ends[1])?),
                mass: e.mass.clone().unwrap_or_else(|| format!("m{}", i + 1)),
                exponent,
            });
        }
        let mut external = vec![0; vertices.len()];
        for (v, c) in &self.external {
            let idx = vertices.iter().position(|w| w == v).ok_or_else(|| Error::UnknownVertex(v.clone()))?;
            external[idx] = *c;
        }
        FeynmanGraph::new(vertices, edges, external, self.dimension)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_graph_file() {
        let g = FeynmanGraph::from_json(
            r#"{"vertices":[1,2],"edges":[{"id":"e1","ends":[1,2],"mass":"m1","exponent":"1"},
               {"id":2,"ends":[1,2],"mass":"m2","exponent":"3/2"}],"external":{"1":1,"2":1},"dimension":4}"#,
        )
        .unwrap();
        assert_eq!(g.loops(), 1);
        assert_eq!(g.edges[1].id, "2");
        assert_eq!(g.omega(), BigRational::new(1.into(), 2.into()));
        assert!(g.is_one_pi());
        let back = FeynmanGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_unknown_fields_and_vertices() {
        assert!(FeynmanGraph::from_json(r#"{"vertices":[1],"edges":[],"dimension":4,"colour":1}"#).is_err());
        let e = FeynmanGraph::from_json(r#"{"vertices":[1],"edges":[{"id":1,"ends":[1,7]}],"dimension":4}"#);
        assert!(matches!(e, Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn bridges_break_one_pi() {
        let g = FeynmanGraph::from_pairs(3, &[(0, 1), (0, 1), (1, 2)], "m", 4);
        assert!(!g.is_one_pi());
        let t = FeynmanGraph::from_pairs(2, &[(0, 1)], "m", 4);
        assert_eq!(t.loops(), 0);
    }
}
