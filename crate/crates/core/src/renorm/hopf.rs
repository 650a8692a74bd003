//! The graph Hopf algebra: disjoint-union product, divergent-subgraph coproduct, antipode.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{canonical_key, contract_indices, enumerate_divergent_subgraphs, FeynmanGraph};

/// Sorted canonical keys; the empty product is the unit.
pub type Monomial = Vec<String>;

fn product(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m: Monomial = a.iter().chain(b).cloned().collect();
    m.sort();
    m
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, BigRational>, k: K, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let zero = {
        let slot = map.entry(k).or_insert_with(BigRational::zero);
        *slot += c;
        slot.is_zero()
    };
    if zero {
        map.retain(|_, v| !v.is_zero());
    }
}

/// Rational linear combination of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphSum {
    terms: BTreeMap<Monomial, BigRational>,
}

impl GraphSum {
    pub fn zero() -> Self {
        GraphSum::default()
    }

    pub fn unit() -> Self {
        GraphSum::monomial(Vec::new(), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut s = GraphSum::zero();
        s.add_term(m, c);
        s
    }

    pub fn add_term(&mut self, mut m: Monomial, c: BigRational) {
        m.sort();
        accumulate(&mut self.terms, m, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &GraphSum) -> GraphSum {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out.terms, m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> GraphSum {
        let mut out = GraphSum::zero();
        for (m, d) in &self.terms {
            accumulate(&mut out.terms, m.clone(), d * c);
        }
        out
    }

    pub fn mul(&self, other: &GraphSum) -> GraphSum {
        let mut out = GraphSum::zero();
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                accumulate(&mut out.terms, product(a, b), c * d);
            }
        }
        out
    }
}

/// Element of H ⊗ H.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorSum {
    terms: BTreeMap<(Monomial, Monomial), BigRational>,
}

impl TensorSum {
    pub fn add_term(&mut self, mut l: Monomial, mut r: Monomial, c: BigRational) {
        l.sort();
        r.sort();
        accumulate(&mut self.terms, (l, r), c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &TensorSum) -> TensorSum {
        let mut out = TensorSum::default();
        for ((a1, a2), c) in &self.terms {
            for ((b1, b2), d) in &other.terms {
                accumulate(&mut out.terms, (product(a1, b1), product(a2, b2)), c * d);
            }
        }
        out
    }

    /// Drop the primitive part `x ⊗ 1 + 1 ⊗ x`.
    pub fn reduced(&self, x: &Monomial) -> TensorSum {
        let mut x = x.clone();
        x.sort();
        let mut out = self.clone();
        for key in [(x.clone(), Vec::new()), (Vec::new(), x.clone())] {
            if let Some(c) = out.terms.get(&key).cloned() {
                accumulate(&mut out.terms, key, -c);
            }
        }
        out
    }
}

/// Outcome of comparing (Δ ⊗ id)Δ with (id ⊗ Δ)Δ on one graph.
#[derive(Clone, Debug)]
pub struct CoassociativityReport {
    pub terms: usize,
    pub mismatched: usize,
    /// One differing triple, rendered with registry names.
    pub example: Option<String>,
}

impl CoassociativityReport {
    pub fn holds(&self) -> bool {
        self.mismatched == 0
    }
}

/// Registry of basis graphs with memoized coproducts and antipodes.
#[derive(Default)]
pub struct Hopf {
    graphs: HashMap<String, FeynmanGraph>,
    order: Vec<String>,
    coproducts: HashMap<String, TensorSum>,
    antipodes: HashMap<String, GraphSum>,
}

/// Component of a subgraph as a graph in its own right: φ gains one leg per
/// incidence of an edge outside the component.
pub fn component_graph(g: &FeynmanGraph, edges: &[usize]) -> FeynmanGraph {
    let mut external = g.external.clone();
    for (i, e) in g.edges.iter().enumerate() {
        if !edges.contains(&i) {
            external[e.ends.0] += 1;
            external[e.ends.1] += 1;
        }
    }
    let lifted = FeynmanGraph { external, ..g.clone() };
    lifted.edge_subgraph(edges)
}

fn edge_components(g: &FeynmanGraph, edges: &[usize]) -> Vec<Vec<usize>> {
    let sub = g.edge_subgraph(edges);
    let label = sub.components();
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &e) in sorted.iter().enumerate() {
        groups.entry(label[sub.edges[i].ends.0]).or_default().push(e);
    }
    groups.into_values().collect()
}

impl Hopf {
    pub fn new() -> Self {
        Hopf::default()
    }

    /// Key of a 1PI loop graph, recording it as the representative on first sight.
    pub fn register(&mut self, g: &FeynmanGraph) -> Result<String> {
        if g.loops() == 0 || !g.is_one_pi() {
            return Err(Error::NotOnePi);
        }
        let key = canonical_key(g);
        if !self.graphs.contains_key(&key) {
            self.graphs.insert(key.clone(), g.clone());
            self.order.push(key.clone());
        }
        Ok(key)
    }

    pub fn graph(&self, key: &str) -> Option<&FeynmanGraph> {
        self.graphs.get(key)
    }

    /// Short label `G<n>` in order of registration.
    pub fn name(&self, key: &str) -> String {
        match self.order.iter().position(|k| k == key) {
            Some(i) => format!("G{}", i + 1),
            None => key.to_string(),
        }
    }

    pub fn keys(&self) -> &[String] {
        &self.order
    }

    pub fn coproduct(&mut self, g: &FeynmanGraph) -> Result<TensorSum> {
        let key = self.register(g)?;
        Ok(self.coproduct_key(&key))
    }

    /// Δ of a registered graph.
    pub fn coproduct_key(&mut self, key: &str) -> TensorSum {
        if let Some(t) = self.coproducts.get(key) {
            return t.clone();
        }
        let g = self.graphs[key].clone();
        let whole = vec![key.to_string()];
        let mut out = TensorSum::default();
        out.add_term(whole.clone(), Vec::new(), BigRational::one());
        out.add_term(Vec::new(), whole, BigRational::one());
        for gamma in enumerate_divergent_subgraphs(&g) {
            let left: Monomial = edge_components(&g, &gamma)
                .iter()
                .map(|c| self.register(&component_graph(&g, c)).expect("divergent components are 1PI"))
                .collect();
            let quotient = contract_indices(&g, &gamma);
            let right = vec![self.register(&quotient).expect("quotients of 1PI graphs are 1PI")];
            out.add_term(left, right, BigRational::one());
        }
        self.coproducts.insert(key.to_string(), out.clone());
        out
    }

    pub fn coproduct_monomial(&mut self, m: &Monomial) -> TensorSum {
        let mut out = TensorSum::default();
        out.add_term(Vec::new(), Vec::new(), BigRational::one());
        for k in m {
            out = out.mul(&self.coproduct_key(k));
        }
        out
    }

    pub fn coproduct_sum(&mut self, s: &GraphSum) -> TensorSum {
        let mut out = TensorSum::default();
        for (m, c) in s.terms() {
            for ((l, r), d) in self.coproduct_monomial(m).terms() {
                out.add_term(l.clone(), r.clone(), c * d);
            }
        }
        out
    }

    pub fn antipode(&mut self, g: &FeynmanGraph) -> Result<GraphSum> {
        let key = self.register(g)?;
        Ok(self.antipode_key(&key))
    }

    /// S(G) = −G − Σ S(γ)·G/γ over the reduced coproduct.
    pub fn antipode_key(&mut self, key: &str) -> GraphSum {
        if let Some(s) = self.antipodes.get(key) {
            return s.clone();
        }
        let whole = vec![key.to_string()];
        let mut out = GraphSum::monomial(whole.clone(), -BigRational::one());
        let reduced = self.coproduct_key(key).reduced(&whole);
        for ((l, r), c) in reduced.terms() {
            let s = self.antipode_monomial(l);
            let term = s.mul(&GraphSum::monomial(r.clone(), BigRational::one())).scale(&-c);
            out = out.add(&term);
        }
        self.antipodes.insert(key.to_string(), out.clone());
        out
    }

    pub fn antipode_monomial(&mut self, m: &Monomial) -> GraphSum {
        let mut out = GraphSum::unit();
        for k in m {
            out = out.mul(&self.antipode_key(k));
        }
        out
    }

    pub fn antipode_sum(&mut self, s: &GraphSum) -> GraphSum {
        let mut out = GraphSum::zero();
        for (m, c) in s.terms() {
            out = out.add(&self.antipode_monomial(m).scale(c));
        }
        out
    }

    pub fn coassociativity(&mut self, g: &FeynmanGraph) -> Result<CoassociativityReport> {
        let key = self.register(g)?;
        let delta = self.coproduct_key(&key);
        let mut left: BTreeMap<(Monomial, Monomial, Monomial), BigRational> = BTreeMap::new();
        let mut right = left.clone();
        for ((a, b), c) in delta.terms() {
            for ((a1, a2), d) in self.coproduct_monomial(a).terms() {
                accumulate(&mut left, (a1.clone(), a2.clone(), b.clone()), c * d);
            }
            for ((b1, b2), d) in self.coproduct_monomial(b).terms() {
                accumulate(&mut right, (a.clone(), b1.clone(), b2.clone()), c * d);
            }
        }
        let mut diff = left.clone();
        for (k, c) in &right {
            accumulate(&mut diff, k.clone(), -c.clone());
        }
        let example = diff.iter().next().map(|((x, y, z), c)| {
            format!("{c} * {} ⊗ {} ⊗ {}", self.render(x), self.render(y), self.render(z))
        });
        Ok(CoassociativityReport { terms: left.len().max(right.len()), mismatched: diff.len(), example })
    }

    /// m(S ⊗ id)Δ(G) and m(id ⊗ S)Δ(G); both vanish for G in the augmentation ideal.
    pub fn antipode_axiom(&mut self, g: &FeynmanGraph) -> Result<(GraphSum, GraphSum)> {
        let key = self.register(g)?;
        let delta = self.coproduct_key(&key);
        let mut left = GraphSum::zero();
        let mut right = GraphSum::zero();
        for ((a, b), c) in delta.terms() {
            let one_b = GraphSum::monomial(b.clone(), c.clone());
            left = left.add(&self.antipode_monomial(a).mul(&one_b));
            let one_a = GraphSum::monomial(a.clone(), c.clone());
            right = right.add(&one_a.mul(&self.antipode_monomial(b)));
        }
        Ok((left, right))
    }

    /// `1`, `G3` or `G1*G2`.
    pub fn render(&self, m: &Monomial) -> String {
        if m.is_empty() {
            return "1".into();
        }
        m.iter().map(|k| self.name(k)).collect::<Vec<_>>().join("*")
    }

    pub fn render_sum(&self, s: &GraphSum) -> String {
        render_terms(s.terms().map(|(m, c)| (self.render(m), c)))
    }

    /// Primitive part first: `x ⊗ 1`, then `1 ⊗ x`, then the rest in key order.
    pub fn render_tensor(&self, t: &TensorSum) -> String {
        let mut terms: Vec<_> = t.terms().collect();
        terms.sort_by_key(|((l, r), _)| match (l.is_empty(), r.is_empty()) {
            (false, true) => 0,
            (true, false) => 1,
            _ => 2,
        });
        render_terms(terms.into_iter().map(|((l, r), c)| (format!("{} ⊗ {}", self.render(l), self.render(r)), c)))
    }

    /// `G1 = <key>` lines for every registered graph.
    pub fn legend(&self) -> String {
        self.order.iter().map(|k| format!("{} = {}\n", self.name(k), k)).collect()
    }
}

fn render_terms<'a>(terms: impl Iterator<Item = (String, &'a BigRational)>) -> String {
    let mut out = String::new();
    for (body, c) in terms {
        let neg = c < &BigRational::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&format!("{mag}*"));
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for GraphSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = render_terms(self.terms().map(|(m, c)| (if m.is_empty() { "1".into() } else { m.join("*") }, c)));
        f.write_str(&s)
    }
}
