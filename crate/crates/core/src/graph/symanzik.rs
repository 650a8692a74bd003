use super::{FeynmanGraph, Routing};
use crate::error::{Error, Result};
use crate::symbolic::{vars_of, Matrix, Monomial, PolyMatrix, Polynomial, Vars};
use crate::GaussianRational;
use num_traits::One;

/// `alpha1 … alphaN`, one per edge.
pub fn symanzik_vars(g: &FeynmanGraph) -> Vars {
    let names: Vec<String> = (1..=g.num_edges()).map(|i| format!("alpha{i}")).collect();
    vars_of(&names)
}

/// All spanning trees as sorted edge-index lists (lexicographic order).
pub fn spanning_trees(g: &FeynmanGraph) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut chosen = Vec::new();
    let mut uf: Vec<usize> = (0..n).collect();
    rec(g, 0, n - 1, &mut chosen, &mut uf, &mut out);
    out
}

fn find(uf: &[usize], mut x: usize) -> usize {
    while uf[x] != x {
        x = uf[x];
    }
    x
}

fn rec(g: &FeynmanGraph, next: usize, need: usize, chosen: &mut Vec<usize>, uf: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if chosen.len() == need {
        out.push(chosen.clone());
        return;
    }
    if g.num_edges() - next < need - chosen.len() {
        return;
    }
    let (a, b) = g.edges[next].ends;
    let (ra, rb) = (find(uf, a), find(uf, b));
    if ra != rb {
        let saved = uf.clone();
        uf[ra] = rb;
        chosen.push(next);
        rec(g, next + 1, need, chosen, uf, out);
        chosen.pop();
        *uf = saved;
    }
    rec(g, next + 1, need, chosen, uf, out);
}

/// 𝒰_G = Σ_T Π_{e∉T} α_e over spanning trees.
pub fn symanzik_first(g: &FeynmanGraph) -> Result<Polynomial> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let vars = symanzik_vars(g);
    let terms = spanning_trees(g).into_iter().map(|t| {
        let mut e = vec![1u32; g.num_edges()];
        for i in t {
            e[i] = 0;
        }
        (Monomial(e), GaussianRational::one())
    });
    Ok(Polynomial::from_terms(&vars, terms))
}

/// h1×h1 matrix Σ_e α_e c_j^{(e)} c_l^{(e)} from the routing's loop coefficients.
pub fn loop_gram_matrix(g: &FeynmanGraph, r: &Routing) -> PolyMatrix {
    let vars = symanzik_vars(g);
    let h = r.num_loops();
    Matrix::from_fn(h, h, |j, l| {
        let mut acc = Polynomial::zero(&vars);
        for e in 0..g.num_edges() {
            let c = r.internal[e][j] * r.internal[e][l];
            if c != 0 {
                acc = &acc + &Polynomial::variable(&vars, e).scale(&GaussianRational::from_int(c as i64));
            }
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_routing_default;
    use crate::symbolic::parse_with_vars;

    #[test]
    fn small_examples() {
        let bubble = FeynmanGraph::from_pairs(2, &[(0, 1), (0, 1)], "m", 4);
        let v = symanzik_vars(&bubble);
        assert_eq!(symanzik_first(&bubble).unwrap(), parse_with_vars("alpha1 + alpha2", &v).unwrap());
        let sunrise = FeynmanGraph::from_pairs(2, &[(0, 1), (0, 1), (0, 1)], "m", 4);
        let v = symanzik_vars(&sunrise);
        let u = symanzik_first(&sunrise).unwrap();
        assert_eq!(u.to_string(), "alpha1*alpha2 + alpha1*alpha3 + alpha2*alpha3");
        let r = build_routing_default(&sunrise).unwrap();
        assert_eq!(loop_gram_matrix(&sunrise, &r).determinant(&v).unwrap(), u);
        let tree = FeynmanGraph::from_pairs(2, &[(0, 1)], "m", 4);
        assert!(symanzik_first(&tree).unwrap().to_string() == "1");
    }
}
