use landau_core::graph::corpus::{connected_multigraphs, one_pi_corpus};
use landau_core::graph::{
    build_routing, build_routing_default, contract_indices, enumerate_divergent_subgraphs, FeynmanGraph, Routing,
};
use landau_core::symbolic::{parse_with_vars, vars_of};

fn every_base(g: &FeynmanGraph) -> impl Iterator<Item = Routing> + '_ {
    (0..g.num_vertices()).map(|b| build_routing(g, b).unwrap())
}

#[test]
fn momentum_is_conserved_away_from_the_base() {
    let corpus = connected_multigraphs(4, 6);
    assert!(corpus.len() > 100);
    for g in &corpus {
        for r in every_base(g) {
            for v in (0..g.num_vertices()).filter(|&v| v != r.base) {
                let (k, p) = r.conservation_at(v);
                assert!(k.iter().chain(&p).all(|&c| c == 0), "vertex {v} of {:?}", g.edges);
            }
        }
    }
}

/// (K_e + P_e)² as a polynomial in one component of every momentum.
fn squared_momentum(r: &Routing, e: usize) -> landau_core::Polynomial {
    let mut names = r.loop_names.clone();
    names.extend(r.external_names.iter().cloned());
    let vars = vars_of(&names);
    parse_with_vars(&r.momentum_text(e), &vars).unwrap().pow(2)
}

#[test]
fn flipping_an_edge_keeps_every_propagator() {
    for g in &connected_multigraphs(3, 5) {
        let r = build_routing_default(g).unwrap();
        for e in 0..g.num_edges() {
            let f = r.flipped(e);
            assert_eq!(f.flipped(e), r);
            for d in 0..g.num_edges() {
                assert_eq!(squared_momentum(&f, d), squared_momentum(&r, d));
            }
            for v in (0..g.num_vertices()).filter(|&v| v != r.base) {
                let (k, p) = f.conservation_at(v);
                assert!(k.iter().chain(&p).all(|&c| c == 0));
            }
        }
    }
}

#[test]
fn loops_split_between_subgraph_and_quotient() {
    let mut checked = 0;
    for g in &one_pi_corpus(4, 6, 3) {
        for gamma in enumerate_divergent_subgraphs(g) {
            let sub = g.edge_subgraph(&gamma);
            let quotient = contract_indices(g, &gamma);
            assert_eq!(sub.loops() + quotient.loops(), g.loops());
            assert_eq!(quotient.num_edges() + gamma.len(), g.num_edges());
            assert_eq!(quotient.external_total(), g.external_total());
            checked += 1;
        }
    }
    assert!(checked > 20, "only {checked} subgraphs");
}

#[test]
fn loop_count_matches_the_routing() {
    for g in &connected_multigraphs(4, 6) {
        let r = build_routing_default(g).unwrap();
        assert_eq!(r.num_loops(), g.loops());
        assert_eq!(r.chords.len(), g.loops());
        assert_eq!(r.tree.iter().filter(|&&t| t).count(), g.num_vertices() - 1);
    }
}
