use std::collections::HashMap;

use num_complex::Complex64;

use landau_core::fixtures;
use landau_core::graph::corpus::one_pi_corpus;
use landau_core::renorm::{
    birkhoff, close_registry, physical_limit, random_character, Character, Coefficient, Hopf, LaurentSeries,
    Renormalization, Sampler, Scheme,
};
use landau_core::{Error, RationalFunction};

fn small_corpus() -> Vec<landau_core::graph::FeynmanGraph> {
    one_pi_corpus(3, 4, 2)
}

#[test]
fn products_split_factor_by_factor() {
    let graphs = small_corpus();
    let mut hopf = Hopf::new();
    let keys: Vec<String> = graphs.iter().map(|g| hopf.register(g).unwrap()).collect();
    close_registry(&mut hopf);
    let phi = random_character(&hopf, 5, 8);
    let scheme = Scheme::Minimal;
    let mut r = Renormalization::new(&mut hopf, &phi, &scheme);
    for i in 0..keys.len() {
        for j in i..keys.len() {
            let pair = vec![keys[j].clone(), keys[i].clone()];
            let (minus, plus) = r.split_direct(&pair).unwrap();
            assert!(minus.agrees_on(&r.minus(&pair).unwrap(), -3, 3).unwrap(), "φ_− on pair ({i}, {j})");
            assert!(plus.agrees_on(&r.plus(&pair).unwrap(), -3, 3).unwrap(), "φ_+ on pair ({i}, {j})");
        }
    }
}

#[test]
fn minimal_subtraction_always_has_a_limit() {
    let graphs = small_corpus();
    let mut hopf = Hopf::new();
    for g in &graphs {
        hopf.register(g).unwrap();
    }
    close_registry(&mut hopf);
    let phi = random_character(&hopf, 9, 6);
    for g in &graphs {
        let (minus, plus) = birkhoff(&phi, &Scheme::Minimal, &mut hopf, g).unwrap();
        assert!(physical_limit(&plus).is_ok());
        assert!(minus.terms().all(|(n, _)| *n < 0));
    }
}

/// Numeric samplers that evaluate the exact rational coefficients.
fn sampled(phi: &Character<RationalFunction>, keys: &[String]) -> Character<Sampler> {
    let mut out = Character::new();
    for k in keys {
        let s = phi.get(k).unwrap();
        let coeffs = s.terms().map(|(n, c)| {
            let c = c.clone();
            (*n, Sampler::new(move |p: &HashMap<String, Complex64>| Coefficient::evaluate(&c, p)))
        });
        out.insert(k.clone(), LaurentSeries::new(coeffs.collect::<Vec<_>>(), s.hi()));
    }
    out
}

#[test]
fn sampled_coefficients_follow_the_exact_ones() {
    let g = fixtures::nested_bubble();
    let mut hopf = Hopf::new();
    hopf.register(&g).unwrap();
    close_registry(&mut hopf);
    let keys = hopf.keys().to_vec();
    let phi = random_character(&hopf, 3, 5);
    let numeric = sampled(&phi, &keys);
    let point: HashMap<String, Complex64> = [("m", 0.7), ("p_0", 1.3), ("p_1", -0.4), ("p_2", 0.2), ("p_3", 0.9)]
        .into_iter()
        .map(|(n, v)| (n.to_string(), Complex64::new(v, 0.0)))
        .collect();
    let mu = vec![vec!["2".parse().unwrap(), "1".parse().unwrap(), "0".parse().unwrap(), "0".parse().unwrap()]];
    let mom = Scheme::Momentum { reference: [(2, mu.clone()), (3, mu)].into_iter().collect() };
    for scheme in [Scheme::Minimal, mom] {
        let exact = birkhoff(&phi, &scheme, &mut hopf, &g).unwrap();
        let approx = birkhoff(&numeric, &scheme, &mut hopf, &g).unwrap();
        for (a, b) in [(&exact.0, &approx.0), (&exact.1, &approx.1)] {
            for n in -3..=3 {
                let x = a.coeff(n).unwrap().evaluate(&point).unwrap();
                let y = b.coeff(n).map_or(Complex64::new(0.0, 0.0), |c| c.evaluate(&point).unwrap());
                assert!((x - y).norm() <= 1e-9 * (1.0 + x.norm()), "power {n}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn missing_character_values_are_reported() {
    let mut hopf = Hopf::new();
    let phi: Character<RationalFunction> = Character::new();
    let r = birkhoff(&phi, &Scheme::Minimal, &mut hopf, &fixtures::bubble());
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn momentum_subtraction_refuses_products() {
    let mut hopf = Hopf::new();
    let k = hopf.register(&fixtures::bubble()).unwrap();
    let phi = random_character(&hopf, 1, 3);
    let scheme = Scheme::Momentum { reference: Default::default() };
    let mut r = Renormalization::new(&mut hopf, &phi, &scheme);
    assert!(matches!(r.split_direct(&vec![k.clone(), k]), Err(Error::Scheme(_))));
}
