//! Characters, subtraction schemes and the Bogoliubov recursion.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hopf::{Hopf, Monomial};
use super::laurent::{Coefficient, LaurentSeries};
use crate::error::{Error, Result};
use crate::graph::FeynmanGraph;
use crate::symbolic::{vars_of, GaussianRational, Polynomial, RationalFunction};

/// Algebra morphism H → Laurent series, given on single graphs.
#[derive(Clone, Debug)]
pub struct Character<C> {
    values: HashMap<String, LaurentSeries<C>>,
}

impl<C: Coefficient> Default for Character<C> {
    fn default() -> Self {
        Character { values: HashMap::new() }
    }
}

impl<C: Coefficient> Character<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: String, s: LaurentSeries<C>) {
        self.values.insert(key, s);
    }

    pub fn get(&self, key: &str) -> Result<&LaurentSeries<C>> {
        self.values
            .get(key)
            .ok_or_else(|| Error::Precondition(format!("character has no value for graph {key}")))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiplicative extension; the unit maps to 1.
    pub fn eval(&self, m: &Monomial) -> Result<LaurentSeries<C>> {
        let mut out = LaurentSeries::one();
        for k in m {
            out = out.mul(self.get(k)?);
        }
        Ok(out)
    }
}

/// Subtraction scheme R.
#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    /// Principal part in ε.
    Minimal,
    /// Evaluation at reference momenta μ_N, keyed by the number of external legs N.
    Momentum { reference: BTreeMap<u32, Vec<Vec<GaussianRational>>> },
}

/// External momentum components of a graph: `p_0..` for one independent
/// momentum, `p1_0.., p2_0..` for several. The count is the number of
/// vertices with legs, minus one.
pub fn momentum_symbols(g: &FeynmanGraph) -> Vec<Vec<String>> {
    let legs = g.external.iter().filter(|&&c| c > 0).count();
    let r = legs.saturating_sub(1);
    let d = g.dimension as usize;
    let names: Vec<String> = if r == 1 { vec!["p".into()] } else { (1..=r).map(|i| format!("p{i}")).collect() };
    names.iter().map(|n| (0..d).map(|mu| format!("{n}_{mu}")).collect()).collect()
}

impl Scheme {
    /// Symbol values substituted by R_MOM on `g`.
    pub fn reference_point(&self, g: &FeynmanGraph) -> Result<Vec<(String, GaussianRational)>> {
        let Scheme::Momentum { reference } = self else {
            return Ok(Vec::new());
        };
        let n = g.external_total();
        let mu = reference
            .get(&n)
            .ok_or_else(|| Error::Scheme(format!("no reference momenta for {n} external legs")))?;
        let symbols = momentum_symbols(g);
        if mu.len() < symbols.len() {
            return Err(Error::Scheme(format!(
                "{} reference momenta for {n} legs, graph needs {}",
                mu.len(),
                symbols.len()
            )));
        }
        let mut out = Vec::new();
        for (names, v) in symbols.iter().zip(mu) {
            if v.len() != names.len() {
                return Err(Error::Scheme(format!("reference momentum has {} components, D = {}", v.len(), names.len())));
            }
            out.extend(names.iter().cloned().zip(v.iter().cloned()));
        }
        Ok(out)
    }

    /// R applied to φ̄(G).
    pub fn apply<C: Coefficient>(&self, g: &FeynmanGraph, s: &LaurentSeries<C>) -> Result<LaurentSeries<C>> {
        match self {
            Scheme::Minimal => s.principal_part(),
            Scheme::Momentum { .. } => {
                if !g.omega().is_zero() {
                    return Err(Error::Scheme(format!(
                        "momentum subtraction needs a logarithmically divergent graph, ω = {}",
                        g.omega()
                    )));
                }
                let point = self.reference_point(g)?;
                s.map_coefficients(|c| c.restrict(&point))
            }
        }
    }

    /// Whether R_MOM is defined on every graph the recursion for `key` visits.
    pub fn covers(&self, hopf: &mut Hopf, key: &str) -> bool {
        if matches!(self, Scheme::Minimal) {
            return true;
        }
        let whole = vec![key.to_string()];
        let g = hopf.graph(key).expect("registered").clone();
        if self.reference_point(&g).is_err() || !g.omega().is_zero() {
            return false;
        }
        let reduced = hopf.coproduct_key(key).reduced(&whole);
        let subs: Vec<String> = reduced.terms().flat_map(|((l, _), _)| l.clone()).collect();
        subs.iter().all(|k| self.covers(hopf, k))
    }
}

/// Birkhoff factors φ_± computed by the Bogoliubov recursion, memoized per monomial.
pub struct Renormalization<'a, C> {
    hopf: &'a mut Hopf,
    phi: &'a Character<C>,
    scheme: &'a Scheme,
    memo: HashMap<Monomial, (LaurentSeries<C>, LaurentSeries<C>)>,
}

impl<'a, C: Coefficient> Renormalization<'a, C> {
    pub fn new(hopf: &'a mut Hopf, phi: &'a Character<C>, scheme: &'a Scheme) -> Self {
        Renormalization { hopf, phi, scheme, memo: HashMap::new() }
    }

    pub fn hopf(&mut self) -> &mut Hopf {
        self.hopf
    }

    /// Bogoliubov map φ̄(x) = φ(x) + Σ φ_−(x')·φ(x'') over the reduced coproduct.
    fn bar(&mut self, x: &Monomial, multiplicative: bool) -> Result<LaurentSeries<C>> {
        let mut out = self.phi.eval(x)?;
        let reduced = self.hopf.coproduct_monomial(x).reduced(x);
        for ((l, r), c) in reduced.terms() {
            let minus = if multiplicative { self.minus(l)? } else { self.split_direct(l)?.0 };
            out = out.add(&minus.mul(&self.phi.eval(r)?).scale(c));
        }
        Ok(out)
    }

    /// (φ_−(G), φ_+(G)) for a single graph.
    pub fn split(&mut self, key: &str) -> Result<(LaurentSeries<C>, LaurentSeries<C>)> {
        let x = vec![key.to_string()];
        if let Some(v) = self.memo.get(&x) {
            return Ok(v.clone());
        }
        let bar = self.bar(&x, true)?;
        let g = self.hopf.graph(key).expect("registered").clone();
        let minus = self.scheme.apply(&g, &bar)?.neg();
        let plus = bar.add(&minus);
        self.memo.insert(x, (minus.clone(), plus.clone()));
        Ok((minus, plus))
    }

    /// φ_− extended multiplicatively.
    pub fn minus(&mut self, m: &Monomial) -> Result<LaurentSeries<C>> {
        let mut out = LaurentSeries::one();
        for k in m {
            out = out.mul(&self.split(k)?.0);
        }
        Ok(out)
    }

    pub fn plus(&mut self, m: &Monomial) -> Result<LaurentSeries<C>> {
        let mut out = LaurentSeries::one();
        for k in m {
            out = out.mul(&self.split(k)?.1);
        }
        Ok(out)
    }

    /// The recursion run on a product itself rather than factor by factor.
    pub fn split_direct(&mut self, m: &Monomial) -> Result<(LaurentSeries<C>, LaurentSeries<C>)> {
        let mut m = m.clone();
        m.sort();
        let m = &m;
        if m.is_empty() {
            return Ok((LaurentSeries::one(), LaurentSeries::one()));
        }
        if m.len() == 1 {
            return self.split(&m[0]);
        }
        if !matches!(self.scheme, Scheme::Minimal) {
            return Err(Error::Scheme("momentum subtraction is defined on single graphs only".into()));
        }
        if let Some(v) = self.memo.get(m) {
            return Ok(v.clone());
        }
        let bar = self.bar(m, false)?;
        let minus = bar.principal_part()?.neg();
        let plus = bar.add(&minus);
        self.memo.insert(m.clone(), (minus.clone(), plus.clone()));
        Ok((minus, plus))
    }

    /// φ_−^{⋆−1}(x) = φ_−(S(x)).
    pub fn inverse_minus(&mut self, m: &Monomial) -> Result<LaurentSeries<C>> {
        let s = self.hopf.antipode_monomial(m);
        let mut out = LaurentSeries::zero();
        for (t, c) in s.terms() {
            out = out.add(&self.minus(t)?.scale(c));
        }
        Ok(out)
    }

    /// (φ_−^{⋆−1} ⋆ φ_+)(G), which reproduces φ(G).
    pub fn recombine(&mut self, key: &str) -> Result<LaurentSeries<C>> {
        let delta = self.hopf.coproduct_key(key);
        let mut out = LaurentSeries::zero();
        for ((l, r), c) in delta.terms() {
            let a = self.inverse_minus(l)?;
            let b = self.plus(r)?;
            out = out.add(&a.mul(&b).scale(c));
        }
        Ok(out)
    }
}

/// φ_− and φ_+ of one graph.
pub fn birkhoff<C: Coefficient>(
    phi: &Character<C>,
    scheme: &Scheme,
    hopf: &mut Hopf,
    g: &FeynmanGraph,
) -> Result<(LaurentSeries<C>, LaurentSeries<C>)> {
    let key = hopf.register(g)?;
    Renormalization::new(hopf, phi, scheme).split(&key)
}

/// Register every graph reachable through iterated coproducts of the registered ones.
pub fn close_registry(hopf: &mut Hopf) {
    let mut i = 0;
    while i < hopf.keys().len() {
        let k = hopf.keys()[i].clone();
        hopf.coproduct_key(&k);
        i += 1;
    }
}

/// Seeded random character on every registered graph: coefficients of ε^{−h1}..ε^{hi}
/// are small-integer combinations of 1, squared masses and squared momentum
/// components, half of them over (m² + 1).
pub fn random_character(hopf: &Hopf, seed: u64, hi: i32) -> Character<RationalFunction> {
    let mut names: Vec<String> = Vec::new();
    for k in hopf.keys() {
        let g = hopf.graph(k).expect("registered");
        for n in g.mass_symbols().into_iter().chain(momentum_symbols(g).into_iter().flatten()) {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    let vars = vars_of(&names);
    let var = |n: &str| Polynomial::var(&vars, n).expect("declared");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi = Character::new();
    for k in hopf.keys() {
        let g = hopf.graph(k).expect("registered");
        let masses = g.mass_symbols();
        let momenta = momentum_symbols(g);
        let mut series = Vec::new();
        for n in -(g.loops() as i32)..=hi {
            let mut num = Polynomial::from_int(&vars, rng.random_range(-3..=3));
            for m in &masses {
                let c = rng.random_range(-2..=2);
                num = &num + &var(m).pow(2).scale(&GaussianRational::from_int(c));
            }
            for q in &momenta {
                let (a, b) = (rng.random_range(-2..=2), rng.random_range(-2..=2));
                let term = &var(&q[0]).pow(2).scale(&GaussianRational::from_int(a)) + &var(&q[1]).scale(&GaussianRational::from_int(b));
                num = &num + &term;
            }
            let den = if rng.random_bool(0.5) && !masses.is_empty() {
                &var(&masses[0]).pow(2) + &Polynomial::one(&vars)
            } else {
                Polynomial::one(&vars)
            };
            series.push((n, RationalFunction::new(num, den).expect("nonzero denominator")));
        }
        phi.insert(k.clone(), LaurentSeries::new(series, Some(hi)));
    }
    phi
}

/// Scalar multiple of the unit, used for hand-written characters.
pub fn constant_series(coeffs: &[(i32, i64)]) -> LaurentSeries<RationalFunction> {
    LaurentSeries::exact(coeffs.iter().map(|&(n, c)| {
        (n, <RationalFunction as Coefficient>::one().scale(&GaussianRational::real(BigRational::from_integer(c.into()))))
    }))
}
