//! Quadratic families zᵀM(t)z + 2a(t)ᵀz + b(t), homogenization and exact definiteness.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_routing_default, FeynmanGraph, Routing};
use crate::symbolic::{parse_with_vars, vars_of, ExactMatrix, Matrix, Monomial, PolyMatrix, Polynomial, Vars};
use crate::GaussianRational;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticFamily {
    pub coords: Vec<String>,
    pub params: Vars,
    /// Symmetric n×n, entries polynomial in `params`.
    pub m: PolyMatrix,
    pub a: Vec<Polynomial>,
    pub b: Polynomial,
    pub exponent: GaussianRational,
}

impl QuadraticFamily {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Coordinates followed by parameters.
    pub fn all_vars(&self) -> Vars {
        let mut names = self.coords.clone();
        names.extend(self.params.iter().cloned());
        vars_of(&names)
    }

    /// Split a polynomial of degree ≤ 2 in `coords` into (M, a, b).
    pub fn from_polynomial(q: &Polynomial, coords: &[String], params: &Vars, exponent: GaussianRational) -> Result<Self> {
        let mut names = coords.to_vec();
        names.extend(params.iter().cloned());
        let all = vars_of(&names);
        let q = q.with_vars(&all)?;
        let n = coords.len();
        let zero = Polynomial::zero(params);
        let mut m = Matrix::from_fn(n, n, |_, _| zero.clone());
        let mut a = vec![zero.clone(); n];
        let mut b = zero.clone();
        let half = GaussianRational::from_frac(1, 2);
        for (mono, c) in q.terms() {
            let (zpart, tpart) = mono.0.split_at(n);
            let coeff = Polynomial::monomial(params, Monomial(tpart.to_vec()), c.clone());
            let deg: u32 = zpart.iter().sum();
            let nz: Vec<usize> = (0..n).filter(|&i| zpart[i] > 0).collect();
            match (deg, nz.as_slice()) {
                (0, _) => b = &b + &coeff,
                (1, [i]) => a[*i] = &a[*i] + &coeff.scale(&half),
                (2, [i]) => {
                    let v = m.get(*i, *i) + &coeff;
                    m.set(*i, *i, v);
                }
                (2, [i, j]) => {
                    let h = coeff.scale(&half);
                    let v = m.get(*i, *j) + &h;
                    m.set(*i, *j, v.clone());
                    m.set(*j, *i, v);
                }
                _ => return Err(Error::Invalid(format!("'{q}' has degree {deg} > 2 in the integration variables"))),
            }
        }
        Ok(QuadraticFamily { coords: coords.to_vec(), params: params.clone(), m, a, b, exponent })
    }

    /// zᵀMz + 2aᵀz + b over `all_vars()`.
    pub fn to_polynomial(&self) -> Polynomial {
        let all = self.all_vars();
        let z: Vec<Polynomial> = (0..self.n()).map(|i| Polynomial::variable(&all, i)).collect();
        let lift = |p: &Polynomial| p.with_vars(&all).expect("parameters embed");
        let mut acc = lift(&self.b);
        for i in 0..self.n() {
            if !self.a[i].is_zero() {
                acc = &acc + &(&lift(&self.a[i]) * &z[i]).scale(&GaussianRational::from_int(2));
            }
            for j in 0..self.n() {
                let mij = self.m.get(i, j);
                if !mij.is_zero() {
                    acc = &acc + &(&(&lift(mij) * &z[i]) * &z[j]);
                }
            }
        }
        acc
    }

    pub fn is_form(&self) -> bool {
        self.b.is_zero() && self.a.iter().all(Polynomial::is_zero)
    }

    /// Bordered pure form ((b, aᵀ), (a, M)) in (aux, z).
    pub fn homogenize(&self, aux: &str) -> QuadraticFamily {
        let n = self.n();
        let zero = Polynomial::zero(&self.params);
        let m = Matrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
            (0, 0) => self.b.clone(),
            (0, j) => self.a[j - 1].clone(),
            (i, 0) => self.a[i - 1].clone(),
            (i, j) => self.m.get(i - 1, j - 1).clone(),
        });
        let mut coords = vec![aux.to_string()];
        coords.extend(self.coords.iter().cloned());
        QuadraticFamily { coords, params: self.params.clone(), m, a: vec![zero.clone(); n + 1], b: zero, exponent: self.exponent.clone() }
    }

    /// M(t*) for a full exact parameter assignment.
    pub fn matrix_at(&self, point: &[(String, GaussianRational)]) -> Result<ExactMatrix> {
        let assignment: Vec<(usize, GaussianRational)> = point
            .iter()
            .filter_map(|(name, v)| self.params.iter().position(|p| p == name).map(|i| (i, v.clone())))
            .collect();
        let sub = self.m.substitute(&assignment);
        sub.to_exact().ok_or_else(|| {
            let missing: Vec<&String> =
                self.params.iter().filter(|p| !point.iter().any(|(n, _)| n == *p)).collect();
            Error::Invalid(format!("point leaves parameters unassigned: {missing:?}"))
        })
    }
}

/// Regular / quasi-regular verdict at an exact parameter point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Regular,
    QuasiRegular,
    Neither { reason: String },
}

fn real_part_if_real(m: &ExactMatrix) -> Option<Matrix<BigRational>> {
    if m.entries().iter().all(GaussianRational::is_real) {
        Some(m.map(|x| x.re.clone()))
    } else {
        None
    }
}

fn rational_det(m: &Matrix<BigRational>) -> BigRational {
    let g = m.map(|x| GaussianRational::real(x.clone()));
    g.determinant_with(&GaussianRational::one()).expect("square").re
}

/// Leading principal minors all positive (Sylvester). Entries must be real.
pub fn is_positive_definite(m: &ExactMatrix) -> bool {
    let Some(r) = real_part_if_real(m) else { return false };
    if !m.is_symmetric() {
        return false;
    }
    (1..=r.rows()).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        rational_det(&r.submatrix(&idx, &idx)).is_positive()
    })
}

/// All principal minors nonnegative. Entries must be real.
pub fn is_positive_semidefinite(m: &ExactMatrix) -> bool {
    let Some(r) = real_part_if_real(m) else { return false };
    if !m.is_symmetric() {
        return false;
    }
    let n = r.rows();
    assert!(n < 25, "principal-minor enumeration limited to 24×24");
    (1u32..(1u32 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        !rational_det(&r.submatrix(&idx, &idx)).is_negative()
    })
}

pub fn classify_point(forms: &[QuadraticFamily], point: &[(String, GaussianRational)]) -> Result<Classification> {
    let mut all_pd = true;
    for (i, f) in forms.iter().enumerate() {
        let m = f.matrix_at(point)?;
        if !m.entries().iter().all(GaussianRational::is_real) {
            return Ok(Classification::Neither { reason: format!("form {} has a non-real matrix at the point", i + 1) });
        }
        if is_positive_definite(&m) {
            continue;
        }
        all_pd = false;
        if !is_positive_semidefinite(&m) {
            return Ok(Classification::Neither { reason: format!("form {} is not positive semi-definite", i + 1) });
        }
    }
    Ok(if all_pd { Classification::Regular } else { Classification::QuasiRegular })
}

/// Names of the D components of a vector symbol, e.g. `k_0 … k_3`.
pub fn components(name: &str, dimension: u32) -> Vec<String> {
    (0..dimension).map(|i| format!("{name}_{i}")).collect()
}

/// Data tying a projective integral back to its Feynman graph.
#[derive(Clone, Debug, PartialEq)]
pub struct FeynmanOrigin {
    pub graph: FeynmanGraph,
    pub routing: Routing,
    /// Per loop momentum, its component coordinate names.
    pub loop_components: Vec<Vec<String>>,
    /// Per external momentum, its component parameter names.
    pub external_components: Vec<Vec<String>>,
    pub masses: Vec<String>,
}

/// Q_e = (K_e + P_e)² + m_e² with the all-plus square, one family per edge.
pub fn propagators_from_routing(g: &FeynmanGraph, r: &Routing) -> Result<(Vec<QuadraticFamily>, FeynmanOrigin)> {
    if r.orientation.len() != g.num_edges() {
        return Err(Error::Invalid("routing does not match graph".into()));
    }
    let d = g.dimension;
    let loop_components: Vec<Vec<String>> = r.loop_names.iter().map(|k| components(k, d)).collect();
    let external_components: Vec<Vec<String>> = r.external_names.iter().map(|p| components(p, d)).collect();
    let masses = g.mass_symbols();
    let coords: Vec<String> = loop_components.concat();
    let mut params_names: Vec<String> = external_components.concat();
    for m in &masses {
        if coords.contains(m) || params_names.contains(m) {
            return Err(Error::Invalid(format!("mass symbol '{m}' collides with a momentum component")));
        }
        params_names.push(m.clone());
    }
    let params = vars_of(&params_names);
    let mut all_names = coords.clone();
    all_names.extend(params_names.iter().cloned());
    let all = vars_of(&all_names);
    let mut out = Vec::with_capacity(g.num_edges());
    for (e, edge) in g.edges.iter().enumerate() {
        let mut q = Polynomial::zero(&all);
        for mu in 0..d as usize {
            let mut comp = Polynomial::zero(&all);
            for (i, &c) in r.internal[e].iter().enumerate() {
                if c != 0 {
                    let v = Polynomial::var(&all, &loop_components[i][mu])?;
                    comp = &comp + &v.scale(&GaussianRational::from_int(c as i64));
                }
            }
            for (j, &c) in r.external[e].iter().enumerate() {
                if c != 0 {
                    let v = Polynomial::var(&all, &external_components[j][mu])?;
                    comp = &comp + &v.scale(&GaussianRational::from_int(c as i64));
                }
            }
            q = &q + &(&comp * &comp);
        }
        let m = Polynomial::var(&all, &edge.mass)?;
        q = &q + &(&m * &m);
        out.push(QuadraticFamily::from_polynomial(&q, &coords, &params, edge.exponent.clone())?);
    }
    let origin = FeynmanOrigin { graph: g.clone(), routing: r.clone(), loop_components, external_components, masses };
    Ok((out, origin))
}

/// Projective quadratic integral: homogenized forms sharing (aux, z) and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveIntegral {
    pub aux: String,
    /// Projective coordinates; `coords[0]` is the auxiliary variable.
    pub coords: Vec<String>,
    pub params: Vars,
    pub forms: Vec<QuadraticFamily>,
    /// Degree of an additional numerator polynomial, bookkeeping only.
    pub numerator_degree: u32,
    pub origin: Option<FeynmanOrigin>,
}

impl ProjectiveIntegral {
    pub fn from_families(families: &[QuadraticFamily], aux: &str, numerator_degree: u32) -> Result<Self> {
        let first = families.first().ok_or_else(|| Error::Invalid("no quadrics given".into()))?;
        if families.iter().any(|f| f.coords != first.coords || f.params != first.params) {
            return Err(Error::Invalid("quadrics use different variable lists".into()));
        }
        if first.coords.iter().any(|c| c == aux) || first.params.iter().any(|c| c == aux) {
            return Err(Error::Invalid(format!("auxiliary variable '{aux}' is already in use")));
        }
        let forms: Vec<QuadraticFamily> = families.iter().map(|f| f.homogenize(aux)).collect();
        Ok(ProjectiveIntegral {
            aux: aux.to_string(),
            coords: forms[0].coords.clone(),
            params: first.params.clone(),
            forms,
            numerator_degree,
            origin: None,
        })
    }

    /// Wick-rotated Feynman integral of a connected graph, routed at its last vertex.
    pub fn from_graph(g: &FeynmanGraph) -> Result<Self> {
        let r = build_routing_default(g)?;
        let (fams, origin) = propagators_from_routing(g, &r)?;
        if fams.is_empty() {
            return Err(Error::Invalid("graph has no edges".into()));
        }
        let mut out = Self::from_families(&fams, "u", 0)?;
        out.origin = Some(origin);
        Ok(out)
    }

    /// Exponent of u in the projectivized numerator: 2Σλ − n − 1 − deg p (n = affine dimension).
    pub fn numerator_exponent(&self) -> GaussianRational {
        let two_sum = self.forms.iter().fold(GaussianRational::zero(), |acc, f| &acc + &f.exponent);
        let n = self.coords.len() as i64 - 1;
        &(&two_sum * &GaussianRational::from_int(2)) - &GaussianRational::from_int(n + 1 + self.numerator_degree as i64)
    }

    /// Coordinates followed by parameters.
    pub fn all_vars(&self) -> Vars {
        self.forms[0].all_vars()
    }

    pub fn form_polynomials(&self) -> Vec<Polynomial> {
        self.forms.iter().map(QuadraticFamily::to_polynomial).collect()
    }

    pub fn classify(&self, point: &[(String, GaussianRational)]) -> Result<Classification> {
        classify_point(&self.forms, point)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadricEntry {
    pub poly: String,
    #[serde(default = "one_string")]
    pub exponent: String,
}

fn one_string() -> String {
    "1".into()
}

fn default_aux() -> String {
    "u".into()
}

/// On-disk description of a non-graph quadric family.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadricFile {
    pub variables: Vec<String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default = "default_aux")]
    pub aux: String,
    pub quadrics: Vec<QuadricEntry>,
    #[serde(default)]
    pub numerator_degree: u32,
    /// Quadrics are already forms in (aux, variables).
    #[serde(default)]
    pub homogeneous: bool,
}

impl QuadricFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::graph::json_error(text, &e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("quadric file serializes")
    }

    pub fn into_integral(&self) -> Result<ProjectiveIntegral> {
        let params = vars_of(&self.parameters);
        let mut names: Vec<String> = Vec::new();
        if self.homogeneous {
            names.push(self.aux.clone());
        }
        names.extend(self.variables.iter().cloned());
        let mut seen = BTreeMap::new();
        for n in names.iter().chain(self.parameters.iter()) {
            if seen.insert(n.clone(), ()).is_some() {
                return Err(Error::Invalid(format!("symbol '{n}' declared twice")));
            }
        }
        let mut all = names.clone();
        all.extend(self.parameters.iter().cloned());
        let all = vars_of(&all);
        let mut fams = Vec::new();
        for q in &self.quadrics {
            let p = parse_with_vars(&q.poly, &all)?;
            let exponent: GaussianRational = q.exponent.parse()?;
            fams.push(QuadraticFamily::from_polynomial(&p, &names, &params, exponent)?);
        }
        if self.homogeneous {
            if let Some(f) = fams.iter().find(|f| !f.is_form()) {
                return Err(Error::Invalid(format!("'{}' is not a quadratic form", f.to_polynomial())));
            }
            if fams.is_empty() {
                return Err(Error::Invalid("no quadrics given".into()));
            }
            return Ok(ProjectiveIntegral {
                aux: self.aux.clone(),
                coords: names,
                params,
                forms: fams,
                numerator_degree: self.numerator_degree,
                origin: None,
            });
        }
        ProjectiveIntegral::from_families(&fams, &self.aux, self.numerator_degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_polynomial;

    fn simple() -> ProjectiveIntegral {
        QuadricFile::from_json(r#"{"variables":["z1"],"parameters":["t"],"aux":"z0","quadrics":[{"poly":"z1^2 + t^2"}]}"#)
            .unwrap()
            .into_integral()
            .unwrap()
    }

    #[test]
    fn homogenize_simple() {
        let i = simple();
        let p = i.forms[0].to_polynomial();
        assert_eq!(p, parse_polynomial("t^2*z0^2 + z1^2", &["z0", "z1", "t"]).unwrap());
        assert_eq!(p.to_string(), "z0^2*t^2 + z1^2");
    }

    #[test]
    fn classification_of_simple() {
        let i = simple();
        let at = |t: i64| vec![("t".to_string(), GaussianRational::from_int(t))];
        assert_eq!(i.classify(&at(1)).unwrap(), Classification::Regular);
        assert_eq!(i.classify(&at(0)).unwrap(), Classification::QuasiRegular);
        let c = i.classify(&[("t".to_string(), GaussianRational::i())]).unwrap();
        assert!(matches!(c, Classification::Neither { .. }));
    }

    #[test]
    fn bubble_second_propagator() {
        let g = FeynmanGraph::from_pairs(2, &[(0, 1), (0, 1)], "m", 4);
        let mut g = g;
        g.edges[0].mass = "m1".into();
        g.edges[1].mass = "m2".into();
        let i = ProjectiveIntegral::from_graph(&g).unwrap();
        let names: Vec<String> = i.all_vars().to_vec();
        let expect = "(u*p_0 - k_0)^2 + (u*p_1 - k_1)^2 + (u*p_2 - k_2)^2 + (u*p_3 - k_3)^2 + m2^2*u^2";
        assert_eq!(i.forms[1].to_polynomial(), parse_polynomial(expect, &names).unwrap());
        assert_eq!(i.numerator_exponent(), GaussianRational::from_int(-1));
    }

    #[test]
    fn rejects_cubic() {
        let f = QuadricFile::from_json(r#"{"variables":["z"],"quadrics":[{"poly":"z^3"}]}"#).unwrap();
        assert!(f.into_integral().is_err());
    }
}
