//! Hopf-algebraic renormalization of 1PI graphs.

mod birkhoff;
mod hopf;
mod laurent;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use birkhoff::{
    birkhoff, close_registry, constant_series, momentum_symbols, random_character, Character, Renormalization, Scheme,
};
pub use hopf::{component_graph, CoassociativityReport, GraphSum, Hopf, Monomial, TensorSum};
pub use laurent::{physical_limit, Coefficient, LaurentSeries, Sampler};

use crate::error::{Error, ParseError, Result};
use crate::graph::{json_error, GraphFile};
use crate::symbolic::{parse_with_vars, vars_of, GaussianRational, RationalFunction, Vars};

/// `N` or `N/(D)`; a non-constant denominator must be parenthesized.
pub fn parse_rational_function(src: &str, vars: &Vars) -> Result<RationalFunction> {
    let s = src.trim();
    if let Some(split) = denominator_split(s) {
        let num = parse_with_vars(&s[..split], vars).map_err(Error::Parse)?;
        let den = parse_with_vars(&s[split + 1..], vars).map_err(Error::Parse)?;
        return RationalFunction::new(num, den).map_err(|_| {
            Error::Parse(ParseError::new(src, split, "denominator is identically zero"))
        });
    }
    Ok(RationalFunction::from_poly(parse_with_vars(s, vars).map_err(Error::Parse)?))
}

/// Offset of a top-level `/` followed by a parenthesized group that closes at the end.
fn denominator_split(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut found = None;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'/' if depth == 0 && s[i + 1..].trim_start().starts_with('(') => found = Some(i),
            _ => {}
        }
    }
    let i = found?;
    let rest = s[i + 1..].trim_start();
    let mut depth = 0i32;
    for (j, c) in rest.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return (j + 1 == rest.len()).then_some(i);
                }
            }
            _ => {}
        }
    }
    None
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceMomenta {
    One(Vec<String>),
    Many(Vec<Vec<String>>),
}

/// Scheme configuration: `{"scheme": "min"|"mom", "window": [-3, 3], "reference": {"2": ["1","0","0","0"]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub scheme: String,
    #[serde(default = "default_window")]
    pub window: [i32; 2],
    #[serde(default)]
    pub reference: BTreeMap<String, ReferenceMomenta>,
}

fn default_window() -> [i32; 2] {
    [-3, 3]
}

impl SchemeFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| json_error(text, &e))
    }

    pub fn to_scheme(&self) -> Result<Scheme> {
        match self.scheme.as_str() {
            "min" | "minimal" => Ok(Scheme::Minimal),
            "mom" | "momentum" => {
                let mut reference = BTreeMap::new();
                for (n, v) in &self.reference {
                    let legs: u32 = n.parse().map_err(|_| Error::Invalid(format!("leg count '{n}' is not an integer")))?;
                    let vectors = match v {
                        ReferenceMomenta::One(x) => vec![x.clone()],
                        ReferenceMomenta::Many(xs) => xs.clone(),
                    };
                    let parsed = vectors
                        .iter()
                        .map(|x| x.iter().map(|c| c.parse::<GaussianRational>().map_err(Error::Parse)).collect())
                        .collect::<Result<Vec<Vec<_>>>>()?;
                    reference.insert(legs, parsed);
                }
                Ok(Scheme::Momentum { reference })
            }
            other => Err(Error::Invalid(format!("unknown scheme '{other}', expected min or mom"))),
        }
    }
}

/// One character value: a graph (inline or by canonical key) and its series.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    /// power → rational function
    pub series: BTreeMap<String, String>,
    /// Highest power given exactly; absent means exact at all orders.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterFile {
    pub symbols: Vec<String>,
    pub values: Vec<CharacterEntry>,
}

impl CharacterFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| json_error(text, &e))
    }

    /// Build the character, registering inline graphs so they become the representatives.
    pub fn to_character(&self, hopf: &mut Hopf) -> Result<Character<RationalFunction>> {
        let vars = vars_of(&self.symbols);
        let mut phi = Character::new();
        for entry in &self.values {
            let key = match (&entry.graph, &entry.key) {
                (Some(g), None) => hopf.register(&g.clone().into_graph()?)?,
                (None, Some(k)) => k.clone(),
                _ => return Err(Error::Invalid("character entry needs exactly one of graph or key".into())),
            };
            let mut coeffs = Vec::new();
            for (n, text) in &entry.series {
                let power: i32 = n.parse().map_err(|_| Error::Invalid(format!("power '{n}' is not an integer")))?;
                coeffs.push((power, parse_rational_function(text, &vars)?));
            }
            phi.insert(key, LaurentSeries::new(coeffs, entry.order));
        }
        Ok(phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn rational_function_text() {
        let v = vars_of(&["m", "p_0"]);
        let f = parse_rational_function("(m^2 - 1)/(m + 1)", &v).unwrap();
        assert_eq!(f.to_string(), "m - 1");
        let g = parse_rational_function("p_0^2/(m^2 + 1)", &v).unwrap();
        assert!(!g.is_polynomial());
        assert_eq!(parse_rational_function("m/2", &v).unwrap(), parse_rational_function("(1/2)*m", &v).unwrap());
        assert!(parse_rational_function("1/(m - m)", &v).is_err());
        assert!(matches!(parse_rational_function("m +", &v), Err(Error::Parse(_))));
    }

    #[test]
    fn files_round_trip_into_a_birkhoff_split() {
        let bubble = fixtures::bubble().to_json();
        let text = format!(
            r#"{{"symbols": ["m1", "m2", "p_0", "p_1", "p_2", "p_3"],
                "values": [{{"graph": {bubble}, "series": {{"-1": "1/(m1^2 + 1)", "0": "p_0^2 + m2"}}, "order": 2}}]}}"#
        );
        let file = CharacterFile::from_json(&text).unwrap();
        let mut hopf = Hopf::new();
        let phi = file.to_character(&mut hopf).unwrap();
        let scheme = SchemeFile::from_json(r#"{"scheme": "mom", "reference": {"2": ["2", "0", "0", "0"]}}"#)
            .unwrap()
            .to_scheme()
            .unwrap();
        let (_, plus) = birkhoff(&phi, &scheme, &mut hopf, &fixtures::bubble()).unwrap();
        let v = vars_of(&["p_0"]);
        assert_eq!(plus.coeff(0).unwrap(), parse_rational_function("p_0^2 - 4", &v).unwrap());
        assert!(SchemeFile::from_json(r#"{"scheme": "min", "extra": 1}"#).is_err());
        assert!(SchemeFile::from_json(r#"{"scheme": "dim"}"#).unwrap().to_scheme().is_err());
    }
}
