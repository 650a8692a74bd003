//! Parameter points `name=value;...` and grids over them.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, ParseError, Result};
use crate::symbolic::gaussian::parse_rational_literal;
use crate::GaussianRational;

pub type ExactPoint = Vec<(String, GaussianRational)>;

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Component names for a vector assignment `name=(…)`: `name_0…` if declared, else `name1…`.
fn vector_names(name: &str, len: usize, params: &[String]) -> Vec<String> {
    let underscored: Vec<String> = (0..len).map(|i| format!("{name}_{i}")).collect();
    if underscored.iter().all(|n| params.contains(n)) {
        return underscored;
    }
    (1..=len).map(|i| format!("{name}{i}")).collect()
}

/// Parse `p=(3i,0,0,0);m=(1,2)` or `t=1/2` against the declared parameters.
pub fn parse_point(text: &str, params: &[String]) -> Result<ExactPoint> {
    let mut out: ExactPoint = Vec::new();
    let mut offset = 0;
    for item in split_top_level(text, ';') {
        let here = offset;
        offset += item.len() + 1;
        let item_trim = item.trim();
        if item_trim.is_empty() {
            continue;
        }
        let (name, value) = item_trim
            .split_once('=')
            .ok_or_else(|| Error::Parse(ParseError::new(text, here, "expected name=value")))?;
        let name = name.trim();
        let value = value.trim();
        if let Some(inner) = value.strip_prefix('(').and_then(|v| v.strip_suffix(')')) {
            let parts = split_top_level(inner, ',');
            let names = vector_names(name, parts.len(), params);
            for (n, v) in names.into_iter().zip(parts) {
                out.push((n, v.trim().parse::<GaussianRational>().map_err(|e| relocate(text, here, e))?));
            }
        } else {
            out.push((name.to_string(), value.parse::<GaussianRational>().map_err(|e| relocate(text, here, e))?));
        }
    }
    for (n, _) in &out {
        if !params.contains(n) {
            return Err(Error::Invalid(format!("'{n}' is not a parameter of this input")));
        }
    }
    Ok(out)
}

fn relocate(text: &str, at: usize, e: ParseError) -> Error {
    Error::Parse(ParseError::new(text, at + e.offset, &e.message))
}

/// Order a point by the parameter list, failing on missing symbols.
pub fn complete_point(point: &ExactPoint, params: &[String]) -> Result<Vec<GaussianRational>> {
    params
        .iter()
        .map(|p| {
            point
                .iter()
                .rev()
                .find(|(n, _)| n == p)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Invalid(format!("no value given for parameter '{p}'")))
        })
        .collect()
}

pub fn to_complex(values: &[GaussianRational]) -> Vec<Complex64> {
    values.iter().map(GaussianRational::to_complex).collect()
}

#[derive(Clone, Debug)]
enum Axis {
    Fixed(String, GaussianRational),
    /// name, imaginary?, values
    Range(String, bool, Vec<BigRational>),
}

/// Cartesian grid from `t.re=-2:2:41;t.im=-2:2:41;m=1`.
///
/// `name=a:b:n` and `name.re=a:b:n` sweep the real part, `name.im=a:b:n` the
/// imaginary part; any other value is a fixed assignment (vector syntax allowed).
pub fn parse_grid(text: &str, params: &[String]) -> Result<Vec<ExactPoint>> {
    let mut axes = Vec::new();
    for item in split_top_level(text, ';') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (lhs, rhs) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(ParseError::new(text, 0, "expected name=range")))?;
        let (name, imag) = match lhs.trim().rsplit_once('.') {
            Some((n, "re")) => (n.to_string(), false),
            Some((n, "im")) => (n.to_string(), true),
            _ => (lhs.trim().to_string(), false),
        };
        let parts: Vec<&str> = rhs.split(':').collect();
        if parts.len() == 3 {
            let a = parse_rational_literal(parts[0].trim());
            let b = parse_rational_literal(parts[1].trim());
            let n: Option<usize> = parts[2].trim().parse().ok();
            let (Some(a), Some(b), Some(n)) = (a, b, n) else {
                return Err(Error::Parse(ParseError::new(text, 0, &format!("bad range '{rhs}'"))));
            };
            if n == 0 {
                return Err(Error::Invalid("range with zero points".into()));
            }
            let vals = (0..n)
                .map(|k| {
                    if n == 1 {
                        a.clone()
                    } else {
                        &a + (&b - &a) * BigRational::new(BigInt::from(k), BigInt::from(n - 1))
                    }
                })
                .collect();
            if !params.contains(&name) {
                return Err(Error::Invalid(format!("'{name}' is not a parameter of this input")));
            }
            axes.push(Axis::Range(name, imag, vals));
        } else {
            for (n, v) in parse_point(item, params)? {
                axes.push(Axis::Fixed(n, v));
            }
        }
    }
    let mut points: Vec<ExactPoint> = vec![Vec::new()];
    for axis in &axes {
        let mut next = Vec::new();
        for p in &points {
            match axis {
                Axis::Fixed(n, v) => {
                    let mut q = p.clone();
                    q.push((n.clone(), v.clone()));
                    next.push(q);
                }
                Axis::Range(n, imag, vals) => {
                    for v in vals {
                        let mut q = p.clone();
                        let prev = q.iter().position(|(m, _)| m == n).map(|i| q.remove(i).1);
                        let mut z = prev.unwrap_or_else(GaussianRational::zero);
                        if *imag {
                            z.im = v.clone();
                        } else {
                            z.re = v.clone();
                        }
                        q.push((n.clone(), z));
                        next.push(q);
                    }
                }
            }
        }
        points = next;
    }
    Ok(points)
}

pub fn format_point(point: &ExactPoint) -> String {
    point.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn vector_assignments() {
        let params = names(&["p_0", "p_1", "p_2", "p_3", "m1", "m2"]);
        let pt = parse_point("p=(3i,0,0,0);m=(1,2)", &params).unwrap();
        assert_eq!(pt[0], ("p_0".to_string(), "3i".parse().unwrap()));
        assert_eq!(pt[5], ("m2".to_string(), GaussianRational::from_int(2)));
        assert!(parse_point("q=1", &params).is_err());
        assert!(matches!(parse_point("p_0", &params), Err(Error::Parse(_))));
    }

    #[test]
    fn grids() {
        let params = names(&["t"]);
        let g = parse_grid("t.re=-2:2:5;t.im=-1:1:3", &params).unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!(format_point(&g[0]), "t=-2-i");
        assert_eq!(format_point(&g[14]), "t=2+i");
    }
}
