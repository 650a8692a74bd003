//! Truncated Laurent series in ε with pluggable coefficient algebras.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::symbolic::{GaussianRational, RationalFunction};

/// Commutative algebra of kinematic functions.
pub trait Coefficient: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &BigRational) -> Self;
    /// True only when the value is certainly zero.
    fn is_zero(&self) -> bool;
    /// Fix some symbols to exact values.
    fn restrict(&self, point: &[(String, GaussianRational)]) -> Result<Self>;
    fn evaluate(&self, point: &HashMap<String, Complex64>) -> Result<Complex64>;
}

impl Coefficient for RationalFunction {
    fn zero() -> Self {
        <RationalFunction as Zero>::zero()
    }
    fn one() -> Self {
        <RationalFunction as num_traits::One>::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &BigRational) -> Self {
        RationalFunction::scale(self, &GaussianRational::real(c.clone()))
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn restrict(&self, point: &[(String, GaussianRational)]) -> Result<Self> {
        Ok(self.substitute_named(point)?)
    }
    fn evaluate(&self, point: &HashMap<String, Complex64>) -> Result<Complex64> {
        Ok(RationalFunction::evaluate(self, point)?)
    }
}

type SampleFn = dyn Fn(&HashMap<String, Complex64>) -> Result<Complex64> + Send + Sync;

enum Node {
    Leaf(Arc<SampleFn>),
    Const(Complex64),
    Add(Sampler, Sampler),
    Mul(Sampler, Sampler),
    Scale(Sampler, f64),
    Restrict(Sampler, Vec<(String, Complex64)>),
}

/// Opaque numeric coefficient: an expression tree over user-supplied sampling functions.
#[derive(Clone)]
pub struct Sampler(Arc<Node>);

impl Sampler {
    pub fn new(f: impl Fn(&HashMap<String, Complex64>) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        Sampler(Arc::new(Node::Leaf(Arc::new(f))))
    }

    pub fn constant(c: Complex64) -> Self {
        Sampler(Arc::new(Node::Const(c)))
    }
}

impl Coefficient for Sampler {
    fn zero() -> Self {
        Sampler::constant(Complex64::zero())
    }
    fn one() -> Self {
        Sampler::constant(Complex64::new(1.0, 0.0))
    }
    fn add(&self, other: &Self) -> Self {
        match (&*self.0, &*other.0) {
            (Node::Const(a), Node::Const(b)) => Sampler::constant(a + b),
            (Node::Const(a), _) if a.is_zero() => other.clone(),
            (_, Node::Const(b)) if b.is_zero() => self.clone(),
            _ => Sampler(Arc::new(Node::Add(self.clone(), other.clone()))),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        match (&*self.0, &*other.0) {
            (Node::Const(a), Node::Const(b)) => Sampler::constant(a * b),
            _ => Sampler(Arc::new(Node::Mul(self.clone(), other.clone()))),
        }
    }
    fn neg(&self) -> Self {
        Sampler(Arc::new(Node::Scale(self.clone(), -1.0)))
    }
    fn scale(&self, c: &BigRational) -> Self {
        Sampler(Arc::new(Node::Scale(self.clone(), c.to_f64().unwrap_or(f64::NAN))))
    }
    fn is_zero(&self) -> bool {
        matches!(&*self.0, Node::Const(c) if c.is_zero())
    }
    fn restrict(&self, point: &[(String, GaussianRational)]) -> Result<Self> {
        let fixed = point.iter().map(|(n, v)| (n.clone(), v.to_complex())).collect();
        Ok(Sampler(Arc::new(Node::Restrict(self.clone(), fixed))))
    }
    fn evaluate(&self, point: &HashMap<String, Complex64>) -> Result<Complex64> {
        Ok(match &*self.0 {
            Node::Leaf(f) => f(point)?,
            Node::Const(c) => *c,
            Node::Add(a, b) => a.evaluate(point)? + b.evaluate(point)?,
            Node::Mul(a, b) => a.evaluate(point)? * b.evaluate(point)?,
            Node::Scale(a, s) => a.evaluate(point)? * s,
            Node::Restrict(a, fixed) => {
                let mut p = point.clone();
                p.extend(fixed.iter().cloned());
                a.evaluate(&p)?
            }
        })
    }
}

impl fmt::Debug for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Sampler")
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            _ => f.write_str("<sampled>"),
        }
    }
}

/// Σ c_n εⁿ. Powers below the lowest stored one are zero; powers above `hi`
/// are unknown (`hi = None`: exact at all orders).
#[derive(Clone, Debug)]
pub struct LaurentSeries<C> {
    coeffs: BTreeMap<i32, C>,
    hi: Option<i32>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coefficient> LaurentSeries<C> {
    /// Series known through power `hi`; entries above `hi` are dropped.
    pub fn new(coeffs: impl IntoIterator<Item = (i32, C)>, hi: Option<i32>) -> Self {
        let coeffs = coeffs
            .into_iter()
            .filter(|(n, c)| !c.is_zero() && hi.is_none_or(|h| *n <= h))
            .collect();
        LaurentSeries { coeffs, hi }
    }

    pub fn exact(coeffs: impl IntoIterator<Item = (i32, C)>) -> Self {
        Self::new(coeffs, None)
    }

    pub fn zero() -> Self {
        Self::exact([])
    }

    pub fn one() -> Self {
        Self::exact([(0, C::one())])
    }

    pub fn hi(&self) -> Option<i32> {
        self.hi
    }

    /// Lowest power with a stored coefficient.
    pub fn lo(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_known(&self, n: i32) -> bool {
        self.hi.is_none_or(|h| n <= h)
    }

    /// Coefficient of εⁿ, or `None` above the truncation.
    pub fn coeff(&self, n: i32) -> Option<C> {
        if !self.is_known(n) {
            return None;
        }
        Some(self.coeffs.get(&n).cloned().unwrap_or_else(C::zero))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &C)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let hi = min_opt(self.hi.map(i64::from), other.hi.map(i64::from)).map(|h| h as i32);
        let mut coeffs = self.coeffs.clone();
        for (n, c) in &other.coeffs {
            let v = match coeffs.get(n) {
                Some(a) => a.add(c),
                None => c.clone(),
            };
            coeffs.insert(*n, v);
        }
        Self::new(coeffs, hi)
    }

    pub fn neg(&self) -> Self {
        LaurentSeries { coeffs: self.coeffs.iter().map(|(n, c)| (*n, c.neg())).collect(), hi: self.hi }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|(n, v)| (*n, v.scale(c))), self.hi)
    }

    /// Product, exact through min(hi_a + lo_b, hi_b + lo_a).
    pub fn mul(&self, other: &Self) -> Self {
        if (self.coeffs.is_empty() && self.hi.is_none()) || (other.coeffs.is_empty() && other.hi.is_none()) {
            return Self::zero();
        }
        const INF: i64 = i64::MAX / 4;
        let top = |s: &Self| s.hi.map_or(INF, i64::from);
        // lowest power that is not known to vanish
        let floor = |s: &Self| s.lo().map_or(INF, i64::from).min(top(s).saturating_add(1));
        let h = (top(self).saturating_add(floor(other))).min(top(other).saturating_add(floor(self)));
        let hi = (h < INF / 2).then(|| h.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
        let mut coeffs: BTreeMap<i32, C> = BTreeMap::new();
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                let n = a + b;
                if hi.is_some_and(|h| n > h) {
                    continue;
                }
                let v = x.mul(y);
                let v = match coeffs.get(&n) {
                    Some(prev) => prev.add(&v),
                    None => v,
                };
                coeffs.insert(n, v);
            }
        }
        Self::new(coeffs, hi)
    }

    /// Strictly negative powers; exact.
    pub fn principal_part(&self) -> Result<Self> {
        if !self.is_known(-1) {
            return Err(Error::Scheme(format!(
                "principal part unknown: series truncated at power {}",
                self.hi.unwrap_or_default()
            )));
        }
        Ok(Self::exact(self.coeffs.range(..0).map(|(n, c)| (*n, c.clone()))))
    }

    /// Nonnegative powers, same truncation.
    pub fn regular_part(&self) -> Self {
        Self::new(self.coeffs.range(0..).map(|(n, c)| (*n, c.clone())), self.hi)
    }

    pub fn map_coefficients(&self, f: impl Fn(&C) -> Result<C>) -> Result<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (n, c) in &self.coeffs {
            out.push((*n, f(c)?));
        }
        Ok(Self::new(out, self.hi))
    }

    /// Whether both series are known and equal on powers `lo..=hi`.
    pub fn agrees_on(&self, other: &Self, lo: i32, hi: i32) -> Result<bool> {
        if !self.is_known(hi) || !other.is_known(hi) {
            return Err(Error::Precondition(format!("series not exact through power {hi}")));
        }
        let d = self.sub(other);
        Ok(d.coeffs.range(lo..=hi).all(|(_, c)| c.is_zero()))
    }

    /// Powers `lo..=hi` only, marked exact within that range.
    pub fn window(&self, lo: i32, hi: i32) -> Self {
        let top = self.hi.map_or(hi, |h| h.min(hi));
        Self::new(self.coeffs.range(lo..=top).map(|(n, c)| (*n, c.clone())), Some(top))
    }
}

/// The ε⁰ coefficient of a series without principal part.
pub fn physical_limit<C: Coefficient>(s: &LaurentSeries<C>) -> Result<C> {
    if !s.is_known(0) {
        return Err(Error::NoPhysicalLimit("constant term beyond the truncation".into()));
    }
    if let Some((n, _)) = s.terms().find(|(n, c)| **n < 0 && !c.is_zero()) {
        return Err(Error::NoPhysicalLimit(format!("nonzero coefficient at power {n}")));
    }
    Ok(s.coeff(0).expect("known"))
}

impl<C: Coefficient + fmt::Display> fmt::Display for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(n, c)| match n {
                0 => format!("({c})"),
                1 => format!("({c})*eps"),
                _ => format!("({c})*eps^{n}"),
            })
            .collect();
        if let Some(h) = self.hi {
            parts.push(format!("O(eps^{})", h + 1));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_polynomial;

    fn rf(s: &str) -> RationalFunction {
        RationalFunction::from_poly(parse_polynomial(s, &["m"]).unwrap())
    }

    #[test]
    fn truncation_bookkeeping() {
        // (1/ε + 1 + O(ε²)) · (1/ε + O(ε)) is exact through ε⁻¹
        let a = LaurentSeries::new([(-1, rf("1")), (0, rf("1"))], Some(1));
        let b = LaurentSeries::new([(-1, rf("1"))], Some(0));
        let p = a.mul(&b);
        assert_eq!(p.hi(), Some(-1));
        assert_eq!(p.coeff(-2), Some(rf("1")));
        assert_eq!(p.coeff(-1), Some(rf("1")));
        assert!(p.coeff(0).is_none());
        // an exact factor keeps the other's truncation shifted by its lowest power
        let e = LaurentSeries::exact([(-2, rf("m"))]);
        assert_eq!(e.mul(&a).hi(), Some(-1));
        assert_eq!(LaurentSeries::<RationalFunction>::zero().mul(&a).hi(), None);
        assert_eq!(a.add(&b).hi(), Some(0));
    }

    #[test]
    fn physical_limits() {
        let s = LaurentSeries::exact([(0, rf("3")), (1, rf("2"))]);
        assert_eq!(physical_limit(&s).unwrap(), rf("3"));
        let bad = LaurentSeries::exact([(-1, rf("1")), (0, rf("3"))]);
        assert!(matches!(physical_limit(&bad), Err(Error::NoPhysicalLimit(_))));
        let r = bad.regular_part();
        assert_eq!(physical_limit(&r).unwrap(), rf("3"));
    }

    #[test]
    fn sampler_algebra() {
        let f = Sampler::new(|p: &HashMap<String, Complex64>| {
            p.get("s").copied().ok_or_else(|| Error::Invalid("no s".into()))
        });
        let g = f.mul(&f).add(&Sampler::one()).scale(&BigRational::from_integer(2.into()));
        let at = HashMap::from([("s".to_string(), Complex64::new(3.0, 0.0))]);
        assert_eq!(g.evaluate(&at).unwrap(), Complex64::new(20.0, 0.0));
        let r = g.restrict(&[("s".to_string(), GaussianRational::from_int(1))]).unwrap();
        assert_eq!(r.evaluate(&at).unwrap(), Complex64::new(4.0, 0.0));
        assert!(f.evaluate(&HashMap::new()).is_err());
    }
}
