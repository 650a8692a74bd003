//! Quotients of polynomials, reduced by content only.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use super::poly::{Polynomial, Vars};
use crate::error::SymbolicError;

#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, SymbolicError> {
        if den.is_zero() {
            return Err(SymbolicError::ZeroDenominator);
        }
        Ok(Self::reduced(num, den))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(p.vars());
        RationalFunction { num: p, den }
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(Polynomial::zero(vars))
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(Polynomial::one(vars))
    }

    pub fn constant(vars: &Vars, c: GaussianRational) -> Self {
        Self::from_poly(Polynomial::constant(vars, c))
    }

    /// Content reduction: monic denominator, constant denominators absorbed,
    /// and an exact polynomial quotient taken when one exists.
    fn reduced(num: Polynomial, den: Polynomial) -> Self {
        let (num, den) = {
            let (n2, d2) = (&num + &Polynomial::zero(den.vars()), &den + &Polynomial::zero(num.vars()));
            (n2, d2)
        };
        if num.is_zero() {
            return RationalFunction { den: Polynomial::one(num.vars()), num };
        }
        let lc = den.leading_coefficient();
        let inv = lc.inv().expect("nonzero denominator");
        let num = num.scale(&inv);
        let den = den.scale(&inv);
        if den.is_constant() {
            return RationalFunction { den: Polynomial::one(num.vars()), num };
        }
        if let Some(q) = num.div_exact(&den) {
            return RationalFunction { den: Polynomial::one(q.vars()), num: q };
        }
        RationalFunction { num, den }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_polynomial(&self) -> Option<Polynomial> {
        if self.is_polynomial() {
            Some(self.num.scale(&self.den.constant_value()?.inv()?))
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.is_polynomial() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        self.as_polynomial()?.constant_value()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::reduced(self.num.scale(c), self.den.clone())
    }

    pub fn with_vars(&self, vars: &Vars) -> Result<Self, SymbolicError> {
        Ok(RationalFunction { num: self.num.with_vars(vars)?, den: self.den.with_vars(vars)? })
    }

    pub fn substitute(&self, assignment: &[(usize, GaussianRational)]) -> Result<Self, SymbolicError> {
        Self::new(self.num.substitute(assignment), self.den.substitute(assignment))
    }

    pub fn substitute_named(&self, assignment: &[(String, GaussianRational)]) -> Result<Self, SymbolicError> {
        Self::new(self.num.substitute_named(assignment), self.den.substitute_named(assignment))
    }

    pub fn evaluate(&self, assignment: &HashMap<String, Complex64>) -> Result<Complex64, SymbolicError> {
        Ok(self.num.evaluate(assignment)? / self.den.evaluate(assignment)?)
    }

    pub fn evaluate_exact(&self, values: &[GaussianRational]) -> Option<GaussianRational> {
        let d = self.den.evaluate_exact(values);
        Some(&self.num.evaluate_exact(values) * &d.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalFunction { num: self.num.pow(e), den: self.den.pow(e) }
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        (&self.num * &other.den) == (&other.num * &self.den)
    }
}

impl Eq for RationalFunction {}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::reduced(&self.num + &rhs.num, self.den.clone());
        }
        if rhs.den.is_one_poly() {
            return RationalFunction::reduced(&self.num + &(&rhs.num * &self.den), self.den.clone());
        }
        if self.den.is_one_poly() {
            return RationalFunction::reduced(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        if let Some(q) = rhs.den.div_exact(&self.den) {
            return RationalFunction::reduced(&(&self.num * &q) + &rhs.num, rhs.den.clone());
        }
        if let Some(q) = self.den.div_exact(&rhs.den) {
            return RationalFunction::reduced(&self.num + &(&rhs.num * &q), self.den.clone());
        }
        RationalFunction::reduced(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(&(&self.num + &rhs.num).vars().clone());
        }
        if self.den.is_one_poly() && rhs.den.is_one_poly() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        // Cancel across before multiplying when exact quotients exist.
        let (mut a, mut d) = (self.num.clone(), rhs.den.clone());
        if !d.is_constant() {
            if let Some(q) = a.div_exact(&d) {
                a = q;
                d = Polynomial::one(a.vars());
            }
        }
        let (mut c, mut b) = (rhs.num.clone(), self.den.clone());
        if !b.is_constant() {
            if let Some(q) = c.div_exact(&b) {
                c = q;
                b = Polynomial::one(c.vars());
            }
        }
        RationalFunction::reduced(&a * &c, &b * &d)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero(&Vars::default())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        RationalFunction::one(&Vars::default())
    }
}

macro_rules! forward_owned_rf {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned_rf!(Add, add);
forward_owned_rf!(Sub, sub);
forward_owned_rf!(Mul, mul);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write!(f, "{}", self.as_polynomial().unwrap());
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl Polynomial {
    pub(crate) fn is_one_poly(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::parse_polynomial;

    fn rf(n: &str, d: &str) -> RationalFunction {
        let v = ["t", "s"];
        RationalFunction::new(parse_polynomial(n, &v).unwrap(), parse_polynomial(d, &v).unwrap()).unwrap()
    }

    #[test]
    fn reduces_exact_quotients() {
        let r = rf("t^2 - 1", "t - 1");
        assert!(r.is_polynomial());
        assert_eq!(r.to_string(), "t + 1");
        let r = rf("t", "2*t + 2");
        assert_eq!(r.to_string(), "(1/2*t)/(t + 1)");
    }

    #[test]
    fn field_operations() {
        let a = rf("1", "t");
        let b = rf("1", "s");
        let sum = &a + &b;
        assert_eq!(sum, rf("s + t", "s*t"));
        let prod = &sum * &rf("t", "1");
        assert_eq!(prod, rf("s + t", "s"));
        assert_eq!(&a * &a.inv().unwrap(), RationalFunction::one(a.vars()));
        assert!(RationalFunction::new(parse_polynomial("t", &["t"]).unwrap(), parse_polynomial("0", &["t"]).unwrap()).is_err());
    }
}
