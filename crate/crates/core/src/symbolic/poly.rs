//! Sparse multivariate polynomials over ℚ(i) in graded-lexicographic order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use crate::error::SymbolicError;

/// Ordered, shared list of indeterminate names.
pub type Vars = Arc<Vec<String>>;

pub fn vars_of<S: AsRef<str>>(names: &[S]) -> Vars {
    Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect())
}

/// Exponent vector; ordered graded-lexicographically (total degree first,
/// then lexicographically with the first variable most significant).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, GaussianRational>,
}

fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, GaussianRational::one())
    }

    pub fn constant(vars: &Vars, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(vars.len()), c);
        }
        Polynomial { vars: vars.clone(), terms }
    }

    pub fn from_int(vars: &Vars, n: i64) -> Self {
        Self::constant(vars, GaussianRational::from_int(n))
    }

    /// The indeterminate at position `idx`.
    pub fn variable(vars: &Vars, idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Self::monomial(vars, Monomial(e), GaussianRational::one())
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self, SymbolicError> {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| SymbolicError::UnknownVariable(name.to_string()))?;
        Ok(Self::variable(vars, idx))
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: GaussianRational) -> Self {
        assert_eq!(m.0.len(), vars.len(), "exponent vector length mismatch");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { vars: vars.clone(), terms }
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Monomial, GaussianRational)>) -> Self {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "exponent vector length mismatch");
            p.add_term(m, &c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Terms in ascending term order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            return Some(GaussianRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms.get(&Monomial::one(self.nvars())).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    /// Total degree restricted to the variables at `indices`.
    pub fn degree_in_set(&self, indices: &[usize]) -> u32 {
        self.terms.keys().map(|m| indices.iter().map(|&i| m.0[i]).sum()).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// True if every variable listed is absent from all terms.
    pub fn is_free_of(&self, indices: &[usize]) -> bool {
        self.terms.keys().all(|m| indices.iter().all(|&i| m.0[i] == 0))
    }

    pub fn used_vars(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.terms.keys().any(|m| m.0[i] > 0)).collect()
    }

    /// Re-embed into another variable list. Fails if a used variable is missing.
    pub fn with_vars(&self, vars: &Vars) -> Result<Polynomial, SymbolicError> {
        if same_vars(&self.vars, vars) {
            return Ok(Polynomial { vars: vars.clone(), terms: self.terms.clone() });
        }
        let mut map = Vec::with_capacity(self.nvars());
        for (i, name) in self.vars.iter().enumerate() {
            let target = vars.iter().position(|v| v == name);
            if target.is_none() && self.terms.keys().any(|m| m.0[i] > 0) {
                return Err(SymbolicError::UnknownVariable(name.clone()));
            }
            map.push(target);
        }
        let mut out = Polynomial::zero(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] += k;
                }
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Bring two polynomials onto a common variable list (self's order first).
    fn aligned(&self, other: &Polynomial) -> (Polynomial, Polynomial) {
        if same_vars(&self.vars, &other.vars) {
            return (self.clone(), other.with_vars(&self.vars).unwrap());
        }
        let mut names: Vec<String> = self.vars.to_vec();
        for v in other.vars.iter() {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
        let vars: Vars = Arc::new(names);
        (self.with_vars(&vars).unwrap(), other.with_vars(&vars).unwrap())
    }

    pub fn scale(&self, c: &GaussianRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn differentiate(&self, var: &str) -> Result<Polynomial, SymbolicError> {
        let idx = self.var_index(var).ok_or_else(|| SymbolicError::UnknownVariable(var.to_string()))?;
        Ok(self.diff_index(idx))
    }

    pub fn diff_index(&self, idx: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let k = m.0[idx];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[idx] -= 1;
            out.add_term(Monomial(e), &(c * &GaussianRational::from_int(k as i64)));
        }
        out
    }

    /// Exact substitution of some variables by constants; the variables stay declared.
    pub fn substitute(&self, assignment: &[(usize, GaussianRational)]) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut e = m.0.clone();
            for (idx, val) in assignment {
                let k = e[*idx];
                if k > 0 {
                    coeff = &coeff * &val.pow(k);
                    e[*idx] = 0;
                }
            }
            out.add_term(Monomial(e), &coeff);
        }
        out
    }

    pub fn substitute_named(&self, assignment: &[(String, GaussianRational)]) -> Polynomial {
        let idx: Vec<(usize, GaussianRational)> = assignment
            .iter()
            .filter_map(|(n, v)| self.var_index(n).map(|i| (i, v.clone())))
            .collect();
        self.substitute(&idx)
    }

    /// Replace variable `idx` by a polynomial (same variable list).
    pub fn compose_var(&self, idx: usize, value: &Polynomial) -> Polynomial {
        let value = value.with_vars(&self.vars).expect("substituted polynomial uses foreign variables");
        let max = self.degree_in(idx) as usize;
        let mut powers = vec![Polynomial::one(&self.vars)];
        for k in 1..=max {
            powers.push(&powers[k - 1] * &value);
        }
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let k = m.0[idx] as usize;
            let mut e = m.0.clone();
            e[idx] = 0;
            let rest = Polynomial::monomial(&self.vars, Monomial(e), c.clone());
            out = &out + &(&rest * &powers[k]);
        }
        out
    }

    /// Floating evaluation; terms are accumulated in canonical order.
    pub fn evaluate(&self, assignment: &HashMap<String, Complex64>) -> Result<Complex64, SymbolicError> {
        let mut values = Vec::with_capacity(self.nvars());
        for (i, name) in self.vars.iter().enumerate() {
            match assignment.get(name) {
                Some(v) => values.push(*v),
                None if self.degree_in(i) == 0 => values.push(Complex64::new(0.0, 0.0)),
                None => return Err(SymbolicError::MissingAssignment(name.clone())),
            }
        }
        Ok(self.evaluate_slice(&values))
    }

    /// Evaluate with values given positionally.
    pub fn evaluate_slice(&self, values: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    t *= values[i].powu(k);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation at a full Gaussian-rational point.
    pub fn evaluate_exact(&self, values: &[GaussianRational]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    t = &t * &values[i].pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Exact quotient `self / divisor` if the division leaves no remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (num, den) = self.aligned(divisor);
        let (lm, lc) = den.leading_term()?;
        let lm = lm.clone();
        let lc_inv = lc.inv()?;
        if num.is_zero() {
            return Some(num);
        }
        let mut rem = num;
        let mut quot = Polynomial::zero(&rem.vars);
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return None;
            }
            let t = Polynomial::monomial(&rem.vars, m.div(&lm), c * &lc_inv);
            rem = &rem - &(&t * &den);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Leading coefficient (in term order), or zero.
    pub fn leading_coefficient(&self) -> GaussianRational {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(GaussianRational::zero)
    }

    /// Divide by the leading coefficient so the result is monic.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.inv().unwrap()),
            None => self.clone(),
        }
    }

    /// Remove variables that do not occur.
    pub fn trimmed(&self) -> Polynomial {
        let used = self.used_vars();
        let vars: Vars = Arc::new(used.iter().map(|&i| self.vars[i].clone()).collect());
        self.with_vars(&vars).unwrap()
    }

    pub fn map_coefficients(&self, f: impl Fn(&GaussianRational) -> GaussianRational) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    pub fn conj(&self) -> Polynomial {
        self.map_coefficients(GaussianRational::conj)
    }

    /// All coefficients real.
    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        if same_vars(&self.vars, &other.vars) {
            return self.terms == other.terms;
        }
        let (a, b) = self.aligned(other);
        a.terms == b.terms
    }
}

impl Eq for Polynomial {}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        if !same_vars(&self.vars, &rhs.vars) {
            let (a, b) = self.aligned(rhs);
            return &a + &b;
        }
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        if !same_vars(&self.vars, &rhs.vars) {
            let (a, b) = self.aligned(rhs);
            return &a - &b;
        }
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if !same_vars(&self.vars, &rhs.vars) {
            let (a, b) = self.aligned(rhs);
            return &a * &b;
        }
        let mut out = Polynomial::zero(&self.vars);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned_poly {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned_poly!(Add, add);
forward_owned_poly!(Sub, sub);
forward_owned_poly!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

fn fmt_monomial(vars: &[String], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &k) in m.0.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(vars[i].clone()),
            _ => parts.push(format!("{}^{}", vars[i], k)),
        }
    }
    parts.join("*")
}

/// Canonical serialization: terms in descending graded-lex order joined by
/// ` + ` / ` - `; coefficients `a/b`, `c/d*i` or `(a/b+c/d*i)`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mono = fmt_monomial(&self.vars, m);
            let negative_real = c.is_real() && c.re < num_rational::BigRational::zero();
            let negative_imag = c.re.is_zero() && c.im < num_rational::BigRational::zero();
            let (sign, mag) = if negative_real || negative_imag { ("-", -c) } else { ("+", c.clone()) };
            let coeff = if mag.is_real() || mag.re.is_zero() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{coeff}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{coeff}*{mono}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::parse_polynomial;

    fn p(s: &str, vars: &[&str]) -> Polynomial {
        parse_polynomial(s, vars).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let vars = ["z1", "z2", "t"];
        assert_eq!(p("z1^2 + z2^2 + t^2", &vars).differentiate("z1").unwrap(), p("2*z1", &vars));
        let vars = ["t", "z0"];
        assert_eq!(p("t^2*z0^2", &vars).differentiate("t").unwrap(), p("2*t*z0^2", &vars));
        let vars = ["z1", "z2", "t"];
        assert!(p("z1*t", &vars).differentiate("z2").unwrap().is_zero());
        assert!(matches!(
            p("z1*t", &vars).differentiate("w"),
            Err(SymbolicError::UnknownVariable(_))
        ));
    }

    #[test]
    fn evaluate_examples() {
        let vars = ["t", "z0", "z1"];
        let q = p("t^2*z0^2 + z1^2", &vars);
        let a: HashMap<String, Complex64> = [("t", 2.0), ("z0", 1.0), ("z1", 0.0)]
            .iter()
            .map(|(k, v)| (k.to_string(), Complex64::new(*v, 0.0)))
            .collect();
        assert_eq!(q.evaluate(&a).unwrap(), Complex64::new(4.0, 0.0));

        let q = p("z1^2 + z2^2 + t^2", &["z1", "z2", "t"]);
        let mut a = HashMap::new();
        a.insert("t".to_string(), Complex64::new(0.0, 1.0));
        a.insert("z1".to_string(), Complex64::new(1.0, 0.0));
        a.insert("z2".to_string(), Complex64::new(0.0, 0.0));
        assert!(q.evaluate(&a).unwrap().norm() < 1e-15);

        a.remove("z2");
        assert!(matches!(q.evaluate(&a), Err(SymbolicError::MissingAssignment(_))));
    }

    #[test]
    fn canonical_text() {
        let vars = ["t", "z0", "z1"];
        assert_eq!(p("z1^2 + t^2*z0^2", &vars).to_string(), "t^2*z0^2 + z1^2");
        assert_eq!(p("-z1 + 1/2*i*t - 3", &vars).to_string(), "1/2*i*t - z1 - 3");
        assert_eq!(p("(1+i)*t", &vars).to_string(), "(1+i)*t");
        assert_eq!(p("0", &vars).to_string(), "0");
    }

    #[test]
    fn exact_division() {
        let vars = ["x", "y"];
        let a = p("x^2 - y^2", &vars);
        assert_eq!(a.div_exact(&p("x - y", &vars)).unwrap(), p("x + y", &vars));
        assert!(a.div_exact(&p("x + 2*y", &vars)).is_none());
    }

    #[test]
    fn mixed_variable_lists_align() {
        let a = p("x + 1", &["x"]);
        let b = p("y", &["y"]);
        let s = &a + &b;
        assert_eq!(s, p("x + y + 1", &["y", "x"]));
    }
}
