//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar: sums and differences of products of factors; a factor is a
//! number literal, the imaginary unit `i`, a declared variable, or a
//! parenthesized expression, optionally raised to a non-negative integer
//! power with `^`. Division is allowed only by constant expressions.

use std::sync::Arc;

use super::gaussian::{parse_rational_literal, GaussianRational};
use super::poly::{Polynomial, Vars};
use crate::error::ParseError;

pub fn parse_polynomial<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<Polynomial, ParseError> {
    let vars: Vars = Arc::new(vars.iter().map(|s| s.as_ref().to_string()).collect());
    parse_with_vars(src, &vars)
}

pub fn parse_with_vars(src: &str, vars: &Vars) -> Result<Polynomial, ParseError> {
    let mut p = Parser { src, pos: 0, vars };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let out = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: &'a Vars,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError::new(self.src, self.pos, msg)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        let mut acc = if self.eat('-') {
            -&self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.power()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc = &acc * &self.power()?;
                }
                Some('/') => {
                    self.bump();
                    let at = self.pos;
                    let d = self.power()?;
                    let c = d.constant_value().ok_or_else(|| ParseError::new(self.src, at, "division by a non-constant"))?;
                    let inv = c.inv().ok_or_else(|| ParseError::new(self.src, at, "division by zero"))?;
                    acc = acc.scale(&inv);
                }
                // Implicit multiplication such as `3i` or `2t`.
                Some(c) if c.is_alphabetic() || c == '(' => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.factor()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            let e: u32 = self.src[start..self.pos]
                .parse()
                .map_err(|_| ParseError::new(self.src, start, "expected a non-negative integer exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some('-') => {
                self.bump();
                Ok(-&self.factor()?)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Polynomial, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.bump();
        }
        // Exponent part, only when followed by a digit or sign+digit.
        if matches!(self.peek(), Some('e') | Some('E')) {
            let rest = &self.src[self.pos + 1..];
            let mut chars = rest.chars();
            let ok = match chars.next() {
                Some(c) if c.is_ascii_digit() => true,
                Some('-') | Some('+') => matches!(chars.next(), Some(c) if c.is_ascii_digit()),
                _ => false,
            };
            if ok {
                self.bump();
                if matches!(self.peek(), Some('-') | Some('+')) {
                    self.bump();
                }
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            }
        }
        let lit = &self.src[start..self.pos];
        let r = parse_rational_literal(lit).ok_or_else(|| ParseError::new(self.src, start, "malformed number"))?;
        Ok(Polynomial::constant(self.vars, GaussianRational::real(r)))
    }

    fn identifier(&mut self) -> Result<Polynomial, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        let name = &self.src[start..self.pos];
        if let Some(idx) = self.vars.iter().position(|v| v == name) {
            return Ok(Polynomial::variable(self.vars, idx));
        }
        if name == "i" {
            return Ok(Polynomial::constant(self.vars, GaussianRational::i()));
        }
        // `3i` style suffixes parse as number then identifier `i`; `2it` is not supported.
        Err(ParseError::new(self.src, start, &format!("unknown symbol '{name}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_constants() {
        let vars: [&str; 0] = [];
        let c = parse_polynomial("3i", &vars).unwrap().constant_value().unwrap();
        assert_eq!(c, &GaussianRational::i() * &GaussianRational::from_int(3));
        let c = parse_polynomial("(1/2+3/4*i)", &vars).unwrap().constant_value().unwrap();
        assert_eq!(c.to_string(), "1/2+3/4*i");
        let c = parse_polynomial("1.5-2i", &vars).unwrap().constant_value().unwrap();
        assert_eq!(c.to_string(), "3/2-2*i");
    }

    #[test]
    fn reports_location() {
        let err = parse_polynomial("x + y*", &["x", "y"]).unwrap_err();
        assert_eq!(err.offset, 6);
        let err = parse_polynomial("x + w", &["x"]).unwrap_err();
        assert!(err.message.contains("unknown symbol 'w'"));
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn powers_and_products() {
        let vars = ["u", "p", "k"];
        let a = parse_polynomial("(u*p - k)^2", &vars).unwrap();
        let b = parse_polynomial("u^2*p^2 - 2*u*p*k + k^2", &vars).unwrap();
        assert_eq!(a, b);
        assert!(parse_polynomial("x/0", &["x"]).is_err());
        assert!(parse_polynomial("1/x", &["x"]).is_err());
        assert!(!parse_polynomial("x/2", &["x"]).unwrap().is_zero());
    }
}
