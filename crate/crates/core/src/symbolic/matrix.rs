//! Dense matrices over exact rings: fraction-free determinant and adjugate.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use super::poly::{Polynomial, Vars};
use super::ratfun::RationalFunction;
use crate::error::SymbolicError;

/// Operations needed by fraction-free elimination.
pub trait ExactRing: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, rhs: &Self) -> Self;
    fn sub_elem(&self, rhs: &Self) -> Self;
    fn mul_elem(&self, rhs: &Self) -> Self;
    fn neg_elem(&self) -> Self;
    /// Quotient that is known to be exact.
    fn div_known_exact(&self, rhs: &Self) -> Self;
}

impl ExactRing for Polynomial {
    fn zero_like(&self) -> Self {
        Polynomial::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        Polynomial::one(self.vars())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_elem(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_elem(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_elem(&self) -> Self {
        -self
    }
    fn div_known_exact(&self, rhs: &Self) -> Self {
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c.inv().expect("division by zero in elimination"));
        }
        self.div_exact(rhs).expect("fraction-free elimination produced an inexact quotient")
    }
}

impl ExactRing for GaussianRational {
    fn zero_like(&self) -> Self {
        GaussianRational::zero()
    }
    fn one_like(&self) -> Self {
        GaussianRational::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_elem(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_elem(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_elem(&self) -> Self {
        -self
    }
    fn div_known_exact(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

impl ExactRing for RationalFunction {
    fn zero_like(&self) -> Self {
        RationalFunction::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        RationalFunction::one(self.vars())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_elem(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_elem(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_elem(&self) -> Self {
        -self
    }
    fn div_known_exact(&self, rhs: &Self) -> Self {
        self * &rhs.inv().expect("division by zero in elimination")
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type PolyMatrix = Matrix<Polynomial>;
pub type SymbolicMatrix = Matrix<RationalFunction>;
pub type ExactMatrix = Matrix<GaussianRational>;

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T: ExactRing> Matrix<T> {
    pub fn identity_like(n: usize, sample: &T) -> Self {
        let (z, o) = (sample.zero_like(), sample.one_like());
        Matrix::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// First pair (i, j) with entry(i,j) != entry(j,i).
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.rows).flat_map(|i| (0..i).map(move |j| (i, j))).find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(ExactRing::is_zero_elem)
    }

    pub fn mul_mat(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, SymbolicError> {
        if self.cols != rhs.rows {
            return Err(SymbolicError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let zero = self.data.first().or(rhs.data.first()).map(|x| x.zero_like());
        Ok(Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = zero.clone().expect("nonempty product");
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if a.is_zero_elem() || b.is_zero_elem() {
                    continue;
                }
                acc = acc.add_elem(&a.mul_elem(b));
            }
            acc
        }))
    }

    pub fn add_mat(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, SymbolicError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(SymbolicError::DimensionMismatch("matrix sum".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add_elem(rhs.get(i, j))))
    }

    pub fn scale_by(&self, c: &T) -> Matrix<T> {
        self.map(|x| x.mul_elem(c))
    }

    /// Quadratic form vᵀ M w.
    pub fn bilinear(&self, v: &[T], w: &[T]) -> T {
        let mut acc = v[0].zero_like();
        for i in 0..self.rows {
            if v[i].is_zero_elem() {
                continue;
            }
            for j in 0..self.cols {
                let m = self.get(i, j);
                if m.is_zero_elem() || w[j].is_zero_elem() {
                    continue;
                }
                acc = acc.add_elem(&v[i].mul_elem(m).mul_elem(&w[j]));
            }
        }
        acc
    }

    /// Fraction-free (Bareiss) determinant. The empty matrix has determinant one.
    pub fn determinant_with(&self, one: &T) -> Result<T, SymbolicError> {
        if !self.is_square() {
            return Err(SymbolicError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(one.clone());
        }
        let mut a = self.clone();
        let mut prev = one.clone();
        let mut negate = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a.get(r, k).is_zero_elem()) else {
                return Ok(one.zero_like());
            };
            if p != k {
                a.swap_rows(p, k);
                negate = !negate;
            }
            let pivot = a.get(k, k).clone();
            for i in k + 1..n {
                let aik = a.get(i, k).clone();
                for j in k + 1..n {
                    let v = pivot.mul_elem(a.get(i, j));
                    let v = if aik.is_zero_elem() { v } else { v.sub_elem(&aik.mul_elem(a.get(k, j))) };
                    a.set(i, j, v.div_known_exact(&prev));
                }
                a.set(i, k, one.zero_like());
            }
            prev = pivot;
        }
        let d = a.get(n - 1, n - 1).clone();
        Ok(if negate { d.neg_elem() } else { d })
    }

    /// Adjugate by fraction-free Gauss–Jordan on [M | I]; cofactors if M is singular.
    pub fn adjugate_with(&self, one: &T) -> Result<Matrix<T>, SymbolicError> {
        if !self.is_square() {
            return Err(SymbolicError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        if n == 1 {
            return Ok(Matrix::from_vec(1, 1, vec![one.clone()]));
        }
        let zero = one.zero_like();
        let mut a = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                one.clone()
            } else {
                zero.clone()
            }
        });
        let mut prev = one.clone();
        let mut negate = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a.get(r, k).is_zero_elem()) else {
                return self.adjugate_by_cofactors(one);
            };
            if p != k {
                a.swap_rows(p, k);
                negate = !negate;
            }
            let pivot = a.get(k, k).clone();
            for i in 0..n {
                if i == k {
                    continue;
                }
                let aik = a.get(i, k).clone();
                for j in 0..2 * n {
                    if j == k {
                        continue;
                    }
                    let v = pivot.mul_elem(a.get(i, j));
                    let v = if aik.is_zero_elem() { v } else { v.sub_elem(&aik.mul_elem(a.get(k, j))) };
                    a.set(i, j, v.div_known_exact(&prev));
                }
                a.set(i, k, zero.clone());
            }
            prev = pivot;
        }
        Ok(Matrix::from_fn(n, n, |i, j| {
            let x = a.get(i, n + j).clone();
            if negate {
                x.neg_elem()
            } else {
                x
            }
        }))
    }

    /// Adjugate from (n−1)-minors; used for singular input and as a cross-check.
    pub fn adjugate_by_cofactors(&self, one: &T) -> Result<Matrix<T>, SymbolicError> {
        if !self.is_square() {
            return Err(SymbolicError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // adj(M)_{ij} = (−1)^{i+j} det(M without row j, column i)
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let d = self.submatrix(&rows, &cols).determinant_with(one)?;
                out.push(if (i + j) % 2 == 1 { d.neg_elem() } else { d });
            }
        }
        Ok(Matrix::from_vec(n, n, out))
    }

    /// Rank by exact elimination (field entries only make sense here).
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a.get(r, col).is_zero_elem()) else {
                continue;
            };
            a.swap_rows(p, rank);
            let pivot = a.get(rank, col).clone();
            for i in rank + 1..self.rows {
                let f = a.get(i, col).clone();
                if f.is_zero_elem() {
                    continue;
                }
                for j in col..self.cols {
                    let v = pivot.mul_elem(a.get(i, j)).sub_elem(&f.mul_elem(a.get(rank, j)));
                    a.set(i, j, v);
                }
            }
            rank += 1;
        }
        rank
    }
}

impl PolyMatrix {
    pub fn poly_identity(vars: &Vars, n: usize) -> Self {
        Matrix::identity_like(n, &Polynomial::zero(vars))
    }

    pub fn determinant(&self, vars: &Vars) -> Result<Polynomial, SymbolicError> {
        self.determinant_with(&Polynomial::one(vars))
    }

    pub fn adjugate(&self, vars: &Vars) -> Result<PolyMatrix, SymbolicError> {
        self.adjugate_with(&Polynomial::one(vars))
    }

    pub fn evaluate(&self, assignment: &HashMap<String, Complex64>) -> Result<DMatrix<Complex64>, SymbolicError> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.get(i, j).evaluate(assignment)?;
            }
        }
        Ok(out)
    }

    pub fn substitute(&self, assignment: &[(usize, GaussianRational)]) -> PolyMatrix {
        self.map(|p| p.substitute(assignment))
    }

    /// Entries as constants, if they all are.
    pub fn to_exact(&self) -> Option<ExactMatrix> {
        let data: Option<Vec<_>> = self.data.iter().map(Polynomial::constant_value).collect();
        Some(Matrix::from_vec(self.rows, self.cols, data?))
    }

    pub fn to_symbolic(&self) -> SymbolicMatrix {
        self.map(|p| RationalFunction::from_poly(p.clone()))
    }
}

impl SymbolicMatrix {
    /// Determinant after clearing row denominators so elimination stays polynomial.
    pub fn determinant(&self, vars: &Vars) -> Result<RationalFunction, SymbolicError> {
        if !self.is_square() {
            return Err(SymbolicError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let (pm, scale) = self.clear_row_denominators(vars);
        let d = pm.determinant(vars)?;
        RationalFunction::new(d, scale)
    }

    pub fn adjugate(&self, vars: &Vars) -> Result<SymbolicMatrix, SymbolicError> {
        if !self.is_square() {
            return Err(SymbolicError::NotSquare { rows: self.rows, cols: self.cols });
        }
        // adj(D·M) = det(D)·adj(M)·D^{-1} for diagonal D of row scales.
        let n = self.rows;
        let mut row_scales = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n * n);
        for i in 0..n {
            let d = self.row_lcm(i, vars);
            for j in 0..n {
                rows.push((self.get(i, j) * &RationalFunction::from_poly(d.clone())).as_polynomial().expect("cleared row"));
            }
            row_scales.push(d);
        }
        let pm = Matrix::from_vec(n, n, rows);
        let adj = pm.adjugate(vars)?;
        let total = row_scales.iter().fold(Polynomial::one(vars), |acc, d| &acc * d);
        Ok(Matrix::from_fn(n, n, |i, j| {
            // column j of adj(D·M) carries the factor of D removed from row j
            let num = adj.get(i, j) * &row_scales[j];
            RationalFunction::new(num, total.clone()).expect("nonzero scale")
        }))
    }

    fn row_lcm(&self, i: usize, vars: &Vars) -> Polynomial {
        let mut acc = Polynomial::one(vars);
        for j in 0..self.cols {
            let d = self.get(i, j).denominator();
            if d.is_constant() || (&acc).div_exact(d).is_some() {
                continue;
            }
            acc = &acc * d;
        }
        acc
    }

    fn clear_row_denominators(&self, vars: &Vars) -> (PolyMatrix, Polynomial) {
        let mut scale = Polynomial::one(vars);
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            let d = self.row_lcm(i, vars);
            let dr = RationalFunction::from_poly(d.clone());
            for j in 0..self.cols {
                data.push((self.get(i, j) * &dr).as_polynomial().expect("cleared row"));
            }
            scale = &scale * &d;
        }
        (Matrix::from_vec(self.rows, self.cols, data), scale)
    }

    pub fn evaluate(&self, assignment: &HashMap<String, Complex64>) -> Result<DMatrix<Complex64>, SymbolicError> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.get(i, j).evaluate(assignment)?;
            }
        }
        Ok(out)
    }

    /// All entries polynomial.
    pub fn to_poly(&self) -> Option<PolyMatrix> {
        let data: Option<Vec<_>> = self.data.iter().map(RationalFunction::as_polynomial).collect();
        Some(Matrix::from_vec(self.rows, self.cols, data?))
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
