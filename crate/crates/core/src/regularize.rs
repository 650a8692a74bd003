//! Diagonalizing bases of symmetric matrix families and the regulator A(t).

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::quadform::{classify_point, is_positive_semidefinite, Classification, ProjectiveIntegral, QuadraticFamily};
use crate::symbolic::{vars_of, ExactMatrix, Matrix, PolyMatrix, Polynomial, Vars};
use crate::GaussianRational;

/// Name of the regularization parameter adjoined by [`regularize_integral`].
pub const EPSILON: &str = "eps";

#[derive(Clone, Debug, PartialEq)]
pub struct Diagonalization {
    /// Columns v_1 … v_n, polynomial in the parameters.
    pub basis: PolyMatrix,
    /// λ_i = v_iᵀ M v_i.
    pub diagonal: Vec<Polynomial>,
    /// Non-constant pivots and diagonal values whose zeros bound the exceptional locus.
    pub exceptional: Vec<Polynomial>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegulatorFamily {
    pub diagonalization: Diagonalization,
    /// adj(T)ᵀ · diag(0_k, 1_{n−k}) · adj(T).
    pub a: PolyMatrix,
    /// Number of diagonal entries that are not identically zero.
    pub rank: usize,
}

fn value_at(p: &Polynomial, point: &[(usize, GaussianRational)]) -> Option<GaussianRational> {
    p.substitute(point).constant_value()
}

fn param_assignment(vars: &Vars, point: &[(String, GaussianRational)]) -> Vec<(usize, GaussianRational)> {
    point.iter().filter_map(|(n, v)| vars.iter().position(|x| x == n).map(|i| (i, v.clone()))).collect()
}

fn is_positive_rational(c: &GaussianRational) -> bool {
    c.is_real() && c.re.is_positive()
}

/// Candidate vectors e_i, then e_i + e_j, then e_i + e_j + e_l.
fn candidate_tiers(r: usize) -> Vec<Vec<Vec<usize>>> {
    let t1 = (0..r).map(|i| vec![i]).collect();
    let t2 = (0..r).flat_map(|i| (i + 1..r).map(move |j| vec![i, j])).collect();
    let t3 = (0..r)
        .flat_map(|i| (i + 1..r).flat_map(move |j| (j + 1..r).map(move |l| vec![i, j, l])))
        .collect();
    vec![t1, t2, t3]
}

fn diag_check(m: &PolyMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Symbolic(crate::SymbolicError::NotSquare { rows: m.rows(), cols: m.cols() }));
    }
    if let Some((i, j)) = m.asymmetry() {
        return Err(Error::NotSymmetric(i, j));
    }
    Ok(())
}

/// Recursive diagonalization over the polynomial ring.
///
/// Each step picks v with q(v) = vᵀM'v ≢ 0 from the candidate tiers (preferring,
/// within a tier, positivity at `prefer_point`, then constant values, then low
/// degree), sets a = M'v, picks a pivot p with a_p ≢ 0 and completes v by the
/// vectors a_p e_j − a_j e_p (j ≠ p), simplified when a_j ≡ 0 or a_p | a_j.
pub fn diagonalize_family(m: &PolyMatrix, vars: &Vars, prefer_point: Option<&[(String, GaussianRational)]>) -> Result<Diagonalization> {
    diag_check(m)?;
    let n = m.rows();
    let point = prefer_point.map(|p| param_assignment(vars, p));
    let real_at_point = match (&point, prefer_point) {
        (Some(pt), Some(_)) => m.entries().iter().all(|e| value_at(e, pt).is_some_and(|c| c.is_real())),
        _ => false,
    };
    let zero = Polynomial::zero(vars);
    let one = Polynomial::one(vars);

    // Current subspace basis (n × r) and restricted form (r × r).
    let mut current: PolyMatrix = PolyMatrix::poly_identity(vars, n);
    let mut restricted = m.clone();
    let mut columns: Vec<Vec<Polynomial>> = Vec::new();
    let mut diagonal = Vec::new();
    let mut exceptional: Vec<Polynomial> = Vec::new();

    while restricted.rows() > 0 {
        let r = restricted.rows();
        let mut chosen: Option<(Vec<Polynomial>, Polynomial)> = None;
        for tier in candidate_tiers(r) {
            let mut best: Option<((u8, u8, u32, usize), Vec<Polynomial>, Polynomial)> = None;
            for (idx, support) in tier.iter().enumerate() {
                let v: Vec<Polynomial> = (0..r).map(|i| if support.contains(&i) { one.clone() } else { zero.clone() }).collect();
                let q = restricted.bilinear(&v, &v);
                if q.is_zero() {
                    continue;
                }
                let positive = match (&point, real_at_point) {
                    (Some(pt), true) => value_at(&q, pt).is_some_and(|c| is_positive_rational(&c)),
                    _ => false,
                };
                let key = (u8::from(!positive), u8::from(!q.is_constant()), q.total_degree(), idx);
                if best.as_ref().is_none_or(|(k, ..)| key < *k) {
                    best = Some((key, v, q));
                }
            }
            if let Some((_, v, q)) = best {
                chosen = Some((v, q));
                break;
            }
        }
        let Some((v, lambda)) = chosen else {
            // restricted form vanishes identically: remaining directions are null
            for j in 0..r {
                columns.push(current.column(j));
                diagonal.push(zero.clone());
            }
            break;
        };
        if r > 1 && !lambda.is_constant() {
            exceptional.push(lambda.clone());
        }
        let a: Vec<Polynomial> = (0..r)
            .map(|i| (0..r).fold(zero.clone(), |acc, j| if v[j].is_zero() { acc } else { &acc + &(restricted.get(i, j) * &v[j]) }))
            .collect();
        let pivot_ok = |p: &Polynomial| {
            !p.is_zero()
                && match &point {
                    Some(pt) => value_at(p, pt).is_none_or(|c| !c.is_zero()),
                    None => true,
                }
        };
        let mut candidates: Vec<usize> = (0..r).filter(|&j| pivot_ok(&a[j])).collect();
        if candidates.is_empty() {
            candidates = (0..r).filter(|&j| !a[j].is_zero()).collect();
        }
        let p = *candidates
            .iter()
            .min_by_key(|&&j| (u8::from(!a[j].is_constant()), a[j].total_degree(), j))
            .expect("a = M'v is nonzero because vᵀM'v ≠ 0");
        if r > 1 && !a[p].is_constant() {
            exceptional.push(a[p].clone());
        }
        // Step basis in current coordinates: v, then completions for j ≠ p.
        let mut step: Vec<Vec<Polynomial>> = vec![v];
        for j in (0..r).filter(|&j| j != p) {
            let mut b = vec![zero.clone(); r];
            if a[j].is_zero() {
                b[j] = one.clone();
            } else if let Some(q) = a[j].div_exact(&a[p]) {
                b[j] = one.clone();
                b[p] = -&q;
            } else {
                b[j] = a[p].clone();
                b[p] = -&a[j];
            }
            step.push(b);
        }
        let step_m = Matrix::from_fn(r, r, |i, j| step[j][i].clone());
        let lifted = current.mul_mat(&step_m)?;
        columns.push(lifted.column(0));
        diagonal.push(lambda);
        if r == 1 {
            break;
        }
        let rest: Vec<usize> = (1..r).collect();
        let all_rows: Vec<usize> = (0..n).collect();
        current = lifted.submatrix(&all_rows, &rest);
        let step_rest = step_m.submatrix(&(0..r).collect::<Vec<_>>(), &rest);
        restricted = step_rest.transpose().mul_mat(&restricted)?.mul_mat(&step_rest)?;
    }
    let basis = Matrix::from_fn(n, n, |i, j| columns[j][i].clone());
    exceptional.sort_by_key(|p| p.to_string());
    exceptional.dedup();
    Ok(Diagonalization { basis, diagonal, exceptional })
}

/// A(t) = adj(T)ᵀ · diag(mask) · adj(T) with mask_i = 1 iff λ_i ≡ 0.
pub fn build_regulator(m: &PolyMatrix, vars: &Vars, prefer_point: Option<&[(String, GaussianRational)]>) -> Result<RegulatorFamily> {
    let d = diagonalize_family(m, vars, prefer_point)?;
    let n = m.rows();
    let rank = d.diagonal.iter().filter(|l| !l.is_zero()).count();
    let zero = Polynomial::zero(vars);
    let a = if rank == n {
        Matrix::from_fn(n, n, |_, _| zero.clone())
    } else {
        let adj = d.basis.adjugate(vars)?;
        let null: Vec<usize> = (0..n).filter(|&i| d.diagonal[i].is_zero()).collect();
        Matrix::from_fn(n, n, |i, j| {
            null.iter().fold(zero.clone(), |acc, &k| &acc + &(adj.get(k, i) * adj.get(k, j)))
        })
    };
    Ok(RegulatorFamily { diagonalization: d, a, rank })
}

/// PSD + PSD with trivial joint kernel: M + εA is positive definite for every ε > 0.
pub fn certify_positive_for_all_eps(m0: &ExactMatrix, a0: &ExactMatrix) -> bool {
    if !is_positive_semidefinite(m0) || !is_positive_semidefinite(a0) {
        return false;
    }
    let n = m0.rows();
    let stacked = Matrix::from_fn(2 * n, n, |i, j| if i < n { m0.get(i, j).clone() } else { a0.get(i - n, j).clone() });
    stacked.rank() == n
}

/// Regularized integral with the forms M_i(t) + ε·A_i(t) and ε adjoined as the last parameter.
#[derive(Clone, Debug)]
pub struct RegularizedIntegral {
    pub integral: ProjectiveIntegral,
    pub regulators: Vec<RegulatorFamily>,
}

pub fn regularize_integral(i: &ProjectiveIntegral, t0: Option<&[(String, GaussianRational)]>) -> Result<RegularizedIntegral> {
    if let Some(point) = t0 {
        match classify_point(&i.forms, point)? {
            Classification::Regular | Classification::QuasiRegular => {}
            Classification::Neither { reason } => {
                return Err(Error::Precondition(format!("point is not quasi-regular: {reason}")));
            }
        }
    }
    if i.params.iter().any(|p| p == EPSILON) || i.coords.iter().any(|p| p == EPSILON) {
        return Err(Error::Invalid(format!("symbol '{EPSILON}' is reserved for the regulator")));
    }
    let mut names = i.params.to_vec();
    names.push(EPSILON.to_string());
    let params = vars_of(&names);
    let eps = Polynomial::var(&params, EPSILON)?;
    let mut forms = Vec::with_capacity(i.forms.len());
    let mut regulators = Vec::with_capacity(i.forms.len());
    for f in &i.forms {
        let reg = build_regulator(&f.m, &f.params, t0)?;
        let n = f.n();
        let m = Matrix::from_fn(n, n, |r, c| {
            let base = f.m.get(r, c).with_vars(&params).expect("parameters embed");
            let extra = reg.a.get(r, c).with_vars(&params).expect("parameters embed");
            if extra.is_zero() {
                base
            } else {
                &base + &(&eps * &extra)
            }
        });
        forms.push(QuadraticFamily {
            coords: f.coords.clone(),
            params: params.clone(),
            m,
            a: vec![Polynomial::zero(&params); n],
            b: Polynomial::zero(&params),
            exponent: f.exponent.clone(),
        });
        regulators.push(reg);
    }
    let integral = ProjectiveIntegral {
        aux: i.aux.clone(),
        coords: i.coords.clone(),
        params,
        forms,
        numerator_degree: i.numerator_degree,
        origin: i.origin.clone(),
    };
    Ok(RegularizedIntegral { integral, regulators })
}

/// TᵀMT, for verification.
pub fn congruence(m: &PolyMatrix, t: &PolyMatrix) -> Result<PolyMatrix> {
    Ok(t.transpose().mul_mat(m)?.mul_mat(t)?)
}

/// True if TᵀMT is diagonal with the recorded entries.
pub fn verify_diagonalization(m: &PolyMatrix, d: &Diagonalization) -> Result<bool> {
    let c = congruence(m, &d.basis)?;
    let n = m.rows();
    Ok((0..n).all(|i| (0..n).all(|j| if i == j { *c.get(i, i) == d.diagonal[i] } else { c.get(i, j).is_zero() })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_with_vars;

    fn pm(entries: &[&str], vars: &Vars) -> PolyMatrix {
        let n = (entries.len() as f64).sqrt() as usize;
        Matrix::from_vec(n, n, entries.iter().map(|s| parse_with_vars(s, vars).unwrap()).collect())
    }

    #[test]
    fn identity_is_already_diagonal() {
        let v = vars_of(&["t"]);
        let m = PolyMatrix::poly_identity(&v, 3);
        let d = diagonalize_family(&m, &v, None).unwrap();
        assert_eq!(d.basis, m);
        assert!(d.exceptional.is_empty());
        let r = build_regulator(&m, &v, None).unwrap();
        assert!(r.a.is_zero_matrix());
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn bubble_like_block() {
        let v = vars_of(&["t"]);
        let m = pm(&["1", "t/2", "t/2", "1"], &v);
        let d = diagonalize_family(&m, &v, None).unwrap();
        assert_eq!(d.diagonal[0].to_string(), "1");
        assert_eq!(d.diagonal[1].to_string(), "-1/4*t^2 + 1");
        assert!(verify_diagonalization(&m, &d).unwrap());
        assert!(d.exceptional.is_empty());
    }

    #[test]
    fn off_diagonal_needs_sum_vector() {
        let v = vars_of(&["t"]);
        let m = pm(&["0", "t", "t", "0"], &v);
        let d = diagonalize_family(&m, &v, None).unwrap();
        assert_eq!(d.basis.column(0).iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["1", "1"]);
        assert_eq!(d.diagonal[0].to_string(), "2*t");
        assert_eq!(d.diagonal[1].to_string(), "-2*t");
        assert_eq!(d.exceptional.iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["2*t", "t"]);
    }

    #[test]
    fn zero_matrix_regulator_is_identity() {
        let v = vars_of(&["t"]);
        let m = pm(&["0", "0", "0", "0"], &v);
        let r = build_regulator(&m, &v, None).unwrap();
        assert_eq!(r.rank, 0);
        assert_eq!(r.a, PolyMatrix::poly_identity(&v, 2));
    }

    #[test]
    fn rejects_asymmetric() {
        let v = vars_of(&["t"]);
        let m = pm(&["0", "t", "1", "0"], &v);
        assert!(matches!(diagonalize_family(&m, &v, None), Err(Error::NotSymmetric(1, 0))));
    }
}
