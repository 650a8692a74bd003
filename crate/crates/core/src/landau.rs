//! Landau equations of a projective integral on the three charts, their branch
//! decomposition by α-support, and witness checks.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadform::ProjectiveIntegral;
use crate::symbolic::{parse_with_vars, vars_of};
use crate::{GaussianRational, Polynomial, Vars};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// (u, z) projective with a random affine chart.
    Projective,
    /// u = 1, first-type singularities.
    Finite,
    /// u = 0, second-type singularities.
    Infinity,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Projective => "projective",
            Chart::Finite => "finite",
            Chart::Infinity => "infinity",
        })
    }
}

impl FromStr for Chart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projective" => Ok(Chart::Projective),
            "finite" => Ok(Chart::Finite),
            "infinity" => Ok(Chart::Infinity),
            _ => Err(Error::Invalid(format!("unknown chart '{s}' (projective, finite, infinity)"))),
        }
    }
}

/// Names needed to decide physicality of a Feynman witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kinematics {
    pub loop_components: Vec<Vec<String>>,
    pub external_components: Vec<Vec<String>>,
    pub masses: Vec<String>,
}

/// Landau system: on-shell equations α_i·Q_i = 0 and Σ α_i ∂Q_i/2 = 0 on one chart.
///
/// All polynomials share `vars` = α ++ coords ++ params.
#[derive(Clone, Debug, PartialEq)]
pub struct LandauSystem {
    pub chart: Chart,
    pub aux: String,
    pub alpha: Vec<String>,
    /// Unknown coordinates on this chart.
    pub coords: Vec<String>,
    pub params: Vec<String>,
    pub vars: Vars,
    pub onshell: Vec<Polynomial>,
    /// Coordinate differentiated by each gradient row.
    pub row_vars: Vec<String>,
    /// `gradients[i][j]` = ½ ∂Q_i/∂w_j restricted to the chart.
    pub gradients: Vec<Vec<Polynomial>>,
    /// Finite chart only: ½ ∂Q_i/∂u at u = 1, implied by the others through Euler's identity.
    pub dropped: Option<Vec<Polynomial>>,
    pub kinematics: Option<Kinematics>,
}

impl LandauSystem {
    pub fn generate(integral: &ProjectiveIntegral, chart: Chart) -> Result<Self> {
        let n = integral.forms.len();
        let alpha: Vec<String> = (1..=n).map(|i| format!("alpha{i}")).collect();
        let aux = integral.aux.clone();
        let proj = &integral.coords;
        let params: Vec<String> = integral.params.to_vec();
        let coords: Vec<String> = match chart {
            Chart::Projective => proj.clone(),
            Chart::Finite | Chart::Infinity => proj[1..].to_vec(),
        };
        let row_vars: Vec<String> = match chart {
            Chart::Finite => proj[1..].to_vec(),
            Chart::Projective | Chart::Infinity => proj.clone(),
        };
        let mut names = alpha.clone();
        names.extend(coords.iter().cloned());
        names.extend(params.iter().cloned());
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Invalid(format!("symbol '{a}' is used twice")));
            }
        }
        let vars = vars_of(&names);
        let half = GaussianRational::from_frac(1, 2);
        let restrict = |p: &Polynomial| -> Result<Polynomial> {
            let p = match chart {
                Chart::Projective => p.clone(),
                Chart::Finite => p.substitute(&[(0, GaussianRational::from_int(1))]),
                Chart::Infinity => p.substitute(&[(0, GaussianRational::from_int(0))]),
            };
            Ok(p.with_vars(&vars)?)
        };
        let mut onshell = Vec::with_capacity(n);
        let mut gradients = Vec::with_capacity(n);
        let mut dropped = Vec::new();
        for q in integral.form_polynomials() {
            onshell.push(restrict(&q)?);
            let mut rows = Vec::with_capacity(row_vars.len());
            for w in &row_vars {
                rows.push(restrict(&q.differentiate(w)?.scale(&half))?);
            }
            gradients.push(rows);
            if chart == Chart::Finite {
                dropped.push(restrict(&q.differentiate(&aux)?.scale(&half))?);
            }
        }
        let kinematics = integral.origin.as_ref().map(|o| Kinematics {
            loop_components: o.loop_components.clone(),
            external_components: o.external_components.clone(),
            masses: o.masses.clone(),
        });
        Ok(LandauSystem {
            chart,
            aux,
            alpha,
            coords,
            params,
            vars,
            onshell,
            row_vars,
            gradients,
            dropped: (chart == Chart::Finite).then_some(dropped),
            kinematics,
        })
    }

    pub fn num_forms(&self) -> usize {
        self.alpha.len()
    }

    pub fn num_rows(&self) -> usize {
        self.row_vars.len()
    }

    fn alpha_poly(&self, i: usize) -> Polynomial {
        Polynomial::variable(&self.vars, i)
    }

    /// Σ_i α_i·½∂Q_i/∂w_j.
    pub fn gradient_row(&self, j: usize) -> Polynomial {
        let mut acc = Polynomial::zero(&self.vars);
        for (i, g) in self.gradients.iter().enumerate() {
            acc = &acc + &(&self.alpha_poly(i) * &g[j]);
        }
        acc
    }

    /// α_i·Q_i for every i, then the gradient rows.
    pub fn equations(&self) -> Vec<Polynomial> {
        let mut out: Vec<Polynomial> =
            self.onshell.iter().enumerate().map(|(i, q)| &self.alpha_poly(i) * q).collect();
        out.extend((0..self.num_rows()).map(|j| self.gradient_row(j)));
        out
    }

    /// Σ_i α_i·½∂Q_i/∂u at u = 1 on the finite chart.
    pub fn dropped_row(&self) -> Option<Polynomial> {
        let d = self.dropped.as_ref()?;
        let mut acc = Polynomial::zero(&self.vars);
        for (i, g) in d.iter().enumerate() {
            acc = &acc + &(&self.alpha_poly(i) * g);
        }
        Some(acc)
    }

    /// Whether the chart fixes a projective scale on the coordinates.
    pub fn coords_projective(&self) -> bool {
        self.chart != Chart::Finite
    }

    pub fn alpha_offset(&self) -> usize {
        0
    }

    pub fn coord_offset(&self) -> usize {
        self.alpha.len()
    }

    pub fn param_offset(&self) -> usize {
        self.alpha.len() + self.coords.len()
    }

    pub fn to_file(&self) -> SystemFile {
        let show = |p: &Polynomial| p.to_string();
        SystemFile {
            chart: self.chart,
            aux: self.aux.clone(),
            alpha: self.alpha.clone(),
            coordinates: self.coords.clone(),
            parameters: self.params.clone(),
            onshell: self.onshell.iter().map(show).collect(),
            gradient_rows: self.row_vars.clone(),
            gradients: self.gradients.iter().map(|r| r.iter().map(show).collect()).collect(),
            dropped: self.dropped.as_ref().map(|d| d.iter().map(show).collect()),
            kinematics: self.kinematics.clone(),
            equations: self.equations().iter().map(|e| format!("{e} = 0")).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable") + "\n"
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let file: SystemFile = serde_json::from_str(text).map_err(|e| crate::graph::json_error(text, &e))?;
        file.into_system()
    }

    /// Draw the branch for `support` (0-based form indices).
    pub fn branch(&self, id: usize, support: &[usize], seed: u64, redraw: u32) -> Branch {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, id as u64, redraw as u64));
        let alpha_chart = (0..support.len()).map(|_| random_gaussian_rational(&mut rng)).collect();
        let coord_chart =
            self.coords_projective().then(|| (0..self.coords.len()).map(|_| random_gaussian_rational(&mut rng)).collect());
        let unknowns = support.len() + self.coords.len();
        let norms = 1 + usize::from(self.coords_projective());
        let eqs = support.len() + self.num_rows();
        let rows = unknowns.saturating_sub(norms);
        let projection =
            (0..rows).map(|_| (0..eqs).map(|_| random_gaussian_rational(&mut rng)).collect()).collect();
        Branch { id, support: support.to_vec(), seed, redraw, alpha_chart, coord_chart, projection }
    }

    /// All 2^N − 1 branches for redraw `redraw`, ordered by support size then lexicographically.
    pub fn branches(&self, seed: u64, redraw: u32) -> Vec<Branch> {
        supports(self.num_forms())
            .iter()
            .enumerate()
            .map(|(k, s)| self.branch(k + 1, s, seed, redraw))
            .collect()
    }

    /// Exact branch equations over `vars`: Q_i for i ∈ S, then the gradient rows with α_i = 0 off S.
    pub fn branch_equations(&self, support: &[usize]) -> Vec<Polynomial> {
        let off: Vec<(usize, GaussianRational)> = (0..self.num_forms())
            .filter(|i| !support.contains(i))
            .map(|i| (i, GaussianRational::from_int(0)))
            .collect();
        let mut out: Vec<Polynomial> = support.iter().map(|&i| self.onshell[i].clone()).collect();
        out.extend((0..self.num_rows()).map(|j| self.gradient_row(j).substitute(&off)));
        out
    }

    /// Normalization rows ℓ_α(α_S) − 1 and, on projective charts, ℓ_z(coords) − 1.
    pub fn normalizations(&self, branch: &Branch) -> Vec<Polynomial> {
        let one = Polynomial::one(&self.vars);
        let mut la = Polynomial::zero(&self.vars);
        for (c, &i) in branch.alpha_chart.iter().zip(&branch.support) {
            la = &la + &Polynomial::variable(&self.vars, i).scale(c);
        }
        let mut out = vec![&la - &one];
        if let Some(cz) = &branch.coord_chart {
            let mut lz = Polynomial::zero(&self.vars);
            for (j, c) in cz.iter().enumerate() {
                lz = &lz + &Polynomial::variable(&self.vars, self.coord_offset() + j).scale(c);
            }
            out.push(&lz - &one);
        }
        out
    }

    /// Residuals of a candidate solution, disjunct by disjunct.
    pub fn verify(&self, w: &WitnessPoint, tau: f64) -> Result<VerifyReport> {
        let values = self.values_of(w)?;
        if w.alpha.iter().all(|a| *a == Complex64::new(0.0, 0.0)) {
            return Err(Error::Precondition("alpha vector is zero".into()));
        }
        let mut forms = Vec::with_capacity(self.num_forms());
        let mut worst: f64 = 0.0;
        for (i, q) in self.onshell.iter().enumerate() {
            let a = w.alpha[i].norm();
            let r = q.evaluate_slice(&values).norm();
            let disjunct = match (a <= tau, r <= tau) {
                (true, true) => Disjunct::Both,
                (true, false) => Disjunct::AlphaZero,
                (false, true) => Disjunct::OnShell,
                (false, false) => Disjunct::Neither,
            };
            worst = worst.max(a.min(r));
            forms.push(FormCheck { alpha_abs: a, onshell_residual: r, disjunct });
        }
        let rows: Vec<f64> = (0..self.num_rows()).map(|j| self.gradient_row(j).evaluate_slice(&values).norm()).collect();
        for r in &rows {
            worst = worst.max(*r);
        }
        let alpha_scale = w.alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let coord_scale = w.coords.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let alpha_nonzero = alpha_scale > 1e3 * tau;
        let coords_nonzero = !self.coords_projective() || coord_scale > 1e3 * tau;
        let dropped_row = self.dropped_row().map(|d| d.evaluate_slice(&values).norm());
        Ok(VerifyReport {
            forms,
            rows,
            dropped_row,
            alpha_nonzero,
            coords_nonzero,
            residual: worst,
            verified: worst < tau && alpha_nonzero && coords_nonzero,
        })
    }

    /// Values for `vars` in order.
    pub fn values_of(&self, w: &WitnessPoint) -> Result<Vec<Complex64>> {
        if w.alpha.len() != self.num_forms() || w.coords.len() != self.coords.len() || w.params.len() != self.params.len() {
            return Err(Error::Invalid(format!(
                "witness shape ({}, {}, {}) does not match system ({}, {}, {})",
                w.alpha.len(),
                w.coords.len(),
                w.params.len(),
                self.num_forms(),
                self.coords.len(),
                self.params.len()
            )));
        }
        let mut v = w.alpha.clone();
        v.extend(w.coords.iter().copied());
        v.extend(w.params.iter().copied());
        Ok(v)
    }

    /// Second-type systems must be free of mass symbols and of b-terms.
    pub fn mass_free_onshell(&self) -> bool {
        let Some(k) = &self.kinematics else { return true };
        let idx: Vec<usize> = k.masses.iter().filter_map(|m| self.vars.iter().position(|v| v == m)).collect();
        self.onshell.iter().all(|q| q.is_free_of(&idx))
    }
}

/// Supports of size 1..=n, by size then lexicographically.
pub fn supports(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u64..(1u64 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub(crate) fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Complex Gaussian rounded to a multiple of 1/32 in each part, never zero.
pub(crate) fn random_gaussian_rational(rng: &mut ChaCha8Rng) -> GaussianRational {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    let q = |x: f64| (x * 32.0).round() as i64;
    let (a, b) = (q(re), q(im));
    if a == 0 && b == 0 {
        return GaussianRational::from_frac(1, 32);
    }
    GaussianRational::new(
        num_rational::BigRational::new(a.into(), 32.into()),
        num_rational::BigRational::new(b.into(), 32.into()),
    )
}

/// One α-support with its seeded random charts and squaring projection.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// 1-based position in the branch order.
    pub id: usize,
    pub support: Vec<usize>,
    pub seed: u64,
    pub redraw: u32,
    pub alpha_chart: Vec<GaussianRational>,
    pub coord_chart: Option<Vec<GaussianRational>>,
    /// Rows combining the branch equations into a square system together with the normalizations.
    pub projection: Vec<Vec<GaussianRational>>,
}

impl Branch {
    pub fn support_label(&self) -> String {
        let s: Vec<String> = self.support.iter().map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", s.join(","))
    }
}

/// Numeric point (α, coords, params) for a system.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessPoint {
    pub alpha: Vec<Complex64>,
    pub coords: Vec<Complex64>,
    pub params: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disjunct {
    AlphaZero,
    OnShell,
    Both,
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormCheck {
    pub alpha_abs: f64,
    pub onshell_residual: f64,
    pub disjunct: Disjunct,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub forms: Vec<FormCheck>,
    pub rows: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropped_row: Option<f64>,
    pub alpha_nonzero: bool,
    pub coords_nonzero: bool,
    pub residual: f64,
    pub verified: bool,
}

/// On-disk Landau system.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub chart: Chart,
    pub aux: String,
    pub alpha: Vec<String>,
    pub coordinates: Vec<String>,
    pub parameters: Vec<String>,
    pub onshell: Vec<String>,
    pub gradient_rows: Vec<String>,
    pub gradients: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinematics: Option<Kinematics>,
    /// Human-readable equations; ignored when reading.
    #[serde(default)]
    pub equations: Vec<String>,
}

impl SystemFile {
    pub fn into_system(self) -> Result<LandauSystem> {
        let mut names = self.alpha.clone();
        names.extend(self.coordinates.iter().cloned());
        names.extend(self.parameters.iter().cloned());
        let vars = vars_of(&names);
        let parse = |s: &String| parse_with_vars(s, &vars).map_err(Error::Parse);
        let onshell = self.onshell.iter().map(parse).collect::<Result<Vec<_>>>()?;
        let gradients = self
            .gradients
            .iter()
            .map(|r| r.iter().map(parse).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let dropped = match &self.dropped {
            Some(d) => Some(d.iter().map(parse).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        if onshell.len() != self.alpha.len()
            || gradients.len() != self.alpha.len()
            || gradients.iter().any(|r| r.len() != self.gradient_rows.len())
        {
            return Err(Error::Invalid("system file has inconsistent sizes".into()));
        }
        Ok(LandauSystem {
            chart: self.chart,
            aux: self.aux,
            alpha: self.alpha,
            coords: self.coordinates,
            params: self.parameters,
            vars,
            onshell,
            row_vars: self.gradient_rows,
            gradients,
            dropped,
            kinematics: self.kinematics,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn system(chart: Chart) -> LandauSystem {
        LandauSystem::generate(&fixtures::simple().into_integral().unwrap(), chart).unwrap()
    }

    #[test]
    fn simple_projective_equations() {
        let s = system(Chart::Projective);
        let eqs: Vec<String> = s.equations().iter().map(|e| e.to_string()).collect();
        assert_eq!(eqs, ["alpha1*z0^2*t^2 + alpha1*z1^2", "alpha1*z0*t^2", "alpha1*z1"]);
    }

    #[test]
    fn charts_restrict_aux() {
        let f = system(Chart::Finite);
        assert_eq!(f.coords, ["z1"]);
        assert_eq!(f.row_vars, ["z1"]);
        assert_eq!(f.onshell[0].to_string(), "z1^2 + t^2");
        assert_eq!(f.dropped.as_ref().unwrap()[0].to_string(), "t^2");
        let i = system(Chart::Infinity);
        assert_eq!(i.row_vars, ["z0", "z1"]);
        assert_eq!(i.onshell[0].to_string(), "z1^2");
        assert!(i.gradients[0][0].is_zero());
    }

    #[test]
    fn text_round_trip() {
        for chart in [Chart::Projective, Chart::Finite, Chart::Infinity] {
            let s = LandauSystem::generate(&fixtures::two_quadrics().into_integral().unwrap(), chart).unwrap();
            assert_eq!(LandauSystem::from_text(&s.to_text()).unwrap(), s);
        }
    }

    #[test]
    fn branch_order_and_shape() {
        assert_eq!(supports(2), vec![vec![0], vec![1], vec![0, 1]]);
        let s = LandauSystem::generate(&fixtures::two_quadrics().into_integral().unwrap(), Chart::Projective).unwrap();
        let bs = s.branches(7, 0);
        assert_eq!(bs.len(), 3);
        assert_eq!(bs[2].support_label(), "{1,2}");
        // unknowns α1, α2, z0, z1, z2; two normalizations
        assert_eq!(bs[2].projection.len(), 3);
        assert_eq!(bs[2].projection[0].len(), 2 + 3);
        assert_eq!(s.branches(7, 0), bs);
        assert_ne!(s.branches(7, 1), bs);
    }
}
