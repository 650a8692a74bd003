//! Numeric probes of Landau systems: multi-start damped Newton on each branch,
//! Gauss-Newton polish on the full overdetermined system, exact-form residual check.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landau::{mix, Branch, Chart, LandauSystem, WitnessPoint};
use crate::{GaussianRational, Polynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub seed: u64,
    pub starts: usize,
    pub max_iters: usize,
    pub polish_iters: usize,
    pub max_halvings: u32,
    /// Newton stops once the projected residual is below this.
    pub residual_target: f64,
    /// Acceptance threshold on the exact-form residual.
    pub tau: f64,
    pub cluster_radius: f64,
    /// Extra chart draws for a branch that produced nothing.
    pub redraws: u32,
    /// Keep going after the first witness.
    pub exhaustive: bool,
    /// Iterates beyond this norm count as diverged.
    pub divergence: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 20240501,
            starts: 8,
            max_iters: 60,
            polish_iters: 60,
            max_halvings: 30,
            residual_target: 1e-13,
            tau: 1e-9,
            cluster_radius: 1e-6,
            redraws: 3,
            exhaustive: false,
            divergence: 1e8,
        }
    }
}

/// Polynomial with parameters folded in, over the unknowns of one problem.
#[derive(Clone, Debug)]
struct NumPoly {
    terms: Vec<(Complex64, Vec<(usize, u32)>)>,
}

impl NumPoly {
    /// `slot[v]` is `Ok(position)` for unknowns and `Err(value)` for fixed variables.
    fn compile(p: &Polynomial, slot: &[std::result::Result<usize, Complex64>]) -> NumPoly {
        let mut acc: HashMap<Vec<(usize, u32)>, Complex64> = HashMap::new();
        for (m, c) in p.terms() {
            let mut coeff = c.to_complex();
            let mut mono = Vec::new();
            for (v, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match slot[v] {
                    Ok(pos) => mono.push((pos, k)),
                    Err(val) => coeff *= val.powu(k),
                }
            }
            *acc.entry(mono).or_insert(Complex64::new(0.0, 0.0)) += coeff;
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).map(|(m, c)| (c, m)).collect();
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        NumPoly { terms }
    }

    fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (c, mono) in &self.terms {
            let mut t = *c;
            for &(i, k) in mono {
                t *= if k == 1 { x[i] } else { x[i].powu(k) };
            }
            s += t;
        }
        s
    }
}

/// Compiled equations together with their Jacobian.
#[derive(Clone, Debug)]
struct NumSystem {
    eqs: Vec<NumPoly>,
    jac: Vec<Vec<NumPoly>>,
}

impl NumSystem {
    fn compile(polys: &[Polynomial], unknowns: &[usize], slot: &[std::result::Result<usize, Complex64>]) -> Self {
        let eqs = polys.iter().map(|p| NumPoly::compile(p, slot)).collect();
        let jac = polys
            .iter()
            .map(|p| unknowns.iter().map(|&v| NumPoly::compile(&p.diff_index(v), slot)).collect())
            .collect();
        NumSystem { eqs, jac }
    }

    fn values(&self, x: &[Complex64]) -> DVector<Complex64> {
        DVector::from_iterator(self.eqs.len(), self.eqs.iter().map(|e| e.eval(x)))
    }

    fn jacobian(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.jac.first().map_or(0, Vec::len);
        DMatrix::from_fn(self.eqs.len(), n, |i, j| self.jac[i][j].eval(x))
    }
}

/// One branch of a Landau system at a fixed parameter point.
pub struct BranchProblem<'a> {
    pub sys: &'a LandauSystem,
    pub branch: Branch,
    pub params: Vec<Complex64>,
    /// Variable indices of the unknowns: α over the support, then the chart coordinates.
    pub unknowns: Vec<usize>,
    exact: Vec<Polynomial>,
    landau: NumSystem,
    norms: NumSystem,
    projection: DMatrix<Complex64>,
}

fn cvec(v: &[GaussianRational]) -> Vec<Complex64> {
    v.iter().map(GaussianRational::to_complex).collect()
}

impl<'a> BranchProblem<'a> {
    pub fn new(sys: &'a LandauSystem, branch: Branch, params: &[Complex64]) -> Result<Self> {
        if params.len() != sys.params.len() {
            return Err(Error::Invalid(format!("expected {} parameter values, got {}", sys.params.len(), params.len())));
        }
        let mut unknowns: Vec<usize> = branch.support.clone();
        unknowns.extend(sys.coord_offset()..sys.param_offset());
        let zero = Complex64::new(0.0, 0.0);
        let slot: Vec<std::result::Result<usize, Complex64>> = (0..sys.vars.len())
            .map(|v| {
                if let Some(p) = unknowns.iter().position(|&u| u == v) {
                    Ok(p)
                } else if v >= sys.param_offset() {
                    Err(params[v - sys.param_offset()])
                } else {
                    Err(zero)
                }
            })
            .collect();
        let exact = sys.branch_equations(&branch.support);
        let landau = NumSystem::compile(&exact, &unknowns, &slot);
        let norms = NumSystem::compile(&sys.normalizations(&branch), &unknowns, &slot);
        let rows = branch.projection.len();
        let cols = exact.len();
        let projection = DMatrix::from_fn(rows, cols, |i, j| branch.projection[i][j].to_complex());
        Ok(BranchProblem { sys, branch, params: params.to_vec(), unknowns, exact, landau, norms, projection })
    }

    pub fn dim(&self) -> usize {
        self.unknowns.len()
    }

    /// Normalizations followed by the branch equations.
    fn full(&self, x: &[Complex64]) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let (fn_, jn) = (self.norms.values(x), self.norms.jacobian(x));
        let (fl, jl) = (self.landau.values(x), self.landau.jacobian(x));
        let f = DVector::from_iterator(fn_.len() + fl.len(), fn_.iter().chain(fl.iter()).copied());
        let mut j = DMatrix::zeros(jn.nrows() + jl.nrows(), self.dim());
        j.rows_mut(0, jn.nrows()).copy_from(&jn);
        j.rows_mut(jn.nrows(), jl.nrows()).copy_from(&jl);
        (f, j)
    }

    /// Square system: normalizations, then the projected branch equations.
    fn projected(&self, x: &[Complex64]) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let (fn_, jn) = (self.norms.values(x), self.norms.jacobian(x));
        let fl = &self.projection * self.landau.values(x);
        let jl = &self.projection * self.landau.jacobian(x);
        let f = DVector::from_iterator(fn_.len() + fl.len(), fn_.iter().chain(fl.iter()).copied());
        let mut j = DMatrix::zeros(jn.nrows() + jl.nrows(), self.dim());
        j.rows_mut(0, jn.nrows()).copy_from(&jn);
        j.rows_mut(jn.nrows(), jl.nrows()).copy_from(&jl);
        (f, j)
    }

    fn all_values(&self, x: &[Complex64]) -> Vec<Complex64> {
        let sys = self.sys;
        let mut v = vec![Complex64::new(0.0, 0.0); sys.vars.len()];
        for (p, &u) in self.unknowns.iter().enumerate() {
            v[u] = x[p];
        }
        v[sys.param_offset()..].copy_from_slice(&self.params);
        v
    }

    /// Max-norm of the unprojected branch equations, evaluated from the exact polynomials.
    pub fn exact_residual(&self, x: &[Complex64]) -> f64 {
        let v = self.all_values(x);
        self.exact.iter().map(|p| p.evaluate_slice(&v).norm()).fold(0.0, f64::max)
    }

    pub fn witness_point(&self, x: &[Complex64]) -> WitnessPoint {
        let v = self.all_values(x);
        let sys = self.sys;
        WitnessPoint {
            alpha: v[..sys.coord_offset()].to_vec(),
            coords: v[sys.coord_offset()..sys.param_offset()].to_vec(),
            params: self.params.clone(),
        }
    }

    /// Seeded complex Gaussian start, rescaled onto the normalization charts.
    pub fn start(&self, cfg: &SolveConfig, index: usize) -> Vec<Complex64> {
        let b = &self.branch;
        let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed ^ 0x5EED, ((b.id as u64) << 8) | b.redraw as u64, index as u64));
        let mut x: Vec<Complex64> = (0..self.dim())
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let k = b.support.len();
        rescale(&mut x[..k], &cvec(&b.alpha_chart));
        if let Some(cz) = &b.coord_chart {
            rescale(&mut x[k..], &cvec(cz));
        }
        x
    }

    /// Damped Newton on the square projected system; residual 2-norms per iterate.
    pub fn newton(&self, x0: &[Complex64], cfg: &SolveConfig) -> (Vec<Complex64>, Vec<f64>) {
        damped(x0, |x| self.projected(x), cfg.max_iters, cfg.residual_target, cfg)
    }

    /// Gauss-Newton on normalizations plus all branch equations.
    pub fn polish(&self, x0: &[Complex64], cfg: &SolveConfig) -> (Vec<Complex64>, Vec<f64>) {
        damped(x0, |x| self.full(x), cfg.polish_iters, cfg.residual_target, cfg)
    }
}

fn rescale(x: &mut [Complex64], chart: &[Complex64]) {
    let l: Complex64 = x.iter().zip(chart).map(|(a, c)| a * c).sum();
    if l.norm() > 1e-3 {
        for a in x.iter_mut() {
            *a /= l;
        }
    }
}

fn min_norm_step(f: &DVector<Complex64>, j: DMatrix<Complex64>) -> Option<DVector<Complex64>> {
    let svd = j.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 || !smax.is_finite() {
        return None;
    }
    svd.solve(f, smax * 1e-13).ok()
}

/// Newton/Gauss-Newton with min-norm steps and step halving; stops on convergence or stall.
fn damped(
    x0: &[Complex64],
    system: impl Fn(&[Complex64]) -> (DVector<Complex64>, DMatrix<Complex64>),
    iters: usize,
    target: f64,
    cfg: &SolveConfig,
) -> (Vec<Complex64>, Vec<f64>) {
    let mut x = x0.to_vec();
    let (mut f, mut j) = system(&x);
    let mut r = f.norm();
    let mut trace = vec![r];
    for _ in 0..iters {
        if !r.is_finite() || f.camax() < target {
            break;
        }
        let Some(step) = min_norm_step(&f, j.clone()) else { break };
        let mut s = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let xn: Vec<Complex64> = x.iter().zip(step.iter()).map(|(a, d)| a - d * s).collect();
            let (fnew, jnew) = system(&xn);
            let rn = fnew.norm();
            if rn < r {
                accepted = Some((xn, fnew, jnew, rn));
                break;
            }
            s *= 0.5;
        }
        let Some((xn, fnew, jnew, rn)) = accepted else { break };
        let stalled = rn > 0.999 * r;
        x = xn;
        f = fnew;
        j = jnew;
        r = rn;
        trace.push(r);
        if stalled || x.iter().any(|a| a.norm() > cfg.divergence) {
            break;
        }
    }
    (x, trace)
}

/// A verified solution of one branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub chart: Chart,
    pub branch: usize,
    pub support: Vec<usize>,
    pub redraw: u32,
    pub start: usize,
    pub point: WitnessPoint,
    pub residual: f64,
}

impl Witness {
    pub fn to_file(&self, sys: &LandauSystem) -> WitnessFile {
        let pair = |v: &[Complex64]| v.iter().map(|z| CNum::Pair([z.re, z.im])).collect();
        WitnessFile {
            chart: Some(self.chart),
            branch: Some(self.branch),
            support: Some(self.support.iter().map(|i| i + 1).collect()),
            residual: Some(self.residual),
            alpha_names: Some(sys.alpha.clone()),
            coordinate_names: Some(sys.coords.clone()),
            parameter_names: Some(sys.params.clone()),
            alpha: pair(&self.point.alpha),
            coordinates: pair(&self.point.coords),
            parameters: pair(&self.point.params),
        }
    }
}

/// Complex number on disk: `[re, im]`, a bare real, or an exact literal such as `"3i"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CNum {
    Pair([f64; 2]),
    Real(f64),
    Text(String),
}

impl CNum {
    pub fn value(&self) -> Result<Complex64> {
        match self {
            CNum::Pair([a, b]) => Ok(Complex64::new(*a, *b)),
            CNum::Real(a) => Ok(Complex64::new(*a, 0.0)),
            CNum::Text(s) => Ok(s.parse::<GaussianRational>().map_err(Error::Parse)?.to_complex()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<Chart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter_names: Option<Vec<String>>,
    pub alpha: Vec<CNum>,
    pub coordinates: Vec<CNum>,
    pub parameters: Vec<CNum>,
}

impl WitnessFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::graph::json_error(text, &e))
    }

    pub fn point(&self) -> Result<WitnessPoint> {
        let conv = |v: &[CNum]| v.iter().map(CNum::value).collect::<Result<Vec<_>>>();
        Ok(WitnessPoint { alpha: conv(&self.alpha)?, coords: conv(&self.coordinates)?, params: conv(&self.parameters)? })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchStat {
    pub branch: usize,
    pub support: Vec<usize>,
    pub draws: u32,
    pub starts: usize,
    pub newton_converged: usize,
    pub best_residual: f64,
    pub witnesses: usize,
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub chart: Chart,
    pub params: Vec<Complex64>,
    pub member: bool,
    pub witnesses: Vec<Witness>,
    pub branches: Vec<BranchStat>,
}

struct Attempt {
    x: Vec<Complex64>,
    residual: f64,
    converged: bool,
    start: usize,
}

/// All starts of one branch draw, in start order.
fn attempts(problem: &BranchProblem, cfg: &SolveConfig) -> Vec<Attempt> {
    (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let x0 = problem.start(cfg, s);
            let (x1, trace) = problem.newton(&x0, cfg);
            let converged = trace.last().is_some_and(|r| *r < 1e-8);
            let (x2, _) = problem.polish(&x1, cfg);
            let mut residual = problem.exact_residual(&x2);
            if x2.iter().any(|a| !a.is_finite() || a.norm() > cfg.divergence) {
                residual = f64::INFINITY;
            }
            Attempt { x: x2, residual, converged, start: s }
        })
        .collect()
}

fn cluster(mut ws: Vec<Witness>, radius: f64) -> Vec<Witness> {
    ws.sort_by(|a, b| a.residual.total_cmp(&b.residual).then(a.start.cmp(&b.start)));
    let mut out: Vec<Witness> = Vec::new();
    for w in ws {
        let close = out.iter().any(|o| {
            o.branch == w.branch && {
                let d = o.point.alpha.iter().zip(&w.point.alpha)
                    .chain(o.point.coords.iter().zip(&w.point.coords))
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                d < radius
            }
        });
        if !close {
            out.push(w);
        }
    }
    out.sort_by(|a, b| a.branch.cmp(&b.branch).then(a.start.cmp(&b.start)));
    out
}

/// Solve one branch, re-drawing its charts up to `cfg.redraws` times while nothing verifies.
pub fn solve_branch(sys: &LandauSystem, support: &[usize], id: usize, params: &[Complex64], cfg: &SolveConfig) -> Result<(Vec<Witness>, BranchStat)> {
    let mut stat = BranchStat {
        branch: id,
        support: support.iter().map(|i| i + 1).collect(),
        draws: 0,
        starts: 0,
        newton_converged: 0,
        best_residual: f64::INFINITY,
        witnesses: 0,
    };
    for redraw in 0..=cfg.redraws {
        let problem = BranchProblem::new(sys, sys.branch(id, support, cfg.seed, redraw), params)?;
        stat.draws += 1;
        let found: Vec<Witness> = attempts(&problem, cfg)
            .into_iter()
            .inspect(|a| {
                stat.starts += 1;
                stat.newton_converged += usize::from(a.converged);
                stat.best_residual = stat.best_residual.min(a.residual);
            })
            .filter(|a| a.residual < cfg.tau && is_nondegenerate(&problem, &a.x, cfg.tau))
            .map(|a| Witness {
                chart: sys.chart,
                branch: id,
                support: support.to_vec(),
                redraw,
                start: a.start,
                point: problem.witness_point(&a.x),
                residual: a.residual,
            })
            .collect();
        if !found.is_empty() {
            let found = cluster(found, cfg.cluster_radius);
            stat.witnesses = found.len();
            return Ok((found, stat));
        }
    }
    Ok((Vec::new(), stat))
}

/// α on the support and (on projective charts) the coordinates must stay away from zero.
fn is_nondegenerate(problem: &BranchProblem, x: &[Complex64], tau: f64) -> bool {
    let k = problem.branch.support.len();
    let amax = x[..k].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let zmax = x[k..].iter().map(|a| a.norm()).fold(0.0, f64::max);
    amax > 1e3 * tau && (!problem.sys.coords_projective() || zmax > 1e3 * tau)
}

/// Search every branch for a verified witness at one parameter point.
pub fn membership_test(sys: &LandauSystem, params: &[Complex64], cfg: &SolveConfig) -> Result<MembershipReport> {
    let mut witnesses = Vec::new();
    let mut branches = Vec::new();
    for (k, support) in crate::landau::supports(sys.num_forms()).iter().enumerate() {
        let (ws, stat) = solve_branch(sys, support, k + 1, params, cfg)?;
        branches.push(stat);
        witnesses.extend(ws);
        if !witnesses.is_empty() && !cfg.exhaustive {
            break;
        }
    }
    Ok(MembershipReport { chart: sys.chart, params: params.to_vec(), member: !witnesses.is_empty(), witnesses, branches })
}

/// Membership at many points, in parallel; results in input order.
pub fn scan(sys: &LandauSystem, points: &[Vec<Complex64>], cfg: &SolveConfig) -> Result<Vec<MembershipReport>> {
    points.par_iter().map(|p| membership_test(sys, p, cfg)).collect()
}

/// Multiplier per unknown for the Minkowski real form: i for 0-components of loop momenta, else 1.
fn real_multipliers(sys: &LandauSystem, unknowns: &[usize]) -> Vec<Complex64> {
    let zeroth: Vec<&String> = sys
        .kinematics
        .as_ref()
        .map(|k| k.loop_components.iter().filter_map(|c| c.first()).collect())
        .unwrap_or_default();
    unknowns
        .iter()
        .map(|&v| if zeroth.contains(&&sys.vars[v]) { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) })
        .collect()
}

/// Branch equations in real unknowns y with x = c·y, split into real and imaginary parts.
struct RealProblem<'p, 'a> {
    inner: &'p BranchProblem<'a>,
    mult: Vec<Complex64>,
    /// Real normalization rows (ℓ, offset) acting on y.
    charts: Vec<(Vec<f64>, usize)>,
}

impl RealProblem<'_, '_> {
    fn x_of(&self, y: &[f64]) -> Vec<Complex64> {
        y.iter().zip(&self.mult).map(|(a, c)| c * a).collect()
    }

    fn system(&self, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let x = self.x_of(y);
        let f = self.inner.landau.values(&x);
        let j = self.inner.landau.jacobian(&x);
        let n = y.len();
        let m = f.len();
        let k = self.charts.len();
        let mut fr = DVector::zeros(k + 2 * m);
        let mut jr = DMatrix::zeros(k + 2 * m, n);
        for (r, (l, off)) in self.charts.iter().enumerate() {
            fr[r] = l.iter().zip(&y[*off..]).map(|(a, b)| a * b).sum::<f64>() - 1.0;
            for (c, a) in l.iter().enumerate() {
                jr[(r, off + c)] = *a;
            }
        }
        for i in 0..m {
            fr[k + i] = f[i].re;
            fr[k + m + i] = f[i].im;
            for c in 0..n {
                let d = j[(i, c)] * self.mult[c];
                jr[(k + i, c)] = d.re;
                jr[(k + m + i, c)] = d.im;
            }
        }
        (fr, jr)
    }

    fn solve(&self, y0: &[f64], cfg: &SolveConfig) -> (Vec<f64>, f64) {
        let mut y = y0.to_vec();
        let (mut f, mut j) = self.system(&y);
        let mut r = f.norm();
        for _ in 0..cfg.max_iters + cfg.polish_iters {
            if f.amax() < cfg.residual_target {
                break;
            }
            let svd = j.clone().svd(true, true);
            let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
            let Ok(step) = svd.solve(&f, smax * 1e-13) else { break };
            let mut s = 1.0;
            let mut accepted = None;
            for _ in 0..=cfg.max_halvings {
                let yn: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| a - d * s).collect();
                let (fnew, jnew) = self.system(&yn);
                if fnew.norm() < r {
                    accepted = Some((yn, fnew, jnew));
                    break;
                }
                s *= 0.5;
            }
            let Some((yn, fnew, jnew)) = accepted else { break };
            let rn = fnew.norm();
            let stalled = rn > 0.999 * r;
            y = yn;
            f = fnew;
            j = jnew;
            r = rn;
            if stalled || y.iter().any(|a| a.abs() > cfg.divergence) {
                break;
            }
        }
        let x = self.x_of(&y);
        (y, self.inner.exact_residual(&x))
    }
}

fn unit_chart(v: &[f64]) -> Option<Vec<f64>> {
    let n2: f64 = v.iter().map(|a| a * a).sum();
    (n2 > 1e-24).then(|| v.iter().map(|a| a / n2).collect())
}

/// Physicality of a witness of a Feynman system.
#[derive(Clone, Debug, Serialize)]
pub struct PhysicalReport {
    /// α real, nonnegative, not all zero (after fixing the projective phase).
    pub alpha_nonnegative: bool,
    /// External momenta in the physical region, masses real.
    pub external_physical: bool,
    /// Loop momenta Minkowski after fixing the projective phase.
    pub loop_minkowski: bool,
    /// A real-form solve started from the witness converged below tau.
    pub certified: bool,
    pub certified_residual: f64,
    pub physical: bool,
}

impl PhysicalReport {
    /// Physical kinematics without the sign condition on α.
    pub fn kinematic(&self) -> bool {
        self.external_physical && self.loop_minkowski && self.certified
    }
}

fn fix_phase(v: &[Complex64]) -> Vec<Complex64> {
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()));
    match big {
        Some(b) if b.norm() > 0.0 => {
            let ph = b.conj() / b.norm();
            v.iter().map(|a| a * ph).collect()
        }
        _ => v.to_vec(),
    }
}

/// Decide whether a witness lies in the physical region and certify it by a real-form re-solve.
pub fn is_physical(sys: &LandauSystem, w: &WitnessPoint, cfg: &SolveConfig) -> Result<PhysicalReport> {
    let kin = sys
        .kinematics
        .as_ref()
        .ok_or_else(|| Error::Precondition("physicality needs a system built from a graph".into()))?;
    sys.values_of(w)?;
    let tol = 1e-6;
    let alpha = fix_phase(&w.alpha);
    let amax = alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let alpha_nonnegative =
        amax > 0.0 && alpha.iter().all(|a| a.im.abs() <= tol * amax && a.re >= -tol * amax);

    let param = |name: &str| sys.params.iter().position(|p| p == name).map(|i| w.params[i]);
    let mut external_physical = true;
    for comps in &kin.external_components {
        let vals: Vec<Complex64> = comps.iter().filter_map(|c| param(c)).collect();
        if vals.len() != comps.len() {
            external_physical = false;
            continue;
        }
        let scale = vals.iter().map(|a| a.norm()).fold(1.0, f64::max);
        let ok_parts = vals[0].re.abs() <= tol * scale && vals[1..].iter().all(|a| a.im.abs() <= tol * scale);
        let sq: f64 = -vals[0].im * vals[0].im + vals[1..].iter().map(|a| a.re * a.re).sum::<f64>();
        external_physical &= ok_parts && sq <= tol * scale * scale;
    }
    for m in &kin.masses {
        if let Some(v) = param(m) {
            external_physical &= v.im.abs() <= tol * v.norm().max(1.0);
        }
    }

    let support: Vec<usize> = (0..alpha.len()).filter(|&i| alpha[i].norm() > tol * amax).collect();
    let branch = sys.branch(0, &support, cfg.seed, 0);
    let inner = BranchProblem::new(sys, branch, &w.params)?;
    let mult = real_multipliers(sys, &inner.unknowns);
    let (y0, loop_minkowski) = real_projection(sys, &support, &mult, &alpha, &w.coords, tol);
    let mut certified = false;
    let mut certified_residual = f64::INFINITY;
    if let Some((y, res)) = resolve_real(&inner, &mult, &y0, cfg) {
        certified_residual = res;
        let ya = &y[..support.len()];
        let amax_y = ya.iter().map(|a| a.abs()).fold(0.0, f64::max);
        certified = res < cfg.tau && amax_y > 0.0;
        if alpha_nonnegative {
            // the re-solved α must keep its sign
            certified &= ya.iter().all(|a| *a >= -tol * amax_y) || ya.iter().all(|a| *a <= tol * amax_y);
        }
    }
    let physical = alpha_nonnegative && external_physical && loop_minkowski && certified;
    Ok(PhysicalReport { alpha_nonnegative, external_physical, loop_minkowski, certified, certified_residual, physical })
}

/// Real parts of (α_S, coords / multiplier) after removing projective phases, and whether
/// the coordinates were real up to `tol`.
fn real_projection(
    sys: &LandauSystem,
    support: &[usize],
    mult: &[Complex64],
    alpha: &[Complex64],
    coords: &[Complex64],
    tol: f64,
) -> (Vec<f64>, bool) {
    let alpha = fix_phase(&support.iter().map(|&i| alpha[i]).collect::<Vec<_>>());
    let divided: Vec<Complex64> = coords.iter().zip(&mult[support.len()..]).map(|(a, c)| a / c).collect();
    let divided = if sys.coords_projective() { fix_phase(&divided) } else { divided };
    let cmax = divided.iter().map(|a| a.norm()).fold(1.0, f64::max);
    let real = divided.iter().all(|a| a.im.abs() <= tol * cmax);
    let mut y: Vec<f64> = alpha.iter().map(|a| a.re).collect();
    y.extend(divided.iter().map(|a| a.re));
    (y, real)
}

/// Real-form Gauss-Newton from `y0` with normalization charts through the start.
fn resolve_real(inner: &BranchProblem, mult: &[Complex64], y0: &[f64], cfg: &SolveConfig) -> Option<(Vec<f64>, f64)> {
    let k = inner.branch.support.len();
    let mut charts = vec![(unit_chart(&y0[..k])?, 0)];
    if inner.sys.coords_projective() {
        charts.push((unit_chart(&y0[k..])?, k));
    }
    let rp = RealProblem { inner, mult: mult.to_vec(), charts };
    Some(rp.solve(y0, cfg))
}

/// Search for witnesses in real Minkowski form: k_0 imaginary, everything else real.
///
/// Starts are the real projections of the complex branch witnesses followed by seeded
/// real Gaussian points.
pub fn solve_real_form(sys: &LandauSystem, support: &[usize], params: &[Complex64], cfg: &SolveConfig) -> Result<Vec<Witness>> {
    let branch = sys.branch(0, support, cfg.seed, 0);
    let inner = BranchProblem::new(sys, branch, params)?;
    let mult = real_multipliers(sys, &inner.unknowns);
    let n = inner.dim();
    let (complex, _) = solve_branch(sys, support, 0, params, cfg)?;
    let mut starts: Vec<Vec<f64>> = complex
        .iter()
        .map(|w| real_projection(sys, support, &mult, &w.point.alpha, &w.point.coords, 1e-6).0)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 0x4EA1, support.iter().fold(0, |a, &i| a | 1 << i)));
    for _ in 0..cfg.starts {
        starts.push((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
    }
    let found: Vec<Witness> = starts
        .par_iter()
        .enumerate()
        .filter_map(|(s, y0)| {
            let (y, res) = resolve_real(&inner, &mult, y0, cfg)?;
            let x: Vec<Complex64> = y.iter().zip(&mult).map(|(a, c)| c * a).collect();
            (res < cfg.tau && is_nondegenerate(&inner, &x, cfg.tau)).then(|| Witness {
                chart: sys.chart,
                branch: 0,
                support: support.to_vec(),
                redraw: 0,
                start: s,
                point: inner.witness_point(&x),
                residual: res,
            })
        })
        .collect();
    Ok(cluster(found, cfg.cluster_radius))
}
