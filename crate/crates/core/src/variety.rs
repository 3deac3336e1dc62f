//! Semialgebraic germs and on-set sampling on spheres around a centre.
//!
//! Sampling always happens in a local chart: the defining polynomials are
//! re-expanded exactly around the centre (optionally restricted to an affine
//! slice), so that values near the centre are computed without cancellation
//! and residual tolerances can scale with the order of vanishing.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{
    expand, parse, rational_vec, realified_vars, realify, CompiledPoly, Expr, Polynomial,
};

/// Relative radial tolerance of shell samples.
pub const RADIAL_TOL: f64 = 1e-6;
/// Equation tolerance, multiplied by `t^order` on a shell of radius `t`.
pub const EQ_TOL: f64 = 1e-8;
/// Projection iteration cap.
pub const MAX_ITERATIONS: usize = 50;
/// Acceptance rate below which a shell is flagged as thin.
pub const ACCEPTANCE_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=0")]
    Ge,
    #[serde(rename = ">0")]
    Gt,
}

impl Relation {
    pub fn holds(self, value: f64) -> bool {
        match self {
            Relation::Ge => value >= 0.0,
            Relation::Gt => value > 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub poly: Polynomial,
    pub rel: Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientKind {
    Real,
    Complex,
}

/// A basic closed (or open) semialgebraic set `{f = 0, g >= 0}` in `R^n`
/// together with the base point of the germ.
#[derive(Debug, Clone)]
pub struct SemialgebraicSet {
    pub name: String,
    pub vars: Vec<String>,
    pub equations: Vec<Polynomial>,
    pub inequalities: Vec<Inequality>,
    pub basepoint: Vec<f64>,
}

impl SemialgebraicSet {
    pub fn new(
        name: impl Into<String>,
        vars: Vec<String>,
        equations: Vec<Polynomial>,
        inequalities: Vec<Inequality>,
        basepoint: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = vars.len();
        let all_vars_match = equations.iter().all(|p| p.vars() == vars.as_slice())
            && inequalities.iter().all(|q| q.poly.vars() == vars.as_slice());
        if !all_vars_match {
            return Err(Error::VariableMismatch);
        }
        let basepoint = basepoint.unwrap_or_else(|| vec![0.0; n]);
        if basepoint.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: basepoint.len(),
            });
        }
        let set = SemialgebraicSet {
            name: name.into(),
            vars,
            equations: equations.into_iter().filter(|p| !p.is_zero()).collect(),
            inequalities,
            basepoint,
        };
        let residual = set.residual(&set.basepoint);
        if residual > 1e-9 {
            return Err(Error::InvalidSet(format!(
                "basepoint is off the set (residual {residual:e})"
            )));
        }
        for (i, q) in set.inequalities.iter().enumerate() {
            if q.rel == Relation::Ge && !q.rel.holds(q.poly.eval(&set.basepoint)?) {
                return Err(Error::InvalidSet(format!(
                    "basepoint violates inequality {i}"
                )));
            }
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Largest absolute equation value at `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.equations
            .iter()
            .map(|p| p.compile().eval(x).abs())
            .fold(0.0, f64::max)
    }

    pub fn satisfies_inequalities(&self, x: &[f64]) -> bool {
        self.inequalities
            .iter()
            .all(|q| q.rel.holds(q.poly.compile().eval(x)))
    }
}

/// A germ given as a finite union of basic sets (the branches produced by
/// splitting `abs()`), plus the generators it was written with.
#[derive(Debug, Clone)]
pub struct Germ {
    pub name: String,
    pub kind: AmbientKind,
    pub branches: Vec<SemialgebraicSet>,
    /// Variables of the generators as written (complex names for complex sets).
    pub generator_vars: Vec<String>,
    pub generator_exprs: Vec<Expr>,
}

impl Germ {
    pub fn from_set(set: SemialgebraicSet) -> Self {
        Germ {
            name: set.name.clone(),
            kind: AmbientKind::Real,
            generator_vars: set.vars.clone(),
            generator_exprs: Vec::new(),
            branches: vec![set],
        }
    }

    pub fn dim(&self) -> usize {
        self.branches[0].dim()
    }

    pub fn vars(&self) -> &[String] {
        &self.branches[0].vars
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.branches[0].basepoint
    }

    /// Generators expanded in their own variables; fails for `abs()` input.
    pub fn generators(&self) -> Result<Vec<Polynomial>> {
        if self.generator_exprs.is_empty() {
            return Ok(self.branches[0].equations.clone());
        }
        self.generator_exprs
            .iter()
            .map(|e| expand(e, &self.generator_vars))
            .collect()
    }

    /// Smallest residual over branches whose inequalities hold at `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.satisfies_inequalities(x))
            .map(|b| b.residual(x))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Splits `abs(v)` nodes into one branch per sign pattern, appending
/// `sign * v >= 0` to each branch.
pub fn branch_split(
    name: &str,
    vars: &[String],
    equations: &[Expr],
    inequalities: &[(Expr, Relation)],
    basepoint: Option<Vec<f64>>,
) -> Result<Vec<SemialgebraicSet>> {
    let mut abs_vars: Vec<usize> = equations
        .iter()
        .chain(inequalities.iter().map(|(e, _)| e))
        .flat_map(Expr::abs_vars)
        .collect();
    abs_vars.sort_unstable();
    abs_vars.dedup();
    if abs_vars.len() > 16 {
        return Err(Error::InvalidSet("too many abs() variables".into()));
    }
    let mut branches = Vec::with_capacity(1 << abs_vars.len());
    for pattern in 0u32..(1 << abs_vars.len()) {
        let positive = |v: usize| {
            let k = abs_vars.iter().position(|&a| a == v).expect("abs var");
            pattern & (1 << k) == 0
        };
        let eqs = equations
            .iter()
            .map(|e| expand(&e.resolve_abs(&positive), vars))
            .collect::<Result<Vec<_>>>()?;
        let mut ineqs = inequalities
            .iter()
            .map(|(e, rel)| {
                Ok(Inequality {
                    poly: expand(&e.resolve_abs(&positive), vars)?,
                    rel: *rel,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut label = String::new();
        for &v in &abs_vars {
            let x = Polynomial::var(vars, v);
            let (poly, sign) = if positive(v) { (x, '+') } else { (-&x, '-') };
            ineqs.push(Inequality {
                poly,
                rel: Relation::Ge,
            });
            label.push_str(&format!("[{}{}]", vars[v], sign));
        }
        let branch_name = if label.is_empty() {
            name.to_string()
        } else {
            format!("{name}{label}")
        };
        branches.push(SemialgebraicSet::new(
            branch_name,
            vars.to_vec(),
            eqs,
            ineqs,
            basepoint.clone(),
        )?);
    }
    Ok(branches)
}

/// Set definition file contents.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SetDef {
    pub name: String,
    pub ambient: AmbientDef,
    pub variables: Vec<String>,
    pub equations: Vec<String>,
    #[serde(default)]
    pub inequalities: Vec<InequalityDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AmbientDef {
    pub kind: AmbientKind,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InequalityDef {
    pub expr: String,
    pub rel: Relation,
}

impl SetDef {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<Germ> {
        let vars = &self.variables;
        if self.ambient.dim != vars.len() {
            return Err(Error::InvalidSet(format!(
                "ambient dim {} but {} variables",
                self.ambient.dim,
                vars.len()
            )));
        }
        if self.equations.is_empty() {
            return Err(Error::InvalidSet("no equations".into()));
        }
        let eqs = self
            .equations
            .iter()
            .map(|s| parse(s, vars))
            .collect::<Result<Vec<_>>>()?;
        let ineqs = self
            .inequalities
            .iter()
            .map(|q| Ok((parse(&q.expr, vars)?, q.rel)))
            .collect::<Result<Vec<_>>>()?;
        match self.ambient.kind {
            AmbientKind::Real => Ok(Germ {
                name: self.name.clone(),
                kind: AmbientKind::Real,
                branches: branch_split(&self.name, vars, &eqs, &ineqs, self.basepoint.clone())?,
                generator_vars: vars.clone(),
                generator_exprs: eqs,
            }),
            AmbientKind::Complex => {
                if !ineqs.is_empty() {
                    return Err(Error::InvalidSet(
                        "inequalities are not defined on complex sets".into(),
                    ));
                }
                let polys = eqs
                    .iter()
                    .map(|e| expand(e, vars))
                    .collect::<Result<Vec<_>>>()?;
                let real_vars = realified_vars(vars);
                let equations = realify(&polys)?
                    .into_iter()
                    .flat_map(|(u, v)| [u, v])
                    .collect();
                let set = SemialgebraicSet::new(
                    self.name.clone(),
                    real_vars,
                    equations,
                    Vec::new(),
                    self.basepoint.clone(),
                )?;
                Ok(Germ {
                    name: self.name.clone(),
                    kind: AmbientKind::Complex,
                    branches: vec![set],
                    generator_vars: vars.clone(),
                    generator_exprs: eqs,
                })
            }
        }
    }
}

/// Affine slice through a centre, spanned by orthonormal `basis` vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub basis: Vec<Vec<f64>>,
}

impl Slice {
    pub fn coordinates(dim: usize, axes: &[usize]) -> Slice {
        Slice {
            basis: axes
                .iter()
                .map(|&a| {
                    let mut v = vec![0.0; dim];
                    v[a] = 1.0;
                    v
                })
                .collect(),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.basis.is_empty() {
            return Err(Error::InvalidArgument("empty slice basis".into()));
        }
        for (i, a) in self.basis.iter().enumerate() {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
            for (j, b) in self.basis.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > 1e-12 {
                    return Err(Error::InvalidArgument("slice basis is not orthonormal".into()));
                }
            }
        }
        Ok(())
    }
}

/// Counter-based generator keyed by `(seed, a, b)`.
pub fn keyed_rng(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    ChaCha8Rng::seed_from_u64(mix(seed ^ mix(a ^ mix(b))))
}

/// Uniform unit vector in `R^k` (Gaussian normalisation).
pub fn random_unit(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Damped Gauss–Newton (minimum-norm steps) on `residual rows <= tol`.
struct System<'a> {
    eqs: &'a [CompiledPoly],
    tols: Vec<f64>,
    shell: Option<f64>,
}

impl System<'_> {
    fn rows(&self, x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let k = x.len();
        let nrows = self.eqs.len() + usize::from(self.shell.is_some());
        let mut values = Vec::with_capacity(nrows);
        let mut jac = DMatrix::zeros(nrows, k);
        let mut g = vec![0.0; k];
        for (r, p) in self.eqs.iter().enumerate() {
            values.push(p.eval_grad(x, &mut g));
            for (c, gc) in g.iter().enumerate() {
                jac[(r, c)] = *gc;
            }
        }
        if let Some(rho) = self.shell {
            let r = self.eqs.len();
            values.push((x.iter().map(|v| v * v).sum::<f64>() - rho * rho) / (2.0 * rho));
            for c in 0..k {
                jac[(r, c)] = x[c] / rho;
            }
        }
        (values, jac)
    }

    fn converged(&self, x: &[f64], values: &[f64]) -> bool {
        let eq_ok = values
            .iter()
            .zip(&self.tols)
            .all(|(v, tol)| v.abs() <= *tol);
        let shell_ok = self
            .shell
            .is_none_or(|rho| (norm(x) - rho).abs() <= RADIAL_TOL * rho);
        eq_ok && shell_ok
    }

    fn solve(&self, start: &[f64]) -> Result<(Vec<f64>, usize)> {
        let mut x = start.to_vec();
        for iteration in 0..=MAX_ITERATIONS {
            let (values, jac) = self.rows(&x);
            if values.iter().any(|v| !v.is_finite()) {
                break;
            }
            if self.converged(&x, &values[..self.eqs.len()]) {
                return Ok((x, iteration));
            }
            if iteration == MAX_ITERATIONS {
                break;
            }
            // equilibrate rows so the damping is relative to each row
            let weights: Vec<f64> = (0..jac.nrows())
                .map(|r| jac.row(r).norm().max(1e-300))
                .collect();
            let merit = |vals: &[f64]| -> f64 {
                vals.iter()
                    .zip(&weights)
                    .map(|(v, w)| (v / w) * (v / w))
                    .sum()
            };
            let current = merit(&values);
            let mut jac = jac;
            let mut f = DVector::from_vec(values);
            for (r, w) in weights.iter().enumerate() {
                jac.row_mut(r).scale_mut(1.0 / w);
                f[r] /= w;
            }
            let jjt = &jac * jac.transpose();
            let mu = 1e-14 * jjt.trace() + 1e-300;
            let damped = jjt + DMatrix::identity(jac.nrows(), jac.nrows()) * mu;
            let Some(y) = damped.lu().solve(&f) else {
                break;
            };
            let step = jac.transpose() * y;
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..12 {
                let candidate: Vec<f64> =
                    x.iter().zip(step.iter()).map(|(a, s)| a - alpha * s).collect();
                let (cv, _) = self.rows(&candidate);
                if cv.iter().all(|v| v.is_finite()) && merit(&cv) < current {
                    x = candidate;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                // stalled at machine precision: accept if within tolerance
                let (values, _) = self.rows(&x);
                if self.converged(&x, &values[..self.eqs.len()]) {
                    return Ok((x, iteration));
                }
                break;
            }
        }
        Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
        })
    }
}

/// Projects `start` onto the zero set of `set`'s equations (ambient
/// coordinates, uniform tolerance `tol`), then checks the inequalities.
pub fn project(set: &SemialgebraicSet, start: &[f64], tol: f64) -> Result<Vec<f64>> {
    if start.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: start.len(),
        });
    }
    let eqs: Vec<CompiledPoly> = set.equations.iter().map(Polynomial::compile).collect();
    let system = System {
        tols: vec![tol; eqs.len()],
        eqs: &eqs,
        shell: None,
    };
    let (x, _) = system.solve(start)?;
    for (index, q) in set.inequalities.iter().enumerate() {
        if !q.rel.holds(q.poly.compile().eval(&x)) {
            return Err(Error::InequalityViolated { index });
        }
    }
    Ok(x)
}

/// Points of a set on the sphere of radius `t` around a centre.
#[derive(Debug, Clone, Serialize)]
pub struct ShellSample {
    pub radius: f64,
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub candidates: usize,
    pub acceptance_rate: f64,
}

impl ShellSample {
    pub fn is_thin(&self) -> bool {
        self.acceptance_rate < ACCEPTANCE_FLOOR
    }
}

/// One branch expressed in a local chart around `center`.
#[derive(Debug, Clone)]
struct Chart {
    eqs: Vec<CompiledPoly>,
    orders: Vec<u32>,
    ineqs: Vec<(CompiledPoly, Relation)>,
}

/// Where candidate directions come from.
#[derive(Debug, Clone)]
pub enum DirectionSource {
    /// The whole unit sphere of the chart.
    Sphere,
    /// A cap around `axis` (chart coordinates): `axis + eps * uniform-ball`,
    /// normalised.
    Cap { axis: Vec<f64>, eps: f64 },
}

/// Samples a germ on spheres around a centre, inside an optional slice.
#[derive(Debug, Clone)]
pub struct ShellSampler {
    center: Vec<f64>,
    basis: Option<Vec<Vec<f64>>>,
    charts: Vec<Chart>,
    local_dim: usize,
}

impl ShellSampler {
    /// Sampler around the germ's own base point, in full coordinates.
    pub fn new(germ: &Germ) -> Result<Self> {
        Self::with_chart(germ, germ.basepoint(), None)
    }

    pub fn with_chart(germ: &Germ, center: &[f64], slice: Option<&Slice>) -> Result<Self> {
        let dim = germ.dim();
        if center.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: center.len(),
            });
        }
        let (basis, local_vars): (Vec<Vec<f64>>, Vec<String>) = match slice {
            Some(s) => {
                s.check(dim)?;
                let names = (0..s.basis.len()).map(|j| format!("u{j}")).collect();
                (s.basis.clone(), names)
            }
            None => (
                Slice::coordinates(dim, &(0..dim).collect::<Vec<_>>()).basis,
                germ.vars().to_vec(),
            ),
        };
        let origin = rational_vec(center)?;
        let rbasis = basis
            .iter()
            .map(|b| rational_vec(b))
            .collect::<Result<Vec<_>>>()?;
        let localise = |p: &Polynomial| p.affine_substitute(&origin, &rbasis, &local_vars);
        let mut charts = Vec::new();
        for branch in &germ.branches {
            let mut eqs = Vec::new();
            let mut orders = Vec::new();
            for p in &branch.equations {
                let q = localise(p)?;
                if q.is_zero() {
                    continue;
                }
                orders.push(q.order().unwrap_or(0));
                eqs.push(q.compile());
            }
            let ineqs = branch
                .inequalities
                .iter()
                .map(|q| Ok((localise(&q.poly)?.compile(), q.rel)))
                .collect::<Result<Vec<_>>>()?;
            charts.push(Chart { eqs, orders, ineqs });
        }
        Ok(ShellSampler {
            center: center.to_vec(),
            local_dim: basis.len(),
            basis: slice.map(|_| basis),
            charts,
        })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Chart coordinates of an ambient point (orthogonal projection).
    pub fn to_local(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        match &self.basis {
            None => d,
            Some(b) => b
                .iter()
                .map(|e| e.iter().zip(&d).map(|(p, q)| p * q).sum())
                .collect(),
        }
    }

    pub fn to_ambient(&self, u: &[f64]) -> Vec<f64> {
        match &self.basis {
            None => u.iter().zip(&self.center).map(|(a, c)| a + c).collect(),
            Some(b) => {
                let mut x = self.center.clone();
                for (coef, e) in u.iter().zip(b) {
                    for (xi, ei) in x.iter_mut().zip(e) {
                        *xi += coef * ei;
                    }
                }
                x
            }
        }
    }

    fn direction(&self, source: &DirectionSource, seed: u64, key: u64, index: usize, n: usize) -> Vec<f64> {
        let k = self.local_dim;
        match source {
            DirectionSource::Sphere if k == 1 => vec![if index.is_multiple_of(2) { 1.0 } else { -1.0 }],
            DirectionSource::Sphere if k == 2 => {
                let offset: f64 = keyed_rng(seed, key, u64::MAX).random_range(0.0..1.0);
                let angle = std::f64::consts::TAU * (index as f64 + offset) / n as f64;
                vec![angle.cos(), angle.sin()]
            }
            DirectionSource::Sphere => random_unit(&mut keyed_rng(seed, key, index as u64), k),
            DirectionSource::Cap { axis, eps } => {
                let mut rng = keyed_rng(seed, key, index as u64);
                let dir = random_unit(&mut rng, k);
                let radius = eps * rng.random_range(0.0f64..1.0).powf(1.0 / k as f64);
                let v: Vec<f64> = axis.iter().zip(&dir).map(|(a, d)| a + radius * d).collect();
                let n = norm(&v);
                v.into_iter().map(|x| x / n).collect()
            }
        }
    }

    /// Projects one candidate onto every branch; returns accepted
    /// `(local point, residual)` pairs in branch order.
    fn project_candidate(&self, dir: &[f64], t: f64) -> Vec<(Vec<f64>, f64)> {
        let start: Vec<f64> = dir.iter().map(|d| d * t).collect();
        let mut out = Vec::new();
        for chart in &self.charts {
            let tols = chart
                .orders
                .iter()
                .map(|&o| EQ_TOL * t.powi(o as i32))
                .collect();
            let system = System {
                eqs: &chart.eqs,
                tols,
                shell: Some(t),
            };
            let Ok((u, _)) = system.solve(&start) else {
                continue;
            };
            if !chart.ineqs.iter().all(|(q, rel)| rel.holds(q.eval(&u))) {
                continue;
            }
            let residual = chart
                .eqs
                .iter()
                .map(|p| p.eval(&u).abs())
                .fold(0.0, f64::max);
            out.push((u, residual));
        }
        out
    }

    /// Sphere of radius `t` around the centre from `n` candidate directions.
    /// Points are returned in ambient coordinates, ordered by candidate index.
    pub fn shell(&self, t: f64, n: usize, seed: u64) -> Result<ShellSample> {
        self.shell_from(t, n, seed, &DirectionSource::Sphere)
    }

    pub fn shell_from(
        &self,
        t: f64,
        n: usize,
        seed: u64,
        source: &DirectionSource,
    ) -> Result<ShellSample> {
        if !(t > 0.0) || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "shell needs t > 0 and n >= 1 (t = {t}, n = {n})"
            )));
        }
        let key = t.to_bits();
        let accepted: Vec<Vec<(Vec<f64>, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let dir = self.direction(source, seed, key, i, n);
                self.project_candidate(&dir, t)
            })
            .collect();
        let hits = accepted.iter().filter(|a| !a.is_empty()).count();
        let mut points = Vec::new();
        let mut residuals = Vec::new();
        for (u, r) in accepted.into_iter().flatten() {
            points.push(self.to_ambient(&u));
            residuals.push(r);
        }
        Ok(ShellSample {
            radius: t,
            points,
            residuals,
            candidates: n,
            acceptance_rate: hits as f64 / n as f64,
        })
    }

    /// Stratified ball sample: `strata` shells with radii
    /// `radius * ((j + u_j) / strata)^(1/local_dim)`, `per_shell` candidates
    /// each.
    pub fn ball(
        &self,
        radius: f64,
        strata: usize,
        per_shell: usize,
        set_dim: usize,
        seed: u64,
    ) -> Result<Vec<Vec<f64>>> {
        self.ball_from(radius, 0.0, strata, per_shell, set_dim, seed, &DirectionSource::Sphere)
            .map(|v| v.into_iter().map(|(x, _)| x).collect())
    }

    /// Like [`ShellSampler::ball`] but restricted to radii in
    /// `[inner, radius)` and with a custom direction source; returns each
    /// point with its shell radius.
    #[allow(clippy::too_many_arguments)]
    pub fn ball_from(
        &self,
        radius: f64,
        inner: f64,
        strata: usize,
        per_shell: usize,
        set_dim: usize,
        seed: u64,
        source: &DirectionSource,
    ) -> Result<Vec<(Vec<f64>, f64)>> {
        if !(radius > inner) || strata == 0 || per_shell == 0 {
            return Err(Error::InvalidArgument("empty ball sample".into()));
        }
        let power = 1.0 / set_dim.max(1) as f64;
        let (lo, hi) = (inner.powf(1.0 / power), radius.powf(1.0 / power));
        let layers: Vec<Vec<(Vec<f64>, f64)>> = (0..strata)
            .into_par_iter()
            .map(|j| {
                let u: f64 = keyed_rng(seed, 0xba11, j as u64).random_range(0.0..1.0);
                let frac = (j as f64 + u) / strata as f64;
                let rho = (lo + (hi - lo) * frac).powf(power);
                if rho <= 0.0 {
                    return Vec::new();
                }
                let key = (j as u64) << 20 ^ seed.rotate_left(7);
                (0..per_shell)
                    .flat_map(|i| {
                        let dir = self.direction(source, seed, key, i, per_shell);
                        self.project_candidate(&dir, rho)
                    })
                    .map(|(u, _)| (self.to_ambient(&u), rho))
                    .collect()
            })
            .collect();
        Ok(layers.into_iter().flatten().collect())
    }
}

/// Shell sample of a germ around its base point.
pub fn sample_shell(germ: &Germ, t: f64, n: usize, seed: u64) -> Result<ShellSample> {
    ShellSampler::new(germ)?.shell(t, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_set(name: &str, vars: &[&str], eqs: &[&str], ineqs: &[&str]) -> Germ {
        SetDef {
            name: name.into(),
            ambient: AmbientDef {
                kind: AmbientKind::Real,
                dim: vars.len(),
            },
            variables: vars.iter().map(|s| s.to_string()).collect(),
            equations: eqs.iter().map(|s| s.to_string()).collect(),
            inequalities: ineqs
                .iter()
                .map(|s| InequalityDef {
                    expr: s.to_string(),
                    rel: Relation::Ge,
                })
                .collect(),
            basepoint: None,
        }
        .build()
        .unwrap()
    }

    fn circle() -> SemialgebraicSet {
        let vars: Vec<String> = vec!["x".into(), "y".into()];
        let p = expand(&parse("x^2+y^2-1", &vars).unwrap(), &vars).unwrap();
        SemialgebraicSet::new("circle", vars, vec![p], vec![], Some(vec![1.0, 0.0])).unwrap()
    }

    #[test]
    fn no_abs_gives_one_branch() {
        let g = real_set("cusp", &["x", "y"], &["y^2-x^3"], &[]);
        assert_eq!(g.branches.len(), 1);
    }

    #[test]
    fn one_abs_variable_gives_two_branches() {
        let g = real_set(
            "ice",
            &["x", "y", "z"],
            &["(x^2+y^2-z^2)*(x^2+(abs(y)-z-z^3)^2-z^6)"],
            &["z"],
        );
        assert_eq!(g.branches.len(), 2);
        let r = 0.5;
        let p = [0.0, r, r];
        let on_branch = g
            .branches
            .iter()
            .filter(|b| b.satisfies_inequalities(&p))
            .map(|b| b.residual(&p))
            .fold(f64::INFINITY, f64::min);
        assert!(on_branch <= 1e-9);
    }

    #[test]
    fn basepoint_must_lie_on_set() {
        let vars: Vec<String> = vec!["x".into()];
        let p = expand(&parse("x-1", &vars).unwrap(), &vars).unwrap();
        assert!(SemialgebraicSet::new("bad", vars, vec![p], vec![], None).is_err());
    }

    #[test]
    fn projection_fixed_point_and_radial() {
        let c = circle();
        assert_eq!(project(&c, &[0.0, 1.0], 1e-14).unwrap(), vec![0.0, 1.0]);
        let x = project(&c, &[0.0, 1.2], 1e-14).unwrap();
        assert!(x[0].abs() < 1e-10 && (x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projection_onto_cusp() {
        let g = real_set("cusp", &["x", "y"], &["y^2-x^3"], &[]);
        let start = [1.1, 1.0];
        let x = project(&g.branches[0], &start, 1e-10).unwrap();
        assert!(g.branches[0].residual(&x) <= 1e-10);
        assert!(dist(&x, &start) <= 0.3);
    }

    #[test]
    fn projection_reports_inequality_violation() {
        let g = real_set("half", &["x", "y"], &["y"], &["x"]);
        assert!(matches!(
            project(&g.branches[0], &[-1.0, 0.5], 1e-12),
            Err(Error::InequalityViolated { index: 0 })
        ));
    }

    #[test]
    fn circle_shell_is_the_circle() {
        let g = Germ::from_set(circle());
        let s = ShellSampler::with_chart(&g, &[0.0, 0.0], None).unwrap();
        // the circle is not a germ at the origin, so sample the unit sphere
        // around the origin directly
        let sample = s.shell(1.0, 100, 1).unwrap();
        assert_eq!(sample.points.len(), 100);
        for (p, r) in sample.points.iter().zip(&sample.residuals) {
            assert!(*r <= 1e-9);
            assert!((norm(p) - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn cusp_shell_has_both_branches() {
        let g = real_set("cusp", &["x", "y"], &["y^2-x^3"], &[]);
        let t = 0.01;
        let sample = sample_shell(&g, t, 200, 3).unwrap();
        let (mut up, mut down) = (0, 0);
        for p in &sample.points {
            assert!((p[0] - t).abs() < 1e-3 * t * 10.0);
            assert!((p[1].abs() - t.powf(1.5)).abs() < 0.05 * t.powf(1.5));
            if p[1] > 0.0 {
                up += 1
            } else {
                down += 1
            }
        }
        assert!(up > 0 && down > 0);
    }

    #[test]
    fn inequality_filter_on_double_spheres() {
        let g = real_set(
            "ds",
            &["x", "y", "z", "t"],
            &["((x-t)^2+y^2+z^2-t^2)*((x+t)^2+y^2+z^2-t^2)-t^10"],
            &["t"],
        );
        let sample = sample_shell(&g, 0.1, 200, 5).unwrap();
        assert!(!sample.points.is_empty());
        assert!(sample.points.iter().all(|p| p[3] >= 0.0));
    }

    #[test]
    fn shell_sampling_is_deterministic() {
        let g = real_set("cone", &["x", "y", "z"], &["x^2+y^2-z^2"], &["z"]);
        let a = sample_shell(&g, 0.05, 64, 9).unwrap();
        let b = sample_shell(&g, 0.05, 64, 9).unwrap();
        assert_eq!(a.points, b.points);
        let c = sample_shell(&g, 0.05, 64, 10).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn slice_chart_round_trips() {
        let g = real_set("cone", &["x", "y", "z"], &["x^2+y^2-z^2"], &["z"]);
        let slice = Slice::coordinates(3, &[0, 1]);
        let s = ShellSampler::with_chart(&g, &[0.0, 0.5, 0.5], Some(&slice)).unwrap();
        assert_eq!(s.local_dim(), 2);
        let sample = s.shell(0.1, 16, 2).unwrap();
        for p in &sample.points {
            assert!((p[2] - 0.5).abs() < 1e-15);
            assert!(g.residual(p) < 1e-9);
            assert!((dist(p, &[0.0, 0.5, 0.5]) - 0.1).abs() < 1e-7);
        }
        let u = s.to_local(&[0.3, 0.1, 0.5]);
        assert!(dist(&s.to_ambient(&u), &[0.3, 0.1, 0.5]) < 1e-15);
    }

    #[test]
    fn complex_sets_realify() {
        let def = SetDef {
            name: "c".into(),
            ambient: AmbientDef {
                kind: AmbientKind::Complex,
                dim: 2,
            },
            variables: vec!["x".into(), "y".into()],
            equations: vec!["y^2-x^3".into()],
            inequalities: vec![],
            basepoint: None,
        };
        let g = def.build().unwrap();
        assert_eq!(g.dim(), 4);
        assert_eq!(g.branches[0].equations.len(), 2);
        assert_eq!(g.generators().unwrap().len(), 1);
    }
}
