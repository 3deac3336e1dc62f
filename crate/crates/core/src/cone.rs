//! Tangent cones: direction clouds from the spherical blow-up, generator-wise
//! initial forms, local component counts `k_X` and reducedness.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{expand, is_squarefree, Polynomial, Squarefree};
use crate::metric::{build_graph, lne_constant, LneEstimate};
use crate::variety::{
    dist, norm, DirectionSource, Germ, Inequality, SemialgebraicSet, ShellSampler,
};

/// Smallest admissible direction scale.
pub const SCALE_FLOOR: f64 = 1e-6;
/// Inner edge of the k_X window, as a fraction of `delta`.
pub const KX_S_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dispersion {
    pub nn_min: f64,
    pub nn_median: f64,
    pub nn_max: f64,
}

/// Unit directions of a germ at its base point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionCloud {
    pub directions: Vec<Vec<f64>>,
    pub source_scales: Vec<f64>,
    /// Scales whose shells were pooled into `directions`.
    pub pooled_scales: Vec<f64>,
    /// `(x/|x|, |x|)` for every pooled sample, relative to the base point.
    #[serde(skip)]
    pub blowup: Vec<(Vec<f64>, f64)>,
    /// Nearest-neighbour distance of each direction within the cloud.
    #[serde(skip)]
    pub nn_distance: Vec<f64>,
    pub dispersion: Dispersion,
}

/// Samples shells at `scales` and pools the normalised points of the two
/// smallest non-empty ones.
pub fn directions(germ: &Germ, scales: &[f64], n: usize, seed: u64) -> Result<DirectionCloud> {
    if scales.is_empty() || scales.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument("direction scales must be strictly decreasing".into()));
    }
    if let Some(&t) = scales.iter().find(|&&t| t < SCALE_FLOOR) {
        return Err(Error::InvalidArgument(format!("direction scale {t} below {SCALE_FLOOR}")));
    }
    let sampler = ShellSampler::new(germ)?;
    let p = germ.basepoint();
    let shells = scales
        .iter()
        .map(|&t| sampler.shell(t, n, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut blowup: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut pooled_scales = Vec::new();
    for shell in shells.iter().rev().filter(|s| !s.points.is_empty()).take(2) {
        pooled_scales.push(shell.radius);
        for x in &shell.points {
            let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
            let r = norm(&d);
            blowup.push((d.iter().map(|v| v / r).collect(), r));
        }
    }
    if blowup.is_empty() {
        return Err(Error::EmptySample("every direction shell is empty".into()));
    }
    pooled_scales.reverse();
    let directions: Vec<Vec<f64>> = blowup.iter().map(|(w, _)| w.clone()).collect();
    let nn_distance = nearest_neighbour(&directions);
    let dispersion = dispersion(&nn_distance);
    Ok(DirectionCloud {
        directions,
        source_scales: scales.to_vec(),
        pooled_scales,
        blowup,
        nn_distance,
        dispersion,
    })
}

impl DirectionCloud {
    /// Farthest-point subsample of at most `count` directions.
    pub fn thinned(&self, count: usize) -> DirectionCloud {
        let keep = farthest_point_subsample(&self.directions, count);
        let directions: Vec<Vec<f64>> = keep.iter().map(|&i| self.directions[i].clone()).collect();
        let nn_distance = nearest_neighbour(&directions);
        let dispersion = dispersion(&nn_distance);
        DirectionCloud {
            directions,
            source_scales: self.source_scales.clone(),
            pooled_scales: self.pooled_scales.clone(),
            blowup: keep.iter().map(|&i| self.blowup[i].clone()).collect(),
            nn_distance,
            dispersion,
        }
    }
}

fn dispersion(nn_distance: &[f64]) -> Dispersion {
    let mut sorted = nn_distance.to_vec();
    sorted.sort_by(f64::total_cmp);
    Dispersion {
        nn_min: sorted.first().copied().unwrap_or(0.0),
        nn_median: sorted.get(sorted.len() / 2).copied().unwrap_or(0.0),
        nn_max: sorted.last().copied().unwrap_or(0.0),
    }
}

fn nearest_neighbour(points: &[Vec<f64>]) -> Vec<f64> {
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| dist(&points[i], q))
                .fold(f64::INFINITY, f64::min)
        })
        .map(|d| if d.is_finite() { d } else { 0.0 })
        .collect()
}

/// One-sided distances between two direction sets, maximised both ways.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let one_way = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.par_iter()
            .map(|p| y.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .reduce(|| 0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Numeric tangent cone: the cloud, optional initial forms, and rays `t v`.
#[derive(Debug, Clone, Serialize)]
pub struct ConeModel {
    pub numeric: DirectionCloud,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<Vec<String>>,
    pub ray_scales: Vec<f64>,
    #[serde(skip)]
    pub sampled_rays: Vec<Vec<f64>>,
}

pub fn cone_from_directions(cloud: &DirectionCloud, ray_scales: &[f64]) -> Result<ConeModel> {
    if cloud.directions.is_empty() {
        return Err(Error::EmptySample("empty direction cloud".into()));
    }
    let sampled_rays = ray_scales
        .iter()
        .flat_map(|&t| cloud.directions.iter().map(move |v| v.iter().map(|x| t * x).collect()))
        .collect();
    Ok(ConeModel {
        numeric: cloud.clone(),
        symbolic: None,
        ray_scales: ray_scales.to_vec(),
        sampled_rays,
    })
}

/// Evenly spaced ray scales `t_max/k, 2 t_max/k, ..., t_max`.
pub fn linear_ray_scales(t_max: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| t_max * k as f64 / count as f64).collect()
}

/// Directions kept for the default ray sample.
pub const RAY_DIRECTIONS: usize = 256;
/// Ray scales of the default ray sample, on (0, 1].
pub const RAY_SCALES: usize = 40;

/// Default ray sample: the cloud thinned to [`RAY_DIRECTIONS`] spread-out
/// directions on [`RAY_SCALES`] evenly spaced radii.
pub fn ray_model(cloud: &DirectionCloud) -> Result<ConeModel> {
    cone_from_directions(&cloud.thinned(RAY_DIRECTIONS), &linear_ray_scales(1.0, RAY_SCALES))
}

impl ConeModel {
    /// Worst inner/outer ratio over the ray sample, with connection radius
    /// `conn_const` times the coarser of the radial step and the angular
    /// spacing at the outermost ray scale.
    pub fn lne_estimate(&self, conn_const: f64) -> Result<LneEstimate> {
        let t_max = self.ray_scales.iter().copied().fold(0.0, f64::max);
        let step = t_max / self.ray_scales.len().max(1) as f64;
        let angular = t_max * self.numeric.dispersion.nn_median;
        let graph = build_graph(self.sampled_rays.clone(), conn_const * step.max(angular))?;
        Ok(lne_constant(&graph, None))
    }
}

/// Generator-wise initial forms.
pub fn symbolic_cone(generators: &[Polynomial]) -> Result<Vec<Polynomial>> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    generators.iter().map(Polynomial::initial_form).collect()
}

/// Initial forms of a germ's generators with their squarefree status.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolicCone {
    pub vars: Vec<String>,
    #[serde(skip)]
    pub forms: Vec<Polynomial>,
    /// Factor-aware rendering, e.g. `y*(x^2+y^2)` for a product generator.
    pub display: Vec<String>,
    pub squarefree: Vec<Squarefree>,
    pub note: &'static str,
}

pub const GENERATOR_WISE_NOTE: &str =
    "initial forms are taken generator by generator; they cut out the tangent cone only when the generators form a standard basis";

/// Symbolic cone of a germ from the generators it was written with.
pub fn germ_symbolic_cone(germ: &Germ) -> Result<SymbolicCone> {
    let vars = germ.generator_vars.clone();
    let forms = symbolic_cone(&germ.generators()?)?;
    let display = if germ.generator_exprs.is_empty() {
        forms.iter().map(ToString::to_string).collect()
    } else {
        germ.generator_exprs
            .iter()
            .map(|e| {
                let factors = e.factors();
                if factors.len() < 2 {
                    return Ok(expand(e, &vars)?.initial_form()?.to_string());
                }
                let parts = factors
                    .iter()
                    .map(|f| Ok(expand(f, &vars)?.initial_form()?.to_factor_string()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(parts.join("*"))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let squarefree = forms.iter().map(is_squarefree).collect::<Result<Vec<_>>>()?;
    Ok(SymbolicCone {
        vars,
        forms,
        display,
        squarefree,
        note: GENERATOR_WISE_NOTE,
    })
}

/// The germ cut out by the initial forms of every branch's equations and
/// inequalities (in real coordinates).
pub fn cone_germ(germ: &Germ) -> Result<Germ> {
    let branches = germ
        .branches
        .iter()
        .map(|b| {
            let equations = b
                .equations
                .iter()
                .map(Polynomial::initial_form)
                .collect::<Result<Vec<_>>>()?;
            let inequalities = b
                .inequalities
                .iter()
                .map(|q| {
                    Ok(Inequality {
                        poly: q.poly.initial_form()?,
                        rel: q.rel,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            SemialgebraicSet::new(
                format!("cone({})", b.name),
                b.vars.clone(),
                equations,
                inequalities,
                Some(vec![0.0; b.dim()]),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Germ {
        name: format!("cone({})", germ.name),
        kind: germ.kind,
        branches,
        generator_vars: germ.generator_vars.clone(),
        generator_exprs: Vec::new(),
    })
}

/// Blow-up window `{|w - x'| < eps, 0 < s < delta}` and its samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KxWindow {
    pub direction: Vec<f64>,
    pub eps: f64,
    pub delta: f64,
    #[serde(skip)]
    pub samples: Vec<(Vec<f64>, f64)>,
}

impl KxWindow {
    pub fn contains(&self, w: &[f64], s: f64) -> bool {
        dist(w, &self.direction) < self.eps && s > 0.0 && s < self.delta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KxCount {
    pub k: usize,
    pub window_points: usize,
    pub component_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KxEstimate {
    pub direction: Vec<f64>,
    pub k: usize,
    pub stable: bool,
    pub eps: f64,
    pub delta: f64,
    pub samples: usize,
    pub base: KxCount,
    pub doubled: KxCount,
    pub halved: KxCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KxParams {
    pub eps: f64,
    pub delta: f64,
    pub samples: usize,
    /// Expected local dimension of the set.
    pub local_dim: usize,
}

/// Samples one window and counts components of its blow-up graph.
pub fn kx_window(
    germ: &Germ,
    direction: &[f64],
    params: &KxParams,
    seed: u64,
) -> Result<(KxWindow, KxCount)> {
    let KxParams { eps, delta, samples, local_dim } = *params;
    if !(eps > 0.0 && delta > 0.0) || samples == 0 {
        return Err(Error::InvalidArgument("k_X window needs eps, delta, n > 0".into()));
    }
    if direction.len() != germ.dim() || (norm(direction) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("k_X direction must be a unit vector of the ambient space".into()));
    }
    let d = local_dim.max(1);
    let sampler = ShellSampler::new(germ)?;
    let source = DirectionSource::Cap {
        axis: direction.to_vec(),
        eps,
    };
    let strata = if d == 1 {
        (samples / 8).max(2)
    } else {
        (samples as f64).powf(1.0 / d as f64).ceil() as usize
    };
    let per_shell = samples.div_ceil(strata);
    let p = germ.basepoint();
    let mut window = KxWindow {
        direction: direction.to_vec(),
        eps,
        delta,
        samples: Vec::new(),
    };
    for (x, _) in sampler.ball_from(delta, KX_S_FLOOR * delta, strata, per_shell, d, seed, &source)? {
        let v: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let s = norm(&v);
        let w: Vec<f64> = v.iter().map(|c| c / s).collect();
        if window.contains(&w, s) {
            window.samples.push((w, s));
        }
    }
    if window.samples.is_empty() {
        return Err(Error::EmptySample(format!(
            "k_X window around {direction:?} (eps {eps}, delta {delta}) is empty"
        )));
    }
    let spacing = if d == 1 {
        1.0 / strata as f64
    } else {
        ((2.0 * eps).powi(d as i32 - 1) / samples as f64).powf(1.0 / d as f64)
    };
    let coords: Vec<Vec<f64>> = window
        .samples
        .iter()
        .map(|(w, s)| {
            let mut c = w.clone();
            c.push(s / delta);
            c
        })
        .collect();
    let graph = build_graph(coords, 4.0 * spacing)?;
    let sizes = graph.component_sizes();
    let floor = 3.max(graph.len() / 50);
    let count = KxCount {
        k: sizes.iter().filter(|&&s| s >= floor).count(),
        window_points: graph.len(),
        component_sizes: sizes,
    };
    Ok((window, count))
}

/// `k_X` at `direction` with the doubling/halving stability check.
pub fn kx_estimate(germ: &Germ, direction: &[f64], params: &KxParams, seed: u64) -> Result<KxEstimate> {
    let doubled_params = KxParams {
        samples: 2 * params.samples,
        ..*params
    };
    let halved_params = KxParams {
        eps: params.eps / 2.0,
        delta: params.delta / 2.0,
        ..*params
    };
    let runs = [params, &doubled_params, &halved_params]
        .par_iter()
        .map(|p| kx_window(germ, direction, p, seed).map(|(_, c)| c))
        .collect::<Vec<_>>();
    let mut runs = runs.into_iter();
    let base = runs.next().expect("three runs")?;
    let doubled = runs.next().expect("three runs")?;
    let halved = runs.next().expect("three runs")?;
    Ok(KxEstimate {
        direction: direction.to_vec(),
        k: base.k,
        stable: base.k == doubled.k && base.k == halved.k,
        eps: params.eps,
        delta: params.delta,
        samples: params.samples,
        base,
        doubled,
        halved,
    })
}

/// Indices of `count` mutually far directions (first index 0, ties to the
/// smallest index).
pub fn farthest_point_subsample(points: &[Vec<f64>], count: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    if points.is_empty() || count == 0 {
        return chosen;
    }
    let mut gap = vec![f64::INFINITY; points.len()];
    let mut next = 0;
    while chosen.len() < count.min(points.len()) {
        chosen.push(next);
        for (g, p) in gap.iter_mut().zip(points) {
            *g = g.min(dist(p, &points[next]));
        }
        let (best, &d) = gap
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, g)| if *g > *acc.1 { (i, g) } else { acc });
        if d <= 0.0 {
            break;
        }
        next = best;
    }
    chosen
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducednessReport {
    pub reduced_estimate: bool,
    pub per_direction: Vec<KxEstimate>,
    /// Directions whose component count failed the stability check.
    pub unstable: Vec<Vec<f64>>,
    /// Directions where the window could not be sampled.
    pub failed: Vec<FailedDirection>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedDirection {
    pub direction: Vec<f64>,
    pub reason: String,
}

/// `k_X` at a farthest-point spread of `count` cloud directions.
pub fn reducedness_report(
    germ: &Germ,
    cloud: &DirectionCloud,
    count: usize,
    params: &KxParams,
    seed: u64,
) -> ReducednessReport {
    let picks = farthest_point_subsample(&cloud.directions, count);
    let results: Vec<(Vec<f64>, Result<KxEstimate>)> = picks
        .par_iter()
        .map(|&i| {
            let d = cloud.directions[i].clone();
            let r = kx_estimate(germ, &d, params, seed);
            (d, r)
        })
        .collect();
    let mut per_direction = Vec::new();
    let mut failed = Vec::new();
    for (direction, r) in results {
        match r {
            Ok(est) => per_direction.push(est),
            Err(e) => failed.push(FailedDirection {
                direction,
                reason: e.to_string(),
            }),
        }
    }
    let unstable = per_direction
        .iter()
        .filter(|e| !e.stable)
        .map(|e| e.direction.clone())
        .collect();
    let reduced_estimate =
        !per_direction.is_empty() && per_direction.iter().filter(|e| e.stable).all(|e| e.k == 1);
    ReducednessReport {
        reduced_estimate,
        per_direction,
        unstable,
        failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{AmbientDef, AmbientKind, InequalityDef, Relation, SetDef};

    fn germ(vars: &[&str], eqs: &[&str], ineqs: &[&str]) -> Germ {
        SetDef {
            name: "g".into(),
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

    fn cusp() -> Germ {
        germ(&["x", "y"], &["y^2-x^3"], &[])
    }

    #[test]
    fn cusp_directions_point_along_x() {
        let cloud = directions(&cusp(), &[0.01, 0.001, 0.0001], 64, 1).unwrap();
        assert_eq!(cloud.pooled_scales, vec![0.001, 0.0001]);
        for v in &cloud.directions {
            assert!((norm(v) - 1.0).abs() < 1e-9);
            assert!(dist(v, &[1.0, 0.0]) < 0.05);
        }
    }

    #[test]
    fn plane_directions_fill_the_circle() {
        let g = germ(&["x", "y", "z"], &["z"], &[]);
        let n = 64;
        let cloud = directions(&g, &[0.1, 0.01], n, 2).unwrap();
        let ring: Vec<Vec<f64>> = (0..720)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 720.0;
                vec![a.cos(), a.sin(), 0.0]
            })
            .collect();
        let fill = ring
            .iter()
            .map(|p| cloud.directions.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        assert!(fill <= 3.0 / n as f64 * std::f64::consts::TAU, "fill {fill}");
    }

    #[test]
    fn rays_of_a_single_direction() {
        let cloud = DirectionCloud {
            directions: vec![vec![0.6, 0.8]],
            source_scales: vec![0.1],
            pooled_scales: vec![0.1],
            blowup: vec![],
            nn_distance: vec![0.0],
            dispersion: Dispersion { nn_min: 0.0, nn_median: 0.0, nn_max: 0.0 },
        };
        let m = cone_from_directions(&cloud, &linear_ray_scales(1.0, 50)).unwrap();
        assert_eq!(m.sampled_rays.len(), 50);
        for r in &m.sampled_rays {
            assert!((r[0] * 0.8 - r[1] * 0.6).abs() < 1e-15 && r[0] > 0.0);
        }
        let est = m.lne_estimate(4.0).unwrap();
        assert!((est.lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symbolic_cones() {
        let c = germ_symbolic_cone(&cusp()).unwrap();
        assert_eq!(c.display, vec!["y^2"]);
        assert_eq!(c.squarefree, vec![Squarefree::No]);
        let g = germ(&["x", "y", "z"], &["y*(x^2+(y-z^2)^2-z^4)"], &[]);
        let c = germ_symbolic_cone(&g).unwrap();
        assert_eq!(c.display, vec!["y*(x^2+y^2)"]);
        assert_eq!(c.squarefree, vec![Squarefree::Yes]);
        assert!(symbolic_cone(&[]).is_err());
    }

    #[test]
    fn cone_germ_drops_higher_order_terms() {
        let g = germ(&["x", "y", "z"], &["x^2+y^2-z^2-z^5"], &["z+z^2"]);
        let c = cone_germ(&g).unwrap();
        assert_eq!(c.branches[0].equations[0].to_string(), "x^2+y^2-z^2");
        assert_eq!(c.branches[0].inequalities[0].poly.to_string(), "z");
    }

    #[test]
    fn cusp_has_two_local_components() {
        let params = KxParams { eps: 0.3, delta: 0.05, samples: 2000, local_dim: 1 };
        let est = kx_estimate(&cusp(), &[1.0, 0.0], &params, 3).unwrap();
        assert_eq!(est.k, 2, "{est:?}");
        assert!(est.stable);
    }

    #[test]
    fn parabola_has_one_local_component() {
        let g = germ(&["x", "y"], &["y-x^2"], &[]);
        let params = KxParams { eps: 0.3, delta: 0.05, samples: 2000, local_dim: 1 };
        let est = kx_estimate(&g, &[1.0, 0.0], &params, 3).unwrap();
        assert_eq!(est.k, 1);
        assert!(est.stable);
    }

    #[test]
    fn farthest_points() {
        let pts = vec![vec![0.0], vec![1.0], vec![0.5], vec![0.9]];
        assert_eq!(farthest_point_subsample(&pts, 3), vec![0, 1, 2]);
        assert_eq!(farthest_point_subsample(&pts, 10).len(), 4);
    }

    #[test]
    fn hausdorff_of_shifted_sets() {
        let a = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let b = vec![vec![0.0, 0.1], vec![1.0, 0.0]];
        assert!((hausdorff(&a, &b) - 0.1).abs() < 1e-15);
    }
}
