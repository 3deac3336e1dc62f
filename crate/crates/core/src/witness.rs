//! Witness curve pairs: exact outer distances from parametrised arcs, inner
//! distances from graph geodesics on a ball sample around an anchor.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_with, Expr, ParseOptions};
use crate::metric::{build_graph, fit_exponent, ExponentFit};
use crate::variety::{dist, Germ, ShellSampler, Slice};

/// Residual allowed for curve points on their host set.
pub const CURVE_TOL: f64 = 1e-7;

/// Curve file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDef {
    pub param: String,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub components: Vec<String>,
    pub domain: [f64; 2],
}

/// A parametrised arc `s -> (c_1(s), ..., c_m(s))` on `(lo, hi]`.
#[derive(Debug, Clone)]
pub struct WitnessCurve {
    pub def: CurveDef,
    components: Vec<Expr>,
    bindings: Vec<f64>,
}

impl WitnessCurve {
    pub fn new(def: CurveDef) -> Result<Self> {
        let [lo, hi] = def.domain;
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("empty curve domain ({lo}, {hi})")));
        }
        let mut names = vec![def.param.clone()];
        names.extend(def.fixed.keys().cloned());
        let options = ParseOptions { allow_sqrt: true };
        let components = def
            .components
            .iter()
            .map(|c| parse_with(c, &names, options))
            .collect::<Result<Vec<_>>>()?;
        let mut bindings = vec![0.0];
        bindings.extend(def.fixed.values().copied());
        Ok(WitnessCurve {
            def,
            components,
            bindings,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(serde_json::from_str(text)?)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Componentwise value at `s` without a host check.
    pub fn point(&self, s: f64) -> Result<Vec<f64>> {
        let [lo, hi] = self.def.domain;
        if !(s > lo && s <= hi) {
            return Err(Error::OutsideDomain { value: s, lo, hi });
        }
        let mut values = self.bindings.clone();
        values[0] = s;
        self.components.iter().map(|c| c.eval(&values)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub point: Vec<f64>,
    pub residual: f64,
}

/// Evaluates a curve and checks that the point lies on `host`.
pub fn eval_curve(curve: &WitnessCurve, s: f64, host: &Germ) -> Result<CurvePoint> {
    if curve.dim() != host.dim() {
        return Err(Error::DimensionMismatch {
            expected: host.dim(),
            got: curve.dim(),
        });
    }
    let point = curve.point(s)?;
    let residual = host.residual(&point);
    if !(residual <= CURVE_TOL) {
        return Err(Error::OffSet(residual));
    }
    Ok(CurvePoint { point, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessConfig {
    pub samples: usize,
    pub seed: u64,
    /// Centre of the local ball sample.
    pub anchor: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<Slice>,
    /// Connection radius floor as a fraction of the outer distance.
    pub gamma: f64,
    /// Connection radius in radial stratum widths.
    pub conn_const: f64,
}

impl WitnessConfig {
    pub fn new(anchor: Vec<f64>, samples: usize, seed: u64) -> Self {
        WitnessConfig {
            samples,
            seed,
            anchor,
            slice: None,
            gamma: 0.02,
            conn_const: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRow {
    pub s: f64,
    pub outer: f64,
    /// `+inf` when the endpoints are in different graph components.
    pub inner_est: f64,
    pub ratio: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub ball_radius: f64,
    pub vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessTable {
    pub rows: Vec<WitnessRow>,
    pub config: WitnessConfig,
}

impl WitnessTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,outer,inner_est,ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.s, r.outer, r.inner_est, r.ratio));
        }
        out
    }
}

/// Inner/outer table of a curve pair over `grid`.
///
/// For each `s` the host is ball-sampled (curve-like, eight directions per
/// shell) in the chart around the anchor out to three times the farther curve
/// point; `alpha(s)` and `beta(s)` join the sample as vertices.
pub fn witness_table(
    host: &Germ,
    alpha: &WitnessCurve,
    beta: &WitnessCurve,
    grid: &[f64],
    config: &WitnessConfig,
) -> Result<WitnessTable> {
    if grid.len() < 4 {
        return Err(Error::InvalidArgument("witness grid needs at least 4 points".into()));
    }
    let (lo, hi) = grid
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if hi / lo < 10.0 - 1e-9 {
        return Err(Error::InvalidArgument("witness grid must span at least one decade".into()));
    }
    let sampler = ShellSampler::with_chart(host, &config.anchor, config.slice.as_ref())?;
    let per_shell = 8;
    let strata = (config.samples / per_shell).max(2);
    let rows = grid
        .par_iter()
        .map(|&s| {
            let a = eval_curve(alpha, s, host)?.point;
            let b = eval_curve(beta, s, host)?.point;
            let outer = dist(&a, &b);
            let radius = 3.0 * dist(&a, &config.anchor).max(dist(&b, &config.anchor));
            let mut points = sampler.ball(radius, strata, per_shell, 1, config.seed)?;
            let ia = points.len();
            points.push(a.clone());
            points.push(b.clone());
            let r = (config.gamma * outer).max(config.conn_const * radius / strata as f64);
            let graph = build_graph(points, r)?;
            let inner_est = graph.dijkstra(ia)[ia + 1];
            Ok(WitnessRow {
                s,
                outer,
                inner_est,
                ratio: inner_est / outer,
                alpha: a,
                beta: b,
                ball_radius: radius,
                vertices: graph.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessTable {
        rows,
        config: config.clone(),
    })
}

/// Power-law fit of `ratio` against `s` over the finite rows.
pub fn witness_exponent(table: &WitnessTable) -> Result<ExponentFit> {
    let series: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.ratio.is_finite())
        .map(|r| (r.s, r.ratio))
        .collect();
    if series.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "witness exponent needs 4 finite rows, got {}",
            series.len()
        )));
    }
    fit_exponent(&series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{AmbientDef, AmbientKind, SetDef};

    fn curve(components: &[&str], domain: [f64; 2]) -> WitnessCurve {
        WitnessCurve::new(CurveDef {
            param: "s".into(),
            fixed: BTreeMap::from([("r".to_string(), 0.5)]),
            components: components.iter().map(|s| s.to_string()).collect(),
            domain,
        })
        .unwrap()
    }

    fn set(vars: &[&str], eq: &str) -> Germ {
        SetDef {
            name: "h".into(),
            ambient: AmbientDef {
                kind: AmbientKind::Real,
                dim: vars.len(),
            },
            variables: vars.iter().map(|s| s.to_string()).collect(),
            equations: vec![eq.into()],
            inequalities: vec![],
            basepoint: None,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn sphere_curve_at_one() {
        let host = set(&["x", "y", "z", "t"], "(x-t)^2+y^2+z^2-t^2");
        let host = Germ {
            branches: vec![crate::variety::SemialgebraicSet::new(
                "sphere",
                host.vars().to_vec(),
                host.branches[0].equations.clone(),
                vec![],
                Some(vec![0.0, 0.0, 0.0, 1.0]),
            )
            .unwrap()],
            ..host
        };
        let a = curve(&["s", "sqrt(1-(1-s)^2)", "0", "1"], [0.0, 1.0]);
        let p = eval_curve(&a, 1.0, &host).unwrap();
        assert_eq!(p.point, vec![1.0, 1.0, 0.0, 1.0]);
        assert_eq!(p.residual, 0.0);
        assert!(matches!(eval_curve(&a, 1.5, &host), Err(Error::OutsideDomain { .. })));
        assert!(matches!(eval_curve(&a, 0.0, &host), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn fixed_constants_bind() {
        let c = curve(&["s", "0", "r"], [0.0, 0.25]);
        assert_eq!(c.point(0.1).unwrap(), vec![0.1, 0.0, 0.5]);
    }

    #[test]
    fn off_set_points_are_rejected() {
        let host = set(&["x", "y"], "y");
        let c = curve(&["s", "s"], [0.0, 1.0]);
        assert!(matches!(eval_curve(&c, 0.5, &host), Err(Error::OffSet(_))));
    }

    #[test]
    fn straight_line_ratio_is_one() {
        let host = set(&["x", "y"], "y");
        let a = curve(&["s", "0"], [0.0, 1.0]);
        let b = curve(&["-s", "0"], [0.0, 1.0]);
        let grid = [0.5, 0.2, 0.1, 0.05];
        let mut config = WitnessConfig::new(vec![0.0, 0.0], 2000, 1);
        config.slice = None;
        let table = witness_table(&host, &a, &b, &grid, &config).unwrap();
        for row in &table.rows {
            assert_eq!(row.outer, 2.0 * row.s);
            assert!((row.ratio - 1.0).abs() < 1e-6, "{row:?}");
        }
        let fit = witness_exponent(&table).unwrap();
        assert!(fit.slope.abs() < 1e-6);
    }

    #[test]
    fn grid_must_span_a_decade() {
        let host = set(&["x", "y"], "y");
        let a = curve(&["s", "0"], [0.0, 1.0]);
        let config = WitnessConfig::new(vec![0.0, 0.0], 100, 1);
        assert!(witness_table(&host, &a, &a, &[0.5, 0.4, 0.3, 0.2], &config).is_err());
        assert!(witness_table(&host, &a, &a, &[0.5, 0.05], &config).is_err());
    }
}
