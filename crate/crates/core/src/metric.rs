//! Inner-metric estimation on point clouds: radius graphs, graph geodesics,
//! per-scale LNE constants and log–log exponent fits.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::variety::{dist, Germ, ShellSampler, Slice};

/// Minimum outer distance between probed pairs, in median spacings.
pub const ETA: f64 = 4.0;
/// Default connection constant.
pub const CONN_CONST: f64 = 4.0;
/// Sample ball radius as a multiple of the probe radius.
pub const BALL_FACTOR: f64 = 2.0;
/// Above this many candidate vertices, sources are subsampled.
pub const ALL_PAIRS_LIMIT: usize = 2000;

/// Radius graph with Euclidean edge weights.
#[derive(Debug, Clone)]
pub struct GeodesicGraph {
    pub points: Vec<Vec<f64>>,
    pub adjacency: Vec<Vec<(usize, f64)>>,
    pub connection_radius: f64,
}

impl GeodesicGraph {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edge list `(i, j, weight)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| {
                nb.iter()
                    .filter(move |(j, _)| *j > i)
                    .map(move |&(j, w)| (i, j, w))
            })
            .collect()
    }

    /// Median nearest-neighbour distance over vertices with a neighbour.
    pub fn median_spacing(&self) -> Option<f64> {
        let mut nn: Vec<f64> = self
            .adjacency
            .iter()
            .filter_map(|nb| nb.iter().map(|&(_, w)| w).filter(|w| *w > 0.0).reduce(f64::min))
            .collect();
        if nn.is_empty() {
            return None;
        }
        nn.sort_by(f64::total_cmp);
        Some(nn[nn.len() / 2])
    }

    /// Shortest-path lengths from `source` (infinite when unreachable).
    pub fn dijkstra(&self, source: usize) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        let mut distance = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        distance[source] = 0.0;
        heap.push(Item(0.0, source));
        while let Some(Item(d, u)) = heap.pop() {
            if d > distance[u] {
                continue;
            }
            for &(v, w) in &self.adjacency[u] {
                let nd = d + w;
                if nd < distance[v] {
                    distance[v] = nd;
                    heap.push(Item(nd, v));
                }
            }
        }
        distance
    }

    /// Component label of every vertex (labels are the smallest vertex index
    /// of the component).
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.len());
        for (i, nb) in self.adjacency.iter().enumerate() {
            for &(j, _) in nb {
                uf.union(i, j);
            }
        }
        let mut smallest = HashMap::new();
        (0..self.len())
            .map(|i| *smallest.entry(uf.find(i)).or_insert(i))
            .collect()
    }

    /// Component sizes, largest first.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for c in self.components() {
            *counts.entry(c).or_default() += 1;
        }
        let mut sizes: Vec<usize> = counts.into_values().collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Connects every pair at Euclidean distance `<= r`.
///
/// Candidate pairs come from a grid of cell size `r` on the (up to) three
/// coordinates of largest spread.
pub fn build_graph(points: Vec<Vec<f64>>, r: f64) -> Result<GeodesicGraph> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("connection radius {r} must be positive")));
    }
    let n = points.len();
    let dim = points.first().map_or(0, Vec::len);
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let mut axes: Vec<(f64, usize)> = (0..dim)
        .map(|k| {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
            (hi - lo, k)
        })
        .collect();
    axes.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let axes: Vec<usize> = axes.into_iter().take(3).map(|(_, k)| k).collect();
    let cell = |p: &[f64]| -> Vec<i64> { axes.iter().map(|&k| (p[k] / r).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(axes.len() as u32))
        .map(|mut code| {
            (0..axes.len())
                .map(|_| {
                    let o = (code % 3) as i64 - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();
    let adjacency: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let base = cell(&points[i]);
            let mut nb = Vec::new();
            for off in &offsets {
                let key: Vec<i64> = base.iter().zip(off).map(|(a, b)| a + b).collect();
                if let Some(bucket) = grid.get(&key) {
                    for &j in bucket {
                        if j != i {
                            let d = dist(&points[i], &points[j]);
                            if d <= r {
                                nb.push((j, d));
                            }
                        }
                    }
                }
            }
            nb.sort_by_key(|&(j, _)| j);
            nb
        })
        .collect();
    Ok(GeodesicGraph {
        points,
        adjacency,
        connection_radius: r,
    })
}

/// Graph geodesic between two vertices, `None` when unreachable.
pub fn inner_distance(g: &GeodesicGraph, i: usize, j: usize) -> Option<f64> {
    let d = g.dijkstra(i)[j];
    d.is_finite().then_some(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstPair {
    pub i: usize,
    pub j: usize,
    pub inner: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LneEstimate {
    /// `+inf` when no probed pair is connected.
    pub lambda: f64,
    pub pair: Option<WorstPair>,
    pub pairs_probed: usize,
    pub pairs_excluded: usize,
    pub pairs_disconnected: usize,
    pub min_outer: f64,
}

impl LneEstimate {
    pub fn is_disconnected(&self) -> bool {
        self.pair.is_none() && self.pairs_disconnected > 0
    }
}

/// `max inner/outer` over pairs of `candidates` (all vertices when `None`)
/// whose outer distance is at least `ETA` median spacings.
///
/// With more than [`ALL_PAIRS_LIMIT`] candidates, evenly strided sources are
/// swept against all candidate targets. Ties go to the lexicographically
/// smallest pair.
pub fn lne_constant(g: &GeodesicGraph, candidates: Option<&[usize]>) -> LneEstimate {
    let all: Vec<usize>;
    let cand = match candidates {
        Some(c) => c,
        None => {
            all = (0..g.len()).collect();
            &all
        }
    };
    let min_outer = ETA * g.median_spacing().unwrap_or(0.0);
    let sources: Vec<usize> = if cand.len() <= ALL_PAIRS_LIMIT {
        cand.to_vec()
    } else {
        let stride = cand.len().div_ceil(ALL_PAIRS_LIMIT / 8);
        cand.iter().copied().step_by(stride).collect()
    };
    let per_source: Vec<(Option<WorstPair>, usize, usize, usize)> = sources
        .par_iter()
        .map(|&s| {
            let d = g.dijkstra(s);
            let mut best: Option<WorstPair> = None;
            let (mut probed, mut excluded, mut disconnected) = (0, 0, 0);
            for &t in cand {
                if t == s || (cand.len() <= ALL_PAIRS_LIMIT && t < s) {
                    continue;
                }
                let outer = dist(&g.points[s], &g.points[t]);
                if outer < min_outer || outer == 0.0 {
                    excluded += 1;
                    continue;
                }
                if !d[t].is_finite() {
                    disconnected += 1;
                    continue;
                }
                probed += 1;
                let (i, j) = if s < t { (s, t) } else { (t, s) };
                let pair = WorstPair { i, j, inner: d[t], outer };
                if better(&pair, best.as_ref()) {
                    best = Some(pair);
                }
            }
            (best, probed, excluded, disconnected)
        })
        .collect();
    let mut best: Option<WorstPair> = None;
    let (mut probed, mut excluded, mut disconnected) = (0, 0, 0);
    for (b, p, e, d) in per_source {
        probed += p;
        excluded += e;
        disconnected += d;
        if let Some(b) = b {
            if better(&b, best.as_ref()) {
                best = Some(b);
            }
        }
    }
    LneEstimate {
        lambda: best.map_or(f64::INFINITY, |b| b.inner / b.outer),
        pair: best,
        pairs_probed: probed,
        pairs_excluded: excluded,
        pairs_disconnected: disconnected,
        min_outer,
    }
}

fn better(candidate: &WorstPair, current: Option<&WorstPair>) -> bool {
    match current {
        None => true,
        Some(c) => {
            let (a, b) = (candidate.inner / candidate.outer, c.inner / c.outer);
            a > b || (a == b && (candidate.i, candidate.j) < (c.i, c.j))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(log t, log value)`.
pub fn fit_exponent(series: &[(f64, f64)]) -> Result<ExponentFit> {
    if series.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "exponent fit needs at least 3 points, got {}",
            series.len()
        )));
    }
    if let Some(&(t, v)) = series.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "exponent fit needs positive finite data, got ({t}, {v})"
        )));
    }
    let xs: Vec<f64> = series.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("exponent fit needs distinct t".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy <= 1e-24 * n { 1.0 } else { (1.0 - ss_res / syy).max(0.0) };
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "LNE-consistent")]
    LneConsistent,
    #[serde(rename = "divergence-detected")]
    DivergenceDetected,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Verdict {
    pub fn from_fit(fit: Option<&ExponentFit>) -> Self {
        match fit {
            Some(f) if f.slope <= -0.2 && f.r_squared >= 0.8 => Verdict::DivergenceDetected,
            Some(f) if f.slope > -0.1 => Verdict::LneConsistent,
            _ => Verdict::Inconclusive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::LneConsistent => "LNE-consistent",
            Verdict::DivergenceDetected => "divergence-detected",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Decreasing geometric scales `t_max, ..., t_min` (`count >= 2`).
pub fn geometric_scales(t_max: f64, t_min: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_max > t_min && t_min > 0.0) || count < 2 {
        return Err(Error::InvalidArgument(format!(
            "bad scale window {t_max}:{t_min} with {count} values"
        )));
    }
    let ratio = (t_min / t_max).powf(1.0 / (count - 1) as f64);
    Ok((0..count)
        .map(|k| if k + 1 == count { t_min } else { t_max * ratio.powi(k as i32) })
        .collect())
}

/// Parses `hi:lo:logK` (geometric) or `hi:lo:linK` (evenly spaced) into a
/// decreasing schedule of `K` values.
pub fn parse_schedule(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad schedule `{spec}`; expected hi:lo:logK or hi:lo:linK"));
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let [hi, lo, kind] = parts.as_slice() else {
        return Err(bad());
    };
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let kind = kind.trim();
    if let Some(k) = kind.strip_prefix("log") {
        geometric_scales(hi, lo, k.parse().map_err(|_| bad())?)
    } else if let Some(k) = kind.strip_prefix("lin") {
        let count: usize = k.parse().map_err(|_| bad())?;
        if !(hi > lo && lo > 0.0) || count < 2 {
            return Err(bad());
        }
        Ok((0..count)
            .map(|i| hi + (lo - hi) * i as f64 / (count - 1) as f64)
            .collect())
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileConfig {
    pub scales: Vec<f64>,
    /// Ball sample size per scale.
    pub samples: usize,
    pub seed: u64,
    pub conn_const: f64,
    /// Expected local dimension of the set.
    pub local_dim: usize,
    /// Probe centre (default: the germ's base point).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<Slice>,
}

impl ProfileConfig {
    pub fn new(scales: Vec<f64>, samples: usize, seed: u64) -> Self {
        ProfileConfig {
            scales,
            samples,
            seed,
            conn_const: CONN_CONST,
            local_dim: 2,
            center: None,
            slice: None,
        }
    }

    /// `(strata, per_shell)` for the ball sample.
    pub fn layout(&self) -> (usize, usize) {
        let n = self.samples.max(16);
        let d = self.local_dim.max(1);
        let strata = if d == 1 {
            n / 8
        } else {
            ((n as f64 / 4f64.powi(d as i32 - 1)).powf(1.0 / d as f64)).ceil() as usize
        }
        .max(2);
        (strata, n.div_ceil(strata))
    }

    pub fn probe_count(&self) -> usize {
        if self.local_dim <= 1 {
            16
        } else {
            (self.samples / 4).clamp(16, 256)
        }
    }

    /// Connection radius at scale `t`: `c` times the radial stratum width.
    pub fn connection_radius(&self, t: f64) -> f64 {
        let (strata, _) = self.layout();
        self.conn_const * BALL_FACTOR * t / strata as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleRecord {
    pub t: f64,
    pub lambda: f64,
    pub worst: Option<WorstPair>,
    pub vertices: usize,
    pub probes: usize,
    pub connection_radius: f64,
    pub pairs_probed: usize,
    pub pairs_excluded: usize,
    pub pairs_disconnected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedScale {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LneReport {
    pub scales: Vec<f64>,
    pub lambda_per_scale: Vec<f64>,
    pub worst_pairs: Vec<Option<WorstPair>>,
    pub per_scale: Vec<ScaleRecord>,
    pub dropped: Vec<DroppedScale>,
    pub exponent_fit: Option<ExponentFit>,
    pub verdict: Verdict,
    pub config: ProfileConfig,
}

impl LneReport {
    pub fn max_lambda(&self) -> f64 {
        self.lambda_per_scale.iter().copied().fold(1.0, f64::max)
    }

    /// `t,lambda,worst_inner,worst_outer` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lambda,worst_inner,worst_outer\n");
        for r in &self.per_scale {
            let (inner, outer) = r.worst.map_or((f64::NAN, f64::NAN), |w| (w.inner, w.outer));
            let _ = writeln!(out, "{},{},{},{}", r.t, r.lambda, inner, outer);
        }
        out
    }
}

/// Per-scale LNE constants of a germ and the exponent of their growth.
///
/// At scale `t` the germ is ball-sampled out to `BALL_FACTOR * t` around the
/// probe centre, probe points are sampled on the sphere of radius `t`, and
/// `lambda(t)` is the worst inner/outer ratio among probe pairs.
pub fn lne_profile(germ: &Germ, config: &ProfileConfig) -> Result<LneReport> {
    if config.scales.len() < 4 {
        return Err(Error::InvalidArgument("lne_profile needs at least 4 scales".into()));
    }
    if config.scales.windows(2).any(|w| !(w[0] > w[1] && w[1] > 0.0)) {
        return Err(Error::InvalidArgument("scales must be positive and strictly decreasing".into()));
    }
    let center = config.center.clone().unwrap_or_else(|| germ.basepoint().to_vec());
    let sampler = ShellSampler::with_chart(germ, &center, config.slice.as_ref())?;
    let (strata, per_shell) = config.layout();
    let outcomes: Vec<std::result::Result<ScaleRecord, DroppedScale>> = config
        .scales
        .iter()
        .map(|&t| {
            let drop = |reason: String| DroppedScale { t, reason };
            let ball = sampler
                .ball(BALL_FACTOR * t, strata, per_shell, config.local_dim, config.seed)
                .map_err(|e| drop(e.to_string()))?;
            let probes = sampler
                .shell(t, config.probe_count(), config.seed)
                .map_err(|e| drop(e.to_string()))?;
            if probes.points.len() < 2 {
                return Err(drop(format!("only {} probe points", probes.points.len())));
            }
            let nball = ball.len();
            let mut points = ball;
            let probe_ids: Vec<usize> = (nball..nball + probes.points.len()).collect();
            points.extend(probes.points);
            let r = config.connection_radius(t);
            let graph = build_graph(points, r).map_err(|e| drop(e.to_string()))?;
            let est = lne_constant(&graph, Some(&probe_ids));
            let Some(worst) = est.pair else {
                return Err(drop(if est.is_disconnected() {
                    "probe pairs disconnected (lambda = +inf)".into()
                } else {
                    "no probe pair above resolution".into()
                }));
            };
            Ok(ScaleRecord {
                t,
                lambda: est.lambda,
                worst: Some(worst),
                vertices: graph.len(),
                probes: probe_ids.len(),
                connection_radius: r,
                pairs_probed: est.pairs_probed,
                pairs_excluded: est.pairs_excluded,
                pairs_disconnected: est.pairs_disconnected,
            })
        })
        .collect();
    let mut per_scale = Vec::new();
    let mut dropped = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => per_scale.push(r),
            Err(d) => dropped.push(d),
        }
    }
    let series: Vec<(f64, f64)> = per_scale.iter().map(|r| (r.t, r.lambda)).collect();
    let exponent_fit = fit_exponent(&series).ok();
    Ok(LneReport {
        scales: per_scale.iter().map(|r| r.t).collect(),
        lambda_per_scale: per_scale.iter().map(|r| r.lambda).collect(),
        worst_pairs: per_scale.iter().map(|r| r.worst).collect(),
        verdict: Verdict::from_fit(exponent_fit.as_ref()),
        exponent_fit,
        per_scale,
        dropped,
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()
    }

    #[test]
    fn collinear_path_graph() {
        let g = build_graph(vec![vec![0.0], vec![1.0], vec![2.0]], 1.5).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(inner_distance(&g, 0, 1), Some(1.0));
        assert_eq!(inner_distance(&g, 0, 2), Some(2.0));
    }

    #[test]
    fn separated_clusters() {
        let mut pts = vec![vec![0.0, 0.0], vec![0.5, 0.0]];
        pts.extend([vec![10.0, 0.0], vec![10.5, 0.0]]);
        let g = build_graph(pts, 1.0).unwrap();
        assert_eq!(g.component_sizes(), vec![2, 2]);
        assert_eq!(inner_distance(&g, 0, 3), None);
    }

    #[test]
    fn empty_graph_is_fine() {
        let g = build_graph(Vec::new(), 1.0).unwrap();
        assert!(g.is_empty());
        assert!(build_graph(Vec::new(), 0.0).is_err());
    }

    #[test]
    fn segment_has_lambda_one() {
        let pts: Vec<Vec<f64>> = (0..100).map(|k| vec![k as f64 * 0.01, 0.0, 0.0]).collect();
        let g = build_graph(pts, 0.025).unwrap();
        let est = lne_constant(&g, None);
        assert!((est.lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn circle_geodesics() {
        let n = 2000;
        let spacing = 2.0 * PI / n as f64;
        let g = build_graph(circle(n), 3.0 * spacing).unwrap();
        assert_eq!(g.component_sizes(), vec![n]);
        let d = inner_distance(&g, 0, n / 2).unwrap();
        assert!((d - PI).abs() / PI < 0.02);
        let est = lne_constant(&g, None);
        assert!((est.lambda - PI / 2.0).abs() / (PI / 2.0) < 0.03);
    }

    #[test]
    fn worst_pair_ties_break_lexicographically() {
        let n = 200;
        let g = build_graph(circle(n), 1.5 * 2.0 * PI / n as f64).unwrap();
        let est = lne_constant(&g, None);
        let w = est.pair.unwrap();
        assert!(w.i < w.j);
        assert_eq!(w.j - w.i, n / 2);
    }

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = [0.2, 0.1, 0.05, 0.025].iter().map(|&t: &f64| (t, t.powf(-0.5))).collect();
        let f = fit_exponent(&s).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_series() {
        let f = fit_exponent(&[(0.1, 3.0), (0.01, 3.0), (0.001, 3.0)]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn noisy_inverse_law() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let s: Vec<(f64, f64)> = geometric_scales(0.5, 0.001, 12)
            .unwrap()
            .into_iter()
            .map(|t| (t, (1.0 + 0.01 * rng.random_range(-1.0..1.0)) / t))
            .collect();
        assert!((fit_exponent(&s).unwrap().slope + 1.0).abs() < 0.05);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_exponent(&[(0.1, 1.0), (0.2, 1.0)]).is_err());
        assert!(fit_exponent(&[(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)]).is_err());
    }

    #[test]
    fn verdict_rule() {
        let f = |slope, r_squared| ExponentFit { slope, intercept: 0.0, r_squared };
        assert_eq!(Verdict::from_fit(Some(&f(-0.5, 0.9))), Verdict::DivergenceDetected);
        assert_eq!(Verdict::from_fit(Some(&f(-0.5, 0.5))), Verdict::Inconclusive);
        assert_eq!(Verdict::from_fit(Some(&f(0.02, 0.1))), Verdict::LneConsistent);
        assert_eq!(Verdict::from_fit(Some(&f(-0.15, 0.99))), Verdict::Inconclusive);
        assert_eq!(Verdict::from_fit(None), Verdict::Inconclusive);
    }

    #[test]
    fn schedules() {
        assert_eq!(parse_schedule("0.2:0.025:log4").unwrap(), geometric_scales(0.2, 0.025, 4).unwrap());
        assert_eq!(parse_schedule("1:0.5:lin3").unwrap(), vec![1.0, 0.75, 0.5]);
        assert!(parse_schedule("0.1:0.2:log4").is_err());
        assert!(parse_schedule("0.2:0.1").is_err());
    }

    #[test]
    fn scales_are_geometric() {
        let s = geometric_scales(0.2, 0.025, 4).unwrap();
        assert_eq!(s.len(), 4);
        assert!((s[1] - 0.1).abs() < 1e-15 && s[3] == 0.025);
    }
}
