//! Property suites shared by `properties.rs` and the acceptance run.

use lipcone::expr::{expand, parse, Polynomial};
use lipcone::metric::build_graph;
use num::{BigInt, BigRational};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub fn vars() -> Vec<String> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

fn term() -> impl Strategy<Value = (Vec<u32>, i64)> {
    (prop::collection::vec(0u32..4, 3), (-6i64..=6).prop_filter("nonzero", |c| *c != 0))
}

/// Nonzero polynomials in x, y, z with small integer coefficients.
pub fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(term(), 1..6)
        .prop_map(|terms| {
            Polynomial::from_terms(
                &vars(),
                terms
                    .into_iter()
                    .map(|(e, c)| (e, BigRational::from_integer(BigInt::from(c)))),
            )
            .unwrap()
        })
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn points(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 3..max)
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// Graph distances are symmetric, satisfy the triangle inequality, dominate
/// the Euclidean distance, and do not grow when the radius grows.
pub fn metric_invariants(cases: u32) -> Result<(), String> {
    run(cases, (points(40), 0.2f64..1.5), |(pts, r)| {
        let g = build_graph(pts.clone(), r).unwrap();
        let coarse = build_graph(pts.clone(), 1.5 * r).unwrap();
        let d: Vec<Vec<f64>> = (0..g.len()).map(|i| g.dijkstra(i)).collect();
        for i in 0..g.len() {
            let dc = coarse.dijkstra(i);
            for j in 0..g.len() {
                // Path sums associate differently in each direction.
                prop_assert!(d[i][j] == d[j][i] || (d[i][j] - d[j][i]).abs() <= 1e-12 * d[i][j].max(1.0));
                let outer = lipcone::variety::dist(&pts[i], &pts[j]);
                prop_assert!(d[i][j] >= outer - 1e-12);
                prop_assert!(dc[j] <= d[i][j] + 1e-12);
                for k in 0..g.len() {
                    prop_assert!(d[i][k] <= d[i][j] + d[j][k] + 1e-12);
                }
            }
        }
        Ok(())
    })
}

/// `in(fg) = in(f) in(g)`.
pub fn initial_form_multiplicative(cases: u32) -> Result<(), String> {
    run(cases, (polynomial(), polynomial()), |(f, g)| {
        let lhs = (&f * &g).initial_form().unwrap();
        let rhs = &f.initial_form().unwrap() * &g.initial_form().unwrap();
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

/// `sum_i x_i d/dx_i in(f) = deg in(f) * in(f)`.
pub fn euler_identity(cases: u32) -> Result<(), String> {
    run(cases, polynomial(), |f| {
        let h = f.initial_form().unwrap();
        let vs = vars();
        let mut lhs = Polynomial::zero(&vs);
        for i in 0..vs.len() {
            lhs = &lhs + &(&Polynomial::var(&vs, i) * &h.derivative(i));
        }
        let k = BigRational::from_integer(BigInt::from(h.degree().unwrap()));
        prop_assert_eq!(lhs, h.scale(&k));
        Ok(())
    })
}

/// Printing and re-parsing a polynomial gives the same polynomial.
pub fn print_parse_round_trip(cases: u32) -> Result<(), String> {
    run(cases, polynomial(), |f| {
        let text = f.to_string();
        let back = expand(&parse(&text, &vars()).unwrap(), &vars()).unwrap();
        prop_assert_eq!(back, f, "{}", text);
        Ok(())
    })
}

/// Every expression shipped in the corpus survives expand/print/parse.
pub fn corpus_round_trip() -> Result<usize, String> {
    let mut checked = 0;
    for entry in lipcone::corpus::all().map_err(|e| e.to_string())? {
        let vars = &entry.set.variables;
        let exprs = entry
            .set
            .equations
            .iter()
            .chain(entry.set.inequalities.iter().map(|i| &i.expr));
        for text in exprs {
            let e = parse(text, vars).map_err(|e| format!("{text}: {e}"))?;
            let p = match expand(&e, vars) {
                Ok(p) => p,
                // abs() expressions are not polynomial; check that they
                // evaluate the same after a second parse of the source.
                Err(lipcone::Error::AbsNode) => {
                    let again = parse(text, vars).map_err(|e| e.to_string())?;
                    if again != e {
                        return Err(format!("{text}: unstable parse"));
                    }
                    checked += 1;
                    continue;
                }
                Err(err) => return Err(format!("{text}: {err}")),
            };
            let printed = p.to_string();
            let back = expand(&parse(&printed, vars).map_err(|e| e.to_string())?, vars)
                .map_err(|e| e.to_string())?;
            if back != p {
                return Err(format!("{text} -> {printed} does not round-trip"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Analytic gradients agree with Richardson-extrapolated central differences
/// to 1e-6 relative (floored at 1).
pub fn gradient_matches_differences(cases: u32) -> Result<(), String> {
    let point = prop::collection::vec(-1.0f64..1.0, 3);
    run(cases, (polynomial(), point), |(f, x)| {
        let grad = f.grad(&x).unwrap();
        for (i, &g) in grad.iter().enumerate() {
            let central = |h: f64| {
                let mut a = x.clone();
                let mut b = x.clone();
                a[i] += h;
                b[i] -= h;
                (f.eval(&a).unwrap() - f.eval(&b).unwrap()) / (2.0 * h)
            };
            let h = 1e-3;
            let fd = (4.0 * central(h / 2.0) - central(h)) / 3.0;
            prop_assert!((fd - g).abs() <= 1e-6 * g.abs().max(1.0), "d{i}: {fd} vs {g}");
        }
        Ok(())
    })
}
