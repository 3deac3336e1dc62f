//! Expressions, exact polynomials, initial forms and realification.

mod parse;
mod poly;
mod squarefree;

pub use parse::{parse, parse_with, Expr, ParseOptions};
pub use poly::{expand, CompiledPoly, Monomial, Polynomial};
pub use squarefree::{is_squarefree, Squarefree};

use num::{BigRational, One};

use crate::error::{Error, Result};

/// Real variable names for a complex variable list: `x` becomes `x_re, x_im`.
pub fn realified_vars(vars: &[String]) -> Vec<String> {
    vars.iter()
        .flat_map(|v| [format!("{v}_re"), format!("{v}_im")])
        .collect()
}

/// Writes each complex polynomial `f` as `u + i v` with `u, v` real
/// polynomials in `(a_1, b_1, ..., a_m, b_m)`, where `z_k = a_k + i b_k`.
///
/// Coefficients are rationals, hence real; a non-real constant cannot be
/// written in the input grammar.
pub fn realify(system: &[Polynomial]) -> Result<Vec<(Polynomial, Polynomial)>> {
    let Some(first) = system.first() else {
        return Ok(Vec::new());
    };
    let vars = first.vars().to_vec();
    if system.iter().any(|p| p.vars() != vars.as_slice()) {
        return Err(Error::VariableMismatch);
    }
    let real_vars = realified_vars(&vars);
    let one = || Polynomial::constant(&real_vars, BigRational::one());
    let zero = || Polynomial::zero(&real_vars);
    // powers[k][e] = (re, im) of z_k^e
    let mut powers: Vec<Vec<(Polynomial, Polynomial)>> = (0..vars.len())
        .map(|k| {
            vec![
                (one(), zero()),
                (
                    Polynomial::var(&real_vars, 2 * k),
                    Polynomial::var(&real_vars, 2 * k + 1),
                ),
            ]
        })
        .collect();
    let cmul = |a: &(Polynomial, Polynomial), b: &(Polynomial, Polynomial)| {
        (
            &(&a.0 * &b.0) - &(&a.1 * &b.1),
            &(&a.0 * &b.1) + &(&a.1 * &b.0),
        )
    };
    let mut out = Vec::with_capacity(system.len());
    for f in system {
        let (mut u, mut v) = (zero(), zero());
        for (m, c) in f.terms() {
            let mut acc = (Polynomial::constant(&real_vars, c.clone()), zero());
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[k].len() <= e as usize {
                    let next = cmul(&powers[k][powers[k].len() - 1], &powers[k][1]);
                    powers[k].push(next);
                }
                acc = cmul(&acc, &powers[k][e as usize]);
            }
            u = &u + &acc.0;
            v = &v + &acc.1;
        }
        out.push((u, v));
    }
    Ok(out)
}

/// Exact conversion of a finite float to a rational.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidArgument(format!("non-finite coordinate {x}")))
}

pub(crate) fn rational_vec(xs: &[f64]) -> Result<Vec<BigRational>> {
    xs.iter().map(|&x| rational_from_f64(x)).collect()
}
