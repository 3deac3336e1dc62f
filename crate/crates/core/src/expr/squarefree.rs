//! Repeated-factor detection.
//!
//! For every variable `v` occurring in `p`, the other variables are
//! specialised to fixed rationals and `gcd(q, dq/dv)` is computed for the
//! univariate image `q`. If the specialisation keeps the degree in `v` and the
//! gcd is constant, no square factor of `p` involves `v` (the leading
//! coefficient of a square factor would otherwise vanish at the point and lower
//! the degree). A non-constant gcd at every degree-preserving specialisation is
//! reported as a repeated factor; running out of usable specialisations yields
//! [`Squarefree::Unknown`].

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use super::poly::Polynomial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Squarefree {
    Yes,
    No,
    Unknown,
}

impl Squarefree {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Squarefree::Yes => Some(true),
            Squarefree::No => Some(false),
            Squarefree::Unknown => None,
        }
    }
}

const TRIALS: usize = 6;

pub fn is_squarefree(p: &Polynomial) -> Result<Squarefree> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut undecided = false;
    for v in 0..p.num_vars() {
        let deg = p.degree_in(v);
        if deg == 0 {
            continue;
        }
        let mut lucky = 0;
        let mut repeated = 0;
        for trial in 0..TRIALS {
            let point = specialisation(p.num_vars(), v, trial);
            let q = univariate_image(p, v, &point);
            if degree(&q) != Some(deg as usize) {
                continue;
            }
            lucky += 1;
            let g = gcd(&q, &derivative(&q));
            if degree(&g) == Some(0) {
                repeated = 0;
                break;
            }
            repeated += 1;
        }
        if lucky == 0 {
            undecided = true;
        } else if repeated == lucky {
            return Ok(Squarefree::No);
        }
    }
    Ok(if undecided {
        Squarefree::Unknown
    } else {
        Squarefree::Yes
    })
}

fn specialisation(nvars: usize, skip: usize, trial: usize) -> Vec<BigRational> {
    const PRIMES: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    (0..nvars)
        .map(|j| {
            if j == skip {
                BigRational::zero()
            } else {
                let n = PRIMES[(j + 3 * trial) % PRIMES.len()] + trial as i64;
                let d = PRIMES[(2 * j + trial + 1) % PRIMES.len()];
                let sign = if (j + trial).is_multiple_of(2) { 1 } else { -1 };
                BigRational::new(BigInt::from(sign * n), BigInt::from(d))
            }
        })
        .collect()
}

/// Coefficients (index = degree) of `p` with all variables but `v` fixed.
fn univariate_image(p: &Polynomial, v: usize, point: &[BigRational]) -> Vec<BigRational> {
    let mut coeffs = vec![BigRational::zero(); p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut value = c.clone();
        for (j, &e) in m.0.iter().enumerate() {
            if j != v && e > 0 {
                value *= num::pow(point[j].clone(), e as usize);
            }
        }
        coeffs[m.0[v] as usize] += value;
    }
    trim(coeffs)
}

fn trim(mut c: Vec<BigRational>) -> Vec<BigRational> {
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    c
}

fn degree(c: &[BigRational]) -> Option<usize> {
    c.len().checked_sub(1)
}

fn derivative(c: &[BigRational]) -> Vec<BigRational> {
    trim(
        c.iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| a * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap().clone() / lead.clone();
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &factor * bc;
        }
        r = trim(r);
    }
    r
}

/// Monic gcd over the rationals.
fn gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in a.iter_mut() {
            *c /= lead.clone();
        }
    }
    debug_assert!(a.last().is_none_or(One::is_one));
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{expand, parse};

    fn sf(text: &str) -> Squarefree {
        let v: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        is_squarefree(&expand(&parse(text, &v).unwrap(), &v).unwrap()).unwrap()
    }

    #[test]
    fn cusp_cone_is_not_squarefree() {
        assert_eq!(sf("y^2"), Squarefree::No);
    }

    #[test]
    fn four_planes_are_squarefree() {
        assert_eq!(sf("y^4+z^4"), Squarefree::Yes);
    }

    #[test]
    fn reducible_but_squarefree() {
        assert_eq!(sf("y*(x^2+y^2)"), Squarefree::Yes);
    }

    #[test]
    fn hidden_square_factors() {
        assert_eq!(sf("(x+y)^2*(x-z)"), Squarefree::No);
        assert_eq!(sf("y^2*(x+1)"), Squarefree::No);
        assert_eq!(sf("(x^2+y^2+z^2)^3"), Squarefree::No);
        assert_eq!(sf("x*y*z"), Squarefree::Yes);
        assert_eq!(sf("7"), Squarefree::Yes);
    }

    #[test]
    fn zero_is_an_error() {
        let v = vec!["x".to_string()];
        assert!(is_squarefree(&Polynomial::zero(&v)).is_err());
    }

    #[test]
    fn univariate_gcd() {
        let q = |v: &[i64]| -> Vec<BigRational> {
            v.iter().map(|&c| BigRational::from_integer(c.into())).collect()
        };
        // (t-1)^2 (t+2) = t^3 - 3t + 2
        let p = q(&[2, -3, 0, 1]);
        assert_eq!(gcd(&p, &derivative(&p)), q(&[-1, 1]));
    }
}
