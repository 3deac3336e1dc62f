use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigRational, One, Signed, ToPrimitive, Zero};

use super::parse::{format_rational, Expr};
use crate::error::{Error, Result};

/// Exponent vector ordered graded-lexicographically: higher total degree is
/// greater, ties broken by the first variable with a larger exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// polynomials over the same variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(vars: &[String]) -> Self {
        Polynomial {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: BigRational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial(vec![0; vars.len()]), c);
        p
    }

    pub fn var(vars: &[String], index: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[index] = 1;
        let mut p = Self::zero(vars);
        p.add_term(Monomial(exps), BigRational::one());
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, collecting like terms.
    pub fn from_terms(
        vars: &[String],
        terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(vars);
        for (exps, c) in terms {
            if exps.len() != vars.len() {
                return Err(Error::DimensionMismatch {
                    expected: vars.len(),
                    got: exps.len(),
                });
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Terms in descending term order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial(vec![0; self.vars.len()]))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Lowest total degree of a nonzero term (order of vanishing at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.order() == self.degree()
    }

    /// Sum of the terms of minimal total degree.
    pub fn initial_form(&self) -> Result<Polynomial> {
        let k = self.order().ok_or(Error::ZeroPolynomial)?;
        Ok(Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * BigRational::from_integer(e.into()));
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut result = Self::constant(&self.vars, BigRational::one());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn check_dim(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.check_dim(point)?;
        Ok(self.compile().eval(point))
    }

    pub fn grad(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(point)?;
        let compiled = self.compile();
        let mut g = vec![0.0; point.len()];
        compiled.eval_grad(point, &mut g);
        Ok(g)
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.vars.len(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        c.to_f64().unwrap_or(f64::NAN),
                        m.0.iter()
                            .enumerate()
                            .filter(|(_, &e)| e > 0)
                            .map(|(i, &e)| (i, e))
                            .collect(),
                    )
                })
                .collect(),
        }
    }

    /// Substitutes `x_i = origin_i + sum_j basis[j][i] * u_j` exactly,
    /// producing a polynomial in the new variables `new_vars` (one per basis
    /// vector).
    pub fn affine_substitute(
        &self,
        origin: &[BigRational],
        basis: &[Vec<BigRational>],
        new_vars: &[String],
    ) -> Result<Polynomial> {
        if origin.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: origin.len(),
            });
        }
        if basis.len() != new_vars.len() || basis.iter().any(|b| b.len() != self.vars.len()) {
            return Err(Error::InvalidArgument("basis shape does not match".into()));
        }
        let images: Vec<Polynomial> = (0..self.vars.len())
            .map(|i| {
                let mut p = Polynomial::constant(new_vars, origin[i].clone());
                for (j, b) in basis.iter().enumerate() {
                    p = &p + &Polynomial::var(new_vars, j).scale(&b[i]);
                }
                p
            })
            .collect();
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::constant(new_vars, BigRational::one()), p.clone()])
            .collect();
        let mut out = Polynomial::zero(new_vars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(new_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][e as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Renames the variable list without touching the terms.
    pub fn with_vars(&self, vars: &[String]) -> Result<Polynomial> {
        if vars.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: vars.len(),
            });
        }
        Ok(Polynomial {
            vars: vars.to_vec(),
            terms: self.terms.clone(),
        })
    }

    /// Writes the polynomial with parentheses when it has more than one term,
    /// for use as a factor in a product.
    pub fn to_factor_string(&self) -> String {
        if self.num_terms() > 1 {
            format!("({self})")
        } else {
            self.to_string()
        }
    }
}

fn combine(a: &Polynomial, b: &Polynomial, sign: bool) -> Polynomial {
    assert_eq!(a.vars, b.vars, "polynomials over different variable lists");
    let mut out = a.clone();
    for (m, c) in &b.terms {
        out.add_term(m.clone(), if sign { c.clone() } else { -c.clone() });
    }
    out
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, true)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, false)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.vars, rhs.vars, "polynomials over different variable lists");
        let mut out = Polynomial::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let exps = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                out.add_term(Monomial(exps), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { "-" } else { "+" })?;
            }
            let abs = c.abs();
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], e)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", format_rational(&abs))?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Floating-point evaluator for a fixed polynomial.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, factors)| {
                factors
                    .iter()
                    .fold(*c, |acc, &(i, e)| acc * x[i].powi(e as i32))
            })
            .sum()
    }

    /// Value and gradient (written into `grad`) in one pass.
    pub fn eval_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut value = 0.0;
        for (c, factors) in &self.terms {
            let mut v = *c;
            for &(i, e) in factors {
                v *= x[i].powi(e as i32);
            }
            value += v;
            for (k, &(i, e)) in factors.iter().enumerate() {
                let mut d = *c * e as f64 * x[i].powi(e as i32 - 1);
                for (l, &(j, ej)) in factors.iter().enumerate() {
                    if l != k {
                        d *= x[j].powi(ej as i32);
                    }
                }
                grad[i] += d;
            }
        }
        value
    }
}

/// Expands a parse tree into a canonical polynomial over `vars`.
pub fn expand(e: &Expr, vars: &[String]) -> Result<Polynomial> {
    Ok(match e {
        Expr::Num(q) => Polynomial::constant(vars, q.clone()),
        Expr::Var(i) => Polynomial::var(vars, *i),
        Expr::Abs(_) => return Err(Error::AbsNode),
        Expr::Sqrt(_) => return Err(Error::SqrtNode),
        Expr::Neg(a) => -&expand(a, vars)?,
        Expr::Add(a, b) => &expand(a, vars)? + &expand(b, vars)?,
        Expr::Sub(a, b) => &expand(a, vars)? - &expand(b, vars)?,
        Expr::Mul(a, b) => &expand(a, vars)? * &expand(b, vars)?,
        Expr::Div(a, b) => {
            let d = b.constant_value().ok_or(Error::NonConstantDivisor)?;
            if d.is_zero() {
                return Err(Error::NonConstantDivisor);
            }
            expand(a, vars)?.scale(&(BigRational::one() / d))
        }
        Expr::Pow(a, n) => expand(a, vars)?.pow(*n),
    })
}
