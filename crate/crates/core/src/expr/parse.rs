//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := NUMBER | IDENT | 'abs(' IDENT ')' | 'sqrt(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. Division is
//! accepted only by constants (checked when expanding) and `sqrt` only when
//! [`ParseOptions::allow_sqrt`] is set.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Var(usize),
    Abs(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Sqrt(Box<Expr>),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub allow_sqrt: bool,
}

/// Parses `text` over the ordered variable list `vars`.
pub fn parse(text: &str, vars: &[String]) -> Result<Expr> {
    parse_with(text, vars, ParseOptions::default())
}

pub fn parse_with(text: &str, vars: &[String], options: ParseOptions) -> Result<Expr> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars,
        options,
        end: text.len(),
    };
    let expr = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(Error::Syntax {
            offset: tok.offset,
            message: format!("unexpected {:?}", tok.kind),
        });
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Int(BigInt),
    Decimal(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let int_part = &text[start..i];
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let frac_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let frac = &text[frac_start..i];
                    if int_part.is_empty() && frac.is_empty() {
                        return Err(Error::Syntax {
                            offset: start,
                            message: "lone '.'".into(),
                        });
                    }
                    let digits = format!("{int_part}{frac}");
                    let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
                    let denom = num::pow(BigInt::from(10), frac.len());
                    tokens.push(Token {
                        kind: TokenKind::Decimal(BigRational::new(numer, denom)),
                        offset: start,
                    });
                } else {
                    tokens.push(Token {
                        kind: TokenKind::Int(int_part.parse().expect("digits")),
                        offset: start,
                    });
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character {:?}", c as char),
                })
            }
        };
        tokens.push(Token {
            kind,
            offset: start,
        });
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    options: ParseOptions,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.offset(),
                message: format!("expected {kind:?}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&TokenKind::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&TokenKind::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&TokenKind::Star) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&TokenKind::Slash) {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&TokenKind::Minus) {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(&TokenKind::Caret) {
            return Ok(base);
        }
        let offset = self.offset();
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Int(n)) => {
                self.pos += 1;
                let exp = n.to_u32().ok_or(Error::BadExponent { offset })?;
                Ok(Expr::Pow(Box::new(base), exp))
            }
            Some(TokenKind::Minus) | Some(TokenKind::Decimal(_)) => {
                Err(Error::BadExponent { offset })
            }
            _ => Err(Error::Syntax {
                offset,
                message: "expected integer exponent".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax {
                offset,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Int(n) => Ok(Expr::Num(BigRational::from_integer(n))),
            TokenKind::Decimal(q) => Ok(Expr::Num(q)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) if name == "abs" && self.peek_is(&TokenKind::LParen) => {
                self.expect(TokenKind::LParen)?;
                let var_offset = self.offset();
                let index = match self.peek().map(|t| t.kind.clone()) {
                    Some(TokenKind::Ident(v)) => {
                        self.pos += 1;
                        self.lookup(&v, var_offset)?
                    }
                    _ => {
                        return Err(Error::Syntax {
                            offset: var_offset,
                            message: "abs() takes a single variable".into(),
                        })
                    }
                };
                if !self.peek_is(&TokenKind::RParen) {
                    return Err(Error::Syntax {
                        offset: self.offset(),
                        message: "abs() takes a single variable".into(),
                    });
                }
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Abs(index))
            }
            TokenKind::Ident(name) if name == "sqrt" && self.peek_is(&TokenKind::LParen) => {
                if !self.options.allow_sqrt {
                    return Err(Error::SqrtNode);
                }
                self.expect(TokenKind::LParen)?;
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Sqrt(Box::new(inner)))
            }
            TokenKind::Ident(name) => Ok(Expr::Var(self.lookup(&name, tok.offset)?)),
            other => Err(Error::Syntax {
                offset: tok.offset,
                message: format!("unexpected {other:?}"),
            }),
        }
    }

    fn peek_is(&self, kind: &TokenKind) -> bool {
        self.peek().is_some_and(|t| &t.kind == kind)
    }

    fn lookup(&self, name: &str, offset: usize) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable {
                name: name.to_string(),
                offset,
            })
    }
}

impl Expr {
    /// Floating evaluation; `sqrt` of a negative radicand is an error.
    pub fn eval(&self, values: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Num(q) => q.to_f64().unwrap_or(f64::NAN),
            Expr::Var(i) => values[*i],
            Expr::Abs(i) => values[*i].abs(),
            Expr::Neg(e) => -e.eval(values)?,
            Expr::Add(a, b) => a.eval(values)? + b.eval(values)?,
            Expr::Sub(a, b) => a.eval(values)? - b.eval(values)?,
            Expr::Mul(a, b) => a.eval(values)? * b.eval(values)?,
            Expr::Div(a, b) => a.eval(values)? / b.eval(values)?,
            Expr::Pow(a, n) => a.eval(values)?.powi(*n as i32),
            Expr::Sqrt(a) => {
                let v = a.eval(values)?;
                if v < 0.0 {
                    // rounding noise at the end of a curve's domain
                    if v > -1e-14 {
                        0.0
                    } else {
                        return Err(Error::NegativeRadicand(v));
                    }
                } else {
                    v.sqrt()
                }
            }
        })
    }

    /// Indices of variables wrapped in `abs()`, sorted and deduplicated.
    pub fn abs_vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Abs(i) = e {
                out.push(*i);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sqrt(a) => a.walk(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::Num(_) | Expr::Var(_) | Expr::Abs(_) => {}
        }
    }

    /// Replaces `abs(v)` by `sign(v) * v` using the supplied sign per variable.
    pub fn resolve_abs(&self, sign_of: &dyn Fn(usize) -> bool) -> Expr {
        let rec = |e: &Expr| Box::new(e.resolve_abs(sign_of));
        match self {
            Expr::Abs(i) => {
                if sign_of(*i) {
                    Expr::Var(*i)
                } else {
                    Expr::Neg(Box::new(Expr::Var(*i)))
                }
            }
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(rec(a)),
            Expr::Pow(a, n) => Expr::Pow(rec(a), *n),
            Expr::Sqrt(a) => Expr::Sqrt(rec(a)),
            Expr::Add(a, b) => Expr::Add(rec(a), rec(b)),
            Expr::Sub(a, b) => Expr::Sub(rec(a), rec(b)),
            Expr::Mul(a, b) => Expr::Mul(rec(a), rec(b)),
            Expr::Div(a, b) => Expr::Div(rec(a), rec(b)),
        }
    }

    /// Top-level multiplicative factors; a non-product is its own single factor.
    pub fn factors(&self) -> Vec<&Expr> {
        match self {
            Expr::Mul(a, b) => {
                let mut out = a.factors();
                out.extend(b.factors());
                out
            }
            other => vec![other],
        }
    }

    pub(crate) fn constant_value(&self) -> Option<BigRational> {
        match self {
            Expr::Num(q) => Some(q.clone()),
            Expr::Neg(a) => a.constant_value().map(|q| -q),
            Expr::Pow(a, n) => a.constant_value().map(|q| num::pow(q, *n as usize)),
            Expr::Mul(a, b) => Some(a.constant_value()? * b.constant_value()?),
            Expr::Add(a, b) => Some(a.constant_value()? + b.constant_value()?),
            Expr::Sub(a, b) => Some(a.constant_value()? - b.constant_value()?),
            Expr::Div(a, b) => {
                let d = b.constant_value()?;
                (!d.is_zero()).then(|| a.constant_value().map(|n| n / d))?
            }
            _ => None,
        }
    }
}

/// Formats an exact rational the way the parser reads it back.
pub(crate) fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else if q.is_negative() {
        format!("-{}/{}", q.numer().abs(), q.denom())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_cusp() {
        let e = parse("y^2 - x^3", &vars(&["x", "y"])).unwrap();
        assert_eq!(e.eval(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(e.eval(&[2.0, 1.0]).unwrap(), -7.0);
    }

    #[test]
    fn parses_double_spheres() {
        let v = vars(&["x", "y", "z", "t"]);
        let e = parse("((x-t)^2+y^2+z^2-t^2)*((x+t)^2+y^2+z^2-t^2)-t^10", &v).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0, 0.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn power_binds_tighter_than_negation() {
        let e = parse("-x^2", &vars(&["x"])).unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -9.0);
    }

    #[test]
    fn rejects_negative_and_fractional_exponents() {
        let v = vars(&["x"]);
        assert!(matches!(parse("x^-1", &v), Err(Error::BadExponent { offset: 2 })));
        assert!(matches!(parse("x^1.5", &v), Err(Error::BadExponent { .. })));
    }

    #[test]
    fn reports_unknown_variable_with_offset() {
        match parse("x + w", &vars(&["x"])) {
            Err(Error::UnknownVariable { name, offset }) => {
                assert_eq!(name, "w");
                assert_eq!(offset, 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let v = vars(&["x", "y"]);
        assert!(matches!(parse("x +", &v), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("2x", &v), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse("(x", &v), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x $ y", &v), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn decimals_are_exact() {
        let e = parse("0.5", &[]).unwrap();
        assert_eq!(e, Expr::Num(BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn abs_only_of_a_variable() {
        let v = vars(&["y", "z"]);
        assert_eq!(parse("abs(y)", &v).unwrap(), Expr::Abs(0));
        assert!(parse("abs(y+z)", &v).is_err());
        let e = parse("(abs(y)-z-z^3)^2", &v).unwrap();
        assert_eq!(e.abs_vars(), vec![0]);
    }

    #[test]
    fn sqrt_requires_opt_in() {
        let v = vars(&["s"]);
        assert!(matches!(parse("sqrt(s)", &v), Err(Error::SqrtNode)));
        let e = parse_with("sqrt(1-(1-s)^2)", &v, ParseOptions { allow_sqrt: true }).unwrap();
        assert!((e.eval(&[0.5]).unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(matches!(e.eval(&[3.0]), Err(Error::NegativeRadicand(_))));
    }

    #[test]
    fn product_factors() {
        let v = vars(&["x", "y", "z"]);
        let e = parse("y*(x^2+(y-z^2)^2-z^4)", &v).unwrap();
        assert_eq!(e.factors().len(), 2);
    }
}
