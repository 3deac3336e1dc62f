//! Numerical and symbolic probes for the local metric geometry of
//! semialgebraic germs.
//!
//! The crate answers three questions about a germ `(X, p)` given by
//! polynomial equations and inequalities:
//!
//! * is the inner (path) metric comparable to the outer (Euclidean) one near
//!   `p`? ([`metric::lne_profile`], [`witness::witness_table`])
//! * what is the tangent cone at `p`? ([`cone::directions`] for the sampled
//!   spherical blow-up, [`cone::symbolic_cone`] via initial forms)
//! * is the tangent cone reduced, i.e. does every simple boundary direction of
//!   the blow-up carry exactly one local sheet? ([`cone::kx_estimate`])
//!
//! The worked examples ship in [`corpus`]; the `lipcone` binary wraps all of it.

// `!(a < b)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cone;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod metric;
pub mod variety;
pub mod witness;

pub use error::{Error, Result};
pub use expr::{expand, parse, Expr, Polynomial, Squarefree};
pub use variety::{Germ, SemialgebraicSet, SetDef};
