//! Exact symbolic kernel: canonical rational-function expressions over
//! coordinates, jet variables, abstract functions and a few elementary
//! functions.

mod atom;
mod calculus;
mod coeff;
mod expr;
mod parse;
mod poly;

pub use atom::{Atom, ElemApp, ElemKind, FuncApp, Indep, JetVar, DEPENDENT, EPS, MAX_JET_ORDER};
pub use coeff::Coeff;
pub use expr::{Bindings, EpsMode, Expr};
pub use parse::{parse, parse_list, REDUCED_FUNCTIONS};
pub use poly::{gcd, Monomial, Poly};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function `{name}` at position {pos}")]
    UnknownFunction { name: String, pos: usize },
    #[error("non-integer exponent at position {pos}")]
    NonIntegerExponent { pos: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("jet coordinate {0} in a partial derivative; use a total derivative")]
    JetInPartial(String),
    #[error("jet order limit exceeded by {0}")]
    JetOrderExceeded(String),
    #[error("function `{name}` expects {expected} derivative indices, got {got}")]
    DerivativeArity { name: String, expected: usize, got: usize },
}
