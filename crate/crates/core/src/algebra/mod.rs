//! Exact arithmetic: rationals, polynomials with adjoined roots, rational functions.

mod eval;
mod parse;
mod poly;
mod radical;
mod ratfun;
mod solve;
mod symbol;

pub use eval::{eval_numeric, Assignment, Compiled};
pub use parse::{parse, parse_with};
pub use poly::{Monomial, Polynomial};
pub use radical::{sqrt, sqrt_poly, sqrt_symbol};
pub use ratfun::{RationalFunction, RF};
pub(crate) use ratfun::radical_depends_on;
pub use solve::{horner, solve, solve_coefficients, Root, Roots};
pub use symbol::{RootRule, Symbol, SymbolKind};


/// Shorthand for looking up a seeded or previously declared symbol.
pub fn sym(name: &str) -> Symbol {
    Symbol::lookup(name).unwrap_or_else(|| panic!("symbol `{name}` is not declared"))
}
