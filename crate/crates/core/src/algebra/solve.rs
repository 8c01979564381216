//! Roots of a polynomial in one distinguished variable, coefficients in the other symbols.
//!
//! Only what the singularity analysis needs: linear and quadratic factors, with
//! rational-looking roots split off higher-degree equations by trial deflation.

use super::poly::Polynomial;
use super::ratfun::RF;
use super::symbol::{Symbol, SymbolKind};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: RF,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, Default)]
pub struct Roots {
    pub roots: Vec<Root>,
    /// Coefficients (ascending) of a factor no root could be split off, if any.
    pub unresolved: Option<Vec<RF>>,
}

/// Coefficients of `p` in `var`, ascending, as rational functions of the other symbols.
pub fn coefficients(p: &Polynomial, var: Symbol) -> Vec<RF> {
    p.coefficients_in(var).into_iter().map(RF::from_poly).collect()
}

pub fn horner(coeffs: &[RF], x: &RF) -> RF {
    let mut acc = RF::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Divides by `(var - r)`, assuming `r` is a root.
fn deflate(coeffs: &[RF], r: &RF) -> Vec<RF> {
    let n = coeffs.len() - 1;
    let mut out = vec![RF::zero(); n];
    let mut carry = RF::zero();
    for k in (0..n).rev() {
        carry = &coeffs[k + 1] + &(&carry * r);
        out[k] = carry.clone();
    }
    out
}

fn trim(mut c: Vec<RF>) -> Vec<RF> {
    while c.len() > 1 && c.last().unwrap().is_zero() {
        c.pop();
    }
    c
}

fn candidates(coeffs: &[RF]) -> Vec<RF> {
    let mut out: Vec<RF> = vec![
        RF::from_i64(1),
        RF::from_i64(-1),
        RF::from_i64(2),
        RF::from_i64(-2),
        RF::ratio(1, 2),
        RF::ratio(-1, 2),
    ];
    let mut syms = std::collections::BTreeSet::new();
    for c in coeffs {
        for s in c.symbols() {
            if matches!(s.kind(), SymbolKind::Time | SymbolKind::Parameter) {
                syms.insert(s);
            }
        }
    }
    for s in syms {
        let x = RF::symbol(s);
        let inv = x.recip().expect("symbol is nonzero");
        for k in [1, -1, 2, -2] {
            out.push(x.scale(&num_rational::BigRational::from_integer(k.into())));
            out.push(inv.scale(&num_rational::BigRational::from_integer(k.into())));
        }
    }
    out
}

fn push_root(out: &mut Vec<Root>, value: RF) {
    match out.iter_mut().find(|r| r.value == value) {
        Some(r) => r.multiplicity += 1,
        None => out.push(Root {
            value,
            multiplicity: 1,
        }),
    }
}

/// Solves `coeffs[0] + coeffs[1] x + ... = 0` as far as the supported cases reach.
pub fn solve_coefficients(coeffs: Vec<RF>) -> Result<Roots> {
    let mut c = trim(coeffs);
    let mut roots = Vec::new();
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        push_root(&mut roots, RF::zero());
    }
    loop {
        match c.len() {
            0 | 1 => {
                return Ok(Roots {
                    roots,
                    unresolved: None,
                })
            }
            2 => {
                push_root(&mut roots, (-&c[0]).checked_div(&c[1])?);
                return Ok(Roots {
                    roots,
                    unresolved: None,
                });
            }
            3 => {
                let (a, b, cc) = (&c[2], &c[1], &c[0]);
                let disc = &(b * b) - &(&RF::from_i64(4) * &(a * cc));
                let two_a = a.scale(&super::poly::rat(2));
                if disc.is_zero() {
                    let r = (-b).checked_div(&two_a)?;
                    push_root(&mut roots, r.clone());
                    push_root(&mut roots, r);
                } else {
                    let s = disc.sqrt()?;
                    push_root(&mut roots, (&(-b) + &s).checked_div(&two_a)?);
                    push_root(&mut roots, (&(-b) - &s).checked_div(&two_a)?);
                }
                return Ok(Roots {
                    roots,
                    unresolved: None,
                });
            }
            _ => {
                let found = candidates(&c).into_iter().find(|r| horner(&c, r).is_zero());
                match found {
                    Some(r) => {
                        c = deflate(&c, &r);
                        push_root(&mut roots, r);
                    }
                    None => {
                        return Ok(Roots {
                            roots,
                            unresolved: Some(c),
                        })
                    }
                }
            }
        }
    }
}

pub fn solve(p: &Polynomial, var: Symbol) -> Result<Roots> {
    solve_coefficients(coefficients(p, var))
}
