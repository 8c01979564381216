//! Square roots of rational functions by adjoining radical symbols.
//!
//! Integer radicands are split into prime square roots, so `sqrt(2*t)`
//! becomes `sqrt(2)*sqrt(t)` and every product of radicals has one spelling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{sqrt_bigint, Monomial, Polynomial};
use super::ratfun::RF;
use super::symbol::Symbol;
use crate::error::Result;

/// Radical symbol for `sqrt(value)`, declared on first use.
pub fn sqrt_symbol(value: &Polynomial) -> Result<Symbol> {
    Symbol::root(&format!("sqrt({value})"), 2, value.clone())
}

/// Writes `n = k^2 * f` with `f` squarefree; returns `k` and the prime factors of `f`.
///
/// Trial division stops at 10^6; a cofactor left over is kept as one factor.
fn squarefree_split(n: &BigInt) -> (BigInt, Vec<BigInt>) {
    let mut n = n.clone();
    let mut k = BigInt::one();
    let mut primes = Vec::new();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= n && p <= limit {
        let mut e = 0u32;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= &p;
        }
        if e % 2 == 1 {
            primes.push(p.clone());
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if n > BigInt::one() {
        match sqrt_bigint(&n) {
            Some(r) => k *= r,
            None => primes.push(n),
        }
    }
    (k, primes)
}

/// Square root of a nonzero rational as `coefficient * product of radicals`.
fn sqrt_rational(c: &BigRational) -> Result<Polynomial> {
    let neg = c.is_negative();
    let a = c.abs();
    let n = a.numer() * a.denom();
    let (k, primes) = squarefree_split(&n);
    let mut out = Polynomial::constant(BigRational::new(k, a.denom().clone()));
    for pr in primes {
        let s = sqrt_symbol(&Polynomial::constant(BigRational::from_integer(pr)))?;
        out = &out * &Polynomial::symbol(s);
    }
    if neg {
        let s = sqrt_symbol(&Polynomial::from_i64(-1))?;
        out = &out * &Polynomial::symbol(s);
    }
    Ok(out)
}

/// Square root of a nonzero polynomial; perfect squares come back without radicals.
pub fn sqrt_poly(p: &Polynomial) -> Result<Polynomial> {
    if p.is_zero() {
        return Ok(Polynomial::zero());
    }
    let m = p.monomial_content();
    let rest = p.div_monomial(&m).unwrap();
    let mut c = rest.rational_content();
    if rest.is_monomial() && rest.leading_sign() < 0 {
        c = -c;
    }
    let prim = rest.scale(&c.recip());
    let mut out = sqrt_rational(&c)?;
    let mut half = Vec::new();
    for &(s, e) in m.factors() {
        if e / 2 > 0 {
            half.push((s, e / 2));
        }
        if e % 2 == 1 {
            let r = sqrt_symbol(&Polynomial::symbol(s))?;
            out = &out * &Polynomial::symbol(r);
        }
    }
    out = out.mul_term(&Monomial::from_pairs(half), &BigRational::one());
    if !prim.is_one() {
        match prim.try_sqrt() {
            Some(r) => out = &out * &r,
            None => {
                let r = sqrt_symbol(&prim)?;
                out = &out * &Polynomial::symbol(r);
            }
        }
    }
    Ok(out)
}

/// Principal-branch square root of a rational function, adjoining radicals as needed.
pub fn sqrt(f: &RF) -> Result<RF> {
    if f.is_zero() {
        return Ok(RF::zero());
    }
    let n = f.num();
    let d = f.den();
    if let (Some(a), Some(b)) = (exact_sqrt(n), exact_sqrt(d)) {
        return RF::new(a, b);
    }
    let top = sqrt_poly(&(n * d))?;
    RF::new(top, d.clone())
}

fn exact_sqrt(p: &Polynomial) -> Option<Polynomial> {
    if let Some(c) = p.as_constant() {
        if c.is_zero() || c.is_negative() {
            return None;
        }
        return super::poly::sqrt_rational(&c).map(Polynomial::constant);
    }
    let c = p.rational_content();
    let root_c = super::poly::sqrt_rational(&c)?;
    p.scale(&c.recip()).try_sqrt().map(|r| r.scale(&root_c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;

    #[test]
    fn integer_radicands_split_into_primes() {
        let r = sqrt(&RF::from_i64(12)).unwrap();
        assert_eq!(r.to_string(), "2*sqrt(3)");
        let r = sqrt(&parse("2*t0").unwrap()).unwrap();
        assert_eq!(r.to_string(), "sqrt(2)*sqrt(t0)");
    }

    #[test]
    fn squares_stay_rational() {
        let r = sqrt(&parse("t^2 - 2*t + 1").unwrap()).unwrap();
        assert_eq!(r, parse("t - 1").unwrap());
        assert_eq!(sqrt(&parse("9/4").unwrap()).unwrap(), parse("3/2").unwrap());
    }

    #[test]
    fn square_of_root_is_radicand() {
        for s in ["2*t", "t + 1", "-3", "5/7*x^3"] {
            let f = parse(s).unwrap();
            let r = sqrt(&f).unwrap();
            assert_eq!(&r * &r, f, "{s}");
        }
    }
}
