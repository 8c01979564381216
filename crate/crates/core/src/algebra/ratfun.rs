//! Quotients of polynomials, kept unreduced; equality by cross-multiplication.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{rat, Monomial, Polynomial};
use super::radical;
use super::symbol::Symbol;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

pub type RF = RationalFunction;

/// `d = c * m * p` with `p` free of monomial content, primitive, positive leading coefficient.
fn split_den(d: &Polynomial) -> (BigRational, Monomial, Polynomial) {
    let m = d.monomial_content();
    let rest = d.div_monomial(&m).expect("content divides");
    let mut c = rest.rational_content();
    if rest.leading_sign() < 0 {
        c = -c;
    }
    let p = rest.scale(&c.recip());
    (c, m, p)
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<RF> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RF::reduced(num, den))
    }

    pub fn from_poly(p: Polynomial) -> RF {
        RF {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn zero() -> RF {
        RF::from_poly(Polynomial::zero())
    }

    pub fn one() -> RF {
        RF::from_poly(Polynomial::one())
    }

    pub fn constant(c: BigRational) -> RF {
        RF::from_poly(Polynomial::constant(c))
    }

    pub fn from_i64(n: i64) -> RF {
        RF::from_poly(Polynomial::from_i64(n))
    }

    pub fn ratio(n: i64, d: i64) -> RF {
        RF::constant(BigRational::new(n.into(), d.into()))
    }

    pub fn symbol(s: Symbol) -> RF {
        RF::from_poly(Polynomial::symbol(s))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// The value as a polynomial when the denominator is a constant.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        let c = self.den.as_constant()?;
        Some(self.num.scale(&c.recip()))
    }

    /// The value as a rational number when both parts are constants.
    pub fn as_constant(&self) -> Option<BigRational> {
        Some(self.num.as_constant()? / self.den.as_constant()?)
    }

    /// Whether `self` equals a rational constant, decided exactly.
    pub fn as_rational_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        let (_, ln) = self.num.leading_term()?;
        let (_, ld) = self.den.leading_term()?;
        let k = ln / ld;
        (self.num == self.den.scale(&k)).then_some(k)
    }

    fn reduced(mut n: Polynomial, mut d: Polynomial) -> RF {
        if n.is_zero() {
            return RF::zero();
        }
        // Clear radicals out of monomial denominators when that keeps them monomial.
        for _ in 0..8 {
            if !d.is_monomial() {
                break;
            }
            let (m, _) = d.leading_term().unwrap();
            let mut factor = None;
            for &(s, e) in m.factors() {
                if let Some(rule) = s.rule() {
                    if rule.value.is_monomial() && e < rule.degree {
                        factor = Some(Monomial::power(s, rule.degree - e));
                        break;
                    }
                }
            }
            match factor {
                Some(f) => {
                    n = n.mul_term(&f, &BigRational::one());
                    d = d.mul_term(&f, &BigRational::one());
                }
                None => break,
            }
        }
        let g = n.monomial_content().gcd(&d.monomial_content());
        if !g.is_one() {
            n = n.div_monomial(&g).unwrap();
            d = d.div_monomial(&g).unwrap();
        }
        if !d.is_monomial() {
            let (c, m, p) = split_den(&d);
            if !p.is_one() {
                if let Some(q) = n.try_div_exact(&p) {
                    n = q;
                    d = Polynomial::term(c, m);
                } else if n.len() <= d.len() && !n.is_monomial() {
                    if let Some(q) = d.try_div_exact(&n) {
                        n = Polynomial::one();
                        d = q;
                    }
                }
            }
        }
        let mut c = d.rational_content();
        if d.leading_sign() < 0 {
            c = -c;
        }
        if !c.is_one() {
            let inv = c.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RF { num: n, den: d }
    }

    pub fn recip(&self) -> Result<RF> {
        RF::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &RF) -> Result<RF> {
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, c: &BigRational) -> RF {
        RF::reduced(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: i32) -> Result<RF> {
        if e >= 0 {
            Ok(RF::reduced(self.num.pow(e as u32), self.den.pow(e as u32)))
        } else {
            self.recip()?.pow(-e)
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s
    }

    /// Symbols, looking through radicals to the symbols their values use.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for s in self.symbols() {
            collect_free(s, &mut out);
        }
        out
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.free_symbols().contains(&s)
    }

    /// Order of vanishing along `s = 0` (negative for a pole).
    pub fn valuation_in(&self, s: Symbol) -> Option<i64> {
        let a = self.num.valuation_in(s)?;
        let b = self.den.valuation_in(s)?;
        Some(a as i64 - b as i64)
    }

    /// Restriction to `s = 0` after cancelling the common power of `s`.
    ///
    /// `Ok(None)` means the restriction has a pole there.
    pub fn restrict_zero(&self, s: Symbol) -> Result<Option<RF>> {
        if self.is_zero() {
            return Ok(Some(RF::zero()));
        }
        let vn = self.num.valuation_in(s).unwrap();
        let vd = self.den.valuation_in(s).unwrap();
        if vn > vd {
            return Ok(Some(RF::zero()));
        }
        if vn < vd {
            return Ok(None);
        }
        let n = &self.num.coefficients_in(s)[vn as usize];
        let d = &self.den.coefficients_in(s)[vd as usize];
        let n = RF::from_poly(n.clone()).substitute_radicals_of(s, &RF::zero())?;
        let d = RF::from_poly(d.clone()).substitute_radicals_of(s, &RF::zero())?;
        Ok(Some(n.checked_div(&d)?))
    }

    /// Value at `s = value`, cancelling the common vanishing order first.
    pub fn value_at(&self, s: Symbol, value: &RF) -> Result<Option<RF>> {
        if value.is_zero() {
            return self.restrict_zero(s);
        }
        let shifted = self.substitute(&[(s, &RF::symbol(s) + value)])?;
        shifted.restrict_zero(s)
    }

    /// Radicals whose value involves `s` get `s` replaced; used after `s` has been
    /// eliminated from the ordinary monomials.
    fn substitute_radicals_of(&self, s: Symbol, value: &RF) -> Result<RF> {
        if self.symbols().iter().any(|r| r.is_radical() && radical_depends_on(*r, s)) {
            self.substitute(&[(s, value.clone())])
        } else {
            Ok(self.clone())
        }
    }

    /// Simultaneous substitution `s -> value` for each pair.
    pub fn substitute(&self, map: &[(Symbol, RF)]) -> Result<RF> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let table: HashMap<Symbol, RF> = map.iter().cloned().collect();
        let mut cache = HashMap::new();
        let n = subst_poly(&self.num, &table, &mut cache)?;
        let d = subst_poly(&self.den, &table, &mut cache)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        n.checked_div(&d)
    }

    /// Total partial derivative in `s`, differentiating radicals through their rules.
    pub fn derivative(&self, s: Symbol) -> RF {
        let dn = poly_derivative(&self.num, s);
        if self.den.is_constant_poly() {
            return dn.scale(&self.den.as_constant().unwrap().recip());
        }
        let dd = poly_derivative(&self.den, s);
        let n = &(&dn * &RF::from_poly(self.den.clone())) - &(&dd * &RF::from_poly(self.num.clone()));
        let d2 = RF::from_poly(&self.den * &self.den);
        n.checked_div(&d2).expect("nonzero denominator")
    }

    pub fn sqrt(&self) -> Result<RF> {
        radical::sqrt(self)
    }
}

impl Polynomial {
    fn is_constant_poly(&self) -> bool {
        self.as_constant().is_some()
    }
}

fn collect_free(s: Symbol, out: &mut BTreeSet<Symbol>) {
    if let Some(rule) = s.rule() {
        for r in rule.value.symbols() {
            collect_free(r, out);
        }
        if rule.value.symbols().is_empty() {
            out.insert(s);
        }
    } else {
        out.insert(s);
    }
}

pub(crate) fn radical_depends_on(r: Symbol, s: Symbol) -> bool {
    match r.rule() {
        Some(rule) => rule
            .value
            .symbols()
            .into_iter()
            .any(|x| x == s || (x.is_radical() && radical_depends_on(x, s))),
        None => false,
    }
}

fn poly_derivative(p: &Polynomial, s: Symbol) -> RF {
    let mut out = RF::from_poly(p.formal_derivative(s));
    for r in p.symbols() {
        if r.is_radical() && radical_depends_on(r, s) {
            let dp_dr = RF::from_poly(p.formal_derivative(r));
            out = &out + &(&dp_dr * &radical_derivative(r, s));
        }
    }
    out
}

/// `d r / d s` for a radical `r` with `r^k = V`: `V' / (k r^(k-1))`.
fn radical_derivative(r: Symbol, s: Symbol) -> RF {
    let rule = r.rule().expect("radical");
    let dv = poly_derivative(&rule.value, s);
    let den = Polynomial::term(rat(rule.degree as i64), Monomial::power(r, rule.degree - 1));
    dv.checked_div(&RF::from_poly(den)).expect("radical is nonzero")
}

fn subst_symbol(
    s: Symbol,
    table: &HashMap<Symbol, RF>,
    cache: &mut HashMap<Symbol, Option<RF>>,
) -> Result<Option<RF>> {
    if let Some(v) = table.get(&s) {
        return Ok(Some(v.clone()));
    }
    if let Some(v) = cache.get(&s) {
        return Ok(v.clone());
    }
    let mut out = None;
    if let Some(rule) = s.rule() {
        let touched = rule
            .value
            .symbols()
            .into_iter()
            .any(|x| table.contains_key(&x) || (x.is_radical() && touched_by(x, table)));
        if touched {
            if rule.degree != 2 {
                return Err(Error::Invalid(format!(
                    "cannot substitute inside the degree-{} root `{s}`",
                    rule.degree
                )));
            }
            let inner = subst_poly(&rule.value, table, cache)?;
            out = Some(inner.sqrt()?);
        }
    }
    cache.insert(s, out.clone());
    Ok(out)
}

fn touched_by(r: Symbol, table: &HashMap<Symbol, RF>) -> bool {
    match r.rule() {
        Some(rule) => rule
            .value
            .symbols()
            .into_iter()
            .any(|x| table.contains_key(&x) || (x.is_radical() && touched_by(x, table))),
        None => false,
    }
}

/// Substitutes into a polynomial over a common denominator.
fn subst_poly(
    p: &Polynomial,
    table: &HashMap<Symbol, RF>,
    cache: &mut HashMap<Symbol, Option<RF>>,
) -> Result<RF> {
    let mut values: HashMap<Symbol, RF> = HashMap::new();
    let mut max_exp: HashMap<Symbol, u32> = HashMap::new();
    for (m, _) in p.terms() {
        for &(s, e) in m.factors() {
            if let std::collections::hash_map::Entry::Vacant(slot) = values.entry(s) {
                if let Some(v) = subst_symbol(s, table, cache)? {
                    slot.insert(v);
                }
            }
            if values.contains_key(&s) {
                let k = max_exp.entry(s).or_insert(0);
                *k = (*k).max(e);
            }
        }
    }
    if values.is_empty() {
        return Ok(RF::from_poly(p.clone()));
    }
    let mut num_pows: HashMap<(Symbol, u32), Polynomial> = HashMap::new();
    let mut den_pows: HashMap<(Symbol, u32), Polynomial> = HashMap::new();
    let pow_of = |cache: &mut HashMap<(Symbol, u32), Polynomial>, s: Symbol, base: &Polynomial, e: u32| {
        cache
            .entry((s, e))
            .or_insert_with(|| base.pow(e))
            .clone()
    };
    let mut total = Polynomial::zero();
    for (m, c) in p.terms() {
        let mut term = Polynomial::constant(c.clone());
        let mut plain = Vec::new();
        for &(s, e) in m.factors() {
            match values.get(&s) {
                Some(v) => term = &term * &pow_of(&mut num_pows, s, &v.num, e),
                None => plain.push((s, e)),
            }
        }
        for (s, v) in &values {
            let e = m.exponent(*s);
            let top = max_exp[s];
            if top > e && !v.den.is_one() {
                term = &term * &pow_of(&mut den_pows, *s, &v.den, top - e);
            }
        }
        if !plain.is_empty() {
            term = term.mul_term(&Monomial::from_pairs(plain), &BigRational::one());
        }
        total = &total + &term;
    }
    let mut den = Polynomial::one();
    for (s, top) in &max_exp {
        let v = &values[s];
        if !v.den.is_one() {
            den = &den * &pow_of(&mut den_pows, *s, &v.den, *top);
        }
    }
    RF::new(total, den)
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        (&self.num * &other.den) == (&other.num * &self.den)
    }
}

impl Eq for RationalFunction {}

impl From<Polynomial> for RF {
    fn from(p: Polynomial) -> RF {
        RF::from_poly(p)
    }
}

impl From<i64> for RF {
    fn from(n: i64) -> RF {
        RF::from_i64(n)
    }
}

impl From<Symbol> for RF {
    fn from(s: Symbol) -> RF {
        RF::symbol(s)
    }
}

impl Add for &RF {
    type Output = RF;
    fn add(self, rhs: &RF) -> RF {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RF::reduced(&self.num + &rhs.num, self.den.clone());
        }
        let (c1, m1, p1) = split_den(&self.den);
        let (c2, m2, p2) = split_den(&rhs.den);
        if p1 == p2 {
            let l = m1.lcm(&m2);
            let f1 = l.div(&m1).unwrap();
            let f2 = l.div(&m2).unwrap();
            let n = &self.num.mul_term(&f1, &c1.recip()) + &rhs.num.mul_term(&f2, &c2.recip());
            let d = p1.mul_term(&l, &BigRational::one());
            return RF::reduced(n, d);
        }
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RF::reduced(n, &self.den * &rhs.den)
    }
}

impl Sub for &RF {
    type Output = RF;
    fn sub(self, rhs: &RF) -> RF {
        self + &(-rhs)
    }
}

impl Mul for &RF {
    type Output = RF;
    fn mul(self, rhs: &RF) -> RF {
        if self.is_zero() || rhs.is_zero() {
            return RF::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RF::from_poly(&self.num * &rhs.num);
        }
        RF::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by zero; use [`RationalFunction::checked_div`] for a `Result`.
impl Div for &RF {
    type Output = RF;
    fn div(self, rhs: &RF) -> RF {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

impl Neg for &RF {
    type Output = RF;
    fn neg(self) -> RF {
        RF {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<RF> for RF {
            type Output = RF;
            fn $f(self, rhs: RF) -> RF {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RF {
    type Output = RF;
    fn neg(self) -> RF {
        -&self
    }
}

fn is_atomic(p: &Polynomial) -> bool {
    match p.len() {
        0 => true,
        1 => {
            let (m, c) = p.leading_term().unwrap();
            if m.is_one() {
                c.is_integer() && !c.is_negative()
            } else {
                c.is_one() && m.factors().len() == 1 && m.factors()[0].1 == 1
            }
        }
        _ => false,
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_polynomial() {
            return write!(f, "{p}");
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if is_atomic(&self.den) {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
