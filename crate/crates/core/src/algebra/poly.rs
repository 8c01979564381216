//! Sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! Radical symbols are reduced on every multiplication (`r^d -> value`), so a
//! stored polynomial never carries a radical exponent at or above its degree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::symbol::Symbol;

/// Power product of symbols, sorted by symbol order, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Monomial {
        Monomial(vec![(s, 1)])
    }

    pub fn power(s: Symbol, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(s, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Symbol, u32)>) -> Monomial {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|a| a.0);
        let mut out: Vec<(Symbol, u32)> = Vec::with_capacity(pairs.len());
        for (s, e) in pairs {
            match out.last_mut() {
                Some((ls, le)) if *ls == s => *le += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.0
            .iter()
            .find(|&&(x, _)| x == s)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(s, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == s {
                let f = other.0[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((s, e - f));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < s {
                return None;
            } else {
                out.push((s, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for &(s, e) in &self.0 {
            let f = other.exponent(s);
            if f > 0 {
                out.push((s, e.min(f)));
            }
        }
        Monomial(out)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut pairs: Vec<(Symbol, u32)> = self.0.clone();
        for &(s, f) in &other.0 {
            match pairs.iter_mut().find(|(x, _)| *x == s) {
                Some((_, e)) => *e = (*e).max(f),
                None => pairs.push((s, f)),
            }
        }
        Monomial::from_pairs(pairs)
    }

    pub fn without(&self, s: Symbol) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(x, _)| x != s).collect())
    }

    fn needs_reduction(&self) -> bool {
        self.0
            .iter()
            .any(|&(s, e)| e >= 2 && s.rule().is_some_and(|r| e >= r.degree))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lexicographic; symbols earlier in name order are more significant.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (&self.0, &other.0);
            let (mut i, mut j) = (0, 0);
            loop {
                match (a.get(i), b.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(sa, ea)), Some(&(sb, eb))) => {
                        if sa == sb {
                            if ea != eb {
                                return ea.cmp(&eb);
                            }
                            i += 1;
                            j += 1;
                        } else if sa < sb {
                            return Ordering::Greater;
                        } else {
                            return Ordering::Less;
                        }
                    }
                }
            }
        })
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, &(s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Polynomial {
        Polynomial::term(c, Monomial::one())
    }

    pub fn from_i64(n: i64) -> Polynomial {
        Polynomial::constant(rat(n))
    }

    pub fn symbol(s: Symbol) -> Polynomial {
        Polynomial::term(BigRational::one(), Monomial::var(s))
    }

    /// A single term, reduced if the monomial carries radical powers.
    pub fn term(c: BigRational, m: Monomial) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_reduced_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Adds `c*m` assuming `m` is already reduced.
    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = e.get_mut();
                *v += c;
                if v.is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn add_reduced_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        if !m.needs_reduction() {
            self.add_term(m, c);
            return;
        }
        let mut rest = Vec::new();
        let mut extra = Polynomial::one();
        for &(s, e) in m.factors() {
            match s.rule() {
                Some(rule) if e >= rule.degree => {
                    let (q, r) = (e / rule.degree, e % rule.degree);
                    if r > 0 {
                        rest.push((s, r));
                    }
                    extra = &extra * &rule.value.pow(q);
                }
                _ => rest.push((s, e)),
            }
        }
        let base = Monomial::from_pairs(rest);
        for (m2, c2) in extra.terms {
            self.add_reduced_term(base.mul(&m2), &c * c2);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m2, c2) in &self.terms {
            out.add_reduced_term(m.mul(m2), c * c2);
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|&(s, _)| s))
            .collect()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(s) > 0)
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Smallest exponent of `s` over all terms (its valuation).
    pub fn valuation_in(&self, s: Symbol) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(s)).min()
    }

    /// Coefficients of `self` viewed as a polynomial in `s`; index = power.
    pub fn coefficients_in(&self, s: Symbol) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            out[e as usize].add_term(m.without(s), c.clone());
        }
        out
    }

    /// Formal partial derivative treating every symbol (radicals included) as independent.
    pub fn formal_derivative(&self, s: Symbol) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            if e == 0 {
                continue;
            }
            let reduced: Vec<(Symbol, u32)> = m
                .factors()
                .iter()
                .map(|&(x, k)| if x == s { (x, k - 1) } else { (x, k) })
                .collect();
            out.add_term(Monomial::from_pairs(reduced), c * rat(e as i64));
        }
        out
    }

    /// Greatest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    pub fn div_monomial(&self, d: &Monomial) -> Option<Polynomial> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.terms.insert(m.div(d)?, c.clone());
        }
        Some(out)
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn rational_content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return BigRational::one();
        }
        BigRational::new(num, den)
    }

    /// Exact quotient `self / d` if `d` divides `self` in the free polynomial ring.
    pub fn try_div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if d.is_monomial() {
            let (m, c) = d.leading_term().unwrap();
            return self.div_monomial(m).map(|p| p.scale(&c.recip()));
        }
        let (lm, lc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = Polynomial::zero();
        let cap = 64 + 8 * self.len() * d.len();
        for _ in 0..cap {
            let Some((rm, rc)) = r.leading_term() else {
                return Some(q);
            };
            let m = rm.div(&lm)?;
            let c = rc / &lc;
            r = &r - &d.mul_term(&m, &c);
            q.add_term(m, c);
        }
        None
    }

    /// Sign of the leading coefficient.
    pub fn leading_sign(&self) -> i32 {
        match self.leading_term() {
            Some((_, c)) if c.is_negative() => -1,
            Some(_) => 1,
            None => 0,
        }
    }

    /// Exact square root when `self` is the square of a polynomial over the rationals.
    ///
    /// The root returned has a positive leading coefficient.
    pub fn try_sqrt(&self) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        let (lm, lc) = self.leading_term()?;
        let root_m = sqrt_monomial(lm)?;
        let root_c = sqrt_rational(lc)?;
        let lead = Polynomial::term(root_c.clone(), root_m.clone());
        let two_lead_c = &root_c * rat(2);
        let mut s = lead;
        let mut prev = root_m.clone();
        for _ in 0..=self.len() + 1 {
            let r = self - &(&s * &s);
            let Some((rm, rc)) = r.leading_term() else {
                return Some(s);
            };
            let m = rm.div(&root_m)?;
            if m >= prev {
                return None;
            }
            let c = rc / &two_lead_c;
            s.add_term(m.clone(), c);
            prev = m;
        }
        None
    }
}

fn sqrt_monomial(m: &Monomial) -> Option<Monomial> {
    let mut out = Vec::new();
    for &(s, e) in m.factors() {
        if e % 2 != 0 {
            return None;
        }
        out.push((s, e / 2));
    }
    Some(Monomial::from_pairs(out))
}

pub(crate) fn sqrt_bigint(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub(crate) fn sqrt_rational(c: &BigRational) -> Option<BigRational> {
    Some(BigRational::new(
        sqrt_bigint(c.numer())?,
        sqrt_bigint(c.denom())?,
    ))
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_reduced_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident, $t:ty) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $f(self, rhs: $t) -> $t {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add, Polynomial);
forward_owned!(Sub, sub, Polynomial);
forward_owned!(Mul, mul, Polynomial);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                f.write_str(&fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Polynomial {
        Polynomial::symbol(Symbol::lookup(n).unwrap())
    }

    #[test]
    fn grlex_orders_by_degree_first() {
        let x = Symbol::lookup("x").unwrap();
        let y = Symbol::lookup("y").unwrap();
        let x2 = Monomial::power(x, 2);
        let xy = Monomial::from_pairs(vec![(x, 1), (y, 1)]);
        let y3 = Monomial::power(y, 3);
        assert!(y3 > x2);
        assert!(x2 > xy);
        assert!(Monomial::var(x) > Monomial::var(y));
    }

    #[test]
    fn exact_division() {
        let (x, y) = (s("x"), s("y"));
        let a = &x + &y;
        let b = &x - &(&y * &Polynomial::from_i64(3));
        let prod = &a * &b;
        assert_eq!(prod.try_div_exact(&a), Some(b.clone()));
        assert_eq!((&prod + &Polynomial::one()).try_div_exact(&a), None);
    }

    #[test]
    fn square_root_of_perfect_square() {
        let t = s("t");
        let p = &(&t - &Polynomial::one()) * &(&t - &Polynomial::one());
        assert_eq!(p.try_sqrt(), Some(&t - &Polynomial::one()));
        assert_eq!((&p + &t).try_sqrt(), None);
        let four = Polynomial::from_i64(4);
        assert_eq!(four.try_sqrt(), Some(Polynomial::from_i64(2)));
    }

    #[test]
    fn fifth_root_reduces() {
        let a = Polynomial::symbol(Symbol::fifth_root());
        assert_eq!(a.pow(5), Polynomial::from_i64(-1));
        assert_eq!(a.pow(7), -&a.pow(2));
    }

    #[test]
    fn prints_zero_and_signs() {
        assert_eq!(Polynomial::zero().to_string(), "0");
        let p = &s("x") - &Polynomial::from_i64(2);
        assert_eq!(p.to_string(), "x - 2");
    }
}
