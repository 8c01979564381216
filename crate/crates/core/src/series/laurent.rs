use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::{Symbol, RF};
use crate::error::{Error, Result};

/// Terms kept when an exact series with infinitely many terms (a reciprocal) is expanded.
pub const EXACT_TERMS: i64 = 16;

/// Truncated Laurent series `sum c_k var^k` for `val <= k < prec`.
///
/// `prec == None` marks an exact (finite) series. Coefficients are exact rational
/// functions of the remaining symbols.
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    var: Symbol,
    val: i64,
    coeffs: Vec<RF>,
    prec: Option<i64>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SeriesJson {
    pub var: String,
    pub lowest_exponent: i64,
    pub order: Option<i64>,
    pub terms: Vec<(i64, String)>,
}

impl LaurentSeries {
    /// Builds a series from coefficients starting at `val`; leading zeros are stripped.
    pub fn new(var: Symbol, val: i64, coeffs: Vec<RF>, prec: Option<i64>) -> LaurentSeries {
        let mut s = LaurentSeries {
            var,
            val,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    pub fn zero(var: Symbol, prec: Option<i64>) -> LaurentSeries {
        LaurentSeries::new(var, prec.unwrap_or(0), Vec::new(), prec)
    }

    pub fn constant(var: Symbol, c: RF) -> LaurentSeries {
        LaurentSeries::new(var, 0, vec![c], None)
    }

    pub fn monomial(var: Symbol, c: RF, k: i64) -> LaurentSeries {
        LaurentSeries::new(var, k, vec![c], None)
    }

    /// `c0 + var`, the exact series of `t` around `t = c0`.
    pub fn shifted_var(var: Symbol, c0: RF) -> LaurentSeries {
        LaurentSeries::new(var, 0, vec![c0, RF::one()], None)
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.val).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
        while self.coeffs.last().is_some_and(RF::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = self.prec.unwrap_or(0);
        } else if let Some(p) = self.prec {
            let len = (p - self.val) as usize;
            self.coeffs.resize(len, RF::zero());
        }
    }

    pub fn var(&self) -> Symbol {
        self.var
    }

    /// Lowest exponent with a nonzero coefficient (the order for a zero series).
    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// First exponent whose coefficient is unknown; `None` for exact series.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RF::is_zero)
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Coefficient of `var^k`; only meaningful below the precision.
    pub fn coeff(&self, k: i64) -> RF {
        if k < self.val {
            return RF::zero();
        }
        self.coeffs
            .get((k - self.val) as usize)
            .cloned()
            .unwrap_or_else(RF::zero)
    }

    pub fn leading_coefficient(&self) -> Option<&RF> {
        self.coeffs.first().filter(|c| !c.is_zero())
    }

    /// `(exponent, coefficient)` pairs of the nonzero known terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &RF)> {
        let v = self.val;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (v + i as i64, c))
    }

    /// Highest exponent worth computing for a result with precision `prec`.
    fn end(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn truncate(&self, prec: i64) -> LaurentSeries {
        let p = self.prec.map_or(prec, |q| q.min(prec));
        LaurentSeries::new(self.var, self.val, self.coeffs.clone(), Some(p))
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let prec = min_prec(self.prec, other.prec);
        let lo = self.val.min(other.val);
        let hi = self.end().max(other.end());
        let hi = prec.map_or(hi, |p| p.min(hi));
        let coeffs = (lo..hi.max(lo))
            .map(|k| &self.coeff(k) + &other.coeff(k))
            .collect();
        LaurentSeries::new(self.var, lo, coeffs, prec)
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries::new(self.var, self.val, self.coeffs.iter().map(|c| -c).collect(), self.prec)
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &RF) -> LaurentSeries {
        LaurentSeries::new(
            self.var,
            self.val,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.prec,
        )
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let val = self.val + other.val;
        let prec = min_prec(
            self.prec.map(|p| p + other.val),
            other.prec.map(|p| p + self.val),
        );
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return LaurentSeries::zero(self.var, prec);
        }
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let n = match prec {
            Some(p) => ((p - val).max(0) as usize).min(full),
            None => full,
        };
        let mut coeffs = vec![RF::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= n {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        LaurentSeries::new(self.var, val, coeffs, prec)
    }

    /// Multiplicative inverse. Exact multi-term inputs are expanded to `EXACT_TERMS` terms.
    pub fn recip(&self) -> Result<LaurentSeries> {
        self.recip_terms(EXACT_TERMS)
    }

    pub fn recip_terms(&self, exact_terms: i64) -> Result<LaurentSeries> {
        let lead = self
            .leading_coefficient()
            .ok_or_else(|| Error::Pole(format!("reciprocal of a zero series in {}", self.var)))?
            .clone();
        let v = self.val;
        if self.prec.is_none() && self.coeffs.len() == 1 {
            return Ok(LaurentSeries::monomial(self.var, lead.recip()?, -v));
        }
        let prec = match self.prec {
            Some(p) => p - 2 * v,
            None => -v + exact_terms,
        };
        let n = (prec + v).max(0) as usize;
        let inv0 = lead.recip()?;
        let mut b: Vec<RF> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(inv0.clone());
                continue;
            }
            let mut acc = RF::zero();
            for i in 1..=k.min(self.coeffs.len() - 1) {
                let a = &self.coeffs[i];
                if !a.is_zero() {
                    acc = &acc + &(a * &b[k - i]);
                }
            }
            b.push(-&(&acc * &inv0));
        }
        Ok(LaurentSeries::new(self.var, -v, b, Some(prec)))
    }

    pub fn div(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        let terms = self.relative_terms().max(other.relative_terms());
        Ok(self.mul(&other.recip_terms(terms)?))
    }

    /// Known terms past the leading one (or `EXACT_TERMS` for exact series).
    pub fn relative_terms(&self) -> i64 {
        self.prec.map_or(EXACT_TERMS, |p| p - self.val)
    }

    pub fn pow(&self, e: i32) -> Result<LaurentSeries> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut out = LaurentSeries::constant(self.var, RF::one());
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Square root whose leading coefficient is `sign * sqrt(leading coefficient)`.
    pub fn sqrt(&self, sign: i32) -> Result<LaurentSeries> {
        let lead = self.leading_coefficient().ok_or_else(|| {
            Error::NoLaurentSqrt(format!("zero series in {}", self.var))
        })?;
        if self.val % 2 != 0 {
            return Err(Error::NoLaurentSqrt(format!(
                "leading exponent {} is odd",
                self.val
            )));
        }
        let mut b0 = lead.sqrt()?;
        if sign < 0 {
            b0 = -&b0;
        }
        let rel = self.relative_terms();
        let val = self.val / 2;
        let prec = val + rel;
        let inv2b0 = b0.scale(&BigRational::from_integer(2.into())).recip()?;
        let mut b: Vec<RF> = vec![b0];
        for k in 1..rel as usize {
            let mut acc = self.coeff(self.val + k as i64);
            for i in 1..k {
                acc = &acc - &(&b[i] * &b[k - i]);
            }
            b.push(&acc * &inv2b0);
        }
        Ok(LaurentSeries::new(self.var, val, b, Some(prec)))
    }

    pub fn derivative(&self) -> LaurentSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.val + i as i64;
                c.scale(&BigRational::from_integer(k.into()))
            })
            .collect();
        LaurentSeries::new(self.var, self.val - 1, coeffs, self.prec.map(|p| p - 1))
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, mut f: impl FnMut(&RF) -> Result<RF>) -> Result<LaurentSeries> {
        let coeffs = self.coeffs.iter().map(&mut f).collect::<Result<_>>()?;
        Ok(LaurentSeries::new(self.var, self.val, coeffs, self.prec))
    }

    /// Zero through its precision (every known coefficient vanishes).
    pub fn vanishes(&self) -> bool {
        self.is_zero()
    }

    /// Exponents with nonzero coefficients below the precision.
    pub fn nonzero_orders(&self) -> Vec<i64> {
        self.terms().map(|(k, _)| k).collect()
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            var: self.var.name().to_owned(),
            lowest_exponent: self.val,
            order: self.prec,
            terms: self.terms().map(|(k, c)| (k, c.to_string())).collect(),
        }
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Equal coefficients below the common precision.
impl PartialEq for LaurentSeries {
    fn eq(&self, other: &Self) -> bool {
        let lo = self.val.min(other.val);
        let hi = match min_prec(self.prec, other.prec) {
            Some(p) => p,
            None => self.end().max(other.end()),
        };
        (lo..hi).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{}^{k}", self.var)?;
        }
        match self.prec {
            Some(p) if first => write!(f, "O({}^{p})", self.var),
            Some(p) => write!(f, " + O({}^{p})", self.var),
            None if first => write!(f, "0"),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;

    fn tau() -> Symbol {
        Symbol::lookup("tau").unwrap()
    }

    fn s(val: i64, cs: &[&str], prec: Option<i64>) -> LaurentSeries {
        LaurentSeries::new(tau(), val, cs.iter().map(|c| parse(c).unwrap()).collect(), prec)
    }

    #[test]
    fn geometric_reciprocal() {
        let one_minus = s(0, &["1", "-1"], None);
        let r = one_minus.recip_terms(6).unwrap();
        assert_eq!(r, s(0, &["1", "1", "1", "1", "1", "1"], Some(6)));
    }

    #[test]
    fn precision_of_products() {
        let a = s(-2, &["1", "0", "3"], Some(1));
        let b = s(1, &["2", "5"], Some(3));
        let c = a.mul(&b);
        assert_eq!(c.valuation(), -1);
        assert_eq!(c.precision(), Some(1));
        assert_eq!(c, s(-1, &["2", "5"], Some(1)));
    }

    #[test]
    fn square_root_of_square() {
        let a = s(-1, &["1", "x", "t0"], Some(2));
        let sq = a.mul(&a);
        assert_eq!(sq.sqrt(1).unwrap(), a);
        assert_eq!(sq.sqrt(-1).unwrap(), a.neg());
        assert!(matches!(s(-1, &["1"], Some(2)).sqrt(1), Err(Error::NoLaurentSqrt(_))));
    }

    #[test]
    fn derivative_shifts_orders() {
        let a = s(-2, &["1", "0", "0", "0", "t0"], Some(3));
        let d = a.derivative();
        assert_eq!(d, s(-3, &["-2", "0", "0", "0", "2*t0"], Some(2)));
    }

    #[test]
    fn printing() {
        let a = s(-1, &["2", "0", "-1/3"], Some(2));
        assert_eq!(a.to_string(), "(2)*tau^-1 + (-1/3)*tau^1 + O(tau^2)");
    }
}
