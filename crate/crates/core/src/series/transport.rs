use std::collections::HashMap;

use super::laurent::LaurentSeries;
use crate::algebra::{Monomial, Polynomial, Symbol, SymbolKind, RF};
use crate::error::{Error, Result};
use crate::systems::BirationalMap;

/// Evaluates `f` with some symbols replaced by series.
///
/// Square-root symbols whose radicand mentions a replaced symbol become series
/// square roots; `signs` picks the branch per root symbol (default `+`).
pub fn eval_rf(
    f: &RF,
    subs: &[(Symbol, LaurentSeries)],
    signs: &[(Symbol, i32)],
) -> Result<LaurentSeries> {
    let var = subs
        .first()
        .map(|(_, s)| s.var())
        .ok_or_else(|| Error::Invalid("no series to substitute".into()))?;
    let mut ev = Evaluator {
        var,
        subs: subs.iter().cloned().collect(),
        signs: signs.iter().cloned().collect(),
        roots: HashMap::new(),
        powers: HashMap::new(),
    };
    let num = ev.poly(f.num())?;
    if let Some(c) = f.den().as_constant() {
        return Ok(num.scale(&RF::constant(c.recip())));
    }
    let den = ev.poly(f.den())?;
    num.div(&den)
}

struct Evaluator {
    var: Symbol,
    subs: HashMap<Symbol, LaurentSeries>,
    signs: HashMap<Symbol, i32>,
    roots: HashMap<Symbol, Option<LaurentSeries>>,
    powers: HashMap<(Symbol, u32), LaurentSeries>,
}

impl Evaluator {
    fn symbol(&mut self, s: Symbol) -> Result<Option<LaurentSeries>> {
        if let Some(v) = self.subs.get(&s) {
            return Ok(Some(v.clone()));
        }
        if let Some(v) = self.roots.get(&s) {
            return Ok(v.clone());
        }
        let mut out = None;
        if let Some(rule) = s.rule() {
            let touched = rule.value.symbols().into_iter().any(|x| {
                self.subs.contains_key(&x) || (x.is_radical() && self.touched(x))
            });
            if touched {
                if rule.degree != 2 {
                    return Err(Error::Invalid(format!(
                        "series of the degree-{} root `{s}`",
                        rule.degree
                    )));
                }
                let inner = self.poly(&rule.value)?;
                let sign = self.signs.get(&s).copied().unwrap_or(1);
                out = Some(inner.sqrt(sign)?);
            }
        }
        self.roots.insert(s, out.clone());
        Ok(out)
    }

    fn touched(&self, r: Symbol) -> bool {
        r.rule().is_some_and(|rule| {
            rule.value
                .symbols()
                .into_iter()
                .any(|x| self.subs.contains_key(&x) || (x.is_radical() && self.touched(x)))
        })
    }

    fn power(&mut self, s: Symbol, base: &LaurentSeries, e: u32) -> LaurentSeries {
        if e == 1 {
            return base.clone();
        }
        if let Some(p) = self.powers.get(&(s, e)) {
            return p.clone();
        }
        let p = self.power(s, base, e - 1).mul(base);
        self.powers.insert((s, e), p.clone());
        p
    }

    fn poly(&mut self, p: &Polynomial) -> Result<LaurentSeries> {
        let mut total = LaurentSeries::zero(self.var, None);
        for (m, c) in p.terms() {
            let mut plain = Vec::new();
            let mut term: Option<LaurentSeries> = None;
            for &(s, e) in m.factors() {
                match self.symbol(s)? {
                    Some(base) => {
                        let pw = self.power(s, &base, e);
                        term = Some(match term {
                            Some(t) => t.mul(&pw),
                            None => pw,
                        });
                    }
                    None => plain.push((s, e)),
                }
            }
            let coeff = RF::from_poly(Polynomial::term(c.clone(), Monomial::from_pairs(plain)));
            let term = match term {
                Some(t) => t.scale(&coeff),
                None => LaurentSeries::constant(self.var, coeff),
            };
            total = total.add(&term);
        }
        Ok(total)
    }
}

/// Sends a pair of series in the source variables of `m` through its forward components.
///
/// Time in the components is expanded as `t0 + tau` (after the map's time action, if any,
/// the caller is responsible for reinterpreting `tau`).
pub fn map_series(
    m: &BirationalMap,
    pair: &[LaurentSeries; 2],
    t0: &RF,
    signs: &[(Symbol, i32)],
) -> Result<[LaurentSeries; 2]> {
    let comps = m.forward_components()?;
    let var = pair[0].var();
    let subs = [
        (m.source[0], pair[0].clone()),
        (m.source[1], pair[1].clone()),
        (Symbol::time(), LaurentSeries::shifted_var(var, t0.clone())),
    ];
    Ok([eval_rf(&comps[0], &subs, signs)?, eval_rf(&comps[1], &subs, signs)?])
}

/// `f(s)` for a rational function `f` of the single symbol `x`.
pub fn change_of_unknown(s: &LaurentSeries, f: &RF, x: Symbol) -> Result<LaurentSeries> {
    let other = f
        .symbols()
        .into_iter()
        .find(|&y| y != x && y.kind() == SymbolKind::Coordinate);
    if let Some(other) = other {
        return Err(Error::Invalid(format!("`{f}` depends on `{other}` besides `{x}`")));
    }
    eval_rf(f, &[(x, s.clone())], &[]).map_err(|e| match e {
        Error::Pole(m) => Error::Pole(format!("`{f}` at the series: {m}")),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse, sym};

    fn tau() -> Symbol {
        sym("tau")
    }

    #[test]
    fn rational_function_of_series() {
        let s = LaurentSeries::new(tau(), 1, vec![RF::one(), RF::one()], Some(4));
        let r = change_of_unknown(&s, &parse("1/q^2").unwrap(), sym("q")).unwrap();
        // 1/(tau + tau^2)^2 = tau^-2 (1 - 2 tau + 3 tau^2 - ...)
        assert_eq!(r.valuation(), -2);
        assert_eq!(r.coeff(-2), RF::one());
        assert_eq!(r.coeff(-1), RF::from_i64(-2));
        assert_eq!(r.coeff(0), RF::from_i64(3));
        assert_eq!(r.precision(), Some(1));
    }

    #[test]
    fn identity_function() {
        let s = LaurentSeries::new(tau(), -1, vec![RF::one(), parse("t0").unwrap()], Some(3));
        let r = change_of_unknown(&s, &parse("q").unwrap(), sym("q")).unwrap();
        assert_eq!(r, s);
    }

    #[test]
    fn square_root_symbol_branch() {
        let x = LaurentSeries::new(tau(), -2, vec![RF::one()], Some(2));
        let f = parse("sqrt(x)").unwrap();
        let r = sym("x");
        let root = f.symbols().into_iter().find(|s| s.is_radical()).unwrap();
        let plus = eval_rf(&f, &[(r, x.clone())], &[]).unwrap();
        let minus = eval_rf(&f, &[(r, x)], &[(root, -1)]).unwrap();
        assert_eq!(plus.coeff(-1), RF::one());
        assert_eq!(minus.coeff(-1), RF::from_i64(-1));
    }
}
