use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::laurent::{LaurentSeries, SeriesJson};
use crate::algebra::{solve_coefficients, Monomial, Polynomial, Symbol, RF};
use crate::error::{Error, Result};

/// Default number of coefficients: the leading one plus twelve.
pub const DEFAULT_DEPTH: usize = 13;

/// Largest pole order tried when looking for dominant balances.
pub const MAX_POLE_ORDER: i64 = 6;

fn q(k: usize) -> Symbol {
    Symbol::coordinate(["q0", "q1", "q2"][k])
}

fn tau() -> Symbol {
    Symbol::parameter("tau")
}

fn t0() -> Symbol {
    Symbol::parameter("t0")
}

/// A second-order equation `F(t, q, q', q'') = 0` with `F` polynomial in `q0, q1, q2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarODE {
    pub name: String,
    pub poly: Polynomial,
    /// Names handed out, in branch order, to coefficients left free at resonances.
    pub free_names: Vec<String>,
}

impl ScalarODE {
    pub fn new(name: &str, poly: Polynomial) -> Result<ScalarODE> {
        if !poly.contains(q(2)) {
            return Err(Error::Invalid(format!("`{poly}` does not involve q2")));
        }
        Ok(ScalarODE {
            name: name.to_owned(),
            poly,
            free_names: Vec::new(),
        })
    }

    pub fn with_free_names(mut self, names: &[&str]) -> ScalarODE {
        self.free_names = names.iter().map(|s| s.to_string()).collect();
        self
    }

    /// `F(t0 + tau, s, s', s'')`.
    pub fn residual(&self, s: &LaurentSeries) -> Result<LaurentSeries> {
        let d1 = s.derivative();
        let d2 = d1.derivative();
        let t = LaurentSeries::shifted_var(s.var(), RF::symbol(t0()));
        super::transport::eval_rf(
            &RF::from_poly(self.poly.clone()),
            &[(q(0), s.clone()), (q(1), d1), (q(2), d2), (Symbol::time(), t)],
            &[],
        )
    }

    /// Leading balances `q ~ A tau^-n` for `n = 1..=MAX_POLE_ORDER`.
    pub fn dominant_balances(&self) -> Result<Vec<Balance>> {
        let mut out = Vec::new();
        for n in 1..=MAX_POLE_ORDER {
            if let Some(b) = self.balance(n)? {
                out.push(b);
            }
        }
        Ok(out)
    }

    fn weight(&self, m: &Monomial, n: i64) -> i64 {
        -n * m.exponent(q(0)) as i64
            - (n + 1) * m.exponent(q(1)) as i64
            - (n + 2) * m.exponent(q(2)) as i64
    }

    /// Dominant monomials grouped by their `(q0, q1, q2)` exponents, with `t -> t0`.
    fn dominant(&self, n: i64) -> (i64, BTreeMap<[u32; 3], RF>) {
        let v = self
            .poly
            .terms()
            .map(|(m, _)| self.weight(m, n))
            .min()
            .unwrap_or(0);
        let mut groups: BTreeMap<[u32; 3], RF> = BTreeMap::new();
        let at_t0 = [(Symbol::time(), RF::symbol(t0()))];
        for (m, c) in self.poly.terms() {
            if self.weight(m, n) != v {
                continue;
            }
            let key = [m.exponent(q(0)), m.exponent(q(1)), m.exponent(q(2))];
            let rest = m.without(q(0)).without(q(1)).without(q(2));
            let coeff = RF::from_poly(Polynomial::term(c.clone(), rest))
                .substitute(&at_t0)
                .expect("polynomial substitution");
            let e = groups.entry(key).or_insert_with(RF::zero);
            *e = &*e + &coeff;
        }
        groups.retain(|_, c| !c.is_zero());
        (v, groups)
    }

    fn balance(&self, n: i64) -> Result<Option<Balance>> {
        let (v, groups) = self.dominant(n);
        if groups.len() < 2 {
            return Ok(None);
        }
        // Leading equation as coefficients in A, ascending.
        let mut eq: BTreeMap<u32, RF> = BTreeMap::new();
        for (k, c) in &groups {
            let deg = k[0] + k[1] + k[2];
            let factor = leading_factor(n, k)?;
            let e = eq.entry(deg).or_insert_with(RF::zero);
            *e = &*e + &(c * &factor);
        }
        eq.retain(|_, c| !c.is_zero());
        let Some(&lo) = eq.keys().next() else {
            return Ok(None);
        };
        let hi = *eq.keys().last().unwrap();
        if hi == lo {
            return Ok(None);
        }
        let coeffs: Vec<RF> = (lo..=hi)
            .map(|d| eq.get(&d).cloned().unwrap_or_else(RF::zero))
            .collect();
        let a = Symbol::coordinate("A");
        let mut equation = Polynomial::zero();
        for (d, c) in &eq {
            equation = &equation
                + &c
                    .as_polynomial()
                    .unwrap_or_else(|| c.num().clone())
                    .mul_term(&Monomial::power(a, *d), &BigRational::one());
        }
        let mut solutions = leading_roots(&coeffs, n)?;
        solutions.sort_by_key(|s| s.to_string());
        Ok(Some(Balance {
            n,
            valuation: v,
            equation,
            solutions,
        }))
    }

    /// Linear coefficient of `c_j` at order `V + j` for the branch `q ~ A tau^-n`.
    pub fn indicial(&self, n: i64, a: &RF) -> Result<Vec<RF>> {
        let (_, groups) = self.dominant(n);
        // Coefficients in j, ascending, degree <= 2.
        let mut out = vec![RF::zero(), RF::zero(), RF::zero()];
        for (k, c) in &groups {
            let (b, cc, d) = (k[0] as i64, k[1] as i64, k[2] as i64);
            let base = &(c * &a.pow((b + cc + d - 1) as i32)?) * &leading_factor(n, k)?;
            // b + c (j - n)/(-n) + d (j - n)(j - n - 1)/(n (n + 1)), expanded in j.
            let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
            let c0 = r(b + cc + d, 1);
            let c1 = r(-cc, n) - r(d * (2 * n + 1), n * (n + 1));
            let c2 = r(d, n * (n + 1));
            out[0] = &out[0] + &base.scale(&c0);
            out[1] = &out[1] + &base.scale(&c1);
            out[2] = &out[2] + &base.scale(&c2);
        }
        while out.len() > 1 && out.last().unwrap().is_zero() {
            out.pop();
        }
        Ok(out)
    }

    /// Expands the branch `q = A tau^-n + ...` to `depth` coefficients.
    pub fn expand_branch(&self, n: i64, a: &RF, depth: usize, free: &mut FreeNames) -> Result<PainleveBranch> {
        let (v, _) = self.dominant(n);
        let ind = self.indicial(n, a)?;
        let roots = solve_coefficients(ind.clone())?;
        let mut resonances = Vec::new();
        let mut other_roots = Vec::new();
        for r in &roots.roots {
            match r.value.as_rational_constant() {
                Some(x) if x.is_integer() => {
                    for _ in 0..r.multiplicity {
                        resonances.push(x.to_integer().to_i64().unwrap());
                    }
                }
                _ => other_roots.push(r.value.to_string()),
            }
        }
        if let Some(u) = &roots.unresolved {
            other_roots.push(format!("unresolved factor of degree {}", u.len() - 1));
        }
        resonances.sort();
        let mut coeffs = vec![a.clone()];
        let mut free_symbols = Vec::new();
        let mut compatibility = Vec::new();
        for j in 1..depth as i64 {
            let mut trial = coeffs.clone();
            trial.push(RF::zero());
            let s = LaurentSeries::new(tau(), -n, trial, Some(-n + j + 1));
            let forcing = self.residual(&s)?.coeff(v + j);
            let pj = eval_poly_at(&ind, j);
            let c = if !pj.is_zero() {
                (-&forcing).checked_div(&pj)?
            } else if forcing.is_zero() {
                compatibility.push(Compatibility { resonance: j, satisfied: true });
                let sym = free.fresh();
                free_symbols.push((j - n, sym));
                RF::symbol(sym)
            } else {
                compatibility.push(Compatibility { resonance: j, satisfied: false });
                RF::zero()
            };
            coeffs.push(c);
        }
        let series = LaurentSeries::new(tau(), -n, coeffs, Some(-n + depth as i64));
        Ok(PainleveBranch {
            leading_exponent: -n,
            leading_coefficient: a.clone(),
            indicial: ind,
            resonances,
            other_roots,
            free_symbols,
            series,
            compatibility,
        })
    }

    /// Every branch of every balance, in the order of `dominant_balances`.
    pub fn painleve_test(&self, depth: usize) -> Result<Vec<PainleveBranch>> {
        let mut free = FreeNames::new(&self.free_names);
        let mut out = Vec::new();
        for b in self.dominant_balances()? {
            for a in &b.solutions {
                out.push(self.expand_branch(b.n, a, depth, &mut free)?);
            }
        }
        Ok(out)
    }
}

/// `(-n)^c (n (n + 1))^d`: derivatives of `tau^-n` relative to it, raised to their exponents.
fn leading_factor(n: i64, k: &[u32; 3]) -> Result<RF> {
    Ok(&RF::from_i64(-n).pow(k[1] as i32)? * &RF::from_i64(n * (n + 1)).pow(k[2] as i32)?)
}

fn eval_poly_at(coeffs: &[RF], j: i64) -> RF {
    crate::algebra::horner(coeffs, &RF::from_i64(j))
}

/// Nonzero roots of the leading equation (ascending coefficients, zero roots already removed).
fn leading_roots(coeffs: &[RF], n: i64) -> Result<Vec<RF>> {
    let deg = coeffs.len() - 1;
    let nonzero: Vec<usize> = (0..=deg).filter(|&k| !coeffs[k].is_zero()).collect();
    if deg <= 2 {
        let r = solve_coefficients(coeffs.to_vec())?;
        return Ok(r.roots.into_iter().map(|r| r.value).collect());
    }
    if nonzero == [0, deg] {
        // A^deg = c
        let c = (-&coeffs[0]).checked_div(&coeffs[deg])?;
        if deg == 5 {
            if c == RF::from_i64(-1) {
                return Ok(vec![RF::symbol(Symbol::fifth_root())]);
            }
            if c == RF::one() {
                return Ok(vec![-&RF::symbol(Symbol::fifth_root())]);
            }
        }
        if deg == 4 {
            let s = c.sqrt()?;
            let r = s.sqrt()?;
            return Ok(vec![r.clone(), -&r]);
        }
    }
    Err(Error::UnsupportedBalance(format!(
        "degree-{deg} leading equation for pole order {n}"
    )))
}

/// Supplies free-parameter symbols in order, falling back to `h`, `h2`, ...
#[derive(Clone, Debug)]
pub struct FreeNames {
    names: Vec<String>,
    used: usize,
}

impl FreeNames {
    pub fn new(names: &[String]) -> FreeNames {
        FreeNames {
            names: names.to_vec(),
            used: 0,
        }
    }

    pub fn fresh(&mut self) -> Symbol {
        let name = match self.names.get(self.used) {
            Some(n) => n.clone(),
            None if self.used == 0 => "h".to_owned(),
            None => format!("h{}", self.used + 1),
        };
        self.used += 1;
        Symbol::parameter(&name)
    }
}

/// Leading-order data for one pole order.
#[derive(Clone, Debug)]
pub struct Balance {
    pub n: i64,
    /// Lowest order of the residual, `F` evaluated on `A tau^-n`.
    pub valuation: i64,
    /// Leading equation in `A`.
    pub equation: Polynomial,
    pub solutions: Vec<RF>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Compatibility {
    pub resonance: i64,
    pub satisfied: bool,
}

#[derive(Clone, Debug)]
pub struct PainleveBranch {
    pub leading_exponent: i64,
    pub leading_coefficient: RF,
    /// Coefficients in `j` (ascending) of the indicial polynomial.
    pub indicial: Vec<RF>,
    /// Integer roots of the indicial polynomial; `-1` is always among them.
    pub resonances: Vec<i64>,
    pub other_roots: Vec<String>,
    /// `(exponent, symbol)` for each coefficient left free.
    pub free_symbols: Vec<(i64, Symbol)>,
    pub series: LaurentSeries,
    pub compatibility: Vec<Compatibility>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BranchJson {
    pub leading_exponent: i64,
    pub leading_coefficient: String,
    pub resonances: Vec<i64>,
    pub other_roots: Vec<String>,
    pub free_symbols: Vec<(i64, String)>,
    pub compatibility: Vec<Compatibility>,
    pub series: SeriesJson,
}

impl PainleveBranch {
    pub fn compatible(&self) -> bool {
        self.compatibility.iter().all(|c| c.satisfied)
    }

    /// Positive integer resonances: the orders where a coefficient may be free.
    pub fn positive_resonances(&self) -> Vec<i64> {
        self.resonances.iter().copied().filter(|&r| r > 0).collect()
    }

    pub fn to_json(&self) -> BranchJson {
        BranchJson {
            leading_exponent: self.leading_exponent,
            leading_coefficient: self.leading_coefficient.to_string(),
            resonances: self.resonances.clone(),
            other_roots: self.other_roots.clone(),
            free_symbols: self
                .free_symbols
                .iter()
                .map(|(k, s)| (*k, s.name().to_owned()))
                .collect(),
            compatibility: self.compatibility.clone(),
            series: self.series.to_json(),
        }
    }
}
