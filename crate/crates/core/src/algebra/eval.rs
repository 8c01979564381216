//! Double-precision complex evaluation of exact expressions.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::poly::Polynomial;
use super::ratfun::RF;
use super::symbol::Symbol;
use crate::error::{Error, Result};

pub type Assignment = HashMap<Symbol, Complex64>;

/// Relative size below which a denominator is treated as zero.
pub const DENOMINATOR_EPS: f64 = 1e-15;

fn to_f64(c: &num_rational::BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

/// Value of a symbol: the assignment wins, radicals fall back to their principal root.
fn symbol_value(s: Symbol, asg: &Assignment, memo: &mut HashMap<Symbol, Complex64>) -> Result<Complex64> {
    if let Some(v) = asg.get(&s) {
        return Ok(*v);
    }
    if let Some(v) = memo.get(&s) {
        return Ok(*v);
    }
    let rule = s
        .rule()
        .ok_or_else(|| Error::Unassigned(s.name().to_owned()))?;
    let inner = poly_value(&rule.value, asg, memo)?.0;
    let v = principal_root(inner, rule.degree);
    memo.insert(s, v);
    Ok(v)
}

pub(crate) fn principal_root(z: Complex64, k: u32) -> Complex64 {
    if k == 2 {
        z.sqrt()
    } else if z.is_zero() {
        z
    } else {
        z.powf(1.0 / k as f64)
    }
}

/// Returns the value and the sum of absolute term values (the scale).
fn poly_value(
    p: &Polynomial,
    asg: &Assignment,
    memo: &mut HashMap<Symbol, Complex64>,
) -> Result<(Complex64, f64)> {
    let mut total = Complex64::zero();
    let mut scale = 0.0;
    for (m, c) in p.terms() {
        let mut term = Complex64::new(to_f64(c), 0.0);
        for &(s, e) in m.factors() {
            term *= symbol_value(s, asg, memo)?.powu(e);
        }
        scale += term.norm();
        total += term;
    }
    Ok((total, scale))
}

/// Evaluates `f` under `asg`; radicals not in `asg` take their principal value.
pub fn eval_numeric(f: &RF, asg: &Assignment) -> Result<Complex64> {
    let mut memo = HashMap::new();
    let (n, n_scale) = poly_value(f.num(), asg, &mut memo)?;
    let (d, d_scale) = poly_value(f.den(), asg, &mut memo)?;
    let scale = n_scale.max(d_scale).max(f64::MIN_POSITIVE);
    if d.norm() <= DENOMINATOR_EPS * scale {
        return Err(Error::NearZeroDenominator(d.norm()));
    }
    Ok(n / d)
}

/// Polynomial compiled against a fixed slot layout.
#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(Complex64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    fn eval(&self, slots: &[Complex64]) -> (Complex64, f64) {
        let mut total = Complex64::zero();
        let mut scale = 0.0;
        for (c, fs) in &self.terms {
            let mut term = *c;
            for &(i, e) in fs {
                term *= slots[i].powu(e);
            }
            scale += term.norm();
            total += term;
        }
        (total, scale)
    }
}

/// Fast evaluator for rational functions whose variable inputs change per call.
///
/// Slots are laid out as: the variable symbols, then the radicals that depend on
/// them (recomputed per call, in dependency order). Everything else is frozen
/// from the assignment given at construction.
#[derive(Clone, Debug)]
pub struct Compiled {
    nvars: usize,
    radicals: Vec<(usize, u32, CompiledPoly)>,
    fixed: Vec<(usize, Complex64)>,
    nslots: usize,
    parts: Vec<(CompiledPoly, CompiledPoly)>,
}

impl Compiled {
    pub fn new(fs: &[&RF], vars: &[Symbol], asg: &Assignment) -> Result<Compiled> {
        let mut index: HashMap<Symbol, usize> = HashMap::new();
        for (i, &v) in vars.iter().enumerate() {
            index.insert(v, i);
        }
        let mut radicals = Vec::new();
        let mut fixed = Vec::new();
        let mut memo = HashMap::new();
        let mut next = vars.len();
        let mut parts = Vec::new();
        let mut builder = Builder {
            index: &mut index,
            radicals: &mut radicals,
            fixed: &mut fixed,
            next: &mut next,
            asg,
            memo: &mut memo,
            vars,
        };
        for f in fs {
            let n = builder.poly(f.num())?;
            let d = builder.poly(f.den())?;
            parts.push((n, d));
        }
        Ok(Compiled {
            nvars: vars.len(),
            radicals,
            fixed,
            nslots: next,
            parts,
        })
    }

    /// Evaluates every compiled function at the variable values `x`.
    pub fn eval(&self, x: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let mut slots = vec![Complex64::zero(); self.nslots];
        slots[..self.nvars].copy_from_slice(&x[..self.nvars]);
        for &(i, v) in &self.fixed {
            slots[i] = v;
        }
        for (i, k, p) in &self.radicals {
            slots[*i] = principal_root(p.eval(&slots).0, *k);
        }
        for (o, (n, d)) in out.iter_mut().zip(&self.parts) {
            let (nv, ns) = n.eval(&slots);
            let (dv, ds) = d.eval(&slots);
            let scale = ns.max(ds).max(f64::MIN_POSITIVE);
            if dv.norm() <= DENOMINATOR_EPS * scale {
                return Err(Error::NearZeroDenominator(dv.norm()));
            }
            *o = nv / dv;
        }
        Ok(())
    }
}

struct Builder<'a> {
    index: &'a mut HashMap<Symbol, usize>,
    radicals: &'a mut Vec<(usize, u32, CompiledPoly)>,
    fixed: &'a mut Vec<(usize, Complex64)>,
    next: &'a mut usize,
    asg: &'a Assignment,
    memo: &'a mut HashMap<Symbol, Complex64>,
    vars: &'a [Symbol],
}

impl Builder<'_> {
    fn depends_on_vars(&self, s: Symbol) -> bool {
        if self.vars.contains(&s) {
            return true;
        }
        if self.asg.contains_key(&s) {
            return false;
        }
        match s.rule() {
            Some(rule) => rule.value.symbols().into_iter().any(|x| self.depends_on_vars(x)),
            None => false,
        }
    }

    fn slot(&mut self, s: Symbol) -> Result<usize> {
        if let Some(&i) = self.index.get(&s) {
            return Ok(i);
        }
        let i = if self.depends_on_vars(s) {
            let rule = s.rule().expect("only radicals depend on variables indirectly");
            let inner = self.poly(&rule.value)?;
            let i = *self.next;
            self.radicals.push((i, rule.degree, inner));
            i
        } else {
            let v = symbol_value(s, self.asg, self.memo)?;
            let i = *self.next;
            self.fixed.push((i, v));
            i
        };
        *self.next += 1;
        self.index.insert(s, i);
        Ok(i)
    }

    fn poly(&mut self, p: &Polynomial) -> Result<CompiledPoly> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let mut fs = Vec::new();
            for &(s, e) in m.factors() {
                fs.push((self.slot(s)?, e));
            }
            terms.push((Complex64::new(to_f64(c), 0.0), fs));
        }
        Ok(CompiledPoly { terms })
    }
}
