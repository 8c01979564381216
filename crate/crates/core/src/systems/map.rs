use crate::algebra::{radical_depends_on, Polynomial, Symbol, RF};
use crate::error::{Error, Result};

/// Affine time change `tau = scale * t + shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeAction {
    pub scale: RF,
    pub shift: RF,
}

impl TimeAction {
    /// Reads an affine expression in `t`; anything non-affine is rejected.
    pub fn from_expr(expr: &RF, t: Symbol) -> Result<TimeAction> {
        let scale = expr.derivative(t);
        if scale.contains(t) || scale.is_zero() {
            return Err(Error::Invalid(format!("time action `{expr}` is not affine and invertible")));
        }
        let shift = expr.substitute(&[(t, RF::zero())])?;
        Ok(TimeAction { scale, shift })
    }

    pub fn as_expr(&self, t: Symbol) -> RF {
        &(&self.scale * &RF::symbol(t)) + &self.shift
    }

    /// `t` in terms of `tau` (written with the same symbol).
    pub fn inverse_expr(&self, t: Symbol) -> Result<RF> {
        (&RF::symbol(t) - &self.shift).checked_div(&self.scale)
    }

    pub fn inverse(&self, t: Symbol) -> Result<TimeAction> {
        TimeAction::from_expr(&self.inverse_expr(t)?, t)
    }

    pub fn is_identity(&self) -> bool {
        self.scale.is_one() && self.shift.is_zero()
    }
}

/// A coordinate change between two plane charts.
///
/// `forward` gives the target variables in terms of the source variables and the
/// source time `t`; `backward` gives the source variables in terms of the target
/// variables and the source time. Either may be missing (R is 2-to-1, for example).
#[derive(Clone, Debug)]
pub struct BirationalMap {
    pub name: String,
    pub source: [Symbol; 2],
    pub target: [Symbol; 2],
    pub forward: Option<[RF; 2]>,
    pub backward: Option<[RF; 2]>,
    pub time: Option<TimeAction>,
    pub params: Vec<(Symbol, RF)>,
}

impl BirationalMap {
    pub fn new(
        name: &str,
        source: [Symbol; 2],
        target: [Symbol; 2],
        forward: Option<[RF; 2]>,
        backward: Option<[RF; 2]>,
    ) -> BirationalMap {
        BirationalMap {
            name: name.to_owned(),
            source,
            target,
            forward,
            backward,
            time: None,
            params: Vec::new(),
        }
    }

    pub fn identity(vars: [Symbol; 2]) -> BirationalMap {
        let comps = [RF::symbol(vars[0]), RF::symbol(vars[1])];
        BirationalMap::new("id", vars, vars, Some(comps.clone()), Some(comps))
    }

    pub fn with_time(mut self, action: TimeAction) -> BirationalMap {
        self.time = (!action.is_identity()).then_some(action);
        self
    }

    pub fn with_params(mut self, params: Vec<(Symbol, RF)>) -> BirationalMap {
        self.params = params;
        self
    }

    /// Source variables in terms of target variables, solving the forward components if needed.
    pub fn backward_components(&self) -> Result<[RF; 2]> {
        if let Some(b) = &self.backward {
            return Ok(b.clone());
        }
        let f = self.forward.as_ref().ok_or_else(|| {
            Error::InverseRequired(format!("map `{}` has no components", self.name))
        })?;
        solve_triangular(f, self.source, self.target).ok_or_else(|| {
            Error::InverseRequired(format!(
                "map `{}` has no inverse and its components are not triangular",
                self.name
            ))
        })
    }

    /// Target variables in terms of source variables, solving the backward components if needed.
    pub fn forward_components(&self) -> Result<[RF; 2]> {
        if let Some(f) = &self.forward {
            return Ok(f.clone());
        }
        let b = self.backward.as_ref().ok_or_else(|| {
            Error::InverseRequired(format!("map `{}` has no components", self.name))
        })?;
        solve_triangular(b, self.target, self.source).ok_or_else(|| {
            Error::InverseRequired(format!("map `{}` cannot be solved forward", self.name))
        })
    }

    /// Image of a point given in source coordinates.
    pub fn apply(&self, point: &[RF; 2]) -> Result<[RF; 2]> {
        let f = self.forward_components()?;
        let sub = [
            (self.source[0], point[0].clone()),
            (self.source[1], point[1].clone()),
        ];
        Ok([f[0].substitute(&sub)?, f[1].substitute(&sub)?])
    }

    /// The inverse map; requires both directions (derived when triangular).
    pub fn inverse(&self) -> Result<BirationalMap> {
        let t = Symbol::time();
        let mut fwd = self.backward_components()?;
        let mut bwd = self.forward_components()?;
        let mut time = None;
        if let Some(ta) = &self.time {
            let back = [(t, ta.inverse_expr(t)?)];
            for c in fwd.iter_mut().chain(bwd.iter_mut()) {
                *c = c.substitute(&back)?;
            }
            time = Some(ta.inverse(t)?);
        }
        Ok(BirationalMap {
            name: format!("{}^-1", self.name),
            source: self.target,
            target: self.source,
            forward: Some(fwd),
            backward: Some(bwd),
            time,
            params: Vec::new(),
        })
    }

    /// `next` after `self`.
    pub fn then(&self, next: &BirationalMap) -> Result<BirationalMap> {
        if self.target != next.source {
            return Err(Error::Invalid(format!(
                "cannot compose `{}` ({:?}) with `{}` ({:?})",
                self.name, self.target, next.name, next.source
            )));
        }
        let t = Symbol::time();
        let mid_time: Vec<(Symbol, RF)> = match &self.time {
            Some(ta) => vec![(t, ta.as_expr(t))],
            None => vec![],
        };
        let forward = match (self.forward_components(), next.forward_components()) {
            (Ok(f1), Ok(f2)) => {
                let mut sub = vec![(next.source[0], f1[0].clone()), (next.source[1], f1[1].clone())];
                sub.extend(mid_time.iter().cloned());
                Some([f2[0].substitute(&sub)?, f2[1].substitute(&sub)?])
            }
            _ => None,
        };
        let backward = match (self.backward_components(), next.backward_components()) {
            (Ok(b1), Ok(b2)) => {
                let b2: Vec<RF> = b2
                    .iter()
                    .map(|c| c.substitute(&mid_time))
                    .collect::<Result<_>>()?;
                let sub = [(self.target[0], b2[0].clone()), (self.target[1], b2[1].clone())];
                Some([b1[0].substitute(&sub)?, b1[1].substitute(&sub)?])
            }
            _ => None,
        };
        if forward.is_none() && backward.is_none() {
            return Err(Error::InverseRequired(format!(
                "composition of `{}` and `{}`",
                self.name, next.name
            )));
        }
        let time = match (&self.time, &next.time) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(TimeAction::from_expr(
                &b.as_expr(t).substitute(&[(t, a.as_expr(t))])?,
                t,
            )?),
        };
        Ok(BirationalMap {
            name: format!("{}.{}", next.name, self.name),
            source: self.source,
            target: next.target,
            forward,
            backward,
            time: time.filter(|ta| !ta.is_identity()),
            params: Vec::new(),
        })
    }

    /// `det d(target)/d(source)`, from the forward components when available.
    pub fn jacobian_determinant(&self) -> Result<RF> {
        if let Ok(f) = self.forward_components() {
            return Ok(det2(&f, self.source));
        }
        det2(&self.backward_components()?, self.target).recip()
    }

    /// Factor `c` with `d(source_1) ^ d(source_2) = c * d(target_1) ^ d(target_2)`.
    pub fn two_form_factor(&self) -> Result<RF> {
        self.jacobian_determinant()?.recip()
    }

    /// Forward components equal the identity on the source variables.
    pub fn is_identity(&self) -> Result<bool> {
        if self.source != self.target {
            return Ok(false);
        }
        let f = self.forward_components()?;
        Ok(f[0] == RF::symbol(self.source[0])
            && f[1] == RF::symbol(self.source[1])
            && self.time.as_ref().is_none_or(|t| t.is_identity()))
    }
}

pub(crate) fn det2(f: &[RF; 2], vars: [Symbol; 2]) -> RF {
    let a = f[0].derivative(vars[0]);
    let b = f[0].derivative(vars[1]);
    let c = f[1].derivative(vars[0]);
    let d = f[1].derivative(vars[1]);
    &(&a * &d) - &(&b * &c)
}

/// Solves `y = (A s + B) / (C s + D)` for `s`, when the right side has that shape in `s`.
fn solve_mobius(f: &RF, s: Symbol, y: &RF) -> Option<RF> {
    if f.symbols().iter().any(|r| r.is_radical() && f.contains(s) && radical_depends_on(*r, s)) {
        return None;
    }
    let nc = f.num().coefficients_in(s);
    let dc = f.den().coefficients_in(s);
    if nc.len() > 2 || dc.len() > 2 {
        return None;
    }
    let get = |v: &Vec<Polynomial>, k: usize| {
        v.get(k).cloned().map(RF::from_poly).unwrap_or_else(RF::zero)
    };
    let (a, b, c, d) = (get(&nc, 1), get(&nc, 0), get(&dc, 1), get(&dc, 0));
    let den = &a - &(&c * y);
    if den.is_zero() {
        return None;
    }
    (&(&d * y) - &b).checked_div(&den).ok()
}

/// Inverts `comps` (functions of `from`) when one component is Möbius in one variable
/// alone and the other is then Möbius in the remaining variable.
fn solve_triangular(comps: &[RF; 2], from: [Symbol; 2], to: [Symbol; 2]) -> Option<[RF; 2]> {
    let holes = [Symbol::coordinate("_hole1"), Symbol::coordinate("_hole2")];
    let hole = [RF::symbol(holes[0]), RF::symbol(holes[1])];
    for i in 0..2 {
        for k in 0..2 {
            let other = from[1 - k];
            if comps[i].contains(other) {
                continue;
            }
            let Some(sk) = solve_mobius(&comps[i], from[k], &hole[i]) else {
                continue;
            };
            let Ok(rest) = comps[1 - i].substitute(&[(from[k], sk.clone())]) else {
                continue;
            };
            let Some(so) = solve_mobius(&rest, other, &hole[1 - i]) else {
                continue;
            };
            let mut out = [RF::zero(), RF::zero()];
            out[k] = sk;
            out[1 - k] = so;
            let back = [(holes[0], RF::symbol(to[0])), (holes[1], RF::symbol(to[1]))];
            let a = out[0].substitute(&back).ok()?;
            let b = out[1].substitute(&back).ok()?;
            return Some([a, b]);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse, sym};

    #[test]
    fn triangular_inverse_is_derived() {
        let m = BirationalMap::new(
            "r3",
            [sym("v"), sym("u")],
            [sym("x3"), sym("y3")],
            Some([parse("v").unwrap(), parse("u - t/v^2 - 4/v^6").unwrap()]),
            None,
        );
        let b = m.backward_components().unwrap();
        assert_eq!(b[0], parse("x3").unwrap());
        assert_eq!(b[1], parse("y3 + t/x3^2 + 4/x3^6").unwrap());
        assert_eq!(m.jacobian_determinant().unwrap(), RF::one());
    }

    #[test]
    fn non_triangular_needs_inverse() {
        let m = BirationalMap::new(
            "sq",
            [sym("x"), sym("y")],
            [sym("X"), sym("Y")],
            Some([parse("x^2 + y").unwrap(), parse("y^2 + x").unwrap()]),
            None,
        );
        assert!(matches!(m.backward_components(), Err(Error::InverseRequired(_))));
    }

    #[test]
    fn affine_time_action() {
        let t = Symbol::time();
        let ta = TimeAction::from_expr(&parse("-a*t").unwrap(), t).unwrap();
        assert_eq!(ta.scale, parse("-a").unwrap());
        assert!(TimeAction::from_expr(&parse("t^2").unwrap(), t).is_err());
    }
}
