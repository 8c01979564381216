//! Numerical cross-checks of formal series and coordinate changes.

use num_complex::Complex64;

use super::integrate::{integrate_field, IntegratorConfig, NumericField, PathSegment, Trajectory};
use crate::algebra::{eval_numeric, sym, Assignment, Compiled, Symbol, RF};
use crate::error::{Error, Result};
use crate::series::{LaurentSeries, PainleveBranch, ScalarODE};
use crate::systems::{BirationalMap, PlaneSystem};

/// `|a - b| / (1 + |b|)`: relative away from zero, absolute near it.
pub fn deviation(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// Sum of the truncated series at `tau` together with the size of its last retained term.
pub fn eval_series_with_tail(s: &LaurentSeries, tau: Complex64, asg: &Assignment) -> Result<(Complex64, f64)> {
    let terms: Vec<(i64, &RF)> = s.terms().collect();
    if terms.is_empty() {
        return Ok((Complex64::default(), 0.0));
    }
    if tau.norm() == 0.0 {
        if s.valuation() < 0 {
            return Err(Error::Pole(format!("series has a pole of order {} at tau = 0", -s.valuation())));
        }
        return Ok((eval_numeric(&s.coeff(0), asg)?, 0.0));
    }
    // Horner in tau over the dense coefficient range, then the valuation shift.
    let lo = s.valuation();
    let hi = terms.last().map(|(k, _)| *k).unwrap_or(lo);
    let mut acc = Complex64::default();
    let mut last = 0.0;
    for k in (lo..=hi).rev() {
        let c = s.coeff(k);
        let v = if c.is_zero() { Complex64::default() } else { eval_numeric(&c, asg)? };
        if k == hi {
            last = (v * tau.powi((k) as i32)).norm();
        }
        acc = acc * tau + v;
    }
    Ok((acc * tau.powi(lo as i32), last))
}

pub fn eval_series_numeric(s: &LaurentSeries, tau: Complex64, asg: &Assignment) -> Result<Complex64> {
    eval_series_with_tail(s, tau, asg).map(|(v, _)| v)
}

/// The equation solved for `q2`, as the system `q0' = q1, q1' = q2`.
pub fn first_order_system(ode: &ScalarODE) -> Result<PlaneSystem> {
    let (q0, q1, q2) = (sym("q0"), sym("q1"), sym("q2"));
    let parts = ode.poly.coefficients_in(q2);
    if parts.len() != 2 {
        return Err(Error::Invalid(format!("`{}` is not linear in q2", ode.name)));
    }
    let b = RF::from_poly(parts[0].clone());
    let a = RF::from_poly(parts[1].clone());
    let rhs = (-&b).checked_div(&a)?;
    Ok(PlaneSystem::new(&ode.name, [q0, q1], Symbol::time(), [RF::symbol(q1), rhs]))
}

/// Result of integrating from near a movable singularity and comparing with the series.
#[derive(Clone, Debug)]
pub struct BranchCheck {
    pub max_deviation: f64,
    pub trajectory: Trajectory,
}

/// Seeds `(q, q')` from the branch at `tau = r_near`, integrates along the real ray to
/// `tau = r_far`, and compares with the series at every checkpoint.
#[allow(clippy::too_many_arguments)]
pub fn verify_branch_numeric(
    ode: &ScalarODE,
    branch: &PainleveBranch,
    t0: Complex64,
    asg: &Assignment,
    r_near: f64,
    r_far: f64,
    checkpoints: usize,
    cfg: &IntegratorConfig,
) -> Result<BranchCheck> {
    let mut asg = asg.clone();
    asg.insert(sym("t0"), t0);
    let series = &branch.series;
    let deriv = series.derivative();
    let at = |r: f64| -> Result<[Complex64; 2]> {
        let tau = Complex64::new(r, 0.0);
        Ok([eval_series_numeric(series, tau, &asg)?, eval_series_numeric(&deriv, tau, &asg)?])
    };
    let seed = at(r_near)?;
    if r_near == r_far {
        return Ok(BranchCheck {
            max_deviation: 0.0,
            trajectory: Trajectory::default(),
        });
    }
    let sys = first_order_system(ode)?;
    let field = NumericField::new(&sys, &asg)?;
    let whole = PathSegment::new(t0 + r_near, t0 + r_far);
    let traj = integrate_field(&field, seed, &whole.split(checkpoints), cfg)?;
    if let Some(d) = &traj.diagnostic {
        return Err(Error::Pole(d.clone()));
    }
    let mut worst = 0.0f64;
    for &i in &traj.checkpoints {
        let s = &traj.samples[i];
        let want = at((s.t - t0).re)?;
        for (got, want) in s.state.iter().zip(want) {
            worst = worst.max(deviation(*got, want));
        }
    }
    Ok(BranchCheck {
        max_deviation: worst,
        trajectory: traj,
    })
}

/// Compiled forward components and time action of a map, in `(x1, x2, t)`.
pub struct NumericMap {
    compiled: Compiled,
    name: String,
}

impl NumericMap {
    pub fn new(m: &BirationalMap, asg: &Assignment) -> Result<NumericMap> {
        let t = Symbol::time();
        let f = m.forward_components()?;
        let time = m.time.as_ref().map(|a| a.as_expr(t)).unwrap_or_else(|| RF::symbol(t));
        let vars = [m.source[0], m.source[1], t];
        let compiled = Compiled::new(&[&f[0], &f[1], &time], &vars, asg)?;
        Ok(NumericMap {
            compiled,
            name: m.name.clone(),
        })
    }

    /// `(image state, image time)`.
    pub fn apply(&self, t: Complex64, y: &[Complex64; 2]) -> Result<([Complex64; 2], Complex64)> {
        let mut out = [Complex64::default(); 3];
        self.compiled.eval(&[y[0], y[1], t], &mut out).map_err(|e| {
            Error::Pole(format!("map `{}` is singular at t = {t}, state ({}, {}): {e}", self.name, y[0], y[1]))
        })?;
        Ok(([out[0], out[1]], out[2]))
    }
}

/// Integrates `a` and `b` separately and compares `m(a(t))` with `b(m(t))` at the
/// checkpoints of the split path.
#[allow(clippy::too_many_arguments)]
pub fn verify_map_numeric(
    a: &PlaneSystem,
    b: &PlaneSystem,
    m: &BirationalMap,
    init: [Complex64; 2],
    path: &[PathSegment],
    pieces: usize,
    asg: &Assignment,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let fa = NumericField::new(a, asg)?;
    let fb = NumericField::new(b, asg)?;
    let nm = NumericMap::new(m, asg)?;
    let split: Vec<PathSegment> = path.iter().flat_map(|s| s.split(pieces)).collect();
    let ta = integrate_field(&fa, init, &split, cfg)?;
    if let Some(d) = &ta.diagnostic {
        return Err(Error::Pole(d.clone()));
    }
    let t_start = split.first().map(|s| s.start).unwrap_or_default();
    let (init_b, tb0) = nm.apply(t_start, &init)?;
    let mut images = Vec::with_capacity(ta.checkpoints.len());
    for &i in &ta.checkpoints {
        let s = &ta.samples[i];
        images.push(nm.apply(s.t, &s.state)?);
    }
    let mut path_b = Vec::with_capacity(images.len());
    let mut prev = tb0;
    for (_, tb) in &images {
        path_b.push(PathSegment::new(prev, *tb));
        prev = *tb;
    }
    let tb = integrate_field(&fb, init_b, &path_b, cfg)?;
    if let Some(d) = &tb.diagnostic {
        return Err(Error::Pole(d.clone()));
    }
    let mut worst = 0.0f64;
    for ((img, _), &j) in images.iter().zip(&tb.checkpoints) {
        let got = tb.samples[j].state;
        for k in 0..2 {
            worst = worst.max(deviation(got[k], img[k]));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;

    #[test]
    fn zero_series_is_zero() {
        let s = LaurentSeries::zero(sym("tau"), Some(5));
        assert_eq!(eval_series_numeric(&s, Complex64::new(0.3, 0.0), &Assignment::new()).unwrap(), Complex64::default());
    }

    #[test]
    fn pole_at_center() {
        let s = LaurentSeries::monomial(sym("tau"), RF::one(), -2);
        assert!(matches!(
            eval_series_numeric(&s, Complex64::default(), &Assignment::new()),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn linear_in_second_derivative() {
        let ode = ScalarODE::new("sq", parse("q2^2 - q0").unwrap().as_polynomial().unwrap()).unwrap();
        assert!(first_order_system(&ode).is_err());
        let ode = ScalarODE::new("q", parse("q0*q2 - 3*q1^2 + 3").unwrap().as_polynomial().unwrap()).unwrap();
        let sys = first_order_system(&ode).unwrap();
        assert_eq!(sys.rhs[1], parse("(3*q1^2 - 3)/q0").unwrap());
    }
}
