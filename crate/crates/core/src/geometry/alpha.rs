//! The scaling limit `t = t0 + alpha T`, `x = alpha X` at an accessible point, and its
//! closed-form solution.

use std::fmt;

use super::points::{recenter, AccessiblePoint};
use crate::algebra::{sym, Symbol, RF};
use crate::error::{Error, Result};
use crate::systems::PlaneSystem;

/// `dD/dT = a11`, `dC/dT = a22 C / D + a21` with coefficients frozen at `t0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSystem {
    pub point: String,
    /// Divisor coordinate `D`.
    pub divisor: Symbol,
    /// Transverse coordinate `C`.
    pub transverse: Symbol,
    pub a11: RF,
    pub a21: RF,
    pub a22: RF,
}

impl ReducedSystem {
    /// Right-hand sides `(dD/dT, dC/dT)`.
    pub fn rhs(&self) -> [RF; 2] {
        let d = RF::symbol(self.divisor);
        let c = RF::symbol(self.transverse);
        let rc = &(&self.a22 * &c).checked_div(&d).expect("nonzero symbol") + &self.a21;
        [self.a11.clone(), rc]
    }
}

impl fmt::Display for ReducedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rhs();
        writeln!(f, "d{}/dT = {}", self.divisor, r[0])?;
        write!(f, "d{}/dT = {}", self.transverse, r[1])
    }
}

/// The reduced system obtained from the recentered field as `alpha -> 0`.
pub fn alpha_reduce(sys: &PlaneSystem, p: &AccessiblePoint) -> Result<ReducedSystem> {
    let local = recenter(sys, p)?;
    let (d, c) = p.local_roles();
    let alpha = Symbol::parameter("alpha");
    let (t, t0, big_t) = (local.time, sym("t0"), sym("T"));
    let scaled = [
        (d, &RF::symbol(alpha) * &RF::symbol(d)),
        (c, &RF::symbol(alpha) * &RF::symbol(c)),
        (t, &RF::symbol(t0) + &(&RF::symbol(alpha) * &RF::symbol(big_t))),
    ];
    let limit = |f: &RF| -> Result<RF> {
        f.substitute(&scaled)?.restrict_zero(alpha)?.ok_or_else(|| {
            Error::Degenerate(format!("scaling limit at {} diverges", p.name))
        })
    };
    let i = if local.vars[0] == d { 0 } else { 1 };
    let rd = limit(&local.rhs[i])?;
    let rc = limit(&local.rhs[1 - i])?;
    if rd.is_zero() {
        return Err(Error::Degenerate(format!(
            "a11 vanishes at {}; use expansion_matrices",
            p.name
        )));
    }
    if [d, c, big_t].iter().any(|s| rd.contains(*s)) {
        return Err(Error::Degenerate(format!("reduced divisor equation at {} is not constant", p.name)));
    }
    let cleared = &RF::symbol(d) * &rc;
    let a22 = cleared.derivative(c);
    let a21 = cleared.derivative(d);
    let linear = &(&a22 * &RF::symbol(c)) + &(&a21 * &RF::symbol(d));
    if linear != cleared || [d, c, big_t].iter().any(|s| a22.contains(*s) || a21.contains(*s)) {
        return Err(Error::Degenerate(format!(
            "reduced transverse equation at {} is not of the form a22 C/D + a21",
            p.name
        )));
    }
    Ok(ReducedSystem {
        point: p.name.clone(),
        divisor: d,
        transverse: c,
        a11: rd,
        a21,
        a22,
    })
}

/// Closed-form solution of a reduced system and the single-valuedness verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaTestReport {
    pub reduced: ReducedSystem,
    /// `a22 / a11`.
    pub exponent: RF,
    /// Coefficient of the particular term: `a21/(a11 - a22)` times `D`, or of `D log D`
    /// when `a11 = a22`.
    pub particular: RF,
    pub logarithmic: bool,
    pub single_valued: bool,
    /// `D(T) = a11 T + C1`.
    pub divisor_solution: RF,
    /// `C(T)` when it is a rational function of `T`.
    pub transverse_solution: Option<RF>,
    pub printed: String,
}

impl AlphaTestReport {
    /// Both equations evaluated on the closed form; zero when the solution is exact.
    pub fn residual(&self) -> Result<Option<[RF; 2]>> {
        let Some(c_sol) = &self.transverse_solution else {
            return Ok(None);
        };
        let big_t = sym("T");
        let r = &self.reduced;
        let sub = [
            (r.divisor, self.divisor_solution.clone()),
            (r.transverse, c_sol.clone()),
        ];
        let rhs = r.rhs();
        Ok(Some([
            &self.divisor_solution.derivative(big_t) - &rhs[0].substitute(&sub)?,
            &c_sol.derivative(big_t) - &rhs[1].substitute(&sub)?,
        ]))
    }
}

pub fn solve_reduced(r: &ReducedSystem) -> Result<AlphaTestReport> {
    let (big_t, c1, c2) = (sym("T"), sym("C1"), sym("C2"));
    let dsol = &(&r.a11 * &RF::symbol(big_t)) + &RF::symbol(c1);
    let exponent = r.a22.checked_div(&r.a11)?;
    let (d, c) = (r.divisor, r.transverse);
    if r.a11 == r.a22 {
        let coef = r.a21.checked_div(&r.a11)?;
        let single = coef.is_zero();
        let sol = single.then(|| &RF::symbol(c2) * &dsol);
        let printed = format!(
            "{d} = {dsol}\n{c} = ({dsol})*(C2 + ({coef})*log({dsol}))"
        );
        return Ok(AlphaTestReport {
            reduced: r.clone(),
            exponent,
            particular: coef,
            logarithmic: true,
            single_valued: single,
            divisor_solution: dsol,
            transverse_solution: sol,
            printed,
        });
    }
    let beta = r.a21.checked_div(&(&r.a11 - &r.a22))?;
    let k = exponent
        .as_rational_constant()
        .filter(|k| k.is_integer())
        .and_then(|k| num_traits::ToPrimitive::to_i32(&k.to_integer()));
    let sol = match k {
        Some(k) => Some(&(&RF::symbol(c2) * &dsol.pow(k)?) + &(&beta * &dsol)),
        None => None,
    };
    let printed = match &sol {
        Some(s) => format!("{d} = {dsol}\n{c} = {s}"),
        None => format!("{d} = {dsol}\n{c} = C2*({dsol})^({exponent}) + ({beta})*({dsol})"),
    };
    Ok(AlphaTestReport {
        reduced: r.clone(),
        exponent,
        particular: beta,
        logarithmic: false,
        single_valued: k.is_some(),
        divisor_solution: dsol,
        transverse_solution: sol,
        printed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;

    fn reduced(a11: &str, a21: &str, a22: &str) -> ReducedSystem {
        ReducedSystem {
            point: "test".into(),
            divisor: sym("X"),
            transverse: sym("Y"),
            a11: parse(a11).unwrap(),
            a21: parse(a21).unwrap(),
            a22: parse(a22).unwrap(),
        }
    }

    #[test]
    fn integer_ratio_gives_rational_solution() {
        let rep = solve_reduced(&reduced("-1", "0", "-6")).unwrap();
        assert!(rep.single_valued);
        assert_eq!(rep.transverse_solution.unwrap(), parse("C2*(T - C1)^6").unwrap());
    }

    #[test]
    fn fractional_ratio_is_multivalued() {
        let rep = solve_reduced(&reduced("2", "1", "1")).unwrap();
        assert!(!rep.single_valued);
        assert!(rep.transverse_solution.is_none());
        assert_eq!(rep.exponent, parse("1/2").unwrap());
    }

    #[test]
    fn equal_eigenvalues_need_vanishing_log_term() {
        assert!(!solve_reduced(&reduced("1", "3", "1")).unwrap().single_valued);
        let rep = solve_reduced(&reduced("1", "0", "1")).unwrap();
        assert!(rep.single_valued);
        let res = rep.residual().unwrap().unwrap();
        assert!(res[0].is_zero() && res[1].is_zero());
    }

    #[test]
    fn residual_vanishes_with_parameters() {
        let rep = solve_reduced(&reduced("1/(t0 - 1)", "-alpha4/(t0 - 1)", "2/(t0 - 1)")).unwrap();
        let res = rep.residual().unwrap().unwrap();
        assert!(res[0].is_zero() && res[1].is_zero());
    }
}
