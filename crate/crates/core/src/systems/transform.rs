use super::map::BirationalMap;
use super::system::PlaneSystem;
use crate::algebra::{Polynomial, RF};
use crate::error::{Error, Result};

/// The vector field of `sys` written in the target variables of `m`.
///
/// With `psi` the source variables in terms of the target ones, the new field is
/// `J(psi)^-1 (f(psi) - d psi/dt)`, divided by `dtau/dt` and rewritten in `tau`.
pub fn pushforward(sys: &PlaneSystem, m: &BirationalMap) -> Result<PlaneSystem> {
    if sys.vars != m.source {
        return Err(Error::Invalid(format!(
            "map `{}` starts from ({}, {}) but the system is in ({}, {})",
            m.name, m.source[0], m.source[1], sys.vars[0], sys.vars[1]
        )));
    }
    let t = sys.time;
    let psi = m.backward_components()?;
    let tv = m.target;
    let (j00, j01) = (psi[0].derivative(tv[0]), psi[0].derivative(tv[1]));
    let (j10, j11) = (psi[1].derivative(tv[0]), psi[1].derivative(tv[1]));
    let sub = [(sys.vars[0], psi[0].clone()), (sys.vars[1], psi[1].clone())];
    let f0 = &sys.rhs[0].substitute(&sub)? - &psi[0].derivative(t);
    let f1 = &sys.rhs[1].substitute(&sub)? - &psi[1].derivative(t);
    let det = &(&j00 * &j11) - &(&j01 * &j10);
    if det.is_zero() {
        return Err(Error::Degenerate(format!("map `{}` has zero Jacobian", m.name)));
    }
    let mut g0 = (&(&j11 * &f0) - &(&j01 * &f1)).checked_div(&det)?;
    let mut g1 = (&(&j00 * &f1) - &(&j10 * &f0)).checked_div(&det)?;
    if let Some(ta) = &m.time {
        let back = [(t, ta.inverse_expr(t)?)];
        g0 = g0.checked_div(&ta.scale)?.substitute(&back)?;
        g1 = g1.checked_div(&ta.scale)?.substitute(&back)?;
    }
    let mut out = PlaneSystem::new(&format!("{}({})", m.name, sys.name), tv, t, [g0, g1]);
    out.relations = sys.relations.clone();
    Ok(out)
}

/// Whether `m` (with its time and parameter actions) maps `sys` to itself.
pub fn check_symmetry(sys: &PlaneSystem, m: &BirationalMap) -> Result<bool> {
    let pushed = pushforward(sys, m)?;
    let mut expected = sys.rename(m.target)?;
    if !m.params.is_empty() {
        expected = expected.substitute(&m.params)?;
    }
    let (a, b) = if sys.relations.is_empty() {
        (pushed, expected)
    } else {
        (pushed.constrained()?, expected.constrained()?)
    };
    Ok(a.rhs == b.rhs)
}

/// Result of transporting a Hamiltonian through a map.
#[derive(Clone, Debug, PartialEq)]
pub enum Holomorphy {
    /// Polynomial in the target variables; coefficients may still be rational in `t`.
    Polynomial(RF),
    /// Factors of the denominator that involve the target variables.
    Failure { transformed: RF, offending: Vec<Polynomial> },
}

impl Holomorphy {
    pub fn is_polynomial(&self) -> bool {
        matches!(self, Holomorphy::Polynomial(_))
    }

    pub fn value(&self) -> &RF {
        match self {
            Holomorphy::Polynomial(f) => f,
            Holomorphy::Failure { transformed, .. } => transformed,
        }
    }
}

/// `(H + shift)` written in the target variables of `m`.
pub fn check_holomorphy(sys: &PlaneSystem, m: &BirationalMap, shift: &RF) -> Result<Holomorphy> {
    let h = sys.hamiltonian.as_ref().ok_or_else(|| {
        Error::Invalid(format!("system `{}` carries no Hamiltonian", sys.name))
    })?;
    let psi = m.backward_components()?;
    let sub = [(sys.vars[0], psi[0].clone()), (sys.vars[1], psi[1].clone())];
    let val = (h + shift).substitute(&sub)?;
    let offending: Vec<Polynomial> = den_factors(val.den())
        .into_iter()
        .filter(|f| m.target.iter().any(|&s| f.contains(s)))
        .collect();
    if offending.is_empty() {
        Ok(Holomorphy::Polynomial(val))
    } else {
        Ok(Holomorphy::Failure {
            transformed: val,
            offending,
        })
    }
}

/// Splits a denominator into its monomial variables and the remaining primitive part.
fn den_factors(d: &Polynomial) -> Vec<Polynomial> {
    let content = d.monomial_content();
    let mut out: Vec<Polynomial> = content
        .factors()
        .iter()
        .map(|&(s, e)| Polynomial::symbol(s).pow(e))
        .collect();
    let rest = d.div_monomial(&content).expect("content divides");
    if rest.as_constant().is_none() {
        out.push(rest);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse, sym, Symbol};

    fn hi() -> PlaneSystem {
        PlaneSystem::from_hamiltonian(
            "HI",
            parse("1/2*y^2 - 2*x^3 - t*x").unwrap(),
            [sym("x"), sym("y")],
            Symbol::time(),
        )
    }

    #[test]
    fn identity_pushforward() {
        let s = hi();
        let p = pushforward(&s, &BirationalMap::identity(s.vars)).unwrap();
        assert_eq!(p.rhs, s.rhs);
    }

    #[test]
    fn identity_holomorphy() {
        let s = hi();
        let h = check_holomorphy(&s, &BirationalMap::identity(s.vars), &RF::zero()).unwrap();
        assert_eq!(h, Holomorphy::Polynomial(s.hamiltonian.clone().unwrap()));
    }

    #[test]
    fn translation_adds_time_derivative() {
        // y = Y + t shifts dY/dt by -1.
        let s = hi();
        let m = BirationalMap::new(
            "shift",
            [sym("x"), sym("y")],
            [sym("X"), sym("Y")],
            Some([parse("x").unwrap(), parse("y - t").unwrap()]),
            None,
        );
        let p = pushforward(&s, &m).unwrap();
        assert_eq!(p.rhs[0], parse("Y + t").unwrap());
        assert_eq!(p.rhs[1], parse("6*X^2 + t - 1").unwrap());
    }
}
