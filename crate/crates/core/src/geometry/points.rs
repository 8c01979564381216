//! Accessible singular points on boundary divisors and the linear data around them.

use super::atlas::{divisor_variable, Atlas, Chart, Divisor};
use crate::algebra::{solve, Symbol, RF};
use crate::error::{Error, Result};
use crate::systems::{pushforward, BirationalMap, PlaneSystem};

/// Largest expansion order inspected when estimating multiplicities.
pub const MULTIPLICITY_SEARCH: usize = 8;

/// `sys` written in the coordinates of `chart`.
pub fn to_chart(sys: &PlaneSystem, chart: &Chart) -> Result<PlaneSystem> {
    if chart.is_base() && sys.vars == chart.vars {
        return Ok(sys.clone());
    }
    let mut out = pushforward(sys, &chart.map())?;
    out.name = format!("{}({})", chart.id, sys.name);
    Ok(out)
}

/// Largest pole order of the right-hand sides along the components of `d`.
pub fn divisor_pole_order(sys: &PlaneSystem, atlas: &Atlas, d: &Divisor) -> Result<i64> {
    if d.components.is_empty() {
        return Err(Error::Invalid(format!("divisor `{}` meets no chart", d.name)));
    }
    let sys = sys.constrained()?;
    let mut order = 0;
    for comp in &d.components {
        let chart = atlas.chart(&comp.chart)?;
        let (dv, _) = divisor_variable(&comp.equation, chart)?;
        let local = to_chart(&sys, chart)?;
        for f in &local.rhs {
            if let Some(v) = f.valuation_in(dv) {
                order = order.max(-v);
            }
        }
    }
    Ok(order)
}

/// A point `divisor coordinate = 0, transverse coordinate = location` in some chart.
#[derive(Clone, Debug)]
pub struct AccessiblePoint {
    pub name: String,
    pub chart: Chart,
    pub divisor: String,
    pub divisor_var: Symbol,
    pub transverse_var: Symbol,
    pub location: RF,
    /// Order of the first expansion matrix with a nonzero eigenvalue.
    pub multiplicity_hint: usize,
}

impl AccessiblePoint {
    fn divisor_index(&self) -> usize {
        if self.chart.vars[0] == self.divisor_var {
            0
        } else {
            1
        }
    }

    /// Chart coordinates of the point, in chart variable order.
    pub fn coordinates(&self) -> [RF; 2] {
        let mut c = [RF::zero(), RF::zero()];
        c[1 - self.divisor_index()] = self.location.clone();
        c
    }

    /// Variables of the recentered system, in chart order.
    pub fn local_vars(&self) -> [Symbol; 2] {
        if self.location.is_zero() {
            return self.chart.vars;
        }
        for suffix in ["", "1", "2", "3"] {
            let x = Symbol::coordinate(&format!("X{suffix}"));
            let y = Symbol::coordinate(&format!("Y{suffix}"));
            if !self.chart.vars.contains(&x) && !self.chart.vars.contains(&y) {
                return [x, y];
            }
        }
        [Symbol::coordinate("Xc"), Symbol::coordinate("Yc")]
    }

    /// `(divisor, transverse)` variables of the recentered system.
    pub fn local_roles(&self) -> (Symbol, Symbol) {
        let v = self.local_vars();
        let i = self.divisor_index();
        (v[i], v[1 - i])
    }

    fn recentering_map(&self) -> BirationalMap {
        let target = self.local_vars();
        let i = 1 - self.divisor_index();
        let mut fwd = [RF::symbol(self.chart.vars[0]), RF::symbol(self.chart.vars[1])];
        let mut bwd = [RF::symbol(target[0]), RF::symbol(target[1])];
        fwd[i] = &fwd[i] - &self.location;
        bwd[i] = &bwd[i] + &self.location;
        BirationalMap::new(&format!("at_{}", self.name), self.chart.vars, target, Some(fwd), Some(bwd))
    }
}

/// Shifts the transverse coordinate so the point sits at the origin.
///
/// Accepts the system in base, chart or already recentered coordinates.
pub fn recenter(sys: &PlaneSystem, p: &AccessiblePoint) -> Result<PlaneSystem> {
    let local = p.local_vars();
    if sys.vars == local {
        return Ok(sys.clone());
    }
    let in_chart = if sys.vars == p.chart.vars {
        sys.clone()
    } else {
        to_chart(&sys.constrained()?, &p.chart)?
    };
    if p.location.is_zero() {
        return Ok(in_chart);
    }
    let mut out = pushforward(&in_chart, &p.recentering_map())?;
    out.name = format!("{}@{}", sys.name, p.name);
    Ok(out)
}

/// Accessible points found on the divisors of an atlas.
#[derive(Clone, Debug, Default)]
pub struct Singularities {
    pub points: Vec<AccessiblePoint>,
    /// Loci that could not be resolved into points (high-degree equations, higher poles).
    pub unresolved: Vec<String>,
}

/// Roots sorted so that `r` comes before `-r` and simpler roots first.
fn root_order(r: &RF) -> (String, bool) {
    let s = r.to_string();
    match s.strip_prefix('-') {
        Some(rest) => (rest.to_owned(), true),
        None => (s, false),
    }
}

/// Value of `f` at `(d, c) = (0, loc)`, taking the transverse limit first.
fn value_on_divisor(f: &RF, d: Symbol, c: Symbol, loc: &RF) -> Result<Option<RF>> {
    if let Some(g) = f.value_at(c, loc)? {
        if let Some(v) = g.restrict_zero(d)? {
            return Ok(Some(v));
        }
    }
    match f.restrict_zero(d)? {
        Some(g) => g.value_at(c, loc),
        None => Ok(None),
    }
}

fn same_point(a: &AccessiblePoint, b: &AccessiblePoint) -> Result<bool> {
    if a.chart.id == b.chart.id {
        return Ok(a.divisor_var == b.divisor_var && a.location == b.location);
    }
    let tr = a.chart.transition(&b.chart)?;
    let target = b.coordinates();
    for (f, want) in tr.iter().zip(&target) {
        match value_on_divisor(f, a.divisor_var, a.transverse_var, &a.location)? {
            Some(v) if &v == want => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Accessible singular points of `sys` on every divisor of `atlas`, deduplicated across charts.
///
/// Charts are visited in atlas order; points are named `P1, P2, ...` in discovery order.
pub fn accessible_points(sys: &PlaneSystem, atlas: &Atlas) -> Result<Singularities> {
    let sys = sys.constrained()?;
    let mut out = Singularities::default();
    for chart in &atlas.charts {
        let comps: Vec<_> = atlas
            .divisors
            .iter()
            .flat_map(|d| d.components.iter().map(move |c| (d, c)))
            .filter(|(_, c)| c.chart == chart.id)
            .collect();
        if comps.is_empty() {
            continue;
        }
        let local = to_chart(&sys, chart)?;
        for (div, comp) in comps {
            let (d, c) = divisor_variable(&comp.equation, chart)?;
            let where_ = format!("{} in chart {}", div.name, chart.id);
            let mut restricted = Vec::new();
            let mut higher_pole = false;
            for f in &local.rhs {
                match (&RF::symbol(d) * f).restrict_zero(d)? {
                    Some(g) => restricted.push(g),
                    None => higher_pole = true,
                }
            }
            if higher_pole {
                out.unresolved.push(format!("{where_}: pole of order above one"));
                continue;
            }
            let nonzero: Vec<&RF> = restricted.iter().filter(|g| !g.is_zero()).collect();
            let Some(pivot) = nonzero.iter().min_by_key(|g| g.num().degree_in(c)) else {
                out.unresolved.push(format!("{where_}: the whole component is singular"));
                continue;
            };
            let roots = solve(pivot.num(), c)?;
            if let Some(rest) = &roots.unresolved {
                let deg = rest.len().saturating_sub(1);
                out.unresolved
                    .push(format!("{where_}: factor of degree {deg} in {c} left unsolved"));
            }
            let mut found: Vec<RF> = Vec::new();
            for r in roots.roots {
                if comp.excluding.contains(&r.value) {
                    continue;
                }
                let mut ok = true;
                for g in &nonzero {
                    match g.value_at(c, &r.value)? {
                        Some(v) if v.is_zero() => {}
                        _ => ok = false,
                    }
                }
                if ok {
                    found.push(r.value);
                }
            }
            found.sort_by_key(root_order);
            for loc in found {
                let mut p = AccessiblePoint {
                    name: String::new(),
                    chart: chart.clone(),
                    divisor: div.name.clone(),
                    divisor_var: d,
                    transverse_var: c,
                    location: loc,
                    multiplicity_hint: 0,
                };
                let mut dup = false;
                for q in &out.points {
                    if same_point(q, &p)? || same_point(&p, q)? {
                        dup = true;
                        break;
                    }
                }
                if dup {
                    continue;
                }
                p.name = format!("P{}", out.points.len() + 1);
                p.multiplicity_hint = multiplicity(&sys, &p)?;
                out.points.push(p);
            }
        }
    }
    Ok(out)
}

fn multiplicity(sys: &PlaneSystem, p: &AccessiblePoint) -> Result<usize> {
    let local = recenter(sys, p)?;
    let (d, c) = p.local_roles();
    let g = cleared(&local, p)?;
    for k in 1..=MULTIPLICITY_SEARCH {
        let m = block(&g, d, c, k)?;
        if !is_nilpotent(&m) {
            return Ok(k);
        }
    }
    Ok(0)
}

/// `(d * rhs_transverse, d * rhs_divisor)` for the recentered system.
fn cleared(local: &PlaneSystem, p: &AccessiblePoint) -> Result<[RF; 2]> {
    let (d, _) = p.local_roles();
    let i = p.divisor_index();
    let dd = RF::symbol(d);
    if local.vars != p.local_vars() {
        return Err(Error::Invalid(format!(
            "system is in ({}, {}), expected the coordinates around {}",
            local.vars[0], local.vars[1], p.name
        )));
    }
    Ok([&dd * &local.rhs[1 - i], &dd * &local.rhs[i]])
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Taylor coefficient of `c^a d^b` at the origin.
fn taylor(f: &RF, c: Symbol, a: usize, d: Symbol, b: usize) -> Result<RF> {
    let mut g = f.clone();
    for _ in 0..a {
        g = g.derivative(c);
    }
    for _ in 0..b {
        g = g.derivative(d);
    }
    let at = |g: &RF| -> Result<RF> {
        let v = g.restrict_zero(c)?.and_then(|h| h.restrict_zero(d).transpose()).transpose()?;
        v.ok_or_else(|| Error::Pole(format!("{g} at the origin")))
    };
    let v = at(&g)?;
    Ok(v.scale(&num_rational::BigRational::from_integer((factorial(a) * factorial(b)).into()).recip()))
}

pub type Matrix2 = [[RF; 2]; 2];

/// Rows `(transverse, divisor)` of the cleared field, columns `(c^k, c^(k-1) d)`.
fn block(g: &[RF; 2], d: Symbol, c: Symbol, k: usize) -> Result<Matrix2> {
    let row = |f: &RF| -> Result<[RF; 2]> { Ok([taylor(f, c, k, d, 0)?, taylor(f, c, k - 1, d, 1)?]) };
    Ok([row(&g[0])?, row(&g[1])?])
}

fn is_nilpotent(m: &Matrix2) -> bool {
    let tr = &m[0][0] + &m[1][1];
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    tr.is_zero() && det.is_zero()
}

/// Graded blocks `M_1 .. M_max_order` of the cleared field around `p`.
pub fn expansion_matrices(sys: &PlaneSystem, p: &AccessiblePoint, max_order: usize) -> Result<Vec<Matrix2>> {
    let local = recenter(sys, p)?;
    let g = cleared(&local, p)?;
    let (d, c) = p.local_roles();
    (1..=max_order).map(|k| block(&g, d, c, k)).collect()
}

/// Linear data of the cleared field at an accessible point.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalIndexReport {
    pub point: String,
    pub a11: RF,
    pub a12: RF,
    pub a21: RF,
    pub a22: RF,
    pub resonance_ratio: RF,
    pub integer_verdict: bool,
}

impl LocalIndexReport {
    /// The linear-approximation matrix with rows `(transverse, divisor)`.
    pub fn matrix(&self) -> Matrix2 {
        [
            [self.a22.clone(), self.a21.clone()],
            [self.a12.clone(), self.a11.clone()],
        ]
    }
}

pub fn local_index(sys: &PlaneSystem, p: &AccessiblePoint) -> Result<LocalIndexReport> {
    let local = recenter(sys, p)?;
    let g = cleared(&local, p)?;
    let (d, c) = p.local_roles();
    let m = block(&g, d, c, 1)?;
    let a11 = m[1][1].clone();
    if a11.is_zero() {
        return Err(Error::Degenerate(format!(
            "a11 vanishes at {}; use expansion_matrices",
            p.name
        )));
    }
    let a22 = m[0][0].clone();
    let ratio = a22.checked_div(&a11)?;
    let integer_verdict = ratio.as_rational_constant().is_some_and(|r| r.is_integer());
    Ok(LocalIndexReport {
        point: p.name.clone(),
        a11,
        a12: m[1][0].clone(),
        a21: m[0][1].clone(),
        a22,
        resonance_ratio: ratio,
        integer_verdict,
    })
}

/// Point named `name` (`P1`, ...) or whose base first coordinate is `x=value` / `X=value`.
pub fn select_point<'a>(points: &'a [AccessiblePoint], selector: &str) -> Result<&'a AccessiblePoint> {
    if let Some(p) = points.iter().find(|p| p.name == selector) {
        return Ok(p);
    }
    if let Some((_, value)) = selector.split_once('=') {
        let value = value.trim();
        for p in points {
            let loc = base_first_coordinate(p)?;
            let hit = match &loc {
                None => matches!(value, "inf" | "infinity" | "oo" | "∞"),
                Some(v) => crate::algebra::parse(value).is_ok_and(|w| &w == v),
            };
            if hit {
                return Ok(p);
            }
        }
    }
    Err(Error::NotFound(format!("accessible point `{selector}`")))
}

/// First base coordinate of the point; `None` when it lies at infinity.
pub fn base_first_coordinate(p: &AccessiblePoint) -> Result<Option<RF>> {
    let Some(tb) = &p.chart.to_base else {
        return Ok(Some(p.coordinates()[0].clone()));
    };
    value_on_divisor(&tb[0], p.divisor_var, p.transverse_var, &p.location)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;
    use crate::systems::Catalog;

    #[test]
    fn polynomial_field_has_no_points_in_base_chart() {
        let atlas = Atlas::parse("atlas plain\nchart U0 vars(v,u) base\ndivisor D on U0: v\n").unwrap();
        let sys = PlaneSystem::new(
            "lin",
            atlas.charts[0].vars,
            Symbol::time(),
            [parse("1 + u").unwrap(), parse("v").unwrap()],
        );
        let s = accessible_points(&sys, &atlas).unwrap();
        assert!(s.points.is_empty());
        assert_eq!(divisor_pole_order(&sys, &atlas, &atlas.divisors[0]).unwrap(), 0);
    }

    #[test]
    fn identity_chart_keeps_system() {
        let cat = Catalog::builtin();
        let k = cat.system("K").unwrap();
        let atlas = Atlas::builtin("Sigma4").unwrap();
        assert!(to_chart(k, atlas.base()).unwrap().same_field(k));
    }

    #[test]
    fn taylor_coefficients() {
        let c = Symbol::lookup("z2").unwrap();
        let d = Symbol::lookup("w2").unwrap();
        let f = parse("3*z2^2*w2 + t*z2^3 + 1/(1 - w2)").unwrap();
        assert_eq!(taylor(&f, c, 2, d, 1).unwrap(), RF::from_i64(3));
        assert_eq!(taylor(&f, c, 3, d, 0).unwrap(), parse("t").unwrap());
        assert_eq!(taylor(&f, c, 0, d, 2).unwrap(), RF::one());
    }
}
