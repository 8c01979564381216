//! Point blow-ups as pairs of chart maps.

use crate::algebra::{Symbol, RF};
use crate::error::Result;
use crate::systems::BirationalMap;

/// The two charts of the blow-up of `point` in the plane with coordinates `vars`:
/// `(x1 - p1, (x2 - p2)/(x1 - p1))` into `first` and `((x1 - p1)/(x2 - p2), x2 - p2)` into `second`.
pub fn blow_up(
    vars: [Symbol; 2],
    point: &[RF; 2],
    first: [Symbol; 2],
    second: [Symbol; 2],
) -> (BirationalMap, BirationalMap) {
    let x1 = &RF::symbol(vars[0]) - &point[0];
    let x2 = &RF::symbol(vars[1]) - &point[1];
    let (a1, a2) = (RF::symbol(first[0]), RF::symbol(first[1]));
    let (b1, b2) = (RF::symbol(second[0]), RF::symbol(second[1]));
    let a = BirationalMap::new(
        "blowup_a",
        vars,
        first,
        Some([x1.clone(), x2.checked_div(&x1).expect("nonzero")]),
        Some([&a1 + &point[0], &point[1] + &(&a1 * &a2)]),
    );
    let b = BirationalMap::new(
        "blowup_b",
        vars,
        second,
        Some([x1.checked_div(&x2).expect("nonzero"), x2]),
        Some([&point[0] + &(&b1 * &b2), &b2 + &point[1]]),
    );
    (a, b)
}

/// The coordinate `(X, Y) = (v, u v^6)` reached from `(v, u)` by passing to `w = 1/u`,
/// blowing up the origin six times in the first chart and inverting the fibre coordinate.
pub fn six_fold_blowup() -> Result<BirationalMap> {
    let v = Symbol::coordinate("v");
    let u = Symbol::coordinate("u");
    let zero = [RF::zero(), RF::zero()];
    let mut vars = [v, Symbol::coordinate("_w0")];
    let mut m = BirationalMap::new(
        "w",
        [v, u],
        vars,
        Some([RF::symbol(v), RF::symbol(u).recip()?]),
        Some([RF::symbol(v), RF::symbol(vars[1]).recip()?]),
    );
    for k in 1..=6 {
        let next = [v, Symbol::coordinate(&format!("_w{k}"))];
        let other = [Symbol::coordinate(&format!("_s{k}")), Symbol::coordinate(&format!("_r{k}"))];
        let (a, _) = blow_up(vars, &zero, next, other);
        m = m.then(&a)?;
        vars = next;
    }
    let (x, y) = (Symbol::coordinate("X"), Symbol::coordinate("Y"));
    let inv = BirationalMap::new(
        "invert",
        vars,
        [x, y],
        Some([RF::symbol(vars[0]), RF::symbol(vars[1]).recip()?]),
        Some([RF::symbol(x), RF::symbol(y).recip()?]),
    );
    let mut out = m.then(&inv)?;
    out.name = "blowup_P3".into();
    Ok(out)
}
