use painleve::algebra::{parse, sym, RF};
use painleve::geometry::*;
use painleve::systems::{pushforward, Catalog, PlaneSystem};

fn p(s: &str) -> RF {
    parse(s).unwrap()
}

fn k_system() -> PlaneSystem {
    Catalog::builtin().system("K").unwrap().clone()
}

fn sigma4_points() -> (Atlas, Vec<AccessiblePoint>) {
    let atlas = Atlas::builtin("Sigma4").unwrap();
    let s = accessible_points(&k_system(), &atlas).unwrap();
    assert!(s.unresolved.is_empty(), "{:?}", s.unresolved);
    (atlas, s.points)
}

#[test]
fn chart_systems_of_k() {
    let atlas = Atlas::builtin("Sigma4").unwrap();
    let k = k_system();
    let u1 = to_chart(&k, atlas.chart("U1").unwrap()).unwrap();
    assert_eq!(u1.rhs[0], p("-z1^2 + w1/2"));
    assert_eq!(u1.rhs[1], p("(2*t - w1^2)/(2*z1) + 4*z1*w1"));
    let u2 = to_chart(&k, atlas.chart("U2").unwrap()).unwrap();
    assert_eq!(u2.rhs[0], p("1 + t*z2^4/4 + z2^5/4 - z2^6/(2*w2)"));
    assert_eq!(
        u2.rhs[1],
        p("-3*z2^5/2 + t*z2^3*w2 + 5*z2^4*w2/4 - t^2*z2*w2^2/8 - 3*t*z2^2*w2^2/8 - z2^3*w2^2/4")
    );
    let u3 = to_chart(&k, atlas.chart("U3").unwrap()).unwrap();
    assert_eq!(u3.rhs[0], p("-z3^2 + 1/(2*w3)"));
    assert_eq!(u3.rhs[1], p("(1 - 2*t*w3^2)/(2*z3) - 4*z3*w3"));
}

#[test]
fn pole_orders() {
    let k = k_system();
    let s4 = Atlas::builtin("Sigma4").unwrap();
    for d in &s4.divisors {
        assert_eq!(divisor_pole_order(&k, &s4, d).unwrap(), 1, "{}", d.name);
    }
    let p2 = Atlas::builtin("P2").unwrap();
    assert_eq!(divisor_pole_order(&k, &p2, p2.divisor("Hinf").unwrap()).unwrap(), 6);
}

#[test]
fn pole_order_ignores_unit_rescaling() {
    let k = k_system();
    let text = Atlas::builtin("Sigma4").unwrap().to_text().replace(": w2", ": 3*w2").replace(": z1", ": -z1/2");
    let scaled = Atlas::parse(&text).unwrap();
    for d in &scaled.divisors {
        assert_eq!(divisor_pole_order(&k, &scaled, d).unwrap(), 1);
    }
}

#[test]
fn three_accessible_points() {
    let (_, pts) = sigma4_points();
    assert_eq!(pts.len(), 3);
    let root = p("sqrt(2*t)");
    assert_eq!((pts[0].chart.id.as_str(), pts[0].location.clone()), ("U1", root.clone()));
    assert_eq!((pts[1].chart.id.as_str(), pts[1].location.clone()), ("U1", -&root));
    assert_eq!((pts[2].chart.id.as_str(), pts[2].location.clone()), ("U2", RF::zero()));
    assert_eq!(pts[0].divisor, "L");
    assert_eq!(pts[2].divisor, "H");
    assert_eq!(pts[0].multiplicity_hint, 1);
    assert_eq!(pts[2].multiplicity_hint, 6);
}

#[test]
fn points_agree_across_charts() {
    let (atlas, pts) = sigma4_points();
    // P1 seen from the third chart: (z3, w3) = (0, 1/sqrt(2t)).
    let tr = pts[0].chart.transition(atlas.chart("U3").unwrap()).unwrap();
    let w3 = tr[1].substitute(&[(sym("w1"), p("sqrt(2*t)"))]).unwrap();
    let w3 = w3.restrict_zero(sym("z1")).unwrap().unwrap();
    assert_eq!(w3, p("1/sqrt(2*t)"));
    assert_eq!(tr[0], p("z1"));
}

#[test]
fn pi_exchanges_p1_and_p2() {
    let cat = Catalog::builtin();
    let pi = cat.map("pi").unwrap();
    let (atlas, pts) = sigma4_points();
    let image = pi.apply(&pts[0].coordinates()).unwrap();
    assert_eq!(image, pts[1].coordinates());
    let u1 = to_chart(&k_system(), atlas.chart("U1").unwrap()).unwrap();
    let pushed = pushforward(&u1, pi).unwrap();
    assert_eq!(pushed.rhs, u1.rhs);
}

#[test]
fn recentered_at_p1() {
    let (_, pts) = sigma4_points();
    let r = recenter(&k_system(), &pts[0]).unwrap();
    assert_eq!(r.vars, [sym("X"), sym("Y")]);
    assert_eq!(r.rhs[0], p("sqrt(2*t)/2 + Y/2 - X^2"));
    assert_eq!(
        r.rhs[1],
        p("-sqrt(2*t)*Y/X - Y^2/(2*X) + 4*X*Y + 4*sqrt(2*t)*X - 1/sqrt(2*t)")
    );
}

#[test]
fn local_index_table() {
    let (_, pts) = sigma4_points();
    let k = k_system();
    for (pt, sign) in [(&pts[0], 1), (&pts[1], -1)] {
        let li = local_index(&k, pt).unwrap();
        let root = &p("sqrt(2*t)") * &RF::from_i64(sign);
        assert_eq!(li.a11, &root * &p("1/2"));
        assert_eq!(li.a22, -&root);
        assert_eq!(li.resonance_ratio, p("-2"));
        assert!(li.integer_verdict);
        assert!(li.a12.is_zero());
        let m1 = &expansion_matrices(&k, pt, 1).unwrap()[0];
        assert_eq!(m1, &li.matrix());
    }
    assert!(matches!(local_index(&k, &pts[2]), Err(painleve::Error::Degenerate(_))));
}

#[test]
fn expansion_at_p3() {
    let (_, pts) = sigma4_points();
    let ms = expansion_matrices(&k_system(), &pts[2], 6).unwrap();
    let nilpotent = |m: &Matrix2| (&m[0][0] + &m[1][1]).is_zero() && (&(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])).is_zero();
    for m in &ms[..5] {
        assert!(nilpotent(m));
    }
    assert_eq!(ms[0], [[RF::zero(), RF::one()], [RF::zero(), RF::zero()]]);
    assert_eq!(ms[5][0][0], p("-1/2"));
    assert_eq!(ms[5][1][1], p("-3/2"));
    assert!(ms[5][1][0].is_zero());
}

#[test]
fn alpha_test_at_p1() {
    let (_, pts) = sigma4_points();
    let r = alpha_reduce(&k_system(), &pts[0]).unwrap();
    assert_eq!(r.a11, p("sqrt(2*t0)/2"));
    assert_eq!(r.a22, p("-sqrt(2*t0)"));
    assert_eq!(r.a21, p("-1/sqrt(2*t0)"));
    let rep = solve_reduced(&r).unwrap();
    assert!(rep.single_valued);
    let res = rep.residual().unwrap().unwrap();
    assert!(res[0].is_zero() && res[1].is_zero());
    assert_eq!(rep.divisor_solution, p("sqrt(2*t0)/2*T + C1"));
    // The printed closed form uses another normalisation of the second constant.
    let printed = p("(-sqrt(2)*t0*T^3 - 6*C1*sqrt(t0)*T^2 - 6*sqrt(2)*C1^2*T + 3*C2*sqrt(t0))/(3*sqrt(t0)*(sqrt(2*t0)*T + 2*C1)^2)");
    let ours = rep
        .transverse_solution
        .unwrap()
        .substitute(&[(sym("C2"), p("C2/4 + C1^3/(3*t0)"))])
        .unwrap();
    assert_eq!(ours, printed);
}

#[test]
fn blow_up_chart_and_p3_tilde() {
    let m = six_fold_blowup().unwrap();
    let b = pushforward(&k_system(), &m).unwrap();
    assert_eq!(b.rhs[0], p("1 - Y/2 + t*X^4/4 + X^5/4"));
    assert_eq!(
        b.rhs[1],
        p("-3*(Y - 4)*Y/(2*X) + t^2*X^7/8 + 3*t*X^8/8 + X^9/4 + t*X^3*Y/2 + X^4*Y/4")
    );
    let atlas = Atlas::builtin("P3_blowup").unwrap();
    let s = accessible_points(&k_system(), &atlas).unwrap();
    assert_eq!(s.points.len(), 1);
    let pt = &s.points[0];
    assert_eq!(pt.location, p("4"));
    let r = recenter(&k_system(), pt).unwrap();
    assert_eq!(r.vars, [sym("X1"), sym("Y1")]);
    assert_eq!(r.rhs[0], p("-1 - Y1/2 + t*X1^4/4 + X1^5/4"));
    assert_eq!(
        r.rhs[1],
        p("-6*Y1/X1 - 3*Y1^2/(2*X1) + 2*t*X1^3 + X1^4 + t^2*X1^7/8 + 3*t*X1^8/8 + X1^9/4 + t*X1^3*Y1/2 + X1^4*Y1/4")
    );
    let red = alpha_reduce(&k_system(), pt).unwrap();
    assert_eq!((red.a11.clone(), red.a21.clone(), red.a22.clone()), (p("-1"), p("0"), p("-6")));
    let rep = solve_reduced(&red).unwrap();
    assert!(rep.single_valued);
    assert_eq!(rep.divisor_solution, p("-(T - C1)"));
    assert_eq!(rep.transverse_solution.unwrap(), p("C2*(T - C1)^6"));
}

fn pvi() -> (PlaneSystem, Vec<AccessiblePoint>) {
    let sys = Catalog::builtin().system("PVI").unwrap().clone();
    let atlas = Atlas::builtin("PVI").unwrap();
    let s = accessible_points(&sys, &atlas).unwrap();
    assert!(s.unresolved.is_empty(), "{:?}", s.unresolved);
    (sys, s.points)
}

#[test]
fn pvi_scheme() {
    let (sys, pts) = pvi();
    assert_eq!(pts.len(), 4);
    let alpha0 = "(1 - alpha1 - 2*alpha2 - alpha3 - alpha4)";
    let cases = [
        ("x=0", "1/(t - 1)", "-alpha4/(t - 1)".to_owned()),
        ("x=1", "-1/t", "alpha3/t".to_owned()),
        ("x=t", "1", format!("-{alpha0}")),
        ("x=inf", "1/(t*(t - 1))", "-alpha1/(t*(t - 1))".to_owned()),
    ];
    for (sel, scale, a21) in cases {
        let pt = select_point(&pts, sel).unwrap();
        let li = local_index(&sys, pt).unwrap();
        assert_eq!(li.a11, p(scale), "{sel}");
        assert_eq!(li.a22, &p(scale) * &RF::from_i64(2), "{sel}");
        assert_eq!(li.a21, p(&a21), "{sel}");
        assert_eq!(li.resonance_ratio, p("2"));
        let rep = solve_reduced(&alpha_reduce(&sys, pt).unwrap()).unwrap();
        assert!(rep.single_valued, "{sel}");
        let res = rep.residual().unwrap().unwrap();
        assert!(res[0].is_zero() && res[1].is_zero());
    }
}

#[test]
fn pvi_reduction_at_zero() {
    let (sys, pts) = pvi();
    let pt = select_point(&pts, "x=0").unwrap();
    let red = alpha_reduce(&sys, pt).unwrap();
    assert_eq!(red.divisor, sym("w2"));
    assert_eq!(red.rhs()[1], p("(2*z2/(t0 - 1) - alpha4*w2/(t0 - 1))/w2"));
    let rep = solve_reduced(&red).unwrap();
    // The printed constant C2 is ours times (t0 - 1)^2.
    let printed = p("C2*(T + (t0 - 1)*C1)^2 + alpha4*(T + (t0 - 1)*C1)/(t0 - 1)");
    let ours = rep
        .transverse_solution
        .unwrap()
        .substitute(&[(sym("C2"), p("C2*(t0 - 1)^2"))])
        .unwrap();
    assert_eq!(ours, printed);
}
