use painleve::algebra::{parse, sym, RF};
use painleve::systems::{check_holomorphy, check_symmetry, pushforward, Catalog, Holomorphy};

fn p(s: &str) -> RF {
    parse(s).unwrap()
}

#[test]
fn hamiltonian_fields() {
    let cat = Catalog::builtin();
    let hi = cat.system("HI").unwrap();
    assert_eq!(hi.rhs, [p("y"), p("6*x^2 + t")]);
    let k = cat.system("K").unwrap();
    assert_eq!(k.rhs[0], p("1 + t*v^4/4 + v^5/4 - v^6*u/2"));
    for s in cat.systems() {
        assert!(s.hamiltonian_consistent(), "{}", s.name);
    }
}

#[test]
fn covering_map_takes_hi_to_k() {
    let cat = Catalog::builtin();
    let pushed = pushforward(cat.system("HI").unwrap(), cat.map("eq5").unwrap()).unwrap();
    assert_eq!(pushed.rhs, cat.system("K").unwrap().rhs);
    // dx ^ dy = -1/2 ... so dy ^ dx = 2 dv ^ du.
    let det = cat.map("eq5").unwrap().jacobian_determinant().unwrap();
    assert_eq!(det, p("-1/2"));
    assert_eq!(cat.map("eq5").unwrap().two_form_factor().unwrap(), p("-2"));
}

#[test]
fn second_order_forms() {
    let cat = Catalog::builtin();
    let k = cat.system("K").unwrap();
    let q = pushforward(k, cat.map("qp").unwrap()).unwrap();
    assert_eq!(q.rhs, cat.system("qsys").unwrap().rhs);
    let big_q = pushforward(&q, cat.map("Qinv").unwrap()).unwrap();
    assert_eq!(big_q.rhs, cat.system("Qsys").unwrap().rhs);
}

#[test]
fn r3_is_symplectic_and_holomorphic() {
    let cat = Catalog::builtin();
    let r3 = cat.map("r3").unwrap();
    assert_eq!(r3.jacobian_determinant().unwrap(), RF::one());
    let h = check_holomorphy(cat.system("K").unwrap(), r3, &p("-1/v")).unwrap();
    let want = p("-x3^6*y3^2/4 + x3^5*y3/4 - t*x3^4*y3/4 + t*x3^3/8 - x3^4/16 - t^2*x3^2/16 - y3");
    assert_eq!(h, Holomorphy::Polynomial(want));
    let bad = check_holomorphy(cat.system("K").unwrap(), r3, &RF::zero()).unwrap();
    assert!(!bad.is_polynomial());
}

#[test]
fn covering_r_holomorphy() {
    let cat = Catalog::builtin();
    let h = check_holomorphy(cat.system("HI").unwrap(), cat.map("R").unwrap(), &p("1/X")).unwrap();
    assert!(h.is_polynomial(), "{h:?}");
    assert!(h.value().as_polynomial().is_some());
    // The composite of the covering and r has the same holomorphy data.
    let composite = cat.map("eq5").unwrap().then(cat.map("r").unwrap()).unwrap();
    let via = check_holomorphy(cat.system("HI").unwrap(), &composite, &p("1/X")).unwrap();
    assert!(via.is_polynomial());
}

#[test]
fn symmetries_of_k() {
    let cat = Catalog::builtin();
    let k = cat.system("K").unwrap();
    for name in ["s0", "s1", "s1_neg1"] {
        assert!(check_symmetry(k, cat.map(name).unwrap()).unwrap(), "{name}");
    }
    let s = cat.map("s1_neg1").unwrap();
    assert!(s.then(s).unwrap().is_identity().unwrap());
    assert!(!check_symmetry(k, cat.map("r3").unwrap()).unwrap_or(false));
}

#[test]
fn pushforward_round_trip() {
    let cat = Catalog::builtin();
    for (sys, map) in [("HI", "eq5"), ("K", "r3"), ("K", "s0"), ("K", "blowup_P3"), ("qsys", "Qinv")] {
        let s = cat.system(sys).unwrap();
        let m = cat.map(map).unwrap();
        let there = pushforward(s, m).unwrap();
        let back = pushforward(&there, &m.inverse().unwrap()).unwrap();
        assert_eq!(back.rhs, s.rhs, "{sys} via {map}");
        let id = m.then(&m.inverse().unwrap()).unwrap();
        assert_eq!(id.jacobian_determinant().unwrap(), RF::one(), "{map}");
    }
}

#[test]
fn pvi_constraint() {
    let cat = Catalog::builtin();
    let pvi = cat.system("PVI").unwrap();
    assert_eq!(pvi.relations.len(), 1);
    assert_eq!(pvi.relations[0].0, sym("alpha0"));
    let c = pvi.constrained().unwrap();
    assert!(!c.rhs[1].contains(sym("alpha0")));
    assert!(c.hamiltonian_consistent());
}
