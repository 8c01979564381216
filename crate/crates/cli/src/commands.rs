use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use painleve::algebra::{parse, sym, Assignment, Symbol, RF};
use painleve::geometry::{
    accessible_points, alpha_reduce, divisor_pole_order, expansion_matrices, local_index, select_point, solve_reduced,
    AccessiblePoint, Atlas, Matrix2,
};
use painleve::numerics::{
    integrate, pole_estimate, verify_branch_numeric, verify_map_numeric, IntegratorConfig, NumericField, PathSegment,
};
use painleve::series::{map_series, LaurentSeries, PainleveBranch};
use painleve::systems::{check_holomorphy, check_symmetry, pushforward, BirationalMap, Catalog, Holomorphy, PlaneSystem, TimeAction};

use crate::report::Report;
use crate::{Cli, Command, Tolerances};

struct Ctx<'a> {
    cli: &'a Cli,
    catalog: Catalog,
    pool: rayon::ThreadPool,
}

pub fn run(cli: &Cli) -> Result<Report> {
    let mut catalog = Catalog::builtin();
    if let Some(path) = &cli.catalog {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        catalog.extend_from(&text)?;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build()?;
    let ctx = Ctx { cli, catalog, pool };
    match &cli.command {
        Command::Catalog(a) => ctx.catalog(a.name.as_deref()),
        Command::PainleveTest(a) => ctx.painleve_test(&a.ode, a.depth),
        Command::Singularities(a) => ctx.singularities(&a.system),
        Command::LocalIndex(a) => ctx.local_index(&a.system, a.point.as_deref(), a.expansion),
        Command::AlphaTest(a) => ctx.alpha_test(&a.system, a.point.as_deref()),
        Command::Transform(a) => match (&a.system, &a.ode) {
            (Some(s), _) => ctx.transform_system(s, &a.maps, a.expect.as_deref()),
            (None, Some(o)) => ctx.transform_series(o, &a.maps, a.depth, a.radical_sign),
            (None, None) => bail!("one of --system and --ode is required"),
        },
        Command::VerifySymmetry(a) => ctx.verify_symmetry(&a.system, &a.maps, a.fifth_roots, a.involution),
        Command::Holomorphy(a) => ctx.holomorphy(&a.system, &a.map, &a.shift),
        Command::PoleOrder(a) => ctx.pole_order(&a.system, a.divisor.as_deref()),
        Command::Integrate(a) => ctx.integrate(a),
        Command::VerifyBranch(a) => ctx.verify_branch(a),
    }
}

fn s(f: &RF) -> Value {
    Value::String(f.to_string())
}

fn matrix_json(m: &Matrix2) -> Value {
    json!([[s(&m[0][0]), s(&m[0][1])], [s(&m[1][0]), s(&m[1][1])]])
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn series_json(x: &LaurentSeries) -> Value {
    serde_json::to_value(x.to_json()).expect("series serialize")
}

fn system_json(sys: &PlaneSystem) -> Value {
    json!({
        "name": sys.name,
        "vars": [sys.vars[0].name(), sys.vars[1].name()],
        "time": sys.time.name(),
        "rhs": [s(&sys.rhs[0]), s(&sys.rhs[1])],
        "hamiltonian": sys.hamiltonian.as_ref().map(s),
    })
}

fn map_json(m: &BirationalMap) -> Value {
    json!({
        "name": m.name,
        "source": [m.source[0].name(), m.source[1].name()],
        "target": [m.target[0].name(), m.target[1].name()],
        "forward": m.forward.as_ref().map(|f| [s(&f[0]), s(&f[1])]),
        "backward": m.backward.as_ref().map(|f| [s(&f[0]), s(&f[1])]),
        "time": m.time.as_ref().map(|a| s(&a.as_expr(Symbol::time()))),
    })
}

fn point_json(p: &AccessiblePoint) -> Value {
    let c = p.coordinates();
    json!({
        "name": p.name,
        "chart": p.chart.id,
        "divisor": p.divisor,
        "divisor_var": p.divisor_var.name(),
        "transverse_var": p.transverse_var.name(),
        "location": s(&p.location),
        "coordinates": [s(&c[0]), s(&c[1])],
        "multiplicity": p.multiplicity_hint,
    })
}

fn point_line(p: &AccessiblePoint) -> String {
    let c = p.coordinates();
    format!(
        "{}: ({}, {}) = ({}, {}) on {}, multiplicity {}",
        p.name, p.chart.vars[0], p.chart.vars[1], c[0], c[1], p.divisor, p.multiplicity_hint
    )
}

fn matrix_text(m: &Matrix2) -> String {
    format!("[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim().replace(' ', "");
    t.parse::<Complex64>()
        .or_else(|_| t.replace('j', "i").parse::<Complex64>())
        .map_err(|_| anyhow!("`{text}` is not a number"))
}

fn parse_params(list: &[String]) -> Result<Assignment> {
    let mut asg = Assignment::new();
    for item in list {
        let (name, value) = item.split_once('=').ok_or_else(|| anyhow!("expected name=value, got `{item}`"))?;
        asg.insert(sym(name.trim()), parse_complex(value)?);
    }
    Ok(asg)
}

fn config(t: &Tolerances) -> Result<IntegratorConfig> {
    let cfg = IntegratorConfig {
        rtol: t.rtol,
        atol: t.atol,
        min_step: t.min_step,
        max_steps: t.max_steps,
        ..IntegratorConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `map` with the parameters in `sub` replaced.
fn specialize(m: &BirationalMap, sub: &[(Symbol, RF)]) -> Result<BirationalMap> {
    let spec = |f: &Option<[RF; 2]>| -> Result<Option<[RF; 2]>> {
        Ok(match f {
            Some([a, b]) => Some([a.substitute(sub)?, b.substitute(sub)?]),
            None => None,
        })
    };
    let t = Symbol::time();
    let mut out = BirationalMap::new(&m.name, m.source, m.target, spec(&m.forward)?, spec(&m.backward)?);
    if let Some(a) = &m.time {
        out = out.with_time(TimeAction::from_expr(&a.as_expr(t).substitute(sub)?, t)?);
    }
    Ok(out.with_params(m.params.clone()))
}

impl Ctx<'_> {
    fn system(&self, name: &str) -> Result<&PlaneSystem> {
        Ok(self.catalog.system(name)?)
    }

    /// Catalog map, or the chart map `ATLAS:CHART`.
    fn map(&self, name: &str) -> Result<BirationalMap> {
        if let Some((atlas, chart)) = name.split_once(':') {
            return Ok(self.load_atlas(Some(atlas))?.chart(chart)?.map());
        }
        Ok(self.catalog.map(name)?.clone())
    }

    fn load_atlas(&self, name: Option<&str>) -> Result<Atlas> {
        match name {
            Some(n) if Atlas::builtin_names().contains(&n) => Ok(Atlas::builtin(n)?),
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading atlas {path}"))?;
                Ok(Atlas::parse(&text)?)
            }
            None => bail!("--atlas is required"),
        }
    }

    /// `--atlas`, else the built-in atlas named after the system, else Sigma4.
    fn atlas_for(&self, system: &str) -> Result<Atlas> {
        if let Some(a) = &self.cli.atlas {
            return self.load_atlas(Some(a));
        }
        if Atlas::builtin_names().contains(&system) {
            return Ok(Atlas::builtin(system)?);
        }
        Ok(Atlas::builtin("Sigma4")?)
    }

    fn points(&self, system: &str, selector: Option<&str>) -> Result<(PlaneSystem, Atlas, Vec<AccessiblePoint>)> {
        let sys = self.system(system)?.clone();
        let atlas = self.atlas_for(system)?;
        let found = accessible_points(&sys, &atlas)?;
        let pts = match selector {
            Some(sel) => vec![select_point(&found.points, sel)?.clone()],
            None => found.points,
        };
        Ok((sys, atlas, pts))
    }

    fn catalog(&self, name: Option<&str>) -> Result<Report> {
        let mut r = Report::new("catalog").input("name", name);
        let cat = &self.catalog;
        if let Some(n) = name {
            if let Ok(sys) = cat.system(n) {
                r.line(sys.to_string());
                if let Some(h) = &sys.hamiltonian {
                    r.line(format!("H = {h}"));
                }
                r.results = json!({ "system": system_json(sys) });
            } else if let Ok(m) = cat.map(n) {
                r.line(painleve::systems::map_record(m));
                r.results = json!({ "map": map_json(m) });
            } else {
                let o = cat.ode(n)?;
                r.line(format!("{} = 0", o.poly));
                r.results = json!({ "ode": { "name": o.name, "equation": o.poly.to_string(), "free_names": o.free_names } });
            }
            return Ok(r);
        }
        r.line(cat.to_text().trim_end());
        r.line(format!("atlases: {}", Atlas::builtin_names().join(", ")));
        r.results = json!({
            "systems": cat.systems().map(system_json).collect::<Vec<_>>(),
            "maps": cat.maps().map(map_json).collect::<Vec<_>>(),
            "odes": cat.odes().map(|o| json!({ "name": o.name, "equation": o.poly.to_string(), "free_names": o.free_names })).collect::<Vec<_>>(),
            "atlases": Atlas::builtin_names(),
        });
        Ok(r)
    }

    fn painleve_test(&self, odes: &[String], depth: usize) -> Result<Report> {
        let mut r = Report::new("painleve-test").input("ode", odes.to_vec()).input("depth", depth);
        let results: Vec<Result<Vec<PainleveBranch>>> = self.pool.install(|| {
            odes.par_iter()
                .map(|name| Ok(self.catalog.ode(name)?.painleve_test(depth)?))
                .collect()
        });
        let mut out = Vec::new();
        for (name, branches) in odes.iter().zip(results) {
            let branches = branches?;
            r.line(format!("{name}: {} branch(es)", branches.len()));
            let mut js = Vec::new();
            for (i, b) in branches.iter().enumerate() {
                r.verdict(b.compatible());
                let free: Vec<String> = b.free_symbols.iter().map(|(k, s)| format!("{s} at tau^{k}")).collect();
                r.line(format!("  branch {}: q ~ {} tau^{}", i + 1, b.leading_coefficient, b.leading_exponent));
                r.line(format!("    resonances: {:?}", b.resonances));
                if !b.other_roots.is_empty() {
                    r.line(format!("    other indicial roots: {}", b.other_roots.join(", ")));
                }
                r.line(format!("    free: {}", if free.is_empty() { "none".into() } else { free.join(", ") }));
                r.line(format!("    compatible: {}", b.compatible()));
                r.line(format!("    q = {}", b.series));
                js.push(serde_json::to_value(b.to_json())?);
            }
            out.push(json!({ "ode": name, "branches": js }));
        }
        r.results = Value::Array(out);
        Ok(r)
    }

    fn singularities(&self, system: &str) -> Result<Report> {
        let sys = self.system(system)?;
        let atlas = self.atlas_for(system)?;
        let mut r = Report::new("singularities").input("system", system).input("atlas", atlas.name.clone());
        let found = accessible_points(sys, &atlas)?;
        r.line(format!("{} accessible point(s) of {system} on {}", found.points.len(), atlas.name));
        for p in &found.points {
            r.line(point_line(p));
        }
        for u in &found.unresolved {
            r.line(format!("unresolved: {u}"));
        }
        r.verdict(found.unresolved.is_empty());
        r.results = json!({
            "points": found.points.iter().map(point_json).collect::<Vec<_>>(),
            "unresolved": found.unresolved,
        });
        Ok(r)
    }

    fn local_index(&self, system: &str, point: Option<&str>, expansion: Option<usize>) -> Result<Report> {
        let (sys, atlas, pts) = self.points(system, point)?;
        let mut r = Report::new("local-index")
            .input("system", system)
            .input("atlas", atlas.name.clone())
            .input("point", point)
            .input("expansion", expansion);
        let rows: Vec<Result<Value>> = self.pool.install(|| {
            pts.par_iter()
                .map(|p| -> Result<Value> {
                    let mut v = json!({ "point": p.name, "multiplicity": p.multiplicity_hint });
                    match local_index(&sys, p) {
                        Ok(li) => {
                            v["a11"] = s(&li.a11);
                            v["a12"] = s(&li.a12);
                            v["a21"] = s(&li.a21);
                            v["a22"] = s(&li.a22);
                            v["matrix"] = matrix_json(&li.matrix());
                            v["resonance_ratio"] = s(&li.resonance_ratio);
                            v["integer"] = json!(li.integer_verdict);
                        }
                        Err(painleve::Error::Degenerate(why)) => v["degenerate"] = json!(why),
                        Err(e) => return Err(e.into()),
                    }
                    if let Some(n) = expansion {
                        let ms = expansion_matrices(&sys, p, n)?;
                        v["expansion"] = Value::Array(ms.iter().map(matrix_json).collect());
                    }
                    Ok(v)
                })
                .collect()
        });
        let mut out = Vec::new();
        for (p, row) in pts.iter().zip(rows) {
            let row = row?;
            r.line(point_line(p));
            match row.get("integer") {
                Some(ok) => {
                    let ok = ok.as_bool().unwrap_or(false);
                    r.verdict(ok);
                    r.line(format!(
                        "  (a11, a22) = ({}, {}), a21 = {}, ratio a22/a11 = {}, integer: {ok}",
                        row["a11"].as_str().unwrap_or(""),
                        row["a22"].as_str().unwrap_or(""),
                        row["a21"].as_str().unwrap_or(""),
                        row["resonance_ratio"].as_str().unwrap_or("")
                    ));
                }
                None => r.line(format!("  degenerate: {}", row["degenerate"].as_str().unwrap_or(""))),
            }
            if let Some(n) = expansion {
                for (k, m) in expansion_matrices(&sys, p, n)?.iter().enumerate() {
                    r.line(format!("  M{} = {}", k + 1, matrix_text(m)));
                }
            }
            out.push(row);
        }
        r.results = Value::Array(out);
        Ok(r)
    }

    fn alpha_test(&self, system: &str, point: Option<&str>) -> Result<Report> {
        let (sys, atlas, pts) = self.points(system, point)?;
        let mut r = Report::new("alpha-test")
            .input("system", system)
            .input("atlas", atlas.name.clone())
            .input("point", point);
        let reports: Vec<Result<_>> = self.pool.install(|| {
            pts.par_iter()
                .map(|p| -> Result<_> {
                    let red = match alpha_reduce(&sys, p) {
                        Ok(red) => red,
                        Err(painleve::Error::Degenerate(why)) => return Ok(Err(why)),
                        Err(e) => return Err(e.into()),
                    };
                    let rep = solve_reduced(&red)?;
                    let residual_zero = rep.residual()?.map(|res| res.iter().all(RF::is_zero));
                    Ok(Ok((rep, residual_zero)))
                })
                .collect()
        });
        let mut out = Vec::new();
        for (p, rep) in pts.iter().zip(reports) {
            let (rep, residual_zero) = match rep? {
                Ok(x) => x,
                Err(why) => {
                    r.line(format!("{}: degenerate: {why}", p.name));
                    out.push(json!({ "point": p.name, "degenerate": why }));
                    continue;
                }
            };
            let ok = rep.single_valued && residual_zero != Some(false);
            r.verdict(ok);
            r.line(format!("{}:", p.name));
            for l in rep.reduced.to_string().lines() {
                r.line(format!("  {l}"));
            }
            r.line(format!("  exponent a22/a11 = {}", rep.exponent));
            for l in rep.printed.lines() {
                r.line(format!("  {l}"));
            }
            r.line(format!("  single-valued: {}", rep.single_valued));
            out.push(json!({
                "point": p.name,
                "reduced": {
                    "divisor": rep.reduced.divisor.name(),
                    "transverse": rep.reduced.transverse.name(),
                    "a11": s(&rep.reduced.a11),
                    "a21": s(&rep.reduced.a21),
                    "a22": s(&rep.reduced.a22),
                },
                "exponent": s(&rep.exponent),
                "particular": s(&rep.particular),
                "logarithmic": rep.logarithmic,
                "divisor_solution": s(&rep.divisor_solution),
                "transverse_solution": rep.transverse_solution.as_ref().map(s),
                "residual_zero": residual_zero,
                "single_valued": rep.single_valued,
            }));
        }
        r.results = Value::Array(out);
        Ok(r)
    }

    fn transform_system(&self, system: &str, maps: &[String], expect: Option<&str>) -> Result<Report> {
        let mut r = Report::new("transform")
            .input("system", system)
            .input("map", maps.to_vec())
            .input("expect", expect);
        let mut sys = self.system(system)?.clone();
        let mut steps = Vec::new();
        for name in maps {
            let m = self.map(name)?;
            sys = pushforward(&sys, &m)?;
            let det = m.jacobian_determinant()?;
            r.line(format!("through {}: jacobian {det}", m.name));
            steps.push(json!({ "map": name, "jacobian": s(&det), "two_form_factor": m.two_form_factor().ok().map(|f| s(&f)) }));
        }
        r.line(sys.to_string());
        let mut res = json!({ "steps": steps, "system": system_json(&sys) });
        if let Some(e) = expect {
            let want = self.system(e)?;
            let same = sys.same_field(want) || sys.rhs == want.rhs;
            r.verdict(same);
            r.line(format!("equals {e}: {same}"));
            res["equals_expected"] = json!(same);
        }
        r.results = res;
        Ok(r)
    }

    fn transform_series(&self, ode: &str, maps: &[String], depth: usize, sign: i32) -> Result<Report> {
        let mut r = Report::new("transform")
            .input("ode", ode)
            .input("map", maps.to_vec())
            .input("depth", depth)
            .input("radical_sign", sign);
        let branches = self.catalog.ode(ode)?.painleve_test(depth)?;
        let t0 = RF::symbol(sym("t0"));
        let mut out = Vec::new();
        for (i, b) in branches.iter().enumerate() {
            let mut pair = [b.series.clone(), b.series.derivative()];
            let mut stages = Vec::new();
            r.line(format!("branch {}:", i + 1));
            for name in maps {
                let m = self.map(name)?;
                let signs: Vec<(Symbol, i32)> = m
                    .forward_components()?
                    .iter()
                    .flat_map(|f| f.symbols())
                    .filter(|s| s.is_radical())
                    .map(|s| (s, sign))
                    .collect();
                pair = map_series(&m, &pair, &t0, &signs)?;
                r.line(format!("  {} = {}", m.target[0], pair[0]));
                r.line(format!("  {} = {}", m.target[1], pair[1]));
                stages.push(json!({
                    "map": name,
                    "vars": [m.target[0].name(), m.target[1].name()],
                    "series": [series_json(&pair[0]), series_json(&pair[1])],
                }));
            }
            out.push(json!({ "branch": i + 1, "stages": stages }));
        }
        r.results = Value::Array(out);
        Ok(r)
    }

    fn verify_symmetry(&self, system: &str, maps: &[String], roots: bool, involution: bool) -> Result<Report> {
        let mut r = Report::new("verify-symmetry")
            .input("system", system)
            .input("map", maps.to_vec())
            .input("fifth_roots", roots)
            .input("involution", involution);
        let sys = self.system(system)?;
        let mut jobs: Vec<(String, Option<String>, BirationalMap)> = Vec::new();
        let a = Symbol::fifth_root();
        for name in maps {
            let m = self.map(name)?;
            let uses_a = [&m.forward, &m.backward].iter().any(|f| f.as_ref().is_some_and(|f| f.iter().any(|x| x.contains(a))));
            if roots && uses_a {
                for value in ["-1", "a", "a^3", "-a^2", "-a^4"] {
                    jobs.push((name.clone(), Some(value.into()), specialize(&m, &[(a, parse(value)?)])?));
                }
            } else {
                jobs.push((name.clone(), None, m));
            }
        }
        let verdicts: Vec<Result<(bool, Option<bool>)>> = self.pool.install(|| {
            jobs.par_iter()
                .map(|(_, _, m)| {
                    let sym_ok = check_symmetry(sys, m)?;
                    let inv = if involution { Some(m.then(m)?.is_identity()?) } else { None };
                    Ok((sym_ok, inv))
                })
                .collect()
        });
        let mut out = Vec::new();
        for ((name, value, _), v) in jobs.iter().zip(verdicts) {
            let (ok, inv) = v?;
            r.verdict(ok && inv != Some(false));
            let at = value.as_ref().map(|v| format!(" at a = {v}")).unwrap_or_default();
            let inv_text = inv.map(|i| format!(", involution: {i}")).unwrap_or_default();
            r.line(format!("{name}{at}: symmetry: {ok}{inv_text}"));
            out.push(json!({ "map": name, "a": value, "symmetry": ok, "involution": inv }));
        }
        r.results = Value::Array(out);
        Ok(r)
    }

    fn holomorphy(&self, system: &str, map: &str, shift: &str) -> Result<Report> {
        let mut r = Report::new("holomorphy").input("system", system).input("map", map).input("shift", shift);
        let h = check_holomorphy(self.system(system)?, &self.map(map)?, &parse(shift)?)?;
        r.verdict(h.is_polynomial());
        r.results = match &h {
            Holomorphy::Polynomial(p) => {
                r.line(format!("polynomial: {p}"));
                json!({ "polynomial": true, "hamiltonian": s(p) })
            }
            Holomorphy::Failure { transformed, offending } => {
                r.line(format!("not polynomial: {transformed}"));
                let bad: Vec<String> = offending.iter().map(|p| p.to_string()).collect();
                r.line(format!("denominator factors: {}", bad.join(", ")));
                json!({ "polynomial": false, "hamiltonian": s(transformed), "offending": bad })
            }
        };
        Ok(r)
    }

    fn pole_order(&self, system: &str, divisor: Option<&str>) -> Result<Report> {
        let sys = self.system(system)?;
        let atlas = self.atlas_for(system)?;
        let mut r = Report::new("pole-order")
            .input("system", system)
            .input("atlas", atlas.name.clone())
            .input("divisor", divisor);
        let divisors = match divisor {
            Some(d) => vec![atlas.divisor(d)?.clone()],
            None => atlas.divisors.clone(),
        };
        let mut out = Vec::new();
        for d in &divisors {
            let n = divisor_pole_order(sys, &atlas, d)?;
            r.line(format!("{}: pole order {n}", d.name));
            out.push(json!({ "divisor": d.name, "pole_order": n, "self_intersection": d.self_intersection }));
        }
        r.results = Value::Array(out);
        Ok(r)
    }

    fn integrate(&self, a: &crate::IntegrateArgs) -> Result<Report> {
        let mut r = Report::new("integrate")
            .input("system", a.system.clone())
            .input("init", a.init.clone())
            .input("path", a.path.clone())
            .input("pieces", a.pieces)
            .input("params", a.tol.params.clone())
            .input("rtol", a.tol.rtol)
            .input("atol", a.tol.atol);
        let cfg = config(&a.tol)?;
        let asg = parse_params(&a.tol.params)?;
        let init: Vec<Complex64> = a.init.split(',').map(parse_complex).collect::<Result<_>>()?;
        let [x0, y0] = init[..] else { bail!("--init needs two values") };
        let way: Vec<Complex64> = a.path.split(',').map(parse_complex).collect::<Result<_>>()?;
        if way.len() < 2 {
            bail!("--path needs at least two waypoints");
        }
        let path: Vec<PathSegment> = way
            .windows(2)
            .flat_map(|w| PathSegment::new(w[0], w[1]).split(a.pieces.max(1)))
            .collect();
        let sys = self.system(&a.system)?;
        if let (Some(m), Some(target)) = (&a.map, &a.target) {
            let dev = verify_map_numeric(sys, self.system(target)?, &self.map(m)?, [x0, y0], &path, 1, &asg, &cfg)?;
            let ok = dev < a.tolerance;
            r.verdict(ok);
            r.line(format!("{m}: {} -> {target}, max deviation {dev:.3e} (tolerance {:.0e}): {ok}", a.system, a.tolerance));
            r.inputs.insert("map".into(), json!(m));
            r.inputs.insert("target".into(), json!(target));
            r.results = json!({ "max_deviation": dev, "tolerance": a.tolerance, "passed": ok });
            return Ok(r);
        }
        let tr = integrate(sys, &asg, [x0, y0], &path, &cfg)?;
        if let Some(p) = &a.csv {
            fs::write(p, tr.to_csv()).with_context(|| format!("writing {}", p.display()))?;
        }
        let last = tr.last();
        r.verdict(tr.completed());
        r.line(format!("steps: {} accepted, {} rejected", tr.samples.len() - 1, tr.rejected));
        for &i in &tr.checkpoints {
            let smp = &tr.samples[i];
            r.line(format!("t = {}: ({}, {})", smp.t, smp.state[0], smp.state[1]));
        }
        let mut res = json!({
            "completed": tr.completed(),
            "accepted_steps": tr.samples.len() - 1,
            "rejected_steps": tr.rejected,
            "final_t": complex_json(last.t),
            "final_state": [complex_json(last.state[0]), complex_json(last.state[1])],
            "checkpoints": tr.checkpoints.iter().map(|&i| {
                let smp = &tr.samples[i];
                json!({ "t": complex_json(smp.t), "state": [complex_json(smp.state[0]), complex_json(smp.state[1])] })
            }).collect::<Vec<_>>(),
        });
        if let Some(d) = &tr.diagnostic {
            r.line(format!("stopped at t = {}: {d}", last.t));
            res["diagnostic"] = json!(d);
            let field = NumericField::new(sys, &asg)?;
            if let Some(est) = pole_estimate(&field, &tr) {
                r.line(format!("pole estimate: {est}"));
                res["pole_estimate"] = complex_json(est);
            }
        }
        r.results = res;
        Ok(r)
    }

    fn verify_branch(&self, a: &crate::VerifyBranchArgs) -> Result<Report> {
        let mut r = Report::new("verify-branch")
            .input("ode", a.ode.clone())
            .input("t0", a.t0.clone())
            .input("near", a.near)
            .input("far", a.far)
            .input("checkpoints", a.checkpoints)
            .input("params", a.tol.params.clone())
            .input("tolerance", a.tolerance);
        let cfg = config(&a.tol)?;
        let ode = self.catalog.ode(&a.ode)?;
        let t0 = parse_complex(&a.t0)?;
        let branches = ode.painleve_test(a.depth)?;
        let given = parse_params(&a.tol.params)?;
        let checks: Vec<Result<(f64, Vec<String>)>> = self.pool.install(|| {
            branches
                .par_iter()
                .map(|b| {
                    // Free coefficients not given on the command line are set to zero.
                    let mut asg = given.clone();
                    let mut zeroed = Vec::new();
                    for (_, s) in &b.free_symbols {
                        if !asg.contains_key(s) {
                            asg.insert(*s, Complex64::default());
                            zeroed.push(s.name().to_owned());
                        }
                    }
                    let chk = verify_branch_numeric(ode, b, t0, &asg, a.near, a.far, a.checkpoints, &cfg)?;
                    Ok((chk.max_deviation, zeroed))
                })
                .collect()
        });
        let mut out = Vec::new();
        for (i, (b, c)) in branches.iter().zip(checks).enumerate() {
            let (dev, zeroed) = c?;
            let ok = dev < a.tolerance;
            r.verdict(ok);
            r.line(format!(
                "branch {} (q ~ {} tau^{}): max deviation {dev:.3e} (tolerance {:.0e}): {ok}",
                i + 1,
                b.leading_coefficient,
                b.leading_exponent,
                a.tolerance
            ));
            out.push(json!({
                "branch": i + 1,
                "leading_coefficient": s(&b.leading_coefficient),
                "max_deviation": dev,
                "zeroed_free_symbols": zeroed,
                "passed": ok,
            }));
        }
        r.results = Value::Array(out);
        Ok(r)
    }
}
