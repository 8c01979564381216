//! Named systems, maps and scalar equations, stored in a line-oriented text format.
//!
//! ```text
//! param <name>[, <name>...]
//! system <name> vars(<a>,<b>) time(t) H = <expr> [where <sym> = <expr>]
//! system <name> vars(<a>,<b>) time(t) rhs = <expr>, <expr> [where <sym> = <expr>]
//! map <name> (<a>,<b>) -> (<c>,<d>) [: <expr>, <expr>] [inverse: <expr>, <expr>] [time: <expr>]
//! ode <name> = <polynomial in t, q0, q1, q2> [free <name>, ...]
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::map::{BirationalMap, TimeAction};
use super::system::PlaneSystem;
use crate::algebra::{parse, Symbol, RF};
use crate::series::ScalarODE;
use crate::error::{Error, Result};

const BUILTIN: &str = "\
system HI vars(x,y) time(t) H = 1/2*y^2 - 2*x^3 - t*x
system K vars(v,u) time(t) H = -1/4*v^6*u^2 + 1/4*v^5*u + 1/4*t*v^4*u - 1/8*t*v^3 - 1/16*v^4 - 1/16*t^2*v^2 + u
system qsys vars(q,p) time(t) rhs = p, 3*p^2/q - t*q^3/2 - 3/q
system Qsys vars(Q,P) time(t) rhs = P, -P^2/Q + 3*Q^3 + t/(2*Q)
system PVI vars(x,y) time(t) H = (y^2*(x - t)*(x - 1)*x - ((alpha0 - 1)*(x - 1)*x + alpha3*(x - t)*x + alpha4*(x - t)*(x - 1))*y + alpha2*(alpha1 + alpha2)*x)/(t*(t - 1)) where alpha0 = 1 - alpha1 - 2*alpha2 - alpha3 - alpha4
map eq5 (x,y) -> (v,u) : sqrt(x)/x, x*y*sqrt(x) + 2*x^3 + t*x/2 + sqrt(x)/2 inverse: 1/v^2, -2/v^3 - t*v/2 - v^2/2 + u*v^3
map qp (v,u) -> (q,p) : v, 1 + t*v^4/4 + v^5/4 - v^6*u/2
map Qinv (q,p) -> (Q,P) : 1/q, -p/q^2
map r3 (v,u) -> (x3,y3) : v, u - t/v^2 - 4/v^6
map r (v,u) -> (X,Y) : v, u - t/v^2 - 4/v^6
map R (x,y) -> (X,Y) inverse: 1/X^2, (4 + t*X^4 - X^5 + 2*X^6*Y)/(2*X^3)
map s0 (v,u) -> (v,u) : -a*v, a^4*u time: -a*t
map s1 (v,u) -> (v,u) : a*v, -a^4*(u - t/v^2 - 4/v^6) time: -a*t
map s1_neg1 (v,u) -> (v,u) : -v, -u + t/v^2 + 4/v^6
map pi (z1,w1) -> (z1,w1) : -z1, 4*z1^2 - w1
map X1Y1 (v,u) -> (X1,Y1) : v, u*v^6 - 4
map X2Y2 (v,u) -> (X2,Y2) : v, u - t/v^2 - 4/v^6
map blowup_P3 (v,u) -> (X,Y) : v, u*v^6 inverse: X, Y/X^6
ode PI = q2 - 6*q0^2 - t free h
ode q = q0*q2 - 3*q1^2 + 1/2*t*q0^4 + 3
ode Q = q0*q2 + q1^2 - 3*q0^4 - 1/2*t free b5, a5
";

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    systems: BTreeMap<String, PlaneSystem>,
    maps: BTreeMap<String, BirationalMap>,
    odes: BTreeMap<String, ScalarODE>,
}

impl Catalog {
    /// Every system, map and equation used by the analyses.
    pub fn builtin() -> Catalog {
        Catalog::parse(BUILTIN).expect("builtin catalog parses")
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let mut cat = Catalog::default();
        cat.extend_from(text)?;
        Ok(cat)
    }

    /// Adds (or replaces) the records in `text`.
    pub fn extend_from(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let rec = Record { line: i + 1, text: raw };
            let (kw, rest) = split_word(line);
            match kw {
                "param" => {
                    for name in rest.split(',') {
                        Symbol::parameter(name.trim());
                    }
                }
                "system" => {
                    let s = rec.system(rest)?;
                    self.systems.insert(s.name.clone(), s);
                }
                "map" => {
                    let m = rec.map(rest)?;
                    self.maps.insert(m.name.clone(), m);
                }
                "ode" => {
                    let (name, body) = split_word(rest);
                    let body = body
                        .strip_prefix('=')
                        .ok_or_else(|| rec.error(body, "expected `=`"))?;
                    for q in ["q0", "q1", "q2"] {
                        Symbol::coordinate(q);
                    }
                    let (body, free) = match body.find(" free ") {
                        Some(i) => (&body[..i], Some(&body[i + 6..])),
                        None => (body, None),
                    };
                    let p = rec.expr(body)?.as_polynomial().ok_or_else(|| {
                        rec.error(body, "equation must be polynomial")
                    })?;
                    let mut ode = ScalarODE::new(name, p).map_err(|e| rec.error(body, &e.to_string()))?;
                    if let Some(f) = free {
                        let names: Vec<&str> = f.split(',').map(str::trim).collect();
                        for n in &names {
                            Symbol::parameter(n);
                        }
                        ode = ode.with_free_names(&names);
                    }
                    self.odes.insert(name.to_owned(), ode);
                }
                _ => return Err(rec.error(line, &format!("unknown record `{kw}`"))),
            }
        }
        Ok(())
    }

    pub fn system(&self, name: &str) -> Result<&PlaneSystem> {
        self.systems
            .get(name)
            .ok_or_else(|| Error::NotFound(format!("system `{name}`")))
    }

    pub fn map(&self, name: &str) -> Result<&BirationalMap> {
        self.maps
            .get(name)
            .ok_or_else(|| Error::NotFound(format!("map `{name}`")))
    }

    pub fn ode(&self, name: &str) -> Result<&ScalarODE> {
        self.odes
            .get(name)
            .ok_or_else(|| Error::NotFound(format!("equation `{name}`")))
    }

    pub fn systems(&self) -> impl Iterator<Item = &PlaneSystem> {
        self.systems.values()
    }

    pub fn maps(&self) -> impl Iterator<Item = &BirationalMap> {
        self.maps.values()
    }

    pub fn odes(&self) -> impl Iterator<Item = &ScalarODE> {
        self.odes.values()
    }

    pub fn insert_system(&mut self, s: PlaneSystem) {
        self.systems.insert(s.name.clone(), s);
    }

    pub fn insert_map(&mut self, m: BirationalMap) {
        self.maps.insert(m.name.clone(), m);
    }

    /// The catalog in its own text format; reparsing gives equal records.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in self.systems.values() {
            out.push_str(&system_record(s));
            out.push('\n');
        }
        for m in self.maps.values() {
            out.push_str(&map_record(m));
            out.push('\n');
        }
        for ode in self.odes.values() {
            let _ = write!(out, "ode {} = {}", ode.name, ode.poly);
            if !ode.free_names.is_empty() {
                let _ = write!(out, " free {}", ode.free_names.join(", "));
            }
            out.push('\n');
        }
        out
    }
}

pub fn system_record(s: &PlaneSystem) -> String {
    let mut out = format!(
        "system {} vars({},{}) time({}) ",
        s.name, s.vars[0], s.vars[1], s.time
    );
    match &s.hamiltonian {
        Some(h) => {
            let _ = write!(out, "H = {h}");
        }
        None => {
            let _ = write!(out, "rhs = {}, {}", s.rhs[0], s.rhs[1]);
        }
    }
    for (sym, v) in &s.relations {
        let _ = write!(out, " where {sym} = {v}");
    }
    out
}

pub fn map_record(m: &BirationalMap) -> String {
    let mut out = format!(
        "map {} ({},{}) -> ({},{})",
        m.name, m.source[0], m.source[1], m.target[0], m.target[1]
    );
    if let Some(f) = &m.forward {
        let _ = write!(out, " : {}, {}", f[0], f[1]);
    }
    if let Some(b) = &m.backward {
        let _ = write!(out, " inverse: {}, {}", b[0], b[1]);
    }
    if let Some(ta) = &m.time {
        let _ = write!(out, " time: {}", ta.as_expr(Symbol::time()));
    }
    out
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(|c: char| c.is_whitespace()) {
        Some(i) => (&s[..i], s[i..].trim_start()),
        None => (s, ""),
    }
}

/// Splits at top-level commas.
fn split_commas(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

struct Record<'a> {
    line: usize,
    text: &'a str,
}

impl Record<'_> {
    fn column_of(&self, part: &str) -> usize {
        let base = self.text.as_ptr() as usize;
        let p = part.as_ptr() as usize;
        if p >= base && p <= base + self.text.len() {
            self.text[..p - base].chars().count() + 1
        } else {
            1
        }
    }

    fn error(&self, part: &str, message: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column_of(part),
            message: message.to_owned(),
        }
    }

    fn expr(&self, part: &str) -> Result<RF> {
        parse(part).map_err(|e| match e {
            Error::Syntax { column, message, .. } => Error::Syntax {
                line: self.line,
                column: self.column_of(part) + column - 1,
                message,
            },
            other => other,
        })
    }

    fn pair(&self, part: &str) -> Result<[RF; 2]> {
        let items = split_commas(part);
        if items.len() != 2 {
            return Err(self.error(part, "expected two comma-separated expressions"));
        }
        Ok([self.expr(items[0])?, self.expr(items[1])?])
    }

    /// Parses `(<a>,<b>)` at the front of `s`, declaring both names as coordinates.
    fn vars<'s>(&self, s: &'s str) -> Result<([Symbol; 2], &'s str)> {
        let s = s.trim_start();
        let body = s
            .strip_prefix('(')
            .ok_or_else(|| self.error(s, "expected `(`"))?;
        let close = body.find(')').ok_or_else(|| self.error(s, "expected `)`"))?;
        let names: Vec<&str> = body[..close].split(',').map(str::trim).collect();
        if names.len() != 2 || names.iter().any(|n| !is_ident(n)) {
            return Err(self.error(s, "expected two variable names"));
        }
        let v = [Symbol::coordinate(names[0]), Symbol::coordinate(names[1])];
        Ok((v, &body[close + 1..]))
    }

    fn system(&self, rest: &str) -> Result<PlaneSystem> {
        let (name, rest) = split_word(rest);
        let rest = rest
            .strip_prefix("vars")
            .ok_or_else(|| self.error(rest, "expected `vars(..)`"))?;
        let (vars, rest) = self.vars(rest)?;
        let rest = rest.trim_start();
        let rest = rest
            .strip_prefix("time(")
            .ok_or_else(|| self.error(rest, "expected `time(..)`"))?;
        let close = rest.find(')').ok_or_else(|| self.error(rest, "expected `)`"))?;
        let time = Symbol::lookup(rest[..close].trim())
            .filter(|s| s.kind() == crate::algebra::SymbolKind::Time)
            .ok_or_else(|| self.error(rest, "unknown time symbol"))?;
        let rest = rest[close + 1..].trim_start();
        let (body, relation) = match rest.find(" where ") {
            Some(i) => (&rest[..i], Some(&rest[i + 7..])),
            None => (rest, None),
        };
        let mut sys = if let Some(h) = body.strip_prefix("H") {
            let h = h
                .trim_start()
                .strip_prefix('=')
                .ok_or_else(|| self.error(h, "expected `=`"))?;
            PlaneSystem::from_hamiltonian(name, self.expr(h)?, vars, time)
        } else if let Some(r) = body.strip_prefix("rhs") {
            let r = r
                .trim_start()
                .strip_prefix('=')
                .ok_or_else(|| self.error(r, "expected `=`"))?;
            PlaneSystem::new(name, vars, time, self.pair(r)?)
        } else {
            return Err(self.error(body, "expected `H =` or `rhs =`"));
        };
        if let Some(rel) = relation {
            for clause in rel.split(" where ") {
                let (lhs, rhs) = clause
                    .split_once('=')
                    .ok_or_else(|| self.error(clause, "expected `<symbol> = <expr>`"))?;
                let s = Symbol::lookup(lhs.trim())
                    .ok_or_else(|| Error::UnknownSymbol(lhs.trim().to_owned()))?;
                sys = sys.with_relation(s, self.expr(rhs)?);
            }
        }
        Ok(sys)
    }

    fn map(&self, rest: &str) -> Result<BirationalMap> {
        let (name, rest) = split_word(rest);
        let (source, rest) = self.vars(rest)?;
        let rest = rest.trim_start();
        let rest = rest
            .strip_prefix("->")
            .ok_or_else(|| self.error(rest, "expected `->`"))?;
        let (target, rest) = self.vars(rest)?;
        let rest = rest.trim_start();
        let (rest, time) = match rest.find("time:") {
            Some(i) => (&rest[..i], Some(&rest[i + 5..])),
            None => (rest, None),
        };
        let (rest, inverse) = match rest.find("inverse:") {
            Some(i) => (&rest[..i], Some(&rest[i + 8..])),
            None => (rest, None),
        };
        let rest = rest.trim();
        let forward = if rest.is_empty() {
            None
        } else {
            let comps = rest
                .strip_prefix(':')
                .ok_or_else(|| self.error(rest, "expected `:`"))?;
            Some(self.pair(comps)?)
        };
        let backward = inverse.map(|b| self.pair(b)).transpose()?;
        if forward.is_none() && backward.is_none() {
            return Err(self.error(rest, "map needs components or an inverse"));
        }
        let mut m = BirationalMap::new(name, source, target, forward, backward);
        if let Some(t) = time {
            m = m.with_time(TimeAction::from_expr(&self.expr(t)?, Symbol::time())?);
        }
        Ok(m)
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_missing() {
        let cat = Catalog::builtin();
        assert!(cat.system("K").is_ok());
        assert!(matches!(cat.system("nope"), Err(Error::NotFound(_))));
        assert!(matches!(cat.map("nope"), Err(Error::NotFound(_))));
    }

    #[test]
    fn text_round_trip() {
        let cat = Catalog::builtin();
        let again = Catalog::parse(&cat.to_text()).unwrap();
        for s in cat.systems() {
            let t = again.system(&s.name).unwrap();
            assert_eq!(s.rhs, t.rhs, "{}", s.name);
            assert_eq!(s.hamiltonian, t.hamiltonian);
            assert_eq!(s.relations, t.relations);
        }
        for m in cat.maps() {
            let n = again.map(&m.name).unwrap();
            assert_eq!(m.forward, n.forward, "{}", m.name);
            assert_eq!(m.backward, n.backward);
            assert_eq!(m.time, n.time);
        }
        for ode in cat.odes() {
            assert_eq!(again.ode(&ode.name).unwrap(), ode);
        }
    }

    #[test]
    fn syntax_error_position() {
        let err = Catalog::parse("\nmap m (x,y) -> (X,Y) : x +, y").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 20, "column {column}");
            }
            e => panic!("{e:?}"),
        }
    }
}
