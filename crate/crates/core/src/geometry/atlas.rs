//! Chart atlases in a line-oriented text format.
//!
//! ```text
//! atlas <name>
//! chart <id> vars(<a>,<b>) base
//! chart <id> vars(<a>,<b>) to_base: <expr>, <expr> from_base: <expr>, <expr>
//! divisor <name> on <chart>: <local equation> [selfint <n>] [excluding <expr>, ...]
//! ```
//!
//! A divisor may be listed once per chart it meets; the records are merged by name.

use std::fmt::Write as _;

use crate::algebra::{parse, Polynomial, Symbol, RF};
use crate::error::{Error, Result};
use crate::systems::BirationalMap;

const SIGMA4: &str = "\
atlas Sigma4
chart U0 vars(v,u) base
chart U1 vars(z1,w1) to_base: 1/z1, z1^4*w1 + z1/2 + t*z1^2/2 from_base: 1/v, u*v^4 - v^3/2 - t*v^2/2
chart U2 vars(z2,w2) to_base: z2, 1/w2 from_base: v, 1/u
chart U3 vars(z3,w3) to_base: 1/z3, z3^4/w3 + z3/2 + t*z3^2/2 from_base: 1/v, 1/(u*v^4 - v^3/2 - t*v^2/2)
divisor H on U2: w2 selfint 4
divisor H on U3: w3
divisor L on U1: z1 selfint 0
divisor L on U3: z3
";

const P2: &str = "\
atlas P2
chart V0 vars(v,u) base
chart V1 vars(a1,b1) to_base: 1/a1, b1/a1 from_base: 1/v, u/v
chart V2 vars(a2,b2) to_base: a2/b2, 1/b2 from_base: v/u, 1/u
divisor Hinf on V1: a1 selfint 1
divisor Hinf on V2: b2
";

const PVI: &str = "\
atlas PVI
chart U0 vars(x,y) base
chart U1 vars(z1,w1) to_base: 1/z1, -w1*z1^2 - alpha2*z1 from_base: 1/x, -(x*y + alpha2)*x
chart U2 vars(z2,w2) to_base: z2, 1/w2 from_base: x, 1/y
chart U3 vars(z3,w3) to_base: 1/z3, -z3^2/w3 - alpha2*z3 from_base: 1/x, -1/((x*y + alpha2)*x)
divisor D0 on U2: w2 selfint 2
divisor D0 on U3: w3
";

const P3_BLOWUP: &str = "\
atlas P3_blowup
chart B0 vars(v,u) base
chart B1 vars(X,Y) to_base: X, Y/X^6 from_base: v, u*v^6
divisor E on B1: X excluding 0
";

/// An affine chart with its transition to the base chart.
#[derive(Clone, Debug)]
pub struct Chart {
    pub id: String,
    pub vars: [Symbol; 2],
    /// Variables of the base chart of the atlas.
    pub base: [Symbol; 2],
    /// Base variables in terms of the chart variables; `None` for the base chart.
    pub to_base: Option<[RF; 2]>,
    /// Chart variables in terms of the base variables.
    pub from_base: Option<[RF; 2]>,
}

impl Chart {
    pub fn is_base(&self) -> bool {
        self.to_base.is_none()
    }

    /// Map from the base chart to this chart.
    pub fn map(&self) -> BirationalMap {
        match (&self.from_base, &self.to_base) {
            (Some(f), Some(b)) => {
                BirationalMap::new(&self.id, self.base, self.vars, Some(f.clone()), Some(b.clone()))
            }
            _ => BirationalMap::identity(self.base),
        }
    }

    fn base_components(&self) -> [RF; 2] {
        match &self.to_base {
            Some(b) => b.clone(),
            None => [RF::symbol(self.base[0]), RF::symbol(self.base[1])],
        }
    }

    fn chart_components(&self) -> [RF; 2] {
        match &self.from_base {
            Some(f) => f.clone(),
            None => [RF::symbol(self.vars[0]), RF::symbol(self.vars[1])],
        }
    }

    /// Coordinates of chart `to` in terms of this chart's coordinates.
    pub fn transition(&self, to: &Chart) -> Result<[RF; 2]> {
        let b = self.base_components();
        let sub = [(self.base[0], b[0].clone()), (self.base[1], b[1].clone())];
        let f = to.chart_components();
        Ok([f[0].substitute(&sub)?, f[1].substitute(&sub)?])
    }
}

#[derive(Clone, Debug)]
pub struct DivisorComponent {
    pub chart: String,
    pub equation: Polynomial,
    /// Transverse coordinates that are not on this component (removed by earlier blow-ups).
    pub excluding: Vec<RF>,
}

#[derive(Clone, Debug)]
pub struct Divisor {
    pub name: String,
    pub components: Vec<DivisorComponent>,
    pub self_intersection: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct Atlas {
    pub name: String,
    pub charts: Vec<Chart>,
    pub divisors: Vec<Divisor>,
}

impl Atlas {
    /// One of `Sigma4`, `P2`, `PVI`, `P3_blowup`.
    pub fn builtin(name: &str) -> Result<Atlas> {
        let text = match name {
            "Sigma4" => SIGMA4,
            "P2" => P2,
            "PVI" => PVI,
            "P3_blowup" => P3_BLOWUP,
            _ => return Err(Error::NotFound(format!("atlas `{name}`"))),
        };
        Atlas::parse(text)
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["Sigma4", "P2", "PVI", "P3_blowup"]
    }

    pub fn base(&self) -> &Chart {
        self.charts
            .iter()
            .find(|c| c.to_base.is_none())
            .unwrap_or(&self.charts[0])
    }

    pub fn chart(&self, id: &str) -> Result<&Chart> {
        self.charts
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::NotFound(format!("chart `{id}` in atlas `{}`", self.name)))
    }

    pub fn divisor(&self, name: &str) -> Result<&Divisor> {
        self.divisors
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::NotFound(format!("divisor `{name}` in atlas `{}`", self.name)))
    }

    pub fn parse(text: &str) -> Result<Atlas> {
        let mut atlas = Atlas {
            name: String::new(),
            charts: Vec::new(),
            divisors: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Syntax {
                line: i + 1,
                column: 1,
                message: msg.to_owned(),
            };
            let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
            match kw {
                "atlas" => atlas.name = rest.trim().to_owned(),
                "chart" => atlas.charts.push(parse_chart(rest).map_err(|e| located(e, i + 1))?),
                "divisor" => {
                    let (name, comp, selfint) = parse_divisor(rest).map_err(|e| located(e, i + 1))?;
                    match atlas.divisors.iter_mut().find(|d| d.name == name) {
                        Some(d) => {
                            d.components.push(comp);
                            d.self_intersection = d.self_intersection.or(selfint);
                        }
                        None => atlas.divisors.push(Divisor {
                            name,
                            components: vec![comp],
                            self_intersection: selfint,
                        }),
                    }
                }
                _ => return Err(err(&format!("unknown record `{kw}`"))),
            }
        }
        if atlas.charts.is_empty() {
            return Err(Error::Invalid("atlas declares no charts".into()));
        }
        let base = atlas.base().vars;
        for c in &mut atlas.charts {
            c.base = base;
        }
        for d in &atlas.divisors {
            for c in &d.components {
                let chart = atlas.chart(&c.chart)?;
                divisor_variable(&c.equation, chart)?;
            }
        }
        Ok(atlas)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("atlas {}\n", self.name);
        for c in &self.charts {
            let _ = write!(out, "chart {} vars({},{})", c.id, c.vars[0], c.vars[1]);
            match (&c.to_base, &c.from_base) {
                (Some(b), Some(f)) => {
                    let _ = writeln!(out, " to_base: {}, {} from_base: {}, {}", b[0], b[1], f[0], f[1]);
                }
                _ => out.push_str(" base\n"),
            }
        }
        for d in &self.divisors {
            for (k, c) in d.components.iter().enumerate() {
                let _ = write!(out, "divisor {} on {}: {}", d.name, c.chart, c.equation);
                if k == 0 {
                    if let Some(s) = d.self_intersection {
                        let _ = write!(out, " selfint {s}");
                    }
                }
                if !c.excluding.is_empty() {
                    let ex: Vec<String> = c.excluding.iter().map(|e| e.to_string()).collect();
                    let _ = write!(out, " excluding {}", ex.join(", "));
                }
                out.push('\n');
            }
        }
        out
    }
}

fn located(e: Error, line: usize) -> Error {
    match e {
        Error::Syntax { column, message, .. } => Error::Syntax {
            line,
            column,
            message,
        },
        other => other,
    }
}

fn syntax(message: &str) -> Error {
    Error::Syntax {
        line: 1,
        column: 1,
        message: message.to_owned(),
    }
}

fn parse_vars(s: &str) -> Result<([Symbol; 2], &str)> {
    let s = s.trim_start();
    let body = s.strip_prefix("vars(").ok_or_else(|| syntax("expected `vars(`"))?;
    let close = body.find(')').ok_or_else(|| syntax("expected `)`"))?;
    let names: Vec<&str> = body[..close].split(',').map(str::trim).collect();
    if names.len() != 2 {
        return Err(syntax("expected two variables"));
    }
    Ok((
        [Symbol::coordinate(names[0]), Symbol::coordinate(names[1])],
        &body[close + 1..],
    ))
}

fn parse_pair(s: &str) -> Result<[RF; 2]> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                split = Some(i);
                break;
            }
            _ => {}
        }
    }
    let i = split.ok_or_else(|| syntax("expected two comma-separated expressions"))?;
    Ok([parse(&s[..i])?, parse(&s[i + 1..])?])
}

fn parse_chart(rest: &str) -> Result<Chart> {
    let (id, rest) = rest.trim().split_once(' ').ok_or_else(|| syntax("expected chart id"))?;
    let (vars, rest) = parse_vars(rest)?;
    let rest = rest.trim();
    if rest == "base" || rest.is_empty() {
        return Ok(Chart {
            id: id.to_owned(),
            vars,
            base: vars,
            to_base: None,
            from_base: None,
        });
    }
    let rest = rest.strip_prefix("to_base:").ok_or_else(|| syntax("expected `to_base:`"))?;
    let (to, from) = rest
        .split_once("from_base:")
        .ok_or_else(|| syntax("expected `from_base:`"))?;
    Ok(Chart {
        id: id.to_owned(),
        vars,
        base: vars,
        to_base: Some(parse_pair(to)?),
        from_base: Some(parse_pair(from)?),
    })
}

fn parse_divisor(rest: &str) -> Result<(String, DivisorComponent, Option<i64>)> {
    let (name, rest) = rest.trim().split_once(' ').ok_or_else(|| syntax("expected divisor name"))?;
    let rest = rest.trim().strip_prefix("on ").ok_or_else(|| syntax("expected `on`"))?;
    let (chart, rest) = rest.split_once(':').ok_or_else(|| syntax("expected `:`"))?;
    let (rest, excluding) = match rest.find("excluding") {
        Some(i) => (&rest[..i], Some(&rest[i + 9..])),
        None => (rest, None),
    };
    let (eq, selfint) = match rest.find("selfint") {
        Some(i) => {
            let n = rest[i + 7..]
                .trim()
                .parse::<i64>()
                .map_err(|_| syntax("expected an integer after `selfint`"))?;
            (&rest[..i], Some(n))
        }
        None => (rest, None),
    };
    let equation = parse(eq)?
        .as_polynomial()
        .ok_or_else(|| syntax("divisor equation must be polynomial"))?;
    let excluding = match excluding {
        Some(list) => list.split(',').map(parse).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok((
        name.to_owned(),
        DivisorComponent {
            chart: chart.trim().to_owned(),
            equation,
            excluding,
        },
        selfint,
    ))
}

/// `(divisor variable, transverse variable)` for a local equation `c * var`.
pub fn divisor_variable(eq: &Polynomial, chart: &Chart) -> Result<(Symbol, Symbol)> {
    if eq.is_monomial() {
        if let Some((m, _)) = eq.leading_term() {
            if let [(s, 1)] = m.factors() {
                if let Some(i) = chart.vars.iter().position(|v| v == s) {
                    return Ok((chart.vars[i], chart.vars[1 - i]));
                }
            }
        }
    }
    Err(Error::Invalid(format!(
        "divisor equation `{eq}` is not a coordinate of chart `{}`",
        chart.id
    )))
}
