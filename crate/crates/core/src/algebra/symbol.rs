//! Global symbol table.
//!
//! Symbols are interned once per process and never removed. Equality and
//! hashing use the interned id; ordering uses the name, so term order and
//! printing do not depend on the order in which symbols were first seen.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::Polynomial;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Coordinate,
    Time,
    Parameter,
    Radical,
}

/// Reduction rule `symbol^degree -> value` attached to a radical symbol.
#[derive(Debug)]
pub struct RootRule {
    pub degree: u32,
    pub value: Polynomial,
}

#[derive(Clone, Copy)]
pub struct Symbol {
    id: u32,
    name: &'static str,
    kind: SymbolKind,
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.id == other.id {
            Ordering::Equal
        } else {
            self.name.cmp(other.name)
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

struct Entry {
    kind: SymbolKind,
    name: &'static str,
    rule: Option<Arc<RootRule>>,
}

struct Registry {
    by_name: HashMap<&'static str, u32>,
    entries: Vec<Entry>,
}

impl Registry {
    fn insert(&mut self, name: &str, kind: SymbolKind, rule: Option<Arc<RootRule>>) -> Symbol {
        if let Some(&id) = self.by_name.get(name) {
            let e = &self.entries[id as usize];
            return Symbol {
                id,
                name: e.name,
                kind: e.kind,
            };
        }
        let name: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = self.entries.len() as u32;
        self.entries.push(Entry { kind, name, rule });
        self.by_name.insert(name, id);
        Symbol { id, name, kind }
    }
}

/// Symbols every session knows about. `a` is reserved for a root of `a^5 = -1`.
const SEEDED: &[(&str, SymbolKind)] = &[
    ("t", SymbolKind::Time),
    ("T", SymbolKind::Time),
    ("tau", SymbolKind::Parameter),
    ("t0", SymbolKind::Parameter),
    ("h", SymbolKind::Parameter),
    ("a5", SymbolKind::Parameter),
    ("b5", SymbolKind::Parameter),
    ("C1", SymbolKind::Parameter),
    ("C2", SymbolKind::Parameter),
    ("alpha0", SymbolKind::Parameter),
    ("alpha1", SymbolKind::Parameter),
    ("alpha2", SymbolKind::Parameter),
    ("alpha3", SymbolKind::Parameter),
    ("alpha4", SymbolKind::Parameter),
    ("x", SymbolKind::Coordinate),
    ("y", SymbolKind::Coordinate),
    ("v", SymbolKind::Coordinate),
    ("u", SymbolKind::Coordinate),
    ("q", SymbolKind::Coordinate),
    ("p", SymbolKind::Coordinate),
    ("Q", SymbolKind::Coordinate),
    ("P", SymbolKind::Coordinate),
    ("q0", SymbolKind::Coordinate),
    ("q1", SymbolKind::Coordinate),
    ("q2", SymbolKind::Coordinate),
    ("X", SymbolKind::Coordinate),
    ("Y", SymbolKind::Coordinate),
    ("X1", SymbolKind::Coordinate),
    ("Y1", SymbolKind::Coordinate),
    ("X2", SymbolKind::Coordinate),
    ("Y2", SymbolKind::Coordinate),
    ("x3", SymbolKind::Coordinate),
    ("y3", SymbolKind::Coordinate),
    ("Z", SymbolKind::Coordinate),
    ("W", SymbolKind::Coordinate),
    ("z0", SymbolKind::Coordinate),
    ("w0", SymbolKind::Coordinate),
    ("z1", SymbolKind::Coordinate),
    ("w1", SymbolKind::Coordinate),
    ("z2", SymbolKind::Coordinate),
    ("w2", SymbolKind::Coordinate),
    ("z3", SymbolKind::Coordinate),
    ("w3", SymbolKind::Coordinate),
    ("a1", SymbolKind::Coordinate),
    ("b1", SymbolKind::Coordinate),
    ("a2", SymbolKind::Coordinate),
    ("b2", SymbolKind::Coordinate),
];

fn registry() -> &'static RwLock<Registry> {
    static REGISTRY: OnceLock<RwLock<Registry>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg = Registry {
            by_name: HashMap::new(),
            entries: Vec::new(),
        };
        for &(name, kind) in SEEDED {
            reg.insert(name, kind, None);
        }
        let minus_one = Polynomial::constant(BigRational::from_integer(BigInt::from(-1)));
        reg.insert(
            "a",
            SymbolKind::Radical,
            Some(Arc::new(RootRule {
                degree: 5,
                value: minus_one,
            })),
        );
        RwLock::new(reg)
    })
}

impl Symbol {
    /// Interns `name`; if it already exists the existing symbol (and kind) is returned.
    pub fn new(name: &str, kind: SymbolKind) -> Symbol {
        if let Some(s) = Symbol::lookup(name) {
            return s;
        }
        registry().write().unwrap().insert(name, kind, None)
    }

    pub fn coordinate(name: &str) -> Symbol {
        Symbol::new(name, SymbolKind::Coordinate)
    }

    pub fn parameter(name: &str) -> Symbol {
        Symbol::new(name, SymbolKind::Parameter)
    }

    pub fn lookup(name: &str) -> Option<Symbol> {
        let reg = registry().read().unwrap();
        reg.by_name.get(name).map(|&id| {
            let e = &reg.entries[id as usize];
            Symbol {
                id,
                name: e.name,
                kind: e.kind,
            }
        })
    }

    /// The time symbol `t`.
    pub fn time() -> Symbol {
        Symbol::lookup("t").expect("seeded")
    }

    /// The fifth-root parameter `a` with `a^5 = -1`.
    pub fn fifth_root() -> Symbol {
        Symbol::lookup("a").expect("seeded")
    }

    /// Declares a root symbol with rule `name^degree = value`.
    ///
    /// `value` may only mention symbols that already exist, which keeps the
    /// adjunction stratified. Re-declaring with an identical rule is a no-op.
    pub fn root(name: &str, degree: u32, value: Polynomial) -> Result<Symbol> {
        if degree < 2 {
            return Err(Error::InvalidRule(format!("degree {degree} for `{name}`")));
        }
        if let Some(existing) = Symbol::lookup(name) {
            return match existing.rule() {
                Some(rule) if rule.degree == degree && rule.value == value => Ok(existing),
                _ => Err(Error::InvalidRule(format!(
                    "`{name}` already declared with a different rule"
                ))),
            };
        }
        let mut reg = registry().write().unwrap();
        if reg.by_name.contains_key(name) {
            drop(reg);
            return Symbol::root(name, degree, value);
        }
        Ok(reg.insert(
            name,
            SymbolKind::Radical,
            Some(Arc::new(RootRule { degree, value })),
        ))
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_radical(&self) -> bool {
        self.kind == SymbolKind::Radical
    }

    pub fn rule(&self) -> Option<Arc<RootRule>> {
        if !self.is_radical() {
            return None;
        }
        registry().read().unwrap().entries[self.id as usize]
            .rule
            .clone()
    }

}

impl serde::Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent() {
        let a = Symbol::coordinate("sym_test_zz");
        let b = Symbol::parameter("sym_test_zz");
        assert_eq!(a, b);
        assert_eq!(b.kind(), SymbolKind::Coordinate);
    }

    #[test]
    fn fifth_root_rule() {
        let a = Symbol::fifth_root();
        let rule = a.rule().unwrap();
        assert_eq!(rule.degree, 5);
        assert_eq!(rule.value, Polynomial::from_i64(-1));
    }

    #[test]
    fn conflicting_root_rejected() {
        let v = Polynomial::from_i64(3);
        Symbol::root("rt_test_3", 2, v.clone()).unwrap();
        assert!(Symbol::root("rt_test_3", 2, v).is_ok());
        assert!(Symbol::root("rt_test_3", 2, Polynomial::from_i64(5)).is_err());
    }
}
