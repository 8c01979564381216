use std::fmt;

use crate::algebra::{Symbol, RF};
use crate::error::{Error, Result};

/// A first-order system `d(x1, x2)/dt = rhs` with rational right-hand sides.
#[derive(Clone, Debug)]
pub struct PlaneSystem {
    pub name: String,
    pub vars: [Symbol; 2],
    pub time: Symbol,
    pub rhs: [RF; 2],
    pub hamiltonian: Option<RF>,
    /// Parameter eliminations `symbol = value` that hold for this system.
    pub relations: Vec<(Symbol, RF)>,
}

impl PlaneSystem {
    pub fn new(name: &str, vars: [Symbol; 2], time: Symbol, rhs: [RF; 2]) -> PlaneSystem {
        PlaneSystem {
            name: name.to_owned(),
            vars,
            time,
            rhs,
            hamiltonian: None,
            relations: Vec::new(),
        }
    }

    /// `rhs = (dH/d x2, -dH/d x1)`.
    pub fn from_hamiltonian(name: &str, h: RF, vars: [Symbol; 2], time: Symbol) -> PlaneSystem {
        let rhs = [h.derivative(vars[1]), -h.derivative(vars[0])];
        PlaneSystem {
            hamiltonian: Some(h),
            ..PlaneSystem::new(name, vars, time, rhs)
        }
    }

    /// Attaches a Hamiltonian after checking it generates the right-hand sides.
    pub fn with_hamiltonian(mut self, h: RF) -> Result<PlaneSystem> {
        let expect = [h.derivative(self.vars[1]), -h.derivative(self.vars[0])];
        if expect != self.rhs {
            return Err(Error::Invalid(format!(
                "Hamiltonian does not generate the right-hand sides of `{}`",
                self.name
            )));
        }
        self.hamiltonian = Some(h);
        Ok(self)
    }

    pub fn with_relation(mut self, s: Symbol, value: RF) -> PlaneSystem {
        self.relations.push((s, value));
        self
    }

    /// Whether the stored Hamiltonian (if any) still generates the right-hand sides.
    pub fn hamiltonian_consistent(&self) -> bool {
        match &self.hamiltonian {
            None => true,
            Some(h) => [h.derivative(self.vars[1]), -h.derivative(self.vars[0])] == self.rhs,
        }
    }

    /// Applies the stored parameter relations to the right-hand sides and Hamiltonian.
    pub fn constrained(&self) -> Result<PlaneSystem> {
        if self.relations.is_empty() {
            return Ok(self.clone());
        }
        let sub = |f: &RF| f.substitute(&self.relations);
        Ok(PlaneSystem {
            name: self.name.clone(),
            vars: self.vars,
            time: self.time,
            rhs: [sub(&self.rhs[0])?, sub(&self.rhs[1])?],
            hamiltonian: self.hamiltonian.as_ref().map(sub).transpose()?,
            relations: Vec::new(),
        })
    }

    /// Simultaneous substitution applied to both right-hand sides.
    pub fn substitute(&self, map: &[(Symbol, RF)]) -> Result<PlaneSystem> {
        let mut out = self.clone();
        out.rhs = [self.rhs[0].substitute(map)?, self.rhs[1].substitute(map)?];
        out.hamiltonian = self.hamiltonian.as_ref().map(|h| h.substitute(map)).transpose()?;
        Ok(out)
    }

    /// Renames the phase variables.
    pub fn rename(&self, vars: [Symbol; 2]) -> Result<PlaneSystem> {
        let map = [
            (self.vars[0], RF::symbol(vars[0])),
            (self.vars[1], RF::symbol(vars[1])),
        ];
        let mut out = self.substitute(&map)?;
        out.vars = vars;
        Ok(out)
    }

    /// Right-hand sides agree (and the phase variables coincide).
    pub fn same_field(&self, other: &PlaneSystem) -> bool {
        self.vars == other.vars && self.rhs == other.rhs
    }
}

impl fmt::Display for PlaneSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d{}/d{} = {}", self.vars[0], self.time, self.rhs[0])?;
        write!(f, "d{}/d{} = {}", self.vars[1], self.time, self.rhs[1])
    }
}
