//! Valuations: total maps from variables to terms, identity outside their
//! explicit entries.

use std::collections::{BTreeMap, HashMap};

use crate::syntax::{Expr, Name, Term};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    map: BTreeMap<Name, Term>,
}

impl Valuation {
    pub fn identity() -> Self {
        Valuation::default()
    }

    pub fn set(&mut self, var: &str, value: Term) -> &mut Self {
        self.map.insert(Name::from(var), value);
        self
    }

    pub fn with(mut self, var: &str, value: Term) -> Self {
        self.set(var, value);
        self
    }

    /// `ρ(x)`; variables without an entry map to themselves.
    pub fn get(&self, var: &str) -> Term {
        self.map.get(var).cloned().unwrap_or_else(|| Term::free(var))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.map.iter()
    }
}

impl FromIterator<(Name, Term)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (Name, Term)>>(iter: I) -> Self {
        Valuation {
            map: iter.into_iter().collect(),
        }
    }
}

/// Simultaneous substitution of `ρ(x)` for every free variable `x`.
pub fn apply_valuation(rho: &Valuation, subject: &Expr) -> Expr {
    let map: HashMap<Name, Term> = rho
        .map
        .iter()
        .filter(|(x, t)| !matches!(t, Term::Free(y) if y == *x))
        .map(|(x, t)| (x.clone(), t.clone()))
        .collect();
    if map.is_empty() {
        return subject.clone();
    }
    subject.subst_many(&map)
}
