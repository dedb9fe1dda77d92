use std::sync::Arc;

use num_rational::BigRational;

use super::Expr;
use crate::jet::JetVar;

/// An indivisible variable of the jet space, or a symbolic constant.
///
/// Variant order matters: printed sums list parameters first and jet
/// variables last within a monomial, and the largest generator leads.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Named constant such as `r` or `s`; constant under every derivation.
    Param(Arc<str>),
    /// Independent variable x_k (zero-based).
    Indep(usize),
    Jet(JetVar),
}

impl Atom {
    pub fn jet(&self) -> Option<&JetVar> {
        match self {
            Atom::Jet(v) => Some(v),
            _ => None,
        }
    }
}

/// Polynomial generator: an atom, an exponential `exp(base)` (raised to a
/// rational power inside monomials), or a logarithm.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Gen {
    Exp(Arc<Expr>),
    Log(Arc<Expr>),
    Atom(Atom),
}

impl Gen {
    pub fn is_unit(&self) -> bool {
        matches!(self, Gen::Exp(_))
    }
}

pub(crate) type Rat = BigRational;

/// Names used to read and print atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Names {
    pub vars: Vec<String>,
    pub unknowns: Vec<String>,
    pub consts: Vec<String>,
}

impl Names {
    /// `x1..xn` and unknowns `u, v, w, ...`, no constants.
    pub fn standard(n: usize, m: usize) -> Self {
        const LETTERS: [&str; 6] = ["u", "v", "w", "y", "z", "q"];
        Names {
            vars: (1..=n).map(|k| format!("x{k}")).collect(),
            unknowns: (0..m)
                .map(|i| LETTERS.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("u{i}_")))
                .collect(),
            consts: Vec::new(),
        }
    }

    pub fn with_consts(mut self, consts: &[&str]) -> Self {
        self.consts = consts.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn m(&self) -> usize {
        self.unknowns.len()
    }

    pub fn atom_name(&self, a: &Atom) -> String {
        match a {
            Atom::Param(p) => p.to_string(),
            Atom::Indep(k) => self.vars.get(*k).cloned().unwrap_or_else(|| format!("x{}", k + 1)),
            Atom::Jet(v) => {
                let base = self
                    .unknowns
                    .get(v.unknown)
                    .cloned()
                    .unwrap_or_else(|| format!("u{{{}}}", v.unknown + 1));
                let idx: Vec<String> = v.order.components().iter().map(|a| a.to_string()).collect();
                format!("{base}[{}]", idx.join(","))
            }
        }
    }
}

impl Default for Names {
    /// Two independent variables and one unknown.
    fn default() -> Self {
        Names::standard(2, 1)
    }
}
