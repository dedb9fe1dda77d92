//! Differential systems in solved form, reduction by substitution of
//! prolonged tails, normal forms, and autoreduction.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, Names, ZeroTestConfig, ZeroVerdict};
use crate::jet::{total_derivative, JetVar, MultiIndex};
use crate::ranking::Ranking;

/// The equation `lead + tail = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub name: String,
    pub lead: JetVar,
    pub tail: Expr,
}

impl Equation {
    /// Splits `f` at its leading term; fails unless `f` is orderly solvable.
    pub fn from_expr(name: &str, f: &Expr, rk: &Ranking, names: &Names) -> Result<Equation> {
        if f.is_zero() {
            return Err(Error::ZeroEquation(name.to_string()));
        }
        let (lead, tail) = rk.leading_term(f).ok_or_else(|| Error::NotOrderlySolvable {
            name: name.to_string(),
            expr: f.format(names),
        })?;
        Ok(Equation { name: name.to_string(), lead, tail })
    }

    pub fn expr(&self) -> Expr {
        self.lead.to_expr() + &self.tail
    }
}

/// An immutable list of orderly solvable equations with pairwise distinct
/// leading terms, together with the ranking and names used to read it.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffSystem {
    names: Names,
    ranking: Ranking,
    equations: Vec<Equation>,
}

impl DiffSystem {
    pub fn new(names: Names, ranking: Ranking, equations: Vec<Equation>) -> Result<DiffSystem> {
        if ranking.n() != names.n() {
            return Err(Error::DimensionMismatch { left: ranking.n(), right: names.n() });
        }
        if ranking.m() != names.m() {
            return Err(Error::DimensionMismatch { left: ranking.m(), right: names.m() });
        }
        for (i, a) in equations.iter().enumerate() {
            if let Some(b) = equations[..i].iter().find(|b| b.lead == a.lead) {
                return Err(Error::DuplicateLeadingTerm {
                    first: b.name.clone(),
                    second: a.name.clone(),
                    lead: names.atom_name(&Atom::Jet(a.lead.clone())),
                });
            }
            if a.tail.jet_atoms().any(|v| !ranking.less(v, &a.lead)) {
                return Err(Error::NotOrderlySolvable { name: a.name.clone(), expr: a.expr().format(&names) });
            }
        }
        Ok(DiffSystem { names, ranking, equations })
    }

    /// Builds a system from named expressions, splitting each at its
    /// leading term.
    pub fn from_exprs<S: AsRef<str>>(names: Names, ranking: Ranking, exprs: &[(S, Expr)]) -> Result<DiffSystem> {
        let eqs = exprs
            .iter()
            .map(|(name, f)| Equation::from_expr(name.as_ref(), f, &ranking, &names))
            .collect::<Result<Vec<_>>>()?;
        DiffSystem::new(names, ranking, eqs)
    }

    /// Parses `(name, text)` pairs with `names`.
    pub fn parse(names: Names, ranking: Ranking, exprs: &[(&str, &str)]) -> Result<DiffSystem> {
        let parsed = exprs
            .iter()
            .map(|(name, text)| Ok((*name, Expr::parse(text, &names)?)))
            .collect::<Result<Vec<_>>>()?;
        DiffSystem::from_exprs(names, ranking, &parsed)
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn ranking(&self) -> &Ranking {
        &self.ranking
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn equation(&self, name: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.name == name)
    }

    pub fn leads(&self) -> impl Iterator<Item = &JetVar> {
        self.equations.iter().map(|e| &e.lead)
    }

    /// The first equation whose leading term has `v` in its orbit.
    pub fn principal_source(&self, v: &JetVar) -> Option<(usize, MultiIndex)> {
        self.equations.iter().enumerate().find_map(|(i, e)| e.lead.divides(v).map(|d| (i, d)))
    }

    pub fn is_principal(&self, v: &JetVar) -> bool {
        self.principal_source(v).is_some()
    }

    pub fn format_atom(&self, v: &JetVar) -> String {
        self.names.atom_name(&Atom::Jet(v.clone()))
    }

    pub fn format(&self, e: &Expr) -> String {
        e.format(&self.names)
    }

    /// Same names and ranking, different equations.
    pub fn with_equations(&self, equations: Vec<Equation>) -> Result<DiffSystem> {
        DiffSystem::new(self.names.clone(), self.ranking.clone(), equations)
    }

    pub fn reducer(&self) -> Reducer<'_> {
        Reducer::new(self)
    }

    pub fn normal_form(&self, f: &Expr, max_steps: usize) -> Result<NormalForm, BudgetExceeded> {
        self.reducer().normal_form(f, max_steps)
    }
}

impl fmt::Display for DiffSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            writeln!(f, "{}: {};", e.name, e.expr().format(&self.names))?;
        }
        Ok(())
    }
}

/// One substitution `target := -D^delta(tail of equation)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionStep {
    pub target: String,
    pub equation: String,
    pub delta: MultiIndex,
    pub remainder: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub remainder: Expr,
    pub trace: ReductionTrace,
}

/// The step cap was reached; carries the partial result.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetExceeded {
    pub steps: usize,
    pub partial: NormalForm,
}

impl fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "reduction did not finish within {} steps", self.steps)
    }
}

impl std::error::Error for BudgetExceeded {}

impl From<BudgetExceeded> for Error {
    fn from(e: BudgetExceeded) -> Error {
        Error::StepBudget(e.steps)
    }
}

/// A reducible occurrence: jet variable `target` lies in the orbit of
/// equation `equation`'s leading term, `target = D^delta lead`.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub target: JetVar,
    pub equation: usize,
    pub delta: MultiIndex,
}

/// Reduction engine over a fixed system, caching prolonged tails.
pub struct Reducer<'a> {
    system: &'a DiffSystem,
    prolongations: RefCell<Vec<HashMap<MultiIndex, Expr>>>,
}

impl<'a> Reducer<'a> {
    pub fn new(system: &'a DiffSystem) -> Self {
        Reducer { system, prolongations: RefCell::new(vec![HashMap::new(); system.len()]) }
    }

    /// D^delta of the tail of equation `i`.
    pub fn prolonged_tail(&self, i: usize, delta: &MultiIndex) -> Expr {
        if delta.is_zero() {
            return self.system.equations[i].tail.clone();
        }
        if let Some(e) = self.prolongations.borrow()[i].get(delta) {
            return e.clone();
        }
        let k = delta.components().iter().position(|&c| c > 0).unwrap();
        let mut prev = delta.components().to_vec();
        prev[k] -= 1;
        let base = self.prolonged_tail(i, &MultiIndex::new(prev));
        let out = total_derivative(&base, k);
        self.prolongations.borrow_mut()[i].insert(delta.clone(), out.clone());
        out
    }

    /// Every principal occurrence in `f`, highest first; ties keep the
    /// equation list order.
    pub fn candidates(&self, f: &Expr) -> Vec<Candidate> {
        let rk = &self.system.ranking;
        let mut vars: Vec<&JetVar> = f.jet_atoms().collect();
        vars.sort_by(|a, b| rk.compare(b, a));
        vars.into_iter()
            .flat_map(|v| {
                self.system.equations.iter().enumerate().filter_map(move |(i, e)| {
                    e.lead.divides(v).map(|delta| Candidate { target: v.clone(), equation: i, delta })
                })
            })
            .collect()
    }

    /// Substitutes `c.target := -D^delta(tail)` in `f`.
    pub fn apply(&self, f: &Expr, c: &Candidate) -> Expr {
        let replacement = -self.prolonged_tail(c.equation, &c.delta);
        f.substitute(&Atom::Jet(c.target.clone()), &replacement)
            .expect("substituting a polynomial-in-generators expression cannot fail")
    }

    fn step_record(&self, c: &Candidate, r: &Expr) -> ReductionStep {
        ReductionStep {
            target: self.system.format_atom(&c.target),
            equation: self.system.equations[c.equation].name.clone(),
            delta: c.delta.clone(),
            remainder: self.system.format(r),
        }
    }

    /// One reduction step of `f` by equation `i`, eliminating the highest
    /// occurrence in its orbit. `None` when nothing is divisible.
    pub fn reduce_once(&self, f: &Expr, i: usize) -> Option<(Expr, ReductionStep)> {
        let c = self.candidates(f).into_iter().find(|c| c.equation == i)?;
        let r = self.apply(f, &c);
        let step = self.step_record(&c, &r);
        Some((r, step))
    }

    /// Reduces until no principal variable remains, eliminating the
    /// highest reducible occurrence first.
    pub fn normal_form(&self, f: &Expr, max_steps: usize) -> Result<NormalForm, BudgetExceeded> {
        self.normal_form_by(f, max_steps, &mut |_| 0)
    }

    /// Like [`Reducer::normal_form`], with `choose` picking the step among
    /// the candidates (listed highest first).
    pub fn normal_form_by(
        &self,
        f: &Expr,
        max_steps: usize,
        choose: &mut dyn FnMut(&[Candidate]) -> usize,
    ) -> Result<NormalForm, BudgetExceeded> {
        let mut r = f.clone();
        let mut trace = ReductionTrace::default();
        loop {
            let cands = self.candidates(&r);
            if cands.is_empty() {
                return Ok(NormalForm { remainder: r, trace });
            }
            if trace.len() >= max_steps {
                return Err(BudgetExceeded { steps: max_steps, partial: NormalForm { remainder: r, trace } });
            }
            let c = &cands[choose(&cands).min(cands.len() - 1)];
            r = self.apply(&r, c);
            trace.steps.push(self.step_record(c, &r));
        }
    }
}

/// Default cap on reduction steps for a single normal form.
pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// Rewrites a nonzero remainder as an equation `lead + tail` by dividing by
/// the coefficient of its highest jet variable. `Ok(None)` when the
/// remainder is not linear in that variable, its coefficient vanishes, or
/// it has no jet variable at all.
pub fn monicize(r: &Expr, rk: &Ranking, cfg: &ZeroTestConfig) -> Result<Option<(JetVar, Expr)>> {
    let Some(top) = rk.max(r.jet_atoms()).cloned() else {
        return Ok(None);
    };
    let Some((c, d)) = r.linear_in(&Atom::Jet(top.clone())) else {
        return Ok(None);
    };
    if c.zero_test(cfg)?.is_zero() {
        return Ok(None);
    }
    let tail = d.checked_div(&c)?;
    debug_assert!(tail.jet_atoms().all(|v| rk.less(v, &top)));
    Ok(Some((top, tail)))
}

/// Why a system fails to be normalized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalizationWitness {
    /// The leading term of `equation` is a derivative of the leading term
    /// of `via`.
    LeadInOrbit { equation: String, via: String, variable: String },
    /// The tail of `equation` depends on a principal variable.
    PrincipalInTail { equation: String, via: String, variable: String },
}

/// `None` when leading terms are pairwise outside each other's orbits and
/// no tail depends on a principal variable.
pub fn normalization_witness(s: &DiffSystem) -> Option<NormalizationWitness> {
    for (i, e) in s.equations.iter().enumerate() {
        for (j, o) in s.equations.iter().enumerate() {
            if i != j && o.lead.divides(&e.lead).is_some() {
                return Some(NormalizationWitness::LeadInOrbit {
                    equation: e.name.clone(),
                    via: o.name.clone(),
                    variable: s.format_atom(&e.lead),
                });
            }
        }
    }
    for e in &s.equations {
        let mut vars: Vec<&JetVar> = e.tail.jet_atoms().collect();
        vars.sort();
        for v in vars {
            if let Some((j, _)) = s.principal_source(v) {
                return Some(NormalizationWitness::PrincipalInTail {
                    equation: e.name.clone(),
                    via: s.equations[j].name.clone(),
                    variable: s.format_atom(v),
                });
            }
        }
    }
    None
}

pub fn is_normalized(s: &DiffSystem) -> bool {
    normalization_witness(s).is_none()
}

/// Makes `s` normalized: equations whose leading term is a derivative of
/// another leading term are reduced in full and either dropped (zero) or
/// re-solved, then every tail is replaced by its normal form modulo the
/// remaining equations.
pub fn autoreduce(s: &DiffSystem, cfg: &ZeroTestConfig, max_steps: usize) -> Result<DiffSystem> {
    let mut eqs = s.equations.clone();
    'outer: loop {
        for i in 0..eqs.len() {
            let in_orbit = eqs.iter().enumerate().any(|(j, o)| j != i && o.lead.divides(&eqs[i].lead).is_some());
            if !in_orbit {
                continue;
            }
            let e = eqs.remove(i);
            let rest = s.with_equations(eqs.clone())?;
            let r = rest.normal_form(&e.expr(), max_steps)?.remainder;
            if r.zero_test(cfg)? == ZeroVerdict::NonZero {
                let Some((lead, tail)) = monicize(&r, &s.ranking, cfg)? else {
                    return Err(Error::NotMonicizable(format!("{}: {}", e.name, s.format(&r))));
                };
                eqs.insert(i, Equation { name: e.name, lead, tail });
            }
            continue 'outer;
        }
        break;
    }
    // Leading terms are now orbit-independent, so one pass over the tails
    // suffices.
    let mut out = Vec::with_capacity(eqs.len());
    for i in 0..eqs.len() {
        let mut others = eqs.clone();
        let e = others.remove(i);
        let rest = s.with_equations(others)?;
        let tail = rest.normal_form(&e.tail, max_steps)?.remainder;
        out.push(Equation { tail, ..e });
    }
    s.with_equations(out)
}
