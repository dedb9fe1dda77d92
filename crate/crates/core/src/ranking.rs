//! Rankings of jet variables: total orders compatible with the action of
//! the total derivatives, plus leading-term extraction.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, Names};
use crate::jet::{JetVar, MultiIndex};

/// Tie-break on multi-indices of equal weight and equal total order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    /// Lexicographic, axis 1 most significant.
    Lex,
    /// Reverse lexicographic: the index with the smaller last differing
    /// component is larger.
    RevLex,
}

/// Compares weighted order, then total order, then the tie-break, then the
/// unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ranking {
    weights: Vec<u32>,
    tie_break: TieBreak,
    /// Position of each unknown in the tie-break order (larger ranks higher).
    unknown_rank: Vec<usize>,
}

impl Ranking {
    pub fn new(weights: Vec<u32>, tie_break: TieBreak, m: usize) -> Self {
        Ranking { weights, tie_break, unknown_rank: (0..m).collect() }
    }

    pub fn deglex(n: usize, m: usize) -> Self {
        Ranking::new(vec![0; n], TieBreak::Lex, m)
    }

    pub fn degrevlex(n: usize, m: usize) -> Self {
        Ranking::new(vec![0; n], TieBreak::RevLex, m)
    }

    /// Weight 1 on the listed (zero-based) axes, applied before the degree.
    pub fn elimination(n: usize, m: usize, axes: &[usize], tie_break: TieBreak) -> Self {
        let mut w = vec![0; n];
        for &a in axes {
            w[a] = 1;
        }
        Ranking::new(w, tie_break, m)
    }

    /// Default ranking: eliminate axis 1, then degree, then reverse-lex.
    pub fn default_for(n: usize, m: usize) -> Self {
        Ranking::elimination(n, m, &[0], TieBreak::RevLex)
    }

    /// Lists unknowns from lowest to highest rank.
    pub fn with_unknown_order(mut self, lowest_first: &[usize]) -> Result<Self> {
        let m = self.unknown_rank.len();
        let mut seen = vec![false; m];
        for &u in lowest_first {
            if u >= m || std::mem::replace(&mut seen[u], true) {
                return Err(Error::Config(format!("invalid unknown order {lowest_first:?}")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config(format!("unknown order {lowest_first:?} is incomplete")));
        }
        for (pos, &u) in lowest_first.iter().enumerate() {
            self.unknown_rank[u] = pos;
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.unknown_rank.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    fn weight(&self, a: &MultiIndex) -> u64 {
        a.components().iter().zip(&self.weights).map(|(x, w)| u64::from(*x) * u64::from(*w)).sum()
    }

    pub fn compare_indices(&self, a: &MultiIndex, b: &MultiIndex) -> Ordering {
        self.weight(a)
            .cmp(&self.weight(b))
            .then(a.order().cmp(&b.order()))
            .then_with(|| match self.tie_break {
                TieBreak::Lex => a.components().cmp(b.components()),
                TieBreak::RevLex => {
                    let last = a.components().iter().zip(b.components()).rev().find(|(x, y)| x != y);
                    match last {
                        Some((x, y)) => y.cmp(x),
                        None => Ordering::Equal,
                    }
                }
            })
    }

    pub fn compare(&self, a: &JetVar, b: &JetVar) -> Ordering {
        self.compare_indices(&a.order, &b.order)
            .then_with(|| self.unknown_rank[a.unknown].cmp(&self.unknown_rank[b.unknown]))
    }

    pub fn less(&self, a: &JetVar, b: &JetVar) -> bool {
        self.compare(a, b) == Ordering::Less
    }

    /// The highest-ranked jet variable among `vars`.
    pub fn max<'a>(&self, vars: impl IntoIterator<Item = &'a JetVar>) -> Option<&'a JetVar> {
        vars.into_iter().max_by(|a, b| self.compare(a, b))
    }

    pub fn stratum_of_expr(&self, e: &Expr) -> Stratum {
        match self.max(e.jet_atoms()) {
            Some(v) => Stratum::Jet(v.clone()),
            None => Stratum::XOnly,
        }
    }

    pub fn compare_strata(&self, a: &Stratum, b: &Stratum) -> Ordering {
        match (a, b) {
            (Stratum::XOnly, Stratum::XOnly) => Ordering::Equal,
            (Stratum::XOnly, _) => Ordering::Less,
            (_, Stratum::XOnly) => Ordering::Greater,
            (Stratum::Jet(x), Stratum::Jet(y)) => self.compare(x, y),
        }
    }

    /// `Some((u, g))` when `f = u + g` with every jet variable of `g` below `u`.
    pub fn leading_term(&self, f: &Expr) -> Option<(JetVar, Expr)> {
        let top = self.max(f.jet_atoms())?.clone();
        let atom = Atom::Jet(top.clone());
        let (coeff, tail) = f.linear_in(&atom)?;
        coeff.is_one().then_some((top, tail))
    }

    /// Parses a header clause such as `elim(x1) deglex`, `degrevlex`, or
    /// `weights(1,0) deglex`, optionally followed by `order(v, u)` listing
    /// unknowns from lowest to highest.
    pub fn from_clause(text: &str, names: &Names) -> Result<Ranking> {
        let (n, m) = (names.n(), names.m());
        let mut weights = vec![0u32; n];
        let mut tie = None;
        let mut order = None;
        let words = split_clause(text)?;
        for w in words {
            if let Some(args) = call_args(&w, "elim") {
                for a in args {
                    let k = names
                        .vars
                        .iter()
                        .position(|v| *v == a)
                        .ok_or_else(|| Error::Config(format!("unknown variable '{a}' in ranking")))?;
                    weights[k] = 1;
                }
            } else if let Some(args) = call_args(&w, "weights") {
                if args.len() != n {
                    return Err(Error::Config(format!("weights need {n} entries")));
                }
                for (k, a) in args.iter().enumerate() {
                    weights[k] = a.parse().map_err(|_| Error::Config(format!("bad weight '{a}'")))?;
                }
            } else if let Some(args) = call_args(&w, "order") {
                let idx = args
                    .iter()
                    .map(|a| {
                        names
                            .unknowns
                            .iter()
                            .position(|u| u == a)
                            .ok_or_else(|| Error::Config(format!("unknown '{a}' in ranking order")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                order = Some(idx);
            } else if w == "deglex" || w == "lex" {
                tie = Some(TieBreak::Lex);
            } else if w == "degrevlex" || w == "revlex" {
                tie = Some(TieBreak::RevLex);
            } else {
                return Err(Error::Config(format!("unrecognized ranking clause '{w}'")));
            }
        }
        let mut rk = Ranking::new(weights, tie.unwrap_or(TieBreak::RevLex), m);
        if let Some(o) = order {
            rk = rk.with_unknown_order(&o)?;
        }
        Ok(rk)
    }

    /// Inverse of [`Ranking::from_clause`].
    pub fn to_clause(&self, names: &Names) -> String {
        let mut parts = Vec::new();
        if self.weights.iter().all(|&w| w <= 1) {
            let axes: Vec<&str> = self
                .weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w == 1)
                .map(|(k, _)| names.vars[k].as_str())
                .collect();
            if !axes.is_empty() {
                parts.push(format!("elim({})", axes.join(",")));
            }
        } else {
            let ws: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
            parts.push(format!("weights({})", ws.join(",")));
        }
        parts.push(match self.tie_break {
            TieBreak::Lex => "deglex".to_string(),
            TieBreak::RevLex => "degrevlex".to_string(),
        });
        if self.unknown_rank.iter().enumerate().any(|(i, &r)| i != r) {
            let mut lowest_first: Vec<usize> = (0..self.m()).collect();
            lowest_first.sort_by_key(|&u| self.unknown_rank[u]);
            let us: Vec<&str> = lowest_first.iter().map(|&u| names.unknowns[u].as_str()).collect();
            parts.push(format!("order({})", us.join(",")));
        }
        parts.join(" ")
    }
}

fn split_clause(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                if depth == 0 {
                    return Err(Error::Config(format!("unbalanced ')' in ranking clause '{text}'")));
                }
                depth -= 1;
                cur.push(c);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(Error::Config(format!("unbalanced '(' in ranking clause '{text}'")));
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

fn call_args(word: &str, name: &str) -> Option<Vec<String>> {
    let inner = word.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
}

/// The highest jet variable an expression depends on, or `XOnly` when it
/// depends on independent variables and constants alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stratum {
    XOnly,
    Jet(JetVar),
}

/// A failed ranking axiom, with the offending variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankingViolation {
    NotAntisymmetric(JetVar, JetVar),
    NotTransitive(JetVar, JetVar, JetVar),
    NotTranslationInvariant { a: JetVar, b: JetVar, axis: usize },
    NotIncreasing { a: JetVar, axis: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingReport {
    pub variables_checked: usize,
    pub violation: Option<RankingViolation>,
}

impl RankingReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exhaustively checks the stratified-set axioms for a comparator over all
/// jet variables of order at most `max_order`: total order, compatibility
/// with every D_k, and `a < D_k a`.
pub fn validate_order(
    cmp: &dyn Fn(&JetVar, &JetVar) -> Ordering,
    n: usize,
    m: usize,
    max_order: u32,
) -> RankingReport {
    let vars: Vec<JetVar> = (0..m)
        .flat_map(|i| MultiIndex::all_up_to(n, max_order).into_iter().map(move |a| JetVar::new(i, a)))
        .collect();
    let report = |v| RankingReport { variables_checked: vars.len(), violation: Some(v) };
    for a in &vars {
        for k in 0..n {
            if cmp(a, &a.shifted(k)) != Ordering::Less {
                return report(RankingViolation::NotIncreasing { a: a.clone(), axis: k });
            }
        }
        for b in &vars {
            let ab = cmp(a, b);
            if ab != cmp(b, a).reverse() || ((ab == Ordering::Equal) != (a == b)) {
                return report(RankingViolation::NotAntisymmetric(a.clone(), b.clone()));
            }
            for k in 0..n {
                if cmp(&a.shifted(k), &b.shifted(k)) != ab {
                    return report(RankingViolation::NotTranslationInvariant {
                        a: a.clone(),
                        b: b.clone(),
                        axis: k,
                    });
                }
            }
        }
    }
    for a in &vars {
        for b in &vars {
            if cmp(a, b) != Ordering::Less {
                continue;
            }
            for c in &vars {
                if cmp(b, c) == Ordering::Less && cmp(a, c) != Ordering::Less {
                    return report(RankingViolation::NotTransitive(a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    RankingReport { variables_checked: vars.len(), violation: None }
}

pub fn validate_ranking(rk: &Ranking, max_order: u32) -> RankingReport {
    validate_order(&|a, b| rk.compare(a, b), rk.n(), rk.m(), max_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jv(a: &[u32]) -> JetVar {
        JetVar::from_slice(0, a)
    }

    fn p(s: &str) -> Expr {
        Expr::parse(s, &Names::default()).unwrap()
    }

    #[test]
    fn compare_examples() {
        let dl = Ranking::deglex(2, 1);
        assert!(dl.less(&jv(&[0, 1]), &jv(&[1, 0])));
        assert!(dl.less(&jv(&[0, 0]), &jv(&[0, 1])));
        let el = Ranking::default_for(2, 1);
        assert!(el.less(&jv(&[0, 3]), &jv(&[1, 0])));
        assert!(el.less(&jv(&[0, 9]), &jv(&[1, 0])));
        assert_eq!(el.compare(&jv(&[2, 1]), &jv(&[2, 1])), Ordering::Equal);
    }

    #[test]
    fn revlex_differs_from_lex_in_three_variables() {
        let a = JetVar::from_slice(0, &[1, 1, 0]);
        let b = JetVar::from_slice(0, &[2, 0, 0]);
        let c = JetVar::from_slice(0, &[0, 0, 2]);
        let lex = Ranking::deglex(3, 1);
        let rev = Ranking::degrevlex(3, 1);
        assert!(lex.less(&a, &b));
        assert!(rev.less(&a, &b));
        assert!(lex.less(&c, &a));
        assert!(rev.less(&c, &a));
        let d = JetVar::from_slice(0, &[1, 0, 1]);
        let e = JetVar::from_slice(0, &[0, 2, 0]);
        assert!(lex.less(&e, &d));
        assert!(rev.less(&d, &e));
    }

    #[test]
    fn stratum_examples() {
        let rk = Ranking::default_for(2, 1);
        assert_eq!(rk.stratum_of_expr(&p("sinh(u00)")), Stratum::Jet(jv(&[0, 0])));
        assert_eq!(rk.stratum_of_expr(&p("u11 - sinh(u00)")), Stratum::Jet(jv(&[1, 1])));
        assert_eq!(rk.stratum_of_expr(&p("x1 + x2")), Stratum::XOnly);
    }

    #[test]
    fn leading_term_examples() {
        let rk = Ranking::default_for(2, 1);
        let (lt, tail) = rk.leading_term(&p("u11 - sinh(u00)")).unwrap();
        assert_eq!(lt, jv(&[1, 1]));
        assert_eq!(tail, p("-sinh(u00)"));
        let (lt, tail) = rk.leading_term(&p("u10 - 2*cosh(u00)/u01")).unwrap();
        assert_eq!(lt, jv(&[1, 0]));
        assert_eq!(tail, p("-2*cosh(u00)/u01"));
        assert!(rk.leading_term(&p("u11*u00 - 1")).is_none());
        assert!(rk.leading_term(&p("2*u11 - 1")).is_none());
        assert!(rk.leading_term(&p("x1")).is_none());
        // under plain deglex u03 outranks u10
        let (lt, _) = Ranking::deglex(2, 1).leading_term(&p("u10 + u03")).unwrap();
        assert_eq!(lt, jv(&[0, 3]));
    }

    #[test]
    fn validation_passes_for_real_rankings() {
        for rk in [
            Ranking::deglex(2, 1),
            Ranking::degrevlex(2, 2),
            Ranking::default_for(2, 1),
            Ranking::elimination(3, 1, &[0, 2], TieBreak::Lex),
        ] {
            let rep = validate_ranking(&rk, if rk.n() == 3 { 3 } else { 5 });
            assert!(rep.passed(), "{rk:?}: {:?}", rep.violation);
        }
    }

    #[test]
    fn validation_catches_a_corrupted_comparator() {
        // Pure lex on the multi-index ignores degree: u01 vs u02 is fine but
        // the comparator below reverses the second axis.
        let bad = |a: &JetVar, b: &JetVar| {
            let (x, y) = (a.order.components(), b.order.components());
            x[0].cmp(&y[0]).then(y[1].cmp(&x[1]))
        };
        let rep = validate_order(&bad, 2, 1, 3);
        assert!(matches!(rep.violation, Some(RankingViolation::NotIncreasing { axis: 1, .. })));
    }

    #[test]
    fn clause_round_trip() {
        let names = Names::standard(2, 2);
        for text in ["elim(x1) degrevlex", "deglex", "weights(2,1) deglex", "elim(x2) deglex order(v,u)"] {
            let rk = Ranking::from_clause(text, &names).unwrap();
            assert_eq!(rk.to_clause(&names), text);
        }
        assert!(Ranking::from_clause("elim(t)", &names).is_err());
        assert!(Ranking::from_clause("lexicographic", &names).is_err());
    }
}
