//! Principal/parametric classification, truncated Taylor solutions built
//! from parametric data, and numeric residual checks.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr};
use crate::jet::{divisibility, JetVar, MultiIndex};
use crate::reduce::{DiffSystem, Reducer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JetClass {
    /// `D^delta` of the leading term of `equation`.
    Principal { equation: String, delta: MultiIndex },
    Parametric,
}

/// Every jet variable of order at most `horizon`, classified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetClassification {
    pub horizon: u32,
    pub entries: Vec<(JetVar, JetClass)>,
}

impl JetClassification {
    pub fn principal(&self) -> impl Iterator<Item = &JetVar> {
        self.entries.iter().filter(|(_, c)| *c != JetClass::Parametric).map(|(v, _)| v)
    }

    pub fn parametric(&self) -> impl Iterator<Item = &JetVar> {
        self.entries.iter().filter(|(_, c)| *c == JetClass::Parametric).map(|(v, _)| v)
    }
}

fn all_jets(n: usize, m: usize, horizon: u32) -> Vec<JetVar> {
    (0..m)
        .flat_map(|i| MultiIndex::all_up_to(n, horizon).into_iter().map(move |a| JetVar::new(i, a)))
        .collect()
}

pub fn classify(s: &DiffSystem, horizon: u32) -> JetClassification {
    let entries = all_jets(s.names().n(), s.names().m(), horizon)
        .into_iter()
        .map(|v| {
            let class = match s.principal_source(&v) {
                Some((i, delta)) => JetClass::Principal { equation: s.equations()[i].name.clone(), delta },
                None => JetClass::Parametric,
            };
            (v, class)
        })
        .collect();
    JetClassification { horizon, entries }
}

/// Values of parametric derivatives, with an optional fallback for any
/// parametric derivative not listed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParametricData {
    pub values: BTreeMap<JetVar, f64>,
    pub default: Option<f64>,
}

impl ParametricData {
    pub fn new(values: impl IntoIterator<Item = (JetVar, f64)>) -> Self {
        ParametricData { values: values.into_iter().collect(), default: None }
    }

    pub fn with_default(mut self, v: f64) -> Self {
        self.default = Some(v);
        self
    }

    fn get(&self, v: &JetVar) -> Option<f64> {
        self.values.get(v).copied().or(self.default)
    }
}

/// The jet of a formal solution at `point`, truncated at `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSolution {
    pub point: Vec<f64>,
    pub order: u32,
    /// `u^i_α(b)` for every `|α| <= order`.
    pub values: BTreeMap<JetVar, f64>,
    /// Higher-order values that principal entries depended on.
    pub extra: BTreeMap<JetVar, f64>,
}

struct Builder<'a> {
    system: &'a DiffSystem,
    reducer: Reducer<'a>,
    point: &'a [f64],
    data: &'a ParametricData,
    table: RefCell<HashMap<JetVar, f64>>,
}

impl Builder<'_> {
    fn value(&self, v: &JetVar) -> Result<f64> {
        if let Some(x) = self.table.borrow().get(v) {
            return Ok(*x);
        }
        let x = match self.system.principal_source(v) {
            None => self.data.get(v).ok_or_else(|| Error::MissingParametric(self.system.format_atom(v)))?,
            Some((i, delta)) => {
                let g = self.reducer.prolonged_tail(i, &delta);
                let mut deps: Vec<&JetVar> = g.jet_atoms().collect();
                deps.sort_by(|a, b| self.system.ranking().compare(a, b));
                for w in deps {
                    self.value(w)?;
                }
                let table = self.table.borrow();
                let env = |a: &Atom| match a {
                    Atom::Indep(k) => self.point.get(*k).copied(),
                    Atom::Jet(w) => table.get(w).copied(),
                    Atom::Param(_) => None,
                };
                let singular = || Error::SingularData {
                    equation: self.system.equations()[i].name.clone(),
                    jet: self.system.format_atom(v),
                };
                match g.eval(&env) {
                    Ok(y) => -y,
                    Err(Error::Pole(_) | Error::Domain(_)) => return Err(singular()),
                    Err(e) => return Err(e),
                }
            }
        };
        self.table.borrow_mut().insert(v.clone(), x);
        Ok(x)
    }
}

/// Builds the solution jet: parametric entries from `data`, principal
/// entries by evaluating the negated prolonged tails.
pub fn evaluate_point(s: &DiffSystem, point: &[f64], data: &ParametricData, order: u32) -> Result<SeriesSolution> {
    let mut jets = all_jets(s.names().n(), s.names().m(), order);
    jets.sort_by(|a, b| s.ranking().compare(a, b));
    evaluate_point_in_order(s, point, data, order, &jets)
}

/// As [`evaluate_point`], visiting jet variables in the given order.
pub fn evaluate_point_in_order(
    s: &DiffSystem,
    point: &[f64],
    data: &ParametricData,
    order: u32,
    visit: &[JetVar],
) -> Result<SeriesSolution> {
    if point.len() != s.names().n() {
        return Err(Error::DimensionMismatch { left: point.len(), right: s.names().n() });
    }
    let b = Builder { system: s, reducer: s.reducer(), point, data, table: RefCell::new(HashMap::new()) };
    for v in visit {
        b.value(v)?;
    }
    for v in all_jets(s.names().n(), s.names().m(), order) {
        b.value(&v)?;
    }
    let (values, extra) = b.table.into_inner().into_iter().partition(|(v, _)| v.order.order() <= order);
    Ok(SeriesSolution { point: point.to_vec(), order, values, extra })
}

impl SeriesSolution {
    /// Taylor coefficient `u^i_α(b) / α!`.
    pub fn coefficient(&self, v: &JetVar) -> f64 {
        self.values.get(v).map_or(0.0, |x| x / v.order.factorial())
    }

    /// `∂^β` of the truncated Taylor polynomial of unknown `v.unknown`,
    /// `β = v.order`, at `x`.
    pub fn derivative_at(&self, v: &JetVar, x: &[f64]) -> f64 {
        let h: Vec<f64> = x.iter().zip(&self.point).map(|(a, b)| a - b).collect();
        self.values
            .iter()
            .filter(|(w, _)| w.unknown == v.unknown)
            .filter_map(|(w, val)| {
                let rest = divisibility(&v.order, &w.order)?;
                let mono: f64 = rest.components().iter().zip(&h).map(|(&k, &d)| d.powi(k as i32)).product();
                Some(val * mono / rest.factorial())
            })
            .sum()
    }

    /// Evaluates `f` on the prolongation of the Taylor polynomial at `x`.
    pub fn eval_on_polynomial(&self, f: &Expr, x: &[f64]) -> Result<f64> {
        f.eval(&|a| match a {
            Atom::Indep(k) => x.get(*k).copied(),
            Atom::Jet(v) => Some(self.derivative_at(v, x)),
            Atom::Param(_) => None,
        })
    }

    /// Evaluates `f` on the computed jet at the expansion point.
    pub fn eval_at_point(&self, f: &Expr) -> Result<f64> {
        f.eval(&|a| match a {
            Atom::Indep(k) => self.point.get(*k).copied(),
            Atom::Jet(v) => self.values.get(v).or_else(|| self.extra.get(v)).copied(),
            Atom::Param(_) => None,
        })
    }

    /// `max |f(x)|` over the equations and sample points.
    pub fn residual(&self, fs: &[Expr], offsets: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for off in offsets {
            let x: Vec<f64> = self.point.iter().zip(off).map(|(a, b)| a + b).collect();
            for f in fs {
                worst = worst.max(self.eval_on_polynomial(f, &x)?.abs());
            }
        }
        Ok(worst)
    }

    pub fn to_csv(&self, s: &DiffSystem) -> String {
        let mut out = String::from("unknown,alpha,value\n");
        for (v, x) in &self.values {
            let alpha: Vec<String> = v.order.components().iter().map(u32::to_string).collect();
            writeln!(out, "{},{},{x:e}", s.names().unknowns[v.unknown], alpha.join(" ")).unwrap();
        }
        out
    }

    pub fn to_json(&self, s: &DiffSystem) -> Value {
        json!({
            "point": self.point,
            "order": self.order,
            "coefficients": self.values.keys().map(|v| json!({
                "unknown": s.names().unknowns[v.unknown],
                "alpha": v.order,
                "value": self.values[v],
                "coefficient": self.coefficient(v),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Max over equations and `δ` with `|α + δ| <= order` of `|D^δ f|` at the
/// expansion point. Entries outside the table are derived from `data` as
/// during construction.
pub fn consistency(s: &DiffSystem, sol: &SeriesSolution, data: &ParametricData) -> Result<f64> {
    let table = sol.values.iter().chain(&sol.extra).map(|(v, x)| (v.clone(), *x)).collect();
    let b = Builder { system: s, reducer: s.reducer(), point: &sol.point, data, table: RefCell::new(table) };
    let mut worst: f64 = 0.0;
    for (i, e) in s.equations().iter().enumerate() {
        let budget = sol.order.saturating_sub(e.lead.order.order());
        for delta in MultiIndex::all_up_to(s.names().n(), budget) {
            let g = b.reducer.prolonged_tail(i, &delta);
            for w in g.jet_atoms() {
                b.value(w)?;
            }
            let lead = b.value(&e.lead.prolonged(&delta))?;
            let table = b.table.borrow();
            let tail = g.eval(&|a| match a {
                Atom::Indep(k) => sol.point.get(*k).copied(),
                Atom::Jet(w) => table.get(w).copied(),
                Atom::Param(_) => None,
            })?;
            worst = worst.max((lead + tail).abs());
        }
    }
    Ok(worst)
}

/// `count` points evenly spaced on a circle of the given radius (first two
/// axes; other axes zero).
pub fn circle_offsets(n: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let t = std::f64::consts::TAU * (k as f64 + 0.5) / count as f64;
            let mut v = vec![0.0; n];
            if n > 0 {
                v[0] = radius * t.cos();
            }
            if n > 1 {
                v[1] = radius * t.sin();
            }
            v
        })
        .collect()
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48)
}

/// The implicit relation `G(u) = c x + k t + c1` with
/// `G(u) = ∫₀^u ds/√cosh s`, solved for `u` pointwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImplicitRelation {
    pub c: f64,
    pub c1: f64,
    /// Coefficient of `t`.
    pub k: f64,
}

impl ImplicitRelation {
    /// `G(u) = c x + 2t/c + c1`, which solves `u_t u_x = 2 cosh u` and
    /// `u_xx = u_x² tanh(u) / 2`.
    pub fn new(c: f64, c1: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::Domain(format!("c must be finite and nonzero, got {c}")));
        }
        Ok(ImplicitRelation { c, c1, k: 2.0 / c })
    }

    pub fn with_t_coefficient(self, k: f64) -> Self {
        ImplicitRelation { k, ..self }
    }

    pub fn g(u: f64) -> f64 {
        adaptive_simpson(&|s| 1.0 / s.cosh().sqrt(), 0.0, u, 1e-12)
    }

    /// `u(x, t)`: Newton on `G(u) = target`, safeguarded by bisection.
    pub fn solve(&self, x: f64, t: f64) -> Result<f64> {
        let target = self.c * x + self.k * t + self.c1;
        let (mut lo, mut hi) = (-1.0, 1.0);
        let mut widen = 0;
        while ImplicitRelation::g(lo) > target || ImplicitRelation::g(hi) < target {
            lo *= 2.0;
            hi *= 2.0;
            widen += 1;
            if widen > 8 {
                return Err(Error::NonConvergence(format!("no bracket for G(u) = {target}")));
            }
        }
        let mut u = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = ImplicitRelation::g(u) - target;
            if r.abs() < 1e-13 {
                return Ok(u);
            }
            if r > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let next = u - r * u.cosh().sqrt();
            u = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 {
                return Ok(u);
            }
        }
        Err(Error::NonConvergence(format!("root finding for G(u) = {target}")))
    }

    /// Max of `|u_tx − sinh u|` over the samples `(x, t)`, with `u_tx` from
    /// central differences of step `h`.
    pub fn check(&self, samples: &[(f64, f64)], h: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &(x, t) in samples {
            let u = |dx: f64, dt: f64| self.solve(x + dx, t + dt);
            let u_tx = (u(h, h)? - u(h, -h)? - u(-h, h)? + u(-h, -h)?) / (4.0 * h * h);
            worst = worst.max((u_tx - u(0.0, 0.0)?.sinh()).abs());
        }
        Ok(worst)
    }
}

/// A small grid of `(x, t)` samples around the origin.
pub fn sample_grid(radius: f64, per_axis: usize) -> Vec<(f64, f64)> {
    let step = if per_axis > 1 { 2.0 * radius / (per_axis - 1) as f64 } else { 0.0 };
    let at = |i: usize| if per_axis > 1 { -radius + step * i as f64 } else { 0.0 };
    (0..per_axis).flat_map(|i| (0..per_axis).map(move |j| (at(i), at(j)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Names;
    use crate::ranking::Ranking;

    fn jv(a: &[u32]) -> JetVar {
        JetVar::from_slice(0, a)
    }

    fn s12() -> DiffSystem {
        DiffSystem::parse(
            Names::default(),
            Ranking::default_for(2, 1),
            &[("f1", "u02 - 1/2*u01^2*tanh(u)"), ("f2", "u10 - 2*cosh(u)/u01")],
        )
        .unwrap()
    }

    fn data(u: f64, u01: f64) -> ParametricData {
        ParametricData::new([(jv(&[0, 0]), u), (jv(&[0, 1]), u01)])
    }

    #[test]
    fn classification() {
        let c = classify(&s12(), 3);
        let par: Vec<_> = c.parametric().cloned().collect();
        assert_eq!(par, vec![jv(&[0, 0]), jv(&[0, 1])]);
        assert_eq!(c.principal().count(), 8);
        let f = DiffSystem::parse(Names::default(), Ranking::default_for(2, 1), &[("f", "u11 - sinh(u)")]).unwrap();
        let c = classify(&f, 2);
        assert_eq!(c.principal().cloned().collect::<Vec<_>>(), vec![jv(&[1, 1])]);
        assert_eq!(classify(&f, 0).principal().count(), 0);
    }

    #[test]
    fn point_values() {
        let sol = evaluate_point(&s12(), &[0.0, 0.0], &data(1.0, 1.0), 4).unwrap();
        let expected = 0.5 * 1f64.tanh();
        assert!((sol.values[&jv(&[0, 2])] - expected).abs() < 1e-15);
        assert!((sol.values[&jv(&[1, 0])] - 2.0 * 1f64.cosh()).abs() < 1e-15);
        assert_eq!(sol.values.len(), 15);
        assert!(consistency(&s12(), &sol, &data(1.0, 1.0)).unwrap() < 1e-9);
    }

    #[test]
    fn singular_and_missing_data() {
        let err = evaluate_point(&s12(), &[0.0, 0.0], &data(1.0, 0.0), 3).unwrap_err();
        assert_eq!(err, Error::SingularData { equation: "f2".into(), jet: "u[1,0]".into() });
        let err = evaluate_point(&s12(), &[0.0, 0.0], &ParametricData::new([(jv(&[0, 0]), 1.0)]), 3).unwrap_err();
        assert_eq!(err, Error::MissingParametric("u[0,1]".into()));
        let f = DiffSystem::parse(Names::default(), Ranking::default_for(2, 1), &[("f", "u11 - sinh(u)")]).unwrap();
        let sol = evaluate_point(&f, &[0.0, 0.0], &ParametricData::default().with_default(0.0), 3).unwrap();
        assert_eq!(sol.values[&jv(&[1, 1])], 0.0);
    }

    #[test]
    fn residual_controls() {
        let sol = evaluate_point(&s12(), &[0.0, 0.0], &data(1.0, 1.0), 8).unwrap();
        let offs = circle_offsets(2, 0.05, 16);
        let names = Names::default();
        let f = Expr::parse("u11 - sinh(u)", &names).unwrap();
        assert!(sol.residual(&[f], &offs).unwrap() < 1e-6);
        let bad = Expr::parse("u10 - 1", &names).unwrap();
        assert!(sol.residual(&[bad], &offs).unwrap() > 0.5);
    }

    #[test]
    fn simpson_and_relation() {
        let v = adaptive_simpson(&|x| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
        let rel = ImplicitRelation::new(1.0, 0.0).unwrap();
        let u = rel.solve(0.3, 0.1).unwrap();
        assert!((ImplicitRelation::g(u) - 0.5).abs() < 1e-12);
        assert!(ImplicitRelation::new(0.0, 0.0).is_err());
    }

    #[test]
    fn relation_sign_matters() {
        let grid = sample_grid(0.2, 3);
        let rel = ImplicitRelation::new(1.0, 0.0).unwrap();
        assert!(rel.check(&grid, 1e-3).unwrap() < 1e-4);
        // With the opposite time coefficient the relation solves
        // u_tx = -sinh(u) instead.
        let flipped = rel.with_t_coefficient(-2.0);
        assert!(flipped.check(&grid, 1e-3).unwrap() > 1e-2);
    }
}
