//! Reducibility conditions and the completion loop that turns an orderly
//! solvable system into a passive one.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{Expr, ZeroTestConfig, ZeroVerdict};
use crate::jet::MultiIndex;
use crate::reduce::{autoreduce, is_normalized, monicize, normalization_witness, DiffSystem, Equation, NormalForm};
use crate::reduce::{NormalizationWitness, ReductionTrace, DEFAULT_MAX_STEPS};
use crate::syzygy::{critical_pairs, tau_equations};

/// Normal form of one critical pair's cross-derivative difference.
#[derive(Clone, Debug, PartialEq)]
pub struct PairReport {
    pub first: String,
    pub second: String,
    pub tau: Expr,
    pub normal_form: NormalForm,
    pub verdict: ZeroVerdict,
}

/// Reduces `τ` of every critical pair modulo `s`.
pub fn check_reducibility(s: &DiffSystem, cfg: &ZeroTestConfig, max_steps: usize) -> Result<Vec<PairReport>> {
    let red = s.reducer();
    critical_pairs(s)
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (&s.equations()[i], &s.equations()[j]);
            let tau = tau_equations(a, b)?;
            let normal_form = red.normal_form(&tau, max_steps)?;
            let verdict = normal_form.remainder.zero_test(cfg)?;
            Ok(PairReport { first: a.name.clone(), second: b.name.clone(), tau, normal_form, verdict })
        })
        .collect()
}

/// Normalized, and every critical pair reduces to zero.
pub fn is_passive(s: &DiffSystem, cfg: &ZeroTestConfig, max_steps: usize) -> Result<bool> {
    Ok(is_normalized(s) && check_reducibility(s, cfg, max_steps)?.iter().all(|p| p.verdict.is_zero()))
}

/// Whether `f` lies in the differential ideal of a passive system, decided
/// by its normal form vanishing.
pub fn ideal_membership(f: &Expr, s: &DiffSystem, cfg: &ZeroTestConfig, max_steps: usize) -> Result<bool> {
    if !is_passive(s, cfg, max_steps)? {
        return Err(Error::NotPassive("ideal membership needs a passive system".into()));
    }
    Ok(s.normal_form(f, max_steps)?.remainder.zero_test(cfg)?.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletionLimits {
    pub max_new_equations: usize,
    /// Cap on reduction steps for each normal form.
    pub max_steps: usize,
}

impl Default for CompletionLimits {
    fn default() -> Self {
        CompletionLimits { max_new_equations: 32, max_steps: DEFAULT_MAX_STEPS }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum CompletionStatus {
    Passive,
    Incomplete(String),
    Failed(String),
}

impl CompletionStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CompletionStatus::Passive => "passive",
            CompletionStatus::Incomplete(_) => "incomplete",
            CompletionStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PairVerdict {
    Zero { probabilistic: bool },
    Promoted { equation: String },
    Failed { reason: String },
    Incomplete { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// The system after autoreduction, one formatted equation per entry.
    Autoreduce { generation: usize, system: Vec<String> },
    Pair {
        generation: usize,
        first: String,
        second: String,
        tau: String,
        reduction: ReductionTrace,
        remainder: String,
        #[serde(flatten)]
        verdict: PairVerdict,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CompletionTrace {
    pub events: Vec<TraceEvent>,
}

/// Outcome of [`complete`].
#[derive(Clone, Debug, PartialEq)]
pub struct PassivityReport {
    pub status: CompletionStatus,
    pub system: DiffSystem,
    pub trace: CompletionTrace,
    pub promotions: usize,
    /// Some zero verdict rested on sampling rather than cancellation.
    pub probabilistic: bool,
}

impl PassivityReport {
    /// Apexes of the principal cones: the leading terms.
    pub fn principal_cones(&self) -> Vec<(String, MultiIndex)> {
        self.system
            .equations()
            .iter()
            .map(|e| (self.system.names().unknowns[e.lead.unknown].clone(), e.lead.order.clone()))
            .collect()
    }

    pub fn to_json(&self, with_trace: bool) -> Value {
        let mut v = json!({
            "status": self.status.label(),
            "promotions": self.promotions,
            "probabilistic": self.probabilistic,
            "system": system_json(&self.system),
            "principal": self.principal_cones().into_iter().map(|(u, a)| json!({"unknown": u, "apex": a})).collect::<Vec<_>>(),
        });
        if let CompletionStatus::Incomplete(r) | CompletionStatus::Failed(r) = &self.status {
            v["reason"] = json!(r);
        }
        if with_trace {
            v["trace"] = serde_json::to_value(&self.trace).expect("trace serializes");
        }
        v
    }

    pub fn to_text(&self, with_trace: bool) -> String {
        let mut out = String::new();
        match &self.status {
            CompletionStatus::Passive => writeln!(out, "status: passive").unwrap(),
            CompletionStatus::Incomplete(r) => writeln!(out, "status: incomplete ({r})").unwrap(),
            CompletionStatus::Failed(r) => writeln!(out, "status: failed ({r})").unwrap(),
        }
        writeln!(out, "promotions: {}", self.promotions).unwrap();
        if self.probabilistic {
            writeln!(out, "note: some zero verdicts are probabilistic").unwrap();
        }
        let cones: Vec<String> = self.principal_cones().iter().map(|(u, a)| format!("{u}{a}")).collect();
        writeln!(out, "principal cones: {}", cones.join(" ")).unwrap();
        out.push_str(&self.system.to_string());
        if with_trace {
            for e in &self.trace.events {
                match e {
                    TraceEvent::Autoreduce { generation, system } => {
                        writeln!(out, "[{generation}] autoreduce -> {}", system.join("; ")).unwrap();
                    }
                    TraceEvent::Pair { generation, first, second, remainder, verdict, reduction, .. } => {
                        let v = match verdict {
                            PairVerdict::Zero { probabilistic: false } => "zero".to_string(),
                            PairVerdict::Zero { probabilistic: true } => "zero (probabilistic)".to_string(),
                            PairVerdict::Promoted { equation } => format!("promoted {equation}"),
                            PairVerdict::Failed { reason } => format!("failed: {reason}"),
                            PairVerdict::Incomplete { reason } => format!("incomplete: {reason}"),
                        };
                        writeln!(
                            out,
                            "[{generation}] tau({first},{second}) reduces in {} steps to {remainder}: {v}",
                            reduction.len()
                        )
                        .unwrap();
                    }
                }
            }
        }
        out
    }
}

pub fn system_json(s: &DiffSystem) -> Value {
    Value::Array(
        s.equations()
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "lead": s.format_atom(&e.lead),
                    "tail": s.format(&e.tail),
                })
            })
            .collect(),
    )
}

fn formatted(s: &DiffSystem) -> Vec<String> {
    s.equations().iter().map(|e| format!("{}: {}", e.name, s.format(&e.expr()))).collect()
}

fn fresh_name(s: &DiffSystem, counter: &mut usize) -> String {
    loop {
        *counter += 1;
        let name = format!("c{counter}");
        if s.equation(&name).is_none() {
            return name;
        }
    }
}

/// Completion: autoreduce, reduce `τ` of every critical pair, promote the
/// first nonzero remainder to a new equation and start over, until all
/// pairs reduce to zero or a limit is hit.
pub fn complete(input: &DiffSystem, cfg: &ZeroTestConfig, limits: &CompletionLimits) -> Result<PassivityReport> {
    let mut trace = CompletionTrace::default();
    let mut promotions = 0;
    let mut probabilistic = false;
    let mut counter = 0;
    let mut generation = 0;
    let mut s = autoreduce(input, cfg, limits.max_steps)?;
    trace.events.push(TraceEvent::Autoreduce { generation, system: formatted(&s) });
    let finish = |status, system, trace, promotions, probabilistic| {
        Ok(PassivityReport { status, system, trace, promotions, probabilistic })
    };
    'restart: loop {
        let red = s.reducer();
        for (i, j) in critical_pairs(&s) {
            let (a, b) = (&s.equations()[i], &s.equations()[j]);
            let tau = tau_equations(a, b)?;
            let event = |reduction: ReductionTrace, remainder: &Expr, verdict| TraceEvent::Pair {
                generation,
                first: a.name.clone(),
                second: b.name.clone(),
                tau: s.format(&tau),
                reduction,
                remainder: s.format(remainder),
                verdict,
            };
            let nf = match red.normal_form(&tau, limits.max_steps) {
                Ok(nf) => nf,
                Err(e) => {
                    let reason = e.to_string();
                    trace.events.push(event(
                        e.partial.trace,
                        &e.partial.remainder,
                        PairVerdict::Incomplete { reason: reason.clone() },
                    ));
                    let status = CompletionStatus::Incomplete(reason);
                    return finish(status, s.clone(), trace, promotions, probabilistic);
                }
            };
            let r = nf.remainder;
            let verdict = match r.zero_test(cfg) {
                Ok(v) => v,
                Err(e) => {
                    let reason = format!("zero test on tau({},{}): {e}", a.name, b.name);
                    trace.events.push(event(nf.trace, &r, PairVerdict::Failed { reason: reason.clone() }));
                    return finish(CompletionStatus::Failed(reason), s.clone(), trace, promotions, probabilistic);
                }
            };
            if verdict.is_zero() {
                probabilistic |= verdict.is_probabilistic();
                trace.events.push(event(nf.trace, &r, PairVerdict::Zero { probabilistic: verdict.is_probabilistic() }));
                continue;
            }
            let fail = |reason: String| (PairVerdict::Failed { reason: reason.clone() }, CompletionStatus::Failed(reason));
            let (pv, status) = if r.jet_atoms().next().is_none() {
                fail(format!("inconsistent: tau({},{}) reduces to {}", a.name, b.name, s.format(&r)))
            } else if promotions >= limits.max_new_equations {
                let reason = format!("limit of {} new equations reached", limits.max_new_equations);
                (PairVerdict::Incomplete { reason: reason.clone() }, CompletionStatus::Incomplete(reason))
            } else {
                match monicize(&r, s.ranking(), cfg)? {
                    Some((lead, tail)) => {
                        let name = fresh_name(&s, &mut counter);
                        trace.events.push(event(nf.trace, &r, PairVerdict::Promoted { equation: name.clone() }));
                        let mut eqs = s.equations().to_vec();
                        eqs.push(Equation { name, lead, tail });
                        let grown = s.with_equations(eqs)?;
                        drop(red);
                        s = autoreduce(&grown, cfg, limits.max_steps)?;
                        promotions += 1;
                        generation += 1;
                        trace.events.push(TraceEvent::Autoreduce { generation, system: formatted(&s) });
                        continue 'restart;
                    }
                    None => fail(format!(
                        "remainder of tau({},{}) cannot be solved for its highest derivative: {}",
                        a.name,
                        b.name,
                        s.format(&r)
                    )),
                }
            };
            trace.events.push(event(nf.trace, &r, pv));
            return finish(status, s.clone(), trace, promotions, probabilistic);
        }
        return finish(CompletionStatus::Passive, s, trace, promotions, probabilistic);
    }
}

/// Re-runs the steps recorded in `trace` from `input` and checks every
/// recorded intermediate result, returning the final system.
pub fn replay(input: &DiffSystem, trace: &CompletionTrace, cfg: &ZeroTestConfig, max_steps: usize) -> Result<DiffSystem> {
    let mismatch = |k: usize, what: &str| Error::TraceMismatch(format!("event {k}: {what}"));
    let mut s = input.clone();
    let mut pending: Option<DiffSystem> = None;
    for (k, ev) in trace.events.iter().enumerate() {
        match ev {
            TraceEvent::Autoreduce { system, .. } => {
                let base = pending.take().unwrap_or_else(|| s.clone());
                s = autoreduce(&base, cfg, max_steps)?;
                if formatted(&s) != *system {
                    return Err(mismatch(k, "autoreduced system differs"));
                }
            }
            TraceEvent::Pair { first, second, tau, remainder, verdict, .. } => {
                let a = s.equation(first).ok_or_else(|| mismatch(k, "unknown equation"))?;
                let b = s.equation(second).ok_or_else(|| mismatch(k, "unknown equation"))?;
                let t = tau_equations(a, b)?;
                if s.format(&t) != *tau {
                    return Err(mismatch(k, "tau differs"));
                }
                let r = match s.normal_form(&t, max_steps) {
                    Ok(nf) => nf.remainder,
                    Err(e) => e.partial.remainder,
                };
                if s.format(&r) != *remainder {
                    return Err(mismatch(k, "remainder differs"));
                }
                if let PairVerdict::Promoted { equation } = verdict {
                    let (lead, tail) =
                        monicize(&r, s.ranking(), cfg)?.ok_or_else(|| mismatch(k, "remainder not solvable"))?;
                    let mut eqs = s.equations().to_vec();
                    eqs.push(Equation { name: equation.clone(), lead, tail });
                    pending = Some(s.with_equations(eqs)?);
                }
            }
        }
    }
    Ok(s)
}

/// Summary produced by `check`: normalization plus every pair verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub witness: Option<NormalizationWitness>,
    pub pairs: Vec<PairReport>,
}

impl CheckReport {
    pub fn run(s: &DiffSystem, cfg: &ZeroTestConfig, max_steps: usize) -> Result<CheckReport> {
        Ok(CheckReport { witness: normalization_witness(s), pairs: check_reducibility(s, cfg, max_steps)? })
    }

    pub fn passive(&self) -> bool {
        self.witness.is_none() && self.pairs.iter().all(|p| p.verdict.is_zero())
    }

    pub fn failing_pairs(&self) -> impl Iterator<Item = &PairReport> {
        self.pairs.iter().filter(|p| !p.verdict.is_zero())
    }

    pub fn to_json(&self, s: &DiffSystem) -> Value {
        json!({
            "status": if self.passive() { "passive" } else { "not_passive" },
            "normalized": self.witness.is_none(),
            "witness": self.witness,
            "pairs": self.pairs.iter().map(|p| json!({
                "first": p.first,
                "second": p.second,
                "remainder": s.format(&p.normal_form.remainder),
                "steps": p.normal_form.trace.len(),
                "verdict": p.verdict,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self, s: &DiffSystem) -> String {
        let mut out = String::new();
        if self.passive() {
            writeln!(out, "passive").unwrap();
        } else {
            let mut reasons = Vec::new();
            if let Some(w) = &self.witness {
                reasons.push(match w {
                    NormalizationWitness::LeadInOrbit { equation, via, variable } => {
                        format!("leading term {variable} of {equation} is a derivative of the leading term of {via}")
                    }
                    NormalizationWitness::PrincipalInTail { equation, via, variable } => {
                        format!("tail of {equation} depends on {variable}, principal via {via}")
                    }
                });
            }
            reasons.extend(self.failing_pairs().map(|p| format!("pair ({},{})", p.first, p.second)));
            writeln!(out, "not passive: {}", reasons.join(", ")).unwrap();
        }
        for p in &self.pairs {
            let v = match p.verdict {
                ZeroVerdict::Zero => "zero",
                ZeroVerdict::ProbablyZero => "zero (probabilistic)",
                ZeroVerdict::NonZero => "nonzero",
            };
            writeln!(out, "tau({},{}) -> {}: {v}", p.first, p.second, s.format(&p.normal_form.remainder)).unwrap();
        }
        out
    }
}
