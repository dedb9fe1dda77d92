//! Operator tuples over the ring of total-derivative polynomials, the
//! pairwise syzygies of leading terms, and cross-derivative differences.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{apply_power, diamond, divisibility, JetVar, MultiIndex};
use crate::ranking::Ranking;
use crate::reduce::{DiffSystem, Equation};

/// `Σ c_α D^α` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpPoly(BTreeMap<MultiIndex, BigRational>);

impl OpPoly {
    pub fn zero() -> Self {
        OpPoly::default()
    }

    pub fn monomial(c: BigRational, alpha: MultiIndex) -> Self {
        let mut p = OpPoly::zero();
        p.add_term(alpha, c);
        p
    }

    /// `D^alpha` with coefficient 1.
    pub fn power(alpha: MultiIndex) -> Self {
        OpPoly::monomial(BigRational::one(), alpha)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: BigRational) {
        let slot = self.0.entry(alpha.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&alpha);
        }
    }

    pub fn neg(&self) -> Self {
        OpPoly(self.0.iter().map(|(a, c)| (a.clone(), -c)).collect())
    }

    /// `D^nu ∘ self`.
    pub fn prolong(&self, nu: &MultiIndex) -> Self {
        OpPoly(self.0.iter().map(|(a, c)| (a.add(nu), c.clone())).collect())
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        self.0.iter().fold(Expr::zero(), |acc, (a, c)| acc + Expr::rational(c.clone()) * apply_power(e, a))
    }
}

/// An element of 𝔻^k: one operator polynomial per slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyzygyOp {
    pub slots: Vec<OpPoly>,
}

impl SyzygyOp {
    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn prolong(&self, nu: &MultiIndex) -> Self {
        SyzygyOp { slots: self.slots.iter().map(|s| s.prolong(nu)).collect() }
    }

    /// Applies the tuple to jet variables.
    pub fn annihilates(&self, y: &[JetVar]) -> Result<bool> {
        let fs: Vec<Expr> = y.iter().map(JetVar::to_expr).collect();
        Ok(apply_syzygy(self, &fs)?.is_zero())
    }
}

/// `σ_ij = D^{α⋄β} e_i − D^{β⋄α} e_j` for `y_i = u_α`, `y_j = u_β`.
pub fn sigma(y: &[JetVar], i: usize, j: usize) -> Result<SyzygyOp> {
    let (a, b) = (&y[i], &y[j]);
    if a.unknown != b.unknown {
        return Err(Error::UnknownMismatch);
    }
    let mut slots = vec![OpPoly::zero(); y.len()];
    slots[i].add_term(diamond(&a.order, &b.order)?, BigRational::one());
    slots[j].add_term(diamond(&b.order, &a.order)?, -BigRational::one());
    Ok(SyzygyOp { slots })
}

/// `Σ s_k(f_k)`.
pub fn apply_syzygy(s: &SyzygyOp, fs: &[Expr]) -> Result<Expr> {
    if s.arity() != fs.len() {
        return Err(Error::ArityMismatch { expected: s.arity(), got: fs.len() });
    }
    Ok(s.slots.iter().zip(fs).fold(Expr::zero(), |acc, (p, f)| acc + p.apply(f)))
}

/// Writes the two-term syzygy `D^mu e_i − D^eta e_j` as `D^nu σ_ij`,
/// returning `nu`. `None` when the operator is not a syzygy of `y` or the
/// unknowns differ.
pub fn as_prolonged_sigma(y: &[JetVar], i: usize, j: usize, mu: &MultiIndex, eta: &MultiIndex) -> Option<MultiIndex> {
    if y[i].prolonged(mu) != y[j].prolonged(eta) {
        return None;
    }
    let s = sigma(y, i, j).ok()?;
    let d = diamond(&y[i].order, &y[j].order).ok()?;
    let nu = divisibility(&d, mu)?;
    let mut target = vec![OpPoly::zero(); y.len()];
    target[i].add_term(mu.clone(), BigRational::one());
    target[j].add_term(eta.clone(), -BigRational::one());
    (s.prolong(&nu).slots == target).then_some(nu)
}

/// `τ(f1, f2) = D^{α⋄β} f1 − D^{β⋄α} f2` for orderly solvable `f1`, `f2`
/// with leading terms `u_α`, `u_β` on the same unknown.
pub fn tau(f1: &Expr, f2: &Expr, rk: &Ranking) -> Result<Expr> {
    let lead = |f: &Expr| {
        rk.leading_term(f)
            .map(|(v, _)| v)
            .ok_or_else(|| Error::NotOrderlySolvable { name: String::new(), expr: f.to_string() })
    };
    let (a, b) = (lead(f1)?, lead(f2)?);
    if a.unknown != b.unknown {
        return Err(Error::UnknownMismatch);
    }
    Ok(apply_power(f1, &diamond(&a.order, &b.order)?) - apply_power(f2, &diamond(&b.order, &a.order)?))
}

/// `τ` of two equations, computed from their tails so the prolonged
/// leading terms cancel exactly.
pub fn tau_equations(e1: &Equation, e2: &Equation) -> Result<Expr> {
    if e1.lead.unknown != e2.lead.unknown {
        return Err(Error::UnknownMismatch);
    }
    let d1 = diamond(&e1.lead.order, &e2.lead.order)?;
    let d2 = diamond(&e2.lead.order, &e1.lead.order)?;
    Ok(apply_power(&e1.tail, &d1) - apply_power(&e2.tail, &d2))
}

/// Index pairs `(i, j)`, `i < j`, whose leading terms share an unknown.
pub fn critical_pairs(s: &DiffSystem) -> Vec<(usize, usize)> {
    let eqs = s.equations();
    let mut out = Vec::new();
    for i in 0..eqs.len() {
        for j in i + 1..eqs.len() {
            if eqs[i].lead.unknown == eqs[j].lead.unknown {
                out.push((i, j));
            }
        }
    }
    out
}
