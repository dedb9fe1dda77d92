//! Multi-indices, jet coordinates, and the total derivatives acting on them.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::{Atom, Expr};
use crate::Error;

/// An element of ℕⁿ, used both as a derivative order and as an exponent of
/// the total-derivative monoid.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        MultiIndex(components)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit vector e_k (zero-based axis).
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = vec![0; n];
        v[k] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn shifted(&self, k: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[k] += 1;
        MultiIndex(v)
    }

    pub fn max(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Factorial α! = Π αᵢ!.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).map(f64::from).product::<f64>())
            .product()
    }

    /// All multi-indices of dimension `n` with order at most `max_order`,
    /// in graded lexicographic order.
    pub fn all_up_to(n: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for total in 0..=max_order {
            let mut cur = vec![0u32; n];
            compositions(total, 0, &mut cur, &mut out);
        }
        out
    }
}

fn compositions(remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        compositions(remaining - a, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// `α ⋄ β`, the componentwise `max(αᵢ, βᵢ) − αᵢ`.
pub fn diamond(alpha: &MultiIndex, beta: &MultiIndex) -> Result<MultiIndex, Error> {
    if alpha.dim() != beta.dim() {
        return Err(Error::DimensionMismatch { left: alpha.dim(), right: beta.dim() });
    }
    Ok(MultiIndex(alpha.0.iter().zip(&beta.0).map(|(a, b)| a.max(b) - a).collect()))
}

/// The δ with `β = α + δ`, if one exists.
pub fn divisibility(alpha: &MultiIndex, beta: &MultiIndex) -> Option<MultiIndex> {
    if alpha.divides(beta) {
        Some(MultiIndex(beta.0.iter().zip(&alpha.0).map(|(b, a)| b - a).collect()))
    } else {
        None
    }
}

/// The derivative coordinate u^i_α. `unknown` is zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JetVar {
    pub unknown: usize,
    pub order: MultiIndex,
}

impl JetVar {
    pub fn new(unknown: usize, order: MultiIndex) -> Self {
        JetVar { unknown, order }
    }

    pub fn from_slice(unknown: usize, order: &[u32]) -> Self {
        JetVar { unknown, order: MultiIndex::new(order.to_vec()) }
    }

    pub fn shifted(&self, k: usize) -> JetVar {
        JetVar { unknown: self.unknown, order: self.order.shifted(k) }
    }

    pub fn prolonged(&self, delta: &MultiIndex) -> JetVar {
        JetVar { unknown: self.unknown, order: self.order.add(delta) }
    }

    /// Whether `other` lies in the orbit of `self`, returning the exponent.
    pub fn divides(&self, other: &JetVar) -> Option<MultiIndex> {
        if self.unknown != other.unknown {
            return None;
        }
        divisibility(&self.order, &other.order)
    }

    pub fn to_expr(&self) -> Expr {
        Expr::atom(Atom::Jet(self.clone()))
    }
}

/// Structural order: unknown, then total order, then lexicographic. This is
/// only used to keep maps and printed sums deterministic; rankings are
/// separate comparators.
impl Ord for JetVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.unknown
            .cmp(&other.unknown)
            .then(self.order.order().cmp(&other.order.order()))
            .then_with(|| self.order.0.cmp(&other.order.0))
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total derivative D_k (zero-based axis `k`) in a jet space with `n`
/// independent variables.
pub fn total_derivative(e: &Expr, k: usize) -> Expr {
    e.derive(&|a: &Atom| match a {
        Atom::Indep(j) if *j == k => Some(Expr::one()),
        Atom::Indep(_) | Atom::Param(_) => None,
        Atom::Jet(v) => Some(Expr::atom(Atom::Jet(v.shifted(k)))),
    })
}

/// D^α e, applying axes in increasing order.
pub fn apply_power(e: &Expr, alpha: &MultiIndex) -> Expr {
    let mut out = e.clone();
    for (k, &times) in alpha.components().iter().enumerate() {
        for _ in 0..times {
            out = total_derivative(&out, k);
        }
    }
    out
}

/// Whether D_i D_j e and D_j D_i e agree.
pub fn commutativity_check(e: &Expr, i: usize, j: usize) -> bool {
    let a = total_derivative(&total_derivative(e, j), i);
    let b = total_derivative(&total_derivative(e, i), j);
    (a - b).is_zero()
}
