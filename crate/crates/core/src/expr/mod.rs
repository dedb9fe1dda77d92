//! Canonical symbolic expressions.
//!
//! Every [`Expr`] is a reduced fraction of two polynomials over ℚ whose
//! generators are atoms, exponentials, and logarithms. The hyperbolic
//! functions are rewritten into exponentials on construction, so the
//! identities `cosh² − sinh² = 1`, `tanh = sinh/cosh` and the addition
//! formulas hold structurally. Denominators are normalized to have no
//! exponential unit factor and leading coefficient one.

mod atom;
mod eval;
mod format;
mod gcd;
mod parse;
mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

pub use atom::Names;
pub use atom::Atom;
pub use eval::{ZeroTestConfig, ZeroVerdict};

pub(crate) use atom::{Gen, Rat};
use poly::{Monomial, Poly};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Frac {
    num: Poly,
    den: Poly,
    atoms: BTreeSet<Atom>,
}

/// An immutable, canonically normalized expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Frac>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

fn collect_atoms(p: &Poly, out: &mut BTreeSet<Atom>) {
    for g in p.gens() {
        match g {
            Gen::Atom(a) => {
                out.insert(a);
            }
            Gen::Exp(b) | Gen::Log(b) => out.extend(b.atoms().iter().cloned()),
        }
    }
}

impl Expr {
    /// Builds `num/den` without normalizing; callers guarantee canonicity.
    fn raw(num: Poly, den: Poly) -> Expr {
        let mut atoms = BTreeSet::new();
        collect_atoms(&num, &mut atoms);
        collect_atoms(&den, &mut atoms);
        Expr(Arc::new(Frac { num, den, atoms }))
    }

    fn from_poly(p: Poly) -> Expr {
        Expr::raw(p, Poly::one())
    }

    fn normalized(num: Poly, den: Poly) -> Result<Expr> {
        Expr::normalized_against(num, den, None)
    }

    /// Cancels common factors and fixes the denominator's unit and leading
    /// coefficient. With `divisor` set, only factors of `divisor` are
    /// looked for; `Some(1)` skips cancellation entirely.
    fn normalized_against(num: Poly, den: Poly, divisor: Option<&Poly>) -> Result<Expr> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        if let Some(c) = den.as_constant() {
            return Ok(Expr::from_poly(num.scale(&c.recip())));
        }
        let (mut num, mut den) = (num, den);
        let divisor = divisor.unwrap_or(&den);
        if divisor.as_constant().is_none() && num.as_constant().is_none() {
            let g = poly::gcd(&num, divisor);
            if g.as_constant().is_none() {
                num = poly::div_exact(&num, &g).expect("gcd divides numerator");
                den = poly::div_exact(&den, &g).expect("gcd divides denominator");
            }
        }
        let unit = den.unit_part();
        if !unit.is_one() {
            let inv = poly::invert_monomial(&unit);
            num = num.mul_monomial(&inv, &Rat::one());
            den = den.mul_monomial(&inv, &Rat::one());
        }
        let lc = den.leading_coefficient().cloned().expect("nonzero denominator").recip();
        if !lc.is_one() {
            num = num.scale(&lc);
            den = den.scale(&lc);
        }
        Ok(Expr::raw(num, den))
    }

    pub fn zero() -> Expr {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn int(i: i64) -> Expr {
        Expr::rational(Rat::from_integer(BigInt::from(i)))
    }

    pub fn frac(p: i64, q: i64) -> Expr {
        Expr::rational(Rat::new(BigInt::from(p), BigInt::from(q)))
    }

    pub(crate) fn rational(r: Rat) -> Expr {
        Expr::from_poly(Poly::constant(r))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::from_poly(Poly::term(Monomial::gen(Gen::Atom(a), Rat::one()), Rat::one()))
    }

    pub fn indep(k: usize) -> Expr {
        Expr::atom(Atom::Indep(k))
    }

    pub fn param(name: &str) -> Expr {
        Expr::atom(Atom::Param(name.into()))
    }

    /// Atoms the canonical form depends on, including those inside kernels.
    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.0.atoms
    }

    pub fn depends_on(&self, a: &Atom) -> bool {
        self.0.atoms.contains(a)
    }

    pub fn jet_atoms(&self) -> impl Iterator<Item = &crate::jet::JetVar> {
        self.0.atoms.iter().filter_map(Atom::jet)
    }

    /// Structural zero test on the canonical form.
    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.den.is_one() && self.0.num.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.0.atoms.is_empty() && self.as_rational().is_some()
    }

    pub(crate) fn as_rational(&self) -> Option<Rat> {
        if self.0.den.is_one() {
            self.0.num.as_constant()
        } else {
            None
        }
    }

    /// The value as `f64` when the expression is a rational constant.
    pub fn as_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|r| r.to_f64())
    }

    /// Number of terms in numerator plus denominator, a rough size measure.
    pub fn size(&self) -> usize {
        self.0.num.len() + self.0.den.len()
    }

    pub fn recip(&self) -> Result<Expr> {
        Expr::normalized(self.0.den.clone(), self.0.num.clone())
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self * &other.recip()?)
    }

    pub fn powi(&self, k: i64) -> Result<Expr> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut base = self.clone();
        let mut acc = Expr::one();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Raise to a rational power. Only integer exponents, and arbitrary
    /// exponents of pure exponential monomials, are supported.
    pub(crate) fn pow_rational(&self, r: &Rat) -> Result<Expr> {
        if r.is_integer() {
            let k = r.to_integer().to_i64().ok_or_else(|| Error::NonIntegerPower(r.to_string()))?;
            return self.powi(k);
        }
        if self.0.den.is_one() && self.0.num.len() == 1 {
            let (m, c) = self.0.num.terms().next().unwrap();
            if c.is_one() && m.factors().iter().all(|(g, _)| g.is_unit()) {
                let scaled = m.factors().iter().map(|(g, e)| (g.clone(), e * r)).collect::<Vec<_>>();
                let mut mono = Monomial::one();
                for (g, e) in scaled {
                    mono = mono.mul(&Monomial::gen(g, e));
                }
                return Ok(Expr::from_poly(Poly::term(mono, Rat::one())));
            }
        }
        Err(Error::NonIntegerPower(r.to_string()))
    }

    pub fn exp(&self) -> Expr {
        let den = self.0.den.clone();
        let mut mono = Monomial::one();
        let mut extra = Expr::one();
        for (m, c) in self.0.num.terms() {
            let (base, k) = if m.is_one() && den.is_one() {
                (Expr::one(), c.clone())
            } else if den.is_one() {
                if let [(Gen::Log(arg), e)] = m.factors() {
                    if e.is_one() && c.is_integer() {
                        let k = c.to_integer().to_i64().expect("small integer exponent");
                        extra = &extra * &arg.powi(k).expect("log argument is nonzero");
                        continue;
                    }
                }
                (Expr::from_poly(Poly::term(m.clone(), Rat::one())), c.clone())
            } else {
                let base = Expr::normalized(Poly::term(m.clone(), Rat::one()), den.clone())
                    .expect("nonzero denominator");
                // m/den reduces to a single-term numerator over a monic
                // denominator; its coefficient moves into the exponent.
                let coeff = base.0.num.terms().next().map(|(_, c)| c.clone()).unwrap();
                let base = Expr::raw(base.0.num.scale(&coeff.recip()), base.0.den.clone());
                (base, c * coeff)
            };
            mono = mono.mul(&Monomial::gen(Gen::Exp(Arc::new(base)), k));
        }
        &Expr::from_poly(Poly::term(mono, Rat::one())) * &extra
    }

    pub fn log(&self) -> Result<Expr> {
        if let Some(c) = self.as_rational() {
            if !c.is_positive() {
                return Err(Error::Domain(format!("log of {c}")));
            }
            if c.is_one() {
                return Ok(Expr::zero());
            }
        }
        if self.0.den.is_one() && self.0.num.len() == 1 {
            let (m, c) = self.0.num.terms().next().unwrap();
            if c.is_one() && !m.is_one() && m.factors().iter().all(|(g, _)| g.is_unit()) {
                // log Π exp(b)^k = Σ k·b
                let mut out = Expr::zero();
                for (g, e) in m.factors() {
                    if let Gen::Exp(b) = g {
                        out = &out + &(&**b * &Expr::rational(e.clone()));
                    }
                }
                return Ok(out);
            }
        }
        Ok(Expr::from_poly(Poly::term(Monomial::gen(Gen::Log(Arc::new(self.clone())), Rat::one()), Rat::one())))
    }

    pub fn sinh(&self) -> Expr {
        (&self.exp() - &(-self).exp()) * Expr::frac(1, 2)
    }

    pub fn cosh(&self) -> Expr {
        (&self.exp() + &(-self).exp()) * Expr::frac(1, 2)
    }

    pub fn tanh(&self) -> Expr {
        let e2 = (self * &Expr::int(2)).exp();
        (&e2 - &Expr::one()).checked_div(&(&e2 + &Expr::one())).expect("exp(2a) + 1 is nonzero")
    }

    /// Applies the derivation that maps each atom `a` to `d(a)` (`None`
    /// meaning zero), extended by the sum, product, and chain rules.
    pub fn derive(&self, d: &dyn Fn(&Atom) -> Option<Expr>) -> Expr {
        let mut cache = BTreeMap::new();
        let dn = derive_poly(&self.0.num, d, &mut cache);
        if self.0.den.is_one() {
            return dn;
        }
        let dd = derive_poly(&self.0.den, d, &mut cache);
        let den = Expr::from_poly(self.0.den.clone());
        (&dn - &(self * &dd)).checked_div(&den).expect("denominator is nonzero")
    }

    /// Partial derivative with respect to one atom.
    pub fn partial(&self, v: &Atom) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        self.derive(&|a: &Atom| (a == v).then(Expr::one))
    }

    /// Replaces atoms according to `f` (`None` keeps the atom).
    pub fn map_atoms(&self, f: &dyn Fn(&Atom) -> Option<Expr>) -> Result<Expr> {
        if !self.0.atoms.iter().any(|a| f(a).is_some()) {
            return Ok(self.clone());
        }
        let num = map_poly(&self.0.num, f)?;
        if self.0.den.is_one() {
            return Ok(num);
        }
        let den = map_poly(&self.0.den, f)?;
        num.checked_div(&den)
    }

    /// Replaces every occurrence of `target` by `replacement`.
    pub fn substitute(&self, target: &Atom, replacement: &Expr) -> Result<Expr> {
        if !self.depends_on(target) {
            return Ok(self.clone());
        }
        self.map_atoms(&|a: &Atom| (a == target).then(|| replacement.clone()))
    }

    /// Splits `self = c·v + d` with `c` and `d` free of `v`, if possible.
    pub fn linear_in(&self, v: &Atom) -> Option<(Expr, Expr)> {
        let c = self.partial(v);
        if c.depends_on(v) {
            return None;
        }
        let d = self - &(&c * &Expr::atom(v.clone()));
        if d.depends_on(v) {
            return None;
        }
        Some((c, d))
    }

    pub fn parse(text: &str, names: &Names) -> Result<Expr> {
        parse::parse(text, names)
    }

    /// Deterministic text form readable by [`Expr::parse`].
    pub fn format(&self, names: &Names) -> String {
        format::format(self, names)
    }
}

fn derive_poly(p: &Poly, d: &dyn Fn(&Atom) -> Option<Expr>, cache: &mut BTreeMap<Gen, Expr>) -> Expr {
    let mut acc = Expr::zero();
    let mut poly_part = Poly::zero();
    for (m, c) in p.terms() {
        for (g, e) in m.factors() {
            let dg = match cache.get(g) {
                Some(v) => v.clone(),
                None => {
                    let v = match g {
                        Gen::Atom(a) => d(a).unwrap_or_else(Expr::zero),
                        // d(exp b) = exp(b)·db; the exp(b) factor stays in m below.
                        Gen::Exp(b) => b.derive(d),
                        Gen::Log(arg) => arg.derive(d).checked_div(arg).expect("log argument is nonzero"),
                    };
                    cache.insert(g.clone(), v.clone());
                    v
                }
            };
            if dg.is_zero() {
                continue;
            }
            let (rest, _) = m.split_off(g);
            let rest = if g.is_unit() { m.clone() } else { rest.mul(&Monomial::gen(g.clone(), e - Rat::one())) };
            let coeff = c * e;
            if dg.0.den.is_one() {
                poly_part = poly_part.add(&dg.0.num.mul_monomial(&rest, &coeff));
            } else {
                let t = Expr::from_poly(Poly::term(rest, coeff));
                acc = &acc + &(&t * &dg);
            }
        }
    }
    &acc + &Expr::from_poly(poly_part)
}

fn map_poly(p: &Poly, f: &dyn Fn(&Atom) -> Option<Expr>) -> Result<Expr> {
    let mut cache: BTreeMap<Gen, Option<Expr>> = BTreeMap::new();
    let mut affected = |g: &Gen| -> Result<Option<Expr>> {
        if let Some(v) = cache.get(g) {
            return Ok(v.clone());
        }
        let v = match g {
            Gen::Atom(a) => f(a),
            Gen::Exp(b) | Gen::Log(b) => {
                let nb = b.map_atoms(f)?;
                if nb == **b {
                    None
                } else {
                    Some(nb)
                }
            }
        };
        cache.insert(g.clone(), v.clone());
        Ok(v)
    };
    let mut powers: BTreeMap<(Gen, Rat), Expr> = BTreeMap::new();
    // Terms are summed over one running denominator and normalized once.
    let mut poly_part = Poly::zero();
    let mut num = Poly::zero();
    let mut den = Poly::one();
    for (m, c) in p.terms() {
        let mut kept = Monomial::one();
        let mut product = Expr::one();
        for (g, e) in m.factors() {
            match affected(g)? {
                None => kept = kept.mul(&Monomial::gen(g.clone(), e.clone())),
                Some(v) => {
                    let key = (g.clone(), e.clone());
                    let factor = match powers.get(&key) {
                        Some(f) => f.clone(),
                        None => {
                            let f = match g {
                                Gen::Atom(_) => v.pow_rational(e)?,
                                Gen::Exp(_) => (&v * &Expr::rational(e.clone())).exp(),
                                Gen::Log(_) => v.log()?.pow_rational(e)?,
                            };
                            powers.insert(key, f.clone());
                            f
                        }
                    };
                    product = &product * &factor;
                }
            }
        }
        if product.is_one() {
            poly_part.add_term(kept, c.clone());
            continue;
        }
        let t = Poly::term(kept, c.clone()).mul(&product.0.num);
        let pd = &product.0.den;
        if *pd == den {
            num = num.add(&t);
        } else if pd.is_one() {
            num = num.add(&t.mul(&den));
        } else if let Some(q) = (!den.is_one()).then(|| poly::div_exact(&den, pd)).flatten() {
            num = num.add(&t.mul(&q));
        } else if let Some(q) = poly::div_exact(pd, &den) {
            num = num.mul(&q).add(&t);
            den = pd.clone();
        } else {
            num = num.mul(pd).add(&t.mul(&den));
            den = den.mul(pd);
        }
    }
    num = num.add(&poly_part.mul(&den));
    Expr::normalized(num, den)
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let (a, b) = (&*self.0, &*rhs.0);
        if a.den == b.den {
            let num = a.num.add(&b.num);
            if a.den.is_one() {
                return Expr::from_poly(num);
            }
            return Expr::normalized(num, a.den.clone()).expect("nonzero denominator");
        }
        // Any factor shared by the new numerator and denominator divides
        // gcd(a.den, b.den).
        let g = poly::gcd(&a.den, &b.den);
        let (ad, bd) = if g.as_constant().is_some() {
            (a.den.clone(), b.den.clone())
        } else {
            (poly::div_exact(&a.den, &g).unwrap(), poly::div_exact(&b.den, &g).unwrap())
        };
        let num = a.num.mul(&bd).add(&b.num.mul(&ad));
        let den = a.den.mul(&bd);
        Expr::normalized_against(num, den, Some(&g)).expect("nonzero denominator")
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        let (a, b) = (&*self.0, &*rhs.0);
        if a.den.is_one() && b.den.is_one() {
            return Expr::from_poly(a.num.mul(&b.num));
        }
        // Cross-cancel before multiplying out.
        let cancel = |n: &Poly, d: &Poly| -> (Poly, Poly) {
            if d.is_one() || n.as_constant().is_some() {
                return (n.clone(), d.clone());
            }
            let g = poly::gcd(n, d);
            if g.as_constant().is_some() {
                (n.clone(), d.clone())
            } else {
                (poly::div_exact(n, &g).unwrap(), poly::div_exact(d, &g).unwrap())
            }
        };
        let (an, bd) = cancel(&a.num, &b.den);
        let (bn, ad) = cancel(&b.num, &a.den);
        // Both inputs are reduced, so the cross-cancelled product is too.
        Expr::normalized_against(an.mul(&bn), ad.mul(&bd), Some(&Poly::one())).expect("nonzero denominator")
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::raw(self.0.num.neg(), self.0.den.clone())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

/// Panics on division by zero; use [`Expr::checked_div`] when the divisor
/// may vanish.
impl<'a> Div<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { (&self).$m(rhs) }
        }
        impl<'a> $tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { self.$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(&Names::default()))
    }
}

impl From<i64> for Expr {
    fn from(i: i64) -> Expr {
        Expr::int(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s, &Names::default().with_consts(&["r", "s"])).unwrap()
    }

    #[test]
    fn hyperbolic_identity() {
        assert!(p("cosh(u00)^2 - sinh(u00)^2").is_one());
    }

    #[test]
    fn tanh_rewrite() {
        assert!(p("sinh(u00)*tanh(u00) - sinh(u00)^2/cosh(u00)").is_zero());
    }

    #[test]
    fn exponent_addition() {
        assert_eq!(p("exp(3*u00)*exp(-u00)"), p("exp(2*u00)"));
        assert!(p("exp(u00)*exp(-u00)").is_one());
    }

    #[test]
    fn double_angle() {
        assert!(p("sinh(2*u00)/2 - sinh(u00)*cosh(u00)").is_zero());
    }

    #[test]
    fn gcd_cancellation() {
        assert_eq!(p("(u01^2 - u00^2)/(u01 + u00)"), p("u01 - u00"));
        assert_eq!(p("(x1*u00 + x1)/(2*x1)"), p("1/2*u00 + 1/2"));
    }

    #[test]
    fn division_by_literal_zero() {
        let e = Expr::parse("u00/(u01 - u01)", &Names::default());
        assert!(matches!(e, Err(Error::Syntax { pos: 3, .. })));
        assert_eq!(Expr::one().checked_div(&Expr::zero()), Err(Error::DivisionByZero));
        assert_eq!(Expr::zero().recip(), Err(Error::DivisionByZero));
    }

    #[test]
    fn substitute_examples() {
        let u11 = Atom::Jet(crate::jet::JetVar::from_slice(0, &[1, 1]));
        let r = p("u11 - sinh(u00)").substitute(&u11, &p("sinh(u00)")).unwrap();
        assert!(r.is_zero());
        let r = p("3/2*u01^2*u11 - cosh(u00)*u02 - sinh(u00)*u01^2")
            .substitute(&u11, &p("sinh(u00)"))
            .unwrap();
        assert_eq!(r, p("cosh(u00)*(1/2*u01^2*sinh(u00)/cosh(u00) - u02)"));
        assert!(!r.depends_on(&u11));
        let u01 = Atom::Jet(crate::jet::JetVar::from_slice(0, &[0, 1]));
        assert_eq!(p("x1 + u00").substitute(&u01, &Expr::int(5)).unwrap(), p("x1 + u00"));
        let e = p("sinh(u01)*u01");
        assert_eq!(e.substitute(&u01, &Expr::atom(u01.clone())).unwrap(), e);
    }

    #[test]
    fn partial_examples() {
        let u00 = Atom::Jet(crate::jet::JetVar::from_slice(0, &[0, 0]));
        let u01 = Atom::Jet(crate::jet::JetVar::from_slice(0, &[0, 1]));
        assert_eq!(p("sinh(u00)").partial(&u00), p("cosh(u00)"));
        assert_eq!(p("u01^3").partial(&u01), p("3*u01^2"));
        assert_eq!(p("2*cosh(u00)/u01").partial(&u01), p("-2*cosh(u00)/u01^2"));
        assert_eq!(p("log(u01)").partial(&u01), p("1/u01"));
        assert_eq!(p("exp(u00*u01)").partial(&u00), p("u01*exp(u00*u01)"));
    }

    #[test]
    fn depends_on_examples() {
        assert_eq!(p("u11 - sinh(u00)").atoms().len(), 2);
        assert!(p("1").atoms().is_empty());
        let a: Vec<_> = p("2*cosh(u00)/u01").atoms().iter().cloned().collect();
        assert_eq!(
            a,
            vec![
                Atom::Jet(crate::jet::JetVar::from_slice(0, &[0, 0])),
                Atom::Jet(crate::jet::JetVar::from_slice(0, &[0, 1]))
            ]
        );
        assert!(p("u01 - u01 + x1").atoms().contains(&Atom::Indep(0)));
    }

    #[test]
    fn exp_log_interplay() {
        assert_eq!(p("exp(log(u01))"), p("u01"));
        assert_eq!(p("exp(2*log(u01))"), p("u01^2"));
        assert_eq!(p("log(exp(u00))"), p("u00"));
        assert!(p("log(1)").is_zero());
        assert!(Expr::parse("log(0)", &Names::default()).is_err());
    }

    #[test]
    fn exp_with_rational_argument() {
        assert_eq!(p("exp(u00/x1)*exp(u01/x1)"), p("exp((u00 + u01)/x1)"));
        assert_eq!(p("exp(1/2*u00)^2"), p("exp(u00)"));
        assert!(p("(exp(u00) - 1)/(exp(1/2*u00) - 1) - exp(1/2*u00) - 1").is_zero());
    }
}
