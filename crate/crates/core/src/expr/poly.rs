//! Polynomials over ℚ in generators (atoms, `exp`, `log`).
//!
//! Exponential generators are units: their exponents may be any rational,
//! which is how `exp(3u)·exp(-u)` collapses to `exp(2u)`. All other
//! generators carry non-negative integer exponents.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::atom::{Gen, Rat};
use super::gcd::{self, IPoly};

/// Product of generator powers, sorted by descending generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub(crate) struct Monomial(Vec<(Gen, Rat)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn gen(g: Gen, e: Rat) -> Self {
        if e.is_zero() {
            Monomial::one()
        } else {
            Monomial(vec![(g, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Gen, Rat)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (ga, ea) = &self.0[i];
            let (gb, eb) = &other.0[j];
            match ga.cmp(gb) {
                std::cmp::Ordering::Greater => {
                    out.push((ga.clone(), ea.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((gb.clone(), eb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = ea + eb;
                    if !e.is_zero() {
                        out.push((ga.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.0[i..].iter().cloned());
        out.extend(other.0[j..].iter().cloned());
        Monomial(out)
    }

    /// The monomial with generator `g` removed, and its exponent.
    pub fn split_off(&self, g: &Gen) -> (Monomial, Rat) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut exp = Rat::zero();
        for (h, e) in &self.0 {
            if h == g {
                exp = e.clone();
            } else {
                rest.push((h.clone(), e.clone()));
            }
        }
        (Monomial(rest), exp)
    }

    fn exponent_of(&self, g: &Gen) -> Rat {
        self.0.iter().find(|(h, _)| h == g).map(|(_, e)| e.clone()).unwrap_or_else(Rat::zero)
    }

    fn from_sorted(mut v: Vec<(Gen, Rat)>) -> Monomial {
        v.retain(|(_, e)| !e.is_zero());
        v.sort_by(|a, b| b.0.cmp(&a.0));
        Monomial(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub(crate) struct Poly(BTreeMap<Monomial, Rat>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Rat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.0.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.0.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.0.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.0 {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul_monomial(&self, mono: &Monomial, k: &Rat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        // Multiplying every key by the same monomial can reorder keys when
        // exponents cancel, so rebuild the map.
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            out.add_term(m.mul(mono), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn leading_coefficient(&self) -> Option<&Rat> {
        self.0.iter().next_back().map(|(_, c)| c)
    }

    pub fn gens(&self) -> BTreeSet<Gen> {
        self.0.keys().flat_map(|m| m.0.iter().map(|(g, _)| g.clone())).collect()
    }

    /// The exponential unit `Π exp(b)^{min}` taken over every exponential
    /// generator at its minimal exponent across terms.
    pub fn unit_part(&self) -> Monomial {
        let mut mins: BTreeMap<Gen, Rat> = BTreeMap::new();
        let mut first = true;
        for m in self.0.keys() {
            let units: BTreeMap<Gen, Rat> =
                m.0.iter().filter(|(g, _)| g.is_unit()).map(|(g, e)| (g.clone(), e.clone())).collect();
            if first {
                mins = units;
                first = false;
            } else {
                let all: BTreeSet<Gen> = mins.keys().chain(units.keys()).cloned().collect();
                mins = all
                    .into_iter()
                    .map(|g| {
                        let a = mins.get(&g).cloned().unwrap_or_else(Rat::zero);
                        let b = units.get(&g).cloned().unwrap_or_else(Rat::zero);
                        let e = if a < b { a } else { b };
                        (g, e)
                    })
                    .collect();
            }
        }
        Monomial::from_sorted(mins.into_iter().collect())
    }
}

pub(crate) fn invert_monomial(m: &Monomial) -> Monomial {
    Monomial(m.0.iter().map(|(g, e)| (g.clone(), -e)).collect())
}

/// Shared encoding of several Laurent polynomials as integer polynomials.
struct Encoding {
    gens: Vec<Gen>,
    /// Exponent denominators' lcm per generator.
    scale: Vec<BigInt>,
}

impl Encoding {
    fn new(polys: &[&Poly]) -> Encoding {
        let gens: BTreeSet<Gen> = polys.iter().flat_map(|p| p.gens()).collect();
        let gens: Vec<Gen> = gens.into_iter().collect();
        let scale = gens
            .iter()
            .map(|g| {
                let mut l = BigInt::one();
                for p in polys {
                    for m in p.0.keys() {
                        l = l.lcm(m.exponent_of(g).denom());
                    }
                }
                l
            })
            .collect();
        Encoding { gens, scale }
    }

    /// Returns the integer polynomial, the per-generator shift applied, and
    /// the rational factor `f` with `p = f · decode(ip, shift)`.
    fn encode(&self, p: &Poly) -> (IPoly, Vec<Rat>, Rat) {
        let shift: Vec<Rat> = self
            .gens
            .iter()
            .map(|g| {
                if g.is_unit() {
                    p.0.keys().map(|m| m.exponent_of(g)).min().unwrap_or_else(Rat::zero)
                } else {
                    Rat::zero()
                }
            })
            .collect();
        let mut den = BigInt::one();
        for c in p.0.values() {
            den = den.lcm(c.denom());
        }
        let terms = p.0.iter().map(|(m, c)| {
            let e: Vec<u32> = self
                .gens
                .iter()
                .zip(&self.scale)
                .zip(&shift)
                .map(|((g, l), s)| {
                    let v = (m.exponent_of(g) - s) * Rat::from_integer(l.clone());
                    debug_assert!(v.is_integer() && !v.is_negative());
                    u32::try_from(v.to_integer()).expect("exponent fits in u32")
                })
                .collect();
            (e, (c * Rat::from_integer(den.clone())).to_integer())
        });
        let ip = IPoly::from_terms(self.gens.len(), terms);
        (ip, shift, Rat::new(BigInt::one(), den))
    }

    fn decode(&self, ip: IPoly, shift: &[Rat]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in ip.into_terms() {
            let factors = self
                .gens
                .iter()
                .zip(&self.scale)
                .zip(shift)
                .zip(&e)
                .map(|(((g, l), s), &k)| (g.clone(), Rat::new(BigInt::from(k), l.clone()) + s))
                .collect();
            out.add_term(Monomial::from_sorted(factors), Rat::from_integer(c));
        }
        out
    }
}

/// A gcd of two Laurent polynomials, defined up to a unit.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.as_constant().is_some_and(|c| !c.is_zero()) || b.as_constant().is_some_and(|c| !c.is_zero()) {
        return Poly::one();
    }
    let enc = Encoding::new(&[a, b]);
    let (ia, _, _) = enc.encode(a);
    let (ib, _, _) = enc.encode(b);
    let g = gcd::gcd(&ia, &ib);
    let zero_shift = vec![Rat::zero(); enc.gens.len()];
    enc.decode(g, &zero_shift)
}

/// `a / b` when `b` divides `a` in the Laurent ring.
pub(crate) fn div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    if let Some(c) = b.as_constant() {
        if c.is_zero() {
            return None;
        }
        return Some(a.scale(&c.recip()));
    }
    let enc = Encoding::new(&[a, b]);
    let (ia, sa, fa) = enc.encode(a);
    let (ib, sb, fb) = enc.encode(b);
    // A primitive divisor over ℚ also divides over ℤ.
    let (content, ib) = ib.split_int_content();
    let fb = fb * Rat::from_integer(content);
    let q = ia.div_exact(&ib)?;
    let shift: Vec<Rat> = sa.iter().zip(&sb).map(|(x, y)| x - y).collect();
    Some(enc.decode(q, &shift).scale(&(fa / fb)))
}
