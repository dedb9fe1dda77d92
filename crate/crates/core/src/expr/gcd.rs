//! Sparse multivariate polynomials over the integers, with exact division
//! and a gcd. The gcd first rules variables out with images modulo a
//! prime, then tries evaluation at large integers, and falls back to a
//! recursive primitive PRS.
//!
//! This is the workhorse behind fraction normalization in [`super::poly`].
//! Exponents are plain `u32` vectors of a fixed length; the caller maps its
//! own generators onto positions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IPoly {
    pub fn zero(nvars: usize) -> Self {
        IPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = IPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = IPoly::zero(nvars);
        for (e, c) in terms {
            debug_assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Vec<u32>, BigInt)> {
        self.terms.into_iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().iter().all(|&e| e == 0),
            _ => false,
        }
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn sub(&self, other: &IPoly) -> IPoly {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    fn sub_assign(&mut self, other: &IPoly) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), -c);
        }
    }

    /// `self -= c * x^shift * other` in place.
    fn sub_scaled(&mut self, other: &IPoly, shift: &[u32], c: &BigInt) {
        for (e, x) in &other.terms {
            let e: Vec<u32> = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            self.add_term(e, -(x * c));
        }
    }

    pub fn mul(&self, other: &IPoly) -> IPoly {
        let mut out = IPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    fn mul_term(&self, shift: &[u32], c: &BigInt) -> IPoly {
        let mut out = IPoly::zero(self.nvars);
        for (e, cc) in &self.terms {
            let e = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            out.terms.insert(e, cc * c);
        }
        out
    }

    fn leading(&self) -> Option<(&Vec<u32>, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    /// Coefficients with respect to variable `v`, indexed by degree; the
    /// returned polynomials have exponent zero in `v`.
    fn coeffs_in(&self, v: usize) -> Vec<IPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![IPoly::zero(self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let d = e[v] as usize;
            let mut e2 = e.clone();
            e2[v] = 0;
            out[d].terms.insert(e2, c.clone());
        }
        out
    }

    /// Coefficients with respect to the variables flagged in `vars`; the
    /// returned polynomials do not use those variables.
    fn coeffs_wrt(&self, vars: &[bool]) -> Vec<IPoly> {
        let mut out: BTreeMap<Vec<u32>, IPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let (key, rest): (Vec<u32>, Vec<u32>) =
                e.iter().zip(vars).map(|(&x, &f)| if f { (x, 0) } else { (0, x) }).unzip();
            out.entry(key).or_insert_with(|| IPoly::zero(self.nvars)).terms.insert(rest, c.clone());
        }
        out.into_values().collect()
    }

    /// Splits off the integer content (positive), returning it and the
    /// primitive remainder.
    pub fn split_int_content(&self) -> (BigInt, IPoly) {
        let c = self.int_content();
        if c.is_zero() || c.is_one() {
            return (BigInt::one(), self.clone());
        }
        (c.clone(), self.scale_div(&c))
    }

    fn int_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn min_exponents(&self) -> Vec<u32> {
        let mut m: Option<Vec<u32>> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(prev) => prev.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    fn shift_down(&self, by: &[u32]) -> IPoly {
        IPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    fn scale_div(&self, c: &BigInt) -> IPoly {
        IPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, cc)| (e.clone(), cc / c)).collect(),
        }
    }

    fn with_positive_lead(self) -> IPoly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => self.scale_div(&-BigInt::one()),
            _ => self,
        }
    }

    /// Exact division. Returns `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &IPoly) -> Option<IPoly> {
        if other.is_zero() {
            return None;
        }
        if other.is_constant() {
            let c = other.terms.values().next().unwrap();
            if self.terms.values().all(|x| (x % c).is_zero()) {
                return Some(self.scale_div(c));
            }
            return None;
        }
        let (lb_e, lb_c) = other.leading().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = IPoly::zero(self.nvars);
        while let Some((le, lc)) = rem.leading() {
            if le.iter().zip(&lb_e).any(|(a, b)| a < b) {
                return None;
            }
            let (q, r) = lc.div_rem(&lb_c);
            if !r.is_zero() {
                return None;
            }
            let shift: Vec<u32> = le.iter().zip(&lb_e).map(|(a, b)| a - b).collect();
            rem.sub_scaled(other, &shift, &q);
            quot.terms.insert(shift, q);
        }
        Some(quot)
    }

    fn pseudo_rem(&self, b: &IPoly, v: usize) -> IPoly {
        let db = b.degree_in(v);
        let lc_b = b.coeffs_in(v).pop().unwrap();
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= db {
            let dr = r.degree_in(v);
            let lc_r = r.coeffs_in(v).pop().unwrap();
            let mut shift = vec![0; self.nvars];
            shift[v] = dr - db;
            let t = lc_r.mul(b).mul_term(&shift, &BigInt::one());
            r = r.mul(&lc_b).sub(&t);
        }
        r
    }

    fn primitive_in(&self, v: usize) -> IPoly {
        let content = self
            .coeffs_in(v)
            .iter()
            .filter(|c| !c.is_zero())
            .fold(IPoly::zero(self.nvars), |g, c| gcd(&g, c));
        self.div_exact(&content).expect("content divides")
    }
}

/// Greatest common divisor, normalized to a positive leading coefficient.
pub(crate) fn gcd(a: &IPoly, b: &IPoly) -> IPoly {
    if a.is_zero() {
        return b.clone().with_positive_lead();
    }
    if b.is_zero() {
        return a.clone().with_positive_lead();
    }
    if a == b {
        return a.clone().with_positive_lead();
    }
    let ma = a.min_exponents();
    let mb = b.min_exponents();
    let common: Vec<u32> = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    let g = gcd_no_monomial(&a.shift_down(&ma), &b.shift_down(&mb));
    g.mul_term(&common, &BigInt::one()).with_positive_lead()
}

fn gcd_no_monomial(a: &IPoly, b: &IPoly) -> IPoly {
    let nvars = a.nvars;
    if a.is_constant() || b.is_constant() {
        return IPoly::constant(nvars, a.int_content().gcd(&b.int_content()));
    }
    // A variable present in only one argument cannot occur in the gcd.
    for v in 0..nvars {
        let (ua, ub) = (a.uses_var(v), b.uses_var(v));
        if ua != ub {
            let (with, without) = if ua { (a, b) } else { (b, a) };
            let mut g = without.clone();
            let mut cs = with.coeffs_in(v);
            cs.sort_by_key(|c| c.terms.len());
            for c in cs.iter().filter(|c| !c.is_zero()) {
                g = gcd(&g, c);
                if g.is_constant() && g.int_content().is_one() {
                    break;
                }
            }
            return g;
        }
    }
    // When the gcd provably avoids some variables, it is the gcd of the
    // coefficients of `a` and `b` with respect to those variables.
    let free = variables_avoided_by_gcd(a, b);
    if free.iter().any(|f| *f) {
        let mut cs = a.coeffs_wrt(&free);
        cs.extend(b.coeffs_wrt(&free));
        cs.sort_by_key(|c| c.terms.len());
        let mut g = IPoly::zero(nvars);
        for c in &cs {
            g = gcd(&g, c);
            if g.is_constant() && g.int_content().is_one() {
                break;
            }
        }
        return g;
    }
    if let Some(g) = heuristic_gcd(a, b) {
        return g;
    }
    let v = (0..nvars)
        .filter(|&v| a.uses_var(v))
        .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)))
        .expect("non-constant polynomials use a variable");

    let content = |p: &IPoly| {
        p.coeffs_in(v)
            .iter()
            .filter(|c| !c.is_zero())
            .fold(IPoly::zero(nvars), |g, c| gcd(&g, c))
    };
    let ca = content(a);
    let cb = content(b);
    let c = gcd(&ca, &cb);
    let mut pa = a.div_exact(&ca).expect("content divides");
    let mut pb = b.div_exact(&cb).expect("content divides");
    if pa.degree_in(v) < pb.degree_in(v) {
        std::mem::swap(&mut pa, &mut pb);
    }
    let g = loop {
        let r = pa.pseudo_rem(&pb, v);
        if r.is_zero() {
            break pb;
        }
        if r.degree_in(v) == 0 {
            break IPoly::constant(nvars, BigInt::one());
        }
        pa = pb;
        pb = r.primitive_in(v);
    };
    let g = if g.is_constant() { g } else { g.primitive_in(v) };
    g.mul(&c).with_positive_lead()
}

const P: u64 = (1 << 31) - 1;

fn mod_p(c: &BigInt) -> u64 {
    let r = c % BigInt::from(P);
    let r = if r.is_negative() { r + BigInt::from(P) } else { r };
    r.to_u64().expect("residue fits")
}

fn pow_mod(mut b: u64, mut e: u32) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, (P - 2) as u32)
}

/// Image of `p` in `F_P[x_v]` after fixing every other variable to `point`.
fn univariate_image(p: &IPoly, v: usize, point: &[u64]) -> Vec<u64> {
    let mut out = vec![0; p.degree_in(v) as usize + 1];
    for (e, c) in &p.terms {
        let mut t = mod_p(c);
        for (k, &ek) in e.iter().enumerate() {
            if k != v && ek > 0 {
                t = t * pow_mod(point[k], ek) % P;
            }
        }
        let d = e[v] as usize;
        out[d] = (out[d] + t) % P;
    }
    out
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of the gcd of two univariate polynomials over `F_P`.
fn gcd_degree_mod_p(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = inv_mod(*b.last().unwrap());
        while a.len() >= b.len() {
            let q = a.last().unwrap() * inv % P;
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + P - q * bc % P) % P;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Variables in which `gcd(a, b)` provably has degree zero, found from
/// images modulo a prime at random points. An image only bounds the degree
/// from above when both leading coefficients survive, so a `false` entry
/// says nothing. Variables used by neither argument are left `false`.
fn variables_avoided_by_gcd(a: &IPoly, b: &IPoly) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9cd);
    (0..a.nvars)
        .map(|v| {
            if !a.uses_var(v) && !b.uses_var(v) {
                return false;
            }
            for _ in 0..2 {
                let point: Vec<u64> = (0..a.nvars).map(|_| rng.gen_range(2..P)).collect();
                let (ia, ib) = (univariate_image(a, v, &point), univariate_image(b, v, &point));
                if ia.last() != Some(&0) && ib.last() != Some(&0) {
                    return gcd_degree_mod_p(ia, ib) == 0;
                }
            }
            false
        })
        .collect()
}

fn max_norm(p: &IPoly) -> BigInt {
    p.terms.values().map(|c| c.abs()).max().unwrap_or_default()
}

/// `p` with `x_v` set to the integer `x`.
fn eval_at(p: &IPoly, v: usize, x: &BigInt) -> IPoly {
    let mut pows = vec![BigInt::one()];
    let mut out = IPoly::zero(p.nvars);
    for (e, c) in &p.terms {
        let d = e[v] as usize;
        while pows.len() <= d {
            let next = pows.last().unwrap() * x;
            pows.push(next);
        }
        let mut e = e.clone();
        e[v] = 0;
        out.add_term(e, c * &pows[d]);
    }
    out
}

/// Inverse of `eval_at` for polynomials whose coefficients are smaller
/// than `x / 2`: reads off the balanced base-`x` digits as coefficients of
/// successive powers of `x_v`.
fn interpolate(h: &IPoly, v: usize, x: &BigInt) -> IPoly {
    let half = x / 2;
    let mut out = IPoly::zero(h.nvars);
    let mut cur = h.clone();
    let mut i = 0;
    while !cur.is_zero() {
        let mut next = IPoly::zero(h.nvars);
        for (e, c) in &cur.terms {
            let mut r = c.mod_floor(x);
            if r > half {
                r -= x;
            }
            let q = (c - &r) / x;
            if !r.is_zero() {
                let mut e2 = e.clone();
                e2[v] = i;
                out.terms.insert(e2, r);
            }
            if !q.is_zero() {
                next.terms.insert(e.clone(), q);
            }
        }
        cur = next;
        i += 1;
    }
    out
}

/// Coefficients beyond this many bits make the evaluations more expensive
/// than the subresultant route.
const HEURISTIC_BITS: u64 = 1 << 18;

/// Heuristic gcd: evaluate one variable at a large integer, take the gcd of
/// the images recursively and read the candidate back from its base-`x`
/// digits. A candidate `h` is accepted only if it divides both arguments
/// and the cofactors are provably coprime, so a returned value is exact.
fn heuristic_gcd(a: &IPoly, b: &IPoly) -> Option<IPoly> {
    let nvars = a.nvars;
    let Some(v) = (0..nvars).find(|&v| a.uses_var(v) || b.uses_var(v)) else {
        return Some(IPoly::constant(nvars, a.int_content().gcd(&b.int_content())));
    };
    let (na, nb) = (max_norm(a), max_norm(b));
    if na.bits().max(nb.bits()) > HEURISTIC_BITS {
        return None;
    }
    let bound: BigInt = BigInt::from(2) * na.clone().min(nb.clone()) + 29;
    let lc = |p: &IPoly, n: &BigInt| n / p.leading().unwrap().1.abs();
    let by_lead: BigInt = BigInt::from(2) * lc(a, &na).min(lc(b, &nb)) + 2;
    let mut x = bound.clone().min(BigInt::from(99) * bound.sqrt()).max(by_lead);
    for _ in 0..6 {
        let (ea, eb) = (eval_at(a, v, &x), eval_at(b, v, &x));
        if !ea.is_zero() && !eb.is_zero() {
            if let Some(h) = heuristic_gcd(&ea, &eb) {
                let mut candidates = vec![interpolate(&h, v, &x)];
                for (p, e) in [(a, &ea), (b, &eb)] {
                    if let Some(co) = e.div_exact(&h) {
                        if let Some(c) = p.div_exact(&interpolate(&co, v, &x)) {
                            candidates.push(c);
                        }
                    }
                }
                for c in candidates {
                    if let Some(g) = verified_gcd(a, b, c) {
                        return Some(g);
                    }
                }
            }
        }
        x = BigInt::from(73794) * &x * x.sqrt().sqrt() / 27011;
    }
    None
}

/// `gcd(a, b)` given a common divisor `h`, if the cofactors are provably
/// coprime up to an integer.
fn verified_gcd(a: &IPoly, b: &IPoly, h: IPoly) -> Option<IPoly> {
    if h.is_zero() {
        return None;
    }
    let (_, h) = h.split_int_content();
    let ca = a.div_exact(&h)?;
    let cb = b.div_exact(&h)?;
    let free = variables_avoided_by_gcd(&ca, &cb);
    if (0..a.nvars).any(|v| !free[v] && (ca.uses_var(v) || cb.uses_var(v))) {
        return None;
    }
    Some(h.mul(&IPoly::constant(a.nvars, ca.int_content().gcd(&cb.int_content()))))
}
