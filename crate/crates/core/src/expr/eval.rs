use std::collections::HashMap;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::atom::{Atom, Gen};
use super::poly::Poly;
use super::Expr;
use crate::error::{Error, Result};

/// Sampling parameters for the numeric fallback of the zero test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTestConfig {
    pub samples: usize,
    pub lo: f64,
    pub hi: f64,
    pub eps: f64,
    pub eps_pole: f64,
    /// Attempts per required sample before giving up on poles.
    pub attempts_per_sample: usize,
    pub seed: u64,
}

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            samples: 8,
            lo: 0.3,
            hi: 1.7,
            eps: 1e-9,
            eps_pole: 1e-12,
            attempts_per_sample: 4,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroVerdict {
    /// The canonical form is literally zero.
    Zero,
    /// The canonical form is nonzero but every sample vanished.
    ProbablyZero,
    NonZero,
}

impl ZeroVerdict {
    pub fn is_zero(self) -> bool {
        !matches!(self, ZeroVerdict::NonZero)
    }

    pub fn is_probabilistic(self) -> bool {
        matches!(self, ZeroVerdict::ProbablyZero)
    }
}

struct Evaluator<'a> {
    env: &'a dyn Fn(&Atom) -> Option<f64>,
    eps_pole: f64,
    cache: HashMap<Gen, f64>,
}

impl Evaluator<'_> {
    fn gen(&mut self, g: &Gen) -> Result<f64> {
        if let Some(v) = self.cache.get(g) {
            return Ok(*v);
        }
        let v = match g {
            Gen::Atom(a) => (self.env)(a).ok_or_else(|| Error::MissingAtom(format!("{a:?}")))?,
            Gen::Exp(b) => self.expr(b)?,
            Gen::Log(arg) => {
                let x = self.expr(arg)?;
                if x <= 0.0 {
                    return Err(Error::Pole(format!("log of non-positive value {x}")));
                }
                x.ln()
            }
        };
        self.cache.insert(g.clone(), v);
        Ok(v)
    }

    fn poly(&mut self, p: &Poly) -> Result<f64> {
        let mut sum = 0.0;
        for (m, c) in p.terms() {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (g, e) in m.factors() {
                let v = self.gen(g)?;
                let e = e.to_f64().unwrap_or(f64::NAN);
                t *= match g {
                    Gen::Exp(_) => (e * v).exp(),
                    _ => v.powf(e),
                };
            }
            sum += t;
        }
        Ok(sum)
    }

    fn expr(&mut self, e: &Expr) -> Result<f64> {
        let n = self.poly(&e.0.num)?;
        if e.0.den.is_one() {
            return Ok(n);
        }
        let d = self.poly(&e.0.den)?;
        if d.abs() < self.eps_pole || !d.is_finite() {
            return Err(Error::Pole(format!("denominator value {d}")));
        }
        Ok(n / d)
    }
}

impl Expr {
    /// Numeric value under an assignment of atoms.
    pub fn eval(&self, env: &dyn Fn(&Atom) -> Option<f64>) -> Result<f64> {
        self.eval_with_pole_eps(env, ZeroTestConfig::default().eps_pole)
    }

    pub fn eval_with_pole_eps(&self, env: &dyn Fn(&Atom) -> Option<f64>, eps_pole: f64) -> Result<f64> {
        let v = Evaluator { env, eps_pole, cache: HashMap::new() }.expr(self)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Pole(format!("non-finite value {v}")))
        }
    }

    /// Zero test: structural first, then numeric probing at random points.
    pub fn zero_test(&self, cfg: &ZeroTestConfig) -> Result<ZeroVerdict> {
        if self.is_zero() {
            return Ok(ZeroVerdict::Zero);
        }
        if self.is_constant() {
            return Ok(ZeroVerdict::NonZero);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let atoms: Vec<Atom> = self.atoms().iter().cloned().collect();
        let mut good = 0;
        for _ in 0..cfg.samples * cfg.attempts_per_sample.max(1) {
            let values: HashMap<Atom, f64> =
                atoms.iter().map(|a| (a.clone(), rng.gen_range(cfg.lo..cfg.hi))).collect();
            match self.eval_with_pole_eps(&|a| values.get(a).copied(), cfg.eps_pole) {
                Ok(v) if v.abs() >= cfg.eps => return Ok(ZeroVerdict::NonZero),
                Ok(_) => {
                    good += 1;
                    if good == cfg.samples {
                        return Ok(ZeroVerdict::ProbablyZero);
                    }
                }
                Err(Error::Pole(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if good > 0 {
            Ok(ZeroVerdict::ProbablyZero)
        } else {
            Err(Error::Indeterminate)
        }
    }
}
