//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | '(' expr ')' | func '(' expr ')' | jet | name
//! jet    := unknown '[' int (',' int)* ']' | unknown '{' int '}' '[' ... ']'
//!         | unknown digit^n | unknown
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use super::atom::{Names, Rat};
use super::Expr;
use crate::error::{Error, Result};
use crate::jet::{JetVar, MultiIndex};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let int_part = &text[start..i];
            let mut value = Rat::from_integer(if int_part.is_empty() { BigInt::zero() } else { int_part.parse().unwrap() });
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let frac_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let frac = &text[frac_start..i];
                if !frac.is_empty() {
                    let digits: BigInt = frac.parse().unwrap();
                    value += Rat::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
                }
            }
            out.push((start, Tok::Num(value)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()[]{},".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    names: &'a Names,
}

const FUNCTIONS: [&str; 5] = ["sinh", "cosh", "tanh", "exp", "log"];

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn with_pos<T>(&self, at: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Syntax { .. } => e,
            other => Error::Syntax { pos: at, msg: other.to_string() },
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let at = self.offset();
                self.pos += 1;
                let rhs = self.unary()?;
                acc = self.with_pos(at, acc.checked_div(&rhs))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Sym('^')) {
            let at = self.offset();
            self.pos += 1;
            let exp = self.unary()?;
            let Some(r) = exp.as_rational() else {
                return Err(Error::Syntax { pos: at, msg: "exponent must be a rational constant".into() });
            };
            return self.with_pos(at, base.pow_rational(&r));
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<u32> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) if r.is_integer() => {
                self.pos += 1;
                u32::try_from(r.to_integer()).or_else(|_| self.err("index too large"))
            }
            _ => self.err("expected a non-negative integer"),
        }
    }

    fn index_list(&mut self) -> Result<MultiIndex> {
        self.expect('[')?;
        let mut v = vec![self.int()?];
        while self.eat(',') {
            v.push(self.int()?);
        }
        self.expect(']')?;
        if v.len() != self.names.n() {
            return self.err(format!("expected {} indices, found {}", self.names.n(), v.len()));
        }
        Ok(MultiIndex::new(v))
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Expr::rational(r))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if FUNCTIONS.contains(&name.as_str()) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return match name.as_str() {
                        "sinh" => Ok(arg.sinh()),
                        "cosh" => Ok(arg.cosh()),
                        "tanh" => Ok(arg.tanh()),
                        "exp" => Ok(arg.exp()),
                        _ => self.with_pos(start, arg.log()),
                    };
                }
                if let Some(i) = self.names.unknowns.iter().position(|u| *u == name) {
                    let unknown = if self.eat('{') {
                        let k = self.int()? as usize;
                        self.expect('}')?;
                        if k == 0 || k > self.names.m() {
                            return Err(Error::Syntax { pos: start, msg: format!("unknown index {k} out of range") });
                        }
                        k - 1
                    } else {
                        i
                    };
                    let order = if self.peek() == Some(&Tok::Sym('[')) {
                        self.index_list()?
                    } else {
                        MultiIndex::zero(self.names.n())
                    };
                    return Ok(JetVar::new(unknown, order).to_expr());
                }
                if let Some(k) = self.names.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::indep(k));
                }
                if self.names.consts.contains(&name) {
                    return Ok(Expr::param(&name));
                }
                if let Some(jet) = self.shorthand(&name) {
                    return Ok(jet.to_expr());
                }
                Err(Error::Syntax { pos: start, msg: format!("unknown identifier '{name}'") })
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }

    /// `u12` for `u[1,2]` when every index is a single digit.
    fn shorthand(&self, name: &str) -> Option<JetVar> {
        let n = self.names.n();
        self.names.unknowns.iter().enumerate().find_map(|(i, u)| {
            let digits = name.strip_prefix(u.as_str())?;
            if digits.len() != n || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let order = digits.bytes().map(|b| u32::from(b - b'0')).collect();
            Some(JetVar::new(i, MultiIndex::new(order)))
        })
    }
}

pub(super) fn parse(text: &str, names: &Names) -> Result<Expr> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), names };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_carry_positions() {
        let names = Names::default();
        assert_eq!(
            parse("u11 + * u00", &names),
            Err(Error::Syntax { pos: 6, msg: "unexpected '*'".into() })
        );
        assert!(matches!(parse("foo + 1", &names), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("u[1,2,3]", &names), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(u00", &names), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("u00 $", &names), Err(Error::Syntax { pos: 4, .. })));
    }

    #[test]
    fn jet_spellings_agree() {
        let names = Names::default();
        let a = parse("u[1,2]", &names).unwrap();
        assert_eq!(parse("u12", &names).unwrap(), a);
        assert_eq!(parse("u{1}[1,2]", &names).unwrap(), a);
        assert_eq!(parse("u", &names).unwrap(), parse("u00", &names).unwrap());
    }

    #[test]
    fn decimals_are_exact() {
        let names = Names::default();
        assert_eq!(parse("0.5*u00", &names).unwrap(), parse("1/2*u00", &names).unwrap());
        assert_eq!(parse("2^-1", &names).unwrap(), parse("1/2", &names).unwrap());
    }
}
