//! The text format for differential systems.
//!
//! ```text
//! # comment
//! vars x1 x2
//! unknowns u
//! ranking elim(x1) degrevlex
//! const r s=1/2
//! f: u11 - sinh(u);
//! h1: u03 - 1/2*u01^3;
//! ```
//!
//! Header lines come first. Equations run from `name:` to `;` and may span
//! lines. Constants are symbolic unless given a rational value, either in
//! the header or by binding at load time.

use std::fmt;

use crate::error::Error;
use crate::expr::{Atom, Expr, Names};
use crate::ranking::Ranking;
use crate::reduce::DiffSystem;

/// An error with a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub names: Names,
    pub ranking: Ranking,
    /// Constants in declaration order with their bound values.
    pub consts: Vec<(String, Option<Expr>)>,
    pub equations: Vec<(String, Expr)>,
    offsets: Vec<usize>,
    text: String,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

fn diag(text: &str, offset: usize, msg: impl Into<String>) -> Diagnostic {
    let (line, col) = position(text, offset);
    Diagnostic { line, col, msg: msg.into() }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

const RESERVED: [&str; 5] = ["sinh", "cosh", "tanh", "exp", "log"];

/// Parses a rational constant such as `-1/2` or `0.25`.
pub fn parse_rational(text: &str) -> Result<Expr, Error> {
    let e = Expr::parse(text, &Names { vars: vec![], unknowns: vec![], consts: vec![] })?;
    if e.as_rational().is_none() {
        return Err(Error::Config(format!("'{text}' is not a rational number")));
    }
    Ok(e)
}

/// Byte offset of the first non-blank character at or after `i`.
fn skip_blank(text: &str, mut i: usize) -> usize {
    let b = text.as_bytes();
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<SystemFile, Diagnostic> {
        // Blank out comments, keeping offsets intact.
        let clean: String = text
            .split_inclusive('\n')
            .map(|line| match line.find('#') {
                Some(i) => {
                    let mut l = line[..i].to_string();
                    l.extend(line[i..].chars().map(|c| if c == '\n' { '\n' } else { ' ' }));
                    l
                }
                None => line.to_string(),
            })
            .collect();
        let mut vars: Option<Vec<String>> = None;
        let mut unknowns: Option<Vec<String>> = None;
        let mut ranking_clause: Option<(usize, String)> = None;
        let mut consts: Vec<(String, Option<Expr>, usize)> = Vec::new();
        let mut raw_eqs: Vec<(String, usize, usize, usize)> = Vec::new();

        let mut i = skip_blank(&clean, 0);
        while i < clean.len() {
            let line_end = clean[i..].find('\n').map_or(clean.len(), |k| i + k);
            let line = &clean[i..line_end];
            let keyword = line.split_whitespace().next().unwrap_or("");
            let rest_at = i + line.find(keyword).unwrap() + keyword.len();
            let rest = &clean[rest_at..line_end];
            let header = matches!(keyword, "vars" | "unknowns" | "ranking" | "const") && !rest.trim_start().starts_with(':');
            if header {
                if !raw_eqs.is_empty() {
                    return Err(diag(text, i, format!("'{keyword}' must come before the equations")));
                }
                let words: Vec<(usize, &str)> = rest
                    .split_whitespace()
                    .map(|w| (rest_at + rest.find(w).unwrap_or(0), w))
                    .collect();
                match keyword {
                    "vars" | "unknowns" => {
                        let slot = if keyword == "vars" { &mut vars } else { &mut unknowns };
                        if slot.is_some() {
                            return Err(diag(text, i, format!("duplicate '{keyword}' line")));
                        }
                        if words.is_empty() {
                            return Err(diag(text, i, format!("'{keyword}' needs at least one name")));
                        }
                        for (at, w) in &words {
                            if !is_ident(w) || RESERVED.contains(w) {
                                return Err(diag(text, *at, format!("invalid name '{w}'")));
                            }
                        }
                        *slot = Some(words.iter().map(|(_, w)| w.to_string()).collect());
                    }
                    "ranking" => {
                        if ranking_clause.is_some() {
                            return Err(diag(text, i, "duplicate 'ranking' line"));
                        }
                        ranking_clause = Some((rest_at + rest.len() - rest.trim_start().len(), rest.trim().to_string()));
                    }
                    _ => {
                        for (at, w) in words {
                            let (name, value) = match w.split_once('=') {
                                Some((n, v)) => {
                                    let e = parse_rational(v).map_err(|e| diag(text, at, e.to_string()))?;
                                    (n, Some(e))
                                }
                                None => (w, None),
                            };
                            if !is_ident(name) || RESERVED.contains(&name) {
                                return Err(diag(text, at, format!("invalid constant name '{name}'")));
                            }
                            consts.push((name.to_string(), value, at));
                        }
                    }
                }
                i = skip_blank(&clean, line_end);
                continue;
            }
            // name: expr ;
            let colon = clean[i..].find(':').map(|k| i + k);
            let Some(colon) = colon.filter(|&c| !clean[i..c].contains('\n') || clean[i..c].trim().is_empty()) else {
                return Err(diag(text, i, "expected a header line or 'name: expression;'"));
            };
            let name = clean[i..colon].trim();
            if !is_ident(name) {
                return Err(diag(text, i, format!("invalid equation name '{name}'")));
            }
            if raw_eqs.iter().any(|(n, ..)| n == name) {
                return Err(diag(text, i, format!("duplicate equation name '{name}'")));
            }
            let Some(semi) = clean[colon..].find(';').map(|k| colon + k) else {
                return Err(diag(text, colon, format!("equation '{name}' is missing its terminating ';'")));
            };
            raw_eqs.push((name.to_string(), i, colon + 1, semi));
            i = skip_blank(&clean, semi + 1);
        }

        let vars = vars.unwrap_or_else(|| vec!["x1".into(), "x2".into()]);
        let unknowns = unknowns.unwrap_or_else(|| vec!["u".into()]);
        for (name, _, at) in &consts {
            if vars.contains(name) || unknowns.contains(name) {
                return Err(diag(text, *at, format!("constant '{name}' clashes with a variable or unknown")));
            }
        }
        let names = Names {
            vars,
            unknowns,
            consts: consts.iter().map(|(n, ..)| n.clone()).collect(),
        };
        let ranking = match &ranking_clause {
            Some((at, clause)) => Ranking::from_clause(clause, &names).map_err(|e| diag(text, *at, e.to_string()))?,
            None => Ranking::default_for(names.n(), names.m()),
        };
        let mut equations = Vec::new();
        let mut offsets = Vec::new();
        for (name, start, body, end) in raw_eqs {
            let src = &clean[body..end];
            let e = Expr::parse(src, &names).map_err(|err| match err {
                Error::Syntax { pos, msg } => diag(text, body + pos, msg),
                other => diag(text, body, other.to_string()),
            })?;
            equations.push((name, e));
            offsets.push(start);
        }
        Ok(SystemFile {
            names,
            ranking,
            consts: consts.into_iter().map(|(n, v, _)| (n, v)).collect(),
            equations,
            offsets,
            text: text.to_string(),
        })
    }

    /// Sets constant values, e.g. `r=-1/2`.
    pub fn bind(&mut self, binding: &str) -> Result<(), Error> {
        let (name, value) = binding
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("binding '{binding}' is not of the form name=value")))?;
        let name = name.trim();
        let slot = self
            .consts
            .iter_mut()
            .find(|(n, _)| n == name)
            .ok_or_else(|| Error::Config(format!("'{name}' is not a declared constant")))?;
        slot.1 = Some(parse_rational(value.trim())?);
        Ok(())
    }

    /// Replaces bound constants by their values.
    pub fn specialize(&self, e: &Expr) -> Expr {
        let bound: Vec<(&String, &Expr)> = self.consts.iter().filter_map(|(n, v)| Some((n, v.as_ref()?))).collect();
        if bound.is_empty() {
            return e.clone();
        }
        e.map_atoms(&|a| match a {
            Atom::Param(p) => bound.iter().find(|(n, _)| n.as_str() == &**p).map(|(_, v)| (*v).clone()),
            _ => None,
        })
        .expect("constant substitution cannot fail")
    }

    /// Parses an expression in this file's names, with bound constants
    /// substituted.
    pub fn parse_expr(&self, text: &str) -> Result<Expr, Error> {
        Ok(self.specialize(&Expr::parse(text, &self.names)?))
    }

    pub fn system(&self) -> Result<DiffSystem, Diagnostic> {
        let exprs: Vec<(String, Expr)> =
            self.equations.iter().map(|(n, e)| (n.clone(), self.specialize(e))).collect();
        DiffSystem::from_exprs(self.names.clone(), self.ranking.clone(), &exprs).map_err(|e| {
            let at = match &e {
                Error::NotOrderlySolvable { name, .. } | Error::ZeroEquation(name) => self.offset_of(name),
                Error::DuplicateLeadingTerm { second, .. } => self.offset_of(second),
                _ => 0,
            };
            diag(&self.text, at, e.to_string())
        })
    }

    fn offset_of(&self, name: &str) -> usize {
        self.equations.iter().position(|(n, _)| n == name).map_or(0, |k| self.offsets[k])
    }

    /// Renders `s` in the file format, with this file's header.
    pub fn render(&self, s: &DiffSystem) -> String {
        render_system(s, &self.consts)
    }
}

/// Writes a system as a file that parses back to the same system.
pub fn render_system(s: &DiffSystem, consts: &[(String, Option<Expr>)]) -> String {
    let names = s.names();
    let mut out = format!(
        "vars {}\nunknowns {}\nranking {}\n",
        names.vars.join(" "),
        names.unknowns.join(" "),
        s.ranking().to_clause(names)
    );
    if !consts.is_empty() {
        let cs: Vec<String> = consts
            .iter()
            .map(|(n, v)| match v {
                Some(v) => format!("{n}={}", v.format(names)),
                None => n.clone(),
            })
            .collect();
        out.push_str(&format!("const {}\n", cs.join(" ")));
    }
    out.push_str(&s.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const S1: &str = "# first example\nvars x1 x2\nunknowns u\nranking elim(x1) degrevlex\n\nf: u11 - sinh(u);\nh1: u03 -\n    1/2*u01^3;\n";

    #[test]
    fn parses_and_round_trips() {
        let f = SystemFile::parse(S1).unwrap();
        assert_eq!(f.equations.len(), 2);
        let s = f.system().unwrap();
        let text = f.render(&s);
        let g = SystemFile::parse(&text).unwrap();
        assert_eq!(g.system().unwrap(), s);
        assert_eq!(g.render(&g.system().unwrap()), text);
    }

    #[test]
    fn diagnostics_have_positions() {
        let err = SystemFile::parse("vars x1 x2\nf: u11 + * u;\n").unwrap_err();
        assert_eq!((err.line, err.col), (2, 10));
        let err = SystemFile::parse("vars x1 x2\nf: u11\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = SystemFile::parse("ranking elim(t)\n").unwrap_err();
        assert_eq!((err.line, err.col), (1, 9));
        let err = SystemFile::parse("vars x1 x2\n\ng: u02^2 - 1;\n").unwrap().system().unwrap_err();
        assert_eq!((err.line, err.col), (3, 1));
        assert!(SystemFile::parse("vars exp\n").is_err());
    }

    #[test]
    fn constants_bind() {
        let text = "const r s\nf7: u11 + r*exp(2*u) + s*exp(-2*u);\n";
        let mut f = SystemFile::parse(text).unwrap();
        f.bind("r=-1/2").unwrap();
        f.bind("s=1/2").unwrap();
        let s = f.system().unwrap();
        let target = f.parse_expr("u11 - sinh(2*u)").unwrap();
        assert_eq!(s.equations()[0].expr(), target);
        assert!(f.bind("q=1").is_err());
        assert!(f.bind("r=u").is_err());
        let g = SystemFile::parse("const r=1/3\nf: u11 - r;\n").unwrap();
        assert_eq!(g.system().unwrap().equations()[0].tail, Expr::frac(-1, 3));
    }
}
