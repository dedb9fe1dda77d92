use num_traits::{One, Signed};

use super::atom::{Gen, Names, Rat};
use super::poly::{Monomial, Poly};
use super::Expr;

pub(super) fn format(e: &Expr, names: &Names) -> String {
    let num = format_poly(&e.0.num, names);
    if e.0.den.is_one() {
        return num;
    }
    let num = if e.0.num.len() > 1 { format!("({num})") } else { num };
    let den = format_poly(&e.0.den, names);
    let bare = e.0.den.len() == 1 && {
        let (m, c) = e.0.den.terms().next().unwrap();
        c.is_one() && m.factors().len() == 1 && m.factors()[0].1.is_one()
    };
    if bare {
        format!("{num}/{den}")
    } else {
        format!("{num}/({den})")
    }
}

fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn format_factor(g: &Gen, e: &Rat, names: &Names) -> String {
    match g {
        Gen::Exp(b) => {
            let arg = &**b * &Expr::rational(e.clone());
            format!("exp({})", format(&arg, names))
        }
        Gen::Log(a) => power(format!("log({})", format(a, names)), e),
        Gen::Atom(a) => power(names.atom_name(a), e),
    }
}

fn power(base: String, e: &Rat) -> String {
    if e.is_one() {
        base
    } else if e.is_integer() && e.is_positive() {
        format!("{base}^{}", e.numer())
    } else {
        format!("{base}^({})", format_rat(e))
    }
}

fn format_monomial(m: &Monomial, names: &Names) -> Vec<String> {
    // Constants first, then the remaining factors largest first.
    let (params, rest): (Vec<_>, Vec<_>) =
        m.factors().iter().partition(|(g, _)| matches!(g, Gen::Atom(super::Atom::Param(_))));
    params.into_iter().rev().chain(rest).map(|(g, e)| format_factor(g, e, names)).collect()
}

fn format_poly(p: &Poly, names: &Names) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let abs = c.abs();
        let mut parts = format_monomial(m, names);
        if parts.is_empty() || !abs.is_one() {
            parts.insert(0, format_rat(&abs));
        }
        out.push_str(&parts.join("*"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_are_parseable_and_stable() {
        let names = Names::default().with_consts(&["r", "s"]);
        for s in [
            "u11 - sinh(u00)",
            "u02 - 1/2*u01^2*tanh(u00)",
            "u10 - 2*cosh(u00)/u01",
            "u03 + u01*u02 - u01^3 + r*exp(3*u00) + s*exp(-u00)",
            "x1^2*log(u00 + 1) - 3/4",
            "exp(1/3)*u00/(x2 + 1)",
        ] {
            let e = Expr::parse(s, &names).unwrap();
            let text = e.format(&names);
            let back = Expr::parse(&text, &names).unwrap();
            assert_eq!(back, e, "{s} -> {text}");
            assert_eq!(back.format(&names), text);
        }
    }

    #[test]
    fn simple_shapes() {
        let names = Names::default();
        let e = Expr::parse("u11 - sinh(u00)", &names).unwrap();
        assert_eq!(e.format(&names), "u[1,1] - 1/2*exp(u[0,0]) + 1/2*exp(-u[0,0])");
        assert_eq!(Expr::parse("-3/2", &names).unwrap().format(&names), "-3/2");
        assert_eq!(Expr::parse("1/u01", &names).unwrap().format(&names), "1/u[0,1]");
    }
}
