//! Parse trees of the expression language, and their canonical text form.

use std::fmt;

use num_traits::{One, Signed, Zero};
use voaforge::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    /// `a{i}`, the generator `α^i`.
    Alpha(u32),
    /// `w{a,b}`.
    W(u32, u32),
    /// `j{2m}`, stored by `m`.
    JState(u32),
    /// `Om{a,b}`.
    Om(u32, u32),
    /// `J{2m}`, stored by `m`.
    JSym(u32),
    Vac,
}

/// Which algebra an expression lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Context {
    /// States of H(n), built from `a`, `w`, `j`.
    Fock,
    /// Normally ordered polynomials, built from `Om`, `J`.
    NoPoly,
}

impl Atom {
    pub fn context(&self) -> Option<Context> {
        match self {
            Atom::Alpha(_) | Atom::W(..) | Atom::JState(_) => Some(Context::Fock),
            Atom::Om(..) | Atom::JSym(_) => Some(Context::NoPoly),
            Atom::Vac => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Atom(Atom),
    Deriv(u32, Box<Expr>),
    /// Right-nested Wick product.
    Wick(Vec<Expr>),
    Circ(i64, Box<Expr>, Box<Expr>),
    Sum(Vec<Term>),
}

/// `coeff · f_1 f_2 ...`; juxtaposed factors multiply as scalars, and a term
/// without factors is a multiple of the vacuum.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Q,
    pub factors: Vec<Expr>,
}

impl Expr {
    /// The context of the first non-vacuum atom, if any.
    pub fn context(&self) -> Option<Context> {
        match self {
            Expr::Atom(a) => a.context(),
            Expr::Deriv(_, e) => e.context(),
            Expr::Wick(v) => v.iter().find_map(Expr::context),
            Expr::Circ(_, a, b) => a.context().or_else(|| b.context()),
            Expr::Sum(ts) => ts.iter().flat_map(|t| &t.factors).find_map(Expr::context),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Alpha(i) => write!(f, "a{{{i}}}"),
            Atom::W(a, b) => write!(f, "w{{{a},{b}}}"),
            Atom::JState(m) => write!(f, "j{{{}}}", 2 * m),
            Atom::Om(a, b) => write!(f, "Om{{{a},{b}}}"),
            Atom::JSym(m) => write!(f, "J{{{}}}", 2 * m),
            Atom::Vac => write!(f, "vac"),
        }
    }
}

/// A rational as `p/q` in lowest terms, with a leading `-` when negative.
pub fn rational_string(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn write_factor(e: &Expr, in_wick: bool, out: &mut String) {
    match e {
        Expr::Atom(a) => out.push_str(&a.to_string()),
        Expr::Deriv(k, inner) => {
            out.push_str(&format!("d^{k} "));
            write_factor(inner, in_wick, out);
        }
        Expr::Wick(v) => {
            if in_wick {
                out.push('(');
            }
            out.push(':');
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_factor(x, true, out);
            }
            out.push(':');
            if in_wick {
                out.push(')');
            }
        }
        Expr::Circ(m, a, b) => out.push_str(&format!("circ({m}, {a}, {b})")),
        Expr::Sum(_) => {
            out.push('(');
            write_sum(e, out);
            out.push(')');
        }
    }
}

fn write_sum(e: &Expr, out: &mut String) {
    let Expr::Sum(terms) = e else {
        write_factor(e, false, out);
        return;
    };
    if terms.is_empty() {
        out.push('0');
        return;
    }
    for (i, t) in terms.iter().enumerate() {
        let neg = t.coeff.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = t.coeff.abs();
        let show = !abs.is_one() || t.factors.is_empty();
        if show {
            out.push_str(&rational_string(&abs));
        }
        for (k, x) in t.factors.iter().enumerate() {
            if show || k > 0 {
                out.push(' ');
            }
            write_factor(x, false, out);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_sum(self, &mut s);
        f.write_str(&s)
    }
}

impl Term {
    pub fn new(coeff: Q, factors: Vec<Expr>) -> Self {
        Term { coeff, factors }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeff.is_one() && self.factors.len() == 1
    }
}

/// `0` as an expression.
pub fn zero_expr() -> Expr {
    Expr::Sum(vec![Term::new(Q::zero(), Vec::new())])
}
