//! Evaluation of parse trees into Fock states or normally ordered polynomials.

use anyhow::{bail, Result};
use num_traits::{One, Zero};
use voaforge::fock::{wick_product, FockState};
use voaforge::invariant::{j_state, omega};
use voaforge::nopoly::{Factor, GenSymbol};
use voaforge::{NOPoly, Q};

use crate::expr::{Atom, Context, Expr};

/// The value of an expression in its context.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    State(FockState<Q>),
    Poly(NOPoly),
}

impl Value {
    pub fn into_state(self, n: usize) -> Result<FockState<Q>> {
        match self {
            Value::State(s) => Ok(s),
            Value::Poly(p) => Ok(p.eval(n)?),
        }
    }
}

pub fn evaluate(e: &Expr, n: usize) -> Result<Value> {
    match e.context() {
        Some(Context::NoPoly) => Ok(Value::Poly(eval_poly(e, n)?)),
        _ => Ok(Value::State(eval_state(e, n)?)),
    }
}

fn scalar_of_state(s: &FockState<Q>) -> Option<Q> {
    if s.iter().all(|(m, _)| m.degree() == 0) {
        Some(s.scalar_part())
    } else {
        None
    }
}

pub fn eval_state(e: &Expr, n: usize) -> Result<FockState<Q>> {
    Ok(match e {
        Expr::Atom(a) => match *a {
            Atom::Alpha(i) => {
                if i as usize > n {
                    bail!("a{{{i}}} does not exist in rank {n}");
                }
                FockState::generator(i as usize, n)?
            }
            Atom::W(a, b) => omega(a, b, n),
            Atom::JState(m) => j_state(m, n),
            Atom::Vac => FockState::vacuum(n),
            Atom::Om(..) | Atom::JSym(_) => bail!("{a} is not a state; it belongs to the normally ordered context"),
        },
        Expr::Deriv(k, x) => eval_state(x, n)?.derivative_n(*k as usize),
        Expr::Wick(v) => {
            let parts = v.iter().map(|x| eval_state(x, n)).collect::<Result<Vec<_>>>()?;
            wick_product(&parts)?
        }
        Expr::Circ(m, a, b) => eval_state(a, n)?.circle(&eval_state(b, n)?, *m)?,
        Expr::Sum(terms) => {
            let mut out = FockState::zero(n);
            for t in terms {
                let mut scalar = t.coeff.clone();
                let mut body: Option<FockState<Q>> = None;
                for f in &t.factors {
                    let v = eval_state(f, n)?;
                    match (scalar_of_state(&v), &body) {
                        (Some(c), _) => scalar *= c,
                        (None, None) => body = Some(v),
                        (None, Some(_)) => bail!("juxtaposed factors must be scalars; use :...: or circ for products"),
                    }
                }
                let body = body.unwrap_or_else(|| FockState::vacuum(n));
                out.add_scaled(&body, &scalar);
            }
            out
        }
    })
}

fn scalar_of_poly(p: &NOPoly) -> Option<Q> {
    if p.terms().iter().all(|(_, w)| w.is_empty()) {
        Some(p.terms().first().map(|(c, _)| c.clone()).unwrap_or_else(Q::zero))
    } else {
        None
    }
}

/// Evaluate in the universal algebra; `n` is only used for the vacuum terms of
/// products that are not plain concatenations of factors.
pub fn eval_poly(e: &Expr, n: usize) -> Result<NOPoly> {
    Ok(match e {
        Expr::Atom(a) => match *a {
            Atom::Om(a, b) => NOPoly::factor(Factor::new(0, GenSymbol::om(a, b))),
            Atom::JSym(m) => NOPoly::factor(Factor::new(0, GenSymbol::J(m))),
            Atom::Vac => NOPoly::constant(Q::one()),
            _ => bail!("{a} is a state; it cannot appear in a normally ordered polynomial"),
        },
        Expr::Deriv(k, x) => {
            let mut p = eval_poly(x, n)?;
            for _ in 0..*k {
                p = p.derivative();
            }
            p
        }
        Expr::Wick(v) => {
            let parts = v.iter().map(|x| eval_poly(x, n)).collect::<Result<Vec<_>>>()?;
            let mut it = parts.into_iter().rev();
            let mut acc = it.next().expect("nonempty Wick product");
            for p in it {
                acc = p.wick(&acc, n);
            }
            acc
        }
        Expr::Circ(m, a, b) => eval_poly(a, n)?.circle(&eval_poly(b, n)?, *m, n),
        Expr::Sum(terms) => {
            let mut out = NOPoly::zero();
            for t in terms {
                let mut scalar = t.coeff.clone();
                let mut body: Option<NOPoly> = None;
                for f in &t.factors {
                    let v = eval_poly(f, n)?;
                    match (scalar_of_poly(&v), &body) {
                        (Some(c), _) => scalar *= c,
                        (None, None) => body = Some(v),
                        (None, Some(_)) => bail!("juxtaposed factors must be scalars; use :...: or circ for products"),
                    }
                }
                let body = body.unwrap_or_else(|| NOPoly::constant(Q::one()));
                out = out.add(&body.scale(&scalar));
            }
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn rank_one_determinant() {
        let e = parse(":w{0,0} w{1,1}: - :w{0,1} w{0,1}:").unwrap();
        let s = eval_state(&e, 1).unwrap();
        // the classical determinant vanishes, only lower-degree terms survive
        assert!(s.degree().unwrap() <= 2);
        let p = parse(":Om{0,0} Om{1,1}: - :Om{0,1} Om{0,1}:").unwrap();
        assert_eq!(eval_poly(&p, 1).unwrap().eval(1).unwrap(), s);
    }

    #[test]
    fn scalars_and_products() {
        let e = parse("2 vac (3 vac) j{2} - 6 j{2}").unwrap();
        assert!(eval_state(&e, 2).unwrap().is_zero());
        assert!(eval_state(&parse("a{1} a{1}").unwrap(), 1).is_err());
        assert!(eval_state(&parse("a{3}").unwrap(), 2).is_err());
        let c = parse("circ(1, j{2}, j{0})").unwrap();
        let p = parse("circ(1, J{2}, J{0})").unwrap();
        assert_eq!(eval_poly(&p, 2).unwrap().eval(2).unwrap(), eval_state(&c, 2).unwrap());
    }
}
