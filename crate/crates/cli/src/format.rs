//! Text and JSON forms of engine values. Text output is always in the
//! expression grammar, so it can be fed back to the parser.

use serde_json::{json, Map as JsonMap, Value as Json};
use voaforge::decouple::Decomposition;
use voaforge::fock::FockState;
use voaforge::nopoly::{Factor, GenSymbol};
use voaforge::scalar::factorial;
use voaforge::{NOPoly, Q};

use crate::expr::{rational_string, zero_expr, Atom, Expr, Term};

fn deriv(k: u32, e: Expr) -> Expr {
    if k == 0 {
        e
    } else {
        Expr::Deriv(k, Box::new(e))
    }
}

fn product(mut factors: Vec<Expr>) -> Vec<Expr> {
    match factors.len() {
        0 | 1 => factors,
        _ => vec![Expr::Wick(std::mem::take(&mut factors))],
    }
}

fn sum(terms: Vec<Term>) -> Expr {
    if terms.is_empty() {
        return zero_expr();
    }
    if terms.len() == 1 && terms[0].is_trivial() {
        return terms.into_iter().next().unwrap().factors.pop().unwrap();
    }
    Expr::Sum(terms)
}

/// A state as a sum of Wick products of `d^t a{i}`; the monomial
/// `Π α^i_{(-k)}` is `Π ∂^{k-1}α^i/(k-1)!`.
pub fn state_expr(s: &FockState<Q>) -> Expr {
    let terms = s
        .sorted_terms()
        .into_iter()
        .map(|(m, c)| {
            let mut coeff = c.clone();
            let mut factors = Vec::new();
            for mode in m.modes() {
                let t = mode.depth as u32 - 1;
                coeff /= factorial::<Q>(t);
                factors.push(deriv(t, Expr::Atom(Atom::Alpha(mode.gen as u32))));
            }
            Term::new(coeff, product(factors))
        })
        .collect();
    sum(terms)
}

fn factor_expr(f: &Factor) -> Expr {
    let atom = match f.sym {
        GenSymbol::Om(idx) => Atom::Om(idx.a, idx.b),
        GenSymbol::J(m) => Atom::JSym(m),
    };
    deriv(f.d, Expr::Atom(atom))
}

pub fn poly_expr(p: &NOPoly) -> Expr {
    sum(p.terms().iter().map(|(c, w)| Term::new(c.clone(), product(w.iter().map(factor_expr).collect()))).collect())
}

pub fn state_text(s: &FockState<Q>) -> String {
    state_expr(s).to_string()
}

pub fn poly_text(p: &NOPoly) -> String {
    poly_expr(p).to_string()
}

pub fn decomposition_text(d: &Decomposition<Q>) -> String {
    let mut out = format!("# D_{{{:?},{:?}}} in rank {}, weight {}\n", d.idx.i, d.idx.j, d.rank, d.weight);
    for (k, layer) in d.layers.iter().rev() {
        out.push_str(&format!("# layer of degree {}\n{}\n", 2 * k, poly_text(layer)));
    }
    out.push_str(&format!("# remainder {}\n", rational_string(&d.remainder)));
    out
}

pub fn rational_json(q: &Q) -> Json {
    Json::String(rational_string(q))
}

pub fn state_json(s: &FockState<Q>) -> Json {
    let terms: Vec<Json> = s
        .sorted_terms()
        .into_iter()
        .map(|(m, c)| {
            let mono: Vec<Json> = m.modes().iter().map(|x| json!([x.gen, x.depth])).collect();
            json!({ "coeff": rational_json(c), "monomial": mono })
        })
        .collect();
    json!({ "rank": s.rank(), "terms": terms })
}

pub fn poly_json(p: &NOPoly) -> Json {
    let terms: Vec<Json> = p
        .terms()
        .iter()
        .map(|(c, w)| {
            let factors: Vec<Json> = w
                .iter()
                .map(|f| match f.sym {
                    GenSymbol::Om(idx) => json!({ "d": f.d, "sym": "Om", "idx": [idx.a, idx.b] }),
                    GenSymbol::J(m) => json!({ "d": f.d, "sym": "J", "idx": [2 * m] }),
                })
                .collect();
            json!({ "coeff": rational_json(c), "factors": factors })
        })
        .collect();
    json!({ "terms": terms })
}

pub fn decomposition_json(d: &Decomposition<Q>) -> Json {
    let mut layers = JsonMap::new();
    for (k, layer) in &d.layers {
        layers.insert((2 * k).to_string(), poly_json(layer));
    }
    json!({
        "idx": { "I": d.idx.i, "J": d.idx.j },
        "layers": layers,
        "remainder": rational_json(&d.remainder),
    })
}

/// Render JSON deterministically (object keys sorted, two-space indent).
pub fn json_string(v: &Json) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_poly, eval_state};
    use crate::parse::parse;
    use num_traits::One;
    use voaforge::fock::virasoro;

    #[test]
    fn vacuum_is_one() {
        assert_eq!(state_text(&FockState::vacuum(2)), "1");
        assert_eq!(state_text(&FockState::zero(2)), "0");
    }

    #[test]
    fn states_reparse() {
        for s in [virasoro::<Q>(2), voaforge::invariant::omega(1, 3, 2), FockState::<Q>::generator(2, 3).unwrap().derivative_n(2)] {
            let text = state_text(&s);
            assert_eq!(eval_state(&parse(&text).unwrap(), s.rank()).unwrap(), s, "{text}");
        }
        assert_eq!(state_text(&virasoro::<Q>(1)), "1/2 :a{1} a{1}:");
    }

    #[test]
    fn polys_reparse() {
        let p = eval_poly(&parse("-2 :d^2 Om{0,1} J{4}: + 1/3 J{0} + vac").unwrap(), 1).unwrap();
        assert_eq!(eval_poly(&parse(&poly_text(&p)).unwrap(), 1).unwrap(), p);
        let j = poly_json(&p);
        assert_eq!(j["terms"][0]["factors"][0], json!({"d": 2, "sym": "Om", "idx": [0, 1]}));
    }

    #[test]
    fn state_json_schema() {
        let s = FockState::<Q>::generator(1, 2).unwrap().scale(&(-Q::one() / Q::from_integer(3.into())));
        assert_eq!(json_string(&state_json(&s)), json_string(&json!({"rank": 2, "terms": [{"coeff": "-1/3", "monomial": [[1, 1]]}]})));
    }
}
