//! Circle products of normally ordered polynomials computed on the words
//! themselves, without passing through the Fock space.
//!
//! The base case is the structure formula for `Ω_{a,b} ∘_m Ω_{c,d}`; products
//! with longer words are expanded by the noncommutative Wick rule, products
//! of longer words by the Wick-circle rule, and nested Wick products are
//! flattened back into right-nested words by quasi-associativity. The rank
//! only enters through the scalar at the top pole.

use crate::error::{Error, Result};
use crate::invariant::{express_in_j_basis, j_basis, omega_product_formula};
use crate::nopoly::{word_cmp, word_weight, Factor, GenSymbol, NOPoly, Word};
use crate::scalar::{binom_i128, factorial_i128, falling_i128, Scalar};
use crate::Map;

type Acc<S> = Map<Word, S>;

fn add_into<S: Scalar>(acc: &mut Acc<S>, w: Word, c: S) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(w).or_insert_with(S::zero);
    *e += &c;
}

fn merge_scaled<S: Scalar>(acc: &mut Acc<S>, other: Acc<S>, k: &S) {
    for (w, c) in other {
        add_into(acc, w, c * k);
    }
}

fn max_weight<S>(x: &Acc<S>) -> usize {
    x.keys().map(|w| word_weight(w)).max().unwrap_or(0)
}

fn prepend<S: Scalar>(f: Factor, x: Acc<S>) -> Acc<S> {
    x.into_iter()
        .map(|(w, c)| {
            let mut nw = Vec::with_capacity(w.len() + 1);
            nw.push(f);
            nw.extend(w);
            (nw, c)
        })
        .collect()
}

fn derivative_of_word<S: Scalar>(w: &[Factor], p: usize) -> Acc<S> {
    let mut cur: Acc<S> = Acc::default();
    cur.insert(w.to_vec(), S::one());
    for _ in 0..p {
        let mut next = Acc::default();
        for (w, c) in cur {
            for i in 0..w.len() {
                let mut nw = w.clone();
                nw[i].d += 1;
                add_into(&mut next, nw, c.clone());
            }
        }
        cur = next;
    }
    cur
}

struct Ope {
    n: usize,
}

impl Ope {
    /// `f ∘_m g` for single factors, `m >= 0`.
    fn factor_factor<S: Scalar>(&self, f: Factor, m: i64, g: Factor) -> Acc<S> {
        let mut out = Acc::default();
        let t = f.d as i64;
        if t > m {
            return out;
        }
        // (∂^t X)∘_m = (-1)^t FF(m,t) X∘_{m-t}
        let sign = if t % 2 == 0 { 1 } else { -1 };
        let outer = sign * falling_i128(m as i128, t as u32);
        let mp = m - t;
        let (x, y) = (f.sym.omega_index(), g.sym.omega_index());
        let top = (x.a + x.b + y.a + y.b + 3) as i64;
        let s = g.d as i64;
        // X∘_{m'} ∂^s Y = Σ_i C(s,i) FF(m',i) ∂^{s-i}(X∘_{m'-i} Y)
        for i in 0..=s.min(mp) {
            let k = mp - i;
            if k > top {
                continue;
            }
            let coeff = outer * binom_i128(s as i128, i as u32) * falling_i128(mp as i128, i as u32);
            if coeff == 0 {
                continue;
            }
            let c = S::from_int(coeff);
            let prod = omega_product_formula::<S>(x.a, x.b, y.a, y.b, k as u32, self.n);
            let d = (s - i) as u32;
            for (idx, v) in prod.omegas {
                add_into(&mut out, vec![Factor::new(d, GenSymbol::Om(idx))], v * &c);
            }
            if d == 0 {
                add_into(&mut out, Vec::new(), prod.scalar * &c);
            }
        }
        out
    }

    /// `f ∘_m :w:` for a single factor `f`, `m >= 0`.
    fn factor_word<S: Scalar>(&self, f: Factor, m: i64, w: &[Factor]) -> Acc<S> {
        match w {
            [] => Acc::default(),
            [g] => self.factor_factor(f, m, *g),
            [g, rest @ ..] => {
                let mut out = Acc::default();
                for (u, c) in self.factor_factor::<S>(f, m, *g) {
                    let mut nw = u;
                    nw.extend_from_slice(rest);
                    add_into(&mut out, nw, c);
                }
                merge_scaled(&mut out, prepend(*g, self.factor_word(f, m, rest)), &S::one());
                for k in 1..=m {
                    let b = S::from_int(binom_i128(m as i128, k as u32));
                    for (u, c) in self.factor_factor::<S>(f, m - k, *g) {
                        if let [h] = u.as_slice() {
                            merge_scaled(&mut out, self.factor_word(*h, k - 1, rest), &(c * &b));
                        }
                    }
                }
                out
            }
        }
    }

    fn factor_poly<S: Scalar>(&self, f: Factor, m: i64, x: &Acc<S>) -> Acc<S> {
        let mut out = Acc::default();
        for (w, c) in x {
            merge_scaled(&mut out, self.factor_word(f, m, w), c);
        }
        out
    }

    /// `:w:_{(m)} x` for any `m`.
    fn circle<S: Scalar>(&self, w: &[Factor], m: i64, x: &Acc<S>) -> Acc<S> {
        if m < 0 {
            let p = (-1 - m) as usize;
            let mut out = Acc::default();
            let inv = S::one() / S::from_int(factorial_i128(p as u32));
            for (u, c) in derivative_of_word::<S>(w, p) {
                merge_scaled(&mut out, self.flatten(&u, x), &(c * &inv));
            }
            return out;
        }
        match w {
            [] => Acc::default(),
            [f] => self.factor_poly(*f, m, x),
            [b, rest @ ..] => {
                let mut out = Acc::default();
                let wx = max_weight(x) as i64;
                // Σ_k 1/k! :(∂^k b)(C∘_{m+k} x):
                let mut k = 0;
                while m + k < word_weight(rest) as i64 + wx {
                    let inner = self.circle(rest, m + k, x);
                    let f = Factor::new(b.d + k as u32, b.sym);
                    let inv = S::one() / S::from_int(factorial_i128(k as u32));
                    merge_scaled(&mut out, prepend(f, inner), &inv);
                    k += 1;
                }
                // Σ_k C∘_{m-k-1}(b∘_k x)
                for k in 0..(b.weight() as i64 + wx) {
                    let z = self.factor_poly(*b, k, x);
                    if !z.is_empty() {
                        merge_scaled(&mut out, self.circle(rest, m - k - 1, &z), &S::one());
                    }
                }
                out
            }
        }
    }

    /// `:w x:` as right-nested words.
    fn flatten<S: Scalar>(&self, w: &[Factor], x: &Acc<S>) -> Acc<S> {
        match w {
            [] => x.clone(),
            [f] => prepend(*f, x.clone()),
            [b, rest @ ..] => {
                let mut out = prepend(*b, self.flatten(rest, x));
                let wx = max_weight(x) as i64;
                let bound = (word_weight(rest) as i64).max(b.weight() as i64) + wx;
                for k in 0..bound {
                    let inv = S::one() / S::from_int(factorial_i128(k as u32 + 1));
                    let cx = self.circle(rest, k, x);
                    if !cx.is_empty() {
                        merge_scaled(&mut out, prepend(Factor::new(b.d + k as u32 + 1, b.sym), cx), &inv);
                    }
                    let bx = self.factor_poly(*b, k, x);
                    if !bx.is_empty() {
                        for (u, c) in derivative_of_word::<S>(rest, k as usize + 1) {
                            merge_scaled(&mut out, self.flatten(&u, &bx), &(c * &inv));
                        }
                    }
                }
                out
            }
        }
    }
}

fn to_acc<S: Scalar>(p: &NOPoly<S>) -> Acc<S> {
    let mut acc = Acc::default();
    for (c, w) in p.terms() {
        add_into(&mut acc, w.clone(), c.clone());
    }
    acc
}

fn from_acc<S: Scalar>(acc: Acc<S>) -> NOPoly<S> {
    let mut terms: Vec<(S, Word)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (c, w)).collect();
    terms.sort_by(|a, b| word_cmp(&a.1, &b.1));
    NOPoly::from_terms(terms)
}

impl<S: Scalar> NOPoly<S> {
    /// `self ∘_m other` in the universal algebra, evaluated at rank `n` only
    /// through the vacuum coefficients of the generator products.
    pub fn circle(&self, other: &Self, m: i64, n: usize) -> Self {
        let ope = Ope { n };
        let x = to_acc(other);
        let mut out = Acc::default();
        for (c, w) in self.terms() {
            merge_scaled(&mut out, ope.circle(w, m, &x), c);
        }
        from_acc(out)
    }

    /// `:self other:` as right-nested words.
    pub fn wick(&self, other: &Self, n: usize) -> Self {
        self.circle(other, -1, n)
    }

    /// Rewrite every `∂^t Ω_{a,b}` in the basis `∂^s J^{2l}` of its weight space.
    pub fn to_j_symbols(&self) -> Result<Self> {
        let mut out = Acc::default();
        for (c, w) in self.terms() {
            let mut partial: Vec<(Word, S)> = vec![(Vec::new(), c.clone())];
            for f in w {
                let options: Vec<(Factor, S)> = match f.sym {
                    GenSymbol::J(_) => vec![(*f, S::one())],
                    GenSymbol::Om(idx) => {
                        let m = idx.total();
                        let coords = express_in_j_basis(&[(idx, S::one())], m)?;
                        j_basis(m)
                            .into_iter()
                            .zip(coords)
                            .filter(|(_, x)| !x.is_zero())
                            .map(|((t, l), x)| (Factor::new(f.d + t, GenSymbol::J(l)), x))
                            .collect()
                    }
                };
                let mut next = Vec::with_capacity(partial.len() * options.len());
                for (pw, pc) in &partial {
                    for (g, x) in &options {
                        let mut nw = pw.clone();
                        nw.push(*g);
                        next.push((nw, pc.clone() * x));
                    }
                }
                partial = next;
            }
            for (w2, c2) in partial {
                add_into(&mut out, w2, c2);
            }
        }
        Ok(from_acc(out))
    }

    /// Replace `J^{2l}` (and its derivatives) by `subs[l]` wherever it occurs,
    /// flattening the nested Wick products that result. Repeats until no
    /// substitutable symbol is left.
    pub fn substitute_j(&self, subs: &std::collections::BTreeMap<u32, NOPoly<S>>, n: usize) -> Result<Self> {
        let ope = Ope { n };
        let mut cur = self.clone();
        for _ in 0..64 {
            let mut out = Acc::default();
            let mut changed = false;
            for (c, w) in cur.terms() {
                let pos = w.iter().rposition(|f| matches!(f.sym, GenSymbol::J(l) if subs.contains_key(&l)));
                let Some(pos) = pos else {
                    add_into(&mut out, w.clone(), c.clone());
                    continue;
                };
                changed = true;
                let GenSymbol::J(l) = w[pos].sym else { unreachable!() };
                let mut sub = subs[&l].clone();
                for _ in 0..w[pos].d {
                    sub = sub.derivative();
                }
                let suffix = to_acc(&NOPoly::from_terms([(S::one(), w[pos + 1..].to_vec())]));
                let mut inner = Acc::default();
                for (sc, sw) in sub.terms() {
                    merge_scaled(&mut inner, ope.flatten(sw, &suffix), sc);
                }
                for f in w[..pos].iter().rev() {
                    inner = prepend(*f, inner);
                }
                merge_scaled(&mut out, inner, c);
            }
            cur = from_acc(out).to_j_symbols()?;
            if !changed {
                return Ok(cur);
            }
        }
        Err(Error::Internal("symbol substitution did not terminate".into()))
    }
}
