//! Normally ordered polynomials in the abstract generators `Ω_{a,b}` and
//! `J^{2m}`, and their evaluation in H(n).
//!
//! A term is a coefficient together with a sequence of factors `∂^t X`; it
//! stands for the right-nested Wick product of the factors in the stored order.
//! Wick products are neither commutative nor associative, so the order is part
//! of the value: [`NOPoly::canonicalize`] reorders factors and therefore changes
//! the element represented, up to terms of lower degree.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::classical::{QMonomial, QPoly};
use crate::error::Result;
use crate::fock::FockState;
use crate::invariant::{j_state, omega, OmegaIndex};
use crate::scalar::{binom_i128, Scalar};
use crate::Map;

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum GenSymbol {
    Om(OmegaIndex),
    /// `J^{2m}`, stored by `m`.
    J(u32),
}

impl GenSymbol {
    pub fn om(a: u32, b: u32) -> Self {
        GenSymbol::Om(OmegaIndex::new(a, b))
    }

    pub fn weight(&self) -> usize {
        match self {
            GenSymbol::Om(idx) => idx.weight(),
            GenSymbol::J(m) => 2 * *m as usize + 2,
        }
    }

    /// The `ω`-index this symbol denotes.
    pub fn omega_index(&self) -> OmegaIndex {
        match self {
            GenSymbol::Om(idx) => *idx,
            GenSymbol::J(m) => OmegaIndex::new(0, 2 * m),
        }
    }

    fn sort_key(&self) -> (usize, u8, u32, u32) {
        match self {
            GenSymbol::Om(idx) => (self.weight(), 0, idx.a, idx.b),
            GenSymbol::J(m) => (self.weight(), 1, *m, 0),
        }
    }
}

impl Ord for GenSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for GenSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GenSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSymbol::Om(idx) => write!(f, "Om{{{},{}}}", idx.a, idx.b),
            GenSymbol::J(m) => write!(f, "J{{{}}}", 2 * m),
        }
    }
}

/// The factor `∂^d sym`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Factor {
    pub d: u32,
    pub sym: GenSymbol,
}

impl Factor {
    pub fn new(d: u32, sym: GenSymbol) -> Self {
        Factor { d, sym }
    }

    pub fn weight(&self) -> usize {
        self.sym.weight() + self.d as usize
    }
}

impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.sym, self.d).cmp(&(other.sym, other.d))
    }
}

impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            0 => write!(f, "{}", self.sym),
            d => write!(f, "d^{} {}", d, self.sym),
        }
    }
}

pub type Word = Vec<Factor>;

#[derive(Clone, PartialEq, Debug, Default)]
pub struct NOPoly<S> {
    terms: Vec<(S, Word)>,
}

impl<S: Scalar> NOPoly<S> {
    pub fn zero() -> Self {
        NOPoly { terms: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::from_terms([(c, Vec::new())])
    }

    pub fn factor(f: Factor) -> Self {
        Self::from_terms([(S::one(), vec![f])])
    }

    /// Terms are kept in the given order; equal words are merged.
    pub fn from_terms(terms: impl IntoIterator<Item = (S, Word)>) -> Self {
        let mut p = Self::zero();
        for (c, w) in terms {
            p.push(c, w);
        }
        p
    }

    pub fn push(&mut self, c: S, w: Word) {
        if c.is_zero() {
            return;
        }
        if let Some(pos) = self.terms.iter().position(|(_, x)| *x == w) {
            self.terms[pos].0 += &c;
            if self.terms[pos].0.is_zero() {
                self.terms.remove(pos);
            }
        } else {
            self.terms.push((c, w));
        }
    }

    pub fn terms(&self) -> &[(S, Word)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        let mut index: Map<Word, usize> = out.terms.iter().enumerate().map(|(i, (_, w))| (w.clone(), i)).collect();
        for (c, w) in &other.terms {
            match index.get(w) {
                Some(&i) => out.terms[i].0 += c,
                None => {
                    index.insert(w.clone(), out.terms.len());
                    out.terms.push((c.clone(), w.clone()));
                }
            }
        }
        out.terms.retain(|(c, _)| !c.is_zero());
        out
    }

    pub fn scale(&self, k: &S) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        NOPoly { terms: self.terms.iter().map(|(c, w)| (c.clone() * k, w.clone())).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.iter().map(|(_, w)| w.len()).max()
    }

    pub fn weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.terms.iter().map(|(_, w)| word_weight(w)).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// Sort the factors of every term into canonical order, merge equal words
    /// and sort the terms.
    pub fn canonicalize(&self) -> Self {
        let mut acc: Map<Word, S> = Map::default();
        for (c, w) in &self.terms {
            let mut w = w.clone();
            w.sort();
            *acc.entry(w).or_insert_with(S::zero) += c;
        }
        let mut terms: Vec<(S, Word)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (c, w)).collect();
        terms.sort_by(|a, b| word_cmp(&a.1, &b.1));
        NOPoly { terms }
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|(_, w)| w.windows(2).all(|p| p[0] <= p[1]))
    }

    /// `∂` by the Leibniz rule, which holds for Wick products.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (c, w) in &self.terms {
            for i in 0..w.len() {
                let mut nw = w.clone();
                nw[i].d += 1;
                out.push(c.clone(), nw);
            }
        }
        out
    }

    /// The symbol in gr(V_n) = C[Q_{a,b}]: the top-degree terms, with
    /// `∂^t Ω_{a,b} ↦ Σ_s C(t,s) Q_{a+s,b+t-s}`, multiplied commutatively.
    pub fn gr_symbol(&self) -> QPoly<S> {
        let Some(top) = self.degree() else { return QPoly::zero() };
        let mut out = QPoly::zero();
        for (c, w) in self.terms.iter().filter(|(_, w)| w.len() == top) {
            let mut p = QPoly::constant(c.clone());
            for f in w {
                p = p.mul(&factor_symbol(f));
            }
            out = out.add(&p);
        }
        out
    }

    /// Evaluate in H(n).
    pub fn eval(&self, n: usize) -> Result<FockState<S>> {
        let words: Vec<(&S, &[Factor])> = self.terms.iter().map(|(c, w)| (c, w.as_slice())).collect();
        let mut cache = FactorCache::new(n);
        for (_, w) in &words {
            for f in w.iter() {
                cache.prepare(f);
            }
        }
        eval_words(&words, n, &cache, true)
    }
}

/// `∂^t Ω_{a,b}` as a polynomial in the `Q`'s.
pub fn factor_symbol<S: Scalar>(f: &Factor) -> QPoly<S> {
    let idx = f.sym.omega_index();
    let t = f.d;
    QPoly::from_terms((0..=t).map(|s| {
        (QMonomial::from_vars([OmegaIndex::new(idx.a + s, idx.b + t - s)]), S::from_int(binom_i128(t as i128, s)))
    }))
}

pub fn word_weight(w: &[Factor]) -> usize {
    w.iter().map(Factor::weight).sum()
}

/// Order on words: by weight, then degree, then factor-wise.
pub fn word_cmp(a: &[Factor], b: &[Factor]) -> Ordering {
    (word_weight(a), a.len()).cmp(&(word_weight(b), b.len())).then_with(|| a.cmp(b))
}

/// Replace each `Q`-monomial by the Wick product of its factors in canonical order.
pub fn normal_order<S: Scalar>(p: &QPoly<S>) -> NOPoly<S> {
    let mut terms: Vec<(S, Word)> = p
        .iter()
        .map(|(m, c)| (c.clone(), m.vars().iter().map(|v| Factor::new(0, GenSymbol::Om(*v))).collect::<Word>()))
        .collect();
    for (_, w) in terms.iter_mut() {
        w.sort();
    }
    terms.sort_by(|a, b| word_cmp(&a.1, &b.1));
    NOPoly::from_terms(terms)
}

struct FactorCache<S> {
    n: usize,
    states: Map<Factor, FockState<S>>,
}

impl<S: Scalar> FactorCache<S> {
    fn new(n: usize) -> Self {
        FactorCache { n, states: Map::default() }
    }

    fn prepare(&mut self, f: &Factor) {
        if self.states.contains_key(f) {
            return;
        }
        let base = match f.sym {
            GenSymbol::Om(idx) => omega(idx.a, idx.b, self.n),
            GenSymbol::J(m) => j_state(m, self.n),
        };
        self.states.insert(*f, base.derivative_n(f.d as usize));
    }

    fn get(&self, f: &Factor) -> &FockState<S> {
        &self.states[f]
    }
}

type Group<'a, S> = (Factor, Vec<(&'a S, &'a [Factor])>);

/// Evaluate `Σ c · :w:` by grouping words on their first factor:
/// `Σ_f :f (Σ c · :rest:):`, which is one Wick product per distinct prefix.
fn eval_words<S: Scalar>(words: &[(&S, &[Factor])], n: usize, cache: &FactorCache<S>, top: bool) -> Result<FockState<S>> {
    let mut out = FockState::zero(n);
    let mut groups: Vec<Group<S>> = Vec::new();
    let mut pos: Map<Factor, usize> = Map::default();
    for &(c, w) in words {
        match w.split_first() {
            None => out.add_term(crate::fock::FockMonomial::vacuum(), c.clone()),
            Some((f, rest)) => {
                let i = *pos.entry(*f).or_insert_with(|| {
                    groups.push((*f, Vec::new()));
                    groups.len() - 1
                });
                groups[i].1.push((c, rest));
            }
        }
    }
    let apply = |(f, sub): &(Factor, Vec<(&S, &[Factor])>)| -> Result<FockState<S>> {
        let inner = eval_words(sub, n, cache, false)?;
        cache.get(f).circle(&inner, -1)
    };
    let parts: Vec<FockState<S>> = if top && groups.len() > 1 {
        groups.par_iter().map(apply).collect::<Result<_>>()?
    } else {
        groups.iter().map(apply).collect::<Result<_>>()?
    };
    for p in &parts {
        out.add_assign_state(p);
    }
    Ok(out)
}

impl<S: Scalar> fmt::Display for NOPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, w)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            match w.len() {
                0 => write!(f, " vac")?,
                1 => write!(f, " {}", w[0])?,
                _ => {
                    write!(f, " :")?;
                    for (k, x) in w.iter().enumerate() {
                        if k > 0 {
                            write!(f, " ")?;
                        }
                        write!(f, "{x}")?;
                    }
                    write!(f, ":")?;
                }
            }
        }
        Ok(())
    }
}
