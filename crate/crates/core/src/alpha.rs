//! Commutative polynomials in the symbols `α^i_j` (the associated graded of H(n)).

use std::collections::hash_map::Entry;
use std::fmt;

use smallvec::SmallVec;

use crate::scalar::Scalar;
use crate::Map;

/// The variable `α^gen_index`, of weight `index + 1`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AlphaVar {
    pub gen: u8,
    pub index: u8,
}

impl AlphaVar {
    pub fn new(gen: usize, index: usize) -> Self {
        AlphaVar { gen: u8::try_from(gen).expect("generator index"), index: u8::try_from(index).expect("symbol index") }
    }

    pub fn weight(&self) -> usize {
        self.index as usize + 1
    }
}

/// A commutative monomial, stored as a sorted multiset of variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct AlphaMonomial(SmallVec<[AlphaVar; 8]>);

impl AlphaMonomial {
    pub fn one() -> Self {
        AlphaMonomial(SmallVec::new())
    }

    pub fn from_vars(vars: impl IntoIterator<Item = AlphaVar>) -> Self {
        let mut v: SmallVec<[AlphaVar; 8]> = vars.into_iter().collect();
        v.sort_unstable();
        AlphaMonomial(v)
    }

    pub fn vars(&self) -> &[AlphaVar] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(AlphaVar::weight).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_vars(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn count(&self, v: AlphaVar) -> usize {
        self.0.iter().filter(|x| **x == v).count()
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct AlphaPoly<S> {
    rank: usize,
    terms: Map<AlphaMonomial, S>,
}

impl<S: Scalar> AlphaPoly<S> {
    pub fn zero(rank: usize) -> Self {
        AlphaPoly { rank, terms: Map::default() }
    }

    pub fn constant(rank: usize, c: S) -> Self {
        let mut p = Self::zero(rank);
        p.add_term(AlphaMonomial::one(), c);
        p
    }

    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (AlphaMonomial, S)>) -> Self {
        let mut p = Self::zero(rank);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    pub fn iter(&self) -> impl Iterator<Item = (&AlphaMonomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &AlphaMonomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn sorted_terms(&self) -> Vec<(&AlphaMonomial, &S)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn add_term(&mut self, m: AlphaMonomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::from_terms(self.rank, self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * k)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.rank.max(other.rank));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2);
            }
        }
        out
    }

    pub fn weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.terms.keys().map(AlphaMonomial::weight).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(AlphaMonomial::degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The infinitesimal rotation `E_{rs} = Σ_k (α^r_k ∂/∂α^s_k − α^s_k ∂/∂α^r_k)`.
    pub fn rotate(&self, r: usize, s: usize) -> Self {
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            let vars = m.vars();
            for (pos, v) in vars.iter().enumerate() {
                if pos > 0 && vars[pos - 1] == *v {
                    continue;
                }
                let (target, sign) = if v.gen as usize == s {
                    (r, S::one())
                } else if v.gen as usize == r {
                    (s, -S::one())
                } else {
                    continue;
                };
                let mult = S::from_int(m.count(*v) as i128);
                let mut nv: SmallVec<[AlphaVar; 8]> = vars.iter().copied().collect();
                nv.remove(pos);
                nv.push(AlphaVar { gen: target as u8, index: v.index });
                out.add_term(AlphaMonomial::from_vars(nv), c.clone() * &mult * &sign);
            }
        }
        out
    }

    /// The reflection `α^g_k ↦ −α^g_k`.
    pub fn reflect(&self, g: usize) -> Self {
        Self::from_terms(
            self.rank,
            self.terms.iter().map(|(m, c)| {
                let odd = m.vars().iter().filter(|v| v.gen as usize == g).count() % 2 == 1;
                (m.clone(), if odd { -c.clone() } else { c.clone() })
            }),
        )
    }
}

impl<S: Scalar> fmt::Display for AlphaPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for v in m.vars() {
                write!(f, " a{}_{}", v.gen, v.index)?;
            }
        }
        Ok(())
    }
}
