//! The rank-n Heisenberg vertex algebra realized on its Fock space.
//!
//! A state is a finite linear combination of monomials in the creation modes
//! `α^i_{(-k)}`, `k >= 1`, applied to the vacuum. Circle products are computed
//! through the free-field vertex operator of each monomial: the monomial
//! `Π_k α^{g_k}_{(-n_k)}` has the field `:Π_k ∂^{n_k-1}α^{g_k}(z)/(n_k-1)!:`,
//! whose modes are finite sums of normally ordered products of the modes
//! `α^g_{(r)}`. Annihilation modes act as derivations on the right operand,
//! `α_{(0)}` acts as zero and the central element acts as 1.

use std::fmt;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::alpha::{AlphaMonomial, AlphaPoly, AlphaVar};
use crate::error::{Error, Result};
use crate::scalar::{binom_i128, factorial_i128, Scalar};
use crate::Map;

/// Products with at least this many monomial pairs are split across workers.
const PAR_THRESHOLD: usize = 2048;

/// The creation operator `α^gen_{(-depth)}`, of weight `depth`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mode {
    pub gen: u8,
    pub depth: u8,
}

impl Mode {
    pub fn new(gen: usize, depth: usize) -> Self {
        assert!(gen >= 1 && gen <= u8::MAX as usize, "generator index {gen} out of range");
        assert!(depth >= 1 && depth <= u8::MAX as usize, "mode depth {depth} out of range");
        Mode { gen: gen as u8, depth: depth as u8 }
    }
}

/// A multiset of creation modes kept sorted by (gen, depth).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FockMonomial(SmallVec<[Mode; 8]>);

impl FockMonomial {
    pub fn vacuum() -> Self {
        FockMonomial(SmallVec::new())
    }

    pub fn from_modes(modes: impl IntoIterator<Item = Mode>) -> Self {
        let mut v: SmallVec<[Mode; 8]> = modes.into_iter().collect();
        v.sort_unstable();
        FockMonomial(v)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|m| m.depth as usize).sum()
    }

    pub fn max_gen(&self) -> usize {
        self.0.iter().map(|m| m.gen as usize).max().unwrap_or(0)
    }

    fn insert(&mut self, mode: Mode) {
        let pos = self.0.partition_point(|m| *m <= mode);
        self.0.insert(pos, mode);
    }
}

/// An element of H(n): a sparse exact linear combination of Fock monomials.
#[derive(Clone, PartialEq, Debug)]
pub struct FockState<S> {
    rank: usize,
    terms: Map<FockMonomial, S>,
}

impl<S: Scalar> FockState<S> {
    pub fn zero(rank: usize) -> Self {
        FockState { rank, terms: Map::default() }
    }

    pub fn vacuum(rank: usize) -> Self {
        Self::monomial(rank, FockMonomial::vacuum(), S::one())
    }

    pub fn monomial(rank: usize, m: FockMonomial, c: S) -> Self {
        let mut s = Self::zero(rank);
        s.add_term(m, c);
        s
    }

    /// `α^i_{(-1)}` applied to the vacuum.
    pub fn generator(i: usize, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        if i == 0 || i > rank {
            return Err(Error::GeneratorOutOfRange { index: i, rank });
        }
        Ok(Self::monomial(rank, FockMonomial::from_modes([Mode::new(i, 1)]), S::one()))
    }

    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (FockMonomial, S)>) -> Result<Self> {
        let mut s = Self::zero(rank);
        for (m, c) in terms {
            if m.max_gen() > rank {
                return Err(Error::GeneratorOutOfRange { index: m.max_gen(), rank });
            }
            s.add_term(m, c);
        }
        Ok(s)
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

    pub fn coeff(&self, m: &FockMonomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockMonomial, &S)> {
        self.terms.iter()
    }

    /// Terms in canonical monomial order.
    pub fn sorted_terms(&self) -> Vec<(&FockMonomial, &S)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn add_term(&mut self, m: FockMonomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = self.clone();
        out.add_assign_state(other);
        Ok(out)
    }

    /// In-place sum; panics on rank mismatch.
    pub fn add_assign_state(&mut self, other: &Self) {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, k: &S) {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        if k.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone() * k);
        }
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut out = Self::zero(self.rank);
        if k.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * k)).collect();
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Largest number of modes in any monomial (the filtration degree).
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(FockMonomial::degree).max()
    }

    pub fn weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.terms.keys().map(FockMonomial::weight).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// The common weight of all monomials; `None` for inhomogeneous states.
    /// The zero state is homogeneous of every weight and reports `Some(0)`.
    pub fn homogeneous_weight(&self) -> Option<usize> {
        match self.weights().as_slice() {
            [] => Some(0),
            [w] => Some(*w),
            _ => None,
        }
    }

    /// The part of the state of the given weight.
    pub fn weight_component(&self, w: usize) -> Self {
        let mut out = Self::zero(self.rank);
        out.terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.weight() == w)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        out
    }

    /// The coefficient of the vacuum.
    pub fn scalar_part(&self) -> S {
        self.coeff(&FockMonomial::vacuum())
    }

    /// `∂u = u ∘_{-2} 1`, computed by the Leibniz rule `∂α_{(-k)} = k α_{(-k-1)}`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            let modes = m.modes();
            let mut i = 0;
            while i < modes.len() {
                let mode = modes[i];
                let mut j = i;
                while j < modes.len() && modes[j] == mode {
                    j += 1;
                }
                let count = (j - i) as i128;
                let mut next: SmallVec<[Mode; 8]> = SmallVec::with_capacity(modes.len());
                next.extend_from_slice(&modes[..i]);
                next.extend_from_slice(&modes[i + 1..]);
                let mut nm = FockMonomial(next);
                nm.insert(Mode { gen: mode.gen, depth: mode.depth.checked_add(1).expect("mode depth overflow") });
                out.add_term(nm, c.clone() * &S::from_int(mode.depth as i128 * count));
                i = j;
            }
        }
        out
    }

    pub fn derivative_n(&self, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.derivative();
        }
        out
    }

    /// The circle product `self ∘_m other`.
    pub fn circle(&self, other: &Self, m: i64) -> Result<Self> {
        self.check_rank(other)?;
        let rank = self.rank;
        let pairs = self.terms.len() * other.terms.len();
        let terms = if pairs >= PAR_THRESHOLD && rayon::current_num_threads() > 1 {
            let left: Vec<_> = self.terms.iter().collect();
            let right: Vec<_> = other.terms.iter().collect();
            // Partition the larger operand; the merge is a sum of exact values
            // and therefore independent of how the work was split.
            let acc = if right.len() >= left.len() {
                right
                    .par_chunks(64)
                    .fold(Map::default, |mut acc, chunk| {
                        for &(vm, vc) in chunk {
                            for &(um, uc) in &left {
                                accumulate_product(&mut acc, um, uc, m, vm, vc);
                            }
                        }
                        acc
                    })
                    .reduce(Map::default, merge_maps)
            } else {
                left.par_chunks(16)
                    .fold(Map::default, |mut acc, chunk| {
                        for &(um, uc) in chunk {
                            for &(vm, vc) in &right {
                                accumulate_product(&mut acc, um, uc, m, vm, vc);
                            }
                        }
                        acc
                    })
                    .reduce(Map::default, merge_maps)
            };
            acc
        } else {
            let mut acc = Map::default();
            for (um, uc) in &self.terms {
                for (vm, vc) in &other.terms {
                    accumulate_product(&mut acc, um, uc, m, vm, vc);
                }
            }
            acc
        };
        let mut out = Self::zero(rank);
        out.terms = terms;
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// All nonzero `self ∘_m other` with `m >= 0`, in descending `m`.
    pub fn singular_part(&self, other: &Self) -> Result<Vec<(i64, Self)>> {
        self.check_rank(other)?;
        let wu = self.weights().last().copied().unwrap_or(0);
        let wv = other.weights().last().copied().unwrap_or(0);
        let top = (wu + wv) as i64 - 1;
        let mut out = Vec::new();
        for m in (0..=top.max(-1)).rev() {
            let p = self.circle(other, m)?;
            if !p.is_zero() {
                out.push((m, p));
            }
        }
        Ok(out)
    }

    /// Image of the degree-`d` part in gr H(n), using `α^i_{(-k)} ↦ α^i_{k-1}/(k-1)!`.
    pub fn leading_symbol(&self, d: usize) -> Result<AlphaPoly<S>> {
        let mut out = AlphaPoly::zero(self.rank);
        for (m, c) in &self.terms {
            let deg = m.degree();
            if deg > d {
                return Err(Error::DegreeTooHigh { degree: d, found: deg });
            }
            if deg < d {
                continue;
            }
            let mut denom: i128 = 1;
            let vars = m.modes().iter().map(|mode| {
                denom *= factorial_i128(mode.depth as u32 - 1);
                AlphaVar { gen: mode.gen, index: mode.depth - 1 }
            });
            let am = AlphaMonomial::from_vars(vars);
            out.add_term(am, c.clone() / S::from_int(denom));
        }
        Ok(out)
    }

    /// Apply a linear substitution of the generators: `α^i ↦ Σ_j g[i][j] α^j`.
    pub fn substitute_generators(&self, g: &[Vec<S>]) -> Self {
        assert_eq!(g.len(), self.rank);
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            let mut partial: Vec<(SmallVec<[Mode; 8]>, S)> = vec![(SmallVec::new(), c.clone())];
            for mode in m.modes() {
                let row = &g[mode.gen as usize - 1];
                let mut next = Vec::with_capacity(partial.len() * self.rank);
                for (modes, k) in &partial {
                    for (j, gij) in row.iter().enumerate() {
                        if gij.is_zero() {
                            continue;
                        }
                        let mut nm = modes.clone();
                        nm.push(Mode { gen: (j + 1) as u8, depth: mode.depth });
                        next.push((nm, k.clone() * gij));
                    }
                }
                partial = next;
            }
            for (modes, k) in partial {
                out.add_term(FockMonomial::from_modes(modes), k);
            }
        }
        out
    }
}

fn merge_maps<S: Scalar>(mut a: Map<FockMonomial, S>, b: Map<FockMonomial, S>) -> Map<FockMonomial, S> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (m, c) in b {
        match a.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }
    a
}

fn accumulate_product<S: Scalar>(
    acc: &mut Map<FockMonomial, S>,
    um: &FockMonomial,
    uc: &S,
    m: i64,
    vm: &FockMonomial,
    vc: &S,
) {
    let results = monomial_mode_action(um, m, vm);
    if results.is_empty() {
        return;
    }
    let base = uc.clone() * vc;
    for (res, k) in results {
        let c = base.clone() * &S::from_int(k);
        match acc.entry(res) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }
}

/// The `m`-th mode of the vertex operator of `u`, applied to `v`.
///
/// The field of factor `α^g_{(-n)}` is `Σ_r C(-r-1, n-1) α^g_{(r)} z^{-r-n}`, so
/// the coefficient of `z^{-m-1}` in the product collects the mode assignments
/// with `Σ_k (r_k + n_k) = m + 1`.
pub(crate) fn monomial_mode_action(u: &FockMonomial, m: i64, v: &FockMonomial) -> Vec<(FockMonomial, i128)> {
    let factors = u.modes();
    let shift: i64 = factors.iter().map(|f| f.depth as i64).sum();
    let target = m + 1 - shift;
    let mut out = Vec::new();
    let mut remaining: SmallVec<[Mode; 8]> = v.0.clone();
    let mut creators: SmallVec<[usize; 8]> = SmallVec::new();
    annihilate(factors, 0, target, 0, 1, &mut remaining, &mut creators, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn annihilate(
    factors: &[Mode],
    k: usize,
    target: i64,
    annihilated: i64,
    coeff: i128,
    remaining: &mut SmallVec<[Mode; 8]>,
    creators: &mut SmallVec<[usize; 8]>,
    out: &mut Vec<(FockMonomial, i128)>,
) {
    if k == factors.len() {
        // Creation modes must absorb the rest: Σ_{creators} r = target - annihilated.
        let needed = annihilated - target;
        if needed < 0 {
            return;
        }
        let min_total: i64 = creators.iter().map(|&i| factors[i].depth as i64).sum();
        if needed < min_total {
            return;
        }
        create(factors, creators, 0, needed, coeff, remaining, out);
        return;
    }
    let f = factors[k];
    let n_minus_1 = f.depth as u32 - 1;

    creators.push(k);
    annihilate(factors, k + 1, target, annihilated, coeff, remaining, creators, out);
    creators.pop();

    let mut i = 0;
    while i < remaining.len() {
        let mode = remaining[i];
        let mut j = i + 1;
        while j < remaining.len() && remaining[j] == mode {
            j += 1;
        }
        if mode.gen == f.gen {
            let r = mode.depth as i128;
            let count = (j - i) as i128;
            let c = coeff * binom_i128(-r - 1, n_minus_1) * r * count;
            let removed = remaining.remove(i);
            annihilate(factors, k + 1, target, annihilated + r as i64, c, remaining, creators, out);
            remaining.insert(i, removed);
        }
        i = j;
    }
}

fn create(
    factors: &[Mode],
    creators: &[usize],
    idx: usize,
    needed: i64,
    coeff: i128,
    remaining: &SmallVec<[Mode; 8]>,
    out: &mut Vec<(FockMonomial, i128)>,
) {
    if idx == creators.len() {
        if needed == 0 {
            out.push((FockMonomial(remaining.clone()), coeff));
        }
        return;
    }
    let f = factors[creators[idx]];
    let rest_min: i64 = creators[idx + 1..].iter().map(|&i| factors[i].depth as i64).sum();
    let lo = f.depth as i64;
    let hi = needed - rest_min;
    let n_minus_1 = f.depth as u32 - 1;
    for s in lo..=hi {
        let c = coeff * binom_i128(s as i128 - 1, n_minus_1);
        if c == 0 {
            continue;
        }
        let mut next = FockMonomial(remaining.clone());
        next.insert(Mode { gen: f.gen, depth: u8::try_from(s).expect("mode depth overflow") });
        create(factors, creators, idx + 1, needed - s, c, &next.0, out);
    }
}

/// `u ∘_m v`.
pub fn circle_product<S: Scalar>(u: &FockState<S>, v: &FockState<S>, m: i64) -> Result<FockState<S>> {
    u.circle(v, m)
}

/// The right-nested iterated Wick product `:a_1 (:a_2 ( ... a_k):):`.
pub fn wick_product<S: Scalar>(factors: &[FockState<S>]) -> Result<FockState<S>> {
    let (last, rest) = factors.split_last().ok_or(Error::EmptyProduct)?;
    let mut acc = last.clone();
    for f in rest.iter().rev() {
        acc = f.circle(&acc, -1)?;
    }
    Ok(acc)
}

pub fn generator_state<S: Scalar>(i: usize, n: usize) -> Result<FockState<S>> {
    FockState::generator(i, n)
}

/// The Virasoro element `L = ½ Σ_i :α^i α^i:`.
pub fn virasoro<S: Scalar>(n: usize) -> FockState<S> {
    let half = S::one() / S::from_int(2);
    let mut out = FockState::zero(n);
    for i in 1..=n {
        out.add_term(FockMonomial::from_modes([Mode::new(i, 1), Mode::new(i, 1)]), half.clone());
    }
    out
}

impl<S: Scalar> fmt::Display for FockState<S> {
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
            if m.degree() == 0 {
                write!(f, "|0>")?;
            }
            for mode in m.modes() {
                write!(f, " a{}(-{})", mode.gen, mode.depth)?;
            }
        }
        Ok(())
    }
}
