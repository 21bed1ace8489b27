//! Zhu's product `*` and the subspace `O(V)` on H(n)^{O(n)}, with a
//! finite-weight certificate that commutators lie in `O(V)`.

use std::fmt;

use rayon::prelude::*;

use crate::decouple::j_words;
use crate::error::{Error, Result};
use crate::fock::{FockMonomial, FockState};
use crate::linalg::{Echelon, Insert, SparseVec};
use crate::nopoly::NOPoly;
use crate::scalar::{binom_i128, Scalar};
use crate::Map;

fn weight_of<S: Scalar>(a: &FockState<S>) -> Result<usize> {
    a.homogeneous_weight().ok_or(Error::Inhomogeneous)
}

/// `a * b = Σ_{j=0}^{m} C(m,j) a ∘_{j-1} b` for `a` of weight `m`.
pub fn zhu_product<S: Scalar>(a: &FockState<S>, b: &FockState<S>) -> Result<FockState<S>> {
    residue_sum(a, b, -1)
}

/// `a ∘ b = Σ_{j=0}^{m} C(m,j) a ∘_{j-2} b` for `a` of weight `m`.
pub fn zhu_circle<S: Scalar>(a: &FockState<S>, b: &FockState<S>) -> Result<FockState<S>> {
    residue_sum(a, b, -2)
}

fn residue_sum<S: Scalar>(a: &FockState<S>, b: &FockState<S>, shift: i64) -> Result<FockState<S>> {
    let m = weight_of(a)?;
    let mut out = FockState::zero(a.rank());
    for j in 0..=m {
        let p = a.circle(b, j as i64 + shift)?;
        out.add_scaled(&p, &S::from_int(binom_i128(m as i128, j as u32)));
    }
    Ok(out)
}

/// `Σ_{j>=0} C(m-1,j) a ∘_j b`, the commutator predicted modulo `O(V)`.
pub fn commutator_residue<S: Scalar>(a: &FockState<S>, b: &FockState<S>) -> Result<FockState<S>> {
    let m = weight_of(a)? as i128;
    let mut out = FockState::zero(a.rank());
    for (j, p) in a.singular_part(b)? {
        out.add_scaled(&p, &S::from_int(binom_i128(m - 1, j as u32)));
    }
    Ok(out)
}

/// A weight-truncated spanning set of `O(V)` for `V = H(n)^{O(n)}`.
pub struct ZhuContext<S> {
    pub rank: usize,
    pub cutoff: usize,
    columns: Map<FockMonomial, usize>,
    span: Echelon<S>,
    generators: usize,
}

/// Result of a span-membership test at a finite cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    Certified,
    /// Not found in the truncated span; says nothing about the full `O(V)`.
    UnknownAt(usize),
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Certified => write!(f, "certified"),
            Certificate::UnknownAt(w) => write!(f, "unknown at W = {w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorReport {
    /// `a*b - b*a - Σ_j C(m-1,j) a ∘_j b ∈ O`.
    pub identity: Certificate,
    /// `a*b - b*a ∈ O`.
    pub commutative: Certificate,
}

/// A basis of H(n)^{O(n)}[w], chosen greedily among canonical words in `∂^t J^{2l}`.
pub fn invariant_basis<S: Scalar>(n: usize, w: usize) -> Result<Vec<FockState<S>>> {
    if w == 0 {
        return Ok(vec![FockState::vacuum(n)]);
    }
    if w == 1 {
        return Ok(Vec::new());
    }
    let symbols: Vec<u32> = (0..=((w - 2) / 2) as u32).collect();
    let states: Vec<FockState<S>> = j_words(w, &symbols)
        .par_iter()
        .map(|word| NOPoly::from_terms([(S::one(), word.clone())]).eval(n))
        .collect::<Result<_>>()?;
    let mut cols: Map<FockMonomial, usize> = Map::default();
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for s in states {
        let v = to_sparse(&s, &mut cols);
        if let Insert::Independent = ech.insert(v) {
            out.push(s);
        }
    }
    Ok(out)
}

fn to_sparse<S: Scalar>(s: &FockState<S>, cols: &mut Map<FockMonomial, usize>) -> SparseVec<S> {
    let mut terms = s.sorted_terms();
    terms.sort_by(|a, b| a.0.cmp(b.0));
    terms
        .into_iter()
        .map(|(m, c)| {
            let next = cols.len();
            (*cols.entry(m.clone()).or_insert(next), c.clone())
        })
        .collect()
}

impl<S: Scalar> ZhuContext<S> {
    /// Span of `c ∘ d` over basis elements with `wt c + wt d + 1 <= cutoff`, `wt c >= 2`.
    pub fn new(n: usize, cutoff: usize) -> Result<Self> {
        let bases: Vec<Vec<FockState<S>>> = (0..cutoff).map(|w| invariant_basis(n, w)).collect::<Result<_>>()?;
        let mut pairs = Vec::new();
        for wc in 2..cutoff {
            for wd in 0..cutoff - wc {
                for c in 0..bases[wc].len() {
                    for d in 0..bases[wd].len() {
                        pairs.push((wc, c, wd, d));
                    }
                }
            }
        }
        let elements: Vec<FockState<S>> = pairs
            .par_iter()
            .map(|&(wc, c, wd, d)| zhu_circle(&bases[wc][c], &bases[wd][d]))
            .collect::<Result<_>>()?;
        let mut ctx = ZhuContext { rank: n, cutoff, columns: Map::default(), span: Echelon::new(), generators: 0 };
        for e in &elements {
            let v = to_sparse(e, &mut ctx.columns);
            ctx.span.insert(v);
            ctx.generators += 1;
        }
        Ok(ctx)
    }

    pub fn span_dimension(&self) -> usize {
        self.span.rank()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    /// Whether `s` lies in the truncated span.
    pub fn contains(&self, s: &FockState<S>) -> Certificate {
        let mut v = SparseVec::new();
        for (m, c) in s.iter() {
            match self.columns.get(m) {
                Some(&col) => {
                    v.insert(col, c.clone());
                }
                None => return Certificate::UnknownAt(self.cutoff),
            }
        }
        if self.span.solve(v).is_some() {
            Certificate::Certified
        } else {
            Certificate::UnknownAt(self.cutoff)
        }
    }
}

/// Check `a*b - b*a ∈ O(V)` and the commutator formula against the context's span.
pub fn commutator_in_o<S: Scalar>(a: &FockState<S>, b: &FockState<S>, ctx: &ZhuContext<S>) -> Result<CommutatorReport> {
    let wa = weight_of(a)?;
    let wb = weight_of(b)?;
    if ctx.rank != a.rank() || ctx.rank != b.rank() {
        return Err(Error::RankMismatch { left: ctx.rank, right: a.rank() });
    }
    if ctx.cutoff < wa + wb {
        return Err(Error::CutoffTooSmall { cutoff: ctx.cutoff, needed: wa + wb });
    }
    let comm = zhu_product(a, b)?.sub(&zhu_product(b, a)?)?;
    let predicted = commutator_residue(a, b)?;
    let identity = ctx.contains(&comm.sub(&predicted)?);
    let commutative = ctx.contains(&comm);
    Ok(CommutatorReport { identity, commutative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::virasoro;
    use crate::invariant::j_state;
    use crate::Q;

    #[test]
    fn units() {
        let n = 1;
        let b = j_state::<Q>(1, n);
        let vac = FockState::vacuum(n);
        assert_eq!(zhu_product(&vac, &b).unwrap(), b);
        assert_eq!(zhu_product(&b, &vac).unwrap(), b);
        assert!(zhu_circle(&vac, &b).unwrap().is_zero());
        assert!(zhu_product(&b.try_add(&vac).unwrap(), &b).is_err());
    }

    #[test]
    fn virasoro_circle_expansion() {
        let n = 2;
        let l = virasoro::<Q>(n);
        let b = j_state::<Q>(1, n);
        let two = Q::from_integer(2.into());
        let mut expected = l.circle(&b, -2).unwrap();
        expected.add_scaled(&l.circle(&b, -1).unwrap(), &two);
        expected.add_assign_state(&l.circle(&b, 0).unwrap());
        assert_eq!(zhu_circle(&l, &b).unwrap(), expected);
    }

    #[test]
    fn commutator_small() {
        let n = 1;
        let ctx = ZhuContext::<Q>::new(n, 6).unwrap();
        let a = j_state::<Q>(0, n);
        let r = commutator_in_o(&a, &a, &ctx).unwrap();
        assert!(r.commutative.is_certified());
        assert!(r.identity.is_certified());
        let b = j_state::<Q>(2, n);
        assert!(matches!(commutator_in_o(&a, &b, &ctx), Err(Error::CutoffTooSmall { .. })));
    }
}
