//! Classical invariant theory of O(n): polynomials in the quadratic invariants
//! `Q_{a,b}`, their expansion into `α`-variables, and Weyl's determinantal
//! relations.

use std::collections::hash_map::Entry;
use std::fmt;

use smallvec::SmallVec;

use crate::alpha::{AlphaMonomial, AlphaPoly, AlphaVar};
use crate::error::{Error, Result};
use crate::invariant::OmegaIndex;
use crate::linalg::{Echelon, SparseVec};
use crate::scalar::{factorial_i128, Scalar};
use crate::Map;

/// A commutative monomial in the `Q_{a,b}`, stored as a sorted multiset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct QMonomial(SmallVec<[OmegaIndex; 6]>);

impl QMonomial {
    pub fn one() -> Self {
        QMonomial(SmallVec::new())
    }

    pub fn from_vars(vars: impl IntoIterator<Item = OmegaIndex>) -> Self {
        let mut v: SmallVec<[OmegaIndex; 6]> = vars.into_iter().collect();
        v.sort_unstable();
        QMonomial(v)
    }

    pub fn vars(&self) -> &[OmegaIndex] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(OmegaIndex::weight).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_vars(self.0.iter().chain(other.0.iter()).copied())
    }
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct QPoly<S> {
    terms: Map<QMonomial, S>,
}

impl<S: Scalar> QPoly<S> {
    pub fn zero() -> Self {
        QPoly { terms: Map::default() }
    }

    pub fn constant(c: S) -> Self {
        Self::from_terms([(QMonomial::one(), c)])
    }

    pub fn var(a: u32, b: u32) -> Self {
        Self::from_terms([(QMonomial::from_vars([OmegaIndex::new(a, b)]), S::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (QMonomial, S)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
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

    pub fn iter(&self) -> impl Iterator<Item = (&QMonomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &QMonomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn sorted_terms(&self) -> Vec<(&QMonomial, &S)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn add_term(&mut self, m: QMonomial, c: S) {
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
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * k)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2);
            }
        }
        out
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(QMonomial::degree).max()
    }

    pub fn weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.terms.keys().map(QMonomial::weight).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// The derivation `Q_{a,b} ↦ Q_{a+1,b} + Q_{a,b+1}`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let vars = m.vars();
            for pos in 0..vars.len() {
                let v = vars[pos];
                for w in [OmegaIndex::new(v.a + 1, v.b), OmegaIndex::new(v.a, v.b + 1)] {
                    let mut nv: SmallVec<[OmegaIndex; 6]> = vars.iter().copied().collect();
                    nv[pos] = w;
                    out.add_term(QMonomial::from_vars(nv), c.clone());
                }
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Display for QPoly<S> {
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
                write!(f, " Q{{{},{}}}", v.a, v.b)?;
            }
        }
        Ok(())
    }
}

/// Substitute `Q_{a,b} ↦ Σ_{i=1}^n α^i_a α^i_b`.
pub fn q_expand<S: Scalar>(p: &QPoly<S>, n: usize) -> AlphaPoly<S> {
    let mut out = AlphaPoly::zero(n);
    for (m, c) in p.iter() {
        let mut partial: Vec<SmallVec<[AlphaVar; 8]>> = vec![SmallVec::new()];
        for v in m.vars() {
            let mut next = Vec::with_capacity(partial.len() * n);
            for vars in &partial {
                for i in 1..=n {
                    let mut nv = vars.clone();
                    nv.push(AlphaVar::new(i, v.a as usize));
                    nv.push(AlphaVar::new(i, v.b as usize));
                    next.push(nv);
                }
            }
            partial = next;
        }
        for vars in partial {
            out.add_term(AlphaMonomial::from_vars(vars), c.clone());
        }
    }
    out
}

/// A pair of strictly increasing index lists of length `n+1`, indexing the
/// determinant `d_{I,J} = det(Q_{i_r, j_s})`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DetIndex {
    pub i: Vec<u32>,
    pub j: Vec<u32>,
}

impl DetIndex {
    /// Validate and normalize so that `I <= J` lexicographically.
    pub fn new(i: Vec<u32>, j: Vec<u32>) -> Result<Self> {
        let increasing = |v: &[u32]| v.windows(2).all(|w| w[0] < w[1]);
        if i.is_empty() || i.len() != j.len() {
            return Err(Error::InvalidIndex(format!("index lists must be nonempty and of equal length, got {i:?} and {j:?}")));
        }
        if !increasing(&i) || !increasing(&j) {
            return Err(Error::InvalidIndex(format!("index lists must be strictly increasing, got {i:?} and {j:?}")));
        }
        Ok(if i <= j { DetIndex { i, j } } else { DetIndex { i: j, j: i } })
    }

    /// `I = J = (0, 1, ..., n)`, the index of the minimal-weight relation.
    pub fn minimal(n: usize) -> Self {
        let v: Vec<u32> = (0..=n as u32).collect();
        DetIndex { i: v.clone(), j: v }
    }

    /// The rank `n` for which this is an `(n+1) × (n+1)` determinant.
    pub fn rank(&self) -> usize {
        self.i.len() - 1
    }

    /// `|I| + |J|`.
    pub fn size(&self) -> usize {
        self.i.iter().chain(&self.j).map(|&x| x as usize).sum()
    }

    /// The weight `|I| + |J| + 2(n+1)` of `d_{I,J}`.
    pub fn weight(&self) -> usize {
        self.size() + 2 * self.i.len()
    }
}

impl fmt::Display for DetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I={:?} J={:?}", self.i, self.j)
    }
}

/// Permutations of `0..k` with their signs.
pub(crate) fn permutations(k: usize) -> Vec<(Vec<usize>, i128)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], sign: i128, out: &mut Vec<(Vec<usize>, i128)>) {
        let k = used.len();
        if prefix.len() == k {
            out.push((prefix.clone(), sign));
            return;
        }
        let mut skipped = 0;
        for x in 0..k {
            if used[x] {
                continue;
            }
            used[x] = true;
            prefix.push(x);
            rec(prefix, used, if skipped % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            used[x] = false;
            skipped += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], 1, &mut out);
    out
}

/// The determinant `d_{I,J}`, expanded by the Leibniz formula.
pub fn det_relation<S: Scalar>(idx: &DetIndex) -> QPoly<S> {
    let mut out = QPoly::zero();
    for (perm, sign) in permutations(idx.i.len()) {
        let m = QMonomial::from_vars(perm.iter().enumerate().map(|(r, &s)| OmegaIndex::new(idx.i[r], idx.j[s])));
        out.add_term(m, S::from_int(sign));
    }
    out
}

/// The unique degree-`k` polynomial `P` with `q_expand(P, n) = p`, for `k <= n`.
///
/// Below the relation degree the coefficients can be read off directly: give
/// the `j`-th (sorted) factor `Q_{a_j,b_j}` of a monomial its own colour `j`;
/// the `α`-monomial `Π_j α^j_{a_j} α^j_{b_j}` then only occurs in the expansion
/// of that one `Q`-monomial, with multiplicity `Π_P e_P!` over repeated factors.
/// The candidate is verified by re-expansion.
pub fn express_in_q<S: Scalar>(p: &AlphaPoly<S>, k: usize, n: usize) -> Result<QPoly<S>> {
    check_express_preconditions(p, k, n)?;
    let mut out = QPoly::zero();
    for (m, _) in p.iter() {
        if let Some(qm) = colour_pattern(m, k) {
            if out.terms.contains_key(&qm) {
                continue;
            }
            let coloured = coloured_monomial(&qm);
            let c = p.coeff(&coloured);
            if c.is_zero() {
                continue;
            }
            out.add_term(qm.clone(), c / S::from_int(repeat_factor(&qm)));
        }
    }
    if q_expand(&out, n) != *p {
        return Err(Error::NoSolution(format!("polynomial of degree {} is not a polynomial in the quadratic invariants", 2 * k)));
    }
    Ok(out)
}

/// Like [`express_in_q`], but by an exact linear solve over all `Q`-monomials
/// of degree `k` and matching weight. Exposed for cross-checking.
pub fn express_in_q_solve<S: Scalar>(p: &AlphaPoly<S>, k: usize, n: usize) -> Result<QPoly<S>> {
    check_express_preconditions(p, k, n)?;
    let weight = match p.weights().as_slice() {
        [] => return Ok(QPoly::zero()),
        [w] => *w,
        _ => return Err(Error::Inhomogeneous),
    };
    let monomials = q_monomials(k, weight);
    let mut columns: Map<AlphaMonomial, usize> = Map::default();
    let index = |m: &AlphaMonomial, columns: &mut Map<AlphaMonomial, usize>| {
        let next = columns.len();
        *columns.entry(m.clone()).or_insert(next)
    };
    let mut ech = Echelon::new();
    for qm in &monomials {
        let e = q_expand(&QPoly::from_terms([(qm.clone(), S::one())]), n);
        let v: SparseVec<S> = e.iter().map(|(m, c)| (index(m, &mut columns), c.clone())).collect();
        if let crate::linalg::Insert::Dependent(_) = ech.insert(v) {
            return Err(Error::NotUnique(format!("Q-monomials of degree {k} are dependent in rank {n}")));
        }
    }
    let mut target = SparseVec::new();
    for (m, c) in p.iter() {
        match columns.get(m) {
            Some(&col) => {
                target.insert(col, c.clone());
            }
            None => return Err(Error::NoSolution("target has a monomial outside the span".into())),
        }
    }
    let sol = ech.solve(target).ok_or_else(|| Error::NoSolution("target is not in the span".into()))?;
    Ok(QPoly::from_terms(sol.into_iter().map(|(i, c)| (monomials[i].clone(), c))))
}

fn check_express_preconditions<S: Scalar>(p: &AlphaPoly<S>, k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(Error::NotUnique(format!("degree {k} exceeds rank {n}; Weyl relations make the expression non-unique")));
    }
    if p.iter().any(|(m, _)| m.degree() != 2 * k) {
        return Err(Error::Precondition(format!("polynomial is not homogeneous of degree {}", 2 * k)));
    }
    if p.weights().len() > 1 {
        return Err(Error::Inhomogeneous);
    }
    Ok(())
}

/// If the monomial has the shape `Π_j α^j_{a_j} α^j_{b_j}` with colours `1..=k`
/// each used twice and pairs sorted by colour, return `Π_j Q_{a_j,b_j}`.
fn colour_pattern(m: &AlphaMonomial, k: usize) -> Option<QMonomial> {
    let vars = m.vars();
    let mut pairs = Vec::with_capacity(k);
    for j in 0..k {
        let (x, y) = (vars.get(2 * j)?, vars.get(2 * j + 1)?);
        if x.gen as usize != j + 1 || y.gen as usize != j + 1 {
            return None;
        }
        pairs.push(OmegaIndex::new(x.index as u32, y.index as u32));
    }
    pairs.windows(2).all(|w| w[0] <= w[1]).then(|| QMonomial::from_vars(pairs))
}

fn coloured_monomial(qm: &QMonomial) -> AlphaMonomial {
    AlphaMonomial::from_vars(qm.vars().iter().enumerate().flat_map(|(j, v)| {
        [AlphaVar::new(j + 1, v.a as usize), AlphaVar::new(j + 1, v.b as usize)]
    }))
}

fn repeat_factor(qm: &QMonomial) -> i128 {
    let vars = qm.vars();
    let mut f = 1;
    let mut i = 0;
    while i < vars.len() {
        let mut j = i;
        while j < vars.len() && vars[j] == vars[i] {
            j += 1;
        }
        f *= factorial_i128((j - i) as u32);
        i = j;
    }
    f
}

/// All `Q`-monomials of the given degree and weight, in lexicographic order.
pub fn q_monomials(degree: usize, weight: usize) -> Vec<QMonomial> {
    fn rec(left: usize, weight: usize, min: OmegaIndex, cur: &mut Vec<OmegaIndex>, out: &mut Vec<QMonomial>) {
        if left == 0 {
            if weight == 0 {
                out.push(QMonomial::from_vars(cur.iter().copied()));
            }
            return;
        }
        if weight < 2 * left {
            return;
        }
        let max_total = (weight - 2 * left) as u32;
        for total in 0..=max_total {
            for a in 0..=total / 2 {
                let v = OmegaIndex::new(a, total - a);
                if v < min {
                    continue;
                }
                cur.push(v);
                rec(left - 1, weight - v.weight(), v, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(degree, weight, OmegaIndex::new(0, 0), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// True iff `p` is killed by every infinitesimal rotation and fixed by the
/// reflection of the first coordinate.
pub fn is_invariant<S: Scalar>(p: &AlphaPoly<S>, n: usize) -> bool {
    for r in 1..=n {
        for s in r + 1..=n {
            if !p.rotate(r, s).is_zero() {
                return false;
            }
        }
    }
    p.reflect(1) == *p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(p: i64) -> Q {
        Q::from_integer(p.into())
    }

    #[test]
    fn expansion_examples() {
        let e = q_expand(&QPoly::<Q>::var(0, 0), 2);
        let expected = AlphaPoly::from_terms(
            2,
            [
                (AlphaMonomial::from_vars([AlphaVar::new(1, 0), AlphaVar::new(1, 0)]), q(1)),
                (AlphaMonomial::from_vars([AlphaVar::new(2, 0), AlphaVar::new(2, 0)]), q(1)),
            ],
        );
        assert_eq!(e, expected);
        assert_eq!(q_expand(&QPoly::constant(q(7)), 3), AlphaPoly::constant(3, q(7)));
    }

    #[test]
    fn small_determinants() {
        let d = det_relation::<Q>(&DetIndex::new(vec![0, 1], vec![0, 1]).unwrap());
        let expected = QPoly::var(0, 0).mul(&QPoly::var(1, 1)).sub(&QPoly::var(0, 1).mul(&QPoly::var(0, 1)));
        assert_eq!(d, expected);
        assert!(q_expand(&d, 1).is_zero());
        let d = det_relation::<Q>(&DetIndex::new(vec![0, 1], vec![0, 2]).unwrap());
        let expected = QPoly::var(0, 0).mul(&QPoly::var(1, 2)).sub(&QPoly::var(0, 2).mul(&QPoly::var(0, 1)));
        assert_eq!(d, expected);
        assert!(DetIndex::new(vec![1, 0], vec![0, 1]).is_err());
        assert_eq!(DetIndex::new(vec![0, 2], vec![0, 1]).unwrap().i, vec![0, 1]);
    }

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        for (p, s) in perms {
            let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            assert_eq!(s, if inversions % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn express_examples() {
        let p = q_expand(&QPoly::<Q>::var(0, 0), 3);
        assert_eq!(express_in_q(&p, 1, 3).unwrap(), QPoly::var(0, 0));
        let target = QPoly::<Q>::var(0, 1).mul(&QPoly::var(0, 0));
        let p = q_expand(&target, 2);
        assert_eq!(express_in_q(&p, 2, 2).unwrap(), target);
        assert_eq!(express_in_q_solve(&p, 2, 2).unwrap(), target);
        assert!(express_in_q(&p, 2, 1).is_err());
        let bad = AlphaPoly::from_terms(2, [(AlphaMonomial::from_vars([AlphaVar::new(1, 0), AlphaVar::new(1, 1)]), q(1))]);
        assert!(matches!(express_in_q(&bad, 1, 2), Err(Error::NoSolution(_))));
    }

    #[test]
    fn invariance_examples() {
        let n = 2;
        let a = AlphaPoly::from_terms(n, [(AlphaMonomial::from_vars([AlphaVar::new(1, 0), AlphaVar::new(1, 1)]), q(1))]);
        assert!(!is_invariant(&a, n));
        let b = q_expand(&QPoly::<Q>::var(0, 1), n);
        assert!(is_invariant(&b, n));
        let d = q_expand(&QPoly::<Q>::var(0, 1).mul(&QPoly::var(2, 2)), 3);
        assert!(is_invariant(&d, 3));
    }

    #[test]
    fn q_monomial_enumeration() {
        let ms = q_monomials(2, 6);
        // weight-6 pairs: {Q00, Q02}, {Q00, Q11}, {Q01, Q01}
        assert_eq!(ms.len(), 3);
        assert!(ms.iter().all(|m| m.weight() == 6 && m.degree() == 2));
    }
}
