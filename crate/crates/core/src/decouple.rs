//! Reconstruction of the relations `D_{I,J}` from Weyl's determinants, their
//! remainders, and decoupling relations for the generators `j^{2r}`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::classical::{det_relation, express_in_q, DetIndex};
use crate::error::{Error, Result};
use crate::fock::{FockMonomial, FockState};
use crate::invariant::{express_in_j_basis, generation_step, j_basis, j_state, lambda_coeff, OmegaIndex};
use crate::linalg::{Echelon, Insert, SparseVec};
use crate::nopoly::{normal_order, word_cmp, Factor, GenSymbol, NOPoly, Word};
use crate::scalar::Scalar;
use crate::scratch::Scratch;
use crate::Map;

/// The layered decomposition `D_{I,J} = Σ_{k=1}^{n+1} D^{2k}_{I,J}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<S> {
    pub idx: DetIndex,
    pub rank: usize,
    /// Layer `k` has filtration degree `k` in the generators.
    pub layers: BTreeMap<usize, NOPoly<S>>,
    /// The coefficient of the leading `J`-basis element in the degree-1 layer.
    pub remainder: S,
    pub weight: usize,
}

/// How the determinant and the correction terms are normally ordered.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum Ordering {
    #[default]
    Canonical,
    /// Every word in reverse canonical order.
    Reversed,
}

#[derive(Default)]
pub struct ReconstructOptions<'a> {
    pub ordering: Ordering,
    pub scratch: Option<Scratch>,
    pub progress: Option<&'a (dyn Fn(&str) + Sync)>,
}

fn ordered<S: Scalar>(p: NOPoly<S>, ordering: Ordering) -> NOPoly<S> {
    match ordering {
        Ordering::Canonical => p,
        Ordering::Reversed => NOPoly::from_terms(p.terms().iter().map(|(c, w)| {
            let mut w = w.clone();
            w.reverse();
            (c.clone(), w)
        })),
    }
}

pub fn reconstruct<S: Scalar>(idx: &DetIndex, n: usize) -> Result<Decomposition<S>> {
    reconstruct_with(idx, n, &ReconstructOptions::default())
}

/// Starting from a normal ordering of `d_{I,J}`, repeatedly cancel the leading
/// symbol of the running total with a normally ordered polynomial of one lower
/// degree until the total vanishes.
pub fn reconstruct_with<S: Scalar>(idx: &DetIndex, n: usize, opts: &ReconstructOptions) -> Result<Decomposition<S>> {
    if idx.rank() != n {
        return Err(Error::InvalidIndex(format!("{idx} does not index an {}x{} determinant", n + 1, n + 1)));
    }
    let say = |msg: String| {
        if let Some(p) = opts.progress {
            p(&msg);
        }
    };
    let scratch = opts.scratch.clone().unwrap_or_else(Scratch::disabled);
    let weight = idx.weight();
    let mut layers = BTreeMap::new();
    let top = ordered(normal_order(&det_relation::<S>(idx)), opts.ordering);
    say(format!("layer {}: {} terms", n + 1, top.len()));
    let mut acc = top.eval(n)?;
    say(format!("layer {} evaluated: {} Fock terms", n + 1, acc.len()));
    layers.insert(n + 1, top);
    for k in (1..=n).rev() {
        let symbol = acc
            .leading_symbol(2 * k)
            .map_err(|e| Error::Internal(format!("running total has unexpected degree at layer {k}: {e}")))?;
        let p = express_in_q(&symbol, k, n).map_err(|e| Error::Internal(format!("layer {k}: {e}")))?;
        let layer = ordered(normal_order(&p), opts.ordering).neg();
        say(format!("layer {k}: {} terms", layer.len()));
        let held = scratch.hold(acc)?;
        let value = layer.eval(n)?;
        acc = held.into_state()?;
        acc.add_assign_state(&value);
        say(format!("layer {k} evaluated: running total has {} Fock terms", acc.len()));
        layers.insert(k, layer);
    }
    if !acc.is_zero() {
        return Err(Error::Internal(format!("decomposition of {idx} does not vanish: {} terms remain", acc.len())));
    }
    let remainder = remainder_of(&layers[&1], weight)?;
    Ok(Decomposition { idx: idx.clone(), rank: n, layers, remainder, weight })
}

/// The leading `J`-basis coordinate of a degree-1 layer of weight `w`:
/// the coefficient of `J^{w-2}` (or of `∂J^{w-3}` when `w` is odd).
pub fn remainder_of<S: Scalar>(layer: &NOPoly<S>, weight: usize) -> Result<S> {
    let m = weight as u32 - 2;
    let mut coeffs: Vec<(OmegaIndex, S)> = Vec::new();
    let mut derivs: Vec<(Factor, S)> = Vec::new();
    for (c, w) in layer.terms() {
        match w.as_slice() {
            [f] if f.d == 0 => coeffs.push((f.sym.omega_index(), c.clone())),
            [f] => derivs.push((*f, c.clone())),
            _ => return Err(Error::Internal("degree-1 layer has a product term".into())),
        }
    }
    for (f, c) in derivs {
        let idx = f.sym.omega_index();
        for (o, k) in crate::invariant::derivative_expansion(idx.a, idx.b, f.d) {
            coeffs.push((o, c.clone() * &S::from_int(k)));
        }
    }
    let coords = express_in_j_basis(&coeffs, m)?;
    Ok(coords[0].clone())
}

/// The remainder of the minimal relation `D_0 = D_{I,J}`, `I = J = (0..=n)`.
pub fn verify_conjecture<S: Scalar>(n: usize) -> Result<S> {
    Ok(reconstruct::<S>(&DetIndex::minimal(n), n)?.remainder)
}

/// The largest `l` such that `J^{2l}` is kept as a strong generator of
/// H(n)^{O(n)}: `2l = n^2 + 3n - 2`.
pub fn generator_bound(n: usize) -> u32 {
    ((n * n + 3 * n - 2) / 2) as u32
}

/// Canonical words of exactly the given weight in the factors `∂^t J^{2l}`, `l` in `symbols`.
pub fn j_words(weight: usize, symbols: &[u32]) -> Vec<Word> {
    let mut factors: Vec<Factor> = Vec::new();
    for &l in symbols {
        let base = 2 * l as usize + 2;
        for t in 0..=weight.saturating_sub(base) {
            factors.push(Factor::new(t as u32, GenSymbol::J(l)));
        }
    }
    factors.sort();
    fn rec(factors: &[Factor], start: usize, left: usize, cur: &mut Word, out: &mut Vec<Word>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..factors.len() {
            let w = factors[i].weight();
            if w > left {
                continue;
            }
            cur.push(factors[i]);
            rec(factors, i, left - w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&factors, 0, weight, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| word_cmp(a, b));
    out
}

/// Evaluate each word (followed by the `extra` states) as sparse vectors over
/// a common indexing of Fock monomials.
fn evaluate_words<S: Scalar>(words: &[Word], extra: &[FockState<S>], n: usize) -> Result<Vec<SparseVec<S>>> {
    let states: Vec<FockState<S>> = words
        .par_iter()
        .map(|w| NOPoly::from_terms([(S::one(), w.clone())]).eval(n))
        .collect::<Result<_>>()?;
    let mut all: Vec<FockMonomial> = states.iter().chain(extra).flat_map(|s| s.iter().map(|(m, _)| m.clone())).collect();
    all.sort_unstable();
    all.dedup();
    let index: Map<FockMonomial, usize> = all.into_iter().enumerate().map(|(i, m)| (m, i)).collect();
    Ok(states.iter().chain(extra).map(|s| s.iter().map(|(m, c)| (index[m], c.clone())).collect()).collect())
}

/// A normally ordered polynomial `Q` in `J^0, ..., J^{2L}` and their
/// derivatives with `eval(Q) = j^{2r}`, where `2L = min(n^2+3n-2, 2r-2)`.
pub fn find_decoupling<S: Scalar>(n: usize, r: u32) -> Result<NOPoly<S>> {
    let symbols: Vec<u32> = (0..r).filter(|&l| l <= generator_bound(n)).collect();
    let weight = 2 * r as usize + 2;
    let words = j_words(weight, &symbols);
    let target = j_state::<S>(r, n);
    let cols = evaluate_words(&words, std::slice::from_ref(&target), n)?;
    let mut ech = Echelon::new();
    for v in &cols[..words.len()] {
        ech.insert(v.clone());
    }
    let sol = ech.solve(cols[words.len()].clone()).ok_or_else(|| {
        Error::NoSolution(format!("j^{} is not a normally ordered polynomial in lower generators for n = {n}", 2 * r))
    })?;
    let q = NOPoly::from_terms(sol.into_iter().map(|(i, c)| (c, words[i].clone())));
    if q.eval(n)? != target {
        return Err(Error::Internal("decoupling relation failed re-evaluation".into()));
    }
    Ok(q)
}

/// Promote a decoupling relation for `j^{2r}` to one for `j^{2r+2}` by
/// applying `j^2 ∘_1` symbolically, using `j^2 ∘_1 j^{2r} = c_0 j^{2r+2} + Σ c_i ∂^{2i} J^{2r+2-2i}`.
///
/// `known[l]` must express `j^{2l}` in the kept generators for every `l <= r`
/// above [`generator_bound`]; symbols `J^{2l}` produced along the way are
/// replaced by those expressions.
pub fn promote_decoupling<S: Scalar>(n: usize, r: u32, known: &BTreeMap<u32, NOPoly<S>>) -> Result<NOPoly<S>> {
    let base = known
        .get(&r)
        .ok_or_else(|| Error::Precondition(format!("no decoupling relation for j^{} supplied", 2 * r)))?;
    let j2 = NOPoly::factor(Factor::new(0, GenSymbol::J(1)));
    let mut e = j2.circle(base, 1, n).to_j_symbols()?;
    let (_, coords) = generation_step::<S>(r, n)?;
    for ((t, l), c) in j_basis(2 * r + 2).into_iter().zip(&coords).skip(1) {
        e.push(-c.clone(), vec![Factor::new(t, GenSymbol::J(l))]);
    }
    let subs: BTreeMap<u32, NOPoly<S>> = known.range(generator_bound(n) + 1..=r).map(|(l, p)| (*l, p.clone())).collect();
    let e = e.substitute_j(&subs, n)?;
    // the new generator itself can reappear as a lone symbol
    let lone = vec![Factor::new(0, GenSymbol::J(r + 1))];
    let mut lead = coords[0].clone();
    let mut terms = Vec::new();
    for (c, w) in e.terms() {
        if *w == lone {
            lead -= c;
        } else {
            terms.push((c.clone(), w.clone()));
        }
    }
    if lead.is_zero() {
        return Err(Error::Singular(format!("promotion to j^{} has vanishing leading coefficient", 2 * r + 2)));
    }
    let inv = S::one() / lead;
    let q = NOPoly::from_terms(terms.into_iter().map(|(c, w)| (c * &inv, w)));
    if q.eval(n)? != j_state(r + 1, n) {
        return Err(Error::Internal("promoted decoupling relation failed re-evaluation".into()));
    }
    Ok(q)
}

/// Decoupling relations for `j^{2r}` obtained by solving directly at the
/// first decoupled weight and promoting from there.
pub fn promotion_chain<S: Scalar>(n: usize, r: u32) -> Result<NOPoly<S>> {
    let first = generator_bound(n) + 1;
    if r < first {
        return Err(Error::Precondition(format!("j^{} is a strong generator for n = {n}", 2 * r)));
    }
    let mut known = BTreeMap::new();
    known.insert(first, find_decoupling::<S>(n, first)?);
    for l in first..r {
        let next = promote_decoupling(n, l, &known)?;
        known.insert(l + 1, next);
    }
    Ok(known.remove(&r).expect("filled above"))
}

/// Dimension of the kernel of evaluation on canonical words of weight `w`
/// in all `∂^t J^{2l}`.
pub fn kernel_dimension(n: usize, w: usize) -> Result<usize> {
    Ok(kernel_basis::<crate::Q>(n, w)?.len())
}

/// A basis of the kernel of evaluation at weight `w`, as normally ordered polynomials.
pub fn kernel_basis<S: Scalar>(n: usize, w: usize) -> Result<Vec<NOPoly<S>>> {
    if w < 2 {
        return Ok(Vec::new());
    }
    let symbols: Vec<u32> = (0..=((w - 2) / 2) as u32).collect();
    let words = j_words(w, &symbols);
    let cols = evaluate_words::<S>(&words, &[], n)?;
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for v in cols {
        if let Insert::Dependent(c) = ech.insert(v) {
            out.push(NOPoly::from_terms(c.into_iter().map(|(i, x)| (x, words[i].clone()))));
        }
    }
    Ok(out)
}

/// True iff evaluation is injective on canonical words of every weight below `w`.
pub fn relation_free_below(n: usize, w: usize) -> Result<bool> {
    for weight in 0..w {
        if kernel_dimension(n, weight)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The action of the mode `ω_{a,b}(t)` on the relations, as the formal
/// combination `Σ_r c_r D_{I^r,J} + Σ_r d_r D_{I,J^r}`, where `I^r` replaces
/// `i_r` by `i_r + w`, `w = a + b + 1 - t`.
pub fn p_action_on_det<S: Scalar>(a: u32, b: u32, t: u32, idx: &DetIndex) -> Result<BTreeMap<DetIndex, S>> {
    if a > b {
        return Err(Error::Precondition(format!("need a <= b, got ({a},{b})")));
    }
    if t > a + b {
        return Err(Error::Precondition(format!("t = {t} gives nonpositive weight shift")));
    }
    let w = a + b + 1 - t;
    let mut out: BTreeMap<DetIndex, S> = BTreeMap::new();
    let mut push = |i: Vec<u32>, j: Vec<u32>, c: S| -> Result<()> {
        let key = DetIndex::new(i, j)?;
        let e = out.entry(key).or_insert_with(S::zero);
        *e += &c;
        Ok(())
    };
    for side in 0..2 {
        let (list, other) = if side == 0 { (&idx.i, &idx.j) } else { (&idx.j, &idx.i) };
        for r in 0..list.len() {
            let shifted = list[r] + w;
            if list.contains(&shifted) {
                continue;
            }
            let mut v = list.clone();
            v[r] = shifted;
            // Moving the entry to its sorted place passes over the entries it now exceeds.
            let passes = list[r + 1..].iter().filter(|&&x| x < shifted).count();
            v.sort_unstable();
            let sign = if passes % 2 == 0 { 1 } else { -1 };
            let c = S::from_int(sign * lambda_coeff(a, b, list[r], t));
            if c.is_zero() {
                continue;
            }
            if side == 0 {
                push(v, other.clone(), c)?;
            } else {
                push(other.clone(), v, c)?;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

impl<S: Scalar> fmt::Display for Decomposition<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "D_{{{}}} (rank {}, weight {})", self.idx, self.rank, self.weight)?;
        for (k, layer) in self.layers.iter().rev() {
            writeln!(f, "  D^{}: {}", 2 * k, layer)?;
        }
        write!(f, "  remainder: {}", self.remainder)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(p: i64, d: i64) -> Q {
        Q::new(p.into(), d.into())
    }

    #[test]
    fn rank_one_remainder() {
        // The determinant is normalized as det(Q_{i_r, j_s}), as for n = 2, 3.
        let d = reconstruct::<Q>(&DetIndex::minimal(1), 1).unwrap();
        assert_eq!(d.remainder, q(5, 4));
        assert_eq!(d.weight, 6);
        assert_eq!(d.layers.len(), 2);
        let mut total = FockState::zero(1);
        for layer in d.layers.values() {
            assert_eq!(layer.weights(), vec![6]);
            total.add_assign_state(&layer.eval(1).unwrap());
        }
        assert!(total.is_zero());
        assert_eq!(d.layers[&2].gr_symbol(), det_relation(&DetIndex::minimal(1)));
    }

    #[test]
    fn remainder_independent_of_ordering() {
        let opts = ReconstructOptions { ordering: Ordering::Reversed, ..Default::default() };
        let d = reconstruct_with::<Q>(&DetIndex::minimal(1), 1, &opts).unwrap();
        assert_eq!(d.remainder, q(5, 4));
        let d = reconstruct_with::<Q>(&DetIndex::minimal(2), 2, &opts).unwrap();
        assert_eq!(d.remainder, q(149, 600));
    }

    #[test]
    fn decoupling_rank_one() {
        assert!(matches!(find_decoupling::<Q>(1, 1), Err(Error::NoSolution(_))));
        let p = find_decoupling::<Q>(1, 2).unwrap();
        assert_eq!(p.eval(1).unwrap(), j_state(2, 1));
        assert!(p.terms().iter().all(|(_, w)| w.iter().all(|f| matches!(f.sym, GenSymbol::J(l) if l <= 1))));
    }

    #[test]
    fn minimal_relation_rank_one() {
        assert!(relation_free_below(1, 6).unwrap());
        assert_eq!(kernel_dimension(1, 6).unwrap(), 1);
        assert!(!relation_free_below(1, 7).unwrap());
    }

    #[test]
    fn word_enumeration() {
        // weight 4 over J^0: ∂^2 J^0 and :J^0 J^0:
        assert_eq!(j_words(4, &[0]).len(), 2);
        assert!(j_words(6, &[0, 1, 2]).iter().all(|w| crate::nopoly::word_weight(w) == 6));
    }

    #[test]
    fn p_action_examples() {
        let idx = DetIndex::minimal(1);
        let act = p_action_on_det::<Q>(0, 2, 1, &idx).unwrap();
        let i12 = DetIndex::new(vec![1, 2], vec![0, 1]).unwrap();
        let i03 = DetIndex::new(vec![0, 3], vec![0, 1]).unwrap();
        assert_eq!(act.get(&i12), Some(&q(-8, 1)));
        assert_eq!(act.get(&i03), Some(&q(12, 1)));
        assert_eq!(act.len(), 2);
        // w = 1 on I = (0,1): 0 -> 1 collides, 1 -> 2 does not.
        let act = p_action_on_det::<Q>(0, 0, 0, &idx).unwrap();
        let i02 = DetIndex::new(vec![0, 2], vec![0, 1]).unwrap();
        assert_eq!(act.keys().cloned().collect::<Vec<_>>(), vec![i02]);
    }

    #[test]
    fn promotion_agrees_with_direct_solve() {
        let promoted = promotion_chain::<Q>(1, 3).unwrap();
        let direct = find_decoupling::<Q>(1, 3).unwrap();
        assert_eq!(promoted.eval(1).unwrap(), direct.eval(1).unwrap());
        assert!(promoted.terms().iter().all(|(_, w)| w.iter().all(|f| matches!(f.sym, GenSymbol::J(l) if l <= 1))));
    }
}
