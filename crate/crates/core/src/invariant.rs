//! The strong generators `ω_{a,b}` and `j^{2m}` of H(n)^{O(n)} and their
//! structure constants.

use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{FockMonomial, FockState, Mode};
use crate::linalg::solve_dense;
use crate::scalar::{binom_i128, factorial_i128, falling_i128, Scalar};
use crate::Map;

/// The index of `ω_{a,b}`, normalized so that `a <= b`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OmegaIndex {
    pub a: u32,
    pub b: u32,
}

impl OmegaIndex {
    pub fn new(a: u32, b: u32) -> Self {
        if a <= b {
            OmegaIndex { a, b }
        } else {
            OmegaIndex { a: b, b: a }
        }
    }

    /// Like [`OmegaIndex::new`], but `None` when an index is negative.
    pub fn checked(a: i64, b: i64) -> Option<Self> {
        (a >= 0 && b >= 0).then(|| Self::new(a as u32, b as u32))
    }

    pub fn weight(&self) -> usize {
        (self.a + self.b + 2) as usize
    }

    /// `a + b`, the index of the space `A_m` containing `ω_{a,b}`.
    pub fn total(&self) -> u32 {
        self.a + self.b
    }
}

impl fmt::Display for OmegaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{{{},{}}}", self.a, self.b)
    }
}

/// `ω_{a,b} = Σ_i :∂^a α^i ∂^b α^i:`.
pub fn omega<S: Scalar>(a: u32, b: u32, n: usize) -> FockState<S> {
    let idx = OmegaIndex::new(a, b);
    let c = S::from_int(factorial_i128(idx.a) * factorial_i128(idx.b));
    let mut out = FockState::zero(n);
    for i in 1..=n {
        let m = FockMonomial::from_modes([Mode::new(i, idx.a as usize + 1), Mode::new(i, idx.b as usize + 1)]);
        out.add_term(m, c.clone());
    }
    out
}

/// `j^{2m} = ω_{0,2m}`.
pub fn j_state<S: Scalar>(m: u32, n: usize) -> FockState<S> {
    omega(0, 2 * m, n)
}

/// `λ_{a,b,c,m} = (-1)^b FF(b+c+1, m) + (-1)^a FF(a+c+1, m)`, so that
/// `ω_{a,b} ∘_m ∂^c α^i = λ_{a,b,c,m} ∂^{a+b+c+1-m} α^i`.
pub fn lambda_coeff(a: u32, b: u32, c: u32, m: u32) -> i128 {
    let sign = |k: u32| if k.is_multiple_of(2) { 1 } else { -1 };
    sign(b) * falling_i128((b + c + 1) as i128, m) + sign(a) * falling_i128((a + c + 1) as i128, m)
}

/// The predicted value of `ω_{a,b} ∘_m ω_{c,d}` for `m >= 0`: a combination
/// of `ω`'s (negative indices dropped) together with a scalar, which is only
/// present at the top pole `m = a+b+c+d+3`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaProduct<S> {
    pub omegas: Vec<(OmegaIndex, S)>,
    pub scalar: S,
}

pub fn omega_product_formula<S: Scalar>(a: u32, b: u32, c: u32, d: u32, m: u32, n: usize) -> OmegaProduct<S> {
    let mut acc: Map<OmegaIndex, S> = Map::default();
    let mut push = |idx: Option<OmegaIndex>, k: i128| {
        if let (Some(idx), true) = (idx, k != 0) {
            let e = acc.entry(idx).or_insert_with(S::zero);
            *e += &S::from_int(k);
        }
    };
    let s = (a + b + 1) as i64 - m as i64;
    push(OmegaIndex::checked(s + c as i64, d as i64), lambda_coeff(a, b, c, m));
    push(OmegaIndex::checked(c as i64, s + d as i64), lambda_coeff(a, b, d, m));
    let mut omegas: Vec<(OmegaIndex, S)> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    omegas.sort_by_key(|x| x.0);
    let scalar = if m == a + b + c + d + 3 { S::from_int(omega_top_scalar(a, b, c, d, n)) } else { S::zero() };
    OmegaProduct { omegas, scalar }
}

/// The vacuum coefficient of `ω_{a,b} ∘_{a+b+c+d+3} ω_{c,d}`.
pub fn omega_top_scalar(a: u32, b: u32, c: u32, d: u32, n: usize) -> i128 {
    // ∂^p α ∘_{p+q+1} ∂^q α = (-1)^p (p+q+1)!, and ∂^a α^i contracts with
    // ∂^c α^i and ∂^b α^i with ∂^d α^i, or the other way round.
    let pair = |p: u32, q: u32| {
        let s = if p.is_multiple_of(2) { 1 } else { -1 };
        s * factorial_i128(p + q + 1)
    };
    n as i128 * (pair(a, c) * pair(b, d) + pair(a, d) * pair(b, c))
}

/// Evaluate an [`OmegaProduct`] as a Fock state.
pub fn omega_product_state<S: Scalar>(p: &OmegaProduct<S>, n: usize) -> FockState<S> {
    let mut out = FockState::zero(n);
    for (idx, c) in &p.omegas {
        out.add_scaled(&omega(idx.a, idx.b, n), c);
    }
    out.add_scaled(&FockState::vacuum(n), &p.scalar);
    out
}

/// Check `ω_{a,b} ∘_m ω_{c,d}` against the structure-constant formula.
pub fn check_lie_conformal(a: u32, b: u32, c: u32, d: u32, m: u32, n: usize) -> Result<bool> {
    if a > b || c > d {
        return Err(Error::Precondition(format!("indices must satisfy a <= b and c <= d, got ({a},{b}),({c},{d})")));
    }
    if m > a + b + c + d + 3 {
        return Err(Error::Precondition(format!("m = {m} exceeds the pole order {}", a + b + c + d + 3)));
    }
    let lhs: FockState<crate::Q> = omega(a, b, n).circle(&omega(c, d, n), m as i64)?;
    let rhs = omega_product_state(&omega_product_formula(a, b, c, d, m, n), n);
    Ok(lhs == rhs)
}

/// `∂^t ω_{a,b} = Σ_s C(t,s) ω_{a+s, b+t-s}`, as coordinates in `A_{a+b+t}`.
pub fn derivative_expansion(a: u32, b: u32, t: u32) -> Vec<(OmegaIndex, i128)> {
    let mut acc: Map<OmegaIndex, i128> = Map::default();
    for s in 0..=t {
        *acc.entry(OmegaIndex::new(a + s, b + t - s)).or_insert(0) += binom_i128(t as i128, s);
    }
    let mut v: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    v.sort();
    v
}

/// The `J`-basis of `A_m`: `(t, l)` pairs standing for `∂^t J^{2l}`, in the
/// order `∂^{2i} J^{m-2i}` (m even) or `∂^{2i+1} J^{m-1-2i}` (m odd), `i = 0, 1, ...`.
pub fn j_basis(m: u32) -> Vec<(u32, u32)> {
    if m.is_multiple_of(2) {
        (0..=m / 2).map(|i| (2 * i, (m - 2 * i) / 2)).collect()
    } else {
        (0..=(m - 1) / 2).map(|i| (2 * i + 1, (m - 1 - 2 * i) / 2)).collect()
    }
}

/// The `ω`-basis of `A_m`: `ω_{a, m-a}` for `a = 0..=m/2`.
pub fn omega_basis(m: u32) -> Vec<OmegaIndex> {
    (0..=m / 2).map(|a| OmegaIndex::new(a, m - a)).collect()
}

/// Columns: the `J`-basis elements expanded in the `ω`-basis.
fn transition_matrix<S: Scalar>(m: u32) -> Vec<Vec<S>> {
    let basis = j_basis(m);
    let rows = omega_basis(m);
    let mut mat = vec![vec![S::zero(); basis.len()]; rows.len()];
    for (col, &(t, l)) in basis.iter().enumerate() {
        for (idx, c) in derivative_expansion(0, 2 * l, t) {
            mat[idx.a as usize][col] += &S::from_int(c);
        }
    }
    mat
}

/// Coordinates of an element of `A_m` in the `J`-basis returned by [`j_basis`].
pub fn express_in_j_basis<S: Scalar>(coeffs: &[(OmegaIndex, S)], m: u32) -> Result<Vec<S>> {
    let mut rhs = vec![S::zero(); omega_basis(m).len()];
    for (idx, c) in coeffs {
        if idx.total() != m {
            return Err(Error::Precondition(format!("{idx} does not lie in A_{m}")));
        }
        rhs[idx.a as usize] += c;
    }
    solve_dense(&transition_matrix(m), &rhs).map_err(|e| Error::Internal(format!("J-basis transition for A_{m}: {e}")))
}

/// Expand `J`-basis coordinates back into the `ω`-basis.
pub fn j_basis_to_omega<S: Scalar>(coords: &[S], m: u32) -> Vec<(OmegaIndex, S)> {
    let mat = transition_matrix::<S>(m);
    omega_basis(m)
        .into_iter()
        .zip(mat)
        .map(|(idx, row)| {
            let mut acc = S::zero();
            for (x, c) in row.iter().zip(coords) {
                acc += &(x.clone() * c);
            }
            (idx, acc)
        })
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Read the degree-2 invariant part of a state as a combination of `ω`'s.
///
/// Only the `α^1` monomials are inspected; the caller is responsible for the
/// degree-2 part being `O(n)`-invariant.
pub fn omega_coordinates<S: Scalar>(state: &FockState<S>) -> Vec<(OmegaIndex, S)> {
    let mut out: Vec<(OmegaIndex, S)> = state
        .iter()
        .filter_map(|(m, c)| match m.modes() {
            [x, y] if x.gen == 1 && y.gen == 1 => {
                let idx = OmegaIndex::new(x.depth as u32 - 1, y.depth as u32 - 1);
                let norm = factorial_i128(idx.a) * factorial_i128(idx.b);
                Some((idx, c.clone() / S::from_int(norm)))
            }
            _ => None,
        })
        .collect();
    out.sort_by_key(|x| x.0);
    out
}

/// `j^2 ∘_1 j^{2k}` and its `J`-basis coordinates in `A_{2k+2}`.
pub fn generation_step<S: Scalar>(k: u32, n: usize) -> Result<(FockState<S>, Vec<S>)> {
    let prod = j_state::<S>(1, n).circle(&j_state(k, n), 1)?;
    let coords = express_in_j_basis(&omega_coordinates(&prod), 2 * k + 2)?;
    Ok((prod, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;
    use num_traits::Zero;

    fn q(p: i64, d: i64) -> Q {
        Q::new(p.into(), d.into())
    }

    #[test]
    fn omega_basics() {
        for n in 1..=3 {
            let l = omega::<Q>(0, 0, n).scale(&q(1, 2));
            assert_eq!(l.circle(&l, 3).unwrap().scalar_part(), q(n as i64, 2));
            assert_eq!(omega::<Q>(0, 2, n), j_state(1, n));
            assert_eq!(omega::<Q>(1, 0, n), omega(0, 1, n));
            assert_eq!(j_state::<Q>(0, n), omega(0, 0, n));
            assert_eq!(j_state::<Q>(3, n).homogeneous_weight(), Some(8));
        }
        assert_eq!(OmegaIndex::new(3, 1), OmegaIndex { a: 1, b: 3 });
    }

    #[test]
    fn derivatives_of_omega() {
        let n = 2;
        for (a, b) in [(0, 0), (0, 1), (1, 1)] {
            let lhs = omega::<Q>(a, b, n).derivative();
            let rhs = omega::<Q>(a + 1, b, n).try_add(&omega(a, b + 1, n)).unwrap();
            assert_eq!(lhs, rhs);
        }
        let d2 = j_state::<Q>(0, n).derivative_n(2);
        let rhs = omega::<Q>(1, 1, n).scale(&q(2, 1)).try_add(&omega::<Q>(0, 2, n).scale(&q(2, 1))).unwrap();
        assert_eq!(d2, rhs);
    }

    #[test]
    fn lambda_values() {
        assert_eq!(lambda_coeff(0, 0, 0, 1), 2);
        assert_eq!(lambda_coeff(0, 2, 1, 3), 24);
        assert_eq!(lambda_coeff(0, 2, 0, 1), 4);
        let a = crate::fock::FockState::<Q>::generator(1, 1).unwrap();
        assert_eq!(omega::<Q>(0, 0, 1).circle(&a, 1).unwrap(), a.scale(&q(2, 1)));
    }

    #[test]
    fn lambda_matches_fock_action() {
        let n = 2;
        let alpha = crate::fock::FockState::<Q>::generator(2, n).unwrap();
        for a in 0..3 {
            for b in a..4 {
                for c in 0..3 {
                    let dc = alpha.derivative_n(c as usize);
                    for m in 0..=(a + b + c + 1) {
                        let lhs = omega::<Q>(a, b, n).circle(&dc, m as i64).unwrap();
                        let rhs = alpha.derivative_n((a + b + c + 1 - m) as usize).scale(&Q::from_integer(lambda_coeff(a, b, c, m).into()));
                        assert_eq!(lhs, rhs, "a={a} b={b} c={c} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn lie_conformal_examples() {
        assert!(check_lie_conformal(0, 2, 0, 0, 1, 2).unwrap());
        let p = omega_product_formula::<Q>(0, 2, 0, 0, 1, 2);
        assert_eq!(p.omegas, vec![(OmegaIndex::new(0, 2), q(8, 1))]);
        for n in 1..=3 {
            assert!(check_lie_conformal(0, 0, 0, 0, 3, n).unwrap());
            assert_eq!(omega_top_scalar(0, 0, 0, 0, n), 2 * n as i128);
        }
        assert!(check_lie_conformal(1, 0, 0, 0, 1, 1).is_err());
    }

    #[test]
    fn j_basis_examples() {
        let c = express_in_j_basis(&[(OmegaIndex::new(1, 1), q(1, 1))], 2).unwrap();
        assert_eq!(c, vec![q(-1, 1), q(1, 2)]);
        let c = express_in_j_basis(&[(OmegaIndex::new(0, 2), q(1, 1))], 2).unwrap();
        assert_eq!(c, vec![q(1, 1), q(0, 1)]);
        let c = express_in_j_basis(&[(OmegaIndex::new(2, 2), q(1, 1))], 4).unwrap();
        assert_eq!(c, vec![q(1, 1), q(-2, 1), q(1, 2)]);
        assert!(express_in_j_basis(&[(OmegaIndex::new(0, 1), q(1, 1))], 2).is_err());
    }

    #[test]
    fn j_basis_round_trip() {
        for m in 0..=8 {
            let basis = omega_basis(m);
            assert_eq!(basis.len(), j_basis(m).len());
            for (i, idx) in basis.iter().enumerate() {
                let coords = express_in_j_basis(&[(*idx, q(i as i64 + 1, 1))], m).unwrap();
                assert_eq!(j_basis_to_omega(&coords, m), vec![(*idx, q(i as i64 + 1, 1))]);
            }
        }
    }

    #[test]
    fn generation_steps() {
        let (prod, coords) = generation_step::<Q>(0, 1).unwrap();
        assert_eq!(prod, j_state(1, 1).scale(&q(8, 1)));
        assert_eq!(coords[0], q(8, 1));
        for n in 1..=2 {
            for k in 1..=3 {
                let (prod, coords) = generation_step::<Q>(k, n).unwrap();
                let expected = omega::<Q>(2, 2 * k, n)
                    .scale(&q(4, 1))
                    .try_add(&j_state::<Q>(k + 1, n).scale(&q(4 + 4 * k as i64, 1)))
                    .unwrap();
                assert_eq!(prod, expected);
                assert!(!coords[0].is_zero());
            }
        }
    }
}
