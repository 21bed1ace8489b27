//! Totally increasing matrices, the `λ`-matrices `M^w`, and the solver that
//! writes the map `∂^i α ↦ c_i ∂^{i+w} α` as a combination of modes of the `j^{2k}`.

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::invariant::{j_state, lambda_coeff};
use crate::linalg::solve_dense;
use crate::scalar::Scalar;

/// A square matrix with positive entries.
#[derive(Clone, Debug, PartialEq)]
pub struct TotIncMatrix<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> TotIncMatrix<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("matrix must be square and nonempty".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if x.is_zero() || x.is_negative() {
                    return Err(Error::NonPositiveEntry { row: i, col: j });
                }
            }
        }
        Ok(TotIncMatrix { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }
}

fn leq<S: Scalar>(a: &S, b: &S) -> bool {
    !(b.clone() - a.clone()).is_negative()
}

/// Monotone along rows and columns, with every contiguous 2×2 minor positive.
pub fn is_totally_increasing<S: Scalar>(a: &TotIncMatrix<S>) -> bool {
    let n = a.size();
    for i in 0..n {
        for j in 0..n {
            if j + 1 < n && !leq(a.get(i, j), a.get(i, j + 1)) {
                return false;
            }
            if i + 1 < n && !leq(a.get(i, j), a.get(i + 1, j)) {
                return false;
            }
            if i + 1 < n && j + 1 < n {
                let det = a.get(i, j).clone() * a.get(i + 1, j + 1) - a.get(i, j + 1).clone() * a.get(i + 1, j);
                if det.is_zero() || det.is_negative() {
                    return false;
                }
            }
        }
    }
    true
}

/// One step of the nonsingularity argument: scale rows by `1/A_{i,1}`, columns
/// by `A_{1,1}/A_{1,j}`, subtract the first row, and keep the lower-right block
/// `A_{1,1} A_{i,j} / (A_{i,1} A_{1,j}) - 1`.
pub fn totinc_reduce<S: Scalar>(a: &TotIncMatrix<S>) -> Result<TotIncMatrix<S>> {
    if a.size() < 2 {
        return Err(Error::Precondition("reduction needs a matrix of size at least 2".into()));
    }
    if !is_totally_increasing(a) {
        return Err(Error::Precondition("matrix is not totally increasing".into()));
    }
    let n = a.size();
    let a11 = a.get(0, 0);
    let rows = (1..n)
        .map(|i| {
            (1..n)
                .map(|j| a11.clone() * a.get(i, j) / (a.get(i, 0).clone() * a.get(0, j)) - S::one())
                .collect()
        })
        .collect();
    TotIncMatrix::new(rows)
}

/// Iterate [`totinc_reduce`] down to a 1×1 matrix. Returns the chain of
/// matrices; the last one has a single positive entry.
pub fn certify_nonsingular<S: Scalar>(a: &TotIncMatrix<S>) -> Result<Vec<TotIncMatrix<S>>> {
    let mut chain = vec![a.clone()];
    while chain.last().unwrap().size() > 1 {
        let next = totinc_reduce(chain.last().unwrap())?;
        if !is_totally_increasing(&next) {
            return Err(Error::Internal("reduction lost total monotonicity".into()));
        }
        chain.push(next);
    }
    Ok(chain)
}

/// `(k_j, s_j)`: the mode `j^{2k_j}(s_j)` used in column `j` of `M^w`.
pub fn mode_for_column(w: u32, j: u32) -> (u32, u32) {
    if w % 2 == 1 {
        (j + (w - 1) / 2, 2 * j)
    } else {
        (j + w / 2, 2 * j + 1)
    }
}

/// The `(m+1) × (m+1)` matrix `M^w_{i,j} = λ_{0, 2k_j, i, s_j}`.
pub fn lambda_matrix<S: Scalar>(w: u32, m: u32) -> Result<TotIncMatrix<S>> {
    if w == 0 {
        return Err(Error::Precondition("weight must be at least 1".into()));
    }
    let rows = (0..=m)
        .map(|i| {
            (0..=m)
                .map(|j| {
                    let (k, s) = mode_for_column(w, j);
                    S::from_int(lambda_coeff(0, 2 * k, i, s))
                })
                .collect()
        })
        .collect();
    TotIncMatrix::new(rows)
}

/// The unique `t` with `M^w t = c`.
pub fn solve_mode_combination<S: Scalar>(c: &[S], w: u32) -> Result<Vec<S>> {
    if c.is_empty() {
        return Err(Error::Precondition("empty target".into()));
    }
    let m = lambda_matrix::<S>(w, c.len() as u32 - 1)?;
    solve_dense(m.rows(), c)
}

/// Apply `Σ_j t_j j^{2k_j}(s_j)` to a state.
pub fn apply_mode_combination<S: Scalar>(t: &[S], w: u32, state: &FockState<S>) -> Result<FockState<S>> {
    let n = state.rank();
    let mut out = FockState::zero(n);
    for (j, tj) in t.iter().enumerate() {
        let (k, s) = mode_for_column(w, j as u32);
        out.add_scaled(&j_state::<S>(k, n).circle(state, s as i64)?, tj);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(p: i64, d: i64) -> Q {
        Q::new(p.into(), d.into())
    }

    fn mat(rows: &[&[i64]]) -> TotIncMatrix<Q> {
        TotIncMatrix::new(rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn predicate_examples() {
        assert!(is_totally_increasing(&mat(&[&[2, 6], &[2, 14]])));
        assert!(!is_totally_increasing(&mat(&[&[1, 2], &[2, 4]])));
        assert!(is_totally_increasing(&mat(&[&[5]])));
        assert_eq!(TotIncMatrix::new(vec![vec![q(0, 1)]]).unwrap_err(), Error::NonPositiveEntry { row: 0, col: 0 });
    }

    #[test]
    fn reduction_example() {
        let r = totinc_reduce(&mat(&[&[2, 6], &[2, 14]])).unwrap();
        assert_eq!(r, TotIncMatrix::new(vec![vec![q(4, 3)]]).unwrap());
    }

    #[test]
    fn lambda_matrices() {
        assert_eq!(lambda_matrix::<Q>(1, 0).unwrap(), mat(&[&[2]]));
        assert_eq!(lambda_matrix::<Q>(1, 1).unwrap(), mat(&[&[2, 6], &[2, 14]]));
        assert_eq!(solve_mode_combination(&[q(1, 1)], 1).unwrap(), vec![q(1, 2)]);
    }

    #[test]
    fn mode_combination_acts_as_requested() {
        let n = 2;
        let c = vec![q(3, 1), q(-1, 2)];
        let w = 2;
        let t = solve_mode_combination(&c, w).unwrap();
        let alpha = FockState::<Q>::generator(2, n).unwrap();
        for (i, ci) in c.iter().enumerate() {
            let got = apply_mode_combination(&t, w, &alpha.derivative_n(i)).unwrap();
            assert_eq!(got, alpha.derivative_n(i + w as usize).scale(ci));
        }
    }
}
