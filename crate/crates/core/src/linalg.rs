//! Exact linear algebra over a [`Scalar`] field.
//!
//! [`Echelon`] is an incremental sparse row-echelon form: vectors are inserted
//! one at a time, reduced against the stored rows, and either become a new row
//! or produce a linear dependency among the inputs. Every stored row remembers
//! which combination of inputs it came from.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type SparseVec<S> = BTreeMap<usize, S>;

fn axpy<S: Scalar>(target: &mut SparseVec<S>, k: &S, x: &SparseVec<S>) {
    for (col, v) in x {
        let delta = v.clone() * k;
        match target.entry(*col) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &delta;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                if !delta.is_zero() {
                    e.insert(delta);
                }
            }
        }
    }
}

struct Row<S> {
    vec: SparseVec<S>,
    comb: SparseVec<S>,
}

/// Incremental echelon form with pivots at the smallest column of each row.
pub struct Echelon<S> {
    rows: BTreeMap<usize, Row<S>>,
    inputs: usize,
}

/// Outcome of [`Echelon::insert`].
#[derive(Debug, Clone, PartialEq)]
pub enum Insert<S> {
    /// The vector was independent of everything inserted before.
    Independent,
    /// The vector was dependent: the returned coefficients `c` satisfy
    /// `Σ_i c_i · input_i = 0` and include the new input with coefficient 1.
    Dependent(SparseVec<S>),
}

impl<S: Scalar> Default for Echelon<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Echelon<S> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new(), inputs: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Reduce `v` against the stored rows. Returns the reduced vector `r` and
    /// coefficients `c` with `v = r + Σ_i c_i · input_i`.
    pub fn reduce(&self, mut v: SparseVec<S>) -> (SparseVec<S>, SparseVec<S>) {
        let mut comb = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(c, _)| *c).find(|c| self.rows.contains_key(c));
            let Some(col) = next else { break };
            let row = &self.rows[&col];
            let k = v[&col].clone();
            axpy(&mut v, &-k.clone(), &row.vec);
            axpy(&mut comb, &k, &row.comb);
            cursor = col + 1;
        }
        (v, comb)
    }

    pub fn insert(&mut self, v: SparseVec<S>) -> Insert<S> {
        let id = self.inputs;
        self.inputs += 1;
        let (r, comb) = self.reduce(v);
        let mut comb: SparseVec<S> = comb.into_iter().map(|(i, c)| (i, -c)).collect();
        comb.insert(id, S::one());
        let Some((&pivot, lead)) = r.iter().next() else {
            return Insert::Dependent(comb);
        };
        let inv = S::one() / lead.clone();
        let vec = r.into_iter().map(|(c, x)| (c, x * &inv)).collect();
        let comb = comb.into_iter().map(|(c, x)| (c, x * &inv)).collect();
        self.rows.insert(pivot, Row { vec, comb });
        Insert::Independent
    }

    /// Coefficients `c` with `v = Σ_i c_i · input_i`, if `v` is in the span.
    pub fn solve(&self, v: SparseVec<S>) -> Option<SparseVec<S>> {
        let (r, comb) = self.reduce(v);
        r.is_empty().then_some(comb)
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<S: Scalar>(vectors: impl IntoIterator<Item = SparseVec<S>>) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Solve the square system `a · x = b` exactly.
pub fn solve_dense<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition("system must be square".into()));
    }
    let mut m: Vec<Vec<S>> = a.iter().zip(b).map(|(r, x)| {
        let mut row = r.clone();
        row.push(x.clone());
        row
    }).collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].size_hint())
            .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
        m.swap(col, pivot);
        let inv = S::one() / m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = x.clone() * &inv;
        }
        let prow = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let k = row[col].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                *x -= &(p.clone() * &k);
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Exact determinant by Gaussian elimination over the field.
pub fn determinant<S: Scalar>(a: &[Vec<S>]) -> S {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = S::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return S::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let k = m[r][col].clone() / p.clone();
            let (top, bottom) = m.split_at_mut(r);
            for (x, y) in bottom[0][col..n].iter_mut().zip(&top[col][col..n]) {
                *x -= &(y.clone() * &k);
            }
        }
    }
    det
}
