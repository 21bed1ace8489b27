//! The Wick-product identities that measure nonassociativity and
//! noncommutativity, checked exactly on given states, and a seeded generator
//! of random states to feed them.

use rand::Rng;

use crate::error::Result;
use crate::fock::{FockMonomial, FockState, Mode};
use crate::scalar::{binom_i128, factorial_i128, Scalar};

/// All `k >= 0` with possibly nonzero `a ∘_k b`.
fn pole_bound<S: Scalar>(a: &FockState<S>, b: &FockState<S>) -> i64 {
    let wa = a.weights().last().copied().unwrap_or(0);
    let wb = b.weights().last().copied().unwrap_or(0);
    (wa + wb) as i64
}

fn wick<S: Scalar>(a: &FockState<S>, b: &FockState<S>) -> Result<FockState<S>> {
    a.circle(b, -1)
}

fn frac<S: Scalar>(num: i128, den: i128) -> S {
    S::from_int(num) / S::from_int(den)
}

/// `:(:ab:)c: - :abc: = Σ_k 1/(k+1)! (:(∂^{k+1}a)(b∘_k c): + :(∂^{k+1}b)(a∘_k c):)`.
pub fn quasi_associativity<S: Scalar>(a: &FockState<S>, b: &FockState<S>, c: &FockState<S>) -> Result<bool> {
    let lhs = wick(&wick(a, b)?, c)?.sub(&wick(a, &wick(b, c)?)?)?;
    let mut rhs = FockState::zero(a.rank());
    for k in 0..=pole_bound(a, c).max(pole_bound(b, c)) {
        let f: S = frac(1, factorial_i128(k as u32 + 1));
        rhs.add_scaled(&wick(&a.derivative_n(k as usize + 1), &b.circle(c, k)?)?, &f);
        rhs.add_scaled(&wick(&b.derivative_n(k as usize + 1), &a.circle(c, k)?)?, &f);
    }
    Ok(lhs == rhs)
}

/// `:ab: - :ba: = Σ_k (-1)^k/(k+1)! ∂^{k+1}(a∘_k b)`.
pub fn quasi_commutativity<S: Scalar>(a: &FockState<S>, b: &FockState<S>) -> Result<bool> {
    let lhs = wick(a, b)?.sub(&wick(b, a)?)?;
    let mut rhs = FockState::zero(a.rank());
    for k in 0..=pole_bound(a, b) {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        rhs.add_scaled(&a.circle(b, k)?.derivative_n(k as usize + 1), &frac(sign, factorial_i128(k as u32 + 1)));
    }
    Ok(lhs == rhs)
}

/// For `n > 0`: `a∘_n(:bc:) - :(a∘_n b)c: - :b(a∘_n c): = Σ_{k=1}^n C(n,k)(a∘_{n-k}b)∘_{k-1}c`.
pub fn noncommutative_leibniz<S: Scalar>(a: &FockState<S>, b: &FockState<S>, c: &FockState<S>, n: i64) -> Result<bool> {
    assert!(n > 0);
    let lhs = a
        .circle(&wick(b, c)?, n)?
        .sub(&wick(&a.circle(b, n)?, c)?)?
        .sub(&wick(b, &a.circle(c, n)?)?)?;
    let mut rhs = FockState::zero(a.rank());
    for k in 1..=n {
        let t = a.circle(b, n - k)?.circle(c, k - 1)?;
        rhs.add_scaled(&t, &S::from_int(binom_i128(n as i128, k as u32)));
    }
    Ok(lhs == rhs)
}

/// `(:ab:)∘_n c = Σ_k 1/k! :(∂^k a)(b∘_{n+k}c): + Σ_k b∘_{n-k-1}(a∘_k c)`.
pub fn wick_circle<S: Scalar>(a: &FockState<S>, b: &FockState<S>, c: &FockState<S>, n: i64) -> Result<bool> {
    let lhs = wick(a, b)?.circle(c, n)?;
    let mut rhs = FockState::zero(a.rank());
    for k in 0..=pole_bound(b, c) {
        let t = wick(&a.derivative_n(k as usize), &b.circle(c, n + k)?)?;
        rhs.add_scaled(&t, &frac(1, factorial_i128(k as u32)));
    }
    for k in 0..=pole_bound(a, c) {
        rhs.add_assign_state(&b.circle(&a.circle(c, k)?, n - k - 1)?);
    }
    Ok(lhs == rhs)
}

/// A random state of rank `n` with at most `max_terms` monomials of degree
/// `1..=max_degree` and weight `<= max_weight`, with small rational coefficients.
pub fn random_state<S: Scalar, R: Rng>(rng: &mut R, n: usize, max_terms: usize, max_degree: usize, max_weight: usize) -> FockState<S> {
    let mut out = FockState::zero(n);
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let degree = rng.gen_range(1..=max_degree.min(max_weight));
        let mut budget = max_weight - degree;
        let mut modes = Vec::with_capacity(degree);
        for _ in 0..degree {
            let extra = rng.gen_range(0..=budget);
            budget -= extra;
            modes.push(Mode::new(rng.gen_range(1..=n), 1 + extra));
        }
        let num = rng.gen_range(-5i128..=5);
        let den = rng.gen_range(1i128..=4);
        out.add_term(FockMonomial::from_modes(modes), S::from_int(num) / S::from_int(den));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::virasoro;
    use crate::Q;
    use rand::SeedableRng;

    #[test]
    fn identities_on_virasoro_and_generators() {
        let l = virasoro::<Q>(2);
        let a = FockState::<Q>::generator(1, 2).unwrap();
        let b = FockState::<Q>::generator(2, 2).unwrap().derivative();
        assert!(quasi_associativity(&l, &a, &b).unwrap());
        assert!(quasi_commutativity(&l, &a).unwrap());
        assert!(noncommutative_leibniz(&l, &a, &l, 2).unwrap());
        assert!(wick_circle(&a, &a, &l, 1).unwrap());
    }

    #[test]
    fn random_states_respect_bounds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_state::<Q, _>(&mut rng, 2, 3, 3, 6);
            assert!(s.degree().unwrap_or(0) <= 3);
            assert!(s.weights().iter().all(|&w| w <= 6));
        }
    }
}
