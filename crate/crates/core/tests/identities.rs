use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use voaforge::fock::FockState;
use voaforge::identities::*;
use voaforge::Q;

fn states(seed: u64, n: usize, k: usize) -> Vec<FockState<Q>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| random_state(&mut rng, n, 2, 3, 4)).collect()
}

fn homogeneous(seed: u64, n: usize) -> FockState<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_state::<Q, _>(&mut rng, n, 3, 3, 5);
    match s.weights().last() {
        Some(&w) => s.weight_component(w),
        None => FockState::generator(1, n).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quasi_associativity_holds(seed in any::<u64>(), n in 1usize..=2) {
        let s = states(seed, n, 3);
        prop_assert!(quasi_associativity(&s[0], &s[1], &s[2]).unwrap());
    }

    #[test]
    fn quasi_commutativity_holds(seed in any::<u64>(), n in 1usize..=3) {
        let s = states(seed, n, 2);
        prop_assert!(quasi_commutativity(&s[0], &s[1]).unwrap());
    }

    #[test]
    fn leibniz_holds(seed in any::<u64>(), n in 1usize..=2, m in 1i64..=4) {
        let s = states(seed, n, 3);
        prop_assert!(noncommutative_leibniz(&s[0], &s[1], &s[2], m).unwrap());
    }

    #[test]
    fn wick_circle_holds(seed in any::<u64>(), n in 1usize..=2, m in 0i64..=4) {
        let s = states(seed, n, 3);
        prop_assert!(wick_circle(&s[0], &s[1], &s[2], m).unwrap());
    }

    #[test]
    fn skew_symmetry(seed in any::<u64>(), n in 1usize..=3, m in 0i64..6) {
        // b∘_m a = Σ_k (-1)^{m+k+1} ∂^k(a∘_{m+k} b)/k!
        let s = states(seed, n, 2);
        let (a, b) = (&s[0], &s[1]);
        let lhs = b.circle(a, m).unwrap();
        let mut rhs = FockState::zero(n);
        let mut fact = Q::one();
        for k in 0..12i64 {
            if k > 0 { fact *= Q::from_integer(k.into()); }
            let sign = if (m + k + 1) % 2 == 0 { Q::one() } else { -Q::one() };
            let t = a.circle(b, m + k).unwrap().derivative_n(k as usize);
            rhs.add_scaled(&t, &(sign / fact.clone()));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_is_a_derivation(seed in any::<u64>(), n in 1usize..=3, m in -2i64..6) {
        let s = states(seed, n, 2);
        let (a, b) = (&s[0], &s[1]);
        let lhs = a.circle(b, m).unwrap().derivative();
        let rhs = a.derivative().circle(b, m).unwrap().try_add(&a.circle(&b.derivative(), m).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        // (∂a)∘_m b = -m a∘_{m-1} b
        let l2 = a.derivative().circle(b, m).unwrap();
        let r2 = a.circle(b, m - 1).unwrap().scale(&Q::from_integer((-m).into()));
        prop_assert_eq!(l2, r2);
    }

    #[test]
    fn grading_and_filtration(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..=2, m in 0i64..6) {
        let a = homogeneous(s1, n);
        let b = homogeneous(s2, n);
        let p = a.circle(&b, m).unwrap();
        if !p.is_zero() {
            let w = a.homogeneous_weight().unwrap() as i64 + b.homogeneous_weight().unwrap() as i64 - m - 1;
            prop_assert_eq!(p.homogeneous_weight().map(|x| x as i64), Some(w));
            for (mono, _) in p.iter() {
                prop_assert!(mono.degree() + 2 <= a.degree().unwrap() + b.degree().unwrap());
            }
        }
    }

    #[test]
    fn unit_laws(seed in any::<u64>(), n in 1usize..=3, m in -3i64..5) {
        let s = states(seed, n, 1);
        let one = FockState::<Q>::vacuum(n);
        let a = &s[0];
        let expect = if m == -1 { a.clone() } else { FockState::zero(n) };
        prop_assert_eq!(one.circle(a, m).unwrap(), expect);
        if m >= 0 {
            prop_assert!(a.circle(&one, m).unwrap().is_zero());
        } else {
            let k = (-m - 1) as usize;
            let mut f = Q::one();
            for t in 1..=k { f *= Q::from_integer((t as i64).into()); }
            prop_assert_eq!(a.circle(&one, m).unwrap(), a.derivative_n(k).scale(&(Q::one() / f)));
        }
    }
}

#[test]
fn seeded_batch_of_two_hundred() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..200 {
        let n = 1 + i % 3;
        let a = random_state::<Q, _>(&mut rng, n, 2, 3, 4);
        let b = random_state::<Q, _>(&mut rng, n, 2, 3, 4);
        let c = random_state::<Q, _>(&mut rng, n, 2, 2, 3);
        assert!(quasi_associativity(&a, &b, &c).unwrap());
        assert!(quasi_commutativity(&a, &b).unwrap());
        assert!(noncommutative_leibniz(&a, &b, &c, 1 + (i % 3) as i64).unwrap());
        assert!(wick_circle(&a, &b, &c, (i % 4) as i64).unwrap());
    }
}
