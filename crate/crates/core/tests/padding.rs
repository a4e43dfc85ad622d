use gyroproxy::padding::{
    cost_score, dealias_minimum, factorize, naive_padded_size, plan_padded_size, DealiasRule, PrimeSet,
};
use proptest::prelude::*;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Smallest smooth number at or above `from`, by linear scan with trial
/// division against the allowed primes.
fn scan_smooth(from: u64, primes: &[u64]) -> u64 {
    (from..)
        .find(|&m| {
            let mut r = m;
            for &p in primes {
                while r % p == 0 {
                    r /= p;
                }
            }
            r == 1
        })
        .unwrap()
}

#[test]
fn factorize_reconstructs_up_to_a_million() {
    for n in 1..=1_000_000u64 {
        let f = factorize(n).unwrap();
        assert_eq!(f.iter().product::<u64>(), n);
        assert!(f.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn factorize_yields_primes() {
    for n in 1..=5000u64 {
        assert!(factorize(n).unwrap().into_iter().all(is_prime), "{n}");
    }
    assert_eq!(factorize(719).unwrap(), vec![719]);
    assert!(is_prime(719));
    assert!(factorize(0).is_err());
}

#[test]
fn planner_is_minimal_against_scan() {
    let rule = DealiasRule::THREE_HALVES;
    let primes = PrimeSet::default();
    for n in 1..=4096u64 {
        let plan = plan_padded_size(n, rule, &primes).unwrap();
        assert_eq!(plan.n_padded(), scan_smooth(dealias_minimum(n, rule).unwrap(), &[2, 3, 5, 7]), "{n}");
        assert!(plan.n_padded() >= plan.n_min() && plan.n_min() >= plan.n_logical());
        assert_eq!(plan.factors().iter().product::<u64>(), plan.n_padded());
    }
}

#[test]
fn planner_is_monotone() {
    let rule = DealiasRule::THREE_HALVES;
    let primes = PrimeSet::default();
    let sizes: Vec<u64> = (1..=4096)
        .map(|n| plan_padded_size(n, rule, &primes).unwrap().n_padded())
        .collect();
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn overhead_bounded() {
    let rule = DealiasRule::THREE_HALVES;
    let primes = PrimeSet::default();
    for n in 8..=4096u64 {
        let p = plan_padded_size(n, rule, &primes).unwrap();
        assert!(p.n_padded() as f64 / p.n_min() as f64 <= 1.25, "{n}");
    }
}

#[test]
fn custom_prime_sets() {
    let rule = DealiasRule::THREE_HALVES;
    for primes in [vec![2], vec![2, 3], vec![2, 3, 5, 7, 11, 13], vec![3, 5]] {
        let set = PrimeSet::new(primes.clone()).unwrap();
        for n in 1..=600u64 {
            let want = scan_smooth(dealias_minimum(n, rule).unwrap(), &primes);
            assert_eq!(plan_padded_size(n, rule, &set).unwrap().n_padded(), want, "{primes:?} {n}");
        }
    }
}

#[test]
fn naive_scheme_keeps_large_primes() {
    let rule = DealiasRule::THREE_HALVES;
    assert_eq!(naive_padded_size(477, rule).unwrap(), 716);
    assert_eq!(factorize(716).unwrap(), vec![2, 2, 179]);
    assert_eq!(naive_padded_size(479, rule).unwrap(), 720);
    assert_eq!(naive_padded_size(48, rule).unwrap(), 72);
}

#[test]
fn score_is_sum_of_factors() {
    assert_eq!(cost_score(&[2, 2, 2, 3, 3]), 12.0);
    assert_eq!(cost_score(&[719]), 719.0);
    assert_eq!(cost_score(&[]), 0.0);
}

proptest! {
    #[test]
    fn dealias_minimum_is_ceiling(n in 1u64..100_000, num in 1u64..8, extra in 0u64..8) {
        let den = num.max(1);
        let num = den + extra;
        let rule = DealiasRule::new(num, den).unwrap();
        let m = dealias_minimum(n, rule).unwrap();
        prop_assert!(m * den >= n * num);
        prop_assert!((m - 1) * den < n * num);
    }

    #[test]
    fn plan_is_smooth_and_bounded(n in 1u64..50_000) {
        let rule = DealiasRule::THREE_HALVES;
        let primes = PrimeSet::default();
        let p = plan_padded_size(n, rule, &primes).unwrap();
        prop_assert!(p.factors().iter().all(|f| [2, 3, 5, 7].contains(f)));
        prop_assert!(p.n_padded() >= p.n_min());
        prop_assert_eq!(p.cost_score(), p.factors().iter().sum::<u64>() as f64);
    }
}
