//! Dealiasing-padded FFT size planning.
//!
//! A transform of `n` retained modes is zero-padded to at least
//! `ceil(n * rule)` points. The planner then picks the smallest size at or
//! above that bound whose prime factors all lie in an allowed set, so the
//! mixed-radix transform never decomposes into a large prime.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Rational dealias factor `num / den`, at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DealiasRule {
    num: u64,
    den: u64,
}

impl DealiasRule {
    /// The 3/2 rule for quadratic nonlinearities.
    pub const THREE_HALVES: DealiasRule = DealiasRule { num: 3, den: 2 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parameter("dealias rule denominator is zero".into()));
        }
        if num < den {
            return Err(Error::Parameter(format!(
                "dealias rule {num}/{den} is below 1"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }
}

impl Default for DealiasRule {
    fn default() -> Self {
        Self::THREE_HALVES
    }
}

impl fmt::Display for DealiasRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for DealiasRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("dealias rule `{s}` is not of the form a/b"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num = num.parse().map_err(|_| bad())?;
        let den = den.parse().map_err(|_| bad())?;
        Self::new(num, den)
    }
}

/// Allowed radices for planned transform sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut v: Vec<u64> = primes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::Parameter("allowed prime set is empty".into()));
        }
        if let Some(p) = v.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::Parameter(format!("{p} is not prime")));
        }
        Ok(Self(v))
    }

    pub fn primes(&self) -> &[u64] {
        &self.0
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    /// True when every prime factor of `n` is in the set. `n = 1` is smooth.
    pub fn is_smooth(&self, mut n: u64) -> bool {
        if n == 0 {
            return false;
        }
        for &p in &self.0 {
            while n % p == 0 {
                n /= p;
            }
        }
        n == 1
    }
}

impl Default for PrimeSet {
    fn default() -> Self {
        Self(vec![2, 3, 5, 7])
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for PrimeSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let primes = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("prime list entry `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(primes)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors of `n` in nondecreasing order; empty for `n = 1`.
pub fn factorize(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Domain("cannot factorize 0".into()));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    while rest % 2 == 0 {
        factors.push(2);
        rest /= 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= rest {
        while rest % d == 0 {
            factors.push(d);
            rest /= d;
        }
        d += 2;
    }
    if rest > 1 {
        factors.push(rest);
    }
    Ok(factors)
}

/// `ceil(n_logical * rule)`.
pub fn dealias_minimum(n_logical: u64, rule: DealiasRule) -> Result<u64> {
    if n_logical == 0 {
        return Err(Error::Domain("n_logical must be at least 1".into()));
    }
    let scaled = n_logical as u128 * rule.num as u128;
    let min = scaled.div_ceil(rule.den as u128);
    u64::try_from(min).map_err(|_| Error::Domain("dealias minimum overflows u64".into()))
}

/// Sum of prime factors with multiplicity. Lower predicts a faster transform
/// among equal sizes.
pub fn cost_score(factors: &[u64]) -> f64 {
    factors.iter().map(|&f| f as f64).sum()
}

/// A planned transform size.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedPlan {
    n_logical: u64,
    n_min: u64,
    n_padded: u64,
    factors: Vec<u64>,
    cost_score: f64,
}

impl PaddedPlan {
    /// Plan with an explicitly chosen size. Fails if `n_padded` is below the
    /// dealias minimum; the size need not be smooth.
    pub fn with_size(n_logical: u64, rule: DealiasRule, n_padded: u64) -> Result<Self> {
        let n_min = dealias_minimum(n_logical, rule)?;
        if n_padded < n_min {
            return Err(Error::Size(format!(
                "padded size {n_padded} is below the dealias minimum {n_min}"
            )));
        }
        let factors = factorize(n_padded)?;
        let cost_score = cost_score(&factors);
        Ok(Self {
            n_logical,
            n_min,
            n_padded,
            factors,
            cost_score,
        })
    }

    pub fn n_logical(&self) -> u64 {
        self.n_logical
    }
    pub fn n_min(&self) -> u64 {
        self.n_min
    }
    pub fn n_padded(&self) -> u64 {
        self.n_padded
    }
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }
    pub fn cost_score(&self) -> f64 {
        self.cost_score
    }

    /// Padded size as a `usize` transform length.
    pub fn len(&self) -> usize {
        self.n_padded as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest prime factor (1 for a size of 1).
    pub fn largest_factor(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    /// Factors joined with `x`, e.g. `2x2x2x3x3`.
    pub fn factor_string(&self) -> String {
        format_factors(&self.factors)
    }

    /// `n_logical,n_min,n_padded,factors,score`
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n_logical,
            self.n_min,
            self.n_padded,
            self.factor_string(),
            self.cost_score
        )
    }
}

pub fn format_factors(factors: &[u64]) -> String {
    if factors.is_empty() {
        return "1".to_string();
    }
    factors
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join("x")
}

/// Smallest size `>= ceil(n_logical * rule)` that is smooth over `primes`.
pub fn plan_padded_size(n_logical: u64, rule: DealiasRule, primes: &PrimeSet) -> Result<PaddedPlan> {
    let n_min = dealias_minimum(n_logical, rule)?;
    let n_padded = smallest_smooth_at_least(n_min, primes.primes())?;
    PaddedPlan::with_size(n_logical, rule, n_padded)
}

/// Stand-in for an unplanned padding scheme: the dealias minimum rounded up
/// to the next even number, whatever its factorization.
pub fn naive_padded_size(n_logical: u64, rule: DealiasRule) -> Result<u64> {
    let n_min = dealias_minimum(n_logical, rule)?;
    Ok(n_min + n_min % 2)
}

pub fn naive_plan(n_logical: u64, rule: DealiasRule) -> Result<PaddedPlan> {
    PaddedPlan::with_size(n_logical, rule, naive_padded_size(n_logical, rule)?)
}

/// Depth-first search over products of `primes` below the best candidate so
/// far. The first candidate is the smallest power of the smallest prime that
/// reaches `bound`, which is always smooth.
fn smallest_smooth_at_least(bound: u64, primes: &[u64]) -> Result<u64> {
    let overflow = || Error::Domain(format!("no smooth size at or above {bound} fits in u64"));
    let p0 = primes[0];
    let mut best = 1u64;
    while best < bound {
        best = best.checked_mul(p0).ok_or_else(overflow)?;
    }

    fn search(value: u64, from: usize, bound: u64, primes: &[u64], best: &mut u64) {
        if value >= bound {
            if value < *best {
                *best = value;
            }
            return;
        }
        for (i, &p) in primes.iter().enumerate().skip(from) {
            match value.checked_mul(p) {
                Some(next) if next < *best => search(next, i, bound, primes, best),
                _ => {}
            }
        }
    }

    search(1, 0, bound, primes, &mut best);
    Ok(best)
}
