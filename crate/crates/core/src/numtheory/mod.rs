//! Exact integer arithmetic: factorization, divisors, multiplicative
//! functions and the relative totient `φ(n, ℓ) = #{1 ≤ x ≤ ℓ : gcd(x, n) = 1}`.
//!
//! Everything is computed in `u64` with `u128` intermediates and checked
//! overflow; nothing here touches floating point except the diagnostic
//! [`phi_lower_estimate`].

mod factor;

pub use factor::is_prime;
pub(crate) use factor::{gcd, inv_mod, isqrt, mul_mod, pow_mod};

use crate::error::{invalid, Error, Result};

/// Largest accepted input to [`factorize`] (exclusive).
pub const FACTORIZE_LIMIT: u64 = 1 << 63;

/// Default cap on the sieve bound of [`primes_up_to`].
pub const SIEVE_CAP: u64 = 100_000_000;

/// `max(ln x, 1)`, the logarithm used by every threshold in the crate.
#[inline]
pub fn clamped_ln(x: f64) -> f64 {
    x.ln().max(1.0)
}

/// A positive integer together with its prime-power decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from `(prime, exponent)` pairs, checking that the
    /// primes are strictly increasing and prime, the exponents positive, and the
    /// product fits below [`FACTORIZE_LIMIT`].
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut n: u64 = 1;
        let mut prev = 1;
        for &(p, e) in &factors {
            if p <= prev {
                return Err(invalid("primes must be strictly increasing"));
            }
            if e == 0 {
                return Err(invalid("exponents must be positive"));
            }
            if !is_prime(p) {
                return Err(invalid(format!("{p} is not prime")));
            }
            let pe = p.checked_pow(e).ok_or(Error::Overflow("prime power"))?;
            n = n.checked_mul(pe).ok_or(Error::Overflow("product of factors"))?;
            prev = p;
        }
        if n >= FACTORIZE_LIMIT {
            return Err(Error::Overflow("product of factors"));
        }
        Ok(Factorization { n, factors })
    }

    pub fn one() -> Self {
        Factorization { n: 1, factors: Vec::new() }
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    /// Euler's totient; never overflows since `φ(n) ≤ n`.
    pub fn phi(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e - 1) * (p - 1)).product()
    }

    pub fn divides(&self, d: u64) -> bool {
        d != 0 && self.n.is_multiple_of(d)
    }

    /// Factorization of `n / d` for a divisor `d`, read off without refactoring.
    pub fn quotient(&self, d: u64) -> Result<Factorization> {
        if !self.divides(d) {
            return Err(invalid(format!("{d} does not divide {}", self.n)));
        }
        let mut rest = d;
        let mut factors = Vec::with_capacity(self.factors.len());
        for &(p, e) in &self.factors {
            let mut k = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            if e > k {
                factors.push((p, e - k));
            }
        }
        debug_assert_eq!(rest, 1);
        Ok(Factorization { n: self.n / d, factors })
    }

    /// `φ(n) / φ(n/d)` as an exact integer, for a divisor `d`.
    pub fn phi_ratio(&self, d: u64) -> Result<u64> {
        let q = self.quotient(d)?;
        let mut ratio: u64 = 1;
        let mut qi = q.factors.iter().peekable();
        for &(p, e) in &self.factors {
            let eq = match qi.peek() {
                Some(&&(qp, qe)) if qp == p => {
                    qi.next();
                    qe
                }
                _ => 0,
            };
            let part = if eq == 0 { p.pow(e - 1) * (p - 1) } else { p.pow(e - eq) };
            ratio *= part;
        }
        Ok(ratio)
    }
}

/// Unique prime factorization of `1 ≤ n < 2^63`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(invalid("cannot factorize 0"));
    }
    if n >= FACTORIZE_LIMIT {
        return Err(Error::CapExceeded { what: "n", value: n, cap: FACTORIZE_LIMIT - 1 });
    }
    let mut primes = Vec::new();
    if n > 1 {
        factor::prime_factors_into(n, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

/// All divisors of `n`, ascending.
pub fn divisors(f: &Factorization) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in f.factors() {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ArithProfile {
    pub n: u64,
    pub phi: u64,
    pub sigma: u64,
    pub d: u64,
    pub omega: u32,
    pub radical: u64,
}

pub fn arith_profile(f: &Factorization) -> Result<ArithProfile> {
    let mut sigma: u128 = 1;
    for &(p, e) in f.factors() {
        let p = p as u128;
        // (p^(e+1) - 1) / (p - 1) without overflow: accumulate the geometric sum.
        let mut term: u128 = 1;
        let mut pk: u128 = 1;
        for _ in 0..e {
            pk *= p;
            term += pk;
        }
        sigma = sigma.checked_mul(term).ok_or(Error::Overflow("sigma"))?;
        if sigma >= FACTORIZE_LIMIT as u128 {
            return Err(Error::Overflow("sigma"));
        }
    }
    Ok(ArithProfile {
        n: f.n(),
        phi: f.phi(),
        sigma: sigma as u64,
        d: f.factors().iter().map(|&(_, e)| e as u64 + 1).product(),
        omega: f.omega(),
        radical: f.radical(),
    })
}

/// Relative totient `φ(n, ℓ)`: the number of `x ∈ [0, ℓ]` with `gcd(x, n) = 1`.
///
/// `x = 0` only counts when `n = 1`, so `φ(1, 0) = 1` and `φ(n, 0) = 0` for `n > 1`.
/// Uses inclusion–exclusion over the squarefree divisors of the radical,
/// or a direct scan when `2^ω(n) > ℓ` makes that cheaper.
pub fn phi_relative(f: &Factorization, ell: u64) -> Result<u64> {
    if ell >= f.n() && f.n() > 1 {
        return Err(invalid(format!("ell = {ell} must be below n = {}", f.n())));
    }
    if f.n() == 1 {
        return if ell == 0 { Ok(1) } else { Err(invalid("ell must be 0 when n = 1")) };
    }
    let primes: Vec<u64> = f.primes().collect();
    let cheap_scan = primes.len() < 63 && (1u64 << primes.len()) > ell;
    if cheap_scan {
        return Ok((1..=ell).filter(|x| primes.iter().all(|p| x % p != 0)).count() as u64);
    }
    Ok(inclusion_exclusion(&primes, ell))
}

/// `Σ_{q | rad} μ(q) ⌊ℓ/q⌋`, pruning products that exceed `ℓ`.
fn inclusion_exclusion(primes: &[u64], ell: u64) -> u64 {
    fn walk(primes: &[u64], q: u64, sign: i64, ell: u64, acc: &mut i64) {
        for (i, &p) in primes.iter().enumerate() {
            let Some(qp) = q.checked_mul(p) else { continue };
            if qp > ell {
                // primes are ascending, so every later product is larger too
                break;
            }
            *acc -= sign * (ell / qp) as i64;
            walk(&primes[i + 1..], qp, -sign, ell, acc);
        }
    }
    let mut acc = ell as i64;
    walk(primes, 1, 1, ell, &mut acc);
    acc as u64
}

/// Diagnostic lower-estimate branch for `φ(n, ℓ)` with a configurable constant `c`:
/// `(ℓ/n)·φ(n)/4` when `ℓ > c·log⁵n`, `ℓ/(4·log ℓ)` when `ℓ > c·log n`, else 0.
pub fn phi_lower_estimate(f: &Factorization, ell: u64, c: f64) -> f64 {
    let n = f.n() as f64;
    let l = ell as f64;
    let log_n = clamped_ln(n);
    if l > c * log_n.powi(5) {
        l / n * f.phi() as f64 / 4.0
    } else if l > c * log_n {
        l / (4.0 * clamped_ln(l))
    } else {
        0.0
    }
}

/// Primes `≤ x` by the sieve of Eratosthenes, with `x` capped at [`SIEVE_CAP`].
pub fn primes_up_to(x: u64) -> Result<Vec<u64>> {
    primes_up_to_capped(x, SIEVE_CAP)
}

pub fn primes_up_to_capped(x: u64, cap: u64) -> Result<Vec<u64>> {
    if x > cap {
        return Err(Error::CapExceeded { what: "sieve bound", value: x, cap });
    }
    if x < 2 {
        return Ok(Vec::new());
    }
    // odd-only sieve: index i stands for 2i + 1
    let half = (x as usize - 1) / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= x as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend((1..half).filter(|&i| !composite[i]).map(|i| 2 * i as u64 + 1));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gcd_scan(n: u64, ell: u64) -> u64 {
        (0..=ell).filter(|&x| gcd(x, n) == 1).count() as u64
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(420).unwrap().factors(), &[(2, 2), (3, 1), (5, 1), (7, 1)]);
        let m61 = (1u64 << 61) - 1;
        assert_eq!(factorize(m61).unwrap().factors(), &[(m61, 1)]);
        assert!(factorize(0).is_err());
        assert!(factorize(1 << 63).is_err());
    }

    #[test]
    fn factorize_hard_composites() {
        let p = 4_294_967_291u64; // largest prime below 2^32
        let f = factorize(p * 2_147_483_647).unwrap();
        assert_eq!(f.factors(), &[(2_147_483_647, 1), (p, 1)]);
        let f = factorize(3_037_000_493u64 * 3_037_000_493).unwrap();
        assert_eq!(f.factors(), &[(3_037_000_493, 2)]);
        let f = factorize(9_223_372_036_854_775_807).unwrap(); // 2^63 - 1
        assert_eq!(f.factors(), &[(7, 2), (73, 1), (127, 1), (337, 1), (92_737, 1), (649_657, 1)]);
    }

    #[test]
    fn from_factors_validates() {
        assert!(Factorization::from_factors(vec![(3, 1), (2, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(4, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(2, 0)]).is_err());
        assert!(Factorization::from_factors(vec![(2, 63)]).is_err());
        assert_eq!(Factorization::from_factors(vec![]).unwrap(), Factorization::one());
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(&factorize(12).unwrap()), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(&factorize(1).unwrap()), vec![1]);
        assert_eq!(divisors(&factorize(30).unwrap()), vec![1, 2, 3, 5, 6, 10, 15, 30]);
    }

    #[test]
    fn profiles() {
        let p = arith_profile(&factorize(30).unwrap()).unwrap();
        assert_eq!((p.phi, p.sigma, p.d, p.omega, p.radical), (8, 72, 8, 3, 30));
        let p = arith_profile(&factorize(1).unwrap()).unwrap();
        assert_eq!((p.phi, p.sigma, p.d, p.omega, p.radical), (1, 1, 1, 0, 1));
        assert_eq!(arith_profile(&factorize(35).unwrap()).unwrap().sigma, 48);
        // σ(2^62) = 2^63 - 1 still fits; σ(2^61·3) = (2^62 - 1)·4 does not.
        assert_eq!(arith_profile(&factorize(1 << 62).unwrap()).unwrap().sigma, (1 << 63) - 1);
        let big = Factorization::from_factors(vec![(2, 61), (3, 1)]).unwrap();
        assert_eq!(arith_profile(&big), Err(Error::Overflow("sigma")));
    }

    #[test]
    fn relative_totient_examples() {
        let f10 = factorize(10).unwrap();
        assert_eq!(phi_relative(&f10, 4).unwrap(), 2);
        assert_eq!(phi_relative(&factorize(30).unwrap(), 5).unwrap(), 1);
        assert_eq!(phi_relative(&f10, 0).unwrap(), 0);
        assert_eq!(phi_relative(&factorize(1).unwrap(), 0).unwrap(), 1);
        assert!(phi_relative(&f10, 10).is_err());
    }

    #[test]
    fn relative_totient_matches_scan_small() {
        for n in 1..=400u64 {
            let f = factorize(n).unwrap();
            for ell in 0..n {
                assert_eq!(phi_relative(&f, ell).unwrap(), gcd_scan(n, ell), "n={n} ell={ell}");
            }
        }
    }

    #[test]
    fn relative_totient_both_strategies_on_primorial() {
        // 2^ω = 512 for the 9-prime primorial: small ℓ scans, large ℓ uses inclusion–exclusion.
        let n = 223_092_870u64;
        let f = factorize(n).unwrap();
        for ell in [1, 23, 29, 511, 512, 513, 10_000, 1_000_000] {
            assert_eq!(phi_relative(&f, ell).unwrap(), gcd_scan(n, ell), "ell={ell}");
        }
        assert_eq!(phi_relative(&f, n - 1).unwrap(), f.phi());
    }

    #[test]
    fn lower_estimate_branches() {
        let f = factorize(1_048_573).unwrap(); // prime
        let l = 1_000_000u64;
        let c = 0.5;
        let est = phi_lower_estimate(&f, l, c);
        assert!((est - l as f64 / 1_048_573.0 * 1_048_572.0 / 4.0).abs() < 1e-6);
        assert!(est <= phi_relative(&f, l).unwrap() as f64);
        assert_eq!(phi_lower_estimate(&f, 5, 1.0), 0.0);
        let mid = phi_lower_estimate(&f, 100, 1.0);
        assert!((mid - 100.0 / (4.0 * 100f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn sieve() {
        assert_eq!(primes_up_to(10).unwrap(), vec![2, 3, 5, 7]);
        assert!(primes_up_to(1).unwrap().is_empty());
        assert_eq!(primes_up_to(5).unwrap().len(), 3);
        assert_eq!(primes_up_to(2).unwrap(), vec![2]);
        assert_eq!(primes_up_to(1_000_000).unwrap().len(), 78_498);
        assert!(primes_up_to_capped(11, 10).is_err());
    }

    #[test]
    fn phi_ratio_and_quotient() {
        let f = factorize(360).unwrap();
        for d in divisors(&f) {
            let q = f.quotient(d).unwrap();
            assert_eq!(q, factorize(360 / d).unwrap());
            assert_eq!(f.phi_ratio(d).unwrap() * q.phi(), f.phi());
        }
        assert!(f.quotient(7).is_err());
    }

    #[test]
    fn totient_partition_identity() {
        for n in 1..=5000u64 {
            let f = factorize(n).unwrap();
            let s: u64 = divisors(&f).iter().map(|d| f.quotient(*d).unwrap().phi()).sum();
            assert_eq!(s, n);
        }
    }

    #[test]
    fn sigma_phi_bound() {
        for n in 1..=20_000u64 {
            let p = arith_profile(&factorize(n).unwrap()).unwrap();
            assert!(p.sigma as u128 * p.phi as u128 <= n as u128 * n as u128);
            if n > 1 {
                assert!(p.sigma > n && p.d >= 2);
            }
        }
    }

    proptest! {
        #[test]
        fn factorize_inverts_product(parts in proptest::collection::vec(2u64..5000, 1..6), big in 1u64..(1 << 40)) {
            let mut n: u64 = big;
            for p in &parts {
                n = n.saturating_mul(*p);
            }
            prop_assume!(n < FACTORIZE_LIMIT);
            let f = factorize(n).unwrap();
            let back: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(back, n);
            prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.primes().all(is_prime));
            prop_assert_eq!(Factorization::from_factors(f.factors().to_vec()).unwrap(), f);
        }

        #[test]
        fn relative_totient_monotone(n in 2u64..200_000, a in 0u64..200_000, b in 0u64..200_000) {
            let f = factorize(n).unwrap();
            let (lo, hi) = (a.min(b) % n, a.max(b) % n);
            let (lo, hi) = (lo.min(hi), lo.max(hi));
            prop_assert!(phi_relative(&f, lo).unwrap() <= phi_relative(&f, hi).unwrap());
            prop_assert_eq!(phi_relative(&f, n - 1).unwrap(), f.phi());
        }
    }
}
