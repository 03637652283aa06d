use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numtheory::{factorize, phi_relative, primes_up_to};

/// Primorial instance: `n` is the product of the first `k` primes and `ℓ` the
/// `k`-th prime. Only 1 is coprime to `n` below `ℓ`, so each unit needs its own
/// slope and every ℓ-covering has at least `φ(n)` elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBoundInstance {
    pub k: u32,
    pub n: u64,
    pub ell: u64,
    pub phi_n: u64,
    /// `φ(n, ℓ)`, which must be 1; `None` when the instance is degenerate.
    pub certificate: Option<u64>,
    /// `ℓ ≥ n`, which only happens for `k = 1`.
    pub degenerate: bool,
}

impl LowerBoundInstance {
    /// Lower bound on the size of any ℓ-covering of `Z_n`.
    pub fn bound(&self) -> u64 {
        self.phi_n
    }
}

pub fn lower_bound_instance(k: u32) -> Result<LowerBoundInstance> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let primes = primes_up_to(60)?;
    if k as usize > primes.len() {
        return Err(Error::Overflow("primorial"));
    }
    let mut n: u64 = 1;
    for &p in &primes[..k as usize] {
        n = n.checked_mul(p).ok_or(Error::Overflow("primorial"))?;
    }
    if n >= crate::numtheory::FACTORIZE_LIMIT {
        return Err(Error::Overflow("primorial"));
    }
    let ell = primes[k as usize - 1];
    let f = factorize(n)?;
    let degenerate = ell >= n;
    let certificate = if degenerate { None } else { Some(phi_relative(&f, ell)?) };
    Ok(LowerBoundInstance { k, n, ell, phi_n: f.phi(), certificate, degenerate })
}
