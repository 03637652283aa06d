//! The divisor semigroup `(D_n, ⊙)` with `a ⊙ b = gcd(ab, n)`, and bases `B`
//! satisfying `D_n^{≤s} ⊙ B = D_n`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numtheory::{divisors, gcd, Factorization};

/// Largest divisor count accepted by [`check_divisor_cover`].
pub const DIVISOR_CHECK_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    LargeDivisorsPlusOne,
    DivisorLatticeOfM,
    Trivial,
}

impl BasisKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasisKind::LargeDivisorsPlusOne => "large-divisors-plus-one",
            BasisKind::DivisorLatticeOfM => "divisor-lattice-of-m",
            BasisKind::Trivial => "trivial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisorBasis {
    pub n: u64,
    pub s: f64,
    /// Sorted ascending.
    pub basis: Vec<u64>,
    pub kind: BasisKind,
    /// The large divisor `m` when `kind` is [`BasisKind::DivisorLatticeOfM`].
    pub m: Option<u64>,
}

/// `gcd(a·b, n)` for divisors `a`, `b` of `n`.
pub fn odot(a: u64, b: u64, n: u64) -> Result<u64> {
    if a == 0 || b == 0 || n == 0 || !n.is_multiple_of(a) || !n.is_multiple_of(b) {
        return Err(invalid(format!("{a} and {b} must both divide {n}")));
    }
    let ab = a as u128 * b as u128;
    Ok((gcd_u128(ab, n as u128)) as u64)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `{d | n : d > s} ∪ {1}`.
pub fn basis_above_threshold(f: &Factorization, s: f64) -> DivisorBasis {
    let s = clamp_s(s);
    let mut basis: Vec<u64> = divisors(f).into_iter().filter(|&d| d == 1 || d as f64 > s).collect();
    basis.dedup();
    DivisorBasis { n: f.n(), s, basis, kind: BasisKind::LargeDivisorsPlusOne, m: None }
}

fn clamp_s(s: f64) -> f64 {
    if s.is_nan() {
        1.0
    } else {
        s.max(1.0)
    }
}

/// Outcome of the large-divisor selection: `m` and the prime-power blocks it
/// is built from, in the order they were taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeDivisor {
    pub m: u64,
    pub blocks: Vec<(u64, u32)>,
    /// True when a single prime power already reached `r`.
    pub prime_power_branch: bool,
}

/// A divisor `m ≥ r` of `n` with small divisor count and `σ(m) = O(m)`.
///
/// If some full prime power `p^e ∥ n` has `p^e ≥ r` (smallest such `p`), the
/// answer is the least `p^{e'} ≥ r`. Otherwise prime powers are taken in
/// decreasing order of `e·p·ln p` until the product reaches `r`.
pub fn large_divisor_linear_sigma(f: &Factorization, r: u64) -> Result<u64> {
    large_divisor_selection(f, r).map(|sel| sel.m)
}

pub fn large_divisor_selection(f: &Factorization, r: u64) -> Result<LargeDivisor> {
    let n = f.n();
    if r == 0 || r > n {
        return Err(invalid(format!("need 1 <= r <= n (r = {r}, n = {n})")));
    }
    if r == 1 {
        return Ok(LargeDivisor { m: 1, blocks: Vec::new(), prime_power_branch: true });
    }
    for &(p, e) in f.factors() {
        let full = p.pow(e);
        if full >= r {
            let mut pk = 1u64;
            let mut k = 0;
            while pk < r {
                pk *= p;
                k += 1;
            }
            return Ok(LargeDivisor { m: pk, blocks: vec![(p, k)], prime_power_branch: true });
        }
    }
    let mut order: Vec<(u64, u32)> = f.factors().to_vec();
    let weight = |&(p, e): &(u64, u32)| e as f64 * p as f64 * (p as f64).ln();
    order.sort_by(|a, b| weight(b).total_cmp(&weight(a)).then(a.0.cmp(&b.0)));
    let mut m = 1u64;
    let mut blocks = Vec::new();
    for (p, e) in order {
        m *= p.pow(e);
        blocks.push((p, e));
        if m >= r {
            return Ok(LargeDivisor { m, blocks, prime_power_branch: false });
        }
    }
    unreachable!("product of all prime powers is n >= r")
}

/// `D_m` for `m = large_divisor_linear_sigma(n, ⌈n/s⌉)`.
pub fn basis_divisor_lattice(f: &Factorization, s: f64) -> DivisorBasis {
    let s = clamp_s(s);
    let n = f.n();
    let r = ((n as f64 / s).ceil() as u64).clamp(1, n.max(1));
    let m = large_divisor_linear_sigma(f, r).expect("1 <= r <= n");
    let fm = f.quotient(n / m).expect("m divides n");
    DivisorBasis { n, s, basis: divisors(&fm), kind: BasisKind::DivisorLatticeOfM, m: Some(m) }
}

/// Result of [`check_divisor_cover`]: `witness` is an uncovered divisor, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisorCoverCheck {
    pub covered: bool,
    pub witness: Option<u64>,
}

/// Checks that every `d | n` equals `d₁ ⊙ d₂` with `d₁ | n`, `d₁ ≤ s` and `d₂ ∈ B`.
pub fn check_divisor_cover(f: &Factorization, s: f64, basis: &[u64]) -> Result<DivisorCoverCheck> {
    let n = f.n();
    let divs = divisors(f);
    if divs.len() > DIVISOR_CHECK_CAP {
        return Err(Error::CapExceeded {
            what: "divisor count",
            value: divs.len() as u64,
            cap: DIVISOR_CHECK_CAP as u64,
        });
    }
    if let Some(&bad) = basis.iter().find(|&&b| b == 0 || !n.is_multiple_of(b)) {
        return Err(invalid(format!("basis element {bad} does not divide {n}")));
    }
    let index: HashMap<u64, usize> = divs.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut hit = vec![false; divs.len()];
    let mut remaining = divs.len();
    let small: Vec<u64> = divs.iter().copied().filter(|&d| d as f64 <= s).collect();
    'outer: for &b in basis {
        for &d1 in &small {
            // gcd(d1·b, n) = d1' · b where d1' = gcd(d1, n/b)
            let prod = gcd(d1, n / b) * b;
            let i = index[&prod];
            if !hit[i] {
                hit[i] = true;
                remaining -= 1;
                if remaining == 0 {
                    break 'outer;
                }
            }
        }
    }
    let witness = hit.iter().position(|&h| !h).map(|i| divs[i]);
    Ok(DivisorCoverCheck { covered: witness.is_none(), witness })
}
