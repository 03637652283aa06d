//! Segments `{i·x mod n : 0 ≤ x ≤ ℓ}`, residue classes by gcd, and the exact
//! counts of how many unit slopes cover a given residue.

use crate::bitmap::Bitmap;
use crate::error::{invalid, Error, Result};
use crate::numtheory::{factorize, gcd, phi_relative, Factorization};

/// Largest modulus accepted by [`coverage_count_bruteforce`].
pub const BRUTEFORCE_CAP: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    n: u64,
    slope: u64,
    length: u64,
}

impl Segment {
    pub fn new(n: u64, slope: u64, length: u64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("segment modulus must be at least 2, got {n}")));
        }
        if slope >= n {
            return Err(invalid(format!("slope {slope} not reduced mod {n}")));
        }
        if length >= n {
            return Err(invalid(format!("segment length {length} must be below n = {n}")));
        }
        Ok(Segment { n, slope, length })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn slope(&self) -> u64 {
        self.slope
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    /// Walks `slope·x mod n` for `x = 0..=length`, stopping early once the
    /// multiples cycle back to 0.
    pub fn for_each_element(&self, mut f: impl FnMut(u64)) {
        let mut acc = 0u64;
        f(0);
        for _ in 0..self.length {
            acc += self.slope;
            if acc >= self.n {
                acc -= self.n;
            }
            if acc == 0 {
                break;
            }
            f(acc);
        }
    }

    pub fn contains(&self, y: u64) -> bool {
        let mut hit = false;
        self.for_each_element(|e| hit |= e == y);
        hit
    }
}

/// Element set of a segment as a bitmap over `[0, n)`.
pub fn segment_elements(seg: &Segment) -> Bitmap {
    let mut b = Bitmap::new(seg.n as usize);
    seg.for_each_element(|e| {
        b.insert(e as usize);
    });
    b
}

/// `Z_{n,d} = {x ∈ Z_n : gcd(x, n) = d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClass {
    modulus: Factorization,
    d: u64,
}

impl ResidueClass {
    pub fn new(modulus: Factorization, d: u64) -> Result<Self> {
        if !modulus.divides(d) {
            return Err(invalid(format!("{d} does not divide {}", modulus.n())));
        }
        Ok(ResidueClass { modulus, d })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> u64 {
        self.modulus.n()
    }

    /// `|Z_{n,d}| = φ(n/d)`.
    pub fn size(&self) -> u64 {
        self.modulus.quotient(self.d).expect("d divides n by construction").phi()
    }

    pub fn contains(&self, x: u64) -> bool {
        x < self.n() && gcd(x, self.n()) == self.d
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        let n = self.n();
        (0..n / self.d).map(move |k| k * self.d).filter(move |&x| gcd(x, n) == self.d)
    }
}

/// Number of units `x ∈ Z*_n` with `x·b ≡ y (mod n)` for some `0 ≤ b ≤ ℓ`:
/// `φ(n/d, ⌊ℓ/d⌋) · φ(n)/φ(n/d)` where `d = gcd(y, n)`.
///
/// For `y = 0` this gives `φ(n)`, since `φ(1, 0) = 1` and every segment holds 0.
pub fn coverage_count(n: u64, ell: u64, y: u64) -> Result<u64> {
    coverage_count_factored(&factorize(n)?, ell, y)
}

pub fn coverage_count_factored(f: &Factorization, ell: u64, y: u64) -> Result<u64> {
    let n = f.n();
    if y >= n || (ell >= n && n > 1) {
        return Err(invalid(format!("need y < n and ell < n (n={n}, ell={ell}, y={y})")));
    }
    let d = gcd(y, n);
    let quotient = f.quotient(d)?;
    let rel = phi_relative(&quotient, ell / d)?;
    let ratio = f.phi_ratio(d)?;
    rel.checked_mul(ratio).ok_or(Error::Overflow("coverage count"))
}

/// Direct enumeration of the [`coverage_count`] quantity; an independent check.
pub fn coverage_count_bruteforce(n: u64, ell: u64, y: u64) -> Result<u64> {
    if n > BRUTEFORCE_CAP {
        return Err(Error::CapExceeded { what: "n", value: n, cap: BRUTEFORCE_CAP });
    }
    if n == 0 || y >= n {
        return Err(invalid("need 0 <= y < n"));
    }
    let mut count = 0;
    for x in (0..n).filter(|&x| gcd(x, n) == 1) {
        let mut prod = 0u64;
        for _ in 0..=ell {
            if prod == y {
                count += 1;
                break;
            }
            prod = (prod + x) % n;
        }
    }
    Ok(count)
}

/// Number of `x ∈ Z*_{dn}` with `x·b ≡ y (mod n)` for some `b ∈ B`, where
/// `y ∈ Z*_n` and `B ⊆ Z*_n`; equals `|B|·φ(dn)/φ(n)`.
pub fn lemma_tau_count(n: u64, d: u64, y: u64, b: &[u64]) -> Result<u64> {
    if n == 0 || d == 0 {
        return Err(invalid("n and d must be positive"));
    }
    let dn = n.checked_mul(d).ok_or(Error::Overflow("d·n"))?;
    if y >= n || gcd(y, n) != 1 {
        return Err(invalid(format!("y = {y} is not a unit mod {n}")));
    }
    let mut sorted = b.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != b.len() {
        return Err(invalid("B contains duplicates"));
    }
    if let Some(&bad) = sorted.iter().find(|&&x| x >= n || gcd(x, n) != 1) {
        return Err(invalid(format!("{bad} is not a unit mod {n}")));
    }
    let f_dn = factorize(dn)?;
    let ratio = f_dn.phi_ratio(d)?;
    (b.len() as u64).checked_mul(ratio).ok_or(Error::Overflow("lemma count"))
}
