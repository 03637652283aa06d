//! End-to-end ℓ-covering construction of `Z_n`.
//!
//! Residues are split by `gcd(y, n)`. A divisor basis `B` with
//! `D_n^{≤s} ⊙ B = D_n` reduces the problem to covering, for each `b ∈ B`,
//! the residues of `Z_{n/b}` with gcd at most `s` by unit-slope segments; a
//! slope `x` found there is lifted to `x·b mod n`.

mod exact;
mod lower;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::bitmap::Bitmap;
use crate::divisor_cover::{basis_above_threshold, basis_divisor_lattice, BasisKind, DivisorBasis};
use crate::error::{invalid, Error, Result};
use crate::greedy::{greedy_cover, randomized_cover_with, SubproblemInstance, DEFAULT_RETRY_CAP};
use crate::numtheory::{clamped_ln, factorize, Factorization};

pub use exact::{min_cover_bruteforce, min_cover_bruteforce_with, MinCover, MIN_COVER_CAP};
pub use lower::{lower_bound_instance, LowerBoundInstance};

/// Default for the constant `c` in the thresholds `ℓ < c·log n`,
/// `s = ℓ/(c·log⁵ n)` and `ℓ ≤ n^{1 − c/log log n}`.
/// Small enough that `s = ℓ` for every `n` up to about 10^7, which keeps the
/// patch pass empty and sizes well inside the measured envelope.
pub const DEFAULT_C: f64 = 1e-6;

/// Default number of sampling rounds per `ln n'`.
pub const DEFAULT_ROUNDS_FACTOR: f64 = 3.0;

/// Largest modulus accepted by [`construct`].
pub const CONSTRUCT_CAP: u64 = 1 << 31;

/// Maximum number of uncovered residues listed by [`verify_cover`].
pub const WITNESS_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Deterministic,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Deterministic,
    Randomized,
    Trivial,
    External,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Deterministic => "deterministic",
            Method::Randomized => "randomized",
            Method::Trivial => "trivial",
            Method::External => "external",
        }
    }
}

/// Forces one of the two divisor bases instead of the `ℓ ≤ n^{1−c/log log n}` test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisChoice {
    AboveThreshold,
    DivisorLattice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructConfig {
    pub c: f64,
    pub case_override: Option<BasisChoice>,
    pub mode: Mode,
    pub seed: u64,
    pub rounds_factor: f64,
    pub retry_cap: u32,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        ConstructConfig {
            c: DEFAULT_C,
            case_override: None,
            mode: Mode::Deterministic,
            seed: 0,
            rounds_factor: DEFAULT_ROUNDS_FACTOR,
            retry_cap: DEFAULT_RETRY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubproblemStats {
    /// Basis element; the subproblem lives in `Z_{n/b}`.
    pub b: u64,
    pub modulus: u64,
    pub universe: u64,
    pub size: u64,
    pub fell_back: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverStats {
    pub basis_kind: BasisKind,
    pub basis_size: u64,
    /// The large divisor behind a divisor-lattice basis.
    pub m: Option<u64>,
    pub s: f64,
    pub subproblems: Vec<SubproblemStats>,
    pub patch_count: u64,
    pub fallback_count: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringSet {
    pub n: u64,
    pub ell: u64,
    /// Sorted ascending, no duplicates.
    pub slopes: Vec<u64>,
    pub method: Method,
    pub stats: CoverStats,
}

impl CoveringSet {
    pub fn size(&self) -> usize {
        self.slopes.len()
    }
}

/// `max(1, min(ℓ, ℓ / (c·log⁵ n)))`.
pub fn threshold_s(n: u64, ell: u64, c: f64) -> f64 {
    let l = ell as f64;
    let s = l / (c * clamped_ln(n as f64).powi(5));
    s.min(l).max(1.0)
}

/// True when `ℓ ≤ n^{1 − c/log log n}`, the case served by the above-threshold basis.
pub fn small_ell_case(n: u64, ell: u64, c: f64) -> bool {
    let nf = n as f64;
    let lnln = nf.ln().ln().max(1.0);
    ell as f64 <= nf.powf(1.0 - c / lnln)
}

/// The divisor basis [`construct`] uses for `ℓ ≥ c·ln n`.
pub fn select_basis(f: &Factorization, ell: u64, cfg: &ConstructConfig) -> DivisorBasis {
    let n = f.n();
    let s = threshold_s(n, ell, cfg.c);
    let choice = cfg.case_override.unwrap_or(if small_ell_case(n, ell, cfg.c) {
        BasisChoice::AboveThreshold
    } else {
        BasisChoice::DivisorLattice
    });
    match choice {
        BasisChoice::AboveThreshold => basis_above_threshold(f, s),
        BasisChoice::DivisorLattice => basis_divisor_lattice(f, s),
    }
}

fn check_config(cfg: &ConstructConfig) -> Result<()> {
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(invalid(format!("c must be positive and finite, got {}", cfg.c)));
    }
    if !(cfg.rounds_factor > 0.0 && cfg.rounds_factor.is_finite()) {
        return Err(invalid(format!("rounds_factor must be positive, got {}", cfg.rounds_factor)));
    }
    Ok(())
}

/// Builds a verified ℓ-covering of `Z_n` for `2 ≤ n` and `1 ≤ ℓ < n`.
pub fn construct(n: u64, ell: u64, cfg: &ConstructConfig) -> Result<CoveringSet> {
    let start = Instant::now();
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    if ell == 0 || ell >= n {
        return Err(invalid(format!("need 1 <= ell < n (n = {n}, ell = {ell})")));
    }
    if n > CONSTRUCT_CAP {
        return Err(Error::CapExceeded { what: "n", value: n, cap: CONSTRUCT_CAP });
    }
    check_config(cfg)?;
    let f = factorize(n)?;

    if (ell as f64) < cfg.c * clamped_ln(n as f64) {
        let slopes: Vec<u64> = (1..n).collect();
        let stats = CoverStats {
            basis_kind: BasisKind::Trivial,
            basis_size: 0,
            m: None,
            s: 1.0,
            subproblems: Vec::new(),
            patch_count: 0,
            fallback_count: 0,
            elapsed: Duration::ZERO,
        };
        return finish(n, ell, slopes, Method::Trivial, stats, start);
    }

    let basis = select_basis(&f, ell, cfg);
    let s = basis.s;
    debug_assert!(
        basis.basis.len() > 2000
            || crate::divisor_cover::check_divisor_cover(&f, s, &basis.basis)
                .map(|c| c.covered)
                .unwrap_or(true),
        "basis fails the divisor cover check"
    );

    let solved: Vec<Result<(u64, Vec<u64>, SubproblemStats)>> = basis
        .basis
        .par_iter()
        .map(|&b| {
            let fq = f.quotient(b)?;
            let inst = SubproblemInstance::divisor_classes(fq, ell, s)?;
            let universe = inst.universe().count_ones() as u64;
            let sel = if universe == 0 {
                None
            } else {
                Some(match cfg.mode {
                    Mode::Deterministic => greedy_cover(&inst)?,
                    Mode::Randomized => {
                        let b_lower = inst.min_multiplicity()?.unwrap_or(1).max(1);
                        randomized_cover_with(
                            &inst,
                            b_lower,
                            cfg.rounds_factor,
                            sub_seed(cfg.seed, b),
                            cfg.retry_cap,
                        )?
                    }
                })
            };
            let slopes = sel.as_ref().map(|s| s.chosen_slopes.clone()).unwrap_or_default();
            let stats = SubproblemStats {
                b,
                modulus: n / b,
                universe,
                size: slopes.len() as u64,
                fell_back: sel.as_ref().is_some_and(|s| s.stats.fell_back),
            };
            Ok((b, slopes, stats))
        })
        .collect();

    let mut chosen = Bitmap::new(n as usize);
    let mut subproblems = Vec::with_capacity(solved.len());
    for r in solved {
        let (b, slopes, st) = r?;
        for x in slopes {
            let lifted = x * b % n;
            debug_assert_eq!(crate::numtheory::gcd(lifted, n), b);
            chosen.insert(lifted as usize);
        }
        subproblems.push(st);
    }

    // patch pass: any residue still uncovered becomes its own slope
    let mut covered = Bitmap::new(n as usize);
    for x in chosen.iter_ones() {
        crate::greedy::mark_segment(&mut covered, n, x as u64, ell);
    }
    let mut patch_count = 0;
    for y in covered.iter_zeros().collect::<Vec<_>>() {
        chosen.insert(y);
        patch_count += 1;
    }

    let stats = CoverStats {
        basis_kind: basis.kind,
        basis_size: basis.basis.len() as u64,
        m: basis.m,
        s,
        fallback_count: subproblems.iter().filter(|s| s.fell_back).count() as u64,
        subproblems,
        patch_count,
        elapsed: Duration::ZERO,
    };
    let method = match cfg.mode {
        Mode::Deterministic => Method::Deterministic,
        Mode::Randomized => Method::Randomized,
    };
    let slopes = chosen.iter_ones().map(|x| x as u64).collect();
    finish(n, ell, slopes, method, stats, start)
}

fn finish(
    n: u64,
    ell: u64,
    slopes: Vec<u64>,
    method: Method,
    mut stats: CoverStats,
    start: Instant,
) -> Result<CoveringSet> {
    let check = verify_cover(n, ell, &slopes)?;
    if !check.complete {
        return Err(Error::VerificationFailed(check.witnesses));
    }
    stats.elapsed = start.elapsed();
    Ok(CoveringSet { n, ell, slopes, method, stats })
}

fn sub_seed(seed: u64, b: u64) -> u64 {
    // splitmix64 finalizer over (seed, b)
    let mut z = seed ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub complete: bool,
    pub uncovered_count: u64,
    /// The smallest uncovered residues, at most [`WITNESS_CAP`] of them.
    pub witnesses: Vec<u64>,
}

/// Checks `{a·b mod n : 0 ≤ a ≤ ℓ, b ∈ slopes} = Z_n` with one bitmap pass.
pub fn verify_cover(n: u64, ell: u64, slopes: &[u64]) -> Result<Verification> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if n > CONSTRUCT_CAP {
        return Err(Error::CapExceeded { what: "n", value: n, cap: CONSTRUCT_CAP });
    }
    if let Some(&bad) = slopes.iter().find(|&&x| x >= n) {
        return Err(invalid(format!("slope {bad} is not reduced mod {n}")));
    }
    let ell = ell.min(n - 1);
    let mut covered = Bitmap::new(n as usize);
    for &x in slopes {
        crate::greedy::mark_segment(&mut covered, n, x, ell);
    }
    let uncovered_count = (n as usize - covered.count_ones()) as u64;
    let witnesses = covered.iter_zeros().take(WITNESS_CAP).map(|y| y as u64).collect();
    Ok(Verification { complete: uncovered_count == 0, uncovered_count, witnesses })
}
