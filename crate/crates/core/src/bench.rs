//! Benchmark grids: instance families crossed with length rules, one CSV
//! record per construction.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cover::{construct, ConstructConfig, CoveringSet, Mode};
use crate::error::{invalid, Error, Result};
use crate::numtheory::{clamped_ln, is_prime, primes_up_to};

pub const CSV_HEADER: &str = "n,ell,method,size,bound_ratio,wall_time_ms,basis_kind,patch_count,seed";

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Product of the first `k` primes.
    Primorial(u32),
    /// Smallest prime `≥ p`.
    Prime(u64),
    Power(u64, u32),
    /// `count` integers drawn uniformly from `[2^(bits−1), 2^bits)`.
    Random {
        count: u32,
        bits: u32,
    },
    /// `count` integers drawn uniformly from `[2, max]`.
    Uniform {
        count: u32,
        max: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LengthRule {
    /// `ℓ = ⌊n/x⌋`.
    Ratio(f64),
    /// `ℓ = ⌈(ln n)^5⌉`.
    Log5,
    /// `ℓ = ⌊√n⌋`.
    Sqrt,
    Fixed(u64),
}

impl LengthRule {
    pub fn apply(&self, n: u64) -> u64 {
        match *self {
            LengthRule::Ratio(x) => (n as f64 / x).floor() as u64,
            LengthRule::Log5 => (n as f64).ln().powi(5).ceil() as u64,
            LengthRule::Sqrt => crate::numtheory::isqrt(n),
            LengthRule::Fixed(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    pub families: Vec<Family>,
    pub rules: Vec<LengthRule>,
}

fn num<T: std::str::FromStr>(s: &str, item: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad number {s:?} in grid item {item:?}")))
}

impl Grid {
    /// Parses `primorial:k`, `prime:p`, `power:p^e`, `random:count:bits`,
    /// `uniform:count:max` and
    /// `ratio:x`, `log5`, `sqrt`, `fixed:v`, separated by semicolons.
    pub fn parse(spec: &str) -> Result<Grid> {
        let mut grid = Grid::default();
        for item in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let parts: Vec<&str> = item.split(':').collect();
            match parts.as_slice() {
                ["primorial", k] => grid.families.push(Family::Primorial(num(k, item)?)),
                ["prime", p] => grid.families.push(Family::Prime(num(p, item)?)),
                ["power", pe] => {
                    let (p, e) = pe
                        .split_once('^')
                        .ok_or_else(|| Error::Parse(format!("expected power:p^e, got {item:?}")))?;
                    grid.families.push(Family::Power(num(p, item)?, num(e, item)?));
                }
                ["random", count, bits] => {
                    grid.families.push(Family::Random { count: num(count, item)?, bits: num(bits, item)? })
                }
                ["uniform", count, max] => {
                    grid.families.push(Family::Uniform { count: num(count, item)?, max: num(max, item)? })
                }
                ["ratio", x] => {
                    let x: f64 = num(x, item)?;
                    if !(x > 0.0 && x.is_finite()) {
                        return Err(Error::Parse(format!("ratio must be positive in {item:?}")));
                    }
                    grid.rules.push(LengthRule::Ratio(x));
                }
                ["log5"] => grid.rules.push(LengthRule::Log5),
                ["sqrt"] => grid.rules.push(LengthRule::Sqrt),
                ["fixed", v] => grid.rules.push(LengthRule::Fixed(num(v, item)?)),
                _ => return Err(Error::Parse(format!("unknown grid item {item:?}"))),
            }
        }
        if grid.families.is_empty() || grid.rules.is_empty() {
            return Err(Error::Parse("grid needs at least one n-family and one length rule".into()));
        }
        Ok(grid)
    }

    /// Moduli of every family, in order.
    pub fn moduli(&self, seed: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for fam in &self.families {
            match *fam {
                Family::Primorial(k) => {
                    let primes = primes_up_to(100)?;
                    if k == 0 || k as usize > 15 {
                        return Err(invalid(format!("primorial:{k} out of range 1..=15")));
                    }
                    out.push(primes[..k as usize].iter().product());
                }
                Family::Prime(p) => {
                    let mut q = p.max(2);
                    while !is_prime(q) {
                        q += 1;
                    }
                    out.push(q);
                }
                Family::Power(p, e) => {
                    if !is_prime(p) {
                        return Err(invalid(format!("power base {p} is not prime")));
                    }
                    out.push(p.checked_pow(e).ok_or(Error::Overflow("prime power"))?);
                }
                Family::Random { count, bits } => {
                    if !(2..=31).contains(&bits) {
                        return Err(invalid(format!("random bits must be in 2..=31, got {bits}")));
                    }
                    for _ in 0..count {
                        out.push(rng.random_range(1u64 << (bits - 1)..1u64 << bits));
                    }
                }
                Family::Uniform { count, max } => {
                    if !(3..=1 << 31).contains(&max) {
                        return Err(invalid(format!("uniform max must be in 3..=2^31, got {max}")));
                    }
                    for _ in 0..count {
                        out.push(rng.random_range(2..=max));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Distinct `(n, ℓ)` pairs with `1 ≤ ℓ < n`, in first-seen order; other
    /// combinations are dropped.
    pub fn instances(&self, seed: u64) -> Result<Vec<(u64, u64)>> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for n in self.moduli(seed)? {
            for rule in &self.rules {
                let ell = rule.apply(n);
                if ell >= 1 && ell < n && seen.insert((n, ell)) {
                    out.push((n, ell));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: u64,
    pub ell: u64,
    pub method: String,
    pub size: u64,
    pub bound_ratio: f64,
    pub wall_time_ms: u64,
    pub basis_kind: String,
    pub patch_count: u64,
    pub seed: Option<u64>,
}

/// `size / ((n/ℓ)·max(ln n, 1))`.
pub fn bound_ratio(n: u64, ell: u64, size: u64) -> f64 {
    size as f64 / (n as f64 / ell as f64 * clamped_ln(n as f64))
}

impl BenchRecord {
    pub fn from_cover(cover: &CoveringSet, seed: Option<u64>) -> BenchRecord {
        BenchRecord {
            n: cover.n,
            ell: cover.ell,
            method: cover.method.as_str().to_string(),
            size: cover.size() as u64,
            bound_ratio: bound_ratio(cover.n, cover.ell, cover.size() as u64),
            wall_time_ms: cover.stats.elapsed.as_millis() as u64,
            basis_kind: cover.stats.basis_kind.as_str().to_string(),
            patch_count: cover.stats.patch_count,
            seed,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{},{},{},{}",
            self.n,
            self.ell,
            self.method,
            self.size,
            self.bound_ratio,
            self.wall_time_ms,
            self.basis_kind,
            self.patch_count,
            self.seed.map(|s| s.to_string()).unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub modes: Vec<Mode>,
    pub repeat: u32,
    pub seed: u64,
    pub jobs: usize,
    pub construct: ConstructConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            modes: vec![Mode::Deterministic],
            repeat: 1,
            seed: 0,
            jobs: 1,
            construct: ConstructConfig::default(),
        }
    }
}

/// Runs every `(instance, mode, repeat)` point; records come back in grid order.
pub fn run_grid(grid: &Grid, cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let mut points = Vec::new();
    for (n, ell) in grid.instances(cfg.seed)? {
        for &mode in &cfg.modes {
            for r in 0..cfg.repeat.max(1) {
                let seed = (mode == Mode::Randomized).then(|| cfg.seed.wrapping_add(r as u64));
                points.push((n, ell, mode, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        points
            .par_iter()
            .map(|&(n, ell, mode, seed)| {
                let cc = ConstructConfig {
                    mode,
                    seed: seed.unwrap_or(cfg.construct.seed),
                    ..cfg.construct.clone()
                };
                let start = Instant::now();
                let mut cover = construct(n, ell, &cc)?;
                cover.stats.elapsed = start.elapsed();
                Ok(BenchRecord::from_cover(&cover, seed))
            })
            .collect()
    })
}
