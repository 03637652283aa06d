//! Brute-force ground truth, written against nothing but a local gcd and
//! plain loops so it cannot share a bug with the formula code.
//!
//! Tables are plain text: a header `#kind version params`, then one
//! `input-tuple<TAB>value` row per line, tuples comma-separated.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::min_cover_bruteforce_with;
use crate::error::{Error, Result};

pub const ORACLE_VERSION: &str = "v1";

pub const PHI_CAP: u64 = 5000;
pub const COVERAGE_CAP: u64 = 200;
pub const MIN_COVER_CAP: u64 = 40;

fn ogcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleKind {
    PhiRelative,
    CoverageCount,
    LemmaTau,
    DivisorCover,
    MinCover,
}

impl OracleKind {
    pub const ALL: [OracleKind; 5] = [
        OracleKind::PhiRelative,
        OracleKind::CoverageCount,
        OracleKind::LemmaTau,
        OracleKind::DivisorCover,
        OracleKind::MinCover,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OracleKind::PhiRelative => "phi_relative",
            OracleKind::CoverageCount => "coverage_count",
            OracleKind::LemmaTau => "lemma_tau",
            OracleKind::DivisorCover => "divisor_cover",
            OracleKind::MinCover => "min_cover",
        }
    }
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OracleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown oracle kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTable {
    pub kind: OracleKind,
    pub version: String,
    pub params: String,
    pub rows: Vec<(Vec<u64>, String)>,
}

impl OracleTable {
    pub fn to_text(&self) -> String {
        let mut out = format!("#{} {} {}\n", self.kind.name(), self.version, self.params);
        for (input, value) in &self.rows {
            let tuple: Vec<String> = input.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}\t{}", tuple.join(","), value).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<OracleTable> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|h| h.strip_prefix('#'))
            .ok_or_else(|| Error::Parse("missing '#kind version params' header".into()))?;
        let mut parts = header.splitn(3, ' ');
        let kind: OracleKind = parts.next().unwrap_or("").parse()?;
        let version = parts.next().ok_or_else(|| Error::Parse("missing version".into()))?.to_string();
        let params = parts.next().unwrap_or("").to_string();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let (tuple, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::Parse(format!("row {}: no tab separator", i + 2)))?;
            let input = tuple
                .split(',')
                .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("row {}: {e}", i + 2))))
                .collect::<Result<Vec<u64>>>()?;
            rows.push((input, value.to_string()));
        }
        Ok(OracleTable { kind, version, params, rows })
    }
}

/// Sizes of the generated tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleConfig {
    pub phi_max_n: u64,
    /// Every ℓ is tabulated up to this n; beyond it, `phi_ells_per_n` spread values.
    pub phi_all_ell_max_n: u64,
    pub phi_ells_per_n: u64,
    pub coverage_max_n: u64,
    pub lemma_max_n: u64,
    pub lemma_max_d: u64,
    pub lemma_sets: u64,
    pub divisor_max_n: u64,
    pub min_cover_max_n: u64,
    pub min_cover_time_box: Duration,
    pub seed: u64,
}

impl ScaleConfig {
    /// The full ground-truth scale.
    pub fn full() -> ScaleConfig {
        ScaleConfig {
            phi_max_n: PHI_CAP,
            phi_all_ell_max_n: 500,
            phi_ells_per_n: 64,
            coverage_max_n: COVERAGE_CAP,
            lemma_max_n: 100,
            lemma_max_d: 6,
            lemma_sets: 50,
            divisor_max_n: 300,
            min_cover_max_n: MIN_COVER_CAP,
            min_cover_time_box: Duration::from_secs(10),
            seed: 0,
        }
    }

    /// A scale small enough to keep checked-in tables reviewable.
    pub fn small() -> ScaleConfig {
        ScaleConfig {
            phi_max_n: 120,
            phi_all_ell_max_n: 60,
            phi_ells_per_n: 16,
            coverage_max_n: 24,
            lemma_max_n: 12,
            lemma_max_d: 3,
            lemma_sets: 3,
            divisor_max_n: 60,
            min_cover_max_n: 14,
            min_cover_time_box: Duration::from_secs(10),
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        for (what, value, cap) in [
            ("phi table n", self.phi_max_n, PHI_CAP),
            ("coverage table n", self.coverage_max_n, COVERAGE_CAP),
            ("min-cover table n", self.min_cover_max_n, MIN_COVER_CAP),
        ] {
            if value > cap {
                return Err(Error::CapExceeded { what, value, cap });
            }
        }
        Ok(())
    }
}

/// `#{x ∈ [0, ℓ] : gcd(x, n) = 1}` for every `ℓ < n` (index `ℓ`).
pub fn coprime_prefix_counts(n: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(n as usize);
    let mut acc = 0;
    for x in 0..n.max(1) {
        if ogcd(x, n) == 1 {
            acc += 1;
        }
        out.push(acc);
    }
    out
}

/// `ℓ` values tabulated for modulus `n`.
pub fn phi_ells(n: u64, cfg: &ScaleConfig) -> Vec<u64> {
    if n <= cfg.phi_all_ell_max_n {
        return (0..n.max(1)).collect();
    }
    let k = cfg.phi_ells_per_n.max(2);
    let mut v: Vec<u64> = (0..k).map(|i| i * (n - 1) / (k - 1)).collect();
    v.dedup();
    v
}

/// Number of units `x` mod `n` whose first `ℓ + 1` multiples hit `y`, as
/// `table[ℓ][y]` for all `ℓ, y < n`.
#[allow(clippy::needless_range_loop)]
pub fn coverage_table(n: u64) -> Vec<Vec<u64>> {
    let n_us = n as usize;
    // hits[y][a]: units whose segment first reaches y at step a
    let mut hits = vec![vec![0u64; n_us]; n_us];
    let mut first = vec![usize::MAX; n_us];
    for x in (0..n).filter(|&x| ogcd(x, n) == 1) {
        first.iter_mut().for_each(|f| *f = usize::MAX);
        let mut v = 0u64;
        for a in 0..n_us {
            if first[v as usize] == usize::MAX {
                first[v as usize] = a;
                hits[v as usize][a] += 1;
            }
            v = (v + x) % n;
        }
    }
    let mut table = vec![vec![0u64; n_us]; n_us];
    for y in 0..n_us {
        let mut acc = 0;
        for ell in 0..n_us {
            acc += hits[y][ell];
            table[ell][y] = acc;
        }
    }
    table
}

/// `#{x ∈ Z*_{dn} : x·b ≡ y (mod n) for some b ∈ B}` by enumeration.
pub fn lemma_tau_enumerate(n: u64, d: u64, y: u64, b: &[u64]) -> u64 {
    let dn = d * n;
    (0..dn).filter(|&x| ogcd(x, dn) == 1).filter(|&x| b.iter().any(|&bb| x % n * bb % n == y % n)).count()
        as u64
}

/// Whether every divisor of `n` is `gcd(d₁·d₂, n)` with `d₁ | n`, `d₁ ≤ s`, `d₂ | m`.
pub fn divisor_cover_enumerate(n: u64, s: u64, m: u64) -> bool {
    let divs_n: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let divs_m: Vec<u64> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    divs_n.iter().all(|&target| {
        divs_n.iter().filter(|&&d1| d1 <= s).any(|&d1| divs_m.iter().any(|&d2| ogcd(d1 * d2, n) == target))
    })
}

fn lemma_sets(n: u64, d: u64, cfg: &ScaleConfig) -> Vec<Vec<u64>> {
    let units: Vec<u64> = (0..n).filter(|&x| ogcd(x, n) == 1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (n << 8) ^ d);
    (0..cfg.lemma_sets).map(|_| units.iter().copied().filter(|_| rng.random_bool(0.5)).collect()).collect()
}

pub fn generate_table(kind: OracleKind, cfg: &ScaleConfig) -> Result<OracleTable> {
    cfg.validate()?;
    let mut rows: Vec<(Vec<u64>, String)> = Vec::new();
    let params;
    match kind {
        OracleKind::PhiRelative => {
            params = format!(
                "max_n={} all_ell_max_n={} ells_per_n={}",
                cfg.phi_max_n, cfg.phi_all_ell_max_n, cfg.phi_ells_per_n
            );
            for n in 1..=cfg.phi_max_n {
                let prefix = coprime_prefix_counts(n);
                for ell in phi_ells(n, cfg) {
                    rows.push((vec![n, ell], prefix[ell as usize].to_string()));
                }
            }
        }
        OracleKind::CoverageCount => {
            params = format!("max_n={}", cfg.coverage_max_n);
            for n in 1..=cfg.coverage_max_n {
                let table = coverage_table(n);
                for (ell, row) in table.iter().enumerate() {
                    for (y, &v) in row.iter().enumerate() {
                        rows.push((vec![n, ell as u64, y as u64], v.to_string()));
                    }
                }
            }
        }
        OracleKind::LemmaTau => {
            params = format!(
                "max_n={} max_d={} sets={} seed={}",
                cfg.lemma_max_n, cfg.lemma_max_d, cfg.lemma_sets, cfg.seed
            );
            for n in 1..=cfg.lemma_max_n {
                for d in 1..=cfg.lemma_max_d {
                    for b in lemma_sets(n, d, cfg) {
                        for y in (0..n).filter(|&y| ogcd(y, n) == 1) {
                            let mut input = vec![n, d, y];
                            input.extend(&b);
                            rows.push((input, lemma_tau_enumerate(n, d, y, &b).to_string()));
                        }
                    }
                }
            }
        }
        OracleKind::DivisorCover => {
            params = format!("max_n={}", cfg.divisor_max_n);
            for n in 1..=cfg.divisor_max_n {
                let divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
                for &s in &divs {
                    for &m in &divs {
                        let v = divisor_cover_enumerate(n, s, m) as u8;
                        rows.push((vec![n, s, m], v.to_string()));
                    }
                }
            }
        }
        OracleKind::MinCover => {
            params = format!("max_n={}", cfg.min_cover_max_n);
            for n in 2..=cfg.min_cover_max_n {
                for ell in 1..n {
                    let m = min_cover_bruteforce_with(n, ell, cfg.min_cover_time_box)?;
                    let v = if m.exact { m.upper.to_string() } else { format!("[{},{}]", m.lower, m.upper) };
                    rows.push((vec![n, ell], v));
                }
            }
        }
    }
    Ok(OracleTable { kind, version: ORACLE_VERSION.to_string(), params, rows })
}

/// Writes one `<kind>.tsv` file per oracle into `dir`; returns the paths.
pub fn generate_tables(cfg: &ScaleConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for kind in OracleKind::ALL {
        let table = generate_table(kind, cfg)?;
        let path = dir.join(format!("{}.tsv", kind.name()));
        fs::write(&path, table.to_text())?;
        paths.push(path);
    }
    Ok(paths)
}
