//! Set cover of residue sets by unit-slope segments of `Z_{n'}`.
//!
//! [`greedy_cover`] is the exact greedy (max marginal gain, smallest slope on
//! ties). Gains are kept either by incidence decrement or, while the
//! remaining incidence count is large, recomputed each round as a
//! correlation over the unit groups of the residue classes. Both engines
//! produce the same selection.
//!
//! [`randomized_cover`] samples slopes in rounds and falls back to the greedy
//! on whatever is left uncovered.

mod engine;
mod group;
mod random;

use serde::Serialize;

use crate::bitmap::Bitmap;
use crate::error::{invalid, Error, Result};
use crate::numtheory::{gcd, Factorization};

pub use engine::GreedyEngine;
pub use random::{randomized_cover, randomized_cover_with, DEFAULT_RETRY_CAP};

/// Largest modulus the engines accept.
pub const SUBPROBLEM_CAP: u64 = 1 << 31;

/// Residues of `Z_{n'}` to be covered by segments `{x·a : 0 ≤ a ≤ ℓ}` with
/// `x ∈ Z*_{n'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemInstance {
    modulus: Factorization,
    ell: u64,
    universe: Bitmap,
}

impl SubproblemInstance {
    pub fn new(modulus: Factorization, ell: u64, universe: Bitmap) -> Result<Self> {
        let n = modulus.n();
        if n > SUBPROBLEM_CAP {
            return Err(Error::CapExceeded { what: "subproblem modulus", value: n, cap: SUBPROBLEM_CAP });
        }
        if universe.len() as u64 != n {
            return Err(invalid(format!("universe has length {} but the modulus is {n}", universe.len())));
        }
        if ell == 0 && universe.iter_ones().any(|y| y != 0) {
            return Err(invalid("a nonzero residue cannot be covered with ell = 0"));
        }
        Ok(SubproblemInstance { modulus, ell, universe })
    }

    /// Universe `{y ∈ [1, n') : gcd(y, n') ≤ s}`. Residue 0 is left out since
    /// every segment contains it.
    pub fn divisor_classes(modulus: Factorization, ell: u64, s: f64) -> Result<Self> {
        let n = modulus.n();
        if n > SUBPROBLEM_CAP {
            return Err(Error::CapExceeded { what: "subproblem modulus", value: n, cap: SUBPROBLEM_CAP });
        }
        let mut universe = Bitmap::new(n as usize);
        for y in 1..n {
            if gcd(y, n) as f64 <= s {
                universe.insert(y as usize);
            }
        }
        SubproblemInstance::new(modulus, ell, universe)
    }

    pub fn modulus(&self) -> &Factorization {
        &self.modulus
    }

    pub fn n(&self) -> u64 {
        self.modulus.n()
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// `ℓ` capped at `n' − 1`; longer segments repeat.
    pub fn effective_ell(&self) -> u64 {
        self.ell.min(self.n().saturating_sub(1))
    }

    pub fn universe(&self) -> &Bitmap {
        &self.universe
    }

    /// Smallest number of unit slopes covering any universe element, from the
    /// exact coverage formula. `None` for an empty universe.
    pub fn min_multiplicity(&self) -> Result<Option<u64>> {
        let n = self.n();
        let ell = self.effective_ell();
        let mut classes: Vec<u64> = self.universe.iter_ones().map(|y| gcd(y as u64, n)).collect();
        classes.sort_unstable();
        classes.dedup();
        let mut best: Option<u64> = None;
        for d in classes {
            let y = d % n;
            let c = crate::segments::coverage_count_factored(&self.modulus, ell, y)?;
            best = Some(best.map_or(c, |b| b.min(c)));
        }
        Ok(best)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SelectionStats {
    /// Picks made while gains came from the correlation engine.
    pub spectral_picks: u64,
    /// Picks made while gains were kept by incidence decrement.
    pub incremental_picks: u64,
    pub random_rounds: u64,
    pub random_samples: u64,
    pub retries: u32,
    pub fell_back: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedySelection {
    /// Slopes of `Z*_{n'}` in the order they were picked.
    pub chosen_slopes: Vec<u64>,
    /// Universe elements covered by the chosen segments.
    pub covered: Bitmap,
    /// Marginal gain of each pick; empty for sampled selections.
    pub gains: Vec<u64>,
    pub stats: SelectionStats,
}

/// Exact greedy cover of the instance universe.
pub fn greedy_cover(inst: &SubproblemInstance) -> Result<GreedySelection> {
    engine::run(inst, GreedyEngine::Auto)
}

/// [`greedy_cover`] with an explicit gain engine.
pub fn greedy_cover_with(inst: &SubproblemInstance, engine: GreedyEngine) -> Result<GreedySelection> {
    engine::run(inst, engine)
}

/// Marks `{x·a mod n : 0 ≤ a ≤ ell}` into `bits`, stopping when the multiples wrap to 0.
pub(crate) fn mark_segment(bits: &mut Bitmap, n: u64, x: u64, ell: u64) {
    let mut acc = 0u64;
    bits.insert(0);
    for _ in 0..ell {
        acc += x;
        if acc >= n {
            acc -= n;
        }
        if acc == 0 {
            break;
        }
        bits.insert(acc as usize);
    }
}
