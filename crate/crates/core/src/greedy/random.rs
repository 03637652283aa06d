use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{engine, mark_segment, GreedyEngine, GreedySelection, SelectionStats, SubproblemInstance};
use crate::bitmap::Bitmap;
use crate::error::{invalid, Result};
use crate::numtheory::{clamped_ln, gcd};

/// Default number of fresh draws after the first before falling back to greedy.
pub const DEFAULT_RETRY_CAP: u32 = 3;

/// Monte Carlo cover: `⌈rounds_factor·ln n'⌉` rounds, each drawing `⌈φ(n')/b_lower⌉`
/// distinct unit slopes. An incomplete draw is repeated with a fresh stream up
/// to [`DEFAULT_RETRY_CAP`] times; after that the greedy covers the residue.
pub fn randomized_cover(
    inst: &SubproblemInstance,
    b_lower: u64,
    rounds_factor: f64,
    seed: u64,
) -> Result<GreedySelection> {
    randomized_cover_with(inst, b_lower, rounds_factor, seed, DEFAULT_RETRY_CAP)
}

pub fn randomized_cover_with(
    inst: &SubproblemInstance,
    b_lower: u64,
    rounds_factor: f64,
    seed: u64,
    retry_cap: u32,
) -> Result<GreedySelection> {
    if b_lower == 0 {
        return Err(invalid("b_lower must be at least 1"));
    }
    if !(rounds_factor > 0.0 && rounds_factor.is_finite()) {
        return Err(invalid(format!("rounds_factor must be positive, got {rounds_factor}")));
    }
    let n = inst.n();
    let ell = inst.effective_ell();
    let universe = inst.universe();
    let mut stats = SelectionStats::default();
    if universe.none() {
        return Ok(GreedySelection {
            chosen_slopes: Vec::new(),
            covered: universe.clone(),
            gains: Vec::new(),
            stats,
        });
    }
    let units: Vec<u64> = (0..n).filter(|&x| gcd(x, n) == 1).collect();
    let t = units.len() as u64;
    let per_round = t.div_ceil(b_lower).min(t) as usize;
    let rounds = ((rounds_factor * clamped_ln(n as f64)).ceil() as u64).max(1);

    let mut chosen = Bitmap::new(n as usize);
    let mut covered = Bitmap::new(n as usize);
    for attempt in 0..=retry_cap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        chosen = Bitmap::new(n as usize);
        covered = Bitmap::new(n as usize);
        for _ in 0..rounds {
            for i in index::sample(&mut rng, units.len(), per_round) {
                let x = units[i];
                if chosen.insert(x as usize) {
                    mark_segment(&mut covered, n, x, ell);
                }
            }
            stats.random_samples += per_round as u64;
        }
        stats.random_rounds += rounds;
        stats.retries = attempt;
        if universe.is_subset(&covered) {
            return Ok(GreedySelection {
                chosen_slopes: chosen.iter_ones().map(|x| x as u64).collect(),
                covered: universe.clone(),
                gains: Vec::new(),
                stats,
            });
        }
    }

    let mut residual = universe.clone();
    residual.difference_with(&covered);
    let rest = SubproblemInstance::new(inst.modulus().clone(), inst.ell(), residual)?;
    let patch = engine::run(&rest, GreedyEngine::Auto)?;
    for &x in &patch.chosen_slopes {
        chosen.insert(x as usize);
    }
    stats.fell_back = true;
    stats.spectral_picks = patch.stats.spectral_picks;
    stats.incremental_picks = patch.stats.incremental_picks;
    Ok(GreedySelection {
        chosen_slopes: chosen.iter_ones().map(|x| x as u64).collect(),
        covered: universe.clone(),
        gains: Vec::new(),
        stats,
    })
}
