//! Exact greedy over unit slopes.
//!
//! Universe elements are grouped by `d = gcd(y, n')`. Writing `y = d·u` with
//! `u ∈ Z*_N`, `N = n'/d`, a slope `x` covers `y` iff `(x mod N)·a ≡ u (mod N)`
//! for some `a` in `A_d = {a ≤ ⌊ℓ/d⌋ : gcd(a, N) = 1}`. Classes where `A_d`
//! is all of `Z*_N` contribute the same gain to every slope and are covered
//! whole by the first pick; they are kept out of the gain tables.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use strength_reduce::StrengthReducedU64;

use super::group::{NdFft, UnitGroup, NOT_A_UNIT};
use super::{GreedySelection, SelectionStats, SubproblemInstance};
use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::numtheory::{gcd, inv_mod};

/// How marginal gains are maintained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyEngine {
    /// Correlation rounds while a single pick would walk more incidences than a
    /// round costs, then incidence decrement.
    Auto,
    /// Incidence decrement throughout.
    Incremental,
    /// Correlation rounds throughout.
    Spectral,
}

// Rough relative costs: walking one (element, slope) incidence against one
// butterfly of a correlation round. A pick covering g elements walks about g
// times the mean multiplicity.
const INCIDENCE_COST: f64 = 8.0;

struct Class {
    d: u64,
    modulus: u64,
    reduced: StrengthReducedU64,
    /// Every prime of `d` divides `N`, so each lift of a unit of `Z_N` is a unit.
    all_lifts_units: bool,
    members: Vec<u32>,
    remaining: usize,
    /// φ(N); members ⊆ Z*_N, so the class is complete iff it has this many.
    order: usize,
    constant: bool,
    a: Vec<u32>,
    a_inv: Vec<u32>,
    spectral: Option<SpectralClass>,
}

struct SpectralClass {
    group: UnitGroup,
    fft: NdFft,
    a_hat_conj: Vec<Complex64>,
    buf: Vec<Complex64>,
    gain_by_residue: Vec<u32>,
}

struct State {
    n: u64,
    primes: Vec<u64>,
    classes: Vec<Class>,
    uncovered: Bitmap,
    remaining: usize,
    units: Vec<u32>,
    is_unit: Bitmap,
    gains: Vec<u32>,
}

pub(super) fn run(inst: &SubproblemInstance, engine: GreedyEngine) -> Result<GreedySelection> {
    let mut st = State::new(inst)?;
    let mut chosen = Vec::new();
    let mut gains_log = Vec::new();
    let mut stats = SelectionStats::default();

    let mut spectral = match engine {
        GreedyEngine::Incremental => false,
        GreedyEngine::Spectral => true,
        GreedyEngine::Auto => st.prefer_spectral(None),
    };
    let mut planner = FftPlanner::new();

    if !spectral && st.remaining > 0 {
        st.init_incremental_gains();
    }
    let mut buckets: Vec<BinaryHeap<Reverse<u32>>> = Vec::new();
    let mut top = 0usize;
    if !spectral && st.remaining > 0 {
        (buckets, top) = st.build_buckets();
    }

    while st.remaining > 0 {
        let x = if spectral {
            let switch = engine == GreedyEngine::Auto && !st.prefer_spectral(gains_log.last().copied());
            let x = st.spectral_argmax(&mut planner, switch);
            if switch {
                spectral = false;
                (buckets, top) = st.build_buckets();
                continue;
            }
            stats.spectral_picks += 1;
            x
        } else {
            stats.incremental_picks += 1;
            pop_max(&mut buckets, &mut top, &st.gains)
        };
        let gain = st.cover(x, !spectral);
        if gain == 0 {
            let witness = st.uncovered.first_one().unwrap_or(0) as u64;
            return Err(Error::Uncoverable { witness });
        }
        chosen.push(x as u64);
        gains_log.push(gain as u64);
    }
    Ok(GreedySelection { chosen_slopes: chosen, covered: inst.universe().clone(), gains: gains_log, stats })
}

fn pop_max(buckets: &mut [BinaryHeap<Reverse<u32>>], top: &mut usize, gains: &[u32]) -> u32 {
    loop {
        while buckets[*top].is_empty() {
            *top -= 1;
        }
        let Reverse(x) = buckets[*top].pop().expect("nonempty bucket");
        let g = gains[x as usize] as usize;
        if g == *top {
            return x;
        }
        buckets[g].push(Reverse(x));
    }
}

impl State {
    fn new(inst: &SubproblemInstance) -> Result<State> {
        let n = inst.n();
        let ell = inst.effective_ell();
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut classes: Vec<Class> = Vec::new();
        for y in inst.universe().iter_ones() {
            let y = y as u64;
            let d = gcd(y, n);
            let ci = *index.entry(d).or_insert_with(|| {
                classes.push(Class::new(d, n / d, ell));
                classes.len() - 1
            });
            classes[ci].members.push((y / d) as u32);
        }
        classes.sort_by_key(|c| c.d);
        for c in &mut classes {
            c.remaining = c.members.len();
            if !c.constant && c.a.is_empty() {
                return Err(Error::Uncoverable { witness: c.d * c.members[0] as u64 });
            }
        }
        let primes: Vec<u64> = inst.modulus().primes().collect();
        let mut shared = Bitmap::new(n as usize);
        for &p in &primes {
            for x in (0..n).step_by(p as usize) {
                shared.insert(x as usize);
            }
        }
        let units: Vec<u32> = shared.iter_zeros().map(|x| x as u32).collect();
        let mut is_unit = Bitmap::new(n as usize);
        for &x in &units {
            is_unit.insert(x as usize);
        }
        Ok(State {
            n,
            primes,
            remaining: classes.iter().map(|c| c.remaining).sum(),
            classes,
            uncovered: inst.universe().clone(),
            units,
            is_unit,
            gains: Vec::new(),
        })
    }

    fn active(&self) -> impl Iterator<Item = &Class> {
        self.classes.iter().filter(|c| !c.constant && c.remaining > 0)
    }

    /// Whether the next pick is cheaper as a correlation round. `last_gain` is
    /// the gain of the previous pick, an upper bound on the next one.
    fn prefer_spectral(&self, last_gain: Option<u64>) -> bool {
        let mut incidences = 0f64;
        let mut widest = 0f64;
        // lattice summation and the argmax scan
        let mut round = 2.0 * self.n as f64;
        for c in self.active() {
            incidences += c.remaining as f64 * c.a.len() as f64 * c.d as f64;
            widest += c.a.len() as f64;
            let order = c.order.max(1) as f64;
            round += 4.0 * order * (order.log2() + 1.0);
        }
        if self.remaining == 0 || incidences == 0.0 {
            return false;
        }
        let gain = last_gain.map_or(widest, |g| g as f64);
        let pick = gain * incidences / self.remaining as f64;
        let seed = match last_gain {
            // seeding the table is only needed before the first pick
            None if !self.active().all(|c| c.remaining == c.order) => incidences,
            _ => 0.0,
        };
        INCIDENCE_COST * pick.max(seed) > round
    }

    fn for_each_incident(&self, c: &Class, u: u32, mut f: impl FnMut(u32)) {
        let big_n = c.modulus;
        for &ai in &c.a_inv {
            let xbar = u as u64 * ai as u64 % c.reduced;
            if c.d == 1 {
                f(xbar as u32);
            } else if c.all_lifts_units {
                let mut x = xbar;
                for _ in 0..c.d {
                    f(x as u32);
                    x += big_n;
                }
            } else {
                let mut x = xbar;
                for _ in 0..c.d {
                    if self.is_unit.contains(x as usize) {
                        f(x as u32);
                    }
                    x += big_n;
                }
            }
        }
    }

    fn init_incremental_gains(&mut self) {
        let mut gains = vec![0u32; self.n as usize];
        let complete = self.active().all(|c| c.remaining == c.order);
        if complete {
            let g: u32 = self.active().map(|c| c.a.len() as u32).sum();
            for &x in &self.units {
                gains[x as usize] = g;
            }
        } else {
            for c in self.active() {
                for &u in &c.members {
                    if self.uncovered.contains((c.d * u as u64) as usize) {
                        self.for_each_incident(c, u, |x| gains[x as usize] += 1);
                    }
                }
            }
        }
        self.gains = gains;
    }

    fn build_buckets(&self) -> (Vec<BinaryHeap<Reverse<u32>>>, usize) {
        let top = self.units.iter().map(|&x| self.gains[x as usize]).max().unwrap_or(0) as usize;
        let mut lists: Vec<Vec<Reverse<u32>>> = vec![Vec::new(); top + 1];
        for &x in &self.units {
            lists[self.gains[x as usize] as usize].push(Reverse(x));
        }
        (lists.into_iter().map(BinaryHeap::from).collect(), top)
    }

    /// Marks the segment of slope `x`; returns the number of universe
    /// elements newly covered.
    fn cover(&mut self, x: u32, incremental: bool) -> usize {
        let mut newly = 0;
        for ci in 0..self.classes.len() {
            let c = &self.classes[ci];
            if c.remaining == 0 {
                continue;
            }
            let d = c.d;
            let mut fresh: Vec<u32> = Vec::new();
            if c.constant {
                for &u in &c.members {
                    if self.uncovered.remove((d * u as u64) as usize) {
                        fresh.push(u);
                    }
                }
            } else {
                let xbar = x as u64 % c.reduced;
                for &a in &c.a {
                    let u = (xbar * a as u64 % c.reduced) as u32;
                    if self.uncovered.remove((d * u as u64) as usize) {
                        fresh.push(u);
                    }
                }
            }
            newly += fresh.len();
            let c = &self.classes[ci];
            if incremental && !c.constant {
                let mut gains = std::mem::take(&mut self.gains);
                for &u in &fresh {
                    self.for_each_incident(c, u, |x2| gains[x2 as usize] -= 1);
                }
                self.gains = gains;
            }
            self.classes[ci].remaining -= fresh.len();
        }
        self.remaining -= newly;
        newly
    }

    /// One correlation round: the max-gain slope (smallest on ties). With
    /// `fill`, the full gain table is also written for the incremental engine.
    fn spectral_argmax(&mut self, planner: &mut FftPlanner<f64>, fill: bool) -> u32 {
        let uncovered = &self.uncovered;
        let mut active: Vec<usize> = Vec::new();
        for (ci, c) in self.classes.iter_mut().enumerate() {
            if c.constant || c.remaining == 0 {
                continue;
            }
            active.push(ci);
            if c.spectral.is_none() {
                c.spectral = Some(SpectralClass::new(c, planner));
            }
            let sp = c.spectral.as_mut().expect("just built");
            sp.buf.iter_mut().for_each(|v| *v = Complex64::default());
            for &u in &c.members {
                if uncovered.contains((c.d * u as u64) as usize) {
                    sp.buf[sp.group.index_of[u as usize] as usize] = Complex64::new(1.0, 0.0);
                }
            }
            let SpectralClass { group, fft, a_hat_conj, buf, gain_by_residue } = sp;
            fft.forward(buf);
            for (v, a) in buf.iter_mut().zip(a_hat_conj.iter()) {
                *v *= *a;
            }
            fft.inverse(buf);
            let scale = 1.0 / group.order() as f64;
            for (i, v) in buf.iter().enumerate() {
                let g = v.re * scale;
                let r = g.round();
                debug_assert!((g - r).abs() < 0.25, "correlation lost precision: {g}");
                gain_by_residue[group.elements[i] as usize] = r.max(0.0) as u32;
            }
        }
        let parts = active.iter().map(|&ci| {
            let c = &self.classes[ci];
            (c.modulus, &c.spectral.as_ref().expect("built above").gain_by_residue[..])
        });
        let total = lattice_sum(self.n, &self.primes, parts);
        let mut best = (0u32, self.units[0]);
        for &x in &self.units {
            if total[x as usize] > best.0 {
                best = (total[x as usize], x);
            }
        }
        if fill {
            self.gains = total;
        }
        best.1
    }
}

/// `T(x) = Σ g_j(x mod m_j)` over `Z_n` for divisors `m_j | n`. Each partial
/// sum over `Z_m` is tiled into `Z_{m·p}` for the smallest prime `p` with
/// `m·p | n`, smallest moduli first, so each table is tiled once.
fn lattice_sum<'a>(n: u64, primes: &[u64], parts: impl Iterator<Item = (u64, &'a [u32])>) -> Vec<u32> {
    let mut acc: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (m, g) in parts {
        let v = acc.entry(m).or_insert_with(|| vec![0; m as usize]);
        v.iter_mut().zip(g).for_each(|(a, b)| *a += b);
    }
    while let Some((m, v)) = acc.pop_first() {
        if m == n {
            return v;
        }
        let p =
            primes.iter().copied().find(|&p| (n / m).is_multiple_of(p)).expect("m is a proper divisor of n");
        let parent = acc.entry(m * p).or_insert_with(|| vec![0; (m * p) as usize]);
        for chunk in parent.chunks_mut(m as usize) {
            chunk.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
        }
    }
    vec![0; n as usize]
}

fn totient(modulus: u64) -> usize {
    let mut phi = modulus;
    let mut m = modulus;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            phi = phi / p * (p - 1);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi = phi / m * (m - 1);
    }
    phi as usize
}

impl Class {
    fn new(d: u64, modulus: u64, ell: u64) -> Class {
        let limit = ell / d;
        let constant = modulus == 1 || limit >= modulus - 1;
        let (mut a, mut a_inv) = (Vec::new(), Vec::new());
        if !constant {
            for x in 1..=limit {
                if gcd(x, modulus) == 1 {
                    a.push(x as u32);
                    a_inv.push(inv_mod(x, modulus).expect("unit") as u32);
                }
            }
        }
        Class {
            d,
            modulus,
            reduced: StrengthReducedU64::new(modulus),
            all_lifts_units: crate::numtheory::factorize(d)
                .expect("d is below the cap")
                .primes()
                .all(|p| modulus.is_multiple_of(p)),
            members: Vec::new(),
            remaining: 0,
            order: totient(modulus),
            constant,
            a,
            a_inv,
            spectral: None,
        }
    }
}

impl SpectralClass {
    fn new(c: &Class, planner: &mut FftPlanner<f64>) -> SpectralClass {
        let f = crate::numtheory::factorize(c.modulus).expect("modulus below cap");
        let group = UnitGroup::new(&f);
        let mut fft = NdFft::new(&group.dims, planner);
        let mut a_hat = vec![Complex64::default(); group.order()];
        for &a in &c.a {
            let i = group.index_of[a as usize];
            debug_assert_ne!(i, NOT_A_UNIT);
            a_hat[i as usize] = Complex64::new(1.0, 0.0);
        }
        fft.forward(&mut a_hat);
        let a_hat_conj = a_hat.iter().map(|v| v.conj()).collect();
        SpectralClass {
            buf: vec![Complex64::default(); group.order()],
            gain_by_residue: vec![0; c.modulus as usize],
            group,
            fft,
            a_hat_conj,
        }
    }
}
