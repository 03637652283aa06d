//! Exact minimum ℓ-covering for `n ≤ 40` by branch and bound over 64-bit masks.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub const MIN_COVER_CAP: u64 = 40;

const DEFAULT_TIME_BOX: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinCover {
    pub n: u64,
    pub ell: u64,
    pub lower: u64,
    pub upper: u64,
    /// A covering of size `upper`.
    pub cover: Vec<u64>,
    /// False when the time box ran out before optimality was proved.
    pub exact: bool,
}

impl MinCover {
    pub fn size(&self) -> Option<u64> {
        self.exact.then_some(self.upper)
    }
}

pub fn min_cover_bruteforce(n: u64, ell: u64) -> Result<MinCover> {
    min_cover_bruteforce_with(n, ell, DEFAULT_TIME_BOX)
}

pub fn min_cover_bruteforce_with(n: u64, ell: u64, time_box: Duration) -> Result<MinCover> {
    if n > MIN_COVER_CAP {
        return Err(Error::CapExceeded { what: "n", value: n, cap: MIN_COVER_CAP });
    }
    if n < 2 || ell == 0 || ell >= n {
        return Err(invalid(format!("need n >= 2 and 1 <= ell < n (n = {n}, ell = {ell})")));
    }
    // every segment contains 0, so only 1..n matter
    let universe: u64 = ((1u64 << n) - 1) & !1;
    let mut sets: Vec<(u64, u64)> = Vec::new();
    for x in 1..n {
        let mut mask = 0u64;
        let mut acc = 0;
        for _ in 0..ell {
            acc = (acc + x) % n;
            if acc == 0 {
                break;
            }
            mask |= 1 << acc;
        }
        if !sets.iter().any(|&(m, _)| m == mask) {
            sets.push((mask, x));
        }
    }
    let dominated = |i: usize| {
        let a = sets[i].0;
        sets.iter().enumerate().any(|(j, &(b, _))| j != i && a & b == a && a != b)
    };
    let keep: Vec<usize> = (0..sets.len()).filter(|&i| !dominated(i)).collect();
    let sets: Vec<(u64, u64)> = keep.into_iter().map(|i| sets[i]).collect();

    let mut containing = [0u64; 64];
    for (i, &(m, _)) in sets.iter().enumerate() {
        for (e, slot) in containing.iter_mut().enumerate().take(n as usize) {
            if m >> e & 1 == 1 {
                *slot |= 1 << i;
            }
        }
    }

    let greedy = greedy_masks(&sets, universe);
    let mut search = Search {
        sets: &sets,
        containing,
        best: greedy.clone(),
        stack: Vec::new(),
        deadline: Instant::now() + time_box,
        nodes: 0,
        timed_out: false,
    };
    let root_lower = search.lower_bound(universe) as u64;
    search.branch(universe);
    let cover: Vec<u64> = {
        let mut c: Vec<u64> = search.best.iter().map(|&i| sets[i].1).collect();
        c.sort_unstable();
        c
    };
    let upper = cover.len() as u64;
    let exact = !search.timed_out;
    Ok(MinCover { n, ell, lower: if exact { upper } else { root_lower.min(upper) }, upper, cover, exact })
}

fn greedy_masks(sets: &[(u64, u64)], universe: u64) -> Vec<usize> {
    let mut left = universe;
    let mut out = Vec::new();
    while left != 0 {
        let (i, _) = sets
            .iter()
            .enumerate()
            .max_by_key(|&(i, &(m, _))| ((m & left).count_ones(), std::cmp::Reverse(i)))
            .expect("nonempty set family");
        out.push(i);
        left &= !sets[i].0;
    }
    out
}

struct Search<'a> {
    sets: &'a [(u64, u64)],
    containing: [u64; 64],
    best: Vec<usize>,
    stack: Vec<usize>,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_> {
    fn lower_bound(&self, left: u64) -> usize {
        let size = left.count_ones() as usize;
        let widest =
            self.sets.iter().map(|&(m, _)| (m & left).count_ones() as usize).max().unwrap_or(1).max(1);
        let by_size = size.div_ceil(widest);
        // elements with pairwise disjoint candidate lists each need their own set
        let mut elems: Vec<usize> = bits(left).collect();
        elems.sort_by_key(|&e| self.containing[e].count_ones());
        let mut used = 0u64;
        let mut packing = 0;
        for e in elems {
            if self.containing[e] & used == 0 {
                used |= self.containing[e];
                packing += 1;
            }
        }
        by_size.max(packing)
    }

    fn branch(&mut self, left: u64) {
        if left == 0 {
            if self.stack.len() < self.best.len() {
                self.best = self.stack.clone();
            }
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && Instant::now() > self.deadline {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if self.stack.len() + self.lower_bound(left) >= self.best.len() {
            return;
        }
        let e = bits(left).min_by_key(|&e| self.containing[e].count_ones()).expect("left is nonempty");
        let mut options: Vec<usize> = bits(self.containing[e]).collect();
        options.sort_by_key(|&i| std::cmp::Reverse((self.sets[i].0 & left).count_ones()));
        for i in options {
            self.stack.push(i);
            self.branch(left & !self.sets[i].0);
            self.stack.pop();
        }
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}
