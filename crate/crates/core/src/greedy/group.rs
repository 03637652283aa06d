//! The unit group `Z*_N` as a product of cyclic groups, with an indexed
//! element table and a multi-dimensional FFT over it.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::numtheory::{inv_mod, mul_mod, pow_mod, Factorization};

pub(crate) const NOT_A_UNIT: u32 = u32::MAX;

/// Primitive root modulo an odd prime power `p^e`.
fn primitive_root(p: u64, e: u32) -> u64 {
    let phi_p = p - 1;
    let mut qs = Vec::new();
    let mut m = phi_p;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            qs.push(q);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        qs.push(m);
    }
    let g = (2..p).find(|&g| qs.iter().all(|&q| pow_mod(g, phi_p / q, p) != 1)).unwrap_or(1);
    if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

pub(crate) struct UnitGroup {
    /// Cyclic factor orders, outermost first; the last one varies fastest.
    pub dims: Vec<usize>,
    pub elements: Vec<u32>,
    pub index_of: Vec<u32>,
}

impl UnitGroup {
    pub fn new(f: &Factorization) -> UnitGroup {
        let n = f.n();
        // (generator lifted to Z_N via CRT, order)
        let mut gens: Vec<(u64, usize)> = Vec::new();
        for &(p, e) in f.factors() {
            let pe = p.pow(e);
            let rest = n / pe;
            let lift = |g: u64| -> u64 {
                // x ≡ g (mod p^e), x ≡ 1 (mod rest)
                let t = mul_mod((g + pe - 1) % pe, inv_mod(rest % pe, pe).unwrap_or(0), pe);
                (1 + (rest as u128 * t as u128 % n as u128) as u64) % n.max(1)
            };
            if p == 2 {
                if e >= 2 {
                    gens.push((lift(pe - 1), 2));
                }
                if e >= 3 {
                    gens.push((lift(5), 1 << (e - 2)));
                }
            } else {
                gens.push((lift(primitive_root(p, e)), (pe / p * (p - 1)) as usize));
            }
        }
        let mut elements: Vec<u32> = vec![(1 % n.max(1)) as u32];
        for &(g, ord) in &gens {
            let mut next = Vec::with_capacity(elements.len() * ord);
            for &e in &elements {
                let mut x = e as u64;
                for _ in 0..ord {
                    next.push(x as u32);
                    x = mul_mod(x, g, n);
                }
            }
            elements = next;
        }
        let mut index_of = vec![NOT_A_UNIT; n as usize];
        for (i, &e) in elements.iter().enumerate() {
            debug_assert_eq!(index_of[e as usize], NOT_A_UNIT);
            index_of[e as usize] = i as u32;
        }
        UnitGroup { dims: gens.iter().map(|&(_, o)| o).filter(|&o| o > 1).collect(), elements, index_of }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// FFT over `Z_{d1} × … × Z_{dk}` laid out row-major.
pub(crate) struct NdFft {
    dims: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    total: usize,
    line_buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl NdFft {
    pub fn new(dims: &[usize], planner: &mut FftPlanner<f64>) -> NdFft {
        let total = dims.iter().product::<usize>().max(1);
        let forward: Vec<_> = dims.iter().map(|&d| planner.plan_fft_forward(d)).collect();
        let inverse: Vec<_> = dims.iter().map(|&d| planner.plan_fft_inverse(d)).collect();
        let scratch_len =
            forward.iter().chain(&inverse).map(|p| p.get_inplace_scratch_len()).max().unwrap_or(0);
        NdFft {
            dims: dims.to_vec(),
            forward,
            inverse,
            total,
            line_buf: Vec::new(),
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.run(buf, false)
    }

    /// Unnormalized inverse.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.run(buf, true)
    }

    fn run(&mut self, buf: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(buf.len(), self.total);
        let mut stride = self.total;
        for axis in 0..self.dims.len() {
            let size = self.dims[axis];
            stride /= size;
            let plan = if inverse { &self.inverse[axis] } else { &self.forward[axis] };
            if stride == 1 {
                plan.process_with_scratch(buf, &mut self.scratch);
                continue;
            }
            // gather every line along this axis into contiguous storage
            let block = size * stride;
            self.line_buf.resize(self.total, Complex64::default());
            let lines = &mut self.line_buf;
            let mut li = 0;
            for o in (0..self.total).step_by(block) {
                for i in 0..stride {
                    let base = o + i;
                    for j in 0..size {
                        lines[li + j] = buf[base + j * stride];
                    }
                    li += size;
                }
            }
            plan.process_with_scratch(lines, &mut self.scratch);
            let mut li = 0;
            for o in (0..self.total).step_by(block) {
                for i in 0..stride {
                    let base = o + i;
                    for j in 0..size {
                        buf[base + j * stride] = lines[li + j];
                    }
                    li += size;
                }
            }
        }
    }
}
