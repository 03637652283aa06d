//! Constructions and checks for ℓ-covering sets of the ring `Z_n`.
//!
//! A set `B ⊆ Z_n` is an ℓ-covering if every residue can be written as
//! `a·b mod n` with `0 ≤ a ≤ ℓ` and `b ∈ B`.  The crate provides:
//!
//! * [`numtheory`]: factorization, divisors, totients and the relative totient `φ(n, ℓ)`;
//! * [`segments`]: segment algebra and exact coverage-multiplicity formulas;
//! * [`divisor_cover`]: the divisor semigroup `(D_n, ⊙)` and its covering bases;
//! * [`greedy`]: the exact greedy and Monte Carlo set-cover engines for unit-slope segments;
//! * [`cover`]: the end-to-end construction, verification, lower-bound family and an exact oracle;
//! * [`oracle`]: brute-force ground-truth tables;
//! * [`bench`]: grid expansion and CSV records for benchmark runs.

pub mod bench;
pub mod bitmap;
pub mod cover;
pub mod divisor_cover;
mod error;
pub mod greedy;
pub mod numtheory;
pub mod oracle;
pub mod segments;

pub use bitmap::Bitmap;
pub use cover::{
    construct, lower_bound_instance, min_cover_bruteforce, select_basis, threshold_s, verify_cover,
    BasisChoice, ConstructConfig, CoveringSet, LowerBoundInstance, Method, MinCover, Mode, Verification,
};
pub use divisor_cover::{
    basis_above_threshold, basis_divisor_lattice, check_divisor_cover, large_divisor_linear_sigma, odot,
    BasisKind, DivisorBasis,
};
pub use error::{Error, Result};
pub use greedy::{greedy_cover, randomized_cover, GreedyEngine, GreedySelection, SubproblemInstance};
pub use numtheory::{
    arith_profile, divisors, factorize, phi_lower_estimate, phi_relative, primes_up_to, ArithProfile,
    Factorization,
};
pub use segments::{
    coverage_count, coverage_count_bruteforce, lemma_tau_count, segment_elements, ResidueClass, Segment,
};
