//! Trimmed split conformal prediction under calibration contamination.
//!
//! Calibration data drawn from a Huber mixture `(1-eps) P + eps Q` are
//! filtered by an anomaly score `S` at a fixed threshold, and ordinary split
//! conformal prediction is applied to the retained subset. Trimming acts by
//! conditioning, not purification: the retained calibration points are i.i.d.
//! from the retained law `R = P*(. | S <= t)`, so clean-target coverage is a
//! one-dimensional score-CDF transfer problem from `R` back to `P`.
//!
//! The crate provides:
//!
//! - [`numkernel`]: deterministic special-function and concentration
//!   primitives (regularised incomplete beta, binomial weights,
//!   Clopper-Pearson inversion, DKW radii).
//! - [`scorelaw`]: one-dimensional score laws (CDF / generalised quantile /
//!   sampling), contamination scenes, retained-law profiles, and sup-CDF
//!   gap evaluation.
//! - [`conformal`]: the fixed-threshold trimmed split conformal procedure
//!   and empirical coverage evaluation.
//! - [`diagnostics`]: the exact finite-sample coverage identity, the scalar
//!   finite-sample lower bound and its closed form, covariance identities
//!   for the clean trimming distortion, and upper-coverage diagnostics.
//! - [`certify`]: finite-sample certificate templates (componentwise
//!   interface, binomial and KS audit inversion, selection-aware grid
//!   bounds, concentration records, tuning oracle, marginalisation).
//! - [`anomaly`]: anomaly-score constructions (Stein score-norm,
//!   Mahalanobis) and threshold policies.
//! - [`harness`]: synthetic scene generators, a seeded Monte Carlo
//!   experiment runner, and table emitters.
//!
//! Every stochastic entry point takes an explicit 64-bit seed; identical
//! inputs produce bit-identical results across runs and thread counts.

pub mod anomaly;
pub mod certify;
pub mod conformal;
pub mod diagnostics;
pub mod harness;
pub mod numkernel;
pub mod scorelaw;


/// Derive a child seed from a base seed and a stream index.
///
/// Splitmix64 finalisation over the pair; used everywhere a parallel or
/// per-replication RNG stream is needed so that replication `i` is
/// independent of the thread that runs it.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
