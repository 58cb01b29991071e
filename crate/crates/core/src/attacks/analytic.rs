//! Exact success probabilities: direct enumeration of the measurement
//! amplitude, the closed form over block sums, and the one-dimensional
//! reductions used by the scheme attacks.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lrf::{lrf_eval_raw, LrfKey, LrfParams};
use crate::schemes::decode_bit;
use crate::zq::{dot_mod, neg_mod, totient, ErrorDistribution};

/// Largest domain `q^n` the brute-force routines will enumerate.
pub const MAX_ENUMERATION: u128 = 1_000_000;

fn root(k: u64, m: u64, sign: f64) -> Complex64 {
    Complex64::from_polar(1.0, sign * 2.0 * PI * (k % m) as f64 / m as f64)
}

fn check_enumeration(q: u64, n: usize) -> Result<u128> {
    let size = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge(size));
    }
    Ok(size)
}

/// `|(1/qⁿ) Σ_x ω_c^{−f(x)} ω_q^{⟨x,y⟩}|²`: the probability that one
/// kickback query to `f` followed by the QFT on every register measures `y`.
pub fn brute_force_success_fn<F>(q: u64, n: usize, c: u64, mut f: F, y: &[u64]) -> Result<f64>
where
    F: FnMut(&[u64]) -> u64,
{
    let size = check_enumeration(q, n)?;
    if y.len() != n {
        return Err(Error::shape(format!("outcome of length {} for dimension {n}", y.len())));
    }
    let wc: Vec<Complex64> = (0..c).map(|v| root(v, c, -1.0)).collect();
    let wq: Vec<Complex64> = (0..q).map(|t| root(t, q, 1.0)).collect();
    let mut x = vec![0u64; n];
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..size {
        sum += wc[(f(&x) % c) as usize] * wq[dot_mod(&x, y, q) as usize];
        for xi in x.iter_mut().rev() {
            *xi += 1;
            if *xi < q {
                break;
            }
            *xi = 0;
        }
    }
    Ok((sum / size as f64).norm_sqr())
}

/// Probability that the rounding-function attack outputs exactly `key`,
/// by enumerating `Z_q^n`.
pub fn brute_force_success(q: u64, n: usize, params: &LrfParams, key: &LrfKey) -> Result<f64> {
    if params.q() != q || params.n() != n || key.0.modulus() != q || key.0.len() != n {
        return Err(Error::shape("parameters, key and (q, n) disagree"));
    }
    let k = key.entries();
    brute_force_success_fn(q, n, params.block_count(), |x| lrf_eval_raw(x, k, params), k)
}

/// `|(1/q) Σ_v ω_c^{−v} ω_q^{vb} T_v|²` with `T_v = Σ_{z<L_v} ω_q^z` and
/// `L_v` the size of block `v`. Valid for every key with a unit entry and
/// every offset.
pub fn exact_success_probability(q: u64, b: u64) -> Result<f64> {
    let p = LrfParams::new(q, 1, 0, b)?;
    let c = p.block_count();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut partial = Complex64::new(0.0, 0.0);
    let mut len = 0;
    for v in 0..c {
        // block lengths only shrink at the last block, so T_v is a prefix sum
        let target = p.block_len(v);
        if target != len {
            partial = (0..target).map(|z| root(z, q, 1.0)).sum();
            len = target;
        }
        sum += root(v, c, -1.0) * root(v * b % q, q, 1.0) * partial;
    }
    Ok((sum / q as f64).norm_sqr())
}

/// Success probability of the binary-decryption attacks (symmetric,
/// public-key and ring variants): `|(1/q) Σ_z (−1)^{Dec(z)} ω_q^z|²`.
pub fn binary_decryption_success_probability(q: u64) -> f64 {
    let sum: Complex64 = (0..q).map(|z| if decode_bit(z, q) == 0 { root(z, q, 1.0) } else { -root(z, q, 1.0) }).sum();
    (sum / q as f64).norm_sqr()
}

/// Per-column success of the matrix-scheme attack for secret column `s`:
/// the kickback phase is `Trunc(−⟨x, s⟩)` and the transform is the inverse
/// QFT, so the amplitude at `s` pairs with `ω_q^{⟨x, −s⟩}`.
pub fn frodo_column_success_probability(q: u64, b_bits: u32, s: &[u64]) -> Result<f64> {
    if !q.is_power_of_two() || b_bits == 0 || (1u64 << b_bits) > q {
        return Err(Error::param(format!("need q = 2^D with 1 ≤ B ≤ D, got q={q}, B={b_bits}")));
    }
    let shift = q.trailing_zeros() - b_bits;
    let neg: Vec<u64> = s.iter().map(|&v| neg_mod(v % q, q)).collect();
    brute_force_success_fn(q, s.len(), 1 << b_bits, |x| neg_mod(dot_mod(x, s, q), q) >> shift, &neg)
}

/// Expected success of the randomness-access attack when every branch `a`
/// draws its own error `e_a ← χ`: `|μ|² + (1 − |μ|²)/qⁿ` with
/// `μ = E[ω_q^{−e}]`.
pub fn ra_iid_expected_success(q: u64, n: usize, chi: &ErrorDistribution) -> f64 {
    let eta = chi.eta as i64;
    let mu: Complex64 = (-eta..=eta).map(|e| root(crate::zq::reduce(-e, q), q, 1.0) * chi.probability(e)).sum();
    let m2 = mu.norm_sqr();
    m2 + (1.0 - m2) / (q as f64).powi(n as i32)
}

/// The guaranteed floor `φ(q)/(24ηq)` for the i.i.d.-error attack.
pub fn ra_iid_bound(q: u64, eta: u64) -> Result<f64> {
    if eta == 0 {
        return Err(Error::param("the bound needs η ≥ 1"));
    }
    Ok(totient(q) as f64 / (24 * eta * q) as f64)
}
