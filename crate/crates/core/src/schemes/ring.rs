use rand::Rng;
use serde::{Deserialize, Serialize};

use super::binary_noise_radius;
use super::ske::{check_bit, check_chi, decode_bit};
use crate::error::{Error, Result};
use crate::zq::{negacyclic_constant_term, sub_mod, ErrorDistribution, RingPoly};

/// `sk = s`, `pk = (a, c = a·s + e)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingLweKeyPair {
    pub s: RingPoly,
    pub a: RingPoly,
    pub c: RingPoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingLweCiphertext {
    pub u: RingPoly,
    pub v: RingPoly,
}

/// Largest `η ≤ max(1, ⌊q/16⌋)` with `2nη² + η` inside the decryption radius.
pub fn ringlwe_default_eta(q: u64, n: usize) -> u64 {
    let cap = (q / 16).max(1);
    let radius = binary_noise_radius(q);
    (0..=cap).rev().find(|&eta| 2 * n as u64 * eta * eta + eta <= radius).unwrap_or(0)
}

pub fn ringlwe_keygen<R: Rng + ?Sized>(
    q: u64,
    n: usize,
    chi: &ErrorDistribution,
    rng: &mut R,
) -> Result<RingLweKeyPair> {
    check_chi(chi, q)?;
    let a = RingPoly::random(n, q, rng)?;
    let s = chi.sample_poly(n, rng)?;
    let e = chi.sample_poly(n, rng)?;
    let c = a.mul(&s)?.add(&e)?;
    Ok(RingLweKeyPair { s, a, c })
}

/// `u = a·r + e₁`, `v = c·r + e₂ + bit·⌊q/2⌋`.
pub fn ringlwe_encrypt<R: Rng + ?Sized>(
    kp: &RingLweKeyPair,
    bit: u8,
    chi: &ErrorDistribution,
    rng: &mut R,
) -> Result<RingLweCiphertext> {
    check_bit(bit)?;
    let (q, n) = (kp.a.modulus(), kp.a.degree_bound());
    check_chi(chi, q)?;
    let r = chi.sample_poly(n, rng)?;
    let e1 = chi.sample_poly(n, rng)?;
    let e2 = chi.sample_poly(n, rng)?;
    let u = kp.a.mul(&r)?.add(&e1)?;
    let m = RingPoly::constant(bit as u64 * (q / 2), n, q)?;
    let v = kp.c.mul(&r)?.add(&e2)?.add(&m)?;
    Ok(RingLweCiphertext { u, v })
}

/// Rounds the constant term of `v − u·s`.
pub fn ringlwe_decrypt(s: &RingPoly, ct: &RingLweCiphertext) -> Result<u8> {
    let (q, n) = (s.modulus(), s.degree_bound());
    for p in [&ct.u, &ct.v] {
        if p.modulus() != q || p.degree_bound() != n {
            return Err(Error::shape("ciphertext does not match the key"));
        }
    }
    Ok(ringlwe_decrypt_raw(s.coeffs(), ct.u.coeffs(), ct.v.constant_term(), q))
}

/// Decryption only reads `v₀`, the constant coefficient of `v`.
#[inline]
pub(crate) fn ringlwe_decrypt_raw(s: &[u64], u: &[u64], v0: u64, q: u64) -> u8 {
    decode_bit(sub_mod(v0, negacyclic_constant_term(u, s, q), q), q)
}
