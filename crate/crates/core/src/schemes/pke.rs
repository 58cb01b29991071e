use rand::Rng;
use serde::{Deserialize, Serialize};

use super::binary_noise_radius;
use super::ske::{binary_decrypt_raw, check_bit, check_chi, LweCiphertext};
use crate::error::{Error, Result};
use crate::zq::{add_mod, dot_mod, sample_hamming_vector, ErrorDistribution, ZqMatrix, ZqVector};

/// `pk = (A, t = A·sk + e)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PkePublicKey {
    pub a: ZqMatrix,
    pub t: ZqVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PkeKeyPair {
    pub sk: ZqVector,
    pub pk: PkePublicKey,
}

/// `m = 2·n·⌈log₂ q⌉`.
pub fn pke_default_m(q: u64, n: usize) -> usize {
    2 * n * (u64::BITS - (q - 1).leading_zeros()) as usize
}

/// Largest `η ≤ max(1, ⌊q/16⌋)` with `⌊m/2⌋·η` inside the decryption radius.
pub fn pke_default_eta(q: u64, m: usize) -> u64 {
    let weight = (m / 2).max(1) as u64;
    (q / 16).max(1).min(binary_noise_radius(q) / weight)
}

pub fn pke_keygen<R: Rng + ?Sized>(
    q: u64,
    n: usize,
    m: usize,
    chi: &ErrorDistribution,
    rng: &mut R,
) -> Result<PkeKeyPair> {
    check_chi(chi, q)?;
    if n == 0 || m < n {
        return Err(Error::param(format!("need m ≥ n ≥ 1, got n={n}, m={m}")));
    }
    let sk = ZqVector::random(n, q, rng)?;
    let a = ZqMatrix::random(m, n, q, rng)?;
    let e = chi.sample_vector(m, rng);
    let t = a.mul_vec(&sk)?.add(&e)?;
    Ok(PkeKeyPair { sk, pk: PkePublicKey { a, t } })
}

/// `(vᵀA, vᵀt + bit·⌊q/2⌋)` for a random `v` of weight `⌊m/2⌋`.
pub fn pke_encrypt<R: Rng + ?Sized>(pk: &PkePublicKey, bit: u8, rng: &mut R) -> Result<LweCiphertext> {
    check_bit(bit)?;
    let q = pk.a.modulus();
    let v = sample_hamming_vector(pk.a.rows(), rng);
    let a = pk.a.left_mul_vec(&v)?;
    let c = add_mod(dot_mod(&v, pk.t.entries(), q), bit as u64 * (q / 2), q);
    Ok(LweCiphertext { a, c })
}

pub fn pke_decrypt(sk: &ZqVector, ct: &LweCiphertext) -> Result<u8> {
    if ct.a.modulus() != sk.modulus() || ct.a.len() != sk.len() {
        return Err(Error::shape("ciphertext does not match the key"));
    }
    Ok(binary_decrypt_raw(sk.entries(), ct.a.entries(), ct.c, sk.modulus()))
}
