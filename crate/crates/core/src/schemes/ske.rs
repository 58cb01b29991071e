use rand::Rng;
use serde::{Deserialize, Serialize};

use super::binary_noise_radius;
use crate::error::{Error, Result};
use crate::zq::{add_mod, centered_abs, check_modulus, dot_mod, sub_mod, ErrorDistribution, ZqVector};

/// Secret key of the symmetric LWE scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeKey {
    pub k: ZqVector,
}

/// `(a, c)` with `c = ⟨a, k⟩ + bit·⌊q/2⌋ + e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LweCiphertext {
    pub a: ZqVector,
    pub c: u64,
}

impl LweCiphertext {
    pub fn new(a: ZqVector, c: u64) -> Result<Self> {
        if c >= a.modulus() {
            return Err(Error::param(format!("ciphertext value {c} not reduced mod {}", a.modulus())));
        }
        Ok(LweCiphertext { a, c })
    }
}

/// Default noise magnitude: the largest `η ≤ max(1, ⌊q/16⌋)` that keeps
/// decryption exact.
pub fn ske_default_eta(q: u64) -> u64 {
    (q / 16).max(1).min(binary_noise_radius(q))
}

pub fn ske_keygen<R: Rng + ?Sized>(q: u64, n: usize, rng: &mut R) -> Result<SkeKey> {
    if n == 0 {
        return Err(Error::param("dimension n must be at least 1"));
    }
    Ok(SkeKey { k: ZqVector::random(n, q, rng)? })
}

pub fn ske_encrypt<R: Rng + ?Sized>(
    key: &SkeKey,
    bit: u8,
    chi: &ErrorDistribution,
    rng: &mut R,
) -> Result<LweCiphertext> {
    let q = key.k.modulus();
    check_bit(bit)?;
    check_chi(chi, q)?;
    let a = ZqVector::random(key.k.len(), q, rng)?;
    let e = chi.sample(rng);
    let c = add_mod(add_mod(a.inner_product(&key.k)?, bit as u64 * (q / 2), q), e, q);
    Ok(LweCiphertext { a, c })
}

pub fn ske_decrypt(key: &SkeKey, ct: &LweCiphertext) -> Result<u8> {
    if ct.a.modulus() != key.k.modulus() || ct.a.len() != key.k.len() {
        return Err(Error::shape("ciphertext does not match the key"));
    }
    Ok(binary_decrypt_raw(key.k.entries(), ct.a.entries(), ct.c, key.k.modulus()))
}

/// `0` iff `|c − ⟨a, k⟩| ≤ ⌊q/4⌋` on the cycle. Shared by every binary scheme.
#[inline]
pub(crate) fn binary_decrypt_raw(k: &[u64], a: &[u64], c: u64, q: u64) -> u8 {
    decode_bit(sub_mod(c, dot_mod(a, k, q), q), q)
}

/// The rounding rule applied to the noisy value `c − ⟨a, k⟩`.
#[inline]
pub fn decode_bit(t: u64, q: u64) -> u8 {
    (centered_abs(t, q) > q >> 2) as u8
}

pub(crate) fn check_bit(bit: u8) -> Result<()> {
    if bit > 1 {
        return Err(Error::Message(format!("plaintext bit must be 0 or 1, got {bit}")));
    }
    Ok(())
}

pub(crate) fn check_chi(chi: &ErrorDistribution, q: u64) -> Result<()> {
    check_modulus(q)?;
    if chi.q != q {
        return Err(Error::param(format!("noise distribution over Z_{} used with modulus {q}", chi.q)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn noiseless_examples() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let q = 97;
        let key = ske_keygen(q, 5, &mut rng).unwrap();
        let chi = ErrorDistribution::bounded_uniform(0, q).unwrap();
        for _ in 0..50 {
            let ct = ske_encrypt(&key, 0, &chi, &mut rng).unwrap();
            assert_eq!(ct.c, ct.a.inner_product(&key.k).unwrap());
            let ct = ske_encrypt(&key, 1, &chi, &mut rng).unwrap();
            assert_eq!(sub_mod(ct.c, ct.a.inner_product(&key.k).unwrap(), q), q / 2);
        }
    }

    #[test]
    fn decrypt_examples() {
        let key = SkeKey { k: ZqVector::new(vec![3, 1], 8).unwrap() };
        let a = ZqVector::new(vec![1, 2], 8).unwrap();
        let at = |c| ske_decrypt(&key, &LweCiphertext::new(a.clone(), c).unwrap()).unwrap();
        assert_eq!(at(5), 0);
        assert_eq!(at(1), 1);
        // ⌊8/4⌋ = 2 is inside the 0-region
        assert_eq!(at(7), 0);
        assert_eq!(at(3), 0);
        assert_eq!(at(0), 1);
        for q in 5..40 {
            let key = SkeKey { k: ZqVector::new(vec![q - 2], q).unwrap() };
            let a = ZqVector::new(vec![1], q).unwrap();
            let ip = q - 2;
            assert_eq!(ske_decrypt(&key, &LweCiphertext::new(a.clone(), ip).unwrap()).unwrap(), 0);
            let far = (ip + q / 2) % q;
            assert_eq!(ske_decrypt(&key, &LweCiphertext::new(a.clone(), far).unwrap()).unwrap(), 1);
        }
    }

    #[test]
    fn round_trip_at_q257() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let q = 257;
        let key = ske_keygen(q, 8, &mut rng).unwrap();
        let chi = ErrorDistribution::bounded_uniform(16, q).unwrap();
        for i in 0..1000 {
            let bit = (i % 2) as u8;
            let ct = ske_encrypt(&key, bit, &chi, &mut rng).unwrap();
            assert_eq!(ske_decrypt(&key, &ct).unwrap(), bit);
        }
    }

    #[test]
    fn default_eta_is_correct_for_every_small_modulus() {
        for q in 2..=300u64 {
            let eta = ske_default_eta(q);
            assert!(eta <= (q / 16).max(1));
            // worst-case noise in both directions for both bits
            for e in -(eta as i64)..=eta as i64 {
                for bit in 0..2u64 {
                    let t = crate::zq::reduce(bit as i64 * (q / 2) as i64 + e, q);
                    assert_eq!(decode_bit(t, q) as u64, bit, "q={q} eta={eta} e={e}");
                }
            }
        }
        assert_eq!(ske_default_eta(257), 16);
        assert_eq!(ske_default_eta(7), 1);
        assert_eq!(ske_default_eta(5), 0);
    }

    #[test]
    fn malformed_inputs() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let key = ske_keygen(7, 2, &mut rng).unwrap();
        let chi = ErrorDistribution::bounded_uniform(1, 7).unwrap();
        assert!(ske_encrypt(&key, 2, &chi, &mut rng).is_err());
        let wrong = ErrorDistribution::bounded_uniform(1, 11).unwrap();
        assert!(ske_encrypt(&key, 0, &wrong, &mut rng).is_err());
        let ct = LweCiphertext::new(ZqVector::zeros(3, 7).unwrap(), 0).unwrap();
        assert!(ske_decrypt(&key, &ct).is_err());
        assert!(LweCiphertext::new(ZqVector::zeros(2, 7).unwrap(), 7).is_err());
        assert!(ske_keygen(7, 0, &mut rng).is_err());
    }
}
