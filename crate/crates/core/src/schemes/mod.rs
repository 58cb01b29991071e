//! The encryption schemes under attack: symmetric and public-key LWE, the
//! matrix scheme with multi-bit truncation decoding, ring-LWE over
//! `Z_q[x]/(x^n + 1)`, and two bit-string schemes over toy keyed families.
//!
//! Every decryption routine is a total deterministic function of the key and
//! the ciphertext, which is what lets the attacks wrap it as an oracle.

mod fixture;
mod frodo;
mod pke;
mod ring;
mod ske;
mod toy;

pub use fixture::{SchemeCiphertext, SchemeKeys};
pub use frodo::{
    frodo_decrypt, frodo_default_eta, frodo_encode, frodo_encrypt, frodo_keygen, truncate, FrodoCiphertext,
    FrodoKeyPair, FrodoParams,
};
pub use pke::{pke_decrypt, pke_default_eta, pke_default_m, pke_encrypt, pke_keygen, PkeKeyPair, PkePublicKey};
pub use ring::{
    ringlwe_decrypt, ringlwe_default_eta, ringlwe_encrypt, ringlwe_keygen, RingLweCiphertext, RingLweKeyPair,
};
pub use ske::{decode_bit, ske_decrypt, ske_default_eta, ske_encrypt, ske_keygen, LweCiphertext, SkeKey};
pub use toy::{PrfCiphertext, PrfScheme, PrpScheme};

pub(crate) use ring::ringlwe_decrypt_raw;
pub(crate) use ske::binary_decrypt_raw;

use crate::error::Result;
use crate::lrf::LrfParams;

/// Largest noise magnitude `N` for which `bit·⌊q/2⌋ + e`, `|e| ≤ N`, always
/// decodes to `bit` under the `⌊q/4⌋` rule.
pub fn binary_noise_radius(q: u64) -> u64 {
    (q / 4).min((q / 2 - q / 4).saturating_sub(1))
}

/// The 0-region of binary decryption, `{z : |z| ≤ ⌊q/4⌋}`, as a sorted list.
pub fn zero_region(q: u64) -> Vec<u64> {
    (0..q).filter(|&z| decode_bit(z, q) == 0).collect()
}

/// Binary decryption as a two-block rounding function of `(a, c)` under the
/// key `(−k, 1)`.
///
/// The larger of the 0-region and its complement becomes block 0 (full
/// blocks come first), the other one the short final block. The flag is
/// `true` when block 0 is the complement, i.e. `Dec = 1 − LRF`.
pub fn decryption_partition(q: u64, n: usize) -> Result<(LrfParams, bool)> {
    let r = q / 4;
    let zero = 2 * r + 1;
    if zero >= q - zero {
        Ok((LrfParams::new(q, n + 1, q - r, zero.min(q - 1))?, false))
    } else {
        Ok((LrfParams::new(q, n + 1, r + 1, q - zero)?, true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrf::{lrf_eval, LrfKey};
    use crate::zq::{centered_abs, ZqVector};

    #[test]
    fn noise_radius_examples() {
        assert_eq!(binary_noise_radius(257), 63);
        assert_eq!(binary_noise_radius(7), 1);
        assert_eq!(binary_noise_radius(8), 1);
        assert_eq!(binary_noise_radius(5), 0);
        assert_eq!(binary_noise_radius(2), 0);
    }

    #[test]
    fn decryption_is_a_rounding_function() {
        for q in 2..=17u64 {
            let r = q / 4;
            assert_eq!(zero_region(q).len() as u64, 2 * r + 1);
            for n in 1..=2usize {
                let (p, complement) = decryption_partition(q, n).unwrap();
                assert_eq!(p.block_count(), 2);
                for k_index in 0..q.pow(n as u32) {
                    let k: Vec<u64> = (0..n).map(|i| (k_index / q.pow(i as u32)) % q).collect();
                    let mut kprime: Vec<u64> = k.iter().map(|&v| (q - v) % q).collect();
                    kprime.push(1);
                    let key = LrfKey::new(ZqVector::new(kprime, q).unwrap());
                    let ske = SkeKey { k: ZqVector::new(k, q).unwrap() };
                    for x_index in 0..q.pow(n as u32 + 1) {
                        let x: Vec<u64> = (0..=n).map(|i| (x_index / q.pow(i as u32)) % q).collect();
                        let ct = LweCiphertext::new(ZqVector::new(x[..n].to_vec(), q).unwrap(), x[n]).unwrap();
                        let dec = ske_decrypt(&ske, &ct).unwrap() as u64;
                        let x = ZqVector::new(x, q).unwrap();
                        let t = x.inner_product(&key.0).unwrap();
                        assert_eq!(dec, (centered_abs(t, q) > r) as u64);
                        let v = lrf_eval(&x, &key, &p).unwrap();
                        assert_eq!(dec, if complement { 1 - v } else { v }, "q={q} n={n}");
                    }
                }
            }
        }
    }
}
