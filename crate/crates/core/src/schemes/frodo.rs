use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ske::check_chi;
use crate::error::{Error, Result};
use crate::zq::{ErrorDistribution, ZqMatrix};

/// Dimensions of the matrix scheme. `q = 2^D` and each message entry carries
/// `B` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrodoParams {
    pub n: usize,
    pub nbar: usize,
    pub mbar: usize,
    pub d_bits: u32,
    pub b_bits: u32,
}

impl FrodoParams {
    pub fn new(n: usize, nbar: usize, mbar: usize, d_bits: u32, b_bits: u32) -> Result<Self> {
        if n == 0 || nbar == 0 || mbar == 0 {
            return Err(Error::param("matrix dimensions must be positive"));
        }
        if !(1..=31).contains(&d_bits) || b_bits == 0 || b_bits > d_bits {
            return Err(Error::param(format!("need 1 ≤ B ≤ D ≤ 31, got B={b_bits}, D={d_bits}")));
        }
        Ok(FrodoParams { n, nbar, mbar, d_bits, b_bits })
    }

    /// Builds the parameters from a power-of-two modulus.
    pub fn with_modulus(q: u64, n: usize, nbar: usize, mbar: usize, b_bits: u32) -> Result<Self> {
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::param(format!("modulus {q} is not a power of two")));
        }
        Self::new(n, nbar, mbar, q.trailing_zeros(), b_bits)
    }

    pub fn q(&self) -> u64 {
        1 << self.d_bits
    }

    /// Size `q / 2^B` of each decoding interval.
    pub fn interval(&self) -> u64 {
        1 << (self.d_bits - self.b_bits)
    }

    /// Number of message symbols, `2^B`.
    pub fn symbols(&self) -> u64 {
        1 << self.b_bits
    }

    /// Added to every `C₂` entry so that decoding by truncation tolerates
    /// noise of either sign. Zero when `B = D`.
    pub fn rounding_offset(&self) -> u64 {
        self.interval() / 2
    }

    /// Largest noise magnitude truncation decodes correctly.
    pub fn noise_radius(&self) -> u64 {
        self.rounding_offset().saturating_sub(1)
    }
}

/// Secret `S` (`n × n̄`) and public `(A, B = A·S + E)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrodoKeyPair {
    pub params: FrodoParams,
    pub s: ZqMatrix,
    pub a: ZqMatrix,
    pub b: ZqMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrodoCiphertext {
    /// `m̄ × n`.
    pub c1: ZqMatrix,
    /// `m̄ × n̄`.
    pub c2: ZqMatrix,
}

/// Largest `η ≤ max(1, ⌊q/16⌋)` whose worst-case decryption noise
/// `2nη² + η` stays inside the decoding radius.
pub fn frodo_default_eta(params: &FrodoParams) -> u64 {
    let cap = (params.q() / 16).max(1);
    let radius = params.noise_radius();
    (0..=cap).rev().find(|&eta| 2 * params.n as u64 * eta * eta + eta <= radius).unwrap_or(0)
}

pub fn frodo_keygen<R: Rng + ?Sized>(
    params: &FrodoParams,
    chi: &ErrorDistribution,
    rng: &mut R,
) -> Result<FrodoKeyPair> {
    let q = params.q();
    check_chi(chi, q)?;
    let a = ZqMatrix::random(params.n, params.n, q, rng)?;
    let s = chi.sample_matrix(params.n, params.nbar, rng);
    let e = chi.sample_matrix(params.n, params.nbar, rng);
    let b = a.mul(&s)?.add(&e)?;
    Ok(FrodoKeyPair { params: *params, s, a, b })
}

/// Places `B`-bit plaintext symbols in the top bits of each entry.
pub fn frodo_encode(params: &FrodoParams, symbols: &ZqMatrix) -> Result<ZqMatrix> {
    if symbols.modulus() != params.symbols() || symbols.rows() != params.mbar || symbols.cols() != params.nbar {
        return Err(Error::Message(format!(
            "expected an {}×{} matrix of {}-bit symbols",
            params.mbar, params.nbar, params.b_bits
        )));
    }
    let data = symbols.data().iter().map(|&v| v * params.interval()).collect();
    ZqMatrix::new(params.mbar, params.nbar, data, params.q())
}

/// `C₁ = S′A + E′`, `C₂ = M + S′B + E″ + offset`, where `M` is an encoded
/// message and `offset` is [`FrodoParams::rounding_offset`].
pub fn frodo_encrypt<R: Rng + ?Sized>(
    pk: &FrodoKeyPair,
    message: &ZqMatrix,
    chi: &ErrorDistribution,
    rng: &mut R,
) -> Result<FrodoCiphertext> {
    let p = &pk.params;
    let q = p.q();
    check_chi(chi, q)?;
    if message.modulus() != q || message.rows() != p.mbar || message.cols() != p.nbar {
        return Err(Error::Message(format!("expected an {}×{} message matrix mod {q}", p.mbar, p.nbar)));
    }
    if let Some(v) = message.data().iter().find(|&&v| v % p.interval() != 0) {
        return Err(Error::Message(format!("entry {v} has bits below the top {}", p.b_bits)));
    }
    let s1 = chi.sample_matrix(p.mbar, p.n, rng);
    let e1 = chi.sample_matrix(p.mbar, p.n, rng);
    let e2 = chi.sample_matrix(p.mbar, p.nbar, rng);
    let c1 = s1.mul(&pk.a)?.add(&e1)?;
    let offset = ZqMatrix::new(p.mbar, p.nbar, vec![p.rounding_offset(); p.mbar * p.nbar], q)?;
    let c2 = message.add(&s1.mul(&pk.b)?)?.add(&e2)?.add(&offset)?;
    Ok(FrodoCiphertext { c1, c2 })
}

/// `Trunc(C₂ − C₁S)`: the top `B` bits of every entry, as a matrix of
/// symbols mod `2^B`.
pub fn frodo_decrypt(kp: &FrodoKeyPair, ct: &FrodoCiphertext) -> Result<ZqMatrix> {
    let p = &kp.params;
    if ct.c1.rows() != p.mbar || ct.c1.cols() != p.n || ct.c2.rows() != p.mbar || ct.c2.cols() != p.nbar {
        return Err(Error::shape("ciphertext does not match the parameters"));
    }
    let m = ct.c2.sub(&ct.c1.mul(&kp.s)?)?;
    let data = m.data().iter().map(|&v| truncate(v, p)).collect();
    ZqMatrix::new(p.mbar, p.nbar, data, p.symbols())
}

/// Keeps the `B` most significant of `D` bits.
#[inline]
pub fn truncate(v: u64, params: &FrodoParams) -> u64 {
    v >> (params.d_bits - params.b_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrf::{lrf_eval, LrfKey, LrfParams};
    use crate::zq::ZqVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn random_symbols(p: &FrodoParams, rng: &mut ChaCha20Rng) -> ZqMatrix {
        ZqMatrix::random(p.mbar, p.nbar, p.symbols(), rng).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(FrodoParams::with_modulus(12, 2, 2, 2, 2).is_err());
        assert!(FrodoParams::with_modulus(16, 2, 2, 2, 5).is_err());
        assert!(FrodoParams::with_modulus(16, 0, 2, 2, 2).is_err());
        let p = FrodoParams::with_modulus(16, 2, 2, 2, 2).unwrap();
        assert_eq!((p.q(), p.d_bits, p.interval(), p.symbols(), p.rounding_offset()), (16, 4, 4, 4, 2));
        let exact = FrodoParams::with_modulus(16, 2, 2, 2, 4).unwrap();
        assert_eq!((exact.interval(), exact.rounding_offset()), (1, 0));
    }

    #[test]
    fn truncation_examples() {
        let p = FrodoParams::with_modulus(16, 1, 1, 1, 2).unwrap();
        assert_eq!(truncate(13, &p), 3);
        assert_eq!(truncate(0, &p), 0);
        assert_eq!(truncate(3, &p), 0);
        assert_eq!(truncate(4, &p), 1);
    }

    #[test]
    fn zero_ciphertext_decrypts_to_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let p = FrodoParams::with_modulus(256, 4, 3, 2, 2).unwrap();
        let chi = ErrorDistribution::bounded_uniform(2, 256).unwrap();
        let kp = frodo_keygen(&p, &chi, &mut rng).unwrap();
        let ct = FrodoCiphertext { c1: ZqMatrix::zeros(2, 4, 256).unwrap(), c2: ZqMatrix::zeros(2, 3, 256).unwrap() };
        assert!(frodo_decrypt(&kp, &ct).unwrap().data().iter().all(|&v| v == 0));
    }

    #[test]
    fn noiseless_encryption() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let p = FrodoParams::with_modulus(1 << 10, 8, 3, 2, 3).unwrap();
        let chi = ErrorDistribution::bounded_uniform(0, p.q()).unwrap();
        let kp = frodo_keygen(&p, &chi, &mut rng).unwrap();
        assert!(kp.s.data().iter().all(|&v| v == 0));
        let zero = ZqMatrix::zeros(p.mbar, p.nbar, p.q()).unwrap();
        let ct = frodo_encrypt(&kp, &zero, &chi, &mut rng).unwrap();
        // zero message: C₂ is the rounding offset on top of S′B = 0
        assert!(ct.c2.data().iter().all(|&v| v == p.rounding_offset()));
        for _ in 0..50 {
            let msg = random_symbols(&p, &mut rng);
            let ct = frodo_encrypt(&kp, &frodo_encode(&p, &msg).unwrap(), &chi, &mut rng).unwrap();
            assert_eq!(frodo_decrypt(&kp, &ct).unwrap(), msg);
        }
    }

    #[test]
    fn round_trip_at_q32768() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let p = FrodoParams::with_modulus(1 << 15, 64, 4, 4, 2).unwrap();
        let chi = ErrorDistribution::bounded_uniform(2, p.q()).unwrap();
        let kp = frodo_keygen(&p, &chi, &mut rng).unwrap();
        for _ in 0..100 {
            let msg = random_symbols(&p, &mut rng);
            let ct = frodo_encrypt(&kp, &frodo_encode(&p, &msg).unwrap(), &chi, &mut rng).unwrap();
            assert_eq!(frodo_decrypt(&kp, &ct).unwrap(), msg);
        }
    }

    #[test]
    fn round_trip_with_default_eta() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for (q, n, b) in [(16u64, 2usize, 2u32), (256, 4, 2), (1 << 12, 16, 3), (16, 2, 4), (1 << 15, 64, 2)] {
            let p = FrodoParams::with_modulus(q, n, 2, 2, b).unwrap();
            let eta = frodo_default_eta(&p);
            assert!(2 * n as u64 * eta * eta + eta < p.interval() / 2 || eta == 0);
            let chi = ErrorDistribution::bounded_uniform(eta, q).unwrap();
            let kp = frodo_keygen(&p, &chi, &mut rng).unwrap();
            for _ in 0..100 {
                let msg = random_symbols(&p, &mut rng);
                let ct = frodo_encrypt(&kp, &frodo_encode(&p, &msg).unwrap(), &chi, &mut rng).unwrap();
                assert_eq!(frodo_decrypt(&kp, &ct).unwrap(), msg, "q={q} n={n} B={b} eta={eta}");
            }
        }
    }

    #[test]
    fn decryption_with_zero_c2_is_a_rounding_function() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let p = FrodoParams::with_modulus(64, 3, 2, 2, 2).unwrap();
        let chi = ErrorDistribution::bounded_uniform(3, 64).unwrap();
        let kp = frodo_keygen(&p, &chi, &mut rng).unwrap();
        let lrf = LrfParams::new(64, 3, 0, p.interval()).unwrap();
        for _ in 0..1000 {
            let c1 = ZqMatrix::random(p.mbar, p.n, 64, &mut rng).unwrap();
            let ct = FrodoCiphertext { c1: c1.clone(), c2: ZqMatrix::zeros(p.mbar, p.nbar, 64).unwrap() };
            let m = frodo_decrypt(&kp, &ct).unwrap();
            for i in 0..p.mbar {
                let ci = ZqVector::new(c1.row(i).to_vec(), 64).unwrap();
                for j in 0..p.nbar {
                    let key = LrfKey::new(kp.s.column(j).neg());
                    assert_eq!(m.get(i, j), lrf_eval(&ci, &key, &lrf).unwrap());
                }
            }
        }
    }

    #[test]
    fn malformed_messages() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let p = FrodoParams::with_modulus(16, 2, 2, 2, 2).unwrap();
        let chi = ErrorDistribution::bounded_uniform(0, 16).unwrap();
        let kp = frodo_keygen(&p, &chi, &mut rng).unwrap();
        let low_bits = ZqMatrix::new(2, 2, vec![1, 0, 0, 0], 16).unwrap();
        assert!(matches!(frodo_encrypt(&kp, &low_bits, &chi, &mut rng), Err(Error::Message(_))));
        let wrong_shape = ZqMatrix::zeros(3, 2, 16).unwrap();
        assert!(frodo_encrypt(&kp, &wrong_shape, &chi, &mut rng).is_err());
        assert!(frodo_encode(&p, &ZqMatrix::zeros(2, 2, 8).unwrap()).is_err());
    }
}
