//! Bit-string schemes built from a keyed function family. The families here
//! are seeded stream-cipher maps: deterministic and key-dependent, and not
//! meant to be secure.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FEISTEL_ROUNDS: usize = 4;

fn mask(bits: u32) -> u64 {
    if bits == 64 {
        u64::MAX
    } else {
        (1 << bits) - 1
    }
}

fn check_len(n: u32) -> Result<()> {
    if !(1..=64).contains(&n) {
        return Err(Error::param(format!("block length {n} outside 1..=64 bits")));
    }
    Ok(())
}

/// `f_k(x)`: the first output word of ChaCha20 keyed by `key` on stream `x`.
fn keyed_map(key: u64, x: u64, bits: u32) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(key);
    rng.set_stream(x);
    rng.next_u64() & mask(bits)
}

/// Encrypts `n`-bit messages as `(r, f_k(r) ⊕ m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrfScheme {
    pub n: u32,
    pub key: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrfCiphertext {
    pub r: u64,
    pub c: u64,
}

impl PrfScheme {
    pub fn new(n: u32, key: u64) -> Result<Self> {
        check_len(n)?;
        Ok(PrfScheme { n, key })
    }

    pub fn generate<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        Self::new(n, rng.gen())
    }

    pub fn eval(&self, x: u64) -> u64 {
        keyed_map(self.key, x, self.n)
    }

    pub fn encrypt<R: Rng + ?Sized>(&self, m: u64, rng: &mut R) -> Result<PrfCiphertext> {
        self.check_word(m)?;
        let r = rng.gen::<u64>() & mask(self.n);
        Ok(PrfCiphertext { r, c: self.eval(r) ^ m })
    }

    pub fn decrypt(&self, ct: &PrfCiphertext) -> Result<u64> {
        self.check_word(ct.r)?;
        self.check_word(ct.c)?;
        Ok(self.eval(ct.r) ^ ct.c)
    }

    fn check_word(&self, w: u64) -> Result<()> {
        if w & !mask(self.n) != 0 {
            return Err(Error::shape(format!("{w:#x} is longer than {} bits", self.n)));
        }
        Ok(())
    }
}

/// Encrypts `n`-bit messages as `P_k(m ‖ r)` for a balanced Feistel
/// permutation `P_k` on `2n` bits. The message occupies the high half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrpScheme {
    pub n: u32,
    pub round_keys: [u64; FEISTEL_ROUNDS],
}

impl PrpScheme {
    pub fn new(n: u32, key: u64) -> Result<Self> {
        check_len(n)?;
        let mut rng = ChaCha20Rng::seed_from_u64(key);
        let mut round_keys = [0; FEISTEL_ROUNDS];
        rng.fill(&mut round_keys[..]);
        Ok(PrpScheme { n, round_keys })
    }

    pub fn generate<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        Self::new(n, rng.gen())
    }

    fn halves(&self, x: u128) -> (u64, u64) {
        ((x >> self.n) as u64 & mask(self.n), x as u64 & mask(self.n))
    }

    fn join(&self, left: u64, right: u64) -> u128 {
        ((left as u128) << self.n) | right as u128
    }

    pub fn permute(&self, x: u128) -> Result<u128> {
        self.check_block(x)?;
        let (mut l, mut r) = self.halves(x);
        for &k in &self.round_keys {
            (l, r) = (r, l ^ keyed_map(k, r, self.n));
        }
        Ok(self.join(l, r))
    }

    pub fn invert(&self, y: u128) -> Result<u128> {
        self.check_block(y)?;
        let (mut l, mut r) = self.halves(y);
        for &k in self.round_keys.iter().rev() {
            (l, r) = (r ^ keyed_map(k, l, self.n), l);
        }
        Ok(self.join(l, r))
    }

    pub fn encrypt<R: Rng + ?Sized>(&self, m: u64, rng: &mut R) -> Result<u128> {
        if m & !mask(self.n) != 0 {
            return Err(Error::shape(format!("{m:#x} is longer than {} bits", self.n)));
        }
        let r = rng.gen::<u64>() & mask(self.n);
        self.permute(self.join(m, r))
    }

    /// The first `n` bits of `P_k^{-1}(c)`.
    pub fn decrypt(&self, c: u128) -> Result<u64> {
        Ok(self.halves(self.invert(c)?).0)
    }

    fn check_block(&self, x: u128) -> Result<()> {
        if 2 * self.n < 128 && x >> (2 * self.n) != 0 {
            return Err(Error::shape(format!("{x:#x} is longer than {} bits", 2 * self.n)));
        }
        Ok(())
    }
}
