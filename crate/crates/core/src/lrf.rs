//! Keyed linear rounding functions.
//!
//! `Z_q` is cut into `c = ⌈q/b⌉` consecutive blocks starting at the offset
//! `a`. Blocks `0..c-1` hold `b` residues each; the last block holds the
//! remaining `b - d` residues, where `d = c·b - q` is the overhang. A linear
//! rounding function maps `x ∈ Z_q^n` to the index of the block containing
//! `⟨x, k⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zq::{check_modulus, dot_mod, has_unit_entry, ZqVector};

/// Block geometry `(q, n, a, b)` together with the derived `c` and `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrfParams {
    q: u64,
    n: usize,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
}

impl LrfParams {
    pub fn new(q: u64, n: usize, a: u64, b: u64) -> Result<Self> {
        check_modulus(q)?;
        if n == 0 {
            return Err(Error::param("dimension n must be at least 1"));
        }
        if b == 0 || b >= q {
            return Err(Error::param(format!("block size {b} outside 1..={}", q - 1)));
        }
        let c = q.div_ceil(b);
        Ok(LrfParams { q, n, a: a % q, b, c, d: c * b - q })
    }

    /// The two-block partition with `b = ⌈q/2⌉`.
    pub fn binary(q: u64, n: usize, a: u64) -> Result<Self> {
        Self::new(q, n, a, q.div_ceil(2))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> u64 {
        self.a
    }

    pub fn block_size(&self) -> u64 {
        self.b
    }

    pub fn block_count(&self) -> u64 {
        self.c
    }

    pub fn overhang(&self) -> u64 {
        self.d
    }

    /// Size of block `v`; only the last block is short.
    pub fn block_len(&self, v: u64) -> u64 {
        if v + 1 < self.c {
            self.b
        } else {
            self.b - self.d
        }
    }

    pub fn with_offset(&self, a: u64) -> Self {
        LrfParams { a: a % self.q, ..*self }
    }
}

/// Key of a linear rounding function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrfKey(pub ZqVector);

impl LrfKey {
    pub fn new(k: ZqVector) -> Self {
        LrfKey(k)
    }

    /// Whether the single-query recovery guarantee applies to this key.
    pub fn has_unit_entry(&self) -> bool {
        has_unit_entry(&self.0)
    }

    pub fn entries(&self) -> &[u64] {
        self.0.entries()
    }
}

/// Index of the block containing `z`.
#[inline]
pub fn block_index(z: u64, params: &LrfParams) -> u64 {
    debug_assert!(z < params.q);
    let shifted = if z >= params.a { z - params.a } else { z + params.q - params.a };
    (shifted / params.b).min(params.c - 1)
}

/// `LRF_{k,a,b}(x)`.
pub fn lrf_eval(x: &ZqVector, key: &LrfKey, params: &LrfParams) -> Result<u64> {
    if x.modulus() != params.q || key.0.modulus() != params.q {
        return Err(Error::shape("modulus differs from the partition modulus"));
    }
    if x.len() != params.n || key.0.len() != params.n {
        return Err(Error::shape(format!(
            "input of length {} and key of length {} for dimension {}",
            x.len(),
            key.0.len(),
            params.n
        )));
    }
    Ok(block_index(x.inner_product(&key.0)?, params))
}

/// Same as [`lrf_eval`] on raw residue slices; used inside oracle loops.
#[inline]
pub(crate) fn lrf_eval_raw(x: &[u64], key: &[u64], params: &LrfParams) -> u64 {
    block_index(dot_mod(x, key, params.q), params)
}
