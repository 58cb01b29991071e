//! Classical key recovery with the same oracles, queried on basis inputs.

use crate::error::{Error, Result};
use crate::schemes::decode_bit;
use crate::zq::{sub_mod, ZqVector};

/// Result of a classical key search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalRecovery {
    pub key: ZqVector,
    pub queries: u64,
    pub max_queries_per_coordinate: u64,
}

/// Recovers `k` from a binary decryption oracle using queries `(e_i, c)`.
///
/// Such a query decrypts to `[|c − k_i| > ⌊q/4⌋]`, which splits the
/// candidates for `k_i` by an arc of `2⌊q/4⌋+1` residues around `c`. Each
/// query picks the arc that splits the remaining candidates most evenly.
pub fn classical_dec_keyrec<F>(mut dec: F, q: u64, n: usize) -> Result<ClassicalRecovery>
where
    F: FnMut(&[u64], u64) -> u8,
{
    if q < 2 || n == 0 {
        return Err(Error::param(format!("need q ≥ 2 and n ≥ 1, got q={q}, n={n}")));
    }
    let qs = q as usize;
    let r = (q / 4) as usize;
    let mut key = Vec::with_capacity(n);
    let (mut total, mut worst) = (0u64, 0u64);
    let mut a = vec![0u64; n];
    for i in 0..n {
        let mut alive = vec![true; qs];
        let mut count = qs;
        let mut queries = 0u64;
        while count > 1 {
            // prefix[j] = live candidates among residues < j, over two periods
            let mut prefix = vec![0usize; 2 * qs + 1];
            for j in 0..2 * qs {
                prefix[j + 1] = prefix[j] + alive[j % qs] as usize;
            }
            let inside = |c: usize| {
                let lo = (c + qs - r % qs) % qs;
                let len = (2 * r + 1).min(qs);
                prefix[lo + len] - prefix[lo]
            };
            let c = (0..qs)
                .max_by_key(|&c| {
                    let k = inside(c);
                    k.min(count - k)
                })
                .expect("q ≥ 2");
            a[i] = 1;
            let bit = dec(&a, c as u64);
            a[i] = 0;
            queries += 1;
            for (z, live) in alive.iter_mut().enumerate() {
                if *live && decode_bit(sub_mod(c as u64, z as u64, q), q) != bit {
                    *live = false;
                    count -= 1;
                }
            }
            if count == 0 {
                return Err(Error::param("decryption oracle answers are inconsistent with any key"));
            }
            if queries > 4 * (64 - q.leading_zeros() as u64) + 8 {
                return Err(Error::param("decryption oracle does not separate the candidates"));
            }
        }
        key.push(alive.iter().position(|&b| b).expect("one candidate left") as u64);
        total += queries;
        worst = worst.max(queries);
    }
    Ok(ClassicalRecovery { key: ZqVector::new(key, q)?, queries: total, max_queries_per_coordinate: worst })
}

/// Recovers `k` from an encryption oracle that lets the caller choose all
/// randomness: `enc(0, e_i, 0) = k_i`, one query per coordinate.
pub fn classical_ra_keyrec<F>(mut enc: F, q: u64, n: usize) -> Result<ClassicalRecovery>
where
    F: FnMut(u8, &[u64], i64) -> u64,
{
    if q < 2 || n == 0 {
        return Err(Error::param(format!("need q ≥ 2 and n ≥ 1, got q={q}, n={n}")));
    }
    let mut a = vec![0u64; n];
    let mut key = Vec::with_capacity(n);
    for i in 0..n {
        a[i] = 1;
        key.push(enc(0, &a, 0) % q);
        a[i] = 0;
    }
    Ok(ClassicalRecovery { key: ZqVector::new(key, q)?, queries: n as u64, max_queries_per_coordinate: 1 })
}

/// `⌈log₂ q⌉`.
pub fn ceil_log2(q: u64) -> u64 {
    if q <= 1 {
        0
    } else {
        64 - (q - 1).leading_zeros() as u64
    }
}
