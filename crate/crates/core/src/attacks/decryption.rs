//! Key recovery from one quantum query to a decryption oracle.
//!
//! Each oracle is passed as a classical description of the decryption map
//! and is turned into the additive unitary inside the simulator. The
//! attacks never read the key.

use rand::Rng;

use super::algorithm::{bv_lrf_attack, dim, OracleBudget};
use crate::error::{Error, Result};
use crate::qsim::{RegisterLayout, StateVector};
use crate::schemes::FrodoParams;
use crate::zq::{neg_mod, RingPoly, ZqVector};

/// Attack on symmetric LWE with a bit-valued decryption oracle
/// `dec(a, c) ∈ {0, 1}`.
///
/// Queries over `(a, c) ∈ Z_q^{n+1}`, where decryption rounds
/// `⟨(a, c), (−k, 1)⟩`. Returns `k = −y[..n]` when the last measured
/// coordinate is 1 and `None` otherwise.
pub fn attack_ske<F, R>(
    mut dec: F,
    q: u64,
    n: usize,
    rng: &mut R,
    budget: &mut OracleBudget,
) -> Result<Option<ZqVector>>
where
    F: FnMut(&[u64], u64) -> u8,
    R: Rng + ?Sized,
{
    let y = bv_lrf_attack(|x| dec(&x[..n], x[n]) as u64, q, n + 1, 2, rng, budget)?;
    if y[n] != 1 {
        return Ok(None);
    }
    Ok(Some(ZqVector::new(y[..n].iter().map(|&v| neg_mod(v, q)).collect(), q)?))
}

/// Public-key LWE decrypts exactly like the symmetric scheme, so the same
/// query recovers the secret key.
pub fn attack_pke<F, R>(dec: F, q: u64, n: usize, rng: &mut R, budget: &mut OracleBudget) -> Result<Option<ZqVector>>
where
    F: FnMut(&[u64], u64) -> u8,
    R: Rng + ?Sized,
{
    attack_ske(dec, q, n, rng, budget)
}

/// Attack on ring-LWE with an oracle `dec(u, v₀)` that decrypts the
/// ciphertext `(u, v₀)` with constant `v`.
///
/// Decryption rounds `⟨(u, v₀), (−s₀, s_{n−1}, …, s₁, 1)⟩`, so the
/// measured vector is un-permuted into `s`.
pub fn attack_ringlwe<F, R>(
    mut dec: F,
    q: u64,
    n: usize,
    rng: &mut R,
    budget: &mut OracleBudget,
) -> Result<Option<RingPoly>>
where
    F: FnMut(&[u64], u64) -> u8,
    R: Rng + ?Sized,
{
    RingPoly::zero(n, q)?;
    let y = bv_lrf_attack(|x| dec(&x[..n], x[n]) as u64, q, n + 1, 2, rng, budget)?;
    if y[n] != 1 {
        return Ok(None);
    }
    let s = (0..n).map(|j| if j == 0 { neg_mod(y[0], q) } else { y[n - j] }).collect();
    Ok(Some(RingPoly::new(s, q)?))
}

/// Attack on the matrix scheme with a decryption oracle
/// `dec(C1, C2) → M`, all matrices row-major (`C1` is `m̄×n`, `C2` and
/// `M` are `m̄×n̄`, `M` holds symbols mod `2^B`).
///
/// Row `i` of `C1` is put in superposition and its `j_i`-th output register
/// holds the phase eigenstate, with `j_i = columns[i]`. With `C2 = 0`,
/// `M[i][j] = Trunc(−⟨c^i, s^j⟩)`; the inverse QFT then yields a candidate
/// for column `s^{j_i}`. The rows are independent, so they are simulated one
/// at a time, but the oracle is applied once to all of them and one query is
/// charged.
pub fn attack_frodo<F, R>(
    mut dec: F,
    params: &FrodoParams,
    columns: &[usize],
    rng: &mut R,
    budget: &mut OracleBudget,
) -> Result<Vec<ZqVector>>
where
    F: FnMut(&[u64], &[u64]) -> Vec<u64>,
    R: Rng + ?Sized,
{
    let (q, n, nbar, mbar) = (params.q(), params.n, params.nbar, params.mbar);
    if columns.len() > mbar {
        return Err(Error::param(format!("{} target columns but only {mbar} ciphertext rows", columns.len())));
    }
    if let Some(&j) = columns.iter().find(|&&j| j >= nbar) {
        return Err(Error::param(format!("column {j} outside 0..{nbar}")));
    }
    let (qd, cd) = (dim(q)?, dim(params.symbols())?);
    let mut dims = vec![qd; n];
    dims.extend(std::iter::repeat_n(cd, nbar));
    RegisterLayout::new(dims)?;
    budget.charge()?;

    let registers: Vec<usize> = (0..n).collect();
    let targets: Vec<usize> = (n..n + nbar).collect();
    let mut c1 = vec![0u64; mbar * n];
    let c2 = vec![0u64; mbar * nbar];
    let mut recovered = Vec::with_capacity(columns.len());
    for (i, &j) in columns.iter().enumerate() {
        let mut state = StateVector::uniform_superposition(RegisterLayout::uniform(qd, n)?);
        for t in 0..nbar {
            let reg = if t == j {
                StateVector::phase_eigenstate(cd)?
            } else {
                StateVector::uniform_superposition(RegisterLayout::uniform(cd, 1)?)
            };
            state = state.tensor(&reg)?;
        }
        let mut failure = None;
        state.apply_additive_oracle(&registers, &targets, |digits, out| {
            for (slot, &d) in c1[i * n..(i + 1) * n].iter_mut().zip(digits) {
                *slot = d as u64;
            }
            let m = dec(&c1, &c2);
            if m.len() != mbar * nbar {
                failure.get_or_insert(m.len());
                return;
            }
            for (o, &v) in out.iter_mut().zip(&m[i * nbar..(i + 1) * nbar]) {
                *o = v as usize;
            }
        })?;
        c1[i * n..(i + 1) * n].fill(0);
        if let Some(len) = failure {
            return Err(Error::shape(format!("oracle returned {len} symbols, expected {}", mbar * nbar)));
        }
        for t in targets.iter().rev() {
            state.discard_register(*t)?;
        }
        state.inverse_qft_registers(&registers)?;
        let y = state.measure(&registers, rng)?;
        recovered.push(ZqVector::new(y.into_iter().map(|v| v as u64).collect(), q)?);
    }
    Ok(recovered)
}
