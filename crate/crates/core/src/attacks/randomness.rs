//! Key recovery when the adversary controls the encryption randomness in
//! superposition: the oracle maps `|m, a, z⟩ ↦ |m, a, z + ⟨a,k⟩ + m⌊q/2⌋ + e⟩`.

use rand::Rng;

use super::algorithm::{dim, OracleBudget};
use crate::error::{Error, Result};
use crate::qsim::{RegisterLayout, StateVector};
use crate::zq::{add_mod, dot_mod, reduce, ErrorDistribution, ZqVector};

/// Randomness-access encryption with one error value shared by every
/// branch of the superposition.
#[derive(Debug, Clone)]
pub struct SharedErrorOracle {
    key: ZqVector,
    error: u64,
}

impl SharedErrorOracle {
    pub fn new(key: ZqVector, error: i64) -> Self {
        let error = reduce(error, key.modulus());
        SharedErrorOracle { key, error }
    }

    pub fn sample<R: Rng + ?Sized>(key: ZqVector, chi: &ErrorDistribution, rng: &mut R) -> Self {
        let e = chi.sample_centered(rng);
        Self::new(key, e)
    }

    pub fn encrypt(&self, m: u8, a: &[u64]) -> u64 {
        let q = self.key.modulus();
        let body = add_mod(dot_mod(a, self.key.entries(), q), m as u64 * (q / 2), q);
        add_mod(body, self.error, q)
    }
}

/// Randomness-access encryption where every `a` carries its own error
/// `e_a ← χ`, fixed for the lifetime of the oracle.
#[derive(Debug, Clone)]
pub struct IidErrorOracle {
    key: ZqVector,
    errors: Vec<u64>,
}

impl IidErrorOracle {
    pub fn sample<R: Rng + ?Sized>(key: ZqVector, chi: &ErrorDistribution, rng: &mut R) -> Result<Self> {
        let q = key.modulus();
        let size = (q as u128).checked_pow(key.len() as u32).unwrap_or(u128::MAX);
        let size = usize::try_from(size)
            .ok()
            .filter(|&s| s <= crate::qsim::max_amplitudes())
            .ok_or(Error::Resource { requested: size, cap: crate::qsim::max_amplitudes() })?;
        let errors = (0..size).map(|_| reduce(chi.sample_centered(rng), q)).collect();
        Ok(IidErrorOracle { key, errors })
    }

    pub fn encrypt(&self, m: u8, a: &[u64]) -> u64 {
        let q = self.key.modulus();
        let index = a.iter().fold(0usize, |acc, &v| acc * q as usize + v as usize);
        let body = add_mod(dot_mod(a, self.key.entries(), q), m as u64 * (q / 2), q);
        add_mod(body, self.errors[index], q)
    }
}

/// One quantum query with the message register fixed at `|0⟩`, the
/// randomness register uniform and the ciphertext register in the phase
/// eigenstate of `Z_q`. The QFT on the randomness register gives `k`
/// exactly when the error does not depend on `a`.
pub fn attack_randomness_access<F, R>(
    mut enc: F,
    q: u64,
    n: usize,
    rng: &mut R,
    budget: &mut OracleBudget,
) -> Result<ZqVector>
where
    F: FnMut(u8, &[u64]) -> u64,
    R: Rng + ?Sized,
{
    if q < 2 || n == 0 {
        return Err(Error::param(format!("need q ≥ 2 and n ≥ 1, got q={q}, n={n}")));
    }
    let qd = dim(q)?;
    let mut dims = vec![2];
    dims.extend(std::iter::repeat_n(qd, n + 1));
    RegisterLayout::new(dims)?;

    let message = StateVector::basis(RegisterLayout::new(vec![2])?, &[0])?;
    let mut state = message
        .tensor(&StateVector::uniform_superposition(RegisterLayout::uniform(qd, n)?))?
        .tensor(&StateVector::phase_eigenstate(qd)?)?;
    budget.charge()?;
    let inputs: Vec<usize> = (0..=n).collect();
    let mut a = vec![0u64; n];
    state.apply_additive_oracle(&inputs, &[n + 1], |digits, out| {
        for (ai, &d) in a.iter_mut().zip(&digits[1..]) {
            *ai = d as u64;
        }
        out[0] = (enc(digits[0] as u8, &a) % q) as usize;
    })?;
    state.discard_register(n + 1)?;
    state.discard_register(0)?;
    let registers: Vec<usize> = (0..n).collect();
    state.qft_registers(&registers)?;
    let y = state.measure(&registers, rng)?;
    ZqVector::new(y.into_iter().map(|v| v as u64).collect(), q)
}

/// [`attack_randomness_access`] against a shared-error oracle; succeeds with
/// probability 1.
pub fn attack_ra_shared_error<R: Rng + ?Sized>(
    oracle: &SharedErrorOracle,
    q: u64,
    n: usize,
    rng: &mut R,
    budget: &mut OracleBudget,
) -> Result<ZqVector> {
    attack_randomness_access(|m, a| oracle.encrypt(m, a), q, n, rng, budget)
}

/// [`attack_randomness_access`] against an oracle with independent
/// per-branch errors.
pub fn attack_ra_iid<R: Rng + ?Sized>(
    oracle: &IidErrorOracle,
    q: u64,
    n: usize,
    rng: &mut R,
    budget: &mut OracleBudget,
) -> Result<ZqVector> {
    attack_randomness_access(|m, a| oracle.encrypt(m, a), q, n, rng, budget)
}
