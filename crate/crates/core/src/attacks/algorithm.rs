//! One-query key recovery for rounding functions by phase kickback.

use std::borrow::Cow;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::{RegisterLayout, StateVector};

/// Counts quantum oracle calls and refuses calls past the allowance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub allowed: u64,
    pub consumed: u64,
}

impl OracleBudget {
    pub fn new(allowed: u64) -> Self {
        OracleBudget { allowed, consumed: 0 }
    }

    /// The single-query allowance every quantum attack runs under.
    pub fn single() -> Self {
        Self::new(1)
    }

    pub fn charge(&mut self) -> Result<()> {
        if self.consumed >= self.allowed {
            return Err(Error::BudgetExhausted { allowed: self.allowed });
        }
        self.consumed += 1;
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.allowed - self.consumed
    }
}

pub(crate) fn dim(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::param(format!("dimension {v} does not fit in memory")))
}

#[inline]
fn as_u64(digits: &[usize]) -> Cow<'_, [u64]> {
    if cfg!(target_pointer_width = "64") {
        Cow::Borrowed(bytemuck::cast_slice(digits))
    } else {
        Cow::Owned(digits.iter().map(|&d| d as u64).collect())
    }
}

/// Recovers `k` from one quantum query to an oracle `f: Z_q^n → Z_c`.
///
/// Prepares `Σ_x |x⟩ ⊗ |φ_c⟩`, applies `|x⟩|z⟩ ↦ |x⟩|z + f(x)⟩` once,
/// drops the output register, applies the QFT to each input register and
/// measures. `f` is evaluated classically while building the unitary; that
/// evaluation is the single query and is charged to `budget`.
pub fn bv_lrf_attack<F, R>(
    mut f: F,
    q: u64,
    n: usize,
    c: u64,
    rng: &mut R,
    budget: &mut OracleBudget,
) -> Result<Vec<u64>>
where
    F: FnMut(&[u64]) -> u64,
    R: Rng + ?Sized,
{
    if q < 2 || c < 2 || n == 0 {
        return Err(Error::param(format!("need q ≥ 2, c ≥ 2, n ≥ 1; got q={q}, c={c}, n={n}")));
    }
    let (qd, cd) = (dim(q)?, dim(c)?);
    let mut dims = vec![qd; n];
    dims.push(cd);
    RegisterLayout::new(dims)?;

    let mut state = StateVector::uniform_tensor(RegisterLayout::uniform(qd, n)?, &StateVector::phase_eigenstate(cd)?)?;
    budget.charge()?;
    let registers: Vec<usize> = (0..n).collect();
    state.apply_additive_oracle(&registers, &[n], |digits, out| {
        let v = f(&as_u64(digits));
        out[0] = if v < c { v } else { v % c } as usize;
    })?;
    state.discard_register(n)?;
    state.qft_registers(&registers)?;
    Ok(state.measure(&registers, rng)?.into_iter().map(|v| v as u64).collect())
}
