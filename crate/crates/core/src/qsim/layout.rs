use crate::error::{Error, Result};

/// Amplitude budget used when neither the caller nor the environment sets one.
pub const DEFAULT_MAX_AMPLITUDES: usize = 1 << 24;

/// Environment variable overriding [`DEFAULT_MAX_AMPLITUDES`].
pub const MAX_AMPLITUDES_ENV: &str = "LRFKIT_MAX_AMPLITUDES";

/// Current amplitude cap: the environment override if it parses, otherwise
/// the default.
pub fn max_amplitudes() -> usize {
    std::env::var(MAX_AMPLITUDES_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_AMPLITUDES)
}

/// Per-register dimensions of a product of cyclic groups, with row-major
/// strides (the last register varies fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl RegisterLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, max_amplitudes())
    }

    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::param("a layout needs at least one register"));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::param(format!("register dimension {d} is below 2")));
        }
        let requested = dims.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
        if requested > cap as u128 {
            return Err(Error::Resource { requested, cap });
        }
        let mut strides = vec![1usize; dims.len()];
        for r in (0..dims.len() - 1).rev() {
            strides[r] = strides[r + 1] * dims[r + 1];
        }
        Ok(RegisterLayout { size: requested as usize, dims, strides })
    }

    /// `count` copies of a `q`-dimensional register.
    pub fn uniform(q: usize, count: usize) -> Result<Self> {
        Self::new(vec![q; count])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, register: usize) -> usize {
        self.dims[register]
    }

    pub fn stride(&self, register: usize) -> usize {
        self.strides[register]
    }

    pub fn num_registers(&self) -> usize {
        self.dims.len()
    }

    /// Total number of amplitudes.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn index_of(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.dims.len() {
            return Err(Error::shape(format!("tuple of length {} for {} registers", tuple.len(), self.dims.len())));
        }
        let mut idx = 0;
        for ((&t, &d), &s) in tuple.iter().zip(&self.dims).zip(&self.strides) {
            if t >= d {
                return Err(Error::param(format!("label {t} outside a register of dimension {d}")));
            }
            idx += t * s;
        }
        Ok(idx)
    }

    pub fn tuple_of(&self, mut index: usize) -> Vec<usize> {
        debug_assert!(index < self.size);
        let mut out = vec![0; self.dims.len()];
        for r in (0..self.dims.len()).rev() {
            out[r] = index % self.dims[r];
            index /= self.dims[r];
        }
        out
    }

    pub(crate) fn check_register(&self, register: usize) -> Result<()> {
        if register >= self.dims.len() {
            return Err(Error::param(format!("register {register} out of range for {} registers", self.dims.len())));
        }
        Ok(())
    }

    /// Checks that `registers` are valid and pairwise distinct.
    pub(crate) fn check_registers(&self, registers: &[usize]) -> Result<()> {
        for (i, &r) in registers.iter().enumerate() {
            self.check_register(r)?;
            if registers[..i].contains(&r) {
                return Err(Error::param(format!("register {r} listed twice")));
            }
        }
        Ok(())
    }

    /// Layout with `register` removed. Never larger, so no cap check.
    pub(crate) fn without(&self, register: usize) -> Option<RegisterLayout> {
        if self.dims.len() == 1 {
            return None;
        }
        let mut dims = self.dims.clone();
        dims.remove(register);
        Some(Self::with_cap(dims, usize::MAX).expect("sub-layout of a valid layout"))
    }

    pub(crate) fn concat(&self, other: &RegisterLayout) -> Result<RegisterLayout> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_tuple_round_trip() {
        for dims in [vec![2], vec![3, 3], vec![5, 2, 7], vec![4, 3, 2, 5], vec![10, 10, 10, 10]] {
            let layout = RegisterLayout::with_cap(dims.clone(), 1 << 20).unwrap();
            assert!(layout.size() <= 10_000);
            let mut seen = std::collections::HashSet::new();
            for i in 0..layout.size() {
                let t = layout.tuple_of(i);
                assert!(t.iter().zip(&dims).all(|(a, d)| a < d));
                assert_eq!(layout.index_of(&t).unwrap(), i);
                assert!(seen.insert(t));
            }
        }
    }

    #[test]
    fn row_major_order() {
        let layout = RegisterLayout::with_cap(vec![3, 4], 100).unwrap();
        assert_eq!(layout.index_of(&[1, 2]).unwrap(), 6);
        assert_eq!(layout.stride(0), 4);
        assert_eq!(layout.stride(1), 1);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            RegisterLayout::with_cap(vec![2; 11], 1024),
            Err(Error::Resource { requested: 2048, cap: 1024 })
        ));
        assert!(RegisterLayout::with_cap(vec![2; 10], 1024).is_ok());
        assert!(RegisterLayout::with_cap(vec![1, 2], 1024).is_err());
        assert!(RegisterLayout::with_cap(vec![], 1024).is_err());
    }

    #[test]
    fn bad_labels_rejected() {
        let layout = RegisterLayout::with_cap(vec![3, 3], 100).unwrap();
        assert!(layout.index_of(&[3, 0]).is_err());
        assert!(layout.index_of(&[0]).is_err());
    }
}
