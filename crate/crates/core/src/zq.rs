//! Arithmetic over `Z_q`: residues, vectors, matrices, the negacyclic ring
//! `Z_q[x]/(x^n + 1)`, and the noise samplers used by the LWE schemes.
//!
//! Residues are always stored in canonical form `{0, …, q-1}`. Centered
//! (signed) values only appear transiently inside [`centered_abs`] and the
//! samplers.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere in the crate. Keeps `x * y` for two
/// residues inside a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

pub(crate) fn check_modulus(q: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::param(format!("modulus must be at least 2, got {q}")));
    }
    if q > MAX_MODULUS {
        return Err(Error::param(format!("modulus {q} exceeds {MAX_MODULUS}")));
    }
    Ok(())
}

/// Reduces a signed integer into `{0, …, q-1}`.
pub fn mod_reduce(x: i64, q: u64) -> Result<u64> {
    check_modulus(q)?;
    Ok(reduce(x, q))
}

#[inline]
pub(crate) fn reduce(x: i64, q: u64) -> u64 {
    x.rem_euclid(q as i64) as u64
}

/// Distance from `x` to zero on the cycle `Z_q`, i.e. `min(x, q - x)`.
#[inline]
pub fn centered_abs(x: u64, q: u64) -> u64 {
    debug_assert!(x < q, "residue {x} not reduced mod {q}");
    x.min(q - x)
}

/// Signed representative of `x` in `(-q/2, q/2]`.
#[inline]
pub fn centered(x: u64, q: u64) -> i64 {
    if x > q / 2 {
        x as i64 - q as i64
    } else {
        x as i64
    }
}

#[inline]
pub(crate) fn add_mod(x: u64, y: u64, q: u64) -> u64 {
    let s = x + y;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(x: u64, y: u64, q: u64) -> u64 {
    if x >= y {
        x - y
    } else {
        x + q - y
    }
}

#[inline]
pub(crate) fn mul_mod(x: u64, y: u64, q: u64) -> u64 {
    (x * y) % q
}

#[inline]
pub(crate) fn neg_mod(x: u64, q: u64) -> u64 {
    if x == 0 {
        0
    } else {
        q - x
    }
}

/// `Σ x_i y_i mod q` over raw residue slices of equal length.
#[inline]
pub(crate) fn dot_mod(x: &[u64], y: &[u64], q: u64) -> u64 {
    // residues are below 2^31, so products are below 2^62 and the
    // accumulator only needs reducing when it nears the top of u64
    let mut acc = 0u64;
    for (&a, &b) in x.iter().zip(y) {
        acc += a * b;
        if acc >= 1 << 62 {
            acc %= q;
        }
    }
    acc % q
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Euler's totient by trial factorization.
pub fn totient(q: u64) -> u64 {
    let mut n = q;
    let mut phi = q;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// True iff some entry of `k` is coprime to its modulus.
pub fn has_unit_entry(k: &ZqVector) -> bool {
    k.entries.iter().any(|&e| gcd(e, k.q) == 1)
}

/// A vector over `Z_q` with canonical entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZqVector {
    q: u64,
    entries: Vec<u64>,
}

impl ZqVector {
    pub fn new(entries: Vec<u64>, q: u64) -> Result<Self> {
        check_modulus(q)?;
        if let Some(bad) = entries.iter().find(|&&e| e >= q) {
            return Err(Error::param(format!("entry {bad} is not reduced mod {q}")));
        }
        Ok(ZqVector { q, entries })
    }

    /// Reduces arbitrary signed entries.
    pub fn from_signed(entries: &[i64], q: u64) -> Result<Self> {
        check_modulus(q)?;
        Ok(ZqVector { q, entries: entries.iter().map(|&x| reduce(x, q)).collect() })
    }

    pub fn zeros(len: usize, q: u64) -> Result<Self> {
        Self::new(vec![0; len], q)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, q: u64, rng: &mut R) -> Result<Self> {
        check_modulus(q)?;
        Ok(ZqVector { q, entries: (0..len).map(|_| rng.gen_range(0..q)).collect() })
    }

    pub(crate) fn from_raw(entries: Vec<u64>, q: u64) -> Self {
        debug_assert!(entries.iter().all(|&e| e < q));
        ZqVector { q, entries }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u64> {
        self.entries
    }

    fn check_compatible(&self, other: &ZqVector) -> Result<()> {
        if self.q != other.q || self.len() != other.len() {
            return Err(Error::shape(format!(
                "vectors of length {} mod {} and length {} mod {}",
                self.len(),
                self.q,
                other.len(),
                other.q
            )));
        }
        Ok(())
    }

    pub fn inner_product(&self, other: &ZqVector) -> Result<u64> {
        self.check_compatible(other)?;
        Ok(dot_mod(&self.entries, &other.entries, self.q))
    }

    pub fn add(&self, other: &ZqVector) -> Result<ZqVector> {
        self.check_compatible(other)?;
        let q = self.q;
        Ok(Self::from_raw(self.entries.iter().zip(&other.entries).map(|(&a, &b)| add_mod(a, b, q)).collect(), q))
    }

    pub fn sub(&self, other: &ZqVector) -> Result<ZqVector> {
        self.check_compatible(other)?;
        let q = self.q;
        Ok(Self::from_raw(self.entries.iter().zip(&other.entries).map(|(&a, &b)| sub_mod(a, b, q)).collect(), q))
    }

    pub fn neg(&self) -> ZqVector {
        Self::from_raw(self.entries.iter().map(|&a| neg_mod(a, self.q)).collect(), self.q)
    }

    pub fn scale(&self, s: u64) -> ZqVector {
        let s = s % self.q;
        Self::from_raw(self.entries.iter().map(|&a| mul_mod(a, s, self.q)).collect(), self.q)
    }
}

/// Inner product of two vectors mod their common modulus.
pub fn inner_product(x: &ZqVector, y: &ZqVector) -> Result<u64> {
    x.inner_product(y)
}

/// A dense row-major matrix over `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZqMatrix {
    q: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ZqMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u64>, q: u64) -> Result<Self> {
        check_modulus(q)?;
        if data.len() != rows * cols {
            return Err(Error::shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().find(|&&e| e >= q) {
            return Err(Error::param(format!("entry {bad} is not reduced mod {q}")));
        }
        Ok(ZqMatrix { q, rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize, q: u64) -> Result<Self> {
        Self::new(rows, cols, vec![0; rows * cols], q)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, q: u64, rng: &mut R) -> Result<Self> {
        check_modulus(q)?;
        let data = (0..rows * cols).map(|_| rng.gen_range(0..q)).collect();
        Ok(ZqMatrix { q, rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<u64>, q: u64) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        ZqMatrix { q, rows, cols, data }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.data[i * self.cols + j] = value % self.q;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ZqVector {
        ZqVector::from_raw((0..self.rows).map(|i| self.get(i, j)).collect(), self.q)
    }

    pub fn mul(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        if self.q != other.q || self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let q = self.q;
        let mut out = vec![0u64; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let dst = &mut out[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d = (*d + a * b) % q;
                }
            }
        }
        Ok(ZqMatrix::from_raw(self.rows, other.cols, out, q))
    }

    /// `A · x`.
    pub fn mul_vec(&self, x: &ZqVector) -> Result<ZqVector> {
        if self.q != x.q || self.cols != x.len() {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(ZqVector::from_raw((0..self.rows).map(|i| dot_mod(self.row(i), &x.entries, self.q)).collect(), self.q))
    }

    /// `vᵀ · A` for a 0/1 (or any small integer) row vector `v`.
    pub fn left_mul_vec(&self, v: &[u64]) -> Result<ZqVector> {
        if v.len() != self.rows {
            return Err(Error::shape(format!("row vector of length {} against {} rows", v.len(), self.rows)));
        }
        let q = self.q;
        let mut out = vec![0u64; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            let vi = vi % q;
            if vi == 0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = (*o + vi * a) % q;
            }
        }
        Ok(ZqVector::from_raw(out, q))
    }

    pub fn add(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        self.zip_with(other, add_mod)
    }

    pub fn sub(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        self.zip_with(other, sub_mod)
    }

    fn zip_with(&self, other: &ZqMatrix, op: fn(u64, u64, u64) -> u64) -> Result<ZqMatrix> {
        if self.q != other.q || self.rows != other.rows || self.cols != other.cols {
            return Err(Error::shape(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let q = self.q;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b, q)).collect();
        Ok(ZqMatrix::from_raw(self.rows, self.cols, data, q))
    }
}

/// An element of `Z_q[x]/(x^n + 1)`, coefficient of `x^0` first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingPoly {
    q: u64,
    coeffs: Vec<u64>,
}

impl RingPoly {
    pub fn new(coeffs: Vec<u64>, q: u64) -> Result<Self> {
        check_modulus(q)?;
        if !coeffs.len().is_power_of_two() {
            return Err(Error::param(format!("ring degree {} is not a power of two", coeffs.len())));
        }
        if let Some(bad) = coeffs.iter().find(|&&c| c >= q) {
            return Err(Error::param(format!("coefficient {bad} is not reduced mod {q}")));
        }
        Ok(RingPoly { q, coeffs })
    }

    pub fn zero(n: usize, q: u64) -> Result<Self> {
        Self::new(vec![0; n], q)
    }

    pub fn constant(value: u64, n: usize, q: u64) -> Result<Self> {
        let mut coeffs = vec![0; n];
        if n > 0 {
            coeffs[0] = value % q.max(1);
        }
        Self::new(coeffs, q)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, q: u64, rng: &mut R) -> Result<Self> {
        Self::new((0..n).map(|_| rng.gen_range(0..q.max(1))).collect(), q)
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len()
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> u64 {
        self.coeffs[0]
    }

    fn check_compatible(&self, other: &RingPoly) -> Result<()> {
        if self.q != other.q || self.coeffs.len() != other.coeffs.len() {
            return Err(Error::shape(format!(
                "ring elements of degree {} mod {} and degree {} mod {}",
                self.coeffs.len(),
                self.q,
                other.coeffs.len(),
                other.q
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingPoly) -> Result<RingPoly> {
        self.check_compatible(other)?;
        let q = self.q;
        Ok(RingPoly { q, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| add_mod(a, b, q)).collect() })
    }

    pub fn sub(&self, other: &RingPoly) -> Result<RingPoly> {
        self.check_compatible(other)?;
        let q = self.q;
        Ok(RingPoly { q, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| sub_mod(a, b, q)).collect() })
    }

    pub fn mul(&self, other: &RingPoly) -> Result<RingPoly> {
        negacyclic_mul(self, other)
    }
}

/// Schoolbook product in `Z_q[x]/(x^n + 1)`: coefficients that wrap past
/// `x^{n-1}` come back with their sign flipped.
pub fn negacyclic_mul(p1: &RingPoly, p2: &RingPoly) -> Result<RingPoly> {
    p1.check_compatible(p2)?;
    let n = p1.coeffs.len();
    let q = p1.q;
    let mut out = vec![0u64; n];
    for (i, &a) in p1.coeffs.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in p2.coeffs.iter().enumerate() {
            let t = mul_mod(a, b, q);
            let k = i + j;
            if k < n {
                out[k] = add_mod(out[k], t, q);
            } else {
                out[k - n] = sub_mod(out[k - n], t, q);
            }
        }
    }
    Ok(RingPoly { q, coeffs: out })
}

/// Constant coefficient of `u · s` in the negacyclic ring without forming the
/// full product: `u_0 s_0 - Σ_{j≥1} u_j s_{n-j}`.
#[inline]
pub(crate) fn negacyclic_constant_term(u: &[u64], s: &[u64], q: u64) -> u64 {
    let n = u.len();
    let mut acc = u[0] * s[0];
    for j in 1..n {
        // x^n = −1 wraps the product u_j·s_{n−j} onto the constant term negated
        acc += u[j] * neg_mod(s[n - j], q);
        if acc >= 1 << 62 {
            acc %= q;
        }
    }
    acc % q
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ErrorKind {
    /// Uniform over the centered integers `[-η, η]`.
    BoundedUniform,
    /// `round(N(0, σ²))`, resampled until the magnitude is at most `η`.
    RoundedGaussian { sigma: f64 },
}

/// A discrete symmetric noise distribution over `Z_q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorDistribution {
    pub kind: ErrorKind,
    pub eta: u64,
    pub q: u64,
}

impl ErrorDistribution {
    pub fn bounded_uniform(eta: u64, q: u64) -> Result<Self> {
        check_modulus(q)?;
        Ok(ErrorDistribution { kind: ErrorKind::BoundedUniform, eta, q })
    }

    /// Rounded Gaussian with `σ = η / 2`, cut off at `η`.
    pub fn rounded_gaussian(eta: u64, q: u64) -> Result<Self> {
        Self::rounded_gaussian_with_sigma(eta, eta as f64 / 2.0, q)
    }

    pub fn rounded_gaussian_with_sigma(eta: u64, sigma: f64, q: u64) -> Result<Self> {
        check_modulus(q)?;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::param(format!("gaussian width {sigma} must be finite and nonnegative")));
        }
        Ok(ErrorDistribution { kind: ErrorKind::RoundedGaussian { sigma }, eta, q })
    }

    /// Draws a centered value with `|e| ≤ η`.
    pub fn sample_centered<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let eta = self.eta as i64;
        if eta == 0 {
            return 0;
        }
        match self.kind {
            ErrorKind::BoundedUniform => rng.gen_range(-eta..=eta),
            ErrorKind::RoundedGaussian { sigma } => {
                if sigma == 0.0 {
                    return 0;
                }
                let normal = Normal::new(0.0, sigma).expect("validated width");
                loop {
                    let e = normal.sample(rng).round() as i64;
                    if e.abs() <= eta {
                        return e;
                    }
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        reduce(self.sample_centered(rng), self.q)
    }

    pub fn sample_vector<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> ZqVector {
        ZqVector::from_raw((0..len).map(|_| self.sample(rng)).collect(), self.q)
    }

    pub fn sample_matrix<R: Rng + ?Sized>(&self, rows: usize, cols: usize, rng: &mut R) -> ZqMatrix {
        ZqMatrix::from_raw(rows, cols, (0..rows * cols).map(|_| self.sample(rng)).collect(), self.q)
    }

    pub fn sample_poly<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<RingPoly> {
        RingPoly::new((0..n).map(|_| self.sample(rng)).collect(), self.q)
    }

    /// Probability mass of the centered value `e`.
    pub fn probability(&self, e: i64) -> f64 {
        let eta = self.eta as i64;
        if e.abs() > eta {
            return 0.0;
        }
        if eta == 0 {
            return 1.0;
        }
        match self.kind {
            ErrorKind::BoundedUniform => 1.0 / (2 * eta + 1) as f64,
            ErrorKind::RoundedGaussian { sigma } => {
                if sigma == 0.0 {
                    return if e == 0 { 1.0 } else { 0.0 };
                }
                let mass = |k: i64| {
                    let lo = (k as f64 - 0.5) / (sigma * std::f64::consts::SQRT_2);
                    let hi = (k as f64 + 0.5) / (sigma * std::f64::consts::SQRT_2);
                    0.5 * (libm::erf(hi) - libm::erf(lo))
                };
                let total: f64 = (-eta..=eta).map(mass).sum();
                mass(e) / total
            }
        }
    }
}

/// Draws one noise sample from `dist`.
pub fn sample_error<R: Rng + ?Sized>(dist: &ErrorDistribution, rng: &mut R) -> u64 {
    dist.sample(rng)
}

/// A uniformly random binary vector of length `m` with exactly `⌊m/2⌋` ones.
pub fn sample_hamming_vector<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<u64> {
    let mut v = vec![0u64; m];
    for i in rand::seq::index::sample(rng, m, m / 2).iter() {
        v[i] = 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn mod_reduce_examples() {
        assert_eq!(mod_reduce(-1, 7).unwrap(), 6);
        assert_eq!(mod_reduce(0, 5).unwrap(), 0);
        assert_eq!(mod_reduce(13, 5).unwrap(), 3);
        assert!(matches!(mod_reduce(3, 1), Err(Error::Parameter(_))));
        assert!(mod_reduce(3, 0).is_err());
    }

    #[test]
    fn centered_abs_examples() {
        assert_eq!(centered_abs(6, 7), 1);
        assert_eq!(centered_abs(3, 7), 3);
        assert_eq!(centered_abs(0, 9), 0);
    }

    #[test]
    fn inner_product_examples() {
        let v = |e: &[u64], q| ZqVector::new(e.to_vec(), q).unwrap();
        assert_eq!(inner_product(&v(&[1, 0], 7), &v(&[5, 3], 7)).unwrap(), 5);
        assert_eq!(inner_product(&v(&[0, 0, 0], 7), &v(&[5, 3, 2], 7)).unwrap(), 0);
        assert_eq!(inner_product(&v(&[2, 3], 5), &v(&[3, 4], 5)).unwrap(), 3);
        assert!(matches!(inner_product(&v(&[1, 2], 5), &v(&[1, 2, 3], 5)), Err(Error::Shape(_))));
        assert!(inner_product(&v(&[1, 2], 5), &v(&[1, 2], 7)).is_err());
    }

    #[test]
    fn negacyclic_examples() {
        let n = 4;
        let q = 5;
        let p = RingPoly::new(vec![3, 1, 4, 1], q).unwrap();
        let one = RingPoly::constant(1, n, q).unwrap();
        assert_eq!(negacyclic_mul(&one, &p).unwrap(), p);

        let x = RingPoly::new(vec![0, 1, 0, 0], q).unwrap();
        let x3 = RingPoly::new(vec![0, 0, 0, 1], q).unwrap();
        assert_eq!(negacyclic_mul(&x, &x3).unwrap().coeffs(), &[4, 0, 0, 0]);

        let a = RingPoly::new(vec![1, 1], 7).unwrap();
        let b = RingPoly::new(vec![2, 3], 7).unwrap();
        assert_eq!(negacyclic_mul(&a, &b).unwrap().coeffs(), &[6, 5]);

        assert!(RingPoly::new(vec![1, 2, 3], 7).is_err());
        let c = RingPoly::new(vec![1, 2, 3, 4], 7).unwrap();
        assert!(matches!(negacyclic_mul(&a, &c), Err(Error::Shape(_))));
    }

    fn schoolbook_then_fold(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let n = a.len();
        let mut full = vec![0i64; 2 * n];
        for i in 0..n {
            for j in 0..n {
                full[i + j] += (a[i] * b[j]) as i64;
            }
        }
        (0..n).map(|k| (full[k] - full[k + n]).rem_euclid(q as i64) as u64).collect()
    }

    #[test]
    fn negacyclic_matches_fold_reference() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for n in [2usize, 4, 8] {
            for q in 2..=17u64 {
                for _ in 0..100 {
                    let a = RingPoly::random(n, q, &mut rng).unwrap();
                    let b = RingPoly::random(n, q, &mut rng).unwrap();
                    let got = negacyclic_mul(&a, &b).unwrap();
                    assert_eq!(got.coeffs(), schoolbook_then_fold(a.coeffs(), b.coeffs(), q).as_slice());
                    assert_eq!(got.constant_term(), negacyclic_constant_term(a.coeffs(), b.coeffs(), q));
                }
            }
        }
    }

    #[test]
    fn sample_error_support() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let zero = ErrorDistribution::bounded_uniform(0, 7).unwrap();
        assert!((0..100).all(|_| sample_error(&zero, &mut rng) == 0));
        let one = ErrorDistribution::bounded_uniform(1, 7).unwrap();
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[sample_error(&one, &mut rng) as usize] = true;
        }
        assert_eq!(seen, [true, true, false, false, false, false, true]);
        let g = ErrorDistribution::rounded_gaussian(3, 17).unwrap();
        for _ in 0..1000 {
            assert!(centered(sample_error(&g, &mut rng), 17).abs() <= 3);
        }
    }

    #[test]
    fn sample_error_mean_is_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let draws = 100_000;
        for dist in
            [ErrorDistribution::bounded_uniform(4, 97).unwrap(), ErrorDistribution::rounded_gaussian(6, 97).unwrap()]
        {
            let samples: Vec<f64> = (0..draws).map(|_| dist.sample_centered(&mut rng) as f64).collect();
            let mean = samples.iter().sum::<f64>() / draws as f64;
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws as f64;
            let sigma = (var / draws as f64).sqrt();
            assert!(mean.abs() <= 3.0 * sigma, "mean {mean} vs 3σ {}", 3.0 * sigma);
        }
    }

    #[test]
    fn distribution_is_symmetric() {
        for dist in
            [ErrorDistribution::bounded_uniform(3, 11).unwrap(), ErrorDistribution::rounded_gaussian(5, 11).unwrap()]
        {
            let total: f64 = (-5..=5).map(|e| dist.probability(e)).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for e in 0..=5 {
                assert_eq!(dist.probability(e), dist.probability(-e));
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let dist = ErrorDistribution::rounded_gaussian(4, 31).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..64).map(|_| sample_error(&dist, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn hamming_vector_weight() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        assert_eq!(sample_hamming_vector(1, &mut rng), vec![0]);
        for _ in 0..50 {
            assert_eq!(sample_hamming_vector(4, &mut rng).iter().sum::<u64>(), 2);
            assert_eq!(sample_hamming_vector(9, &mut rng).iter().sum::<u64>(), 4);
        }
    }

    #[test]
    fn hamming_vector_positions_are_uniform() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let m = 6;
        let draws = 10_000;
        let mut counts = vec![0u32; m];
        for _ in 0..draws {
            for (c, b) in counts.iter_mut().zip(sample_hamming_vector(m, &mut rng)) {
                *c += b as u32;
            }
        }
        let sigma = (0.25 / draws as f64).sqrt();
        for c in counts {
            let p = c as f64 / draws as f64;
            assert!((p - 0.5).abs() <= 3.0 * sigma, "frequency {p}");
        }
    }

    #[test]
    fn unit_entries() {
        let v = |e: &[u64], q| ZqVector::new(e.to_vec(), q).unwrap();
        assert!(has_unit_entry(&v(&[0, 0, 1], 8)));
        assert!(!has_unit_entry(&v(&[2, 4, 6], 8)));
        assert!(!has_unit_entry(&v(&[0, 0, 0], 13)));
    }

    #[test]
    fn totient_examples() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(7), 6);
        assert_eq!(totient(12), 4);
        for q in 1..200u64 {
            let brute = (1..=q).filter(|&x| gcd(x, q) == 1).count() as u64;
            assert_eq!(totient(q), brute, "q = {q}");
        }
    }

    #[test]
    fn matrix_products() {
        let q = 11;
        let a = ZqMatrix::new(2, 3, vec![1, 2, 3, 4, 5, 6], q).unwrap();
        let b = ZqMatrix::new(3, 1, vec![1, 0, 10], q).unwrap();
        assert_eq!(a.mul(&b).unwrap().data(), &[(1 + 30) % 11, (4 + 60) % 11]);
        let x = ZqVector::new(vec![1, 0, 10], q).unwrap();
        assert_eq!(a.mul_vec(&x).unwrap().entries(), &[9, 9]);
        assert_eq!(a.left_mul_vec(&[1, 1]).unwrap().entries(), &[5, 7, 9]);
        assert!(b.mul(&b).is_err());
    }

    proptest! {
        #[test]
        fn mod_reduce_is_idempotent(x in any::<i32>(), q in 2u64..5000) {
            let r = mod_reduce(x as i64, q).unwrap();
            prop_assert!(r < q);
            prop_assert_eq!(mod_reduce(r as i64, q).unwrap(), r);
            prop_assert_eq!((x as i64 - r as i64).rem_euclid(q as i64), 0);
        }

        #[test]
        fn centered_abs_is_reflection_invariant(q in 2u64..5000, x in any::<u64>()) {
            let x = x % q;
            prop_assert_eq!(centered_abs(x, q), centered_abs((q - x) % q, q));
            prop_assert!(centered_abs(x, q) <= q / 2);
        }

        #[test]
        fn inner_product_is_bilinear(
            q in 2u64..200,
            seed in any::<u64>(),
            s in any::<u64>(),
            len in 1usize..8,
        ) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let x = ZqVector::random(len, q, &mut rng).unwrap();
            let y = ZqVector::random(len, q, &mut rng).unwrap();
            let z = ZqVector::random(len, q, &mut rng).unwrap();
            let lhs = x.add(&y).unwrap().inner_product(&z).unwrap();
            let rhs = add_mod(x.inner_product(&z).unwrap(), y.inner_product(&z).unwrap(), q);
            prop_assert_eq!(lhs, rhs);
            let scaled = x.scale(s).inner_product(&z).unwrap();
            prop_assert_eq!(scaled, mul_mod(s % q, x.inner_product(&z).unwrap(), q));
        }
    }
}
