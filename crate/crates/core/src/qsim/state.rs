use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
#[cfg(target_arch = "x86_64")]
use rustfft::FftPlannerSse;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::layout::RegisterLayout;
use crate::error::{Error, Result};

/// Tolerance for normalization and factorization checks.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `e^{2πi k / m}` for `k = 0..m`, scaled by `scale`.
fn roots_of_unity(m: usize, sign: f64, scale: f64) -> Vec<Complex64> {
    (0..m).map(|k| Complex64::from_polar(scale, sign * 2.0 * PI * k as f64 / m as f64)).collect()
}

/// Contiguous blocks up to this many amplitudes (512 KiB) are transformed
/// while resident in cache.
const CACHE_BLOCK_AMPLITUDES: usize = 1 << 15;

/// A planned DFT along one register with kernel `ω_q^{±xy}/√q`. Fibers of
/// a strided register are gathered into contiguous rows a tile at a time,
/// transformed in one batch, and scattered back with the normalization
/// applied on the way out.
struct RegisterDft {
    fft: Arc<dyn Fft<f64>>,
    q: usize,
    stride: usize,
    scale: f64,
    scratch: Vec<Complex64>,
    rows: Vec<Complex64>,
    direct: Option<DirectDft>,
}

/// Picks the FFT planner for a register dimension. The AVX planner falls
/// back to scalar code for small primes, where the SSE kernels are faster.
fn plan_fft(q: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    #[cfg(target_arch = "x86_64")]
    if q <= 32 {
        if let Ok(mut sse) = FftPlannerSse::new() {
            return sse.plan_fft(q, direction);
        }
    }
    FftPlanner::new().plan_fft(q, direction)
}

impl RegisterDft {
    // tiles of TILE fibers keep the gather and scatter inside L1
    const TILE: usize = 64;

    fn new(q: usize, stride: usize, sign: f64, scale: f64) -> Self {
        // rustfft's forward kernel is e^{-2πi xy/q}
        let direction = if sign > 0.0 { FftDirection::Inverse } else { FftDirection::Forward };
        let fft = plan_fft(q, direction);
        let scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        let direct = (q <= DIRECT_MAX_Q && (stride == 1 || stride >= 8)).then(|| DirectDft::new(q, sign, scale));
        let rows = if stride == 1 && direct.is_none() { Vec::new() } else { vec![ZERO; Self::TILE * q] };
        RegisterDft { fft, q, stride, scale, scratch, rows, direct }
    }

    /// Transforms every fiber of `amps`, whose length is a multiple of
    /// `q · stride`, and multiplies by `scale`.
    fn apply(&mut self, amps: &mut [Complex64]) {
        let (q, s, scale) = (self.q, self.stride, self.scale);
        if let Some(direct) = &self.direct {
            if s > 1 {
                direct.apply(amps, s);
                return;
            }
            let t = Self::TILE;
            for tile in amps.chunks_mut(t * q) {
                let w = tile.len() / q;
                let rows = &mut self.rows[..w * q];
                for (jj, fiber) in tile.chunks_exact(q).enumerate() {
                    for (x, &v) in fiber.iter().enumerate() {
                        rows[x * w + jj] = v;
                    }
                }
                direct.apply(rows, w);
                for (jj, fiber) in tile.chunks_exact_mut(q).enumerate() {
                    for (x, v) in fiber.iter_mut().enumerate() {
                        *v = rows[x * w + jj];
                    }
                }
            }
            return;
        }
        if s == 1 {
            self.fft.process_with_scratch(amps, &mut self.scratch);
            if scale != 1.0 {
                amps.iter_mut().for_each(|a| *a *= scale);
            }
            return;
        }
        for chunk in amps.chunks_exact_mut(q * s) {
            for j0 in (0..s).step_by(Self::TILE) {
                let w = Self::TILE.min(s - j0);
                let rows = &mut self.rows[..w * q];
                for x in 0..q {
                    let src = &chunk[x * s + j0..x * s + j0 + w];
                    for (jj, &v) in src.iter().enumerate() {
                        rows[jj * q + x] = v;
                    }
                }
                self.fft.process_with_scratch(rows, &mut self.scratch);
                for y in 0..q {
                    let dst = &mut chunk[y * s + j0..y * s + j0 + w];
                    for (jj, d) in dst.iter_mut().enumerate() {
                        *d = rows[jj * q + y] * scale;
                    }
                }
            }
        }
    }
}

/// Largest register dimension handled by [`DirectDft`].
const DIRECT_MAX_Q: usize = 16;

/// Direct DFT for small `q`, vectorized across neighbouring fibers.
///
/// Pairs `x_k ± x_{q−k}` so each output pair `X_m, X_{q−m}` costs one real
/// cosine sum and one real sine sum over `⌊(q−1)/2⌋` terms.
struct DirectDft {
    q: usize,
    half: usize,
    // row m−1, column k−1, already multiplied by the output scale
    cos: Vec<f64>,
    sin: Vec<f64>,
    scale: f64,
}

impl DirectDft {
    fn new(q: usize, sign: f64, scale: f64) -> Self {
        let half = (q - 1) / 2;
        let mut cos = Vec::with_capacity(half * half);
        let mut sin = Vec::with_capacity(half * half);
        for m in 1..=half {
            for k in 1..=half {
                let t = 2.0 * PI * ((k * m) % q) as f64 / q as f64;
                cos.push(scale * t.cos());
                sin.push(scale * sign * t.sin());
            }
        }
        DirectDft { q, half, cos, sin, scale }
    }

    /// Transforms `W/2` neighbouring fibers starting at column `j0` of
    /// `block`, whose fiber `j` holds entries `x·stride + j`. Works on the
    /// interleaved `f64` view, `W` values per row.
    #[inline(always)]
    fn lanes<const W: usize>(&self, block: &mut [f64], stride: usize, j0: usize) {
        let (q, h, sc) = (self.q, self.half, self.scale);
        let row = |x: usize| 2 * (x * stride + j0);
        let load = |block: &[f64], x: usize| -> [f64; W] { block[row(x)..row(x) + W].try_into().expect("W values") };
        let x0 = load(block, 0);
        let mut a = [[0.0; W]; DIRECT_MAX_Q / 2];
        let mut b = [[0.0; W]; DIRECT_MAX_Q / 2];
        for k in 1..=h {
            let (u, v) = (load(block, k), load(block, q - k));
            for i in 0..W {
                a[k - 1][i] = u[i] + v[i];
                b[k - 1][i] = u[i] - v[i];
            }
        }
        let mid = if q % 2 == 0 { load(block, q / 2) } else { [0.0; W] };

        let mut sum = x0;
        for ak in &a[..h] {
            for i in 0..W {
                sum[i] += ak[i];
            }
        }
        for v in sum.iter_mut().zip(&mid) {
            *v.0 = (*v.0 + v.1) * sc;
        }
        block[row(0)..row(0) + W].copy_from_slice(&sum);

        if q % 2 == 0 {
            let mut alt = [0.0; W];
            for (k, ak) in a[..h].iter().enumerate() {
                let w = if k % 2 == 0 { -sc } else { sc };
                for i in 0..W {
                    alt[i] += ak[i] * w;
                }
            }
            let wm = if (q / 2) % 2 == 0 { sc } else { -sc };
            for i in 0..W {
                alt[i] += x0[i] * sc + mid[i] * wm;
            }
            block[row(q / 2)..row(q / 2) + W].copy_from_slice(&alt);
        }

        for m in 1..=h {
            let cr = &self.cos[(m - 1) * h..m * h];
            let sr = &self.sin[(m - 1) * h..m * h];
            let wm = if m % 2 == 0 { sc } else { -sc };
            let mut c = [0.0; W];
            let mut s = [0.0; W];
            for i in 0..W {
                c[i] = x0[i] * sc + if q % 2 == 0 { mid[i] * wm } else { 0.0 };
            }
            for k in 0..h {
                for i in 0..W {
                    c[i] += a[k][i] * cr[k];
                    s[i] += b[k][i] * sr[k];
                }
            }
            // X_m = c + i·s and X_{q−m} = c − i·s, with i·(re, im) = (−im, re)
            let mut lo = [0.0; W];
            let mut hi = [0.0; W];
            for t in 0..W / 2 {
                lo[2 * t] = c[2 * t] - s[2 * t + 1];
                lo[2 * t + 1] = c[2 * t + 1] + s[2 * t];
                hi[2 * t] = c[2 * t] + s[2 * t + 1];
                hi[2 * t + 1] = c[2 * t + 1] - s[2 * t];
            }
            block[row(m)..row(m) + W].copy_from_slice(&lo);
            block[row(q - m)..row(q - m) + W].copy_from_slice(&hi);
        }
    }

    /// Runs `lanes` over groups of `L` fibers, then narrower groups for
    /// the remainder. `W` must be `2L`.
    #[inline(always)]
    fn apply_generic<const L: usize, const W: usize>(&self, amps: &mut [Complex64], stride: usize) {
        let values: &mut [f64] = bytemuck::cast_slice_mut(amps);
        for block in values.chunks_exact_mut(2 * self.q * stride) {
            let mut j = 0;
            while j + L <= stride {
                self.lanes::<W>(block, stride, j);
                j += L;
            }
            if L > 8 && j + 8 <= stride {
                self.lanes::<16>(block, stride, j);
                j += 8;
            }
            if L > 4 && j + 4 <= stride {
                self.lanes::<8>(block, stride, j);
                j += 4;
            }
            while j < stride {
                self.lanes::<2>(block, stride, j);
                j += 1;
            }
        }
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx512f")]
    fn apply_avx512(&self, amps: &mut [Complex64], stride: usize) {
        self.apply_generic::<16, 32>(amps, stride)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    fn apply_avx2(&self, amps: &mut [Complex64], stride: usize) {
        self.apply_generic::<8, 16>(amps, stride)
    }

    fn apply(&self, amps: &mut [Complex64], stride: usize) {
        #[cfg(target_arch = "x86_64")]
        {
            if is_x86_feature_detected!("avx512f") {
                // SAFETY: the feature was detected at runtime
                return unsafe { self.apply_avx512(amps, stride) };
            }
            if is_x86_feature_detected!("avx2") {
                // SAFETY: the feature was detected at runtime
                return unsafe { self.apply_avx2(amps, stride) };
            }
        }
        self.apply_generic::<4, 8>(amps, stride)
    }
}

/// Cyclically shifts fiber `j` of `chunk` (entries `z·stride + j`) by
/// `shift`, using `fiber` as scratch of the fiber's length.
#[inline]
fn rotate_fiber(chunk: &mut [Complex64], fiber: &mut [Complex64], stride: usize, j: usize, shift: usize) {
    let c = fiber.len();
    for (z, v) in fiber.iter_mut().enumerate() {
        *v = chunk[z * stride + j];
    }
    for (z, &v) in fiber.iter().enumerate() {
        let nz = if z + shift >= c { z + shift - c } else { z + shift };
        chunk[nz * stride + j] = v;
    }
}

/// Mixed-radix counter over a layout's registers, last register fastest.
struct Odometer<'a> {
    dims: &'a [usize],
    digits: Vec<usize>,
}

impl<'a> Odometer<'a> {
    fn new(dims: &'a [usize]) -> Self {
        Odometer { dims, digits: vec![0; dims.len()] }
    }

    /// Advances by one and calls `on_change(register, old, new)` for every
    /// digit that moved.
    #[inline]
    fn step(&mut self, mut on_change: impl FnMut(usize, usize, usize)) {
        for r in (0..self.dims.len()).rev() {
            let old = self.digits[r];
            if old + 1 < self.dims[r] {
                self.digits[r] = old + 1;
                on_change(r, old, old + 1);
                return;
            }
            self.digits[r] = 0;
            on_change(r, old, 0);
        }
    }
}

/// Dense pure state over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Equal-weight superposition of every basis state.
    pub fn uniform_superposition(layout: RegisterLayout) -> Self {
        let a = Complex64::new(1.0 / (layout.size() as f64).sqrt(), 0.0);
        StateVector { amps: vec![a; layout.size()], layout }
    }

    /// `uniform(layout) ⊗ tail`, built in one pass.
    pub fn uniform_tensor(layout: RegisterLayout, tail: &StateVector) -> Result<Self> {
        let joint = layout.concat(&tail.layout)?;
        let u = 1.0 / (layout.size() as f64).sqrt();
        let row: Vec<Complex64> = tail.amps.iter().map(|&b| b * u).collect();
        Ok(StateVector { layout: joint, amps: row.repeat(layout.size()) })
    }

    /// The computational basis state `|tuple⟩`.
    pub fn basis(layout: RegisterLayout, tuple: &[usize]) -> Result<Self> {
        let idx = layout.index_of(tuple)?;
        let mut amps = vec![ZERO; layout.size()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(StateVector { layout, amps })
    }

    /// `(1/√c) Σ_z ω_c^z |z⟩`, the eigenstate used for phase kickback.
    pub fn phase_eigenstate(c: usize) -> Result<Self> {
        let layout = RegisterLayout::new(vec![c])?;
        let amps = roots_of_unity(c, 1.0, 1.0 / (c as f64).sqrt());
        Ok(StateVector { layout, amps })
    }

    /// Wraps explicit amplitudes; they must be normalized.
    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.size() {
            return Err(Error::shape(format!("{} amplitudes for a layout of size {}", amps.len(), layout.size())));
        }
        let state = StateVector { layout, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > AMPLITUDE_TOLERANCE {
            return Err(Error::param(format!("state has squared norm {norm}")));
        }
        Ok(state)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, tuple: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.layout.index_of(tuple)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self | other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.layout.dims() != other.layout.dims() {
            return Err(Error::shape("inner product of states with different layouts"));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `self ⊗ other`, with `other`'s registers appended after `self`'s.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amps = vec![ZERO; layout.size()];
        for (row, a) in amps.chunks_exact_mut(other.amps.len()).zip(&self.amps) {
            for (o, b) in row.iter_mut().zip(&other.amps) {
                *o = a * b;
            }
        }
        Ok(StateVector { layout, amps })
    }

    /// `|x⟩|z⟩ ↦ |x⟩|z + f(x)⟩` for every target register, where `f` reads the
    /// `inputs` registers and writes one value per target (reduced mod the
    /// target dimension).
    ///
    /// `f` is evaluated once per input tuple; the application itself is a
    /// permutation of basis states.
    pub fn apply_additive_oracle<F>(&mut self, inputs: &[usize], targets: &[usize], mut f: F) -> Result<()>
    where
        F: FnMut(&[usize], &mut [usize]),
    {
        let layout = &self.layout;
        layout.check_registers(inputs)?;
        layout.check_registers(targets)?;
        if let Some(r) = targets.iter().find(|r| inputs.contains(r)) {
            return Err(Error::param(format!("register {r} is both oracle input and target")));
        }
        let dims = layout.dims();
        let in_dims: Vec<usize> = inputs.iter().map(|&r| dims[r]).collect();
        let in_size: usize = in_dims.iter().product();
        let t = targets.len();

        if let [target] = *targets {
            let c = dims[target];
            let stride = layout.stride(target);
            let mut fiber = vec![ZERO; c];
            let natural =
                inputs.len() + 1 == dims.len() && inputs.iter().copied().eq((0..dims.len()).filter(|&r| r != target));
            if natural {
                // input tuples come in the same order as the fibers, so f is
                // evaluated on the fly
                let mut x = Odometer::new(&in_dims);
                let mut out = [0usize];
                if stride == 1 && c == 2 {
                    for pair in self.amps.chunks_exact_mut(2) {
                        f(&x.digits, &mut out);
                        x.step(|_, _, _| {});
                        // branch-free: the shift is a coin flip for typical f
                        let odd = out[0] & 1 == 1;
                        let (a, b) = (pair[0], pair[1]);
                        pair[0] = if odd { b } else { a };
                        pair[1] = if odd { a } else { b };
                    }
                    return Ok(());
                }
                if stride == 1 {
                    for chunk in self.amps.chunks_exact_mut(c) {
                        f(&x.digits, &mut out);
                        x.step(|_, _, _| {});
                        let shift = if out[0] < c { out[0] } else { out[0] % c };
                        if shift != 0 {
                            rotate_fiber(chunk, &mut fiber, 1, 0, shift);
                        }
                    }
                    return Ok(());
                }
                for chunk in self.amps.chunks_exact_mut(c * stride) {
                    for j in 0..stride {
                        f(&x.digits, &mut out);
                        x.step(|_, _, _| {});
                        let shift = if out[0] < c { out[0] } else { out[0] % c };
                        if shift != 0 {
                            rotate_fiber(chunk, &mut fiber, stride, j, shift);
                        }
                    }
                }
                return Ok(());
            }
        }

        let mut table = vec![0usize; in_size * t];
        let mut x = Odometer::new(&in_dims);
        for row in table.chunks_exact_mut(t.max(1)).take(in_size) {
            f(&x.digits, row);
            for (v, &r) in row.iter_mut().zip(targets) {
                *v %= dims[r];
            }
            x.step(|_, _, _| {});
        }

        // stride of each register inside the joint input index (0 if not an input)
        let mut in_stride = vec![0usize; dims.len()];
        let mut s = 1;
        for &r in inputs.iter().rev() {
            in_stride[r] = s;
            s *= dims[r];
        }

        if let [target] = *targets {
            // Split every index as (outer, z, inner) around the target. The
            // input index is a sum of an outer part and an inner part, and
            // each fiber over z is rotated in place.
            let c = dims[target];
            let stride = layout.stride(target);
            let contributions = |regs: std::ops::Range<usize>| -> Vec<usize> {
                let sub = &dims[regs.clone()];
                let size: usize = sub.iter().product();
                let mut odo = Odometer::new(sub);
                let mut acc = 0usize;
                let mut v = Vec::with_capacity(size);
                for _ in 0..size {
                    v.push(acc);
                    odo.step(|r, old, new| {
                        acc = acc + new * in_stride[regs.start + r] - old * in_stride[regs.start + r]
                    });
                }
                v
            };
            let outer = contributions(0..target);
            let inner = contributions(target + 1..dims.len());
            let mut fiber = vec![ZERO; c];
            for (chunk, &o) in self.amps.chunks_exact_mut(c * stride).zip(&outer) {
                for (j, &inn) in inner.iter().enumerate() {
                    let shift = table[o + inn];
                    if shift != 0 {
                        rotate_fiber(chunk, &mut fiber, stride, j, shift);
                    }
                }
            }
            return Ok(());
        }

        let mut out = vec![ZERO; self.amps.len()];
        let strides: Vec<usize> = (0..dims.len()).map(|r| layout.stride(r)).collect();
        let mut odo = Odometer::new(dims);
        let mut in_lin = 0usize;
        for (i, &amp) in self.amps.iter().enumerate() {
            let shifts = &table[in_lin * t..in_lin * t + t];
            let mut dest = i;
            for (&shift, &r) in shifts.iter().zip(targets) {
                if shift != 0 {
                    let z = odo.digits[r];
                    let nz = (z + shift) % dims[r];
                    dest = dest - z * strides[r] + nz * strides[r];
                }
            }
            out[dest] = amp;
            odo.step(|r, old, new| {
                in_lin = in_lin + new * in_stride[r] - old * in_stride[r];
            });
        }
        self.amps = out;
        Ok(())
    }

    /// Multiplies the amplitude of every basis state by `ω_c^{-f(x)}`, where
    /// `f` reads the `inputs` registers.
    pub fn apply_phase_oracle<F>(&mut self, inputs: &[usize], c: usize, mut f: F) -> Result<()>
    where
        F: FnMut(&[usize]) -> usize,
    {
        if c < 1 {
            return Err(Error::param("phase order must be positive"));
        }
        self.layout.check_registers(inputs)?;
        let phases = roots_of_unity(c, -1.0, 1.0);
        let dims = self.layout.dims().to_vec();
        let mut odo = Odometer::new(&dims);
        let mut x = vec![0usize; inputs.len()];
        for amp in self.amps.iter_mut() {
            for (xi, &r) in x.iter_mut().zip(inputs) {
                *xi = odo.digits[r];
            }
            *amp *= phases[f(&x) % c];
            odo.step(|_, _, _| {});
        }
        Ok(())
    }

    /// Quantum Fourier transform over `Z_q` on one register:
    /// `|x⟩ ↦ (1/√q) Σ_y ω_q^{xy} |y⟩`.
    pub fn qft_zq(&mut self, register: usize) -> Result<()> {
        self.apply_dft(register, 1.0)
    }

    /// Inverse transform, kernel `ω_q^{-xy}/√q`.
    pub fn inverse_qft_zq(&mut self, register: usize) -> Result<()> {
        self.apply_dft(register, -1.0)
    }

    /// QFT on several registers. Transforms on different registers
    /// commute; the ones living inside cache-sized contiguous blocks are
    /// applied block by block so the state is swept fewer times.
    pub fn qft_registers(&mut self, registers: &[usize]) -> Result<()> {
        self.apply_dfts(registers, 1.0)
    }

    pub fn inverse_qft_registers(&mut self, registers: &[usize]) -> Result<()> {
        self.apply_dfts(registers, -1.0)
    }

    fn apply_dft(&mut self, register: usize, sign: f64) -> Result<()> {
        self.apply_dfts(&[register], sign)
    }

    fn apply_dfts(&mut self, registers: &[usize], sign: f64) -> Result<()> {
        self.layout.check_registers(registers)?;
        let dims = self.layout.dims();
        let mut split = dims.len();
        let mut inner_size = 1;
        while split > 0 && inner_size * dims[split - 1] <= CACHE_BLOCK_AMPLITUDES {
            split -= 1;
            inner_size *= dims[split];
        }
        // the 1/√q factors are all applied by one strided register when
        // there is one, so no extra pass is spent on normalization
        let total: f64 = registers.iter().map(|&r| 1.0 / (dims[r] as f64).sqrt()).product();
        let carrier = registers.iter().position(|&r| self.layout.stride(r) > 1).unwrap_or(0);
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        for (i, &r) in registers.iter().enumerate() {
            let scale = if i == carrier { total } else { 1.0 };
            let dft = RegisterDft::new(dims[r], self.layout.stride(r), sign, scale);
            if r >= split {
                inner.push(dft);
            } else {
                outer.push(dft);
            }
        }
        if !inner.is_empty() {
            for chunk in self.amps.chunks_exact_mut(inner_size) {
                for dft in inner.iter_mut() {
                    dft.apply(chunk);
                }
            }
        }
        for dft in outer.iter_mut() {
            dft.apply(&mut self.amps);
        }
        Ok(())
    }

    fn check_outcome(&self, registers: &[usize], outcome: &[usize]) -> Result<()> {
        self.layout.check_registers(registers)?;
        if registers.len() != outcome.len() {
            return Err(Error::shape(format!("{} outcome labels for {} registers", outcome.len(), registers.len())));
        }
        for (&r, &o) in registers.iter().zip(outcome) {
            if o >= self.layout.dim(r) {
                return Err(Error::param(format!(
                    "label {o} outside register {r} of dimension {}",
                    self.layout.dim(r)
                )));
            }
        }
        Ok(())
    }

    /// Probability that measuring `registers` yields `outcome`.
    pub fn outcome_probability(&self, registers: &[usize], outcome: &[usize]) -> Result<f64> {
        self.check_outcome(registers, outcome)?;
        let dims = self.layout.dims().to_vec();
        let mut odo = Odometer::new(&dims);
        let mut p = 0.0;
        for amp in &self.amps {
            if registers.iter().zip(outcome).all(|(&r, &o)| odo.digits[r] == o) {
                p += amp.norm_sqr();
            }
            odo.step(|_, _, _| {});
        }
        Ok(p)
    }

    /// Full outcome distribution of `registers`, row-major in the order given.
    pub fn marginal(&self, registers: &[usize]) -> Result<Vec<f64>> {
        self.layout.check_registers(registers)?;
        let dims = self.layout.dims().to_vec();
        let size: usize = registers.iter().map(|&r| dims[r]).product();
        let mut out = vec![0.0; size];
        let mut odo = Odometer::new(&dims);
        for amp in &self.amps {
            let idx = registers.iter().fold(0, |acc, &r| acc * dims[r] + odo.digits[r]);
            out[idx] += amp.norm_sqr();
            odo.step(|_, _, _| {});
        }
        Ok(out)
    }

    /// Samples a computational-basis measurement of `registers` by inverse CDF
    /// over the dense amplitude index.
    pub fn measure<R: Rng + ?Sized>(&self, registers: &[usize], rng: &mut R) -> Result<Vec<usize>> {
        self.layout.check_registers(registers)?;
        // states are normalized, so the CDF ends at 1 up to rounding; a draw
        // past the end lands on the last nonzero amplitude
        let u = rng.gen::<f64>();
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            acc += p;
            chosen = Some(i);
            if u < acc {
                break;
            }
        }
        let idx = chosen.ok_or_else(|| Error::param("cannot measure the zero vector"))?;
        let tuple = self.layout.tuple_of(idx);
        Ok(registers.iter().map(|&r| tuple[r]).collect())
    }

    /// Removes a register that is in a product state with the rest.
    ///
    /// The factor `φ` on the register is taken from the largest amplitude and
    /// phased so that its first maximal-magnitude component is real and
    /// positive; the remaining state is the projection `⟨φ|` onto it. Fails
    /// with [`Error::Entangled`] when the residual exceeds
    /// [`AMPLITUDE_TOLERANCE`].
    pub fn discard_register(&mut self, register: usize) -> Result<()> {
        self.layout.check_register(register)?;
        let rest_layout =
            self.layout.without(register).ok_or_else(|| Error::param("cannot discard the only register"))?;
        let q = self.layout.dim(register);
        let s = self.layout.stride(register);
        let block = q * s;
        let rest_size = self.amps.len() / q;

        // some row carries at least the mean weight; any row with half of it
        // fixes φ up to scale without ill-conditioning
        let threshold = 0.5 / rest_size as f64;
        let row_of = |r: usize| (r / s) * block + r % s;
        let pick = (0..rest_size)
            .find(|&r| (0..q).map(|z| self.amps[row_of(r) + z * s].norm_sqr()).sum::<f64>() >= threshold)
            .unwrap_or(0);
        let mut phi: Vec<Complex64> = (0..q).map(|z| self.amps[row_of(pick) + z * s]).collect();
        let norm = phi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::param("cannot discard a register of the zero vector"));
        }
        let max_mag = phi.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let lead = phi.iter().position(|a| a.norm() >= max_mag - 1e-12).unwrap_or(0);
        let rot = phi[lead].conj() / phi[lead].norm();
        for a in phi.iter_mut() {
            *a = *a * rot / norm;
        }

        let phi_conj: Vec<Complex64> = phi.iter().map(|w| w.conj()).collect();
        let mut residual = 0.0;
        let mut rest_norm = 0.0;
        let mut rest = if s == 1 && q == 2 {
            let (w0, w1) = (phi_conj[0], phi_conj[1]);
            self.amps
                .chunks_exact(2)
                .map(|fiber| {
                    let p = w0 * fiber[0] + w1 * fiber[1];
                    residual += (fiber[0] - p * phi[0]).norm_sqr() + (fiber[1] - p * phi[1]).norm_sqr();
                    rest_norm += p.norm_sqr();
                    p
                })
                .collect()
        } else if s == 1 {
            self.amps
                .chunks_exact(q)
                .map(|fiber| {
                    let mut p = ZERO;
                    for (&v, &w) in fiber.iter().zip(&phi_conj) {
                        p += w * v;
                    }
                    for (&v, &w) in fiber.iter().zip(&phi) {
                        residual += (v - p * w).norm_sqr();
                    }
                    rest_norm += p.norm_sqr();
                    p
                })
                .collect()
        } else {
            vec![ZERO; rest_size]
        };
        for (chunk, out) in self.amps.chunks_exact(block).zip(rest.chunks_exact_mut(s)).filter(|_| s > 1) {
            for (z, row) in chunk.chunks_exact(s).enumerate() {
                let w = phi[z].conj();
                for (o, &v) in out.iter_mut().zip(row) {
                    *o += w * v;
                }
            }
            for (z, row) in chunk.chunks_exact(s).enumerate() {
                let w = phi[z];
                residual += out.iter().zip(row).map(|(&p, &v)| (v - p * w).norm_sqr()).sum::<f64>();
            }
            rest_norm += out.iter().map(|a| a.norm_sqr()).sum::<f64>();
        }
        if residual.sqrt() > AMPLITUDE_TOLERANCE {
            return Err(Error::Entangled(register));
        }
        if (rest_norm - 1.0).abs() > 1e-12 {
            let scale = 1.0 / rest_norm.sqrt();
            rest.iter_mut().for_each(|a| *a *= scale);
        }
        self.layout = rest_layout;
        self.amps = rest;
        Ok(())
    }
}

/// Equal superposition over `layout`.
pub fn uniform_superposition(layout: RegisterLayout) -> StateVector {
    StateVector::uniform_superposition(layout)
}

/// Single-register phase eigenstate of dimension `c`.
pub fn phase_eigenstate(c: usize) -> Result<StateVector> {
    StateVector::phase_eigenstate(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(len: usize) -> Vec<Complex64> {
        (0..len).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect()
    }

    #[test]
    fn every_lane_width_agrees_with_the_fft() {
        for q in 2..=DIRECT_MAX_Q {
            for stride in [1usize, 3, 4, 8, 9, 16, 21, 40] {
                for sign in [1.0, -1.0] {
                    let base = signal(q * stride * 2);
                    let mut want = base.clone();
                    let mut fft = RegisterDft::new(q, stride, sign, 0.5);
                    fft.direct = None;
                    if stride == 1 {
                        fft.rows = Vec::new();
                    }
                    fft.apply(&mut want);
                    let direct = DirectDft::new(q, sign, 0.5);
                    let mut got = [base.clone(), base.clone(), base.clone()];
                    direct.apply_generic::<4, 8>(&mut got[0], stride);
                    direct.apply_generic::<8, 16>(&mut got[1], stride);
                    direct.apply_generic::<16, 32>(&mut got[2], stride);
                    for g in &got {
                        let err = g.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                        assert!(err < 1e-12, "q={q} stride={stride} sign={sign} err={err}");
                    }
                }
            }
        }
    }
}
