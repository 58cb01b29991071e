//! Exact state-vector simulation over products of cyclic groups `Z_{q_1} × … × Z_{q_m}`.
//!
//! Registers are qudits of arbitrary dimension. The operations are the ones
//! single-query key recovery needs: uniform superpositions, the phase
//! eigenstate used for kickback, additive and phase oracles, the QFT over
//! `Z_q`, marginal probabilities, measurement, and discarding an unentangled
//! register.

mod layout;
mod state;

pub use layout::{max_amplitudes, RegisterLayout, DEFAULT_MAX_AMPLITUDES, MAX_AMPLITUDES_ENV};
pub use state::{phase_eigenstate, uniform_superposition, StateVector, AMPLITUDE_TOLERANCE};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const TOL: f64 = AMPLITUDE_TOLERANCE;

    fn layout(dims: &[usize]) -> RegisterLayout {
        RegisterLayout::with_cap(dims.to_vec(), 1 << 20).unwrap()
    }

    fn random_state(dims: &[usize], rng: &mut ChaCha20Rng) -> StateVector {
        let l = layout(dims);
        let mut amps: Vec<Complex64> =
            (0..l.size()).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(l, amps).unwrap()
    }

    fn close(a: &StateVector, b: &StateVector) -> bool {
        a.layout() == b.layout() && a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() <= TOL)
    }

    /// Direct evaluation of the transform on one register by enumerating the
    /// full basis, kept independent of the blocked kernel.
    fn reference_dft(state: &StateVector, reg: usize, sign: f64) -> StateVector {
        let l = state.layout().clone();
        let q = l.dim(reg);
        let mut out = vec![Complex64::new(0.0, 0.0); l.size()];
        for (i, &a) in state.amplitudes().iter().enumerate() {
            let t = l.tuple_of(i);
            for y in 0..q {
                let mut u = t.clone();
                u[reg] = y;
                let phase = sign * 2.0 * PI * ((t[reg] * y) % q) as f64 / q as f64;
                out[l.index_of(&u).unwrap()] += a * Complex64::from_polar(1.0 / (q as f64).sqrt(), phase);
            }
        }
        StateVector::from_amplitudes(l, out).unwrap()
    }

    #[test]
    fn uniform_examples() {
        let s = uniform_superposition(layout(&[2]));
        assert!(s.amplitudes().iter().all(|a| (a - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < TOL));
        let s = uniform_superposition(layout(&[3, 3]));
        assert_eq!(s.amplitudes().len(), 9);
        assert!(s.amplitudes().iter().all(|a| (a.re - 1.0 / 3.0).abs() < TOL && a.im == 0.0));
        assert!((uniform_superposition(layout(&[5, 5, 5])).norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn uniform_respects_cap() {
        assert!(matches!(RegisterLayout::with_cap(vec![16; 7], 1 << 24), Err(Error::Resource { .. })));
    }

    #[test]
    fn phase_eigenstate_examples() {
        let s = phase_eigenstate(2).unwrap();
        assert!((s.amplitudes()[0] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < TOL);
        assert!((s.amplitudes()[1] - Complex64::new(-FRAC_1_SQRT_2, 0.0)).norm() < TOL);
        let s = phase_eigenstate(4).unwrap();
        let want = [(0.5, 0.0), (0.0, 0.5), (-0.5, 0.0), (0.0, -0.5)];
        for (a, (re, im)) in s.amplitudes().iter().zip(want) {
            assert!((a - Complex64::new(re, im)).norm() < TOL);
        }
        for c in 2..40 {
            let s = phase_eigenstate(c).unwrap();
            let sum: Complex64 = s.amplitudes().iter().sum();
            assert!(sum.norm() < TOL);
            assert!((s.norm_sqr() - 1.0).abs() < TOL);
        }
        assert!(phase_eigenstate(1).is_err());
    }

    #[test]
    fn additive_oracle_examples() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let psi = random_state(&[3, 4], &mut rng);
        let mut s = psi.clone();
        s.apply_additive_oracle(&[0], &[1], |_, out| out[0] = 0).unwrap();
        assert!(close(&s, &psi));

        let f = |x: &[usize]| (2 * x[0] + 1) % 4;
        let mut s = StateVector::basis(layout(&[3, 4]), &[2, 0]).unwrap();
        s.apply_additive_oracle(&[0], &[1], |x, out| out[0] = f(x)).unwrap();
        assert!((s.amplitude(&[2, f(&[2])]).unwrap().re - 1.0).abs() < TOL);

        let mut s = psi.clone();
        for _ in 0..4 {
            s.apply_additive_oracle(&[0], &[1], |x, out| out[0] = f(x)).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < TOL);
        }
        assert!(close(&s, &psi));

        assert!(s.apply_additive_oracle(&[0], &[0], |_, _| {}).is_err());
        assert!(s.apply_additive_oracle(&[0], &[2], |_, _| {}).is_err());
    }

    #[test]
    fn additive_oracle_with_interleaved_registers() {
        // inputs and targets in arbitrary register positions
        let l = layout(&[2, 3, 5, 4]);
        let f = |x: &[usize]| [(x[0] + 2 * x[1]) % 3, (x[0] * x[1] + 1) % 2];
        let mut s = uniform_superposition(l.clone());
        s.apply_additive_oracle(&[3, 2], &[1, 0], |x, out| out.copy_from_slice(&f(x))).unwrap();
        for i in 0..l.size() {
            let t = l.tuple_of(i);
            let v = f(&[t[3], t[2]]);
            let mut moved = t.clone();
            moved[1] = (t[1] + v[0]) % 3;
            moved[0] = (t[0] + v[1]) % 2;
            let mut basis = StateVector::basis(l.clone(), &t).unwrap();
            basis.apply_additive_oracle(&[3, 2], &[1, 0], |x, out| out.copy_from_slice(&f(x))).unwrap();
            assert!((basis.amplitude(&moved).unwrap().re - 1.0).abs() < TOL);
        }
        assert!((s.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn additive_oracle_single_target_in_the_middle() {
        let l = layout(&[3, 5, 2, 4]);
        let f = |x: &[usize]| (x[0] * 3 + x[1] * x[2] + 1) % 5;
        for i in 0..l.size() {
            let t = l.tuple_of(i);
            let mut s = StateVector::basis(l.clone(), &t).unwrap();
            s.apply_additive_oracle(&[3, 0, 2], &[1], |x, out| out[0] = f(x)).unwrap();
            let mut moved = t.clone();
            moved[1] = (t[1] + f(&[t[3], t[0], t[2]])) % 5;
            assert!((s.amplitude(&moved).unwrap().re - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn phase_oracle_examples() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let psi = random_state(&[5], &mut rng);
        let mut s = psi.clone();
        s.apply_phase_oracle(&[0], 3, |_| 0).unwrap();
        assert!(close(&s, &psi));

        let mut s = uniform_superposition(layout(&[2]));
        s.apply_phase_oracle(&[0], 2, |x| x[0] % 2).unwrap();
        let a = s.amplitudes();
        assert!((a[0] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < TOL);
        assert!((a[1] - Complex64::new(-FRAC_1_SQRT_2, 0.0)).norm() < TOL);
    }

    #[test]
    fn kickback_equivalence() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for q in 2..=9usize {
            for c in 2..=9usize {
                for _ in 0..50 {
                    let table: Vec<usize> = (0..q).map(|_| rng.gen_range(0..c)).collect();
                    let psi = random_state(&[q], &mut rng);
                    let eig = phase_eigenstate(c).unwrap();

                    let mut lhs = psi.tensor(&eig).unwrap();
                    lhs.apply_additive_oracle(&[0], &[1], |x, out| out[0] = table[x[0]]).unwrap();

                    let mut rhs = psi.clone();
                    rhs.apply_phase_oracle(&[0], c, |x| table[x[0]]).unwrap();
                    let rhs = rhs.tensor(&eig).unwrap();
                    assert!(close(&lhs, &rhs), "q={q} c={c}");
                }
            }
        }
    }

    #[test]
    fn qft_examples() {
        let mut s = StateVector::basis(layout(&[2]), &[0]).unwrap();
        s.qft_zq(0).unwrap();
        assert!(close(&s, &uniform_superposition(layout(&[2]))));
        let mut s = StateVector::basis(layout(&[2]), &[1]).unwrap();
        s.qft_zq(0).unwrap();
        assert!((s.amplitudes()[1] + Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < TOL);

        for q in 2..12 {
            let mut s = StateVector::basis(layout(&[q]), &[0]).unwrap();
            s.qft_zq(0).unwrap();
            assert!(close(&s, &uniform_superposition(layout(&[q]))));
            let mut u = uniform_superposition(layout(&[q]));
            u.inverse_qft_zq(0).unwrap();
            assert!(close(&u, &StateVector::basis(layout(&[q]), &[0]).unwrap()));
        }

        let mut h = StateVector::basis(layout(&[2]), &[1]).unwrap();
        h.inverse_qft_zq(0).unwrap();
        h.inverse_qft_zq(0).unwrap();
        assert!(close(&h, &StateVector::basis(layout(&[2]), &[1]).unwrap()));
    }

    #[test]
    fn qft_matches_reference_on_every_register() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for dims in [vec![3, 4, 5], vec![7, 2], vec![2, 9, 3], vec![13, 13], vec![3, 70], vec![5, 2, 67]] {
            let psi = random_state(&dims, &mut rng);
            for reg in 0..dims.len() {
                let mut s = psi.clone();
                s.qft_zq(reg).unwrap();
                assert!(close(&s, &reference_dft(&psi, reg, 1.0)));
                let mut s = psi.clone();
                s.inverse_qft_zq(reg).unwrap();
                assert!(close(&s, &reference_dft(&psi, reg, -1.0)));
            }
        }
    }

    #[test]
    fn small_dimensions_match_reference_at_every_stride() {
        // strides 1, 2, 3, 5, 8, 13 and 21 cover every lane width and remainder
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for q in 2..=17usize {
            for tail in [None, Some(2usize), Some(3), Some(5), Some(8), Some(13), Some(21)] {
                let dims: Vec<usize> = std::iter::once(q).chain(tail).collect();
                let psi = random_state(&dims, &mut rng);
                for sign in [1.0, -1.0] {
                    let mut s = psi.clone();
                    if sign > 0.0 {
                        s.qft_zq(0).unwrap();
                    } else {
                        s.inverse_qft_zq(0).unwrap();
                    }
                    assert!(close(&s, &reference_dft(&psi, 0, sign)), "q={q} stride={tail:?} sign={sign}");
                }
            }
            let psi = random_state(&[3, q], &mut rng);
            let mut s = psi.clone();
            s.qft_zq(1).unwrap();
            assert!(close(&s, &reference_dft(&psi, 1, 1.0)), "q={q} contiguous");
        }
    }

    #[test]
    fn joint_transform_matches_one_register_at_a_time() {
        // 5·40·30·30 exceeds one cache block, so registers are split between
        // the blocked and whole-state passes
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for (dims, regs) in [
            (vec![5, 40, 30, 30], vec![0, 1, 2, 3]),
            (vec![5, 40, 30, 30], vec![3, 0]),
            (vec![13, 13, 13, 13, 2], vec![0, 1, 2, 3]),
            (vec![2, 13, 13, 13, 13], vec![4, 2, 1]),
        ] {
            let psi = random_state(&dims, &mut rng);
            let mut joint = psi.clone();
            joint.qft_registers(&regs).unwrap();
            let mut seq = psi.clone();
            for &r in &regs {
                seq.qft_zq(r).unwrap();
            }
            assert!(close(&joint, &seq), "{dims:?} {regs:?}");
            joint.inverse_qft_registers(&regs).unwrap();
            assert!(close(&joint, &psi), "{dims:?} {regs:?} round trip");
        }
    }

    #[test]
    fn qft_round_trip_and_unitarity() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for q in [3usize, 4, 7, 8] {
            let psi = random_state(&[q, 3], &mut rng);
            let mut s = psi.clone();
            s.qft_zq(0).unwrap();
            s.inverse_qft_zq(0).unwrap();
            assert!(close(&s, &psi));
        }
        for q in 2..=16usize {
            let u = random_state(&[q], &mut rng);
            let v = random_state(&[q], &mut rng);
            let before = u.inner(&v).unwrap();
            let (mut fu, mut fv) = (u.clone(), v.clone());
            fu.qft_zq(0).unwrap();
            fv.qft_zq(0).unwrap();
            assert!((fu.inner(&fv).unwrap() - before).norm() < TOL);
            assert!((fu.norm_sqr() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn outcome_probabilities() {
        for q in [2usize, 5, 9] {
            let u = uniform_superposition(layout(&[q]));
            for x in 0..q {
                assert!((u.outcome_probability(&[0], &[x]).unwrap() - 1.0 / q as f64).abs() < TOL);
            }
        }
        let b = StateVector::basis(layout(&[3, 4]), &[1, 2]).unwrap();
        assert!((b.outcome_probability(&[0, 1], &[1, 2]).unwrap() - 1.0).abs() < TOL);
        assert!((b.outcome_probability(&[1], &[2]).unwrap() - 1.0).abs() < TOL);
        assert_eq!(b.outcome_probability(&[1], &[3]).unwrap(), 0.0);
        assert!(b.outcome_probability(&[1], &[4]).is_err());

        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let psi = random_state(&[3, 4, 2], &mut rng);
        let m = psi.marginal(&[2, 0]).unwrap();
        assert!((m.iter().sum::<f64>() - 1.0).abs() < TOL);
        for z in 0..2 {
            for x in 0..3 {
                let p = psi.outcome_probability(&[2, 0], &[z, x]).unwrap();
                assert!((m[z * 3 + x] - p).abs() < TOL);
            }
        }
    }

    #[test]
    fn measurement() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let b = StateVector::basis(layout(&[3, 4]), &[2, 1]).unwrap();
        for _ in 0..20 {
            assert_eq!(b.measure(&[0, 1], &mut rng).unwrap(), vec![2, 1]);
            assert_eq!(b.measure(&[1], &mut rng).unwrap(), vec![1]);
        }

        let u = uniform_superposition(layout(&[5]));
        let shots = 10_000;
        let mut counts = [0u32; 5];
        for _ in 0..shots {
            counts[u.measure(&[0], &mut rng).unwrap()[0]] += 1;
        }
        let sigma = (0.2 * 0.8 / shots as f64).sqrt();
        for c in counts {
            assert!((c as f64 / shots as f64 - 0.2).abs() <= 3.0 * sigma, "{counts:?}");
        }

        let run = |seed| {
            let mut r = ChaCha20Rng::seed_from_u64(seed);
            (0..50).map(|_| u.measure(&[0], &mut r).unwrap()[0]).collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn discard_product_register() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let psi = random_state(&[3, 2], &mut rng);
        let mut s = psi.tensor(&phase_eigenstate(4).unwrap()).unwrap();
        s.discard_register(2).unwrap();
        assert!(close(&s, &psi));

        // front register
        let mut s = phase_eigenstate(3).unwrap().tensor(&psi).unwrap();
        s.discard_register(0).unwrap();
        assert!(close(&s, &psi));

        // middle register
        let a = random_state(&[3], &mut rng);
        let b = random_state(&[4], &mut rng);
        let mut s = a.tensor(&phase_eigenstate(5).unwrap()).unwrap().tensor(&b).unwrap();
        s.discard_register(1).unwrap();
        let want = a.tensor(&b).unwrap();
        assert!((s.inner(&want).unwrap().norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn discard_after_kickback_and_entangled_failure() {
        let q = 5;
        let c = 3;
        let f = |x: &[usize]| (x[0] * x[0]) % c;
        let mut s = uniform_superposition(layout(&[q])).tensor(&phase_eigenstate(c).unwrap()).unwrap();
        s.apply_additive_oracle(&[0], &[1], |x, out| out[0] = f(x)).unwrap();
        s.discard_register(1).unwrap();
        let mut want = uniform_superposition(layout(&[q]));
        want.apply_phase_oracle(&[0], c, f).unwrap();
        assert!(close(&s, &want));

        let mut s =
            uniform_superposition(layout(&[q])).tensor(&StateVector::basis(layout(&[c]), &[0]).unwrap()).unwrap();
        s.apply_additive_oracle(&[0], &[1], |x, out| out[0] = f(x)).unwrap();
        assert_eq!(s.clone().discard_register(1), Err(Error::Entangled(1)));
        assert!(s.discard_register(0).is_err());
    }

    #[test]
    fn norm_is_preserved_by_every_operation() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        for _ in 0..20 {
            let dims = [rng.gen_range(2..6), rng.gen_range(2..6), rng.gen_range(2..6)];
            let mut s = random_state(&dims, &mut rng);
            let table: Vec<usize> = (0..dims[0] * dims[1]).map(|_| rng.gen_range(0..dims[2])).collect();
            s.apply_additive_oracle(&[0, 1], &[2], |x, out| out[0] = table[x[0] * dims[1] + x[1]]).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < TOL);
            s.apply_phase_oracle(&[1, 2], 7, |x| x[0] + 3 * x[1]).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < TOL);
            for r in 0..3 {
                s.qft_zq(r).unwrap();
                assert!((s.norm_sqr() - 1.0).abs() < TOL);
            }
        }
    }
}
