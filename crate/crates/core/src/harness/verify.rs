//! Cross-module invariant checks with a pass/fail table.

use std::fmt::Write as _;
use web_time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::attacks::{brute_force_success_fn, exact_success_probability, run_trial, AttackKind, AttackParams};
use crate::error::Result;
use crate::lrf::{block_index, LrfParams};
use crate::qsim::{RegisterLayout, StateVector};
use crate::schemes::{
    frodo_decrypt, frodo_default_eta, frodo_encode, frodo_encrypt, frodo_keygen, pke_decrypt, pke_default_eta,
    pke_default_m, pke_encrypt, pke_keygen, ringlwe_decrypt, ringlwe_default_eta, ringlwe_encrypt, ringlwe_keygen,
    ske_decrypt, ske_default_eta, ske_encrypt, ske_keygen, FrodoParams, PrfScheme, PrpScheme, SchemeKeys,
};
use crate::zq::{dot_mod, has_unit_entry, ErrorDistribution, ZqMatrix, ZqVector};

/// Runs longer than this are flagged in the table.
pub const VERIFY_SOFT_LIMIT_SECS: f64 = 300.0;

const PROB_TOL: f64 = 1e-9;
const AMP_TOL: f64 = 1e-9;

/// Outcome of one property over its parameter grid. A failure names the
/// first parameter point that broke it.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub property: &'static str,
    pub cases: u64,
    pub failure: Option<String>,
    pub elapsed_secs: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub elapsed_secs: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn over_time(&self) -> bool {
        self.elapsed_secs > VERIFY_SOFT_LIMIT_SECS
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.property.len()).max().unwrap_or(8).max(8);
        let mut out = format!("{:<width$}  {:>6}  {:>9}  {:>8}\n", "property", "result", "cases", "seconds");
        for c in &self.checks {
            let verdict = if c.passed() { "pass" } else { "FAIL" };
            let _ = writeln!(out, "{:<width$}  {verdict:>6}  {:>9}  {:>8.2}", c.property, c.cases, c.elapsed_secs);
        }
        for c in self.checks.iter().filter(|c| !c.passed()) {
            let _ = writeln!(out, "FAILED {}: {}", c.property, c.failure.as_deref().unwrap_or(""));
        }
        let _ = writeln!(out, "total {:.2} s", self.elapsed_secs);
        if self.over_time() {
            let _ = writeln!(out, "warning: verification took longer than {VERIFY_SOFT_LIMIT_SECS} s");
        }
        out
    }
}

type CheckOutcome = std::result::Result<u64, String>;

fn timed(property: &'static str, check: impl FnOnce() -> CheckOutcome) -> CheckResult {
    let start = Instant::now();
    let outcome = check();
    let elapsed_secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(cases) => CheckResult { property, cases, failure: None, elapsed_secs },
        Err(msg) => CheckResult { property, cases: 0, failure: Some(msg), elapsed_secs },
    }
}

fn ok<T>(r: Result<T>, point: impl FnOnce() -> String) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{}: {e}", point()))
}

/// Runs every check in a fixed order.
pub fn run_verify() -> VerifyReport {
    let start = Instant::now();
    let checks = vec![
        timed("closed form = enumeration", || closed_form_matches_enumeration(2..=12, block_index)),
        timed("4/pi^2 lower envelope", lower_envelope),
        timed("partition exhaustive", partition_exhaustive),
        timed("kickback equivalence", kickback_equivalence),
        timed("simulated attack = closed form", simulated_attack_matches_closed_form),
        timed("qft unitary", qft_unitary),
        timed("qft round trip", qft_round_trip),
        timed("ske round trip", ske_round_trip),
        timed("pke round trip", pke_round_trip),
        timed("frodo round trip", frodo_round_trip),
        timed("ring-lwe round trip", ring_round_trip),
        timed("prf round trip", prf_round_trip),
        timed("prp round trip", prp_round_trip),
        timed("key fixtures round trip", fixtures_round_trip),
        timed("single quantum query", single_query),
    ];
    VerifyReport { checks, elapsed_secs: start.elapsed().as_secs_f64() }
}

fn unit_keys(q: u64, n: usize, count: usize, rng: &mut ChaCha20Rng) -> Vec<Vec<u64>> {
    let mut keys = Vec::with_capacity(count);
    while keys.len() < count {
        let k = ZqVector::random(n, q, rng).expect("valid modulus");
        if has_unit_entry(&k) {
            keys.push(k.into_entries());
        }
    }
    keys
}

/// Compares the closed-form success probability with direct enumeration of
/// the measurement amplitude for every `b`, every offset `a`, `n ≤ 2` and
/// five unit-entry keys per point. `block` maps a residue to its block and
/// is the function under test.
pub fn closed_form_matches_enumeration<B>(qs: impl IntoIterator<Item = u64>, block: B) -> CheckOutcome
where
    B: Fn(u64, &LrfParams) -> u64,
{
    let mut cases = 0;
    for q in qs {
        let mut rng = ChaCha20Rng::seed_from_u64(q);
        for b in 1..q {
            let closed = ok(exact_success_probability(q, b), || format!("q={q} b={b}"))?;
            for n in 1..=2usize {
                let keys = unit_keys(q, n, 5, &mut rng);
                for a in 0..q {
                    let p = ok(LrfParams::new(q, n, a, b), || format!("q={q} b={b} a={a}"))?;
                    for k in &keys {
                        let f = |x: &[u64]| block(dot_mod(x, k, q), &p);
                        let point = || format!("q={q} n={n} a={a} b={b} k={k:?}");
                        let brute = ok(brute_force_success_fn(q, n, p.block_count(), f, k), point)?;
                        if (brute - closed).abs() > PROB_TOL {
                            return Err(format!("{}: enumeration {brute} vs closed form {closed}", point()));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(cases)
}

fn lower_envelope() -> CheckOutcome {
    let limit = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
    for q in 2..=4096u64 {
        let p = ok(exact_success_probability(q, q.div_ceil(2)), || format!("q={q}"))?;
        if p < limit - 10.0 / q as f64 || p > 1.0 + PROB_TOL {
            return Err(format!("q={q}: probability {p} outside [4/pi^2 - 10/q, 1]"));
        }
        if q >= 256 && (p - limit).abs() > 0.01 {
            return Err(format!("q={q}: probability {p} further than 0.01 from 4/pi^2"));
        }
    }
    Ok(4095)
}

fn partition_exhaustive() -> CheckOutcome {
    let mut cases = 0;
    for q in 2..=64u64 {
        for b in 1..q {
            for a in 0..q {
                let p = ok(LrfParams::new(q, 1, a, b), || format!("q={q} b={b} a={a}"))?;
                let c = p.block_count();
                let mut sizes = vec![0u64; c as usize];
                let mut prev = block_index(a, &p);
                if prev != 0 {
                    return Err(format!("q={q} b={b} a={a}: offset lies in block {prev}"));
                }
                for step in 0..q {
                    let z = (a + step) % q;
                    let v = block_index(z, &p);
                    if v >= c || v < prev || v > prev + 1 {
                        return Err(format!("q={q} b={b} a={a}: block {v} after {prev} at z={z}"));
                    }
                    sizes[v as usize] += 1;
                    prev = v;
                }
                if let Some(v) = (0..c).find(|&v| sizes[v as usize] != p.block_len(v)) {
                    return Err(format!(
                        "q={q} b={b} a={a}: block {v} has {} residues, expected {}",
                        sizes[v as usize],
                        p.block_len(v)
                    ));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

/// One additive query against the phase eigenstate, with the output register
/// discarded, equals the phase oracle `ω_c^{−f(x)}` up to global phase.
fn kickback_equivalence() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0x6b69);
    let mut cases = 0;
    for q in 2..=9usize {
        for c in 2..=9usize {
            for _ in 0..50 {
                let table: Vec<usize> = (0..q * q).map(|_| rng.gen_range(0..c)).collect();
                let point = || format!("q={q} c={c} f={table:?}");
                let inputs = ok(RegisterLayout::uniform(q, 2), point)?;
                let eigen = ok(StateVector::phase_eigenstate(c), point)?;
                let mut kicked = ok(StateVector::uniform_tensor(inputs.clone(), &eigen), point)?;
                ok(kicked.apply_additive_oracle(&[0, 1], &[2], |x, out| out[0] = table[x[0] * q + x[1]]), point)?;
                ok(kicked.discard_register(2), point)?;
                let mut phased = StateVector::uniform_superposition(inputs);
                ok(phased.apply_phase_oracle(&[0, 1], c, |x| table[x[0] * q + x[1]]), point)?;
                let fid = ok(fidelity(&kicked, &phased), point)?;
                if (fid - 1.0).abs() > AMP_TOL {
                    return Err(format!("{}: overlap {fid}", point()));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

/// The full pipeline on the simulator (superposition, one additive query
/// into the phase eigenstate, discard, QFT) puts exactly the closed-form
/// probability on the key.
fn simulated_attack_matches_closed_form() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0x7369);
    let mut cases = 0;
    for q in 2..=9u64 {
        for n in 1..=2usize {
            for b in 1..q {
                let closed = ok(exact_success_probability(q, b), || format!("q={q} b={b}"))?;
                let a = rng.gen_range(0..q);
                let k = unit_keys(q, n, 1, &mut rng).remove(0);
                let point = || format!("q={q} n={n} a={a} b={b} k={k:?}");
                let p = ok(LrfParams::new(q, n, a, b), point)?;
                let c = p.block_count() as usize;
                let inputs = ok(RegisterLayout::uniform(q as usize, n), point)?;
                let eigen = ok(StateVector::phase_eigenstate(c), point)?;
                let mut s = ok(StateVector::uniform_tensor(inputs, &eigen), point)?;
                let regs: Vec<usize> = (0..n).collect();
                ok(
                    s.apply_additive_oracle(&regs, &[n], |x, out| {
                        let x: Vec<u64> = x.iter().map(|&v| v as u64).collect();
                        out[0] = block_index(dot_mod(&x, &k, q), &p) as usize;
                    }),
                    point,
                )?;
                ok(s.discard_register(n), point)?;
                ok(s.qft_registers(&regs), point)?;
                let target: Vec<usize> = k.iter().map(|&v| v as usize).collect();
                let got = ok(s.outcome_probability(&regs, &target), point)?;
                if (got - closed).abs() > PROB_TOL {
                    return Err(format!("{}: simulator {got} vs closed form {closed}", point()));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

/// The QFT matrix, built column by column from basis states, is unitary and
/// has entries `ω_q^{xy}/√q`.
fn qft_unitary() -> CheckOutcome {
    let dims = (2..=32usize).chain([37, 61, 64, 97, 128, 257]);
    let mut cases = 0;
    for q in dims {
        let point = || format!("q={q}");
        let layout = ok(RegisterLayout::new(vec![q]), point)?;
        let mut cols = Vec::with_capacity(q);
        for x in 0..q {
            let mut s = ok(StateVector::basis(layout.clone(), &[x]), point)?;
            ok(s.qft_zq(0), point)?;
            for (y, a) in s.amplitudes().iter().enumerate() {
                let want = Complex64::from_polar(
                    1.0 / (q as f64).sqrt(),
                    2.0 * std::f64::consts::PI * ((x * y) % q) as f64 / q as f64,
                );
                if (a - want).norm() > AMP_TOL {
                    return Err(format!("q={q}: entry ({y},{x}) is {a}, expected {want}"));
                }
            }
            cols.push(s);
        }
        for i in 0..q {
            for j in i..q {
                let g = ok(cols[i].inner(&cols[j]), point)?;
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).norm() > AMP_TOL {
                    return Err(format!("q={q}: columns {i},{j} have inner product {g}"));
                }
            }
        }
        cases += 1;
    }
    Ok(cases)
}

fn qft_round_trip() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0x7166);
    let layouts: [&[usize]; 5] = [&[2, 3, 5], &[7, 7, 7], &[13, 13, 13, 2], &[16, 4, 16], &[31, 64]];
    for dims in layouts {
        let point = || format!("dims={dims:?}");
        let layout = ok(RegisterLayout::new(dims.to_vec()), point)?;
        let raw: Vec<Complex64> =
            (0..layout.size()).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let start = ok(StateVector::from_amplitudes(layout, raw.iter().map(|a| a / norm).collect()), point)?;
        let regs: Vec<usize> = (0..dims.len()).collect();
        let mut s = start.clone();
        ok(s.qft_registers(&regs), point)?;
        if (s.norm_sqr() - 1.0).abs() > AMP_TOL {
            return Err(format!("{}: norm {} after transform", point(), s.norm_sqr()));
        }
        ok(s.inverse_qft_registers(&regs), point)?;
        let err = s.amplitudes().iter().zip(start.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if err > AMP_TOL {
            return Err(format!("{}: round trip error {err}", point()));
        }
    }
    Ok(layouts.len() as u64)
}

const ROUND_TRIP_MESSAGES: usize = 40;

fn ske_round_trip() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut cases = 0;
    for q in [5u64, 7, 13, 17, 64, 257, 3329] {
        for n in 1..=4 {
            let point = || format!("q={q} n={n}");
            let key = ok(ske_keygen(q, n, &mut rng), point)?;
            let chi = ok(ErrorDistribution::bounded_uniform(ske_default_eta(q), q), point)?;
            for _ in 0..ROUND_TRIP_MESSAGES {
                let bit = rng.gen_range(0..2u8);
                let ct = ok(ske_encrypt(&key, bit, &chi, &mut rng), point)?;
                if ok(ske_decrypt(&key, &ct), point)? != bit {
                    return Err(format!("{}: bit {bit} decrypted wrongly", point()));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn pke_round_trip() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut cases = 0;
    for q in [7u64, 13, 64, 257, 3329] {
        for n in 1..=3 {
            let m = pke_default_m(q, n);
            let point = || format!("q={q} n={n} m={m}");
            let chi = ok(ErrorDistribution::bounded_uniform(pke_default_eta(q, m), q), point)?;
            let kp = ok(pke_keygen(q, n, m, &chi, &mut rng), point)?;
            for _ in 0..ROUND_TRIP_MESSAGES {
                let bit = rng.gen_range(0..2u8);
                let ct = ok(pke_encrypt(&kp.pk, bit, &mut rng), point)?;
                if ok(pke_decrypt(&kp.sk, &ct), point)? != bit {
                    return Err(format!("{}: bit {bit} decrypted wrongly", point()));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn frodo_round_trip() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut cases = 0;
    for (d, b, n) in [(4u32, 1u32, 2usize), (4, 2, 2), (8, 2, 4), (12, 2, 8), (15, 3, 8)] {
        let point = || format!("q=2^{d} B={b} n={n}");
        let p = ok(FrodoParams::new(n, 2, 2, d, b), point)?;
        let chi = ok(ErrorDistribution::bounded_uniform(frodo_default_eta(&p), p.q()), point)?;
        let kp = ok(frodo_keygen(&p, &chi, &mut rng), point)?;
        for _ in 0..ROUND_TRIP_MESSAGES {
            let symbols: Vec<u64> = (0..p.mbar * p.nbar).map(|_| rng.gen_range(0..p.symbols())).collect();
            let msg = ok(ZqMatrix::new(p.mbar, p.nbar, symbols.clone(), p.symbols()), point)?;
            let ct = ok(frodo_encrypt(&kp, &ok(frodo_encode(&p, &msg), point)?, &chi, &mut rng), point)?;
            if ok(frodo_decrypt(&kp, &ct), point)?.data() != &symbols[..] {
                return Err(format!("{}: symbols {symbols:?} decrypted wrongly", point()));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

fn ring_round_trip() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut cases = 0;
    for q in [13u64, 17, 257, 3329] {
        for n in [1usize, 2, 4, 8] {
            let point = || format!("q={q} n={n}");
            let chi = ok(ErrorDistribution::bounded_uniform(ringlwe_default_eta(q, n), q), point)?;
            let kp = ok(ringlwe_keygen(q, n, &chi, &mut rng), point)?;
            for _ in 0..ROUND_TRIP_MESSAGES {
                let bit = rng.gen_range(0..2u8);
                let ct = ok(ringlwe_encrypt(&kp, bit, &chi, &mut rng), point)?;
                if ok(ringlwe_decrypt(&kp.s, &ct), point)? != bit {
                    return Err(format!("{}: bit {bit} decrypted wrongly", point()));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn prf_round_trip() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut cases = 0;
    for n in [1u32, 4, 8, 16, 32, 64] {
        let point = || format!("n={n}");
        let s = ok(PrfScheme::generate(n, &mut rng), point)?;
        for _ in 0..ROUND_TRIP_MESSAGES {
            let m = rng.gen::<u64>() & (u64::MAX >> (64 - n));
            let ct = ok(s.encrypt(m, &mut rng), point)?;
            if ok(s.decrypt(&ct), point)? != m {
                return Err(format!("{}: message {m:#x} decrypted wrongly", point()));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

fn prp_round_trip() -> CheckOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut cases = 0;
    for n in [1u32, 4, 8, 16, 32, 63] {
        let point = || format!("n={n}");
        let s = ok(PrpScheme::generate(n, &mut rng), point)?;
        for _ in 0..ROUND_TRIP_MESSAGES {
            let m = rng.gen::<u64>() & (u64::MAX >> (64 - n));
            let c = ok(s.encrypt(m, &mut rng), point)?;
            if ok(s.decrypt(c), point)? != m {
                return Err(format!("{}: message {m:#x} decrypted wrongly", point()));
            }
            let x = rng.gen::<u128>() & ((1u128 << (2 * n)) - 1);
            if ok(s.invert(ok(s.permute(x), point)?), point)? != x {
                return Err(format!("{}: permutation does not invert at {x:#x}", point()));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

fn fixtures_round_trip() -> CheckOutcome {
    let cases = [
        AttackParams::new(AttackKind::Ske, 13, 3),
        AttackParams::new(AttackKind::Pke, 13, 2),
        AttackParams::new(AttackKind::Frodo, 16, 2),
        AttackParams::new(AttackKind::RingLwe, 13, 4),
    ];
    for p in &cases {
        let point = || format!("{} q={} n={}", p.kind, p.q, p.n);
        let keys = ok(run_trial(p, 0, 0), point)?.keys.ok_or_else(|| format!("{}: no keys", point()))?;
        let back = ok(SchemeKeys::from_json(&keys.to_json()), point)?;
        if back != keys {
            return Err(format!("{}: key fixture changed in round trip", point()));
        }
    }
    Ok(cases.len() as u64)
}

fn single_query() -> CheckOutcome {
    let mut cases = 0;
    for kind in AttackKind::ALL {
        let q = if kind == AttackKind::Frodo { 16 } else { 7 };
        let p = AttackParams::new(kind, q, 2);
        for t in 0..5 {
            let point = || format!("{kind} q={q} n=2 trial={t}");
            let r = ok(run_trial(&p, 0, t), point)?;
            let want = kind.is_quantum() as u64;
            if r.quantum_queries != want {
                return Err(format!("{}: {} quantum queries, expected {want}", point(), r.quantum_queries));
            }
            cases += 1;
        }
    }
    Ok(cases)
}
