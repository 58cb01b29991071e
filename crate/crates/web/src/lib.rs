//! Browser bindings: exact success probabilities, the block partition of
//! `Z_q`, and the simulated measurement distribution of one attack.
//!
//! Every binding returns JSON text. The plain functions below the wrappers
//! are what the native tests exercise.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use lrfkit::attacks::{exact_success_probability, run_trial, AttackKind, AttackParams};
use lrfkit::lrf::{block_index, LrfParams};
use lrfkit::qsim::{RegisterLayout, StateVector};
use lrfkit::{Error, Result};

/// Largest modulus the page accepts; keeps every call interactive.
pub const MAX_Q: u64 = 4096;

fn check_q(q: u64) -> Result<()> {
    if !(2..=MAX_Q).contains(&q) {
        return Err(Error::Parameter(format!("q must be in 2..={MAX_Q}")));
    }
    Ok(())
}

/// `[{q, b, p}]` for `b = ⌈q/2⌉` and every `q` in `2..=q_max`.
pub fn success_curve_json(q_max: u64) -> Result<Value> {
    check_q(q_max)?;
    let points: Result<Vec<Value>> = (2..=q_max)
        .map(|q| {
            let b = q.div_ceil(2);
            Ok(json!({ "q": q, "b": b, "p": exact_success_probability(q, b)? }))
        })
        .collect();
    Ok(json!({ "limit": 4.0 / (std::f64::consts::PI * std::f64::consts::PI), "points": points? }))
}

/// Block of every residue under offset `a` and block size `b`.
pub fn partition_json(q: u64, a: u64, b: u64) -> Result<Value> {
    check_q(q)?;
    let p = LrfParams::new(q, 1, a, b)?;
    let blocks: Vec<u64> = (0..q).map(|z| block_index(z, &p)).collect();
    let sizes: Vec<u64> = (0..p.block_count()).map(|v| p.block_len(v)).collect();
    Ok(json!({ "q": q, "a": p.offset(), "b": b, "c": p.block_count(), "blocks": blocks, "sizes": sizes }))
}

/// Outcome distribution of the one-query attack on `f(x) = block(x·k)` over
/// `Z_q`, computed on the state-vector simulator, next to the closed form.
pub fn attack_distribution_json(q: u64, a: u64, b: u64, k: u64) -> Result<Value> {
    check_q(q)?;
    let p = LrfParams::new(q, 1, a, b)?;
    let k = k % q;
    let c = p.block_count() as usize;
    let mut state =
        StateVector::uniform_tensor(RegisterLayout::uniform(q as usize, 1)?, &StateVector::phase_eigenstate(c)?)?;
    state.apply_additive_oracle(&[0], &[1], |x, out| out[0] = block_index(x[0] as u64 * k % q, &p) as usize)?;
    state.discard_register(1)?;
    state.qft_registers(&[0])?;
    let probs = state.marginal(&[0])?;
    let closed = exact_success_probability(q, b)?;
    Ok(json!({
        "q": q, "k": k, "c": c,
        "probabilities": probs,
        "key_probability": probs[k as usize],
        "closed_form": closed,
        "unit_key": lrfkit::zq::gcd(k, q) == 1,
    }))
}

/// One seeded trial of a named attack.
pub fn run_attack_json(scheme: &str, q: u64, n: usize, seed: u64) -> Result<Value> {
    check_q(q)?;
    let kind: AttackKind = scheme.parse()?;
    let params = AttackParams::new(kind, q, n);
    params.validate()?;
    Ok(serde_json::to_value(run_trial(&params, seed, 0)?)?)
}

fn to_js(v: Result<Value>) -> std::result::Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn success_curve(q_max: u32) -> std::result::Result<String, JsError> {
    to_js(success_curve_json(q_max.into()))
}

#[wasm_bindgen]
pub fn partition(q: u32, a: u32, b: u32) -> std::result::Result<String, JsError> {
    to_js(partition_json(q.into(), a.into(), b.into()))
}

#[wasm_bindgen]
pub fn attack_distribution(q: u32, a: u32, b: u32, k: u32) -> std::result::Result<String, JsError> {
    to_js(attack_distribution_json(q.into(), a.into(), b.into(), k.into()))
}

#[wasm_bindgen]
pub fn run_attack(scheme: &str, q: u32, n: u32, seed: u32) -> std::result::Result<String, JsError> {
    to_js(run_attack_json(scheme, q.into(), n as usize, seed.into()))
}
