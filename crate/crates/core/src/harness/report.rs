//! Running experiments and encoding their results.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::spec::{ExperimentSpec, Format, SweepSpec};
use crate::attacks::{
    run_trial, success_rate_experiment, trial_rng, AttackKind, AttackParams, AttackReport, ExperimentSummary,
};
use crate::error::{Error, Result};
use crate::schemes::{
    decryption_partition, frodo_default_eta, frodo_encode, frodo_encrypt, pke_encrypt, ringlwe_default_eta,
    ringlwe_encrypt, ske_default_eta, ske_encrypt, SchemeCiphertext, SchemeKeys,
};
use crate::zq::{ErrorDistribution, ZqMatrix};

/// Header of the sweep CSV, in order.
pub const CSV_COLUMNS: [&str; 12] = [
    "q",
    "n",
    "b",
    "scheme",
    "trials",
    "rate",
    "wilson_lo",
    "wilson_hi",
    "analytic",
    "quantum_queries",
    "classical_queries",
    "seed",
];

const SIGNIFICANT_DIGITS: i32 = 12;

/// A probability with 12 significant digits, in positional notation down to
/// `1e-7` and scientific notation below. Trailing zeros are dropped, so
/// `format_prob(format_prob(x).parse()) == format_prob(x)`.
pub fn format_prob(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    // rounding may carry into a new leading digit, so the exponent is read
    // off the already rounded value
    let sci = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-7..SIGNIFICANT_DIGITS).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to the value [`format_prob`] prints.
pub fn round_prob(x: f64) -> f64 {
    format_prob(x).parse().unwrap_or(x)
}

/// One parameter point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q: u64,
    pub n: usize,
    /// Block size of the rounding function the attack inverts, when it has one.
    pub b: Option<u64>,
    pub scheme: AttackKind,
    pub trials: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub analytic: Option<f64>,
    pub quantum_queries: u64,
    pub classical_queries: u64,
    pub seed: u64,
    #[serde(skip)]
    pub wall_secs: f64,
}

impl SweepRow {
    fn record(&self) -> [String; 12] {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.q.to_string(),
            self.n.to_string(),
            opt(self.b.map(|b| b.to_string())),
            self.scheme.name().to_string(),
            self.trials.to_string(),
            format_prob(self.rate),
            format_prob(self.wilson_lo),
            format_prob(self.wilson_hi),
            opt(self.analytic.map(format_prob)),
            self.quantum_queries.to_string(),
            self.classical_queries.to_string(),
            self.seed.to_string(),
        ]
    }

    fn from_record(r: &csv::StringRecord) -> Result<Self> {
        if r.len() != CSV_COLUMNS.len() {
            return Err(Error::Serialization(format!("row has {} fields, expected {}", r.len(), CSV_COLUMNS.len())));
        }
        fn field<T: std::str::FromStr>(r: &csv::StringRecord, i: usize) -> Result<T> {
            r[i].parse().map_err(|_| Error::Serialization(format!("bad {} value `{}`", CSV_COLUMNS[i], &r[i])))
        }
        fn optional<T: std::str::FromStr>(r: &csv::StringRecord, i: usize) -> Result<Option<T>> {
            if r[i].is_empty() {
                Ok(None)
            } else {
                field(r, i).map(Some)
            }
        }
        Ok(SweepRow {
            q: field(r, 0)?,
            n: field(r, 1)?,
            b: optional(r, 2)?,
            scheme: r[3].parse()?,
            trials: field(r, 4)?,
            rate: field(r, 5)?,
            wilson_lo: field(r, 6)?,
            wilson_hi: field(r, 7)?,
            analytic: optional(r, 8)?,
            quantum_queries: field(r, 9)?,
            classical_queries: field(r, 10)?,
            seed: field(r, 11)?,
            wall_secs: 0.0,
        })
    }
}

/// The `b` column: the rounding block size the attack inverts. For the
/// binary-decryption attacks it is the larger decryption region; for the
/// matrix scheme it is the truncation interval `q/2^B`.
pub fn b_column(p: &AttackParams) -> Result<Option<u64>> {
    Ok(match p.kind {
        AttackKind::Lrf => Some(p.block_size()),
        AttackKind::Ske | AttackKind::Pke | AttackKind::RingLwe => Some(decryption_partition(p.q, p.n)?.0.block_size()),
        AttackKind::Frodo => Some(p.frodo_params()?.interval()),
        _ => None,
    })
}

pub fn sweep_row(s: &ExperimentSummary) -> Result<SweepRow> {
    Ok(SweepRow {
        q: s.params.q,
        n: s.params.n,
        b: b_column(&s.params)?,
        scheme: s.params.kind,
        trials: s.trials,
        rate: s.rate,
        wilson_lo: s.wilson_lo,
        wilson_hi: s.wilson_hi,
        analytic: s.analytic,
        quantum_queries: s.quantum_queries,
        classical_queries: s.classical_queries,
        seed: s.seed,
        wall_secs: s.elapsed_secs,
    })
}

pub fn write_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for row in rows {
        w.write_record(row.record()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Parses CSV written by [`write_csv`]; the header must match exactly.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Serialization(e.to_string()))?;
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::Serialization(format!("unexpected header {header:?}")));
    }
    r.records().map(|rec| SweepRow::from_record(&rec.map_err(|e| Error::Serialization(e.to_string()))?)).collect()
}

/// JSON form of an experiment summary with probabilities at 12 significant
/// digits.
pub fn summary_json(s: &ExperimentSummary) -> String {
    serde_json::to_string_pretty(&rounded_summary(s.clone())).expect("reports always serialize")
}

/// JSON array of sweep rows with probabilities at 12 significant digits.
pub fn rows_json(rows: &[SweepRow]) -> String {
    let rounded: Vec<SweepRow> = rows
        .iter()
        .map(|r| SweepRow {
            rate: round_prob(r.rate),
            wilson_lo: round_prob(r.wilson_lo),
            wilson_hi: round_prob(r.wilson_hi),
            analytic: r.analytic.map(round_prob),
            ..r.clone()
        })
        .collect();
    serde_json::to_string_pretty(&rounded).expect("rows always serialize")
}

fn rounded_summary(mut s: ExperimentSummary) -> ExperimentSummary {
    s.rate = round_prob(s.rate);
    s.wilson_lo = round_prob(s.wilson_lo);
    s.wilson_hi = round_prob(s.wilson_hi);
    s.analytic = s.analytic.map(round_prob);
    for c in &mut s.columns {
        c.analytic = round_prob(c.analytic);
    }
    s
}

/// Result of `attack`: a single trial report, or a summary over many.
#[derive(Debug, Clone, PartialEq)]
pub enum AttackOutput {
    Single(AttackReport),
    Summary(ExperimentSummary),
}

impl AttackOutput {
    pub fn to_json(&self) -> String {
        match self {
            AttackOutput::Single(r) => serde_json::to_string_pretty(r).expect("reports always serialize"),
            AttackOutput::Summary(s) => summary_json(s),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        match self {
            AttackOutput::Single(r) => Err(Error::Parameter(format!(
                "a single-trial report of `{}` is JSON only; use --trials to tabulate",
                r.attack
            ))),
            AttackOutput::Summary(s) => Ok(write_csv(&[sweep_row(s)?])),
        }
    }

    pub fn success(&self) -> Option<bool> {
        match self {
            AttackOutput::Single(r) => Some(r.success),
            AttackOutput::Summary(_) => None,
        }
    }
}

/// Runs the described experiment. One trial with JSON output yields the
/// full report of that trial; otherwise the success-rate summary.
pub fn run_attack(spec: &ExperimentSpec) -> Result<(AttackOutput, Option<SchemeKeys>)> {
    if spec.trials == 1 && spec.format == Format::Json {
        let mut r = run_trial(&spec.params, spec.seed, 0)?;
        let keys = r.keys.take();
        Ok((AttackOutput::Single(r), keys))
    } else {
        let summary = success_rate_experiment(&spec.params, spec.trials, spec.seed)?;
        let keys = run_trial(&spec.params, spec.seed, 0)?.keys;
        Ok((AttackOutput::Summary(summary), keys))
    }
}

/// Runs every point of the grid, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let points = spec.points()?;
    points.iter().map(|p| sweep_row(&success_rate_experiment(p, spec.trials, spec.seed)?)).collect()
}

/// Runs the classical counterpart of the scheme in `spec` at the same
/// `(q, n)`.
pub fn run_baseline(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let kind = super::baseline_kind(spec.params.kind)?;
    let params = AttackParams { kind, ..spec.params.clone() };
    params.validate()?;
    success_rate_experiment(&params, spec.trials, spec.seed)
}

/// Key fixture of the first trial together with one encryption under it,
/// as `{"key": …, "ciphertext": …, "plaintext": […]}`. Encryption noise is
/// the decryption-correct default of each scheme, drawn from the stream
/// after the last trial so it never overlaps a trial's randomness.
pub fn key_fixture(keys: &SchemeKeys, seed: u64, trials: u64) -> Result<String> {
    let mut rng = trial_rng(seed, trials);
    let (ct, plaintext) = match keys {
        SchemeKeys::Ske(k) => {
            let q = k.k.modulus();
            let bit = rng.gen_range(0..2u8);
            let chi = ErrorDistribution::bounded_uniform(ske_default_eta(q), q)?;
            (SchemeCiphertext::Ske(ske_encrypt(k, bit, &chi, &mut rng)?), vec![bit as u64])
        }
        SchemeKeys::Pke(kp) => {
            let bit = rng.gen_range(0..2u8);
            (SchemeCiphertext::Pke(pke_encrypt(&kp.pk, bit, &mut rng)?), vec![bit as u64])
        }
        SchemeKeys::RingLwe(kp) => {
            let (q, n) = (kp.a.modulus(), kp.a.degree_bound());
            let bit = rng.gen_range(0..2u8);
            let chi = ErrorDistribution::bounded_uniform(ringlwe_default_eta(q, n), q)?;
            (SchemeCiphertext::RingLwe(ringlwe_encrypt(kp, bit, &chi, &mut rng)?), vec![bit as u64])
        }
        SchemeKeys::Frodo(kp) => {
            let p = &kp.params;
            let symbols: Vec<u64> = (0..p.mbar * p.nbar).map(|_| rng.gen_range(0..p.symbols())).collect();
            let m = frodo_encode(p, &ZqMatrix::new(p.mbar, p.nbar, symbols.clone(), p.symbols())?)?;
            let chi = ErrorDistribution::bounded_uniform(frodo_default_eta(p), p.q())?;
            (SchemeCiphertext::Frodo(*p, frodo_encrypt(kp, &m, &chi, &mut rng)?), symbols)
        }
    };
    let value = serde_json::json!({
        "key": serde_json::from_str::<serde_json::Value>(&keys.to_json())?,
        "ciphertext": serde_json::from_str::<serde_json::Value>(&ct.to_json())?,
        "plaintext": plaintext,
    });
    Ok(serde_json::to_string_pretty(&value)?)
}
