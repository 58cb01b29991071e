//! Canonical JSON form of keys and ciphertexts: a `scheme` tag, the modulus
//! `q`, the dimension `n`, then flat row-major arrays.

use serde::{Deserialize, Serialize};

use super::frodo::{FrodoCiphertext, FrodoKeyPair, FrodoParams};
use super::pke::{PkeKeyPair, PkePublicKey};
use super::ring::{RingLweCiphertext, RingLweKeyPair};
use super::ske::{LweCiphertext, SkeKey};
use crate::error::{Error, Result};
use crate::zq::{RingPoly, ZqMatrix, ZqVector};

/// Key material of any of the LWE-family schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeKeys {
    Ske(SkeKey),
    Pke(PkeKeyPair),
    Frodo(FrodoKeyPair),
    RingLwe(RingLweKeyPair),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeCiphertext {
    Ske(LweCiphertext),
    Pke(LweCiphertext),
    Frodo(FrodoParams, FrodoCiphertext),
    RingLwe(RingLweCiphertext),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
enum KeyRecord {
    Ske { q: u64, n: usize, k: Vec<u64> },
    Pke { q: u64, n: usize, m: usize, sk: Vec<u64>, a: Vec<u64>, t: Vec<u64> },
    Frodo { q: u64, n: usize, nbar: usize, mbar: usize, b_bits: u32, s: Vec<u64>, a: Vec<u64>, b: Vec<u64> },
    RingLwe { q: u64, n: usize, s: Vec<u64>, a: Vec<u64>, c: Vec<u64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
enum CiphertextRecord {
    Ske { q: u64, n: usize, a: Vec<u64>, c: u64 },
    Pke { q: u64, n: usize, a: Vec<u64>, c: u64 },
    Frodo { q: u64, n: usize, nbar: usize, mbar: usize, b_bits: u32, c1: Vec<u64>, c2: Vec<u64> },
    RingLwe { q: u64, n: usize, u: Vec<u64>, v: Vec<u64> },
}

fn vector(v: Vec<u64>, n: usize, q: u64, what: &str) -> Result<ZqVector> {
    if v.len() != n {
        return Err(Error::Serialization(format!("{what} has {} entries, expected {n}", v.len())));
    }
    ZqVector::new(v, q)
}

fn poly(v: Vec<u64>, n: usize, q: u64, what: &str) -> Result<RingPoly> {
    if v.len() != n {
        return Err(Error::Serialization(format!("{what} has {} coefficients, expected {n}", v.len())));
    }
    RingPoly::new(v, q)
}

impl SchemeKeys {
    pub fn scheme_name(&self) -> &'static str {
        match self {
            SchemeKeys::Ske(_) => "ske",
            SchemeKeys::Pke(_) => "pke",
            SchemeKeys::Frodo(_) => "frodo",
            SchemeKeys::RingLwe(_) => "ring-lwe",
        }
    }

    fn record(&self) -> KeyRecord {
        match self {
            SchemeKeys::Ske(k) => KeyRecord::Ske { q: k.k.modulus(), n: k.k.len(), k: k.k.entries().to_vec() },
            SchemeKeys::Pke(kp) => KeyRecord::Pke {
                q: kp.sk.modulus(),
                n: kp.sk.len(),
                m: kp.pk.a.rows(),
                sk: kp.sk.entries().to_vec(),
                a: kp.pk.a.data().to_vec(),
                t: kp.pk.t.entries().to_vec(),
            },
            SchemeKeys::Frodo(kp) => KeyRecord::Frodo {
                q: kp.params.q(),
                n: kp.params.n,
                nbar: kp.params.nbar,
                mbar: kp.params.mbar,
                b_bits: kp.params.b_bits,
                s: kp.s.data().to_vec(),
                a: kp.a.data().to_vec(),
                b: kp.b.data().to_vec(),
            },
            SchemeKeys::RingLwe(kp) => KeyRecord::RingLwe {
                q: kp.s.modulus(),
                n: kp.s.degree_bound(),
                s: kp.s.coeffs().to_vec(),
                a: kp.a.coeffs().to_vec(),
                c: kp.c.coeffs().to_vec(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.record()).expect("plain records always serialize")
    }

    /// Parses and validates a key fixture.
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(match serde_json::from_str(s)? {
            KeyRecord::Ske { q, n, k } => SchemeKeys::Ske(SkeKey { k: vector(k, n, q, "k")? }),
            KeyRecord::Pke { q, n, m, sk, a, t } => {
                if m < n {
                    return Err(Error::Serialization(format!("m = {m} is below n = {n}")));
                }
                SchemeKeys::Pke(PkeKeyPair {
                    sk: vector(sk, n, q, "sk")?,
                    pk: PkePublicKey { a: ZqMatrix::new(m, n, a, q)?, t: vector(t, m, q, "t")? },
                })
            }
            KeyRecord::Frodo { q, n, nbar, mbar, b_bits, s, a, b } => {
                let params = FrodoParams::with_modulus(q, n, nbar, mbar, b_bits)?;
                SchemeKeys::Frodo(FrodoKeyPair {
                    params,
                    s: ZqMatrix::new(n, nbar, s, q)?,
                    a: ZqMatrix::new(n, n, a, q)?,
                    b: ZqMatrix::new(n, nbar, b, q)?,
                })
            }
            KeyRecord::RingLwe { q, n, s, a, c } => SchemeKeys::RingLwe(RingLweKeyPair {
                s: poly(s, n, q, "s")?,
                a: poly(a, n, q, "a")?,
                c: poly(c, n, q, "c")?,
            }),
        })
    }
}

impl SchemeCiphertext {
    fn record(&self) -> CiphertextRecord {
        match self {
            SchemeCiphertext::Ske(ct) => {
                CiphertextRecord::Ske { q: ct.a.modulus(), n: ct.a.len(), a: ct.a.entries().to_vec(), c: ct.c }
            }
            SchemeCiphertext::Pke(ct) => {
                CiphertextRecord::Pke { q: ct.a.modulus(), n: ct.a.len(), a: ct.a.entries().to_vec(), c: ct.c }
            }
            SchemeCiphertext::Frodo(p, ct) => CiphertextRecord::Frodo {
                q: p.q(),
                n: p.n,
                nbar: p.nbar,
                mbar: p.mbar,
                b_bits: p.b_bits,
                c1: ct.c1.data().to_vec(),
                c2: ct.c2.data().to_vec(),
            },
            SchemeCiphertext::RingLwe(ct) => CiphertextRecord::RingLwe {
                q: ct.u.modulus(),
                n: ct.u.degree_bound(),
                u: ct.u.coeffs().to_vec(),
                v: ct.v.coeffs().to_vec(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.record()).expect("plain records always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let lwe = |q, n, a, c: u64| -> Result<LweCiphertext> { LweCiphertext::new(vector(a, n, q, "a")?, c) };
        Ok(match serde_json::from_str(s)? {
            CiphertextRecord::Ske { q, n, a, c } => SchemeCiphertext::Ske(lwe(q, n, a, c)?),
            CiphertextRecord::Pke { q, n, a, c } => SchemeCiphertext::Pke(lwe(q, n, a, c)?),
            CiphertextRecord::Frodo { q, n, nbar, mbar, b_bits, c1, c2 } => {
                let p = FrodoParams::with_modulus(q, n, nbar, mbar, b_bits)?;
                SchemeCiphertext::Frodo(
                    p,
                    FrodoCiphertext { c1: ZqMatrix::new(mbar, n, c1, q)?, c2: ZqMatrix::new(mbar, nbar, c2, q)? },
                )
            }
            CiphertextRecord::RingLwe { q, n, u, v } => {
                SchemeCiphertext::RingLwe(RingLweCiphertext { u: poly(u, n, q, "u")?, v: poly(v, n, q, "v")? })
            }
        })
    }
}
