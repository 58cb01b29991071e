//! Experiment descriptions: one attack configuration, or a grid of them.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attacks::{AttackKind, AttackParams};
use crate::error::{Error, Result};

/// Report encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parameter(format!("unknown format `{s}` (expected json or csv)"))),
        }
    }
}

/// Scheme-specific settings shared by every point of an experiment. Unset
/// fields fall back to the defaults of [`AttackParams`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeOptions {
    pub offset: Option<u64>,
    pub eta: Option<u64>,
    pub m: Option<usize>,
    pub nbar: Option<usize>,
    pub mbar: Option<usize>,
    pub bits: Option<u32>,
    pub columns: Option<Vec<usize>>,
}

impl SchemeOptions {
    fn apply(&self, p: &mut AttackParams) {
        if let Some(a) = self.offset {
            p.offset = a;
        }
        p.eta = self.eta.or(p.eta);
        p.m = self.m.or(p.m);
        p.nbar = self.nbar.unwrap_or(p.nbar);
        p.mbar = self.mbar.unwrap_or(p.mbar);
        p.b_bits = self.bits.unwrap_or(p.b_bits);
        p.columns = self.columns.clone().or(p.columns.take());
    }
}

/// Builds validated parameters for one point.
pub fn attack_params(kind: AttackKind, q: u64, n: usize, b: Option<u64>, opts: &SchemeOptions) -> Result<AttackParams> {
    if b.is_some() && kind != AttackKind::Lrf {
        return Err(Error::Parameter(format!("--b sets the rounding block size and applies only to lrf, not {kind}")));
    }
    let mut p = AttackParams::new(kind, q, n);
    p.b = b;
    opts.apply(&mut p);
    p.validate()?;
    Ok(p)
}

/// One attack configuration run for a number of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub params: AttackParams,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentSpec {
    /// Validates everything before any trial runs.
    pub fn new(params: AttackParams, trials: u64, seed: u64, out: Option<PathBuf>, format: Format) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        params.validate()?;
        Ok(ExperimentSpec { params, trials, seed, out, format })
    }
}

/// A grid of parameter points: every scheme × q × n (× b for lrf).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub schemes: Vec<AttackKind>,
    pub qs: Vec<u64>,
    pub ns: Vec<usize>,
    /// Block sizes for lrf; `None` uses `⌈q/2⌉`.
    pub bs: Option<Vec<u64>>,
    pub options: SchemeOptions,
    pub trials: u64,
    pub seed: u64,
}

impl SweepSpec {
    /// Expands the grid in row order (scheme, then q, then n, then b) and
    /// validates every point. An empty grid is an error.
    pub fn points(&self) -> Result<Vec<AttackParams>> {
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        let mut out = Vec::new();
        for &kind in &self.schemes {
            for &q in &self.qs {
                for &n in &self.ns {
                    match (&self.bs, kind) {
                        (Some(bs), AttackKind::Lrf) => {
                            for &b in bs {
                                out.push(attack_params(kind, q, n, Some(b), &self.options)?);
                            }
                        }
                        (Some(_), _) => {
                            return Err(Error::Parameter(format!("--b applies only to lrf, not {kind}")));
                        }
                        (None, _) => out.push(attack_params(kind, q, n, None, &self.options)?),
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Parameter("sweep grid is empty".into()));
        }
        Ok(out)
    }
}

/// Parses a value list: comma-separated items, each a number, an inclusive
/// range `a..=b`, or a half-open range `a..b`.
pub fn parse_list<T>(s: &str) -> Result<Vec<T>>
where
    T: FromStr + Copy + PartialOrd + TryFrom<u64> + Into<u64>,
{
    let bad = |item: &str| Error::Parameter(format!("cannot parse `{item}` as a number or range"));
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad(t));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (lo, hi) = if let Some((a, b)) = item.split_once("..=") {
            (num(a)?, num(b)?.checked_add(1).ok_or_else(|| bad(item))?)
        } else if let Some((a, b)) = item.split_once("..") {
            (num(a)?, num(b)?)
        } else {
            let v = num(item)?;
            (v, v + 1)
        };
        if hi.saturating_sub(lo) > 1 << 20 {
            return Err(Error::Parameter(format!("range `{item}` has more than 2^20 values")));
        }
        for v in lo..hi {
            out.push(T::try_from(v).map_err(|_| bad(item))?);
        }
    }
    Ok(out)
}

/// Parses a comma-separated list of attack names.
pub fn parse_schemes(s: &str) -> Result<Vec<AttackKind>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list::<u64>("4..=7").unwrap(), vec![4, 5, 6, 7]);
        assert_eq!(parse_list::<u64>("4..7").unwrap(), vec![4, 5, 6]);
        assert_eq!(parse_list::<u64>("3, 5,9..=10").unwrap(), vec![3, 5, 9, 10]);
        assert_eq!(parse_list::<u64>("7..4").unwrap(), Vec::<u64>::new());
        assert!(parse_list::<u64>("x").is_err());
        assert!(parse_list::<u64>("1..=18446744073709551615").is_err());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let spec = SweepSpec {
            schemes: vec![AttackKind::Lrf],
            qs: vec![],
            ns: vec![1],
            bs: None,
            options: SchemeOptions::default(),
            trials: 10,
            seed: 0,
        };
        assert!(matches!(spec.points(), Err(Error::Parameter(_))));
    }

    #[test]
    fn grid_order_and_block_sizes() {
        let spec = SweepSpec {
            schemes: vec![AttackKind::Lrf, AttackKind::Ske],
            qs: vec![5, 7],
            ns: vec![1],
            bs: None,
            options: SchemeOptions::default(),
            trials: 1,
            seed: 0,
        };
        let pts = spec.points().unwrap();
        let keys: Vec<_> = pts.iter().map(|p| (p.kind, p.q)).collect();
        assert_eq!(keys, vec![(AttackKind::Lrf, 5), (AttackKind::Lrf, 7), (AttackKind::Ske, 5), (AttackKind::Ske, 7)]);
        let with_b = SweepSpec { bs: Some(vec![2]), ..spec };
        assert!(with_b.points().is_err());
    }

    #[test]
    fn invalid_points_fail_before_running() {
        assert!(attack_params(AttackKind::Lrf, 7, 2, Some(7), &SchemeOptions::default()).is_err());
        assert!(attack_params(AttackKind::RingLwe, 13, 3, None, &SchemeOptions::default()).is_err());
        assert!(attack_params(AttackKind::Ske, 7, 2, Some(3), &SchemeOptions::default()).is_err());
        assert!(ExperimentSpec::new(AttackParams::new(AttackKind::Ske, 7, 2), 0, 0, None, Format::Json).is_err());
    }
}
