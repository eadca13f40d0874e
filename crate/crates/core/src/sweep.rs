//! Family sweeps and invariant/variable classification.

use std::fmt;

use serde::Serialize;

use crate::conic::{Billiard, InversionContext};
use crate::error::{Error, Result};
use crate::invariants::{closed_form, measure, registry_entry, residual, DerivedPolygons, InvariantCode};
use crate::orbit::{build, window, Tag, Topology};
use crate::tol::{Tolerances, SPREAD_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Invariant,
    Variable,
    Inconclusive,
    Degenerate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub billiard: Billiard,
    pub topology: Topology,
    pub codes: Vec<InvariantCode>,
    pub samples: usize,
    /// Relative distance kept from the ends of an abscissa window.
    pub margin: f64,
    /// Starting boundary parameter for angle windows.
    pub offset: f64,
    pub ctx: InversionContext,
}

impl SweepSpec {
    /// All applicable codes, 16 samples, 1% margin.
    pub fn new(billiard: Billiard, topology: Topology) -> SweepSpec {
        SweepSpec {
            billiard,
            topology,
            codes: InvariantCode::applicable(topology.n),
            samples: 16,
            margin: 0.01,
            offset: 0.1,
            ctx: InversionContext::default(),
        }
    }

    pub fn with_codes(mut self, codes: Vec<InvariantCode>) -> SweepSpec {
        self.codes = codes;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> SweepSpec {
        self.samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 8 {
            return Err(Error::Invalid(format!("a sweep needs at least 8 samples, got {}", self.samples)));
        }
        if !(0.0..0.5).contains(&self.margin) {
            return Err(Error::Invalid(format!("margin must lie in [0, 0.5), got {}", self.margin)));
        }
        if self.codes.is_empty() {
            return Err(Error::Invalid("no invariant codes requested".into()));
        }
        for c in &self.codes {
            c.check_applicable(&self.topology)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleValue {
    pub param: f64,
    pub code: InvariantCode,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeReport {
    pub code: InvariantCode,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub max_abs_dev: f64,
    pub rel_spread: f64,
    pub verdict: Verdict,
    pub closed_form_value: Option<f64>,
    pub closed_form_residual: Option<f64>,
    pub expected: Option<Verdict>,
    /// First measurement failure, when the verdict is Degenerate.
    pub failure: Option<String>,
}

impl CodeReport {
    /// Whether the verdict matches the expected one (true when nothing is expected).
    pub fn reproduced(&self, tol: &Tolerances) -> bool {
        let verdict_ok = self.expected.is_none_or(|e| e == self.verdict);
        let form_ok = self.closed_form_residual.is_none_or(|r| r < tol.closed_form);
        verdict_ok && form_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub a: f64,
    pub b: f64,
    pub topology: String,
    pub turning: i32,
    pub samples: usize,
    pub params: Vec<f64>,
    pub codes: Vec<CodeReport>,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub values: Vec<SampleValue>,
}

impl SweepReport {
    pub fn all_reproduced(&self) -> bool {
        self.codes.iter().all(|c| c.reproduced(&self.tolerances))
    }

    pub fn code(&self, code: InvariantCode) -> Option<&CodeReport> {
        self.codes.iter().find(|c| c.code == code)
    }
}

pub fn classify(rel_spread: f64, tol: &Tolerances) -> Verdict {
    if !rel_spread.is_finite() {
        Verdict::Degenerate
    } else if rel_spread < tol.invariant {
        Verdict::Invariant
    } else if rel_spread > tol.variable {
        Verdict::Variable
    } else {
        Verdict::Inconclusive
    }
}

/// Verdict asserted for `code` on the family, if any.
pub fn expected_verdict(code: InvariantCode, t: &Topology) -> Option<Verdict> {
    use InvariantCode::*;
    match code {
        K101 | K119 => Some(Verdict::Invariant),
        K804 => match (t.n, t.tag) {
            (4, Tag::Simple) | (6, Tag::TypeII) => Some(Verdict::Variable),
            (3, _) | (5, _) | (6, _) | (7, _) | (8, Tag::Simple) => Some(Verdict::Invariant),
            _ => None,
        },
        _ => registry_entry(code, t).map(|_| Verdict::Invariant),
    }
}

fn summarize(vals: &[f64], tol: &Tolerances) -> (f64, f64, f64, f64, f64, Verdict) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_abs_dev = vals.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let rel_spread = (max - min) / mean.abs().max(SPREAD_FLOOR);
    (mean, min, max, max_abs_dev, rel_spread, classify(rel_spread, tol))
}

pub fn run_sweep(spec: &SweepSpec, tol: &Tolerances) -> Result<SweepReport> {
    spec.validate()?;
    let (b, t) = (&spec.billiard, &spec.topology);
    let params = window(b, t)?.samples(spec.samples, spec.margin, spec.offset);
    let mut per_code: Vec<Vec<f64>> = vec![Vec::with_capacity(params.len()); spec.codes.len()];
    let mut failures: Vec<Option<String>> = vec![None; spec.codes.len()];
    let mut values = Vec::with_capacity(params.len() * spec.codes.len());
    for &p in &params {
        let o = build(b, t, p)?;
        let d = DerivedPolygons::new(&o, &spec.ctx)?;
        for (i, &code) in spec.codes.iter().enumerate() {
            match measure(code, &o, &d, &spec.ctx) {
                Ok(v) => {
                    per_code[i].push(v);
                    values.push(SampleValue { param: p, code, value: v });
                }
                Err(e @ Error::Degenerate(_)) => {
                    failures[i].get_or_insert_with(|| e.to_string());
                }
                Err(e) => return Err(e),
            }
        }
    }
    let mut codes = Vec::with_capacity(spec.codes.len());
    for (i, &code) in spec.codes.iter().enumerate() {
        let expected = expected_verdict(code, t);
        let closed = match registry_entry(code, t) {
            Some(_) => Some(closed_form(code, b, t, &spec.ctx)?),
            None => None,
        };
        if failures[i].is_some() {
            codes.push(CodeReport {
                code,
                mean: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
                max_abs_dev: f64::NAN,
                rel_spread: f64::NAN,
                verdict: Verdict::Degenerate,
                closed_form_value: closed,
                closed_form_residual: None,
                expected,
                failure: failures[i].take(),
            });
            continue;
        }
        let (mean, min, max, max_abs_dev, rel_spread, verdict) = summarize(&per_code[i], tol);
        let closed_form_residual = closed.map(|c| per_code[i].iter().map(|v| residual(*v, c)).fold(0.0, f64::max));
        codes.push(CodeReport {
            code,
            mean,
            min,
            max,
            max_abs_dev,
            rel_spread,
            verdict,
            closed_form_value: closed,
            closed_form_residual,
            expected,
            failure: None,
        });
    }
    Ok(SweepReport {
        a: b.a,
        b: b.b,
        topology: t.label(),
        turning: t.turning,
        samples: params.len(),
        params,
        codes,
        tolerances: *tol,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ScanStatus {
    Exists(CodeReport),
    Nonexistent(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    pub ab: f64,
    pub status: ScanStatus,
}

/// One sweep per aspect ratio; ratios outside the family's window are marked Nonexistent.
pub fn aspect_scan(
    code: InvariantCode,
    t: &Topology,
    grid: &[f64],
    samples: usize,
    tol: &Tolerances,
) -> Result<Vec<ScanEntry>> {
    code.check_applicable(t)?;
    let mut out = Vec::with_capacity(grid.len());
    for &ab in grid {
        let b = Billiard::with_ratio(ab)?;
        let spec = SweepSpec::new(b, *t).with_codes(vec![code]).with_samples(samples);
        let status = match run_sweep(&spec, tol) {
            Ok(mut r) => ScanStatus::Exists(r.codes.remove(0)),
            Err(e @ (Error::FamilyNonexistent(_) | Error::IllConditioned(_))) => ScanStatus::Nonexistent(e.to_string()),
            Err(e) => return Err(e),
        };
        out.push(ScanEntry { ab, status });
    }
    Ok(out)
}
