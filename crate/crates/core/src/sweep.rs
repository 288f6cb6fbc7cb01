//! Single-point bound computation and parameter sweeps with CSV emission.
//!
//! A sweep varies one axis — either a raw channel field or `snr_db`, the
//! source-to-relay SNR 10·log₁₀(P₁/N₂) varied through N₂ — evaluates the
//! requested bounds at every point, and emits rows sorted by
//! (axis value, bound name). Per-point evaluator failures become rows with
//! `value_bits=NaN` and an error note; the sweep keeps going.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    asymptotic_reference, cutset_bound, df_state_as_noise_bound, maximize_thm4, maximize_thm5,
    maximize_upper_bound, AsymptoticCase, BoundResult,
};
use crate::channel::{db_to_linear, ChannelParams};
use crate::error::{Error, Result};
use crate::optimizer::OptimizerConfig;

/// Which quantity a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// 10·log₁₀(p1/n2), varied through n2 at fixed p1.
    SnrDb,
    P1,
    P2,
    Q,
    N2,
    N3,
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr_db" => Ok(Self::SnrDb),
            "p1" => Ok(Self::P1),
            "p2" => Ok(Self::P2),
            "q" => Ok(Self::Q),
            "n2" => Ok(Self::N2),
            "n3" => Ok(Self::N3),
            other => Err(Error::InvalidParameter {
                name: "axis".into(),
                reason: format!("unknown axis `{other}`"),
            }),
        }
    }
}

/// A bound selectable from the command line and sweep specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Upper,
    Cutset,
    Thm4,
    Thm5,
    DfNoise,
    /// The three limiting reference rates, emitted as separate rows.
    Asymptotes,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::Upper,
        BoundKind::Cutset,
        BoundKind::Thm4,
        BoundKind::Thm5,
        BoundKind::DfNoise,
        BoundKind::Asymptotes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Upper => "upper",
            BoundKind::Cutset => "cutset",
            BoundKind::Thm4 => "thm4",
            BoundKind::Thm5 => "thm5",
            BoundKind::DfNoise => "df_noise",
            BoundKind::Asymptotes => "asymptotes",
        }
    }
}

impl FromStr for BoundKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "bounds".into(),
                reason: format!("unknown bound `{s}`"),
            })
    }
}

/// One evaluated bound at one channel point.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub value_bits: f64,
    pub argmax: BTreeMap<String, f64>,
    pub terms: BTreeMap<String, f64>,
    pub derived: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub wall_time_ms: f64,
}

impl BoundRecord {
    fn from_result(r: BoundResult, wall_time_ms: f64) -> Self {
        Self {
            value_bits: r.value.bits(),
            argmax: r.argmax,
            terms: r.terms,
            derived: r.derived,
            warnings: r.warnings,
            wall_time_ms,
        }
    }
}

/// All bounds evaluated at a single channel point.
#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub channel: ChannelParams,
    pub bounds: BTreeMap<String, BoundRecord>,
}

fn eval_bound(kind: BoundKind, ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<BoundResult> {
    match kind {
        BoundKind::Upper => maximize_upper_bound(ch, cfg),
        BoundKind::Cutset => cutset_bound(ch, cfg),
        BoundKind::Thm4 => maximize_thm4(ch, cfg),
        BoundKind::Thm5 => maximize_thm5(ch, cfg),
        BoundKind::DfNoise => df_state_as_noise_bound(ch, cfg),
        BoundKind::Asymptotes => unreachable!("expanded separately"),
    }
}

const ASYMPTOTE_ROWS: [(&str, AsymptoticCase); 3] = [
    ("asym_relay_noise_zero", AsymptoticCase::RelayNoiseZero),
    ("asym_relay_noise_inf", AsymptoticCase::RelayNoiseInfinite),
    ("asym_state_inf", AsymptoticCase::StateInfinite),
];

/// Evaluate the requested bounds at one channel point.
pub fn run_point(
    ch: &ChannelParams,
    bounds: &[BoundKind],
    cfg: &OptimizerConfig,
) -> Result<PointRecord> {
    ch.validate()?;
    cfg.validate()?;
    if bounds.is_empty() {
        return Err(Error::InvalidParameter {
            name: "bounds".into(),
            reason: "no bounds requested".into(),
        });
    }
    let mut records = BTreeMap::new();
    for &kind in bounds {
        if kind == BoundKind::Asymptotes {
            for (name, case) in ASYMPTOTE_ROWS {
                let start = Instant::now();
                let rate = asymptotic_reference(case, ch)?;
                records.insert(
                    name.to_string(),
                    BoundRecord {
                        value_bits: rate.bits(),
                        argmax: BTreeMap::new(),
                        terms: BTreeMap::new(),
                        derived: BTreeMap::new(),
                        warnings: Vec::new(),
                        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                    },
                );
            }
            continue;
        }
        let start = Instant::now();
        let result = eval_bound(kind, ch, cfg).map_err(|e| Error::BoundEvaluation {
            bound: kind.name().into(),
            message: e.to_string(),
        })?;
        records.insert(
            kind.name().to_string(),
            BoundRecord::from_result(result, start.elapsed().as_secs_f64() * 1e3),
        );
    }
    Ok(PointRecord {
        channel: *ch,
        bounds: records,
    })
}

/// Axis definition plus fixed parameters for a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub fixed: ChannelParams,
    pub bounds: Vec<BoundKind>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.fixed.validate()?;
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidParameter {
                name: "range".into(),
                reason: format!("need lo < hi, got [{}, {}]", self.lo, self.hi),
            });
        }
        if self.points < 2 {
            return Err(Error::InvalidParameter {
                name: "points".into(),
                reason: "need at least 2 points".into(),
            });
        }
        if self.bounds.is_empty() {
            return Err(Error::InvalidParameter {
                name: "bounds".into(),
                reason: "no bounds requested".into(),
            });
        }
        // positivity of the axis range where the field demands it
        let strict = matches!(self.axis, SweepAxis::P1 | SweepAxis::N2 | SweepAxis::N3);
        let nonneg = matches!(self.axis, SweepAxis::P2 | SweepAxis::Q);
        if (strict && self.lo <= 0.0) || (nonneg && self.lo < 0.0) {
            return Err(Error::InvalidParameter {
                name: "range".into(),
                reason: format!("axis {:?} requires positive values", self.axis),
            });
        }
        Ok(())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64)
            .collect()
    }

    pub fn channel_at(&self, axis_value: f64) -> Result<ChannelParams> {
        let mut ch = self.fixed;
        match self.axis {
            SweepAxis::SnrDb => ch.n2 = self.fixed.p1 / db_to_linear(axis_value),
            SweepAxis::P1 => ch.p1 = axis_value,
            SweepAxis::P2 => ch.p2 = axis_value,
            SweepAxis::Q => ch.q = axis_value,
            SweepAxis::N2 => ch.n2 = axis_value,
            SweepAxis::N3 => ch.n3 = axis_value,
        }
        ch.validate()?;
        Ok(ch)
    }
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub bound_name: String,
    pub value_bits: f64,
    pub terms: Vec<f64>,
    pub argmax: Vec<(String, f64)>,
    pub error: String,
}

pub const CSV_HEADER: &str =
    "axis_value,bound_name,value_bits,term1,term2,argmax1,argmax2,argmax3,error";

/// Tolerance used when flagging ordering violations between bounds in the
/// emitted rows.
pub const ORDERING_TOL: f64 = 1e-6;

/// Run the sweep and return all rows, sorted by (axis index, bound name).
/// Points are evaluated in parallel; output order never depends on timing.
pub fn run_sweep_rows(spec: &SweepSpec, cfg: &OptimizerConfig) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    cfg.validate()?;
    let values = spec.axis_values();
    let per_point: Vec<Vec<SweepRow>> = values
        .par_iter()
        .map(|&axis_value| sweep_point_rows(spec, cfg, axis_value))
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

fn sweep_point_rows(spec: &SweepSpec, cfg: &OptimizerConfig, axis_value: f64) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    let ch = match spec.channel_at(axis_value) {
        Ok(ch) => ch,
        Err(e) => {
            for &kind in &spec.bounds {
                rows.push(error_row(axis_value, kind.name(), &e));
            }
            rows.sort_by(|a, b| a.bound_name.cmp(&b.bound_name));
            return rows;
        }
    };
    for &kind in &spec.bounds {
        if kind == BoundKind::Asymptotes {
            for (name, case) in ASYMPTOTE_ROWS {
                match asymptotic_reference(case, &ch) {
                    Ok(rate) => rows.push(SweepRow {
                        axis_value,
                        bound_name: name.into(),
                        value_bits: rate.bits(),
                        terms: Vec::new(),
                        argmax: Vec::new(),
                        error: String::new(),
                    }),
                    Err(e) => rows.push(error_row(axis_value, name, &e)),
                }
            }
            continue;
        }
        match eval_bound(kind, &ch, cfg) {
            Ok(r) => rows.push(SweepRow {
                axis_value,
                bound_name: kind.name().into(),
                value_bits: r.value.bits(),
                terms: r.terms.values().copied().collect(),
                argmax: r.argmax.into_iter().collect(),
                error: String::new(),
            }),
            Err(e) => rows.push(error_row(axis_value, kind.name(), &e)),
        }
    }
    flag_ordering_violations(&mut rows);
    rows.sort_by(|a, b| a.bound_name.cmp(&b.bound_name));
    rows
}

fn error_row(axis_value: f64, name: &str, e: &Error) -> SweepRow {
    SweepRow {
        axis_value,
        bound_name: name.into(),
        value_bits: f64::NAN,
        terms: Vec::new(),
        argmax: Vec::new(),
        error: format!("{e}").replace([',', '\n'], ";"),
    }
}

/// lower bounds ≤ upper ≤ cutset within [`ORDERING_TOL`]; violations are
/// flagged on the offending row rather than aborting the sweep.
fn flag_ordering_violations(rows: &mut [SweepRow]) {
    let value_of = |rows: &[SweepRow], name: &str| -> Option<f64> {
        rows.iter()
            .find(|r| r.bound_name == name && r.error.is_empty())
            .map(|r| r.value_bits)
    };
    let upper = value_of(rows, "upper");
    let cutset = value_of(rows, "cutset");
    let mut flags: Vec<(usize, String)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if !row.error.is_empty() {
            continue;
        }
        let mut note = |msg: String| flags.push((i, msg));
        match row.bound_name.as_str() {
            "thm4" | "thm5" => {
                if let Some(u) = upper {
                    if row.value_bits > u + ORDERING_TOL {
                        note(format!("ordering: {} > upper", row.bound_name));
                    }
                }
            }
            "df_noise" => {
                if let Some(c) = cutset {
                    if row.value_bits > c + ORDERING_TOL {
                        note("ordering: df_noise > cutset".into());
                    }
                }
            }
            "upper" => {
                if let Some(c) = cutset {
                    if row.value_bits > c + ORDERING_TOL {
                        note("ordering: upper > cutset".into());
                    }
                }
            }
            _ => {}
        }
    }
    for (i, msg) in flags {
        rows[i].error = msg;
    }
}

/// Render rows as the deterministic CSV contract.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let term = |i: usize| row.terms.get(i).map(|v| format!("{v}")).unwrap_or_default();
        let arg = |i: usize| {
            row.argmax
                .get(i)
                .map(|(k, v)| format!("{k}={v}"))
                .unwrap_or_default()
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.axis_value,
            row.bound_name,
            row.value_bits,
            term(0),
            term(1),
            arg(0),
            arg(1),
            arg(2),
            row.error
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Run the sweep and render it directly to CSV.
pub fn run_sweep(spec: &SweepSpec, cfg: &OptimizerConfig) -> Result<String> {
    Ok(rows_to_csv(&run_sweep_rows(spec, cfg)?))
}
