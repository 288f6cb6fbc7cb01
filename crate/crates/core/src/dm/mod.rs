//! Discrete-memoryless achievable-rate evaluation.
//!
//! Two families of inputs are supported, matching the two coding schemes:
//!
//! * [`Thm1Input`] — the source sends two-layer state descriptions to the
//!   relay and destination and the message is precoded against the state;
//!   evaluated by [`eval_thm1`]. Evaluation only: the measure has too many
//!   coupled auxiliaries for any honest search at dense-pmf alphabet caps.
//! * [`Thm2Input`] — the source describes the relay's ideal input ahead of
//!   time (`x_hat`, with `x2 = x_hat` enforced structurally); evaluated by
//!   [`eval_thm2`] and searched heuristically by
//!   [`search::search_thm2`].
//!
//! All rate expressions are evaluated exactly on the composed dense joint
//! pmf. Strict inequalities are tested with a margin of
//! [`STRICT_MARGIN`]; non-strict constraint slacks may dip to
//! −[`SLACK_TOL`] before an input is declared infeasible.

pub mod search;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::JointPmf;

/// Margin with which a strict inequality must hold to count as feasible.
pub const STRICT_MARGIN: f64 = 1e-10;

/// Round-off grace for non-strict constraint slacks.
pub const SLACK_TOL: f64 = 1e-10;

/// Variable order of the composed joint for the state-description scheme.
pub const THM1_VARS: [&str; 11] = [
    "s", "sr_hat", "sd_hat", "v", "u", "ur", "ud", "x1", "x2", "y2", "y3",
];

/// Variable order of the composed joint for the input-description scheme.
/// `x2` is not materialized: it equals `x_hat` by construction.
pub const THM2_VARS: [&str; 8] = ["s", "u", "ur", "x1", "x", "x_hat", "y2", "y3"];

/// A dense conditional pmf. `table[r][c]` is the probability of the
/// `c`-th joint outcome of `out` given the `r`-th joint outcome of
/// `given`, both indexed row-major in the declared variable orders.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondPmf {
    pub given: Vec<String>,
    pub out: Vec<String>,
    pub table: Vec<Vec<f64>>,
}

impl CondPmf {
    fn cardinalities(vars: &[String], alphabets: &Alphabets) -> Result<Vec<usize>> {
        vars.iter()
            .map(|v| {
                alphabets
                    .resolve(v)
                    .ok_or_else(|| Error::UnknownVariable(v.clone()))
            })
            .collect()
    }

    fn validate(&self, label: &str, alphabets: &Alphabets) -> Result<()> {
        let rows: usize = Self::cardinalities(&self.given, alphabets)?
            .iter()
            .product();
        let cols: usize = Self::cardinalities(&self.out, alphabets)?.iter().product();
        if self.table.len() != rows {
            return Err(Error::InvalidDistribution(format!(
                "{label}: expected {rows} rows, got {}",
                self.table.len()
            )));
        }
        for (r, row) in self.table.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidDistribution(format!(
                    "{label}: row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "{label}: row {r} contains invalid probability {p}"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidDistribution(format!(
                    "{label}: row {r} sums to {sum}, expected 1 within 1e-12"
                )));
            }
        }
        Ok(())
    }

    fn require_vars(&self, label: &str, given: &[&str], out: &[&str]) -> Result<()> {
        let as_set = |v: &[String]| v.iter().cloned().collect::<BTreeSet<_>>();
        let want = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        if as_set(&self.given) != want(given) {
            return Err(Error::InvalidDistribution(format!(
                "{label}: conditioning variables {:?} do not match the required set {:?}",
                self.given, given
            )));
        }
        if as_set(&self.out) != want(out) {
            return Err(Error::InvalidDistribution(format!(
                "{label}: output variables {:?} do not match the required set {:?}",
                self.out, out
            )));
        }
        Ok(())
    }
}

/// Alphabet table with an optional alias (`x2` → `x_hat`).
struct Alphabets {
    sizes: BTreeMap<String, usize>,
    alias: Option<(&'static str, &'static str)>,
}

impl Alphabets {
    fn canonical<'a>(&self, var: &'a str) -> &'a str {
        match self.alias {
            Some((from, to)) if var == from => to,
            _ => var,
        }
    }

    fn resolve(&self, var: &str) -> Option<usize> {
        let var = match self.alias {
            Some((from, to)) if var == from => to,
            _ => var,
        };
        self.sizes.get(var).copied()
    }
}

/// Inputs for the two-layer state-description scheme.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thm1Input {
    /// Cardinalities for all of [`THM1_VARS`].
    pub alphabets: BTreeMap<String, usize>,
    /// Q_S over `s`.
    pub q_s: CondPmf,
    /// P(sr_hat, sd_hat | s).
    pub state_descriptions: CondPmf,
    /// P(v | sr_hat).
    pub v: CondPmf,
    /// P(u | v, s, sr_hat, sd_hat).
    pub u: CondPmf,
    /// P(ur, ud | v, u, s, sr_hat, sd_hat).
    pub ur_ud: CondPmf,
    /// P(x1 | ur, ud, u, v, s, sr_hat, sd_hat).
    pub x1: CondPmf,
    /// P(x2 | v, sr_hat).
    pub x2: CondPmf,
    /// W(y2, y3 | x1, x2, s).
    pub channel: CondPmf,
}

impl Thm1Input {
    pub fn validate(&self) -> Result<()> {
        check_alphabets(&self.alphabets, &THM1_VARS)?;
        let al = Alphabets {
            sizes: self.alphabets.clone(),
            alias: None,
        };
        self.q_s.require_vars("q_s", &[], &["s"])?;
        self.state_descriptions.require_vars(
            "state_descriptions",
            &["s"],
            &["sr_hat", "sd_hat"],
        )?;
        self.v.require_vars("v", &["sr_hat"], &["v"])?;
        self.u
            .require_vars("u", &["v", "s", "sr_hat", "sd_hat"], &["u"])?;
        self.ur_ud
            .require_vars("ur_ud", &["v", "u", "s", "sr_hat", "sd_hat"], &["ur", "ud"])?;
        self.x1.require_vars(
            "x1",
            &["ur", "ud", "u", "v", "s", "sr_hat", "sd_hat"],
            &["x1"],
        )?;
        self.x2.require_vars("x2", &["v", "sr_hat"], &["x2"])?;
        self.channel
            .require_vars("channel", &["x1", "x2", "s"], &["y2", "y3"])?;
        for (label, f) in self.factors() {
            f.validate(label, &al)?;
        }
        Ok(())
    }

    fn factors(&self) -> Vec<(&'static str, &CondPmf)> {
        vec![
            ("q_s", &self.q_s),
            ("state_descriptions", &self.state_descriptions),
            ("v", &self.v),
            ("u", &self.u),
            ("ur_ud", &self.ur_ud),
            ("x1", &self.x1),
            ("x2", &self.x2),
            ("channel", &self.channel),
        ]
    }

    /// Dense joint over [`THM1_VARS`], the product of the declared factors.
    pub fn compose_joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let al = Alphabets {
            sizes: self.alphabets.clone(),
            alias: None,
        };
        compose(
            &THM1_VARS,
            &al,
            &self
                .factors()
                .into_iter()
                .map(|(_, f)| f)
                .collect::<Vec<_>>(),
        )
    }
}

/// Inputs for the input-description scheme. `x2` is identified with
/// `x_hat` structurally: the channel's `x2` input ranges over `x_hat`'s
/// alphabet and no separate `x2` variable exists in the joint.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thm2Input {
    /// Cardinalities for all of [`THM2_VARS`].
    pub alphabets: BTreeMap<String, usize>,
    /// Q_S over `s`.
    pub q_s: CondPmf,
    /// P(u | s).
    pub p_u: CondPmf,
    /// P(ur | u, s).
    pub p_ur: CondPmf,
    /// P(x1 | ur, u, s).
    pub p_x1: CondPmf,
    /// P(x | u, s).
    pub p_x: CondPmf,
    /// P(x_hat | x), the input-description test channel.
    pub p_x_hat: CondPmf,
    /// W(y2, y3 | x1, x2, s) with x2 = x_hat.
    pub channel: CondPmf,
}

impl Thm2Input {
    pub fn validate(&self) -> Result<()> {
        check_alphabets(&self.alphabets, &THM2_VARS)?;
        let al = self.alphabet_table();
        self.q_s.require_vars("q_s", &[], &["s"])?;
        self.p_u.require_vars("p_u", &["s"], &["u"])?;
        self.p_ur.require_vars("p_ur", &["u", "s"], &["ur"])?;
        self.p_x1.require_vars("p_x1", &["ur", "u", "s"], &["x1"])?;
        self.p_x.require_vars("p_x", &["u", "s"], &["x"])?;
        self.p_x_hat.require_vars("p_x_hat", &["x"], &["x_hat"])?;
        self.channel
            .require_vars("channel", &["x1", "x2", "s"], &["y2", "y3"])?;
        for (label, f) in self.factors() {
            f.validate(label, &al)?;
        }
        Ok(())
    }

    fn alphabet_table(&self) -> Alphabets {
        Alphabets {
            sizes: self.alphabets.clone(),
            alias: Some(("x2", "x_hat")),
        }
    }

    fn factors(&self) -> Vec<(&'static str, &CondPmf)> {
        vec![
            ("q_s", &self.q_s),
            ("p_u", &self.p_u),
            ("p_ur", &self.p_ur),
            ("p_x1", &self.p_x1),
            ("p_x", &self.p_x),
            ("p_x_hat", &self.p_x_hat),
            ("channel", &self.channel),
        ]
    }

    /// Dense joint over [`THM2_VARS`].
    pub fn compose_joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let al = self.alphabet_table();
        compose(
            &THM2_VARS,
            &al,
            &self
                .factors()
                .into_iter()
                .map(|(_, f)| f)
                .collect::<Vec<_>>(),
        )
    }
}

fn check_alphabets(alphabets: &BTreeMap<String, usize>, vars: &[&str]) -> Result<()> {
    for v in vars {
        if !alphabets.contains_key(*v) {
            return Err(Error::UnknownVariable(format!("{v} (missing alphabet)")));
        }
    }
    for (name, &size) in alphabets {
        if !vars.contains(&name.as_str()) {
            return Err(Error::UnknownVariable(format!(
                "{name} (not a model variable)"
            )));
        }
        if size == 0 {
            return Err(Error::InvalidParameter {
                name: name.clone(),
                reason: "alphabet cardinality must be >= 1".into(),
            });
        }
    }
    Ok(())
}

fn compose(order: &[&str], al: &Alphabets, factors: &[&CondPmf]) -> Result<JointPmf> {
    let sizes: Vec<usize> = order
        .iter()
        .map(|v| al.resolve(v).expect("validated"))
        .collect();
    let atoms: u128 = sizes.iter().map(|&s| s as u128).product();
    if atoms > crate::pmf::MAX_ATOMS as u128 {
        return Err(Error::AlphabetTooLarge(atoms));
    }
    let axis_of = |var: &str| -> usize {
        let canon = al.canonical(var);
        order.iter().position(|v| *v == canon).expect("validated")
    };
    // Per-factor mixed-radix weights into row and column indices.
    struct FactorIdx<'a> {
        table: &'a [Vec<f64>],
        row_terms: Vec<(usize, usize)>, // (joint axis, weight)
        col_terms: Vec<(usize, usize)>,
    }
    let prepared: Vec<FactorIdx> = factors
        .iter()
        .map(|f| {
            let weigh = |vars: &[String]| -> Vec<(usize, usize)> {
                let cards: Vec<usize> = vars
                    .iter()
                    .map(|v| al.resolve(v).expect("validated"))
                    .collect();
                let mut weight = 1usize;
                let mut terms = vec![(0usize, 0usize); vars.len()];
                for i in (0..vars.len()).rev() {
                    terms[i] = (axis_of(&vars[i]), weight);
                    weight *= cards[i];
                }
                terms
            };
            FactorIdx {
                table: &f.table,
                row_terms: weigh(&f.given),
                col_terms: weigh(&f.out),
            }
        })
        .collect();

    let atoms = atoms as usize;
    let mut probs = vec![0.0f64; atoms];
    let mut digits = vec![0usize; order.len()];
    for (i, slot) in probs.iter_mut().enumerate() {
        let mut rem = i;
        for a in (0..order.len()).rev() {
            digits[a] = rem % sizes[a];
            rem /= sizes[a];
        }
        let mut p = 1.0;
        for f in &prepared {
            let row: usize = f.row_terms.iter().map(|&(a, w)| digits[a] * w).sum();
            let col: usize = f.col_terms.iter().map(|&(a, w)| digits[a] * w).sum();
            p *= f.table[row][col];
            if p == 0.0 {
                break;
            }
        }
        *slot = p;
    }
    JointPmf::new(
        order
            .iter()
            .map(|v| (v.to_string(), al.resolve(v).expect("validated")))
            .collect(),
        probs,
    )
}

/// Outcome of evaluating one of the achievable-rate expressions.
///
/// `rate_bits` is present iff every constraint slack clears −[`SLACK_TOL`]
/// and every strict condition clears +[`STRICT_MARGIN`]; it is the
/// objective minimum clamped at zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DmRateReport {
    pub theorem: u8,
    pub alphabet_sizes: BTreeMap<String, usize>,
    pub feasible: bool,
    pub rate_bits: Option<f64>,
    pub objective_terms: BTreeMap<String, f64>,
    pub constraint_slacks: BTreeMap<String, f64>,
    /// Strictly-positive requirement of the first scheme (resolution layer
    /// decodable at the destination); absent for the second scheme.
    pub feasibility_condition: Option<f64>,
    /// Raw values of the negative-part terms before clamping at zero.
    pub negative_parts: BTreeMap<String, f64>,
    /// Names of negative-part terms that are active (raw value < 0).
    pub negative_parts_active: Vec<String>,
}

/// Evaluate the state-description rate expression on a fixed input.
pub fn eval_thm1(input: &Thm1Input) -> Result<DmRateReport> {
    let joint = input.compose_joint()?;
    let mi = |x: &[&str], y: &[&str]| -> Result<f64> { Ok(joint.mutual_information(x, y)?.bits()) };
    let cmi = |x: &[&str], y: &[&str], z: &[&str]| -> Result<f64> {
        Ok(joint.conditional_mutual_information(x, y, z)?.bits())
    };

    let obj_relay =
        cmi(&["u"], &["y2"], &["v", "sr_hat"])? - cmi(&["u"], &["s", "sd_hat"], &["v", "sr_hat"])?;
    let obj_dest =
        cmi(&["u", "v"], &["y3"], &["sd_hat"])? - cmi(&["u", "v"], &["s", "sr_hat"], &["sd_hat"])?;

    let desc_relay_gain = cmi(&["ur"], &["y2", "sr_hat"], &["u", "v"])?
        - cmi(&["ur"], &["s", "sr_hat", "sd_hat"], &["u", "v"])?;
    let desc_dest_gain = cmi(&["ud"], &["y3", "sd_hat"], &["u", "v"])?
        - cmi(&["ud"], &["s", "sr_hat", "sd_hat"], &["u", "v"])?;
    let u_dest_raw =
        cmi(&["u"], &["y3", "sd_hat"], &["v"])? - cmi(&["u"], &["s", "sr_hat", "sd_hat"], &["v"])?;
    let u_dest_neg = u_dest_raw.min(0.0);
    let cross = cmi(&["ur"], &["ud"], &["u", "v", "s", "sr_hat", "sd_hat"])?;

    let slack_relay = desc_relay_gain - mi(&["s"], &["sr_hat"])?;
    let slack_dest = desc_dest_gain + u_dest_neg - mi(&["s"], &["sd_hat"])?;
    let slack_joint = desc_relay_gain + desc_dest_gain + u_dest_neg
        - cross
        - mi(&["s"], &["sr_hat", "sd_hat"])?
        - mi(&["sr_hat"], &["sd_hat"])?;

    let feasibility = mi(&["v"], &["y3", "sd_hat"])? - mi(&["v"], &["sr_hat"])?;

    let slacks = BTreeMap::from([
        ("relay_description".to_string(), slack_relay),
        ("destination_description".to_string(), slack_dest),
        ("joint_description".to_string(), slack_joint),
    ]);
    let feasible = slacks.values().all(|&s| s >= -SLACK_TOL) && feasibility > STRICT_MARGIN;
    let negative_parts = BTreeMap::from([("u_destination_layer".to_string(), u_dest_raw)]);
    Ok(DmRateReport {
        theorem: 1,
        alphabet_sizes: input.alphabets.clone(),
        feasible,
        rate_bits: feasible.then(|| obj_relay.min(obj_dest).max(0.0)),
        objective_terms: BTreeMap::from([
            ("relay".to_string(), obj_relay),
            ("destination".to_string(), obj_dest),
        ]),
        constraint_slacks: slacks,
        feasibility_condition: Some(feasibility),
        negative_parts_active: negative_parts
            .iter()
            .filter(|(_, &v)| v < 0.0)
            .map(|(k, _)| k.clone())
            .collect(),
        negative_parts,
    })
}

/// Evaluate the input-description rate expression on a fixed input.
pub fn eval_thm2(input: &Thm2Input) -> Result<DmRateReport> {
    let joint = input.compose_joint()?;
    report_thm2(input, &joint)
}

pub(crate) fn report_thm2(input: &Thm2Input, joint: &JointPmf) -> Result<DmRateReport> {
    let mi = |x: &[&str], y: &[&str]| -> Result<f64> { Ok(joint.mutual_information(x, y)?.bits()) };
    let cmi = |x: &[&str], y: &[&str], z: &[&str]| -> Result<f64> {
        Ok(joint.conditional_mutual_information(x, y, z)?.bits())
    };

    let description_cost = mi(&["x"], &["x_hat"])?;
    let obj_dest = mi(&["u", "ur"], &["y3"])? - mi(&["u", "ur"], &["s"])?;
    let obj_relay =
        mi(&["u", "ur"], &["y2", "x_hat"])? - mi(&["u", "ur"], &["s"])? - description_cost;

    let u_relay_raw = mi(&["u"], &["y2", "x_hat"])? - mi(&["u"], &["s"])?;
    let u_relay_neg = u_relay_raw.min(0.0);
    let rhs = cmi(&["ur"], &["y2", "x_hat"], &["u"])? - cmi(&["ur"], &["s"], &["u"])? + u_relay_neg;
    let slack = rhs - description_cost;

    let feasible = slack > STRICT_MARGIN;
    let negative_parts = BTreeMap::from([("u_relay_layer".to_string(), u_relay_raw)]);
    Ok(DmRateReport {
        theorem: 2,
        alphabet_sizes: input.alphabets.clone(),
        feasible,
        rate_bits: feasible.then(|| obj_dest.min(obj_relay).max(0.0)),
        objective_terms: BTreeMap::from([
            ("destination".to_string(), obj_dest),
            ("relay_with_description".to_string(), obj_relay),
        ]),
        constraint_slacks: BTreeMap::from([("description_rate".to_string(), slack)]),
        feasibility_condition: None,
        negative_parts_active: negative_parts
            .iter()
            .filter(|(_, &v)| v < 0.0)
            .map(|(k, _)| k.clone())
            .collect(),
        negative_parts,
    })
}
