//! Closed-form capacity bounds for the state-dependent Gaussian relay
//! channel whose state sequence is known (noncausally) at the source only.
//!
//! The module provides, as pure evaluators plus grid/pattern-search
//! maximizations:
//!
//! * an upper bound that charges the relay for its irreducible residual
//!   uncertainty about the state ([`upper_bound_objective`]),
//! * the classical cut-set upper bound ([`cutset_bound`]),
//! * decode-and-forward with the state treated as noise
//!   ([`df_state_as_noise_bound`]),
//! * a lower bound in which the source describes the relay's ideal input
//!   ahead of time ([`thm4_rate_at`], [`maximize_thm4`]),
//! * a lower bound in which the source describes the state itself and the
//!   message layers are precoded against it ([`thm5_rate_at`],
//!   [`maximize_thm5`]),
//! * the exact capacity of the degenerate parallel channel with orthogonal
//!   components ([`degenerate_parallel_capacity`]), and
//! * the limiting reference rates ([`asymptotic_reference`]).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channel::{half_log2_1p_raw, ChannelParams, Rate};
use crate::error::{Error, Result};
use crate::optimizer::{maximize_box, OptimizerConfig};

/// Cap used to represent "all reals" when every inflation factor is
/// feasible (zero interference power or a zero-power layer).
pub const ALPHA_CAP: f64 = 8.0;

/// Noise variances below this are clamped, with a warning recorded in the
/// result diagnostics.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Correlation pair maximized over in the upper bound: `rho12` couples the
/// source and relay inputs, `rho1s` couples the source input to the state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UpperBoundParams {
    pub rho12: f64,
    pub rho1s: f64,
}

impl UpperBoundParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho12) || !self.rho12.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho12".into(),
                reason: format!("must be in [0,1], got {}", self.rho12),
            });
        }
        if !(-1.0..=0.0).contains(&self.rho1s) || !self.rho1s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho1s".into(),
                reason: format!("must be in [-1,0], got {}", self.rho1s),
            });
        }
        let disc = self.rho12 * self.rho12 + self.rho1s * self.rho1s;
        if disc > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter {
                name: "rho12/rho1s".into(),
                reason: format!("rho12^2 + rho1s^2 = {disc} exceeds 1"),
            });
        }
        Ok(())
    }
}

/// Power split for the input-description lower bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thm4Params {
    pub gamma: f64,
}

impl Thm4Params {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma".into(),
                reason: format!("must be in [0,1], got {}", self.gamma),
            });
        }
        Ok(())
    }
}

/// Parameters of the state-description lower bound: `gamma` is the power
/// share spent describing the state, `beta` splits the remaining message
/// power between the fresh layer and the coherent layer, and `alpha` is
/// the precoding inflation factor.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thm5Params {
    pub beta: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl Thm5Params {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("gamma", self.gamma)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be in [0,1], got {v}"),
                });
            }
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha".into(),
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}

/// A bound value together with the maximizing parameters, the per-cut rate
/// terms at that point, derived scalars and any numerical warnings.
///
/// For min-of-terms bounds, `value` equals the minimum over `terms`
/// (clamped at zero against round-off).
#[derive(Debug, Clone, Serialize)]
pub struct BoundResult {
    pub value: Rate,
    pub argmax: BTreeMap<String, f64>,
    pub terms: BTreeMap<String, f64>,
    pub derived: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl BoundResult {
    fn from_terms(
        argmax: BTreeMap<String, f64>,
        terms: BTreeMap<String, f64>,
        derived: BTreeMap<String, f64>,
        warnings: Vec<String>,
    ) -> Result<Self> {
        let min = terms.values().copied().fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return Err(Error::NonFiniteObjective(terms.values().copied().collect()));
        }
        let value = Rate::new(if (-crate::pmf::NEG_CLAMP..0.0).contains(&min) {
            0.0
        } else {
            min
        })?;
        Ok(Self {
            value,
            argmax,
            terms,
            derived,
            warnings,
        })
    }
}

fn effective_noise(name: &str, value: f64, warnings: &mut Vec<String>) -> f64 {
    if value < NOISE_FLOOR {
        warnings.push(format!("{name}={value:e} clamped to {NOISE_FLOOR:e}"));
        NOISE_FLOOR
    } else {
        value
    }
}

/// Variance of the relay's irreducible residual uncertainty about the
/// state: Δ_Q = Q·N₂ / ((√Q + √P₁)² + N₂). Satisfies 0 ≤ Δ_Q ≤ min(Q, N₂).
pub fn delta_q(ch: &ChannelParams) -> Result<f64> {
    ch.validate()?;
    let denom = (ch.q.sqrt() + ch.p1.sqrt()).powi(2) + ch.n2;
    Ok(ch.q * ch.n2 / denom)
}

struct UpperTerms {
    cut1: f64,
    cut2: f64,
}

fn upper_terms(
    ch: &ChannelParams,
    rho12: f64,
    rho1s: f64,
    dq: f64,
    n2: f64,
    n3: f64,
) -> UpperTerms {
    let resid = (1.0 - rho12 * rho12 - rho1s * rho1s).max(0.0);
    let cut1 = half_log2_1p_raw(ch.p1 * (1.0 - rho12 * rho12).max(0.0) * (1.0 / n2 + 1.0 / n3));
    let coherent = (ch.p2.sqrt() + rho12 * ch.p1.sqrt()).powi(2);
    let state_leak = (dq.sqrt() + rho1s * ch.p1.sqrt()).powi(2);
    let cut2 = half_log2_1p_raw(coherent / (ch.p1 * resid + state_leak + n3))
        + half_log2_1p_raw(ch.p1 * resid / n3);
    UpperTerms { cut1, cut2 }
}

/// The two-cut upper-bound objective at fixed correlations. `cut1` is the
/// broadcast cut with the state revealed; `cut2` is the multiaccess cut
/// charged for the relay's residual state uncertainty Δ_Q.
pub fn upper_bound_objective(ch: &ChannelParams, p: &UpperBoundParams) -> Result<BoundResult> {
    let dq = delta_q(ch)?;
    upper_bound_objective_with_delta(ch, p, dq)
}

/// Same objective with Δ_Q supplied by the caller. With `delta_q = 0` this
/// coincides algebraically with the cut-set objective at `rho1s = 0`.
pub fn upper_bound_objective_with_delta(
    ch: &ChannelParams,
    p: &UpperBoundParams,
    dq: f64,
) -> Result<BoundResult> {
    ch.validate()?;
    p.validate()?;
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", ch.n2, &mut warnings);
    let n3 = effective_noise("n3", ch.n3, &mut warnings);
    let t = upper_terms(ch, p.rho12, p.rho1s, dq, n2, n3);
    BoundResult::from_terms(
        BTreeMap::from([("rho12".into(), p.rho12), ("rho1s".into(), p.rho1s)]),
        BTreeMap::from([
            ("broadcast_cut".into(), t.cut1),
            ("multiaccess_cut".into(), t.cut2),
        ]),
        BTreeMap::from([("delta_q".into(), dq)]),
        warnings,
    )
}

/// Maximize the upper bound over the disc rho12² + rho1s² ≤ 1.
///
/// The disc is reparameterized as rho12 = r·cos θ, rho1s = −r·sin θ with
/// r ∈ `[0,1]`, θ ∈ `[0,π/2]`, keeping the search box-constrained and every
/// probe feasible.
pub fn maximize_upper_bound(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<BoundResult> {
    ch.validate()?;
    let dq = delta_q(ch)?;
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", ch.n2, &mut warnings);
    let n3 = effective_noise("n3", ch.n3, &mut warnings);
    let objective = |x: &[f64]| {
        let (r, theta) = (x[0], x[1]);
        let t = upper_terms(ch, r * theta.cos(), -r * theta.sin(), dq, n2, n3);
        t.cut1.min(t.cut2)
    };
    let m = maximize_box(
        objective,
        &[(0.0, 1.0), (0.0, std::f64::consts::FRAC_PI_2)],
        cfg,
    )?;
    let (r, theta) = (m.point[0], m.point[1]);
    let p = UpperBoundParams {
        rho12: (r * theta.cos()).clamp(0.0, 1.0),
        rho1s: (-r * theta.sin()).clamp(-1.0, 0.0),
    };
    let t = upper_terms(ch, p.rho12, p.rho1s, dq, n2, n3);
    BoundResult::from_terms(
        BTreeMap::from([("rho12".into(), p.rho12), ("rho1s".into(), p.rho1s)]),
        BTreeMap::from([
            ("broadcast_cut".into(), t.cut1),
            ("multiaccess_cut".into(), t.cut2),
        ]),
        BTreeMap::from([("delta_q".into(), dq)]),
        warnings,
    )
}

fn cutset_terms(ch: &ChannelParams, rho: f64, n2: f64, n3: f64) -> (f64, f64) {
    let cut1 = half_log2_1p_raw(ch.p1 * (1.0 - rho * rho).max(0.0) * (1.0 / n2 + 1.0 / n3));
    let cut2 = half_log2_1p_raw((ch.p1 + ch.p2 + 2.0 * rho * (ch.p1 * ch.p2).sqrt()) / n3);
    (cut1, cut2)
}

fn df_terms(ch: &ChannelParams, rho: f64, n2: f64, n3: f64) -> (f64, f64) {
    // state lumped into both noises; the first term is the relay's
    // decoding constraint, single link only
    let c1 = half_log2_1p_raw(ch.p1 * (1.0 - rho * rho).max(0.0) / (n2 + ch.q));
    let c2 = half_log2_1p_raw((ch.p1 + ch.p2 + 2.0 * rho * (ch.p1 * ch.p2).sqrt()) / (n3 + ch.q));
    (c1, c2)
}

/// Cut-set upper bound: max over rho ∈ `[0,1]` of
/// min{ ½log₂(1 + P₁(1−rho²)(1/N₂ + 1/N₃)),
///      ½log₂(1 + (P₁ + P₂ + 2·rho·√(P₁P₂))/N₃) }.
pub fn cutset_bound(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<BoundResult> {
    ch.validate()?;
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", ch.n2, &mut warnings);
    let n3 = effective_noise("n3", ch.n3, &mut warnings);
    // Here the state is genie-revealed, so it does not load the noise.
    let m = maximize_box(
        |x| {
            let (c1, c2) = cutset_terms(ch, x[0], n2, n3);
            c1.min(c2)
        },
        &[(0.0, 1.0)],
        cfg,
    )?;
    let rho = m.point[0];
    let (c1, c2) = cutset_terms(ch, rho, n2, n3);
    BoundResult::from_terms(
        BTreeMap::from([("rho12".into(), rho)]),
        BTreeMap::from([("broadcast_cut".into(), c1), ("multiaccess_cut".into(), c2)]),
        BTreeMap::new(),
        warnings,
    )
}

/// Decode-and-forward with the state lumped into the noise on both links:
/// both cut expressions see Q added to their noise variance.
pub fn df_state_as_noise_bound(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<BoundResult> {
    ch.validate()?;
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", ch.n2, &mut warnings);
    let n3 = effective_noise("n3", ch.n3, &mut warnings);
    let m = maximize_box(
        |x| {
            let (c1, c2) = df_terms(ch, x[0], n2, n3);
            c1.min(c2)
        },
        &[(0.0, 1.0)],
        cfg,
    )?;
    let rho = m.point[0];
    let (c1, c2) = df_terms(ch, rho, n2, n3);
    BoundResult::from_terms(
        BTreeMap::from([("rho12".into(), rho)]),
        BTreeMap::from([("broadcast_cut".into(), c1), ("multiaccess_cut".into(), c2)]),
        BTreeMap::new(),
        warnings,
    )
}

fn thm4_value(ch: &ChannelParams, gamma: f64, n2: f64, n3: f64) -> (f64, f64) {
    // D <= P2 holds algebraically; the clamp absorbs 1-ulp overshoot.
    let d = (ch.p2 * n2 / (n2 + gamma * ch.p1)).min(ch.p2);
    let gain = ((1.0 - gamma) * ch.p1).sqrt() + (ch.p2 - d).max(0.0).sqrt();
    let rate = half_log2_1p_raw(gain * gain / (n3 + d + gamma * ch.p1));
    (rate, d)
}

/// Input-description lower bound at a fixed power split. The relay is sent
/// a quantized version (distortion `D`) of the input it would transmit if
/// it knew the state; `derived["d"]` records it.
pub fn thm4_rate_at(ch: &ChannelParams, p: &Thm4Params) -> Result<BoundResult> {
    ch.validate()?;
    p.validate()?;
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", ch.n2, &mut warnings);
    let n3 = effective_noise("n3", ch.n3, &mut warnings);
    let (rate, d) = thm4_value(ch, p.gamma, n2, n3);
    BoundResult::from_terms(
        BTreeMap::from([("gamma".into(), p.gamma)]),
        BTreeMap::from([("rate".into(), rate)]),
        BTreeMap::from([("d".into(), d)]),
        warnings,
    )
}

/// Maximize the input-description lower bound over gamma ∈ `[0,1]`.
pub fn maximize_thm4(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<BoundResult> {
    ch.validate()?;
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", ch.n2, &mut warnings);
    let n3 = effective_noise("n3", ch.n3, &mut warnings);
    let m = maximize_box(|x| thm4_value(ch, x[0], n2, n3).0, &[(0.0, 1.0)], cfg)?;
    let gamma = m.point[0];
    let (rate, d) = thm4_value(ch, gamma, n2, n3);
    BoundResult::from_terms(
        BTreeMap::from([("gamma".into(), gamma)]),
        BTreeMap::from([("rate".into(), rate)]),
        BTreeMap::from([("d".into(), d)]),
        warnings,
    )
}

/// Precoding rate for signal power `p` against interference of power `q`
/// in noise `n`, at inflation factor `alpha`:
/// ½·log₂( P(P+Q+N) / (PQ(1−α)² + N(P+α²Q)) ).
///
/// By convention the value is 0 when `p = 0` (the formula's limit). The
/// value may be negative; the feasible set is exactly where it is not.
pub fn r_dpc(alpha: f64, p: f64, q: f64, n: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("p", p), ("q", q), ("n", n)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                name: name.into(),
                reason: "must be finite".into(),
            });
        }
    }
    for (name, v) in [("p", p), ("q", q), ("n", n)] {
        if v < 0.0 {
            return Err(Error::InvalidParameter {
                name: name.into(),
                reason: format!("must be >= 0, got {v}"),
            });
        }
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let denom = p * q * (1.0 - alpha) * (1.0 - alpha) + n * (p + alpha * alpha * q);
    if denom <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "denominator".into(),
            reason: format!("P·Q(1−α)² + N(P+α²Q) = {denom} is not positive"),
        });
    }
    Ok(0.5 * (p * (p + q + n) / denom).log2())
}

fn r_dpc_raw(alpha: f64, p: f64, q: f64, n: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    let denom = p * q * (1.0 - alpha) * (1.0 - alpha) + n * (p + alpha * alpha * q);
    0.5 * (p * (p + q + n) / denom).log2()
}

/// The closed interval of inflation factors with non-negative precoding
/// rate, {α : R(α,P,Q,N) ≥ 0}. It always contains α = 0. When `p = 0` or
/// `q = 0` every real α is feasible; the interval is then reported capped
/// at ±[`ALPHA_CAP`].
pub fn alpha_feasible_interval(p: f64, q: f64, n: f64) -> Result<(f64, f64)> {
    for (name, v) in [("p", p), ("q", q)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter {
                name: name.into(),
                reason: format!("must be finite and >= 0, got {v}"),
            });
        }
    }
    if !n.is_finite() || n <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "n".into(),
            reason: format!("must be finite and > 0, got {n}"),
        });
    }
    if p == 0.0 || q == 0.0 {
        return Ok((-ALPHA_CAP, ALPHA_CAP));
    }
    // R >= 0  <=>  Q(P+N)·α² − 2PQ·α − P² <= 0.
    let a = q * (p + n);
    let b = -2.0 * p * q;
    let c = -p * p;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    Ok(((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)))
}

/// Residual interference power seen by the message layer after the
/// receiver cancels `t` times the state description:
/// Q̃_S(t, Q, D) = (1−t)²·Q − t(t−2)·D.
pub fn q_tilde(t: f64, q: f64, d: f64) -> f64 {
    (1.0 - t) * (1.0 - t) * q - t * (t - 2.0) * d
}

struct Thm5Derived {
    d: f64,
    alpha2: f64,
    alpha_r: f64,
    q_t: f64,
    layer_power: f64,
    coherent_gain: f64,
    n_relay: f64,
    n_dest: f64,
}

impl Thm5Derived {
    fn to_map(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("alpha2".into(), self.alpha2),
            ("alpha_r".into(), self.alpha_r),
            ("d".into(), self.d),
            ("q_tilde".into(), self.q_t),
        ])
    }
}

fn thm5_derived(ch: &ChannelParams, beta: f64, gamma: f64, n2: f64, n3: f64) -> Thm5Derived {
    let gbar = 1.0 - gamma;
    let d = (ch.q * n2 / (n2 + gamma * ch.p1)).min(ch.q);
    let coherent_gain = (((1.0 - beta) * gbar * ch.p1).sqrt() + ch.p2.sqrt()).powi(2);
    let layer_power = beta * gbar * ch.p1;
    let alpha2 = coherent_gain / (coherent_gain + layer_power + n3 + d + gamma * ch.p1);
    let q_t = q_tilde(alpha2, ch.q, d).max(0.0);
    Thm5Derived {
        d,
        alpha2,
        alpha_r: gamma * ch.p1 / (gamma * ch.p1 + n2),
        q_t,
        layer_power,
        coherent_gain,
        n_relay: n2 + gamma * ch.p1,
        n_dest: n3 + gamma * ch.p1,
    }
}

fn thm5_terms(
    der: &Thm5Derived,
    alpha: f64,
    ch: &ChannelParams,
    gamma: f64,
    n3: f64,
) -> (f64, f64) {
    let relay = r_dpc_raw(alpha, der.layer_power, der.q_t, der.n_relay);
    let coop = half_log2_1p_raw(der.coherent_gain / (n3 + der.d + gamma * ch.p1 + der.layer_power));
    let dest = r_dpc_raw(alpha, der.layer_power, der.q_t, der.n_dest) + coop;
    (relay, dest)
}

/// State-description lower bound at fixed (beta, gamma, alpha).
///
/// `alpha` must lie in the feasible sets of both the relay-side and the
/// destination-side precoding rates; otherwise an infeasibility error
/// names the violated set.
pub fn thm5_rate_at(ch: &ChannelParams, p: &Thm5Params) -> Result<BoundResult> {
    ch.validate()?;
    p.validate()?;
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", ch.n2, &mut warnings);
    let n3 = effective_noise("n3", ch.n3, &mut warnings);
    let der = thm5_derived(ch, p.beta, p.gamma, n2, n3);
    for n in [der.n_relay, der.n_dest] {
        let (lo, hi) = alpha_feasible_interval(der.layer_power, der.q_t, n)?;
        let slop = 1e-12 * (1.0 + p.alpha.abs());
        if p.alpha < lo - slop || p.alpha > hi + slop {
            return Err(Error::AlphaInfeasible {
                alpha: p.alpha,
                p: der.layer_power,
                q: der.q_t,
                n,
            });
        }
    }
    let (relay, dest) = thm5_terms(&der, p.alpha, ch, p.gamma, n3);
    BoundResult::from_terms(
        BTreeMap::from([
            ("alpha".into(), p.alpha),
            ("beta".into(), p.beta),
            ("gamma".into(), p.gamma),
        ]),
        BTreeMap::from([("relay".into(), relay), ("destination".into(), dest)]),
        der.to_map(),
        warnings,
    )
}

/// Maximize the state-description lower bound over beta, gamma ∈ `[0,1]` and
/// alpha in the intersection of the two feasible intervals.
///
/// The alpha axis is searched through a normalized coordinate u ∈ `[0,1]`
/// mapped onto the analytically computed intersection (which always
/// contains alpha = 0, hence is never empty), so the optimizer only ever
/// sees a box of feasible points.
pub fn maximize_thm5(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<BoundResult> {
    ch.validate()?;
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", ch.n2, &mut warnings);
    let n3 = effective_noise("n3", ch.n3, &mut warnings);
    let alpha_box = |der: &Thm5Derived| -> (f64, f64) {
        let (lo1, hi1) = alpha_interval_raw(der.layer_power, der.q_t, der.n_relay);
        let (lo2, hi2) = alpha_interval_raw(der.layer_power, der.q_t, der.n_dest);
        (lo1.max(lo2), hi1.min(hi2))
    };
    let m = maximize_box(
        |x| {
            let der = thm5_derived(ch, x[0], x[1], n2, n3);
            let (lo, hi) = alpha_box(&der);
            let alpha = lo + x[2] * (hi - lo);
            let (relay, dest) = thm5_terms(&der, alpha, ch, x[1], n3);
            relay.min(dest)
        },
        &[(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)],
        cfg,
    )?;
    let (beta, gamma, u) = (m.point[0], m.point[1], m.point[2]);
    let der = thm5_derived(ch, beta, gamma, n2, n3);
    let (lo, hi) = alpha_box(&der);
    let alpha = lo + u * (hi - lo);
    let (relay, dest) = thm5_terms(&der, alpha, ch, gamma, n3);
    BoundResult::from_terms(
        BTreeMap::from([
            ("alpha".into(), alpha),
            ("beta".into(), beta),
            ("gamma".into(), gamma),
        ]),
        BTreeMap::from([("relay".into(), relay), ("destination".into(), dest)]),
        der.to_map(),
        warnings,
    )
}

fn alpha_interval_raw(p: f64, q: f64, n: f64) -> (f64, f64) {
    if p <= 0.0 || q <= 0.0 {
        return (-ALPHA_CAP, ALPHA_CAP);
    }
    let a = q * (p + n);
    let b = -2.0 * p * q;
    let c = -p * p;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a))
}

/// Exact capacity of the degenerate parallel channel with orthogonal
/// components (the relay→destination link is state-free):
/// max over gamma of min{½log₂(1+γP₁/N₂), ½log₂(1+P₂/N₃)} + ½log₂(1+γ̄P₁/N₃).
pub fn degenerate_parallel_capacity(
    p1: f64,
    p2: f64,
    n2: f64,
    n3: f64,
    cfg: &OptimizerConfig,
) -> Result<BoundResult> {
    for (name, v, strict) in [
        ("p1", p1, true),
        ("p2", p2, false),
        ("n2", n2, true),
        ("n3", n3, true),
    ] {
        if !v.is_finite() || (strict && v <= 0.0) || (!strict && v < 0.0) {
            return Err(Error::InvalidParameter {
                name: name.into(),
                reason: format!("invalid power/noise {v}"),
            });
        }
    }
    let mut warnings = Vec::new();
    let n2 = effective_noise("n2", n2, &mut warnings);
    let n3 = effective_noise("n3", n3, &mut warnings);
    let terms_at = |gamma: f64| -> (f64, f64, f64) {
        let hop1 = half_log2_1p_raw(gamma * p1 / n2);
        let hop2 = half_log2_1p_raw(p2 / n3);
        let direct = half_log2_1p_raw((1.0 - gamma) * p1 / n3);
        (hop1, hop2, direct)
    };
    let m = maximize_box(
        |x| {
            let (h1, h2, d) = terms_at(x[0]);
            h1.min(h2) + d
        },
        &[(0.0, 1.0)],
        cfg,
    )?;
    let gamma = m.point[0];
    let (h1, h2, direct) = terms_at(gamma);
    // min(h1,h2)+direct == min(h1+direct, h2+direct)
    BoundResult::from_terms(
        BTreeMap::from([("gamma".into(), gamma)]),
        BTreeMap::from([
            ("relay_path".into(), h1 + direct),
            ("relay_link_cap".into(), h2 + direct),
        ]),
        BTreeMap::from([("direct_component".into(), direct)]),
        warnings,
    )
}

/// Limiting regimes of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AsymptoticCase {
    /// N₂ → 0: full cooperation, ½log₂(1 + (√P₁+√P₂)²/N₃).
    RelayNoiseZero,
    /// N₂ → ∞: the relay is useless, ½log₂(1 + P₁/N₃).
    RelayNoiseInfinite,
    /// Q → ∞: ½log₂(1 + P₁/max(N₂, N₃)).
    StateInfinite,
}

impl std::str::FromStr for AsymptoticCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relay-noise-zero" => Ok(Self::RelayNoiseZero),
            "relay-noise-infinite" => Ok(Self::RelayNoiseInfinite),
            "state-infinite" => Ok(Self::StateInfinite),
            other => Err(Error::InvalidParameter {
                name: "case".into(),
                reason: format!(
                    "unknown case `{other}` (expected relay-noise-zero, relay-noise-infinite or state-infinite)"
                ),
            }),
        }
    }
}

/// Reference value the bounds approach in the given limiting regime.
pub fn asymptotic_reference(case: AsymptoticCase, ch: &ChannelParams) -> Result<Rate> {
    ch.validate()?;
    let x = match case {
        AsymptoticCase::RelayNoiseZero => (ch.p1.sqrt() + ch.p2.sqrt()).powi(2) / ch.n3,
        AsymptoticCase::RelayNoiseInfinite => ch.p1 / ch.n3,
        AsymptoticCase::StateInfinite => ch.p1 / ch.n2.max(ch.n3),
    };
    Rate::new(half_log2_1p_raw(x))
}
