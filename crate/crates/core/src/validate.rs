//! Independent oracles for the Gaussian lower bounds.
//!
//! The state-description bound's closed-form terms are re-derived here from
//! first principles: the exact joint covariance implied by the auxiliary
//! variable construction is assembled, and each rate term is recomputed as
//! a log-determinant mutual-information functional of that covariance.
//! Agreement is reported pair by pair, never silently absorbed.
//!
//! The conditioning used for the precoding pairs subtracts the resolvable
//! signal layer from the observation (`w2 = y2 − m·x2 − α₂·ŝ_r`,
//! `w3 = y3 − v`) rather than conditioning on `v` probabilistically: the
//! residual state `s − α₂·ŝ_r` is correlated with `v`, so conditioning
//! would change its effective power away from the q̃ the closed forms use.
//! With the subtraction form the three identities hold to machine
//! precision; see the term names in [`validate_thm5_terms`].

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    alpha_feasible_interval, q_tilde, r_dpc, thm4_rate_at, Thm4Params, Thm5Params,
};
use crate::channel::{half_log2_1p_raw, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::GaussianJoint;

/// Variances at or below this are treated as a constant (zero-information)
/// variable when evaluating oracle mutual informations.
const DEGENERATE_VAR: f64 = 1e-12;

/// Scalar coefficients of the auxiliary-variable construction behind the
/// state-description bound.
#[derive(Debug, Clone, Serialize)]
pub struct Thm5Construction {
    pub beta: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// Test channel ŝ_r = a·s + noise, a = 1 − D/Q.
    pub test_channel_gain: f64,
    /// Variance of the test-channel noise, D(1 − D/Q).
    pub test_channel_noise_var: f64,
    pub d: f64,
    pub alpha2: f64,
    /// Relay-layer inflation factor γP₁/(γP₁+N₂).
    pub alpha_r: f64,
    pub q_tilde: f64,
    /// Coefficient of x2 inside v: √(β̄γ̄P₁/P₂) + 1.
    pub v_x2_coeff: f64,
    /// Power of the fresh message layer x′, βγ̄P₁.
    pub message_power: f64,
}

/// Base-variable decomposition of the construction: every named variable
/// is a linear combination of 7 independent zero-mean components.
struct Thm5Basis {
    construction: Thm5Construction,
    base_vars: [f64; 7], // s, sdot, x2, x_prime, x1r, z2, z3
    rows: Vec<(&'static str, [f64; 7])>,
}

fn thm5_basis(ch: &ChannelParams, p: &Thm5Params) -> Result<Thm5Basis> {
    ch.validate()?;
    p.validate()?;
    if ch.p2 <= 0.0 {
        return Err(Error::Unsupported(
            "the construction scales x2 by sqrt(1/p2); p2 must be positive".into(),
        ));
    }
    let gbar = 1.0 - p.gamma;
    let d = (ch.q * ch.n2 / (ch.n2 + p.gamma * ch.p1)).min(ch.q);
    let ratio = if ch.q > 0.0 { d / ch.q } else { 0.0 };
    let a = 1.0 - ratio;
    let sdot_var = d * (1.0 - ratio);
    let message_power = p.beta * gbar * ch.p1;
    let coherent = ((1.0 - p.beta) * gbar * ch.p1).sqrt() + ch.p2.sqrt();
    let alpha2 =
        coherent * coherent / (coherent * coherent + message_power + ch.n3 + d + p.gamma * ch.p1);
    let q_t = q_tilde(alpha2, ch.q, d).max(0.0);
    let alpha_r = p.gamma * ch.p1 / (p.gamma * ch.p1 + ch.n2);
    let m = ((1.0 - p.beta) * gbar * ch.p1 / ch.p2).sqrt();

    let mut rows: Vec<(&'static str, [f64; 7])> = Vec::new();
    let e = |k: usize| {
        let mut r = [0.0; 7];
        r[k] = 1.0;
        r
    };
    let lin = |terms: &[(f64, [f64; 7])]| {
        let mut r = [0.0; 7];
        for (c, t) in terms {
            for k in 0..7 {
                r[k] += c * t[k];
            }
        }
        r
    };
    let s = e(0);
    let sr = lin(&[(a, e(0)), (1.0, e(1))]);
    let x2 = e(2);
    let xp = e(3);
    let x1r = e(4);
    let x1 = lin(&[(1.0, x1r), (m, x2), (1.0, xp)]);
    let v = lin(&[(m + 1.0, x2), (alpha2, sr)]);
    let sigma = lin(&[(1.0, s), (-alpha2, sr)]);
    let u = lin(&[(1.0, xp), (p.alpha, sigma)]);
    let ur = lin(&[(1.0, x1r), (alpha_r * (1.0 - p.alpha), s)]);
    let z2 = e(5);
    let z3 = e(6);
    let y2 = lin(&[(1.0, x1), (1.0, s), (1.0, z2)]);
    let y3 = lin(&[(1.0, x1), (1.0, x2), (1.0, s), (1.0, z3)]);
    let w2 = lin(&[(1.0, y2), (-m, x2), (-alpha2, sr)]);
    let w3 = lin(&[(1.0, y3), (-1.0, v)]);

    rows.push(("s", s));
    rows.push(("s_hat_r", sr));
    rows.push(("x2", x2));
    rows.push(("x_prime", xp));
    rows.push(("x1r", x1r));
    rows.push(("x1", x1));
    rows.push(("v", v));
    rows.push(("u", u));
    rows.push(("u_r", ur));
    rows.push(("z2", z2));
    rows.push(("z3", z3));
    rows.push(("y2", y2));
    rows.push(("y3", y3));
    rows.push(("s_residual", sigma));
    rows.push(("w2", w2));
    rows.push(("w3", w3));

    Ok(Thm5Basis {
        construction: Thm5Construction {
            beta: p.beta,
            gamma: p.gamma,
            alpha: p.alpha,
            test_channel_gain: a,
            test_channel_noise_var: sdot_var,
            d,
            alpha2,
            alpha_r,
            q_tilde: q_t,
            v_x2_coeff: m + 1.0,
            message_power,
        },
        base_vars: [
            ch.q,
            sdot_var,
            ch.p2,
            message_power,
            p.gamma * ch.p1,
            ch.n2,
            ch.n3,
        ],
        rows,
    })
}

fn basis_to_joint(basis: &Thm5Basis, count: usize) -> Result<GaussianJoint> {
    let n = count.min(basis.rows.len());
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for k in 0..7 {
                s += basis.rows[i].1[k] * basis.rows[j].1[k] * basis.base_vars[k];
            }
            cov[(i, j)] = s;
            cov[(j, i)] = s;
        }
    }
    GaussianJoint::new(
        basis.rows.iter().take(n).map(|(name, _)| *name).collect(),
        cov,
    )
}

/// Exact joint covariance of the construction over
/// {s, ŝ_r, x2, x′, x1r, x1, v, u, u_r, z2, z3, y2, y3}.
pub fn build_thm5_covariance(ch: &ChannelParams, p: &Thm5Params) -> Result<GaussianJoint> {
    let basis = thm5_basis(ch, p)?;
    basis_to_joint(&basis, 13)
}

/// One closed-form/oracle pair.
#[derive(Debug, Clone, Serialize)]
pub struct TermCheck {
    pub name: String,
    pub closed_form: f64,
    pub log_det: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Thm5ValidationReport {
    pub channel: ChannelParams,
    pub construction: Thm5Construction,
    pub checks: Vec<TermCheck>,
    pub max_abs_diff: f64,
}

fn mi_or_zero(g: &GaussianJoint, x: &[&str], y: &[&str]) -> Result<f64> {
    for side in [x, y] {
        let mut var_product = 1.0;
        for v in side {
            var_product *= g.variance(v)?;
        }
        if var_product <= DEGENERATE_VAR {
            return Ok(0.0);
        }
    }
    Ok(g.mi(x, y)?.bits())
}

/// Check every rate term of the state-description bound against the
/// covariance oracle:
///
/// * `relay_precoding`:  R(α, βγ̄P₁, q̃, N₂+γP₁)  vs  I(u; w2) − I(u; s−α₂ŝ_r)
/// * `destination_precoding`: R(α, βγ̄P₁, q̃, N₃+γP₁) vs I(u; w3) − I(u; s−α₂ŝ_r)
/// * `cooperative_layer`: ½log₂(1 + (√(β̄γ̄P₁)+√P₂)²/(N₃+D+γP₁+βγ̄P₁))
///   vs I(v; y3) − I(v; ŝ_r)
pub fn validate_thm5_terms(ch: &ChannelParams, p: &Thm5Params) -> Result<Thm5ValidationReport> {
    let basis = thm5_basis(ch, p)?;
    let der = &basis.construction;
    for n in [ch.n2 + p.gamma * ch.p1, ch.n3 + p.gamma * ch.p1] {
        let (lo, hi) = alpha_feasible_interval(der.message_power, der.q_tilde, n)?;
        let slop = 1e-12 * (1.0 + p.alpha.abs());
        if p.alpha < lo - slop || p.alpha > hi + slop {
            return Err(Error::AlphaInfeasible {
                alpha: p.alpha,
                p: der.message_power,
                q: der.q_tilde,
                n,
            });
        }
    }
    let g = basis_to_joint(&basis, 16)?;

    let relay_cf = r_dpc(
        p.alpha,
        der.message_power,
        der.q_tilde,
        ch.n2 + p.gamma * ch.p1,
    )?;
    let dest_cf = r_dpc(
        p.alpha,
        der.message_power,
        der.q_tilde,
        ch.n3 + p.gamma * ch.p1,
    )?;
    let coherent = ((1.0 - p.beta) * (1.0 - p.gamma) * ch.p1).sqrt() + ch.p2.sqrt();
    let coop_cf = half_log2_1p_raw(
        coherent * coherent / (ch.n3 + der.d + p.gamma * ch.p1 + der.message_power),
    );

    let u_sigma = mi_or_zero(&g, &["u"], &["s_residual"])?;
    let relay_ld = mi_or_zero(&g, &["u"], &["w2"])? - u_sigma;
    let dest_ld = mi_or_zero(&g, &["u"], &["w3"])? - u_sigma;
    let coop_ld = mi_or_zero(&g, &["v"], &["y3"])? - mi_or_zero(&g, &["v"], &["s_hat_r"])?;

    let checks = vec![
        TermCheck {
            name: "relay_precoding".into(),
            closed_form: relay_cf,
            log_det: relay_ld,
            abs_diff: (relay_cf - relay_ld).abs(),
        },
        TermCheck {
            name: "destination_precoding".into(),
            closed_form: dest_cf,
            log_det: dest_ld,
            abs_diff: (dest_cf - dest_ld).abs(),
        },
        TermCheck {
            name: "cooperative_layer".into(),
            closed_form: coop_cf,
            log_det: coop_ld,
            abs_diff: (coop_cf - coop_ld).abs(),
        },
    ];
    let max_abs_diff = checks.iter().map(|c| c.abs_diff).fold(0.0, f64::max);
    Ok(Thm5ValidationReport {
        channel: *ch,
        construction: basis.construction,
        checks,
        max_abs_diff,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Thm4ValidationReport {
    pub channel: ChannelParams,
    pub gamma: f64,
    pub d: f64,
    pub checks: Vec<TermCheck>,
    pub max_abs_diff: f64,
    /// Quantities the effective-channel identity cannot pin down.
    pub unchecked: Vec<String>,
}

/// Check the input-description bound through its effective channel: the
/// relay's ideal input `x` (power P₂) is quantized to `x_hat` with
/// distortion D, and after MMSE-splitting the description error the
/// destination sees the message carrier at gain √(γ̄P₁)+√(P₂−D) against
/// residual noise D + γP₁ + N₃.
pub fn validate_thm4_effective_channel(
    ch: &ChannelParams,
    p: &Thm4Params,
) -> Result<Thm4ValidationReport> {
    ch.validate()?;
    p.validate()?;
    let gbar = 1.0 - p.gamma;
    let d = (ch.p2 * ch.n2 / (ch.n2 + p.gamma * ch.p1)).min(ch.p2);
    let ratio = if ch.p2 > 0.0 { d / ch.p2 } else { 0.0 };
    let a = 1.0 - ratio;
    let xt_var = d * (1.0 - ratio);
    let xi = (gbar * ch.p1).sqrt() + (ch.p2 - d).max(0.0).sqrt();

    // base: [xu (unit), xt, s, e_res, z3]
    let base = [1.0, xt_var, ch.q, d + p.gamma * ch.p1, ch.n3];
    let rows: Vec<(&str, [f64; 5])> = vec![
        ("x", [ch.p2.sqrt(), 0.0, 0.0, 0.0, 0.0]),
        ("x_hat", [a * ch.p2.sqrt(), 1.0, 0.0, 0.0, 0.0]),
        ("s", [0.0, 0.0, 1.0, 0.0, 0.0]),
        ("x_w", [(gbar * ch.p1).sqrt(), 0.0, 0.0, 0.0, 0.0]),
        ("e_res", [0.0, 0.0, 0.0, 1.0, 0.0]),
        ("z3", [0.0, 0.0, 0.0, 0.0, 1.0]),
        ("y_eff", [xi, 0.0, 0.0, 1.0, 1.0]),
    ];
    let n = rows.len();
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for (k, &b) in base.iter().enumerate() {
                s += rows[i].1[k] * rows[j].1[k] * b;
            }
            cov[(i, j)] = s;
            cov[(j, i)] = s;
        }
    }
    let g = GaussianJoint::new(rows.iter().map(|(name, _)| *name).collect(), cov)?;

    let var_err = g.variance("x")? + g.variance("x_hat")? - 2.0 * g.covariance("x", "x_hat")?;
    let var_xhat = g.variance("x_hat")?;
    // The message carrier and y_eff's signal part are both multiples of
    // the same unit base variable; use whichever copy is non-degenerate.
    let carrier = if ch.p2 > DEGENERATE_VAR { "x" } else { "x_w" };
    let rate_ld = if g.variance(carrier)? <= DEGENERATE_VAR || xi <= 0.0 {
        0.0
    } else {
        g.mi(&[carrier], &["y_eff"])?.bits()
    };
    let rate_cf = thm4_rate_at(ch, p)?.value.bits();

    let checks = vec![
        TermCheck {
            name: "description_error_variance".into(),
            closed_form: d,
            log_det: var_err,
            abs_diff: (d - var_err).abs(),
        },
        TermCheck {
            name: "description_variance".into(),
            closed_form: (ch.p2 - d).max(0.0),
            log_det: var_xhat,
            abs_diff: ((ch.p2 - d).max(0.0) - var_xhat).abs(),
        },
        TermCheck {
            name: "effective_snr_rate".into(),
            closed_form: rate_cf,
            log_det: rate_ld,
            abs_diff: (rate_cf - rate_ld).abs(),
        },
    ];
    let max_abs_diff = checks.iter().map(|c| c.abs_diff).fold(0.0, f64::max);
    Ok(Thm4ValidationReport {
        channel: *ch,
        gamma: p.gamma,
        d,
        checks,
        max_abs_diff,
        unchecked: vec!["description_layer_inflation_factor".into()],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingReport {
    pub n: usize,
    pub seed: u64,
    pub dim: usize,
    pub max_abs_deviation: f64,
}

/// Number of fixed RNG streams the sample budget is split across; results
/// do not depend on how many threads actually run them.
const SAMPLE_STREAMS: u64 = 8;

/// Draw `n` IID vectors from the joint (via its symmetric square root and
/// seeded standard normals) and report the largest entry-wise deviation
/// between the empirical second-moment matrix and the analytic covariance.
pub fn sample_covariance_check(g: &GaussianJoint, n: usize, seed: u64) -> Result<SamplingReport> {
    if n < 10_000 {
        return Err(Error::InvalidParameter {
            name: "n".into(),
            reason: format!("need at least 10000 samples, got {n}"),
        });
    }
    let root = g.symmetric_sqrt()?;
    let dim = g.dim();
    let base = n / SAMPLE_STREAMS as usize;
    let rem = n % SAMPLE_STREAMS as usize;
    let partials: Vec<DMatrix<f64>> = (0..SAMPLE_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream + 1);
            let count = base + usize::from((stream as usize) < rem);
            let mut sum = DMatrix::zeros(dim, dim);
            let mut z = nalgebra::DVector::zeros(dim);
            for _ in 0..count {
                for zi in z.iter_mut() {
                    *zi = rng.sample::<f64, _>(StandardNormal);
                }
                let x = &root * &z;
                for i in 0..dim {
                    for j in 0..=i {
                        sum[(i, j)] += x[i] * x[j];
                    }
                }
            }
            sum
        })
        .collect();
    // fixed-order merge keeps the result independent of thread scheduling
    let mut total = DMatrix::zeros(dim, dim);
    for p in partials {
        total += p;
    }
    let mut max_dev = 0.0f64;
    for i in 0..dim {
        for j in 0..=i {
            let emp = total[(i, j)] / n as f64;
            max_dev = max_dev.max((emp - g.cov()[(i, j)]).abs());
        }
    }
    Ok(SamplingReport {
        n,
        seed,
        dim,
        max_abs_deviation: max_dev,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub cases: usize,
    pub max_abs_diff: f64,
}

/// Randomized agreement sweep: for each of `channels` random channels,
/// `draws` random feasible (β, γ, α) triples are validated against the
/// covariance oracle, plus one effective-channel check per channel.
pub fn randomized_oracle_grid(channels: usize, draws: usize, seed: u64) -> Result<GridSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs_diff = 0.0f64;
    let mut cases = 0usize;
    for _ in 0..channels {
        let ch = ChannelParams::new(
            rng.random_range(0.2..5.0),
            rng.random_range(0.2..5.0),
            rng.random_range(0.2..5.0),
            rng.random_range(0.2..5.0),
            rng.random_range(0.2..5.0),
        )?;
        for _ in 0..draws {
            let beta = rng.random_range(0.05..0.95);
            let gamma = rng.random_range(0.05..0.95);
            let gbar = 1.0 - gamma;
            let d = ch.q * ch.n2 / (ch.n2 + gamma * ch.p1);
            let coherent = ((1.0 - beta) * gbar * ch.p1).sqrt() + ch.p2.sqrt();
            let alpha2 = coherent * coherent
                / (coherent * coherent + beta * gbar * ch.p1 + ch.n3 + d + gamma * ch.p1);
            let q_t = q_tilde(alpha2, ch.q, d).max(0.0);
            let power = beta * gbar * ch.p1;
            let (lo1, hi1) = alpha_feasible_interval(power, q_t, ch.n2 + gamma * ch.p1)?;
            let (lo2, hi2) = alpha_feasible_interval(power, q_t, ch.n3 + gamma * ch.p1)?;
            let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
            let alpha = lo + rng.random_range(0.05..0.95) * (hi - lo);
            let report = validate_thm5_terms(&ch, &Thm5Params { beta, gamma, alpha })?;
            max_abs_diff = max_abs_diff.max(report.max_abs_diff);
            cases += report.checks.len();
        }
        let gamma = rng.random_range(0.02..0.98);
        let report = validate_thm4_effective_channel(&ch, &Thm4Params { gamma })?;
        max_abs_diff = max_abs_diff.max(report.max_abs_diff);
        cases += report.checks.len();
    }
    Ok(GridSummary {
        cases,
        max_abs_diff,
    })
}
