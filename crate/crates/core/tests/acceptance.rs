//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS line with the measured numbers (failures panic with the same
//! numbers). Run with `cargo test --test acceptance -- --nocapture` to see
//! every line.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relaycap::bounds::{
    cutset_bound, degenerate_parallel_capacity, df_state_as_noise_bound, maximize_thm4,
    maximize_thm5, maximize_upper_bound,
};
use relaycap::dm::search::{search_thm2, Thm2Channel};
use relaycap::dm::{eval_thm1, eval_thm2, Thm1Input, Thm2Input};
use relaycap::sweep::{run_sweep_rows, BoundKind, SweepAxis, SweepRow, SweepSpec};
use relaycap::validate::{randomized_oracle_grid, sample_covariance_check};
use relaycap::{db_to_linear, ChannelParams, GaussianJoint, OptimizerConfig};

/// Frozen after the first run: identity 3x3 at n = 10^6 lands near 2.2e-3,
/// so 5e-3 has a 2x margin and the seeded draw is deterministic anyway.
const SAMPLING_THRESHOLD: f64 = 5e-3;

fn ch(p1: f64, p2: f64, q: f64, n2: f64, n3: f64) -> ChannelParams {
    ChannelParams::new(p1, p2, q, n2, n3).unwrap()
}

fn fig2a_fixed() -> ChannelParams {
    // p1 = n3 = 10 dB, p2 = 5 dB, q = 30 dB; n2 set by the SNR axis
    ch(10.0, db_to_linear(5.0), 1000.0, 1.0, 10.0)
}

fn fig2b_fixed() -> ChannelParams {
    // p2 = 40 dB, p1 = q = n3 = 10 dB
    ch(10.0, db_to_linear(40.0), 10.0, 1.0, 10.0)
}

/// Lighter grid for 3-parameter maximizations inside bulk runs; the
/// pattern-search stage still converges each incumbent.
fn sweep_cfg() -> OptimizerConfig {
    OptimizerConfig {
        grid_points_per_dim: 61,
        ..OptimizerConfig::default()
    }
}

#[test]
fn criterion_01_asymptotic_optimality_clean_relay_link() {
    let start = Instant::now();
    let channel = ch(1.0, 1.0, 1.0, 1e-9, 1.0);
    let cfg = OptimizerConfig::default();
    let thm4 = maximize_thm4(&channel, &cfg).unwrap().value.bits();
    let upper = maximize_upper_bound(&channel, &cfg).unwrap().value.bits();
    let target = 0.5 * (1.0f64 + (1.0f64.sqrt() + 1.0f64.sqrt()).powi(2)).log2();
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 1 (asymptotic optimality, n2 -> 0): PASS pending asserts — thm4 {thm4:.6}, upper {upper:.6}, target {target:.6}, {elapsed:.2}s"
    );
    assert!(
        (thm4 - upper).abs() <= 0.01,
        "criterion 1 FAIL: |thm4 - upper| = {}",
        (thm4 - upper).abs()
    );
    assert!(
        (thm4 - target).abs() <= 0.01,
        "criterion 1 FAIL: thm4 {thm4} vs {target}"
    );
    assert!(
        (upper - target).abs() <= 0.01,
        "criterion 1 FAIL: upper {upper} vs {target}"
    );
    assert!(
        elapsed < 5.0,
        "criterion 1 FAIL: took {elapsed:.2}s (limit 5s)"
    );
    println!("criterion 1 (asymptotic optimality, n2 -> 0): PASS");
}

#[test]
fn criterion_02_upper_bound_strictly_inside_cutset() {
    let start = Instant::now();
    let cfg = OptimizerConfig::default();
    // single point at source-relay SNR = 0 dB
    let mut point = fig2a_fixed();
    point.n2 = point.p1 / db_to_linear(0.0);
    let upper0 = maximize_upper_bound(&point, &cfg).unwrap().value.bits();
    let cutset0 = cutset_bound(&point, &cfg).unwrap().value.bits();
    assert!(
        upper0 <= cutset0 - 1e-3,
        "criterion 2 FAIL: gap at 0 dB is {} (need >= 1e-3)",
        cutset0 - upper0
    );
    // full 41-point sweep
    let mut worst = f64::NEG_INFINITY;
    for i in 0..41 {
        let snr = -10.0 + 40.0 * i as f64 / 40.0;
        let mut c = fig2a_fixed();
        c.n2 = c.p1 / db_to_linear(snr);
        let u = maximize_upper_bound(&c, &cfg).unwrap().value.bits();
        let s = cutset_bound(&c, &cfg).unwrap().value.bits();
        worst = worst.max(u - s);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        worst <= 1e-9,
        "criterion 2 FAIL: upper exceeds cutset by {worst:e} somewhere on the sweep"
    );
    assert!(
        elapsed < 60.0,
        "criterion 2 FAIL: took {elapsed:.2}s (limit 60s)"
    );
    println!(
        "criterion 2 (upper < cutset): PASS — 0 dB gap {:.6}, worst sweep excess {worst:e}, {elapsed:.2}s",
        cutset0 - upper0
    );
}

#[test]
fn criterion_03_thm4_ignores_state_power() {
    let cfg = OptimizerConfig::default();
    let values: Vec<f64> = [0.1, 1.0, 1000.0]
        .into_iter()
        .map(|q| {
            maximize_thm4(&ch(1.0, 1.0, q, 1.0, 1.0), &cfg)
                .unwrap()
                .value
                .bits()
        })
        .collect();
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        spread <= 1e-9,
        "criterion 3 FAIL: values {values:?} spread {spread:e}"
    );
    println!("criterion 3 (state-power invariance of thm4): PASS — spread {spread:e}");
}

#[test]
fn criterion_04_thm5_strong_state_limit() {
    let channel = ch(1.0, 1.0, 1e6, 2.0, 1.0);
    let value = maximize_thm5(&channel, &OptimizerConfig::default())
        .unwrap()
        .value
        .bits();
    let target = 0.5 * 1.5f64.log2();
    assert!(
        (value - target).abs() <= 0.05,
        "criterion 4 FAIL: thm5 {value} vs limit {target}"
    );
    println!(
        "criterion 4 (strong-state limit of thm5): PASS — value {value:.6}, limit {target:.6}"
    );
}

#[test]
fn criterion_05_degenerate_parallel_capacity_exact() {
    let value = degenerate_parallel_capacity(1.0, 1.0, 1.0, 1.0, &OptimizerConfig::default())
        .unwrap()
        .value
        .bits();
    let target = 1.5f64.log2();
    assert!(
        (value - target).abs() <= 1e-6,
        "criterion 5 FAIL: {value} vs {target}"
    );
    println!("criterion 5 (degenerate parallel capacity): PASS — value {value:.9}");
}

#[test]
fn criterion_06_oracle_equivalence() {
    let start = Instant::now();
    let grid = randomized_oracle_grid(20, 10, 20250810).unwrap();
    assert!(
        grid.max_abs_diff < 1e-9,
        "criterion 6 FAIL: closed form vs log-det differ by {:e} over {} checks",
        grid.max_abs_diff,
        grid.cases
    );
    let identity = GaussianJoint::new(
        vec!["a", "b", "c"],
        DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
    )
    .unwrap();
    let sampling = sample_covariance_check(&identity, 1_000_000, 0).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        sampling.max_abs_deviation < SAMPLING_THRESHOLD,
        "criterion 6 FAIL: sampling deviation {} over threshold {SAMPLING_THRESHOLD}",
        sampling.max_abs_deviation
    );
    assert!(
        elapsed < 120.0,
        "criterion 6 FAIL: took {elapsed:.2}s (limit 120s)"
    );
    println!(
        "criterion 6 (oracle equivalence): PASS — {} checks max diff {:e}, sampling dev {:.2e}, {elapsed:.2}s",
        grid.cases, grid.max_abs_diff, sampling.max_abs_deviation
    );
}

#[test]
fn criterion_07_ordering_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(20250810);
    let cfg = sweep_cfg();
    let mut violations = Vec::new();
    for i in 0..100 {
        let channel = ch(
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
        );
        let thm4 = maximize_thm4(&channel, &cfg).unwrap().value.bits();
        let thm5 = maximize_thm5(&channel, &cfg).unwrap().value.bits();
        let upper = maximize_upper_bound(&channel, &cfg).unwrap().value.bits();
        let cutset = cutset_bound(&channel, &cfg).unwrap().value.bits();
        let df = df_state_as_noise_bound(&channel, &cfg)
            .unwrap()
            .value
            .bits();
        for (label, lo, hi) in [
            ("thm4 <= upper", thm4, upper),
            ("thm5 <= upper", thm5, upper),
            ("upper <= cutset", upper, cutset),
            ("df_noise <= cutset", df, cutset),
        ] {
            if lo > hi + 1e-6 {
                violations.push(format!("channel {i}: {label} violated by {:e}", lo - hi));
            }
        }
    }
    assert!(
        violations.is_empty(),
        "criterion 7 FAIL: {} violations: {violations:?}",
        violations.len()
    );
    println!("criterion 7 (ordering suite on 100 random channels): PASS");
}

#[test]
fn criterion_08_optimizer_vs_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cfg = OptimizerConfig::default();
    let mut worst_thm4 = 0.0f64;
    let mut worst_upper = 0.0f64;
    for _ in 0..10 {
        let channel = ch(
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
        );
        // gamma grid with 10^7 points
        let ours = maximize_thm4(&channel, &cfg).unwrap().value.bits();
        let n = 10_000_000usize;
        let oracle = (0..=n)
            .map(|i| {
                let gamma = i as f64 / n as f64;
                let d =
                    (channel.p2 * channel.n2 / (channel.n2 + gamma * channel.p1)).min(channel.p2);
                let gain = ((1.0 - gamma) * channel.p1).sqrt() + (channel.p2 - d).max(0.0).sqrt();
                0.5 * (gain * gain / (channel.n3 + d + gamma * channel.p1)).ln_1p()
                    / std::f64::consts::LN_2
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst_thm4 = worst_thm4.max((ours - oracle).abs());

        // 1000x1000 grid over the disc reparameterization
        let ours_up = maximize_upper_bound(&channel, &cfg).unwrap().value.bits();
        let dq = relaycap::bounds::delta_q(&channel).unwrap();
        let mut oracle_up = f64::NEG_INFINITY;
        for i in 0..1000 {
            let r = i as f64 / 999.0;
            for j in 0..1000 {
                let theta = std::f64::consts::FRAC_PI_2 * j as f64 / 999.0;
                let rho12 = r * theta.cos();
                let rho1s = -r * theta.sin();
                let resid = (1.0 - rho12 * rho12 - rho1s * rho1s).max(0.0);
                let c1 = 0.5
                    * (channel.p1 * (1.0 - rho12 * rho12) * (1.0 / channel.n2 + 1.0 / channel.n3))
                        .ln_1p()
                    / std::f64::consts::LN_2;
                let coh = (channel.p2.sqrt() + rho12 * channel.p1.sqrt()).powi(2);
                let leak = (dq.sqrt() + rho1s * channel.p1.sqrt()).powi(2);
                let c2 = 0.5
                    * ((coh / (channel.p1 * resid + leak + channel.n3)).ln_1p()
                        + (channel.p1 * resid / channel.n3).ln_1p())
                    / std::f64::consts::LN_2;
                oracle_up = oracle_up.max(c1.min(c2));
            }
        }
        worst_upper = worst_upper.max((ours_up - oracle_up).abs());
    }
    assert!(
        worst_thm4 <= 1e-8,
        "criterion 8 FAIL: thm4 off the dense grid by {worst_thm4:e}"
    );
    assert!(
        worst_upper <= 1e-4,
        "criterion 8 FAIL: upper off the dense grid by {worst_upper:e}"
    );
    println!(
        "criterion 8 (optimizer vs brute force): PASS — thm4 worst {worst_thm4:e}, upper worst {worst_upper:e}"
    );
}

#[test]
fn criterion_09_dm_suite() {
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let read = |name: &str| std::fs::read_to_string(fixtures.join(name)).unwrap();

    // noiseless binary no-state fixture: exactly one bit
    let input: Thm2Input = serde_json::from_str(&read("thm2_noiseless_binary.json")).unwrap();
    let report = eval_thm2(&input).unwrap();
    assert!(
        report.feasible,
        "criterion 9 FAIL: noiseless fixture infeasible"
    );
    let rate = report.rate_bits.unwrap();
    assert!(
        (rate - 1.0).abs() < 1e-12,
        "criterion 9 FAIL: noiseless rate {rate}"
    );
    // hand-enumerated slack: relay gain 1 bit, zero description cost
    assert!((report.constraint_slacks["description_rate"] - 1.0).abs() < 1e-12);

    // xor fixture: objective is the classic DF pair (1,1); the resolution
    // layer sits exactly on the strict boundary, hence infeasible
    let input: Thm1Input = serde_json::from_str(&read("thm1_classic_df.json")).unwrap();
    let report = eval_thm1(&input).unwrap();
    assert!((report.objective_terms["relay"] - 1.0).abs() < 1e-12);
    assert!((report.objective_terms["destination"] - 1.0).abs() < 1e-12);
    for (name, slack) in &report.constraint_slacks {
        assert!(
            slack.abs() < 1e-12,
            "criterion 9 FAIL: {name} slack {slack}"
        );
    }
    assert_eq!(report.feasibility_condition, Some(0.0));
    assert!(!report.feasible);

    // description claimed without any resolution capacity: slack -1 bit
    let input: Thm1Input =
        serde_json::from_str(&read("thm1_overclaimed_description.json")).unwrap();
    let report = eval_thm1(&input).unwrap();
    assert!(
        (report.constraint_slacks["relay_description"] + 1.0).abs() < 1e-12,
        "criterion 9 FAIL: slack {:?}",
        report.constraint_slacks
    );
    assert!(!report.feasible);

    // seed-0 search reproduces its golden report byte for byte
    let chan: Thm2Channel = serde_json::from_str(&read("thm2_channel_noiseless.json")).unwrap();
    let sizes = [("u", 2usize), ("ur", 2), ("x", 2)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let outcome = search_thm2(&chan, &sizes, 8, 0).unwrap();
    let golden_path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden/search_thm2_seed0.json");
    let golden = std::fs::read_to_string(&golden_path).unwrap();
    let produced = serde_json::to_string_pretty(&outcome).unwrap() + "\n";
    assert_eq!(
        produced, golden,
        "criterion 9 FAIL: search output diverged from the frozen golden report"
    );
    println!("criterion 9 (dm suite): PASS — noiseless rate {rate}, golden report reproduced");
}

fn curve<'a>(rows: &'a [SweepRow], name: &str) -> Vec<&'a SweepRow> {
    let mut out: Vec<&SweepRow> = rows.iter().filter(|r| r.bound_name == name).collect();
    out.sort_by(|a, b| a.axis_value.partial_cmp(&b.axis_value).unwrap());
    out
}

#[test]
fn criterion_10_figure_curves() {
    let cfg = sweep_cfg();
    let mut failures = Vec::new();
    for (label, fixed) in [("fig2a", fig2a_fixed()), ("fig2b", fig2b_fixed())] {
        let spec = SweepSpec {
            axis: SweepAxis::SnrDb,
            lo: -10.0,
            hi: 30.0,
            points: 41,
            fixed,
            bounds: vec![BoundKind::Thm4, BoundKind::Thm5, BoundKind::Upper],
        };
        let rows = run_sweep_rows(&spec, &cfg).unwrap();
        let thm4 = curve(&rows, "thm4");
        let thm5 = curve(&rows, "thm5");
        let upper = curve(&rows, "upper");

        // (a) thm4 non-decreasing in SNR
        let mut monotone = true;
        for w in thm4.windows(2) {
            if w[1].value_bits < w[0].value_bits - 1e-9 {
                monotone = false;
            }
        }
        if !monotone {
            failures.push(format!("{label}: thm4 curve is not non-decreasing"));
        }

        // (b) thm4 >= thm5 at >= 90% of grid points
        let wins = thm4
            .iter()
            .zip(&thm5)
            .filter(|(a, b)| a.value_bits >= b.value_bits - 1e-9)
            .count();
        let fraction = wins as f64 / thm4.len() as f64;
        if fraction < 0.9 {
            failures.push(format!(
                "{label}: thm4 >= thm5 at only {wins}/{} points ({:.1}%)",
                thm4.len(),
                100.0 * fraction
            ));
        }

        // (c) thm4-upper gap at the top SNR point below 0.05 bits
        let gap = upper.last().unwrap().value_bits - thm4.last().unwrap().value_bits;
        if gap >= 0.05 || gap.is_nan() {
            failures.push(format!(
                "{label}: top-SNR thm4-upper gap {gap:.4} (need < 0.05)"
            ));
        }
        println!(
            "criterion 10 [{label}]: monotone={monotone}, thm4>=thm5 at {wins}/41, top gap {gap:.4}"
        );
    }
    assert!(failures.is_empty(), "criterion 10 FAIL: {failures:?}");
    println!("criterion 10 (figure curve properties): PASS");
}
