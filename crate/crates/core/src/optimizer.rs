//! Deterministic box-constrained maximization: a coarse grid scan followed
//! by pattern-search refinement around the incumbent.
//!
//! Every objective this engine sees contains `min(·,·)` kinks or feasibility
//! reparameterizations, so refinement is derivative-free: the full Moore
//! neighborhood of the incumbent is probed at a shrinking step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid/refinement configuration shared by all bound maximizations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Coarse grid points per dimension (endpoints included).
    pub grid_points_per_dim: usize,
    /// Pattern-search iterations after the grid stage.
    pub refine_iters: usize,
    /// Step shrink factor applied when no neighbor improves.
    pub refine_shrink: f64,
    /// Absolute objective tolerance reported to callers.
    pub tol: f64,
    /// Reserved for randomized search orderings; the box engine itself is
    /// deterministic and ignores it.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_points_per_dim: 201,
            refine_iters: 200,
            refine_shrink: 0.5,
            tol: 1e-9,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_dim < 2 {
            return Err(Error::InvalidParameter {
                name: "grid_points_per_dim".into(),
                reason: "must be >= 2".into(),
            });
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return Err(Error::InvalidParameter {
                name: "refine_shrink".into(),
                reason: format!("must be in (0,1), got {}", self.refine_shrink),
            });
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol".into(),
                reason: "must be finite and > 0".into(),
            });
        }
        Ok(())
    }
}

/// Result of a box maximization.
#[derive(Debug, Clone)]
pub struct Maximum {
    pub point: Vec<f64>,
    pub value: f64,
    /// Incumbent after the grid stage, before refinement.
    pub grid_value: f64,
    pub evaluations: usize,
}

/// Maximize `f` over the box `bounds` (d ≤ 4).
///
/// Grid-stage ties keep the lexicographically smallest coordinate vector.
/// Refinement only accepts strict improvements, so the reported value never
/// drops below the grid incumbent. Probing a non-finite objective value is
/// an error carrying the offending point.
pub fn maximize_box<F>(f: F, bounds: &[(f64, f64)], cfg: &OptimizerConfig) -> Result<Maximum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let d = bounds.len();
    if d == 0 || d > 4 {
        return Err(Error::InvalidParameter {
            name: "bounds".into(),
            reason: format!("dimension must be 1..=4, got {d}"),
        });
    }
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidParameter {
                name: format!("bounds[{i}]"),
                reason: format!("invalid interval [{lo}, {hi}]"),
            });
        }
    }

    let n = cfg.grid_points_per_dim;
    let total = n.pow(d as u32);
    let coord = |axis: usize, step: usize| -> f64 {
        let (lo, hi) = bounds[axis];
        lo + (hi - lo) * step as f64 / (n - 1) as f64
    };
    let point_of = |mut linear: usize| -> Vec<f64> {
        let mut steps = vec![0usize; d];
        for axis in (0..d).rev() {
            steps[axis] = linear % n;
            linear /= n;
        }
        (0..d).map(|a| coord(a, steps[a])).collect()
    };

    // Grid stage. Linear index order is lexicographic in the coordinate
    // tuple, and the merge keeps the lowest index among exact ties.
    let eval_at = |idx: usize| -> Result<(f64, usize)> {
        let x = point_of(idx);
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective(x));
        }
        Ok((v, idx))
    };
    let merge = |a: (f64, usize), b: (f64, usize)| -> (f64, usize) {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };

    let (mut best_val, best_idx) = if total >= 1 << 15 {
        (0..total)
            .into_par_iter()
            .map(eval_at)
            .try_reduce(|| (f64::NEG_INFINITY, usize::MAX), |a, b| Ok(merge(a, b)))?
    } else {
        let mut acc = (f64::NEG_INFINITY, usize::MAX);
        for idx in 0..total {
            acc = merge(acc, eval_at(idx)?);
        }
        acc
    };
    let grid_value = best_val;
    let mut best = point_of(best_idx);
    let mut evaluations = total;

    // Pattern-search refinement over the full Moore neighborhood.
    let mut steps: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (n - 1) as f64)
        .collect();
    let spans: Vec<f64> = bounds.iter().map(|&(lo, hi)| hi - lo).collect();
    let offsets: Vec<Vec<i8>> = moore_offsets(d);
    for _ in 0..cfg.refine_iters {
        if steps
            .iter()
            .zip(&spans)
            .all(|(&s, &w)| s <= w * f64::EPSILON || w == 0.0)
        {
            break;
        }
        let mut improved = false;
        let mut cand_val = best_val;
        let mut cand = best.clone();
        for off in &offsets {
            let mut x = best.clone();
            for (a, &o) in off.iter().enumerate() {
                let (lo, hi) = bounds[a];
                x[a] = (x[a] + o as f64 * steps[a]).clamp(lo, hi);
            }
            let v = f(&x);
            evaluations += 1;
            if !v.is_finite() {
                return Err(Error::NonFiniteObjective(x));
            }
            if v > cand_val {
                cand_val = v;
                cand = x;
                improved = true;
            }
        }
        if improved {
            best_val = cand_val;
            best = cand;
        } else {
            for s in &mut steps {
                *s *= cfg.refine_shrink;
            }
        }
    }

    Ok(Maximum {
        point: best,
        value: best_val,
        grid_value,
        evaluations,
    })
}

fn moore_offsets(d: usize) -> Vec<Vec<i8>> {
    let mut out = Vec::with_capacity(3usize.pow(d as u32) - 1);
    let total = 3usize.pow(d as u32);
    for mut code in 0..total {
        let mut off = vec![0i8; d];
        for item in off.iter_mut() {
            *item = (code % 3) as i8 - 1;
            code /= 3;
        }
        if off.iter().any(|&o| o != 0) {
            out.push(off);
        }
    }
    out
}
