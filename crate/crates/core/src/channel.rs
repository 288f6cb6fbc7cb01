//! Channel parameters and rate units.
//!
//! All powers and noise variances are linear. All rates are in bits per
//! channel use (base-2 logarithms); [`Rate::nats`] converts when a
//! natural-log reference is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five constants of the Gaussian relay channel: source power `p1`,
/// relay power `p2`, state power `q`, relay noise variance `n2` and
/// destination noise variance `n3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
    pub n2: f64,
    pub n3: f64,
}

impl ChannelParams {
    pub fn new(p1: f64, p2: f64, q: f64, n2: f64, n3: f64) -> Result<Self> {
        let ch = Self { p1, p2, q, n2, n3 };
        ch.validate()?;
        Ok(ch)
    }

    /// `p1`, `n2`, `n3` must be finite and strictly positive; `p2`, `q`
    /// finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, strictly_positive: bool| -> Result<()> {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be finite, got {v}"),
                });
            }
            if strictly_positive && v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be > 0, got {v}"),
                });
            }
            if !strictly_positive && v < 0.0 {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be >= 0, got {v}"),
                });
            }
            Ok(())
        };
        check("p1", self.p1, true)?;
        check("p2", self.p2, false)?;
        check("q", self.q, false)?;
        check("n2", self.n2, true)?;
        check("n3", self.n3, true)?;
        Ok(())
    }
}

/// A non-negative information rate in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rate(f64);

impl Rate {
    pub const ZERO: Rate = Rate(0.0);

    pub fn new(bits: f64) -> Result<Self> {
        if !bits.is_finite() || bits < 0.0 {
            return Err(Error::InvalidParameter {
                name: "rate".into(),
                reason: format!("must be finite and >= 0, got {bits}"),
            });
        }
        Ok(Rate(bits))
    }

    pub fn bits(self) -> f64 {
        self.0
    }

    pub fn nats(self) -> f64 {
        self.0 * std::f64::consts::LN_2
    }
}

impl std::fmt::Display for Rate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// ½·log₂(1 + x), the kernel of every Gaussian rate expression.
/// Exactly 0 at x = 0.
pub fn half_log2_1p(x: f64) -> Result<Rate> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidParameter {
            name: "x".into(),
            reason: format!("must be finite and >= 0, got {x}"),
        });
    }
    Rate::new(half_log2_1p_raw(x))
}

/// Unchecked kernel used by the evaluators, which guarantee x ≥ 0 up to
/// round-off. `ln_1p` keeps precision for small x.
#[inline]
pub(crate) fn half_log2_1p_raw(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
