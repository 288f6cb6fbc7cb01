//! Capacity bounds for the state-dependent Gaussian relay channel whose
//! additive interference (the "state") is known noncausally at the source
//! but at neither the relay nor the destination.
//!
//! The crate computes and maximizes, in bits per channel use:
//!
//! * a two-cut upper bound that charges the relay for its irreducible
//!   residual uncertainty about the state, strictly inside the cut-set
//!   bound for positive state power;
//! * two lower bounds — describing the relay's ideal input ahead of time,
//!   and describing the state itself with precoded message layers;
//! * the cut-set and state-as-noise decode-and-forward baselines, exact
//!   special-case capacities and limiting reference rates;
//! * the discrete-memoryless achievable-rate expressions behind the
//!   Gaussian bounds, evaluated exactly on dense joint pmfs;
//! * log-determinant covariance oracles and a Monte-Carlo sampling check
//!   that confirm every Gaussian rate term independently.
//!
//! ```
//! use relaycap::bounds::{cutset_bound, maximize_thm4};
//! use relaycap::{ChannelParams, OptimizerConfig};
//!
//! let ch = ChannelParams::new(10.0, 3.16, 1000.0, 10.0, 10.0)?;
//! let cfg = OptimizerConfig::default();
//! let lower = maximize_thm4(&ch, &cfg)?.value;
//! let upper = cutset_bound(&ch, &cfg)?.value;
//! assert!(lower <= upper);
//! # Ok::<(), relaycap::Error>(())
//! ```
//!
//! See the `relaycap-cli` crate for the command-line front end.

pub mod bounds;
pub mod channel;
pub mod dm;
pub mod error;
pub mod gaussian;
pub mod optimizer;
pub mod pmf;
pub mod sweep;
pub mod validate;

pub use bounds::{BoundResult, Thm4Params, Thm5Params, UpperBoundParams};
pub use channel::{db_to_linear, half_log2_1p, linear_to_db, ChannelParams, Rate};
pub use error::{Error, Result};
pub use gaussian::GaussianJoint;
pub use optimizer::{maximize_box, OptimizerConfig};
pub use pmf::JointPmf;
