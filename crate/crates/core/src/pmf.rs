//! Dense joint probability mass functions over named finite alphabets,
//! with the entropy and mutual-information primitives the discrete
//! achievable-rate expressions are built from.
//!
//! Conventions: all entropies and informations are in bits, 0·log 0 = 0,
//! and probabilities below [`ZERO_FLOOR`] are treated as exact zeros.

use crate::channel::Rate;
use crate::error::{Error, Result};

/// Probabilities below this are treated as exact zeros in entropy sums.
pub const ZERO_FLOOR: f64 = 1e-15;

/// Hard cap on the product alphabet of a dense pmf.
pub const MAX_ATOMS: usize = 10_000_000;

/// Negative information of magnitude up to this is round-off and is
/// clamped to zero; anything more negative is an internal error.
pub const NEG_CLAMP: f64 = 1e-12;

/// A dense pmf over a tuple of named finite alphabets, row-major in
/// declaration order.
#[derive(Debug, Clone)]
pub struct JointPmf {
    names: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    /// `vars` lists `(name, cardinality)` in storage order; `probs` is the
    /// dense table, row-major, later variables varying fastest.
    pub fn new<S: Into<String>>(vars: Vec<(S, usize)>, probs: Vec<f64>) -> Result<Self> {
        let mut names = Vec::with_capacity(vars.len());
        let mut sizes = Vec::with_capacity(vars.len());
        let mut atoms: u128 = 1;
        for (name, size) in vars {
            let name = name.into();
            if size == 0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "alphabet cardinality must be >= 1".into(),
                });
            }
            if names.contains(&name) {
                return Err(Error::OverlappingVariables(name));
            }
            atoms = atoms.saturating_mul(size as u128);
            names.push(name);
            sizes.push(size);
        }
        if atoms > MAX_ATOMS as u128 {
            return Err(Error::AlphabetTooLarge(atoms));
        }
        if probs.len() as u128 != atoms {
            return Err(Error::InvalidDistribution(format!(
                "expected {atoms} entries, got {}",
                probs.len()
            )));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "entry {p} is negative or non-finite"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, expected 1 within 1e-12"
            )));
        }
        Ok(Self {
            names,
            sizes,
            probs,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cardinality(&self, var: &str) -> Result<usize> {
        Ok(self.sizes[self.axis(var)?])
    }

    fn axis(&self, var: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == var)
            .ok_or_else(|| Error::UnknownVariable(var.into()))
    }

    fn axes(&self, vars: &[&str]) -> Result<Vec<usize>> {
        let mut axes = Vec::with_capacity(vars.len());
        for v in vars {
            let a = self.axis(v)?;
            if axes.contains(&a) {
                return Err(Error::OverlappingVariables((*v).into()));
            }
            axes.push(a);
        }
        Ok(axes)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.sizes.len()];
        for i in (0..self.sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.sizes[i + 1];
        }
        strides
    }

    /// Dense marginal over `vars` (in the given order), row-major.
    pub fn marginal(&self, vars: &[&str]) -> Result<Vec<f64>> {
        let axes = self.axes(vars)?;
        Ok(self.marginal_by_axes(&axes))
    }

    fn marginal_by_axes(&self, axes: &[usize]) -> Vec<f64> {
        let strides = self.strides();
        let out_len: usize = axes.iter().map(|&a| self.sizes[a]).product();
        let mut out = vec![0.0; out_len.max(1)];
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut idx = 0;
            for &a in axes {
                idx = idx * self.sizes[a] + (i / strides[a]) % self.sizes[a];
            }
            out[idx] += p;
        }
        out
    }

    /// Shannon entropy of the marginal over `vars`, in bits.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        let axes = self.axes(vars)?;
        Ok(entropy_bits(&self.marginal_by_axes(&axes)))
    }

    /// I(X;Y) = H(X) + H(Y) − H(X,Y), in bits.
    ///
    /// ```
    /// use relaycap::JointPmf;
    ///
    /// // x determines y completely: one full bit
    /// let pmf = JointPmf::new(vec![("x", 2), ("y", 2)], vec![0.5, 0.0, 0.0, 0.5])?;
    /// assert_eq!(pmf.mutual_information(&["x"], &["y"])?.bits(), 1.0);
    /// # Ok::<(), relaycap::Error>(())
    /// ```
    pub fn mutual_information(&self, x_vars: &[&str], y_vars: &[&str]) -> Result<Rate> {
        let xa = self.axes(x_vars)?;
        let ya = self.axes(y_vars)?;
        check_disjoint(x_vars, y_vars)?;
        let hx = entropy_bits(&self.marginal_by_axes(&xa));
        let hy = entropy_bits(&self.marginal_by_axes(&ya));
        let hxy = {
            let mut all = xa.clone();
            all.extend_from_slice(&ya);
            entropy_bits(&self.marginal_by_axes(&all))
        };
        clamp_information(hx + hy - hxy)
    }

    /// I(X;Y|Z) = H(X,Z) + H(Y,Z) − H(Z) − H(X,Y,Z), in bits. An empty
    /// `z_vars` reduces to plain mutual information.
    pub fn conditional_mutual_information(
        &self,
        x_vars: &[&str],
        y_vars: &[&str],
        z_vars: &[&str],
    ) -> Result<Rate> {
        let xa = self.axes(x_vars)?;
        let ya = self.axes(y_vars)?;
        let za = self.axes(z_vars)?;
        check_disjoint(x_vars, y_vars)?;
        check_disjoint(x_vars, z_vars)?;
        check_disjoint(y_vars, z_vars)?;
        let hxz = entropy_bits(&self.marginal_by_axes(&concat(&xa, &za)));
        let hyz = entropy_bits(&self.marginal_by_axes(&concat(&ya, &za)));
        let hz = entropy_bits(&self.marginal_by_axes(&za));
        let hxyz = entropy_bits(&self.marginal_by_axes(&concat(&concat(&xa, &ya), &za)));
        clamp_information(hxz + hyz - hz - hxyz)
    }
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = a.to_vec();
    out.extend_from_slice(b);
    out
}

fn check_disjoint(a: &[&str], b: &[&str]) -> Result<()> {
    for v in a {
        if b.contains(v) {
            return Err(Error::OverlappingVariables((*v).into()));
        }
    }
    Ok(())
}

fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > ZERO_FLOOR)
        .map(|&p| -p * p.log2())
        .sum()
}

fn clamp_information(bits: f64) -> Result<Rate> {
    if bits < 0.0 {
        if bits >= -NEG_CLAMP {
            return Ok(Rate::ZERO);
        }
        return Err(Error::NegativeInformation(bits));
    }
    Rate::new(bits)
}
