//! Zero-mean jointly Gaussian variables represented by a named covariance
//! matrix, with log-determinant mutual information. This is the
//! independent oracle the closed-form Gaussian rate terms are checked
//! against.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::channel::Rate;
use crate::error::{Error, Result};

/// Blocks with determinant at or below this are treated as singular.
pub const DET_FLOOR: f64 = 1e-300;

/// Eigenvalues below this are a PSD violation; in (−floor, 0) they are
/// round-off and get clipped to zero.
pub const PSD_FLOOR: f64 = -1e-10;

/// A symmetric positive-semidefinite covariance over named zero-mean
/// variables.
#[derive(Debug, Clone)]
pub struct GaussianJoint {
    names: Vec<String>,
    cov: DMatrix<f64>,
}

impl GaussianJoint {
    pub fn new<S: Into<String>>(names: Vec<S>, cov: DMatrix<f64>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if cov.nrows() != names.len() || cov.ncols() != names.len() {
            return Err(Error::InvalidParameter {
                name: "cov".into(),
                reason: format!(
                    "expected a {n}x{n} matrix, got {r}x{c}",
                    n = names.len(),
                    r = cov.nrows(),
                    c = cov.ncols()
                ),
            });
        }
        for i in 0..names.len() {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter {
                        name: "cov".into(),
                        reason: format!(
                            "not symmetric at ({i},{j}): {} vs {}",
                            cov[(i, j)],
                            cov[(j, i)]
                        ),
                    });
                }
            }
        }
        let min_eig = SymmetricEigen::new(cov.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < PSD_FLOOR {
            return Err(Error::NotPositiveSemidefinite(min_eig));
        }
        Ok(Self { names, cov })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn variance(&self, var: &str) -> Result<f64> {
        let a = self.axis(var)?;
        Ok(self.cov[(a, a)])
    }

    pub fn covariance(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.cov[(self.axis(a)?, self.axis(b)?)])
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

    fn block_det(&self, axes: &[usize], vars_label: &[&str]) -> Result<f64> {
        let sub = self.cov.select_rows(axes).select_columns(axes);
        let det = sub.determinant();
        if !det.is_finite() || det <= DET_FLOOR {
            return Err(Error::SingularBlock {
                vars: vars_label.join(", "),
                det,
            });
        }
        Ok(det)
    }

    /// I(X;Y) = ½·log₂( det Σ_X · det Σ_Y / det Σ_{XY} ), in bits.
    pub fn mi(&self, x_vars: &[&str], y_vars: &[&str]) -> Result<Rate> {
        let xa = self.axes(x_vars)?;
        let ya = self.axes(y_vars)?;
        for v in x_vars {
            if y_vars.contains(v) {
                return Err(Error::OverlappingVariables((*v).into()));
            }
        }
        let dx = self.block_det(&xa, x_vars)?;
        let dy = self.block_det(&ya, y_vars)?;
        let mut all_axes = xa;
        all_axes.extend_from_slice(&ya);
        let mut all_vars: Vec<&str> = x_vars.to_vec();
        all_vars.extend_from_slice(y_vars);
        let dxy = self.block_det(&all_axes, &all_vars)?;
        let bits = 0.5 * (dx.ln() + dy.ln() - dxy.ln()) / std::f64::consts::LN_2;
        if bits < 0.0 {
            if bits >= -crate::pmf::NEG_CLAMP {
                return Ok(Rate::ZERO);
            }
            return Err(Error::NegativeInformation(bits));
        }
        Rate::new(bits)
    }

    /// Symmetric square root via spectral decomposition, clipping
    /// round-off eigenvalues in (PSD_FLOOR, 0) to zero.
    pub(crate) fn symmetric_sqrt(&self) -> Result<DMatrix<f64>> {
        let eig = SymmetricEigen::new(self.cov.clone());
        let mut vals = eig.eigenvalues.clone();
        for v in vals.iter_mut() {
            if *v < PSD_FLOOR {
                return Err(Error::NotPositiveSemidefinite(*v));
            }
            *v = v.max(0.0).sqrt();
        }
        let q = eig.eigenvectors;
        Ok(&q * DMatrix::from_diagonal(&vals) * q.transpose())
    }
}
