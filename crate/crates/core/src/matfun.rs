//! Commutator algebra, parity splitting and Hermitian matrix functions.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{check_dims, OperatorMatrix};

/// Tolerances shared by the matrix-function routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatFunConfig {
    /// Target relative Frobenius residual of a matrix function.
    pub tol: f64,
    /// Spectral gap threshold relative to the operator norm.
    pub gap_rel: f64,
    /// Largest accepted relative asymmetry of a Hermitian input.
    pub herm_tol: f64,
    /// Cap on Newton-Schulz refinement sweeps.
    pub max_polish: usize,
}

impl Default for MatFunConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            gap_rel: 1e-8,
            herm_tol: 1e-10,
            max_polish: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatFunReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_dims(a, b)?;
    Ok(&(a * b) - &(b * a))
}

pub fn anticommutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_dims(a, b)?;
    Ok(&(a * b) + &(b * a))
}

/// `‖β² − I‖_F / √dim`.
pub fn involution_residual(beta: &OperatorMatrix) -> f64 {
    let sq = (beta * beta).add_identity(-1.0);
    sq.frobenius_norm() / (beta.dim() as f64).sqrt()
}

/// Splits `x` into parts commuting and anticommuting with `beta`.
pub fn parity_split(
    x: &OperatorMatrix,
    beta: &OperatorMatrix,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    check_dims(x, beta)?;
    let residual = involution_residual(beta);
    if residual > 1e-12 {
        return Err(Error::NotInvolution { residual });
    }
    let mirrored = &(beta * x) * beta;
    let even = (x + &mirrored).scale(0.5);
    let odd = x - &even;
    Ok((even, odd))
}

fn require_hermitian(a: &OperatorMatrix, cfg: &MatFunConfig) -> Result<()> {
    let residual = a.hermiticity_residual();
    if residual > cfg.herm_tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    values: Vec<f64>,
    vectors: OperatorMatrix,
}

impl HermitianEigen {
    pub fn new(a: &OperatorMatrix) -> Result<Self> {
        Self::with_config(a, &MatFunConfig::default())
    }

    pub fn with_config(a: &OperatorMatrix, cfg: &MatFunConfig) -> Result<Self> {
        require_hermitian(a, cfg)?;
        let sym = a.hermitian_part().into_dmatrix();
        let eig = sym.symmetric_eigen();
        let n = a.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self {
            values,
            vectors: OperatorMatrix::from_dmatrix(vectors)?,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Orthonormal eigenvectors as columns, ordered like [`Self::values`].
    pub fn vectors(&self) -> &OperatorMatrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let v = self.vectors.as_dmatrix().column(k);
        v.iter().copied().collect()
    }

    /// Largest |eigenvalue|.
    pub fn op_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, w| acc.max(w.abs()))
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |acc, w| acc.min(w.abs()))
    }

    /// `V f(Λ) V†`, Hermitian by construction.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> OperatorMatrix {
        let scaled: Vec<f64> = self.values.iter().map(|&w| f(w)).collect();
        let n = self.values.len();
        let v = &self.vectors;
        let left = OperatorMatrix::from_fn(n, |i, j| v[(i, j)] * scaled[j]);
        (&left * &v.adjoint()).hermitian_part()
    }

    /// `‖V Λ V† − A‖_F / ‖A‖_F` and `‖V†V − I‖_F`.
    pub fn reconstruction_residuals(&self, a: &OperatorMatrix) -> (f64, f64) {
        let rebuilt = self.apply(|w| w);
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        let recon = (&rebuilt - a).frobenius_norm() / scale;
        let ortho = (&self.vectors.adjoint() * &self.vectors)
            .add_identity(-1.0)
            .frobenius_norm();
        (recon, ortho)
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn spectrum_hermitian(a: &OperatorMatrix) -> Result<Vec<f64>> {
    Ok(HermitianEigen::new(a)?.values)
}

/// `f(A)` for Hermitian `A`.
pub fn herm_fn(a: &OperatorMatrix, f: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    Ok(HermitianEigen::new(a)?.apply(f))
}

/// Errors unless the smallest eigenvalue exceeds `gap_rel · ‖A‖_op`.
pub fn require_positive_definite(eig: &HermitianEigen, cfg: &MatFunConfig) -> Result<()> {
    let gap_tol = cfg.gap_rel * eig.op_norm();
    let smallest = eig.values[0];
    if smallest <= gap_tol {
        return Err(Error::NotPositiveDefinite { smallest, gap_tol });
    }
    Ok(())
}

pub fn herm_sqrt(a: &OperatorMatrix) -> Result<(OperatorMatrix, MatFunReport)> {
    herm_sqrt_with(a, &MatFunConfig::default())
}

pub fn herm_sqrt_with(
    a: &OperatorMatrix,
    cfg: &MatFunConfig,
) -> Result<(OperatorMatrix, MatFunReport)> {
    let eig = HermitianEigen::with_config(a, cfg)?;
    require_positive_definite(&eig, cfg)?;
    let s = eig.apply(f64::sqrt);
    let residual = (&(&s * &s) - a).frobenius_norm() / a.frobenius_norm();
    let report = MatFunReport {
        iterations: 0,
        residual,
        converged: residual <= cfg.tol,
    };
    Ok((s, report))
}

pub fn herm_inv_sqrt(a: &OperatorMatrix) -> Result<(OperatorMatrix, MatFunReport)> {
    herm_inv_sqrt_with(a, &MatFunConfig::default())
}

/// Inverse square root, refined by `S ← S(3I − A S²)/2` sweeps.
pub fn herm_inv_sqrt_with(
    a: &OperatorMatrix,
    cfg: &MatFunConfig,
) -> Result<(OperatorMatrix, MatFunReport)> {
    let eig = HermitianEigen::with_config(a, cfg)?;
    require_positive_definite(&eig, cfg)?;
    let mut s = eig.apply(|w| 1.0 / w.sqrt());
    let defect = |s: &OperatorMatrix| (&(s * a) * s).add_identity(-1.0).frobenius_norm();
    let mut residual = defect(&s);
    let mut iterations = 0;
    while residual > 0.01 * cfg.tol && iterations < cfg.max_polish {
        let correction = (&(a * &s) * &s).scale(-1.0).add_identity(3.0);
        let next = (&s * &correction).scale(0.5).hermitian_part();
        let r = defect(&next);
        if r >= residual {
            break;
        }
        s = next;
        residual = r;
        iterations += 1;
    }
    let report = MatFunReport {
        iterations,
        residual,
        converged: residual <= cfg.tol,
    };
    Ok((s, report))
}

pub fn sign_operator(h: &OperatorMatrix) -> Result<(OperatorMatrix, MatFunReport)> {
    sign_operator_with(h, &MatFunConfig::default())
}

/// Matrix sign function via eigendecomposition, refined by Newton-Schulz sweeps.
pub fn sign_operator_with(
    h: &OperatorMatrix,
    cfg: &MatFunConfig,
) -> Result<(OperatorMatrix, MatFunReport)> {
    sign_from_eigen(&HermitianEigen::with_config(h, cfg)?, cfg)
}

/// Sign function from an existing eigendecomposition.
pub fn sign_from_eigen(
    eig: &HermitianEigen,
    cfg: &MatFunConfig,
) -> Result<(OperatorMatrix, MatFunReport)> {
    let gap_tol = cfg.gap_rel * eig.op_norm();
    let smallest = eig.min_abs();
    if smallest <= gap_tol {
        return Err(Error::GapViolation { smallest, gap_tol });
    }
    let mut x = eig.apply(f64::signum);
    let dim_scale = (x.dim() as f64).sqrt();
    let defect = |x: &OperatorMatrix| (x * x).add_identity(-1.0).frobenius_norm() / dim_scale;
    let mut residual = defect(&x);
    let mut iterations = 0;
    while residual > 0.01 * cfg.tol && iterations < cfg.max_polish {
        let sq = &x * &x;
        let next = (&x * &sq.scale(-1.0).add_identity(3.0)).scale(0.5).hermitian_part();
        let r = defect(&next);
        if r >= residual {
            break;
        }
        x = next;
        residual = r;
        iterations += 1;
    }
    let report = MatFunReport {
        iterations,
        residual,
        converged: residual <= cfg.tol,
    };
    Ok((x, report))
}
