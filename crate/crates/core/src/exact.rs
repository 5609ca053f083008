//! The exact Eriksen transformation and its invariant checks.

use crate::error::{Error, Result};
use crate::matfun::{
    commutator, herm_inv_sqrt_with, involution_residual, parity_split, sign_from_eigen,
    HermitianEigen, MatFunConfig, MatFunReport,
};
use crate::matrix::{check_dims, OperatorMatrix};

/// Residuals of the identities an exact transform must satisfy.
///
/// Unitarity, the Eriksen condition, `λ² = I` and the sandwich identity are
/// absolute Frobenius norms; `evenness_res` is relative to `‖H_FW‖_F`;
/// `spectrum_res` is the largest eigenvalue shift. `h_norm` is `‖H‖_op`, the scale
/// for the thresholds quoted relative to `‖H‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EriksenDiagnostics {
    pub unitarity_res: f64,
    pub pseudo_herm_res: f64,
    pub evenness_res: f64,
    pub lambda_sq_res: f64,
    pub spectrum_res: f64,
    pub sandwich_res: f64,
    /// `‖[β, βλ + λβ]‖_F`.
    pub gram_parity_res: f64,
    pub h_norm: f64,
}

/// Acceptance thresholds for [`EriksenDiagnostics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EriksenThresholds {
    pub unitarity: f64,
    pub pseudo_herm: f64,
    pub evenness: f64,
    pub lambda_sq: f64,
    /// Multiplied by `‖H‖_op`.
    pub spectrum_rel: f64,
    /// Multiplied by `‖H‖_op`.
    pub sandwich_rel: f64,
    /// Multiplied by `‖H‖_op`.
    pub gram_parity_rel: f64,
}

impl Default for EriksenThresholds {
    fn default() -> Self {
        Self {
            unitarity: 1e-12,
            pseudo_herm: 1e-12,
            evenness: 1e-10,
            lambda_sq: 1e-12,
            spectrum_rel: 1e-10,
            sandwich_rel: 1e-11,
            gram_parity_rel: 1e-12,
        }
    }
}

impl EriksenDiagnostics {
    /// `(name, value, threshold)` triples in a fixed order.
    pub fn checks(&self, t: &EriksenThresholds) -> Vec<(&'static str, f64, f64)> {
        vec![
            ("unitarity_res", self.unitarity_res, t.unitarity),
            ("pseudo_herm_res", self.pseudo_herm_res, t.pseudo_herm),
            ("evenness_res", self.evenness_res, t.evenness),
            ("lambda_sq_res", self.lambda_sq_res, t.lambda_sq),
            ("spectrum_res", self.spectrum_res, t.spectrum_rel * self.h_norm),
            ("sandwich_res", self.sandwich_res, t.sandwich_rel * self.h_norm),
            ("gram_parity_res", self.gram_parity_res, t.gram_parity_rel * self.h_norm),
        ]
    }

    pub fn passes(&self, t: &EriksenThresholds) -> bool {
        self.checks(t).iter().all(|(_, v, limit)| v <= limit)
    }
}

#[derive(Debug, Clone)]
pub struct EriksenResult {
    pub u: OperatorMatrix,
    pub h_fw: OperatorMatrix,
    pub lambda: OperatorMatrix,
    pub diagnostics: EriksenDiagnostics,
    pub sign_report: MatFunReport,
    pub gram_report: MatFunReport,
}

pub fn eriksen_transform(h: &OperatorMatrix, beta: &OperatorMatrix) -> Result<EriksenResult> {
    eriksen_transform_with(h, beta, &MatFunConfig::default())
}

/// `U = (1 + βλ)(2 + βλ + λβ)^{-1/2}` with `λ = sign(H)`, and `H_FW = U H U†`.
pub fn eriksen_transform_with(
    h: &OperatorMatrix,
    beta: &OperatorMatrix,
    cfg: &MatFunConfig,
) -> Result<EriksenResult> {
    check_dims(h, beta)?;
    let inv = involution_residual(beta);
    if inv > 1e-12 {
        return Err(Error::NotInvolution { residual: inv });
    }
    let eig = HermitianEigen::with_config(h, cfg)?;
    let (lambda, sign_report) = sign_from_eigen(&eig, cfg)?;
    let bl = beta * &lambda;
    let lb = &lambda * beta;
    let gram = (&bl + &lb).add_identity(2.0).hermitian_part();
    let (gram_inv_sqrt, gram_report) = herm_inv_sqrt_with(&gram, cfg)?;
    let one_plus_bl = bl.add_identity(1.0);
    let u = &one_plus_bl * &gram_inv_sqrt;
    let u_dag = u.adjoint();
    let h_fw = &(&u * h) * &u_dag;

    let unitarity_res = (&u_dag * &u).add_identity(-1.0).frobenius_norm();
    let pseudo_herm_res = (&(beta * &u) - &(&u_dag * beta)).frobenius_norm();
    let evenness_res = evenness_residual(&h_fw, beta);
    let lambda_sq_res = (&lambda * &lambda).add_identity(-1.0).frobenius_norm();

    let fw_spectrum = HermitianEigen::with_config(&h_fw, cfg)?;
    let spectrum_res = eig
        .values()
        .iter()
        .zip(fw_spectrum.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let (even, _) = parity_split(h, beta)?;
    let abs_h = eig.apply(f64::abs);
    let lhs = &(&one_plus_bl * h) * &lb.add_identity(1.0);
    let mut rhs = even.scale(2.0);
    rhs += &(beta * &abs_h);
    rhs += &(&abs_h * beta);
    let sandwich_res = (&lhs - &rhs).frobenius_norm();
    let gram_parity_res = commutator(beta, &(&bl + &lb))?.frobenius_norm();

    Ok(EriksenResult {
        u,
        h_fw,
        lambda,
        diagnostics: EriksenDiagnostics {
            unitarity_res,
            pseudo_herm_res,
            evenness_res,
            lambda_sq_res,
            spectrum_res,
            sandwich_res,
            gram_parity_res,
            h_norm: eig.op_norm(),
        },
        sign_report,
        gram_report,
    })
}

/// `‖(X − βXβ)/2‖_F / ‖X‖_F`, zero for the zero matrix.
pub fn evenness_residual(x: &OperatorMatrix, beta: &OperatorMatrix) -> f64 {
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mirrored = &(beta * x) * beta;
    (x - &mirrored).scale(0.5).frobenius_norm() / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{dft_matrix, ModelSpec};
    use crate::matrix::pauli;

    #[test]
    fn evenness_of_paulis() {
        let [s1, _, s3] = pauli();
        assert_eq!(evenness_residual(&s3, &s3), 0.0);
        assert!((evenness_residual(&s1, &s3) - 1.0).abs() < 1e-15);
        let mix = &s3 + &s1;
        assert!((evenness_residual(&mix, &s3) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn free_particle_gives_relativistic_energy() {
        let model = ModelSpec::new(1, 16, 2.0 * std::f64::consts::PI, "cos(x)")
            .unwrap()
            .mass(1.0)
            .build()
            .unwrap();
        let res = eriksen_transform(&model.hamiltonian(), &model.beta).unwrap();
        assert!(res.diagnostics.evenness_res <= 1e-13);
        // β√(m² + p²) is diagonal in the Fourier basis of each spinor block.
        let f = dft_matrix(16);
        let upper = &(&f * &res.h_fw.block(0, 0, 16)) * &f.adjoint();
        let lower = &(&f * &res.h_fw.block(16, 16, 16)) * &f.adjoint();
        let k0 = model.grid.base_wavenumber();
        for i in 0..16 {
            for j in 0..16 {
                let k = model.grid.mode(i) as f64 * k0;
                let target = if i == j { (1.0 + k * k).sqrt() } else { 0.0 };
                assert!((upper[(i, j)].re - target).abs() < 1e-12 && upper[(i, j)].im.abs() < 1e-12);
                assert!((lower[(i, j)].re + target).abs() < 1e-12 && lower[(i, j)].im.abs() < 1e-12);
            }
        }
        assert!(res.diagnostics.passes(&EriksenThresholds::default()));
    }

    #[test]
    fn already_even_hamiltonian_is_untouched() {
        let beta = OperatorMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        // Energies carry the sign of β, so λ = β and 2 + βλ + λβ = 4.
        let h2 = OperatorMatrix::from_real_diagonal(&[2.0, 3.0, -1.5, -4.0]);
        let res = eriksen_transform(&h2, &beta).unwrap();
        assert!((&res.u - &OperatorMatrix::identity(4)).max_abs() < 1e-15);
        assert!((&res.h_fw - &h2).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_non_involution_and_gap() {
        let h = OperatorMatrix::from_real_diagonal(&[1.0, -1.0]);
        let bad = OperatorMatrix::from_real_diagonal(&[1.0, -2.0]);
        assert!(matches!(eriksen_transform(&h, &bad), Err(Error::NotInvolution { .. })));
        let gapless = OperatorMatrix::from_real_diagonal(&[0.0, -1.0]);
        let beta = OperatorMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(eriksen_transform(&gapless, &beta), Err(Error::GapViolation { .. })));
    }
}
