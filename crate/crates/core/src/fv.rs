//! Doubled Feshbach–Villars Hamiltonian with an arbitrary scale `N`, its FW
//! transformation, and the electrostatic second-order equation on Dirac eigenpairs.
//!
//! Doubled operators are `ρ ⊗ X` with the `ρ` index slowest; `X` acts on the
//! Dirac space of the underlying model.

use crate::approx::{alias_free_cutoff, electrostatic_blocks, FreeCalculus};
use crate::error::{Error, Result};
use crate::lattice::DiracModel;
use crate::matfun::{anticommutator as acomm, HermitianEigen, MatFunConfig, require_positive_definite};
use crate::matrix::{check_dims, OperatorMatrix};

/// Even interaction `𝔈` of the second-order equation:
/// `𝓔 − ⅛{1/(ε(ε+m)), [𝓞,[𝓞,𝓔]]} + (1/64){(ε²−2(ε+m)m)/(ε⁴(ε+m)²), [𝓞²,[𝓞²,𝓔]]}`.
pub fn build_frak_e(model: &DiracModel) -> Result<OperatorMatrix> {
    let calc = FreeCalculus::new(model)?;
    frak_e_from(&calc, &model.potential_energy())
}

pub fn frak_e_from(calc: &FreeCalculus, f: &OperatorMatrix) -> Result<OperatorMatrix> {
    let m = calc.mass();
    let coef = calc.of_eps(|e| (e * e - 2.0 * (e + m) * m) / (e.powi(4) * (e + m).powi(2)));
    let mut out = f.clone();
    out += &calc.spin_term(f)?;
    out += &acomm(&coef, &calc.c2(f)?)?.scale(1.0 / 64.0);
    Ok(out)
}

/// `𝔈` of a 3D model assembled from the spin-orbit, divergence and `(p·∇)(p·E)` blocks.
pub fn frak_e_electrostatic(model: &DiracModel) -> Result<OperatorMatrix> {
    let blocks = electrostatic_blocks(model)?;
    let calc = FreeCalculus::new(model)?;
    let m = model.mass;
    let g = model.coupling();
    let spin = calc.of_eps(|e| 1.0 / (e * (e + m)));
    let second = calc.of_eps(|e| (e * e - 2.0 * (e + m) * m) / (e.powi(4) * (e + m).powi(2)));
    let mut out = model.potential_energy();
    out += &acomm(&spin, &(&blocks.spin_orbit - &blocks.divergence))?.scale(g / 8.0);
    out += &acomm(&second, &blocks.momentum_gradient)?.scale(g / 16.0);
    Ok(out)
}

/// Relative difference of [`build_frak_e`] and [`frak_e_electrostatic`] inside the
/// alias-free momentum window.
pub fn frak_e_cross_check(model: &DiracModel) -> Result<f64> {
    let direct = build_frak_e(model)?;
    let assembled = frak_e_electrostatic(model)?;
    let p = model.window(alias_free_cutoff(model));
    let windowed = |x: &OperatorMatrix| &(&p * x) * &p;
    Ok(relative_frobenius(&windowed(&(&direct - &assembled)), &windowed(&direct)))
}

fn rho_blocks(tl: &OperatorMatrix, tr: &OperatorMatrix, bl: &OperatorMatrix, br: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::from_blocks(tl, tr, bl, br)
}

fn relative_frobenius(diff: &OperatorMatrix, reference: &OperatorMatrix) -> f64 {
    let den = reference.frobenius_norm();
    if den == 0.0 {
        diff.frobenius_norm()
    } else {
        diff.frobenius_norm() / den
    }
}

/// The doubled Hamiltonian
/// `ρ₃(𝔒²+m²+N²)/(2N) + 𝔈 + iρ₂(𝔒²+m²−N²)/(2N)`.
#[derive(Debug, Clone)]
pub struct FvModel {
    pub scale: f64,
    pub frak_e: OperatorMatrix,
    pub kinetic_sq: OperatorMatrix,
    pub mass: f64,
    pub hamiltonian: OperatorMatrix,
}

impl FvModel {
    pub fn base_dim(&self) -> usize {
        self.frak_e.dim()
    }

    /// `‖ρ₃Hρ₃ − H†‖_F`.
    pub fn pseudo_hermiticity_residual(&self) -> f64 {
        let rho3 = rho3(self.base_dim());
        let mirrored = &(&rho3 * &self.hamiltonian) * &rho3;
        (&mirrored - &self.hamiltonian.adjoint()).frobenius_norm()
    }

    /// Residual of reassembling `H` from its three `ρ` components.
    pub fn assembly_residual(&self) -> f64 {
        let d = self.kinetic_sq.add_identity(self.mass * self.mass);
        let plus = d.add_identity(self.scale * self.scale).scale(0.5 / self.scale);
        let minus = d.add_identity(-self.scale * self.scale).scale(0.5 / self.scale);
        let [_, s2, s3] = crate::matrix::pauli();
        let i_rho2 = s2.scale_complex(crate::matrix::I);
        let mut direct = s3.kron(&plus);
        direct += &OperatorMatrix::identity(2).kron(&self.frak_e);
        direct += &i_rho2.kron(&minus);
        (&direct - &self.hamiltonian).frobenius_norm()
    }
}

fn rho3(base: usize) -> OperatorMatrix {
    let id = OperatorMatrix::identity(base);
    let zero = OperatorMatrix::zeros(base);
    rho_blocks(&id, &zero, &zero, &id.scale(-1.0))
}

pub fn build_fv(frak_e: &OperatorMatrix, kinetic_sq: &OperatorMatrix, mass: f64, scale: f64) -> Result<FvModel> {
    check_dims(frak_e, kinetic_sq)?;
    if !(scale.is_finite() && scale != 0.0) {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: format!("must be a nonzero real, got {scale}"),
        });
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: format!("must be positive, got {mass}"),
        });
    }
    let residual = kinetic_sq.hermiticity_residual();
    if residual > 1e-10 {
        return Err(Error::NotHermitian { residual });
    }
    let eig = HermitianEigen::new(kinetic_sq)?;
    let smallest = eig.values().first().copied().unwrap_or(0.0);
    if smallest < -1e-10 * eig.op_norm().max(1.0) {
        return Err(Error::NotPositiveDefinite {
            smallest,
            gap_tol: 1e-10 * eig.op_norm().max(1.0),
        });
    }
    let d = kinetic_sq.add_identity(mass * mass);
    let plus = d.add_identity(scale * scale).scale(0.5 / scale);
    let minus = d.add_identity(-scale * scale).scale(0.5 / scale);
    let hamiltonian = rho_blocks(
        &(&plus + frak_e),
        &minus,
        &minus.scale(-1.0),
        &(frak_e - &plus),
    );
    Ok(FvModel {
        scale,
        frak_e: frak_e.clone(),
        kinetic_sq: kinetic_sq.clone(),
        mass,
        hamiltonian,
    })
}

/// The doubled Hamiltonian of a Dirac model with its `𝔈` and `𝔒² = 𝓞²`.
pub fn fv_from_model(model: &DiracModel, scale: f64) -> Result<FvModel> {
    let calc = FreeCalculus::new(model)?;
    let frak_e = frak_e_from(&calc, &model.potential_energy())?;
    build_fv(&frak_e, calc.kinetic_sq(), model.mass, scale)
}

/// `W = ½[(1+r)I + (1−r)ρ₁]`, mapping the doubled state at scale `N₁` to scale `N₂`
/// for `r = N₁/N₂`.
#[derive(Debug, Clone)]
pub struct SimilarityMap {
    pub ratio: f64,
    pub w: OperatorMatrix,
}

impl SimilarityMap {
    pub fn new(ratio: f64, base_dim: usize) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::InvalidParameter {
                name: "ratio",
                reason: format!("must be positive, got {ratio}"),
            });
        }
        let id = OperatorMatrix::identity(base_dim);
        let diag = id.scale(0.5 * (1.0 + ratio));
        let off = id.scale(0.5 * (1.0 - ratio));
        Ok(Self {
            ratio,
            w: rho_blocks(&diag, &off, &off, &diag),
        })
    }

    pub fn inverse(&self) -> Self {
        let base = self.w.dim() / 2;
        Self::new(1.0 / self.ratio, base).expect("ratio stays positive")
    }

    pub fn conjugate(&self, h: &OperatorMatrix) -> OperatorMatrix {
        &(&self.w * h) * &self.inverse().w
    }
}

fn positive_scale(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive, got {value}"),
        })
    }
}

/// `‖W H(N₁) W⁻¹ − H(N₂)‖_F / ‖H(N₂)‖_F`.
pub fn fv_similarity_check(model: &DiracModel, n1: f64, n2: f64) -> Result<f64> {
    positive_scale("N1", n1)?;
    positive_scale("N2", n2)?;
    let calc = FreeCalculus::new(model)?;
    let frak_e = frak_e_from(&calc, &model.potential_energy())?;
    let a = build_fv(&frak_e, calc.kinetic_sq(), model.mass, n1)?;
    let b = build_fv(&frak_e, calc.kinetic_sq(), model.mass, n2)?;
    similarity_residual(&a, &b)
}

pub fn similarity_residual(a: &FvModel, b: &FvModel) -> Result<f64> {
    check_dims(&a.hamiltonian, &b.hamiltonian)?;
    positive_scale("N1", a.scale)?;
    positive_scale("N2", b.scale)?;
    let map = SimilarityMap::new(a.scale / b.scale, a.base_dim())?;
    Ok(relative_frobenius(&(&map.conjugate(&a.hamiltonian) - &b.hamiltonian), &b.hamiltonian))
}

/// Outcome of transforming the doubled Hamiltonian with
/// `U = (ε′+N+ρ₁(ε′−N))/(2√(ε′N))`, `ε′ = √(m²+𝔒²)`.
#[derive(Debug, Clone)]
pub struct FvTransform {
    pub transformed: OperatorMatrix,
    /// `ρ`-scalar part of the even block, with `ρ₃ε′` removed.
    pub even_measured: OperatorMatrix,
    /// `𝔈 + (1/64){1/ε′⁴, [𝔒²,[𝔒²,𝔈]]}`.
    pub even_formula: OperatorMatrix,
    /// `ρ₃`-odd part of the transformed Hamiltonian.
    pub odd_measured: OperatorMatrix,
    /// `‖even_measured − even_formula‖_F`.
    pub formula_residual: f64,
    /// `‖odd_measured‖_F`.
    pub odd_norm: f64,
    /// Even-block content along `ρ₃` beyond `ρ₃ε′`.
    pub rho3_leak: f64,
}

pub fn fv_fw_transform(fv: &FvModel) -> Result<FvTransform> {
    positive_scale("N", fv.scale)?;
    let cfg = MatFunConfig::default();
    let n = fv.base_dim();
    let eig = HermitianEigen::with_config(&fv.kinetic_sq.add_identity(fv.mass * fv.mass), &cfg)?;
    require_positive_definite(&eig, &cfg)?;
    let scale = fv.scale;
    let a = eig.apply(|w| (w.sqrt() + scale) / (2.0 * (w.sqrt() * scale).sqrt()));
    let b = eig.apply(|w| (w.sqrt() - scale) / (2.0 * (w.sqrt() * scale).sqrt()));
    let u = rho_blocks(&a, &b, &b, &a);
    let u_inv = rho_blocks(&a, &b.scale(-1.0), &b.scale(-1.0), &a);
    let transformed = &(&u * &fv.hamiltonian) * &u_inv;

    let eps = eig.apply(f64::sqrt);
    let tl = transformed.block(0, 0, n);
    let br = transformed.block(n, n, n);
    let tr = transformed.block(0, n, n);
    let bl = transformed.block(n, 0, n);
    let even_measured = (&tl + &br).scale(0.5);
    let rho3_leak = (&(&tl - &br).scale(0.5) - &eps).frobenius_norm();
    let zero = OperatorMatrix::zeros(n);
    let odd_measured = rho_blocks(&zero, &tr, &bl, &zero);

    let inv4 = eig.apply(|w| 1.0 / (w * w));
    let o2 = &fv.kinetic_sq;
    let c2 = crate::matfun::commutator(o2, &crate::matfun::commutator(o2, &fv.frak_e)?)?;
    let mut even_formula = fv.frak_e.clone();
    even_formula += &acomm(&inv4, &c2)?.scale(1.0 / 64.0);

    Ok(FvTransform {
        formula_residual: (&even_measured - &even_formula).frobenius_norm(),
        odd_norm: odd_measured.frobenius_norm(),
        rho3_leak,
        transformed,
        even_measured,
        even_formula,
        odd_measured,
    })
}

/// One amplitude of an FV scaling scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvScanPoint {
    pub amplitude: f64,
    /// `‖𝓔′(N₁) − 𝓔′(N₂)‖_F`.
    pub scale_dependence: f64,
    pub formula_residual: f64,
    pub odd_norm: f64,
}

pub fn fv_amplitude_scan(model: &DiracModel, amplitudes: &[f64], n1: f64, n2: f64) -> Result<Vec<FvScanPoint>> {
    positive_scale("N1", n1)?;
    positive_scale("N2", n2)?;
    amplitudes
        .iter()
        .map(|&amplitude| {
            let m = model.with_amplitude(amplitude);
            let t1 = fv_fw_transform(&fv_from_model(&m, n1)?)?;
            let t2 = fv_fw_transform(&fv_from_model(&m, n2)?)?;
            Ok(FvScanPoint {
                amplitude,
                scale_dependence: (&t1.even_measured - &t2.even_measured).frobenius_norm(),
                formula_residual: t1.formula_residual,
                odd_norm: t1.odd_norm,
            })
        })
        .collect()
}

/// Successive ratios `r(a_i) / r(a_{i+1})`.
pub fn halving_ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[0] / w[1]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondOrderKind {
    /// `𝔈 = 𝓔`.
    Bare,
    /// `𝔈` from [`build_frak_e`].
    Corrected,
}

impl SecondOrderKind {
    pub fn name(&self) -> &'static str {
        match self {
            SecondOrderKind::Bare => "BARE",
            SecondOrderKind::Corrected => "CORRECTED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Positive,
    /// The requested count from each sign, nearest zero first.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenpairResidual {
    /// Position in the ascending Dirac spectrum.
    pub index: usize,
    pub energy: f64,
    /// `min |spec((E − 𝔈)² − 𝓞² − m²)| / E²`.
    pub residual: f64,
    /// A neighbouring level lies within `1e-8·|E|`.
    pub degenerate: bool,
}

pub const DEFAULT_EIGENPAIRS: usize = 8;

/// Residuals of the second-order equation at the lowest positive Dirac levels.
pub fn second_order_residual(model: &DiracModel, which: SecondOrderKind) -> Result<Vec<EigenpairResidual>> {
    second_order_residual_with(model, which, DEFAULT_EIGENPAIRS, Branch::Positive)
}

/// The residual at level `E` is the smallest singular value of
/// `(E − 𝔈)² − 𝓞² − m²` relative to `E²`: zero iff some state solves the
/// second-order equation at that energy.
pub fn second_order_residual_with(
    model: &DiracModel,
    which: SecondOrderKind,
    count: usize,
    branch: Branch,
) -> Result<Vec<EigenpairResidual>> {
    let calc = FreeCalculus::new(model)?;
    let f = model.potential_energy();
    let frak_e = match which {
        SecondOrderKind::Bare => f,
        SecondOrderKind::Corrected => frak_e_from(&calc, &f)?,
    };
    let free = calc.kinetic_sq().add_identity(model.mass * model.mass);
    let dirac = HermitianEigen::new(&model.hamiltonian())?;
    let values = dirac.values();
    let first_positive = values.partition_point(|v| *v <= 0.0);
    let mut picks: Vec<usize> = (first_positive..values.len()).take(count).collect();
    if branch == Branch::Both {
        picks.extend((0..first_positive).rev().take(count));
        picks.sort_unstable();
    }
    picks
        .into_iter()
        .map(|index| {
            let energy = values[index];
            let shifted = frak_e.scale(-1.0).add_identity(energy);
            let op = (&(&shifted * &shifted) - &free).hermitian_part();
            let defect = HermitianEigen::new(&op)?.min_abs();
            let tol = 1e-8 * energy.abs();
            let degenerate = (index > 0 && (values[index] - values[index - 1]).abs() <= tol)
                || (index + 1 < values.len() && (values[index + 1] - values[index]).abs() <= tol);
            Ok(EigenpairResidual {
                index,
                energy,
                residual: defect / (energy * energy),
                degenerate,
            })
        })
        .collect()
}

/// Euclidean norm of the per-eigenpair residuals.
pub fn aggregate_residual(residuals: &[EigenpairResidual]) -> f64 {
    residuals.iter().map(|r| r.residual * r.residual).sum::<f64>().sqrt()
}
