//! Approximate FW Hamiltonians, the weak-field operator chain, and residual scans
//! against the exact transform.
//!
//! Every scalar function of `ε = √(m² + 𝓞²)` is a Hermitian matrix function of the
//! field-free operator `m² + 𝓞²`, combined with the field through the brackets
//! exactly as written in each formula.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::eriksen_transform;
use crate::lattice::{dft_matrix, DiracModel, ModelSpec};
use crate::matfun::{
    anticommutator as acomm, commutator as comm, herm_inv_sqrt_with, require_positive_definite,
    sign_from_eigen, HermitianEigen, MatFunConfig,
};
use crate::matrix::OperatorMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ApproxKind {
    /// Known relativistic Hamiltonian with the spin-orbit/Darwin channel only.
    MhamD,
    /// `MhamD` plus the second-order `[𝓞²,[𝓞²,𝓔]]` channel.
    Corrected,
    /// Eighth-order series of `MhamD`.
    SeriesPlain,
    /// Eighth-order series with all linear and quadratic field terms.
    SeriesFull,
}

impl ApproxKind {
    pub const ALL: [ApproxKind; 4] = [
        ApproxKind::MhamD,
        ApproxKind::Corrected,
        ApproxKind::SeriesPlain,
        ApproxKind::SeriesFull,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ApproxKind::MhamD => "MHAM_D",
            ApproxKind::Corrected => "CORRECTED",
            ApproxKind::SeriesPlain => "SERIES_PLAIN",
            ApproxKind::SeriesFull => "SERIES_FULL",
        }
    }
}

impl fmt::Display for ApproxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ApproxKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ApproxKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter {
                name: "kind",
                reason: format!("unknown Hamiltonian kind '{s}'"),
            })
    }
}

/// One summand of the quadratic-in-field block of the series Hamiltonian.
#[derive(Debug, Clone)]
pub struct A24Term {
    pub name: &'static str,
    pub coefficient: f64,
    /// The bracket expression without its coefficient or the `β/256m⁵` prefactor.
    pub bracket: OperatorMatrix,
}

/// Field-free operators of a model and matrix functions of `m² + 𝓞²`.
#[derive(Debug, Clone)]
pub struct FreeCalculus {
    mass: f64,
    beta: OperatorMatrix,
    kinetic: OperatorMatrix,
    kinetic_sq: OperatorMatrix,
    eig: HermitianEigen,
}

impl FreeCalculus {
    pub fn new(model: &DiracModel) -> Result<Self> {
        let cfg = MatFunConfig::default();
        let kinetic = model.kinetic();
        let kinetic_sq = (&kinetic * &kinetic).hermitian_part();
        let eig = HermitianEigen::with_config(&kinetic_sq.add_identity(model.mass * model.mass), &cfg)?;
        require_positive_definite(&eig, &cfg)?;
        Ok(Self {
            mass: model.mass,
            beta: model.beta.clone(),
            kinetic,
            kinetic_sq,
            eig,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn beta(&self) -> &OperatorMatrix {
        &self.beta
    }

    pub fn kinetic(&self) -> &OperatorMatrix {
        &self.kinetic
    }

    pub fn kinetic_sq(&self) -> &OperatorMatrix {
        &self.kinetic_sq
    }

    /// `f(ε)` as a matrix.
    pub fn of_eps(&self, f: impl Fn(f64) -> f64) -> OperatorMatrix {
        self.eig.apply(|w| f(w.sqrt()))
    }

    pub fn eps(&self) -> OperatorMatrix {
        self.of_eps(|e| e)
    }

    /// `βm + 𝓞`.
    pub fn free_dirac(&self) -> OperatorMatrix {
        &self.beta.scale(self.mass) + &self.kinetic
    }

    /// `βε`, the exact FW Hamiltonian without field.
    pub fn free_fw(&self) -> OperatorMatrix {
        &self.beta * &self.eps()
    }

    /// `[𝓞,[𝓞,f]]`.
    pub fn c1(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        comm(&self.kinetic, &comm(&self.kinetic, f)?)
    }

    /// `[𝓞²,[𝓞²,f]]`.
    pub fn c2(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        comm(&self.kinetic_sq, &comm(&self.kinetic_sq, f)?)
    }

    /// `[𝓞²,[𝓞²,[𝓞,[𝓞,f]]]]`.
    pub fn c3(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.c2(&self.c1(f)?)
    }

    /// Spin-orbit and Darwin channel `−⅛{1/(ε(ε+m)), [𝓞,[𝓞,f]]}`.
    pub fn spin_term(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let m = self.mass;
        let coef = self.of_eps(|e| 1.0 / (e * (e + m)));
        Ok(acomm(&coef, &self.c1(f)?)?.scale(-0.125))
    }

    /// Second-order channel `(1/64){(2ε²−m²)/(ε⁴(ε+m)²), [𝓞²,[𝓞²,f]]}`.
    pub fn darwin2_term(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let m = self.mass;
        let coef = self.of_eps(|e| (2.0 * e * e - m * m) / (e.powi(4) * (e + m).powi(2)));
        Ok(acomm(&coef, &self.c2(f)?)?.scale(1.0 / 64.0))
    }

    pub fn mham_d(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let mut h = self.free_fw();
        h += f;
        h += &self.spin_term(f)?;
        Ok(h)
    }

    pub fn corrected(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let mut h = self.mham_d(f)?;
        h += &self.darwin2_term(f)?;
        Ok(h)
    }

    /// `β(m + 𝓞²/2m − 𝓞⁴/8m³ + 𝓞⁶/16m⁵ − 5𝓞⁸/128m⁷)`.
    pub fn mass_series(&self) -> OperatorMatrix {
        let m = self.mass;
        let o2 = &self.kinetic_sq;
        let o4 = o2 * o2;
        let o6 = &o4 * o2;
        let o8 = &o4 * &o4;
        let mut s = o2.scale(0.5 / m).add_identity(m);
        s.axpy(-1.0 / (8.0 * m.powi(3)), &o4);
        s.axpy(1.0 / (16.0 * m.powi(5)), &o6);
        s.axpy(-5.0 / (128.0 * m.powi(7)), &o8);
        &self.beta * &s
    }

    /// `−(1/128m⁶){8m⁴ − 6m²𝓞² + 5𝓞⁴, [𝓞,[𝓞,f]]}`.
    pub fn series_spin_term(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let m = self.mass;
        let o2 = &self.kinetic_sq;
        let mut poly = o2.scale(-6.0 * m * m).add_identity(8.0 * m.powi(4));
        poly.axpy(5.0, &(o2 * o2));
        Ok(acomm(&poly, &self.c1(f)?)?.scale(-1.0 / (128.0 * m.powi(6))))
    }

    /// `(1/512m⁶){2m² − 𝓞², [𝓞²,[𝓞²,f]]}`.
    pub fn series_darwin2_term(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let m = self.mass;
        let poly = self.kinetic_sq.scale(-1.0).add_identity(2.0 * m * m);
        Ok(acomm(&poly, &self.c2(f)?)?.scale(1.0 / (512.0 * m.powi(6))))
    }

    /// `(11/1024m⁶)[𝓞²,[𝓞²,[𝓞,[𝓞,f]]]]`.
    pub fn series_c3_term(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        Ok(self.c3(f)?.scale(11.0 / (1024.0 * self.mass.powi(6))))
    }

    /// `β{𝓞,[[𝓞,f],f]}/16m³`.
    pub fn series_quadratic_term(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let o = &self.kinetic;
        let inner = comm(&comm(o, f)?, f)?;
        Ok((&self.beta * &acomm(o, &inner)?).scale(1.0 / (16.0 * self.mass.powi(3))))
    }

    /// `−[𝓞,[[[𝓞,f],f],f]]/32m⁴`.
    pub fn series_cubic_term(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let o = &self.kinetic;
        let inner = comm(&comm(&comm(o, f)?, f)?, f)?;
        Ok(comm(o, &inner)?.scale(-1.0 / (32.0 * self.mass.powi(4))))
    }

    /// The seven summands of the quadratic block, in display order.
    pub fn a24_terms(&self, f: &OperatorMatrix) -> Result<Vec<A24Term>> {
        let o = &self.kinetic;
        let o2 = &self.kinetic_sq;
        let of = comm(o, f)?;
        let o2f = comm(o2, f)?;
        let o2ff = comm(&o2f, f)?;
        let off = comm(&of, f)?;
        let term = |name, coefficient, bracket| A24Term {
            name,
            coefficient,
            bracket,
        };
        Ok(vec![
            term("o2_anti_of_sq", 24.0, acomm(o2, &(&of * &of))?),
            term("o2f_sq", -20.0, &o2f * &o2f),
            term("o2_anti_o2ff", -14.0, acomm(o2, &o2ff)?),
            term("o_o_o2ff", -4.0, comm(o, &comm(o, &o2ff)?)?),
            term("o_o_o2f_f", 4.5, comm(&comm(o, &comm(o, &o2f)?)?, f)?),
            term("oof_o2f", -4.5, comm(&comm(o, &of)?, &o2f)?),
            term("o2_o_off", 2.5, comm(o2, &comm(o, &off)?)?),
        ])
    }

    /// `(β/256m⁵) Σ coefficient · bracket`.
    pub fn a24(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let mut sum = OperatorMatrix::zeros(f.dim());
        for t in self.a24_terms(f)? {
            sum.axpy(t.coefficient, &t.bracket);
        }
        Ok((&self.beta * &sum).scale(1.0 / (256.0 * self.mass.powi(5))))
    }

    /// The eighth-order series, optionally with the quadratic block.
    pub fn series(&self, f: &OperatorMatrix, include_a24: bool) -> Result<OperatorMatrix> {
        let mut h = self.mass_series();
        h += &self.linear_part(ApproxKind::SeriesFull, f)?;
        h += &self.series_quadratic_term(f)?;
        h += &self.series_cubic_term(f)?;
        if include_a24 {
            h += &self.a24(f)?;
        }
        Ok(h)
    }

    pub fn series_plain(&self, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let mut h = self.mass_series();
        h += &self.linear_part(ApproxKind::SeriesPlain, f)?;
        Ok(h)
    }

    pub fn hamiltonian(&self, kind: ApproxKind, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        match kind {
            ApproxKind::MhamD => self.mham_d(f),
            ApproxKind::Corrected => self.corrected(f),
            ApproxKind::SeriesPlain => self.series_plain(f),
            ApproxKind::SeriesFull => self.series(f, true),
        }
    }

    /// Terms linear in the field.
    pub fn linear_part(&self, kind: ApproxKind, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let mut out = f.clone();
        match kind {
            ApproxKind::MhamD => out += &self.spin_term(f)?,
            ApproxKind::Corrected => {
                out += &self.spin_term(f)?;
                out += &self.darwin2_term(f)?;
            }
            ApproxKind::SeriesPlain => out += &self.series_spin_term(f)?,
            ApproxKind::SeriesFull => {
                out += &self.series_spin_term(f)?;
                out += &self.series_darwin2_term(f)?;
                out += &self.series_c3_term(f)?;
            }
        }
        Ok(out)
    }

    pub fn chain(
        &self,
        stage: ChainStage,
        variant: ChainVariant,
        f: &OperatorMatrix,
    ) -> Result<OperatorMatrix> {
        let m = self.mass;
        let lam0 = self.free_dirac();
        let truncated = variant == ChainVariant::Hbar2Truncated;
        let eps = self.eps();
        let inv_eps = self.of_eps(|e| 1.0 / e);
        let eps_eps_f = || -> Result<OperatorMatrix> { comm(&eps, &comm(&eps, f)?) };
        Ok(match stage {
            ChainStage::SqrtH2 => {
                let mut out = eps.clone();
                out += &acomm(&inv_eps, &acomm(&lam0, f)?)?.scale(0.25);
                if truncated {
                    let c = &lam0 * &self.of_eps(|e| e.powi(-5));
                    out += &acomm(&c, &self.c2(f)?)?.scale(-1.0 / 32.0);
                } else {
                    let c = &lam0 * &self.of_eps(|e| e.powi(-3));
                    out += &acomm(&c, &eps_eps_f()?)?.scale(-0.125);
                }
                out
            }
            ChainStage::InvSqrtH2 => {
                let first = acomm(&inv_eps, &acomm(&lam0, f)?)?.scale(0.25);
                let mut out = inv_eps.clone();
                out -= &(&(&inv_eps * &first) * &inv_eps);
                if truncated {
                    let c = &lam0 * &self.of_eps(|e| e.powi(-7));
                    out += &acomm(&c, &self.c2(f)?)?.scale(1.0 / 32.0);
                } else {
                    let c = &lam0 * &self.of_eps(|e| e.powi(-5));
                    out += &acomm(&c, &eps_eps_f()?)?.scale(0.125);
                }
                out
            }
            ChainStage::Lambda => {
                let mut out = &lam0 * &inv_eps;
                if truncated {
                    let c5 = self.of_eps(|e| e.powi(-5));
                    let c3 = self.of_eps(|e| e.powi(-3));
                    out += &acomm(&c5, &self.c2(f)?)?.scale(-1.0 / 32.0);
                    out += &acomm(&c3, &self.c1(f)?)?.scale(0.125);
                    let odd = acomm(&c3, &comm(&self.kinetic, f)?)?;
                    out += &(&self.beta * &odd).scale(0.25 * m);
                } else {
                    let c3 = self.of_eps(|e| e.powi(-3));
                    out += &acomm(&c3, &eps_eps_f()?)?.scale(-0.125);
                    out += &acomm(&c3, &comm(&lam0, &comm(&lam0, f)?)?)?.scale(0.125);
                }
                out
            }
            ChainStage::Gram => {
                if truncated {
                    let mut out = self.of_eps(|e| 2.0 * (e + m) / e);
                    let c5 = self.of_eps(|e| e.powi(-5));
                    let c3 = self.of_eps(|e| e.powi(-3));
                    out += &(&self.beta * &acomm(&c5, &self.c2(f)?)?).scale(-1.0 / 16.0);
                    out += &(&self.beta * &acomm(&c3, &self.c1(f)?)?).scale(0.25);
                    out
                } else {
                    let lam = self.chain(ChainStage::Lambda, variant, f)?;
                    (&(&self.beta * &lam) + &(&lam * &self.beta)).add_identity(2.0)
                }
            }
            ChainStage::InvSqrtGram => {
                let s = self.of_eps(|e| (e / (2.0 * (e + m))).sqrt());
                let a = self.of_eps(|e| 1.0 / (e.powi(4) * (e + m)));
                let b = self.of_eps(|e| 4.0 / (e * e * (e + m)));
                let inner = &acomm(&a, &self.c2(f)?)? - &acomm(&b, &self.c1(f)?)?;
                let mut out = s.clone();
                out += &(&self.beta * &acomm(&s, &inner)?).scale(1.0 / 128.0);
                out
            }
            ChainStage::Ham => self.corrected(f)?,
        })
    }

    /// `G[2(βm + f) + β√H² + √H²β]G` with the chain's `√H²` and `G = 1/√(2+βλ+λβ)`.
    pub fn chain_sandwich(&self, variant: ChainVariant, f: &OperatorMatrix) -> Result<OperatorMatrix> {
        let root = self.chain(ChainStage::SqrtH2, variant, f)?;
        let g = self.chain(ChainStage::InvSqrtGram, variant, f)?;
        let mut core = self.beta.scale(2.0 * self.mass);
        core.axpy(2.0, f);
        core += &acomm(&self.beta, &root)?;
        Ok(&(&g * &core) * &g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainStage {
    SqrtH2,
    InvSqrtH2,
    Lambda,
    Gram,
    InvSqrtGram,
    Ham,
}

impl ChainStage {
    pub const ALL: [ChainStage; 6] = [
        ChainStage::SqrtH2,
        ChainStage::InvSqrtH2,
        ChainStage::Lambda,
        ChainStage::Gram,
        ChainStage::InvSqrtGram,
        ChainStage::Ham,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ChainStage::SqrtH2 => "SQRT_H2",
            ChainStage::InvSqrtH2 => "INV_SQRT_H2",
            ChainStage::Lambda => "LAMBDA",
            ChainStage::Gram => "GRAM",
            ChainStage::InvSqrtGram => "INV_SQRT_GRAM",
            ChainStage::Ham => "HAM",
        }
    }
}

/// `LinearExact` keeps `[ε,[ε,𝓔]]`-type brackets; `Hbar2Truncated` replaces them by
/// their `[𝓞²,[𝓞²,𝓔]]` leading forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainVariant {
    LinearExact,
    Hbar2Truncated,
}

pub fn ham_mham_d(model: &DiracModel) -> Result<OperatorMatrix> {
    FreeCalculus::new(model)?.mham_d(&model.potential_energy())
}

pub fn ham_corrected(model: &DiracModel) -> Result<OperatorMatrix> {
    FreeCalculus::new(model)?.corrected(&model.potential_energy())
}

pub fn ham_series(model: &DiracModel, include_a24: bool) -> Result<OperatorMatrix> {
    FreeCalculus::new(model)?.series(&model.potential_energy(), include_a24)
}

pub fn ham_series_plain(model: &DiracModel) -> Result<OperatorMatrix> {
    FreeCalculus::new(model)?.series_plain(&model.potential_energy())
}

pub fn ham_approx(model: &DiracModel, kind: ApproxKind) -> Result<OperatorMatrix> {
    FreeCalculus::new(model)?.hamiltonian(kind, &model.potential_energy())
}

/// Field-free behaviour of one approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeLimit {
    /// `max |H − βε|`.
    pub deviation: f64,
    /// `max |H − H₀|`, with `H₀ = βε` for the closed forms and the
    /// truncated mass series `β(m + 𝓞²/2m − …)` for the series kinds.
    pub own_limit: f64,
    /// For series kinds: `‖P(H − βε)P‖ / ‖P·7𝓞¹⁰/256m⁹·P‖` on modes with
    /// `|p| ≤ m`, where the binomial series alternates with shrinking terms.
    pub truncation_ratio: Option<f64>,
}

/// Evaluates `kind` at zero amplitude and compares it with the free result.
pub fn free_limit(model: &DiracModel, kind: ApproxKind) -> Result<FreeLimit> {
    let free = model.with_amplitude(0.0);
    let calc = FreeCalculus::new(&free)?;
    let zero = OperatorMatrix::zeros(free.dim());
    let h = calc.hamiltonian(kind, &zero)?;
    let exact = calc.free_fw();
    let deviation = (&h - &exact).max_abs();
    let series = matches!(kind, ApproxKind::SeriesPlain | ApproxKind::SeriesFull);
    if !series {
        return Ok(FreeLimit { deviation, own_limit: deviation, truncation_ratio: None });
    }
    let own_limit = (&h - &calc.mass_series()).max_abs();
    let axes = free.grid.dimension() as f64;
    let cutoff = (free.mass / (free.grid.base_wavenumber() * axes.sqrt())).floor() as usize;
    let window = free.window(cutoff);
    let m = free.mass;
    let o2 = calc.kinetic_sq();
    let o4 = o2 * o2;
    let o10 = &(&o4 * &o4) * o2;
    let next = o10.scale(7.0 / (256.0 * m.powi(9)));
    let err = windowed(&(&h - &exact), Some(&window)).frobenius_norm();
    let bound = windowed(&next, Some(&window)).frobenius_norm();
    // With only the zero mode inside the window both norms are rounding noise.
    let truncation_ratio = if bound <= 1e-12 * m {
        if err <= 1e-10 * m { 0.0 } else { f64::INFINITY }
    } else {
        err / bound
    };
    Ok(FreeLimit { deviation, own_limit, truncation_ratio: Some(truncation_ratio) })
}

pub fn weakfield_chain(
    model: &DiracModel,
    stage: ChainStage,
    variant: ChainVariant,
) -> Result<OperatorMatrix> {
    FreeCalculus::new(model)?.chain(stage, variant, &model.potential_energy())
}

/// Exact operator that a chain stage approximates, from the eigendecomposition of `H`.
pub fn chain_exact(model: &DiracModel, stage: ChainStage) -> Result<OperatorMatrix> {
    let cfg = MatFunConfig::default();
    let h = model.hamiltonian();
    let eig = HermitianEigen::with_config(&h, &cfg)?;
    let gram = |lambda: &OperatorMatrix| {
        (&(&model.beta * lambda) + &(lambda * &model.beta))
            .add_identity(2.0)
            .hermitian_part()
    };
    Ok(match stage {
        ChainStage::SqrtH2 => eig.apply(f64::abs),
        ChainStage::InvSqrtH2 => {
            sign_from_eigen(&eig, &cfg)?;
            eig.apply(|v| 1.0 / v.abs())
        }
        ChainStage::Lambda => sign_from_eigen(&eig, &cfg)?.0,
        ChainStage::Gram => gram(&sign_from_eigen(&eig, &cfg)?.0),
        ChainStage::InvSqrtGram => herm_inv_sqrt_with(&gram(&sign_from_eigen(&eig, &cfg)?.0), &cfg)?.0,
        ChainStage::Ham => eriksen_transform(&h, &model.beta)?.h_fw,
    })
}

/// `‖P(chain − exact)P‖_F` for one stage.
pub fn chain_residual(
    model: &DiracModel,
    stage: ChainStage,
    variant: ChainVariant,
    window: Option<usize>,
) -> Result<f64> {
    let approx = weakfield_chain(model, stage, variant)?;
    let exact = chain_exact(model, stage)?;
    let proj = window.map(|c| model.window(c));
    Ok(windowed(&(&approx - &exact), proj.as_ref()).frobenius_norm())
}

/// Default probe amplitude: the field perturbation is `1e-4 · ‖βm + 𝓞‖_op`.
pub fn default_step(model: &DiracModel) -> f64 {
    let free_norm = (model.mass * model.mass + max_kinetic_sq(model)).sqrt();
    let field = model.charge.abs() * model.phi_samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if field == 0.0 {
        1e-4
    } else {
        1e-4 * free_norm / field
    }
}

fn max_kinetic_sq(model: &DiracModel) -> f64 {
    let k0 = model.grid.base_wavenumber();
    let kmax = (model.grid.points() / 2) as f64 * k0;
    kmax * kmax * model.grid.dimension() as f64
}

/// `d H_FW / d(amplitude)` at zero amplitude: central differences at `h` and `h/2`
/// combined by one Richardson step.
pub fn linear_response(model: &DiracModel, h: Option<f64>) -> Result<OperatorMatrix> {
    let h = h.unwrap_or_else(|| default_step(model));
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("must be positive, got {h}"),
        });
    }
    let fw = |a: f64| -> Result<OperatorMatrix> {
        let shifted = model.with_amplitude(a);
        Ok(eriksen_transform(&shifted.hamiltonian(), &shifted.beta)?.h_fw)
    };
    let central = |step: f64| -> Result<OperatorMatrix> {
        Ok((&fw(step)? - &fw(-step)?).scale(0.5 / step))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((&fine.scale(4.0) - &coarse).scale(1.0 / 3.0))
}

/// Largest Fourier mode present in the potential along any axis.
pub fn potential_bandwidth(model: &DiracModel) -> usize {
    let grid = &model.grid;
    let n = grid.points();
    let f = dft_matrix(n);
    let total: f64 = model.phi_samples.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return 0;
    }
    let mut band = 0usize;
    let sites = grid.sites();
    for axis in 0..grid.dimension() {
        let stride = n.pow((grid.dimension() - 1 - axis) as u32);
        for start in (0..sites).filter(|s| (s / stride).is_multiple_of(n)) {
            let line: Vec<_> = (0..n)
                .map(|j| num_complex::Complex64::new(model.phi_samples[start + j * stride], 0.0))
                .collect();
            let spectrum = f.matvec(&line);
            for (k, c) in spectrum.iter().enumerate() {
                if c.norm_sqr() > 1e-20 * total {
                    band = band.max(grid.mode(k).unsigned_abs() as usize);
                }
            }
        }
    }
    band
}

/// Largest momentum cutoff `c` with `2c + bandwidth < N`.
pub fn alias_free_cutoff(model: &DiracModel) -> usize {
    let n = model.grid.points();
    let q = potential_bandwidth(model);
    (n.saturating_sub(q + 1)) / 2
}

fn windowed(x: &OperatorMatrix, window: Option<&OperatorMatrix>) -> OperatorMatrix {
    match window {
        Some(p) => &(p * x) * p,
        None => x.clone(),
    }
}

fn relative(diff: &OperatorMatrix, reference: &OperatorMatrix, window: Option<&OperatorMatrix>) -> f64 {
    let den = windowed(reference, window).frobenius_norm();
    let num = windowed(diff, window).frobenius_norm();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Residuals `(r₁, r₂)` of the electrostatic bracket identities on a 3D model,
/// measured inside the alias-free momentum window.
pub fn spin_darwin_decomposition_check(model: &DiracModel) -> Result<(f64, f64)> {
    let cutoff = alias_free_cutoff(model);
    spin_darwin_decomposition_windowed(model, Some(cutoff))
}

/// Spin-orbit operator `Σ·(p×E − E×p)` and the divergence `∇·E`, both unscaled.
pub fn electrostatic_blocks(model: &DiracModel) -> Result<ElectrostaticBlocks> {
    if model.grid.dimension() != 3 {
        return Err(Error::WrongModelDimension {
            expected: 3,
            actual: model.grid.dimension(),
        });
    }
    let p = &model.momentum;
    let e = &model.field;
    let mut spin_orbit = OperatorMatrix::zeros(model.dim());
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        // (p×E)_k − (E×p)_k with the Levi-Civita pairs (i, j) and (j, i).
        let mut cross = &(&p[i] * &e[j]) - &(&p[j] * &e[i]);
        cross -= &(&e[i] * &p[j]);
        cross += &(&e[j] * &p[i]);
        spin_orbit += &(&model.sigma[k] * &cross);
    }
    let grad: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|i| (0..3).map(|j| model.derivative(i, &model.field_samples[j])).collect())
        .collect();
    let div: Vec<f64> = (0..model.grid.sites())
        .map(|s| (0..3).map(|i| grad[i][i][s]).sum())
        .collect();
    let divergence = model.lift(&OperatorMatrix::from_real_diagonal(&div));
    let mut quad = OperatorMatrix::zeros(model.dim());
    for i in 0..3 {
        for j in 0..3 {
            let d = model.lift(&OperatorMatrix::from_real_diagonal(&grad[i][j]));
            quad += &acomm(&p[i], &acomm(&p[j], &d)?)?;
        }
    }
    Ok(ElectrostaticBlocks {
        spin_orbit,
        divergence,
        momentum_gradient: quad.scale(0.25),
    })
}

/// Unscaled operator blocks of the electrostatic FW Hamiltonian.
#[derive(Debug, Clone)]
pub struct ElectrostaticBlocks {
    /// `Σ·(p×E − E×p)`.
    pub spin_orbit: OperatorMatrix,
    /// `∇·E`.
    pub divergence: OperatorMatrix,
    /// `(p·∇)(p·E)`, ordered as `¼ Σ_ij {p_i,{p_j, ∂_i E_j}}`.
    pub momentum_gradient: OperatorMatrix,
}

pub fn spin_darwin_decomposition_windowed(
    model: &DiracModel,
    cutoff: Option<usize>,
) -> Result<(f64, f64)> {
    let blocks = electrostatic_blocks(model)?;
    let g = model.coupling();
    if g == 0.0 {
        return Ok((0.0, 0.0));
    }
    let calc = FreeCalculus::new(model)?;
    let f = model.potential_energy();
    let window = cutoff.map(|c| model.window(c));
    let c1 = calc.c1(&f)?;
    let mut d1 = c1.clone();
    d1.axpy(g, &blocks.spin_orbit);
    d1.axpy(-g, &blocks.divergence);
    let c2 = calc.c2(&f)?;
    let d2 = c2.add_scaled(-4.0 * g, &blocks.momentum_gradient);
    Ok((
        relative(&d1, &c1, window.as_ref()),
        relative(&d2, &c2, window.as_ref()),
    ))
}

/// `max|∂_j E_i| / (max|E| · p_typ)` with `p_typ` the median lattice momentum.
///
/// Independent of the field amplitude.
pub fn correction_ratio(model: &DiracModel) -> f64 {
    let grid = &model.grid;
    let sites = grid.sites();
    let dim = grid.dimension();
    let e_max = (0..sites)
        .map(|s| (0..dim).map(|i| model.field_samples[i][s].powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if e_max == 0.0 {
        return 0.0;
    }
    let mut grad_max = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let d = model.derivative(j, &model.field_samples[i]);
            grad_max = d.iter().fold(grad_max, |a, v| a.max(v.abs()));
        }
    }
    let k0 = grid.base_wavenumber();
    let mut momenta: Vec<f64> = (0..sites)
        .map(|s| {
            let idx = grid.site_indices(s);
            (0..dim)
                .map(|a| (grid.mode(idx[a]) as f64 * k0).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    momenta.sort_by(f64::total_cmp);
    let mid = momenta.len() / 2;
    let median = if momenta.len().is_multiple_of(2) {
        0.5 * (momenta[mid - 1] + momenta[mid])
    } else {
        momenta[mid]
    };
    grad_max / (e_max * median)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    Amplitude,
    Wavenumber,
    Mass,
}

impl ScanKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScanKind::Amplitude => "amplitude",
            ScanKind::Wavenumber => "wavenumber",
            ScanKind::Mass => "mass",
        }
    }

    pub fn default_metric(&self) -> ResidualMetric {
        match self {
            ScanKind::Amplitude => ResidualMetric::Full,
            ScanKind::Wavenumber | ScanKind::Mass => ResidualMetric::LinearResponse,
        }
    }
}

impl FromStr for ScanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "amplitude" => Ok(ScanKind::Amplitude),
            "wavenumber" => Ok(ScanKind::Wavenumber),
            "mass" => Ok(ScanKind::Mass),
            other => Err(Error::InvalidScan(format!("unknown scan kind '{other}'"))),
        }
    }
}

/// `Full` compares whole Hamiltonians; `LinearResponse` compares the field derivative
/// of the exact transform with each formula's linear part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualMetric {
    Full,
    LinearResponse,
}

impl ResidualMetric {
    pub fn name(&self) -> &'static str {
        match self {
            ResidualMetric::Full => "full",
            ResidualMetric::LinearResponse => "linear_response",
        }
    }
}

impl FromStr for ResidualMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(ResidualMetric::Full),
            "linear_response" => Ok(ResidualMetric::LinearResponse),
            other => Err(Error::InvalidScan(format!("unknown residual metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub kind: ScanKind,
    pub values: Vec<f64>,
    pub template: ModelSpec,
    pub kinds: Vec<ApproxKind>,
    pub metric: ResidualMetric,
    /// Momentum cutoff for windowed norms; `None` uses the whole space.
    pub window: Option<usize>,
    /// Finite-difference step for the linear-response metric.
    pub step: Option<f64>,
}

impl ScanSpec {
    pub fn new(kind: ScanKind, values: Vec<f64>, template: ModelSpec, kinds: Vec<ApproxKind>) -> Self {
        Self {
            kind,
            values,
            template,
            kinds,
            metric: kind.default_metric(),
            window: None,
            step: None,
        }
    }

    pub fn model_at(&self, value: f64) -> Result<DiracModel> {
        let spec = self.template.clone();
        let spec = match self.kind {
            ScanKind::Amplitude => spec.amplitude(value),
            ScanKind::Wavenumber => spec.wavenumber_scale(value),
            ScanKind::Mass => spec.mass(value),
        };
        spec.build()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub scan_kind: ScanKind,
    pub value: f64,
    pub residuals: Vec<(ApproxKind, f64)>,
    pub correction_ratio: f64,
}

impl ScanRecord {
    pub fn residual(&self, kind: ApproxKind) -> Option<f64> {
        self.residuals.iter().find(|(k, _)| *k == kind).map(|(_, r)| *r)
    }
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; needs at least three points.
    pub stderr: Option<f64>,
    pub points: usize,
}

pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<SlopeFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = (lx.len() >= 3).then(|| {
        let sse: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (sse / ((n - 2.0) * sxx)).sqrt()
    });
    Some(SlopeFit {
        slope,
        intercept,
        stderr,
        points: lx.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub records: Vec<ScanRecord>,
    pub slopes: Vec<(ApproxKind, Option<SlopeFit>)>,
}

impl ScanOutcome {
    pub fn slope(&self, kind: ApproxKind) -> Option<SlopeFit> {
        self.slopes.iter().find(|(k, _)| *k == kind).and_then(|(_, s)| *s)
    }

    pub fn residuals(&self, kind: ApproxKind) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.residual(kind)).collect()
    }
}

fn validate_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidScan("no scan values".into()));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidScan(format!("scan values must be positive, got {v}")));
    }
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidScan("scan values must be strictly monotone".into()));
    }
    Ok(())
}

/// Relative residual of each requested kind at one model.
pub fn residuals_at(
    model: &DiracModel,
    kinds: &[ApproxKind],
    metric: ResidualMetric,
    window: Option<usize>,
    step: Option<f64>,
) -> Result<Vec<(ApproxKind, f64)>> {
    let calc = FreeCalculus::new(model)?;
    let proj = window.map(|c| model.window(c));
    let proj = proj.as_ref();
    match metric {
        ResidualMetric::Full => {
            let exact = eriksen_transform(&model.hamiltonian(), &model.beta)?.h_fw;
            let f = model.potential_energy();
            kinds
                .iter()
                .map(|&k| {
                    let approx = calc.hamiltonian(k, &f)?;
                    Ok((k, relative(&(&exact - &approx), &exact, proj)))
                })
                .collect()
        }
        ResidualMetric::LinearResponse => {
            let d = linear_response(model, step)?;
            let f = model.with_amplitude(1.0).potential_energy();
            kinds
                .iter()
                .map(|&k| {
                    let lin = calc.linear_part(k, &f)?;
                    Ok((k, relative(&(&d - &lin), &d, proj)))
                })
                .collect()
        }
    }
}

/// Full relative residuals of the series Hamiltonian with and without the
/// quadratic block.
pub fn series_a24_ablation(model: &DiracModel, window: Option<usize>) -> Result<(f64, f64)> {
    let calc = FreeCalculus::new(model)?;
    let exact = eriksen_transform(&model.hamiltonian(), &model.beta)?.h_fw;
    let f = model.potential_energy();
    let proj = window.map(|c| model.window(c));
    let with = calc.series(&f, true)?;
    let without = calc.series(&f, false)?;
    Ok((
        relative(&(&exact - &with), &exact, proj.as_ref()),
        relative(&(&exact - &without), &exact, proj.as_ref()),
    ))
}

pub fn residual_scan(spec: &ScanSpec) -> Result<ScanOutcome> {
    validate_values(&spec.values)?;
    let mut records = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let model = spec.model_at(value)?;
        let residuals = residuals_at(&model, &spec.kinds, spec.metric, spec.window, spec.step)?;
        records.push(ScanRecord {
            scan_kind: spec.kind,
            value,
            residuals,
            correction_ratio: correction_ratio(&model),
        });
    }
    let slopes = spec
        .kinds
        .iter()
        .map(|&k| {
            let ys: Vec<f64> = records.iter().filter_map(|r| r.residual(k)).collect();
            (k, fit_loglog(&spec.values, &ys))
        })
        .collect();
    Ok(ScanOutcome { records, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::evenness_residual;
    use std::f64::consts::PI;

    fn model_1d(n: usize, length: f64, pot: &str, m: f64, amplitude: f64) -> DiracModel {
        ModelSpec::new(1, n, length, pot)
            .unwrap()
            .mass(m)
            .amplitude(amplitude)
            .build()
            .unwrap()
    }

    #[test]
    fn series_free_limit_is_the_taylor_polynomial() {
        let model = model_1d(16, 4.0 * PI, "cos(2*pi*x/L)", 3.0, 0.2);
        for kind in ApproxKind::ALL {
            let fl = free_limit(&model, kind).unwrap();
            assert!(fl.own_limit <= 1e-10, "{kind}: {}", fl.own_limit);
            match kind {
                ApproxKind::SeriesPlain | ApproxKind::SeriesFull => {
                    let r = fl.truncation_ratio.unwrap();
                    assert!(r > 0.0 && r <= 1.0, "{kind}: {r}");
                    // Scalar Taylor error per Fourier mode, assembled back in position space.
                    let g: Vec<f64> = (0..16)
                        .map(|k| {
                            let p = model.grid.base_wavenumber() * model.grid.mode(k) as f64;
                            let t = p * p / 9.0;
                            let taylor = 1.0 + t / 2.0 - t * t / 8.0 + t.powi(3) / 16.0 - 5.0 * t.powi(4) / 128.0;
                            3.0 * (taylor - (1.0 + t).sqrt())
                        })
                        .collect();
                    let f = dft_matrix(16);
                    let lattice = &(&f.adjoint() * &OperatorMatrix::from_real_diagonal(&g)) * &f;
                    let expected = (&model.beta * &model.lift(&lattice)).max_abs();
                    assert!((fl.deviation - expected).abs() < 1e-9 * expected, "{} vs {expected}", fl.deviation);
                }
                _ => assert!(fl.truncation_ratio.is_none()),
            }
        }
    }

    #[test]
    fn free_limit_of_closed_forms() {
        let model = model_1d(16, 2.0 * PI, "cos(x)", 1.0, 0.0);
        let calc = FreeCalculus::new(&model).unwrap();
        let free = calc.free_fw();
        for kind in [ApproxKind::MhamD, ApproxKind::Corrected] {
            assert!((&ham_approx(&model, kind).unwrap() - &free).max_abs() <= 1e-13);
        }
    }

    #[test]
    fn constant_potential_is_a_gauge_shift() {
        let model = model_1d(16, 2.0 * PI, "1", 2.0, 0.3);
        let calc = FreeCalculus::new(&model).unwrap();
        let f = model.potential_energy();
        let shifted_free = calc.free_fw().add_identity(0.3);
        let shifted_series = calc.mass_series().add_identity(0.3);
        assert!((&calc.mham_d(&f).unwrap() - &shifted_free).max_abs() <= 1e-12);
        assert!((&calc.corrected(&f).unwrap() - &calc.mham_d(&f).unwrap()).max_abs() <= 1e-12);
        assert!((&calc.series(&f, false).unwrap() - &shifted_series).max_abs() <= 1e-10);
        assert!((&calc.series_plain(&f).unwrap() - &shifted_series).max_abs() <= 1e-10);
    }

    #[test]
    fn corrected_minus_mham_is_the_darwin2_channel() {
        let model = model_1d(16, 2.0 * PI, "cos(x) + 0.5*sin(2*x)", 1.0, 0.2);
        let calc = FreeCalculus::new(&model).unwrap();
        let f = model.potential_energy();
        let diff = &calc.corrected(&f).unwrap() - &calc.mham_d(&f).unwrap();
        let m = 1.0;
        let coef = calc.of_eps(|e| (2.0 * e * e - m * m) / (e.powi(4) * (e + m).powi(2)));
        let c2 = calc.c2(&f).unwrap();
        let direct = (&(&coef * &c2) + &(&c2 * &coef)).scale(1.0 / 64.0);
        assert!((&diff - &direct).max_abs() <= 1e-14);
    }

    #[test]
    fn every_kind_is_hermitian_and_even() {
        let model = model_1d(16, 4.0 * PI, "cos(x) + 0.3*cos(3*x/2)", 3.0, 0.1);
        for kind in ApproxKind::ALL {
            let h = ham_approx(&model, kind).unwrap();
            assert!(h.hermiticity_residual() <= 1e-12, "{kind}");
            assert!(evenness_residual(&h, &model.beta) <= 1e-14, "{kind}");
        }
    }

    #[test]
    fn mass_series_is_bounded_by_next_term() {
        // |p| ≤ 8 < m, so the alternating binomial series is bounded by its next term.
        let m = 10.0;
        let model = model_1d(16, 2.0 * PI, "cos(x)", m, 0.0);
        let calc = FreeCalculus::new(&model).unwrap();
        let diff = &calc.mass_series() - &calc.free_fw();
        let kmax = 8.0f64;
        let bound = 7.0 * kmax.powi(10) / (256.0 * m.powi(9));
        let w = crate::matfun::spectrum_hermitian(&diff.hermitian_part()).unwrap();
        assert!(w.iter().all(|v| v.abs() <= bound * (1.0 + 1e-9)));
        assert!(w.iter().any(|v| v.abs() > 0.1 * bound));
    }

    #[test]
    fn a24_summands_are_hermitian_even_and_quadratic() {
        let model = model_1d(16, 4.0 * PI, "cos(x)", 2.0, 0.1);
        let calc = FreeCalculus::new(&model).unwrap();
        let f = model.potential_energy();
        let f2 = f.scale(2.0);
        let terms = calc.a24_terms(&f).unwrap();
        let doubled = calc.a24_terms(&f2).unwrap();
        assert_eq!(terms.len(), 7);
        for (t, d) in terms.iter().zip(&doubled) {
            assert!(t.bracket.hermiticity_residual() <= 1e-12, "{}", t.name);
            assert!(evenness_residual(&t.bracket, &model.beta) <= 1e-14, "{}", t.name);
            let ratio = d.bracket.frobenius_norm() / t.bracket.frobenius_norm();
            assert!((ratio - 4.0).abs() <= 1e-9, "{} ratio {ratio}", t.name);
        }
        assert!(calc.a24(&f).unwrap().hermiticity_residual() <= 1e-12);
    }

    #[test]
    fn chain_free_limits() {
        let m = 1.5;
        let model = model_1d(16, 2.0 * PI, "cos(x)", m, 0.0);
        let calc = FreeCalculus::new(&model).unwrap();
        let zero = OperatorMatrix::zeros(model.dim());
        let eps = calc.eps();
        let lam0 = &calc.free_dirac() * &calc.of_eps(|e| 1.0 / e);
        let gram0 = calc.of_eps(|e| 2.0 * (e + m) / e);
        for variant in [ChainVariant::LinearExact, ChainVariant::Hbar2Truncated] {
            let get = |s| calc.chain(s, variant, &zero).unwrap();
            assert!((&get(ChainStage::SqrtH2) - &eps).max_abs() <= 1e-13);
            assert!((&get(ChainStage::Lambda) - &lam0).max_abs() <= 1e-13);
            assert!((&get(ChainStage::Gram) - &gram0).max_abs() <= 1e-13);
            let g = get(ChainStage::InvSqrtGram);
            assert!((&(&g * &gram0) * &g).add_identity(-1.0).max_abs() <= 1e-13);
        }
    }

    #[test]
    fn chain_ham_matches_corrected_and_gram_is_even() {
        let model = model_1d(16, 4.0 * PI, "cos(x)", 1.0, 0.05);
        let ham = weakfield_chain(&model, ChainStage::Ham, ChainVariant::Hbar2Truncated).unwrap();
        assert!((&ham - &ham_corrected(&model).unwrap()).max_abs() <= 1e-12);
        let gram = weakfield_chain(&model, ChainStage::Gram, ChainVariant::Hbar2Truncated).unwrap();
        assert!(gram.hermiticity_residual() <= 1e-12);
        let c = comm(&gram, &model.beta).unwrap();
        assert!(c.frobenius_norm() <= 1e-12 * gram.frobenius_norm());
    }

    #[test]
    fn chain_sandwich_reduces_to_free_fw() {
        let model = model_1d(16, 2.0 * PI, "cos(x)", 1.0, 0.0);
        let calc = FreeCalculus::new(&model).unwrap();
        let zero = OperatorMatrix::zeros(model.dim());
        let s = calc.chain_sandwich(ChainVariant::Hbar2Truncated, &zero).unwrap();
        assert!((&s - &calc.free_fw()).max_abs() <= 1e-12);
    }

    #[test]
    fn linear_response_of_constant_potential() {
        let model = model_1d(8, 2.0 * PI, "1", 1.0, 0.0);
        let d = linear_response(&model, None).unwrap();
        assert!((&d - &OperatorMatrix::identity(16)).max_abs() <= 1e-9);
    }

    #[test]
    fn linear_response_is_even() {
        let model = model_1d(16, 2.0 * PI, "cos(x)", 1.0, 0.0);
        let d = linear_response(&model, None).unwrap();
        assert!(evenness_residual(&d, &model.beta) <= 1e-9);
    }

    #[test]
    fn windowed_linear_response_prefers_corrected() {
        let model = model_1d(32, 8.0 * PI, "cos(2*pi*x/L)", 1.0, 0.0);
        let r = residuals_at(
            &model,
            &[ApproxKind::MhamD, ApproxKind::Corrected],
            ResidualMetric::LinearResponse,
            Some(8),
            None,
        )
        .unwrap();
        assert!(r[1].1 < r[0].1, "{r:?}");
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(2.5)).collect();
        let fit = fit_loglog(&xs, &ys).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!(fit.stderr.unwrap() < 1e-12);
        assert!(fit_loglog(&[1.0], &[1.0]).is_none());
        assert!(fit_loglog(&[1.0, 2.0], &[0.0, 1.0]).is_none());
        assert!(fit_loglog(&[1.0, 2.0], &[1.0, 2.0]).unwrap().stderr.is_none());
    }

    #[test]
    fn scan_value_validation() {
        let template = ModelSpec::new(1, 8, 2.0 * PI, "cos(x)").unwrap();
        let mut spec = ScanSpec::new(ScanKind::Amplitude, vec![0.1, 0.05, 0.2], template, vec![ApproxKind::MhamD]);
        assert!(matches!(residual_scan(&spec), Err(Error::InvalidScan(_))));
        spec.values = vec![0.0, 0.1];
        assert!(matches!(residual_scan(&spec), Err(Error::InvalidScan(_))));
        spec.values = vec![0.01];
        let out = residual_scan(&spec).unwrap();
        assert_eq!(out.records.len(), 1);
        assert!(out.slope(ApproxKind::MhamD).is_none());
    }

    #[test]
    fn bandwidth_and_window() {
        let model = model_1d(64, 2.0 * PI, "cos(x) + 0.2*sin(3*x)", 1.0, 0.0);
        assert_eq!(potential_bandwidth(&model), 3);
        assert_eq!(alias_free_cutoff(&model), 30);
        let g3 = ModelSpec::new(3, 6, 2.0 * PI, "cos(x) + cos(y)").unwrap().build().unwrap();
        assert_eq!(potential_bandwidth(&g3), 1);
        assert_eq!(alias_free_cutoff(&g3), 2);
    }

    #[test]
    fn spin_darwin_rejects_1d_and_vanishes_without_field() {
        let model = model_1d(8, 2.0 * PI, "cos(x)", 1.0, 0.1);
        assert!(matches!(
            spin_darwin_decomposition_check(&model),
            Err(Error::WrongModelDimension { .. })
        ));
        let m3 = ModelSpec::new(3, 4, 2.0 * PI, "cos(x)").unwrap().build().unwrap();
        assert_eq!(spin_darwin_decomposition_check(&m3).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn correction_ratio_scales_with_wavenumber() {
        let template = ModelSpec::new(1, 32, 2.0 * PI, "cos(x)").unwrap();
        let r1 = correction_ratio(&template.clone().build().unwrap());
        let r2 = correction_ratio(&template.wavenumber_scale(2.0).build().unwrap());
        assert!((r2 / r1 - 2.0).abs() < 1e-10);
    }
}
