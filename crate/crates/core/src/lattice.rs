//! Periodic grids, pseudospectral momentum operators and assembled Dirac models.
//!
//! Full operators act on spin ⊗ lattice with the spin index slowest, so for
//! `beta = diag(1, -1) ⊗ I` the upper and lower spinors are contiguous blocks.
//! Lattice sites are ordered with `x` slowest.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{pauli, OperatorMatrix, I};
use crate::potential::PotentialExpr;

/// Default cap on the full matrix dimension of a 3D model (N = 8).
pub const DEFAULT_MAX_DIM: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dimension: usize,
    points: usize,
    length: f64,
}

impl Grid {
    pub fn new(dimension: usize, points: usize, length: f64) -> Result<Self> {
        if dimension != 1 && dimension != 3 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 3, got {dimension}"
            )));
        }
        if points == 0 || !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and positive, got {points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        Ok(Self {
            dimension,
            points,
            length,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn sites(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Base wavenumber `2π/L`.
    pub fn base_wavenumber(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Integer Fourier mode of DFT index `k`, in `[-N/2, N/2)`.
    pub fn mode(&self, k: usize) -> i64 {
        let n = self.points as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Per-axis indices of a site.
    pub fn site_indices(&self, site: usize) -> [usize; 3] {
        let n = self.points;
        match self.dimension {
            1 => [site, 0, 0],
            _ => [site / (n * n), (site / n) % n, site % n],
        }
    }

    /// Coordinates of a site; unused axes are zero.
    pub fn coordinates(&self, site: usize) -> [f64; 3] {
        let idx = self.site_indices(site);
        let h = self.spacing();
        let mut out = [0.0; 3];
        for axis in 0..self.dimension {
            out[axis] = idx[axis] as f64 * h;
        }
        out
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dimension {
            return Err(Error::InvalidAxis {
                axis,
                dimension: self.dimension,
            });
        }
        Ok(())
    }
}

/// Unitary DFT matrix `F[k, j] = exp(-2πi k j / N) / √N`.
pub fn dft_matrix(points: usize) -> OperatorMatrix {
    let norm = 1.0 / (points as f64).sqrt();
    OperatorMatrix::from_fn(points, |k, j| {
        let phase = -2.0 * PI * ((k * j) % points) as f64 / points as f64;
        Complex64::from_polar(norm, phase)
    })
}

/// One-axis momentum `F† diag(2πn/L) F` on `N` points.
fn axis_momentum(grid: &Grid) -> OperatorMatrix {
    let f = dft_matrix(grid.points());
    let k0 = grid.base_wavenumber();
    let diag: Vec<f64> = (0..grid.points()).map(|k| k0 * grid.mode(k) as f64).collect();
    let d = OperatorMatrix::from_real_diagonal(&diag);
    (&(&f.adjoint() * &d) * &f).hermitian_part()
}

/// Embeds a one-axis operator along `axis` of the lattice.
fn embed_axis(grid: &Grid, axis: usize, op: &OperatorMatrix) -> OperatorMatrix {
    if grid.dimension() == 1 {
        return op.clone();
    }
    let id = OperatorMatrix::identity(grid.points());
    let factors: Vec<&OperatorMatrix> = (0..3).map(|a| if a == axis { op } else { &id }).collect();
    factors[0].kron(factors[1]).kron(factors[2])
}

/// Lattice momentum operator `-i ∂/∂x_axis`.
pub fn spectral_momentum(grid: &Grid, axis: usize) -> Result<OperatorMatrix> {
    grid.check_axis(axis)?;
    Ok(embed_axis(grid, axis, &axis_momentum(grid)))
}

/// Orthogonal projector onto Fourier modes with `|n_i| <= cutoff` on every axis.
pub fn momentum_window(grid: &Grid, cutoff: usize) -> OperatorMatrix {
    let f = dft_matrix(grid.points());
    let mask: Vec<f64> = (0..grid.points())
        .map(|k| if grid.mode(k).unsigned_abs() as usize <= cutoff { 1.0 } else { 0.0 })
        .collect();
    let p1 = (&(&f.adjoint() * &OperatorMatrix::from_real_diagonal(&mask)) * &f).hermitian_part();
    match grid.dimension() {
        1 => p1,
        _ => p1.kron(&p1).kron(&p1),
    }
}

/// `∂f/∂x_axis` of lattice samples, computed spectrally.
pub fn spectral_derivative(grid: &Grid, axis: usize, samples: &[f64]) -> Result<Vec<f64>> {
    let p = spectral_momentum(grid, axis)?;
    Ok(derivative_with(&p, samples))
}

fn derivative_with(p: &OperatorMatrix, samples: &[f64]) -> Vec<f64> {
    let v: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    p.matvec(&v).iter().map(|z| (I * z).re).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    TwoComponent1d,
    FourComponent3d,
}

impl Convention {
    pub fn name(&self) -> &'static str {
        match self {
            Convention::TwoComponent1d => "two_component_1d",
            Convention::FourComponent3d => "four_component_3d",
        }
    }
}

/// A discretized Dirac system with its operator blocks at full dimension.
#[derive(Debug, Clone)]
pub struct DiracModel {
    pub grid: Grid,
    pub mass: f64,
    pub charge: f64,
    pub amplitude: f64,
    pub convention: Convention,
    pub beta: OperatorMatrix,
    pub alpha: Vec<OperatorMatrix>,
    /// Spin matrices; empty in one dimension.
    pub sigma: Vec<OperatorMatrix>,
    pub momentum: Vec<OperatorMatrix>,
    /// Unscaled potential, diagonal.
    pub phi: OperatorMatrix,
    /// Unscaled field components `-∂_i Φ`, diagonal.
    pub field: Vec<OperatorMatrix>,
    pub lattice_momentum: Vec<OperatorMatrix>,
    pub phi_samples: Vec<f64>,
    pub field_samples: Vec<Vec<f64>>,
}

impl DiracModel {
    pub fn dim(&self) -> usize {
        self.beta.dim()
    }

    pub fn spin_dim(&self) -> usize {
        self.dim() / self.grid.sites()
    }

    /// The same model with a different field amplitude.
    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self {
            amplitude,
            ..self.clone()
        }
    }

    /// Field strength `e · amplitude`.
    pub fn coupling(&self) -> f64 {
        self.charge * self.amplitude
    }

    /// Even potential term `e · amplitude · Φ`.
    pub fn potential_energy(&self) -> OperatorMatrix {
        self.phi.scale(self.coupling())
    }

    /// Odd kinetic term `Σ α_i p_i`.
    pub fn kinetic(&self) -> OperatorMatrix {
        let mut out = OperatorMatrix::zeros(self.dim());
        for (a, p) in self.alpha.iter().zip(&self.momentum) {
            out += &(a * p);
        }
        out
    }

    /// Square of the kinetic term.
    pub fn kinetic_square(&self) -> OperatorMatrix {
        let o = self.kinetic();
        (&o * &o).hermitian_part()
    }

    /// `m² + 𝓞²`.
    pub fn free_square(&self) -> OperatorMatrix {
        self.kinetic_square().add_identity(self.mass * self.mass)
    }

    pub fn hamiltonian(&self) -> OperatorMatrix {
        let mut h = self.beta.scale(self.mass);
        h += &self.kinetic();
        h += &self.potential_energy();
        h
    }

    /// Field-free Hamiltonian `βm + 𝓞`.
    pub fn free_hamiltonian(&self) -> OperatorMatrix {
        &self.beta.scale(self.mass) + &self.kinetic()
    }

    /// Lattice operator lifted to act on every spin component.
    pub fn lift(&self, lattice_op: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::identity(self.spin_dim()).kron(lattice_op)
    }

    /// Momentum window on the full space.
    pub fn window(&self, cutoff: usize) -> OperatorMatrix {
        self.lift(&momentum_window(&self.grid, cutoff))
    }

    /// Spectral `∂_axis` of lattice samples.
    pub fn derivative(&self, axis: usize, samples: &[f64]) -> Vec<f64> {
        derivative_with(&self.lattice_momentum[axis], samples)
    }
}

/// Everything needed to assemble a model; `wavenumber_scale` maps the potential's
/// argument `r → s·r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub dimension: usize,
    pub points: usize,
    pub length: f64,
    pub mass: f64,
    pub charge: f64,
    pub amplitude: f64,
    pub potential: PotentialExpr,
    pub wavenumber_scale: f64,
    pub max_dim: usize,
}

impl ModelSpec {
    pub fn new(dimension: usize, points: usize, length: f64, potential: &str) -> Result<Self> {
        Ok(Self {
            dimension,
            points,
            length,
            mass: 1.0,
            charge: 1.0,
            amplitude: 0.0,
            potential: PotentialExpr::parse(potential)?,
            wavenumber_scale: 1.0,
            max_dim: DEFAULT_MAX_DIM,
        })
    }

    pub fn mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn charge(mut self, charge: f64) -> Self {
        self.charge = charge;
        self
    }

    pub fn amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn wavenumber_scale(mut self, scale: f64) -> Self {
        self.wavenumber_scale = scale;
        self
    }

    pub fn build(&self) -> Result<DiracModel> {
        let grid = Grid::new(self.dimension, self.points, self.length)?;
        let samples = sample_potential(&grid, &self.potential, self.wavenumber_scale)?;
        match self.dimension {
            1 => assemble_1d(grid, self.mass, self.charge, self.amplitude, samples),
            _ => assemble_3d(grid, self.mass, self.charge, self.amplitude, samples, self.max_dim),
        }
    }
}

fn check_mass(m: f64) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: format!("must be positive, got {m}"),
        });
    }
    Ok(())
}

fn sample_potential(grid: &Grid, pot: &PotentialExpr, scale: f64) -> Result<Vec<f64>> {
    (0..grid.sites())
        .map(|s| {
            let r = grid.coordinates(s).map(|c| c * scale);
            pot.eval(r, grid.length())
        })
        .collect()
}

pub fn build_model_1d(
    grid: Grid,
    m: f64,
    e: f64,
    amplitude: f64,
    pot: &PotentialExpr,
) -> Result<DiracModel> {
    if grid.dimension() != 1 {
        return Err(Error::WrongModelDimension {
            expected: 1,
            actual: grid.dimension(),
        });
    }
    let samples = sample_potential(&grid, pot, 1.0)?;
    assemble_1d(grid, m, e, amplitude, samples)
}

pub fn build_model_3d(
    grid: Grid,
    m: f64,
    e: f64,
    amplitude: f64,
    pot: &PotentialExpr,
) -> Result<DiracModel> {
    build_model_3d_capped(grid, m, e, amplitude, pot, DEFAULT_MAX_DIM)
}

pub fn build_model_3d_capped(
    grid: Grid,
    m: f64,
    e: f64,
    amplitude: f64,
    pot: &PotentialExpr,
    max_dim: usize,
) -> Result<DiracModel> {
    if grid.dimension() != 3 {
        return Err(Error::WrongModelDimension {
            expected: 3,
            actual: grid.dimension(),
        });
    }
    let dim = 4 * grid.sites();
    if dim > max_dim {
        return Err(Error::MemoryCap { dim, cap: max_dim });
    }
    let samples = sample_potential(&grid, pot, 1.0)?;
    assemble_3d(grid, m, e, amplitude, samples, max_dim)
}

/// Field components `-∂_i Φ` from potential samples.
pub fn field_gradient(model: &DiracModel) -> Vec<Vec<f64>> {
    (0..model.grid.dimension())
        .map(|axis| {
            model
                .derivative(axis, &model.phi_samples)
                .into_iter()
                .map(|d| -d)
                .collect()
        })
        .collect()
}

fn lattice_parts(grid: &Grid, samples: &[f64]) -> (Vec<OperatorMatrix>, Vec<Vec<f64>>) {
    let p1 = axis_momentum(grid);
    let moms: Vec<OperatorMatrix> = (0..grid.dimension()).map(|a| embed_axis(grid, a, &p1)).collect();
    let fields = moms
        .iter()
        .map(|p| derivative_with(p, samples).into_iter().map(|d| -d).collect())
        .collect();
    (moms, fields)
}

fn assemble_1d(grid: Grid, m: f64, e: f64, amplitude: f64, samples: Vec<f64>) -> Result<DiracModel> {
    check_mass(m)?;
    let [s1, _, s3] = pauli();
    let id = OperatorMatrix::identity(grid.sites());
    let (lattice_momentum, field_samples) = lattice_parts(&grid, &samples);
    let id2 = OperatorMatrix::identity(2);
    Ok(DiracModel {
        grid,
        mass: m,
        charge: e,
        amplitude,
        convention: Convention::TwoComponent1d,
        beta: s3.kron(&id),
        alpha: vec![s1.kron(&id)],
        sigma: Vec::new(),
        momentum: vec![id2.kron(&lattice_momentum[0])],
        phi: id2.kron(&OperatorMatrix::from_real_diagonal(&samples)),
        field: vec![id2.kron(&OperatorMatrix::from_real_diagonal(&field_samples[0]))],
        lattice_momentum,
        phi_samples: samples,
        field_samples,
    })
}

fn assemble_3d(
    grid: Grid,
    m: f64,
    e: f64,
    amplitude: f64,
    samples: Vec<f64>,
    max_dim: usize,
) -> Result<DiracModel> {
    check_mass(m)?;
    let dim = 4 * grid.sites();
    if dim > max_dim {
        return Err(Error::MemoryCap { dim, cap: max_dim });
    }
    let [s1, s2, s3] = pauli();
    let id2 = OperatorMatrix::identity(2);
    let id4 = OperatorMatrix::identity(4);
    let id = OperatorMatrix::identity(grid.sites());
    let spin = [s1.clone(), s2, s3.clone()];
    let (lattice_momentum, field_samples) = lattice_parts(&grid, &samples);
    let alpha = spin.iter().map(|s| s1.kron(s).kron(&id)).collect();
    let sigma = spin.iter().map(|s| id2.kron(s).kron(&id)).collect();
    let momentum = lattice_momentum.iter().map(|p| id4.kron(p)).collect();
    let field = field_samples
        .iter()
        .map(|f| id4.kron(&OperatorMatrix::from_real_diagonal(f)))
        .collect();
    Ok(DiracModel {
        grid,
        mass: m,
        charge: e,
        amplitude,
        convention: Convention::FourComponent3d,
        beta: s3.kron(&id2).kron(&id),
        alpha,
        sigma,
        momentum,
        phi: id4.kron(&OperatorMatrix::from_real_diagonal(&samples)),
        field,
        lattice_momentum,
        phi_samples: samples,
        field_samples,
    })
}

/// Clifford residuals `max(‖β²−I‖, ‖{β,α_i}‖, ‖{α_i,α_j} − 2δ_ij‖)`, max-abs entrywise.
pub fn clifford_residual(model: &DiracModel) -> f64 {
    let b = &model.beta;
    let mut worst = (b * b).add_identity(-1.0).max_abs();
    for (i, ai) in model.alpha.iter().enumerate() {
        worst = worst.max((&(b * ai) + &(ai * b)).max_abs());
        for (j, aj) in model.alpha.iter().enumerate() {
            let target = if i == j { 2.0 } else { 0.0 };
            worst = worst.max((&(ai * aj) + &(aj * ai)).add_identity(-target).max_abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::{commutator, parity_split, spectrum_hermitian};
    use crate::matrix::ONE;

    fn grid1(n: usize, l: f64) -> Grid {
        Grid::new(1, n, l).unwrap()
    }

    fn samples(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..grid.sites()).map(|s| f(grid.coordinates(s)[0])).collect()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(2, 8, 1.0).is_err());
        assert!(Grid::new(1, 7, 1.0).is_err());
        assert!(Grid::new(1, 8, 0.0).is_err());
        let g = Grid::new(3, 4, 1.0).unwrap();
        assert_eq!(g.sites(), 64);
        assert_eq!((0..4).map(|k| g.mode(k)).collect::<Vec<_>>(), vec![0, 1, -2, -1]);
    }

    #[test]
    fn momentum_on_fourier_eigenfunction() {
        let g = grid1(16, 3.0);
        let p = spectral_momentum(&g, 0).unwrap();
        let k = g.base_wavenumber();
        let v = samples(&g, |x| Complex64::from_polar(1.0, k * x));
        let pv = p.matvec(&v);
        for (a, b) in pv.iter().zip(&v) {
            assert!((a - b * k).norm() < 1e-14);
        }
        let c = p.matvec(&vec![ONE; 16]);
        assert!(c.iter().all(|z| z.norm() < 1e-14));
        assert!(matches!(spectral_momentum(&g, 1), Err(Error::InvalidAxis { .. })));
    }

    #[test]
    fn momentum_differentiates_band_limited_samples() {
        let g = grid1(32, 2.0 * PI);
        let k = 2.0 * g.base_wavenumber();
        let f: Vec<f64> = (0..32).map(|s| (k * g.coordinates(s)[0]).cos()).collect();
        let d = spectral_derivative(&g, 0, &f).unwrap();
        for (s, v) in d.iter().enumerate() {
            assert!((v + k * (k * g.coordinates(s)[0]).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn momentum_spectrum_and_dft_unitarity() {
        let g = grid1(8, 5.0);
        let p = spectral_momentum(&g, 0).unwrap();
        assert!(p.hermiticity_residual() == 0.0);
        let w = spectrum_hermitian(&p).unwrap();
        let mut expected: Vec<f64> = (-4..4).map(|n| n as f64 * g.base_wavenumber()).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in w.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-13);
        }
        let f = dft_matrix(8);
        assert!((&f.adjoint() * &f).add_identity(-1.0).max_abs() < 1e-13);
    }

    #[test]
    fn free_1d_dispersion() {
        let g = grid1(16, 2.0 * PI);
        let pot = PotentialExpr::parse("cos(2*pi*x/L)").unwrap();
        let model = build_model_1d(g, 1.0, 1.0, 0.0, &pot).unwrap();
        let w = spectrum_hermitian(&model.hamiltonian()).unwrap();
        let mut expected: Vec<f64> = (0..16)
            .flat_map(|k| {
                let p = g.mode(k) as f64 * g.base_wavenumber();
                let e = (1.0 + p * p).sqrt();
                [e, -e]
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in w.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(clifford_residual(&model) <= 1e-13);
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let g = grid1(16, 2.0 * PI);
        let free = build_model_1d(g, 1.0, 1.0, 0.0, &PotentialExpr::parse("1").unwrap()).unwrap();
        let shifted = free.with_amplitude(0.3);
        let w0 = spectrum_hermitian(&free.hamiltonian()).unwrap();
        let w1 = spectrum_hermitian(&shifted.hamiltonian()).unwrap();
        for (a, b) in w0.iter().zip(&w1) {
            assert!((b - a - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_split_recovers_blocks() {
        let g = grid1(16, 2.0 * PI);
        let pot = PotentialExpr::parse("cos(2*pi*x/L)").unwrap();
        let model = build_model_1d(g, 1.3, 1.0, 0.2, &pot).unwrap();
        let (even, odd) = parity_split(&model.hamiltonian(), &model.beta).unwrap();
        let expected_even = &model.beta.scale(1.3) + &model.potential_energy();
        assert!((&even - &expected_even).max_abs() < 1e-15);
        assert!((&odd - &model.kinetic()).max_abs() < 1e-15);
    }

    #[test]
    fn free_3d_dispersion_with_spin_degeneracy() {
        let g = Grid::new(3, 4, 2.0 * PI).unwrap();
        let pot = PotentialExpr::parse("cos(x)").unwrap();
        let model = build_model_3d(g, 1.0, 1.0, 0.0, &pot).unwrap();
        assert_eq!(model.dim(), 256);
        assert!(clifford_residual(&model) <= 1e-13);
        for s in &model.sigma {
            assert!(commutator(s, &model.beta).unwrap().max_abs() <= 1e-14);
        }
        let w = spectrum_hermitian(&model.hamiltonian()).unwrap();
        let k0 = g.base_wavenumber();
        let mut expected = Vec::new();
        for site in 0..g.sites() {
            let idx = g.site_indices(site);
            let p2: f64 = idx.iter().map(|&k| (g.mode(k) as f64 * k0).powi(2)).sum();
            let e = (1.0 + p2).sqrt();
            expected.extend([e, e, -e, -e]);
        }
        expected.sort_by(f64::total_cmp);
        for (a, b) in w.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn memory_cap_is_enforced() {
        let g = Grid::new(3, 10, 1.0).unwrap();
        let pot = PotentialExpr::parse("0").unwrap();
        assert!(matches!(
            build_model_3d(g, 1.0, 1.0, 0.0, &pot),
            Err(Error::MemoryCap { dim: 4000, cap: 2048 })
        ));
        assert!(matches!(
            build_model_1d(g, 1.0, 1.0, 0.0, &pot),
            Err(Error::WrongModelDimension { .. })
        ));
    }

    #[test]
    fn field_of_band_limited_potentials() {
        let g = grid1(16, 2.0 * PI);
        let constant = build_model_1d(g, 1.0, 1.0, 1.0, &PotentialExpr::parse("2.5").unwrap()).unwrap();
        assert!(field_gradient(&constant)[0].iter().all(|v| v.abs() < 1e-14));
        let cos = build_model_1d(g, 1.0, 1.0, 1.0, &PotentialExpr::parse("cos(3*x)").unwrap()).unwrap();
        for (s, e) in field_gradient(&cos)[0].iter().enumerate() {
            let x = g.coordinates(s)[0];
            assert!((e - 3.0 * (3.0 * x).sin()).abs() < 1e-13);
        }
        let g3 = Grid::new(3, 6, 2.0 * PI).unwrap();
        let m3 = build_model_3d(g3, 1.0, 1.0, 1.0, &PotentialExpr::parse("cos(x)*cos(y)").unwrap()).unwrap();
        let f = field_gradient(&m3);
        for site in 0..g3.sites() {
            let [x, y, _] = g3.coordinates(site);
            assert!((f[0][site] - x.sin() * y.cos()).abs() < 1e-12);
            assert!((f[1][site] - x.cos() * y.sin()).abs() < 1e-12);
            assert!(f[2][site].abs() < 1e-12);
        }
    }

    #[test]
    fn wavenumber_scale_rescales_argument() {
        let spec = ModelSpec::new(1, 16, 2.0 * PI, "cos(x)").unwrap().wavenumber_scale(3.0);
        let model = spec.build().unwrap();
        for (s, v) in model.phi_samples.iter().enumerate() {
            assert!((v - (3.0 * model.grid.coordinates(s)[0]).cos()).abs() < 1e-15);
        }
    }
}
