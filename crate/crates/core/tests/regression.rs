use std::f64::consts::PI;

use fwlab_core::approx::{
    ham_approx, ham_corrected, ham_mham_d, ham_series, ApproxKind, FreeCalculus,
};
use fwlab_core::exact::{eriksen_transform, EriksenThresholds};
use fwlab_core::fv::{fv_similarity_check, second_order_residual, SecondOrderKind};
use fwlab_core::matfun::spectrum_hermitian;
use fwlab_core::{DiracModel, ModelSpec};

fn model(dim: usize, n: usize, length: f64, pot: &str, mass: f64, amplitude: f64) -> DiracModel {
    ModelSpec::new(dim, n, length, pot).unwrap().mass(mass).amplitude(amplitude).build().unwrap()
}

/// Lowest eight positive levels of N=16, L=2π, m=1, 0.3·(cos x + ½ sin 2x),
/// from an independent dense numpy build of σ₃m + σ₁p + eΦ with `eigvalsh`.
const NUMPY_POSITIVE_LEVELS: [f64; 8] = [
    0.915_447_966_899_886,
    1.3716424005201109,
    1.483_803_825_891_646,
    2.235_530_973_902_847,
    2.244_006_527_838_221,
    3.1631876745734377,
    3.163_474_793_135_902,
    4.123_545_230_534_861,
];

#[test]
fn spectrum_matches_numpy_oracle() {
    let m = model(1, 16, 2.0 * PI, "cos(x) + 0.5*sin(2*x)", 1.0, 0.3);
    let spec = spectrum_hermitian(&m.hamiltonian()).unwrap();
    let positive: Vec<f64> = spec.iter().copied().filter(|&e| e > 0.0).take(8).collect();
    for (got, want) in positive.iter().zip(NUMPY_POSITIVE_LEVELS) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn transformed_spectrum_matches_numpy_oracle() {
    let m = model(1, 16, 2.0 * PI, "cos(x) + 0.5*sin(2*x)", 1.0, 0.3);
    let r = eriksen_transform(&m.hamiltonian(), &m.beta).unwrap();
    assert!(r.diagnostics.passes(&EriksenThresholds::default()));
    let spec = spectrum_hermitian(&r.h_fw).unwrap();
    let positive: Vec<f64> = spec.iter().copied().filter(|&e| e > 0.0).take(8).collect();
    for (got, want) in positive.iter().zip(NUMPY_POSITIVE_LEVELS) {
        assert!((got - want).abs() < 1e-11, "{got} vs {want}");
    }
}

#[test]
fn free_dispersion_in_one_and_three_dimensions() {
    let m1 = model(1, 8, 2.0 * PI, "cos(x)", 1.0, 0.0);
    let mut want: Vec<f64> = (-4i32..4)
        .flat_map(|k| {
            let e = (1.0 + (k * k) as f64).sqrt();
            [e, -e]
        })
        .collect();
    want.sort_by(f64::total_cmp);
    let got = spectrum_hermitian(&m1.hamiltonian()).unwrap();
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12);
    }

    let m3 = model(3, 4, 2.0 * PI, "cos(x)", 1.0, 0.0);
    let mut want = Vec::new();
    for a in -2i32..2 {
        for b in -2i32..2 {
            for c in -2i32..2 {
                let e = (1.0 + (a * a + b * b + c * c) as f64).sqrt();
                want.extend([e, e, -e, -e]);
            }
        }
    }
    want.sort_by(f64::total_cmp);
    let got = spectrum_hermitian(&m3.hamiltonian()).unwrap();
    assert_eq!(got.len(), 256);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-11);
    }
}

#[test]
fn constant_potential_shifts_every_kind() {
    let m = model(1, 16, 2.0 * PI, "1", 1.5, 0.4);
    let calc = FreeCalculus::new(&m).unwrap();
    let shift = 0.4;
    let free = calc.free_fw().add_identity(shift);
    for h in [ham_mham_d(&m).unwrap(), ham_corrected(&m).unwrap()] {
        assert!((&h - &free).max_abs() < 1e-12);
    }
    let series = ham_series(&m, false).unwrap();
    assert!((&series - &calc.mass_series().add_identity(shift)).max_abs() < 1e-9);
}

#[test]
fn approximations_are_close_to_exact_for_weak_long_wave_fields() {
    let m = model(1, 32, 16.0 * PI, "cos(2*pi*x/L)", 1.0, 0.01);
    let exact = eriksen_transform(&m.hamiltonian(), &m.beta).unwrap().h_fw;
    let exact_norm = exact.frobenius_norm();
    let scale = m.potential_energy().frobenius_norm();
    for kind in [ApproxKind::MhamD, ApproxKind::Corrected] {
        let d = (&ham_approx(&m, kind).unwrap() - &exact).frobenius_norm();
        assert!(d < scale, "{kind}: {d} vs {scale}");
        assert!(d / exact_norm < 1e-3, "{kind}");
    }
}

#[test]
fn fv_free_similarity_and_second_order_identity() {
    let free = model(1, 16, 2.0 * PI, "cos(x)", 1.0, 0.0);
    assert!(fv_similarity_check(&free, 1.0, 2.0).unwrap() <= 1e-13);
    for kind in [SecondOrderKind::Bare, SecondOrderKind::Corrected] {
        for r in second_order_residual(&free, kind).unwrap() {
            assert!(r.residual <= 1e-10, "{kind:?} level {}: {}", r.index, r.residual);
        }
    }
}
