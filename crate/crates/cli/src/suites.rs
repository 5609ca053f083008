//! The four verification suites behind the `verify`, `scan`, `symbolic` and `fv`
//! subcommands.

use fwlab_core::approx::{
    chain_residual, free_limit, ham_approx, residual_scan, series_a24_ablation,
    spin_darwin_decomposition_check, ApproxKind, ChainStage, ScanKind, ScanSpec,
};
use fwlab_core::exact::{eriksen_transform, evenness_residual, EriksenThresholds};
use fwlab_core::fv::{
    aggregate_residual, frak_e_cross_check, fv_amplitude_scan, fv_from_model, fv_similarity_check,
    halving_ratios, second_order_residual_with, Branch, SecondOrderKind,
};
use fwlab_core::matfun::involution_residual;
use fwlab_core::{DiracModel, Error as CoreError};
use fwlab_series::{
    channel_agreement, channel_coeff_darwin2, channel_coeff_spin, channel_expand_corrected,
    channel_expand_series_linear, rational_identity_probe, rational_identity_secondorder, word_expand,
    Channel, ChannelPoly, PowerSeries, Rational, SeriesError,
};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::report::{format_number, Report, Verdict};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid scenario: {0}")]
    Invalid(CoreError),
    #[error("numerical precondition failed: {0}")]
    Numerical(CoreError),
    #[error("invalid symbolic request: {0}")]
    Series(#[from] SeriesError),
}

impl From<CoreError> for SuiteError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::GapViolation { .. } | CoreError::NotPositiveDefinite { .. } | CoreError::NotHermitian { .. } => {
                SuiteError::Numerical(e)
            }
            other => SuiteError::Invalid(other),
        }
    }
}

impl SuiteError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SuiteError::Numerical(_) => 3,
            _ => 2,
        }
    }

    pub fn metric(&self) -> &'static str {
        match self {
            SuiteError::Numerical(_) => "precondition_error",
            _ => "config_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, SuiteError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Verify,
    Scan,
    Symbolic,
    Fv,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Verify => "verify",
            Suite::Scan => "scan",
            Suite::Symbolic => "symbolic",
            Suite::Fv => "fv",
        }
    }
}

pub fn new_report(suite: Suite, cfg: &ScenarioConfig) -> Report {
    let mut report = Report::new(suite.name(), &cfg.raw.canonical(), &cfg.raw.canonical_model(), cfg.run.seed);
    report.meta("potential", cfg.raw.get("model", "potential"));
    report
}

/// Runs a suite; failures before any measurement become a single error row.
pub fn run(suite: Suite, cfg: &ScenarioConfig) -> (Report, i32) {
    let mut report = new_report(suite, cfg);
    let outcome = match suite {
        Suite::Verify => verify(cfg, &mut report),
        Suite::Scan => scan(cfg, &mut report),
        Suite::Symbolic => symbolic(cfg, &mut report),
        Suite::Fv => fv(cfg, &mut report),
    };
    match outcome {
        Ok(()) => {
            let code = i32::from(report.any_fail());
            (report, code)
        }
        Err(e) => {
            let mut failed = new_report(suite, cfg);
            failed.meta("error", &e.to_string());
            failed.push("scenario", "", e.metric(), f64::NAN, Verdict::Fail);
            (failed, e.exit_code())
        }
    }
}

fn build_model(cfg: &ScenarioConfig) -> Result<DiracModel> {
    let mut model = cfg.model.spec.build()?;
    if cfg.model.beta_scale != 1.0 {
        model.beta = model.beta.scale(cfg.model.beta_scale);
    }
    let residual = involution_residual(&model.beta);
    if residual > 1e-12 {
        return Err(SuiteError::Invalid(CoreError::NotInvolution { residual }));
    }
    Ok(model)
}

fn thresholds(cfg: &ScenarioConfig) -> EriksenThresholds {
    let t = &cfg.tolerances;
    EriksenThresholds {
        unitarity: t.get("unitarity"),
        pseudo_herm: t.get("pseudo_herm"),
        evenness: t.get("evenness"),
        lambda_sq: t.get("lambda_sq"),
        spectrum_rel: t.get("spectrum_rel"),
        sandwich_rel: t.get("sandwich_rel"),
        gram_parity_rel: t.get("gram_parity_rel"),
    }
}

fn num(v: f64) -> String {
    format_number(v)
}

pub fn verify(cfg: &ScenarioConfig, report: &mut Report) -> Result<()> {
    let model = build_model(cfg)?;
    let tol = &cfg.tolerances;
    let exact = eriksen_transform(&model.hamiltonian(), &model.beta)?;
    let limits = thresholds(cfg);
    let scenario = ("amplitude", num(model.amplitude));
    let param = (scenario.0, scenario.1.as_str());
    report.meta("threshold.scaled_by", "h_norm for spectrum_res, sandwich_res, gram_parity_res");
    for ((name, value, limit), key) in exact.diagnostics.checks(&limits).into_iter().zip([
        "unitarity",
        "pseudo_herm",
        "evenness",
        "lambda_sq",
        "spectrum_rel",
        "sandwich_rel",
        "gram_parity_rel",
    ]) {
        report.threshold(key, tol.get(key));
        report.push(param.0, param.1, name, value, Verdict::from_check(value <= limit));
    }
    report.info(param.0, param.1, "h_norm", exact.diagnostics.h_norm);
    report.info(param.0, param.1, "sign_iterations", exact.sign_report.iterations as f64);

    for &kind in &cfg.run.kinds {
        let k = kind.name();
        let fl = free_limit(&model, kind)?;
        report.at_most(("amplitude", "0"), &format!("free_limit.{k}"), fl.own_limit, "free_limit", tol.get("free_limit"));
        if let Some(ratio) = fl.truncation_ratio {
            report.info("amplitude", "0", &format!("free_deviation.{k}"), fl.deviation);
            report.push("amplitude", "0", &format!("free_truncation_ratio.{k}"), ratio, Verdict::from_check(ratio <= 1.0));
        }
    }
    let exact_norm = exact.h_fw.frobenius_norm();
    for &kind in &cfg.run.kinds {
        let h = ham_approx(&model, kind)?;
        let k = kind.name();
        report.at_most(param, &format!("hermiticity.{k}"), h.hermiticity_residual(), "hermiticity", tol.get("hermiticity"));
        report.at_most(param, &format!("evenness.{k}"), evenness_residual(&h, &model.beta), "evenness", tol.get("evenness"));
        let rel = (&exact.h_fw - &h).frobenius_norm() / exact_norm;
        report.info(param.0, param.1, &format!("residual.full.{k}"), rel);
    }
    if model.grid.dimension() == 1 {
        for stage in ChainStage::ALL {
            let r = chain_residual(&model, stage, cfg.run.chain_variant, cfg.run.window)?;
            report.info(param.0, param.1, &format!("chain_residual.{}", stage.name()), r);
        }
    } else {
        let (r1, r2) = spin_darwin_decomposition_check(&model)?;
        let lim = tol.get("identity_3d");
        report.at_most(param, "spin_darwin_r1", r1, "identity_3d", lim);
        report.at_most(param, "momentum_gradient_r2", r2, "identity_3d", lim);
        report.at_most(param, "frak_e_cross_check", frak_e_cross_check(&model)?, "identity_3d", lim);
    }
    Ok(())
}

pub fn scan(cfg: &ScenarioConfig, report: &mut Report) -> Result<()> {
    let kind = cfg
        .run
        .scan
        .ok_or_else(|| SuiteError::Config(ConfigError::Missing("run.scan".into())))?;
    if cfg.run.values.is_empty() {
        return Err(SuiteError::Config(ConfigError::Missing("run.values".into())));
    }
    build_model(cfg)?;
    let mut spec = ScanSpec::new(kind, cfg.run.values.clone(), cfg.model.spec.clone(), cfg.run.kinds.clone());
    if let Some(m) = cfg.run.metric {
        spec.metric = m;
    }
    spec.window = cfg.run.window;
    spec.step = cfg.run.step;
    report.meta("scan", kind.name());
    report.meta("metric", spec.metric.name());
    report.meta("window", &spec.window.map_or("none".into(), |w| w.to_string()));
    let outcome = residual_scan(&spec)?;
    let pname = kind.name();
    for rec in &outcome.records {
        let pv = num(rec.value);
        for (k, r) in &rec.residuals {
            report.info(pname, &pv, &format!("residual.{}.{}", spec.metric.name(), k.name()), *r);
        }
        report.info(pname, &pv, "correction_ratio", rec.correction_ratio);
    }
    for (k, fit) in &outcome.slopes {
        match fit {
            Some(f) => {
                report.info("fit", "loglog", &format!("slope.{}", k.name()), f.slope);
                if let Some(se) = f.stderr {
                    report.info("fit", "loglog", &format!("slope_stderr.{}", k.name()), se);
                }
            }
            None => report.info("fit", "insufficient_points", &format!("slope.{}", k.name()), f64::NAN),
        }
    }
    let tol = &cfg.tolerances;
    let range = |r: f64| r >= tol.get("ratio_low") && r <= tol.get("ratio_high");
    match kind {
        ScanKind::Amplitude => {
            if let Some(f) = outcome.slope(ApproxKind::Corrected) {
                let (target, window) = (tol.get("amplitude_slope"), tol.get("slope_window"));
                report.threshold("amplitude_slope", target);
                report.threshold("slope_window", window);
                let ok = (f.slope - target).abs() <= window;
                report.push("fit", "loglog", "slope_check.CORRECTED", f.slope, Verdict::from_check(ok));
            }
            if !cfg.run.chain_amplitudes.is_empty() {
                report.threshold("ratio_low", tol.get("ratio_low"));
                report.threshold("ratio_high", tol.get("ratio_high"));
                let base = cfg.model.spec.build()?;
                for stage in [ChainStage::Lambda, ChainStage::Gram] {
                    let mut rs = Vec::new();
                    for &a in &cfg.run.chain_amplitudes {
                        let r = chain_residual(&base.with_amplitude(a), stage, cfg.run.chain_variant, cfg.run.window)?;
                        report.info("amplitude", &num(a), &format!("chain_residual.{}", stage.name()), r);
                        rs.push(r);
                    }
                    for (pair, ratio) in cfg.run.chain_amplitudes.windows(2).zip(halving_ratios(&rs)) {
                        let label = format!("{}/{}", num(pair[0]), num(pair[1]));
                        report.push("amplitude_pair", &label, &format!("chain_ratio.{}", stage.name()), ratio, Verdict::from_check(range(ratio)));
                    }
                }
            }
        }
        ScanKind::Wavenumber => {
            if let (Some(m), Some(c)) = (outcome.slope(ApproxKind::MhamD), outcome.slope(ApproxKind::Corrected)) {
                let gain = c.slope - m.slope;
                report.threshold("slope_gain", tol.get("slope_gain"));
                report.push("fit", "loglog", "slope_gain.CORRECTED_vs_MHAM_D", gain, Verdict::from_check(gain >= tol.get("slope_gain")));
            }
            let mham = outcome.residuals(ApproxKind::MhamD);
            let corr = outcome.residuals(ApproxKind::Corrected);
            if !mham.is_empty() && mham.len() == corr.len() {
                let worst = corr.iter().zip(&mham).map(|(c, m)| c / m).fold(0.0, f64::max);
                report.push("all_points", "", "max_ratio.CORRECTED_over_MHAM_D", worst, Verdict::from_check(worst < 1.0));
            }
        }
        ScanKind::Mass => {
            let series = outcome.residuals(ApproxKind::SeriesFull);
            if !series.is_empty() {
                let mut order: Vec<(f64, f64)> = cfg.run.values.iter().copied().zip(series.iter().copied()).collect();
                order.sort_by(|a, b| a.0.total_cmp(&b.0));
                let rises = order.windows(2).filter(|w| w[1].1 >= w[0].1).count();
                report.push("all_points", "", "monotone_violations.SERIES_FULL", rises as f64, Verdict::from_check(rises == 0));
                if let Some(f) = outcome.slope(ApproxKind::SeriesFull) {
                    let decay = -f.slope;
                    report.threshold("decay_exponent", tol.get("decay_exponent"));
                    report.push("fit", "loglog", "decay_exponent.SERIES_FULL", decay, Verdict::from_check(decay >= tol.get("decay_exponent")));
                }
                let smallest = order[0].0;
                let model = spec.model_at(smallest)?;
                let (with, without) = series_a24_ablation(&model, spec.window)?;
                let pv = num(smallest);
                report.info("mass", &pv, "residual.full.SERIES_FULL", with);
                report.info("mass", &pv, "residual.full.SERIES_FULL_without_A24", without);
                report.push("mass", &pv, "a24_removal_increase", without / with, Verdict::from_check(without > with));
            }
        }
    }
    Ok(())
}

fn rational_label(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn coefficient_rows(report: &mut Report, name: &str, series: &PowerSeries, expected: &[(i64, i64)]) {
    for (j, c) in series.coeffs().iter().enumerate() {
        let metric = format!("{name}[{j}]");
        match expected.get(j) {
            Some(&(n, d)) => {
                let ok = *c == Rational::new(n.into(), d.into());
                report.push("exact", &rational_label(c), &metric, to_f64(c), Verdict::from_check(ok));
            }
            None => report.info("exact", &rational_label(c), &metric, to_f64(c)),
        }
    }
}

pub fn symbolic(cfg: &ScenarioConfig, report: &mut Report) -> Result<()> {
    let order = cfg.run.order;
    if order < 2 {
        return Err(SeriesError::OrderTooLow { min: 2, got: order }.into());
    }
    report.meta("order", &order.to_string());
    let k = order.max(4);
    let one_plus_t = PowerSeries::one(k).add(&PowerSeries::variable(k));
    coefficient_rows(report, "mass_series", &one_plus_t.sqrt1p()?, &[(1, 1), (1, 2), (-1, 8), (1, 16), (-5, 128)]);
    coefficient_rows(report, "spin", &channel_coeff_spin(order)?, &[(1, 2), (-3, 8), (5, 16)]);
    coefficient_rows(report, "darwin2", &channel_coeff_darwin2(order)?, &[(1, 4), (-1, 8)]);

    let identity = rational_identity_secondorder();
    report.push("residual", &identity.residual.to_string(), "rational_identity", 0.0, Verdict::from_check(identity.holds));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let points: Vec<(Rational, Rational)> = (0..cfg.run.probe_points)
        .map(|_| {
            let mut r = || Rational::new(rng.gen_range(-1000i64..=1000).into(), rng.gen_range(1i64..=97).into());
            (r(), r())
        })
        .collect();
    let probe_ok = rational_identity_probe(&points);
    report.push("points", &points.len().to_string(), "rational_identity_probe", points.len() as f64, Verdict::from_check(probe_ok));

    // Agreement through m⁻⁶ needs the t² coefficients of both channel series.
    let agree_order = order.max(3);
    report.meta("agreement_order", &agree_order.to_string());
    let agreement = channel_agreement(agree_order)?;
    for ch in [Channel::C1, Channel::C2] {
        let mismatches = agreement.difference.keys().filter(|m| m.channel == ch).count();
        report.push("max_inverse_mass_power", "6", &format!("channel_match.{}", ch.name()), mismatches as f64, Verdict::from_check(mismatches == 0));
    }
    for (m, c) in &agreement.difference {
        report.info("monomial", &m.to_string(), "channel_difference", to_f64(c));
    }
    report.push("max_inverse_mass_power", "6", "c3_isolated", agreement.difference.len() as f64, Verdict::from_check(agreement.isolates_c3()));

    let words_corrected = word_expand(&channel_expand_corrected(agree_order)?, 6)?;
    let words_series = word_expand(&channel_expand_series_linear(agree_order)?, 6)?;
    let c3 = PowerSeries::from_ratios(&[(11, 1024)])?;
    let words_c3 = word_expand(&ChannelPoly::new().with(Channel::C3, c3, -6), 6)?;
    let diff = words_series.add(&words_corrected.scale(&Rational::from_integer((-1).into())));
    report.push("max_degree", "6", "word_difference_is_c3", diff.len() as f64, Verdict::from_check(diff == words_c3));
    Ok(())
}

pub fn fv(cfg: &ScenarioConfig, report: &mut Report) -> Result<()> {
    let model = build_model(cfg)?;
    let tol = &cfg.tolerances;
    let mut scales: Vec<f64> = Vec::new();
    for &(n1, n2) in &cfg.run.fv_pairs {
        let r = fv_similarity_check(&model, n1, n2)?;
        report.at_most(("N_pair", &format!("{}:{}", num(n1), num(n2))), "similarity_residual", r, "similarity", tol.get("similarity"));
        for n in [n1, n2] {
            if !scales.contains(&n) {
                scales.push(n);
            }
        }
    }
    for &n in &scales {
        let fvm = fv_from_model(&model, n)?;
        let pv = num(n);
        report.at_most(("N", &pv), "pseudo_hermiticity", fvm.pseudo_hermiticity_residual(), "pseudo_herm_fv", tol.get("pseudo_herm_fv"));
        report.at_most(("N", &pv), "assembly", fvm.assembly_residual(), "pseudo_herm_fv", tol.get("pseudo_herm_fv"));
    }

    let amps = &cfg.run.fv_amplitudes;
    if let Some(&(n1, n2)) = cfg.run.fv_pairs.first() {
        report.meta("scale_pair", &format!("{}:{}", num(n1), num(n2)));
        let scan = fv_amplitude_scan(&model, amps, n1, n2)?;
        let bound = tol.get("scale_bound");
        report.threshold("scale_bound", bound);
        report.threshold("ratio_low", tol.get("ratio_low"));
        report.threshold("ratio_high", tol.get("ratio_high"));
        for p in &scan {
            let pv = num(p.amplitude);
            report.info("amplitude", &pv, "scale_dependence", p.scale_dependence);
            report.info("amplitude", &pv, "formula_residual", p.formula_residual);
            report.info("amplitude", &pv, "odd_norm", p.odd_norm);
            let limit = bound * p.amplitude * p.amplitude;
            report.push("amplitude", &pv, "scale_dependence_bound", p.scale_dependence / (p.amplitude * p.amplitude), Verdict::from_check(p.scale_dependence <= limit));
        }
        let mut sorted = scan.clone();
        sorted.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
        let low = tol.get("ratio_low");
        let high = tol.get("ratio_high");
        for w in sorted.windows(2) {
            let label = format!("{}/{}", num(w[0].amplitude), num(w[1].amplitude));
            for (metric, hi, lo) in [
                ("ratio.scale_dependence", w[0].scale_dependence, w[1].scale_dependence),
                ("ratio.formula_residual", w[0].formula_residual, w[1].formula_residual),
            ] {
                let ratio = hi / lo;
                report.push("amplitude_pair", &label, metric, ratio, Verdict::from_check(ratio >= low && ratio <= high));
            }
        }
    }

    let count = cfg.run.eigenpairs;
    let corrected = second_order_residual_with(&model, SecondOrderKind::Corrected, count, Branch::Positive)?;
    let bare = second_order_residual_with(&model, SecondOrderKind::Bare, count, Branch::Positive)?;
    for (c, b) in corrected.iter().zip(&bare) {
        let pv = c.index.to_string();
        report.info("eigenpair", &pv, "energy", c.energy);
        report.info("eigenpair", &pv, "second_order.CORRECTED", c.residual);
        report.info("eigenpair", &pv, "second_order.BARE", b.residual);
        if c.degenerate {
            report.info("eigenpair", &pv, "degenerate", 1.0);
        }
        report.push("eigenpair", &pv, "corrected_below_bare", c.residual / b.residual, Verdict::from_check(c.residual < b.residual));
    }
    if amps.len() >= 2 {
        let mut agg_c = Vec::new();
        let mut agg_b = Vec::new();
        for &a in amps {
            let m = model.with_amplitude(a);
            let c = second_order_residual_with(&m, SecondOrderKind::Corrected, count, Branch::Positive)?;
            let b = second_order_residual_with(&m, SecondOrderKind::Bare, count, Branch::Positive)?;
            agg_c.push(aggregate_residual(&c));
            agg_b.push(aggregate_residual(&b));
            report.info("amplitude", &num(a), "second_order_aggregate.CORRECTED", agg_c.last().copied().unwrap());
            report.info("amplitude", &num(a), "second_order_aggregate.BARE", agg_b.last().copied().unwrap());
        }
        if let Some(f) = fwlab_core::approx::fit_loglog(amps, &agg_c) {
            let (target, window) = (tol.get("second_order_slope"), tol.get("second_order_window"));
            report.threshold("second_order_slope", target);
            report.threshold("second_order_window", window);
            report.push("fit", "loglog", "second_order_slope.CORRECTED", f.slope, Verdict::from_check((f.slope - target).abs() <= window));
        }
        if let Some(f) = fwlab_core::approx::fit_loglog(amps, &agg_b) {
            report.info("fit", "loglog", "second_order_slope.BARE", f.slope);
        }
    }
    Ok(())
}
