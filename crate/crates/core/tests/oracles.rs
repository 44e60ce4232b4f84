use std::f64::consts::{PI, SQRT_2};

use pelastica::curve::{self, ProfilePoint};
use pelastica::quadrature::{self, QuadratureConfig};
use pelastica::scalar;
use pelastica::verify::{self, VerificationReport};
use pelastica::{ElasticaParams, SpaceForm};

const H2: SpaceForm = SpaceForm::Hyperbolic;
const H12: SpaceForm = SpaceForm::DeSitter;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn params(p: f64, sp: SpaceForm, frac: f64) -> ElasticaParams {
    let s = scalar::a_star(p, sp).unwrap();
    ElasticaParams::new(sp, p, s + frac * s.abs()).unwrap()
}

fn named<'a>(rs: &'a [VerificationReport], name: &str) -> &'a VerificationReport {
    rs.iter().find(|r| r.check_name == name).unwrap()
}

#[test]
fn el_residual_of_p2_trace_at_fixed_step() {
    let pr = ElasticaParams::new(H2, 2.0, -1.0).unwrap();
    let tr = curve::trace(&pr, 1, 128, &cfg()).unwrap();
    let prof = tr.uniform_profile(4096, 1);
    let r = verify::el_residual(&prof, &pr).unwrap();
    assert!(r.passed, "{r:?}");
    let model: f64 = r.metadata["h2_model"].parse().unwrap();
    // the residual is truncation dominated and tracks the model
    assert!(r.max_residual < 2.0 * model + 1e-9);
}

#[test]
fn el_residual_rejects_short_or_uneven_profiles() {
    let pr = ElasticaParams::new(H2, 2.0, -1.0).unwrap();
    let pt = |s: f64| ProfilePoint { s, kappa: 1.0, kappa_prime: 0.0 };
    assert!(verify::el_residual(&[pt(0.0), pt(1.0)], &pr).is_err());
    assert!(verify::el_residual(&[pt(0.0), pt(1.0), pt(3.0)], &pr).is_err());
}

#[test]
fn conservation_residual_and_negative_control() {
    let pr = params(-1.0, H12, 0.4);
    let tr = curve::trace(&pr, 1, 128, &cfg()).unwrap();
    let prof = tr.profile();
    assert!(verify::conservation_residual(&prof, &pr).max_residual < 1e-8);
    let scaled: Vec<ProfilePoint> = prof.iter().map(|c| ProfilePoint { kappa: 1.01 * c.kappa, ..*c }).collect();
    let bad = verify::conservation_residual(&scaled, &pr);
    assert!(!bad.passed && bad.max_residual > 1e-3);
}

#[test]
fn killing_norm_at_alpha_and_near_circle() {
    let pr = params(1.5, H2, 0.3);
    let r = scalar::solve_roots(&pr, 1e-15).unwrap();
    let (p, a) = (pr.p(), pr.a());
    let lhs = a + p * p * r.alpha.powf(2.0 * p - 2.0);
    assert!((lhs - (p - 1.0).powi(2) * r.alpha.powf(2.0 * p)).abs() < 1e-12);

    let near = params(1.5, H2, 1e-9);
    let tr = curve::trace(&near, 1, 32, &cfg()).unwrap();
    let report = verify::killing_norm(&tr);
    assert!(report.passed);
    let min: f64 = report.metadata["min_norm"].parse().unwrap();
    let kc = scalar::kappa_c(1.5).unwrap();
    // κ spreads like √(a − a_*) around κ_c
    assert!((min - (0.5f64).powi(2) * kc.powf(3.0)).abs() < 1e-3, "{min}");
}

#[test]
fn momentum_on_circles_and_sign_of_norm() {
    for (p, sp) in [(1.5, H2), (2.0, H2), (-1.0, H12), (-3.0, H12)] {
        let c = curve::circle(p, sp).unwrap();
        let r = verify::circle_momentum(&c, 64).unwrap();
        assert!(r.passed && r.max_residual < 1e-12, "{r:?}");
    }
    for (p, sp) in [(7.0, H2), (-0.5, H12)] {
        let pr = params(p, sp, 0.5);
        let tr = curve::trace(&pr, 1, 128, &cfg()).unwrap();
        let frames = verify::fd_frames(&tr, verify::fd_step(&tr));
        let r = verify::momentum(&frames, &pr);
        assert!(r.passed, "{r:?}");
        assert!(r.metadata["xi_norm"].parse::<f64>().unwrap() < 0.0);
        assert_eq!(r.metadata["variant"], "lorentzian");
    }
}

#[test]
fn limit_checks_for_p2_and_pm1_and_closed_form() {
    for (p, sp) in [(2.0, H2), (-1.0, H12), (1.5, H2)] {
        let r = verify::limit_checks(p, sp, &cfg()).unwrap();
        assert!(r.passed, "{r:?}");
    }
    let r = verify::limit_checks(1.5, H2, &cfg()).unwrap();
    assert!(r.metadata["closed_form_max_rel"].parse::<f64>().unwrap() < 1e-9);
    let t = verify::limit_table(2.0, H2, &cfg()).unwrap();
    assert!((t.near_star[4] - SQRT_2 * PI).abs() < 5e-3);
}

#[test]
fn scan_for_p7_reports_flags() {
    let t = verify::monotonicity_scan(7.0, H2, 64, &cfg()).unwrap();
    assert_eq!(t.rows.len(), 64);
    assert!(t.rows[0].decreasing.is_none() && t.rows.iter().skip(1).all(|r| r.decreasing.is_some()));
    assert!(t.rows.iter().all(|r| r.closed_form.is_none()));
    assert!(verify::monotonicity_scan(7.0, H2, 8, &cfg()).is_err());
}

#[test]
fn ode_drift_over_ten_periods() {
    let pr = ElasticaParams::new(H2, 2.0, -1.0).unwrap();
    let rho = quadrature::period(&pr, &cfg()).unwrap();
    let sol = verify::ode_oracle(&pr, 10.0 * rho, rho / 8192.0).unwrap();
    assert!(sol.max_drift < 1e-6);
    let per = verify::ode_period(&pr, &sol).unwrap();
    assert!((per - rho).abs() < 1e-7 * rho);
}

#[test]
fn ode_matches_trace_for_de_sitter() {
    let pr = ElasticaParams::new(H12, -1.0, -1.0).unwrap();
    let tr = curve::trace(&pr, 1, 256, &cfg()).unwrap();
    let rs = verify::ode_cross_check(&tr, 2, 4).unwrap();
    assert!(named(&rs, "ode_profile").max_residual < 1e-7);
    assert!(named(&rs, "ode_period").passed);
}

#[test]
fn suite_passes_and_perturbed_suite_fails() {
    let pr = params(2.0, H2, 0.5);
    let opts = verify::SuiteOptions { samples: 128, perturb: false };
    let rs = verify::run_suite(&pr, opts, &cfg()).unwrap();
    assert!(rs.iter().all(|r| r.passed), "{:?}", rs.iter().filter(|r| !r.passed).collect::<Vec<_>>());
    assert!(rs.iter().any(|r| r.check_name.ends_with("_negative_control")));
    let rs = verify::run_suite(&pr, verify::SuiteOptions { perturb: true, ..opts }, &cfg()).unwrap();
    for name in ["conservation", "euler_lagrange", "killing_norm"] {
        assert!(!named(&rs, name).passed, "{name} should fail under perturbation");
    }
}

#[test]
fn reports_are_reproducible() {
    let pr = params(-1.0, H12, 0.3);
    let tr = curve::trace(&pr, 1, 64, &cfg()).unwrap();
    let a = verify::trace_checks(&tr, &cfg()).unwrap();
    let b = verify::trace_checks(&tr, &cfg()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn energy_scan_matches_direct_energy() {
    let fr = verify::scan_fractions(16);
    let rows = verify::energy_scan(1.5, H2, 2, &fr, &cfg()).unwrap();
    for (a, e) in rows {
        let want = pelastica::elliptic::theta_32_closed(a, 2).unwrap();
        assert!((e - want).abs() / want < 1e-9);
    }
}
