//! Tests for triplet construction, log-moment machinery, the closed-form
//! weights, the convolution-root profile, the limiting-class surrogate
//! and the classification ladder, against elementary oracles.

use selfdec::classify::{
    a_psi_sdn, bondesson_eta, check_log_integrability, chi_h, classify_sd, gamma_triplet,
    log_moment_weight, loggamma_triplet, sd_infinity_surrogate, stable_triplet, LevyTriplet,
    TripletKind, MAX_N_MAX,
};
use selfdec::kernels::AlphaWeights;
use selfdec::theta::Verdict;
use selfdec::{GridSpec, ScalarFunction, Spacing};

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    let scale = 1.0 + want.abs();
    assert!(
        (got - want).abs() <= tol * scale,
        "{what}: got {got}, want {want} (tol {tol})"
    );
}

fn test_grid() -> GridSpec {
    GridSpec::new(1e-4, 1e4, 512, Spacing::Log).unwrap()
}

#[test]
fn log_moment_weight_branches_and_continuity() {
    // y < 1: y^l / l^{n+1}
    assert_close(log_moment_weight(2, 1, 0.5).unwrap(), 0.5, 1e-14, "l=1 below");
    assert_close(log_moment_weight(2, 2, 0.5).unwrap(), 0.25 / 8.0, 1e-14, "l=2 below");
    // continuity across y = 1
    for (n, l) in [(0, 1), (1, 1), (3, 2)] {
        let below = log_moment_weight(n, l, 1.0 - 1e-12).unwrap();
        let above = log_moment_weight(n, l, 1.0 + 1e-12).unwrap();
        assert_close(below, above, 1e-9, "continuity at 1");
    }
    // y >= 1 closed form at y = e: log = 1
    // n=1, l=1: 1/2! + (1 + 1) = 2.5
    assert_close(log_moment_weight(1, 1, std::f64::consts::E).unwrap(), 2.5, 1e-12, "at e");
    assert!(log_moment_weight(1, 3, 1.0).is_err());
    assert!(log_moment_weight(1, 1, 0.0).is_err());
    assert!(log_moment_weight(61, 1, 1.0).is_err());
}

#[test]
fn log_integrability_separates_decay_from_log_divergence() {
    // rho = e^{-y}: every log moment is finite
    let decay = ScalarFunction::new("exp(-y)", |y: f64| (-y).exp());
    assert!(check_log_integrability(&decay, 1, 1).unwrap());
    assert!(check_log_integrability(&decay, 0, 2).unwrap());

    // rho = 1/(y (1 + log^2 y)): the order-1 weight grows like log^2(y)/2,
    // so the weighted tail decays only like 1/(2y) and the integral diverges
    let marginal = ScalarFunction::new("1/(y (1 + log^2 y))", |y: f64| {
        1.0 / (y * (1.0 + y.ln().powi(2)))
    });
    assert!(!check_log_integrability(&marginal, 1, 1).unwrap());
    assert!(check_log_integrability(&decay, 1, 3).is_err());
}

#[test]
fn a_psi_weight_branches() {
    // u <= 1: u/(n+1)!; u > 1: log^{n+1}(u)/(n+1)!
    assert_close(a_psi_sdn(1, 0.5).unwrap(), 0.25, 1e-14, "below 1");
    let e2 = (2.0_f64).exp();
    assert_close(a_psi_sdn(1, e2).unwrap(), 2.0, 1e-12, "above 1");
    // the weight jumps at 1: left value 1/(n+1)!, right limit 0
    assert_close(a_psi_sdn(1, 1.0).unwrap(), 0.5, 1e-14, "left value");
    assert!(a_psi_sdn(1, 1.0 + 1e-9).unwrap() < 1e-15);
    assert!(a_psi_sdn(1, 0.0).is_err());
    assert!(a_psi_sdn(61, 2.0).is_err());
}

#[test]
fn chi_h_follows_the_two_branch_form() {
    let h = ScalarFunction::new("log1p", |u: f64| u.ln_1p());
    // x0 = 1: the slope is x0 h'(x0) = 1/2, and the two branches meet at x0
    let chi = chi_h(0.5, 1.0, &h).unwrap();
    assert_close(chi.eval(0.5), 0.25, 1e-14, "linear branch");
    assert_close(chi.eval(1.0), 0.5, 1e-14, "at x0");
    assert_close(
        chi.eval(3.0),
        (4.0_f64).ln() - (2.0_f64).ln() + 0.5,
        1e-14,
        "upper branch",
    );

    // x0 = 2: the slope x0 h'(x0) makes the branches disagree at x0
    // (left limit 2 * 2/3, right value 2/3) -- the jump is part of the
    // definition, not smoothed away
    let hp2 = 1.0 / 3.0;
    let chi2 = chi_h(hp2, 2.0, &h).unwrap();
    assert_close(chi2.eval(2.0 - 1e-12), 4.0 / 3.0, 1e-9, "left limit");
    assert_close(chi2.eval(2.0), 2.0 / 3.0, 1e-12, "right value");

    // x0 = 0 collapses to h(u) - h(0)
    let chi0 = chi_h(1.0, 0.0, &h).unwrap();
    for u in [0.1, 1.0, 7.0] {
        assert_close(chi0.eval(u), u.ln_1p(), 1e-14, "x0 = 0");
    }
    assert!(chi_h(1.0, -0.5, &h).is_err());
    assert!(chi_h(f64::NAN, 1.0, &h).is_err());
}

#[test]
fn chi_h_is_the_identity_for_linear_h() {
    // h = id, x0 = 1: both branches reduce to u
    let h = ScalarFunction::new("id", |u: f64| u);
    let chi = chi_h(1.0, 1.0, &h).unwrap();
    for u in [0.2, 1.0, 5.0] {
        assert_close(chi.eval(u), u, 1e-14, "identity");
    }
}

#[test]
fn bondesson_eta_profile_is_a_probability_weight() {
    let a = AlphaWeights::new(&[0.3, 0.7]).unwrap();
    let grid = GridSpec::new(0.01, 100.0, 400, Spacing::Log).unwrap();
    let rep = bondesson_eta(&a, 1.5, &grid).unwrap();
    assert_eq!(rep.xs.len(), rep.eta.len());
    assert!(rep.max_eta <= 1.0 && rep.max_eta >= 0.0);
    for (x, e) in rep.xs.iter().zip(&rep.eta) {
        assert!((0.0..=1.0).contains(e), "eta({x}) = {e}");
        if *x < 1.5 {
            assert_eq!(*e, 0.0, "eta must vanish below t");
        }
    }
    // below t = 1 the convolution-root bound is not established
    assert!(bondesson_eta(&a, 0.5, &grid).is_err());
}

#[test]
fn surrogate_flags_exponential_and_accepts_power_laws() {
    let grid = test_grid();
    let exp = ScalarFunction::new("exp(-x)", |x: f64| (-x).exp());
    let cert = sd_infinity_surrogate(&exp, 4, &grid).unwrap();
    assert_eq!(cert.verdict, Verdict::NonMember);
    assert!(cert.failed_order.unwrap() >= 2);
    assert!(cert.witness.is_some());

    let pow = ScalarFunction::new("x^-0.4", |x: f64| x.powf(-0.4));
    let cert = sd_infinity_surrogate(&pow, 12, &grid).unwrap();
    assert_eq!(cert.verdict, Verdict::Member);
    assert!(cert.margin >= -1e-9);

    assert!(sd_infinity_surrogate(&pow, 0, &grid).is_err());
    assert!(sd_infinity_surrogate(&pow, 21, &grid).is_err());
}

#[test]
fn triplet_constructors_validate_their_base_conditions() {
    // negative drift, negative gaussian, sign-changing density
    let ok = ScalarFunction::new("x^-0.5", |x: f64| x.powf(-0.5));
    assert!(LevyTriplet::subordinator(-1.0, ok.clone()).is_err());
    let wavy = ScalarFunction::new("sin", f64::sin);
    assert!(LevyTriplet::subordinator(0.0, wavy.clone()).is_err());
    assert!(LevyTriplet::laplace_exponent(0.0, -0.1, ok.clone()).is_err());

    // k = 1/x fails int_0^1 k for the subordinator kind but passes the
    // small-end condition of the Laplace-exponent kind (and then fails
    // its large-end one)
    let inv = ScalarFunction::new("1/x", |x: f64| 1.0 / x);
    let sub_err = LevyTriplet::subordinator(0.0, inv.clone()).unwrap_err();
    assert!(sub_err.to_string().contains("int_0^1"), "{sub_err}");
    let le_err = LevyTriplet::laplace_exponent(0.0, 0.0, inv).unwrap_err();
    assert!(le_err.to_string().contains("int_1^inf"), "{le_err}");

    // x^{-1/2} satisfies both subordinator conditions
    let tr = LevyTriplet::subordinator(0.25, ok).unwrap();
    assert_eq!(tr.kind(), TripletKind::Subordinator);
    assert_eq!(tr.drift(), 0.25);
    assert_eq!(tr.gaussian(), 0.0);
}

#[test]
fn gamma_law_is_order_zero_exactly() {
    let tr = gamma_triplet().unwrap();
    let v = classify_sd(&tr, 8, &test_grid(), 1e-9).unwrap();
    assert_eq!(v.kind, TripletKind::Subordinator);
    assert_eq!(v.max_verified_n, 0);
    // ladder stopped after the order-1 failure
    assert_eq!(v.per_order.len(), 2);
    assert_eq!(v.per_order[0].verdict, Verdict::Member);
    assert_eq!(v.per_order[1].verdict, Verdict::NonMember);
    assert_eq!(v.per_order[1].failed_order, Some(2));
    let w = v.per_order[1].witness.unwrap();
    assert!((0.1..1.0).contains(&w), "witness {w}");
    assert!(v.integrability_ok.iter().all(|&b| b));
    // e^{-e^y} is not completely monotone on the log axis
    assert_eq!(v.sd_infinity_evidence, Verdict::NonMember);
}

#[test]
fn stable_law_passes_every_order() {
    let tr = stable_triplet(0.6).unwrap();
    let v = classify_sd(&tr, 6, &test_grid(), 1e-9).unwrap();
    assert_eq!(v.max_verified_n, 6);
    assert_eq!(v.per_order.len(), 7);
    assert!(v.per_order.iter().all(|c| c.verdict == Verdict::Member));
    assert!(v.integrability_ok.iter().all(|&b| b));
    assert_eq!(v.sd_infinity_evidence, Verdict::Member);
    assert!(stable_triplet(1.0).is_err());
    assert!(stable_triplet(0.0).is_err());
}

#[test]
fn loggamma_law_keeps_first_order_above_the_threshold() {
    let tr = loggamma_triplet(0.9).unwrap();
    let v = classify_sd(&tr, 1, &test_grid(), 1e-9).unwrap();
    assert_eq!(v.kind, TripletKind::LaplaceExponent);
    assert!(v.max_verified_n >= 1, "got {}", v.max_verified_n);
    // the Laplace-exponent criterion does not impose per-order log moments
    assert!(v.integrability_ok.iter().all(|&b| b));
    assert!(v.notes[0].contains("laplace_exponent"));
}

#[test]
fn loggamma_law_below_threshold_fails_first_order_near_the_maximizer() {
    let tr = loggamma_triplet(0.12).unwrap();
    let v = classify_sd(&tr, 1, &test_grid(), 1e-9).unwrap();
    assert_eq!(v.max_verified_n, 0);
    assert_eq!(v.per_order[1].verdict, Verdict::NonMember);
    assert_eq!(v.per_order[1].failed_order, Some(2));
    let w = v.per_order[1].witness.unwrap();
    assert!((3.0..12.0).contains(&w), "witness {w} not in the violation region");
}

#[test]
fn classify_caps_and_propagates_errors() {
    let tr = gamma_triplet().unwrap();
    assert!(classify_sd(&tr, MAX_N_MAX + 1, &test_grid(), 1e-9).is_err());
    assert!(classify_sd(&tr, 1, &test_grid(), -1.0).is_err());
}
