//! Oracle tests for the operator layer: theta_c differences, Theta^n
//! expansions, membership certificates, finite-order complete
//! monotonicity, and the Hadamard-type transform pair.

use proptest::prelude::*;
use selfdec::theta::{
    big_theta_n, big_theta_n_fd, cm_check, hadamard_invert_check, hadamard_transform, is_mn,
    theta_c, HadamardDensity, Verdict, FD_MAX_ORDER,
};
use selfdec::{GridSpec, ScalarFunction, Spacing};

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    let scale = 1.0 + want.abs();
    assert!(
        (got - want).abs() <= tol * scale,
        "{what}: got {got}, want {want} (tol {tol})"
    );
}

/// x^p with exact derivatives attached through order 10.
fn power_law(p: f64) -> ScalarFunction {
    let mut f = ScalarFunction::new(format!("x^{p}"), move |x: f64| x.powf(p));
    let mut coef = 1.0;
    for j in 0..10 {
        coef *= p - j as f64;
        let e = p - (j + 1) as f64;
        f = f.with_derivative(move |x: f64| coef * x.powf(e));
    }
    f
}

/// e^{-x} with exact derivatives attached through order 4.
fn exp_decay() -> ScalarFunction {
    let mut f = ScalarFunction::new("exp(-x)", |x: f64| (-x).exp());
    for j in 1..=4 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        f = f.with_derivative(move |x: f64| sign * (-x).exp());
    }
    f
}

fn test_grid() -> GridSpec {
    GridSpec::new(1e-3, 1e3, 256, Spacing::Log).unwrap()
}

#[test]
fn theta_c_of_log_is_constant() {
    // ln(x) - ln(x/c) = ln c for every x
    let f = ScalarFunction::new("log", f64::ln);
    for c in [0.2, 0.5, 0.9] {
        let g = theta_c(&f, c).unwrap();
        for x in [0.01, 1.0, 42.0] {
            assert_close(g.eval(x), c.ln(), 1e-12, "theta_c(log)");
        }
    }
    assert!(theta_c(&f, 1.0).is_err());
    assert!(theta_c(&f, 0.0).is_err());
    assert!(theta_c(&f, 1.5).is_err());
}

#[test]
fn theta_c_propagates_derivatives() {
    let f = exp_decay();
    let c = 0.5;
    let g = theta_c(&f, c).unwrap();
    assert_eq!(g.derivative_order(), 4);
    // d/dx [f(x) - f(x/c)] = f'(x) - f'(x/c)/c
    let x = 1.3_f64;
    let want = -(-x).exp() + (-x / c).exp() / c;
    assert_close(g.derivative(1, x).unwrap(), want, 1e-12, "theta_c deriv");
}

#[test]
fn big_theta_eigenfunctions() {
    // Theta^n(x^p) = p^n x^p, for p of either sign. For negative p the
    // Stirling-weighted sum cancels falling factorials of size ~1e5 down
    // to p^n ~ 1e-4 at order 10, so accuracy there is cancellation-bound.
    for (p, n_max, tol) in [(2.5, 10, 1e-10), (-0.4, 5, 1e-10), (-0.4, 10, 1e-5)] {
        let f = power_law(p);
        for n in 0..=n_max {
            let g = big_theta_n(&f, n).unwrap();
            for x in [0.3, 1.7, 9.1] {
                assert_close(g.eval(x), p.powi(n as i32) * x.powf(p), tol, "eigen");
            }
        }
    }
}

#[test]
fn big_theta_requires_closed_form_derivatives() {
    let bare = ScalarFunction::new("opaque", |x: f64| (-x).exp());
    assert!(big_theta_n(&bare, 1).is_err());
    assert!(big_theta_n(&bare, 0).is_ok()); // order 0 is the identity
    assert!(big_theta_n_fd(&bare, FD_MAX_ORDER + 1).is_err());
}

#[test]
fn big_theta_frozen_values_and_fd_agreement() {
    // Theta^2(e^{-x}) = x(x-1)e^{-x}; Theta^3(e^{-x}) = x(-x^2+3x-1)e^{-x}
    let f = exp_decay();
    let t2 = big_theta_n(&f, 2).unwrap();
    assert_close(t2.eval(3.0), 6.0 * (-3.0_f64).exp(), 1e-12, "Theta^2 at 3");
    let t3 = big_theta_n(&f, 3).unwrap();
    assert_close(t3.eval(2.0), 0.270_670_566_473_225_4, 1e-12, "Theta^3 at 2");
    // finite differences reproduce the closed form
    let t3_fd = big_theta_n_fd(&f, 3).unwrap();
    for x in [0.4, 1.1, 2.0, 5.0] {
        assert_close(t3_fd.eval(x), t3.eval(x), 1e-6, "fd vs exact");
    }
}

#[test]
fn is_mn_accepts_exponential_at_order_one() {
    let cert = is_mn(&exp_decay(), 1, &test_grid(), 1e-9).unwrap();
    assert_eq!(cert.verdict, Verdict::Member);
    assert!(cert.failed_order.is_none());
    assert!(cert.witness.is_none());
    assert!(cert.margin >= -1e-9 && cert.margin <= 0.0);
}

#[test]
fn is_mn_rejects_exponential_at_order_two() {
    // Theta^2(e^{-x}) = x(x-1)e^{-x} < 0 on (0,1)
    let cert = is_mn(&exp_decay(), 2, &test_grid(), 1e-9).unwrap();
    assert_eq!(cert.verdict, Verdict::NonMember);
    assert_eq!(cert.failed_order, Some(2));
    let w = cert.witness.unwrap();
    assert!((0.2..0.7).contains(&w), "witness {w} outside the dip");
    assert!(cert.margin < -1e-9);
}

#[test]
fn is_mn_rejects_gaussian_at_order_two() {
    // Theta^2(e^{-x^2}) = 4x^2(x^2-1)e^{-x^2} < 0 on (0,1)
    let f = ScalarFunction::new("exp(-x^2)", |x: f64| (-x * x).exp())
        .with_derivative(|x: f64| -2.0 * x * (-x * x).exp())
        .with_derivative(|x: f64| (4.0 * x * x - 2.0) * (-x * x).exp());
    let cert = is_mn(&f, 2, &test_grid(), 1e-9).unwrap();
    assert_eq!(cert.verdict, Verdict::NonMember);
    assert_eq!(cert.failed_order, Some(2));
    assert!(cert.witness.unwrap() < 1.0);
}

#[test]
fn is_mn_accepts_power_law_beyond_fd_range() {
    // (-Theta)^m x^{-0.4} = 0.4^m x^{-0.4} > 0; order 6 exceeds the FD
    // fallback, so the difference path decides alone
    let f = ScalarFunction::new("x^-0.4", |x: f64| x.powf(-0.4));
    let cert = is_mn(&f, 6, &test_grid(), 1e-9).unwrap();
    assert_eq!(cert.verdict, Verdict::Member);
    assert!(cert.margin >= -1e-9);
}

#[test]
fn is_mn_accepts_power_mixture() {
    let f = ScalarFunction::new("mixture", |x: f64| {
        0.5 * x.powf(-0.2) + 0.5 * x.powf(-0.7)
    });
    let cert = is_mn(&f, 4, &test_grid(), 1e-9).unwrap();
    assert_eq!(cert.verdict, Verdict::Member);
}

#[test]
fn is_mn_flags_disagreeing_paths() {
    // claimed derivative has the wrong sign: the derivative path sees a
    // violation the difference path cannot, so the verdict must not be
    // trusted either way
    let f = ScalarFunction::new("lying", |x: f64| (-x).exp()).with_derivative(|x: f64| (-x).exp());
    let cert = is_mn(&f, 1, &test_grid(), 1e-9).unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert_eq!(cert.failed_order, Some(1));
    assert!(cert.witness.is_some());
}

#[test]
fn is_mn_rejects_bad_arguments() {
    let f = exp_decay();
    assert!(is_mn(&f, 0, &test_grid(), 1e-9).is_err());
    assert!(is_mn(&f, 1, &test_grid(), 0.0).is_err());
}

#[test]
fn cm_check_accepts_exponential() {
    let f = ScalarFunction::new("exp(-l)", |l: f64| (-l).exp());
    let grid = GridSpec::new(0.01, 10.0, 200, Spacing::Log).unwrap();
    let cert = cm_check(&f, 6, &grid, 1e-9).unwrap();
    assert_eq!(cert.verdict, Verdict::Member);
    // high-order differences at tiny steps sit below the roundoff floor,
    // so the margin may be a hair under zero but never past the tolerance
    assert!(cert.margin >= -1e-12 && cert.margin <= 0.0);
    assert!(cert.failed_order.is_none());
}

#[test]
fn cm_check_catches_non_monotone_second_difference() {
    // f = (1+l)e^{-l} is decreasing but f'' = (l-1)e^{-l} < 0 below 1:
    // completely monotone it is not, and differences of order >= 2 see it
    let f = ScalarFunction::new("(1+l)exp(-l)", |l: f64| (1.0 + l) * (-l).exp());
    let grid = GridSpec::new(0.01, 10.0, 200, Spacing::Log).unwrap();
    let cert = cm_check(&f, 6, &grid, 1e-9).unwrap();
    assert_eq!(cert.verdict, Verdict::NonMember);
    assert!(cert.failed_order.unwrap() >= 2);
    assert!(cert.witness.unwrap() < 2.0);
    assert!(cert.margin < 0.0);
}

#[test]
fn cm_check_rejects_bad_grid() {
    let f = ScalarFunction::new("exp(-l)", |l: f64| (-l).exp());
    let bad = GridSpec::new(-1.0, 1.0, 10, Spacing::Linear);
    assert!(bad.is_err() || cm_check(&f, 2, &bad.unwrap(), 1e-9).is_err());
    let grid = GridSpec::new(0.1, 1.0, 10, Spacing::Linear).unwrap();
    assert!(cm_check(&f, 2, &grid, -1.0).is_err());
}

#[test]
fn hadamard_point_mass_closed_form() {
    // T_1[delta_1] = 1 on (0,1], 0 elsewhere
    let t1 = hadamard_transform(&HadamardDensity::PointMassAtOne, 1, 1e-10).unwrap();
    assert_close(t1.eval(0.5), 1.0, 1e-12, "T1 delta inside");
    assert_close(t1.eval(1.0), 1.0, 1e-12, "T1 delta at 1");
    assert_close(t1.eval(1.5), 0.0, 1e-12, "T1 delta outside");
    assert_close(t1.eval(0.0), 0.0, 1e-12, "T1 delta at 0");
    // T_3[delta_1](x) = log^2(1/x)/2
    let t3 = hadamard_transform(&HadamardDensity::PointMassAtOne, 3, 1e-10).unwrap();
    assert_close(t3.eval(0.25), 0.960_906_027_836_402_8, 1e-12, "T3 delta");
}

#[test]
fn hadamard_indicator_oracle() {
    // T_n[1_{(0,1]}](x) = log^n(1/x)/n! for x <= 1. The jump in the
    // density caps the per-point quadrature near 1e-3, so the closed form
    // is only checked to that resolution.
    let ind = ScalarFunction::new("indicator", |y: f64| if y > 0.0 && y <= 1.0 { 1.0 } else { 0.0 });
    let t1 = hadamard_transform(&HadamardDensity::Function(ind.clone()), 1, 1e-3).unwrap();
    assert_close(t1.eval(0.3), (1.0_f64 / 0.3).ln(), 2e-3, "T1 indicator");
    let t2 = hadamard_transform(&HadamardDensity::Function(ind), 2, 1e-3).unwrap();
    assert_close(t2.eval(0.5), 0.240_226_506_959_100_62, 2e-3, "T2 indicator");
    assert_close(t2.eval(2.0), 0.0, 1e-10, "T2 indicator outside");
}

#[test]
fn hadamard_stable_eigenfunction() {
    // T_n[y^{-a}](x) = x^{-a}/a^n: scaling by a^n makes it a fixed point
    let a = 0.6_f64;
    let k = ScalarFunction::new("y^-0.6", move |y: f64| y.powf(-a));
    let t3 = hadamard_transform(&HadamardDensity::Function(k.clone()), 3, 1e-10).unwrap();
    for x in [0.5, 1.0, 2.0] {
        assert_close(t3.eval(x), x.powf(-a) / a.powi(3), 1e-6, "T3 stable");
    }
    // scaled round trip without differentiation: T_3[a^3 k] = k
    let scaled = ScalarFunction::new("scaled", move |y: f64| a.powi(3) * y.powf(-a));
    let t3s = hadamard_transform(&HadamardDensity::Function(scaled), 3, 1e-10).unwrap();
    for x in [0.5, 1.0, 2.0] {
        assert_close(t3s.eval(x), k.eval(x), 1e-6, "scaled round trip");
    }
}

#[test]
fn hadamard_inversion_round_trip() {
    // (-1)^n Theta^n T_n[m] = m, checked by finite differences
    let m = ScalarFunction::new("exp(-y)", |y: f64| (-y).exp());
    let grid = GridSpec::new(0.5, 2.0, 9, Spacing::Log).unwrap();
    let dev = hadamard_invert_check(&m, 2, &grid, 1e-10).unwrap();
    assert!(dev < 1e-4, "round-trip deviation {dev}");
    assert!(hadamard_invert_check(&m, FD_MAX_ORDER + 1, &grid, 1e-10).is_err());
}

#[test]
fn hadamard_rejects_divergent_tail() {
    // a constant density makes int log^{n-1}(y)/y dy diverge for every n
    let flat = ScalarFunction::new("const", |_| 1.0);
    assert!(hadamard_transform(&HadamardDensity::Function(flat), 1, 1e-8).is_err());
    assert!(hadamard_transform(&HadamardDensity::PointMassAtOne, 0, 1e-8).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // power laws are members at every order, with a clean margin
    #[test]
    fn power_laws_are_members(p in 0.05_f64..0.95, n in 1u32..4) {
        let f = ScalarFunction::new("x^-p", move |x: f64| x.powf(-p));
        let grid = GridSpec::new(1e-2, 1e2, 64, Spacing::Log).unwrap();
        let cert = is_mn(&f, n, &grid, 1e-9).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::Member);
        prop_assert!(cert.margin >= -1e-9 && cert.margin <= 0.0);
    }
}
