//! Oracle tests for quadrature, root finding and maximization, against
//! integrals and extrema with elementary closed forms.

use proptest::prelude::*;
use selfdec::numerics::{find_root, frullani, integrate, maximize};

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    let scale = 1.0 + want.abs();
    assert!(
        (got - want).abs() <= tol * scale,
        "{what}: got {got}, want {want} (tol {tol})"
    );
}

#[test]
fn finite_interval_smooth() {
    // int_0^pi sin = 2
    let r = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
    assert_close(r.value, 2.0, 1e-11, "int sin");
    assert!(r.evaluations > 0);
    assert!(r.error_estimate.is_finite());
}

#[test]
fn finite_interval_endpoint_singularities() {
    // int_0^1 x^{-1/2} = 2 (integrable singularity at 0)
    let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
    assert_close(r.value, 2.0, 1e-10, "int x^-1/2");
    // int_0^1 ln x = -1
    let r = integrate(f64::ln, 0.0, 1.0, 1e-12).unwrap();
    assert_close(r.value, -1.0, 1e-10, "int ln");
    // int_0^1 ln(x)/sqrt(x) = -4 (combined)
    let r = integrate(|x: f64| x.ln() / x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
    assert_close(r.value, -4.0, 1e-9, "int ln/sqrt");
}

#[test]
fn half_line_integrals() {
    // int_0^inf e^{-x} = 1
    let r = integrate(|x: f64| (-x).exp(), 0.0, f64::INFINITY, 1e-12).unwrap();
    assert_close(r.value, 1.0, 1e-11, "int exp");
    // int_0^inf e^{-x^2} = sqrt(pi)/2
    let r = integrate(|x: f64| (-x * x).exp(), 0.0, f64::INFINITY, 1e-12).unwrap();
    assert_close(r.value, std::f64::consts::PI.sqrt() / 2.0, 1e-11, "int gaussian");
    // int_1^inf x^{-2} = 1 (shifted origin)
    let r = integrate(|x: f64| x.powi(-2), 1.0, f64::INFINITY, 1e-12).unwrap();
    assert_close(r.value, 1.0, 1e-11, "int x^-2");
    // int_0^inf u/(e^u - 1) du = pi^2/6
    let r = integrate(|u: f64| u / u.exp_m1(), 0.0, f64::INFINITY, 1e-12).unwrap();
    assert_close(r.value, std::f64::consts::PI.powi(2) / 6.0, 1e-10, "int u/(e^u-1)");
}

#[test]
fn integrate_rejects_bad_input() {
    assert!(integrate(|x| x, 1.0, 0.0, 1e-10).is_err());
    assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
    assert!(integrate(|x| x, f64::NAN, 1.0, 1e-10).is_err());
}

#[test]
fn frullani_matches_limit_formula() {
    // int (g(x) - g(x/c))/x dx = (g(inf) - g(0+)) ln c for g = e^{-x}:
    // = -ln c
    for c in [0.25, 0.5, 0.9] {
        let v = frullani(|x: f64| (-x).exp(), c, 1e-12).unwrap();
        assert_close(v, -c.ln(), 1e-9, "frullani exp");
    }
    assert!(frullani(|x: f64| (-x).exp(), 1.0, 1e-10).is_err());
    assert!(frullani(|x: f64| (-x).exp(), -0.5, 1e-10).is_err());
}

#[test]
fn find_root_brackets() {
    let r = find_root(f64::cos, 1.0, 2.0, 1e-15).unwrap();
    assert_close(r, std::f64::consts::FRAC_PI_2, 1e-14, "root of cos");
    // sinh(x/2) - x has a root near 4.35 in (1, 10)
    let r = find_root(|x: f64| (x / 2.0).sinh() - x, 1.0, 10.0, 1e-14).unwrap();
    assert!((4.3 ..4.4).contains(&r));
    // no sign change
    assert!(find_root(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
}

#[test]
fn maximize_finds_global_max_on_scan() {
    let (x, v) = maximize(|x: f64| 3.0 - (x - 2.0) * (x - 2.0), 0.0, 5.0, 1e-12).unwrap();
    assert_close(x, 2.0, 1e-7, "argmax parabola");
    assert_close(v, 3.0, 1e-12, "max parabola");
    // two humps: global at x ~ 4.6 (right hump taller)
    let f = |x: f64| (-(x - 1.0) * (x - 1.0)).exp() + 1.2 * (-(x - 4.6) * (x - 4.6)).exp();
    let (x, v) = maximize(f, 0.0, 8.0, 1e-12).unwrap();
    assert!((x - 4.6).abs() < 1e-4, "picked the taller hump, got {x}");
    assert!(v > 1.19);
}

proptest! {
    // additivity: int_a^b + int_b^c = int_a^c for smooth integrands
    #[test]
    fn integrate_is_additive(split in 0.1_f64..0.9) {
        let f = |x: f64| (x * 1.3).sin() + 2.0;
        let left = integrate(f, 0.0, split, 1e-11).unwrap().value;
        let right = integrate(f, split, 1.0, 1e-11).unwrap().value;
        let whole = integrate(f, 0.0, 1.0, 1e-11).unwrap().value;
        prop_assert!((left + right - whole).abs() < 1e-9);
    }

    // the maximize pair is consistent: f(argmax) == max
    #[test]
    fn maximize_pair_consistent(shift in -2.0_f64..2.0) {
        let f = move |x: f64| -(x - shift) * (x - shift);
        let (x, v) = maximize(f, -4.0, 4.0, 1e-10).unwrap();
        prop_assert!((f(x) - v).abs() < 1e-12);
    }
}
