//! Oracle tests for the special-function layer: frozen reference values
//! computed independently (classical closed forms), plus recurrence
//! properties over random inputs.

use proptest::prelude::*;
use selfdec::specialfn::{
    digamma, log_gamma, q_gamma, stirling, StirlingKind, StirlingTable, BERNOULLI_2K,
    STIRLING_MAX_ORDER,
};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    let scale = 1.0 + want.abs();
    assert!(
        (got - want).abs() <= tol * scale,
        "{what}: got {got}, want {want} (tol {tol})"
    );
}

#[test]
fn log_gamma_frozen_values() {
    // Gamma(1/2) = sqrt(pi), Gamma(1) = Gamma(2) = 1, Gamma(10) = 362880
    assert_close(log_gamma(0.5).unwrap(), 0.572_364_942_924_700_1, 1e-14, "lgamma(0.5)");
    assert_close(log_gamma(1.0).unwrap(), 0.0, 1e-14, "lgamma(1)");
    assert_close(log_gamma(2.0).unwrap(), 0.0, 1e-14, "lgamma(2)");
    assert_close(log_gamma(10.0).unwrap(), 12.801_827_480_081_469, 1e-14, "lgamma(10)");
    // Gamma(4.5) = 11.631728396567448
    assert_close(log_gamma(4.5).unwrap(), 11.631_728_396_567_448_f64.ln(), 1e-14, "lgamma(4.5)");
    // large argument against Stirling-dominated regime: Gamma(171) finite
    assert!(log_gamma(171.0).unwrap().is_finite());
    assert!(log_gamma(0.0).is_err());
    assert!(log_gamma(-1.5).is_err());
}

#[test]
fn digamma_frozen_values() {
    assert_close(digamma(1.0).unwrap(), -EULER_GAMMA, 1e-13, "psi(1)");
    // psi(1/2) = -gamma - 2 ln 2
    assert_close(
        digamma(0.5).unwrap(),
        -EULER_GAMMA - 2.0 * std::f64::consts::LN_2,
        1e-13,
        "psi(1/2)",
    );
    assert_close(digamma(2.0).unwrap(), 1.0 - EULER_GAMMA, 1e-13, "psi(2)");
    assert!(digamma(0.0).is_err());
}

#[test]
fn q_gamma_frozen_values() {
    // Gamma_q(1) = Gamma_q(2) = 1 on both branches
    for q in [0.3, 0.9, 1.7, 4.0] {
        assert_close(q_gamma(1.0, q).unwrap(), 1.0, 1e-12, "q_gamma(1)");
        assert_close(q_gamma(2.0, q).unwrap(), 1.0, 1e-12, "q_gamma(2)");
    }
    // Gamma_q(3) = 1 + q (the q-factorial of 2)
    assert_close(q_gamma(3.0, 0.5).unwrap(), 1.5, 1e-12, "q_gamma(3;0.5)");
    assert_close(q_gamma(3.0, 2.0).unwrap(), 3.0, 1e-10, "q_gamma(3;2)");
    // q-factorial of 3 at q=2: [3]_2 [2]_2 = 7 * 3
    assert_close(q_gamma(4.0, 2.0).unwrap(), 21.0, 1e-10, "q_gamma(4;2)");
    assert!(q_gamma(1.0, 1.0).is_err());
    assert!(q_gamma(-1.0, 0.5).is_err());
}

proptest! {
    // ln Gamma(x+1) - ln Gamma(x) = ln x
    #[test]
    fn log_gamma_recurrence(x in 0.05_f64..50.0) {
        let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        prop_assert!((lhs - x.ln()).abs() < 1e-11 * (1.0 + x.ln().abs()));
    }

    // psi(x+1) = psi(x) + 1/x
    #[test]
    fn digamma_recurrence(x in 0.05_f64..50.0) {
        let lhs = digamma(x + 1.0).unwrap();
        let rhs = digamma(x).unwrap() + 1.0 / x;
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()));
    }

    // Gamma_q(x+1) = (1-q^x)/(1-q) Gamma_q(x) for q in (0,1)
    #[test]
    fn q_gamma_recurrence(x in 0.2_f64..8.0, q in 0.05_f64..0.95) {
        let lhs = q_gamma(x + 1.0, q).unwrap();
        let rhs = (1.0 - q.powf(x)) / (1.0 - q) * q_gamma(x, q).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }
}

#[test]
fn stirling_frozen_values() {
    // classical small tables
    assert_eq!(stirling(5, 2, StirlingKind::Second).unwrap(), 15);
    assert_eq!(stirling(5, 3, StirlingKind::Second).unwrap(), 25);
    assert_eq!(stirling(6, 3, StirlingKind::Second).unwrap(), 90);
    assert_eq!(stirling(5, 2, StirlingKind::First).unwrap(), 50);
    assert_eq!(stirling(5, 3, StirlingKind::First).unwrap(), 35);
    assert_eq!(stirling(6, 3, StirlingKind::First).unwrap(), 225);
    // boundary cases
    assert_eq!(stirling(0, 0, StirlingKind::Second).unwrap(), 1);
    assert_eq!(stirling(7, 0, StirlingKind::Second).unwrap(), 0);
    assert_eq!(stirling(7, 7, StirlingKind::First).unwrap(), 1);
}

#[test]
fn stirling_table_rows_sum_correctly() {
    let table = StirlingTable::up_to(12).unwrap();
    // sum_m {n over m} = Bell(n); Bell(5) = 52, Bell(6) = 203
    let bell5: u128 = (0..=5).map(|m| table.second(5, m).unwrap()).sum();
    assert_eq!(bell5, 52);
    let bell6: u128 = (0..=6).map(|m| table.second(6, m).unwrap()).sum();
    assert_eq!(bell6, 203);
    // sum_m [n over m] = n!
    let f5: u128 = (0..=5).map(|m| table.first(5, m).unwrap()).sum();
    assert_eq!(f5, 120);
    let f7: u128 = (0..=7).map(|m| table.first(7, m).unwrap()).sum();
    assert_eq!(f7, 5040);
}

#[test]
fn stirling_recurrences_hold_to_max_order() {
    let table = StirlingTable::up_to(STIRLING_MAX_ORDER).unwrap();
    for n in 1..=STIRLING_MAX_ORDER {
        for m in 1..=n {
            // {n,m} = m {n-1,m} + {n-1,m-1}
            let want = m as u128 * table.second(n - 1, m).unwrap_or(0)
                + table.second(n - 1, m - 1).unwrap();
            assert_eq!(table.second(n, m).unwrap(), want, "second ({n},{m})");
            // [n,m] = (n-1) [n-1,m] + [n-1,m-1]
            let want = (n as u128 - 1) * table.first(n - 1, m).unwrap_or(0)
                + table.first(n - 1, m - 1).unwrap();
            assert_eq!(table.first(n, m).unwrap(), want, "first ({n},{m})");
        }
    }
    assert!(StirlingTable::up_to(STIRLING_MAX_ORDER + 1).is_err());
}

#[test]
fn signed_first_kind_alternates() {
    let table = StirlingTable::up_to(6).unwrap();
    // s(n,m) = (-1)^{n-m} [n,m]; s(5,2) = -50
    assert_eq!(table.signed_first(5, 2).unwrap(), -50);
    assert_eq!(table.signed_first(5, 3).unwrap(), 35);
    assert_eq!(table.signed_first(6, 3).unwrap(), -225);
}

#[test]
fn bernoulli_table_frozen_values() {
    // B_2 = 1/6, B_4 = -1/30, B_6 = 1/42, B_8 = -1/30, B_10 = 5/66, B_12 = -691/2730
    assert_close(BERNOULLI_2K[0], 1.0 / 6.0, 1e-15, "B2");
    assert_close(BERNOULLI_2K[1], -1.0 / 30.0, 1e-15, "B4");
    assert_close(BERNOULLI_2K[2], 1.0 / 42.0, 1e-15, "B6");
    assert_close(BERNOULLI_2K[3], -1.0 / 30.0, 1e-15, "B8");
    assert_close(BERNOULLI_2K[4], 5.0 / 66.0, 1e-15, "B10");
    assert_close(BERNOULLI_2K[5], -691.0 / 2730.0, 1e-15, "B12");
}
