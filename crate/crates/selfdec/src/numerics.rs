//! Scalar quadrature, root finding and maximization.
//!
//! Integration uses double-exponential rules: tanh-sinh on finite
//! intervals, exp-sinh on (a, inf). Both tolerate integrable endpoint
//! singularities, which the kernel integrands have at 0. Levels are doubled
//! until two successive trapezoid refinements agree.

use std::cell::Cell;
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::{Error, Result};

/// Result of a quadrature call.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadResult {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error_estimate: f64,
    pub evaluations: u64,
}

const MAX_LEVEL: u32 = 12;

/// Integrate f over (a, b); b may be `f64::INFINITY`.
///
/// Convergence target: successive levels agree within tol * max(1, |I|).
///
/// # Errors
/// Domain error for a malformed interval or tolerance; numerics error when
/// the refinement stalls without reaching the tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !a.is_finite() || (b.is_finite() && a >= b) || b.is_nan() {
        return Err(Error::domain("integrate", format!("bad interval ({a}, {b})")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("integrate", format!("need tol > 0, got {tol}")));
    }
    if b.is_infinite() {
        exp_sinh(&f, a, tol)
    } else {
        tanh_sinh(&f, a, b, tol)
    }
}

/// tanh-sinh rule on the finite interval [a, b]:
/// x = c + d tanh(pi/2 sinh t), summed over t = j h with h halved per level.
fn tanh_sinh(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    // Beyond |t| ~ 6.6 the offset from the endpoint underflows.
    const T_MAX: f64 = 6.6;
    let evals = Cell::new(0u64);

    // Weighted pair of nodes at +-t; distances to the endpoints are formed
    // directly from e^{-2u} so nodes hug the endpoints without cancellation.
    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let em = (-2.0 * u).exp();
        let one_minus_s = 2.0 * em / (1.0 + em);
        let one_plus_s = 2.0 / (1.0 + em);
        let w = FRAC_PI_2 * t.cosh() * one_minus_s * one_plus_s;
        let off = d * one_minus_s;
        if off == 0.0 || w == 0.0 {
            return 0.0;
        }
        evals.set(evals.get() + 2);
        let vp = f(b - off);
        let vm = f(a + off);
        w * (vp + vm)
    };

    let mut h = 1.0_f64;
    evals.set(evals.get() + 1);
    let mut sum = FRAC_PI_2 * f(c);
    let mut j = 1;
    while j as f64 * h <= T_MAX {
        sum += node(j as f64 * h);
        j += 1;
    }
    let mut value = d * h * sum;
    let mut err = f64::INFINITY;
    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        // new nodes: odd multiples of the refined step
        let mut j = 1;
        while j as f64 * h <= T_MAX {
            sum += node(j as f64 * h);
            j += 2;
        }
        let refined = d * h * sum;
        err = (refined - value).abs();
        value = refined;
        if err <= tol * value.abs().max(1.0) {
            return Ok(QuadResult { value, error_estimate: err, evaluations: evals.get() });
        }
    }
    Err(Error::numerics(
        "integrate",
        format!("tanh-sinh did not reach tol {tol:e} on ({a}, {b}); last delta {err:e}"),
    ))
}

/// exp-sinh rule on (a, inf): x = a + exp(pi/2 sinh t), t over the whole
/// line. The left tail resolves an endpoint singularity at a, the right
/// tail the decay at infinity.
fn exp_sinh(f: &impl Fn(f64) -> f64, a: f64, tol: f64) -> Result<QuadResult> {
    const T_MAX: f64 = 6.7;
    let evals = Cell::new(0u64);

    let node = |t: f64| -> f64 {
        let r = (FRAC_PI_2 * t.sinh()).exp();
        if !r.is_finite() || r == 0.0 {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() * r;
        evals.set(evals.get() + 1);
        let fx = f(a + r);
        if fx == 0.0 {
            return 0.0;
        }
        w * fx
    };

    let mut h = 1.0_f64;
    let mut sum = node(0.0);
    let mut j = 1;
    while j as f64 * h <= T_MAX {
        sum += node(j as f64 * h) + node(-(j as f64) * h);
        j += 1;
    }
    let mut value = h * sum;
    let mut err = f64::INFINITY;
    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut j = 1;
        while j as f64 * h <= T_MAX {
            sum += node(j as f64 * h) + node(-(j as f64) * h);
            j += 2;
        }
        let refined = h * sum;
        err = (refined - value).abs();
        value = refined;
        if err <= tol * value.abs().max(1.0) {
            return Ok(QuadResult { value, error_estimate: err, evaluations: evals.get() });
        }
    }
    Err(Error::numerics(
        "integrate",
        format!("exp-sinh did not reach tol {tol:e} on ({a}, inf); last delta {err:e}"),
    ))
}

/// Frullani-type integral int_0^inf (g(x) - g(x/c)) / x dx.
///
/// For monotone g with finite limits this equals (g(inf) - g(0+)) ln c; the
/// function computes the integral itself so that identity can be tested.
///
/// # Errors
/// Domain error unless c > 0 and c != 1; propagates quadrature failures.
pub fn frullani(g: impl Fn(f64) -> f64, c: f64, tol: f64) -> Result<f64> {
    if !(c > 0.0) || c == 1.0 {
        return Err(Error::domain("frullani", format!("need c > 0, c != 1, got {c}")));
    }
    let integrand = |x: f64| (g(x) - g(x / c)) / x;
    Ok(integrate(integrand, 0.0, f64::INFINITY, tol)?.value)
}

const ROOT_MAX_ITER: usize = 200;

/// Brent's method on a bracketing interval [a, b] with f(a) f(b) <= 0.
///
/// # Errors
/// Domain error if the bracket is malformed or does not straddle a sign
/// change; numerics error if the iteration cap is hit.
pub fn find_root(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() || a >= b {
        return Err(Error::domain("find_root", format!("bad bracket ({a}, {b}) or tol {tol}")));
    }
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::domain("find_root", format!("no sign change on ({a}, {b})")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = b - a;
    for _ in 0..ROOT_MAX_ITER {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic / secant step
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0)), (q0 - 1.0) * (r - 1.0) * (s - 1.0))
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(Error::numerics("find_root", "iteration cap reached"))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2
const SCAN_POINTS: usize = 4096;

/// Maximize f on (a, b): coarse scan (log-spaced when a > 0, else linear)
/// followed by golden-section refinement of the best bracket.
///
/// Returns (argmax, max). Intended for the smooth unimodal-after-scan
/// profiles arising here; the scan density bounds how narrow a spike can be
/// and still be found.
///
/// # Errors
/// Domain error for a malformed interval or tolerance.
pub fn maximize(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if !a.is_finite() || !b.is_finite() || a >= b || !(tol > 0.0) {
        return Err(Error::domain("maximize", format!("bad interval ({a}, {b}) or tol {tol}")));
    }
    let log_spaced = a > 0.0;
    let nodes: Vec<f64> = if log_spaced {
        let (la, lb) = (a.ln(), b.ln());
        (0..SCAN_POINTS).map(|i| (la + (lb - la) * i as f64 / (SCAN_POINTS - 1) as f64).exp()).collect()
    } else {
        (0..SCAN_POINTS).map(|i| a + (b - a) * i as f64 / (SCAN_POINTS - 1) as f64).collect()
    };
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &x) in nodes.iter().enumerate() {
        let v = f(x);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let mut lo = nodes[best.saturating_sub(1)];
    let mut hi = nodes[(best + 1).min(SCAN_POINTS - 1)];
    // golden-section contraction of [lo, hi]
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol * (1.0 + lo.abs()) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    // return the best point actually evaluated
    let mut out = (nodes[best], best_val);
    for cand in [(x1, f1), (x2, f2), (xm, fm)] {
        if cand.1 > out.1 {
            out = cand;
        }
    }
    Ok(out)
}
