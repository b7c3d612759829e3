use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function on (0, inf), optionally carrying closed-form
/// derivatives.
///
/// Operator pipelines (`theta_c`, `Theta^n`, membership certificates) accept
/// this type so that functions with known derivatives take the exact path
/// and everything else falls back to finite differences. The label travels
/// into certificates and reports.
#[derive(Clone)]
pub struct ScalarFunction {
    label: String,
    f: Func,
    /// derivatives[j] is the (j+1)-th derivative.
    derivatives: Vec<Func>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("ScalarFunction")
            .field("label", &self.label)
            .field("derivative_order", &self.derivatives.len())
            .finish()
    }
}

impl ScalarFunction {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFunction { label: label.into(), f: Arc::new(f), derivatives: Vec::new() }
    }

    /// Attach the next closed-form derivative (first call: f', second: f'', ...).
    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivatives.push(Arc::new(df));
        self
    }

    pub(crate) fn from_parts(label: String, f: Func, derivatives: Vec<Func>) -> Self {
        ScalarFunction { label, f, derivatives }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Highest derivative order available in closed form.
    pub fn derivative_order(&self) -> usize {
        self.derivatives.len()
    }

    /// j-th derivative at x; j = 0 is the function itself. Only closed-form
    /// orders are served here -- callers needing higher orders go through
    /// the finite-difference fallbacks in [`crate::theta`].
    pub fn derivative(&self, j: usize, x: f64) -> Result<f64> {
        if j == 0 {
            return Ok(self.eval(x));
        }
        match self.derivatives.get(j - 1) {
            Some(d) => Ok(d(x)),
            None => Err(Error::range(
                "ScalarFunction::derivative",
                format!("{} has derivatives up to order {}, requested {}", self.label, self.derivatives.len(), j),
            )),
        }
    }

    pub(crate) fn func(&self) -> Func {
        self.f.clone()
    }

    pub(crate) fn derivative_func(&self, j: usize) -> Option<Func> {
        if j == 0 {
            return Some(self.f.clone());
        }
        self.derivatives.get(j - 1).cloned()
    }

    /// Check each supplied derivative against a central difference of the
    /// previous order (step 1e-5). Returns the worst relative deviation;
    /// errors if it exceeds 1e-4. Meant for construction-time validation of
    /// hand-written derivative stacks.
    pub fn check_derivatives(&self, probe: &[f64]) -> Result<f64> {
        const H: f64 = 1e-5;
        const REL_TOL: f64 = 1e-4;
        let mut worst = 0.0_f64;
        for j in 1..=self.derivatives.len() {
            for &x in probe {
                if x <= H {
                    continue;
                }
                let lower = |y: f64| self.derivative(j - 1, y).expect("order j-1 exists");
                let fd = (lower(x + H) - lower(x - H)) / (2.0 * H);
                let exact = self.derivative(j, x)?;
                let scale = exact.abs().max(fd.abs()).max(1e-8);
                let rel = (fd - exact).abs() / scale;
                if rel > worst {
                    worst = rel;
                }
                if rel > REL_TOL {
                    return Err(Error::numerics(
                        "ScalarFunction::check_derivatives",
                        format!(
                            "{}: derivative {} at x={x} disagrees with central difference (exact {exact:e}, fd {fd:e})",
                            self.label, j
                        ),
                    ));
                }
            }
        }
        Ok(worst)
    }
}
