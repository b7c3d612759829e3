use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Node spacing of a [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// An evaluation grid on a positive interval.
///
/// Kernel sign checks, monotonicity scans and membership certificates all
/// run over a finite grid; the certificate they produce records the grid so
/// the evidence is reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize, spacing: Spacing) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::domain("GridSpec::new", format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        if spacing == Spacing::Log && lo <= 0.0 {
            return Err(Error::domain("GridSpec::new", "log spacing needs lo > 0"));
        }
        if points < 2 {
            return Err(Error::domain("GridSpec::new", "need at least 2 points"));
        }
        Ok(GridSpec { lo, hi, points, spacing })
    }

    /// Default grid used by the certificates: 2048 log-spaced points on
    /// [1e-4, 1e4].
    pub fn default_grid() -> Self {
        GridSpec { lo: 1e-4, hi: 1e4, points: 2048, spacing: Spacing::Log }
    }

    /// Materialize the grid nodes, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let mut out = Vec::with_capacity(n);
        match self.spacing {
            Spacing::Linear => {
                let step = (self.hi - self.lo) / (n - 1) as f64;
                for i in 0..n {
                    out.push(self.lo + step * i as f64);
                }
            }
            Spacing::Log => {
                let (la, lb) = (self.lo.ln(), self.hi.ln());
                let step = (lb - la) / (n - 1) as f64;
                for i in 0..n {
                    out.push((la + step * i as f64).exp());
                }
            }
        }
        // Guard the endpoints against exp/ln roundoff so grid.values()
        // never leaves the declared interval.
        out[0] = self.lo;
        out[n - 1] = self.hi;
        out
    }
}
