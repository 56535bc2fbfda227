//! Tabulated priors and shape-preserving interpolation.
//!
//! Monte Carlo prior construction produces a table of (θ, log π(θ)) pairs
//! normalized to 0 at an anchor point. Downstream consumers want a smooth,
//! strictly positive density, so the table is interpolated with a
//! Fritsch–Carlson monotone cubic in log π — guaranteeing positivity and no
//! spurious oscillation between grid points.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Provenance of a prior table, carried into output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TableMeta {
    pub model: String,
    pub k: u32,
    pub m: u32,
    pub seed: u64,
}

/// A prior tabulated on a strictly increasing grid, as log values normalized
/// to zero at `grid[anchor_index]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorTable {
    pub grid: Vec<f64>,
    pub log_pi: Vec<f64>,
    /// Monte Carlo standard error of each `log_pi` entry (0 for exact values
    /// and at the anchor, where the normalization is exact by construction).
    pub stderr: Vec<f64>,
    pub anchor_index: usize,
    pub meta: TableMeta,
}

impl PriorTable {
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if n < 2 {
            return Err(Error::Domain("prior table needs at least 2 points".into()));
        }
        if self.log_pi.len() != n || self.stderr.len() != n {
            return Err(Error::Domain("prior table column lengths differ".into()));
        }
        if self.anchor_index >= n {
            return Err(Error::Domain("anchor index out of range".into()));
        }
        if !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain(
                "prior table grid must be strictly increasing".into(),
            ));
        }
        if self.log_pi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("prior table has non-finite log values".into()));
        }
        Ok(())
    }

    pub fn anchor(&self) -> f64 {
        self.grid[self.anchor_index]
    }
}

/// Fritsch–Carlson monotone cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::Domain("interpolant needs >= 2 matching points".into()));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("interpolant abscissae must increase".into()));
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                ds[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        ds[0] = edge_slope(h[0], h.get(1).copied(), delta[0], delta.get(1).copied());
        ds[n - 1] = edge_slope(
            h[n - 2],
            if n >= 3 { Some(h[n - 3]) } else { None },
            delta[n - 2],
            if n >= 3 { Some(delta[n - 3]) } else { None },
        );
        Ok(MonotoneCubic { xs, ys, ds })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!(
                "evaluation point {x} outside table range [{lo}, {hi}]"
            )));
        }
        let i = match self
            .xs
            .binary_search_by(|probe| probe.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1])
    }
}

/// One-sided three-point endpoint slope with the usual monotonicity clamps.
fn edge_slope(h0: f64, h1: Option<f64>, d0: f64, d1: Option<f64>) -> f64 {
    let (h1, d1) = match (h1, d1) {
        (Some(h1), Some(d1)) => (h1, d1),
        _ => return d0,
    };
    let mut d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        d = 0.0;
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        d = 3.0 * d0;
    }
    d
}

/// A smooth strictly positive prior built from a [`PriorTable`].
pub struct InterpolatedPrior {
    spline: MonotoneCubic,
    /// interpolation happens in log θ when the whole grid is positive
    log_abscissa: bool,
}

impl InterpolatedPrior {
    /// log π(θ); `Domain` error outside the tabulated range.
    pub fn log_pi(&self, theta: f64) -> Result<f64> {
        let x = if self.log_abscissa {
            if theta <= 0.0 {
                return Err(Error::Domain(format!(
                    "evaluation point {theta} outside table range"
                )));
            }
            theta.ln()
        } else {
            theta
        };
        self.spline.eval(x)
    }

    /// π(θ), strictly positive inside the tabulated range.
    pub fn pi(&self, theta: f64) -> Result<f64> {
        Ok(self.log_pi(theta)?.exp())
    }

    /// Tabulated θ range.
    pub fn domain(&self) -> (f64, f64) {
        let (lo, hi) = self.spline.domain();
        if self.log_abscissa {
            (lo.exp(), hi.exp())
        } else {
            (lo, hi)
        }
    }
}

/// Build a smooth positive prior from a table. Positive grids are
/// interpolated against log θ, which keeps the construction equivariant under
/// rescaling of the parameter.
pub fn interpolate_table(table: &PriorTable) -> Result<InterpolatedPrior> {
    table.validate()?;
    let log_abscissa = table.grid[0] > 0.0;
    let xs: Vec<f64> = if log_abscissa {
        table.grid.iter().map(|t| t.ln()).collect()
    } else {
        table.grid.clone()
    };
    let spline = MonotoneCubic::new(xs, table.log_pi.clone())?;
    Ok(InterpolatedPrior {
        spline,
        log_abscissa,
    })
}
