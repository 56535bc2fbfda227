//! One-parameter sampling models.
//!
//! Everything downstream (divergence diagnostics, information functionals,
//! prior construction) talks to models through the [`Model`] trait: a log
//! density, a sampler driven by a dedicated ChaCha substream, support
//! geometry, and optional fast paths (sufficient statistics, reduced
//! likelihood evaluators).

pub mod zoo;

pub use zoo::builtin;

use crate::error::{Error, Result};
use crate::numerics::Interval;
use rand_chacha::ChaCha8Rng;

/// The parameter domain. Continuous spaces are open intervals; discrete
/// spaces are the integers ≥ `lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSpace {
    pub lo: f64,
    pub hi: f64,
    pub discrete: bool,
}

impl ParameterSpace {
    pub fn continuous(lo: f64, hi: f64) -> Self {
        ParameterSpace {
            lo,
            hi,
            discrete: false,
        }
    }

    pub fn positive_integers() -> Self {
        ParameterSpace {
            lo: 1.0,
            hi: f64::INFINITY,
            discrete: true,
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        if self.discrete {
            theta >= self.lo && theta <= self.hi && theta.fract() == 0.0
        } else {
            theta > self.lo && theta < self.hi
        }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }
}

/// How the observation support depends on the parameter. Drives which prior
/// constructions are available: the boundary-based construction needs a
/// single support edge moving monotonically with θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportClass {
    /// Support does not depend on θ.
    Fixed,
    /// Exactly one support endpoint moves, monotonically in θ.
    OneSided,
    /// Both endpoints move with θ.
    TwoSided,
}

/// The likelihood of a fixed sample, viewed as a function of θ, together
/// with the geometry adaptive quadrature needs to integrate against it.
pub struct LikProfile<'a> {
    /// θ values with strictly positive likelihood.
    pub support: Interval,
    /// Peak locations / scale hints inside `support`.
    pub breakpoints: Vec<f64>,
    /// Log likelihood; −∞ outside `support`. Cheap to evaluate repeatedly.
    pub eval: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
}

/// Support of a sufficient statistic given θ, with quadrature hints.
pub enum StatDomain {
    One {
        interval: Interval,
        breaks: Vec<f64>,
    },
    Two {
        outer: Interval,
        outer_breaks: Vec<f64>,
        /// inner interval and hints as a function of the outer coordinate
        inner: Box<dyn Fn(f64) -> (Interval, Vec<f64>) + Send + Sync>,
    },
}

/// A low-dimensional sufficient statistic with a tractable sampling density.
pub trait SufficientStat: Send + Sync {
    fn dim(&self) -> usize;
    /// Map a sample of size k to the statistic.
    fn reduce(&self, sample: &[f64]) -> Vec<f64>;
    /// Log density of the statistic for a sample of size `k`.
    fn stat_logpdf(&self, t: &[f64], theta: f64, k: usize) -> f64;
    /// Support of the statistic under θ.
    fn stat_domain(&self, theta: f64, k: usize) -> StatDomain;
    /// θ′ region where `stat_logpdf(t, ·, k)` has non-negligible mass,
    /// together with hints. For bounded-support models this is the exact
    /// likelihood support; for light-tailed ones an effective hull.
    fn posterior_support(&self, t: &[f64], k: usize) -> (Interval, Vec<f64>);
}

/// A one-parameter sampling model.
pub trait Model: Send + Sync {
    fn name(&self) -> &str;
    fn param_space(&self) -> ParameterSpace;
    fn support_class(&self) -> SupportClass;

    /// Support of a single observation under θ.
    fn obs_interval(&self, theta: f64) -> Interval;

    /// Log density (or log pmf) of one observation. Returns −∞ outside the
    /// observation support; `Domain` error for θ outside the parameter space.
    fn logpdf(&self, x: f64, theta: f64) -> Result<f64>;

    /// Fill `out` with iid draws under θ. Each slot consumes a fixed number
    /// of generator values, so outputs are reproducible per substream.
    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()>;

    fn discrete_obs(&self) -> bool {
        false
    }

    /// Atoms of a discrete observation distribution.
    fn obs_points(&self, _theta: f64) -> Option<Vec<f64>> {
        None
    }

    /// θ values with positive likelihood for a discrete-parameter model.
    fn param_candidates(&self, _sample: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Optional sufficient-statistic fast path.
    fn suffstat(&self) -> Option<&dyn SufficientStat> {
        None
    }

    /// x locations where ∂θ log p(x|θ) is discontinuous at this θ (support
    /// kinks that must be excised from information integrals).
    fn logpdf_theta_kinks(&self, _theta: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Reduced likelihood evaluator for a fixed sample.
    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>>;
}

/// Log density with a parameter-space check (convenience wrapper).
pub fn logpdf(model: &dyn Model, x: f64, theta: f64) -> Result<f64> {
    if !model.param_space().contains(theta) {
        return Err(Error::Domain(format!(
            "theta = {theta} outside the parameter space of {}",
            model.name()
        )));
    }
    model.logpdf(x, theta)
}

/// Log likelihood of an iid sample.
pub fn loglik(model: &dyn Model, sample: &[f64], theta: f64) -> Result<f64> {
    let mut acc = 0.0;
    for &x in sample {
        acc += logpdf(model, x, theta)?;
        if acc == f64::NEG_INFINITY {
            break;
        }
    }
    Ok(acc)
}

/// Draw `n` iid observations.
pub fn sample(model: &dyn Model, theta: f64, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    model.sample_into(theta, rng, &mut out)?;
    Ok(out)
}

/// Reduce a sample through the model's sufficient statistic.
pub fn sufficient_stat(model: &dyn Model, sample: &[f64]) -> Result<Vec<f64>> {
    match model.suffstat() {
        Some(s) => Ok(s.reduce(sample)),
        None => Err(Error::Unsupported(format!(
            "{} has no tractable sufficient statistic",
            model.name()
        ))),
    }
}
