//! Built-in model zoo.

use super::{LikProfile, Model, ParameterSpace, StatDomain, SufficientStat, SupportClass};
use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, Interval, LN_2PI};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

/// Construct a built-in model by name.
///
/// Known names: `normal-location`, `exponential-scale`, `exponential-shift`,
/// `uniform-scale`, `uniform-pair`, `triangular`, `logtail-location`,
/// `normal-mixture`, `fmn-discrete`.
pub fn builtin(name: &str) -> Result<Arc<dyn Model>> {
    match name {
        "normal-location" => Ok(Arc::new(NormalLocation)),
        "exponential-scale" => Ok(Arc::new(ExponentialScale)),
        "exponential-shift" => Ok(Arc::new(ExponentialShift)),
        "uniform-scale" => Ok(Arc::new(UniformScale)),
        "uniform-pair" => Ok(Arc::new(UniformPair::theta_theta2())),
        "triangular" => Ok(Arc::new(Triangular)),
        "logtail-location" => Ok(Arc::new(LogTailLocation)),
        "normal-mixture" => Ok(Arc::new(NormalMixture)),
        "fmn-discrete" => Ok(Arc::new(FmnDiscrete)),
    _ => Err(Error::Config(format!("unknown model name: {name}"))),
    }
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}

/// Interior quantile hints (deciles) of a sample, for quadrature seeding.
fn decile_breaks(sample: &[f64]) -> Vec<f64> {
    let mut xs: Vec<f64> = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (1..10)
        .map(|d| xs[(d * xs.len() / 10).min(xs.len() - 1)])
        .collect()
}

// ---------------------------------------------------------------------------
// Normal location: x ~ N(θ, 1), θ ∈ ℝ
// ---------------------------------------------------------------------------

pub struct NormalLocation;

struct NormalMean;

impl SufficientStat for NormalMean {
    fn dim(&self) -> usize {
        1
    }

    fn reduce(&self, sample: &[f64]) -> Vec<f64> {
        vec![sample.iter().sum::<f64>() / sample.len() as f64]
    }

    fn stat_logpdf(&self, t: &[f64], theta: f64, k: usize) -> f64 {
        let kf = k as f64;
        let d = t[0] - theta;
        0.5 * (kf.ln() - LN_2PI) - 0.5 * kf * d * d
    }

    fn stat_domain(&self, theta: f64, k: usize) -> StatDomain {
        let s = 1.0 / (k as f64).sqrt();
        StatDomain::One {
            interval: Interval::new(f64::NEG_INFINITY, f64::INFINITY),
            breaks: vec![theta - 3.0 * s, theta - s, theta, theta + s, theta + 3.0 * s],
        }
    }

    fn posterior_support(&self, t: &[f64], k: usize) -> (Interval, Vec<f64>) {
        let s = 1.0 / (k as f64).sqrt();
        (
            Interval::new(t[0] - 40.0 * s, t[0] + 40.0 * s),
            vec![t[0] - s, t[0], t[0] + s],
        )
    }
}

impl Model for NormalLocation {
    fn name(&self) -> &str {
        "normal-location"
    }

    fn param_space(&self) -> ParameterSpace {
        ParameterSpace::continuous(f64::NEG_INFINITY, f64::INFINITY)
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::Fixed
    }

    fn obs_interval(&self, _theta: f64) -> Interval {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        let d = x - theta;
        Ok(-0.5 * d * d - 0.5 * LN_2PI)
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        for slot in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *slot = theta + z;
        }
        Ok(())
    }

    fn suffstat(&self) -> Option<&dyn SufficientStat> {
        static STAT: NormalMean = NormalMean;
        Some(&STAT)
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        let k = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / k;
        let ssq: f64 = sample.iter().map(|x| (x - mean) * (x - mean)).sum();
        let base = -0.5 * k * LN_2PI - 0.5 * ssq;
        let s = 1.0 / k.sqrt();
        Ok(LikProfile {
            support: Interval::new(f64::NEG_INFINITY, f64::INFINITY),
            breakpoints: vec![mean - 4.0 * s, mean - s, mean, mean + s, mean + 4.0 * s],
            eval: Box::new(move |theta| {
                let d = mean - theta;
                base - 0.5 * k * d * d
            }),
        })
    }
}

// ---------------------------------------------------------------------------
// Exponential scale: x ~ Exp(mean θ), θ > 0
// ---------------------------------------------------------------------------

pub struct ExponentialScale;

struct ExpSum;

impl SufficientStat for ExpSum {
    fn dim(&self) -> usize {
        1
    }

    fn reduce(&self, sample: &[f64]) -> Vec<f64> {
        vec![sample.iter().sum()]
    }

    fn stat_logpdf(&self, t: &[f64], theta: f64, k: usize) -> f64 {
        // sum of k exponentials: Gamma(k, θ)
        if t[0] <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let kf = k as f64;
        -ln_gamma(kf).unwrap() - kf * theta.ln() + (kf - 1.0) * t[0].ln() - t[0] / theta
    }

    fn stat_domain(&self, theta: f64, k: usize) -> StatDomain {
        let kf = k as f64;
        let mean = kf * theta;
        let sd = kf.sqrt() * theta;
        StatDomain::One {
            interval: Interval::new(0.0, f64::INFINITY),
            breaks: vec![(mean - 3.0 * sd).max(mean * 0.05), mean, mean + 3.0 * sd],
        }
    }

    fn posterior_support(&self, t: &[f64], k: usize) -> (Interval, Vec<f64>) {
        let kf = k as f64;
        let center = t[0] / kf;
        let spread = 14.0 / kf.sqrt() + 60.0 / kf;
        (
            Interval::new(center * (-spread).exp(), center * spread.exp()),
            vec![center],
        )
    }
}

impl Model for ExponentialScale {
    fn name(&self) -> &str {
        "exponential-scale"
    }

    fn param_space(&self) -> ParameterSpace {
        ParameterSpace::continuous(0.0, f64::INFINITY)
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::Fixed
    }

    fn obs_interval(&self, _theta: f64) -> Interval {
        Interval::new(0.0, f64::INFINITY)
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(-theta.ln() - x / theta)
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        for slot in out.iter_mut() {
            let u = uniform01(rng);
            *slot = -theta * (1.0 - u).ln();
        }
        Ok(())
    }

    fn suffstat(&self) -> Option<&dyn SufficientStat> {
        static STAT: ExpSum = ExpSum;
        Some(&STAT)
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        let k = sample.len() as f64;
        let s: f64 = sample.iter().sum();
        let mle = s / k;
        Ok(LikProfile {
            support: Interval::new(0.0, f64::INFINITY),
            breakpoints: vec![0.5 * mle, mle, 2.0 * mle],
            eval: Box::new(move |theta| -k * theta.ln() - s / theta),
        })
    }
}

// ---------------------------------------------------------------------------
// Exponential shift: density e^{-(x-θ)} on x > θ, θ ∈ ℝ
// ---------------------------------------------------------------------------

pub struct ExponentialShift;

struct ExpShiftMin;

impl SufficientStat for ExpShiftMin {
    fn dim(&self) -> usize {
        1
    }

    fn reduce(&self, sample: &[f64]) -> Vec<f64> {
        vec![sample.iter().cloned().fold(f64::INFINITY, f64::min)]
    }

    fn stat_logpdf(&self, t: &[f64], theta: f64, k: usize) -> f64 {
        // min of k shifted exponentials: rate-k exponential above θ
        if t[0] <= theta {
            return f64::NEG_INFINITY;
        }
        let kf = k as f64;
        kf.ln() - kf * (t[0] - theta)
    }

    fn stat_domain(&self, theta: f64, k: usize) -> StatDomain {
        let kf = k as f64;
        StatDomain::One {
            interval: Interval::new(theta, f64::INFINITY),
            breaks: vec![theta + 0.5 / kf, theta + 1.0 / kf, theta + 4.0 / kf],
        }
    }

    fn posterior_support(&self, t: &[f64], k: usize) -> (Interval, Vec<f64>) {
        let kf = k as f64;
        (
            Interval::new(t[0] - 60.0 / kf, t[0]),
            vec![t[0] - 4.0 / kf, t[0] - 1.0 / kf, t[0] - 0.25 / kf],
        )
    }
}

impl Model for ExponentialShift {
    fn name(&self) -> &str {
        "exponential-shift"
    }

    fn param_space(&self) -> ParameterSpace {
        ParameterSpace::continuous(f64::NEG_INFINITY, f64::INFINITY)
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::OneSided
    }

    fn obs_interval(&self, theta: f64) -> Interval {
        Interval::new(theta, f64::INFINITY)
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        if x <= theta {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(-(x - theta))
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        for slot in out.iter_mut() {
            let u = uniform01(rng);
            *slot = theta - (1.0 - u).ln();
        }
        Ok(())
    }

    fn suffstat(&self) -> Option<&dyn SufficientStat> {
        static STAT: ExpShiftMin = ExpShiftMin;
        Some(&STAT)
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        let k = sample.len() as f64;
        let s: f64 = sample.iter().sum();
        let xmin = sample.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(LikProfile {
            support: Interval::new(f64::NEG_INFINITY, xmin),
            breakpoints: vec![xmin - 4.0 / k, xmin - 1.0 / k, xmin - 0.25 / k],
            eval: Box::new(move |theta| {
                if theta >= xmin {
                    f64::NEG_INFINITY
                } else {
                    k * theta - s
                }
            }),
        })
    }
}

// ---------------------------------------------------------------------------
// Uniform scale: x ~ Un(0, θ), θ > 0
// ---------------------------------------------------------------------------

pub struct UniformScale;

struct UniformMax;

impl SufficientStat for UniformMax {
    fn dim(&self) -> usize {
        1
    }

    fn reduce(&self, sample: &[f64]) -> Vec<f64> {
        vec![sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max)]
    }

    fn stat_logpdf(&self, t: &[f64], theta: f64, k: usize) -> f64 {
        if t[0] <= 0.0 || t[0] >= theta {
            return f64::NEG_INFINITY;
        }
        let kf = k as f64;
        kf.ln() + (kf - 1.0) * t[0].ln() - kf * theta.ln()
    }

    fn stat_domain(&self, theta: f64, k: usize) -> StatDomain {
        let kf = k as f64;
        StatDomain::One {
            interval: Interval::new(0.0, theta),
            breaks: vec![
                theta * (1.0 - 4.0 / kf).max(0.1),
                theta * (1.0 - 1.0 / kf).max(0.2),
            ],
        }
    }

    fn posterior_support(&self, t: &[f64], k: usize) -> (Interval, Vec<f64>) {
        let kf = k as f64;
        let hi = t[0] * (60.0 / kf.max(2.0)).exp();
        (
            Interval::new(t[0], hi),
            vec![t[0] * (1.0 + 1.0 / kf), t[0] * (1.0 + 4.0 / kf)],
        )
    }
}

impl Model for UniformScale {
    fn name(&self) -> &str {
        "uniform-scale"
    }

    fn param_space(&self) -> ParameterSpace {
        ParameterSpace::continuous(0.0, f64::INFINITY)
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::OneSided
    }

    fn obs_interval(&self, theta: f64) -> Interval {
        Interval::new(0.0, theta)
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        if x <= 0.0 || x >= theta {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(-theta.ln())
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        for slot in out.iter_mut() {
            *slot = theta * uniform01(rng);
        }
        Ok(())
    }

    fn suffstat(&self) -> Option<&dyn SufficientStat> {
        static STAT: UniformMax = UniformMax;
        Some(&STAT)
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        let k = sample.len() as f64;
        let xmax = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(LikProfile {
            support: Interval::new(xmax, f64::INFINITY),
            breakpoints: vec![
                xmax * (1.0 + 0.25 / k),
                xmax * (1.0 + 1.0 / k),
                xmax * (1.0 + 4.0 / k),
            ],
            eval: Box::new(move |theta| {
                if theta <= xmax {
                    f64::NEG_INFINITY
                } else {
                    -k * theta.ln()
                }
            }),
        })
    }
}

// ---------------------------------------------------------------------------
// Uniform pair: x ~ Un(a1(θ), a2(θ)) with both endpoints strictly increasing
// ---------------------------------------------------------------------------

type EndpointFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A uniform model whose support endpoints both move with θ.
#[derive(Clone)]
pub struct UniformPairSpec {
    pub label: String,
    pub a1: EndpointFn,
    pub a2: EndpointFn,
    pub d_a1: EndpointFn,
    pub d_a2: EndpointFn,
    pub theta_space: ParameterSpace,
}

impl UniformPairSpec {
    /// The canonical pair (a1, a2) = (θ, θ²) on θ > 1.
    pub fn theta_theta2() -> Self {
        UniformPairSpec {
            label: "theta-theta2".into(),
            a1: Arc::new(|t| t),
            a2: Arc::new(|t| t * t),
            d_a1: Arc::new(|_| 1.0),
            d_a2: Arc::new(|t| 2.0 * t),
            theta_space: ParameterSpace::continuous(1.0, f64::INFINITY),
        }
    }

    /// Both endpoints, derivatives and ordering validated at θ.
    pub fn validate_at(&self, theta: f64) -> Result<(f64, f64, f64, f64)> {
        if !self.theta_space.contains(theta) {
            return Err(Error::Domain(format!(
                "theta = {theta} outside the pair-model parameter space"
            )));
        }
        let a1 = (self.a1)(theta);
        let a2 = (self.a2)(theta);
        let d1 = (self.d_a1)(theta);
        let d2 = (self.d_a2)(theta);
        if !(a1 < a2) {
            return Err(Error::Domain(format!(
                "support endpoints must satisfy a1 < a2 at theta = {theta} (got {a1}, {a2})"
            )));
        }
        if !(d1 > 0.0 && d2 > 0.0) {
            return Err(Error::Domain(format!(
                "support endpoints must be strictly increasing at theta = {theta}"
            )));
        }
        Ok((a1, a2, d1, d2))
    }

    /// Invert a monotone endpoint by bisection inside the parameter space.
    fn invert(&self, f: &EndpointFn, target: f64) -> f64 {
        let lo0 = self.theta_space.lo;
        let mut lo = lo0 + 1e-12 * (1.0 + lo0.abs());
        let mut hi = if lo0.is_finite() { lo0.abs() + 1.0 } else { 1.0 };
        let mut guard = 0;
        while f(hi) < target && guard < 2000 {
            hi = lo0 + (hi - lo0) * 2.0 + 1.0;
            guard += 1;
        }
        if f(lo) > target {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

pub struct UniformPair {
    pub spec: UniformPairSpec,
    stat: PairMinMax,
}

impl UniformPair {
    pub fn new(spec: UniformPairSpec) -> Self {
        let stat = PairMinMax { spec: spec.clone() };
        UniformPair { spec, stat }
    }

    pub fn theta_theta2() -> Self {
        Self::new(UniformPairSpec::theta_theta2())
    }
}

struct PairMinMax {
    spec: UniformPairSpec,
}

impl SufficientStat for PairMinMax {
    fn dim(&self) -> usize {
        2
    }

    fn reduce(&self, sample: &[f64]) -> Vec<f64> {
        let mn = sample.iter().cloned().fold(f64::INFINITY, f64::min);
        let mx = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        vec![mn, mx]
    }

    fn stat_logpdf(&self, t: &[f64], theta: f64, k: usize) -> f64 {
        // joint density of (min, max) of k uniforms on (a1, a2)
        let (t1, t2) = (t[0], t[1]);
        let a1 = (self.spec.a1)(theta);
        let a2 = (self.spec.a2)(theta);
        if !(a1 < t1 && t1 < t2 && t2 < a2) || k < 2 {
            return f64::NEG_INFINITY;
        }
        let kf = k as f64;
        kf.ln() + (kf - 1.0).ln() + (kf - 2.0) * (t2 - t1).ln() - kf * (a2 - a1).ln()
    }

    fn stat_domain(&self, theta: f64, k: usize) -> StatDomain {
        let a1 = (self.spec.a1)(theta);
        let a2 = (self.spec.a2)(theta);
        let range = a2 - a1;
        let kf = k as f64;
        // mass sits within O(range/k) of the corner (t1, t2) ≈ (a1, a2);
        // geometric ladders let the adaptive pass find it at any k
        fn ladder(from: f64, sign: f64, range: f64, kf: f64) -> Vec<f64> {
            let mut v = Vec::new();
            let mut g = 0.25 / kf;
            while g < 1.0 {
                v.push(from + sign * range * g);
                g *= 2.0;
            }
            v
        }
        let outer_breaks = ladder(a1, 1.0, range, kf);
        StatDomain::Two {
            outer: Interval::new(a1, a2),
            outer_breaks,
            inner: Box::new(move |t1| {
                let mut breaks: Vec<f64> = ladder(a2, -1.0, range, kf)
                    .into_iter()
                    .filter(|&b| b > t1)
                    .collect();
                breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
                (Interval::new(t1, a2), breaks)
            }),
        }
    }

    fn posterior_support(&self, t: &[f64], _k: usize) -> (Interval, Vec<f64>) {
        // positive likelihood iff a1(θ) < t1 and a2(θ) > t2
        let lo = self.spec.invert(&self.spec.a2, t[1]);
        let hi = self.spec.invert(&self.spec.a1, t[0]);
        let w = hi - lo;
        (
            Interval::new(lo, hi),
            vec![lo + w / 8.0, lo + w / 4.0, lo + w / 2.0],
        )
    }
}

impl Model for UniformPair {
    fn name(&self) -> &str {
        "uniform-pair"
    }

    fn param_space(&self) -> ParameterSpace {
        self.spec.theta_space
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::TwoSided
    }

    fn obs_interval(&self, theta: f64) -> Interval {
        Interval::new((self.spec.a1)(theta), (self.spec.a2)(theta))
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        let a1 = (self.spec.a1)(theta);
        let a2 = (self.spec.a2)(theta);
        if x <= a1 || x >= a2 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(-(a2 - a1).ln())
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        let a1 = (self.spec.a1)(theta);
        let a2 = (self.spec.a2)(theta);
        for slot in out.iter_mut() {
            *slot = a1 + (a2 - a1) * uniform01(rng);
        }
        Ok(())
    }

    fn suffstat(&self) -> Option<&dyn SufficientStat> {
        Some(&self.stat)
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        let k = sample.len() as f64;
        let t = self.stat.reduce(sample);
        let (support, mut breakpoints) = self.stat.posterior_support(&t, sample.len());
        breakpoints.push(support.lo + (support.hi - support.lo) / k.max(2.0));
        let spec = self.spec.clone();
        let (t1, t2) = (t[0], t[1]);
        Ok(LikProfile {
            support,
            breakpoints,
            eval: Box::new(move |theta| {
                let a1 = (spec.a1)(theta);
                let a2 = (spec.a2)(theta);
                if a1 < t1 && t2 < a2 {
                    -k * (a2 - a1).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }),
        })
    }
}

// ---------------------------------------------------------------------------
// Triangular: density 2x/θ on (0, θ], 2(1-x)/(1-θ) on (θ, 1); θ ∈ (0,1)
// ---------------------------------------------------------------------------

pub struct Triangular;

impl Model for Triangular {
    fn name(&self) -> &str {
        "triangular"
    }

    fn param_space(&self) -> ParameterSpace {
        ParameterSpace::continuous(0.0, 1.0)
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::Fixed
    }

    fn obs_interval(&self, _theta: f64) -> Interval {
        Interval::new(0.0, 1.0)
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        if x <= 0.0 || x >= 1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(if x <= theta {
            (2.0 * x).ln() - theta.ln()
        } else {
            (2.0 * (1.0 - x)).ln() - (1.0 - theta).ln()
        })
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        for slot in out.iter_mut() {
            let u = uniform01(rng);
            *slot = if u <= theta {
                (u * theta).sqrt()
            } else {
                1.0 - ((1.0 - u) * (1.0 - theta)).sqrt()
            };
        }
        Ok(())
    }

    fn logpdf_theta_kinks(&self, theta: f64) -> Vec<f64> {
        vec![theta]
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        // sorted sample + prefix log sums: O(log k) per θ evaluation
        let k = sample.len();
        let mut xs = sample.to_vec();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if xs[0] <= 0.0 || xs[k - 1] >= 1.0 {
            return Err(Error::Domain(
                "triangular sample must lie strictly inside (0, 1)".into(),
            ));
        }
        let mut pre_lo = vec![0.0; k + 1]; // Σ ln(2 x_i), i < j
        let mut pre_hi = vec![0.0; k + 1]; // Σ ln(2 (1 - x_i)), i < j
        for (i, &x) in xs.iter().enumerate() {
            pre_lo[i + 1] = pre_lo[i] + (2.0 * x).ln();
            pre_hi[i + 1] = pre_hi[i] + (2.0 * (1.0 - x)).ln();
        }
        // likelihood is maximized at a sample point: find it once
        let ll_at = {
            let xs = xs.clone();
            let pre_lo = pre_lo.clone();
            let pre_hi = pre_hi.clone();
            move |theta: f64| -> f64 {
                let idx = xs.partition_point(|&x| x <= theta);
                pre_lo[idx] + (pre_hi[k] - pre_hi[idx])
                    - idx as f64 * theta.ln()
                    - (k - idx) as f64 * (1.0 - theta).ln()
            }
        };
        let mut best = (xs[0], f64::NEG_INFINITY);
        for &x in &xs {
            let v = ll_at(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        let mut breakpoints = decile_breaks(&xs);
        let spread = 8.0 / k as f64;
        breakpoints.push(best.0);
        breakpoints.push((best.0 - spread).max(xs[0] * 0.5));
        breakpoints.push((best.0 + spread).min(0.5 + 0.5 * xs[k - 1]));
        Ok(LikProfile {
            support: Interval::new(0.0, 1.0),
            breakpoints,
            eval: Box::new(ll_at),
        })
    }
}

// ---------------------------------------------------------------------------
// Log-tail location: density 1/((x-θ) ln²(x-θ)) on x > θ + e, θ ∈ ℝ
// ---------------------------------------------------------------------------

pub struct LogTailLocation;

impl Model for LogTailLocation {
    fn name(&self) -> &str {
        "logtail-location"
    }

    fn param_space(&self) -> ParameterSpace {
        ParameterSpace::continuous(f64::NEG_INFINITY, f64::INFINITY)
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::OneSided
    }

    fn obs_interval(&self, theta: f64) -> Interval {
        Interval::new(theta + std::f64::consts::E, f64::INFINITY)
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        let y = x - theta;
        if y <= std::f64::consts::E {
            return Ok(f64::NEG_INFINITY);
        }
        let ly = y.ln();
        Ok(-y.ln() - 2.0 * ly.ln())
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        for slot in out.iter_mut() {
            let u = uniform01(rng);
            // F(y) = 1 - 1/ln y on y > e
            *slot = theta + (1.0 / (1.0 - u)).exp();
        }
        Ok(())
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        let xs = sample.to_vec();
        let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let edge = xmin - std::f64::consts::E;
        Ok(LikProfile {
            support: Interval::new(f64::NEG_INFINITY, edge),
            breakpoints: vec![edge - 4.0, edge - 1.0, edge - 0.25],
            eval: Box::new(move |theta| {
                let mut acc = 0.0;
                for &x in &xs {
                    let y = x - theta;
                    if y <= std::f64::consts::E {
                        return f64::NEG_INFINITY;
                    }
                    let ly = y.ln();
                    acc += -ly - 2.0 * ly.ln();
                }
                acc
            }),
        })
    }
}

// ---------------------------------------------------------------------------
// Normal mixture: ½ N(0,1) + ½ N(θ,1), θ ∈ ℝ
// ---------------------------------------------------------------------------

pub struct NormalMixture;

impl Model for NormalMixture {
    fn name(&self) -> &str {
        "normal-mixture"
    }

    fn param_space(&self) -> ParameterSpace {
        ParameterSpace::continuous(f64::NEG_INFINITY, f64::INFINITY)
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::Fixed
    }

    fn obs_interval(&self, _theta: f64) -> Interval {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        let a = -0.5 * x * x;
        let d = x - theta;
        let b = -0.5 * d * d;
        Ok(crate::numerics::logsumexp2(a, b) - 0.5 * LN_2PI - std::f64::consts::LN_2)
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        for slot in out.iter_mut() {
            // fixed consumption: one uniform + one normal per draw
            let pick = uniform01(rng);
            let z: f64 = rng.sample(StandardNormal);
            *slot = if pick < 0.5 { z } else { theta + z };
        }
        Ok(())
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        let xs = sample.to_vec();
        let mut breakpoints = decile_breaks(sample);
        breakpoints.push(0.0);
        let this = NormalMixture;
        Ok(LikProfile {
            support: Interval::new(f64::NEG_INFINITY, f64::INFINITY),
            breakpoints,
            eval: Box::new(move |theta| {
                let mut acc = 0.0;
                for &x in &xs {
                    acc += this.logpdf(x, theta).unwrap();
                }
                acc
            }),
        })
    }
}

// ---------------------------------------------------------------------------
// FMN discrete: pmf 1/3 on {⌊θ/2⌋ (≔1 at θ=1), 2θ, 2θ+1}; θ ∈ {1, 2, ...}
// ---------------------------------------------------------------------------

pub struct FmnDiscrete;

impl FmnDiscrete {
    pub fn atoms(theta: u64) -> [u64; 3] {
        let lo = if theta == 1 { 1 } else { theta / 2 };
        [lo, 2 * theta, 2 * theta + 1]
    }
}

impl Model for FmnDiscrete {
    fn name(&self) -> &str {
        "fmn-discrete"
    }

    fn param_space(&self) -> ParameterSpace {
        ParameterSpace::positive_integers()
    }

    fn support_class(&self) -> SupportClass {
        SupportClass::TwoSided
    }

    fn obs_interval(&self, theta: f64) -> Interval {
        let a = Self::atoms(theta as u64);
        Interval::new(a[0] as f64 - 0.5, a[2] as f64 + 0.5)
    }

    fn logpdf(&self, x: f64, theta: f64) -> Result<f64> {
        if !self.param_space().contains(theta) {
            return Err(Error::Domain(format!("theta = {theta} is not a positive integer")));
        }
        if x.fract() != 0.0 || x < 1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let a = Self::atoms(theta as u64);
        if a.contains(&(x as u64)) {
            Ok(-(3f64.ln()))
        } else {
            Ok(f64::NEG_INFINITY)
        }
    }

    fn sample_into(&self, theta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        if !self.param_space().contains(theta) {
            return Err(Error::Domain(format!("theta = {theta} is not a positive integer")));
        }
        let a = Self::atoms(theta as u64);
        for slot in out.iter_mut() {
            let u = uniform01(rng);
            let idx = ((u * 3.0) as usize).min(2);
            *slot = a[idx] as f64;
        }
        Ok(())
    }

    fn discrete_obs(&self) -> bool {
        true
    }

    fn obs_points(&self, theta: f64) -> Option<Vec<f64>> {
        Some(Self::atoms(theta as u64).iter().map(|&a| a as f64).collect())
    }

    fn param_candidates(&self, sample: &[f64]) -> Option<Vec<f64>> {
        let mut common: Option<Vec<u64>> = None;
        for &xf in sample {
            let x = xf as u64;
            let mut cands: Vec<u64> = Vec::new();
            for c in [
                2 * x,
                2 * x + 1,
                x / 2,
                x.saturating_sub(1) / 2,
                1,
            ] {
                if c >= 1 && Self::atoms(c).contains(&x) && !cands.contains(&c) {
                    cands.push(c);
                }
            }
            common = Some(match common {
                None => cands,
                Some(prev) => prev.into_iter().filter(|c| cands.contains(c)).collect(),
            });
        }
        let mut v: Vec<f64> = common.unwrap_or_default().iter().map(|&c| c as f64).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(v)
    }

    fn lik_profile<'a>(&'a self, sample: &'a [f64]) -> Result<LikProfile<'a>> {
        let xs = sample.to_vec();
        let this = FmnDiscrete;
        Ok(LikProfile {
            support: Interval::new(0.5, f64::INFINITY),
            breakpoints: Vec::new(),
            eval: Box::new(move |theta| {
                let mut acc = 0.0;
                for &x in &xs {
                    match this.logpdf(x, theta) {
                        Ok(v) => acc += v,
                        Err(_) => return f64::NEG_INFINITY,
                    }
                    if acc == f64::NEG_INFINITY {
                        break;
                    }
                }
                acc
            }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{loglik, sample};
    use crate::numerics::{log_integrate_with_breakpoints, QuadratureSettings};
    use crate::rng::substream;
    use approx::assert_relative_eq;

    const CONTINUOUS: [&str; 8] = [
        "normal-location",
        "exponential-scale",
        "exponential-shift",
        "uniform-scale",
        "uniform-pair",
        "triangular",
        "logtail-location",
        "normal-mixture",
    ];

    fn thetas_for(name: &str) -> Vec<f64> {
        match name {
            "uniform-scale" | "exponential-scale" => vec![0.3, 0.8, 1.0, 2.5, 7.0],
            "uniform-pair" => vec![1.2, 1.5, 2.0, 3.5, 6.0],
            "triangular" => vec![0.1, 0.3, 0.5, 0.7, 0.9],
            _ => vec![-2.0, -0.5, 0.0, 1.0, 3.0],
        }
    }

    #[test]
    fn continuous_densities_integrate_to_one() {
        let s = QuadratureSettings::default();
        for name in CONTINUOUS {
            if name == "logtail-location" {
                continue; // mass accumulates too slowly for direct quadrature
            }
            let m = builtin(name).unwrap();
            for theta in thetas_for(name) {
                let iv = m.obs_interval(theta);
                let breaks = match name {
                    "normal-location" | "normal-mixture" => vec![theta - 1.0, theta, theta + 1.0],
                    _ => vec![],
                };
                let mass = log_integrate_with_breakpoints(
                    |x| m.logpdf(x, theta).unwrap(),
                    iv,
                    &s,
                    &breaks,
                )
                .unwrap();
                assert_relative_eq!(mass, 0.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn logtail_truncated_mass_matches_cdf() {
        // F(y) = 1 - 1/ln(y) on y > e: check quadrature against it at a
        // finite horizon (full normalization converges too slowly to probe)
        let m = builtin("logtail-location").unwrap();
        let s = QuadratureSettings::default();
        let theta = 1.0;
        for y in [10.0, 1e3, 1e6] {
            let mass = log_integrate_with_breakpoints(
                |x| m.logpdf(x, theta).unwrap(),
                Interval::new(theta + std::f64::consts::E, theta + y),
                &s,
                &[],
            )
            .unwrap();
            let expect = 1.0 - 1.0 / y.ln();
            assert_relative_eq!(mass.exp(), expect, epsilon = 1e-8);
        }
    }

    #[test]
    fn fmn_pmf_sums_to_one() {
        let m = builtin("fmn-discrete").unwrap();
        for theta in 1..=50u64 {
            let pts = m.obs_points(theta as f64).unwrap();
            assert_eq!(pts.len(), 3);
            let total: f64 = pts
                .iter()
                .map(|&x| m.logpdf(x, theta as f64).unwrap().exp())
                .sum();
            assert_eq!(total, 1.0, "pmf sum at theta = {theta}");
        }
    }

    #[test]
    fn fmn_candidates_are_consistent() {
        let m = builtin("fmn-discrete").unwrap();
        for theta in 1..=40u64 {
            for &x in &FmnDiscrete::atoms(theta) {
                let cands = m.param_candidates(&[x as f64]).unwrap();
                assert!(
                    cands.contains(&(theta as f64)),
                    "theta {theta} missing from candidates of x {x}"
                );
                // every candidate must actually put mass on x
                for &c in &cands {
                    assert!(m.logpdf(x as f64, c).unwrap().is_finite());
                }
            }
        }
    }

    // ---- sampler / density agreement -------------------------------------

    fn erfc(x: f64) -> f64 {
        // Chebyshev fit, |error| < 1.2e-7 everywhere: plenty for a KS check
        let z = x.abs();
        let t = 1.0 / (1.0 + 0.5 * z);
        let ans = t
            * (-z * z - 1.26551223
                + t * (1.00002368
                    + t * (0.37409196
                        + t * (0.09678418
                            + t * (-0.18628806
                                + t * (0.27886807
                                    + t * (-1.13520398
                                        + t * (1.48851587
                                            + t * (-0.82215223 + t * 0.17087277)))))))))
                .exp();
        if x >= 0.0 {
            ans
        } else {
            2.0 - ans
        }
    }

    fn phi(x: f64) -> f64 {
        0.5 * erfc(-x / std::f64::consts::SQRT_2)
    }

    fn ks_stat(draws: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = draws.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in draws.iter().enumerate() {
            let f = cdf(x);
            d = d.max((f - i as f64 / n).abs());
            d = d.max((f - (i as f64 + 1.0) / n).abs());
        }
        d
    }

    #[test]
    fn samplers_match_densities_ks() {
        let n = 2000;
        let crit = 1.9495 / (n as f64).sqrt(); // alpha ~ 0.001
        let cases: Vec<(&str, f64, Box<dyn Fn(f64) -> f64>)> = vec![
            ("normal-location", 0.7, Box::new(|x| phi(x - 0.7))),
            ("exponential-scale", 2.0, Box::new(|x: f64| 1.0 - (-x / 2.0).exp())),
            ("exponential-shift", -1.0, Box::new(|x: f64| 1.0 - (-(x + 1.0)).exp())),
            ("uniform-scale", 3.0, Box::new(|x| x / 3.0)),
            ("uniform-pair", 2.0, Box::new(|x| (x - 2.0) / 2.0)),
            (
                "triangular",
                0.3,
                Box::new(|x: f64| {
                    if x <= 0.3 {
                        x * x / 0.3
                    } else {
                        1.0 - (1.0 - x) * (1.0 - x) / 0.7
                    }
                }),
            ),
            (
                "logtail-location",
                1.0,
                Box::new(|x: f64| 1.0 - 1.0 / (x - 1.0).ln()),
            ),
            (
                "normal-mixture",
                2.5,
                Box::new(|x| 0.5 * phi(x) + 0.5 * phi(x - 2.5)),
            ),
        ];
        for (i, (name, theta, cdf)) in cases.into_iter().enumerate() {
            let m = builtin(name).unwrap();
            let mut rng = substream(20260826, i as u64);
            let mut draws = sample(m.as_ref(), theta, &mut rng, n).unwrap();
            let d = ks_stat(&mut draws, cdf);
            assert!(d < crit, "{name}: KS statistic {d} >= {crit}");
        }
    }

    #[test]
    fn fmn_sampler_hits_atom_frequencies() {
        let m = builtin("fmn-discrete").unwrap();
        let mut rng = substream(7, 0);
        let theta = 9.0;
        let draws = sample(m.as_ref(), theta, &mut rng, 30_000).unwrap();
        for &a in &FmnDiscrete::atoms(9) {
            let freq = draws.iter().filter(|&&x| x == a as f64).count() as f64 / 30_000.0;
            assert!((freq - 1.0 / 3.0).abs() < 0.01, "atom {a}: freq {freq}");
        }
    }

    #[test]
    fn lik_profiles_agree_with_raw_loglik() {
        for name in CONTINUOUS {
            let m = builtin(name).unwrap();
            let theta0 = thetas_for(name)[2];
            let mut rng = substream(99, 1);
            let xs = sample(m.as_ref(), theta0, &mut rng, 64).unwrap();
            let prof = m.lik_profile(&xs).unwrap();
            for theta in thetas_for(name) {
                let fast = (prof.eval)(theta);
                let slow = loglik(m.as_ref(), &xs, theta).unwrap();
                if slow == f64::NEG_INFINITY {
                    assert_eq!(fast, f64::NEG_INFINITY, "{name} at {theta}");
                } else {
                    assert_relative_eq!(fast, slow, epsilon = 1e-9, max_relative = 1e-11);
                }
            }
        }
    }

    #[test]
    fn sampling_is_reproducible_across_substreams() {
        let m = builtin("triangular").unwrap();
        let a = sample(m.as_ref(), 0.4, &mut substream(5, 11), 16).unwrap();
        let b = sample(m.as_ref(), 0.4, &mut substream(5, 11), 16).unwrap();
        assert_eq!(a, b);
        let c = sample(m.as_ref(), 0.4, &mut substream(5, 12), 16).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn unknown_model_is_a_config_error() {
        assert!(builtin("no-such-model").is_err());
    }
}
