//! Univariate conditional-heteroskedasticity models: ARCH, GARCH, GARCH-in-mean,
//! Taylor-Schwert, GJR, TARCH, NARCH, APARCH and EGARCH under normal, Student-t,
//! GED and Fernández-Steel skewed innovations.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Gamma, StandardNormal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::optimize::{self, BfgsOptions, Objective};
use crate::series::{SampleRange, TimeSeries};
use crate::stats::{mean, variance, Coefficient, Criteria};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Arch,
    Garch,
    TsGarch,
    Gjr,
    Tarch,
    Narch,
    Aparch,
    Egarch,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Arch,
        Variant::Garch,
        Variant::TsGarch,
        Variant::Gjr,
        Variant::Tarch,
        Variant::Narch,
        Variant::Aparch,
        Variant::Egarch,
    ];

    fn has_gamma(self) -> bool {
        matches!(self, Variant::Gjr | Variant::Tarch | Variant::Aparch | Variant::Egarch)
    }

    fn has_delta(self) -> bool {
        matches!(self, Variant::Narch | Variant::Aparch)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Arch => "ARCH",
            Variant::Garch => "GARCH",
            Variant::TsGarch => "TS-GARCH",
            Variant::Gjr => "GJR",
            Variant::Tarch => "TARCH",
            Variant::Narch => "NARCH",
            Variant::Aparch => "APARCH",
            Variant::Egarch => "EGARCH",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = s.to_ascii_lowercase().replace(['-', '_'], "");
        Ok(match k.as_str() {
            "arch" => Variant::Arch,
            "garch" => Variant::Garch,
            "tsgarch" | "taylorschwert" => Variant::TsGarch,
            "gjr" => Variant::Gjr,
            "tarch" => Variant::Tarch,
            "narch" => Variant::Narch,
            "aparch" => Variant::Aparch,
            "egarch" => Variant::Egarch,
            _ => return domain(format!("unknown volatility model '{s}'")),
        })
    }
}

/// Mean equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeanEquation {
    /// y = c + e
    Constant,
    /// y = θ·h_t + e
    InMean,
    /// Residual formed from the sample variance, e = y − θ·var(y), before h is
    /// recursed.
    InMeanScript,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Innovation {
    Normal,
    StudentT,
    Ged,
    SkewT,
    SkewGed,
}

impl Innovation {
    pub const ALL: [Innovation; 5] = [
        Innovation::Normal,
        Innovation::StudentT,
        Innovation::Ged,
        Innovation::SkewT,
        Innovation::SkewGed,
    ];

    fn shape_names(self) -> &'static [&'static str] {
        match self {
            Innovation::Normal => &[],
            Innovation::StudentT => &["nu"],
            Innovation::Ged => &["ged_shape"],
            Innovation::SkewT => &["nu", "skew"],
            Innovation::SkewGed => &["ged_shape", "skew"],
        }
    }
}

impl fmt::Display for Innovation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Innovation::Normal => "Normal",
            Innovation::StudentT => "t",
            Innovation::Ged => "GED",
            Innovation::SkewT => "Skewed t",
            Innovation::SkewGed => "Skewed GED",
        })
    }
}

impl std::str::FromStr for Innovation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = s.to_ascii_lowercase().replace(['-', '_', ' '], "");
        Ok(match k.as_str() {
            "normal" | "gaussian" => Innovation::Normal,
            "t" | "studentt" => Innovation::StudentT,
            "ged" => Innovation::Ged,
            "skewt" | "skewedt" => Innovation::SkewT,
            "skewged" | "skewedged" => Innovation::SkewGed,
            _ => return domain(format!("unknown innovation distribution '{s}'")),
        })
    }
}

/// Gaussian likelihood convention. `Kernel` drops the −½ln 2π constant, as the
/// hand-written in-mean likelihoods do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Likelihood {
    Full,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CovarianceMethod {
    Hessian,
    Opg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchSpec {
    pub variant: Variant,
    pub arch_order: usize,
    pub garch_order: usize,
    pub mean: MeanEquation,
    pub distribution: Innovation,
    pub likelihood: Likelihood,
    pub covariance: CovarianceMethod,
    /// Parameters held at a value during estimation, by coefficient name.
    pub fixed: Vec<(String, f64)>,
}

impl GarchSpec {
    /// Order (1,1), or (1,0) for ARCH, constant mean.
    pub fn new(variant: Variant, distribution: Innovation) -> Self {
        GarchSpec {
            variant,
            arch_order: 1,
            garch_order: usize::from(variant != Variant::Arch),
            mean: MeanEquation::Constant,
            distribution,
            likelihood: Likelihood::Full,
            covariance: CovarianceMethod::Hessian,
            fixed: Vec::new(),
        }
    }

    pub fn orders(mut self, arch: usize, garch: usize) -> Self {
        self.arch_order = arch;
        self.garch_order = garch;
        self
    }

    pub fn in_mean(mut self) -> Self {
        self.mean = MeanEquation::InMean;
        self
    }

    /// In-mean model with residuals from the sample variance, the Gaussian
    /// kernel without its constant, and OPG standard errors.
    pub fn script_in_mean(mut self) -> Self {
        self.mean = MeanEquation::InMeanScript;
        self.likelihood = Likelihood::Kernel;
        self.covariance = CovarianceMethod::Opg;
        self
    }

    pub fn kernel(mut self) -> Self {
        self.likelihood = Likelihood::Kernel;
        self
    }

    pub fn covariance(mut self, method: CovarianceMethod) -> Self {
        self.covariance = method;
        self
    }

    pub fn fix(mut self, name: &str, value: f64) -> Self {
        self.fixed.retain(|(n, _)| n != name);
        self.fixed.push((name.to_string(), value));
        self
    }

    pub fn label(&self) -> String {
        let mut s = match self.mean {
            MeanEquation::Constant => self.variant.to_string(),
            _ => format!("{}-M", self.variant),
        };
        if self.variant == Variant::Arch {
            s.push_str(&format!("({})", self.arch_order));
        } else {
            s.push_str(&format!("({},{})", self.arch_order, self.garch_order));
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.arch_order == 0 {
            return domain("arch order must be at least 1");
        }
        if self.variant == Variant::Arch && self.garch_order != 0 {
            return domain("ARCH has no GARCH terms; use the GARCH variant");
        }
        if self.mean != MeanEquation::Constant && !matches!(self.variant, Variant::Arch | Variant::Garch) {
            return domain("in-mean equations are supported for ARCH and GARCH only");
        }
        if self.likelihood == Likelihood::Kernel && self.distribution != Innovation::Normal {
            return domain("the kernel likelihood convention applies to normal innovations only");
        }
        let names = self.param_names();
        for (n, _) in &self.fixed {
            if !names.contains(n) {
                return domain(format!("cannot fix '{n}': not a parameter of {}", self.label()));
            }
        }
        if self.fixed.len() >= names.len() {
            return domain("every parameter is fixed");
        }
        Ok(())
    }

    /// Coefficient names in estimation order.
    pub fn param_names(&self) -> Vec<String> {
        let mut v = vec![match self.mean {
            MeanEquation::Constant => "const".to_string(),
            _ => "theta".to_string(),
        }];
        v.push("omega".into());
        v.extend((1..=self.arch_order).map(|i| format!("alpha_{i}")));
        if self.variant.has_gamma() {
            v.extend((1..=self.arch_order).map(|i| format!("gamma_{i}")));
        }
        v.extend((1..=self.garch_order).map(|j| format!("beta_{j}")));
        if self.variant.has_delta() {
            v.push("delta".into());
        }
        v.extend(self.distribution.shape_names().iter().map(|s| s.to_string()));
        v
    }
}

/// Position of each parameter group in the natural parameter vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    p: usize,
    q: usize,
    alpha: usize,
    gamma: Option<usize>,
    beta: usize,
    delta: Option<usize>,
    shape: usize,
    n_shape: usize,
}

impl Layout {
    fn of(spec: &GarchSpec) -> Self {
        let p = spec.arch_order;
        let q = spec.garch_order;
        let alpha = 2;
        let gamma = spec.variant.has_gamma().then_some(alpha + p);
        let beta = alpha + p + if gamma.is_some() { p } else { 0 };
        let delta = spec.variant.has_delta().then_some(beta + q);
        let shape = beta + q + usize::from(delta.is_some());
        Layout {
            p,
            q,
            alpha,
            gamma,
            beta,
            delta,
            shape,
            n_shape: spec.distribution.shape_names().len(),
        }
    }

    fn len(&self) -> usize {
        self.shape + self.n_shape
    }
}

// ---------------------------------------------------------------------------
// Innovation densities

fn ln_t(z: f64, nu: f64) -> f64 {
    ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (PI * (nu - 2.0)).ln()
        - (nu + 1.0) / 2.0 * (z * z / (nu - 2.0)).ln_1p()
}

fn ged_lambda(k: f64) -> f64 {
    ((-2.0 / k) * LN_2 + ln_gamma(1.0 / k) - ln_gamma(3.0 / k)).exp().sqrt()
}

fn ln_ged(z: f64, k: f64) -> f64 {
    let lam = ged_lambda(k);
    k.ln() - lam.ln() - (1.0 + 1.0 / k) * LN_2 - ln_gamma(1.0 / k) - 0.5 * (z / lam).abs().powf(k)
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn abs_moment_t(nu: f64) -> f64 {
    2.0 * (nu - 2.0).sqrt() * (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0)).exp()
        / (PI.sqrt() * (nu - 1.0))
}

fn abs_moment_ged(k: f64) -> f64 {
    ged_lambda(k) * (LN_2 / k + ln_gamma(2.0 / k) - ln_gamma(1.0 / k)).exp()
}

fn check_shape(dist: Innovation, shape: &[f64]) -> Result<()> {
    if shape.len() != dist.shape_names().len() {
        return domain(format!("{dist} needs {} shape parameter(s)", dist.shape_names().len()));
    }
    let ok = match dist {
        Innovation::Normal => true,
        Innovation::StudentT => shape[0] > 2.0,
        Innovation::Ged => shape[0] > 0.0,
        Innovation::SkewT => shape[0] > 2.0 && shape[1] > 0.0,
        Innovation::SkewGed => shape[0] > 0.0 && shape[1] > 0.0,
    };
    if ok && shape.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        domain(format!("infeasible {dist} shape {shape:?}"))
    }
}

/// Log density of a zero-mean unit-variance innovation. Shapes must be feasible.
fn ln_density(dist: Innovation, z: f64, shape: &[f64]) -> f64 {
    match dist {
        Innovation::Normal => -LN_SQRT_2PI - 0.5 * z * z,
        Innovation::StudentT => ln_t(z, shape[0]),
        Innovation::Ged => ln_ged(z, shape[0]),
        Innovation::SkewT | Innovation::SkewGed => {
            let (base, m1): (fn(f64, f64) -> f64, f64) = if dist == Innovation::SkewT {
                (ln_t, abs_moment_t(shape[0]))
            } else {
                (ln_ged, abs_moment_ged(shape[0]))
            };
            let xi = shape[1];
            let m = m1 * (xi - 1.0 / xi);
            let s2 = (1.0 - m1 * m1) * (xi * xi + 1.0 / (xi * xi)) + 2.0 * m1 * m1 - 1.0;
            let s = s2.sqrt();
            let zz = z * s + m;
            let xs = if zz >= 0.0 { xi } else { 1.0 / xi };
            LN_2 - (xi + 1.0 / xi).ln() + s.ln() + base(zz / xs, shape[0])
        }
    }
}

/// Log-likelihood contribution of e = z·√h. Under `Likelihood::Kernel` the
/// Gaussian constant is omitted: −½(ln h + z²).
pub fn loglik_contribution(
    dist: Innovation,
    z: f64,
    h: f64,
    shape: &[f64],
    convention: Likelihood,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return domain(format!("conditional variance {h} is not positive"));
    }
    check_shape(dist, shape)?;
    if convention == Likelihood::Kernel {
        if dist != Innovation::Normal {
            return domain("the kernel convention applies to normal innovations only");
        }
        return Ok(-0.5 * (h.ln() + z * z));
    }
    Ok(ln_density(dist, z, shape) - 0.5 * h.ln())
}

/// E|z| by numerical integration of the standardized density over the real line.
pub fn expected_abs_numeric(dist: Innovation, shape: &[f64]) -> Result<f64> {
    check_shape(dist, shape)?;
    // z = x / (1 − x²) maps (−1, 1) onto the real line.
    let g = |x: f64| {
        let d = 1.0 - x * x;
        if d <= 0.0 {
            return 0.0;
        }
        let z = x / d;
        let jac = (1.0 + x * x) / (d * d);
        let v = z.abs() * ln_density(dist, z, shape).exp() * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let left = quadrature::double_exponential::integrate(g, -1.0, 0.0, 1e-12);
    let right = quadrature::double_exponential::integrate(g, 0.0, 1.0, 1e-12);
    Ok(left.integral + right.integral)
}

/// E|z| under the standardized innovation distribution: closed forms for the
/// symmetric cases, numerical integration for the skewed ones.
pub fn expected_abs(dist: Innovation, shape: &[f64]) -> Result<f64> {
    check_shape(dist, shape)?;
    Ok(match dist {
        Innovation::Normal => (2.0 / PI).sqrt(),
        Innovation::StudentT => abs_moment_t(shape[0]),
        Innovation::Ged => abs_moment_ged(shape[0]),
        _ => expected_abs_numeric(dist, shape)?,
    })
}

// ---------------------------------------------------------------------------
// Variance recursion

/// Conditional variances, residuals and per-observation log-likelihood at a
/// natural parameter vector; `None` outside the feasible region.
#[derive(Debug, Clone)]
struct Path {
    h: Vec<f64>,
    e: Vec<f64>,
    ll: Vec<f64>,
}

struct Recursion<'a> {
    spec: &'a GarchSpec,
    lay: Layout,
    y: &'a [f64],
    var_y: f64,
}

impl<'a> Recursion<'a> {
    fn new(spec: &'a GarchSpec, y: &'a [f64]) -> Self {
        Recursion {
            spec,
            lay: Layout::of(spec),
            y,
            var_y: variance(y, 1),
        }
    }

    /// Maps h to the recursion state s and back.
    fn to_s(&self, h: f64, delta: f64) -> f64 {
        match self.spec.variant {
            Variant::Arch | Variant::Garch | Variant::Gjr => h,
            Variant::TsGarch | Variant::Tarch => h.sqrt(),
            Variant::Narch => h.powf(delta),
            Variant::Aparch => h.powf(delta / 2.0),
            Variant::Egarch => h.ln(),
        }
    }

    fn from_s(&self, s: f64, delta: f64) -> f64 {
        match self.spec.variant {
            Variant::Arch | Variant::Garch | Variant::Gjr => s,
            Variant::TsGarch | Variant::Tarch => {
                if s > 0.0 {
                    s * s
                } else {
                    f64::NAN
                }
            }
            Variant::Narch => {
                if s > 0.0 {
                    s.powf(1.0 / delta)
                } else {
                    f64::NAN
                }
            }
            Variant::Aparch => {
                if s > 0.0 {
                    s.powf(2.0 / delta)
                } else {
                    f64::NAN
                }
            }
            Variant::Egarch => s.exp(),
        }
    }

    /// Contribution of a lagged shock e (with variance h) through ARCH lag i.
    fn news(&self, x: &[f64], i: usize, e: f64, h: f64, delta: f64, eabs: f64) -> f64 {
        let a = x[self.lay.alpha + i];
        let g = self.lay.gamma.map(|k| x[k + i]).unwrap_or(0.0);
        match self.spec.variant {
            Variant::Arch | Variant::Garch => a * e * e,
            Variant::Gjr => (a + if e < 0.0 { g } else { 0.0 }) * e * e,
            Variant::TsGarch => a * e.abs(),
            Variant::Tarch => a * e.abs() + g * (-e).max(0.0),
            Variant::Narch => a * e.abs().powf(2.0 * delta),
            Variant::Aparch => a * (e.abs() - g * e).powf(delta),
            Variant::Egarch => {
                let z = e / h.sqrt();
                a * (z.abs() - eabs) + g * z
            }
        }
    }

    fn run(&self, x: &[f64]) -> Option<Path> {
        let lay = self.lay;
        let spec = self.spec;
        let y = self.y;
        let n = y.len();
        let mu = x[0];
        let omega = x[1];
        let delta = lay.delta.map(|k| x[k]).unwrap_or(2.0);
        let shape = &x[lay.shape..lay.shape + lay.n_shape];
        if check_shape(spec.distribution, shape).is_err() {
            return None;
        }
        if lay.delta.is_some() && !(delta > 0.0) {
            return None;
        }
        if spec.variant == Variant::Aparch {
            let gam = &x[lay.gamma.unwrap()..lay.gamma.unwrap() + lay.p];
            if gam.iter().any(|g| g.abs() >= 1.0) {
                return None;
            }
        }
        let eabs = if spec.variant == Variant::Egarch {
            expected_abs(spec.distribution, shape).ok()?
        } else {
            0.0
        };

        let v0 = match spec.mean {
            MeanEquation::Constant => y.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n as f64,
            _ => self.var_y,
        };
        if !(v0 > 0.0) {
            return None;
        }
        let s0 = self.to_s(v0, delta);
        // Pre-sample shocks: average of the news function at ±√v0.
        let pre_news: Vec<f64> = (0..lay.p)
            .map(|i| {
                let r = v0.sqrt();
                0.5 * (self.news(x, i, r, v0, delta, eabs) + self.news(x, i, -r, v0, delta, eabs))
            })
            .collect();

        let mut s = vec![0.0; n];
        let mut h = vec![0.0; n];
        let mut e = vec![0.0; n];
        let mut ll = vec![0.0; n];
        for t in 0..n {
            let mut st = omega;
            for i in 0..lay.p {
                st += if t > i {
                    self.news(x, i, e[t - 1 - i], h[t - 1 - i], delta, eabs)
                } else {
                    pre_news[i]
                };
            }
            for j in 0..lay.q {
                let b = x[lay.beta + j];
                st += b * if t > j { s[t - 1 - j] } else { s0 };
            }
            let ht = self.from_s(st, delta);
            if !(ht > 0.0 && ht.is_finite()) {
                return None;
            }
            s[t] = st;
            h[t] = ht;
            e[t] = match spec.mean {
                MeanEquation::Constant => y[t] - mu,
                MeanEquation::InMean => y[t] - mu * ht,
                MeanEquation::InMeanScript => y[t] - mu * self.var_y,
            };
            let z = e[t] / ht.sqrt();
            ll[t] = match spec.likelihood {
                Likelihood::Kernel => -0.5 * (ht.ln() + z * z),
                Likelihood::Full => ln_density(spec.distribution, z, shape) - 0.5 * ht.ln(),
            };
            if !ll[t].is_finite() {
                return None;
            }
        }
        Some(Path { h, e, ll })
    }
}

/// Free-parameter view of the recursion, in natural or transformed coordinates.
struct GarchObjective<'a> {
    rec: Recursion<'a>,
    free: Vec<usize>,
    base: Vec<f64>,
    transformed: bool,
}

#[derive(Clone, Copy)]
enum Transform {
    Identity,
    Exp,
    ExpPlus2,
    Tanh,
}

impl GarchObjective<'_> {
    fn transform(&self, k: usize) -> Transform {
        let lay = self.rec.lay;
        let egarch = self.rec.spec.variant == Variant::Egarch;
        if k == 0 {
            return Transform::Identity;
        }
        if k >= lay.shape {
            let name = self.rec.spec.distribution.shape_names()[k - lay.shape];
            return if name == "nu" { Transform::ExpPlus2 } else { Transform::Exp };
        }
        if Some(k) == lay.delta {
            return Transform::Exp;
        }
        if let Some(g) = lay.gamma {
            if (g..g + lay.p).contains(&k) {
                return if self.rec.spec.variant == Variant::Aparch {
                    Transform::Tanh
                } else {
                    Transform::Identity
                };
            }
        }
        if egarch {
            Transform::Identity
        } else {
            Transform::Exp
        }
    }

    fn natural(&self, u: &[f64]) -> Vec<f64> {
        let mut x = self.base.clone();
        for (&k, &v) in self.free.iter().zip(u) {
            x[k] = if self.transformed {
                match self.transform(k) {
                    Transform::Identity => v,
                    Transform::Exp => v.exp(),
                    Transform::ExpPlus2 => 2.0 + v.exp(),
                    Transform::Tanh => v.tanh(),
                }
            } else {
                v
            };
        }
        x
    }

    fn to_unconstrained(&self, x: &[f64]) -> Vec<f64> {
        self.free
            .iter()
            .map(|&k| match self.transform(k) {
                Transform::Identity => x[k],
                Transform::Exp => x[k].max(1e-8).ln(),
                Transform::ExpPlus2 => (x[k] - 2.0).max(1e-8).ln(),
                Transform::Tanh => x[k].clamp(-0.999, 0.999).atanh(),
            })
            .collect()
    }
}

impl Objective for GarchObjective<'_> {
    fn loglik(&self, u: &[f64]) -> f64 {
        match self.rec.run(&self.natural(u)) {
            Some(p) => p.ll.iter().sum(),
            None => f64::NAN,
        }
    }

    fn loglik_obs(&self, u: &[f64]) -> Option<Vec<f64>> {
        self.rec.run(&self.natural(u)).map(|p| p.ll)
    }
}

// ---------------------------------------------------------------------------
// Estimation

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GarchFit {
    pub spec: GarchSpec,
    pub dependent: String,
    pub sample: SampleRange,
    pub nobs: usize,
    pub coefficients: Vec<Coefficient>,
    /// GJR only: the same model written as h = ω + α(|e| − γe)² + βh.
    pub alternative: Option<Vec<Coefficient>>,
    pub loglik: f64,
    pub criteria: Criteria,
    pub mean_dependent: f64,
    pub sd_dependent: f64,
    pub conditional_variances: TimeSeries,
    pub residuals: TimeSeries,
    pub standardized_residuals: TimeSeries,
    pub unconditional_variance: Option<f64>,
    /// Σα + Σβ for ARCH/GARCH; the variance is absent when this is ≥ 1.
    pub persistence: Option<f64>,
    pub converged: bool,
    pub gradient_norm: f64,
    pub iterations: usize,
}

impl GarchFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn value(&self, name: &str) -> f64 {
        self.coefficient(name).map(|c| c.value).unwrap_or(f64::NAN)
    }

    /// Number of estimated (free) parameters.
    pub fn k(&self) -> usize {
        self.coefficients.len() - self.spec.fixed.len()
    }

    pub fn all_significant(&self, level: f64) -> bool {
        let fixed: Vec<&str> = self.spec.fixed.iter().map(|(n, _)| n.as_str()).collect();
        self.coefficients
            .iter()
            .filter(|c| !fixed.contains(&c.name.as_str()))
            .all(|c| c.p_value < level)
    }
}

fn start_values(spec: &GarchSpec, y: &[f64]) -> Vec<f64> {
    let lay = Layout::of(spec);
    let var = variance(y, 1).max(1e-12);
    let mut x = vec![0.0; lay.len()];
    x[0] = match spec.mean {
        MeanEquation::Constant => mean(y),
        // The scripts start θ at 1e-4; larger values can make y = θh + e explosive.
        _ => 1e-4,
    };
    let delta = match spec.variant {
        Variant::Narch => 0.5,
        _ => 2.0,
    };
    let a0 = 0.1 / lay.p as f64;
    let b0 = if lay.q > 0 { 0.8 / lay.q as f64 } else { 0.0 };
    for i in 0..lay.p {
        x[lay.alpha + i] = a0;
    }
    for j in 0..lay.q {
        x[lay.beta + j] = b0;
    }
    if let Some(k) = lay.delta {
        x[k] = delta;
    }
    let rec = Recursion::new(spec, y);
    let persistence = 0.1 + 0.8 * f64::from(u8::from(lay.q > 0));
    x[1] = (1.0 - persistence) * rec.to_s(var, delta);
    if spec.variant == Variant::Egarch {
        x[1] = (1.0 - 0.8 * f64::from(u8::from(lay.q > 0))) * var.ln();
    }
    for (i, name) in spec.distribution.shape_names().iter().enumerate() {
        x[lay.shape + i] = match *name {
            "nu" => 8.0,
            "ged_shape" => 1.5,
            _ => 1.0,
        };
    }
    x
}

/// ML estimation on the observations of `series` inside `range`.
pub fn fit_garch(series: &TimeSeries, spec: &GarchSpec, range: SampleRange) -> Result<GarchFit> {
    let s = series.slice(range)?;
    fit_garch_series(&s, spec)
}

/// ML estimation on the whole series.
pub fn fit_garch_series(series: &TimeSeries, spec: &GarchSpec) -> Result<GarchFit> {
    spec.validate()?;
    let y = series.values();
    if y.len() < 50 {
        return domain(format!("{} observations are too few for a volatility model", y.len()));
    }
    let names = spec.param_names();
    let mut base = start_values(spec, y);
    let mut free = Vec::new();
    for (k, n) in names.iter().enumerate() {
        match spec.fixed.iter().find(|(f, _)| f == n) {
            Some((_, v)) => base[k] = *v,
            None => free.push(k),
        }
    }
    let obj = GarchObjective {
        rec: Recursion::new(spec, y),
        free: free.clone(),
        base: base.clone(),
        transformed: true,
    };
    let u0 = obj.to_unconstrained(&base);
    if !obj.loglik(&u0).is_finite() {
        return Err(Error::Fit(format!("{}: likelihood not finite at the start values", spec.label())));
    }
    let mut res = optimize::maximize(&obj, &u0, &BfgsOptions::default())?;
    // |e| and indicator terms put kinks in the likelihood at e = 0, where the
    // numerical gradient need not vanish; the relative-change criterion decides.
    if !res.finished && res.loglik.is_finite() {
        let again = optimize::maximize(&obj, &res.params, &BfgsOptions::default())?;
        if again.loglik >= res.loglik {
            res = again;
        }
    }
    if !res.finished {
        return Err(Error::Fit(format!(
            "{} {} did not converge (gradient norm {:.3e})",
            spec.label(),
            spec.distribution,
            res.gradient_norm
        )));
    }
    let x = obj.natural(&res.params);
    let path = obj
        .rec
        .run(&x)
        .ok_or_else(|| Error::Fit("optimum outside the feasible region".into()))?;

    // Covariance in natural coordinates.
    let nat = GarchObjective {
        rec: Recursion::new(spec, y),
        free: free.clone(),
        base: x.clone(),
        transformed: false,
    };
    let xf: Vec<f64> = free.iter().map(|&k| x[k]).collect();
    let cov = match spec.covariance {
        CovarianceMethod::Hessian => optimize::covariance_hessian(&nat, &xf)
            .or_else(|_| optimize::covariance_opg(&nat, &xf)),
        CovarianceMethod::Opg => optimize::covariance_opg(&nat, &xf),
    }
    .ok();
    let mut se = vec![f64::NAN; names.len()];
    if let Some(c) = &cov {
        for (i, &k) in free.iter().enumerate() {
            se[k] = c[(i, i)].sqrt();
        }
    }
    let coefficients: Vec<Coefficient> = names
        .iter()
        .enumerate()
        .map(|(k, n)| Coefficient::normal(n.clone(), x[k], se[k]))
        .collect();

    let lay = Layout::of(spec);
    let alternative = (spec.variant == Variant::Gjr)
        .then(|| gjr_alternative(&x, &free, cov.as_ref(), lay));

    let n = y.len();
    let loglik: f64 = path.ll.iter().sum();
    let k = free.len();
    let (uv, persistence) = match spec.variant {
        Variant::Arch | Variant::Garch => {
            let a: Vec<f64> = x[lay.alpha..lay.alpha + lay.p].to_vec();
            let b: Vec<f64> = x[lay.beta..lay.beta + lay.q].to_vec();
            let p: f64 = a.iter().sum::<f64>() + b.iter().sum::<f64>();
            (unconditional_variance_of(x[1], &a, &b), Some(p))
        }
        _ => (None, None),
    };
    let start = series.start();
    let z: Vec<f64> = path.e.iter().zip(&path.h).map(|(e, h)| e / h.sqrt()).collect();
    Ok(GarchFit {
        spec: spec.clone(),
        dependent: series.name().to_string(),
        sample: series.range(),
        nobs: n,
        coefficients,
        alternative,
        loglik,
        criteria: Criteria::new(loglik, k, n),
        mean_dependent: mean(y),
        sd_dependent: variance(y, 1).sqrt(),
        conditional_variances: TimeSeries::new("h", start, path.h)?,
        residuals: TimeSeries::new("uhat", start, path.e)?,
        standardized_residuals: TimeSeries::new("z", start, z)?,
        unconditional_variance: uv,
        persistence,
        converged: res.finished,
        gradient_norm: res.gradient_norm,
        iterations: res.iterations,
    })
}

/// Maps GJR indicator-form (α, γ) to the (|e| − γe)² form with delta-method errors.
fn gjr_alternative(x: &[f64], free: &[usize], cov: Option<&DMatrix<f64>>, lay: Layout) -> Vec<Coefficient> {
    let map = |x: &[f64]| -> Vec<f64> {
        let mut out = vec![x[1]];
        let g0 = lay.gamma.unwrap();
        let mut alts = Vec::new();
        let mut gams = Vec::new();
        for i in 0..lay.p {
            let a = x[lay.alpha + i];
            let g = x[g0 + i];
            let r = ((a + g) / a).sqrt();
            let gg = (r - 1.0) / (r + 1.0);
            alts.push(a / (1.0 - gg).powi(2));
            gams.push(gg);
        }
        out.extend(alts);
        out.extend(gams);
        out.extend_from_slice(&x[lay.beta..lay.beta + lay.q]);
        out
    };
    let v = map(x);
    let mut names = vec!["omega".to_string()];
    names.extend((1..=lay.p).map(|i| format!("alpha_{i}")));
    names.extend((1..=lay.p).map(|i| format!("gamma_{i}")));
    names.extend((1..=lay.q).map(|j| format!("beta_{j}")));
    let se: Vec<f64> = match cov {
        Some(c) => {
            let m = v.len();
            let mut jac = DMatrix::zeros(m, free.len());
            for (col, &k) in free.iter().enumerate() {
                let h = 1e-6 * x[k].abs().max(1e-3);
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                let (fp, fm) = (map(&xp), map(&xm));
                for r in 0..m {
                    jac[(r, col)] = (fp[r] - fm[r]) / (2.0 * h);
                }
            }
            let vc = &jac * c * jac.transpose();
            (0..m).map(|i| vc[(i, i)].sqrt()).collect()
        }
        None => vec![f64::NAN; v.len()],
    };
    names
        .into_iter()
        .zip(v.iter().zip(se))
        .map(|(n, (&val, s))| Coefficient::normal(n, val, s))
        .collect()
}

/// ω / (1 − Σα − Σβ), absent when the persistence is at or above one.
pub fn unconditional_variance_of(omega: f64, alpha: &[f64], beta: &[f64]) -> Option<f64> {
    let p: f64 = alpha.iter().sum::<f64>() + beta.iter().sum::<f64>();
    (p < 1.0).then(|| omega / (1.0 - p))
}

pub fn unconditional_variance(fit: &GarchFit) -> Option<f64> {
    fit.unconditional_variance
}

/// Conditional variance path and log-likelihood at given parameter values,
/// in the order of `GarchSpec::param_names`.
pub fn evaluate_garch(y: &[f64], spec: &GarchSpec, params: &[f64]) -> Result<(Vec<f64>, f64)> {
    spec.validate()?;
    if params.len() != Layout::of(spec).len() {
        return domain(format!("{} expects {} parameters", spec.label(), Layout::of(spec).len()));
    }
    let rec = Recursion::new(spec, y);
    let p = rec
        .run(params)
        .ok_or_else(|| Error::Domain("parameters outside the feasible region".into()))?;
    let ll = p.ll.iter().sum();
    Ok((p.h, ll))
}

// ---------------------------------------------------------------------------
// Simulation

/// One standardized (zero-mean, unit-variance) innovation draw.
pub fn draw_innovation<R: Rng + ?Sized>(dist: Innovation, shape: &[f64], rng: &mut R) -> Result<f64> {
    check_shape(dist, shape)?;
    let sym = |rng: &mut R, dist: Innovation, a: f64| -> Result<f64> {
        Ok(match dist {
            Innovation::StudentT | Innovation::SkewT => {
                let t = StudentT::new(a).map_err(|e| Error::Domain(e.to_string()))?;
                t.sample(rng) * ((a - 2.0) / a).sqrt()
            }
            Innovation::Ged | Innovation::SkewGed => {
                let g = Gamma::new(1.0 / a, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
                let m = ged_lambda(a) * (2.0 * g.sample(rng)).powf(1.0 / a);
                if rng.random::<bool>() {
                    m
                } else {
                    -m
                }
            }
            Innovation::Normal => rng.sample(StandardNormal),
        })
    };
    Ok(match dist {
        Innovation::Normal | Innovation::StudentT | Innovation::Ged => {
            sym(rng, dist, shape.first().copied().unwrap_or(0.0))?
        }
        Innovation::SkewT | Innovation::SkewGed => {
            let (a, xi) = (shape[0], shape[1]);
            let m1 = if dist == Innovation::SkewT { abs_moment_t(a) } else { abs_moment_ged(a) };
            let m = m1 * (xi - 1.0 / xi);
            let s = ((1.0 - m1 * m1) * (xi * xi + 1.0 / (xi * xi)) + 2.0 * m1 * m1 - 1.0).sqrt();
            let w = sym(rng, dist, a)?.abs();
            let x = if rng.random::<f64>() < xi * xi / (1.0 + xi * xi) { xi * w } else { -w / xi };
            (x - m) / s
        }
    })
}

/// Simulates `n` observations from a volatility model at the given parameter
/// values (ordered as `GarchSpec::param_names`), after `burn` discarded draws.
pub fn simulate_garch(spec: &GarchSpec, params: &[f64], n: usize, burn: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let lay = Layout::of(spec);
    if params.len() != lay.len() {
        return domain(format!("{} expects {} parameters", spec.label(), lay.len()));
    }
    let x = params;
    let shape = &x[lay.shape..lay.shape + lay.n_shape];
    check_shape(spec.distribution, shape)?;
    let delta = lay.delta.map(|k| x[k]).unwrap_or(2.0);
    let eabs = if spec.variant == Variant::Egarch { expected_abs(spec.distribution, shape)? } else { 0.0 };
    let rec = Recursion { spec, lay, y: &[], var_y: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n + burn;
    let h0 = match spec.variant {
        Variant::Arch | Variant::Garch => {
            unconditional_variance_of(x[1], &x[lay.alpha..lay.alpha + lay.p], &x[lay.beta..lay.beta + lay.q])
                .unwrap_or(1.0)
        }
        _ => 1.0,
    };
    let m = lay.p.max(lay.q);
    let mut s = vec![rec.to_s(h0, delta); m];
    let mut h = vec![h0; m];
    let mut e = vec![0.0; m];
    let mut y = Vec::with_capacity(n);
    for t in m..m + total {
        let mut st = x[1];
        for i in 0..lay.p {
            st += rec.news(x, i, e[t - 1 - i], h[t - 1 - i], delta, eabs);
        }
        for j in 0..lay.q {
            st += x[lay.beta + j] * s[t - 1 - j];
        }
        let ht = rec.from_s(st, delta);
        if !(ht > 0.0 && ht.is_finite()) {
            return Err(Error::Numerical(format!("simulated variance {ht} at step {t}")));
        }
        let et = ht.sqrt() * draw_innovation(spec.distribution, shape, &mut rng)?;
        s.push(st);
        h.push(ht);
        e.push(et);
        if t >= m + burn {
            y.push(match spec.mean {
                MeanEquation::Constant => x[0] + et,
                MeanEquation::InMean => x[0] * ht + et,
                MeanEquation::InMeanScript => x[0] + et,
            });
        }
    }
    Ok(y)
}

// ---------------------------------------------------------------------------
// Comparison

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub distribution: Innovation,
    pub criteria: Option<Criteria>,
    pub loglik: Option<f64>,
    pub all_significant: bool,
    pub converged: bool,
    pub error: Option<String>,
    pub best_aic: bool,
    pub best_bic: bool,
    pub best_hqc: bool,
}

/// Fits every spec independently (in parallel). Failures become rows without
/// criteria; the minimum of each criterion is flagged.
pub fn compare_models(series: &TimeSeries, specs: &[GarchSpec]) -> Result<Vec<ComparisonRow>> {
    if specs.len() < 2 {
        return domain("comparison needs at least two models");
    }
    let mut rows: Vec<ComparisonRow> = specs
        .par_iter()
        .map(|spec| match fit_garch_series(series, spec) {
            Ok(f) => ComparisonRow {
                model: spec.label(),
                distribution: spec.distribution,
                criteria: Some(f.criteria),
                loglik: Some(f.loglik),
                all_significant: f.all_significant(0.05),
                converged: f.converged,
                error: None,
                best_aic: false,
                best_bic: false,
                best_hqc: false,
            },
            Err(e) => ComparisonRow {
                model: spec.label(),
                distribution: spec.distribution,
                criteria: None,
                loglik: None,
                all_significant: false,
                converged: false,
                error: Some(e.to_string()),
                best_aic: false,
                best_bic: false,
                best_hqc: false,
            },
        })
        .collect();
    let argmin = |f: fn(&Criteria) -> f64| {
        rows.iter()
            .enumerate()
            .filter_map(|(i, r)| r.criteria.as_ref().map(|c| (i, f(c))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    };
    let (ia, ib, ih) = (argmin(|c| c.aic), argmin(|c| c.bic), argmin(|c| c.hqc));
    if let Some(i) = ia {
        rows[i].best_aic = true;
    }
    if let Some(i) = ib {
        rows[i].best_bic = true;
    }
    if let Some(i) = ih {
        rows[i].best_hqc = true;
    }
    Ok(rows)
}
