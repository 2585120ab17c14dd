//! Error families and the non-regular polynomial regression model.
//!
//! Every error family here has support `(0, ∞)` and behaves like
//! `β c y^(β-1)` as `y → 0⁺`; the constant `c` drives the Hellinger
//! information of the shifted (location) model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{gamma_fn, gamma_lower_regularized, Scalar};

/// Error distribution family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorFamily {
    Gamma,
    Weibull,
    /// Gamma with shape 1; `sigma` is the scale, i.e. the reciprocal rate.
    Exponential,
}

impl std::str::FromStr for ErrorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" => Ok(ErrorFamily::Gamma),
            "weibull" => Ok(ErrorFamily::Weibull),
            "exponential" | "exp" => Ok(ErrorFamily::Exponential),
            other => Err(Error::invalid("family", format!("unknown family `{other}`"))),
        }
    }
}

/// Non-negative error distribution with shape `beta ∈ [1, 2)` and scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel<T> {
    family: ErrorFamily,
    beta: T,
    sigma: T,
}

impl<T: Scalar> ErrorModel<T> {
    pub fn new(family: ErrorFamily, beta: T, sigma: T) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", "scale must be positive and finite"));
        }
        if family == ErrorFamily::Exponential && beta != T::one() {
            return Err(Error::invalid("beta", "exponential family has shape 1"));
        }
        if !beta.is_finite() || beta < T::one() {
            return Err(Error::invalid("beta", "shape must satisfy beta >= 1"));
        }
        if beta >= T::lit(2.0) {
            return Err(Error::RegularRegime { beta: beta.as_f64() });
        }
        Ok(ErrorModel {
            family,
            beta,
            sigma,
        })
    }

    pub fn gamma(beta: T, sigma: T) -> Result<Self> {
        Self::new(ErrorFamily::Gamma, beta, sigma)
    }

    pub fn weibull(beta: T, sigma: T) -> Result<Self> {
        Self::new(ErrorFamily::Weibull, beta, sigma)
    }

    /// Exponential errors with the given rate.
    pub fn exponential(rate: T) -> Result<Self> {
        if !(rate > T::zero()) {
            return Err(Error::invalid("rate", "rate must be positive"));
        }
        Self::new(ErrorFamily::Exponential, T::one(), T::one() / rate)
    }

    pub fn family(&self) -> ErrorFamily {
        self.family
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    fn is_gamma_like(&self) -> bool {
        matches!(self.family, ErrorFamily::Gamma | ErrorFamily::Exponential)
    }

    /// Density at `y`; zero on `y < 0`. At `y = 0` returns the right limit.
    pub fn density(&self, y: T) -> T {
        if y < T::zero() || !y.is_finite() {
            return T::zero();
        }
        let (b, s) = (self.beta, self.sigma);
        let z = y / s;
        let power = if b == T::one() { T::one() } else { z.powf(b - T::one()) };
        if self.is_gamma_like() {
            power * (-z).exp() / (gamma_fn(b) * s)
        } else {
            b / s * power * (-(z.powf(b))).exp()
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, y: T) -> T {
        if y <= T::zero() {
            return T::zero();
        }
        let z = y / self.sigma;
        if self.is_gamma_like() {
            gamma_lower_regularized(self.beta, z)
        } else {
            -(-(z.powf(self.beta))).exp_m1()
        }
    }

    /// Small-y constant `c` with `density(y) ~ β c y^(β-1)` as `y → 0⁺`.
    pub fn small_y_constant(&self) -> T {
        let (b, s) = (self.beta, self.sigma);
        if self.is_gamma_like() {
            T::one() / (b * s.powf(b) * gamma_fn(b))
        } else {
            s.powf(-b)
        }
    }

    pub fn mean(&self) -> T {
        if self.is_gamma_like() {
            self.beta * self.sigma
        } else {
            self.sigma * gamma_fn(T::one() + T::one() / self.beta)
        }
    }

    /// Point beyond which the remaining mass is below ~1e-20; used to truncate
    /// integrals over the unbounded support.
    pub fn effective_upper(&self) -> T {
        self.sigma * T::lit(60.0)
    }

    /// One draw using the supplied generator.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let beta = self.beta.as_f64();
        let unit = if self.is_gamma_like() {
            marsaglia_tsang(beta, rng)
        } else {
            let u: f64 = rng.random();
            (-(-u).ln_1p()).powf(1.0 / beta)
        };
        T::lit(unit) * self.sigma
    }

    /// `n` i.i.d. draws, deterministic in `seed`.
    pub fn sample_errors(&self, n: usize, seed: u64) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }
}

/// Squeeze/accept-reject gamma sampler with unit scale; valid for shape >= 1.
fn marsaglia_tsang<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Uniform families whose support moves with the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniformVariant {
    /// Unif(0, θ), θ > 0.
    Scale,
    /// Unif(1/θ, θ), θ > 1.
    Reciprocal,
    /// Unif(θ, θ²), θ > 1.
    PowerPair,
    /// Unif(θ₁, θ₁ + θ₂), θ₂ > 0.
    LocScale,
}

impl std::str::FromStr for UniformVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "scale" => Ok(UniformVariant::Scale),
            "reciprocal" => Ok(UniformVariant::Reciprocal),
            "power-pair" | "powerpair" | "power" => Ok(UniformVariant::PowerPair),
            "loc-scale" | "locscale" => Ok(UniformVariant::LocScale),
            other => Err(Error::invalid("uniform", format!("unknown variant `{other}`"))),
        }
    }
}

impl UniformVariant {
    pub fn dim(self) -> usize {
        match self {
            UniformVariant::LocScale => 2,
            _ => 1,
        }
    }

    pub fn in_domain<T: Scalar>(self, theta: &[T]) -> bool {
        if theta.len() != self.dim() || theta.iter().any(|t| !t.is_finite()) {
            return false;
        }
        match self {
            UniformVariant::Scale => theta[0] > T::zero(),
            UniformVariant::Reciprocal | UniformVariant::PowerPair => theta[0] > T::one(),
            UniformVariant::LocScale => theta[1] > T::zero(),
        }
    }

    /// Support interval `(lo, hi)` at `theta` (no domain check).
    pub fn support<T: Scalar>(self, theta: &[T]) -> (T, T) {
        let t = theta[0];
        match self {
            UniformVariant::Scale => (T::zero(), t),
            UniformVariant::Reciprocal => (T::one() / t, t),
            UniformVariant::PowerPair => (t, t * t),
            UniformVariant::LocScale => (t, t + theta[1]),
        }
    }
}

/// A uniform model at a fixed parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformModel<T> {
    variant: UniformVariant,
    theta: Vec<T>,
}

impl<T: Scalar> UniformModel<T> {
    pub fn new(variant: UniformVariant, theta: Vec<T>) -> Result<Self> {
        if !variant.in_domain(&theta) {
            return Err(Error::Domain(format!(
                "{variant:?} requires a valid parameter vector of length {}",
                variant.dim()
            )));
        }
        Ok(UniformModel { variant, theta })
    }

    pub fn variant(&self) -> UniformVariant {
        self.variant
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn support(&self) -> (T, T) {
        self.variant.support(&self.theta)
    }

    pub fn density(&self, y: T) -> T {
        let (lo, hi) = self.support();
        if y >= lo && y <= hi {
            T::one() / (hi - lo)
        } else {
            T::zero()
        }
    }
}

/// Regressor vector `(1, x, …, x^p)`.
pub fn regressor<T: Scalar>(x: T, degree: usize) -> Vec<T> {
    let mut f = Vec::with_capacity(degree + 1);
    let mut power = T::one();
    for _ in 0..=degree {
        f.push(power);
        power *= x;
    }
    f
}

/// `y = θ₀ + Σ_k θ_k x^k + ε` on the design interval `[-A, A]`, with `ε` from an [`ErrorModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel<T> {
    degree: usize,
    a: T,
    theta: Vec<T>,
    error: ErrorModel<T>,
}

impl<T: Scalar> RegressionModel<T> {
    pub fn new(degree: usize, a: T, theta: Vec<T>, error: ErrorModel<T>) -> Result<Self> {
        if degree < 1 {
            return Err(Error::invalid("degree", "polynomial degree must be at least 1"));
        }
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::invalid("A", "design bound must be positive"));
        }
        if theta.len() != degree + 1 {
            return Err(Error::invalid(
                "theta",
                format!("expected {} coefficients, got {}", degree + 1, theta.len()),
            ));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("theta", "coefficients must be finite"));
        }
        Ok(RegressionModel {
            degree,
            a,
            theta,
            error,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn error(&self) -> &ErrorModel<T> {
        &self.error
    }

    /// Mean `g(x, θ)` and regressor `f(x)`; rejects points outside `[-A, A]`.
    pub fn mean_and_regressor(&self, x: T) -> Result<(T, Vec<T>)> {
        if !x.is_finite() || x.abs() > self.a * (T::one() + T::epsilon()) {
            return Err(Error::Domain(format!(
                "design point {x} lies outside [-{a}, {a}]",
                a = self.a
            )));
        }
        let f = regressor(x, self.degree);
        let g = crate::scalar::dot(&f, &self.theta);
        Ok((g, f))
    }
}
