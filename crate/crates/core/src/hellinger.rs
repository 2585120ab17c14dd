//! Squared Hellinger distances, the local expansion
//! `h(θ; θ + εu) ≈ J(θ; u) |ε|^α`, and closed forms for location, uniform
//! and reparametrized models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::{regressor, ErrorModel, UniformModel, UniformVariant};
use crate::optim::golden_section;
use crate::quadrature::Quadrature;
use crate::scalar::{dot, is_unit, norm, Scalar};

/// How an [`InfoResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfoMethod {
    ClosedForm,
    Quadrature,
    LimitFit,
}

/// Regularity index and Hellinger information, optionally with the direction
/// it refers to (absent for scalar parameters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoResult<T> {
    pub alpha: T,
    #[serde(rename = "J")]
    pub j: T,
    pub direction: Option<Vec<T>>,
    pub method: InfoMethod,
}

/// A density on the real line together with the points where it (or its
/// square root) is not smooth.
pub trait Density<T: Scalar> {
    fn pdf(&self, y: T) -> T;
    /// Sorted or unsorted kinks; the extremes bound the (effective) support.
    fn breakpoints(&self) -> Vec<T>;
}

/// A family `θ ↦ P_θ` of densities on the real line.
pub trait ParametricFamily<T: Scalar> {
    fn dim(&self) -> usize;
    fn in_domain(&self, theta: &[T]) -> bool;
    fn density(&self, theta: &[T], y: T) -> T;
    fn breakpoints(&self, theta: &[T]) -> Vec<T>;

    fn at<'a>(&'a self, theta: &'a [T]) -> Member<'a, Self, T>
    where
        Self: Sized,
    {
        Member { family: self, theta }
    }
}

/// One member `P_θ` of a [`ParametricFamily`].
pub struct Member<'a, F: ?Sized, T> {
    family: &'a F,
    theta: &'a [T],
}

impl<T: Scalar, F: ParametricFamily<T>> Density<T> for Member<'_, F, T> {
    fn pdf(&self, y: T) -> T {
        self.family.density(self.theta, y)
    }

    fn breakpoints(&self) -> Vec<T> {
        self.family.breakpoints(self.theta)
    }
}

impl<T: Scalar> Density<T> for ErrorModel<T> {
    fn pdf(&self, y: T) -> T {
        self.density(y)
    }

    fn breakpoints(&self) -> Vec<T> {
        vec![T::zero(), self.effective_upper()]
    }
}

impl<T: Scalar> Density<T> for UniformModel<T> {
    fn pdf(&self, y: T) -> T {
        self.density(y)
    }

    fn breakpoints(&self) -> Vec<T> {
        let (lo, hi) = self.support();
        vec![lo, hi]
    }
}

impl<T: Scalar> ParametricFamily<T> for UniformVariant {
    fn dim(&self) -> usize {
        UniformVariant::dim(*self)
    }

    fn in_domain(&self, theta: &[T]) -> bool {
        UniformVariant::in_domain(*self, theta)
    }

    fn density(&self, theta: &[T], y: T) -> T {
        let (lo, hi) = self.support(theta);
        if y >= lo && y <= hi {
            T::one() / (hi - lo)
        } else {
            T::zero()
        }
    }

    fn breakpoints(&self, theta: &[T]) -> Vec<T> {
        let (lo, hi) = self.support(theta);
        vec![lo, hi]
    }
}

/// Location family `p_θ(y) = p₀(y − θ)` generated by an error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationFamily<T>(pub ErrorModel<T>);

impl<T: Scalar> ParametricFamily<T> for LocationFamily<T> {
    fn dim(&self) -> usize {
        1
    }

    fn in_domain(&self, theta: &[T]) -> bool {
        theta.len() == 1 && theta[0].is_finite()
    }

    fn density(&self, theta: &[T], y: T) -> T {
        self.0.density(y - theta[0])
    }

    fn breakpoints(&self, theta: &[T]) -> Vec<T> {
        vec![theta[0], theta[0] + self.0.effective_upper()]
    }
}

/// A single observation `y = f(x)ᵀθ + ε` of the polynomial regression model.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionPoint<T> {
    pub x: T,
    pub degree: usize,
    pub error: ErrorModel<T>,
}

impl<T: Scalar> RegressionPoint<T> {
    fn mean(&self, theta: &[T]) -> T {
        dot(&regressor(self.x, self.degree), theta)
    }
}

impl<T: Scalar> ParametricFamily<T> for RegressionPoint<T> {
    fn dim(&self) -> usize {
        self.degree + 1
    }

    fn in_domain(&self, theta: &[T]) -> bool {
        theta.len() == self.degree + 1 && theta.iter().all(|t| t.is_finite())
    }

    fn density(&self, theta: &[T], y: T) -> T {
        self.error.density(y - self.mean(theta))
    }

    fn breakpoints(&self, theta: &[T]) -> Vec<T> {
        let m = self.mean(theta);
        vec![m, m + self.error.effective_upper()]
    }
}

/// Normal location model with known standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalLocation<T> {
    pub sigma: T,
}

/// Normal model with parameter `(μ, σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormalLocationScale;

fn normal_pdf<T: Scalar>(y: T, mu: T, sigma: T) -> T {
    let z = (y - mu) / sigma;
    (-(z * z) / T::lit(2.0)).exp() / (sigma * T::TAU().sqrt())
}

const NORMAL_SPAN: f64 = 40.0;

fn normal_breakpoints<T: Scalar>(mu: T, sigma: T) -> Vec<T> {
    let span = T::lit(NORMAL_SPAN) * sigma;
    vec![mu - span, mu, mu + span]
}

impl<T: Scalar> ParametricFamily<T> for NormalLocation<T> {
    fn dim(&self) -> usize {
        1
    }

    fn in_domain(&self, theta: &[T]) -> bool {
        theta.len() == 1 && theta[0].is_finite()
    }

    fn density(&self, theta: &[T], y: T) -> T {
        normal_pdf(y, theta[0], self.sigma)
    }

    fn breakpoints(&self, theta: &[T]) -> Vec<T> {
        normal_breakpoints(theta[0], self.sigma)
    }
}

impl<T: Scalar> ParametricFamily<T> for NormalLocationScale {
    fn dim(&self) -> usize {
        2
    }

    fn in_domain(&self, theta: &[T]) -> bool {
        theta.len() == 2 && theta[0].is_finite() && theta[1] > T::zero() && theta[1].is_finite()
    }

    fn density(&self, theta: &[T], y: T) -> T {
        normal_pdf(y, theta[0], theta[1])
    }

    fn breakpoints(&self, theta: &[T]) -> Vec<T> {
        normal_breakpoints(theta[0], theta[1])
    }
}

/// Families with an analytic Fisher information matrix.
pub trait FisherFamily<T: Scalar>: ParametricFamily<T> {
    fn fisher(&self, theta: &[T]) -> Matrix<T>;
}

impl<T: Scalar> FisherFamily<T> for NormalLocation<T> {
    fn fisher(&self, _theta: &[T]) -> Matrix<T> {
        Matrix::diagonal(&[T::one() / (self.sigma * self.sigma)])
    }
}

impl<T: Scalar> FisherFamily<T> for NormalLocationScale {
    fn fisher(&self, theta: &[T]) -> Matrix<T> {
        let s2 = theta[1] * theta[1];
        Matrix::diagonal(&[T::one() / s2, T::lit(2.0) / s2])
    }
}

/// `∫ (√p − √q)²` by quadrature over the union of both supports, clamped to `[0, 2]`.
pub fn hellinger_sq_numeric<T, P, Q>(p: &P, q: &Q, quad: &Quadrature<T>) -> Result<T>
where
    T: Scalar,
    P: Density<T> + ?Sized,
    Q: Density<T> + ?Sized,
{
    let mut points = p.breakpoints();
    points.extend(q.breakpoints());
    let integrand = |y: T| {
        let d = p.pdf(y).max(T::zero()).sqrt() - q.pdf(y).max(T::zero()).sqrt();
        d * d
    };
    let r = quad.integrate(integrand, &points)?;
    Ok(r.value.max(T::zero()).min(T::lit(2.0)))
}

/// Exact squared Hellinger distance between two members of a uniform family:
/// `2 (1 − |overlap| / √(|S_θ| |S_ϑ|))`.
pub fn hellinger_sq_closed<T: Scalar>(variant: UniformVariant, theta: &[T], vartheta: &[T]) -> Result<T> {
    for t in [theta, vartheta] {
        if !variant.in_domain(t) {
            return Err(Error::Domain(format!("{variant:?} parameter out of domain")));
        }
    }
    let (a0, a1) = variant.support(theta);
    let (b0, b1) = variant.support(vartheta);
    let overlap = (a1.min(b1) - a0.max(b0)).max(T::zero());
    let h = T::lit(2.0) * (T::one() - overlap / ((a1 - a0) * (b1 - b0)).sqrt());
    Ok(h.max(T::zero()).min(T::lit(2.0)))
}

/// Joint squared distance of independent components from the per-component
/// values: affinities multiply, `1 − hⁿ/2 = Π(1 − h_i/2)`.
pub fn product_hellinger_sq<T: Scalar>(components: &[T]) -> T {
    let affinity = components
        .iter()
        .fold(T::one(), |acc, &h| acc * (T::one() - h / T::lit(2.0)));
    T::lit(2.0) * (T::one() - affinity)
}

/// Hellinger information of the uniform families at α = 1.
pub fn uniform_info<T: Scalar>(variant: UniformVariant, theta: &[T], u: &[T]) -> Result<InfoResult<T>> {
    if !variant.in_domain(theta) {
        return Err(Error::Domain(format!("{variant:?} parameter out of domain")));
    }
    if u.len() != variant.dim() {
        return Err(Error::invalid("direction", "length must match the parameter dimension"));
    }
    check_unit(u)?;
    let t = theta[0];
    let one = T::one();
    let two = T::lit(2.0);
    let j = match variant {
        UniformVariant::Scale => one / t,
        UniformVariant::Reciprocal => (t * t + one) / (t * (t * t - one)),
        UniformVariant::PowerPair => (two * t + one) / (t * (t - one)),
        UniformVariant::LocScale => {
            let (u1, u2) = (u[0], u[1]);
            let g = two * u1.max(T::zero()) - two * (u1 + u2).min(T::zero()) + u2;
            g / theta[1]
        }
    };
    Ok(InfoResult {
        alpha: one,
        j,
        direction: (variant.dim() > 1).then(|| u.to_vec()),
        method: InfoMethod::ClosedForm,
    })
}

/// Geometric ladder `ε_k = eps0 · ratio^k`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonLadder<T> {
    eps0: T,
    ratio: T,
    count: usize,
}

impl<T: Scalar> Default for EpsilonLadder<T> {
    fn default() -> Self {
        EpsilonLadder {
            eps0: T::lit(1e-2),
            ratio: T::lit(0.5),
            count: 8,
        }
    }
}

impl<T: Scalar> EpsilonLadder<T> {
    pub fn new(eps0: T, ratio: T, count: usize) -> Result<Self> {
        if !(eps0 > T::zero()) || !eps0.is_finite() {
            return Err(Error::invalid("eps0", "must be positive"));
        }
        if !(ratio > T::zero() && ratio < T::one()) {
            return Err(Error::invalid("ratio", "must lie in (0, 1)"));
        }
        if count < 4 {
            return Err(Error::invalid("count", "ladder needs at least 4 points"));
        }
        Ok(EpsilonLadder { eps0, ratio, count })
    }

    pub fn values(&self) -> Vec<T> {
        let mut e = self.eps0;
        (0..self.count)
            .map(|_| {
                let v = e;
                e *= self.ratio;
                v
            })
            .collect()
    }
}

/// Details of a limit fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitFit<T> {
    pub info: InfoResult<T>,
    pub epsilons: Vec<T>,
    pub h: Vec<T>,
    /// RMS residual of the plain log-log power-law fit.
    pub loglog_residual: T,
    /// Whether the higher-order terms were fitted (false: plain power law).
    pub corrected: bool,
}

const NON_IDENTIFIABLE: f64 = 1e-12;
const PLAIN_FIT_RESIDUAL: f64 = 1e-5;
const ALPHA_RANGE: (f64, f64) = (0.05, 2.0);

/// Estimates `(α, J)` from `h(θ; θ + ε_k u)` over the ladder.
pub fn estimate_alpha_and_j<T, F>(
    family: &F,
    theta: &[T],
    u: &[T],
    ladder: &EpsilonLadder<T>,
) -> Result<InfoResult<T>>
where
    T: Scalar,
    F: ParametricFamily<T>,
{
    limit_fit(family, theta, u, ladder, &Quadrature::relative(1e-11)).map(|f| f.info)
}

/// Fits the local expansion of `h` along `u`.
///
/// The plain fit regresses `log h` on `log ε`. Unless it is already exact to
/// `1e-5` in the logs, the next-order terms are fitted too:
/// `h ≈ J ε^α + K₁ ε^(α+1) + K₂ ε²`, linear in `(J, K₁, K₂)` for fixed `α`
/// (relative least squares), with `α` profiled. Exponents closer than 0.15
/// to one already present are dropped.
pub fn limit_fit<T, F>(
    family: &F,
    theta: &[T],
    u: &[T],
    ladder: &EpsilonLadder<T>,
    quad: &Quadrature<T>,
) -> Result<LimitFit<T>>
where
    T: Scalar,
    F: ParametricFamily<T>,
{
    let d = family.dim();
    if theta.len() != d || u.len() != d {
        return Err(Error::invalid("direction", "length must match the parameter dimension"));
    }
    check_unit(u)?;
    if !family.in_domain(theta) {
        return Err(Error::Domain("base parameter outside the model domain".into()));
    }
    let epsilons = ladder.values();
    let mut h = Vec::with_capacity(epsilons.len());
    for &eps in &epsilons {
        let shifted: Vec<T> = theta.iter().zip(u).map(|(&t, &ui)| t + eps * ui).collect();
        if !family.in_domain(&shifted) {
            return Err(Error::Domain(format!("theta + {eps} u leaves the parameter domain")));
        }
        h.push(hellinger_sq_numeric(&family.at(theta), &family.at(&shifted), quad)?);
    }
    let floor = T::lit(NON_IDENTIFIABLE);
    if h.iter().all(|&v| v < floor) || h.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::NonIdentifiable);
    }

    let lx: Vec<T> = epsilons.iter().map(|e| e.ln()).collect();
    let ly: Vec<T> = h.iter().map(|v| v.ln()).collect();
    let (slope, intercept, residual) = loglog_fit(&lx, &ly);
    let mut alpha = slope;
    let mut j = intercept.exp();
    let mut corrected = false;
    if residual >= T::lit(PLAIN_FIT_RESIDUAL) {
        if let Some((a, jj)) = corrected_fit(&epsilons, &h) {
            alpha = a;
            j = jj;
            corrected = true;
        }
    }
    // α = 2 is the boundary of the admissible range; the fit may overshoot it
    // by rounding.
    alpha = alpha.min(T::lit(2.0));
    Ok(LimitFit {
        info: InfoResult {
            alpha,
            j,
            direction: (d > 1).then(|| u.to_vec()),
            method: InfoMethod::LimitFit,
        },
        epsilons,
        h,
        loglog_residual: residual,
        corrected,
    })
}

fn loglog_fit<T: Scalar>(x: &[T], y: &[T]) -> (T, T, T) {
    let n = T::from_usize(x.len()).expect("ladder length");
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let sxy: T = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let sxx: T = x.iter().map(|&a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: T = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - intercept - slope * a;
            r * r
        })
        .sum();
    (slope, intercept, (ssr / n).sqrt())
}

fn basis_exponents<T: Scalar>(alpha: T) -> Vec<T> {
    let gap = T::lit(0.15);
    let mut exps = vec![alpha];
    for e in [alpha + T::one(), T::lit(2.0)] {
        if exps.iter().all(|&x| (e - x).abs() >= gap) && e > alpha {
            exps.push(e);
        }
    }
    exps
}

/// Relative least squares for the coefficients at fixed α; returns
/// `(J, sum of squared relative residuals)`.
fn coefficients_at<T: Scalar>(alpha: T, eps: &[T], h: &[T]) -> Option<(T, T)> {
    let exps = basis_exponents(alpha);
    let k = exps.len();
    let rows: Vec<Vec<T>> = eps
        .iter()
        .zip(h)
        .map(|(&e, &hv)| exps.iter().map(|&p| e.powf(p) / hv).collect())
        .collect();
    let mut normal = Matrix::zeros(k, k);
    let mut rhs = vec![T::zero(); k];
    for r in &rows {
        for i in 0..k {
            rhs[i] += r[i];
            for j in 0..k {
                normal[(i, j)] += r[i] * r[j];
            }
        }
    }
    let (inv, cond) = normal.inverse_with_condition().ok()?;
    if !(cond < T::lit(1e14)) {
        return None;
    }
    let coef = inv.mul_vec(&rhs);
    let ssr = rows
        .iter()
        .map(|r| {
            let res = dot(r, &coef) - T::one();
            res * res
        })
        .sum();
    Some((coef[0], ssr))
}

fn corrected_fit<T: Scalar>(eps: &[T], h: &[T]) -> Option<(T, T)> {
    let objective = |a: T| coefficients_at(a, eps, h).map_or(T::infinity(), |(_, s)| s);
    let (lo, hi) = (T::lit(ALPHA_RANGE.0), T::lit(ALPHA_RANGE.1));
    let steps = 390;
    let step = (hi - lo) / T::from_usize(steps).expect("grid size");
    let mut best = (0usize, T::infinity());
    for i in 0..=steps {
        let v = objective(lo + step * T::from_usize(i).expect("grid index"));
        if v < best.1 {
            best = (i, v);
        }
    }
    if !best.1.is_finite() {
        return None;
    }
    let centre = lo + step * T::from_usize(best.0).expect("grid index");
    let a = (centre - step).max(lo);
    let b = (centre + step).min(hi);
    let (alpha, _) = golden_section(objective, a, b, T::tol(1e-12), 200);
    let (j, _) = coefficients_at(alpha, eps, h)?;
    (j > T::zero() && j.is_finite()).then_some((alpha, j))
}

fn check_unit<T: Scalar>(u: &[T]) -> Result<()> {
    if !is_unit(u) {
        return Err(Error::NotUnit {
            norm: norm(u).as_f64(),
        });
    }
    Ok(())
}

/// The constant `r(β) = ∫₀^∞ {(w+1)^b − w^b}² dw`, `b = (β−1)/2`, with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RBeta<T> {
    pub beta: T,
    pub value: T,
    /// Quadrature over `[0, W]`.
    pub head: T,
    /// Exact series for `∫_W^∞`.
    pub tail: T,
    /// Simple upper bound `b² W^(β−2) / (2−β)` on the tail.
    pub tail_bound: T,
    /// Quadrature over `[W, 10W]` plus the simple bound beyond `10W`.
    pub tail_block: T,
    pub cutoff: T,
}

const R_BETA_CUTOFF: f64 = 1e3;
const R_BETA_SERIES_TERMS: usize = 12;

/// `r(β)` for `1 ≤ β < 2`.
pub fn r_beta<T: Scalar>(beta: T) -> Result<T> {
    r_beta_report(beta).map(|r| r.value)
}

pub fn r_beta_report<T: Scalar>(beta: T) -> Result<RBeta<T>> {
    if !beta.is_finite() || beta < T::one() {
        return Err(Error::invalid("beta", "r(beta) requires beta >= 1"));
    }
    if beta >= T::lit(2.0) {
        return Err(Error::RegularRegime { beta: beta.as_f64() });
    }
    let w = T::lit(R_BETA_CUTOFF);
    let b = (beta - T::one()) / T::lit(2.0);
    if b == T::zero() {
        return Ok(RBeta {
            beta,
            value: T::zero(),
            head: T::zero(),
            tail: T::zero(),
            tail_bound: T::zero(),
            tail_block: T::zero(),
            cutoff: w,
        });
    }
    let quad = Quadrature::relative(1e-13);
    let f = |x: T| r_integrand(b, x);
    let head = quad.integrate(f, &[T::zero(), T::one(), w])?.value;
    let tail = r_tail_series(b, w);
    let bound_at = |x: T| b * b * x.powf(beta - T::lit(2.0)) / (T::lit(2.0) - beta);
    let ten_w = w * T::lit(10.0);
    let tail_block = quad.integrate(f, &[w, ten_w])?.value + bound_at(ten_w);
    Ok(RBeta {
        beta,
        value: head + tail,
        head,
        tail,
        tail_bound: bound_at(w),
        tail_block,
        cutoff: w,
    })
}

/// `{(w+1)^b − w^b}²`, written to avoid cancellation for large `w`.
pub(crate) fn r_integrand<T: Scalar>(b: T, w: T) -> T {
    let d = if w < T::one() {
        (w + T::one()).powf(b) - w.powf(b)
    } else {
        w.powf(b) * (b * (T::one() / w).ln_1p()).exp_m1()
    };
    d * d
}

/// `∫_W^∞ w^(2b) (Σ_k C(b,k) w^(−k))² dw` summed term by term.
fn r_tail_series<T: Scalar>(b: T, w: T) -> T {
    let mut binom = Vec::with_capacity(R_BETA_SERIES_TERMS + 1);
    let mut c = T::one();
    binom.push(c);
    for k in 1..=R_BETA_SERIES_TERMS {
        let kf = T::from_usize(k).expect("small index");
        c = c * (b - kf + T::one()) / kf;
        binom.push(c);
    }
    let two_b = T::lit(2.0) * b;
    let mut total = T::zero();
    for j in 1..=R_BETA_SERIES_TERMS {
        for k in 1..=R_BETA_SERIES_TERMS {
            let p = T::from_usize(j + k).expect("small index") - two_b - T::one();
            total += binom[j] * binom[k] * w.powf(-p) / p;
        }
    }
    total
}

/// Location-family information `J = c (1 + β r(β))` with `α = β`.
pub fn location_info<T: Scalar>(model: &ErrorModel<T>) -> Result<InfoResult<T>> {
    let beta = model.beta();
    let r = r_beta(beta)?;
    Ok(InfoResult {
        alpha: beta,
        j: model.small_y_constant() * (T::one() + beta * r),
        direction: None,
        method: if r == T::zero() {
            InfoMethod::ClosedForm
        } else {
            InfoMethod::Quadrature
        },
    })
}

/// Information of `θ ↦ P̃_{g(θ)}` along `u`: `|ġᵀu|^α J̃`.
pub fn reparam_info<T: Scalar>(base_j: T, alpha: T, gradient: &[T], u: &[T]) -> Result<T> {
    if gradient.len() != u.len() {
        return Err(Error::invalid("gradient", "length must match the direction"));
    }
    check_unit(u)?;
    if gradient.iter().all(|&g| g == T::zero()) {
        return Err(Error::ZeroGradient);
    }
    if !(alpha > T::zero() && alpha <= T::lit(2.0)) {
        return Err(Error::invalid("alpha", "must lie in (0, 2]"));
    }
    Ok(dot(gradient, u).abs().powf(alpha) * base_j)
}

/// Numerical `J(θ; u)` from the limit fit next to `¼ uᵀ I(θ) u`.
pub fn fisher_quadratic_check<T, F>(family: &F, theta: &[T], u: &[T]) -> Result<(T, T)>
where
    T: Scalar,
    F: FisherFamily<T>,
{
    check_unit(u)?;
    let fit = estimate_alpha_and_j(family, theta, u, &EpsilonLadder::default())?;
    let quarter = family.fisher(theta).quadratic_form(u) / T::lit(4.0);
    Ok((fit.j, quarter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ErrorFamily;

    fn quad() -> Quadrature<f64> {
        Quadrature::relative(1e-11)
    }

    #[test]
    fn identical_models_have_zero_distance() {
        let m = ErrorModel::<f64>::gamma(1.5, 1.0).unwrap();
        assert!(hellinger_sq_numeric(&m, &m, &quad()).unwrap() < 1e-9);
    }

    #[test]
    fn uniform_scale_pair() {
        let p = UniformModel::new(UniformVariant::Scale, vec![1.0]).unwrap();
        let q = UniformModel::new(UniformVariant::Scale, vec![2.0]).unwrap();
        let expected = 2.0 - 2.0 / 2f64.sqrt();
        let numeric = hellinger_sq_numeric(&p, &q, &quad()).unwrap();
        let closed = hellinger_sq_closed(UniformVariant::Scale, &[1.0], &[2.0]).unwrap();
        assert!((numeric - expected).abs() < 1e-9);
        assert!((closed - expected).abs() < 1e-14);
    }

    #[test]
    fn shifted_exponential_matches_overlap() {
        // ∫_δ^∞ √(e^{-y} e^{-(y-δ)}) dy = e^{-δ/2}
        let fam = LocationFamily(ErrorModel::<f64>::exponential(1.0).unwrap());
        let h = hellinger_sq_numeric(&fam.at(&[0.0]), &fam.at(&[0.1]), &quad()).unwrap();
        assert!((h - (2.0 - 2.0 * (-0.05f64).exp())).abs() < 1e-9, "{h}");
    }

    #[test]
    fn loc_scale_closed_form() {
        let v = UniformVariant::LocScale;
        assert_eq!(hellinger_sq_closed(v, &[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
        let h: f64 = hellinger_sq_closed(v, &[0.0, 1.0], &[0.1, 1.0]).unwrap();
        assert!((h - 0.2).abs() < 1e-14);
        assert!(hellinger_sq_closed(v, &[0.0, -1.0], &[0.1, 1.0]).is_err());
    }

    #[test]
    fn numeric_is_symmetric() {
        let fam = LocationFamily(ErrorModel::<f64>::weibull(1.3, 2.0).unwrap());
        let a = hellinger_sq_numeric(&fam.at(&[0.0]), &fam.at(&[0.3]), &quad()).unwrap();
        let b = hellinger_sq_numeric(&fam.at(&[0.3]), &fam.at(&[0.0]), &quad()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn limit_fit_on_uniform_scale() {
        let r = estimate_alpha_and_j::<f64, _>(&UniformVariant::Scale, &[2.0], &[1.0], &EpsilonLadder::default()).unwrap();
        assert!((r.alpha - 1.0).abs() < 0.01);
        assert!((r.j - 0.5).abs() / 0.5 < 0.01);
        assert_eq!(r.method, InfoMethod::LimitFit);
        assert!(r.direction.is_none());
    }

    #[test]
    fn limit_fit_is_direction_symmetric() {
        let fam = LocationFamily(ErrorModel::<f64>::gamma(1.5, 1.0).unwrap());
        let l = EpsilonLadder::default();
        let plus = estimate_alpha_and_j(&fam, &[0.0], &[1.0], &l).unwrap();
        let minus = estimate_alpha_and_j(&fam, &[0.0], &[-1.0], &l).unwrap();
        assert!((plus.j - minus.j).abs() / plus.j < 0.02);
        assert!((plus.alpha - minus.alpha).abs() < 0.02);
    }

    #[test]
    fn loc_scale_limit_fit_matches_g() {
        let v = UniformVariant::LocScale;
        let s = 0.5f64.sqrt();
        for u in [[1.0, 0.0], [0.0, 1.0], [s, s], [s, -s], [-0.6, 0.8]] {
            let fit = estimate_alpha_and_j(&v, &[0.0, 2.0], &u, &EpsilonLadder::default()).unwrap();
            let closed = uniform_info(v, &[0.0, 2.0], &u).unwrap();
            assert!((fit.j - closed.j).abs() / closed.j < 0.01, "{u:?}: {} vs {}", fit.j, closed.j);
        }
    }

    #[test]
    fn non_identifiable_direction() {
        let fam = RegressionPoint {
            x: 1.0,
            degree: 1,
            error: ErrorModel::exponential(1.0).unwrap(),
        };
        let s = 0.5f64.sqrt();
        let r = estimate_alpha_and_j(&fam, &[0.0, 0.0], &[s, -s], &EpsilonLadder::default());
        assert_eq!(r, Err(Error::NonIdentifiable));
    }

    #[test]
    fn normal_location_quarter_fisher() {
        let (j, quarter): (f64, f64) = fisher_quadratic_check(&NormalLocation { sigma: 1.0 }, &[0.0], &[1.0]).unwrap();
        assert!((quarter - 0.25).abs() < 1e-15);
        assert!((j - 0.25).abs() / 0.25 < 1e-3, "{j}");
    }

    #[test]
    fn normal_location_scale_ratio() {
        let fam = NormalLocationScale;
        let (j1, q1): (f64, f64) = fisher_quadratic_check(&fam, &[0.0, 1.5], &[1.0, 0.0]).unwrap();
        let (j2, q2): (f64, f64) = fisher_quadratic_check(&fam, &[0.0, 1.5], &[0.0, 1.0]).unwrap();
        assert!(((j2 / j1) - (q2 / q1)).abs() / (q2 / q1) < 0.01, "{j1} {j2}");
        assert!(fisher_quadratic_check(&fam, &[0.0, 1.5], &[2.0, 0.0]).is_err());
    }

    #[test]
    fn r_beta_edge_cases() {
        assert_eq!(r_beta(1.0f64).unwrap(), 0.0);
        assert!(matches!(r_beta(2.0f64), Err(Error::RegularRegime { .. })));
        assert!(r_beta(0.5f64).is_err());
        let r = r_beta_report(1.5f64).unwrap();
        assert!(r.tail <= r.tail_bound);
        assert!((r.tail_block - r.tail).abs() < r.tail_bound);
        assert!(r_beta(1.9f64).unwrap() < r_beta(1.99f64).unwrap());
    }

    #[test]
    fn location_info_examples() {
        let e = location_info(&ErrorModel::<f64>::exponential(1.0).unwrap()).unwrap();
        assert_eq!((e.alpha, e.j), (1.0, 1.0));
        let g = location_info(&ErrorModel::<f64>::new(ErrorFamily::Gamma, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(g.j, 1.0);
    }

    #[test]
    fn reparam_examples() {
        assert_eq!(reparam_info(1.0, 1.0, &[1.0, 1.0], &[1.0, 0.0]).unwrap(), 1.0);
        let v = reparam_info(2.0, 1.5, &[1.0, 2.0], &[0.0, 1.0]).unwrap();
        assert!((v - 2f64.powf(1.5) * 2.0).abs() < 1e-12);
        let s = 0.2f64.sqrt();
        let orth = reparam_info(1.0, 1.0, &[1.0, 2.0], &[2.0 * s, -s]).unwrap();
        assert!(orth.abs() < 1e-15);
        assert_eq!(reparam_info(1.0, 1.0, &[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroGradient));
    }

    #[test]
    fn reparam_matches_regression_point_limit_fit() {
        let error = ErrorModel::<f64>::weibull(1.5, 1.0).unwrap();
        let base = location_info(&error).unwrap();
        let fam = RegressionPoint {
            x: 2.0,
            degree: 1,
            error,
        };
        let u = [0.6, 0.8];
        let fit = estimate_alpha_and_j(&fam, &[0.0, 0.0], &u, &EpsilonLadder::default()).unwrap();
        let expected = reparam_info(base.j, 1.5, &[1.0, 2.0], &u).unwrap();
        assert!((fit.j - expected).abs() / expected < 0.02, "{} vs {expected}", fit.j);
    }

    #[test]
    fn product_distance_bounds() {
        let hs = [0.1, 0.3, 0.05];
        let joint = product_hellinger_sq(&hs);
        assert!(joint <= 2.0 * hs.iter().sum::<f64>());
        assert!(joint >= 0.3);
    }

    #[test]
    fn ladder_validation() {
        assert!(EpsilonLadder::new(1e-2, 0.5, 3).is_err());
        assert!(EpsilonLadder::new(1e-2, 1.0, 8).is_err());
        let v = EpsilonLadder::new(1.0, 0.5, 4).unwrap().values();
        assert_eq!(v, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn f32_uniform_closed_form() {
        let h = hellinger_sq_closed(UniformVariant::Scale, &[1.0f32], &[2.0]).unwrap();
        assert!((h - 0.585_786).abs() < 1e-5);
    }
}
