//! Monte Carlo risk of Smith's estimator under a design, and the sample
//! maximum of `Unif(0, θ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{Error, Result};
use crate::estimator::{smith_fit, Dataset};
use crate::models::{regressor, ErrorModel};
use crate::scalar::Scalar;

/// Per-point sample sizes by largest-remainder rounding of `n w_i`.
pub fn realize_design<T: Scalar>(design: &Design<T>, n: usize) -> Result<Vec<usize>> {
    let k = design.support_size();
    if n < k {
        return Err(Error::invalid("n", format!("sample size {n} is below the support size {k}")));
    }
    let nf = T::from_usize(n).expect("sample size");
    let mut counts = Vec::with_capacity(k);
    let mut remainders = Vec::with_capacity(k);
    for (i, p) in design.points().iter().enumerate() {
        let target = nf * p.w;
        let base = target.floor();
        counts.push(base.to_usize().expect("non-negative count"));
        remainders.push((target - base, i));
    }
    let assigned: usize = counts.iter().sum();
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite weights").then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Distribution of the additive errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ErrorSource<T> {
    Model(ErrorModel<T>),
    /// Point mass at zero; every fit is exact.
    Degenerate,
}

impl<T: Scalar> ErrorSource<T> {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            ErrorSource::Model(m) => m.sample(rng),
            ErrorSource::Degenerate => T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimPlan<T> {
    pub design: Design<T>,
    pub n: usize,
    pub degree: usize,
    pub theta: Vec<T>,
    pub errors: ErrorSource<T>,
    pub replicates: usize,
    pub seed: u64,
}

impl<T: Scalar> SimPlan<T> {
    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates", "need at least one replicate"));
        }
        if self.theta.len() != self.degree + 1 {
            return Err(Error::invalid("theta", "length must be degree + 1"));
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("theta", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate<T> {
    pub per_component_mse: Vec<T>,
    /// Monte Carlo standard error of each component's MSE.
    pub per_component_se: Vec<T>,
    pub total_risk: T,
    /// Monte Carlo standard error of `total_risk`.
    pub mc_standard_error: T,
    pub replicates: usize,
    pub failed: usize,
    pub seed: u64,
}

/// Generator for replicate `r`: stream `r` of the seed's ChaCha8 sequence.
pub fn replicate_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

fn one_replicate<T: Scalar>(plan: &SimPlan<T>, xs: &[T], means: &[T], r: usize) -> Result<Vec<T>> {
    let mut rng = replicate_rng(plan.seed, r);
    let ys: Vec<T> = means.iter().map(|&m| m + plan.errors.sample(&mut rng)).collect();
    let data = Dataset::new(xs.to_vec(), ys, plan.degree)?;
    let fit = smith_fit(&data)?;
    Ok(fit.iter().zip(&plan.theta).map(|(&a, &b)| (a - b) * (a - b)).collect())
}

/// Mean squared error of Smith's estimator per component, over `replicates`
/// independent datasets from the realized design. Results do not depend on
/// the number of threads.
pub fn mc_risk<T: Scalar>(plan: &SimPlan<T>) -> Result<RiskEstimate<T>> {
    plan.validate()?;
    let counts = realize_design(&plan.design, plan.n)?;
    let xs: Vec<T> = plan
        .design
        .points()
        .iter()
        .zip(&counts)
        .flat_map(|(p, &c)| std::iter::repeat_n(p.x, c))
        .collect();
    let means: Vec<T> = xs
        .iter()
        .map(|&x| regressor(x, plan.degree).iter().zip(&plan.theta).map(|(&f, &t)| f * t).sum())
        .collect();
    let outcomes: Vec<Result<Vec<T>>> = (0..plan.replicates)
        .into_par_iter()
        .map(|r| one_replicate(plan, &xs, &means, r))
        .collect();

    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    if failed * 100 > plan.replicates {
        let first = outcomes
            .iter()
            .find_map(|o| o.as_ref().err())
            .map(|e| e.to_string())
            .unwrap_or_default();
        return Err(Error::SimulationFailures {
            failed,
            total: plan.replicates,
            first,
        });
    }
    let ok: Vec<&Vec<T>> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let d = plan.degree + 1;
    let m = T::from_usize(ok.len()).expect("replicate count");
    let column = |k: usize| ok.iter().map(move |v| v[k]);
    let totals: Vec<T> = ok.iter().map(|v| v.iter().copied().sum()).collect();
    let per_component_mse: Vec<T> = (0..d).map(|k| column(k).sum::<T>() / m).collect();
    let per_component_se: Vec<T> = (0..d)
        .map(|k| standard_error(column(k), per_component_mse[k], ok.len()))
        .collect();
    let total_risk: T = per_component_mse.iter().copied().sum();
    let mc_standard_error = standard_error(totals.iter().copied(), total_risk, ok.len());
    Ok(RiskEstimate {
        per_component_mse,
        per_component_se,
        total_risk,
        mc_standard_error,
        replicates: ok.len(),
        failed,
        seed: plan.seed,
    })
}

/// `s / √m` with the sample standard deviation `s`; infinite for one sample.
fn standard_error<T: Scalar>(values: impl Iterator<Item = T>, mean: T, m: usize) -> T {
    if m < 2 {
        return T::infinity();
    }
    let ss: T = values.map(|v| (v - mean) * (v - mean)).sum();
    let mf = T::from_usize(m).expect("count");
    (ss / (mf - T::one())).sqrt() / mf.sqrt()
}

/// `θ² n / ((n+1)²(n+2)) + (θn/(n+1) − θ)²`, the MSE of the sample maximum.
pub fn unif_mle_mse<T: Scalar>(theta: T, n: usize) -> Result<T> {
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::invalid("theta", "must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let nf = T::from_usize(n).expect("sample size");
    let n1 = nf + T::one();
    let bias = theta * nf / n1 - theta;
    Ok(theta * theta * nf / (n1 * n1 * (nf + T::lit(2.0))) + bias * bias)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate<T> {
    pub mean: T,
    pub standard_error: T,
    pub replicates: usize,
}

/// Monte Carlo MSE of the sample maximum of `n` draws from `Unif(0, θ)`.
pub fn unif_max_mc<T: Scalar>(theta: T, n: usize, replicates: usize, seed: u64) -> Result<McEstimate<T>> {
    unif_mle_mse(theta, n)?;
    if replicates == 0 {
        return Err(Error::invalid("replicates", "need at least one replicate"));
    }
    let errors: Vec<T> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(seed, r);
            let max = (0..n).map(|_| rng.random::<f64>()).fold(0.0f64, f64::max);
            let e = T::lit(max) * theta - theta;
            e * e
        })
        .collect();
    let mean = errors.iter().copied().sum::<T>() / T::from_usize(replicates).expect("count");
    Ok(McEstimate {
        mean,
        standard_error: standard_error(errors.iter().copied(), mean, replicates),
        replicates,
    })
}
