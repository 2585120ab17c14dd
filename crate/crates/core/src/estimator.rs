//! Smith's lower-envelope estimator for polynomial regression with
//! non-negative errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus, RowSense, Sense};
use crate::models::regressor;
use crate::scalar::Scalar;

/// Observations `(x_i, y_i)` for a degree-`p` polynomial fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    degree: usize,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>, degree: usize) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::invalid("dataset", "x and y columns differ in length"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset", "observations must be finite"));
        }
        if xs.len() < degree + 1 {
            return Err(Error::invalid("dataset", format!("need at least {} observations", degree + 1)));
        }
        let distinct = distinct_xs(&xs).len();
        if distinct < degree + 1 {
            return Err(Error::invalid(
                "dataset",
                format!("rank deficient: {distinct} distinct x values for {} coefficients", degree + 1),
            ));
        }
        Ok(Dataset { xs, ys, degree })
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `f(x_i)ᵀθ` at every observation.
    pub fn fitted(&self, theta: &[T]) -> Vec<T> {
        self.xs
            .iter()
            .map(|&x| regressor(x, self.degree).iter().zip(theta).map(|(&f, &t)| f * t).sum())
            .collect()
    }
}

fn distinct_xs<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite x"));
    v.dedup();
    v
}

/// What the envelope LP maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SmithObjective {
    /// `Σ_i ŷ_i`: the maximum-likelihood fit under exponential errors.
    /// Equals `n θ₀` on balanced linear designs.
    #[default]
    SumFitted,
    /// `θ₀` alone; not unique when some coefficients are unconstrained by it.
    Intercept,
}

/// Fit maximizing `Σ ŷ_i` subject to `ŷ_i ≤ y_i`.
pub fn smith_fit<T: Scalar>(data: &Dataset<T>) -> Result<Vec<T>> {
    smith_fit_with(data, SmithObjective::SumFitted)
}

pub fn smith_fit_with<T: Scalar>(data: &Dataset<T>, objective: SmithObjective) -> Result<Vec<T>> {
    let d = data.degree + 1;
    // Only the lowest response at each distinct x can bind.
    let mut rows: Vec<(T, T, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&i, &j| data.xs[i].partial_cmp(&data.xs[j]).expect("finite x"));
    for i in order {
        let (x, y) = (data.xs[i], data.ys[i]);
        match rows.last_mut() {
            Some(last) if last.0 == x => {
                last.1 = last.1.min(y);
                last.2 += 1;
            }
            _ => rows.push((x, y, 1)),
        }
    }
    let c: Vec<T> = match objective {
        SmithObjective::SumFitted => {
            let mut c = vec![T::zero(); d];
            for &(x, _, count) in &rows {
                let k = T::from_usize(count).expect("count");
                for (cj, fj) in c.iter_mut().zip(regressor(x, data.degree)) {
                    *cj += k * fj;
                }
            }
            c
        }
        SmithObjective::Intercept => {
            let mut c = vec![T::zero(); d];
            c[0] = T::one();
            c
        }
    };
    let mut prog = LinearProgram::new(Sense::Maximize, c).all_free();
    for &(x, y, _) in &rows {
        prog.constraint(regressor(x, data.degree), RowSense::Le, y);
    }
    let sol = lp::solve(&prog)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.x),
        LpStatus::Unbounded => Err(Error::Unbounded {
            context: Some(format!(
                "rank-deficient design: {} distinct x values cannot pin {} coefficients",
                rows.len(),
                d
            )),
        }),
        LpStatus::Infeasible => Err(Error::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_line_recovered() {
        let xs = vec![-1.0, 0.0, 1.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x).collect();
        let theta = smith_fit(&Dataset::new(xs, ys, 1).unwrap()).unwrap();
        assert!((theta[0] - 3.0).abs() < 1e-12 && (theta[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn envelope_and_equivariance() {
        let xs = vec![-1.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.0];
        let e = [0.3, 0.1, 0.7, 0.2, 0.05, 1.1, 0.4];
        let ys: Vec<f64> = xs.iter().zip(e).map(|(x, e)| 1.0 - 0.5 * x + e).collect();
        let data = Dataset::new(xs.clone(), ys.clone(), 1).unwrap();
        let th = smith_fit(&data).unwrap();
        for (fit, y) in data.fitted(&th).iter().zip(&ys) {
            assert!(*fit <= y + 1e-8);
        }
        let shifted: Vec<f64> = ys.iter().zip(&xs).map(|(y, x)| y + 2.0 + 3.0 * x).collect();
        let th2 = smith_fit(&Dataset::new(xs, shifted, 1).unwrap()).unwrap();
        assert!((th2[0] - th[0] - 2.0).abs() < 1e-10 && (th2[1] - th[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn intercept_objective_agrees_on_balanced_line() {
        let xs = vec![-1.0f64, -1.0, 1.0, 1.0];
        let ys = vec![0.4, 0.2, 2.5, 2.1];
        let data = Dataset::new(xs, ys, 1).unwrap();
        let a = smith_fit(&data).unwrap();
        let b = smith_fit_with(&data, SmithObjective::Intercept).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_rejected() {
        assert!(Dataset::new(vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0], 1).is_err());
        assert!(Dataset::new(vec![1.0], vec![0.0, 1.0], 0).is_err());
    }
}
