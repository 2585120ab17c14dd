//! Local minimax lower bounds and the two-point inequality behind them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInput<T> {
    pub alpha: T,
    /// Direction-free information `𝒥ₙ^ψ(θ)`.
    pub info_value: T,
    pub include_constant: bool,
}

/// All three quantities reported for a bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxBound<T> {
    pub bound_with_constant: T,
    pub bound_order: T,
    /// `ε = (3𝒥)^(−1/α)`, the radius of the two-point construction.
    pub epsilon_diag: T,
}

fn check_bound_input<T: Scalar>(alpha: T, info: T) -> Result<()> {
    if !(alpha > T::zero() && alpha <= T::lit(2.0)) {
        return Err(Error::invalid("alpha", "must lie in (0, 2]"));
    }
    if !(info > T::zero()) || !info.is_finite() {
        return Err(Error::invalid("info", "information must be positive and finite"));
    }
    Ok(())
}

/// `C(α) 𝒥^(−2/α)` with `C(α) = 3^(−2/α) / 32`, or `𝒥^(−2/α)` without the constant.
pub fn minimax_lower_bound<T: Scalar>(input: &BoundInput<T>) -> Result<T> {
    let b = minimax_bound(input.alpha, input.info_value)?;
    Ok(if input.include_constant {
        b.bound_with_constant
    } else {
        b.bound_order
    })
}

pub fn minimax_bound<T: Scalar>(alpha: T, info: T) -> Result<MinimaxBound<T>> {
    check_bound_input(alpha, info)?;
    let expo = -T::lit(2.0) / alpha;
    let order = info.powf(expo);
    let constant = T::lit(3.0).powf(expo) / T::lit(32.0);
    Ok(MinimaxBound {
        bound_with_constant: constant * order,
        bound_order: order,
        epsilon_diag: (T::lit(3.0) * info).powf(-T::one() / alpha),
    })
}

/// `λ_max(D 𝓘⁻¹ Dᵀ)` for a positive-definite information matrix.
pub fn corollary1_bound<T: Scalar>(fisher: &Matrix<T>, d_psi: &Matrix<T>) -> Result<T> {
    if !fisher.is_square() || d_psi.cols() != fisher.rows() {
        return Err(Error::invalid("D_psi", "must have as many columns as the information matrix"));
    }
    let spectrum = symmetric_eigen(fisher)?;
    if !(spectrum.min() > T::zero()) {
        return Err(Error::Singular);
    }
    let inv = fisher.inverse()?;
    let mut s = d_psi.matmul(&inv)?.matmul(&d_psi.transpose())?;
    for i in 0..s.rows() {
        for j in 0..i {
            let avg = (s[(i, j)] + s[(j, i)]) / T::lit(2.0);
            s[(i, j)] = avg;
            s[(j, i)] = avg;
        }
    }
    Ok(symmetric_eigen(&s)?.max())
}

/// Two distributions on a finite sample space with the parameter of interest at each.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteModelPair<T> {
    p_theta: Vec<T>,
    p_vartheta: Vec<T>,
    psi_theta: Vec<T>,
    psi_vartheta: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Check<T> {
    pub lhs: T,
    pub rhs: T,
    pub hellinger_sq: T,
    pub holds: bool,
}

impl<T: Scalar> FiniteModelPair<T> {
    pub fn new(p_theta: Vec<T>, p_vartheta: Vec<T>, psi_theta: Vec<T>, psi_vartheta: Vec<T>) -> Result<Self> {
        let m = p_theta.len();
        if m == 0 || m > 6 || p_vartheta.len() != m {
            return Err(Error::invalid("pair", "probability vectors need equal length in 1..=6"));
        }
        for p in [&p_theta, &p_vartheta] {
            let total: T = p.iter().copied().sum();
            if p.iter().any(|&v| !(v >= T::zero())) || (total - T::one()).abs() > T::tol(1e-12) {
                return Err(Error::invalid("pair", "probabilities must be non-negative and sum to 1"));
            }
        }
        if psi_theta.is_empty() || psi_theta.len() != psi_vartheta.len() {
            return Err(Error::invalid("psi", "interest values need equal, non-zero length"));
        }
        Ok(FiniteModelPair {
            p_theta,
            p_vartheta,
            psi_theta,
            psi_vartheta,
        })
    }

    /// `Σ (√p − √q)²`.
    pub fn hellinger_sq(&self) -> T {
        self.p_theta
            .iter()
            .zip(&self.p_vartheta)
            .map(|(&p, &q)| {
                let d = p.sqrt() - q.sqrt();
                d * d
            })
            .sum()
    }

    /// Evaluates `R(T,θ) + R(T,ϑ) ≥ min{(1−h)/(4h), 1/16} ‖ψ(θ) − ψ(ϑ)‖²`
    /// exactly; `estimator[y]` is the estimate when outcome `y` is observed.
    pub fn lemma1_check(&self, estimator: &[Vec<T>]) -> Result<Lemma1Check<T>> {
        let q = self.psi_theta.len();
        if estimator.len() != self.p_theta.len() || estimator.iter().any(|t| t.len() != q) {
            return Err(Error::invalid("estimator", "one estimate of the interest dimension per outcome"));
        }
        let sq = |a: &[T], b: &[T]| -> T { a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum() };
        let mut lhs = T::zero();
        for (y, t) in estimator.iter().enumerate() {
            lhs += self.p_theta[y] * sq(t, &self.psi_theta) + self.p_vartheta[y] * sq(t, &self.psi_vartheta);
        }
        let h = self.hellinger_sq();
        let sixteenth = T::one() / T::lit(16.0);
        let factor = if h > T::zero() {
            ((T::one() - h) / (T::lit(4.0) * h)).min(sixteenth)
        } else {
            sixteenth
        };
        let rhs = factor * sq(&self.psi_theta, &self.psi_vartheta);
        let slack = T::tol(1e-12) * lhs.abs().max(rhs.abs()).max(T::one());
        Ok(Lemma1Check {
            lhs,
            rhs,
            hellinger_sq: h,
            holds: lhs >= rhs - slack,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_arithmetic() {
        let b = minimax_bound(1.0f64, 9.0).unwrap();
        assert!((b.bound_with_constant - 1.0 / (32.0 * 9.0 * 81.0)).abs() < 1e-18);
        assert!((b.bound_order - 1.0 / 81.0).abs() < 1e-16);
        assert!((b.epsilon_diag - 1.0 / 27.0).abs() < 1e-16);
    }

    #[test]
    fn doubling_info_halves_regular_bound() {
        let a = minimax_bound(2.0f64, 3.0).unwrap().bound_order;
        let b = minimax_bound(2.0f64, 6.0).unwrap().bound_order;
        assert!((a / b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_scale_order() {
        // n i.i.d. Unif(0, θ): 𝒥 = n/θ, bound ∝ θ²/n²
        let (theta, n) = (2.0f64, 50.0);
        let b = minimax_bound(1.0, n / theta).unwrap().bound_order;
        assert!((b - theta * theta / (n * n)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(minimax_bound(1.0f64, 0.0).is_err());
        assert!(minimax_bound(2.5f64, 1.0).is_err());
    }

    #[test]
    fn corollary_examples() {
        let id = Matrix::<f64>::identity(2);
        assert!((corollary1_bound(&id, &id).unwrap() - 1.0).abs() < 1e-14);
        let f = Matrix::<f64>::diagonal(&[4.0, 1.0]);
        let d = Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        assert!((corollary1_bound(&f, &d).unwrap() - 0.25).abs() < 1e-14);
        let f = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let lmin = symmetric_eigen(&f).unwrap().min();
        assert!((corollary1_bound(&f, &id).unwrap() - 1.0 / lmin).abs() < 1e-12);
        let singular = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(corollary1_bound(&singular, &id), Err(Error::Singular));
    }

    #[test]
    fn lemma1_trivial_cases() {
        let pair = FiniteModelPair::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![1.0], vec![1.0]).unwrap();
        let c = pair.lemma1_check(&[vec![0.0], vec![3.0]]).unwrap();
        assert!(c.holds && c.rhs == 0.0);
        let pair = FiniteModelPair::new(vec![0.7, 0.3], vec![0.2, 0.8], vec![0.0], vec![1.0]).unwrap();
        let lucky = pair.lemma1_check(&[vec![0.0], vec![0.0]]).unwrap();
        assert!(lucky.holds && lucky.lhs > 0.0);
    }

    #[test]
    fn pair_validation() {
        assert!(FiniteModelPair::new(vec![0.5, 0.6], vec![0.5, 0.5], vec![0.0], vec![0.0]).is_err());
        assert!(FiniteModelPair::new(vec![1.0; 7], vec![1.0; 7], vec![0.0], vec![0.0]).is_err());
    }
}
