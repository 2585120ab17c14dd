//! Approximate designs on `[-A, A]`, their Hellinger information, and the
//! max–min optimal design problem.
//!
//! The information of a design `ξ = {(x_i, w_i)}` along a unit direction `u`
//! is `J̃ Σ w_i |f(x_i)ᵀu|^α` with `f(x) = (1, x, …, x^p)`; its
//! direction-free value is the minimum over the unit sphere.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::lp::{self, LinearProgram, LpStatus, RowSense, Sense};
use crate::models::regressor;
use crate::optim::golden_section;
use crate::scalar::{dot, is_unit, norm, normalized, Scalar};
use crate::sphere::{canonical_sign, min_over_sphere, SphereMin, SphereSearchConfig};

const WEIGHT_SUM_TOL: f64 = 1e-10;
const BALANCE_TOL: f64 = 1e-8;
const DISTINCT_TOL: f64 = 1e-12;
const DROP_WEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint<T> {
    pub x: T,
    pub w: T,
}

/// Probability measure with finite support on `[-A, A]`, points sorted by `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Design<T> {
    #[serde(rename = "A")]
    a: T,
    points: Vec<DesignPoint<T>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesign<T> {
    #[serde(rename = "A")]
    a: T,
    points: Vec<DesignPoint<T>>,
}

impl<T: Scalar> Design<T> {
    /// Checks weights (non-negative, summing to one), range and distinctness.
    /// Balance is not required here; see [`Design::balanced`].
    pub fn new(a: T, mut points: Vec<DesignPoint<T>>) -> Result<Self> {
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::invalid("A", "design bound must be positive and finite"));
        }
        if points.is_empty() {
            return Err(Error::invalid("points", "a design needs at least one point"));
        }
        let reach = a * (T::one() + T::tol(DISTINCT_TOL));
        for p in &points {
            if !p.x.is_finite() || p.x.abs() > reach {
                return Err(Error::invalid("x", format!("design point {} lies outside [-{a}, {a}]", p.x)));
            }
            if !p.w.is_finite() || p.w < T::zero() {
                return Err(Error::invalid("w", format!("weight {} must be non-negative", p.w)));
            }
        }
        let total: T = points.iter().map(|p| p.w).sum();
        if (total - T::one()).abs() > T::tol(WEIGHT_SUM_TOL) {
            return Err(Error::invalid("w", format!("weights sum to {total}, not 1")));
        }
        points.sort_by(|p, q| p.x.partial_cmp(&q.x).expect("finite points"));
        if points.windows(2).any(|w| w[1].x - w[0].x <= T::tol(DISTINCT_TOL)) {
            return Err(Error::invalid("x", "design points must be distinct"));
        }
        Ok(Design { a, points })
    }

    /// Like [`Design::new`] but also requires `Σ w_i x_i = 0`.
    pub fn balanced(a: T, points: Vec<DesignPoint<T>>) -> Result<Self> {
        let d = Self::new(a, points)?;
        if !d.is_balanced() {
            return Err(Error::invalid("w", format!("design is not balanced (mean {})", d.mean())));
        }
        Ok(d)
    }

    /// Drops negligible weights, merges coincident points, clamps to `[-A, A]`
    /// and renormalizes before validating.
    pub fn from_weights(a: T, pairs: &[(T, T)]) -> Result<Self> {
        let mut pts: Vec<(T, T)> = pairs
            .iter()
            .filter(|(_, w)| *w > T::tol(DROP_WEIGHT))
            .map(|&(x, w)| (x.max(-a).min(a), w))
            .collect();
        pts.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite points"));
        let mut merged: Vec<DesignPoint<T>> = Vec::with_capacity(pts.len());
        for (x, w) in pts {
            match merged.last_mut() {
                Some(last) if (x - last.x).abs() <= T::tol(DISTINCT_TOL) * a.max(T::one()) => last.w += w,
                _ => merged.push(DesignPoint { x, w }),
            }
        }
        let total: T = merged.iter().map(|p| p.w).sum();
        if !(total > T::zero()) {
            return Err(Error::invalid("w", "all weights vanish"));
        }
        merged.iter_mut().for_each(|p| p.w /= total);
        Self::new(a, merged)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawDesign<f64> =
            serde_json::from_str(s).map_err(|e| Error::invalid("design", format!("malformed design JSON: {e}")))?;
        let points = raw
            .points
            .into_iter()
            .map(|p| DesignPoint {
                x: T::lit(p.x),
                w: T::lit(p.w),
            })
            .collect();
        Self::balanced(T::lit(raw.a), points)
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn points(&self) -> &[DesignPoint<T>] {
        &self.points
    }

    pub fn support_size(&self) -> usize {
        self.points.len()
    }

    pub fn mean(&self) -> T {
        self.points.iter().map(|p| p.w * p.x).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.mean().abs() <= T::tol(BALANCE_TOL) * self.a.max(T::one())
    }

    pub fn is_symmetric(&self) -> bool {
        let tol = T::tol(1e-9);
        self.points.iter().all(|p| {
            self.points
                .iter()
                .any(|q| (q.x + p.x).abs() <= tol * self.a.max(T::one()) && (q.w - p.w).abs() <= tol)
        })
    }

    /// Weight placed at `x` (zero if `x` is not a support point).
    pub fn weight_at(&self, x: T) -> T {
        self.points
            .iter()
            .find(|p| (p.x - x).abs() <= T::tol(1e-9) * self.a.max(T::one()))
            .map_or(T::zero(), |p| p.w)
    }

    /// Equally weighted, equally spaced design on `[-A, A]` including both ends.
    pub fn uniform(a: T, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("k", "uniform designs need at least two points"));
        }
        let w = T::one() / T::from_usize(k).expect("small count");
        let last = T::from_usize(k - 1).expect("small count");
        let pairs: Vec<(T, T)> = (0..k)
            .map(|i| {
                let i = T::from_usize(i).expect("small count");
                (-a + T::lit(2.0) * a * i / last, w)
            })
            .collect();
        Self::from_weights(a, &pairs)
    }

    pub fn to_json(&self) -> String {
        let points: Vec<serde_json::Value> = self
            .points
            .iter()
            .map(|p| serde_json::json!({"x": p.x.as_f64(), "w": p.w.as_f64()}))
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({"A": self.a.as_f64(), "points": points})).expect("designs serialize")
    }
}

/// `M(ξ) = Σ w_i f(x_i) f(x_i)ᵀ`.
pub fn moment_matrix<T: Scalar>(design: &Design<T>, degree: usize) -> Matrix<T> {
    let d = degree + 1;
    let mut m = Matrix::zeros(d, d);
    for p in design.points() {
        let f = regressor(p.x, degree);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] += p.w * f[i] * f[j];
            }
        }
    }
    m
}

fn check_alpha<T: Scalar>(alpha: T, j_tilde: T) -> Result<()> {
    if !(alpha > T::zero() && alpha <= T::lit(2.0)) {
        return Err(Error::invalid("alpha", "must lie in (0, 2]"));
    }
    if !(j_tilde > T::zero()) || !j_tilde.is_finite() {
        return Err(Error::invalid("J_tilde", "must be positive and finite"));
    }
    Ok(())
}

/// Weighted regressors of a design, the inner data of every information evaluation.
struct Regressors<T> {
    rows: Vec<(T, Vec<T>)>,
}

impl<T: Scalar> Regressors<T> {
    fn new(design: &Design<T>, degree: usize) -> Self {
        Regressors {
            rows: design.points().iter().map(|p| (p.w, regressor(p.x, degree))).collect(),
        }
    }

    fn info(&self, u: &[T], alpha: T) -> T {
        self.rows.iter().map(|(w, f)| *w * pow_abs(dot(f, u), alpha)).sum()
    }
}

#[inline]
fn pow_abs<T: Scalar>(v: T, alpha: T) -> T {
    let a = v.abs();
    if alpha == T::one() {
        a
    } else if alpha == T::lit(2.0) {
        a * a
    } else {
        a.powf(alpha)
    }
}

/// `J̃ Σ w_i |f(x_i)ᵀu|^α`.
pub fn design_info_directional<T: Scalar>(design: &Design<T>, u: &[T], alpha: T, j_tilde: T, degree: usize) -> Result<T> {
    check_alpha(alpha, j_tilde)?;
    if u.len() != degree + 1 {
        return Err(Error::invalid("direction", "length must be degree + 1"));
    }
    if !is_unit(u) {
        return Err(Error::NotUnit { norm: norm(u).as_f64() });
    }
    Ok(j_tilde * Regressors::new(design, degree).info(u, alpha))
}

/// Directions orthogonal to `d − 1` of the given regressors: the kinks of
/// `u ↦ Σ w_i |f(x_i)ᵀu|`, where its minimum over the sphere is attained at α = 1.
pub fn kink_directions<T: Scalar>(xs: &[T], degree: usize) -> Vec<Vec<T>> {
    const MAX_SUBSETS: usize = 25_000;
    let d = degree + 1;
    let mut uniq: Vec<T> = xs.to_vec();
    uniq.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    uniq.dedup_by(|a, b| (*a - *b).abs() <= T::tol(DISTINCT_TOL));
    let k = d - 1;
    if uniq.len() < k || binomial(uniq.len(), k) > MAX_SUBSETS {
        return Vec::new();
    }
    let regs: Vec<Vec<T>> = uniq.iter().map(|&x| regressor(x, degree)).collect();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let rows: Vec<&Vec<T>> = idx.iter().map(|&i| &regs[i]).collect();
        if let Some(u) = normalized(&generalized_cross(&rows, d)) {
            out.push(canonical_sign(u));
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < uniq.len() - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Vector orthogonal to the `d − 1` rows, by cofactor expansion.
fn generalized_cross<T: Scalar>(rows: &[&Vec<T>], d: usize) -> Vec<T> {
    if d == 1 {
        return vec![T::one()];
    }
    (0..d)
        .map(|col| {
            let minor: Vec<Vec<T>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, &v)| v).collect())
                .collect();
            let det = determinant(minor);
            if col % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).expect("finite entries"))
            .expect("non-empty");
        if m[p][c] == T::zero() {
            return T::zero();
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                let v = m[c][j];
                m[i][j] -= f * v;
            }
        }
    }
    det
}

/// Direction-free information of a design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignInfo<T> {
    pub value: T,
    pub direction: Vec<T>,
    /// Fewer than `p + 1` distinct support points: `θ` is not identified
    /// and the information is zero.
    pub degenerate: bool,
}

/// `inf_u J̃ Σ w_i |f(x_i)ᵀu|^α` over the unit sphere.
pub fn design_info<T: Scalar>(
    design: &Design<T>,
    alpha: T,
    j_tilde: T,
    degree: usize,
    config: &SphereSearchConfig<T>,
) -> Result<DesignInfo<T>> {
    check_alpha(alpha, j_tilde)?;
    let d = degree + 1;
    if design.support_size() < d {
        let eig = symmetric_eigen(&moment_matrix(design, degree))?;
        return Ok(DesignInfo {
            value: T::zero(),
            direction: canonical_sign(eig.vector(0)),
            degenerate: true,
        });
    }
    let regs = Regressors::new(design, degree);
    let xs: Vec<T> = design.points().iter().map(|p| p.x).collect();
    let kinks = kink_directions(&xs, degree);
    let best = if alpha == T::one() && !kinks.is_empty() {
        // A polyhedral norm attains its minimum over the sphere at a vertex
        // of its unit ball, i.e. at one of the kink directions.
        min_over_directions(|u: &[T]| regs.info(u, alpha), &kinks)
    } else {
        min_over_sphere(|u: &[T]| regs.info(u, alpha), d, config, &kinks)
    };
    Ok(DesignInfo {
        value: j_tilde * best.value,
        direction: best.direction,
        degenerate: false,
    })
}

fn min_over_directions<T: Scalar, F: Fn(&[T]) -> T + Sync>(objective: F, directions: &[Vec<T>]) -> SphereMin<T> {
    let values: Vec<T> = directions.par_iter().map(|u| objective(u)).collect();
    let mut best = 0;
    for i in 1..directions.len() {
        if values[i] < values[best] || (values[i] == values[best] && directions[i] < directions[best]) {
            best = i;
        }
    }
    SphereMin {
        direction: directions[best].clone(),
        value: values[best],
    }
}

const INTEREST_FLOOR: f64 = 1e-9;

/// `inf_u ‖D_ψ u‖^(−α) 𝒥_ξ(u)`, skipping directions with `‖D_ψ u‖ < 1e-9`.
pub fn direction_free_info_psi<T: Scalar>(
    design: &Design<T>,
    d_psi: &Matrix<T>,
    alpha: T,
    j_tilde: T,
    degree: usize,
    config: &SphereSearchConfig<T>,
) -> Result<SphereMin<T>> {
    check_alpha(alpha, j_tilde)?;
    let d = degree + 1;
    if d_psi.cols() != d || d_psi.rows() == 0 {
        return Err(Error::invalid("D_psi", "needs degree + 1 columns"));
    }
    let regs = Regressors::new(design, degree);
    let objective = |u: &[T]| {
        let du = norm(&d_psi.mul_vec(u));
        if du < T::lit(INTEREST_FLOOR) {
            T::infinity()
        } else {
            regs.info(u, alpha) / pow_abs(du, alpha)
        }
    };
    let xs: Vec<T> = design.points().iter().map(|p| p.x).collect();
    let best = min_over_sphere(objective, d, config, &kink_directions(&xs, degree));
    if !best.value.is_finite() {
        return Err(Error::DegenerateInterest);
    }
    Ok(SphereMin {
        direction: best.direction,
        value: j_tilde * best.value,
    })
}

/// `½ξ + ½ξ′` with `ξ′` the reflection `x ↦ −x`.
pub fn symmetrize<T: Scalar>(design: &Design<T>) -> Design<T> {
    let half = T::lit(0.5);
    let pairs: Vec<(T, T)> = design
        .points()
        .iter()
        .flat_map(|p| [(p.x, p.w * half), (-p.x, p.w * half)])
        .collect();
    Design::from_weights(design.a(), &pairs).expect("reflection of a valid design is valid")
}

/// `λξ + (1 − λ)ξ′` for designs on the same interval.
pub fn mix<T: Scalar>(first: &Design<T>, second: &Design<T>, lambda: T) -> Result<Design<T>> {
    if first.a() != second.a() {
        return Err(Error::invalid("A", "designs live on different intervals"));
    }
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::invalid("lambda", "must lie in [0, 1]"));
    }
    let pairs: Vec<(T, T)> = first
        .points()
        .iter()
        .map(|p| (p.x, lambda * p.w))
        .chain(second.points().iter().map(|p| (p.x, (T::one() - lambda) * p.w)))
        .collect();
    Design::from_weights(first.a(), &pairs)
}

/// `size` equally spaced points on `[-A, A]`; `size` must be odd so that 0 is included.
pub fn candidate_grid<T: Scalar>(a: T, size: usize) -> Result<Vec<T>> {
    if size < 3 || size.is_multiple_of(2) || size > 201 {
        return Err(Error::invalid("grid", "grid size must be odd, between 3 and 201"));
    }
    let half = (size - 1) / 2;
    let h = T::from_usize(half).expect("small count");
    Ok((0..size)
        .map(|i| {
            if i == half {
                T::zero()
            } else {
                a * (T::from_usize(i).expect("small count") - h) / h
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuttingPlaneConfig<T> {
    /// Optimize over symmetric designs only (a complete class).
    pub symmetric_only: bool,
    /// Relative gap at which the solver stops.
    pub tolerance: T,
    pub max_iterations: usize,
    pub max_cuts: usize,
    pub sphere: SphereSearchConfig<T>,
}

impl<T: Scalar> Default for CuttingPlaneConfig<T> {
    fn default() -> Self {
        CuttingPlaneConfig {
            symmetric_only: true,
            tolerance: T::tol(1e-5),
            max_iterations: 500,
            max_cuts: 500,
            sphere: SphereSearchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignSolution<T> {
    pub design: Design<T>,
    pub info: T,
    pub worst_direction: Vec<T>,
    pub cuts_used: usize,
    /// Upper bound minus achieved information (absolute, in units of `info`).
    pub gap: T,
    pub iterations: usize,
    pub converged: bool,
}

/// An LP variable: weight spread over one or two points.
#[derive(Debug, Clone)]
struct Atom<T> {
    shares: Vec<(T, T)>,
    /// `Σ share · x`, for the balance row.
    moment: T,
}

struct Cut<T> {
    direction: Vec<T>,
    values: Vec<T>,
    stale: usize,
}

struct Problem<'a, T> {
    a: T,
    alpha: T,
    degree: usize,
    atoms: &'a [Atom<T>],
    balance_row: bool,
    config: &'a CuttingPlaneConfig<T>,
}

struct KelleyState<T> {
    weights: Vec<T>,
    design: Design<T>,
    value: T,
    direction: Vec<T>,
    upper: T,
    iterations: usize,
    converged: bool,
}

impl<T: Scalar> Problem<'_, T> {
    fn phi(&self, atom: &Atom<T>, u: &[T]) -> T {
        atom.shares
            .iter()
            .map(|&(x, s)| s * pow_abs(dot(&regressor(x, self.degree), u), self.alpha))
            .sum()
    }

    fn make_cut(&self, direction: Vec<T>) -> Cut<T> {
        let values = self.atoms.iter().map(|a| self.phi(a, &direction)).collect();
        Cut {
            direction,
            values,
            stale: 0,
        }
    }

    fn design_of(&self, active: &[usize], v: &[T]) -> Result<Design<T>> {
        let pairs: Vec<(T, T)> = active
            .iter()
            .zip(v)
            .flat_map(|(&k, &vk)| self.atoms[k].shares.iter().map(move |&(x, s)| (x, s * vk)))
            .collect();
        Design::from_weights(self.a, &pairs)
    }

    /// Exact minimum at α = 2 (smallest eigenvalue); sphere search otherwise.
    fn worst(&self, design: &Design<T>) -> Result<(T, Vec<T>)> {
        if design.support_size() < self.degree + 1 {
            let r = design_info(design, self.alpha, T::one(), self.degree, &self.config.sphere)?;
            return Ok((r.value, r.direction));
        }
        if self.alpha == T::lit(2.0) {
            let eig = symmetric_eigen(&moment_matrix(design, self.degree))?;
            return Ok((eig.min(), canonical_sign(eig.vector(0))));
        }
        let r = design_info(design, self.alpha, T::one(), self.degree, &self.config.sphere)?;
        Ok((r.value, r.direction))
    }

    fn solve_lp(&self, active: &[usize], cuts: &[Cut<T>]) -> Result<Option<(Vec<T>, T)>> {
        let n = active.len();
        let mut objective = vec![T::zero(); n + 1];
        objective[n] = T::one();
        let mut prog = LinearProgram::new(Sense::Maximize, objective).free(n);
        for cut in cuts {
            let mut row: Vec<T> = active.iter().map(|&k| cut.values[k]).collect();
            row.push(-T::one());
            prog.constraint(row, RowSense::Ge, T::zero());
        }
        let mut simplex = vec![T::one(); n];
        simplex.push(T::zero());
        prog.constraint(simplex, RowSense::Eq, T::one());
        if self.balance_row {
            let mut row: Vec<T> = active.iter().map(|&k| self.atoms[k].moment).collect();
            row.push(T::zero());
            prog.constraint(row, RowSense::Eq, T::zero());
        }
        let sol = lp::solve(&prog)?;
        match sol.status {
            LpStatus::Optimal => {
                let t = sol.x[n];
                let v = sol.x[..n].iter().map(|&x| x.max(T::zero())).collect();
                Ok(Some((v, t)))
            }
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::Unbounded {
                context: Some("design cutting-plane master problem".into()),
            }),
        }
    }

    /// Kelley's method restricted to the atoms in `active`.
    fn kelley(&self, active: &[usize], cuts: &mut Vec<Cut<T>>, max_iter: usize) -> Result<Option<KelleyState<T>>> {
        let tol = self.config.tolerance;
        let tiny = T::tol(1e-12);
        let mut best: Option<KelleyState<T>> = None;
        let mut upper = T::infinity();
        for iter in 1..=max_iter {
            let Some((v, t)) = self.solve_lp(active, cuts)? else {
                return Ok(None);
            };
            upper = upper.min(t);
            let design = self.design_of(active, &v)?;
            let (value, direction) = self.worst(&design)?;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(KelleyState {
                    weights: v.clone(),
                    design,
                    value,
                    direction: direction.clone(),
                    upper,
                    iterations: iter,
                    converged: false,
                });
            }
            let b = best.as_mut().expect("set above");
            b.upper = upper;
            b.iterations = iter;
            if upper - b.value <= tol * b.value.abs().max(tiny) {
                b.converged = true;
                break;
            }
            // Cut management: forget cuts that stayed slack for a while.
            let slack_limit = T::lit(10.0) * tol * t.abs().max(tiny);
            for cut in cuts.iter_mut() {
                let lhs: T = active.iter().zip(&v).map(|(&k, &vk)| cut.values[k] * vk).sum();
                if lhs - t > slack_limit {
                    cut.stale += 1;
                } else {
                    cut.stale = 0;
                }
            }
            cuts.retain(|c| c.stale < 5);
            if cuts.len() >= self.config.max_cuts {
                let worst = cuts
                    .iter()
                    .enumerate()
                    .max_by_key(|(_, c)| c.stale)
                    .map(|(i, _)| i)
                    .expect("non-empty cuts");
                cuts.remove(worst);
            }
            let duplicate = cuts.iter().any(|c| {
                let cos = dot(&c.direction, &direction).abs();
                cos >= T::one() - T::tol(1e-14)
            });
            if duplicate {
                // The oracle keeps returning an existing cut: the LP bound
                // cannot improve further.
                break;
            }
            cuts.push(self.make_cut(direction));
        }
        Ok(best)
    }
}

/// Maximizes the direction-free design information over weights on `grid`
/// by Kelley's cutting-plane method, then greedily removes support points
/// whose removal keeps the information within tolerance.
pub fn optimize_design_cutting_plane<T: Scalar>(
    grid: &[T],
    a: T,
    alpha: T,
    j_tilde: T,
    degree: usize,
    config: &CuttingPlaneConfig<T>,
) -> Result<DesignSolution<T>> {
    check_alpha(alpha, j_tilde)?;
    if degree < 1 {
        return Err(Error::invalid("degree", "must be at least 1"));
    }
    validate_grid(grid, a)?;
    let atoms = build_atoms(grid, a, config.symmetric_only);
    let problem = Problem {
        a,
        alpha,
        degree,
        atoms: &atoms,
        balance_row: !config.symmetric_only,
        config,
    };
    let d = degree + 1;
    let mut cuts: Vec<Cut<T>> = (0..d)
        .map(|i| {
            let mut e = vec![T::zero(); d];
            e[i] = T::one();
            problem.make_cut(e)
        })
        .collect();
    let all: Vec<usize> = (0..atoms.len()).collect();
    let mut state = problem
        .kelley(&all, &mut cuts, config.max_iterations)?
        .expect("a grid containing 0 admits a feasible design");
    let mut active: Vec<usize> = all;
    let mut iterations = state.iterations;
    let full_upper = state.upper;
    let full_converged = state.converged;
    // Anchored to the full-grid optimum so that successive removals cannot drift.
    let threshold = state.value - config.tolerance * state.value.abs();

    // Tie-break toward smaller support: drop the lightest point while the
    // information stays within tolerance of the full-grid optimum.
    loop {
        let mut support: Vec<(usize, T)> = active
            .iter()
            .zip(&state.weights)
            .filter(|(_, &w)| w > T::tol(DROP_WEIGHT))
            .map(|(&k, &w)| (k, w))
            .collect();
        support.sort_by(|p, q| p.1.partial_cmp(&q.1).expect("finite weights").then(p.0.cmp(&q.0)));
        if support.len() <= 1 {
            break;
        }
        let drop = support[0].0;
        let reduced: Vec<usize> = support[1..].iter().map(|&(k, _)| k).collect();
        let mut trial_cuts: Vec<Cut<T>> = cuts
            .iter()
            .map(|c| Cut {
                direction: c.direction.clone(),
                values: c.values.clone(),
                stale: 0,
            })
            .collect();
        let Some(trial) = problem.kelley(&reduced, &mut trial_cuts, config.max_iterations)? else {
            break;
        };
        iterations += trial.iterations;
        if !(trial.converged && trial.value >= threshold) {
            log::debug!("keeping support point {drop}: information would fall to {}", trial.value);
            break;
        }
        state = trial;
        active = reduced;
        cuts = trial_cuts;
    }

    let gap = (full_upper - state.value).max(T::zero());
    Ok(DesignSolution {
        design: state.design,
        info: j_tilde * state.value,
        worst_direction: state.direction,
        cuts_used: cuts.len(),
        gap: j_tilde * gap,
        iterations,
        converged: full_converged,
    })
}

fn validate_grid<T: Scalar>(grid: &[T], a: T) -> Result<()> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::invalid("A", "design bound must be positive and finite"));
    }
    if grid.is_empty() || grid.len() > 201 {
        return Err(Error::invalid("grid", "candidate grid needs 1..=201 points"));
    }
    let near = |x: T, y: T| (x - y).abs() <= T::tol(1e-12) * a.max(T::one());
    for target in [-a, T::zero(), a] {
        if !grid.iter().any(|&x| near(x, target)) {
            return Err(Error::invalid("grid", "candidate grid must contain -A, 0 and A"));
        }
    }
    if grid.iter().any(|x| !x.is_finite() || x.abs() > a * (T::one() + T::tol(1e-12))) {
        return Err(Error::invalid("grid", "candidate points must lie in [-A, A]"));
    }
    Ok(())
}

fn build_atoms<T: Scalar>(grid: &[T], a: T, symmetric: bool) -> Vec<Atom<T>> {
    let tol = T::tol(1e-12) * a.max(T::one());
    let mut xs: Vec<T> = grid.iter().map(|&x| x.max(-a).min(a)).collect();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite grid"));
    xs.dedup_by(|p, q| (*p - *q).abs() <= tol);
    if symmetric {
        let half = T::lit(0.5);
        let mut mags: Vec<T> = xs.iter().map(|x| x.abs()).collect();
        mags.sort_by(|p, q| p.partial_cmp(q).expect("finite grid"));
        mags.dedup_by(|p, q| (*p - *q).abs() <= tol);
        mags.into_iter()
            .map(|m| {
                if m <= tol {
                    Atom {
                        shares: vec![(T::zero(), T::one())],
                        moment: T::zero(),
                    }
                } else {
                    Atom {
                        shares: vec![(-m, half), (m, half)],
                        moment: T::zero(),
                    }
                }
            })
            .collect()
    } else {
        xs.into_iter()
            .map(|x| Atom {
                shares: vec![(x, T::one())],
                moment: x,
            })
            .collect()
    }
}

/// `f(π) = min_u {π|u₁|^α + (1−π)/2 (|u₁+Au₂+A²u₃|^α + |u₁−Au₂+A²u₃|^α)}`:
/// the information of the three-point design `{(0, π), (±A, (1−π)/2)}`.
pub fn pi_objective<T: Scalar>(a: T, alpha: T, pi: T, config: &SphereSearchConfig<T>) -> Result<SphereMin<T>> {
    let half = (T::one() - pi) / T::lit(2.0);
    let design = Design::from_weights(a, &[(-a, half), (T::zero(), pi), (a, half)])?;
    let r = design_info(&design, alpha, T::one(), 2, config)?;
    Ok(SphereMin {
        direction: r.direction,
        value: r.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiPoint<T> {
    #[serde(rename = "A")]
    pub a: T,
    pub alpha: T,
    pub pi: T,
    pub f: T,
}

/// Maximizer of the concave `f(π)` on `[0, 1]`, the smallest one among ties.
pub fn optimal_pi<T: Scalar>(a: T, alpha: T, config: &SphereSearchConfig<T>) -> Result<PiPoint<T>> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::invalid("A", "must be positive"));
    }
    check_alpha(alpha, T::one())?;
    let f = |p: T| pi_objective(a, alpha, p, config).map_or(T::infinity(), |r| -r.value);
    let (pi, neg) = golden_section(f, T::zero(), T::one(), T::tol(1e-7), 200);
    let best = -neg;
    // Walk left to the smallest π within tolerance of the maximum.
    let target = best - T::tol(1e-9) * best.abs();
    let (mut lo, mut hi) = (T::zero(), pi);
    if -f(lo) >= target {
        hi = lo;
    }
    while hi - lo > T::tol(1e-9) {
        let mid = (lo + hi) / T::lit(2.0);
        if -f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(PiPoint {
        a,
        alpha,
        pi: hi,
        f: -f(hi),
    })
}

pub fn pi_curve<T: Scalar>(a: T, alphas: &[T], config: &SphereSearchConfig<T>) -> Result<Vec<PiPoint<T>>> {
    alphas.iter().map(|&alpha| optimal_pi(a, alpha, config)).collect()
}

/// `{(−A, (1−π)/2), (0, π), (A, (1−π)/2)}` with `π = π_A(α)`.
pub fn three_point_design<T: Scalar>(a: T, alpha: T, config: &SphereSearchConfig<T>) -> Result<(Design<T>, PiPoint<T>)> {
    let p = optimal_pi(a, alpha, config)?;
    let half = (T::one() - p.pi) / T::lit(2.0);
    let design = Design::from_weights(a, &[(-a, half), (T::zero(), p.pi), (a, half)])?;
    Ok((design, p))
}

/// At α = 1, `f` is the minimum of three affine functions of `π`, maximized at
/// `π = √(A⁴+1) / (√(A⁴+1) + √(A²+1))`.
pub fn pi_closed_form_alpha1<T: Scalar>(a: T) -> T {
    let s4 = (a.powi(4) + T::one()).sqrt();
    let s2 = (a * a + T::one()).sqrt();
    s4 / (s4 + s2)
}

/// Regular-optimal comparator: maximizes `λ_min(M(ξ))` over symmetric designs.
pub fn e_optimal_design<T: Scalar>(a: T, degree: usize, grid_size: usize, config: &CuttingPlaneConfig<T>) -> Result<DesignSolution<T>> {
    if !(1..=2).contains(&degree) {
        return Err(Error::invalid("degree", "E-optimal comparator supports degree 1 or 2"));
    }
    let grid = candidate_grid(a, grid_size)?;
    let cfg = CuttingPlaneConfig {
        symmetric_only: true,
        ..*config
    };
    optimize_design_cutting_plane(&grid, a, T::lit(2.0), T::one(), degree, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(a: f64) -> Design<f64> {
        Design::from_weights(a, &[(-a, 0.5), (a, 0.5)]).unwrap()
    }

    #[test]
    fn directional_examples() {
        let d = two_point(1.0);
        assert!((design_info_directional(&d, &[1.0, 0.0], 1.0, 1.0, 1).unwrap() - 1.0).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        let v = design_info_directional(&d, &[s, s], 1.0, 1.0, 1).unwrap();
        assert!((v - s).abs() < 1e-15);
        assert!(design_info_directional(&d, &[1.0, 1.0], 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn two_point_info() {
        let r = design_info(&two_point(1.0), 1.0, 1.0, 1, &SphereSearchConfig::default()).unwrap();
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(!r.degenerate);
    }

    #[test]
    fn one_point_design_is_degenerate() {
        let d = Design::from_weights(1.0f64, &[(0.0, 1.0)]).unwrap();
        let r = design_info(&d, 1.0, 1.0, 1, &SphereSearchConfig::default()).unwrap();
        assert!(r.degenerate && r.value == 0.0);
        assert!(design_info_directional(&d, &r.direction, 1.0, 1.0, 1).unwrap() < 1e-15);
    }

    #[test]
    fn info_grows_with_interval() {
        let cfg = SphereSearchConfig::default();
        let vals: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&a| design_info(&two_point(a), 1.0, 1.0, 1, &cfg).unwrap().value)
            .collect();
        assert!(vals[0] < vals[1] && vals[1] < vals[2]);
    }

    #[test]
    fn validation() {
        let p = |x, w| DesignPoint { x, w };
        assert!(Design::new(1.0, vec![p(0.0, 0.5), p(0.5, 0.4)]).is_err());
        assert!(Design::new(1.0, vec![p(2.0, 1.0)]).is_err());
        assert!(Design::new(1.0, vec![p(0.1, 0.5), p(0.1, 0.5)]).is_err());
        assert!(Design::balanced(1.0, vec![p(1.0, 1.0)]).is_err());
        assert!(Design::balanced(1.0, vec![p(-1.0, 0.5), p(1.0, 0.5)]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let d = Design::from_weights(2.0f64, &[(-2.0, 0.125), (0.0, 0.75), (2.0, 0.125)]).unwrap();
        let back = Design::<f64>::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert!(Design::<f64>::from_json(r#"{"A":1,"points":[{"x":1,"w":1}]}"#).is_err());
        assert!(Design::<f64>::from_json(r#"{"A":1,"points":[],"extra":0}"#).is_err());
    }

    #[test]
    fn symmetrize_examples() {
        let one = Design::from_weights(1.0f64, &[(1.0, 1.0)]).unwrap();
        let s = symmetrize(&one);
        assert_eq!(s.points().len(), 2);
        assert!((s.weight_at(-1.0) - 0.5).abs() < 1e-15 && (s.weight_at(1.0) - 0.5).abs() < 1e-15);
        let sym = Design::from_weights(2.0f64, &[(-2.0, 0.2), (0.0, 0.6), (2.0, 0.2)]).unwrap();
        assert_eq!(symmetrize(&sym), sym);
    }

    #[test]
    fn alpha_two_is_smallest_eigenvalue() {
        let d = Design::from_weights(1.0f64, &[(-1.0, 0.3), (-0.2, 0.2), (0.5, 0.25), (1.0, 0.25)]).unwrap();
        let r = design_info(&d, 2.0, 1.5, 2, &SphereSearchConfig::default()).unwrap();
        let lmin = symmetric_eigen(&moment_matrix(&d, 2)).unwrap().min();
        assert!((r.value - 1.5 * lmin).abs() < 1e-8, "{} vs {}", r.value, 1.5 * lmin);
    }

    #[test]
    fn psi_identity_reduces_to_design_info() {
        let d = two_point(1.0);
        let cfg = SphereSearchConfig::default();
        let id = Matrix::identity(2);
        let a = direction_free_info_psi(&d, &id, 1.3, 1.0, 1, &cfg).unwrap();
        let b = design_info(&d, 1.3, 1.0, 1, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-10);
        let zero = Matrix::zeros(1, 2);
        assert_eq!(direction_free_info_psi(&d, &zero, 1.0, 1.0, 1, &cfg), Err(Error::DegenerateInterest));
    }

    #[test]
    fn slope_interest_on_two_point_design() {
        // ratio max(|u1|,|u2|)/|u2| ≥ 1 with equality when |u1| ≤ |u2|
        let d = two_point(1.0);
        let slope = Matrix::from_rows(&[vec![0.0, 1.0]]).unwrap();
        let r = direction_free_info_psi(&d, &slope, 1.0, 1.0, 1, &SphereSearchConfig::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kinks_of_three_point_quadratic() {
        let k = kink_directions(&[-2.0, 0.0, 2.0], 2);
        assert_eq!(k.len(), 3);
        for u in &k {
            let zeros = [-2.0f64, 0.0, 2.0]
                .iter()
                .filter(|&&x| dot(&regressor(x, 2), u).abs() < 1e-12)
                .count();
            assert_eq!(zeros, 2);
        }
    }

    #[test]
    fn linear_optimum_is_two_point() {
        let grid = candidate_grid(1.0f64, 21).unwrap();
        let sol = optimize_design_cutting_plane(&grid, 1.0, 1.0, 1.0, 1, &CuttingPlaneConfig::default()).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.design.support_size(), 2, "{:?}", sol.design);
        assert!((sol.design.weight_at(1.0) - 0.5).abs() < 1e-6);
        assert!((sol.info - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn e_optimal_quadratic_unit_interval() {
        let sol = e_optimal_design(1.0f64, 2, 101, &CuttingPlaneConfig::default()).unwrap();
        assert!((sol.design.weight_at(0.0) - 0.6).abs() < 0.01, "{:?}", sol.design);
        assert!((sol.design.weight_at(1.0) - 0.2).abs() < 0.01);
    }

    #[test]
    fn pi_closed_form_matches_search() {
        let cfg = SphereSearchConfig::default();
        for a in [1.0f64, 1.5, 2.0] {
            let p = optimal_pi(a, 1.0, &cfg).unwrap();
            assert!((p.pi - pi_closed_form_alpha1(a)).abs() < 1e-4, "A={a}: {} vs {}", p.pi, pi_closed_form_alpha1(a));
        }
        assert!((pi_closed_form_alpha1(1.0f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pi_objective_regular_case() {
        // A = 1, α = 2, π = 0.6: λ_min of the moment matrix is 0.2
        let r = pi_objective(1.0f64, 2.0, 0.6, &SphereSearchConfig::default()).unwrap();
        assert!((r.value - 0.2).abs() < 1e-9);
    }

    #[test]
    fn grid_checks() {
        assert!(candidate_grid(1.0f64, 100).is_err());
        let g = candidate_grid(2.0f64, 101).unwrap();
        assert_eq!((g[0], g[50], g[100]), (-2.0, 0.0, 2.0));
        assert!(optimize_design_cutting_plane(&[0.5, 0.0, 1.0], 1.0, 1.0, 1.0, 1, &CuttingPlaneConfig::default()).is_err());
    }

    #[test]
    fn uniform_designs() {
        let u = Design::<f64>::uniform(1.0, 5).unwrap();
        assert_eq!(u.support_size(), 5);
        assert!(u.is_balanced() && u.is_symmetric());
    }
}
