//! Dense two-phase primal simplex for small linear programs.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarDomain {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub sense: RowSense,
    pub rhs: T,
}

/// `max/min cᵀx` subject to row constraints and per-variable domains.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub sense: Sense,
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    pub domains: Vec<VarDomain>,
}

impl<T: Scalar> LinearProgram<T> {
    /// All variables non-negative until [`Self::free`] says otherwise.
    pub fn new(sense: Sense, objective: Vec<T>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            domains: vec![VarDomain::NonNegative; n],
        }
    }

    pub fn free(mut self, var: usize) -> Self {
        self.domains[var] = VarDomain::Free;
        self
    }

    pub fn all_free(mut self) -> Self {
        self.domains.iter_mut().for_each(|d| *d = VarDomain::Free);
        self
    }

    pub fn constraint(&mut self, coeffs: Vec<T>, sense: RowSense, rhs: T) -> &mut Self {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::invalid("lp", "no variables"));
        }
        if self.domains.len() != n {
            return Err(Error::invalid("lp", "one domain per variable required"));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("lp", "objective coefficients must be finite"));
        }
        for row in &self.constraints {
            if row.coeffs.len() != n {
                return Err(Error::invalid("lp", "constraint length differs from variable count"));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("lp", "constraint coefficients must be finite"));
            }
        }
        Ok(())
    }

    /// Largest violation of the constraints and domains at `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for row in &self.constraints {
            let lhs = crate::scalar::dot(&row.coeffs, x);
            let v = match row.sense {
                RowSense::Le => lhs - row.rhs,
                RowSense::Ge => row.rhs - lhs,
                RowSense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (&xi, d) in x.iter().zip(&self.domains) {
            if *d == VarDomain::NonNegative {
                worst = worst.max(-xi);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Empty unless optimal.
    pub x: Vec<T>,
    pub objective: T,
    pub iterations: usize,
}

const PIVOT_TOL: f64 = 1e-10;

struct Tableau<T> {
    rows: usize,
    cols: usize,
    /// `rows × (cols + 1)`, last column is the right-hand side.
    a: Vec<T>,
    basis: Vec<usize>,
    /// Reduced costs, with `-z` in the last slot.
    cost: Vec<T>,
    iterations: usize,
    cap: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn at(&self, i: usize, j: usize) -> T {
        self.a[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> T {
        self.at(i, self.cols)
    }

    fn set_objective(&mut self, c: &[T]) {
        let w = self.cols + 1;
        let mut cost = vec![T::zero(); w];
        cost[..self.cols].copy_from_slice(&c[..self.cols]);
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb != T::zero() {
                for j in 0..w {
                    cost[j] -= cb * self.a[i * w + j];
                }
            }
        }
        self.cost = cost;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        self.a[r * w + c] = T::one();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f == T::zero() {
                continue;
            }
            for j in 0..w {
                let v = self.a[r * w + j];
                self.a[i * w + j] -= f * v;
            }
            self.a[i * w + c] = T::zero();
        }
        let f = self.cost[c];
        if f != T::zero() {
            for j in 0..w {
                self.cost[j] -= f * self.a[r * w + j];
            }
            self.cost[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Minimizes the current objective over columns `< active`.
    fn run(&mut self, active: usize) -> Result<Outcome> {
        let tol = T::tol(PIVOT_TOL);
        let degenerate_limit = 10 * self.rows.max(1);
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            let entering = if bland {
                (0..active).find(|&j| self.cost[j] < -tol)
            } else {
                let mut best: Option<(usize, T)> = None;
                for j in 0..active {
                    let d = self.cost[j];
                    if d < -tol && best.is_none_or(|(_, b)| d < b) {
                        best = Some((j, d));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(c) = entering else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows {
                let aic = self.at(i, c);
                if aic > tol {
                    let ratio = self.rhs(i) / aic;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - tol * best.abs().max(T::one())
                                || (ratio <= best + tol * best.abs().max(T::one())
                                    && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            self.iterations += 1;
            if self.iterations > self.cap {
                return Err(Error::IterationLimit {
                    iterations: self.iterations,
                });
            }
            if ratio <= tol {
                degenerate += 1;
                if degenerate > degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.cols + 1;
        self.a.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }

    /// Keeps only the first `keep` columns (plus the right-hand side).
    fn truncate_columns(&mut self, keep: usize) {
        let w = self.cols + 1;
        let mut a = Vec::with_capacity(self.rows * (keep + 1));
        for i in 0..self.rows {
            a.extend_from_slice(&self.a[i * w..i * w + keep]);
            a.push(self.a[i * w + self.cols]);
        }
        self.a = a;
        self.cols = keep;
    }
}

/// Solves the program. Infeasible and unbounded problems are reported via
/// [`LpStatus`]; exceeding the iteration cap is an error.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
    lp.validate()?;
    let n = lp.num_vars();
    // Column layout: structural (free variables split), slacks/surpluses, artificials.
    let mut column_of = Vec::with_capacity(n);
    let mut structural = 0usize;
    for d in &lp.domains {
        column_of.push(structural);
        structural += if *d == VarDomain::Free { 2 } else { 1 };
    }
    let m = lp.constraints.len();
    let mut rows: Vec<(Vec<T>, RowSense, T)> = Vec::with_capacity(m);
    for con in &lp.constraints {
        let mut coeffs = vec![T::zero(); structural];
        for (j, &a) in con.coeffs.iter().enumerate() {
            coeffs[column_of[j]] = a;
            if lp.domains[j] == VarDomain::Free {
                coeffs[column_of[j] + 1] = -a;
            }
        }
        let (mut sense, mut rhs) = (con.sense, con.rhs);
        if rhs < T::zero() {
            coeffs.iter_mut().for_each(|a| *a = -*a);
            rhs = -rhs;
            sense = match sense {
                RowSense::Le => RowSense::Ge,
                RowSense::Ge => RowSense::Le,
                RowSense::Eq => RowSense::Eq,
            };
        }
        rows.push((coeffs, sense, rhs));
    }
    let slack_count = rows.iter().filter(|r| r.1 != RowSense::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != RowSense::Le).count();
    let art_start = structural + slack_count;
    let cols = art_start + art_count;
    let w = cols + 1;
    let mut a = vec![T::zero(); m * w];
    let mut basis = vec![0usize; m];
    let (mut s, mut art) = (structural, art_start);
    for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        a[i * w..i * w + structural].copy_from_slice(coeffs);
        a[i * w + cols] = *rhs;
        match sense {
            RowSense::Le => {
                a[i * w + s] = T::one();
                basis[i] = s;
                s += 1;
            }
            RowSense::Ge => {
                a[i * w + s] = -T::one();
                s += 1;
                a[i * w + art] = T::one();
                basis[i] = art;
                art += 1;
            }
            RowSense::Eq => {
                a[i * w + art] = T::one();
                basis[i] = art;
                art += 1;
            }
        }
    }
    let mut t = Tableau {
        rows: m,
        cols,
        a,
        basis,
        cost: Vec::new(),
        iterations: 0,
        cap: 50 * (m + cols) + 1000,
    };

    if art_count > 0 {
        let mut phase1 = vec![T::zero(); cols];
        phase1[art_start..].iter_mut().for_each(|c| *c = T::one());
        t.set_objective(&phase1);
        t.run(cols)?;
        let infeasibility = -t.cost[cols];
        let scale = rows.iter().map(|r| r.2).fold(T::one(), T::max);
        if infeasibility > T::tol(1e-9) * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: T::nan(),
                iterations: t.iterations,
            });
        }
        // Drive remaining (zero-level) artificials out of the basis; rows
        // where that is impossible are redundant.
        let mut i = 0;
        while i < t.rows {
            if t.basis[i] >= art_start {
                let col = (0..art_start).find(|&j| t.at(i, j).abs() > T::tol(PIVOT_TOL));
                match col {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => t.remove_row(i),
                }
            } else {
                i += 1;
            }
        }
        t.truncate_columns(art_start);
    }

    let sign = match lp.sense {
        Sense::Maximize => -T::one(),
        Sense::Minimize => T::one(),
    };
    let mut phase2 = vec![T::zero(); t.cols];
    for (j, &c) in lp.objective.iter().enumerate() {
        phase2[column_of[j]] = sign * c;
        if lp.domains[j] == VarDomain::Free {
            phase2[column_of[j] + 1] = -sign * c;
        }
    }
    t.set_objective(&phase2);
    if let Outcome::Unbounded = t.run(t.cols)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: sign * T::neg_infinity(),
            iterations: t.iterations,
        });
    }
    let mut values = vec![T::zero(); t.cols];
    for i in 0..t.rows {
        values[t.basis[i]] = t.rhs(i);
    }
    let x: Vec<T> = (0..n)
        .map(|j| {
            let v = values[column_of[j]];
            if lp.domains[j] == VarDomain::Free {
                v - values[column_of[j] + 1]
            } else {
                v
            }
        })
        .collect();
    let objective = crate::scalar::dot(&lp.objective, &x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        iterations: t.iterations,
    })
}
