//! Minimization of antipodally symmetric, possibly kinked functions over the
//! unit sphere: a hemisphere grid scan followed by Nelder–Mead polishing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::optim::NelderMead;
use crate::scalar::{normalized, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSearchConfig<T> {
    /// Angular grid step in degrees for `d = 2`.
    pub angular_step_deg: T,
    /// Number of hemisphere points for `d ≥ 3`.
    pub points: usize,
    pub polish_iterations: usize,
    /// Simplex diameter at which polishing stops.
    pub tolerance: T,
    /// Seed for the random point sets used when `d ≥ 4`.
    pub seed: u64,
}

impl<T: Scalar> Default for SphereSearchConfig<T> {
    fn default() -> Self {
        SphereSearchConfig {
            angular_step_deg: T::lit(0.05),
            points: 20_000,
            polish_iterations: 200,
            tolerance: T::tol(1e-10),
            seed: 0x5eed,
        }
    }
}

impl<T: Scalar> SphereSearchConfig<T> {
    /// A cheaper grid, for inner loops where kink candidates are supplied.
    pub fn coarse() -> Self {
        SphereSearchConfig {
            angular_step_deg: T::lit(0.5),
            points: 2_000,
            ..Self::default()
        }
    }

    fn grid(&self, d: usize) -> Vec<Vec<T>> {
        match d {
            0 => Vec::new(),
            1 => vec![vec![T::one()]],
            2 => {
                let step = self.angular_step_deg.to_radians();
                let n = (T::PI() / step).ceil().to_usize().unwrap_or(1).max(1);
                (0..n)
                    .map(|i| {
                        let a = T::PI() * T::from_usize(i).expect("grid index") / T::from_usize(n).expect("grid size");
                        vec![a.cos(), a.sin()]
                    })
                    .collect()
            }
            3 => {
                let n = self.points.max(1);
                let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
                let nf = T::from_usize(n).expect("grid size");
                (0..n)
                    .map(|i| {
                        let fi = T::from_usize(i).expect("grid index");
                        let z = (fi + T::lit(0.5)) / nf;
                        let r = (T::one() - z * z).max(T::zero()).sqrt();
                        let phi = golden * fi;
                        vec![r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect()
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut out = Vec::with_capacity(self.points);
                while out.len() < self.points {
                    let v: Vec<T> = (0..d)
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            T::lit(z)
                        })
                        .collect();
                    if let Some(u) = normalized(&v) {
                        out.push(canonical_sign(u));
                    }
                }
                out
            }
        }
    }
}

/// Best direction found and the objective there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereMin<T> {
    pub direction: Vec<T>,
    pub value: T,
}

/// Flips `u` so that its first component of non-negligible size is positive.
pub fn canonical_sign<T: Scalar>(mut u: Vec<T>) -> Vec<T> {
    let scale = u.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if let Some(first) = u.iter().find(|x| x.abs() > T::tol(1e-12) * scale) {
        if *first < T::zero() {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
    u
}

fn better<T: Scalar>(a: (&[T], T), b: (&[T], T)) -> bool {
    match a.1.partial_cmp(&b.1) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Equal) => a.0 < b.0,
        Some(std::cmp::Ordering::Greater) => false,
        None => !a.1.is_nan() && b.1.is_nan(),
    }
}

const NEIGHBOURS: usize = 4;

/// Minimizes `objective` over unit vectors in `ℝ^d`.
///
/// `candidates` are extra directions evaluated and polished alongside the
/// grid (e.g. known kink locations). The objective must satisfy
/// `f(u) = f(−u)`; only a hemisphere is scanned.
pub fn min_over_sphere<T, F>(objective: F, d: usize, config: &SphereSearchConfig<T>, candidates: &[Vec<T>]) -> SphereMin<T>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
{
    let grid = config.grid(d);
    let values: Vec<T> = grid.par_iter().map(|u| objective(u)).collect();
    let mut best_idx = 0;
    for i in 1..grid.len() {
        if better((&grid[i], values[i]), (&grid[best_idx], values[best_idx])) {
            best_idx = i;
        }
    }
    let mut starts: Vec<Vec<T>> = vec![grid[best_idx].clone()];
    if d >= 2 {
        let centre = &grid[best_idx];
        let mut by_distance: Vec<(T, usize)> = grid
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != best_idx)
            .map(|(i, u)| {
                let dot = crate::scalar::dot(u, centre).abs();
                (T::one() - dot, i)
            })
            .collect();
        by_distance.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        starts.extend(by_distance.iter().take(NEIGHBOURS).map(|&(_, i)| grid[i].clone()));
    }
    // Only the most promising extra candidates are polished.
    let mut extra: Vec<(Vec<T>, T)> = candidates
        .par_iter()
        .filter_map(|c| normalized(c))
        .map(|u| {
            let v = objective(&u);
            (u, v)
        })
        .collect();
    extra.sort_by(|a, b| {
        if better((&a.0, a.1), (&b.0, b.1)) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    starts.extend(extra.into_iter().take(NEIGHBOURS + 1).map(|(u, _)| u));

    let spacing = match d {
        2 => config.angular_step_deg.to_radians(),
        _ => (T::lit(4.0) / T::from_usize(config.points.max(1)).expect("grid size")).sqrt(),
    };
    let nm = NelderMead {
        max_iter: config.polish_iterations,
        diameter_tol: config.tolerance,
        initial_step: spacing.max(T::tol(1e-6)),
    };
    let on_sphere = |v: &[T]| normalized(v).map_or(T::infinity(), |u| objective(&u));
    let polished: Vec<(Vec<T>, T)> = starts
        .par_iter()
        .map(|s| {
            let start_value = objective(s);
            let (v, _) = nm.minimize(on_sphere, s);
            let u = normalized(&v).map(canonical_sign).unwrap_or_else(|| s.clone());
            let value = objective(&u);
            if value <= start_value {
                (u, value)
            } else {
                (canonical_sign(s.clone()), start_value)
            }
        })
        .collect();
    let mut best = (canonical_sign(grid[best_idx].clone()), values[best_idx]);
    for (u, v) in polished {
        if better((&u, v), (&best.0, best.1)) {
            best = (u, v);
        }
    }
    SphereMin {
        direction: best.0,
        value: best.1,
    }
}
