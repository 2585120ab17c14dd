//! Derivative-free one- and multi-dimensional minimizers.

use crate::scalar::Scalar;

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(argmin, min)`. Ties go to the smaller abscissa.
pub fn golden_section<T, F>(f: F, mut a: T, mut b: T, tol: T, max_iter: usize) -> (T, T)
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let (fa, fb) = (f(a), f(b));
    let mut best = (a, fa);
    for cand in [(c, fc), (d, fd), (b, fb)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead<T> {
    pub max_iter: usize,
    /// Stop when the simplex diameter falls below this.
    pub diameter_tol: T,
    pub initial_step: T,
}

impl<T: Scalar> Default for NelderMead<T> {
    fn default() -> Self {
        NelderMead {
            max_iter: 200,
            diameter_tol: T::tol(1e-10),
            initial_step: T::lit(0.05),
        }
    }
}

impl<T: Scalar> NelderMead<T> {
    /// Minimizes `f` from `x0`; returns the best vertex and its value.
    pub fn minimize<F>(&self, f: F, x0: &[T]) -> (Vec<T>, T)
    where
        F: Fn(&[T]) -> T,
    {
        let n = x0.len();
        let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let fx = f(&x);
            simplex.push((x, fx));
        }
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        for _ in 0..self.max_iter {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            if diameter(&simplex) <= self.diameter_tol {
                break;
            }
            let mut centroid = vec![T::zero(); n];
            for (x, _) in &simplex[..n] {
                for (c, &xi) in centroid.iter_mut().zip(x) {
                    *c += xi / T::from_usize(n).expect("small dimension");
                }
            }
            let worst = simplex[n].clone();
            let along = |t: T| -> Vec<T> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(&c, &w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(T::one());
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = along(two);
                let fe = f(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let x = along(half);
                let fx = f(&x);
                (x, fx)
            } else {
                let x = along(-half);
                let fx = f(&x);
                (x, fx)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<T> = best
                    .iter()
                    .zip(&vertex.0)
                    .map(|(&b, &v)| b + half * (v - b))
                    .collect();
                let fx = f(&x);
                *vertex = (x, fx);
            }
        }
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        simplex.swap_remove(0)
    }
}

fn diameter<T: Scalar>(simplex: &[(Vec<T>, T)]) -> T {
    let mut d = T::zero();
    for (i, (a, _)) in simplex.iter().enumerate() {
        for (b, _) in &simplex[i + 1..] {
            let dist = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| (x - y) * (x - y))
                .sum::<T>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}
