#![allow(dead_code)]

use hellinger_core::design::Design;
use hellinger_core::lp::{LinearProgram, RowSense, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

/// `r(β)` by Simpson after the substitutions `w = t⁴` on `[0, 1]` and
/// `w = eˢ` beyond, with the leading-order tail `b² W^(β−2)/(2−β)` past the
/// last node.
pub fn r_beta_simpson(beta: f64, panels: usize) -> f64 {
    let b = (beta - 1.0) / 2.0;
    let g = |w: f64| {
        let d = if w < 1.0 {
            (w + 1.0).powf(b) - w.powf(b)
        } else {
            w.powf(b) * (b * (1.0 / w).ln_1p()).exp_m1()
        };
        d * d
    };
    let head = simpson(|t| g(t.powi(4)) * 4.0 * t.powi(3), 0.0, 1.0, panels);
    let s_max = 40.0 / (2.0 - beta);
    let tail = simpson(|s| g(s.exp()) * s.exp(), 0.0, s_max, panels * 8);
    let rest = b * b * ((beta - 2.0) * s_max).exp() / (2.0 - beta);
    head + tail + rest
}

/// `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct SmallLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl SmallLp {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.random_range(2..=5);
        let m = rng.random_range(2..=7);
        let c = (0..n).map(|_| rng.random_range(-1.0..2.0)).collect();
        let mut a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..2.0)).collect())
            .collect();
        let mut b: Vec<f64> = (0..m).map(|_| rng.random_range(-0.5..5.0)).collect();
        // a box row keeps every instance bounded
        a.push(vec![1.0; n]);
        b.push(10.0);
        SmallLp { c, a, b }
    }

    pub fn to_program(&self) -> LinearProgram<f64> {
        let mut lp = LinearProgram::new(Sense::Maximize, self.c.clone());
        for (row, &rhs) in self.a.iter().zip(&self.b) {
            lp.constraint(row.clone(), RowSense::Le, rhs);
        }
        lp
    }

    /// Best objective over all basic feasible points, `None` if there are none.
    pub fn vertex_enumeration(&self) -> Option<f64> {
        let n = self.c.len();
        let mut rows: Vec<(Vec<f64>, f64)> = self.a.iter().cloned().zip(self.b.iter().copied()).collect();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = -1.0;
            rows.push((e, 0.0));
        }
        let mut best: Option<f64> = None;
        for subset in combinations(rows.len(), n) {
            let m: Vec<Vec<f64>> = subset.iter().map(|&i| rows[i].0.clone()).collect();
            let r: Vec<f64> = subset.iter().map(|&i| rows[i].1).collect();
            let Some(x) = solve_square(m, r) else { continue };
            let feasible = rows
                .iter()
                .all(|(a, b)| a.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9);
            if feasible {
                let v: f64 = self.c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
        best
    }
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn solve_square(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-10 {
            return None;
        }
        m.swap(p, c);
        r.swap(p, c);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                for j in c..n {
                    let v = m[c][j];
                    m[i][j] -= f * v;
                }
                r[i] -= f * r[c];
            }
        }
    }
    Some((0..n).map(|i| r[i] / m[i][i]).collect())
}

/// A random balanced design on `[-a, a]` with at most seven points.
pub fn random_balanced_design(rng: &mut ChaCha8Rng, a: f64) -> Design<f64> {
    let k = rng.random_range(1..=6);
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.random_range(-a..=a), rng.random_range(0.05..1.0)))
        .collect();
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.iter_mut().for_each(|p| p.1 /= total);
    let mean: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
    if mean.abs() > 1e-12 {
        let lambda = mean.abs() / (mean.abs() + a);
        pairs.iter_mut().for_each(|p| p.1 *= 1.0 - lambda);
        pairs.push((-mean.signum() * a, lambda));
    }
    let d = Design::from_weights(a, &pairs).expect("valid random design");
    assert!(d.is_balanced(), "mean {}", d.mean());
    d
}

/// A random symmetric positive-definite matrix `LLᵀ + 0.1 I`.
pub fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    let l: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| l[i][k] * l[j][k]).sum::<f64>() + if i == j { 0.1 } else { 0.0 })
                .collect()
        })
        .collect()
}
