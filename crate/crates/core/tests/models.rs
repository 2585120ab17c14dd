use hellinger_core::models::ErrorModel;
use hellinger_core::quadrature::Quadrature;

fn families() -> Vec<ErrorModel<f64>> {
    let mut v = Vec::new();
    for beta in [1.0, 1.2, 1.5, 1.8] {
        v.push(ErrorModel::gamma(beta, 1.0).unwrap());
        v.push(ErrorModel::weibull(beta, 1.0).unwrap());
    }
    v.push(ErrorModel::exponential(2.0).unwrap());
    v
}

#[test]
fn densities_integrate_to_one() {
    let quad = Quadrature::default();
    for m in families() {
        let upper = m.effective_upper();
        let head = quad.integrate(|y| m.density(y), &[0.0, 1.0, upper]).unwrap().value;
        // mass beyond the effective upper limit
        let total = head + (1.0 - m.cdf(upper));
        assert!((total - 1.0).abs() < 1e-8, "{m:?}: {total}");
    }
}

#[test]
fn small_y_ratio_converges() {
    for m in families() {
        let c = m.small_y_constant();
        let b = m.beta();
        let ratios: Vec<f64> = (1..=6)
            .map(|k| {
                let y = 10f64.powi(-k);
                m.density(y) / (b * c * y.powf(b - 1.0))
            })
            .collect();
        let dev: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
        assert!(dev[5] < 0.01, "{m:?}: {ratios:?}");
        for w in dev[2..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{m:?}: {ratios:?}");
        }
    }
}

#[test]
fn samplers_match_cdf() {
    let n = 100_000;
    for (i, m) in families().into_iter().enumerate() {
        let mut s = m.sample_errors(n, 100 + i as u64);
        s.sort_by(f64::total_cmp);
        let ks = s
            .iter()
            .enumerate()
            .map(|(k, &y)| {
                let f = m.cdf(y);
                (f - k as f64 / n as f64).abs().max(((k + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "{m:?}: KS {ks}");
    }
}

#[test]
fn gamma_sample_mean() {
    let m = ErrorModel::gamma(1.4, 1.0).unwrap();
    let s = m.sample_errors(1_000_000, 3);
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    assert!((mean - 1.4).abs() < 0.01);
    assert_eq!(m.sample_errors(5, 42), m.sample_errors(5, 42));
}
