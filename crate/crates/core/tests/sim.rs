use hellinger_core::design::{design_info, Design};
use hellinger_core::hellinger::location_info;
use hellinger_core::models::ErrorModel;
use hellinger_core::sim::{mc_risk, ErrorSource, SimPlan};
use hellinger_core::sphere::SphereSearchConfig;

fn plan(design: Design<f64>, n: usize, replicates: usize) -> SimPlan<f64> {
    SimPlan {
        design,
        n,
        degree: 1,
        theta: vec![6.0, 0.5],
        errors: ErrorSource::Model(ErrorModel::gamma(1.0, 1.0).unwrap()),
        replicates,
        seed: 17,
    }
}

#[test]
fn relabeling_points_does_not_change_risk() {
    let pairs = [(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)];
    let mut reversed = pairs;
    reversed.reverse();
    let a = mc_risk(&plan(Design::from_weights(1.0, &pairs).unwrap(), 40, 200)).unwrap();
    let b = mc_risk(&plan(Design::from_weights(1.0, &reversed).unwrap(), 40, 200)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn standard_error_scales_with_replicates() {
    let d = Design::uniform(1.0, 5).unwrap();
    let small = mc_risk(&plan(d.clone(), 60, 250)).unwrap();
    let large = mc_risk(&plan(d, 60, 1000)).unwrap();
    let ratio = small.mc_standard_error / large.mc_standard_error;
    assert!((ratio / 2.0 - 1.0).abs() < 0.25, "ratio {ratio}");
}

#[test]
fn totals_and_entries_consistent() {
    let r = mc_risk(&plan(Design::uniform(1.0, 10).unwrap(), 50, 300)).unwrap();
    let sum: f64 = r.per_component_mse.iter().sum();
    assert!((sum - r.total_risk).abs() < 1e-12);
    assert!(r.per_component_mse.iter().chain(&r.per_component_se).all(|&v| v >= 0.0));
    assert_eq!(r.replicates + r.failed, 300);
}

#[test]
fn risk_respects_lower_bound_order() {
    // α = 1: risk · (n 𝒥)² stays bounded away from zero
    let model = ErrorModel::gamma(1.0, 1.0).unwrap();
    let j = location_info(&model).unwrap().j;
    let d = Design::from_weights(1.0, &[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
    let info = design_info(&d, 1.0, j, 1, &SphereSearchConfig::default()).unwrap().value;
    let scaled: Vec<f64> = [60, 120, 240]
        .iter()
        .map(|&n| {
            let r = mc_risk(&plan(d.clone(), n, 500)).unwrap();
            r.total_risk * (n as f64 * info).powi(2)
        })
        .collect();
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().copied().fold(0.0, f64::max);
    assert!(lo > 1.0 / (32.0 * 9.0), "{scaled:?}");
    assert!(hi / lo < 2.0, "{scaled:?}");
}

#[test]
fn too_many_failures_abort() {
    // A one-point design cannot identify a slope.
    let d = Design::from_weights(1.0, &[(0.0, 1.0)]).unwrap();
    assert!(mc_risk(&plan(d, 10, 20)).is_err());
}
