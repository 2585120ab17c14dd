use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hellinger_core::bounds::{corollary1_bound, minimax_bound};
use hellinger_core::design::{
    candidate_grid, design_info, e_optimal_design, optimize_design_cutting_plane, pi_curve, three_point_design,
    CuttingPlaneConfig, Design,
};
use hellinger_core::estimator::{smith_fit_with, Dataset, SmithObjective};
use hellinger_core::hellinger::{
    estimate_alpha_and_j, location_info, r_beta_report, uniform_info, EpsilonLadder, InfoResult, LocationFamily,
};
use hellinger_core::linalg::Matrix;
use hellinger_core::models::{ErrorFamily, ErrorModel, UniformVariant};
use hellinger_core::sim::{mc_risk, ErrorSource, SimPlan};
use hellinger_core::sphere::{min_over_sphere, SphereSearchConfig};
use hellinger_core::Error;
use serde_json::{json, Value};

use crate::args::*;
use crate::fmt::{json_num, json_vec, num, round12};

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Gap(String),
    Simulation(String),
    Other(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Gap(_) => 3,
            Failure::Simulation(_) => 4,
            Failure::Other(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Gap(m) | Failure::Simulation(m) | Failure::Other(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidParameter { .. }
            | Error::Domain(_)
            | Error::RegularRegime { .. }
            | Error::NotUnit { .. }
            | Error::NonIdentifiable
            | Error::ZeroGradient
            | Error::Singular
            | Error::DegenerateInterest
            | Error::Unbounded { .. } => Failure::Validation(msg),
            Error::Infeasible | Error::IterationLimit { .. } => Failure::Gap(msg),
            Error::SimulationFailures { .. } => Failure::Simulation(msg),
            Error::Quadrature { .. } => Failure::Other(msg),
        }
    }
}

pub type Outcome = Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Other(format!("{}: {e}", path.display()))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| invalid(format!("missing required flag --{flag}")))
}

/// Writes `text` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Other(e.to_string()))
        }
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Failure::Other(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Failure::Other(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn info_json(r: &InfoResult<f64>) -> Value {
    json!({
        "alpha": json_num(r.alpha),
        "J": json_num(r.j),
        "direction": r.direction.as_deref().map(json_vec),
        "method": r.method,
    })
}

fn error_model(family: Option<&str>, beta: f64, sigma: f64) -> Result<ErrorModel<f64>, Failure> {
    let family: ErrorFamily = family.unwrap_or("gamma").parse()?;
    Ok(ErrorModel::new(family, beta, sigma)?)
}

pub fn info(a: InfoArgs) -> Outcome {
    let ladder = EpsilonLadder::default();
    let result = match (&a.family, &a.uniform) {
        (Some(_), Some(_)) => return Err(invalid("give either --family or --uniform, not both")),
        (None, None) => return Err(invalid("missing model: give --family or --uniform")),
        (Some(fam), None) => {
            let model = error_model(Some(fam), required(a.beta, "beta")?, a.sigma.unwrap_or(1.0))?;
            if a.limit_fit {
                estimate_alpha_and_j(&LocationFamily(model), &[0.0], &[1.0], &ladder)?
            } else {
                location_info(&model)?
            }
        }
        (None, Some(var)) => {
            let variant: UniformVariant = var.parse()?;
            let theta = required(a.theta.clone(), "theta")?;
            if theta.len() != variant.dim() {
                return Err(invalid(format!("--theta needs {} value(s)", variant.dim())));
            }
            let u = a.direction.clone().unwrap_or_else(|| {
                let mut e = vec![0.0; variant.dim()];
                e[0] = 1.0;
                e
            });
            if a.limit_fit {
                estimate_alpha_and_j(&variant, &theta, &u, &ladder)?
            } else {
                uniform_info(variant, &theta, &u)?
            }
        }
    };
    println!("{}", info_json(&result));
    Ok(())
}

pub fn rbeta(a: RbetaArgs) -> Outcome {
    let betas = a.beta.unwrap_or_else(|| vec![1.0, 1.2, 1.5, 1.8]);
    let mut rows = Vec::new();
    for b in betas {
        let r = r_beta_report(b)?;
        rows.push(vec![num(b), num(r.value), num(r.head), num(r.tail), num(r.tail_bound), num(r.cutoff)]);
    }
    let text = csv_text(&["beta", "r", "head", "tail", "tail_bound", "cutoff"], &rows)?;
    emit(a.output.as_deref(), &text)
}

fn sphere(seed: u64) -> SphereSearchConfig<f64> {
    SphereSearchConfig {
        seed,
        ..SphereSearchConfig::default()
    }
}

pub fn design_opt(a: DesignOptArgs, seed: u64) -> Outcome {
    let degree = required(a.degree, "degree")?;
    let half = required(a.a, "A")?;
    let alpha = required(a.alpha, "alpha")?;
    let j_tilde = a.j_tilde.unwrap_or(1.0);
    let structure = a.structure.as_deref().unwrap_or("grid");
    let out_dir = a.out_dir.unwrap_or_else(|| PathBuf::from("."));
    let config = CuttingPlaneConfig {
        symmetric_only: !a.asymmetric,
        tolerance: a.tolerance.unwrap_or(1e-5),
        max_iterations: a.max_iterations.unwrap_or(500),
        max_cuts: a.max_cuts.unwrap_or(500),
        sphere: sphere(seed),
    };
    if !(1.0..=2.0).contains(&alpha) {
        return Err(invalid("invalid alpha: must lie in [1, 2]"));
    }

    let (design, info, direction, gap, cuts, iterations, converged) = match structure {
        "grid" => {
            let grid = candidate_grid(half, a.grid_size.unwrap_or(101))?;
            let s = optimize_design_cutting_plane(&grid, half, alpha, j_tilde, degree, &config)?;
            (s.design, s.info, s.worst_direction, s.gap, s.cuts_used, s.iterations, s.converged)
        }
        "three-point" => {
            if degree != 2 {
                return Err(invalid("invalid structure: three-point requires --degree 2"));
            }
            let (d, _) = three_point_design(half, alpha, &config.sphere)?;
            let di = design_info(&d, alpha, j_tilde, degree, &config.sphere)?;
            (d, di.value, di.direction, 0.0, 0, 0, true)
        }
        other => return Err(invalid(format!("invalid structure `{other}`: use grid or three-point"))),
    };

    fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
    let design_path = out_dir.join("design.json");
    fs::write(&design_path, design.to_json() + "\n").map_err(|e| io_err(&design_path, e))?;
    let dir: Vec<String> = direction.iter().map(|&v| num(v)).collect();
    let summary = csv_text(
        &[
            "degree", "A", "alpha", "structure", "info", "gap", "cuts_used", "iterations", "converged", "worst_direction",
        ],
        &[vec![
            degree.to_string(),
            num(half),
            num(alpha),
            structure.to_string(),
            num(info),
            num(gap),
            cuts.to_string(),
            iterations.to_string(),
            converged.to_string(),
            dir.join(";"),
        ]],
    )?;
    let summary_path = out_dir.join("summary.csv");
    fs::write(&summary_path, summary).map_err(|e| io_err(&summary_path, e))?;
    for p in design.points() {
        println!("x={} w={}", num(p.x), num(p.w));
    }
    println!("info={} gap={} cuts={}", num(info), num(gap), cuts);
    if !converged {
        return Err(Failure::Gap(format!(
            "solver stopped at its cap with relative gap {} above tolerance {}",
            num(gap / info.abs().max(f64::MIN_POSITIVE)),
            num(config.tolerance)
        )));
    }
    Ok(())
}

fn alpha_grid(a: &PiCurveArgs) -> Result<Vec<f64>, Failure> {
    if let Some(v) = &a.alphas {
        return Ok(v.clone());
    }
    let lo = a.alpha_min.unwrap_or(1.0);
    let hi = a.alpha_max.unwrap_or(2.0);
    let step = a.alpha_step.unwrap_or(0.05);
    if !(step > 0.0) || !(hi >= lo) {
        return Err(invalid("invalid alpha grid: need alpha-step > 0 and alpha-max >= alpha-min"));
    }
    let k = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=k).map(|i| round12(lo + step * i as f64)).collect())
}

pub fn pi_curve_cmd(a: PiCurveArgs, seed: u64) -> Outcome {
    let alphas = alpha_grid(&a)?;
    if alphas.iter().any(|&x| !(1.0..=2.0).contains(&x)) {
        return Err(invalid("invalid alpha: values must lie in [1, 2]"));
    }
    let mut widths = a.a.clone().unwrap_or_else(|| vec![1.0, 1.5, 2.0]);
    if widths.iter().any(|&w| !(w > 0.0)) {
        return Err(invalid("invalid A: values must be positive"));
    }
    widths.sort_by(f64::total_cmp);
    let cfg = sphere(seed);
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for &w in &widths {
        let curve = pi_curve(w, &alphas, &cfg)?;
        for p in &curve {
            rows.push(vec![num(p.a), num(p.alpha), num(p.pi), num(p.f)]);
        }
        curves.push(curve.iter().map(|p| p.pi).collect::<Vec<f64>>());
    }
    let mut text = csv_text(&["A", "alpha", "pi", "f"], &rows)?;
    // search resolution on π
    let slack = 1e-6;
    for (w, c) in widths.iter().zip(&curves) {
        let drop = c.windows(2).map(|p| p[0] - p[1]).fold(0.0, f64::max);
        text += &format!(
            "# A={}: non-decreasing in alpha: {} (largest decrease {})\n",
            num(*w),
            if drop <= slack { "yes" } else { "no" },
            num(drop)
        );
    }
    if curves.len() > 1 {
        let mut drop = 0.0f64;
        for pair in curves.windows(2) {
            for (lo, hi) in pair[0].iter().zip(&pair[1]) {
                drop = drop.max(lo - hi);
            }
        }
        text += &format!(
            "# non-decreasing in A at every alpha: {} (largest decrease {})\n",
            if drop <= slack { "yes" } else { "no" },
            num(drop)
        );
    }
    emit(a.output.as_deref(), &text)
}

fn resolve_design(
    id: &str,
    degree: usize,
    half: f64,
    alpha: f64,
    config: &CuttingPlaneConfig<f64>,
) -> Result<Design<f64>, Failure> {
    let grid_opt = || -> Result<Design<f64>, Failure> {
        let grid = candidate_grid(half, 101)?;
        Ok(optimize_design_cutting_plane(&grid, half, alpha, 1.0, degree, config)?.design)
    };
    let three_point = || -> Result<Design<f64>, Failure> {
        if degree != 2 {
            return Err(invalid("invalid design `three-point`: requires degree 2"));
        }
        Ok(three_point_design(half, alpha, &config.sphere)?.0)
    };
    if let Some(path) = id.strip_prefix("file:") {
        let text = fs::read_to_string(path).map_err(|e| invalid(format!("design file {path}: {e}")))?;
        return Ok(Design::from_json(&text)?);
    }
    if let Some(k) = id.strip_prefix("uniform") {
        let k: usize = k.parse().map_err(|_| invalid(format!("invalid design id `{id}`")))?;
        return Ok(Design::uniform(half, k)?);
    }
    match id {
        "optimal" if degree == 2 => three_point(),
        "optimal" | "grid-optimal" => grid_opt(),
        "three-point" => three_point(),
        "regular-optimal" => Ok(e_optimal_design(half, degree, 101, config)?.design),
        _ => Err(invalid(format!("invalid design id `{id}`"))),
    }
}

pub fn simulate(a: SimulateArgs, seed: u64) -> Outcome {
    let start = Instant::now();
    let degree = a.degree.unwrap_or(1);
    let alpha = a.alpha.unwrap_or(1.0);
    let half = a.a.unwrap_or(1.0);
    let n = a.n.unwrap_or(120);
    let reps = a.reps.unwrap_or(1000);
    let theta = match (a.theta.clone(), degree) {
        (Some(t), _) => t,
        (None, 1) => vec![6.0, 0.5],
        (None, 2) => vec![2.0, 4.0, 0.8],
        (None, _) => return Err(invalid("missing required flag --theta")),
    };
    if theta.len() != degree + 1 {
        return Err(invalid(format!("invalid theta: need {} values for degree {degree}", degree + 1)));
    }
    let model = error_model(a.family.as_deref(), alpha, a.sigma.unwrap_or(1.0))?;
    let ids = a.designs.clone().unwrap_or_else(|| {
        ["optimal", "uniform5", "uniform10", "uniform15"].iter().map(|s| s.to_string()).collect()
    });
    let config = CuttingPlaneConfig {
        sphere: sphere(seed),
        ..CuttingPlaneConfig::default()
    };

    let mut rows = Vec::new();
    for id in &ids {
        let design = resolve_design(id, degree, half, alpha, &config)?;
        let plan = SimPlan {
            design,
            n,
            degree,
            theta: theta.clone(),
            errors: ErrorSource::Model(model),
            replicates: reps,
            seed,
        };
        let r = mc_risk(&plan)?;
        for k in 0..=degree {
            rows.push(vec![
                id.clone(),
                format!("theta{k}"),
                num(r.per_component_mse[k]),
                num(r.per_component_se[k]),
                r.replicates.to_string(),
                seed.to_string(),
            ]);
        }
        rows.push(vec![
            id.clone(),
            "total".into(),
            num(r.total_risk),
            num(r.mc_standard_error),
            r.replicates.to_string(),
            seed.to_string(),
        ]);
    }
    let text = csv_text(&["design_id", "component", "mse", "mc_se", "replicates", "seed"], &rows)?;
    emit(a.output.as_deref(), &text)?;
    eprintln!("runtime: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn parse_matrix(s: &str, flag: &str) -> Result<Matrix<f64>, Failure> {
    let rows: Result<Vec<Vec<f64>>, _> = s
        .split(';')
        .map(|r| r.split(',').map(|v| v.trim().parse::<f64>()).collect())
        .collect();
    let rows = rows.map_err(|_| invalid(format!("invalid {flag}: expected rows `a,b;c,d`")))?;
    Ok(Matrix::from_rows(&rows)?)
}

pub fn bound(a: BoundArgs, seed: u64) -> Outcome {
    let n = a.n.unwrap_or(1);
    if n == 0 {
        return Err(invalid("invalid n: must be at least 1"));
    }
    let nf = n as f64;
    let out = match (&a.fisher, a.info) {
        (Some(_), Some(_)) => return Err(invalid("give either --info or --fisher, not both")),
        (None, None) => return Err(invalid("missing information: give --info or --fisher")),
        (None, Some(info)) => {
            let alpha = required(a.alpha, "alpha")?;
            let b = minimax_bound(alpha, nf * info)?;
            json!({
                "bound_with_constant": json_num(b.bound_with_constant),
                "bound_order": json_num(b.bound_order),
                "epsilon_diag": json_num(b.epsilon_diag),
            })
        }
        (Some(f), None) => {
            if a.alpha.is_some_and(|al| al != 2.0) {
                return Err(invalid("invalid alpha: a Fisher matrix describes the regular case alpha = 2"));
            }
            let fisher = parse_matrix(f, "fisher")?;
            let d = fisher.rows();
            let dpsi = match &a.dpsi {
                Some(s) => parse_matrix(s, "dpsi")?,
                None => Matrix::identity(d),
            };
            let eigen_path = corollary1_bound(&fisher, &dpsi)? / nf;
            // direction-free information: min over u of (uᵀ𝓘u / 4) / ‖Du‖²
            let objective = |u: &[f64]| {
                let du = dpsi.mul_vec(u);
                let norm2: f64 = du.iter().map(|v| v * v).sum();
                if norm2 < 1e-300 {
                    f64::INFINITY
                } else {
                    fisher.quadratic_form(u) / 4.0 / norm2
                }
            };
            let info = min_over_sphere(objective, d, &sphere(seed), &[]).value;
            let b = minimax_bound(2.0, nf * info)?;
            json!({
                "bound_with_constant": json_num(b.bound_with_constant),
                "bound_order": json_num(b.bound_order),
                "epsilon_diag": json_num(b.epsilon_diag),
                "info": json_num(info),
                "corollary1": json_num(eigen_path),
                "corollary1_from_info": json_num(b.bound_order / 4.0),
            })
        }
    };
    println!("{out}");
    Ok(())
}

pub fn e_optimal(a: EOptimalArgs, seed: u64) -> Outcome {
    let half = required(a.a, "A")?;
    let degree = a.degree.unwrap_or(2);
    let config = CuttingPlaneConfig {
        sphere: sphere(seed),
        ..CuttingPlaneConfig::default()
    };
    let s = e_optimal_design(half, degree, a.grid_size.unwrap_or(101), &config)?;
    emit(a.output.as_deref(), &(s.design.to_json() + "\n"))?;
    eprintln!("lambda_min={} gap={}", num(s.info), num(s.gap));
    if !s.converged {
        return Err(Failure::Gap(format!("solver stopped at its cap with gap {}", num(s.gap))));
    }
    Ok(())
}

#[derive(serde::Deserialize)]
struct Row {
    x: f64,
    y: f64,
}

pub fn fit(a: FitArgs) -> Outcome {
    let path = required(a.data, "data")?;
    let degree = a.degree.unwrap_or(1);
    let objective = match a.objective.as_deref().unwrap_or("sum-fitted") {
        "sum-fitted" => SmithObjective::SumFitted,
        "intercept" => SmithObjective::Intercept,
        other => return Err(invalid(format!("invalid objective `{other}`: use sum-fitted or intercept"))),
    };
    let mut reader = csv::Reader::from_path(&path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| invalid(e.to_string()))?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["x", "y"] {
        return Err(invalid(format!("{}: header must be `x,y`", path.display())));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| invalid(format!("{} row {}: {e}", path.display(), i + 2)))?;
        xs.push(row.x);
        ys.push(row.y);
    }
    let data = Dataset::new(xs, ys, degree)?;
    let theta = smith_fit_with(&data, objective)?;
    println!("{}", json!({ "theta": json_vec(&theta), "n": data.len(), "degree": degree }));
    Ok(())
}
