use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::{anyhow, Context};
use nalgebra::DMatrix;
use num_complex::Complex64;
use picard_core::arithmetic::{
    cusp_neighborhood_test, enumerate_lattice_with, heisenberg_matrix, GroupElement, QuadraticField,
};
use picard_core::asymptotics::{fit_exponent, sandwich_experiment, GrowthSample, SandwichMode, SandwichOptions};
use picard_core::geometry::{cayley, distance, CayleyMap, FormTag, Model, ModelPoint};
use picard_core::kernel::{
    auto_norm_bound, cusp_lattice_sum, gamma_tail_integral, kernel_sum, CuspSumOptions, KernelParams,
};
use picard_core::metric::{bergman_matrix, diagonal_derivatives};
use picard_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{Command, RunConfig};
use crate::fd::wirtinger_hessian;
use crate::output::{complex, csv_header, json_meta, num, pretty, Outputs};

/// A failure with a dedicated exit status.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

pub const EXIT_INVALID_POINT: u8 = 2;
pub const EXIT_TRUNCATION: u8 = 3;
pub const EXIT_VANISHING: u8 = 4;
pub const EXIT_SANDWICH: u8 = 5;

fn exit(code: u8, message: String) -> anyhow::Error {
    Exit { code, message }.into()
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<Outputs> {
    match cfg.command() {
        Command::Distance => cmd_distance(cfg),
        Command::CuspSum => cmd_cusp_sum(cfg),
        Command::MetricScan => cmd_metric_scan(cfg),
        Command::Sandwich => cmd_sandwich(cfg),
        Command::Lattice => cmd_lattice(cfg),
    }
}

fn parse_coords(text: &str, label: &str) -> anyhow::Result<Vec<Complex64>> {
    text.split(',')
        .map(|s| {
            s.trim().parse::<Complex64>().map_err(|_| {
                exit(
                    EXIT_INVALID_POINT,
                    format!("{label}: cannot parse coordinate `{}`", s.trim()),
                )
            })
        })
        .collect()
}

fn make_point(model: Model, coords: Vec<Complex64>, label: &str) -> anyhow::Result<ModelPoint> {
    ModelPoint::new(model, coords).map_err(|e| exit(EXIT_INVALID_POINT, format!("{label}: {e}")))
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn point_json(p: &ModelPoint) -> serde_json::Value {
    json!(p.coords().iter().map(|z| complex(*z)).collect::<Vec<_>>())
}

fn cmd_distance(cfg: &RunConfig) -> anyhow::Result<Outputs> {
    let model = cfg.model().map_err(|e| exit(EXIT_INVALID_POINT, e.to_string()))?;
    let z = make_point(model, parse_coords(cfg.z.as_deref().unwrap_or_default(), "z")?, "z")?;
    let w = make_point(model, parse_coords(cfg.w.as_deref().unwrap_or_default(), "w")?, "w")?;
    if z.n() != w.n() {
        return Err(exit(
            EXIT_INVALID_POINT,
            format!("z has {} coordinates but w has {}", z.n(), w.n()),
        ));
    }
    let mut doc = json!({
        "meta": json_meta(cfg),
        "model": model.name(),
        "n": z.n(),
        "distance": distance(&z, &w)?,
    });
    if cfg.images == Some(true) {
        let mut images = Vec::new();
        for map in CayleyMap::ALL.into_iter().filter(|m| m.source() == model) {
            images.push(json!({
                "map": map.name(),
                "target": map.target().name(),
                "z": point_json(&cayley(map, &z)?),
                "w": point_json(&cayley(map, &w)?),
            }));
        }
        doc["images"] = json!(images);
    }
    if cfg.roundtrip == Some(true) {
        let mut residual = 0.0f64;
        for p in [&z, &w] {
            let b = match model {
                Model::Ball => p.clone(),
                Model::LeftHalf => cayley(CayleyMap::G31, p)?,
                Model::Hyperquadric => cayley(CayleyMap::G21, p)?,
            };
            let back = cayley(CayleyMap::G31, &cayley(CayleyMap::G13, &b)?)?;
            residual = residual.max(max_abs_diff(back.coords(), b.coords()));
        }
        doc["roundtrip_residual"] = json!(residual);
    }
    if model == Model::LeftHalf {
        let eps = cfg.epsilon.unwrap_or(1.0);
        let variant = cfg.variant.unwrap_or_default();
        doc["cusp_neighborhood"] = json!({
            "epsilon": eps,
            "z": cusp_neighborhood_test(&z, eps, variant)?,
            "w": cusp_neighborhood_test(&w, eps, variant)?,
        });
    }
    Ok(Outputs {
        main: pretty(&doc),
        extras: vec![],
    })
}

fn grid_params(cfg: &RunConfig) -> anyhow::Result<Vec<KernelParams>> {
    let n = cfg.n.unwrap_or(2);
    let c = cfg.c.unwrap_or(1.0);
    cfg.k_grid
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|&k| Ok(KernelParams::new(k, n, c)?))
        .collect()
}

fn alpha_for(cfg: &RunConfig, params: &KernelParams) -> f64 {
    cfg.alpha.unwrap_or(params.big_k() as f64 / (4.0 * PI))
}

/// Cusp-sum options for one weight. An automatic bound above the cap is a
/// truncation failure.
fn cusp_options(cfg: &RunConfig, params: &KernelParams, alpha: f64) -> anyhow::Result<CuspSumOptions> {
    let mut opts = CuspSumOptions {
        rule: cfg.rule.unwrap_or_default(),
        ..CuspSumOptions::default()
    };
    if cfg.exact_bound == Some(true) {
        opts.norm_bound = cfg.norm_bound;
        return Ok(opts);
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(anyhow!("α must be positive, got {alpha}"));
    }
    let needed = auto_norm_bound(params, alpha, &opts);
    if let Some(cap) = cfg.norm_bound {
        if needed > cap {
            return Err(exit(
                EXIT_TRUNCATION,
                format!(
                    "k = {}: reaching the tail target needs norm bound {}, above the cap {}",
                    params.k,
                    num(needed),
                    num(cap)
                ),
            ));
        }
    }
    Ok(opts)
}

fn fit_json(cfg: &RunConfig, samples: &[GrowthSample]) -> Option<String> {
    let fit = fit_exponent(samples).ok()?;
    let n = cfg.n.unwrap_or(2);
    Some(pretty(&json!({
        "meta": json_meta(cfg),
        "fit": fit,
        "combined_exponent": fit.combined_exponent(n),
    })))
}

fn cmd_cusp_sum(cfg: &RunConfig) -> anyhow::Result<Outputs> {
    let field = QuadraticField::new(cfg.d.unwrap_or(3))?;
    let mode = cfg.erratum_mode.unwrap_or_default();
    let mut csv = csv_header(cfg);
    csv.push_str("k,K,alpha,norm_bound,terms,log_sum,tail,relative_tail,gamma_tail\n");
    let mut samples = Vec::new();
    for params in grid_params(cfg)? {
        let alpha = alpha_for(cfg, &params);
        let opts = cusp_options(cfg, &params, alpha)?;
        let report = cusp_lattice_sum(&params, &field, alpha, &opts)?;
        let gamma = gamma_tail_integral(0.5 * params.big_k() as f64, mode)?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            params.k,
            params.big_k(),
            num(alpha),
            num(report.norm_bound),
            report.terms_used,
            num(report.log_abs_sum),
            num(report.tail_estimate),
            num(report.relative_tail),
            num(gamma)
        )?;
        samples.push(GrowthSample {
            k: params.k,
            value: report.log_abs_sum,
            label: "cusp_lattice_sum".into(),
        });
    }
    Ok(Outputs {
        main: csv,
        extras: fit_json(cfg, &samples).map(|s| (".fit.json", s)).into_iter().collect(),
    })
}

fn cmd_sandwich(cfg: &RunConfig) -> anyhow::Result<Outputs> {
    let field = QuadraticField::new(cfg.d.unwrap_or(3))?;
    let grid = grid_params(cfg)?;
    let Some(first) = grid.first() else {
        return Err(anyhow!("sandwich needs at least one weight"));
    };
    let mode = match cfg.alpha {
        Some(alpha) => {
            let mut coords = vec![0.0; first.n];
            coords[0] = -alpha / 2.0;
            SandwichMode::Fixed(make_point(
                Model::LeftHalf,
                coords.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
                "sandwich point",
            )?)
        }
        None => SandwichMode::CuspBoundary,
    };
    // weight-independent options; the cap is checked for every weight
    let mut cusp = CuspSumOptions::default();
    for params in &grid {
        cusp = cusp_options(cfg, params, alpha_for(cfg, params))?;
    }
    let defaults = SandwichOptions::default();
    let opts = SandwichOptions {
        r_x: cfg.r_x.unwrap_or(defaults.r_x),
        m_terms: cfg.m_terms.unwrap_or(defaults.m_terms),
        trig: cfg.trig.unwrap_or(defaults.trig),
        cusp,
    };
    let report = sandwich_experiment(&grid, &field, &mode, &opts).map_err(|e| match e {
        Error::SandwichViolation { .. } => exit(EXIT_SANDWICH, e.to_string()),
        other => other.into(),
    })?;
    let mut csv = csv_header(cfg);
    csv.push_str(
        "k,K,alpha,log_lower,log_measured,log_upper,measured_over_lower,upper_over_measured,in_cusp_region,terms\n",
    );
    for row in &report.rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            row.k,
            row.k as usize * (first.n + 1),
            num(row.alpha),
            num(row.log_lower),
            num(row.log_measured),
            num(row.log_upper),
            num(row.measured_over_lower),
            num(row.upper_over_measured),
            row.in_cusp_region,
            row.terms_used
        )?;
    }
    let fit = pretty(&json!({
        "meta": json_meta(cfg),
        "measured_fit": report.measured_fit,
        "lower_fit": report.lower_fit,
        "slope_gap": report.slope_gap(),
    }));
    Ok(Outputs {
        main: csv,
        extras: vec![(".fit.json", fit)],
    })
}

fn cmd_lattice(cfg: &RunConfig) -> anyhow::Result<Outputs> {
    let field = QuadraticField::new(cfg.d.unwrap_or(3))?;
    let n = cfg.n.unwrap_or(2);
    let bound = cfg.norm_bound.context("lattice needs --norm-bound")?;
    let points = enumerate_lattice_with(&field, n, bound, cfg.rule.unwrap_or_default())?;
    let mut csv = csv_header(cfg);
    let coords: Vec<String> = (1..n).map(|j| format!("tau{j}_a,tau{j}_b")).collect();
    let mut cols = vec!["index".to_string()];
    cols.extend(coords);
    cols.extend(["m", "tau_norm", "t", "size"].map(String::from));
    writeln!(csv, "{}", cols.join(","))?;
    for (i, p) in points.iter().enumerate() {
        let tau: Vec<String> = p.tau.iter().map(|x| format!("{},{}", x.a, x.b)).collect();
        let mut fields = vec![i.to_string()];
        fields.extend(tau);
        fields.extend([
            p.m.to_string(),
            p.tau_norm.to_string(),
            num(p.t(&field)),
            num(p.size(&field)),
        ]);
        writeln!(csv, "{}", fields.join(","))?;
    }
    Ok(Outputs {
        main: csv,
        extras: vec![],
    })
}

/// Inline JSON when the text opens with `[`, otherwise a file to read.
fn json_source(spec: &str, what: &str) -> anyhow::Result<String> {
    if spec.trim_start().starts_with('[') {
        Ok(spec.to_string())
    } else {
        std::fs::read_to_string(spec).with_context(|| format!("reading {what} {spec}"))
    }
}

fn metric_elements(cfg: &RunConfig, n: usize) -> anyhow::Result<Vec<GroupElement>> {
    if cfg.identity_only == Some(true) {
        return Ok(vec![GroupElement::identity(n, FormTag::H1)]);
    }
    if let Some(spec) = &cfg.elements {
        let raw: Vec<Vec<Vec<[f64; 2]>>> = serde_json::from_str(&json_source(spec, "elements")?)
            .context("elements must be [[[[re, im], …], …], …]")?;
        return raw
            .into_iter()
            .enumerate()
            .map(|(i, rows)| {
                if rows.len() != n + 1 || rows.iter().any(|r| r.len() != n + 1) {
                    return Err(anyhow!("element {i} is not a {0} × {0} matrix", n + 1));
                }
                let m = DMatrix::from_fn(n + 1, n + 1, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1]));
                GroupElement::new(m, FormTag::H1).with_context(|| format!("element {i}"))
            })
            .collect();
    }
    let field = QuadraticField::new(cfg.d.unwrap_or(3))?;
    let bound = cfg.norm_bound.unwrap_or(2.0);
    let mut out = Vec::new();
    for p in enumerate_lattice_with(&field, n, bound, cfg.rule.unwrap_or_default())? {
        out.push(heisenberg_matrix(&p.to_heisenberg(&field))?.to_ball()?);
    }
    if let Some(s) = cfg.boost {
        out.push(GroupElement::ball_boost(n, s));
        out.push(GroupElement::ball_boost(n, -s));
    }
    Ok(out)
}

fn metric_grid(cfg: &RunConfig, n: usize) -> anyhow::Result<Vec<Vec<Complex64>>> {
    if let Some(spec) = &cfg.grid {
        let raw: Vec<Vec<[f64; 2]>> =
            serde_json::from_str(&json_source(spec, "grid")?).context("grid must be [[[re, im], …], …]")?;
        return Ok(raw
            .into_iter()
            .map(|p| p.into_iter().map(|[a, b]| Complex64::new(a, b)).collect())
            .collect());
    }
    let zero = Complex64::new(0.0, 0.0);
    if let Some(spec) = &cfg.grid_box {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let [hw, count] = parts[..] else {
            return Err(anyhow!("--grid-box takes half_width,count"));
        };
        let hw: f64 = hw.parse().context("grid-box half width")?;
        let count: usize = count.parse().context("grid-box count")?;
        let at = |i: usize| -hw + hw * (2 * i + 1) as f64 / count as f64;
        let mut out = Vec::new();
        for i in 0..count {
            for j in 0..count {
                let mut p = vec![zero; n];
                p[0] = Complex64::new(at(i), at(j));
                out.push(p);
            }
        }
        return Ok(out);
    }
    if let Some(count) = cfg.random_points {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)))
                .collect();
            if p.iter().map(|x| x.norm_sqr()).sum::<f64>() < 0.81 {
                out.push(p);
            }
        }
        return Ok(out);
    }
    Ok(vec![vec![zero; n]])
}

fn describe(coords: &[Complex64]) -> String {
    let parts: Vec<String> = coords.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}

/// Largest entry of `|FD ∂∂̄ B - analytic ∂∂̄ B|` relative to the largest
/// analytic entry, with `B` rescaled by its magnitude at `z`.
fn fd_residual(z: &ModelPoint, params: &KernelParams, elements: &[GroupElement]) -> anyhow::Result<f64> {
    let bundle = diagonal_derivatives(z, params, elements)?;
    let shift = bundle.log_abs_b;
    let b_of = |p: &[Complex64]| match ModelPoint::new(Model::Ball, p.to_vec()) {
        Ok(q) => kernel_sum(&q, &q, params, elements, None).map_or(f64::NAN, |r| r.value.shifted(shift).re),
        Err(_) => f64::NAN,
    };
    let h = 0.02 * z.margin() / (params.big_k() as f64).sqrt();
    let fd = wirtinger_hessian(&b_of, z.coords(), h);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (row_fd, row_an) in fd.iter().zip(&bundle.d2) {
        for (a, b) in row_fd.iter().zip(row_an) {
            let an = b.shifted(shift);
            worst = worst.max((a - an).norm());
            scale = scale.max(an.norm());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

fn cmd_metric_scan(cfg: &RunConfig) -> anyhow::Result<Outputs> {
    let n = cfg.n.unwrap_or(2);
    let params = KernelParams::new(cfg.k.unwrap_or(2), n, cfg.c.unwrap_or(1.0))?;
    let sign = cfg.sign.unwrap_or_default();
    let elements = metric_elements(cfg, n)?;
    let grid = metric_grid(cfg, n)?;
    let mut points = Vec::with_capacity(grid.len());
    for (i, coords) in grid.into_iter().enumerate() {
        if coords.len() != n {
            return Err(exit(
                EXIT_INVALID_POINT,
                format!("grid point {i} has {} coordinates, expected {n}", coords.len()),
            ));
        }
        points.push(make_point(Model::Ball, coords, &format!("grid point {i}"))?);
    }
    let mut csv = csv_header(cfg);
    let mut cols = vec!["index".to_string()];
    cols.extend((1..=n).map(|j| format!("z{j}_re,z{j}_im")));
    cols.extend(
        [
            "elements",
            "log_b",
            "volume_ratio",
            "det_re",
            "det_im",
            "hermitian_defect",
            "definiteness",
            "fd_residual",
        ]
        .map(String::from),
    );
    writeln!(csv, "{}", cols.join(","))?;
    for (i, z) in points.iter().enumerate() {
        let m = bergman_matrix(z, &params, &elements, sign).map_err(|e| match e {
            Error::VanishingKernel => exit(
                EXIT_VANISHING,
                format!("kernel diagonal vanishes at grid point {i} {}", describe(z.coords())),
            ),
            other => other.into(),
        })?;
        let det = m.determinant();
        let ratio = z.margin().powi(n as i32 + 1) * det.norm();
        let definiteness = if m.is_positive_definite() {
            "positive"
        } else if m.is_negative_definite() {
            "negative"
        } else {
            "indefinite"
        };
        let residual = fd_residual(z, &params, &elements)?;
        let mut fields = vec![i.to_string()];
        fields.extend(z.coords().iter().map(|c| format!("{},{}", num(c.re), num(c.im))));
        fields.extend([
            elements.len().to_string(),
            num(m.b.log_mag),
            num(ratio),
            num(det.re),
            num(det.im),
            num(m.hermitian_defect()),
            definiteness.to_string(),
            num(residual),
        ]);
        writeln!(csv, "{}", fields.join(","))?;
    }
    Ok(Outputs {
        main: csv,
        extras: vec![],
    })
}
