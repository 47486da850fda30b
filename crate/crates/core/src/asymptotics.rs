//! Exponent fits, the closed-form compact-part bound and the lower/upper
//! sandwich around the cusp lattice sum.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithmetic::QuadraticField;
use crate::error::{Error, Result};
use crate::geometry::{Model, ModelPoint};
use crate::kernel::{cusp_lattice_sum, log_poisson_lower_bound, CuspSumOptions, KernelParams, SumReport};
use crate::logdomain::{ln_cosh, ln_sinh, log_add, log_sum_exp};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub k: u32,
    /// Natural log of the sampled quantity.
    pub value: f64,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub k_range: (u32, u32),
}

impl FitResult {
    /// Exponent of `c · k^slope` when `c = Θ(k^n)`.
    pub fn combined_exponent(&self, n: usize) -> f64 {
        n as f64 + self.slope
    }
}

/// Least squares of `value` (a logarithm) against `ln k`.
pub fn fit_exponent(samples: &[GrowthSample]) -> Result<FitResult> {
    if samples.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "an exponent fit needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    if samples.windows(2).any(|w| w[1].k <= w[0].k) {
        if samples.iter().all(|s| s.k == samples[0].k) {
            return Err(Error::Degenerate("all samples share the same k".into()));
        }
        return Err(Error::InvalidParameter("k must be strictly increasing".into()));
    }
    if samples.iter().any(|s| !s.value.is_finite()) {
        return Err(Error::InvalidParameter("non-finite sample value".into()));
    }
    let m = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| (s.k as f64).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        residual_rms: (rss / m).sqrt(),
        k_range: (samples[0].k, samples[samples.len() - 1].k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrigVariant {
    /// `sinh^{2n}(5r/8)` in the numerator of the middle term.
    #[default]
    Sinh,
    /// The literal `sin^{2n}(5r/8)`.
    Sin,
}

/// The three terms of the compact-part bound, each as a natural log.
pub fn compact_bound_log_terms(params: &KernelParams, r: f64, variant: TrigVariant) -> Result<[f64; 3]> {
    let n = params.n as f64;
    let kf = params.big_k() as f64;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    if kf <= 2.0 * n + 1.0 {
        return Err(Error::InvalidParameter(format!(
            "the bound needs K = {kf} > 2n + 1 = {}",
            2.0 * n + 1.0
        )));
    }
    let ln_c = params.c.ln();
    let ln_num = match variant {
        TrigVariant::Sinh => 2.0 * n * ln_sinh(5.0 * r / 8.0),
        TrigVariant::Sin => 2.0 * n * (5.0 * r / 8.0).sin().abs().ln(),
    };
    let ln_sinh_q = 2.0 * n * ln_sinh(r / 4.0);
    let second = ln_c + ln_num - ln_sinh_q - kf * ln_cosh(3.0 * r / 8.0);
    let third = ln_c + 2.0 * n * ln_cosh(r / 4.0)
        - (kf - 2.0 * n - 1.0).ln()
        - ln_sinh_q
        - (kf - 2.0 * n - 2.0) * ln_cosh(3.0 * r / 8.0);
    Ok([ln_c, second, third])
}

/// `c + c S^{2n}(5r/8) / (sinh^{2n}(r/4) cosh^K(3r/8))
///  + c cosh^{2n}(r/4) / ((K-2n-1) sinh^{2n}(r/4) cosh^{K-2n-2}(3r/8))`
/// with `S = sinh` or `sin`.
pub fn closed_form_compact_bound(params: &KernelParams, r: f64, variant: TrigVariant) -> Result<f64> {
    Ok(log_sum_exp(&compact_bound_log_terms(params, r, variant)?).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SandwichMode {
    /// A fixed left half-space point with vanishing transverse coordinates.
    Fixed(ModelPoint),
    /// The boundary of the cusp neighborhood: `α = K/4π` for each `k`.
    CuspBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichRow {
    pub k: u32,
    pub alpha: f64,
    /// Natural logs, after dividing by `c`.
    pub log_lower: f64,
    pub log_measured: f64,
    pub log_upper: f64,
    pub measured_over_lower: f64,
    pub upper_over_measured: f64,
    pub in_cusp_region: bool,
    pub terms_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    pub measured_fit: Option<FitResult>,
    pub lower_fit: Option<FitResult>,
}

impl SandwichReport {
    pub fn slope_gap(&self) -> Option<f64> {
        Some(self.measured_fit?.slope - self.lower_fit?.slope)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichOptions {
    pub r_x: f64,
    pub m_terms: usize,
    pub trig: TrigVariant,
    pub cusp: CuspSumOptions,
}

impl Default for SandwichOptions {
    fn default() -> Self {
        Self {
            r_x: 1.0,
            m_terms: 64,
            trig: TrigVariant::Sinh,
            cusp: CuspSumOptions::default(),
        }
    }
}

/// For each parameter set: the Poisson lower bound, the stabilizer cusp sum,
/// and that sum plus the compact-part bound, all divided by `c`. Fails with
/// [`Error::SandwichViolation`] unless `lower ≤ measured ≤ upper`.
pub fn sandwich_experiment(
    params_grid: &[KernelParams],
    field: &QuadraticField,
    mode: &SandwichMode,
    opts: &SandwichOptions,
) -> Result<SandwichReport> {
    if params_grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    let fixed_alpha = match mode {
        SandwichMode::Fixed(p) => {
            if p.model() != Model::LeftHalf {
                return Err(Error::InvalidParameter(
                    "sandwich points live in the left half-space".into(),
                ));
            }
            if p.coords()[1..].iter().any(|z| z.norm() > 1e-12) {
                return Err(Error::InvalidParameter(
                    "sandwich points need vanishing transverse coordinates".into(),
                ));
            }
            let alpha = p.margin();
            let inside = params_grid
                .iter()
                .filter(|q| alpha >= q.big_k() as f64 / (4.0 * PI))
                .count();
            if 2 * inside < params_grid.len() {
                return Err(Error::InvalidParameter(format!(
                    "the point with α = {alpha} lies in the cusp region for only {inside} of {} weights",
                    params_grid.len()
                )));
            }
            Some(alpha)
        }
        SandwichMode::CuspBoundary => None,
    };
    let rows: Vec<SandwichRow> = params_grid
        .par_iter()
        .map(|params| {
            let kf = params.big_k() as f64;
            let alpha = fixed_alpha.unwrap_or(kf / (4.0 * PI));
            let ln_c = params.c.ln();
            let report: SumReport = cusp_lattice_sum(params, field, alpha, &opts.cusp)?;
            let log_measured = report.log_abs_sum - ln_c;
            let log_lower = log_poisson_lower_bound(alpha, params, opts.m_terms)? - ln_c;
            let log_compact = log_sum_exp(&compact_bound_log_terms(params, opts.r_x, opts.trig)?) - ln_c;
            let log_upper = log_add(log_measured, log_compact);
            let row = SandwichRow {
                k: params.k,
                alpha,
                log_lower,
                log_measured,
                log_upper,
                measured_over_lower: (log_measured - log_lower).exp(),
                upper_over_measured: (log_upper - log_measured).exp(),
                in_cusp_region: alpha >= kf / (4.0 * PI) * (1.0 - 1e-12),
                terms_used: report.terms_used,
            };
            if !(log_lower <= log_measured && log_measured <= log_upper) {
                return Err(Error::SandwichViolation {
                    k: params.k,
                    detail: format!(
                        "ln lower = {log_lower:.6}, ln measured = {log_measured:.6}, ln upper = {log_upper:.6}"
                    ),
                });
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let series = |label: &str, pick: fn(&SandwichRow) -> f64| {
        let samples: Vec<GrowthSample> = rows
            .iter()
            .map(|r| GrowthSample {
                k: r.k,
                value: pick(r),
                label: label.to_string(),
            })
            .collect();
        fit_exponent(&samples).ok()
    };
    let measured_fit = series("measured", |r| r.log_measured);
    let lower_fit = series("lower", |r| r.log_lower);
    Ok(SandwichReport {
        rows,
        measured_fit,
        lower_fit,
    })
}

/// `ln` of the cusp lattice sum at `α = K/4π` for each `k`.
pub fn cusp_growth_series(
    ks: &[u32],
    n: usize,
    c: f64,
    field: &QuadraticField,
    opts: &CuspSumOptions,
) -> Result<Vec<(GrowthSample, SumReport)>> {
    ks.par_iter()
        .map(|&k| {
            let params = KernelParams::new(k, n, c)?;
            let alpha = params.big_k() as f64 / (4.0 * PI);
            let report = cusp_lattice_sum(&params, field, alpha, opts)?;
            Ok((
                GrowthSample {
                    k,
                    value: report.log_abs_sum,
                    label: "cusp_lattice_sum".into(),
                },
                report,
            ))
        })
        .collect()
}
