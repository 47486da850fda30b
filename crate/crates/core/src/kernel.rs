//! Poincaré-series Bergman kernels, their cosh bounds and cusp lattice sums.
//!
//! A series term for the element `γ` with lift matrix `M` is
//! `c / (-⟨z̃, M w̃⟩)^K` with `K = k(n+1)`; the sign makes the identity term on
//! the diagonal the positive number `c·(-⟨z̃,z̃⟩)^{-K}`. After the Petersson
//! weight `(-⟨z̃,z̃⟩)^{K/2}(-⟨w̃,w̃⟩)^{K/2}` its magnitude is exactly
//! `c·cosh^{-K}(d(z,γw)/2)`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::arithmetic::{
    enumerate_tau, stieltjes_tail_bound, CountingContext, GroupElement, LatticePoint, LatticeRule, QuadraticField,
    RingCase,
};
use crate::error::{Error, Result};
use crate::geometry::{lift, sinh2_half_dist, HermitianForm, Model, ModelPoint};
use crate::logdomain::{log_sum_exp, log_sum_exp_complex, LogComplex};
use crate::ErratumMode;

/// Terms below `exp(-TRUNCATION_LOG)` relative to the identity term are dropped
/// by the automatic truncation.
pub const TRUNCATION_LOG: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct KernelParams {
    pub k: u32,
    pub n: usize,
    pub c: f64,
    #[serde(rename = "K")]
    big_k: u32,
}

#[derive(Deserialize)]
struct RawParams {
    k: u32,
    n: usize,
    #[serde(default = "default_c")]
    c: f64,
}

fn default_c() -> f64 {
    1.0
}

impl TryFrom<RawParams> for KernelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        KernelParams::new(raw.k, raw.n, raw.c)
    }
}

impl KernelParams {
    pub fn new(k: u32, n: usize, c: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("weight k must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        let big_k = k
            .checked_mul(n as u32 + 1)
            .ok_or_else(|| Error::InvalidParameter("k(n+1) overflows".into()))?;
        Ok(Self { k, n, c, big_k })
    }

    /// The exponent `K = k(n+1)`.
    pub fn big_k(&self) -> u32 {
        self.big_k
    }

    fn kf(&self) -> f64 {
        self.big_k as f64
    }

    fn ln_c(&self) -> f64 {
        self.c.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumReport {
    pub value: LogComplex,
    /// `ln Σ |term|`.
    pub log_abs_sum: f64,
    pub terms_used: usize,
    pub norm_bound: f64,
    pub tail_estimate: f64,
    pub relative_tail: f64,
}

impl SumReport {
    fn new(value: LogComplex, log_abs_sum: f64, terms_used: usize, norm_bound: f64, log_tail: f64) -> Self {
        let tail_estimate = log_tail.exp();
        let relative_tail = if value.is_zero() {
            f64::NAN
        } else {
            (log_tail - value.log_mag).exp()
        };
        Self {
            value,
            log_abs_sum,
            terms_used,
            norm_bound,
            tail_estimate,
            relative_tail,
        }
    }

    /// The value as an ordinary complex number.
    pub fn complex(&self) -> Complex64 {
        self.value.to_complex()
    }
}

/// `(K/2) ln(-⟨z̃, z̃⟩)`: for the ball `(K/2) ln(1 - |z|²)`, for the left
/// half-space `(K/2) ln(-2 Re z_1 - Σ_{j≥2} |z_j|²)`.
pub fn petersson_log_weight(p: &ModelPoint, params: &KernelParams) -> Result<f64> {
    let margin = p.margin();
    if !(margin > 0.0) {
        return Err(Error::OutsideModel {
            model: p.model().name(),
            condition: "Petersson weight needs -<z~,z~> > 0".into(),
        });
    }
    Ok(0.5 * params.kf() * margin.ln())
}

fn check_points(g: &GroupElement, z: &ModelPoint, w: &ModelPoint) -> Result<()> {
    for p in [z, w] {
        if p.model() != g.form().model() {
            return Err(Error::InvalidParameter(format!(
                "element of form {:?} paired with a {} point",
                g.form(),
                p.model().name()
            )));
        }
        if p.n() != g.n() {
            return Err(Error::DimensionMismatch {
                expected: g.n(),
                got: p.n(),
            });
        }
    }
    Ok(())
}

/// One series term `c / (-⟨z̃, M w̃⟩)^K` in the log domain.
pub fn kernel_term(g: &GroupElement, z: &ModelPoint, w: &ModelPoint, params: &KernelParams) -> Result<LogComplex> {
    check_points(g, z, w)?;
    let form = HermitianForm::new(g.form(), g.n())?;
    let mw = g.matrix() * lift(w).0;
    let denom = mw[g.n()];
    if denom.norm() < 1e-300 {
        return Err(Error::Pole("C w + D = 0".into()));
    }
    let inner = form.eval(&lift(z).0, &mw);
    if inner.norm() == 0.0 || !inner.norm().is_finite() {
        return Err(Error::Pole("vanishing kernel denominator".into()));
    }
    Ok(LogComplex::from_complex(-inner)
        .powi(-(params.big_k as i64))
        .scale_log(params.ln_c()))
}

fn ln_cosh_power_half(params: &KernelParams, sinh2: f64) -> f64 {
    // ln(c cosh^{-K}(d/2)) with cosh² = 1 + sinh²
    params.ln_c() - 0.5 * params.kf() * sinh2.ln_1p()
}

fn cosh_tail_weighted(params: &KernelParams, max_dist: f64, ctx: &CountingContext) -> Result<f64> {
    let delta = max_dist.max(ctx.r_x / 2.0 * (1.0 + 1e-9));
    let kf = params.kf();
    let c = params.c;
    stieltjes_tail_bound(
        |rho: f64| c * (-kf * crate::logdomain::ln_cosh(rho / 2.0)).exp(),
        delta,
        ctx,
        8,
    )
}

/// Truncated series `Σ_γ c / (-⟨z̃, γ w̃⟩)^K` over `elements`, in their order.
///
/// With a counting context the tail beyond the largest observed distance is
/// bounded by Stieltjes integration against `c cosh^{-K}(ρ/2)`; otherwise the
/// tail is reported as NaN. `norm_bound` in the report is the largest
/// distance `d(z, γw)` reached.
pub fn kernel_sum(
    z: &ModelPoint,
    w: &ModelPoint,
    params: &KernelParams,
    elements: &[GroupElement],
    ctx: Option<&CountingContext>,
) -> Result<SumReport> {
    let terms: Vec<LogComplex> = elements
        .par_iter()
        .map(|g| kernel_term(g, z, w, params))
        .collect::<Result<_>>()?;
    let value = log_sum_exp_complex(&terms);
    let mags: Vec<f64> = terms.iter().map(|t| t.log_mag).collect();
    let log_abs = log_sum_exp(&mags);
    let weights = petersson_log_weight(z, params)? + petersson_log_weight(w, params)?;
    // distances from the weighted magnitudes: ln c - K ln cosh(d/2)
    let max_dist = mags
        .iter()
        .map(|&m| {
            let ln_cosh_half = (params.ln_c() - m - weights) / params.kf();
            2.0 * ln_cosh_half.max(0.0).exp().acosh()
        })
        .fold(0.0, f64::max);
    let log_tail = match ctx {
        Some(ctx) => cosh_tail_weighted(params, max_dist, ctx)?.ln() - weights,
        None => f64::NAN,
    };
    Ok(SumReport::new(value, log_abs, terms.len(), max_dist, log_tail))
}

/// `Σ_γ c cosh^{-K}(d(z, γw)/2)`, which dominates the Petersson-weighted
/// kernel series term by term.
pub fn kernel_cosh_bound(
    z: &ModelPoint,
    w: &ModelPoint,
    params: &KernelParams,
    elements: &[GroupElement],
    ctx: Option<&CountingContext>,
) -> Result<SumReport> {
    let form = HermitianForm::for_model(z.model(), z.n())?;
    let data: Vec<(f64, f64)> = elements
        .par_iter()
        .map(|g| {
            check_points(g, z, w)?;
            let gw = g.apply(w)?;
            let s2 = sinh2_half_dist(&form, z, &gw)?;
            Ok((ln_cosh_power_half(params, s2), 2.0 * s2.sqrt().asinh()))
        })
        .collect::<Result<_>>()?;
    let logs: Vec<f64> = data.iter().map(|d| d.0).collect();
    let max_dist = data.iter().map(|d| d.1).fold(0.0, f64::max);
    let total = log_sum_exp(&logs);
    let log_tail = match ctx {
        Some(ctx) => cosh_tail_weighted(params, max_dist, ctx)?.ln(),
        None => f64::NAN,
    };
    Ok(SumReport::new(
        LogComplex::from_log_real(total),
        total,
        logs.len(),
        max_dist,
        log_tail,
    ))
}

/// `ln P` for `P(z) = e^{4π x_1} (-2x_1 - Σ|z_j|²)^K` on the line
/// `Re z_1 = x_1` with transverse coordinates `z_2, …, z_n`.
pub fn log_p_function(x1: f64, transverse: &[Complex64], params: &KernelParams) -> Result<f64> {
    let base = -2.0 * x1 - transverse.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if !(base > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "-2x_1 - Σ|z_j|^2 must be positive, got {base}"
        )));
    }
    Ok(4.0 * PI * x1 + params.kf() * base.ln())
}

/// `P(z)` itself; overflows to infinity for large `K`, see [`log_p_function`].
pub fn p_function(x1: f64, transverse: &[Complex64], params: &KernelParams) -> Result<f64> {
    Ok(log_p_function(x1, transverse, params)?.exp())
}

/// Grid maximizer of `P` over `y = 2x_1 ∈ [y_lo, y_hi]` with zero transverse
/// part. Returns the maximizing `y`.
pub fn p_function_scan(params: &KernelParams, y_lo: f64, y_hi: f64, step: f64) -> Result<f64> {
    if !(y_lo < y_hi && y_hi < 0.0 && step > 0.0) {
        return Err(Error::InvalidParameter(
            "scan needs y_lo < y_hi < 0 and step > 0".into(),
        ));
    }
    let steps = ((y_hi - y_lo) / step).floor() as usize;
    let mut best = (f64::NEG_INFINITY, y_lo);
    for i in 0..=steps {
        let y = y_lo + i as f64 * step;
        let v = log_p_function(0.5 * y, &[], params)?;
        if v > best.0 {
            best = (v, y);
        }
    }
    Ok(best.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CuspSumOptions {
    /// Explicit `|τ|² + |t|` bound; chosen automatically when absent.
    pub norm_bound: Option<f64>,
    pub tau_scale: f64,
    pub t_scale: f64,
    pub u_factor: f64,
    pub rule: LatticeRule,
}

impl Default for CuspSumOptions {
    fn default() -> Self {
        Self {
            norm_bound: None,
            tau_scale: 0.5,
            t_scale: 0.5,
            u_factor: 1.0,
            rule: LatticeRule::Separate,
        }
    }
}

impl CuspSumOptions {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_scale", self.tau_scale),
            ("t_scale", self.t_scale),
            ("u_factor", self.u_factor),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(b) = self.norm_bound {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidParameter(format!("norm bound must be positive, got {b}")));
            }
        }
        Ok(())
    }
}

/// Smallest `N` such that every term outside `|τ|² + |t| ≤ N` is below
/// `exp(-TRUNCATION_LOG)` times the identity term.
pub fn auto_norm_bound(params: &KernelParams, alpha: f64, opts: &CuspSumOptions) -> f64 {
    // Terms above the cutoff satisfy (1 + a s/α)² + (b t/α)² < R².
    let r2 = (2.0 * TRUNCATION_LOG / params.kf()).exp();
    let r = r2.sqrt();
    let a = alpha / opts.tau_scale;
    let b = alpha / opts.t_scale;
    // maximize a(u - 1) + b sqrt(R² - u²) over u ∈ [1, R]
    let u_star = r * a / (a * a + b * b).sqrt();
    if u_star <= 1.0 {
        b * (r2 - 1.0).sqrt()
    } else {
        r * (a * a + b * b).sqrt() - a
    }
}

/// `∫_X^∞ (1 + x²)^{-K/2} dx`, bounded above; exact `J` when `X = 0`.
fn tail_integral_bound(x: f64, kf: f64, j_full: f64) -> f64 {
    if x <= 0.0 || kf <= 2.0 {
        return j_full;
    }
    let linear = ((1.0 - 0.5 * kf) * (x * x).ln_1p()).exp() / (x * (kf - 2.0));
    linear.min(j_full)
}

fn t_spacing(field: &QuadraticField) -> f64 {
    match field.ring_case() {
        RingCase::OneOrTwoMod4 => 2.0 * field.sqrt_d(),
        RingCase::ThreeMod4 => field.sqrt_d(),
    }
}

fn cusp_log_term(kf: f64, ln_pref: f64, alpha: f64, s: f64, t: f64, opts: &CuspSumOptions) -> f64 {
    let u = 1.0 + opts.tau_scale * s / alpha;
    let v = opts.t_scale * t / alpha;
    ln_pref - 0.5 * kf * (u * u + v * v).ln()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("α must be positive, got {alpha}")));
    }
    Ok(())
}

/// `u · Σ_{(τ,t)} c α^K / ((α + a|τ|²)² + (b t)²)^{K/2}` over the stabilizer
/// lattice with `|τ|² + |t| ≤ N`, with `a = tau_scale`, `b = t_scale`,
/// `u = u_factor`. With the default scales this is the Petersson-weighted
/// cosh sum over the stabilizer at any point with `-⟨z̃,z̃⟩ = α` and vanishing
/// transverse coordinates.
pub fn cusp_lattice_sum(
    params: &KernelParams,
    field: &QuadraticField,
    alpha: f64,
    opts: &CuspSumOptions,
) -> Result<SumReport> {
    check_alpha(alpha)?;
    opts.validate()?;
    let n = params.n;
    let kf = params.kf();
    let bound = opts.norm_bound.unwrap_or_else(|| auto_norm_bound(params, alpha, opts));
    let ln_pref = params.ln_c() + opts.u_factor.ln();
    let sd = field.sqrt_d();
    let h = t_spacing(field);
    let j_full = gamma_tail_integral(0.5 * kf, ErratumMode::Corrected)?;
    let rule = opts.rule;

    let rows = enumerate_tau(field, n, 2.0 * bound);
    struct Row {
        logs: Vec<f64>,
        log_tail: f64,
    }
    let rows: Vec<Row> = rows
        .par_iter()
        .map(|(_, tau_norm)| {
            let s = *tau_norm as f64;
            let mut logs = Vec::new();
            let room = bound - s;
            let mut t_cut = 0.0;
            if room >= -1e-12 {
                let mmax = ((room + 1e-12) / sd).floor() as i64;
                for m in -mmax..=mmax {
                    let admissible = match (field.ring_case(), rule) {
                        (RingCase::OneOrTwoMod4, _) => m % 2 == 0,
                        (RingCase::ThreeMod4, LatticeRule::Separate) => true,
                        (RingCase::ThreeMod4, LatticeRule::Coupled) => (tau_norm - m).rem_euclid(2) == 0,
                    };
                    if admissible {
                        logs.push(cusp_log_term(kf, ln_pref, alpha, s, m as f64 * sd, opts));
                    }
                }
                t_cut = room.max(0.0);
            }
            // omitted |t| > t_cut in this row: f(t_cut) + (1/h) ∫_{t_cut}^∞ f, both signs
            let big_b = alpha + opts.tau_scale * s;
            let x = opts.t_scale * t_cut / big_b;
            let ln_integral = ln_pref + kf * alpha.ln() + (1.0 - kf) * big_b.ln() - (opts.t_scale * h).ln()
                + tail_integral_bound(x, kf, j_full).ln();
            let ln_edge = cusp_log_term(kf, ln_pref, alpha, s, t_cut, opts);
            let log_tail = LN_2 + crate::logdomain::log_add(ln_edge, ln_integral);
            Row { logs, log_tail }
        })
        .collect();

    let logs: Vec<f64> = rows.iter().flat_map(|r| r.logs.iter().copied()).collect();
    let tails: Vec<f64> = rows.iter().map(|r| r.log_tail).collect();
    let total = log_sum_exp(&logs);
    Ok(SumReport::new(
        LogComplex::from_log_real(total),
        total,
        logs.len(),
        bound,
        log_sum_exp(&tails),
    ))
}

/// The same summand over an explicit list of lattice points, in list order.
/// No tail is estimated.
pub fn cusp_lattice_sum_from_points(
    params: &KernelParams,
    field: &QuadraticField,
    alpha: f64,
    points: &[LatticePoint],
    opts: &CuspSumOptions,
) -> Result<SumReport> {
    check_alpha(alpha)?;
    opts.validate()?;
    let kf = params.kf();
    let ln_pref = params.ln_c() + opts.u_factor.ln();
    let logs: Vec<f64> = points
        .par_iter()
        .map(|p| cusp_log_term(kf, ln_pref, alpha, p.tau_norm as f64, p.t(field), opts))
        .collect();
    let bound = points.iter().map(|p| p.size(field)).fold(0.0, f64::max);
    let total = log_sum_exp(&logs);
    Ok(SumReport::new(
        LogComplex::from_log_real(total),
        total,
        logs.len(),
        bound,
        f64::NAN,
    ))
}

/// `∫_0^∞ dx / (1 + x²)^a = (√π/2) Γ(a - 1/2) / Γ(a)`; the literal mode
/// returns twice that.
pub fn gamma_tail_integral(a: f64, mode: ErratumMode) -> Result<f64> {
    if !(a > 0.5) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("the integral needs a > 1/2, got {a}")));
    }
    let corrected = (0.5 * PI.ln() - LN_2 + ln_gamma(a - 0.5) - ln_gamma(a)).exp();
    Ok(match mode {
        ErratumMode::Corrected => corrected,
        ErratumMode::PaperLiteral => 2.0 * corrected,
    })
}

/// `ln` of `c Σ_{m=1}^{M} (8m)^{-(n-1)} · 2π (2πmα)^K e^{-2πmα} / (K-1)!`.
pub fn log_poisson_lower_bound(alpha: f64, params: &KernelParams, m_terms: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if m_terms == 0 {
        return Err(Error::InvalidParameter("m_terms must be at least 1".into()));
    }
    let kf = params.kf();
    let ln_fact = ln_gamma(kf);
    let nm1 = (params.n - 1) as f64;
    let logs: Vec<f64> = (1..=m_terms)
        .map(|m| {
            let mf = m as f64;
            let x = 2.0 * PI * mf * alpha;
            -nm1 * (8.0 * mf).ln() + (2.0 * PI).ln() + kf * x.ln() - x - ln_fact
        })
        .collect();
    Ok(params.ln_c() + log_sum_exp(&logs))
}

pub fn poisson_lower_bound(alpha: f64, params: &KernelParams, m_terms: usize) -> Result<f64> {
    Ok(log_poisson_lower_bound(alpha, params, m_terms)?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonPair {
    /// `Σ_{|t| ≤ T} Re (β + it)^{-K}`.
    pub left_truncated: f64,
    /// Euler-Maclaurin estimate of `Σ_{|t| > T} Re (β + it)^{-K}`.
    pub left_tail: f64,
    /// `left_truncated + left_tail`.
    pub left: f64,
    /// `(2π)^K / Γ(K) Σ_{m=1}^{M} m^{K-1} e^{-2πmβ}`.
    pub right: f64,
}

/// Both sides of `Σ_{t∈Z} (β + it)^{-K} = (2π)^K/Γ(K) Σ_{m≥1} m^{K-1} e^{-2πmβ}`.
pub fn poisson_identity_check(beta: f64, big_k: u32, t_range: u64, m_terms: usize) -> Result<PoissonPair> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("β must be positive, got {beta}")));
    }
    if big_k < 2 {
        return Err(Error::InvalidParameter("K must be at least 2".into()));
    }
    if m_terms == 0 {
        return Err(Error::InvalidParameter("m_terms must be at least 1".into()));
    }
    let kk = big_k as i32;
    let g = |t: f64| Complex64::new(beta, t).powi(-kk);
    let mut terms: Vec<f64> = Vec::with_capacity(t_range as usize + 1);
    terms.push(g(0.0).re);
    for t in 1..=t_range {
        terms.push(2.0 * g(t as f64).re);
    }
    let left_truncated = crate::logdomain::pairwise_sum(&terms);

    // Σ_{t > T} g(t) = ∫_T^∞ g - g(T)/2 - Σ_j B_{2j}/(2j)! g^{(2j-1)}(T) + …
    let tt = t_range as f64;
    let z = Complex64::new(beta, tt);
    let i = Complex64::new(0.0, 1.0);
    let integral = z.powi(1 - kk) / (i * (big_k as f64 - 1.0));
    let derivative = |p: i32| {
        // d^p/dt^p (β + it)^{-K} = (-K)(-K-1)…(-K-p+1) i^p (β+it)^{-K-p}
        let mut coeff = 1.0;
        for q in 0..p {
            coeff *= -(big_k as f64) - q as f64;
        }
        i.powi(p) * coeff * z.powi(-kk - p)
    };
    let bernoulli = [(2, 1.0 / 6.0), (4, -1.0 / 30.0), (6, 1.0 / 42.0), (8, -1.0 / 30.0)];
    let mut tail = integral - 0.5 * g(tt);
    let mut fact = 1.0;
    let mut last = 0;
    for (p, b) in bernoulli {
        while last < p {
            last += 1;
            fact *= last as f64;
        }
        tail -= derivative(p - 1) * (b / fact);
    }
    let left_tail = 2.0 * tail.re;

    let kf = big_k as f64;
    let logs: Vec<f64> = (1..=m_terms)
        .map(|m| {
            let mf = m as f64;
            (kf - 1.0) * mf.ln() - 2.0 * PI * mf * beta
        })
        .collect();
    let right = (kf * (2.0 * PI).ln() - ln_gamma(kf) + log_sum_exp(&logs)).exp();
    Ok(PoissonPair {
        left_truncated,
        left_tail,
        left: left_truncated + left_tail,
        right,
    })
}

/// `h(z) = Σ_j |g_j(z)|²` with `g_j(z) = Σ_{m=0}^{M} (a_{jm} + Σ_l b_{jml} z_l) e^{2π m z_1}`,
/// a finite Fourier-Jacobi type sum with linear coefficients in the
/// transverse variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumFunction {
    n: usize,
    /// `coeffs[j][m] = (a_{jm}, [b_{jm2}, …, b_{jmn}])`.
    coeffs: Vec<Vec<(Complex64, Vec<Complex64>)>>,
}

impl ExpSumFunction {
    pub fn new(n: usize, coeffs: Vec<Vec<(Complex64, Vec<Complex64>)>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
        }
        for comp in &coeffs {
            for (_, b) in comp {
                if b.len() != n - 1 {
                    return Err(Error::DimensionMismatch {
                        expected: n - 1,
                        got: b.len(),
                    });
                }
            }
        }
        Ok(Self { n, coeffs })
    }

    fn check(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        Ok(())
    }

    /// `F_{jm}(z) = (a_{jm} + Σ b z') e^{2π m z_1}` for one component.
    fn modes(&self, j: usize, z: &[Complex64]) -> Vec<Complex64> {
        self.coeffs[j]
            .iter()
            .enumerate()
            .map(|(m, (a, b))| {
                let lin: Complex64 = *a + b.iter().zip(&z[1..]).map(|(bl, zl)| bl * zl).sum::<Complex64>();
                lin * (z[0] * (2.0 * PI * m as f64)).exp()
            })
            .collect()
    }

    pub fn value(&self, z: &[Complex64]) -> Result<f64> {
        self.check(z)?;
        Ok((0..self.coeffs.len())
            .map(|j| self.modes(j, z).iter().sum::<Complex64>().norm_sqr())
            .sum())
    }

    /// The 4-point stencil `[Σ_k h(z + δ ω_k e_l) - 4h(z)] / δ²` with
    /// `ω_k ∈ {1, i, -1, -i}`, in coordinate `l`.
    ///
    /// Evaluated as `Σ_k |Δ_k|² + 2 Re(ḡ Σ_k Δ_k)` per component, with the
    /// increments `Δ_k = g(z + δω_k e_l) - g(z)` formed analytically so that
    /// no large cancelling differences appear.
    pub fn discrete_laplacian(&self, z: &[Complex64], coord: usize, delta: f64) -> Result<f64> {
        self.check(z)?;
        if coord >= self.n {
            return Err(Error::InvalidParameter(format!("coordinate {coord} out of range")));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter("step must be positive".into()));
        }
        let omegas = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        let mut total = 0.0;
        for j in 0..self.coeffs.len() {
            let modes = self.modes(j, z);
            let g: Complex64 = modes.iter().sum();
            let mut sq = 0.0;
            let mut sum_inc = Complex64::new(0.0, 0.0);
            if coord == 0 {
                for w in omegas {
                    let inc: Complex64 = modes
                        .iter()
                        .enumerate()
                        .map(|(m, f)| f * expm1_complex(w * (2.0 * PI * m as f64 * delta)))
                        .sum();
                    sq += inc.norm_sqr();
                }
                // Σ_k (e^{c δ ω_k} - 1) = 4 Σ_{j≥1} (cδ)^{4j}/(4j)!
                for (m, f) in modes.iter().enumerate() {
                    sum_inc += f * quartic_series(2.0 * PI * m as f64 * delta);
                }
            } else {
                let slope: Complex64 = self.coeffs[j]
                    .iter()
                    .enumerate()
                    .map(|(m, (_, b))| b[coord - 1] * (z[0] * (2.0 * PI * m as f64)).exp())
                    .sum();
                for w in omegas {
                    sq += (slope * w * delta).norm_sqr();
                }
            }
            total += sq + 2.0 * (g.conj() * sum_inc).re;
        }
        Ok(total / (delta * delta))
    }
}

fn expm1_complex(w: Complex64) -> Complex64 {
    // e^{x+iy} - 1 = (e^x - 1) cos y + (cos y - 1) + i e^x sin y
    let em1 = w.re.exp_m1();
    let cos_m1 = -2.0 * (0.5 * w.im).sin().powi(2);
    Complex64::new(em1 * w.im.cos() + cos_m1, w.re.exp() * w.im.sin())
}

fn quartic_series(x: f64) -> f64 {
    // 4 Σ_{j≥1} x^{4j}/(4j)!, which equals 2(cosh x + cos x) - 4
    if x > 1.0 {
        return 2.0 * (x.cosh() + x.cos()) - 4.0;
    }
    let x4 = x.powi(4);
    let mut term = x4 / 24.0;
    let mut sum = 0.0;
    let mut j = 1.0f64;
    while term > 1e-300 && term > sum * 1e-18 {
        sum += term;
        let q = 4.0 * j;
        term *= x4 / ((q + 1.0) * (q + 2.0) * (q + 3.0) * (q + 4.0));
        j += 1.0;
    }
    4.0 * sum
}

/// The left half-space point `(-α/2, 0, …, 0)` where `-⟨z̃,z̃⟩ = α`.
pub fn cusp_point(alpha: f64, n: usize) -> Result<ModelPoint> {
    check_alpha(alpha)?;
    let mut coords = vec![Complex64::new(0.0, 0.0); n];
    coords[0] = Complex64::new(-0.5 * alpha, 0.0);
    ModelPoint::new(Model::LeftHalf, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{enumerate_lattice, heisenberg_matrix};
    use crate::geometry::FormTag;

    fn params(k: u32, n: usize) -> KernelParams {
        KernelParams::new(k, n, 1.0).unwrap()
    }

    #[test]
    fn params_validate() {
        assert_eq!(params(2, 2).big_k(), 6);
        assert!(KernelParams::new(0, 2, 1.0).is_err());
        assert!(KernelParams::new(1, 2, 0.0).is_err());
    }

    #[test]
    fn petersson_examples() {
        let p = params(1, 3);
        assert_eq!(petersson_log_weight(&ModelPoint::origin(3), &p).unwrap(), 0.0);
        let h = 0.5f64.sqrt();
        let z = ModelPoint::from_reals(Model::Ball, &[h, 0.0, 0.0]).unwrap();
        assert!((petersson_log_weight(&z, &p).unwrap() - 2.0 * 0.5f64.ln()).abs() < 1e-14);
        let e = ModelPoint::from_reals(Model::LeftHalf, &[-1.0]).unwrap();
        assert!((petersson_log_weight(&e, &params(1, 1)).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn identity_term_examples() {
        let p = params(2, 2);
        let id = GroupElement::identity(2, FormTag::H1);
        let o = ModelPoint::origin(2);
        let t = kernel_term(&id, &o, &o, &p).unwrap();
        assert_eq!(t.log_mag, 0.0);
        let h = 0.5f64.sqrt();
        let z = ModelPoint::from_reals(Model::Ball, &[h, 0.0]).unwrap();
        let t = kernel_term(&id, &z, &z, &p).unwrap();
        assert!((t.log_mag - 6.0 * 2f64.ln()).abs() < 1e-13);
        assert!(t.phase.abs() < 1e-15);
        let weighted = 2.0 * petersson_log_weight(&z, &p).unwrap() + t.log_mag;
        assert!(weighted.abs() < 1e-13);
    }

    #[test]
    fn single_identity_sum_is_c() {
        let p = KernelParams::new(3, 2, 2.5).unwrap();
        let id = GroupElement::identity(2, FormTag::H1);
        let o = ModelPoint::origin(2);
        let r = kernel_sum(&o, &o, &p, std::slice::from_ref(&id), None).unwrap();
        assert!((r.complex() - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        let b = kernel_cosh_bound(&o, &o, &p, &[id], None).unwrap();
        assert!((b.complex().re - 2.5).abs() < 1e-14);
    }

    #[test]
    fn p_function_maximizer() {
        for k in [8u32, 40] {
            let p = params(k, 2);
            let kf = p.big_k() as f64;
            // d/dx_1 [4πx_1 + K ln(-2x_1)] = 4π + K/x_1 vanishes at 2x_1 = -K/2π
            let y_star = -kf / (2.0 * PI);
            let best = p_function_scan(&p, -kf / PI, -kf / (16.0 * PI), 1e-3).unwrap();
            assert!((best - y_star).abs() < 2e-3, "{best} vs {y_star}");
            let h = 1e-5;
            let x = 0.5 * y_star;
            let fd = (log_p_function(x + h, &[], &p).unwrap() - log_p_function(x - h, &[], &p).unwrap()) / (2.0 * h);
            assert!(fd.abs() < 1e-6 * kf);
        }
        let p = params(8, 2);
        assert!(p_function(-1e4, &[], &p).unwrap() < 1e-300);
        assert!(log_p_function(0.1, &[], &p).is_err());
    }

    #[test]
    fn gamma_integral_values() {
        assert!((gamma_tail_integral(1.0, ErratumMode::Corrected).unwrap() - PI / 2.0).abs() < 1e-13);
        assert!((gamma_tail_integral(2.0, ErratumMode::Corrected).unwrap() - PI / 4.0).abs() < 1e-13);
        assert!((gamma_tail_integral(1.0, ErratumMode::PaperLiteral).unwrap() - PI).abs() < 1e-13);
        let a: f64 = 1e3;
        let approx = 0.5 * PI.sqrt() / a.sqrt();
        assert!((gamma_tail_integral(a, ErratumMode::Corrected).unwrap() / approx - 1.0).abs() < 0.01);
        assert!(gamma_tail_integral(0.5, ErratumMode::Corrected).is_err());
    }

    #[test]
    fn poisson_single_term() {
        let p = params(1, 1);
        let alpha = 0.3;
        let x = 2.0 * PI * alpha;
        let expected = 2.0 * PI * x * x * (-x).exp() / 1.0;
        assert!((poisson_lower_bound(alpha, &p, 1).unwrap() - expected).abs() < 1e-14);
        let q = params(1, 2);
        let x3 = x.powi(3);
        let expected = 2.0 * PI * x3 * (-x).exp() / 2.0 / 8.0;
        assert!((poisson_lower_bound(alpha, &q, 1).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn poisson_pair_agrees() {
        for (k, beta) in [(2u32, 1.0), (4, 2.0), (8, 0.5)] {
            let pair = poisson_identity_check(beta, k, 2000, 200).unwrap();
            assert!(
                (pair.left - pair.right).abs() < 1e-8 * pair.right.abs().max(1.0),
                "{k} {beta} {pair:?}"
            );
        }
        // the t = 0 term is β^{-K}, but the full sum is exponentially small in β
        let beta: f64 = 6.0;
        let big = poisson_identity_check(beta, 4, 4000, 50).unwrap();
        assert!(big.right < 1e-8 * beta.powi(-4));
        assert!((big.left - big.right).abs() < 1e-12 * beta.powi(-4));
    }

    #[test]
    fn truncated_cusp_sum_is_c() {
        let p = KernelParams::new(4, 2, 3.0).unwrap();
        let f = QuadraticField::new(3).unwrap();
        let opts = CuspSumOptions {
            norm_bound: Some(0.5),
            ..CuspSumOptions::default()
        };
        let r = cusp_lattice_sum(&p, &f, 2.0, &opts).unwrap();
        assert_eq!(r.terms_used, 1);
        assert!((r.complex().re - 3.0).abs() < 1e-14);
    }

    #[test]
    fn cusp_sum_matches_stabilizer_cosh_sum() {
        let p = params(4, 2);
        let f = QuadraticField::new(3).unwrap();
        let alpha = p.big_k() as f64 / (4.0 * PI);
        let opts = CuspSumOptions {
            norm_bound: Some(8.0),
            ..CuspSumOptions::default()
        };
        let lattice = cusp_lattice_sum(&p, &f, alpha, &opts).unwrap();
        let elems: Vec<GroupElement> = enumerate_lattice(&f, 2, 8.0)
            .unwrap()
            .iter()
            .map(|lp| heisenberg_matrix(&lp.to_heisenberg(&f)).unwrap())
            .collect();
        let z = cusp_point(alpha, 2).unwrap();
        let direct = kernel_cosh_bound(&z, &z, &p, &elems, None).unwrap();
        assert_eq!(direct.terms_used, lattice.terms_used);
        assert!((direct.log_abs_sum - lattice.log_abs_sum).abs() < 1e-10);
        let series = kernel_sum(&z, &z, &p, &elems, None).unwrap();
        let weights = 2.0 * petersson_log_weight(&z, &p).unwrap();
        assert!((series.log_abs_sum + weights - lattice.log_abs_sum).abs() < 1e-10);
    }

    #[test]
    fn cusp_tail_covers_doubling() {
        let p = params(8, 2);
        let f = QuadraticField::new(1).unwrap();
        let alpha = p.big_k() as f64 / (4.0 * PI);
        for nb in [4.0, 10.0] {
            let a = cusp_lattice_sum(
                &p,
                &f,
                alpha,
                &CuspSumOptions {
                    norm_bound: Some(nb),
                    ..Default::default()
                },
            )
            .unwrap();
            let b = cusp_lattice_sum(
                &p,
                &f,
                alpha,
                &CuspSumOptions {
                    norm_bound: Some(2.0 * nb),
                    ..Default::default()
                },
            )
            .unwrap();
            let change = (b.complex().re - a.complex().re) / a.complex().re;
            assert!(
                change >= 0.0 && change <= a.relative_tail,
                "{change} vs {}",
                a.relative_tail
            );
        }
    }

    #[test]
    fn auto_bound_reaches_target_accuracy() {
        let p = params(16, 2);
        let f = QuadraticField::new(3).unwrap();
        let alpha = p.big_k() as f64 / (4.0 * PI);
        let r = cusp_lattice_sum(&p, &f, alpha, &CuspSumOptions::default()).unwrap();
        assert!(r.relative_tail < 1e-12, "{r:?}");
    }

    #[test]
    fn subharmonic_stencil_of_single_exponential() {
        // h = |e^{2πz}|² = e^{4πx}; the exact Laplacian is 16π² e^{4πx}
        let f = ExpSumFunction::new(
            1,
            vec![vec![
                (Complex64::new(0.0, 0.0), vec![]),
                (Complex64::new(1.0, 0.0), vec![]),
            ]],
        )
        .unwrap();
        let z = [Complex64::new(-0.3, 0.1)];
        let lap = f.discrete_laplacian(&z, 0, 1e-4).unwrap();
        let exact = 16.0 * PI * PI * (4.0 * PI * -0.3f64).exp();
        assert!((lap / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn expm1_complex_matches_direct() {
        for w in [
            Complex64::new(0.3, -0.2),
            Complex64::new(-1e-5, 2e-5),
            Complex64::new(2.0, 3.0),
        ] {
            let direct = w.exp() - 1.0;
            assert!((expm1_complex(w) - direct).norm() < 1e-15 * direct.norm().max(1.0) * 10.0);
        }
        for x in [0.01, 0.5, 1.5] {
            assert!((quartic_series(x) - (2.0 * (x.cosh() + x.cos()) - 4.0)).abs() < 1e-12);
        }
    }
}
