//! Derivatives of the diagonal kernel series and the Bergman metric matrix.
//!
//! On the diagonal a series term is `c Q^{-K}` with `Q(z) = -z̃* G z̃` and
//! `G = M* H1`. Writing `Q_i = ∂Q/∂z_i = -(z̃* G)_i`, `Q_j̄ = -(G z̃)_j` and
//! `Q_ij̄ = -G_ji`,
//!
//! ```text
//! ∂_i T      = -K c Q^{-K-1} Q_i
//! ∂_i ∂̄_j T  = K(K+1) c Q^{-K-2} Q_i Q_j̄ - K c Q^{-K-1} Q_ij̄
//! ```
//!
//! Every term is produced in the log domain and reduced per component.
//!
//! The metric matrix uses the Petersson-weighted diagonal
//! `W = (1-|z|²)^K B` inside its logarithmic derivative:
//! `M = H + ∂∂̄ log W = 2H + ∂∂̄ log B`, where
//! `H_ij = -K (δ_ij (1-|z|²) + z̄_i z_j) / (1-|z|²)²` is the hyperbolic part.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithmetic::GroupElement;
use crate::error::{Error, Result};
use crate::geometry::{lift, FormTag, HermitianForm, Model, ModelPoint};
use crate::kernel::KernelParams;
use crate::logdomain::{log_sum_exp, log_sum_exp_complex, LogComplex};

/// A sum is treated as vanishing when it is this many orders of magnitude
/// (natural log) below the sum of the absolute values of its terms.
const CANCELLATION_LOG: f64 = 32.0;

/// `B`, `∂_i B`, `∂̄_j B` and `∂_i ∂̄_j B` at a diagonal point.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBundle {
    pub b: LogComplex,
    pub d: Vec<LogComplex>,
    pub dbar: Vec<LogComplex>,
    /// `d2[i][j] = ∂_i ∂̄_j B`.
    pub d2: Vec<Vec<LogComplex>>,
    /// `ln Σ |term|` of the undifferentiated series.
    pub log_abs_b: f64,
}

impl DerivativeBundle {
    pub fn n(&self) -> usize {
        self.d.len()
    }
}

fn check_ball(z: &ModelPoint, g: &GroupElement) -> Result<()> {
    if z.model() != Model::Ball || g.form() != FormTag::H1 {
        return Err(Error::InvalidParameter("metric computations use the ball model".into()));
    }
    if z.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: z.n(),
        });
    }
    Ok(())
}

/// Contribution of one element to the derivative bundle.
pub fn kernel_term_derivatives(g: &GroupElement, z: &ModelPoint, params: &KernelParams) -> Result<DerivativeBundle> {
    check_ball(z, g)?;
    let n = z.n();
    let h1 = HermitianForm::new(FormTag::H1, n)?;
    let gm = g.matrix().adjoint() * h1.matrix();
    let zt = lift(z).0;
    let row = zt.adjoint() * &gm; // (z̃* G), 1 × (n+1)
    let col = &gm * &zt; // (G z̃), (n+1) × 1
    let q = -(row.clone() * &zt)[(0, 0)];
    if q.norm() < 1e-300 || !q.norm().is_finite() {
        return Err(Error::Pole("vanishing kernel denominator".into()));
    }
    let kf = params.big_k() as f64;
    let ln_c = params.c.ln();
    let lq = LogComplex::from_complex(q);
    let big_k = params.big_k() as i64;
    let q_k = lq.powi(-big_k).scale_log(ln_c);
    let q_k1 = lq.powi(-big_k - 1).scale_log(ln_c + kf.ln());
    let q_k2 = lq.powi(-big_k - 2).scale_log(ln_c + kf.ln() + (kf + 1.0).ln());
    let qi: Vec<Complex64> = (0..n).map(|i| -row[(0, i)]).collect();
    let qj: Vec<Complex64> = (0..n).map(|j| -col[j]).collect();
    let d = qi.iter().map(|&x| q_k1.mul(LogComplex::from_complex(-x))).collect();
    let dbar = qj.iter().map(|&x| q_k1.mul(LogComplex::from_complex(-x))).collect();
    let d2 = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // K(K+1) c Q^{-K-2} Q_i Q_j̄ - K c Q^{-K-1} Q_ij̄, with Q_ij̄ = -G_ji
                    let a = q_k2.mul(LogComplex::from_complex(qi[i] * qj[j]));
                    let b = q_k1.mul(LogComplex::from_complex(gm[(j, i)]));
                    log_sum_exp_complex(&[a, b])
                })
                .collect()
        })
        .collect();
    Ok(DerivativeBundle {
        b: q_k,
        d,
        dbar,
        d2,
        log_abs_b: q_k.log_mag,
    })
}

/// Derivatives of the truncated diagonal series over `elements`.
pub fn diagonal_derivatives(
    z: &ModelPoint,
    params: &KernelParams,
    elements: &[GroupElement],
) -> Result<DerivativeBundle> {
    if elements.is_empty() {
        return Err(Error::InvalidParameter("empty element set".into()));
    }
    let parts: Vec<DerivativeBundle> = elements
        .par_iter()
        .map(|g| kernel_term_derivatives(g, z, params))
        .collect::<Result<_>>()?;
    let n = z.n();
    let reduce = |pick: &dyn Fn(&DerivativeBundle) -> LogComplex| {
        let v: Vec<LogComplex> = parts.iter().map(pick).collect();
        log_sum_exp_complex(&v)
    };
    let b = reduce(&|p| p.b);
    let log_abs_b = log_sum_exp(&parts.iter().map(|p| p.b.log_mag).collect::<Vec<_>>());
    let d = (0..n).map(|i| reduce(&|p| p.d[i])).collect();
    let dbar = (0..n).map(|j| reduce(&|p| p.dbar[j])).collect();
    let d2 = (0..n)
        .map(|i| (0..n).map(|j| reduce(&|p| p.d2[i][j])).collect())
        .collect();
    Ok(DerivativeBundle {
        b,
        d,
        dbar,
        d2,
        log_abs_b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricSign {
    /// Entries as printed, with the negative hyperbolic part.
    #[default]
    AsStated,
    /// The globally negated matrix.
    Flipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BergmanMatrix {
    pub entries: DMatrix<Complex64>,
    pub base_point: ModelPoint,
    pub params: KernelParams,
    pub sign: MetricSign,
    /// The diagonal series value `B(z, z)`.
    pub b: LogComplex,
}

impl BergmanMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |m_ij - conj(m_ji)|` relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.entries.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        self.entries.clone().lu().determinant()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_positive_definite(&self) -> bool {
        self.hermitian_eigenvalues().iter().all(|&x| x > 0.0)
    }

    pub fn is_negative_definite(&self) -> bool {
        self.hermitian_eigenvalues().iter().all(|&x| x < 0.0)
    }
}

/// `H_ij = -K (δ_ij (1-|z|²) + z̄_i z_j) / (1-|z|²)²`.
pub fn hyperbolic_part(z: &ModelPoint, params: &KernelParams) -> Result<DMatrix<Complex64>> {
    if z.model() != Model::Ball {
        return Err(Error::InvalidParameter("metric computations use the ball model".into()));
    }
    let n = z.n();
    let s = z.margin();
    let kf = params.big_k() as f64;
    let zc = z.coords();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { s } else { 0.0 };
        -(zc[i].conj() * zc[j] + delta) * (kf / (s * s))
    }))
}

/// `∂∂̄ log B = B_ij̄/B - B_i B_j̄ / B²` from a derivative bundle.
pub fn log_hessian(bundle: &DerivativeBundle) -> Result<DMatrix<Complex64>> {
    if bundle.b.is_zero() || bundle.b.log_mag < bundle.log_abs_b - CANCELLATION_LOG {
        return Err(Error::VanishingKernel);
    }
    let n = bundle.n();
    let b = bundle.b;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let second = bundle.d2[i][j].div(b).to_complex();
        let cross = bundle.d[i].mul(bundle.dbar[j]).div(b).div(b).to_complex();
        second - cross
    }))
}

pub fn bergman_matrix(
    z: &ModelPoint,
    params: &KernelParams,
    elements: &[GroupElement],
    sign: MetricSign,
) -> Result<BergmanMatrix> {
    let bundle = diagonal_derivatives(z, params, elements)?;
    let hyp = hyperbolic_part(z, params)?;
    let lh = log_hessian(&bundle)?;
    let mut m = hyp * Complex64::new(2.0, 0.0) + lh;
    if sign == MetricSign::Flipped {
        m = -m;
    }
    Ok(BergmanMatrix {
        entries: m,
        base_point: z.clone(),
        params: *params,
        sign,
        b: bundle.b,
    })
}

/// `(1 - |z|²)^{n+1} |det M(z)|`.
pub fn bergman_volume_ratio(z: &ModelPoint, params: &KernelParams, elements: &[GroupElement]) -> Result<f64> {
    let m = bergman_matrix(z, params, elements, MetricSign::AsStated)?;
    let n = z.n() as i32;
    Ok(z.margin().powi(n + 1) * m.determinant().norm())
}

/// `max_z max_ij (1-|z|²)^{K-a} |∂_i ∂̄_j B(z)|` over the grid.
pub fn derivative_sup_scan(
    params: &KernelParams,
    a: f64,
    grid: &[ModelPoint],
    elements: &[GroupElement],
) -> Result<f64> {
    let n = params.n as f64;
    if !(a >= -2.0 * n && a <= 2.0 * n) {
        return Err(Error::InvalidParameter(format!(
            "shift a must lie in [-2n, 2n], got {a}"
        )));
    }
    let kf = params.big_k() as f64;
    let mut best = f64::NEG_INFINITY;
    for z in grid {
        let bundle = diagonal_derivatives(z, params, elements)?;
        let weight = (kf - a) * z.margin().ln();
        for row in &bundle.d2 {
            for entry in row {
                best = best.max(weight + entry.log_mag);
            }
        }
    }
    Ok(best.exp())
}
