//! Imaginary quadratic lattices, cusp stabilizer elements and counting bounds.
//!
//! The stabilizer of the cusp at infinity in the left half-space model
//! consists of Heisenberg matrices
//!
//! ```text
//! ( 1   -τ*U   (-|τ|² + it)/2 )
//! ( 0    U          τ         )
//! ( 0    0          1         )
//! ```
//!
//! with `τ` in `O_K^{n-1}` for `K = Q(√-d)`. Lattice points are stored by their
//! integer coordinates in the basis `{1, θ}` of `O_K`, where `θ = √-d` when
//! `d ≡ 1, 2 (mod 4)` and `θ = (1 + √-d)/2` when `d ≡ 3 (mod 4)`, so every
//! congruence is decided in exact integer arithmetic.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cayley_matrix, lift, project, CayleyMap, FormTag, HermitianForm, Model, ModelPoint};
use crate::logdomain::{ln_cosh, ln_sinh};
use crate::quadrature::{integrate_to_infinity, QuadOptions};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Slack used when comparing a lattice norm against a real bound.
const NORM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingCase {
    /// `d ≡ 1, 2 (mod 4)`: `O_K = Z[√-d]`.
    OneOrTwoMod4,
    /// `d ≡ 3 (mod 4)`: `O_K = Z[(1+√-d)/2]`.
    ThreeMod4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticField {
    d: u32,
    ring_case: RingCase,
}

fn is_square_free(d: u32) -> bool {
    let mut p = 2u32;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl QuadraticField {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 || !is_square_free(d) {
            return Err(Error::InvalidParameter(format!(
                "d must be a positive square-free integer, got {d}"
            )));
        }
        let ring_case = if d % 4 == 3 {
            RingCase::ThreeMod4
        } else {
            RingCase::OneOrTwoMod4
        };
        Ok(Self { d, ring_case })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn ring_case(&self) -> RingCase {
        self.ring_case
    }

    pub fn sqrt_d(&self) -> f64 {
        (self.d as f64).sqrt()
    }

    /// The generator `θ` of `O_K` over `Z`.
    pub fn theta(&self) -> Complex64 {
        match self.ring_case {
            RingCase::OneOrTwoMod4 => Complex64::new(0.0, self.sqrt_d()),
            RingCase::ThreeMod4 => Complex64::new(0.5, 0.5 * self.sqrt_d()),
        }
    }
}

/// The element `a + bθ` of `O_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OkInt {
    pub a: i64,
    pub b: i64,
}

impl OkInt {
    pub const ZERO: OkInt = OkInt { a: 0, b: 0 };

    pub fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    pub fn value(&self, field: &QuadraticField) -> Complex64 {
        Complex64::new(self.a as f64, 0.0) + field.theta() * self.b as f64
    }

    /// `|a + bθ|²`, an exact integer.
    pub fn norm(&self, field: &QuadraticField) -> i64 {
        let (a, b, d) = (self.a, self.b, field.d as i64);
        match field.ring_case {
            RingCase::OneOrTwoMod4 => a * a + d * b * b,
            RingCase::ThreeMod4 => a * a + a * b + b * b * ((1 + d) / 4),
        }
    }

    pub fn neg(&self) -> Self {
        Self { a: -self.a, b: -self.b }
    }
}

/// Which pairs `(τ, t)` are admitted as stabilizer translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeRule {
    /// τ and t constrained separately: for `d ≡ 3` all of `O_K^{n-1} × Z√d`;
    /// otherwise `|τ|²` even and `t ∈ 2Z√d`.
    #[default]
    Separate,
    /// Exact integrality of the corner entry `(-|τ|² + it)/2`. Differs from
    /// `Separate` only for `d ≡ 3`, where it also forces `|τ|² ≡ t/√d (mod 2)`.
    Coupled,
}

/// An enumerated translation: `τ` by integer coordinates and `t = m√d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub tau: Vec<OkInt>,
    pub m: i64,
    pub tau_norm: i64,
}

impl LatticePoint {
    pub fn t(&self, field: &QuadraticField) -> f64 {
        self.m as f64 * field.sqrt_d()
    }

    pub fn tau_values(&self, field: &QuadraticField) -> Vec<Complex64> {
        self.tau.iter().map(|x| x.value(field)).collect()
    }

    /// `|τ|² + |t|`.
    pub fn size(&self, field: &QuadraticField) -> f64 {
        self.tau_norm as f64 + self.t(field).abs()
    }

    pub fn is_identity(&self) -> bool {
        self.m == 0 && self.tau.iter().all(|x| *x == OkInt::ZERO)
    }

    pub fn to_heisenberg(&self, field: &QuadraticField) -> HeisenbergElement {
        HeisenbergElement::translation(self.tau_values(field), self.t(field))
    }

    pub fn admissible(&self, field: &QuadraticField, rule: LatticeRule) -> bool {
        t_admissible(field, rule, self.tau_norm, self.m) && tau_admissible(field, self.tau_norm)
    }
}

fn tau_admissible(field: &QuadraticField, norm: i64) -> bool {
    match field.ring_case {
        RingCase::OneOrTwoMod4 => norm % 2 == 0,
        RingCase::ThreeMod4 => true,
    }
}

fn t_admissible(field: &QuadraticField, rule: LatticeRule, tau_norm: i64, m: i64) -> bool {
    match (field.ring_case, rule) {
        (RingCase::OneOrTwoMod4, _) => m % 2 == 0,
        (RingCase::ThreeMod4, LatticeRule::Separate) => true,
        (RingCase::ThreeMod4, LatticeRule::Coupled) => (tau_norm - m).rem_euclid(2) == 0,
    }
}

/// All `x ∈ O_K` with `|x|² ≤ bound`, in lexicographic order of `(a, b)`.
fn ok_points(field: &QuadraticField, bound: i64) -> Vec<(OkInt, i64)> {
    let mut out = Vec::new();
    if bound < 0 {
        return out;
    }
    let d = field.d as f64;
    let bf = bound as f64;
    // Generous integer boxes; the exact norm test below decides membership.
    let (amax, bmax) = match field.ring_case {
        RingCase::OneOrTwoMod4 => (bf.sqrt() as i64 + 1, (bf / d).sqrt() as i64 + 1),
        RingCase::ThreeMod4 => {
            let b = (4.0 * bf / d).sqrt() as i64 + 1;
            (bf.sqrt() as i64 + b / 2 + 2, b)
        }
    };
    for a in -amax..=amax {
        for b in -bmax..=bmax {
            let x = OkInt::new(a, b);
            let nx = x.norm(field);
            if nx <= bound {
                out.push((x, nx));
            }
        }
    }
    out
}

/// All `τ ∈ O_K^{n-1}` with `|τ|² ≤ bound` admissible for the ring case,
/// lexicographic in the integer coordinates. Each entry carries `|τ|²`.
pub fn enumerate_tau(field: &QuadraticField, n: usize, bound: f64) -> Vec<(Vec<OkInt>, i64)> {
    if n == 0 || !(bound >= 0.0) {
        return Vec::new();
    }
    let ibound = (bound + NORM_SLACK).floor() as i64;
    let coords = ok_points(field, ibound);
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n - 1);
    fn recurse(
        coords: &[(OkInt, i64)],
        depth: usize,
        remaining: i64,
        norm: i64,
        current: &mut Vec<OkInt>,
        out: &mut Vec<(Vec<OkInt>, i64)>,
        field: &QuadraticField,
    ) {
        if depth == 0 {
            if tau_admissible(field, norm) {
                out.push((current.clone(), norm));
            }
            return;
        }
        for &(x, nx) in coords {
            if nx <= remaining {
                current.push(x);
                recurse(coords, depth - 1, remaining - nx, norm + nx, current, out, field);
                current.pop();
            }
        }
    }
    recurse(&coords, n - 1, ibound, 0, &mut current, &mut out, field);
    out
}

/// Every admissible `(τ, t)` with `|τ|² + |t| ≤ norm_bound`, ordered
/// lexicographically by the coordinates of `τ` and then by `m = t/√d`.
pub fn enumerate_lattice(field: &QuadraticField, n: usize, norm_bound: f64) -> Result<Vec<LatticePoint>> {
    enumerate_lattice_with(field, n, norm_bound, LatticeRule::Separate)
}

pub fn enumerate_lattice_with(
    field: &QuadraticField,
    n: usize,
    norm_bound: f64,
    rule: LatticeRule,
) -> Result<Vec<LatticePoint>> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
    }
    if !(norm_bound > 0.0) || !norm_bound.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "norm bound must be positive and finite, got {norm_bound}"
        )));
    }
    let sd = field.sqrt_d();
    let mut out = Vec::new();
    for (tau, tau_norm) in enumerate_tau(field, n, norm_bound) {
        let room = norm_bound - tau_norm as f64;
        let mmax = ((room + NORM_SLACK) / sd).floor() as i64;
        for m in -mmax..=mmax {
            if tau_norm as f64 + m.unsigned_abs() as f64 * sd > norm_bound + NORM_SLACK {
                continue;
            }
            if t_admissible(field, rule, tau_norm, m) {
                out.push(LatticePoint {
                    tau: tau.clone(),
                    m,
                    tau_norm,
                });
            }
        }
    }
    Ok(out)
}

/// An element `(τ, t, U, r)` of the cusp stabilizer.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergElement {
    pub tau: Vec<Complex64>,
    pub t: f64,
    pub u: DMatrix<Complex64>,
    pub r: f64,
}

impl HeisenbergElement {
    /// Pure translation with `U = Id`, `r = 1`.
    pub fn translation(tau: Vec<Complex64>, t: f64) -> Self {
        let m = tau.len();
        Self {
            tau,
            t,
            u: DMatrix::identity(m, m),
            r: 1.0,
        }
    }

    pub fn n(&self) -> usize {
        self.tau.len() + 1
    }

    pub fn tau_norm_sqr(&self) -> f64 {
        self.tau.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.tau.len();
        if self.u.nrows() != m || self.u.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: self.u.nrows(),
            });
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dilation must be positive, got {}",
                self.r
            )));
        }
        let defect = (&self.u * self.u.adjoint() - DMatrix::<Complex64>::identity(m, m)).norm();
        if defect > 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "U is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(())
    }

    /// Recover `(τ, t, U, r)` from a matrix of stabilizer shape.
    pub fn from_matrix(g: &GroupElement) -> Result<Self> {
        if g.form() != FormTag::H3 {
            return Err(Error::InvalidParameter(
                "stabilizer elements live in the H3 form".into(),
            ));
        }
        let m = g.matrix();
        let n = m.nrows() - 1;
        let scale = m.norm().max(1.0);
        let tol = 1e-10 * scale;
        for j in 1..=n {
            if m[(j, 0)].norm() > tol {
                return Err(Error::InvariantViolation("first column is not (r, 0, …, 0)".into()));
            }
        }
        for j in 0..n {
            if m[(n, j)].norm() > tol {
                return Err(Error::InvariantViolation("last row is not (0, …, 0, 1/r)".into()));
            }
        }
        let r = m[(0, 0)].re;
        if !(r > 0.0) || m[(0, 0)].im.abs() > tol {
            return Err(Error::InvariantViolation(
                "top-left entry is not a positive real".into(),
            ));
        }
        let tau: Vec<Complex64> = (1..n).map(|j| m[(j, n)] * r).collect();
        let u = m.view((1, 1), (n - 1, n - 1)).into_owned();
        let t = 2.0 * r * m[(0, n)].im;
        let h = Self { tau, t, u, r };
        let rebuilt = heisenberg_matrix(&h)?;
        let diff = (rebuilt.matrix() - m).norm();
        if diff > tol {
            return Err(Error::InvariantViolation(format!(
                "matrix is not of stabilizer shape (residual {diff:.3e})"
            )));
        }
        Ok(h)
    }
}

/// An isometry of one of the Hermitian forms, acting by linear fractional maps.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: DMatrix<Complex64>,
    form: FormTag,
}

impl GroupElement {
    pub fn new(matrix: DMatrix<Complex64>, form: FormTag) -> Result<Self> {
        let size = matrix.nrows();
        if size < 2 || matrix.ncols() != size {
            return Err(Error::InvalidParameter("group elements are square, size ≥ 2".into()));
        }
        let h = HermitianForm::new(form, size - 1)?;
        let defect = (matrix.adjoint() * h.matrix() * &matrix - h.matrix()).norm();
        let scale = matrix.norm().powi(2).max(1.0);
        if !(defect <= 1e-10 * scale) {
            return Err(Error::InvariantViolation(format!(
                "M* H M differs from H by {defect:.3e}"
            )));
        }
        Ok(Self { matrix, form })
    }

    pub fn identity(n: usize, form: FormTag) -> Self {
        Self {
            matrix: DMatrix::identity(n + 1, n + 1),
            form,
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn form(&self) -> FormTag {
        self.form
    }

    pub fn a_block(&self) -> DMatrix<Complex64> {
        let n = self.n();
        self.matrix.view((0, 0), (n, n)).into_owned()
    }

    pub fn b_block(&self) -> DVector<Complex64> {
        let n = self.n();
        self.matrix.view((0, n), (n, 1)).column(0).into_owned()
    }

    pub fn c_block(&self) -> DMatrix<Complex64> {
        let n = self.n();
        self.matrix.view((n, 0), (1, n)).into_owned()
    }

    pub fn d_block(&self) -> Complex64 {
        let n = self.n();
        self.matrix[(n, n)]
    }

    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.form != other.form || self.n() != other.n() {
            return Err(Error::InvalidParameter("composing elements of different forms".into()));
        }
        Ok(GroupElement {
            matrix: &self.matrix * &other.matrix,
            form: self.form,
        })
    }

    /// `H M* H`, which is the inverse because every form used squares to `Id`.
    pub fn inverse(&self) -> GroupElement {
        let h = HermitianForm::new(self.form, self.n()).expect("valid dimension");
        GroupElement {
            matrix: h.matrix() * self.matrix.adjoint() * h.matrix(),
            form: self.form,
        }
    }

    pub fn apply(&self, p: &ModelPoint) -> Result<ModelPoint> {
        if p.model() != self.form.model() {
            return Err(Error::InvalidParameter(format!(
                "element of form {:?} applied to a {} point",
                self.form,
                p.model().name()
            )));
        }
        if p.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: p.n(),
            });
        }
        let image = &self.matrix * lift(p).0;
        project(p.model(), &image, "C z + D = 0")
    }

    /// Conjugate a left half-space element into the ball model.
    pub fn to_ball(&self) -> Result<GroupElement> {
        if self.form != FormTag::H3 {
            return Err(Error::InvalidParameter(
                "only H3 elements are carried to the ball".into(),
            ));
        }
        let c = cayley_matrix(CayleyMap::G31, self.n());
        Ok(GroupElement {
            matrix: &c * &self.matrix * &c * Complex64::new(0.5, 0.0),
            form: FormTag::H1,
        })
    }

    /// The boost `(cosh s, 0, sinh s; 0, Id, 0; sinh s, 0, cosh s)` of the ball.
    pub fn ball_boost(n: usize, s: f64) -> GroupElement {
        let mut m = DMatrix::identity(n + 1, n + 1);
        m[(0, 0)] = Complex64::new(s.cosh(), 0.0);
        m[(n, n)] = Complex64::new(s.cosh(), 0.0);
        m[(0, n)] = Complex64::new(s.sinh(), 0.0);
        m[(n, 0)] = Complex64::new(s.sinh(), 0.0);
        GroupElement {
            matrix: m,
            form: FormTag::H1,
        }
    }
}

pub fn heisenberg_matrix(h: &HeisenbergElement) -> Result<GroupElement> {
    h.validate()?;
    let n = h.n();
    let mut m = DMatrix::from_element(n + 1, n + 1, ZERO);
    let r = h.r;
    let tau = DVector::from_vec(h.tau.clone());
    let row = tau.adjoint() * &h.u;
    m[(0, 0)] = Complex64::new(r, 0.0);
    for j in 0..n - 1 {
        m[(0, j + 1)] = -row[(0, j)];
        m[(j + 1, n)] = tau[j] / r;
        for k in 0..n - 1 {
            m[(j + 1, k + 1)] = h.u[(j, k)];
        }
    }
    m[(0, n)] = Complex64::new(-h.tau_norm_sqr(), h.t) / (2.0 * r);
    m[(n, n)] = ONE / r;
    GroupElement::new(m, FormTag::H3)
}

/// Injectivity radius and dimension feeding the counting bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingContext {
    pub r_x: f64,
    pub n: usize,
}

impl CountingContext {
    pub fn new(r_x: f64, n: usize) -> Result<Self> {
        if !(r_x > 0.0) || !r_x.is_finite() {
            return Err(Error::InvalidParameter(format!("r_X must be positive, got {r_x}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
        }
        Ok(Self { r_x, n })
    }

    fn ln_denominator(&self) -> f64 {
        2.0 * self.n as f64 * ln_sinh(self.r_x / 4.0)
    }
}

/// Upper bound `sinh^{2n}((2δ + r_X)/4) / sinh^{2n}(r_X/4)` for the number of
/// orbit points within distance `δ`.
pub fn counting_bound(delta: f64, ctx: &CountingContext) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("δ must be nonnegative, got {delta}")));
    }
    let two_n = 2.0 * ctx.n as f64;
    Ok((two_n * ln_sinh((2.0 * delta + ctx.r_x) / 4.0) - ctx.ln_denominator()).exp())
}

/// Bound on `Σ_{d(z,γw) > δ} f(d(z,γw))` obtained from the counting bound by
/// Stieltjes integration:
///
/// `f(δ)·N(δ) + 2n/sinh^{2n}(r_X/4) ∫_δ^∞ f(ρ) sinh^{2n-1}((2ρ+r_X)/4) cosh((2ρ+r_X)/4) dρ`.
///
/// `quadrature_points` sets the number of initial panels of the adaptive rule.
pub fn stieltjes_tail_bound<F: Fn(f64) -> f64>(
    f: F,
    delta: f64,
    ctx: &CountingContext,
    quadrature_points: usize,
) -> Result<f64> {
    if !(delta > ctx.r_x / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "δ = {delta} must exceed r_X/2 = {}",
            ctx.r_x / 2.0
        )));
    }
    let two_n = 2.0 * ctx.n as f64;
    let ln_den = ctx.ln_denominator();
    let fd = f(delta);
    if !(fd >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "f(δ) = {fd} is not a nonnegative number"
        )));
    }
    let head = if fd == 0.0 {
        0.0
    } else {
        fd * counting_bound(delta, ctx)?
    };
    let integrand = |rho: f64| {
        let v = f(rho);
        if v <= 0.0 {
            return 0.0;
        }
        let x = (2.0 * rho + ctx.r_x) / 4.0;
        (v.ln() + (two_n - 1.0) * ln_sinh(x) + ln_cosh(x) - ln_den).exp()
    };
    let opts = QuadOptions {
        rel_tol: 1e-8,
        initial_panels: quadrature_points.max(1),
        ..QuadOptions::default()
    };
    let tail = integrate_to_infinity(integrand, delta, opts)?;
    Ok(head + two_n * tail.value)
}

/// `Σ_{d ≤ δ} f(d)` over the observed distances plus [`stieltjes_tail_bound`].
pub fn stieltjes_bound<F: Fn(f64) -> f64>(
    f: F,
    distances: &[f64],
    delta: f64,
    ctx: &CountingContext,
    quadrature_points: usize,
) -> Result<f64> {
    let near: f64 = distances.iter().filter(|&&d| d <= delta).map(|&d| f(d)).sum();
    Ok(near + stieltjes_tail_bound(f, delta, ctx, quadrature_points)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CuspVariant {
    /// `2 Re z_1 ≤ -1/ε` and `z_2 = … = z_n = 0`.
    Literal,
    /// `2 Re z_1 ≤ -1/ε` with free transverse coordinates.
    #[default]
    Slab,
}

/// Membership in the cusp neighborhood `U_ε(∞)`; the boundary is included.
pub fn cusp_neighborhood_test(p: &ModelPoint, epsilon: f64, variant: CuspVariant) -> Result<bool> {
    if p.model() != Model::LeftHalf {
        return Err(Error::InvalidParameter(
            "cusp neighborhoods are defined in the left half-space".into(),
        ));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {epsilon}")));
    }
    let level = -1.0 / epsilon;
    let slab = 2.0 * p.coords()[0].re <= level + NORM_SLACK * level.abs();
    Ok(match variant {
        CuspVariant::Slab => slab,
        CuspVariant::Literal => slab && p.coords()[1..].iter().all(|z| z.norm() <= NORM_SLACK),
    })
}

fn default_u_factor() -> f64 {
    1.0
}

/// Lattice specification as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub d: u32,
    pub n: usize,
    /// Derived from `d`; if present it must agree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring_case: Option<RingCase>,
    pub norm_bound: f64,
    /// Constant standing in for the sum over the rotation part `U`.
    #[serde(default = "default_u_factor", rename = "U_factor", alias = "u_factor")]
    pub u_factor: f64,
}

impl LatticeSpec {
    pub fn field(&self) -> Result<QuadraticField> {
        let field = QuadraticField::new(self.d)?;
        if let Some(rc) = self.ring_case {
            if rc != field.ring_case() {
                return Err(Error::InvalidParameter(format!(
                    "ring_case {rc:?} does not match d = {}",
                    self.d
                )));
            }
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
        }
        if !(self.u_factor > 0.0) {
            return Err(Error::InvalidParameter("U_factor must be positive".into()));
        }
        Ok(field)
    }

    pub fn enumerate(&self) -> Result<Vec<LatticePoint>> {
        enumerate_lattice(&self.field()?, self.n, self.norm_bound)
    }
}
