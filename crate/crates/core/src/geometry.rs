//! Models of complex hyperbolic n-space and the isometries between them.
//!
//! Three models are supported, each cut out of `C^n` by a Hermitian form of
//! signature `(n, 1)` evaluated on the lift `z̃ = (z_1, …, z_n, 1)`:
//!
//! | model          | form | domain                                   |
//! |----------------|------|------------------------------------------|
//! | `Ball`         | H1   | `Σ |z_j|² < 1`                           |
//! | `Hyperquadric` | H2   | `Im z_n > ½ Σ_{j<n} |z_j|²`              |
//! | `LeftHalf`     | H3   | `Re z_1 < -½ Σ_{j≥2} |z_j|²`             |
//!
//! Distances are computed from `cosh²(d/2) = ⟨z̃,w̃⟩⟨w̃,z̃⟩ / ⟨z̃,z̃⟩⟨w̃,w̃⟩`,
//! with the excess over one evaluated from the difference of the lifts so
//! that nearby points do not lose all their digits.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points of a model closer to the boundary than this (measured on
/// `-⟨z̃,z̃⟩`) are rejected.
pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Ball,
    Hyperquadric,
    LeftHalf,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Ball => "ball",
            Model::Hyperquadric => "hyperquadric",
            Model::LeftHalf => "left-half",
        }
    }

    pub fn form_tag(self) -> FormTag {
        match self {
            Model::Ball => FormTag::H1,
            Model::Hyperquadric => FormTag::H2,
            Model::LeftHalf => FormTag::H3,
        }
    }

    fn inequality(self) -> &'static str {
        match self {
            Model::Ball => "|z_1|^2 + ... + |z_n|^2 < 1",
            Model::Hyperquadric => "Im(z_n) > 1/2 * sum_{j<n} |z_j|^2",
            Model::LeftHalf => "Re(z_1) < -1/2 * sum_{j>=2} |z_j|^2",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" | "B" => Ok(Model::Ball),
            "hyperquadric" | "upper" | "D" => Ok(Model::Hyperquadric),
            "left-half" | "left" | "E" => Ok(Model::LeftHalf),
            other => Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormTag {
    H1,
    H2,
    H3,
}

impl FormTag {
    pub fn model(self) -> Model {
        match self {
            FormTag::H1 => Model::Ball,
            FormTag::H2 => Model::Hyperquadric,
            FormTag::H3 => Model::LeftHalf,
        }
    }
}

/// An `(n+1)×(n+1)` Hermitian matrix of signature `(n, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    n: usize,
    tag: FormTag,
    matrix: DMatrix<Complex64>,
}

impl HermitianForm {
    pub fn new(tag: FormTag, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
        }
        let size = n + 1;
        let mut m = DMatrix::from_element(size, size, ZERO);
        match tag {
            FormTag::H1 => {
                for j in 0..n {
                    m[(j, j)] = ONE;
                }
                m[(n, n)] = -ONE;
            }
            // The coordinate z_n is paired with the homogeneous coordinate, so
            // that ⟨z̃,z̃⟩ = Σ_{j<n} |z_j|² - 2 Im z_n.
            FormTag::H2 => {
                for j in 0..n - 1 {
                    m[(j, j)] = ONE;
                }
                m[(n - 1, n)] = -I;
                m[(n, n - 1)] = I;
            }
            FormTag::H3 => {
                for j in 1..n {
                    m[(j, j)] = ONE;
                }
                m[(0, n)] = ONE;
                m[(n, 0)] = ONE;
            }
        }
        Ok(Self { n, tag, matrix: m })
    }

    pub fn for_model(model: Model, n: usize) -> Result<Self> {
        Self::new(model.form_tag(), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tag(&self) -> FormTag {
        self.tag
    }

    pub fn model(&self) -> Model {
        self.tag.model()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `⟨a, b⟩ = b* H a` for raw vectors of length `n + 1`.
    pub fn eval(&self, a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
        let ha = &self.matrix * a;
        b.iter().zip(ha.iter()).map(|(bj, hj)| bj.conj() * hj).sum()
    }
}

/// A point of one of the three models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    model: Model,
    coords: Vec<Complex64>,
}

impl ModelPoint {
    pub fn new(model: Model, coords: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(model, coords, DEFAULT_BOUNDARY_TOLERANCE)
    }

    pub fn with_tolerance(model: Model, coords: Vec<Complex64>, tolerance: f64) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("a point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        let margin = membership_margin(model, &coords);
        if !(margin > tolerance) {
            return Err(Error::OutsideModel {
                model: model.name(),
                condition: format!(
                    "{} fails (margin {margin:.3e}, tolerance {tolerance:.1e})",
                    model.inequality()
                ),
            });
        }
        Ok(Self { model, coords })
    }

    /// Convenience constructor from real coordinates.
    pub fn from_reals(model: Model, coords: &[f64]) -> Result<Self> {
        Self::new(model, coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn origin(n: usize) -> Self {
        Self {
            model: Model::Ball,
            coords: vec![ZERO; n],
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// `-⟨z̃, z̃⟩`, strictly positive inside the model.
    pub fn margin(&self) -> f64 {
        membership_margin(self.model, &self.coords)
    }
}

fn membership_margin(model: Model, z: &[Complex64]) -> f64 {
    match model {
        Model::Ball => 1.0 - z.iter().map(|c| c.norm_sqr()).sum::<f64>(),
        Model::Hyperquadric => {
            let n = z.len();
            2.0 * z[n - 1].im - z[..n - 1].iter().map(|c| c.norm_sqr()).sum::<f64>()
        }
        Model::LeftHalf => -2.0 * z[0].re - z[1..].iter().map(|c| c.norm_sqr()).sum::<f64>(),
    }
}

/// A vector of `A^{n+1}`: homogeneous coordinates with nonzero last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector(pub DVector<Complex64>);

impl LiftedVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn lift(p: &ModelPoint) -> LiftedVector {
    let mut v: Vec<Complex64> = p.coords.clone();
    v.push(ONE);
    LiftedVector(DVector::from_vec(v))
}

/// `b* H a`.
pub fn herm_inner(form: &HermitianForm, a: &LiftedVector, b: &LiftedVector) -> Result<Complex64> {
    let size = form.n + 1;
    for v in [a, b] {
        if v.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: v.len(),
            });
        }
    }
    Ok(form.eval(&a.0, &b.0))
}

fn check_pair(form: &HermitianForm, z: &ModelPoint, w: &ModelPoint) -> Result<()> {
    for p in [z, w] {
        if p.model != form.model() {
            return Err(Error::InvalidParameter(format!(
                "point of the {} model used with form {:?}",
                p.model.name(),
                form.tag
            )));
        }
        if p.n() != form.n {
            return Err(Error::DimensionMismatch {
                expected: form.n,
                got: p.n(),
            });
        }
    }
    Ok(())
}

/// `sinh²(d(z,w)/2) = cosh²(d/2) - 1`, computed without cancellation.
pub fn sinh2_half_dist(form: &HermitianForm, z: &ModelPoint, w: &ModelPoint) -> Result<f64> {
    check_pair(form, z, w)?;
    let zt = lift(z).0;
    let wt = lift(w).0;
    let zz = form.eval(&zt, &zt).re;
    let ww = form.eval(&wt, &wt).re;
    if !(zz < 0.0 && ww < 0.0) {
        return Err(Error::OutsideModel {
            model: form.model().name(),
            condition: "<z~, z~> must be negative".into(),
        });
    }
    // With u = z̃ - w̃:  |⟨z,w⟩|² - ⟨z,z⟩⟨w,w⟩ = |⟨z,u⟩|² - ⟨z,z⟩⟨u,u⟩.
    let u = &zt - &wt;
    let zu = form.eval(&zt, &u);
    let uu = form.eval(&u, &u).re;
    let excess = (zu.norm_sqr() - zz * uu).max(0.0);
    Ok(excess / (zz * ww))
}

pub fn cosh2_half_dist(form: &HermitianForm, z: &ModelPoint, w: &ModelPoint) -> Result<f64> {
    Ok(1.0 + sinh2_half_dist(form, z, w)?)
}

pub fn hyp_distance(form: &HermitianForm, z: &ModelPoint, w: &ModelPoint) -> Result<f64> {
    let s = sinh2_half_dist(form, z, w)?;
    Ok(2.0 * s.sqrt().asinh())
}

/// Distance using the form matching the model of `z`.
pub fn distance(z: &ModelPoint, w: &ModelPoint) -> Result<f64> {
    let form = HermitianForm::for_model(z.model, z.n())?;
    hyp_distance(&form, z, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CayleyMap {
    /// Hyperquadric → Ball.
    G21,
    /// LeftHalf → Ball.
    G31,
    /// Ball → LeftHalf.
    G13,
    /// Hyperquadric → LeftHalf, `g13 ∘ g21`.
    G23,
}

impl CayleyMap {
    pub const ALL: [CayleyMap; 4] = [CayleyMap::G21, CayleyMap::G31, CayleyMap::G13, CayleyMap::G23];

    pub fn source(self) -> Model {
        match self {
            CayleyMap::G21 | CayleyMap::G23 => Model::Hyperquadric,
            CayleyMap::G31 => Model::LeftHalf,
            CayleyMap::G13 => Model::Ball,
        }
    }

    pub fn target(self) -> Model {
        match self {
            CayleyMap::G21 | CayleyMap::G31 => Model::Ball,
            CayleyMap::G13 | CayleyMap::G23 => Model::LeftHalf,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CayleyMap::G21 => "g21",
            CayleyMap::G31 => "g31",
            CayleyMap::G13 => "g13",
            CayleyMap::G23 => "g23",
        }
    }
}

/// Linear map on lifts that realizes a Cayley transform.
///
/// `g31` and `g13` share the involutive matrix
/// `(z_1, z', 1) ↦ (z_1 + 1, √2 z', z_1 - 1)` whose square is `2·Id`.
pub fn cayley_matrix(map: CayleyMap, n: usize) -> DMatrix<Complex64> {
    let size = n + 1;
    let mut m = DMatrix::from_element(size, size, ZERO);
    let root2 = Complex64::new(SQRT_2, 0.0);
    match map {
        CayleyMap::G31 | CayleyMap::G13 => {
            m[(0, 0)] = ONE;
            m[(0, n)] = ONE;
            for j in 1..n {
                m[(j, j)] = root2;
            }
            m[(n, 0)] = ONE;
            m[(n, n)] = -ONE;
        }
        CayleyMap::G21 => {
            for j in 0..n - 1 {
                m[(j, j)] = root2;
            }
            m[(n - 1, n - 1)] = ONE;
            m[(n - 1, n)] = -I;
            m[(n, n - 1)] = ONE;
            m[(n, n)] = I;
        }
        CayleyMap::G23 => {
            m = cayley_matrix(CayleyMap::G13, n) * cayley_matrix(CayleyMap::G21, n);
        }
    }
    m
}

/// Dehomogenize `v` into a point of `model`.
pub(crate) fn project(model: Model, v: &DVector<Complex64>, what: &str) -> Result<ModelPoint> {
    let n = v.len() - 1;
    let denom = v[n];
    if denom.norm() < 1e-300 || !denom.norm().is_finite() {
        return Err(Error::Pole(format!("{what}: vanishing homogeneous coordinate")));
    }
    let coords: Vec<Complex64> = (0..n).map(|j| v[j] / denom).collect();
    ModelPoint::new(model, coords)
}

pub fn cayley(map: CayleyMap, p: &ModelPoint) -> Result<ModelPoint> {
    if p.model != map.source() {
        return Err(Error::InvalidParameter(format!(
            "{} expects a point of the {} model, got {}",
            map.name(),
            map.source().name(),
            p.model.name()
        )));
    }
    let n = p.n();
    match map {
        CayleyMap::G31 | CayleyMap::G13 if p.coords[0] == ONE => {
            return Err(Error::Pole(format!("{}: z_1 = 1", map.name())));
        }
        CayleyMap::G21 | CayleyMap::G23 if p.coords[n - 1] == -I => {
            return Err(Error::Pole(format!("{}: z_n = -i", map.name())));
        }
        _ => {}
    }
    if map == CayleyMap::G23 {
        let ball = cayley(CayleyMap::G21, p)?;
        return cayley(CayleyMap::G13, &ball);
    }
    let image = cayley_matrix(map, n) * lift(p).0;
    project(map.target(), &image, map.name())
}

/// `(1 - |z|²)^{-(n+1)}` for a ball point.
pub fn hyp_volume_density(p: &ModelPoint) -> Result<f64> {
    if p.model != Model::Ball {
        return Err(Error::InvalidParameter("volume density is defined on the ball".into()));
    }
    Ok(p.margin().powi(-(p.n() as i32 + 1)))
}

/// `(4π)^n / n! · sinh^{2n}(r/2)`.
pub fn geodesic_ball_volume(r: f64, n: usize) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be nonnegative, got {r}")));
    }
    let factorial: f64 = (1..=n).map(|j| j as f64).product();
    Ok((4.0 * PI).powi(n as i32) / factorial * (r / 2.0).sinh().powi(2 * n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lift_appends_one() {
        let p = ModelPoint::from_reals(Model::Ball, &[0.5, 0.0]).unwrap();
        assert_eq!(lift(&p).0.as_slice(), &[c(0.5, 0.0), ZERO, ONE]);
        let q = ModelPoint::from_reals(Model::LeftHalf, &[-1.0, 0.0]).unwrap();
        assert_eq!(lift(&q).0.as_slice(), &[c(-1.0, 0.0), ZERO, ONE]);
        assert_eq!(lift(&ModelPoint::origin(3)).0.as_slice(), &[ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn forms_are_hermitian() {
        for tag in [FormTag::H1, FormTag::H2, FormTag::H3] {
            for n in 1..5 {
                let f = HermitianForm::new(tag, n).unwrap();
                assert_eq!(f.matrix(), &f.matrix().adjoint());
            }
        }
    }

    #[test]
    fn herm_inner_examples() {
        let h1 = HermitianForm::new(FormTag::H1, 2).unwrap();
        let o = lift(&ModelPoint::origin(2));
        assert_eq!(herm_inner(&h1, &o, &o).unwrap(), c(-1.0, 0.0));
        let a = lift(&ModelPoint::from_reals(Model::Ball, &[0.5, 0.0]).unwrap());
        assert_eq!(herm_inner(&h1, &a, &o).unwrap(), c(-1.0, 0.0));

        let h3 = HermitianForm::new(FormTag::H3, 2).unwrap();
        let e = lift(&ModelPoint::from_reals(Model::LeftHalf, &[-1.0, 0.0]).unwrap());
        assert_eq!(herm_inner(&h3, &e, &e).unwrap(), c(-2.0, 0.0));

        let short = LiftedVector(DVector::from_vec(vec![ONE, ONE]));
        assert!(matches!(
            herm_inner(&h1, &short, &o),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn h3_inner_matches_closed_form() {
        let h3 = HermitianForm::new(FormTag::H3, 3).unwrap();
        let z = ModelPoint::new(Model::LeftHalf, vec![c(-2.0, 0.3), c(0.4, -0.2), c(0.1, 0.5)]).unwrap();
        let w = ModelPoint::new(Model::LeftHalf, vec![c(-1.5, -1.0), c(-0.3, 0.1), c(0.2, 0.2)]).unwrap();
        let got = herm_inner(&h3, &lift(&z), &lift(&w)).unwrap();
        let zc = z.coords();
        let wc = w.coords();
        let expected = zc[0] + wc[0].conj() + zc[1] * wc[1].conj() + zc[2] * wc[2].conj();
        assert!((got - expected).norm() < 1e-15);
    }

    #[test]
    fn cosh2_examples() {
        let h1 = HermitianForm::new(FormTag::H1, 2).unwrap();
        let o = ModelPoint::origin(2);
        assert_eq!(cosh2_half_dist(&h1, &o, &o).unwrap(), 1.0);
        for &r in &[0.1, 0.5, 0.9, 0.999] {
            let w = ModelPoint::from_reals(Model::Ball, &[r, 0.0]).unwrap();
            let got = cosh2_half_dist(&h1, &o, &w).unwrap();
            let expected = 1.0 / (1.0 - r * r);
            assert!((got - expected).abs() < 1e-12 * expected);
            // Poincare disk: d(0, r) = 2 artanh(r)
            let d = hyp_distance(&h1, &o, &w).unwrap();
            assert!((d - 2.0 * r.atanh()).abs() < 1e-12);
        }

        let h3 = HermitianForm::new(FormTag::H3, 2).unwrap();
        let z = ModelPoint::from_reals(Model::LeftHalf, &[-1.0, 0.0]).unwrap();
        let w = ModelPoint::from_reals(Model::LeftHalf, &[-2.0, 0.0]).unwrap();
        assert!((cosh2_half_dist(&h3, &z, &w).unwrap() - 9.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn distance_of_tanh_half_is_one() {
        let h1 = HermitianForm::new(FormTag::H1, 2).unwrap();
        let w = ModelPoint::from_reals(Model::Ball, &[0.5f64.tanh(), 0.0]).unwrap();
        let d = hyp_distance(&h1, &ModelPoint::origin(2), &w).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nearby_points_keep_precision() {
        let h1 = HermitianForm::new(FormTag::H1, 2).unwrap();
        let z = ModelPoint::from_reals(Model::Ball, &[0.3, 0.2]).unwrap();
        let w = ModelPoint::from_reals(Model::Ball, &[0.3 + 1e-9, 0.2]).unwrap();
        let d = hyp_distance(&h1, &z, &w).unwrap();
        // metric ds = 2|dz|/(1-|z|^2) along a radial-ish direction to first order
        let r2: f64 = 0.13;
        let radial = 0.3 / r2.sqrt();
        let expected = 1e-9 * 2.0 * ((1.0 - r2 + r2 * radial * radial) / (1.0 - r2).powi(2)).sqrt();
        assert!(
            (d - expected).abs() < 1e-6 * expected,
            "d = {d:e}, expected {expected:e}"
        );
    }

    #[test]
    fn boundary_points_are_rejected() {
        let err = ModelPoint::from_reals(Model::Ball, &[1.0, 0.0]).unwrap_err();
        match err {
            Error::OutsideModel { condition, .. } => assert!(condition.contains("< 1")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(ModelPoint::from_reals(Model::Ball, &[1.0 - 1e-13, 0.0]).is_err());
        assert!(ModelPoint::from_reals(Model::LeftHalf, &[0.0, 0.0]).is_err());
        assert!(ModelPoint::from_reals(Model::Hyperquadric, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn cayley_examples() {
        let e = cayley(CayleyMap::G13, &ModelPoint::origin(3)).unwrap();
        assert_eq!(e.model(), Model::LeftHalf);
        assert_eq!(e.coords(), &[c(-1.0, 0.0), ZERO, ZERO]);
        let back = cayley(CayleyMap::G31, &e).unwrap();
        assert_eq!(back.coords(), &[ZERO, ZERO, ZERO]);
    }

    #[test]
    fn cayley_rejects_wrong_model() {
        let p = ModelPoint::origin(2);
        assert!(cayley(CayleyMap::G31, &p).is_err());
        assert!(cayley(CayleyMap::G21, &p).is_err());
    }

    #[test]
    fn cayley_matrix_g31_squares_to_two() {
        let m = cayley_matrix(CayleyMap::G31, 3);
        let sq = &m * &m;
        let two = DMatrix::from_diagonal_element(4, 4, c(2.0, 0.0));
        assert!((sq - two).norm() < 1e-15);
    }

    #[test]
    fn cayley_matrices_pull_back_forms() {
        // C* H_target C is a positive multiple of H_source
        for n in 1..4 {
            for map in CayleyMap::ALL {
                let m = cayley_matrix(map, n);
                let src = HermitianForm::for_model(map.source(), n).unwrap();
                let dst = HermitianForm::for_model(map.target(), n).unwrap();
                let pulled = m.adjoint() * dst.matrix() * &m;
                let factor = if map == CayleyMap::G23 { 4.0 } else { 2.0 };
                let diff = &pulled - src.matrix() * c(factor, 0.0);
                assert!(diff.norm() < 1e-14, "{map:?} n={n}");
            }
        }
    }

    #[test]
    fn volume_density_examples() {
        assert_eq!(hyp_volume_density(&ModelPoint::origin(2)).unwrap(), 1.0);
        let h = 0.5f64.sqrt();
        let p = ModelPoint::from_reals(Model::Ball, &[h, 0.0]).unwrap();
        assert!((hyp_volume_density(&p).unwrap() - 8.0).abs() < 1e-12);
        let q = ModelPoint::from_reals(Model::Ball, &[0.9f64.sqrt(), 0.0, 0.0]).unwrap();
        assert!((hyp_volume_density(&q).unwrap() - 1e4).abs() < 1e-7);
    }

    #[test]
    fn geodesic_ball_volume_examples() {
        assert_eq!(geodesic_ball_volume(0.0, 2).unwrap(), 0.0);
        let r = 2.0 * 1.0f64.asinh();
        assert!((geodesic_ball_volume(r, 1).unwrap() - 4.0 * PI).abs() < 1e-12);
        let expected = (4.0 * PI).powi(2) / 2.0 * 0.5f64.sinh().powi(4);
        assert!((geodesic_ball_volume(1.0, 2).unwrap() - expected).abs() < 1e-12);
        assert!(geodesic_ball_volume(-1.0, 2).is_err());
        let mut prev = 0.0;
        for i in 1..50 {
            let v = geodesic_ball_volume(i as f64 * 0.1, 3).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }
}
