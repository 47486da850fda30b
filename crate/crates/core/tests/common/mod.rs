#![allow(dead_code)]

use std::collections::BTreeSet;

use num_complex::Complex64;
use picard_core::arithmetic::{enumerate_lattice, heisenberg_matrix, GroupElement, QuadraticField};
use picard_core::geometry::{Model, ModelPoint};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            // Box-Muller
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            Complex64::from_polar(r, u2)
        })
        .collect()
}

/// A point of the ball with `|z| ≤ rmax`, uniform in direction.
pub fn ball_point<R: Rng>(rng: &mut R, n: usize, rmax: f64) -> ModelPoint {
    let v = gaussian_vec(rng, n);
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let r = rmax * rng.gen_range(0.0f64..1.0).powf(1.0 / (2 * n) as f64);
    let coords = v.into_iter().map(|x| x * (r / norm)).collect();
    ModelPoint::new(Model::Ball, coords).unwrap()
}

/// A random point of the given model whose margin `-⟨z̃,z̃⟩` is log-uniform
/// in `[e^-3, e^3]`.
pub fn model_point<R: Rng>(rng: &mut R, model: Model, n: usize) -> ModelPoint {
    if model == Model::Ball {
        return ball_point(rng, n, 0.97);
    }
    let margin = rng.gen_range(-3.0f64..3.0).exp();
    let mut coords: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    match model {
        Model::LeftHalf => {
            let s: f64 = coords[1..].iter().map(|x| x.norm_sqr()).sum();
            coords[0].re = -(margin + s) / 2.0;
        }
        Model::Hyperquadric => {
            let s: f64 = coords[..n - 1].iter().map(|x| x.norm_sqr()).sum();
            coords[n - 1].im = (margin + s) / 2.0;
        }
        Model::Ball => unreachable!(),
    }
    ModelPoint::new(model, coords).unwrap()
}

/// Stabilizer translations with `|τ|² + |t| ≤ bound`, as left half-space
/// matrices.
pub fn heisenberg_elements(d: u32, n: usize, bound: f64) -> Vec<GroupElement> {
    let field = QuadraticField::new(d).unwrap();
    enumerate_lattice(&field, n, bound)
        .unwrap()
        .iter()
        .map(|p| heisenberg_matrix(&p.to_heisenberg(&field)).unwrap())
        .collect()
}

/// The same translations conjugated into the ball, plus a pair of mutually
/// inverse boosts so the set is not purely parabolic. Closed under inverses.
pub fn ball_elements(d: u32, n: usize, bound: f64, boost: Option<f64>) -> Vec<GroupElement> {
    let mut out: Vec<GroupElement> = heisenberg_elements(d, n, bound)
        .iter()
        .map(|g| g.to_ball().unwrap())
        .collect();
    if let Some(s) = boost {
        out.push(GroupElement::ball_boost(n, s));
        out.push(GroupElement::ball_boost(n, -s));
    }
    out
}

/// Independent scan of the stabilizer lattice: every integer coefficient
/// tuple in a box, norms from floating complex arithmetic, congruences
/// straight from their definition. Items are `(coefficients, m)`.
pub fn brute_force_lattice(d: u32, n: usize, bound: f64) -> BTreeSet<(Vec<(i64, i64)>, i64)> {
    let df = d as f64;
    let three = d % 4 == 3;
    let theta = if three {
        Complex64::new(0.5, df.sqrt() / 2.0)
    } else {
        Complex64::new(0.0, df.sqrt())
    };
    let edge = (4.0 * bound).sqrt().ceil() as i64 + 2;
    let dims = 2 * (n - 1);
    let mut out = BTreeSet::new();
    let mut idx = vec![-edge; dims];
    loop {
        let norm: f64 = (0..n - 1)
            .map(|j| (Complex64::new(idx[2 * j] as f64, 0.0) + theta * idx[2 * j + 1] as f64).norm_sqr())
            .sum();
        let rounded = norm.round();
        assert!((norm - rounded).abs() < 1e-6);
        let tau_ok = three || (rounded as i64) % 2 == 0;
        if tau_ok && rounded <= bound + 1e-9 {
            let mmax = ((bound - rounded) / df.sqrt()).floor() as i64 + 1;
            for m in -mmax..=mmax {
                let t = m as f64 * df.sqrt();
                if rounded + t.abs() > bound + 1e-9 {
                    continue;
                }
                if !three && m % 2 != 0 {
                    continue;
                }
                let coeffs = (0..n - 1).map(|j| (idx[2 * j], idx[2 * j + 1])).collect();
                out.insert((coeffs, m));
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == dims {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] > edge {
                idx[pos] = -edge;
                pos += 1;
            } else {
                break;
            }
        }
    }
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Wirtinger derivatives `∂_i f` and `∂_i ∂̄_j f` from Richardson-extrapolated
/// central differences in the real coordinates `(x_1, y_1, …, x_n, y_n)`.
pub fn wirtinger_fd(
    f: &dyn Fn(&[Complex64]) -> Complex64,
    z: &[Complex64],
    h: f64,
) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
    let (d_h, d2_h) = central_fd(f, z, h);
    let (d_h2, d2_h2) = central_fd(f, z, h / 2.0);
    let extrapolate = |a: Complex64, b: Complex64| (4.0 * b - a) / 3.0;
    let d = d_h.iter().zip(&d_h2).map(|(a, b)| extrapolate(*a, *b)).collect();
    let d2 = d2_h
        .iter()
        .zip(&d2_h2)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| extrapolate(*a, *b)).collect())
        .collect();
    (d, d2)
}

fn central_fd(f: &dyn Fn(&[Complex64]) -> Complex64, z: &[Complex64], h: f64) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
    let n = z.len();
    let dir = |k: usize| {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[k / 2] = if k.is_multiple_of(2) {
            Complex64::new(h, 0.0)
        } else {
            Complex64::new(0.0, h)
        };
        e
    };
    let at = |steps: &[(usize, f64)]| {
        let mut p = z.to_vec();
        for &(k, s) in steps {
            let e = dir(k);
            for (pi, ei) in p.iter_mut().zip(&e) {
                *pi += ei * s;
            }
        }
        f(&p)
    };
    let first: Vec<Complex64> = (0..2 * n)
        .map(|k| (at(&[(k, 1.0)]) - at(&[(k, -1.0)])) / (2.0 * h))
        .collect();
    let second = |a: usize, b: usize| {
        (at(&[(a, 1.0), (b, 1.0)]) - at(&[(a, 1.0), (b, -1.0)]) - at(&[(a, -1.0), (b, 1.0)])
            + at(&[(a, -1.0), (b, -1.0)]))
            / (4.0 * h * h)
    };
    let i = Complex64::new(0.0, 1.0);
    let d = (0..n).map(|j| 0.5 * (first[2 * j] - i * first[2 * j + 1])).collect();
    let d2 = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
                    0.25 * (second(xa, xb) + second(ya, yb) + i * (second(xa, yb) - second(ya, xb)))
                })
                .collect()
        })
        .collect();
    (d, d2)
}
