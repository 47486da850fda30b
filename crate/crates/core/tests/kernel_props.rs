mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use picard_core::arithmetic::{enumerate_lattice, GroupElement, QuadraticField};
use picard_core::geometry::{cosh2_half_dist, HermitianForm, Model, ModelPoint};
use picard_core::kernel::{
    auto_norm_bound, cusp_lattice_sum, cusp_lattice_sum_from_points, cusp_point, gamma_tail_integral,
    kernel_cosh_bound, kernel_sum, kernel_term, log_poisson_lower_bound, p_function_scan, petersson_log_weight,
    poisson_identity_check, CuspSumOptions, ExpSumFunction, KernelParams, TRUNCATION_LOG,
};
use picard_core::metric::diagonal_derivatives;
use picard_core::ErratumMode;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weighted_terms_obey_the_cosh_bound(seed in any::<u64>(), k in 1u32..6, left in any::<bool>()) {
        let mut rng = common::rng(seed);
        let n = 2;
        let params = KernelParams::new(k, n, 1.3).unwrap();
        let (model, elements) = if left {
            (Model::LeftHalf, common::heisenberg_elements(3, n, 5.0))
        } else {
            (Model::Ball, common::ball_elements(1, n, 4.0, Some(0.8)))
        };
        let form = HermitianForm::for_model(model, n).unwrap();
        let z = common::model_point(&mut rng, model, n);
        let w = common::model_point(&mut rng, model, n);
        let weights = petersson_log_weight(&z, &params).unwrap() + petersson_log_weight(&w, &params).unwrap();
        for g in &elements {
            let term = kernel_term(g, &z, &w, &params).unwrap();
            let gw = g.apply(&w).unwrap();
            let bound = params.c.ln() - 0.5 * params.big_k() as f64 * cosh2_half_dist(&form, &z, &gw).unwrap().ln();
            prop_assert!(term.log_mag + weights <= bound + 1e-10);
        }
    }

    #[test]
    fn weighted_identity_term_is_c(seed in any::<u64>(), k in 1u32..40, c in 0.01f64..100.0) {
        let mut rng = common::rng(seed);
        for model in [Model::Ball, Model::Hyperquadric, Model::LeftHalf] {
            let z = common::model_point(&mut rng, model, 3);
            let params = KernelParams::new(k, 3, c).unwrap();
            let id = GroupElement::identity(3, model.form_tag());
            let t = kernel_term(&id, &z, &z, &params).unwrap();
            let weighted = t.log_mag + 2.0 * petersson_log_weight(&z, &params).unwrap();
            prop_assert!((weighted - c.ln()).abs() < 1e-11);
        }
    }

    #[test]
    fn subharmonic_test_functions(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=3);
        let coeffs = (0..rng.gen_range(1..=3))
            .map(|_| {
                (0..rng.gen_range(1..=5))
                    .map(|_| {
                        let b = common::gaussian_vec(&mut rng, n - 1);
                        (common::gaussian_vec(&mut rng, 1)[0], b)
                    })
                    .collect()
            })
            .collect();
        let f = ExpSumFunction::new(n, coeffs).unwrap();
        let mut z = common::gaussian_vec(&mut rng, n);
        z[0].re = -z[0].re.abs();
        for coord in 0..n {
            prop_assert!(f.discrete_laplacian(&z, coord, 1e-4).unwrap() >= -1e-9);
        }
    }
}

/// Positivity is a property of the full series. Truncated translation sets
/// are far from it: the t-sums oscillate and their full value is
/// exponentially smaller than the individual terms. So positivity is checked
/// on an identity-dominated boost set and on stabilizer sets with converged
/// t-sums.
#[test]
fn diagonal_is_real_and_positive_on_symmetric_sets() {
    let mut rng = common::rng(31);
    let mut boosts = vec![GroupElement::identity(2, Model::Ball.form_tag())];
    for s in [1.5, 2.5, 4.0] {
        boosts.push(GroupElement::ball_boost(2, s));
        boosts.push(GroupElement::ball_boost(2, -s));
    }
    let params = KernelParams::new(3, 2, 1.0).unwrap();
    for _ in 0..50 {
        let z = common::ball_point(&mut rng, 2, 0.5);
        let s = kernel_sum(&z, &z, &params, &boosts, None).unwrap().complex();
        assert!(s.re > 0.0 && s.im.abs() <= 1e-10 * s.re, "{s}");
    }
    let left = common::heisenberg_elements(3, 2, 80.0);
    for alpha in [0.3, 0.6, 1.0] {
        let p = cusp_point(alpha, 2).unwrap();
        let s = kernel_sum(&p, &p, &params, &left, None).unwrap();
        let v = s.complex();
        assert!(v.re > 0.0 && v.im.abs() <= 1e-10 * v.re, "α={alpha}: {v}");
    }
}

#[test]
fn cusp_sum_matches_the_stabilizer_cosh_sum() {
    for (d, n) in [(3u32, 2usize), (1, 2), (2, 3)] {
        let field = QuadraticField::new(d).unwrap();
        let params = KernelParams::new(4, n, 1.0).unwrap();
        let alpha = 1.7;
        let bound = 9.0;
        let opts = CuspSumOptions {
            norm_bound: Some(bound),
            ..CuspSumOptions::default()
        };
        let lattice = cusp_lattice_sum(&params, &field, alpha, &opts).unwrap();
        let z = cusp_point(alpha, n).unwrap();
        let elements = common::heisenberg_elements(d, n, bound);
        let direct = kernel_cosh_bound(&z, &z, &params, &elements, None).unwrap();
        assert_eq!(lattice.terms_used, elements.len());
        assert!((lattice.log_abs_sum - direct.log_abs_sum).abs() < 1e-12, "d={d} n={n}");
    }
}

#[test]
fn sums_do_not_depend_on_order() {
    let field = QuadraticField::new(3).unwrap();
    let params = KernelParams::new(32, 2, 1.0).unwrap();
    let alpha = params.big_k() as f64 / (4.0 * PI);
    let mut points = enumerate_lattice(&field, 2, 40.0).unwrap();
    let opts = CuspSumOptions::default();
    let reference = cusp_lattice_sum_from_points(&params, &field, alpha, &points, &opts).unwrap();
    let mut rng = common::rng(5);
    for _ in 0..5 {
        points.shuffle(&mut rng);
        let shuffled = cusp_lattice_sum_from_points(&params, &field, alpha, &points, &opts).unwrap();
        assert!((shuffled.log_abs_sum - reference.log_abs_sum).abs() <= 1e-12 * reference.log_abs_sum.abs().max(1.0));
    }

    let mut elements = common::ball_elements(3, 2, 4.0, Some(0.5));
    let z = common::ball_point(&mut rng, 2, 0.6);
    let w = common::ball_point(&mut rng, 2, 0.6);
    let p = KernelParams::new(2, 2, 1.0).unwrap();
    let a = kernel_sum(&z, &w, &p, &elements, None).unwrap().complex();
    elements.shuffle(&mut rng);
    let b = kernel_sum(&z, &w, &p, &elements, None).unwrap().complex();
    assert!((a - b).norm() <= 1e-12 * a.norm());
}

#[test]
fn results_are_bitwise_identical_across_thread_counts() {
    let field = QuadraticField::new(1).unwrap();
    let params = KernelParams::new(128, 3, 1.0).unwrap();
    let alpha = params.big_k() as f64 / (4.0 * PI);
    let opts = CuspSumOptions::default();
    let elements = common::ball_elements(3, 2, 12.0, Some(0.5));
    let z = ModelPoint::from_reals(Model::Ball, &[0.3, -0.2]).unwrap();
    let kp = KernelParams::new(3, 2, 1.0).unwrap();
    let run = || {
        let cusp = cusp_lattice_sum(&params, &field, alpha, &opts).unwrap();
        let ks = kernel_sum(&z, &z, &kp, &elements, None).unwrap();
        let der = diagonal_derivatives(&z, &kp, &elements).unwrap();
        (
            cusp.log_abs_sum.to_bits(),
            cusp.tail_estimate.to_bits(),
            ks.value.log_mag.to_bits(),
            ks.value.phase.to_bits(),
            der.d2[0][1].log_mag.to_bits(),
            der.d2[0][1].phase.to_bits(),
        )
    };
    let one = in_pool(1, run);
    assert_eq!(one, in_pool(4, run));
    assert_eq!(one, in_pool(8, run));
}

#[test]
fn automatic_truncation_is_converged() {
    for (d, n, k) in [(3u32, 2usize, 16u32), (1, 2, 64), (3, 3, 32)] {
        let field = QuadraticField::new(d).unwrap();
        let params = KernelParams::new(k, n, 1.0).unwrap();
        let alpha = params.big_k() as f64 / (4.0 * PI);
        let auto = cusp_lattice_sum(&params, &field, alpha, &CuspSumOptions::default()).unwrap();
        let n_auto = auto_norm_bound(&params, alpha, &CuspSumOptions::default());
        assert_eq!(auto.norm_bound, n_auto);
        let wide = cusp_lattice_sum(
            &params,
            &field,
            alpha,
            &CuspSumOptions {
                norm_bound: Some(2.0 * n_auto),
                ..CuspSumOptions::default()
            },
        )
        .unwrap();
        let gap = (wide.log_abs_sum - auto.log_abs_sum).exp() - 1.0;
        assert!(gap.abs() < 1e-14, "gap {gap}");
        assert!(gap <= auto.relative_tail + 1e-15, "gap {gap} beyond the reported tail");
        assert!(auto.relative_tail < (-TRUNCATION_LOG / 2.0).exp());
    }
}

#[test]
fn p_function_peaks_where_the_derivative_vanishes() {
    // d/dx [4πx + K ln(-2x)] = 0 at x = -K/4π, so 2x = -K/2π
    for big_k in [24u32, 120, 600] {
        let params = KernelParams::new(big_k / 3, 2, 1.0).unwrap();
        let kf = big_k as f64;
        let y = p_function_scan(&params, -kf / PI, -1e-4, 1e-4).unwrap();
        assert!((y + kf / (2.0 * PI)).abs() <= 1e-4, "K={big_k}: {y}");
    }
}

#[test]
fn poisson_pairs_agree() {
    for big_k in [2u32, 3, 4, 8, 12] {
        for beta in [0.25, 0.5, 1.0, 2.0] {
            let pair = poisson_identity_check(beta, big_k, 2000, 200).unwrap();
            assert!(
                (pair.left - pair.right).abs() <= 1e-8 * pair.right.abs(),
                "K={big_k} β={beta}: {pair:?}"
            );
        }
    }
}

/// At large β both sides shrink like e^{-2πβ}, far below the t = 0 term β^{-K}.
#[test]
fn poisson_sides_decay_exponentially_in_beta() {
    let (beta, big_k) = (4.0f64, 4u32);
    let pair = poisson_identity_check(beta, big_k, 4000, 50).unwrap();
    let leading = (2.0 * PI).powi(4) / 6.0 * (-2.0 * PI * beta).exp();
    assert!((pair.right / leading - 1.0).abs() < 1e-9, "{pair:?}");
    assert!((pair.left / leading - 1.0).abs() < 1e-5, "{pair:?}");
    assert!(pair.left < 1e-5 * beta.powi(-4));
}

#[test]
fn gamma_tail_constants() {
    assert!((gamma_tail_integral(1.0, ErratumMode::Corrected).unwrap() - PI / 2.0).abs() < 1e-14);
    assert!((gamma_tail_integral(1.5, ErratumMode::Corrected).unwrap() - 1.0).abs() < 1e-14);
    assert!((gamma_tail_integral(2.0, ErratumMode::Corrected).unwrap() - PI / 4.0).abs() < 1e-14);
    for a in [0.75, 1.0, 3.3, 10.0] {
        let c = gamma_tail_integral(a, ErratumMode::Corrected).unwrap();
        let l = gamma_tail_integral(a, ErratumMode::PaperLiteral).unwrap();
        assert!((l - 2.0 * c).abs() < 1e-14 * l);
    }
    assert!(gamma_tail_integral(0.5, ErratumMode::Corrected).is_err());
}

#[test]
fn lower_bound_sits_below_the_cusp_sum() {
    let field = QuadraticField::new(3).unwrap();
    for k in [16u32, 64, 256] {
        let params = KernelParams::new(k, 2, 1.0).unwrap();
        for factor in [1.0, 2.0, 4.0] {
            let alpha = factor * params.big_k() as f64 / (4.0 * PI);
            let lower = log_poisson_lower_bound(alpha, &params, 64).unwrap();
            let sum = cusp_lattice_sum(&params, &field, alpha, &CuspSumOptions::default()).unwrap();
            assert!(lower < sum.log_abs_sum, "k={k} α={alpha}");
        }
    }
}

#[test]
fn kernel_examples() {
    let id = GroupElement::identity(2, Model::Ball.form_tag());
    let params = KernelParams::new(2, 2, 1.0).unwrap();
    let o = ModelPoint::origin(2);
    assert_eq!(kernel_term(&id, &o, &o, &params).unwrap().log_mag, 0.0);
    let z = ModelPoint::from_reals(Model::Ball, &[0.5f64.sqrt(), 0.0]).unwrap();
    let t = kernel_term(&id, &z, &z, &params).unwrap();
    assert!((t.log_mag - 6.0 * 2.0f64.ln()).abs() < 1e-13);
    let s = kernel_sum(&o, &o, &KernelParams::new(2, 2, 3.5).unwrap(), &[id], None).unwrap();
    assert!((s.complex() - Complex64::new(3.5, 0.0)).norm() < 1e-14);
}
