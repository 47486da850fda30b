use num_complex::Complex64;

/// `∂_i ∂̄_j f` by central differences in `(x_1, y_1, …)` at steps `h` and
/// `h/2`, Richardson-combined.
pub fn wirtinger_hessian(f: &dyn Fn(&[Complex64]) -> f64, z: &[Complex64], h: f64) -> Vec<Vec<Complex64>> {
    let a = central(f, z, h);
    let b = central(f, z, h / 2.0);
    a.iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (4.0 * y - x) / 3.0).collect())
        .collect()
}

fn central(f: &dyn Fn(&[Complex64]) -> f64, z: &[Complex64], h: f64) -> Vec<Vec<Complex64>> {
    let n = z.len();
    let step = |k: usize| {
        if k.is_multiple_of(2) {
            Complex64::new(h, 0.0)
        } else {
            Complex64::new(0.0, h)
        }
    };
    let at = |a: usize, sa: f64, b: usize, sb: f64| {
        let mut p = z.to_vec();
        p[a / 2] += step(a) * sa;
        p[b / 2] += step(b) * sb;
        f(&p)
    };
    let second = |a: usize, b: usize| {
        (at(a, 1.0, b, 1.0) - at(a, 1.0, b, -1.0) - at(a, -1.0, b, 1.0) + at(a, -1.0, b, -1.0)) / (4.0 * h * h)
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
                    Complex64::new(
                        0.25 * (second(xi, xj) + second(yi, yj)),
                        0.25 * (second(xi, yj) - second(yi, xj)),
                    )
                })
                .collect()
        })
        .collect()
}
