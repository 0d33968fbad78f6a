//! Closed-form roots of monic cubics with complex coefficients.

use num_complex::Complex64;

/// Roots of `x^3 + a2 x^2 + a1 x + a0` by Cardano's method.
///
/// The cube root is taken on the larger of the two resolvent branches and
/// the second Cardano term is recovered as `-p / (3u)`, which avoids the
/// cancellation of the textbook form. Each root then receives one Newton
/// correction, kept only if it lowers the residual.
pub fn cardano(a2: Complex64, a1: Complex64, a0: Complex64) -> [Complex64; 3] {
    let shift = a2 / 3.0;
    let p = a1 - a2 * shift;
    let q = 2.0 * shift * shift * shift - shift * a1 + a0;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let (c1, c2) = (-q / 2.0 + disc, -q / 2.0 - disc);
    let cube = if c1.norm() >= c2.norm() { c1 } else { c2 };

    let zero = Complex64::new(0.0, 0.0);
    let t = if cube.norm() == 0.0 {
        [zero; 3]
    } else {
        let u = cube.cbrt();
        let v = -p / (3.0 * u);
        let w = Complex64::new(-0.5, 0.75f64.sqrt());
        let w2 = w.conj();
        [u + v, w * u + w2 * v, w2 * u + w * v]
    };
    t.map(|r| polish(r - shift, a2, a1, a0))
}

/// `x^3 + a2 x^2 + a1 x + a0`.
pub fn eval_cubic(x: Complex64, a2: Complex64, a1: Complex64, a0: Complex64) -> Complex64 {
    ((x + a2) * x + a1) * x + a0
}

fn polish(x: Complex64, a2: Complex64, a1: Complex64, a0: Complex64) -> Complex64 {
    let f = eval_cubic(x, a2, a1, a0);
    let df = (3.0 * x + 2.0 * a2) * x + a1;
    if df.norm() == 0.0 {
        return x;
    }
    let y = x - f / df;
    if y.is_finite() && eval_cubic(y, a2, a1, a0).norm() < f.norm() {
        y
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(r: [Complex64; 3]) -> (Complex64, Complex64, Complex64) {
        (
            -(r[0] + r[1] + r[2]),
            r[0] * r[1] + r[1] * r[2] + r[0] * r[2],
            -(r[0] * r[1] * r[2]),
        )
    }

    fn assert_same_roots(got: [Complex64; 3], want: [Complex64; 3], tol: f64) {
        let mut used = [false; 3];
        for g in got {
            let (k, d) = want
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, w)| (k, (g - w).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < tol, "{got:?} vs {want:?}");
            used[k] = true;
        }
    }

    #[test]
    fn simple_factored_cubics() {
        for roots in [
            [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
            [c(-1.0, 0.0), c(0.5, 2.0), c(0.5, -2.0)],
            [c(0.0, 1.0), c(-3.0, 0.2), c(4.0, -1.0)],
        ] {
            let (a2, a1, a0) = from_roots(roots);
            assert_same_roots(cardano(a2, a1, a0), roots, 1e-12);
        }
    }

    #[test]
    fn triple_and_double_roots() {
        let (a2, a1, a0) = from_roots([c(-2.0, 0.0); 3]);
        assert_same_roots(cardano(a2, a1, a0), [c(-2.0, 0.0); 3], 1e-14);
        let roots = [c(1.5, 0.0), c(1.5, 0.0), c(-0.25, 0.0)];
        let (a2, a1, a0) = from_roots(roots);
        assert_same_roots(cardano(a2, a1, a0), roots, 1e-7);
    }

    proptest! {
        #[test]
        fn residuals_are_small(
            re in proptest::array::uniform3(-5.0..5.0f64),
            im in proptest::array::uniform3(-5.0..5.0f64),
        ) {
            let roots = [c(re[0], im[0]), c(re[1], im[1]), c(re[2], im[2])];
            let (a2, a1, a0) = from_roots(roots);
            let scale = 1.0 + a2.norm() + a1.norm() + a0.norm();
            for r in cardano(a2, a1, a0) {
                let res = eval_cubic(r, a2, a1, a0).norm();
                let size = 1.0 + r.norm().powi(3);
                prop_assert!(res <= 1e-12 * scale * size, "residual {res}");
            }
        }
    }
}
