//! Stabilizer Rényi entropies and related bounds.
//!
//! All logarithms are base 2. For mixed states the purity-corrected
//! `M2~ = M2 - S2` is used as a magic proxy; it is not a monotone.

use crate::error::{Error, Result};
use crate::qubit::{pauli_trace, BlochVector, DensityMatrix, DensityMatrix2, PauliString};

/// `log2(4/3)`, the SRE of the `|H>` state.
pub const M2_H: f64 = 0.415_037_499_278_843_8;
/// `log2(3/2)`, the SRE of the `|T>` state and the single-qubit maximum.
pub const M2_T: f64 = 0.584_962_500_721_156_2;

fn pauli_spectrum(rho: &DensityMatrix) -> impl Iterator<Item = f64> + '_ {
    PauliString::all(rho.qubits()).map(move |mu| pauli_trace(rho.matrix(), &mu).re)
}

/// `M_alpha = log2[2^-L sum_mu |<sigma_mu, rho>|^(2 alpha)] / (1 - alpha)`.
pub fn sre_alpha(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    let norm = (rho.dim() as f64).recip();
    let sum: f64 = pauli_spectrum(rho).map(|c| c.abs().powf(2.0 * alpha)).sum();
    Ok((sum * norm).log2() / (1.0 - alpha))
}

/// `S2 = -log2 Tr(rho^2)`.
pub fn renyi2(rho: &DensityMatrix) -> f64 {
    -rho.purity().log2()
}

/// Single-qubit `M2~` from Bloch coordinates.
pub fn m2_tilde_bloch(r: BlochVector) -> f64 {
    let (x2, y2, z2) = (r.x * r.x, r.y * r.y, r.z * r.z);
    -((1.0 + x2 * x2 + y2 * y2 + z2 * z2) / (1.0 + x2 + y2 + z2)).log2()
}

/// `M2~ = -log2[sum c^4 / sum c^2]` over the full Pauli spectrum.
pub fn m2_tilde_generic(rho: &DensityMatrix) -> f64 {
    let (quartic, quadratic) = pauli_spectrum(rho).fold((0.0, 0.0), |(q4, q2), c| {
        let c2 = c * c;
        (q4 + c2 * c2, q2 + c2)
    });
    -(quartic / quadratic).log2()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SreBounds {
    /// `S2(rho) + 1`.
    pub entropy_bound: f64,
    /// `log2(3/2)`.
    pub universal_bound: f64,
}

impl SreBounds {
    pub fn tightest(&self) -> f64 {
        self.entropy_bound.min(self.universal_bound)
    }
}

pub fn sre_upper_bounds(rho: &DensityMatrix2) -> SreBounds {
    SreBounds {
        entropy_bound: 1.0 - rho.purity().log2(),
        universal_bound: M2_T,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{bloch_to_density, PureState2};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn dm(r: BlochVector) -> DensityMatrix {
        DensityMatrix::from(bloch_to_density(r).unwrap())
    }

    fn h_state() -> BlochVector {
        BlochVector::new(0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    }

    fn t_state() -> BlochVector {
        let s = 3f64.sqrt().recip();
        BlochVector::new(s, -s, s)
    }

    #[test]
    fn constants() {
        assert_abs_diff_eq!(M2_H, (4.0f64 / 3.0).log2(), epsilon = 1e-16);
        assert_abs_diff_eq!(M2_T, 1.5f64.log2(), epsilon = 1e-16);
    }

    #[test]
    fn sre_of_reference_states() {
        let zero = dm(BlochVector::new(0.0, 0.0, 1.0));
        assert_abs_diff_eq!(sre_alpha(&zero, 2.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sre_alpha(&dm(h_state()), 2.0).unwrap(), M2_H, epsilon = 1e-14);
        let product = dm(h_state()).tensor(&zero).unwrap();
        assert_abs_diff_eq!(sre_alpha(&product, 2.0).unwrap(), M2_H, epsilon = 1e-14);
    }

    #[test]
    fn alpha_validation() {
        let rho = dm(h_state());
        for bad in [1.0, 0.0, -2.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(sre_alpha(&rho, bad), Err(Error::InvalidAlpha(_))));
        }
        assert!(sre_alpha(&rho, 0.5).unwrap() > 0.0);
        assert!(sre_alpha(&rho, 3.0).unwrap() > 0.0);
    }

    #[test]
    fn renyi2_values() {
        assert_abs_diff_eq!(renyi2(&dm(h_state())), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(renyi2(&DensityMatrix::maximally_mixed(1).unwrap()), 1.0, epsilon = 1e-15);
        let half = dm(BlochVector::new(0.0, 0.0, 0.5));
        assert_abs_diff_eq!(renyi2(&half), -(5.0f64 / 8.0).log2(), epsilon = 1e-15);
    }

    #[test]
    fn bloch_form_values() {
        assert_eq!(m2_tilde_bloch(BlochVector::ORIGIN), 0.0);
        assert_abs_diff_eq!(m2_tilde_bloch(h_state()), M2_H, epsilon = 1e-15);
        assert_abs_diff_eq!(m2_tilde_bloch(t_state()), M2_T, epsilon = 1e-15);
    }

    #[test]
    fn generic_matches_bloch_form_and_bell_is_free() {
        let r = BlochVector::new(0.3, 0.0, 0.4);
        assert_abs_diff_eq!(m2_tilde_generic(&dm(r)), m2_tilde_bloch(r), epsilon = 1e-14);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let bell = DensityMatrix::from_pure(&[h, z, z, h]).unwrap();
        assert_abs_diff_eq!(m2_tilde_generic(&bell), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m2_tilde_generic(&dm(t_state())), M2_T, epsilon = 1e-14);
    }

    #[test]
    fn stabilizer_states_are_free() {
        let axes = [
            (1.0, 0.0, 0.0),
            (-1.0, 0.0, 0.0),
            (0.0, 1.0, 0.0),
            (0.0, -1.0, 0.0),
            (0.0, 0.0, 1.0),
            (0.0, 0.0, -1.0),
        ];
        for (x, y, z) in axes {
            assert_eq!(m2_tilde_bloch(BlochVector::new(x, y, z)), 0.0);
        }
    }

    #[test]
    fn bounds_for_pure_and_mixed() {
        let pure = PureState2::plus().density();
        let b = sre_upper_bounds(&pure);
        assert_abs_diff_eq!(b.entropy_bound, 1.0, epsilon = 1e-15);
        assert_eq!(b.universal_bound, M2_T);
        let mixed = sre_upper_bounds(&DensityMatrix2::maximally_mixed());
        assert_abs_diff_eq!(mixed.entropy_bound, 2.0, epsilon = 1e-15);
        assert!(m2_tilde_bloch(BlochVector::ORIGIN) <= mixed.tightest());
    }

    fn ball_point() -> impl Strategy<Value = BlochVector> {
        (0.0..1.0f64, -1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(u, cos_t, phi)| {
            let rad = u.cbrt();
            let sin_t = (1.0 - cos_t * cos_t).sqrt();
            BlochVector::new(rad * sin_t * phi.cos(), rad * sin_t * phi.sin(), rad * cos_t)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn generic_equals_bloch(r in ball_point()) {
            let rho = dm(r);
            prop_assert!((m2_tilde_generic(&rho) - m2_tilde_bloch(r)).abs() <= 1e-12);
            let split = sre_alpha(&rho, 2.0).unwrap() - renyi2(&rho);
            prop_assert!((split - m2_tilde_generic(&rho)).abs() <= 1e-12);
        }

        #[test]
        fn bounded_by_both_bounds(r in ball_point()) {
            let m = m2_tilde_bloch(r);
            let b = sre_upper_bounds(&bloch_to_density(r).unwrap());
            prop_assert!(m >= 0.0);
            prop_assert!(m <= b.entropy_bound + 1e-12);
            prop_assert!(m <= b.universal_bound + 1e-12);
        }

        #[test]
        fn invariant_under_axis_permutations(r in ball_point(), perm in 0usize..6, signs in 0u8..8) {
            // the 24 single-qubit Cliffords act as signed axis permutations with det +1
            let a = r.to_array();
            let p = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]][perm];
            let mut s = [1.0, 1.0, 1.0];
            for (k, sk) in s.iter_mut().enumerate() {
                if signs >> k & 1 == 1 {
                    *sk = -1.0;
                }
            }
            let parity = if perm < 3 { 1.0 } else { -1.0 };
            if s[0] * s[1] * s[2] * parity < 0.0 {
                s[2] = -s[2];
            }
            let q = BlochVector::new(s[0] * a[p[0]], s[1] * a[p[1]], s[2] * a[p[2]]);
            prop_assert!((m2_tilde_bloch(q) - m2_tilde_bloch(r)).abs() <= 1e-14);
        }
    }
}
