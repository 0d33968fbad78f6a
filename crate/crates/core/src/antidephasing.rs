//! Noise-averaged dynamics of the stochastic dissipative qubit.
//!
//! The decay rate fluctuates as `Gamma (1 + sqrt(2 gamma) xi_t)` with white
//! noise `xi_t`. Averaging over the noise gives the non-trace-preserving
//! generator
//!
//! ```text
//! L[rho] = -i [H0, rho] - {L, rho} + gamma {L, {L, rho}},   L = Gamma |e><e|
//! ```
//!
//! whose dominant right eigenvector, once normalized, is the steady state.
//! Superoperators act on the vectorization `(rho_ff, rho_fe, rho_ef, rho_ee)`.
//! With `A = Gamma (gamma Gamma - 1)` and `B = 2 Gamma (2 gamma Gamma - 1)`
//! the characteristic polynomial factors as
//! `(A - l)(l^3 - (A + B) l^2 + (4 |U|^2 + A B) l - 2 |U|^2 B)`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::{cardano, eval_cubic};
use crate::error::{invalid, Error, Result};
use crate::magic::m2_tilde_bloch;
use crate::qubit::BlochVector;

/// Relative threshold below which two eigenvalues count as tied.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Norm excess of the averaged Bloch vector that aborts integration.
pub const ODE_NORM_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hopping {
    /// `U = J`.
    Real,
    /// `U = (1 - i) J / sqrt(2)`.
    Complex,
}

impl Hopping {
    /// `(Jx, Jy)` in units of `J`.
    pub fn components(self) -> (f64, f64) {
        match self {
            Hopping::Real => (1.0, 0.0),
            Hopping::Complex => (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        }
    }

    pub fn upsilon(self) -> Complex64 {
        let (jx, jy) = self.components();
        Complex64::new(jx, -jy)
    }

    /// `|U|^2 / J^2`, exactly one for both cases.
    pub fn coupling_sq(self) -> f64 {
        1.0
    }
}

impl std::fmt::Display for Hopping {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Hopping::Real => "real",
            Hopping::Complex => "complex",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdqParams {
    pub hopping: Hopping,
    /// `Gamma / J`.
    pub gamma_decay: f64,
    /// `gamma J`.
    pub noise: f64,
}

impl SdqParams {
    pub fn new(hopping: Hopping, gamma_decay: f64, noise: f64) -> Result<Self> {
        if !(gamma_decay.is_finite() && gamma_decay >= 0.0) {
            return Err(invalid("gamma_decay", format!("{gamma_decay} must be finite and >= 0")));
        }
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(invalid("noise", format!("{noise} must be finite and >= 0")));
        }
        Ok(Self {
            hopping,
            gamma_decay,
            noise,
        })
    }

    pub fn liouville_a(&self) -> f64 {
        self.gamma_decay * (self.noise * self.gamma_decay - 1.0)
    }

    pub fn liouville_b(&self) -> f64 {
        2.0 * self.gamma_decay * (2.0 * self.noise * self.gamma_decay - 1.0)
    }

    /// Drift constant `b = 2 Gamma (1 - 2 gamma Gamma) = -B` of the Bloch equations.
    pub fn drift_b(&self) -> f64 {
        -self.liouville_b()
    }

    /// `gamma Gamma^2`, the dephasing-like rate of the coherences.
    pub fn gamma_gamma2(&self) -> f64 {
        self.noise * self.gamma_decay * self.gamma_decay
    }

    /// `true` once `Gamma > 1 / (2 gamma)`.
    pub fn is_noise_induced(&self) -> bool {
        2.0 * self.noise * self.gamma_decay > 1.0
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn build_liouvillian(p: &SdqParams) -> Matrix4<Complex64> {
    let u = p.hopping.upsilon();
    let i = c(0.0, 1.0);
    let a = c(p.liouville_a(), 0.0);
    let b = c(p.liouville_b(), 0.0);
    let z = c(0.0, 0.0);
    Matrix4::new(
        z, i * u.conj(), -i * u, z,
        i * u, a, z, -i * u,
        -i * u.conj(), z, a, i * u.conj(),
        z, -i * u.conj(), i * u, b,
    )
}

/// Direct application of the averaged generator to a 2x2 operator.
pub fn apply_superoperator(p: &SdqParams, rho: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let u = p.hopping.upsilon();
    let h0 = [[c(0.0, 0.0), u], [u.conj(), c(0.0, 0.0)]];
    let l = [[c(0.0, 0.0); 2], [c(0.0, 0.0), c(p.gamma_decay, 0.0)]];
    let mul = |x: &[[Complex64; 2]; 2], y: &[[Complex64; 2]; 2]| {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                out[r][s] = x[r][0] * y[0][s] + x[r][1] * y[1][s];
            }
        }
        out
    };
    let combine = |x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2], sign: f64| {
        let mut out = x;
        for r in 0..2 {
            for s in 0..2 {
                out[r][s] += sign * y[r][s];
            }
        }
        out
    };
    let comm = combine(mul(&h0, &rho), mul(&rho, &h0), -1.0);
    let anti = combine(mul(&l, &rho), mul(&rho, &l), 1.0);
    let anti2 = combine(mul(&l, &anti), mul(&anti, &l), 1.0);
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            out[r][s] = c(0.0, -1.0) * comm[r][s] - anti[r][s] + p.noise * anti2[r][s];
        }
    }
    out
}

/// Spectral data of the averaged generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiouvillianAnalysis {
    /// `lambda[0]` has the largest real part; the rest follow by descending
    /// real part, ties by descending imaginary part.
    pub lambda: [Complex64; 4],
    /// `min_{k>0} Re(lambda_0 - lambda_k)`, zero when degenerate.
    pub gap: f64,
    /// Another eigenvalue shares the real part of `lambda_0`.
    pub degenerate: bool,
    /// All eigenvalues tied with `lambda_0` coincide with it (a defective point).
    pub coalesced: bool,
    pub liouville_a: f64,
    pub liouville_b: f64,
    /// Largest `|p(lambda)|` of the characteristic polynomial over the four roots.
    pub residual: f64,
    /// `None` when the dominant mode oscillates.
    pub steady_bloch: Option<BlochVector>,
}

fn cubic_coefficients(p: &SdqParams) -> (Complex64, Complex64, Complex64) {
    let (a, b) = (p.liouville_a(), p.liouville_b());
    let u2 = p.hopping.coupling_sq();
    (c(-(a + b), 0.0), c(4.0 * u2 + a * b, 0.0), c(-2.0 * u2 * b, 0.0))
}

/// `det(L - lambda)` in factored form.
pub fn characteristic_polynomial(p: &SdqParams, lambda: Complex64) -> Complex64 {
    let (a2, a1, a0) = cubic_coefficients(p);
    (c(p.liouville_a(), 0.0) - lambda) * eval_cubic(lambda, a2, a1, a0)
}

fn sort_eigenvalues(v: &mut [Complex64]) {
    v.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
}

pub fn liouvillian_spectrum(p: &SdqParams) -> LiouvillianAnalysis {
    let (a2, a1, a0) = cubic_coefficients(p);
    let roots = cardano(a2, a1, a0);
    let a = p.liouville_a();
    let b = p.liouville_b();
    let mut lambda = [roots[0], roots[1], roots[2], c(a, 0.0)];
    sort_eigenvalues(&mut lambda);

    let scale = lambda.iter().map(|l| l.norm()).fold(1.0, f64::max);
    let thr = DEGENERACY_TOL * scale;
    let ties: Vec<Complex64> = lambda[1..]
        .iter()
        .copied()
        .filter(|l| (lambda[0].re - l.re).abs() < thr)
        .collect();
    let degenerate = !ties.is_empty();
    let coalesced = degenerate && ties.iter().all(|l| (l - lambda[0]).norm() < thr);
    let gap = if degenerate {
        0.0
    } else {
        lambda[1..]
            .iter()
            .map(|l| lambda[0].re - l.re)
            .fold(f64::INFINITY, f64::min)
    };
    let residual = lambda
        .iter()
        .map(|&l| characteristic_polynomial(p, l).norm())
        .fold(0.0, f64::max);

    let lambda0 = lambda[0].re;
    let steady_bloch = if !degenerate {
        Some(steady_from_eigenvalue(p, lambda0, false))
    } else if coalesced {
        Some(steady_from_eigenvalue(p, lambda0, true))
    } else {
        None
    };

    LiouvillianAnalysis {
        lambda,
        gap,
        degenerate,
        coalesced,
        liouville_a: a,
        liouville_b: b,
        residual,
        steady_bloch,
    }
}

/// Normalized dominant eigenvector. For a defective `lambda_0 = A` the
/// coherence is fixed by the population rows instead of the coherence row.
fn steady_from_eigenvalue(p: &SdqParams, lambda0: f64, defective: bool) -> BlochVector {
    let u = p.hopping.upsilon();
    let u2 = p.hopping.coupling_sq();
    let a = p.liouville_a();
    let b = p.liouville_b();
    let (z, fe) = if defective {
        let z = if b != 0.0 { (b - 2.0 * lambda0) / b } else { 1.0 };
        (z, c(0.0, -lambda0 * (1.0 + z) / (4.0 * u2)) * u)
    } else {
        let d = lambda0 - a;
        let z = -lambda0 * d / (4.0 * u2 + lambda0 * d);
        (z, c(0.0, z / d) * u)
    };
    BlochVector::new(2.0 * fe.re, -2.0 * fe.im, z)
}

/// Numerical eigenvalues of the explicitly built generator, sorted like
/// [`LiouvillianAnalysis::lambda`].
pub fn numeric_eigenvalues(p: &SdqParams) -> Option<[Complex64; 4]> {
    let ev = build_liouvillian(p).eigenvalues()?;
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    sort_eigenvalues(&mut out);
    Some(out)
}

/// Largest deviation between two spectra after pairing roots.
///
/// Roots closer than `cluster` are grouped and compared through their mean,
/// which stays well conditioned where the generator is defective.
pub fn spectrum_distance(a: &[Complex64; 4], b: &[Complex64; 4], cluster: f64) -> f64 {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &x in a {
        match groups.iter_mut().find(|g| g.iter().any(|y| (x - y).norm() < cluster)) {
            Some(g) => g.push(x),
            None => groups.push(vec![x]),
        }
    }
    let mut assigned: Vec<Vec<Complex64>> = vec![Vec::new(); groups.len()];
    for &y in b {
        let k = groups
            .iter()
            .enumerate()
            .map(|(k, g)| (k, g.iter().map(|x| (x - y).norm()).fold(f64::INFINITY, f64::min)))
            .min_by(|l, r| l.1.total_cmp(&r.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        assigned[k].push(y);
    }
    let mut worst: f64 = 0.0;
    for (g, h) in groups.iter().zip(&assigned) {
        if g.len() != h.len() {
            return f64::INFINITY;
        }
        if g.len() == 1 {
            worst = worst.max((g[0] - h[0]).norm());
        } else {
            let mean = |v: &[Complex64]| v.iter().sum::<Complex64>() / v.len() as f64;
            worst = worst.max((mean(g) - mean(h)).norm());
        }
    }
    worst
}

pub fn steady_state(p: &SdqParams) -> Result<BlochVector> {
    liouvillian_spectrum(p).steady_bloch.ok_or(Error::DegenerateSteadyState)
}

/// Steady-state `M2~` from the dominant eigenvalue alone.
pub fn steady_sre(p: &SdqParams) -> Result<f64> {
    let an = liouvillian_spectrum(p);
    let r = an.steady_bloch.ok_or(Error::DegenerateSteadyState)?;
    if an.coalesced {
        return Ok(m2_tilde_bloch(r));
    }
    let l0 = an.lambda[0].re;
    let d = l0 - an.liouville_a;
    Ok(match p.hopping {
        Hopping::Real => {
            let den = 4.0 + l0 * d;
            let quartic = l0.powi(4) * (d.powi(4) + 16.0) / den.powi(4);
            let quadratic = l0 * l0 * (d * d + 4.0) / (den * den);
            -((1.0 + quartic) / (1.0 + quadratic)).log2()
        }
        Hopping::Complex => {
            let b = an.liouville_b;
            let z = if b.abs() >= 1e-3 {
                (b - 2.0 * l0) / b
            } else {
                -l0 * d / (4.0 + l0 * d)
            };
            let quartic = z.powi(4) * (1.0 + 8.0 / d.powi(4));
            let quadratic = z * z * (1.0 + 4.0 / (d * d));
            -((1.0 + quartic) / (1.0 + quadratic)).log2()
        }
    })
}

/// Drift of the averaged Bloch equations.
pub fn bloch_drift(p: &SdqParams, r: [f64; 3]) -> [f64; 3] {
    let (jx, jy) = p.hopping.components();
    let [x, y, z] = r;
    let b = p.drift_b();
    let damp = p.gamma_gamma2() + z * b / 2.0;
    [
        2.0 * jy * z - damp * x,
        -2.0 * jx * z - damp * y,
        2.0 * (jx * y - jy * x) - b / 2.0 * (z * z - 1.0),
    ]
}

/// `|(dy/dt, dz/dt)|` of the averaged flow, used for streamline plots.
pub fn yz_speed(p: &SdqParams, r: [f64; 3]) -> f64 {
    let d = bloch_drift(p, r);
    d[1].hypot(d[2])
}

/// Largest RK4 step used by [`evolve_average`].
pub fn ode_step(p: &SdqParams) -> f64 {
    0.01f64.min(0.1 / p.gamma_decay.max(1.0))
}

fn rk4(p: &SdqParams, r: [f64; 3], h: f64) -> [f64; 3] {
    let add = |a: [f64; 3], k: [f64; 3], s: f64| [a[0] + s * k[0], a[1] + s * k[1], a[2] + s * k[2]];
    let k1 = bloch_drift(p, r);
    let k2 = bloch_drift(p, add(r, k1, h / 2.0));
    let k3 = bloch_drift(p, add(r, k2, h / 2.0));
    let k4 = bloch_drift(p, add(r, k3, h));
    let mut out = r;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate the averaged Bloch equations with fixed-step RK4, sampling at `t_grid`.
pub fn evolve_average(p: &SdqParams, r0: BlochVector, t_grid: &[f64]) -> Result<Vec<BlochVector>> {
    match t_grid.first() {
        Some(&0.0) => {}
        _ => return Err(invalid("t_grid", "must start at 0")),
    }
    if t_grid.windows(2).any(|w| !(w[1] >= w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(invalid("t_grid", "must be finite and ascending"));
    }
    let h_max = ode_step(p);
    let mut r = r0.to_array();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut step = 0usize;
    out.push(r0);
    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        if span > 0.0 {
            let n = (span / h_max).ceil().max(1.0) as usize;
            let h = span / n as f64;
            if h <= f64::EPSILON * w[1].abs().max(1.0) {
                return Err(Error::StepUnderflow(h));
            }
            for _ in 0..n {
                r = rk4(p, r, h);
                step += 1;
                let norm = BlochVector::from_array(r).norm();
                if !norm.is_finite() {
                    return Err(Error::StepDiverged { trajectory: 0, step });
                }
                if norm > 1.0 + ODE_NORM_TOL {
                    return Err(Error::NormViolation {
                        trajectory: 0,
                        step,
                        norm,
                    });
                }
            }
        }
        out.push(BlochVector::from_array(r));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magic::{M2_H, M2_T};
    use crate::nh::{self, DqParams};
    use crate::qubit::{bloch_to_density, density_to_bloch, PureState2};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn real(g: f64, n: f64) -> SdqParams {
        SdqParams::new(Hopping::Real, g, n).unwrap()
    }

    fn cplx(g: f64, n: f64) -> SdqParams {
        SdqParams::new(Hopping::Complex, g, n).unwrap()
    }

    fn basis(k: usize) -> [[Complex64; 2]; 2] {
        let mut m = [[c(0.0, 0.0); 2]; 2];
        m[k / 2][k % 2] = c(1.0, 0.0);
        m
    }

    #[test]
    fn matrix_matches_superoperator() {
        for p in [real(2.0 * SQRT_2, 0.0), real(3.1, 0.07), cplx(1.3, 0.2), cplx(0.0, 0.0)] {
            let l = build_liouvillian(&p);
            for col in 0..4 {
                let img = apply_superoperator(&p, basis(col));
                for row in 0..4 {
                    assert!((l[(row, col)] - img[row / 2][row % 2]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn printed_entries() {
        let l = build_liouvillian(&real(2.0 * SQRT_2, 0.0));
        assert_abs_diff_eq!(l[(1, 1)].re, -2.0 * SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(l[(3, 3)].re, -4.0 * SQRT_2, epsilon = 1e-14);
        assert_eq!(l[(0, 1)], c(0.0, 1.0));
        assert_eq!(l[(0, 2)], c(0.0, -1.0));
        let l = build_liouvillian(&cplx(1.0, 0.0));
        let phase = |k: f64| Complex64::from_polar(1.0, k * std::f64::consts::FRAC_PI_4);
        assert!((l[(0, 1)] - phase(3.0)).norm() < 1e-14);
        assert!((l[(0, 2)] - phase(-3.0)).norm() < 1e-14);
        assert!((l[(1, 0)] - phase(1.0)).norm() < 1e-14);
        assert!((l[(1, 3)] - phase(-3.0)).norm() < 1e-14);
    }

    #[test]
    fn unitary_limit() {
        let an = liouvillian_spectrum(&real(0.0, 0.0));
        let mut im: Vec<f64> = an.lambda.iter().map(|l| l.im).collect();
        im.sort_by(f64::total_cmp);
        for (got, want) in im.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert!(an.lambda.iter().all(|l| l.re.abs() < 1e-12));
        assert!(an.degenerate);
    }

    #[test]
    fn h_optimum_spectrum() {
        let an = liouvillian_spectrum(&real(2.0 * SQRT_2, 0.0));
        let want = [2.0 - 2.0 * SQRT_2, -2.0 * SQRT_2, -2.0 * SQRT_2, -2.0 - 2.0 * SQRT_2];
        for (l, w) in an.lambda.iter().zip(want) {
            assert!((l - c(w, 0.0)).norm() < 1e-7);
        }
        assert_abs_diff_eq!(an.gap, 2.0, epsilon = 1e-12);
        let r = an.steady_bloch.unwrap();
        assert!(r.distance(BlochVector::new(0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2)) < 1e-12);
        assert_abs_diff_eq!(steady_sre(&real(2.0 * SQRT_2, 0.0)).unwrap(), M2_H, epsilon = 1e-12);
    }

    #[test]
    fn t_optimum_spectrum() {
        let p = cplx(6f64.sqrt(), 0.0);
        let an = liouvillian_spectrum(&p);
        assert_abs_diff_eq!(an.lambda[0].re, -(6f64.sqrt() - SQRT_2), epsilon = 1e-12);
        assert_abs_diff_eq!(an.gap, SQRT_2, epsilon = 1e-12);
        let s = 3f64.sqrt().recip();
        assert!(an.steady_bloch.unwrap().distance(BlochVector::new(s, -s, s)) < 1e-12);
        assert_abs_diff_eq!(steady_sre(&p).unwrap(), M2_T, epsilon = 1e-12);
    }

    #[test]
    fn exceptional_point() {
        let an = liouvillian_spectrum(&real(2.0, 0.0));
        for l in an.lambda {
            assert!((l - c(-2.0, 0.0)).norm() < 1e-12);
        }
        assert!(an.degenerate && an.coalesced);
        assert_eq!(an.gap, 0.0);
        let r = an.steady_bloch.unwrap();
        assert!(r.distance(BlochVector::new(0.0, -1.0, 0.0)) < 1e-12);
        assert_abs_diff_eq!(steady_sre(&real(2.0, 0.0)).unwrap(), 0.0, epsilon = 1e-12);
        let rc = steady_state(&cplx(2.0, 0.0)).unwrap();
        assert!(rc.distance(BlochVector::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0)) < 1e-12);
    }

    #[test]
    fn oscillating_phase_has_no_steady_state() {
        assert_eq!(steady_state(&real(1.0, 0.0)), Err(Error::DegenerateSteadyState));
        assert_eq!(steady_sre(&cplx(1.5, 0.0)), Err(Error::DegenerateSteadyState));
    }

    #[test]
    fn noise_induced_boundary() {
        for g in [1.0, 2.5, 5.0] {
            let p = real(g, 0.5 / g);
            let an = liouvillian_spectrum(&p);
            assert_eq!(an.liouville_b, 0.0);
            assert_abs_diff_eq!(an.lambda[0].re, 0.0, epsilon = 1e-12);
            assert!(an.steady_bloch.unwrap().norm() < 1e-12);
            let q = cplx(g, 0.5 / g);
            assert_abs_diff_eq!(steady_sre(&q).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn noisy_optimum_value() {
        let v = steady_sre(&real(3.599, 0.065)).unwrap();
        assert!((v - 0.450).abs() < 0.005, "{v}");
    }

    #[test]
    fn reduces_to_nh_rate_without_noise() {
        for g in [2.1, 2.5, 3.0, 5.0, 7.9] {
            let an = liouvillian_spectrum(&real(g, 0.0));
            let s = nh::nh_spectrum(&DqParams::real_hopping(g).unwrap());
            assert_abs_diff_eq!(an.lambda[0].re, 2.0 * s.eps_plus.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn grid_checks() {
        for i in 0..40 {
            let noise = 0.3 * i as f64 / 39.0;
            for j in 1..=40 {
                let g = 8.0 * j as f64 / 40.0;
                let (pr, pc) = (real(g, noise), cplx(g, noise));
                let (ar, ac) = (liouvillian_spectrum(&pr), liouvillian_spectrum(&pc));
                let scale = ar.lambda.iter().map(|l| l.norm()).fold(1.0, f64::max);
                assert!(ar.residual < 1e-9 * scale.powi(4), "residual {} at {noise},{g}", ar.residual);
                assert!(spectrum_distance(&ar.lambda, &ac.lambda, 1e-4) < 1e-12);
                for (p, an) in [(pr, ar), (pc, ac)] {
                    let num = numeric_eigenvalues(&p).unwrap();
                    let d = spectrum_distance(&an.lambda, &num, 1e-4);
                    assert!(d < 1e-9, "{p:?}: {d}");
                    if let (Some(r), Ok(m)) = (an.steady_bloch, steady_sre(&p)) {
                        assert!((m - m2_tilde_bloch(r)).abs() < 1e-10, "{p:?}");
                        assert!(r.norm() <= 1.0 + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn steady_vector_is_right_eigenvector() {
        for p in [real(3.6, 0.065), cplx(2.4, 0.1), real(6.0, 0.2), cplx(7.5, 0.3)] {
            let an = liouvillian_spectrum(&p);
            let rho = bloch_to_density(an.steady_bloch.unwrap()).unwrap().entries();
            let img = apply_superoperator(&p, rho);
            for r in 0..2 {
                for s in 0..2 {
                    assert!((img[r][s] - an.lambda[0] * rho[r][s]).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn averaged_flow_matches_nh_without_noise() {
        let p = real(2.5, 0.0);
        let dq = DqParams::real_hopping(2.5).unwrap();
        let grid: Vec<f64> = (0..=40).map(|k| 0.1 * k as f64).collect();
        let r0 = PureState2::plus().bloch();
        let path = evolve_average(&p, r0, &grid).unwrap();
        for (t, r) in grid.iter().zip(path) {
            let want = density_to_bloch(&nh::evolve_density(&dq, &PureState2::plus().density(), *t).unwrap());
            assert!(r.distance(want) < 1e-8, "t={t}");
        }
    }

    #[test]
    fn fixed_point_and_convergence() {
        let p = real(3.6, 0.065);
        let an = liouvillian_spectrum(&p);
        let r = an.steady_bloch.unwrap();
        let horizon = 10.0 / an.gap;
        let path = evolve_average(&p, r, &[0.0, horizon]).unwrap();
        assert!(path[1].distance(r) < 1e-8);

        let p = real(2.8, 0.01);
        let an = liouvillian_spectrum(&p);
        let path = evolve_average(&p, BlochVector::ORIGIN, &[0.0, 5.0 / an.gap, 20.0 / an.gap]).unwrap();
        assert!(path[1].distance(an.steady_bloch.unwrap()) < 1e-2);
        assert!(path[2].distance(an.steady_bloch.unwrap()) < 1e-6);
    }

    #[test]
    fn grid_validation() {
        let p = real(2.8, 0.01);
        assert!(evolve_average(&p, BlochVector::ORIGIN, &[]).is_err());
        assert!(evolve_average(&p, BlochVector::ORIGIN, &[0.5, 1.0]).is_err());
        assert!(evolve_average(&p, BlochVector::ORIGIN, &[0.0, 2.0, 1.0]).is_err());
        assert!(SdqParams::new(Hopping::Real, -1.0, 0.0).is_err());
        assert!(SdqParams::new(Hopping::Real, 1.0, f64::NAN).is_err());
    }
}
