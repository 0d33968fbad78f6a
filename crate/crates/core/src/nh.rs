//! Deterministic dissipative qubit
//!
//! `H = Jx sx + Jy sy + (delta - i Gamma) |e><e|`, i.e. in the `(|f>, |e>)`
//! basis `H = [[0, U], [U*, delta - i Gamma]]` with `U = Jx - i Jy`.
//! Rates are measured in units of the hopping `J`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::magic::m2_tilde_bloch;
use crate::qubit::{BlochVector, DensityMatrix2, PureState2};

/// Relative width of the window in which the two eigenvalues count as coalesced.
pub const EP_WINDOW: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DqParams {
    pub jx: f64,
    pub jy: f64,
    pub delta: f64,
    pub gamma_decay: f64,
}

impl DqParams {
    pub fn new(jx: f64, jy: f64, delta: f64, gamma_decay: f64) -> Result<Self> {
        for (field, v) in [("jx", jx), ("jy", jy), ("delta", delta), ("gamma_decay", gamma_decay)] {
            if !v.is_finite() {
                return Err(invalid(field, format!("{v} is not finite")));
            }
        }
        if gamma_decay < 0.0 {
            return Err(invalid("gamma_decay", "decay rate must be >= 0"));
        }
        Ok(Self {
            jx,
            jy,
            delta,
            gamma_decay,
        })
    }

    /// `U = J`, no detuning.
    pub fn real_hopping(gamma_decay: f64) -> Result<Self> {
        Self::new(1.0, 0.0, 0.0, gamma_decay)
    }

    /// `U = (1 - i) J / sqrt(2)`, no detuning.
    pub fn complex_hopping(gamma_decay: f64) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(s, s, 0.0, gamma_decay)
    }

    /// `U = J` with detuning `delta`.
    pub fn detuned(delta: f64, gamma_decay: f64) -> Result<Self> {
        Self::new(1.0, 0.0, delta, gamma_decay)
    }

    pub fn upsilon(&self) -> Complex64 {
        Complex64::new(self.jx, -self.jy)
    }

    pub fn hamiltonian(&self) -> [[Complex64; 2]; 2] {
        let u = self.upsilon();
        [
            [Complex64::new(0.0, 0.0), u],
            [u.conj(), Complex64::new(self.delta, -self.gamma_decay)],
        ]
    }

    fn scale(&self) -> f64 {
        self.upsilon().norm().max(self.gamma_decay).max(self.delta.abs()).max(1.0)
    }
}

/// Eigen-decomposition of the 2x2 non-Hermitian Hamiltonian.
#[derive(Clone, Copy, Debug)]
pub struct NhSpectrum {
    /// Slowest-decaying eigenvalue, `Im(eps_plus) >= Im(eps_minus)`.
    pub eps_plus: Complex64,
    pub eps_minus: Complex64,
    pub psi_plus: PureState2,
    pub psi_minus: PureState2,
    pub is_exceptional: bool,
}

impl NhSpectrum {
    /// `Im(eps_plus) - Im(eps_minus)`.
    pub fn gap(&self) -> f64 {
        self.eps_plus.im - self.eps_minus.im
    }
}

pub fn nh_spectrum(p: &DqParams) -> NhSpectrum {
    let u = p.upsilon();
    let half_trace = Complex64::new(p.delta, -p.gamma_decay) * 0.5;
    let root = (u.norm_sqr() + half_trace * half_trace).sqrt();
    let (mut eps_plus, mut eps_minus) = (half_trace + root, half_trace - root);
    if eps_minus.im > eps_plus.im {
        std::mem::swap(&mut eps_plus, &mut eps_minus);
    }
    let is_exceptional = (eps_plus - eps_minus).norm() < EP_WINDOW * p.scale();
    let vector = |eps: Complex64, fallback: PureState2| {
        PureState2::new(u, eps).unwrap_or(fallback)
    };
    let (psi_plus, psi_minus) = if u.norm() == 0.0 {
        // uncoupled levels: |f> never decays, |e> decays at Gamma
        (PureState2::ground(), PureState2::excited())
    } else {
        (
            vector(eps_plus, PureState2::ground()),
            vector(eps_minus, PureState2::excited()),
        )
    };
    NhSpectrum {
        eps_plus,
        eps_minus,
        psi_plus,
        psi_minus,
        is_exceptional,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NhSteadyState {
    pub bloch: BlochVector,
    /// Set when the two eigenstates have coalesced; the vector is then
    /// the single remaining eigenstate.
    pub at_exceptional_point: bool,
}

/// Bloch vector of the slowest-decaying eigenstate.
pub fn steady_state_bloch(p: &DqParams) -> Result<NhSteadyState> {
    let spec = nh_spectrum(p);
    if !spec.is_exceptional && spec.gap() <= 1e-12 * p.scale() {
        return Err(Error::NoAttractor);
    }
    if spec.is_exceptional {
        log::warn!("steady state requested at an exceptional point: {p:?}");
    }
    let u = p.upsilon();
    let e = spec.eps_plus;
    let bloch = if u.norm() == 0.0 {
        spec.psi_plus.bloch()
    } else {
        let c = e.conj() * u;
        let n = u.norm_sqr() + e.norm_sqr();
        BlochVector::new(2.0 * c.re / n, -2.0 * c.im / n, (u.norm_sqr() - e.norm_sqr()) / n)
    };
    Ok(NhSteadyState {
        bloch,
        at_exceptional_point: spec.is_exceptional,
    })
}

/// SRE of the attractor eigenstate, evaluated from the spectrum.
pub fn steady_sre(p: &DqParams) -> Result<f64> {
    let spec = nh_spectrum(p);
    if !spec.is_exceptional && spec.gap() <= 1e-12 * p.scale() {
        return Err(Error::NoAttractor);
    }
    let u = p.upsilon();
    if u.norm() == 0.0 {
        return Ok(m2_tilde_bloch(spec.psi_plus.bloch()));
    }
    let c = spec.eps_plus.conj() * u;
    let n = u.norm_sqr() + spec.eps_plus.norm_sqr();
    let zn = u.norm_sqr() - spec.eps_plus.norm_sqr();
    let num = 16.0 * (c.re.powi(4) + c.im.powi(4)) + zn.powi(4);
    Ok(-(0.5 + num / (2.0 * n.powi(4))).log2())
}

fn log2_one_minus(u: f64) -> f64 {
    (-u).ln_1p() / std::f64::consts::LN_2
}

/// Closed form for `U = J`, `delta = 0`: `-log2(1 - 4 (G^2 - 4) / G^4)`.
pub fn sre_real_hopping_closed(gamma_decay: f64) -> f64 {
    let g2 = gamma_decay * gamma_decay;
    -log2_one_minus(4.0 * (g2 - 4.0) / (g2 * g2))
}

/// Closed form for `U = (1-i)J/sqrt(2)`, `delta = 0`: `-log2(1 - 4 (G^2 - 3) / G^4)`.
pub fn sre_complex_hopping_closed(gamma_decay: f64) -> f64 {
    let g2 = gamma_decay * gamma_decay;
    -log2_one_minus(4.0 * (g2 - 3.0) / (g2 * g2))
}

/// Large-decay asymptote `4 / (ln 2 Gamma^2)` of the real-hopping SRE.
pub fn sre_large_decay_asymptote(gamma_decay: f64) -> f64 {
    4.0 / (std::f64::consts::LN_2 * gamma_decay * gamma_decay)
}

/// Closed form for `U = J` with detuning, written with
/// `Omega_R + i Omega_I = sqrt(4 - (Gamma + i delta)^2)` (principal branch).
///
/// The ratio inside the logarithm is `(1 + x^4 + y^4 + z^4) / 2` of the
/// attractor, so the SRE is minus its logarithm.
pub fn sre_detuned_closed(delta: f64, gamma_decay: f64) -> f64 {
    let omega = (Complex64::new(4.0, 0.0) - Complex64::new(gamma_decay, delta).powi(2)).sqrt();
    let a = gamma_decay - omega.im;
    let b = delta + omega.re;
    let (a2, b2) = (a * a, b * b);
    let num = 128.0
        * (a2 * a2
            + (a2 - 4.0 + b2).powi(4) / 256.0
            + (a2 + 4.0 + b2).powi(4) / 256.0
            + b2 * b2);
    let den = (a2 + 4.0 + b2).powi(4);
    -(num / den).log2()
}

/// `exp(-i H t)` in a form that stays accurate through the exceptional point.
///
/// With `eps_pm = c +- s` and `K = H - c`, the propagator is
/// `e^{-i eps_plus t} [ (1 + e^w)/2 - i t phi(w) K ]`, `w = i (eps_plus - eps_minus) t`,
/// `phi(w) = (e^w - 1)/w`. `Re w <= 0`, so nothing grows.
pub fn propagator(p: &DqParams, t: f64) -> [[Complex64; 2]; 2] {
    let spec = nh_spectrum(p);
    let h = p.hamiltonian();
    let c = (h[0][0] + h[1][1]) * 0.5;
    let lead = (Complex64::new(0.0, -t) * spec.eps_plus).exp();
    let w = Complex64::new(0.0, t) * (spec.eps_plus - spec.eps_minus);
    let diag = (Complex64::new(1.0, 0.0) + w.exp()) * 0.5;
    let k_coef = Complex64::new(0.0, -t) * phi(w);
    [
        [lead * (diag + k_coef * (h[0][0] - c)), lead * k_coef * h[0][1]],
        [lead * k_coef * h[1][0], lead * (diag + k_coef * (h[1][1] - c))],
    ]
}

fn phi(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        let one = Complex64::new(1.0, 0.0);
        one + w * (one / 2.0 + w * (one / 6.0 + w * (one / 24.0 + w * (one / 120.0 + w / 720.0))))
    } else {
        (w.exp() - 1.0) / w
    }
}

fn apply(u: &[[Complex64; 2]; 2], f: Complex64, e: Complex64) -> (Complex64, Complex64) {
    (u[0][0] * f + u[0][1] * e, u[1][0] * f + u[1][1] * e)
}

/// Unnormalized evolution of a pure state; returns the normalized state
/// together with the success rate `<psi_t|psi_t>`.
pub fn evolve_pure(p: &DqParams, psi0: &PureState2, t: f64) -> Result<(PureState2, f64)> {
    if !(t >= 0.0) {
        return Err(invalid("t", "time must be >= 0"));
    }
    let u = propagator(p, t);
    let (f0, e0) = psi0.amplitudes();
    let (f, e) = apply(&u, f0, e0);
    let sr = f.norm_sqr() + e.norm_sqr();
    if !(sr > 1e-300) {
        return Err(Error::TraceUnderflow { t, trace: sr });
    }
    Ok((PureState2::new(f, e)?, sr))
}

/// `SR_t` for an initial pure state.
pub fn success_rate(p: &DqParams, psi0: &PureState2, t: f64) -> Result<f64> {
    evolve_pure(p, psi0, t).map(|(_, sr)| sr)
}

/// `rho_t = U rho_0 U^dagger / Tr(.)`.
pub fn evolve_density(p: &DqParams, rho0: &DensityMatrix2, t: f64) -> Result<DensityMatrix2> {
    if !(t >= 0.0) {
        return Err(invalid("t", "time must be >= 0"));
    }
    let u = propagator(p, t);
    let r = rho0.entries();
    let mut tmp = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            tmp[i][j] = u[i][0] * r[0][j] + u[i][1] * r[1][j];
        }
    }
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = tmp[i][0] * u[j][0].conj() + tmp[i][1] * u[j][1].conj();
        }
    }
    let trace = out[0][0].re + out[1][1].re;
    if !(trace > 1e-300) {
        return Err(Error::TraceUnderflow { t, trace });
    }
    DensityMatrix2::normalized(out)
}

/// Closed-form `M2~(t)` for real hopping, zero detuning, `Gamma > 2J`.
pub fn m2_analytic_broken(p: &DqParams, r0: BlochVector, t: f64) -> Result<f64> {
    if p.jy != 0.0 || p.delta != 0.0 {
        return Err(invalid("params", "closed form needs jy = 0 and delta = 0"));
    }
    let j = p.jx;
    let g = p.gamma_decay;
    let w2 = g * g - 4.0 * j * j;
    if !(w2 > 0.0) {
        return Err(invalid("gamma_decay", "closed form needs Gamma^2 - 4 J^2 > 0"));
    }
    if !(t >= 0.0) {
        return Err(invalid("t", "time must be >= 0"));
    }
    let w = w2.sqrt();
    let BlochVector { x, y, z } = r0;
    // the ratio is homogeneous of degree 4 in (f, h, k, x w^2); scale all by e^{-wt}
    let decay = (-w * t).exp();
    let ch = 0.5 * (1.0 + decay * decay);
    let sh = 0.5 * (1.0 - decay * decay);
    let f = g * (g + 2.0 * j * y) * ch - 2.0 * j * (2.0 * j + g * y) * decay + g * w * z * sh;
    let h = -2.0 * j * (g + 2.0 * j * y) * ch - 2.0 * j * w * z * sh + g * (2.0 * j + g * y) * decay;
    let k = w * (g + 2.0 * j * y) * sh + w2 * z * ch;
    let xs = x * w2 * decay;
    let num = f.powi(4) + h.powi(4) + k.powi(4) + xs.powi(4);
    let den = f * f * (f * f + h * h + k * k + xs * xs);
    Ok(-(num / den).log2())
}
