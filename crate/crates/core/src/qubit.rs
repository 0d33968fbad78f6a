//! State representations shared by the rest of the crate.
//!
//! Single-qubit basis order is `(|f>, |e>)`, where `|e>` is the decaying
//! excited level. With this order `sigma_z = |f><f| - |e><e|`, so
//! `z = rho_ff - rho_ee` and strong decay pushes `z` towards `+1`.
//!
//! Multi-qubit registers use the first label of a [`PauliString`] for the
//! most significant bit of the computational-basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix used for small registers.
pub type CMatrix = DMatrix<Complex64>;

/// Largest register handled by the dense routines.
pub const MAX_QUBITS: usize = 6;

/// Slack on `|r| <= 1` for a vector to count as physical.
pub const BLOCH_TOL: f64 = 1e-9;
/// Beyond this excess a Bloch vector is rejected outright.
pub const BLOCH_REJECT_TOL: f64 = 1e-6;
/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Like [`BlochVector::new`] but rejects vectors outside the ball.
    pub fn checked(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = Self::new(x, y, z);
        let norm = r.norm();
        if !norm.is_finite() || norm > 1.0 + BLOCH_REJECT_TOL {
            return Err(Error::UnphysicalBloch { norm });
        }
        Ok(r)
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: BlochVector) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// `Tr(rho^2) = (1 + |r|^2) / 2`.
    pub fn purity(self) -> f64 {
        0.5 * (1.0 + self.norm_sq())
    }

    pub fn is_pure(self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }
}

/// Single-qubit density matrix in the `(|f>, |e>)` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2 {
    m: [[Complex64; 2]; 2],
}

impl DensityMatrix2 {
    /// Validates hermiticity, unit trace and positivity.
    pub fn from_entries(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let herm = (m[0][1] - m[1][0].conj()).norm();
        if herm > DENSITY_TOL || m[0][0].im.abs() > DENSITY_TOL || m[1][1].im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m[0][0].re + m[1][1].re;
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let rho = Self { m };
        // eigenvalues of a unit-trace 2x2 Hermitian matrix are (1 +- |r|)/2
        let lowest = 0.5 * (1.0 - rho.bloch_unchecked().norm());
        if lowest < PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(rho)
    }

    /// Rescales a positive matrix to unit trace and removes the
    /// anti-Hermitian rounding residue before validating it.
    pub fn normalized(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let tr = m[0][0].re + m[1][1].re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let off = 0.5 * (m[0][1] + m[1][0].conj()) / tr;
        Self::from_entries([
            [Complex64::new(m[0][0].re / tr, 0.0), off],
            [off.conj(), Complex64::new(m[1][1].re / tr, 0.0)],
        ])
    }

    pub fn maximally_mixed() -> Self {
        let h = Complex64::new(0.5, 0.0);
        Self {
            m: [[h, ZERO], [ZERO, h]],
        }
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn ff(&self) -> Complex64 {
        self.m[0][0]
    }

    pub fn fe(&self) -> Complex64 {
        self.m[0][1]
    }

    pub fn ef(&self) -> Complex64 {
        self.m[1][0]
    }

    pub fn ee(&self) -> Complex64 {
        self.m[1][1]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0].re + self.m[1][1].re
    }

    pub fn purity(&self) -> f64 {
        let m = &self.m;
        (m[0][0] * m[0][0] + m[0][1] * m[1][0] + m[1][0] * m[0][1] + m[1][1] * m[1][1]).re
    }

    fn bloch_unchecked(&self) -> BlochVector {
        BlochVector::new(
            2.0 * self.m[0][1].re,
            -2.0 * self.m[0][1].im,
            self.m[0][0].re - self.m[1][1].re,
        )
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]])
    }
}

/// Normalized single-qubit pure state `c_f |f> + c_e |e>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState2 {
    f: Complex64,
    e: Complex64,
}

impl PureState2 {
    pub fn new(f: Complex64, e: Complex64) -> Result<Self> {
        let n = (f.norm_sqr() + e.norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter {
                field: "amplitudes",
                reason: format!("cannot normalize a vector of norm {n}"),
            });
        }
        Ok(Self { f: f / n, e: e / n })
    }

    /// The `|f>` level (north pole, z = +1).
    pub fn ground() -> Self {
        Self { f: ONE, e: ZERO }
    }

    /// The decaying `|e>` level.
    pub fn excited() -> Self {
        Self { f: ZERO, e: ONE }
    }

    /// `(|e> + |f>)/sqrt(2)`, the `+x` eigenstate.
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { f: h, e: h }
    }

    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (self.f, self.e)
    }

    pub fn bloch(&self) -> BlochVector {
        let c = self.f.conj() * self.e;
        BlochVector::new(
            2.0 * c.re,
            2.0 * c.im,
            self.f.norm_sqr() - self.e.norm_sqr(),
        )
    }

    pub fn density(&self) -> DensityMatrix2 {
        DensityMatrix2 {
            m: [
                [Complex64::new(self.f.norm_sqr(), 0.0), self.f * self.e.conj()],
                [self.e * self.f.conj(), Complex64::new(self.e.norm_sqr(), 0.0)],
            ],
        }
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState2) -> f64 {
        (self.f.conj() * other.f + self.e.conj() * other.e).norm_sqr()
    }
}

/// `rho = (1 + x sigma_x + y sigma_y + z sigma_z) / 2`.
pub fn bloch_to_density(r: BlochVector) -> Result<DensityMatrix2> {
    let r = BlochVector::checked(r.x, r.y, r.z)?;
    let fe = Complex64::new(0.5 * r.x, -0.5 * r.y);
    Ok(DensityMatrix2 {
        m: [
            [Complex64::new(0.5 * (1.0 + r.z), 0.0), fe],
            [fe.conj(), Complex64::new(0.5 * (1.0 - r.z), 0.0)],
        ],
    })
}

/// `r_i = Tr(rho sigma_i)`.
pub fn density_to_bloch(rho: &DensityMatrix2) -> BlochVector {
    rho.bloch_unchecked()
}

/// Pauli string `sigma_mu_1 (x) ... (x) sigma_mu_L` with labels 0..=3 for I, X, Y, Z.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<u8>);

impl PauliString {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if labels.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits(labels.len()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 3) {
            return Err(Error::InvalidParameter {
                field: "pauli label",
                reason: format!("{bad} is not in 0..=3"),
            });
        }
        Ok(Self(labels))
    }

    /// Parses strings such as `"XIZ"`.
    pub fn parse(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .map(|c| match c {
                'I' | '0' => Ok(0),
                'X' | '1' => Ok(1),
                'Y' | '2' => Ok(2),
                'Z' | '3' => Ok(3),
                other => Err(Error::InvalidParameter {
                    field: "pauli label",
                    reason: format!("unknown symbol {other:?}"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(labels)
    }

    pub fn labels(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `4^L` strings in lexicographic label order.
    pub fn all(qubits: usize) -> impl Iterator<Item = PauliString> {
        (0..4usize.pow(qubits as u32)).map(move |mut code| {
            let mut labels = vec![0u8; qubits];
            for slot in labels.iter_mut().rev() {
                *slot = (code % 4) as u8;
                code /= 4;
            }
            PauliString(labels)
        })
    }

    /// Dense `2^L x 2^L` matrix.
    pub fn matrix(&self) -> CMatrix {
        let mut out = CMatrix::from_element(1, 1, ONE);
        for &l in &self.0 {
            out = out.kronecker(&single_pauli(l));
        }
        out
    }

    /// Bit masks `(flip, phase)`: X/Y flip, Y/Z pick up a sign on `|1>`.
    fn masks(&self) -> (usize, usize, u32) {
        let n = self.0.len();
        let (mut flip, mut zmask, mut ys) = (0usize, 0usize, 0u32);
        for (site, &l) in self.0.iter().enumerate() {
            let bit = 1usize << (n - 1 - site);
            match l {
                1 => flip |= bit,
                2 => {
                    flip |= bit;
                    zmask |= bit;
                    ys += 1;
                }
                3 => zmask |= bit,
                _ => {}
            }
        }
        (flip, zmask, ys)
    }
}

fn single_pauli(label: u8) -> CMatrix {
    let v = match label {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        _ => [ONE, ZERO, ZERO, -ONE],
    };
    CMatrix::from_row_slice(2, 2, &v)
}

/// Density matrix of an `L`-qubit register, `L <= MAX_QUBITS`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.ncols(),
            });
        }
        if !dim.is_power_of_two() || dim == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "dimension {dim} is not a power of two"
            )));
        }
        let qubits = dim.trailing_zeros() as usize;
        if qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubits));
        }
        let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let lowest = m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if lowest < PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(Self { qubits, m })
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidDensityMatrix("zero state vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|a| a / n));
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        if qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubits));
        }
        let dim = 1usize << qubits;
        Self::new(CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        if self.qubits + other.qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(self.qubits + other.qubits));
        }
        Ok(Self {
            qubits: self.qubits + other.qubits,
            m: self.m.kronecker(&other.m),
        })
    }

    /// Conjugation `U rho U^dagger` by a unitary.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.nrows(),
            });
        }
        let m = u * &self.m * u.adjoint();
        // scrub rounding so the validity checks see an exactly Hermitian matrix
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self::new(m)
    }
}

impl From<DensityMatrix2> for DensityMatrix {
    fn from(rho: DensityMatrix2) -> Self {
        Self {
            qubits: 1,
            m: rho.to_matrix(),
        }
    }
}

/// `Tr(sigma_mu rho)`, computed from the sparse structure of the string.
pub fn pauli_expectation(rho: &DensityMatrix, mu: &PauliString) -> Result<f64> {
    if mu.len() != rho.qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho.qubits(),
            got: mu.len(),
        });
    }
    Ok(pauli_trace(rho.matrix(), mu).re)
}

pub(crate) fn pauli_trace(m: &CMatrix, mu: &PauliString) -> Complex64 {
    // sigma |k> = c(k) |k ^ flip>, so Tr(sigma rho) = sum_k c(k) rho[k, k ^ flip]
    let (flip, zmask, ys) = mu.masks();
    let y_phase = match ys % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    };
    let mut acc = ZERO;
    for k in 0..m.nrows() {
        let sign = if (k & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += m[(k, k ^ flip)] * sign;
    }
    acc * y_phase
}
