//! Polarization density matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on Hermiticity, trace and negative eigenvalues.
pub const STATE_TOLERANCE: f64 = 1e-12;

/// Eigenvalues `(low, high)` of the Hermitian matrix `[[a, b], [b*, d]]`.
pub fn hermitian_eigenvalues(a: f64, d: f64, b: Complex64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(b.norm());
    (mean - radius, mean + radius)
}

/// 2×2 density matrix in the `{H, V}` basis.
///
/// Stored as the real diagonal plus the upper off-diagonal coherence
/// `rho_hv`; `rho_vh` is its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    rho_hh: f64,
    rho_vv: f64,
    rho_hv: Complex64,
}

impl QubitState {
    /// Validates a full 2×2 matrix.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let tol = STATE_TOLERANCE;
        let herm = (m[0][1] - m[1][0].conj()).norm();
        if herm > tol || m[0][0].im.abs() > tol || m[1][1].im.abs() > tol {
            return Err(Error::invalid("state", format!("not Hermitian (deviation {herm:e})")));
        }
        Self::from_parts(m[0][0].re, m[1][1].re, 0.5 * (m[0][1] + m[1][0].conj()))
    }

    /// Validates a state given by its diagonal and `rho_hv`.
    pub fn from_parts(rho_hh: f64, rho_vv: f64, rho_hv: Complex64) -> Result<Self> {
        let trace = rho_hh + rho_vv;
        if (trace - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::invalid("state", format!("trace is {trace}, expected 1")));
        }
        let state = Self { rho_hh, rho_vv, rho_hv };
        let min = state.min_eigenvalue();
        if min < -STATE_TOLERANCE {
            return Err(Error::NonPhysical { min_eigenvalue: min });
        }
        Ok(state)
    }

    /// `|ψ⟩⟨ψ|` for `|ψ⟩ = c_h|H⟩ + c_v|V⟩`, normalized.
    pub fn pure(c_h: Complex64, c_v: Complex64) -> Result<Self> {
        let norm2 = c_h.norm_sqr() + c_v.norm_sqr();
        if !(norm2.is_finite() && norm2 > 0.0) {
            return Err(Error::invalid("state", "amplitudes must not both vanish"));
        }
        let (c_h, c_v) = (c_h / norm2.sqrt(), c_v / norm2.sqrt());
        Ok(Self { rho_hh: c_h.norm_sqr(), rho_vv: c_v.norm_sqr(), rho_hv: c_h * c_v.conj() })
    }

    /// `|+⟩ = (|H⟩ + |V⟩)/√2`
    pub fn plus() -> Self {
        Self { rho_hh: 0.5, rho_vv: 0.5, rho_hv: Complex64::new(0.5, 0.0) }
    }

    /// `|−⟩ = (|H⟩ − |V⟩)/√2`
    pub fn minus() -> Self {
        Self { rho_hh: 0.5, rho_vv: 0.5, rho_hv: Complex64::new(-0.5, 0.0) }
    }

    pub fn maximally_mixed() -> Self {
        Self { rho_hh: 0.5, rho_vv: 0.5, rho_hv: Complex64::new(0.0, 0.0) }
    }

    pub fn rho_hh(&self) -> f64 {
        self.rho_hh
    }

    pub fn rho_vv(&self) -> f64 {
        self.rho_vv
    }

    pub fn rho_hv(&self) -> Complex64 {
        self.rho_hv
    }

    pub fn rho_vh(&self) -> Complex64 {
        self.rho_hv.conj()
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.rho_hh, 0.0), self.rho_hv],
            [self.rho_hv.conj(), Complex64::new(self.rho_vv, 0.0)],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.rho_hh + self.rho_vv
    }

    pub fn purity(&self) -> f64 {
        self.rho_hh * self.rho_hh + self.rho_vv * self.rho_vv + 2.0 * self.rho_hv.norm_sqr()
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        hermitian_eigenvalues(self.rho_hh, self.rho_vv, self.rho_hv)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().0
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() >= -STATE_TOLERANCE && (self.trace() - 1.0).abs() <= STATE_TOLERANCE
    }

    /// Adds a traceless Hermitian matrix `[[e, z], [z*, -e]]` without checks.
    pub(crate) fn shifted(&self, e: f64, z: Complex64) -> Self {
        Self { rho_hh: self.rho_hh + e, rho_vv: self.rho_vv - e, rho_hv: self.rho_hv + z }
    }

    pub(crate) fn with_coherence(&self, rho_hv: Complex64) -> Self {
        Self { rho_hv, ..*self }
    }

    /// Bloch vector `(x, y, z)`.
    pub fn bloch(&self) -> [f64; 3] {
        [2.0 * self.rho_hv.re, -2.0 * self.rho_hv.im, self.rho_hh - self.rho_vv]
    }
}
