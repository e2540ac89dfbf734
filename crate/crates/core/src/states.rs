//! Two-mode Gaussian states at the covariance level.
//!
//! Covariances are zero-mean, mode-wise `(x1, p1, x2, p2)`, with the vacuum at
//! `I/2`. The block form is
//!
//! ```text
//! sigma = [ sigma1   gamma  ]
//!         [ gamma^T  sigma2 ]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{ensure_finite, Mat2, Mat4};

/// Tolerance on the symplectic eigenvalues in [`check_physical`].
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

/// `-ln(2 nu)` at or below this is rounding noise on a separable state
/// (e.g. a rotated pure mode) and reported as zero log-negativity.
pub const ENTANGLEMENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    sigma: Mat4,
}

impl CovarianceMatrix {
    /// Accepts any finite matrix that is symmetric to within `1e-12` relative;
    /// the stored copy is symmetrized. Physicality is not enforced here, see
    /// [`check_physical`].
    pub fn new(sigma: Mat4) -> Result<Self> {
        ensure_finite(&sigma, "covariance matrix")?;
        let asym = (sigma - sigma.transpose()).amax();
        if asym > 1e-12 * sigma.amax().max(1.0) {
            return Err(invalid(format!("covariance matrix is not symmetric (defect {asym:e})")));
        }
        Ok(Self { sigma: (sigma + sigma.transpose()) * 0.5 })
    }

    pub fn vacuum() -> Self {
        Self { sigma: Mat4::identity() * 0.5 }
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    pub fn two_mode_squeezed_vacuum(r: f64) -> Self {
        let (ch, sh) = ((2.0 * r).cosh() * 0.5, (2.0 * r).sinh() * 0.5);
        let mut s = Mat4::identity() * ch;
        s[(0, 2)] = sh;
        s[(2, 0)] = sh;
        s[(1, 3)] = -sh;
        s[(3, 1)] = -sh;
        Self { sigma: s }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.sigma
    }

    pub fn sigma1(&self) -> Mat2 {
        self.sigma.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn sigma2(&self) -> Mat2 {
        self.sigma.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Cross-correlation block between the two modes.
    pub fn gamma(&self) -> Mat2 {
        self.sigma.fixed_view::<2, 2>(0, 2).into_owned()
    }

    pub fn det(&self) -> f64 {
        self.sigma.determinant()
    }

    /// Congruence `S sigma S^T`.
    pub fn transformed(&self, s: &Mat4) -> Self {
        let m = s * self.sigma * s.transpose();
        Self { sigma: (m + m.transpose()) * 0.5 }
    }

    pub(crate) fn from_raw(sigma: Mat4) -> Self {
        Self { sigma: (sigma + sigma.transpose()) * 0.5 }
    }
}

/// Mean excitation numbers of two independent thermal modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    pub eta1: f64,
    pub eta2: f64,
}

impl ThermalSpec {
    pub fn new(eta1: f64, eta2: f64) -> Result<Self> {
        for (name, v) in [("eta1", eta1), ("eta2", eta2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be non-negative and finite, got {v}")));
            }
        }
        Ok(Self { eta1, eta2 })
    }

    /// From inverse temperatures `delta_j = omega_j / (k_B T_j)`, using
    /// `eta = 1 / (e^delta - 1)`.
    pub fn from_deltas(delta1: f64, delta2: f64) -> Result<Self> {
        for (name, v) in [("delta1", delta1), ("delta2", delta2)] {
            if !(v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Self::new(1.0 / delta1.exp_m1(), 1.0 / delta2.exp_m1())
    }
}

pub fn thermal_covariance(spec: &ThermalSpec) -> CovarianceMatrix {
    let (a, b) = (spec.eta1 + 0.5, spec.eta2 + 0.5);
    CovarianceMatrix { sigma: Mat4::from_diagonal(&nalgebra::Vector4::new(a, a, b, b)) }
}

/// `Det sigma1 + Det sigma2 - 2 Det gamma`.
pub fn seralian(sigma: &CovarianceMatrix) -> f64 {
    sigma.sigma1().determinant() + sigma.sigma2().determinant() - 2.0 * sigma.gamma().determinant()
}

/// Smallest symplectic eigenvalue of the partially transposed state.
pub fn nu_minus_pt(sigma: &CovarianceMatrix) -> Result<f64> {
    nu_minus_from_invariants(seralian(sigma), sigma.det())
}

pub(crate) fn nu_minus_from_invariants(delta: f64, det: f64) -> Result<f64> {
    if !(det > 0.0) {
        return Err(Error::NumericalInconsistency(format!("Det sigma = {det:e} is not positive")));
    }
    let disc = delta * delta - 4.0 * det;
    if disc < -1e-12 * (delta * delta).max(1.0) {
        return Err(Error::NumericalInconsistency(format!(
            "seralian discriminant {disc:e} is negative (Delta = {delta}, Det = {det})"
        )));
    }
    // (Delta - sqrt(disc)) / 2 == 2 Det / (Delta + sqrt(disc))
    let denom = delta + disc.max(0.0).sqrt();
    if !(denom > 0.0) {
        return Err(Error::NumericalInconsistency(format!("seralian {delta} is not positive")));
    }
    Ok((2.0 * det / denom).sqrt())
}

/// `max[0, -ln(2 nu_minus)]`, natural logarithm.
pub fn log_negativity(sigma: &CovarianceMatrix) -> Result<f64> {
    Ok(log_negativity_from_nu(nu_minus_pt(sigma)?))
}

pub(crate) fn log_negativity_from_nu(nu: f64) -> f64 {
    let margin = -(2.0 * nu).ln();
    if margin > ENTANGLEMENT_FLOOR {
        margin
    } else {
        0.0
    }
}

/// `Tr rho^2 = 1 / (4 sqrt(Det sigma))`, equal to one on the vacuum.
pub fn purity(sigma: &CovarianceMatrix) -> Result<f64> {
    purity_from_det(sigma.det())
}

pub(crate) fn purity_from_det(det: f64) -> Result<f64> {
    if !(det > 0.0) {
        return Err(Error::NumericalInconsistency(format!("Det sigma = {det:e} is not positive")));
    }
    Ok(0.25 / det.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalityReport {
    pub physical: bool,
    pub positive_definite: bool,
    /// `(nu_plus, nu_minus)`; NaN when they are not real.
    pub symplectic_eigenvalues: [f64; 2],
}

/// Uncertainty-principle check `sigma + i Omega / 2 >= 0`, via positive
/// definiteness and both symplectic eigenvalues `>= 1/2 - 1e-9`.
pub fn check_physical(sigma: &CovarianceMatrix) -> PhysicalityReport {
    let positive_definite = sigma.sigma.cholesky().is_some();
    let delta_plus = sigma.sigma1().determinant() + sigma.sigma2().determinant() + 2.0 * sigma.gamma().determinant();
    let det = sigma.det();
    let disc = delta_plus * delta_plus - 4.0 * det;
    let root = if disc < 0.0 && disc > -1e-12 * (delta_plus * delta_plus).max(1.0) { 0.0 } else { disc.sqrt() };
    let nu_plus = ((delta_plus + root) / 2.0).sqrt();
    let nu_minus = if delta_plus + root > 0.0 { (2.0 * det / (delta_plus + root)).sqrt() } else { f64::NAN };
    let floor = 0.5 - PHYSICALITY_TOLERANCE;
    let physical = positive_definite && nu_minus >= floor && nu_plus >= floor;
    PhysicalityReport { physical, positive_definite, symplectic_eigenvalues: [nu_plus, nu_minus] }
}
