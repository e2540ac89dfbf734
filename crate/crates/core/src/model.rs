//! The coupled-oscillator model: Hamiltonian matrix, normal-mode spectrum,
//! coupling regime, diagonalizing symplectic transform and the classical
//! Hookian reduction.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{symplectic_form, SymplecticMatrix};
use crate::error::{invalid, Error, Result};
use crate::numerics::{mat_exp, Mat2, Mat4};

/// Relative tolerance on `|g - g_c|` inside which the pair is critical.
pub const REGIME_TOLERANCE: f64 = 1e-9;

/// Two bare oscillators with frequencies `omega1`, `omega2` coupled through
/// `g x1 x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorPair {
    omega1: f64,
    omega2: f64,
    g: f64,
}

impl OscillatorPair {
    pub fn new(omega1: f64, omega2: f64, g: f64) -> Result<Self> {
        if !(omega1.is_finite() && omega1 > 0.0) {
            return Err(invalid(format!("omega1 must be positive and finite, got {omega1}")));
        }
        if !(omega2.is_finite() && omega2 > 0.0) {
            return Err(invalid(format!("omega2 must be positive and finite, got {omega2}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(invalid(format!("g must be non-negative and finite, got {g}")));
        }
        Ok(Self { omega1, omega2, g })
    }

    /// Builds the pair with the coupling given as a fraction of `g_c`.
    pub fn with_relative_coupling(omega1: f64, omega2: f64, g_over_gc: f64) -> Result<Self> {
        let probe = Self::new(omega1, omega2, 0.0)?;
        Self::new(omega1, omega2, g_over_gc * probe.critical_coupling())
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn is_resonant(&self) -> bool {
        self.omega1 == self.omega2
    }

    pub fn critical_coupling(&self) -> f64 {
        critical_coupling(self)
    }
}

/// Permutation taking mode-wise `(x1, p1, x2, p2)` to block `(x1, x2, p1, p2)`.
pub fn block_permutation() -> Mat4 {
    let mut p = Mat4::zeros();
    p[(0, 0)] = 1.0;
    p[(1, 2)] = 1.0;
    p[(2, 1)] = 1.0;
    p[(3, 3)] = 1.0;
    p
}

/// Quadratic Hamiltonian `H = r^T M r / 2`, stored in the mode-wise ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix {
    modewise: Mat4,
}

impl HamiltonianMatrix {
    /// Wraps an arbitrary mode-wise matrix. It must be symmetric up to
    /// rounding; the stored copy is exactly symmetric.
    pub fn from_modewise(m: Mat4) -> Result<Self> {
        crate::numerics::ensure_finite(&m, "Hamiltonian matrix")?;
        let asym = (m - m.transpose()).amax();
        if asym > 1e-12 * m.amax().max(1.0) {
            return Err(invalid(format!("Hamiltonian matrix is not symmetric (defect {asym:e})")));
        }
        Ok(Self { modewise: (m + m.transpose()) * 0.5 })
    }

    pub fn zero() -> Self {
        Self { modewise: Mat4::zeros() }
    }

    pub fn modewise(&self) -> &Mat4 {
        &self.modewise
    }

    /// The same matrix in the `(x1, x2, p1, p2)` basis.
    pub fn block(&self) -> Mat4 {
        let p = block_permutation();
        p * self.modewise * p.transpose()
    }

    pub fn x_block(&self) -> Mat2 {
        self.block().fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn p_block(&self) -> Mat2 {
        self.block().fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Linear generator of the Heisenberg flow, `Omega H`.
    pub fn generator(&self) -> Mat4 {
        symplectic_form() * self.modewise
    }
}

pub fn build_hamiltonian(osc: &OscillatorPair) -> HamiltonianMatrix {
    let mut m = Mat4::zeros();
    m[(0, 0)] = osc.omega1;
    m[(1, 1)] = osc.omega1;
    m[(2, 2)] = osc.omega2;
    m[(3, 3)] = osc.omega2;
    m[(0, 2)] = osc.g;
    m[(2, 0)] = osc.g;
    HamiltonianMatrix { modewise: m }
}

pub fn critical_coupling(osc: &OscillatorPair) -> f64 {
    (osc.omega1 * osc.omega2).sqrt()
}

/// `(E+^2, E-^2)` from the closed-form normal-mode energies. `E-^2` turns
/// negative above the critical coupling.
///
/// At `g = 0` these evaluate to `2 omega_j^2`; the symplectic frequencies
/// returned by [`symplectic_frequencies`] are `E / sqrt(2)`.
pub fn normal_mode_energies_sq(osc: &OscillatorPair) -> (f64, f64) {
    let (w1, w2, g) = (osc.omega1, osc.omega2, osc.g);
    let gc = critical_coupling(osc);
    let sum_sq = w1 * w1 + w2 * w2;
    // (w1^2 + w2^2)^2 + 4 w1 w2 (g^2 - w1 w2), written without cancellation
    let diff_sq = w1 * w1 - w2 * w2;
    let root = (diff_sq * diff_sq + 4.0 * w1 * w2 * g * g).sqrt();
    let shift = 4.0 * w1 * w2 * (g - gc) * (g + gc);
    let plus = sum_sq + root;
    // sum_sq - root == -shift / (sum_sq + root)
    let minus = -shift / plus;
    (plus, minus)
}

/// Normal frequencies from the eigenvalues of the drift matrix `Omega H`.
///
/// Returns `(nu_plus, nu_minus_sq)`. An imaginary pair `+-i nu` contributes
/// `nu^2 > 0`; a real pair `+-kappa` contributes `-kappa^2`.
pub fn symplectic_frequencies(h: &HamiltonianMatrix) -> (f64, f64) {
    let eig = h.generator().complex_eigenvalues();
    let mut sq: Vec<f64> = eig.iter().map(|l| l.im * l.im - l.re * l.re).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    let plus_sq = 0.5 * (sq[0] + sq[1]);
    let minus_sq = 0.5 * (sq[2] + sq[3]);
    (plus_sq.max(0.0).sqrt(), minus_sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Subcritical => "Subcritical",
            Regime::Critical => "Critical",
            Regime::Supercritical => "Supercritical",
        };
        f.write_str(s)
    }
}

pub fn classify_regime(osc: &OscillatorPair) -> Regime {
    let gc = critical_coupling(osc);
    if (osc.g - gc).abs() <= REGIME_TOLERANCE * gc {
        Regime::Critical
    } else if osc.g < gc {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

/// Parameters `(A, B)` of the two-mode transform `exp[i(A x1 p2 - B x2 p1)]`,
/// with `c = cos sqrt(AB)` and `s = sin sqrt(AB)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalizerParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub s: f64,
}

impl DiagonalizerParams {
    pub fn identity() -> Self {
        Self { a: 0.0, b: 0.0, c: 1.0, s: 0.0 }
    }

    /// Mixing angle `sqrt(AB)`.
    pub fn angle(&self) -> f64 {
        (self.a * self.b).sqrt()
    }
}

/// What [`diagonalizer_params`] does for an uncoupled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnZeroCoupling {
    Fail,
    Identity,
}

/// Solves `tan 2 sqrt(AB) = 2 g g_c / (omega1^2 - omega2^2)` together with
/// `A / B = omega2 / omega1`.
///
/// The angle `2 sqrt(AB)` is taken as `atan2(2 g g_c, omega1^2 - omega2^2)`,
/// which lies in `(0, pi/2]` whenever `omega1 >= omega2` and equals `pi/2`
/// exactly at resonance (`A = B = pi/4`).
pub fn diagonalizer_params(osc: &OscillatorPair, on_zero: OnZeroCoupling) -> Result<DiagonalizerParams> {
    if osc.g == 0.0 {
        return match on_zero {
            OnZeroCoupling::Identity => Ok(DiagonalizerParams::identity()),
            OnZeroCoupling::Fail => Err(Error::Degenerate("g = 0: nothing to diagonalize".into())),
        };
    }
    let (w1, w2) = (osc.omega1, osc.omega2);
    let gc = critical_coupling(osc);
    let theta = if osc.is_resonant() { FRAC_PI_4 } else { 0.5 * (2.0 * osc.g * gc).atan2(w1 * w1 - w2 * w2) };
    // A B = theta^2 and A / B = w2 / w1
    let ratio = (w2 / w1).sqrt();
    let (a, b) = if osc.is_resonant() { (FRAC_PI_4, FRAC_PI_4) } else { (theta * ratio, theta / ratio) };
    Ok(DiagonalizerParams { a, b, c: theta.cos(), s: theta.sin() })
}

fn check_params(params: &DiagonalizerParams, osc: &OscillatorPair) -> Result<()> {
    let finite = [params.a, params.b, params.c, params.s].iter().all(|v| v.is_finite());
    if !finite {
        return Err(invalid("diagonalizer parameters must be finite"));
    }
    if params.a == 0.0 && params.b == 0.0 {
        if osc.g == 0.0 && params.c == 1.0 && params.s == 0.0 {
            return Ok(());
        }
        return Err(invalid("identity diagonalizer only matches an uncoupled pair"));
    }
    if !(params.a > 0.0 && params.b > 0.0) {
        return Err(invalid("diagonalizer parameters A, B must be positive"));
    }
    let theta = params.angle();
    if (params.c - theta.cos()).abs() > 1e-12 || (params.s - theta.sin()).abs() > 1e-12 {
        return Err(invalid("c, s do not match cos, sin of sqrt(AB)"));
    }
    let want = osc.omega2 / osc.omega1;
    if (params.a / params.b - want).abs() > 1e-12 * want {
        return Err(invalid(format!("A/B = {} but omega2/omega1 = {want}", params.a / params.b)));
    }
    let (w1, w2) = (osc.omega1, osc.omega2);
    let lhs = (2.0 * theta).sin() * (w1 * w1 - w2 * w2);
    let rhs = 2.0 * osc.g * critical_coupling(osc) * (2.0 * theta).cos();
    let scale = (w1 * w1 + w2 * w2).max(osc.g * critical_coupling(osc));
    if (lhs - rhs).abs() > 1e-10 * scale {
        return Err(invalid("A, B violate the diagonalization condition for this pair"));
    }
    Ok(())
}

/// Phase-space matrix `S_T` of the transform. `S_T^T H S_T` is diagonal in
/// each quadrature block.
///
/// Built as the exponential of the linear flow the generator
/// `A x1 p2 - B x2 p1` induces on the quadratures:
/// `x1 -> -B x2`, `x2 -> A x1`, `p1 -> -A p2`, `p2 -> B p1`.
pub fn diagonalizing_symplectic(params: &DiagonalizerParams, osc: &OscillatorPair) -> Result<SymplecticMatrix> {
    check_params(params, osc)?;
    let mut gen = Mat4::zeros();
    gen[(0, 2)] = -params.b;
    gen[(2, 0)] = params.a;
    gen[(1, 3)] = -params.a;
    gen[(3, 1)] = params.b;
    Ok(SymplecticMatrix::new_unchecked(mat_exp(&gen)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeLabel {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// One decoupled normal mode `(p_coeff p^2 + x_coeff x^2) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeHamiltonian {
    pub p_coeff: f64,
    pub x_coeff: f64,
    pub label: ModeLabel,
}

impl ModeHamiltonian {
    /// Squared oscillation frequency; negative for an inverted potential.
    pub fn frequency_sq(&self) -> f64 {
        self.p_coeff * self.x_coeff
    }
}

/// Coefficients of the diagonal Hamiltonian `S_T^T H S_T`, returned as
/// `('+', '-')`.
pub fn diagonal_hamiltonian(osc: &OscillatorPair) -> (ModeHamiltonian, ModeHamiltonian) {
    let (w1, w2, g) = (osc.omega1, osc.omega2, osc.g);
    if g == 0.0 {
        let first = ModeHamiltonian { p_coeff: w1, x_coeff: w1, label: ModeLabel::Plus };
        let second = ModeHamiltonian { p_coeff: w2, x_coeff: w2, label: ModeLabel::Minus };
        return if w1 >= w2 {
            (first, second)
        } else {
            (ModeHamiltonian { label: ModeLabel::Plus, ..second }, ModeHamiltonian { label: ModeLabel::Minus, ..first })
        };
    }
    let params = diagonalizer_params(osc, OnZeroCoupling::Fail).expect("g > 0 checked above");
    let (c, s) = (params.c, params.s);
    let ggc = g * critical_coupling(osc);
    let plus = ModeHamiltonian {
        p_coeff: w1,
        x_coeff: w1 * c * c + (w2 * w2 / w1) * s * s + 2.0 * (ggc / w1) * c * s,
        label: ModeLabel::Plus,
    };
    let minus = ModeHamiltonian {
        p_coeff: w2,
        x_coeff: w2 * c * c + (w1 * w1 / w2) * s * s - 2.0 * (ggc / w2) * c * s,
        label: ModeLabel::Minus,
    };
    (plus, minus)
}

/// Identical classical oscillators with a Hookian spring between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HookianSpec {
    mass: f64,
    omega: f64,
    hook_coupling: f64,
}

impl HookianSpec {
    pub fn new(mass: f64, omega: f64, hook_coupling: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("omega", omega), ("Hookian coupling", hook_coupling)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { mass, omega, hook_coupling })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Dimensionless form of a Hookian pair:
/// `omega0/2 [p1^2 + x1^2 + p2^2 + x2^2 - G x1 x2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HookianReduction {
    pub omega0: f64,
    pub renormalized_coupling: f64,
    /// Magnitude of the `x1 x2` coefficient, `omega0 G / 2`.
    pub g_effective: f64,
}

pub fn hookian_reduce(spec: &HookianSpec) -> HookianReduction {
    let w2 = spec.omega * spec.omega;
    let k2 = spec.hook_coupling * spec.hook_coupling;
    let omega0 = (w2 + k2).sqrt();
    let renormalized_coupling = k2 / (w2 + k2);
    HookianReduction { omega0, renormalized_coupling, g_effective: 0.5 * omega0 * renormalized_coupling }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn pair(w1: f64, w2: f64, g: f64) -> OscillatorPair {
        OscillatorPair::new(w1, w2, g).unwrap()
    }

    fn transformed(osc: &OscillatorPair) -> Mat4 {
        let p = diagonalizer_params(osc, OnZeroCoupling::Identity).unwrap();
        let s = diagonalizing_symplectic(&p, osc).unwrap();
        s.matrix().transpose() * build_hamiltonian(osc).modewise() * s.matrix()
    }

    #[test]
    fn rejects_invalid_pairs() {
        assert!(OscillatorPair::new(0.0, 1.0, 0.1).is_err());
        assert!(OscillatorPair::new(1.0, -1.0, 0.1).is_err());
        assert!(OscillatorPair::new(1.0, 1.0, -0.1).is_err());
        assert!(OscillatorPair::new(1.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn hamiltonian_blocks() {
        let h = build_hamiltonian(&pair(1.0, 1.0, 0.0));
        assert_eq!(h.block(), Mat4::identity());
        let h = build_hamiltonian(&pair(5.0, 1.0, 2.0));
        assert_eq!(h.x_block(), Mat2::new(5.0, 2.0, 2.0, 1.0));
        assert_eq!(h.p_block(), Mat2::new(5.0, 0.0, 0.0, 1.0));
        let p = block_permutation();
        assert_eq!(p.transpose() * h.block() * p, *h.modewise());
        assert_eq!(*h.modewise(), h.modewise().transpose());
    }

    #[test]
    fn critical_coupling_values() {
        assert_eq!(critical_coupling(&pair(1.0, 1.0, 0.0)), 1.0);
        assert!((critical_coupling(&pair(5.0, 1.0, 0.0)) - 2.236_067_977_499_79).abs() < 1e-14);
        assert_eq!(critical_coupling(&pair(4.0, 9.0, 0.0)), 6.0);
    }

    #[test]
    fn energies_at_boundaries() {
        let (_, minus) = normal_mode_energies_sq(&pair(1.0, 1.0, 1.0));
        assert_eq!(minus, 0.0);
        let (plus, minus) = normal_mode_energies_sq(&pair(1.0, 1.0, 0.0));
        assert_eq!(plus, 2.0);
        assert_eq!(minus, 2.0);
    }

    #[test]
    fn energies_match_symplectic_frequencies_up_to_sqrt2() {
        let osc = pair(5.0, 1.0, 1.0);
        let (ep, em) = normal_mode_energies_sq(&osc);
        let (nu_p, nu_m_sq) = symplectic_frequencies(&build_hamiltonian(&osc));
        assert!((ep.sqrt() / 2f64.sqrt() - nu_p).abs() < 1e-12);
        assert!((em / 2.0 - nu_m_sq).abs() < 1e-12);
    }

    #[test]
    fn symplectic_frequency_examples() {
        let (p, m) = symplectic_frequencies(&build_hamiltonian(&pair(1.0, 1.0, 0.0)));
        assert!((p - 1.0).abs() < 1e-13 && (m - 1.0).abs() < 1e-13);
        let (p, m) = symplectic_frequencies(&build_hamiltonian(&pair(1.0, 1.0, 0.5)));
        assert!((p - 1.5f64.sqrt()).abs() < 1e-13 && (m - 0.5).abs() < 1e-13);
        let (_, m) = symplectic_frequencies(&build_hamiltonian(&pair(1.0, 1.0, 1.2)));
        assert!((m + 0.2).abs() < 1e-13);
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(&pair(1.0, 1.0, 0.5)), Regime::Subcritical);
        assert_eq!(classify_regime(&pair(5.0, 1.0, 5f64.sqrt())), Regime::Critical);
        assert_eq!(classify_regime(&pair(1.0, 1.0, 1.5)), Regime::Supercritical);
        assert_eq!(classify_regime(&pair(1.0, 1.0, 1.0 + 1e-10)), Regime::Critical);
        assert_eq!(classify_regime(&pair(1.0, 1.0, 1.0 + 1e-8)), Regime::Supercritical);
    }

    #[test]
    fn resonant_params_are_quarter_pi() {
        for g in [0.1, 1.0, 3.0] {
            let p = diagonalizer_params(&pair(2.0, 2.0, g), OnZeroCoupling::Fail).unwrap();
            assert_eq!((p.a, p.b), (FRAC_PI_4, FRAC_PI_4));
        }
    }

    #[test]
    fn params_by_substitution() {
        let osc = pair(5.0, 1.0, 1.0);
        let p = diagonalizer_params(&osc, OnZeroCoupling::Fail).unwrap();
        let want = 0.5 * (2.0 * 5f64.sqrt() / 24.0).atan();
        assert!((p.angle() - want).abs() < 1e-15);
        assert!((p.a / p.b - 0.2).abs() < 1e-15);
        let lhs = (2.0 * p.angle()).tan() * 24.0;
        assert!((lhs - 2.0 * 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_is_degenerate_unless_identity_requested() {
        let osc = pair(5.0, 1.0, 0.0);
        assert!(matches!(diagonalizer_params(&osc, OnZeroCoupling::Fail), Err(Error::Degenerate(_))));
        let p = diagonalizer_params(&osc, OnZeroCoupling::Identity).unwrap();
        let s = diagonalizing_symplectic(&p, &osc).unwrap();
        assert_eq!(*s.matrix(), Mat4::identity());
    }

    #[test]
    fn inconsistent_params_rejected() {
        let osc = pair(5.0, 1.0, 1.0);
        let mut p = diagonalizer_params(&osc, OnZeroCoupling::Fail).unwrap();
        p.a *= 1.01;
        assert!(diagonalizing_symplectic(&p, &osc).is_err());
        let other = diagonalizer_params(&pair(5.0, 1.0, 2.0), OnZeroCoupling::Fail).unwrap();
        assert!(diagonalizing_symplectic(&other, &osc).is_err());
        assert!(diagonalizing_symplectic(&DiagonalizerParams::identity(), &osc).is_err());
    }

    #[test]
    fn resonant_transform_is_fifty_fifty_splitter() {
        let osc = pair(1.0, 1.0, 0.3);
        let p = diagonalizer_params(&osc, OnZeroCoupling::Fail).unwrap();
        let s = *diagonalizing_symplectic(&p, &osc).unwrap().matrix();
        let blk = block_permutation() * s * block_permutation().transpose();
        let sx = blk.fixed_view::<2, 2>(0, 0).into_owned();
        let want = Mat2::new(1.0, -1.0, 1.0, 1.0) * FRAC_1_SQRT_2;
        assert!((sx - want).amax() < 1e-15);
        assert!((sx * sx.transpose() - Mat2::identity()).amax() < 1e-15);
        // S_p^T = S_x^{-1}
        let sp = blk.fixed_view::<2, 2>(2, 2).into_owned();
        assert!((sp.transpose() * sx - Mat2::identity()).amax() < 1e-15);
        assert!(blk.fixed_view::<2, 2>(0, 2).amax() == 0.0);
    }

    #[test]
    fn generic_transform_is_symplectic_and_diagonalizing() {
        let osc = pair(5.0, 1.0, 2.0);
        let p = diagonalizer_params(&osc, OnZeroCoupling::Fail).unwrap();
        let s = diagonalizing_symplectic(&p, &osc).unwrap();
        assert!(s.symplectic_defect() < 1e-12);
        let hd = transformed(&osc);
        assert!(hd[(0, 2)].abs() < 1e-10 && hd[(1, 3)].abs() < 1e-10);
        assert!(hd[(0, 1)].abs() < 1e-10 && hd[(2, 3)].abs() < 1e-10);
    }

    #[test]
    fn diagonal_coefficients_match_numeric_transform() {
        for osc in [pair(5.0, 1.0, 1.0), pair(5.0, 1.0, 4.0), pair(1.0, 3.0, 0.7), pair(2.0, 2.0, 2.5)] {
            let hd = transformed(&osc);
            let (plus, minus) = diagonal_hamiltonian(&osc);
            assert!((plus.x_coeff - hd[(0, 0)]).abs() < 1e-10, "{osc:?}");
            assert!((plus.p_coeff - hd[(1, 1)]).abs() < 1e-10, "{osc:?}");
            assert!((minus.x_coeff - hd[(2, 2)]).abs() < 1e-10, "{osc:?}");
            assert!((minus.p_coeff - hd[(3, 3)]).abs() < 1e-10, "{osc:?}");
            assert!(plus.frequency_sq() >= minus.frequency_sq());
        }
    }

    #[test]
    fn resonant_modes_reduce_to_split_hamiltonians() {
        let (w, g) = (1.3, 0.4);
        let (plus, minus) = diagonal_hamiltonian(&pair(w, w, g));
        assert!((plus.x_coeff - (w + g)).abs() < 1e-14 && plus.p_coeff == w);
        assert!((minus.x_coeff - (w - g)).abs() < 1e-14 && minus.p_coeff == w);
        let (_, minus) = diagonal_hamiltonian(&pair(w, w, w));
        assert!(minus.x_coeff.abs() < 1e-10);
        let (_, minus) = diagonal_hamiltonian(&pair(5.0, 1.0, 5f64.sqrt()));
        assert!(minus.x_coeff.abs() < 1e-10);
    }

    #[test]
    fn uncoupled_modes_are_sorted_by_frequency() {
        let (plus, minus) = diagonal_hamiltonian(&pair(1.0, 3.0, 0.0));
        assert_eq!((plus.p_coeff, minus.p_coeff), (3.0, 1.0));
        assert_eq!(plus.label, ModeLabel::Plus);
    }

    #[test]
    fn hookian_examples() {
        let r = hookian_reduce(&HookianSpec::new(1.0, 2.0, 2.0).unwrap());
        assert!((r.renormalized_coupling - 0.5).abs() < 1e-15);
        let r = hookian_reduce(&HookianSpec::new(1.0, 2.0, 1e-9).unwrap());
        assert!(r.renormalized_coupling < 1e-18 && (r.omega0 - 2.0).abs() < 1e-15);
        let r = hookian_reduce(&HookianSpec::new(3.0, 1.0, 10.0).unwrap());
        assert!((r.renormalized_coupling - 100.0 / 101.0).abs() < 1e-15);
        assert!(r.g_effective / r.omega0 < 0.5);
        assert!(HookianSpec::new(1.0, 0.0, 1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn energy_and_frequency_signs_agree(w1 in 0.1..20.0f64, w2 in 0.1..20.0f64, r in 0.0..3.0f64) {
                let osc = OscillatorPair::with_relative_coupling(w1, w2, r).unwrap();
                let (_, em) = normal_mode_energies_sq(&osc);
                let (_, nm) = symplectic_frequencies(&build_hamiltonian(&osc));
                let scale = w1 * w1 + w2 * w2;
                if (r - 1.0).abs() > 1e-6 {
                    prop_assert_eq!(em < 0.0, r > 1.0);
                    prop_assert_eq!(nm < 0.0, r > 1.0);
                }
                prop_assert!((em / 2.0 - nm).abs() < 1e-11 * scale);
            }

            #[test]
            fn regime_is_scale_invariant(
                w1 in 0.1..20.0f64, w2 in 0.1..20.0f64, r in 0.0..3.0f64, lambda in 0.01..100.0f64
            ) {
                let a = OscillatorPair::with_relative_coupling(w1, w2, r).unwrap();
                let b = OscillatorPair::new(lambda * w1, lambda * w2, lambda * a.g()).unwrap();
                if (r - 1.0).abs() > 1e-6 {
                    prop_assert_eq!(classify_regime(&a), classify_regime(&b));
                }
            }

            #[test]
            fn hookian_bounds(omega in 0.01..10.0f64, k in 0.001..1000.0f64, dk in 1e-3..1.0f64) {
                let a = hookian_reduce(&HookianSpec::new(1.0, omega, k).unwrap());
                let b = hookian_reduce(&HookianSpec::new(1.0, omega, k * (1.0 + dk)).unwrap());
                prop_assert!(a.renormalized_coupling < 1.0);
                prop_assert!(a.renormalized_coupling < b.renormalized_coupling);
                prop_assert!(a.g_effective < a.omega0);
            }
        }
    }
}
