//! Covariance dynamics: unitary symplectic flow, Lindblad (Lyapunov)
//! propagation, the resonant Mach-Zehnder factorization and entanglement
//! trajectories.
//!
//! Heisenberg convention: quadratures evolve as `r(t) = S(t) r(0)` with
//! `S(t) = exp(Omega H t)` and `Omega = (+) [[0, 1], [-1, 0]]`, so a free
//! oscillator maps `x -> p` after a quarter period. Covariances follow
//! `sigma(t) = S sigma S^T`, and with dissipation
//!
//! ```text
//! d sigma / dt = A sigma + sigma A^T + D,   A = Omega H - Gamma / 2,   D = Gamma_bar
//! ```

use std::collections::HashMap;

use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{build_hamiltonian, diagonal_hamiltonian, HamiltonianMatrix, OscillatorPair};
use crate::numerics::{
    additive_compound, ensure_finite, integrate_matrix, mat_exp, max_abs, pair_index, rk4_integrate, second_compound,
    Mat2, Mat4, DEFAULT_STEPS_PER_UNIT_TIME,
};
use crate::states::{log_negativity_from_nu, nu_minus_from_invariants, purity_from_det, seralian, CovarianceMatrix};

/// Trajectories stop once any covariance entry exceeds this magnitude.
pub const OVERFLOW_LIMIT: f64 = 1e12;

/// Default grid spacing for presets and the death-time coarse scan.
pub const DEFAULT_DT: f64 = 0.01;

/// Default bisection tolerance for [`death_time`].
pub const DEFAULT_DEATH_TOL: f64 = 1e-6;

/// The symplectic form, `(+)_j [[0, 1], [-1, 0]]` in mode-wise ordering.
pub fn symplectic_form() -> Mat4 {
    let mut o = Mat4::zeros();
    o[(0, 1)] = 1.0;
    o[(1, 0)] = -1.0;
    o[(2, 3)] = 1.0;
    o[(3, 2)] = -1.0;
    o
}

/// A real 4x4 matrix with `S^T Omega S = Omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticMatrix(Mat4);

impl SymplecticMatrix {
    /// Checks the symplectic identity to `tol` relative to `max(1, |S|^2)`.
    pub fn new(m: Mat4, tol: f64) -> Result<Self> {
        ensure_finite(&m, "symplectic matrix")?;
        let s = Self(m);
        let scale = max_abs(&m).powi(2).max(1.0);
        if s.symplectic_defect() > tol * scale {
            return Err(invalid(format!("matrix is not symplectic (defect {:e})", s.symplectic_defect())));
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(m: Mat4) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// Largest entry of `S^T Omega S - Omega`.
    pub fn symplectic_defect(&self) -> f64 {
        let o = symplectic_form();
        max_abs(&(self.0.transpose() * o * self.0 - o))
    }

    /// `S^{-1} = -Omega S^T Omega`, exact for symplectic `S`.
    pub fn inverse(&self) -> Self {
        let o = symplectic_form();
        Self(-(o * self.0.transpose() * o))
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }
}

/// `S(t) = exp(Omega H t)`.
pub fn unitary_propagator(h: &HamiltonianMatrix, t: f64) -> Result<SymplecticMatrix> {
    if !t.is_finite() {
        return Err(invalid(format!("time must be finite, got {t}")));
    }
    Ok(SymplecticMatrix(mat_exp(&(h.generator() * t))?))
}

/// RK4 solution of `dS/dt = Omega H S`, `S(0) = I`; an oracle for
/// [`unitary_propagator`].
pub fn unitary_propagator_rk4(h: &HamiltonianMatrix, t: f64, dt: f64) -> Result<Mat4> {
    let gen = h.generator();
    rk4_integrate(|_, s| gen * s, &Mat4::identity(), t, dt)
}

pub fn evolve_unitary(sigma0: &CovarianceMatrix, h: &HamiltonianMatrix, t: f64) -> Result<CovarianceMatrix> {
    let s = unitary_propagator(h, t)?;
    Ok(sigma0.transformed(s.matrix()))
}

/// Seralian and determinant of `sigma(t)` on a unitary orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitInvariants {
    pub seralian: f64,
    pub det: f64,
}

/// `Delta(t)` and `Det sigma(t)` for `sigma(t) = S(t) sigma0 S(t)^T`, without
/// forming `sigma(t)`.
///
/// Both are sums of 2x2 minors, so they follow from the second compound
/// `C2(sigma(t)) = E C2(sigma0) E^T` with `E = exp(t D2(Omega H))`, and
/// `Det sigma(t) = exp(2 tr(Omega H) t) Det sigma0`. Reading them off the
/// rounded `sigma(t)` instead cancels catastrophically once the unstable
/// mode has grown.
pub fn unitary_invariants(sigma0: &CovarianceMatrix, h: &HamiltonianMatrix, t: f64) -> Result<OrbitInvariants> {
    if !t.is_finite() {
        return Err(invalid(format!("time must be finite, got {t}")));
    }
    let gen = h.generator();
    let e = (additive_compound(&gen) * t).exp();
    let minors = e * second_compound(sigma0.matrix()) * e.transpose();
    let (b1, b2) = (pair_index(0, 1), pair_index(2, 3));
    let seralian = minors[(b1, b1)] + minors[(b2, b2)] - 2.0 * minors[(b1, b2)];
    let det = sigma0.det() * (2.0 * gen.trace() * t).exp();
    Ok(OrbitInvariants { seralian, det })
}

/// Single-mode evolution under `(alpha_sq x^2 + beta_sq p^2) / 2`, in the
/// form of the elliptical rotator matrix
///
/// ```text
/// [ cos(ab t)           -(b/a) sin(ab t) ]
/// [ (a/b) sin(ab t)      cos(ab t)       ]
/// ```
///
/// continued to `cosh`/`sinh` (elliptical squeezer) for `alpha_sq < 0` and to
/// the shear `[[1, -beta_sq t], [0, 1]]` at `alpha_sq = 0`. This matrix equals
/// `exp(-Omega_1 h t)` with `h = diag(alpha_sq, beta_sq)`, i.e. the Heisenberg
/// map of this module's convention evaluated at `-t`.
pub fn elliptical_mode_propagator(alpha_sq: f64, beta_sq: f64, t: f64) -> Result<Mat2> {
    if !(beta_sq > 0.0) || !beta_sq.is_finite() {
        return Err(invalid(format!("beta_sq must be positive, got {beta_sq}")));
    }
    if !alpha_sq.is_finite() || !t.is_finite() {
        return Err(invalid("alpha_sq and t must be finite"));
    }
    let beta = beta_sq.sqrt();
    let m = if alpha_sq > 0.0 {
        let alpha = alpha_sq.sqrt();
        let (s, c) = (alpha * beta * t).sin_cos();
        Mat2::new(c, -(beta / alpha) * s, (alpha / beta) * s, c)
    } else if alpha_sq < 0.0 {
        let alpha = (-alpha_sq).sqrt();
        let arg = alpha * beta * t;
        let (s, c) = (arg.sinh(), arg.cosh());
        Mat2::new(c, -(beta / alpha) * s, -(alpha / beta) * s, c)
    } else {
        Mat2::new(1.0, -beta_sq * t, 0.0, 1.0)
    };
    Ok(m)
}

/// Phase-space matrix of `exp[i(A x1 p2 - B x2 p1)]` without any consistency
/// check against a Hamiltonian.
fn mixing_transform(a: f64, b: f64) -> Result<Mat4> {
    let mut gen = Mat4::zeros();
    gen[(0, 2)] = -b;
    gen[(2, 0)] = a;
    gen[(1, 3)] = -a;
    gen[(3, 1)] = b;
    mat_exp(&gen)
}

/// Spectral-norm distance between the coupled propagator `S(t)` and its
/// resonant Mach-Zehnder factorization: 50:50 splitter, independent
/// `'+'`/`'-'` arm evolutions, inverse splitter.
///
/// In this module's convention the factorization reads
/// `S(t) = S_T (S_+(t) (+) S_-(t)) S_T^{-1}` with `S_T` the splitter that
/// diagonalizes `H` as `S_T^T H S_T`.
pub fn mach_zehnder_residual(osc: &OscillatorPair, t: f64) -> Result<f64> {
    if !osc.is_resonant() {
        return Err(invalid(format!(
            "Mach-Zehnder factorization needs omega1 == omega2, got {} and {}",
            osc.omega1(),
            osc.omega2()
        )));
    }
    let h = build_hamiltonian(osc);
    let full = unitary_propagator(&h, t)?;
    let splitter = SymplecticMatrix(mixing_transform(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4)?);
    let (plus, minus) = diagonal_hamiltonian(osc);
    let arm_plus = elliptical_mode_propagator(plus.x_coeff, plus.p_coeff, -t)?;
    let arm_minus = elliptical_mode_propagator(minus.x_coeff, minus.p_coeff, -t)?;
    let mut arms = Mat4::zeros();
    arms.fixed_view_mut::<2, 2>(0, 0).copy_from(&arm_plus);
    arms.fixed_view_mut::<2, 2>(2, 2).copy_from(&arm_minus);
    let factored = splitter.matrix() * arms * splitter.inverse().matrix();
    Ok(spectral_norm(&(full.matrix() - factored)))
}

fn spectral_norm(m: &Mat4) -> f64 {
    m.singular_values().max()
}

/// Coupling of each bare mode to its own thermal bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationSpec {
    pub gamma1: f64,
    pub gamma2: f64,
    pub nbar1: f64,
    pub nbar2: f64,
}

impl DissipationSpec {
    pub fn new(gamma1: f64, gamma2: f64, nbar1: f64, nbar2: f64) -> Result<Self> {
        for (name, v) in [("gamma1", gamma1), ("gamma2", gamma2), ("nbar1", nbar1), ("nbar2", nbar2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be non-negative and finite, got {v}")));
            }
        }
        Ok(Self { gamma1, gamma2, nbar1, nbar2 })
    }

    pub fn none() -> Self {
        Self { gamma1: 0.0, gamma2: 0.0, nbar1: 0.0, nbar2: 0.0 }
    }
}

/// Drift `A = Omega H - Gamma / 2` and diffusion `D = Gamma_bar`.
pub fn drift_and_diffusion(h: &HamiltonianMatrix, d: &DissipationSpec) -> (Mat4, Mat4) {
    let gamma = Mat4::from_diagonal(&nalgebra::Vector4::new(d.gamma1, d.gamma1, d.gamma2, d.gamma2));
    let n1 = d.gamma1 * (d.nbar1 + 0.5);
    let n2 = d.gamma2 * (d.nbar2 + 0.5);
    let diffusion = Mat4::from_diagonal(&nalgebra::Vector4::new(n1, n1, n2, n2));
    (h.generator() - gamma * 0.5, diffusion)
}

/// Eigenvalues of a drift matrix, sorted by real part then imaginary part.
pub fn drift_eigenvalues(a: &Mat4) -> Vec<Complex<f64>> {
    let mut ev: Vec<_> = a.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    ev
}

/// Largest real part among the eigenvalues of `a`.
pub fn max_growth_rate(a: &Mat4) -> f64 {
    a.complex_eigenvalues().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Exact map of the Lyapunov flow over an interval of length `h`:
/// `sigma -> K sigma K^T + Q` with `K = exp(A h)` and
/// `Q = int_0^h exp(A s) D exp(A s)^T ds`.
#[derive(Debug, Clone, Copy)]
struct IntervalMap {
    k: Mat4,
    q: Mat4,
}

impl IntervalMap {
    fn new(a: &Mat4, d: &Mat4, h: f64, steps_per_unit: usize) -> Result<Self> {
        let k = mat_exp(&(a * h))?;
        let steps = ((steps_per_unit as f64 * h).ceil() as usize).max(16);
        let q = integrate_matrix(
            |s| {
                // a and s are finite here, so the exponential cannot fail
                let ks = (a * s).exp();
                ks * d * ks.transpose()
            },
            0.0,
            h,
            steps,
        )?;
        Ok(Self { k, q })
    }

    fn apply(&self, sigma: &Mat4) -> Mat4 {
        let m = self.k * sigma * self.k.transpose() + self.q;
        (m + m.transpose()) * 0.5
    }
}

/// Closed-form solution of the covariance equation of motion,
/// `sigma(t) = K(t) {sigma(0) + int_0^t K(-tau) D K^T(-tau) dtau} K^T(t)`,
/// with `K(t) = exp(A t)`. The integral is evaluated after the substitution
/// `s = t - tau` as `int_0^t K(s) D K^T(s) ds` using
/// [`DEFAULT_STEPS_PER_UNIT_TIME`] Simpson nodes per unit time.
pub fn evolve_dissipative(
    sigma0: &CovarianceMatrix,
    h: &HamiltonianMatrix,
    d: &DissipationSpec,
    t: f64,
) -> Result<CovarianceMatrix> {
    evolve_dissipative_with_steps(sigma0, h, d, t, DEFAULT_STEPS_PER_UNIT_TIME)
}

pub fn evolve_dissipative_with_steps(
    sigma0: &CovarianceMatrix,
    h: &HamiltonianMatrix,
    d: &DissipationSpec,
    t: f64,
    steps_per_unit: usize,
) -> Result<CovarianceMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("time must be non-negative and finite, got {t}")));
    }
    if t == 0.0 {
        return Ok(*sigma0);
    }
    let (a, diff) = drift_and_diffusion(h, d);
    let map = IntervalMap::new(&a, &diff, t, steps_per_unit)?;
    Ok(CovarianceMatrix::from_raw(map.apply(sigma0.matrix())))
}

/// RK4 integration of `d sigma/dt = A sigma + sigma A^T + D`; the
/// independent cross-check for [`evolve_dissipative`].
pub fn evolve_dissipative_rk4(
    sigma0: &CovarianceMatrix,
    h: &HamiltonianMatrix,
    d: &DissipationSpec,
    t: f64,
    dt: f64,
) -> Result<CovarianceMatrix> {
    let (a, diff) = drift_and_diffusion(h, d);
    let m = rk4_integrate(|_, s| a * s + s * a.transpose() + diff, sigma0.matrix(), t, dt)?;
    Ok(CovarianceMatrix::from_raw(m))
}

/// Observables at one time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub log_negativity: f64,
    pub seralian: f64,
    pub nu_minus: f64,
    pub purity: f64,
    /// Row-major covariance entries when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<[f64; 16]>,
}

impl TrajectoryRecord {
    /// Observables with `Det sigma` taken from the matrix entries.
    pub fn from_state(t: f64, sigma: &CovarianceMatrix, keep_sigma: bool) -> Result<Self> {
        Self::build(t, sigma, seralian(sigma), sigma.det(), keep_sigma)
    }

    /// Observables from invariants computed elsewhere, see
    /// [`unitary_invariants`].
    pub fn with_invariants(t: f64, sigma: &CovarianceMatrix, inv: OrbitInvariants, keep_sigma: bool) -> Result<Self> {
        Self::build(t, sigma, inv.seralian, inv.det, keep_sigma)
    }

    fn build(t: f64, sigma: &CovarianceMatrix, delta: f64, det: f64, keep_sigma: bool) -> Result<Self> {
        let nu = nu_minus_from_invariants(delta, det)?;
        let purity = purity_from_det(det)?;
        let sigma = keep_sigma.then(|| {
            let m = sigma.matrix();
            std::array::from_fn(|k| m[(k / 4, k % 4)])
        });
        Ok(Self { t, log_negativity: log_negativity_from_nu(nu), seralian: delta, nu_minus: nu, purity, sigma })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    /// First grid time at which a covariance entry exceeded
    /// [`OVERFLOW_LIMIT`]; records stop just before it.
    pub truncated_at: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    pub keep_sigma: bool,
    pub steps_per_unit: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self { keep_sigma: false, steps_per_unit: DEFAULT_STEPS_PER_UNIT_TIME }
    }
}

/// `n + 1` equally spaced points `0, dt, ..., n dt` with `n = round(t_max / dt)`.
pub fn uniform_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(invalid(format!("bad grid: t_max = {t_max}, dt = {dt}")));
    }
    let n = (t_max / dt).round() as usize;
    Ok((0..=n).map(|k| k as f64 * dt).collect())
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(invalid("time grid has non-finite entries"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("time grid must be strictly increasing"));
    }
    Ok(())
}

/// Entanglement observables along `t_grid`. Uses the unitary closed form
/// when `d` is `None` (points evaluated in parallel) and the exact Lyapunov
/// interval map otherwise.
pub fn entanglement_trajectory(
    sigma0: &CovarianceMatrix,
    h: &HamiltonianMatrix,
    d: Option<&DissipationSpec>,
    t_grid: &[f64],
    opts: TrajectoryOptions,
) -> Result<Trajectory> {
    check_grid(t_grid)?;
    let states: Vec<(CovarianceMatrix, Option<OrbitInvariants>)> = match d {
        None => t_grid
            .par_iter()
            .map(|&t| Ok((evolve_unitary(sigma0, h, t)?, Some(unitary_invariants(sigma0, h, t)?))))
            .collect::<Result<Vec<_>>>()?,
        Some(d) => {
            dissipative_states(sigma0, h, d, t_grid, opts.steps_per_unit)?.into_iter().map(|s| (s, None)).collect()
        }
    };
    let mut records = Vec::with_capacity(states.len());
    let mut truncated_at = None;
    for (&t, (s, inv)) in t_grid.iter().zip(&states) {
        if !(max_abs(s.matrix()) <= OVERFLOW_LIMIT) {
            truncated_at = Some(t);
            break;
        }
        let rec = match inv {
            Some(inv) => TrajectoryRecord::with_invariants(t, s, *inv, opts.keep_sigma)?,
            None => TrajectoryRecord::from_state(t, s, opts.keep_sigma)?,
        };
        records.push(rec);
    }
    Ok(Trajectory { records, truncated_at })
}

fn dissipative_states(
    sigma0: &CovarianceMatrix,
    h: &HamiltonianMatrix,
    d: &DissipationSpec,
    t_grid: &[f64],
    steps_per_unit: usize,
) -> Result<Vec<CovarianceMatrix>> {
    if t_grid.first().is_some_and(|&t| t < 0.0) {
        return Err(invalid("dissipative evolution needs t >= 0"));
    }
    let (a, diff) = drift_and_diffusion(h, d);
    let mut cache: HashMap<u64, IntervalMap> = HashMap::new();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut current = *sigma0.matrix();
    let mut t_prev = 0.0;
    for &t in t_grid {
        let step = t - t_prev;
        if step > 0.0 {
            if !(max_abs(&current) <= OVERFLOW_LIMIT) {
                // past the guard; the caller truncates here anyway
                out.push(CovarianceMatrix::from_raw(current));
                continue;
            }
            // grids built as k * dt give steps equal to within a few ulps
            let key = (step / 1e-12).round() as u64;
            let map = match cache.get(&key) {
                Some(m) => *m,
                None => {
                    let m = IntervalMap::new(&a, &diff, step, steps_per_unit)?;
                    cache.insert(key, m);
                    m
                }
            };
            current = map.apply(&current);
        }
        out.push(CovarianceMatrix::from_raw(current));
        t_prev = t;
    }
    Ok(out)
}

/// First time after the global log-negativity maximum at which the state
/// becomes separable again, scanning at [`DEFAULT_DT`] and refining by
/// bisection to `tol`.
pub fn death_time(
    sigma0: &CovarianceMatrix,
    h: &HamiltonianMatrix,
    d: &DissipationSpec,
    t_max: f64,
    tol: f64,
) -> Result<Option<f64>> {
    death_time_with_step(sigma0, h, d, t_max, tol, DEFAULT_DT)
}

pub fn death_time_with_step(
    sigma0: &CovarianceMatrix,
    h: &HamiltonianMatrix,
    d: &DissipationSpec,
    t_max: f64,
    tol: f64,
    dt: f64,
) -> Result<Option<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) || !(tol > 0.0) {
        return Err(invalid(format!("death_time needs t_max > 0 and tol > 0, got {t_max}, {tol}")));
    }
    let grid = uniform_grid(t_max, dt)?;
    let states = dissipative_states(sigma0, h, d, &grid, DEFAULT_STEPS_PER_UNIT_TIME)?;
    // unclamped -ln(2 nu); positive means entangled
    let mut margin = Vec::with_capacity(grid.len());
    for s in &states {
        if !(max_abs(s.matrix()) <= OVERFLOW_LIMIT) {
            break;
        }
        margin.push(entanglement_margin(s)?);
    }
    let Some((peak, &peak_val)) =
        margin.iter().enumerate().fold(None, |best: Option<(usize, &f64)>, (i, v)| match best {
            Some((_, b)) if *b >= *v => best,
            _ => Some((i, v)),
        })
    else {
        return Ok(None);
    };
    if peak_val <= 0.0 {
        return Ok(None);
    }
    let Some(zero) = (peak + 1..margin.len()).find(|&k| margin[k] <= 0.0) else {
        return Ok(None);
    };
    let (a, diff) = drift_and_diffusion(h, d);
    let base = states[zero - 1];
    let (mut lo, mut hi) = (grid[zero - 1], grid[zero]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let map = IntervalMap::new(&a, &diff, mid - grid[zero - 1], DEFAULT_STEPS_PER_UNIT_TIME)?;
        let s = CovarianceMatrix::from_raw(map.apply(base.matrix()));
        if entanglement_margin(&s)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(hi))
}

fn entanglement_margin(s: &CovarianceMatrix) -> Result<f64> {
    let nu = nu_minus_from_invariants(seralian(s), s.det())?;
    Ok(-(2.0 * nu).ln())
}
