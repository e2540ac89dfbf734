//! Small dense-matrix utilities.
//!
//! Everything here works on the fixed-size value types [`Mat2`] and [`Mat4`];
//! the system has exactly two modes, so no dynamic sizing is needed.

use nalgebra::{Matrix2, Matrix4, Matrix6};

use crate::error::{invalid, Result};

pub type Mat2 = Matrix2<f64>;
pub type Mat4 = Matrix4<f64>;
/// Operators on the 6-dimensional space of 2-forms over phase space.
pub type Mat6 = Matrix6<f64>;

/// Index pairs `i < j` labelling the basis `e_i ^ e_j` of 2-forms.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn pair_index(i: usize, j: usize) -> usize {
    PAIRS.iter().position(|&p| p == (i.min(j), i.max(j))).expect("indices below 4 and distinct")
}

/// Quadrature nodes per unit of dimensionless time used by the closed-form
/// dissipative solution.
pub const DEFAULT_STEPS_PER_UNIT_TIME: usize = 1000;

pub fn is_finite4(m: &Mat4) -> bool {
    m.iter().all(|v| v.is_finite())
}

pub fn ensure_finite(m: &Mat4, what: &str) -> Result<()> {
    if is_finite4(m) {
        Ok(())
    } else {
        Err(invalid(format!("{what} has non-finite entries")))
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant (nalgebra's implementation of Higham's algorithm).
pub fn mat_exp(m: &Mat4) -> Result<Mat4> {
    ensure_finite(m, "matrix exponential argument")?;
    Ok(m.exp())
}

/// Second multiplicative compound: all 2x2 minors `det m[I, J]`.
pub fn second_compound(m: &Mat4) -> Mat6 {
    Mat6::from_fn(|r, c| {
        let (i, j) = PAIRS[r];
        let (k, l) = PAIRS[c];
        m[(i, k)] * m[(j, l)] - m[(i, l)] * m[(j, k)]
    })
}

/// Second additive compound, the derivation `m` induces on 2-forms:
/// `e_k ^ e_l -> (m e_k) ^ e_l + e_k ^ (m e_l)`. It satisfies
/// `second_compound(exp(m t)) = exp(additive_compound(m) t)`.
pub fn additive_compound(m: &Mat4) -> Mat6 {
    Mat6::from_fn(|r, c| {
        let (i, j) = PAIRS[r];
        let (k, l) = PAIRS[c];
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        m[(i, k)] * d(j, l) + m[(j, l)] * d(i, k) - m[(i, l)] * d(j, k) - m[(j, k)] * d(i, l)
    })
}

/// Composite Simpson quadrature of a matrix-valued function, entrywise.
///
/// An odd `steps` is rounded up to the next even count.
pub fn integrate_matrix<F>(f: F, t0: f64, t1: f64, steps: usize) -> Result<Mat4>
where
    F: Fn(f64) -> Mat4,
{
    if steps < 2 {
        return Err(invalid(format!("quadrature needs at least 2 steps, got {steps}")));
    }
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(invalid(format!("bad quadrature interval [{t0}, {t1}]")));
    }
    if t1 == t0 {
        return Ok(Mat4::zeros());
    }
    let n = steps + steps % 2;
    let h = (t1 - t0) / n as f64;
    let mut acc = f(t0) + f(t1);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(t0 + k as f64 * h) * w;
    }
    Ok(acc * (h / 3.0))
}

/// Classical fourth-order Runge-Kutta for a matrix ODE `dS/dt = rhs(t, S)`
/// from `0` to `t`.
///
/// The step is shrunk slightly so that an integer number of equal steps lands
/// exactly on `t`.
pub fn rk4_integrate<F>(rhs: F, sigma0: &Mat4, t: f64, dt: f64) -> Result<Mat4>
where
    F: Fn(f64, &Mat4) -> Mat4,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid(format!("RK4 step must be positive, got {dt}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("RK4 end time must be non-negative, got {t}")));
    }
    ensure_finite(sigma0, "RK4 initial value")?;
    let n = (t / dt - 1e-9).ceil().max(0.0) as usize;
    if n == 0 {
        return Ok(*sigma0);
    }
    let h = t / n as f64;
    let mut y = *sigma0;
    for k in 0..n {
        let tk = k as f64 * h;
        let k1 = rhs(tk, &y);
        let k2 = rhs(tk + 0.5 * h, &(y + k1 * (0.5 * h)));
        let k3 = rhs(tk + 0.5 * h, &(y + k2 * (0.5 * h)));
        let k4 = rhs(tk + h, &(y + k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Truncated Taylor series; independent of the Padé path.
    fn taylor_exp(m: &Mat4, terms: usize) -> Mat4 {
        let mut term = Mat4::identity();
        let mut sum = Mat4::identity();
        for k in 1..terms {
            term = term * m / k as f64;
            sum += term;
        }
        sum
    }

    fn rotation_generator() -> Mat4 {
        let mut j = Mat4::zeros();
        j[(0, 1)] = -1.0;
        j[(1, 0)] = 1.0;
        j[(2, 3)] = -1.0;
        j[(3, 2)] = 1.0;
        j
    }

    fn rel_err(a: &Mat4, b: &Mat4) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(mat_exp(&Mat4::zeros()).unwrap(), Mat4::identity());
    }

    #[test]
    fn exp_of_diagonal() {
        let d = Mat4::from_diagonal(&nalgebra::Vector4::new(0.3, -1.2, 2.5, 0.0));
        let e = mat_exp(&d).unwrap();
        for i in 0..4 {
            assert!((e[(i, i)] - d[(i, i)].exp()).abs() <= 1e-14 * d[(i, i)].exp());
        }
        assert!((e - Mat4::from_diagonal(&e.diagonal())).norm() == 0.0);
    }

    #[test]
    fn exp_of_block_rotation_generator() {
        let theta = 0.7;
        let m = rotation_generator() * theta;
        let e = mat_exp(&m).unwrap();
        let oracle = taylor_exp(&m, 64);
        assert!(rel_err(&e, &oracle) < 1e-14);
        assert!((e[(0, 0)] - theta.cos()).abs() < 1e-15);
        assert!((e[(1, 0)] - theta.sin()).abs() < 1e-15);
    }

    #[test]
    fn exp_matches_taylor_on_large_non_normal_matrix() {
        // Norm near 50: compare exp(M) against (taylor(M / 2^k))^(2^k).
        let m = Mat4::new(
            0.0, 5.0, 30.0, 0.0, //
            -5.0, -0.1, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            -30.0, 0.0, -1.0, -0.2,
        ) * 0.8;
        let k = 10;
        let mut oracle = taylor_exp(&(m / f64::from(1u32 << k)), 30);
        for _ in 0..k {
            oracle = oracle * oracle;
        }
        assert!(rel_err(&mat_exp(&m).unwrap(), &oracle) < 1e-12);
    }

    #[test]
    fn compound_of_exponential_is_exponential_of_additive_compound() {
        let m = Mat4::new(
            0.1, 1.0, 0.3, 0.0, //
            -2.0, 0.0, 0.5, -0.2, //
            0.0, 0.4, -0.3, 1.5, //
            0.7, 0.0, -1.0, 0.2,
        );
        for t in [0.0, 0.5, 2.0] {
            let lhs = second_compound(&mat_exp(&(m * t)).unwrap());
            let rhs = (additive_compound(&m) * t).exp();
            assert!((lhs - rhs).amax() < 1e-12 * rhs.amax().max(1.0));
        }
        // Cauchy-Binet
        let a = Mat4::from_fn(|i, j| ((i * 3 + j * 7) % 5) as f64 - 1.5);
        let b = Mat4::from_fn(|i, j| ((i + 2 * j) % 3) as f64 + 0.25);
        let lhs = second_compound(&(a * b));
        let rhs = second_compound(&a) * second_compound(&b);
        assert!((lhs - rhs).amax() < 1e-12);
        assert_eq!(pair_index(3, 1), 4);
    }

    #[test]
    fn exp_rejects_non_finite() {
        let mut m = Mat4::zeros();
        m[(2, 1)] = f64::NAN;
        assert!(mat_exp(&m).is_err());
    }

    #[test]
    fn simpson_constant_and_linear() {
        let c = Mat4::from_fn(|i, j| (i * 4 + j) as f64 - 3.5);
        let got = integrate_matrix(|_| c, 0.0, 1.0, 2).unwrap();
        assert!((got - c).norm() < 1e-14);
        let got = integrate_matrix(|_| c, 0.0, 1.0, 7).unwrap();
        assert!((got - c).norm() < 1e-14);
        let got = integrate_matrix(|t| Mat4::identity() * t, 0.0, 2.0, 100).unwrap();
        assert!((got - Mat4::identity() * 2.0).norm() < 1e-13);
    }

    #[test]
    fn simpson_rejects_too_few_steps() {
        assert!(integrate_matrix(|_| Mat4::zeros(), 0.0, 1.0, 1).is_err());
        assert!(integrate_matrix(|_| Mat4::zeros(), 1.0, 0.0, 10).is_err());
    }

    #[test]
    fn simpson_matches_lyapunov_integral_by_eigendecomposition() {
        // Symmetric stable A = V diag(l) V^T: the integral of exp(A s) D exp(A^T s)
        // over [0, t] has entries (V^T D V)_ij (exp((l_i + l_j) t) - 1) / (l_i + l_j)
        // in the eigenbasis.
        let a = Mat4::new(
            -1.0, 0.3, 0.0, 0.1, //
            0.3, -0.7, 0.2, 0.0, //
            0.0, 0.2, -0.5, 0.05, //
            0.1, 0.0, 0.05, -1.3,
        );
        let d = Mat4::from_diagonal(&nalgebra::Vector4::new(0.2, 0.4, 0.1, 0.3));
        let t = 3.0;
        let eig = a.symmetric_eigen();
        let v = eig.eigenvectors;
        let l = eig.eigenvalues;
        let dd = v.transpose() * d * v;
        let inner = Mat4::from_fn(|i, j| {
            let s = l[i] + l[j];
            dd[(i, j)] * ((s * t).exp() - 1.0) / s
        });
        let oracle = v * inner * v.transpose();
        let got = integrate_matrix(
            |s| {
                let k = mat_exp(&(a * s)).unwrap();
                k * d * k.transpose()
            },
            0.0,
            t,
            3000,
        )
        .unwrap();
        assert!(rel_err(&got, &oracle) < 1e-12);
    }

    #[test]
    fn rk4_zero_rhs_and_exponential_decay() {
        let s0 = Mat4::from_fn(|i, j| 1.0 / (1 + i + j) as f64);
        let got = rk4_integrate(|_, _| Mat4::zeros(), &s0, 3.0, 0.1).unwrap();
        assert_eq!(got, s0);
        let got = rk4_integrate(|_, y| -y, &Mat4::identity(), 1.0, 1e-3).unwrap();
        assert!((got - Mat4::identity() * (-1.0f64).exp()).amax() < 1e-10);
    }

    #[test]
    fn rk4_rejects_bad_steps() {
        assert!(rk4_integrate(|_, y| *y, &Mat4::identity(), 1.0, 0.0).is_err());
        assert!(rk4_integrate(|_, y| *y, &Mat4::identity(), 1.0, -1.0).is_err());
        assert!(rk4_integrate(|_, y| *y, &Mat4::identity(), -1.0, 0.1).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn mat4(bound: f64) -> impl Strategy<Value = Mat4> {
            proptest::collection::vec(-1.0..1.0f64, 16).prop_map(move |v| {
                let m = Mat4::from_iterator(v);
                // scale into the ball of Frobenius norm `bound`
                let n = m.norm().max(1e-12);
                m * (bound / n) * 0.99
            })
        }

        fn orthogonal() -> impl Strategy<Value = Mat4> {
            proptest::collection::vec(-1.0..1.0f64, 16).prop_map(|v| Mat4::from_iterator(v).qr().q())
        }

        proptest! {
            #[test]
            fn exp_inverse_pair(m in mat4(10.0)) {
                let p = mat_exp(&m).unwrap() * mat_exp(&(-m)).unwrap();
                prop_assert!((p - Mat4::identity()).amax() < 1e-10);
            }

            #[test]
            fn exp_commutes_with_orthogonal_similarity(m in mat4(5.0), q in orthogonal()) {
                let lhs = mat_exp(&(q.transpose() * m * q)).unwrap();
                let rhs = q.transpose() * mat_exp(&m).unwrap() * q;
                prop_assert!((lhs - rhs).amax() < 1e-10 * rhs.amax().max(1.0));
            }

            #[test]
            fn simpson_is_linear_and_additive(
                a in mat4(3.0), b in mat4(3.0), w in -2.0..2.0f64, mid in 0.2..1.8f64
            ) {
                let f = |s: f64| a * s.sin() + b * (s * s);
                let g = |s: f64| b * s.cos();
                let lin = integrate_matrix(|s| f(s) + g(s) * w, 0.0, 2.0, 400).unwrap();
                let sep = integrate_matrix(f, 0.0, 2.0, 400).unwrap()
                    + integrate_matrix(g, 0.0, 2.0, 400).unwrap() * w;
                prop_assert!((lin - sep).amax() < 1e-12);
                let whole = integrate_matrix(f, 0.0, 2.0, 2000).unwrap();
                let split = integrate_matrix(f, 0.0, mid, 1000).unwrap()
                    + integrate_matrix(f, mid, 2.0, 1000).unwrap();
                prop_assert!((whole - split).amax() < 1e-9);
            }
        }
    }
}
