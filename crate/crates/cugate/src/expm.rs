//! Dense complex matrix exponential via scaling-and-squaring with a
//! Pade(13) approximant.
//!
//! This is the numerical backend for the propagator oracle: it knows nothing
//! about the closed-form time evolutions it is used to cross-check.

use ndarray::{s, Array2};
use num_complex::Complex64;

/// Pade(13,13) numerator coefficients.
const PADE_COEFFS: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Threshold on the 1-norm above which the argument is scaled down.
const THETA_13: f64 = 5.371920351148152;

/// Compute `exp(A)` for a square complex matrix.
///
/// # Panics
/// Panics if `a` is not square or is singular to working precision inside
/// the Pade solve (does not happen for the anti-Hermitian arguments used by
/// the propagator oracle).
pub fn matrix_exp(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix_exp requires a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    if n == 1 {
        let mut out = Array2::zeros((1, 1));
        out[(0, 0)] = a[(0, 0)].exp();
        return out;
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(squarings as i32), 0.0);
    let scaled = a.mapv(|z| z * scale);

    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

fn pade13(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let eye: Array2<Complex64> = Array2::eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let b = |k: usize| Complex64::new(PADE_COEFFS[k], 0.0);

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_poly = a6.dot(&u_inner) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &eye * b(1);
    let u = a.dot(&u_poly);

    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&v_inner) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &eye * b(0);

    let rhs = &v + &u;
    let lhs = &v - &u;
    solve(lhs, rhs)
}

/// Solve `A X = B` by Gaussian elimination with partial pivoting.
fn solve(a: Array2<Complex64>, b: Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let m = b.ncols();
    let mut aug = Array2::zeros((n, n + m));
    aug.slice_mut(s![.., ..n]).assign(&a);
    aug.slice_mut(s![.., n..]).assign(&b);

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = aug[(col, col)].norm();
        for row in (col + 1)..n {
            let mag = aug[(row, col)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        assert!(pivot_mag > 1e-300, "singular matrix in Pade solve");
        if pivot_row != col {
            for j in 0..(n + m) {
                aug.swap((col, j), (pivot_row, j));
            }
        }
        let pivot = aug[(col, col)];
        for row in (col + 1)..n {
            let factor = aug[(row, col)] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..(n + m) {
                let v = aug[(col, j)];
                aug[(row, j)] -= factor * v;
            }
        }
    }

    let mut x = Array2::<Complex64>::zeros((n, m));
    for col in (0..n).rev() {
        let pivot = aug[(col, col)];
        for j in 0..m {
            let mut sum = aug[(col, n + j)];
            for k in (col + 1)..n {
                sum -= aug[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = sum / pivot;
        }
    }
    x
}

fn one_norm(a: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for col in a.columns() {
        let sum: f64 = col.iter().map(|z| z.norm()).sum();
        worst = worst.max(sum);
    }
    worst
}
