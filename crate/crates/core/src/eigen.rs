//! Cyclic Jacobi eigen-decomposition for 3×3 symmetric matrices.

use nalgebra::Matrix3;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues sorted descending, with eigenvectors as the matching columns.
///
/// Sweeps rotate through (0,1), (0,2), (1,2) in that order until the
/// off-diagonal mass is negligible, so the output is deterministic.
pub fn jacobi_eigen_sym3(m: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = Matrix3::identity();
    let scale = a.abs().max();
    if scale == 0.0 {
        return ([0.0; 3], v);
    }

    for _ in 0..MAX_SWEEPS {
        let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;

            let mut rot = Matrix3::identity();
            rot[(p, p)] = c;
            rot[(q, q)] = c;
            rot[(p, q)] = s;
            rot[(q, p)] = -s;
            a = rot.transpose() * a * rot;
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
            v *= rot;
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.map(|i| a[(i, i)]);
    let vectors = Matrix3::from_columns(&order.map(|i| v.column(i).into_owned()));
    (values, vectors)
}
