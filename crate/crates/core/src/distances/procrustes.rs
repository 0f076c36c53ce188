use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::Matrix;

/// `‖T A − B‖_F`.
pub fn procrustes_objective(t: &Matrix, a: &Matrix, b: &Matrix) -> f64 {
    (t * a - b).norm()
}

/// Singular pairs of a square `m` split into range and null parts:
/// `(U_r, V_r, U_0, V_0)` with `m V_r = U_r S`.
///
/// Built from the symmetric eigenproblem of `mᵀm` rather than a direct SVD,
/// which is unreliable on exactly rank-deficient input. Singular values below
/// `1e-7 · s_max` count as zero.
fn split_singular(m: &Matrix) -> (Matrix, Matrix, Matrix, Matrix) {
    let d = m.ncols();
    let eig = SymmetricEigen::new(m.transpose() * m);
    let s: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let s_max = s.iter().copied().fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let (range, null): (Vec<usize>, Vec<usize>) = order.into_iter().partition(|&k| s_max > 0.0 && s[k] > 1e-7 * s_max);

    let v_r = eig.eigenvectors.select_columns(&range);
    let v_0 = eig.eigenvectors.select_columns(&null);
    let mut u_r = m * &v_r;
    for mut col in u_r.column_iter_mut() {
        let n = col.norm();
        col /= n;
    }
    if !range.is_empty() {
        // Clean up round-off while keeping each column's sign.
        let qr = u_r.clone().qr();
        let (mut q, r) = (qr.q(), qr.r());
        for (k, mut col) in q.column_iter_mut().enumerate() {
            if r[(k, k)] < 0.0 {
                col.neg_mut();
            }
        }
        u_r = q;
    }
    let u_0 = complement(&u_r, d);
    (u_r, v_r, u_0, v_0)
}

/// Orthonormal basis of the orthogonal complement of the columns of `basis`.
fn complement(basis: &Matrix, d: usize) -> Matrix {
    let projector = Matrix::identity(d, d) - basis * basis.transpose();
    let eig = SymmetricEigen::new(projector);
    let keep: Vec<usize> = (0..d).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
    eig.eigenvectors.select_columns(&keep)
}

/// Orthogonal `T` minimizing `‖T A − B‖_F`.
///
/// The minimizer is `U Vᵀ` from the SVD of `B Aᵀ`. When `B Aᵀ` is rank
/// deficient the minimizer is not unique on the null space; there the
/// returned `T` is the one closest to the identity, so `A = B` always yields
/// `T = I`.
pub fn orthogonal_procrustes(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let (u_r, v_r, u_0, v_0) = split_singular(&(b * a.transpose()));
    let mut t = &u_r * v_r.transpose();
    if v_0.ncols() > 0 {
        // Maximize tr(U0 Q V0ᵀ) = tr(Q C) over orthogonal Q.
        let c = v_0.transpose() * &u_0;
        let (p_r, r_r, p_0, r_0) = split_singular(&c);
        let q = r_r * p_r.transpose() + r_0 * p_0.transpose();
        t += u_0 * q * v_0.transpose();
    }
    if t.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, m: usize, rng: &mut impl Rng) -> Matrix {
        Matrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0))
    }

    fn orthogonality_error(t: &Matrix) -> f64 {
        (t.transpose() * t - Matrix::identity(t.nrows(), t.nrows())).norm()
    }

    #[test]
    fn identical_inputs_give_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random(3, 5, &mut rng);
        let t = orthogonal_procrustes(&a, &a).unwrap();
        assert!((t - Matrix::identity(3, 3)).norm() < 1e-12);

        // Rank-one case, as with single-output ELM weights.
        let a = random(20, 1, &mut rng);
        let t = orthogonal_procrustes(&a, &a).unwrap();
        assert!((t - Matrix::identity(20, 20)).norm() < 1e-10);
    }

    #[test]
    fn recovers_quarter_turn() {
        let r = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let a = Matrix::from_row_slice(2, 3, &[1.0, 0.5, -0.3, 0.2, 2.0, 0.7]);
        let b = &r * &a;
        let t = orthogonal_procrustes(&a, &b).unwrap();
        assert!((&t - &r).norm() < 1e-10);
        assert!(procrustes_objective(&t, &a, &b) < 1e-10);
    }

    #[test]
    fn rank_one_alignment_is_a_plane_rotation() {
        let a = Matrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = Matrix::from_column_slice(3, 1, &[0.0, 2.0, 0.0]);
        let t = orthogonal_procrustes(&a, &b).unwrap();
        assert!(orthogonality_error(&t) < 1e-12);
        // Maps e1 onto e2 and leaves e3 alone.
        assert!((t.column(0) - Matrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0])).norm() < 1e-12);
        assert!((t.column(2) - Matrix::from_column_slice(3, 1, &[0.0, 0.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let a = Matrix::zeros(2, 2);
        assert!(matches!(orthogonal_procrustes(&a, &Matrix::zeros(2, 3)), Err(Error::ShapeMismatch(_))));
        let mut b = Matrix::zeros(2, 2);
        b[(0, 0)] = f64::NAN;
        assert!(matches!(orthogonal_procrustes(&a, &b), Err(Error::NonFiniteInput)));
    }

    #[test]
    fn zero_inputs_give_identity() {
        let z = Matrix::zeros(4, 2);
        let t = orthogonal_procrustes(&z, &z).unwrap();
        assert!((t - Matrix::identity(4, 4)).norm() < 1e-12);
    }
}
