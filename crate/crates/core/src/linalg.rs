//! Dense linear-algebra helpers shared by the cochain and Hodge layers.
//!
//! Every dimension decision in the crate goes through [`rank_cutoff`], so
//! the numerical rank rule lives in exactly one place.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative singular-value cutoff used for every rank decision.
pub const RANK_RELATIVE: f64 = 1e-8;

/// Absolute cutoff for a set of singular values.
///
/// The largest singular value is floored at one: the operators built here
/// have entries of order one, and a floor keeps pure round-off (e.g. the
/// differential of the trivial representation) from being promoted to rank.
pub fn rank_cutoff(singular_values: &DVector<f64>) -> f64 {
    let largest = singular_values.iter().cloned().fold(0.0_f64, f64::max);
    RANK_RELATIVE * largest.max(1.0)
}

/// Full singular value decomposition, singular values in nonincreasing order.
struct Svd {
    /// `rows x rows`.
    u: DMatrix<f64>,
    /// `min(rows, cols)` entries.
    singular_values: DVector<f64>,
    /// `cols x cols`, right singular vectors as columns.
    v: DMatrix<f64>,
}

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn full_svd(m: &DMatrix<f64>) -> Svd {
    let svd = to_faer(m)
        .svd()
        .expect("singular value decomposition converges");
    let s = svd.S().column_vector();
    Svd {
        u: from_faer(svd.U()),
        singular_values: DVector::from_fn(s.nrows(), |i, _| s[i]),
        v: from_faer(svd.V()),
    }
}

/// Orthogonal polar factor `U V^T` of a square matrix.
pub fn polar_orthogonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = full_svd(m);
    svd.u * svd.v.transpose()
}

pub fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(0);
    }
    full_svd(m).singular_values
}

pub fn rank(m: &DMatrix<f64>) -> usize {
    let sv = singular_values(m);
    let cut = rank_cutoff(&sv);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    if m.nrows() == 0 || cols == 0 {
        return DMatrix::identity(cols, cols);
    }
    let svd = full_svd(m);
    let cut = rank_cutoff(&svd.singular_values);
    let r = svd.singular_values.iter().filter(|&&s| s > cut).count();
    svd.v.columns(r, cols - r).into_owned()
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = full_svd(m);
    let cut = rank_cutoff(&svd.singular_values);
    let r = svd.singular_values.iter().filter(|&&s| s > cut).count();
    svd.u.columns(0, r).into_owned()
}

/// Symmetric square root and its inverse of a symmetric positive definite matrix.
pub fn spd_sqrt(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let q = &eig.eigenvectors;
    let root = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()),
    );
    let inv_root = root.map(|r| if r > 0.0 { 1.0 / r } else { 0.0 });
    (
        q * DMatrix::from_diagonal(&root) * q.transpose(),
        q * DMatrix::from_diagonal(&inv_root) * q.transpose(),
    )
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Orthogonal projector onto the span of orthonormal columns.
pub fn projector(basis: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    if basis.ncols() == 0 {
        return DMatrix::zeros(dim, dim);
    }
    basis * basis.transpose()
}

/// Pseudo-inverse of a symmetric positive semidefinite matrix, keeping only
/// eigen-directions above the rank cutoff.
pub fn psd_pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    // Eigenvalues of a PSD matrix are its singular values.
    let abs = eig.eigenvalues.map(f64::abs);
    let cut = rank_cutoff(&abs);
    let inv = DVector::from_iterator(
        n,
        eig.eigenvalues
            .iter()
            .map(|&l| if l > cut { 1.0 / l } else { 0.0 }),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
}

/// Moore-Penrose pseudo-inverse with the crate-wide rank rule.
pub fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(cols, rows);
    }
    let svd = full_svd(m);
    let cut = rank_cutoff(&svd.singular_values);
    let mut out = DMatrix::zeros(cols, rows);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            out += svd.v.column(i) * svd.u.column(i).transpose() / s;
        }
    }
    out
}

/// Largest singular value.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).iter().cloned().fold(0.0, f64::max)
}

/// Distance between the subspaces spanned by two sets of orthonormal columns,
/// measured as the operator norm of the difference of their projectors.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let dim = a.nrows().max(b.nrows());
    op_norm(&(projector(a, dim) - projector(b, dim)))
}

/// Block-diagonal matrix repeating `block` `count` times.
pub fn block_diag(block: &DMatrix<f64>, count: usize) -> DMatrix<f64> {
    let n = block.nrows();
    let mut out = DMatrix::zeros(n * count, n * count);
    for k in 0..count {
        out.view_mut((k * n, k * n), (n, n)).copy_from(block);
    }
    out
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&m);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&m * &k)) < 1e-14);
        assert_relative_eq!(k.transpose() * &k, DMatrix::identity(2, 2), epsilon = 1e-14);
    }

    #[test]
    fn tall_null_space_and_reconstruction() {
        let m = DMatrix::from_row_slice(
            4,
            3,
            &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0, 1.0, 3.0, 4.0],
        );
        let k = null_space(&m);
        assert_eq!(k.ncols(), 1);
        assert!(max_abs(&(&m * &k)) < 1e-14);
        assert_eq!(rank(&m), 2);
        assert!(max_abs(&(&m * pinv(&m) * &m - &m)) < 1e-14);
        assert_eq!(column_space(&m).ncols(), 2);
    }

    #[test]
    fn rank_ignores_roundoff() {
        let m = DMatrix::from_element(3, 3, 1e-17);
        assert_eq!(rank(&m), 0);
        assert_eq!(null_space(&m).ncols(), 3);
    }

    #[test]
    fn pinv_of_rank_deficient() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let p = pinv(&m);
        assert_relative_eq!(&m * &p * &m, m, epsilon = 1e-12);
        assert_relative_eq!(psd_pinv(&m), p, epsilon = 1e-12);
    }

    #[test]
    fn spd_sqrt_squares_back() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let (r, ri) = spd_sqrt(&m);
        assert_relative_eq!(&r * &r, m, epsilon = 1e-13);
        assert_relative_eq!(&r * &ri, DMatrix::identity(2, 2), epsilon = 1e-13);
    }
}
