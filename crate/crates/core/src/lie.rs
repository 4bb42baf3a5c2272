//! Matrix backends for the compact structure group and its Lie algebra.
//!
//! Each backend is a [`LieContext`] holding a real basis of anti-hermitian
//! matrices, the Gram matrix of the invariant inner product
//! `<x, y> = -1/2 Re tr(xy)`, and the structure constants of the bracket.
//! Algebra elements are coordinate vectors in that basis.

use std::fmt;
use std::str::FromStr;

use nalgebra::linalg::Schur;
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg;

pub type CMatrix = DMatrix<Complex<f64>>;

/// Distance to angle pi at which the principal logarithm refuses to choose.
pub const BRANCH_TOLERANCE: f64 = 1e-8;
/// Unitarity and determinant tolerance for [`GroupElement`] validation.
pub const GROUP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigenvalue within {0:.1e} of -1: principal logarithm is ambiguous")]
    BranchAmbiguity(f64),
    #[error("matrix is not in the group: {0}")]
    NotInGroup(String),
    #[error("unknown group id `{0}`")]
    UnknownGroup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupId {
    U1,
    SU2,
    U2,
}

impl GroupId {
    pub const ALL: [GroupId; 3] = [GroupId::U1, GroupId::SU2, GroupId::U2];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupId::U1 => "u1",
            GroupId::SU2 => "su2",
            GroupId::U2 => "u2",
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupId {
    type Err = LieError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s
            .to_ascii_lowercase()
            .replace(['(', ')', '-', '_'], "")
            .as_str()
        {
            "u1" => Ok(GroupId::U1),
            "su2" => Ok(GroupId::SU2),
            "u2" => Ok(GroupId::U2),
            _ => Err(LieError::UnknownGroup(s.to_string())),
        }
    }
}

/// An element of the matrix group. Construct through [`LieContext::element`]
/// to get validation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: CMatrix,
}

impl GroupElement {
    /// Wraps a matrix without checking group membership.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement::from_matrix_unchecked(&self.matrix * &other.matrix)
    }

    /// Inverse of a unitary element.
    pub fn inverse(&self) -> GroupElement {
        GroupElement::from_matrix_unchecked(self.matrix.adjoint())
    }

    /// Frobenius distance to another element.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// Frobenius norm of the commutator `ab - ba`.
    pub fn commutator_norm(&self, other: &GroupElement) -> f64 {
        (&self.matrix * &other.matrix - &other.matrix * &self.matrix).norm()
    }
}

/// Coordinates of a Lie algebra element in the basis of its context.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: DVector<f64>,
}

impl AlgebraElement {
    pub fn new(coeffs: DVector<f64>) -> Self {
        Self { coeffs }
    }

    pub fn from_slice(coeffs: &[f64]) -> Self {
        Self::new(DVector::from_column_slice(coeffs))
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale(&self, t: f64) -> Self {
        Self::new(&self.coeffs * t)
    }
}

/// A compact matrix group together with its Lie algebra data.
#[derive(Debug, Clone)]
pub struct LieContext {
    group_id: GroupId,
    size: usize,
    basis: Vec<CMatrix>,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    gram_sqrt: DMatrix<f64>,
    gram_sqrt_inv: DMatrix<f64>,
    structure: Vec<DMatrix<f64>>,
    center_basis: Vec<usize>,
    discrete_center: Vec<GroupElement>,
    extra_components: Vec<GroupElement>,
}

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn pauli(k: usize) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match k {
        1 => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!("pauli index"),
    }
}

fn times_i(m: &CMatrix) -> CMatrix {
    m * c(0.0, 1.0)
}

fn identity(size: usize) -> CMatrix {
    CMatrix::identity(size, size)
}

impl LieContext {
    pub fn new(group_id: GroupId) -> Self {
        let (size, basis, center_basis, discrete_center) = match group_id {
            GroupId::U1 => (
                1,
                vec![identity(1) * c(0.0, 1.0)],
                vec![0],
                vec![identity(1)],
            ),
            GroupId::SU2 => (
                2,
                (1..=3).map(|k| times_i(&pauli(k))).collect(),
                vec![],
                vec![identity(2), -identity(2)],
            ),
            GroupId::U2 => {
                let mut b = vec![identity(2) * c(0.0, 1.0)];
                b.extend((1..=3).map(|k| times_i(&pauli(k))));
                (2, b, vec![0], vec![identity(2)])
            }
        };
        Self::from_basis(
            group_id,
            size,
            basis,
            center_basis,
            discrete_center
                .into_iter()
                .map(GroupElement::from_matrix_unchecked)
                .collect(),
        )
    }

    fn from_basis(
        group_id: GroupId,
        size: usize,
        basis: Vec<CMatrix>,
        center_basis: Vec<usize>,
        discrete_center: Vec<GroupElement>,
    ) -> Self {
        let n = basis.len();
        let gram = DMatrix::from_fn(n, n, |i, j| trace_form(&basis[i], &basis[j]));
        let gram_inv = gram
            .clone()
            .try_inverse()
            .expect("gram is positive definite");
        let (gram_sqrt, gram_sqrt_inv) = linalg::spd_sqrt(&gram);
        let mut ctx = Self {
            group_id,
            size,
            basis,
            gram,
            gram_inv,
            gram_sqrt,
            gram_sqrt_inv,
            structure: Vec::new(),
            center_basis,
            discrete_center,
            extra_components: Vec::new(),
        };
        let mut structure = vec![DMatrix::zeros(n, n); n];
        for i in 0..n {
            for j in 0..n {
                let comm = &ctx.basis[i] * &ctx.basis[j] - &ctx.basis[j] * &ctx.basis[i];
                let coords = ctx.coords_of(&comm);
                for (m, s) in structure.iter_mut().enumerate() {
                    s[(i, j)] = coords[m];
                }
            }
        }
        ctx.structure = structure;
        ctx
    }

    /// Registers group elements from other components of a non-connected
    /// extension. They take part in stabilizer sampling only.
    pub fn with_extra_components(mut self, elems: Vec<GroupElement>) -> Self {
        self.extra_components = elems;
        self
    }

    pub fn group_id(&self) -> GroupId {
        self.group_id
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Size of the defining matrices.
    pub fn matrix_size(&self) -> usize {
        self.size
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    /// Symmetric square root of the Gram matrix and its inverse.
    pub fn gram_sqrt(&self) -> (&DMatrix<f64>, &DMatrix<f64>) {
        (&self.gram_sqrt, &self.gram_sqrt_inv)
    }

    /// `structure_constants()[m][(i, j)]` is the `m`-th coordinate of `[e_i, e_j]`.
    pub fn structure_constants(&self) -> &[DMatrix<f64>] {
        &self.structure
    }

    pub fn center_basis(&self) -> &[usize] {
        &self.center_basis
    }

    /// Finite central elements not reached by exponentiating the center algebra.
    pub fn discrete_center(&self) -> &[GroupElement] {
        &self.discrete_center
    }

    pub fn extra_components(&self) -> &[GroupElement] {
        &self.extra_components
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(|m| linalg::max_abs(m) == 0.0)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::from_matrix_unchecked(identity(self.size))
    }

    /// Validates and wraps a matrix.
    pub fn element(&self, matrix: CMatrix) -> Result<GroupElement, LieError> {
        if matrix.nrows() != self.size || matrix.ncols() != self.size {
            return Err(LieError::DimensionMismatch {
                expected: self.size,
                got: matrix.nrows(),
            });
        }
        let unitarity = (&matrix * matrix.adjoint() - identity(self.size)).norm();
        if unitarity > GROUP_TOLERANCE {
            return Err(LieError::NotInGroup(format!(
                "unitarity residual {unitarity:.3e}"
            )));
        }
        if self.group_id == GroupId::SU2 {
            let det = matrix.determinant();
            let off = (det - c(1.0, 0.0)).norm();
            if off > GROUP_TOLERANCE {
                return Err(LieError::NotInGroup(format!(
                    "determinant residual {off:.3e}"
                )));
            }
        }
        Ok(GroupElement::from_matrix_unchecked(matrix))
    }

    fn check_dim(&self, x: &AlgebraElement) -> Result<(), LieError> {
        if x.dim() != self.dim() {
            return Err(LieError::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Coordinates of an arbitrary matrix projected onto the algebra.
    pub fn coords_of(&self, m: &CMatrix) -> DVector<f64> {
        let pairings =
            DVector::from_iterator(self.dim(), self.basis.iter().map(|b| trace_form(m, b)));
        &self.gram_inv * pairings
    }

    pub fn to_matrix(&self, x: &AlgebraElement) -> CMatrix {
        self.matrix_of(&x.coeffs)
    }

    pub fn matrix_of(&self, coeffs: &DVector<f64>) -> CMatrix {
        let mut out = CMatrix::zeros(self.size, self.size);
        for (b, &x) in self.basis.iter().zip(coeffs.iter()) {
            out += b * c(x, 0.0);
        }
        out
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.gram * y))
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    pub fn bracket(
        &self,
        x: &AlgebraElement,
        y: &AlgebraElement,
    ) -> Result<AlgebraElement, LieError> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(AlgebraElement::new(
            self.bracket_coords(&x.coeffs, &y.coeffs),
        ))
    }

    pub fn bracket_coords(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.structure.iter().map(|m| x.dot(&(m * y))))
    }

    /// Matrix of `ad(x)` in the basis.
    pub fn ad_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |m, j| {
            (0..n).map(|i| x[i] * self.structure[m][(i, j)]).sum()
        })
    }

    pub fn exp_alg(&self, x: &AlgebraElement) -> GroupElement {
        self.exp_coords(&x.coeffs)
    }

    pub fn exp_coords(&self, x: &DVector<f64>) -> GroupElement {
        GroupElement::from_matrix_unchecked(self.matrix_of(x).exp())
    }

    /// Principal logarithm by unitary diagonalization.
    pub fn log_group(&self, a: &GroupElement) -> Result<AlgebraElement, LieError> {
        let (q, angles) = unitary_eigen(a.matrix());
        for &theta in angles.iter() {
            let gap = std::f64::consts::PI - theta.abs();
            if gap < BRANCH_TOLERANCE {
                return Err(LieError::BranchAmbiguity(gap));
            }
        }
        let diag = CMatrix::from_diagonal(&DVector::from_iterator(
            angles.len(),
            angles.iter().map(|&t| c(0.0, t)),
        ));
        let log = &q * diag * q.adjoint();
        Ok(AlgebraElement::new(self.coords_of(&log)))
    }

    /// Logarithm on the branch selected by `hint`, which must commute with
    /// `a`: returns `hint + log(exp(-hint) a)`.
    pub fn log_group_with_hint(
        &self,
        a: &GroupElement,
        hint: &AlgebraElement,
    ) -> Result<AlgebraElement, LieError> {
        self.check_dim(hint)?;
        let shift = self.exp_coords(&(-&hint.coeffs));
        let rest = self.log_group(&shift.mul(a))?;
        Ok(AlgebraElement::new(&hint.coeffs + rest.coeffs))
    }

    /// Matrix of `Ad(a)` in the basis; columns are the images of basis vectors.
    pub fn adjoint_action(&self, a: &GroupElement) -> DMatrix<f64> {
        let n = self.dim();
        let am = a.matrix();
        let ainv = am.adjoint();
        let mut out = DMatrix::zeros(n, n);
        for (j, b) in self.basis.iter().enumerate() {
            out.set_column(j, &self.coords_of(&(am * b * &ainv)));
        }
        out
    }

    /// Gram-orthonormal basis (as coordinate columns) of the joint fixed space
    /// of `Ad(a)` over `elems`.
    pub fn centralizer_algebra(&self, elems: &[GroupElement]) -> Vec<AlgebraElement> {
        let basis = self.centralizer_matrix(elems);
        (0..basis.ncols())
            .map(|j| AlgebraElement::new(basis.column(j).into_owned()))
            .collect()
    }

    /// Same as [`Self::centralizer_algebra`] with the basis as matrix columns.
    pub fn centralizer_matrix(&self, elems: &[GroupElement]) -> DMatrix<f64> {
        let n = self.dim();
        if elems.is_empty() {
            return self.gram_sqrt_inv.clone();
        }
        let mut stacked = DMatrix::zeros(n * elems.len(), n);
        for (k, a) in elems.iter().enumerate() {
            // Ad is gram-orthogonal, so it is orthogonal in hat coordinates.
            let hat = &self.gram_sqrt * self.adjoint_action(a) * &self.gram_sqrt_inv;
            stacked
                .view_mut((k * n, 0), (n, n))
                .copy_from(&(hat - DMatrix::identity(n, n)));
        }
        let kernel = linalg::null_space(&stacked);
        &self.gram_sqrt_inv * kernel
    }

    /// Gaussian algebra element with unit-variance gram-orthonormal coordinates.
    pub fn random_algebra<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> AlgebraElement {
        let hat = DVector::from_fn(self.dim(), |_, _| {
            let z: f64 = StandardNormal.sample(rng);
            z * scale
        });
        AlgebraElement::new(&self.gram_sqrt_inv * hat)
    }

    /// Haar-distributed group element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let tau = std::f64::consts::TAU;
        match self.group_id {
            GroupId::U1 => {
                let theta = rng.random_range(0.0..tau);
                GroupElement::from_matrix_unchecked(CMatrix::from_element(
                    1,
                    1,
                    Complex::from_polar(1.0, theta),
                ))
            }
            GroupId::SU2 => self.random_su2(rng),
            GroupId::U2 => {
                let theta = rng.random_range(0.0..tau);
                let su = self.random_su2(rng);
                GroupElement::from_matrix_unchecked(su.matrix * Complex::from_polar(1.0, theta))
            }
        }
    }

    fn random_su2<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let q = loop {
            let q = nalgebra::Vector4::from_fn(|_, _| {
                let z: f64 = StandardNormal.sample(rng);
                z
            });
            let norm = q.norm();
            if norm > 1e-6 {
                break q / norm;
            }
        };
        let mut m = identity(2) * c(q[0], 0.0);
        for k in 1..=3 {
            m += times_i(&pauli(k)) * c(q[k], 0.0);
        }
        GroupElement::from_matrix_unchecked(m)
    }

    /// Residual of the invariance identity `<[x,y],w> + <y,[x,w]> = 0` over
    /// all basis triples.
    pub fn invariance_residual(&self) -> f64 {
        let n = self.dim();
        let e = |i: usize| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, w) = (e(i), e(j), e(k));
                    let r = self.inner(&self.bracket_coords(&x, &y), &w)
                        + self.inner(&y, &self.bracket_coords(&x, &w));
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// Residual of the Jacobi identity over all basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let e = |i: usize| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        let b = |x: &DVector<f64>, y: &DVector<f64>| self.bracket_coords(x, y);
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (e(i), e(j), e(k));
                    let r = b(&x, &b(&y, &z)) + b(&y, &b(&z, &x)) + b(&z, &b(&x, &y));
                    worst = worst.max(r.amax());
                }
            }
        }
        worst
    }
}

/// `-1/2 Re tr(xy)`.
fn trace_form(x: &CMatrix, y: &CMatrix) -> f64 {
    -0.5 * (x * y).trace().re
}

/// Unitary eigenvector matrix and eigen-angles in `(-pi, pi]` of a unitary matrix.
fn unitary_eigen(m: &CMatrix) -> (CMatrix, Vec<f64>) {
    let size = m.nrows();
    if size == 1 {
        return (identity(1), vec![m[(0, 0)].arg()]);
    }
    // The Schur form of a normal matrix is diagonal.
    let (q, t) = Schur::new(m.clone()).unpack();
    let angles = (0..size).map(|i| t[(i, i)].arg()).collect();
    (q, angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn su2() -> LieContext {
        LieContext::new(GroupId::SU2)
    }

    #[test]
    fn su2_bracket_matches_commutator() {
        let ctx = su2();
        let e1 = AlgebraElement::from_slice(&[1.0, 0.0, 0.0]);
        let e2 = AlgebraElement::from_slice(&[0.0, 1.0, 0.0]);
        let br = ctx.bracket(&e1, &e2).unwrap();
        let m1 = ctx.to_matrix(&e1);
        let m2 = ctx.to_matrix(&e2);
        let oracle = &m1 * &m2 - &m2 * &m1;
        assert_relative_eq!(
            br.coeffs,
            DVector::from_column_slice(&[0.0, 0.0, -2.0]),
            epsilon = 1e-15
        );
        assert!((ctx.to_matrix(&br) - oracle).norm() < 1e-15);
    }

    #[test]
    fn bracket_rejects_wrong_dimension() {
        let ctx = su2();
        let x = AlgebraElement::zero(3);
        let y = AlgebraElement::zero(4);
        assert!(matches!(
            ctx.bracket(&x, &y),
            Err(LieError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn u1_is_abelian() {
        let ctx = LieContext::new(GroupId::U1);
        assert!(ctx.is_abelian());
        assert_relative_eq!(ctx.gram()[(0, 0)], 0.5);
        let x = AlgebraElement::from_slice(&[0.7]);
        let y = AlgebraElement::from_slice(&[-2.0]);
        assert_eq!(ctx.bracket(&x, &y).unwrap().coeffs[0], 0.0);
    }

    #[test]
    fn pauli_bases_are_orthonormal() {
        for id in [GroupId::SU2, GroupId::U2] {
            let ctx = LieContext::new(id);
            let n = ctx.dim();
            assert_relative_eq!(ctx.gram().clone(), DMatrix::identity(n, n), epsilon = 1e-15);
            assert!(ctx.invariance_residual() < 1e-12);
            assert!(ctx.jacobi_residual() < 1e-12);
        }
    }

    #[test]
    fn exp_of_pi_e3_is_minus_identity() {
        let ctx = su2();
        let x = AlgebraElement::from_slice(&[0.0, 0.0, std::f64::consts::PI]);
        let a = ctx.exp_alg(&x);
        // e3 = i diag(1,-1) exponentiates diagonally to diag(e^{i pi}, e^{-i pi}).
        assert!((a.matrix() + identity(2)).norm() < 1e-15);
    }

    #[test]
    fn log_of_diagonal_element() {
        let ctx = su2();
        let a = GroupElement::from_matrix_unchecked(CMatrix::from_diagonal(
            &DVector::from_column_slice(&[
                Complex::from_polar(1.0, 0.3),
                Complex::from_polar(1.0, -0.3),
            ]),
        ));
        let x = ctx.log_group(&a).unwrap();
        assert_relative_eq!(
            x.coeffs,
            DVector::from_column_slice(&[0.0, 0.0, 0.3]),
            epsilon = 1e-14
        );
        assert_relative_eq!(ctx.log_group(&ctx.identity()).unwrap().coeffs.norm(), 0.0);
    }

    #[test]
    fn log_of_minus_identity_is_ambiguous() {
        let ctx = su2();
        let minus = GroupElement::from_matrix_unchecked(-identity(2));
        assert!(matches!(
            ctx.log_group(&minus),
            Err(LieError::BranchAmbiguity(_))
        ));
        let hint = AlgebraElement::from_slice(&[0.0, 0.0, std::f64::consts::PI]);
        let x = ctx.log_group_with_hint(&minus, &hint).unwrap();
        assert!((ctx.exp_alg(&x).matrix() + identity(2)).norm() < 1e-14);
    }

    #[test]
    fn adjoint_of_exponential_is_exponential_of_ad() {
        let ctx = su2();
        let x = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
        let ad = ctx.ad_matrix(&x);
        // Independent oracle: truncated power series.
        let mut series = DMatrix::identity(3, 3);
        let mut term = DMatrix::identity(3, 3);
        for k in 1..60 {
            term = &term * &ad / k as f64;
            series += &term;
        }
        let adj = ctx.adjoint_action(&ctx.exp_coords(&x));
        assert!((adj - series).amax() < 1e-10);
        assert_relative_eq!(
            ctx.adjoint_action(&ctx.identity()),
            DMatrix::identity(3, 3),
            epsilon = 1e-15
        );
    }

    #[test]
    fn centralizer_examples() {
        let ctx = su2();
        assert_eq!(ctx.centralizer_algebra(&[]).len(), 3);
        let p1 = ctx.element(times_i(&pauli(1))).unwrap();
        let p2 = ctx.element(times_i(&pauli(2))).unwrap();
        assert!(ctx.centralizer_algebra(&[p1, p2]).is_empty());
        let d1 = ctx.exp_coords(&DVector::from_column_slice(&[0.0, 0.0, 0.4]));
        let d2 = ctx.exp_coords(&DVector::from_column_slice(&[0.0, 0.0, 1.1]));
        let z = ctx.centralizer_algebra(&[d1, d2]);
        assert_eq!(z.len(), 1);
        assert!((z[0].coeffs[2].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn element_validation() {
        let ctx = su2();
        assert!(ctx.element(identity(2) * c(2.0, 0.0)).is_err());
        assert!(ctx
            .element(CMatrix::from_diagonal(&DVector::from_column_slice(&[
                c(0.0, 1.0),
                c(0.0, 1.0)
            ])))
            .is_err());
        let u2 = LieContext::new(GroupId::U2);
        assert!(u2
            .element(CMatrix::from_diagonal(&DVector::from_column_slice(&[
                c(0.0, 1.0),
                c(0.0, 1.0)
            ])))
            .is_ok());
    }

    #[test]
    fn random_elements_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for id in GroupId::ALL {
            let ctx = LieContext::new(id);
            for _ in 0..20 {
                let a = ctx.random_element(&mut rng);
                assert!(ctx.element(a.into_matrix()).is_ok());
            }
        }
    }

    #[test]
    fn group_id_parsing() {
        assert_eq!("SU(2)".parse::<GroupId>().unwrap(), GroupId::SU2);
        assert_eq!("u1".parse::<GroupId>().unwrap(), GroupId::U1);
        assert!("so3".parse::<GroupId>().is_err());
    }
}
