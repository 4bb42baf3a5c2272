//! Kähler and Hodge structure on the twisted complex.
//!
//! The complex structure on `C^1` is manufactured from the cup pairing: with
//! a base metric `B` (block-diagonal Gram matrices, optionally weighted per
//! generator), write `cup_sigma(u, v) = B(u, S v)` and take `J` to be minus
//! the orthogonal polar factor of `S`. The metric on `C^1` is then refined to
//! `g1(u, v) = cup_sigma(u, J v)`, which makes `(g1, cup_sigma, J)` a
//! compatible triple exactly. `C^0` and `C^2` carry the Gram matrix of `g`.
//!
//! Every operator is computed in metric-orthonormal ("hat") coordinates and
//! mapped back, so adjoints are transposes and the Green operator and
//! homotopy are pseudo-inverses sharing one rank rule.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::surface::TwistedComplex;
use crate::tolerance;

#[derive(Debug, Clone)]
struct Degree {
    metric: DMatrix<f64>,
    sqrt: DMatrix<f64>,
    sqrt_inv: DMatrix<f64>,
    laplacian: DMatrix<f64>,
    /// Metric-orthonormal basis of the harmonic space, as columns.
    harmonic: DMatrix<f64>,
    exact: DMatrix<f64>,
    harm_proj: DMatrix<f64>,
    coexact: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct KaehlerHodgePackage {
    complex: TwistedComplex,
    base_weights: Vec<f64>,
    base_metric: DMatrix<f64>,
    jop: DMatrix<f64>,
    star0: DMatrix<f64>,
    star2: DMatrix<f64>,
    d0adj: DMatrix<f64>,
    d1adj: DMatrix<f64>,
    degrees: [Degree; 3],
    green1: DMatrix<f64>,
    green2: DMatrix<f64>,
    h1: DMatrix<f64>,
    h2: DMatrix<f64>,
    cocycle_tolerance: f64,
}

/// Hodge decomposition of a cochain.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeSplit {
    pub exact: DVector<f64>,
    pub harmonic: DVector<f64>,
    pub coexact: DVector<f64>,
}

impl KaehlerHodgePackage {
    pub fn build(complex: TwistedComplex) -> Result<Self> {
        let gens = 2 * complex.genus();
        Self::build_with_base_weights(complex, &vec![1.0; gens])
    }

    /// Builds the package with per-generator weights on the base metric of `C^1`.
    pub fn build_with_base_weights(complex: TwistedComplex, weights: &[f64]) -> Result<Self> {
        let n = complex.n();
        let big = complex.c1_dim();
        if weights.len() != 2 * complex.genus()
            || weights.iter().any(|&w| !(w > 0.0 && w.is_finite()))
        {
            return Err(Error::InvalidInput(format!(
                "expected {} positive base weights",
                2 * complex.genus()
            )));
        }
        let sigma = complex.sigma_matrix();
        let rank = linalg::rank(sigma);
        if rank < big {
            return Err(Error::DegenerateSigma { rank, dim: big });
        }
        let gram = complex.gram().clone();

        let mut base = DMatrix::zeros(big, big);
        for (s, &w) in weights.iter().enumerate() {
            base.view_mut((s * n, s * n), (n, n))
                .copy_from(&(&gram * w));
        }
        let (b_sqrt, b_sqrt_inv) = linalg::spd_sqrt(&base);
        let s_hat = &b_sqrt_inv * sigma * &b_sqrt_inv;
        let polar = linalg::polar_orthogonal(&s_hat);
        let jop = &b_sqrt_inv * (-polar) * &b_sqrt;
        let g1 = linalg::symmetrize(&(sigma * &jop));

        let metrics = [gram.clone(), g1, gram.clone()];
        let roots: Vec<(DMatrix<f64>, DMatrix<f64>)> =
            metrics.iter().map(linalg::spd_sqrt).collect();
        let hat_d0 = &roots[1].0 * complex.d0() * &roots[0].1;
        let hat_d1 = &roots[2].0 * complex.d1() * &roots[1].1;
        let dims = [n, big, n];
        let hat_in: [DMatrix<f64>; 3] = [DMatrix::zeros(n, 0), hat_d0.clone(), hat_d1.clone()];
        let hat_out: [DMatrix<f64>; 3] = [hat_d0.clone(), hat_d1.clone(), DMatrix::zeros(0, n)];

        let d0adj = metrics[0].clone().try_inverse().expect("gram")
            * complex.d0().transpose()
            * &metrics[1];
        let d1adj =
            metrics[1].clone().try_inverse().expect("g1") * complex.d1().transpose() * &metrics[2];

        let degrees: Vec<Degree> = (0..3)
            .map(|j| {
                let (sqrt, sqrt_inv) = roots[j].clone();
                let exact_basis = linalg::column_space(&hat_in[j]);
                let coexact_basis = linalg::column_space(&hat_out[j].transpose());
                let mut stacked = DMatrix::zeros(hat_out[j].nrows() + hat_in[j].ncols(), dims[j]);
                stacked
                    .view_mut((0, 0), (hat_out[j].nrows(), dims[j]))
                    .copy_from(&hat_out[j]);
                stacked
                    .view_mut((hat_out[j].nrows(), 0), (hat_in[j].ncols(), dims[j]))
                    .copy_from(&hat_in[j].transpose());
                let harm_hat = linalg::null_space(&stacked);
                let back = |p: DMatrix<f64>| &sqrt_inv * p * &sqrt;
                let lap_hat = hat_in[j].clone() * hat_in[j].transpose()
                    + hat_out[j].transpose() * &hat_out[j];
                Degree {
                    metric: metrics[j].clone(),
                    laplacian: back(lap_hat),
                    harmonic: &sqrt_inv * &harm_hat,
                    exact: back(linalg::projector(&exact_basis, dims[j])),
                    harm_proj: back(linalg::projector(&harm_hat, dims[j])),
                    coexact: back(linalg::projector(&coexact_basis, dims[j])),
                    sqrt,
                    sqrt_inv,
                }
            })
            .collect();
        let degrees: [Degree; 3] = degrees.try_into().expect("three degrees");

        // h_j = D_{j-1}^* Delta^-1 P_j is the pseudo-inverse of D_{j-1} in hat coordinates.
        let pinv_d0 = linalg::pinv(&hat_d0);
        let pinv_d1 = linalg::pinv(&hat_d1);
        let h1 = &degrees[0].sqrt_inv * &pinv_d0 * &degrees[1].sqrt;
        let h2 = &degrees[1].sqrt_inv * &pinv_d1 * &degrees[2].sqrt;
        let green1 = &degrees[1].sqrt_inv * (pinv_d0.transpose() * &pinv_d0) * &degrees[1].sqrt;
        let green2 = &degrees[2].sqrt_inv * (pinv_d1.transpose() * &pinv_d1) * &degrees[2].sqrt;

        Ok(Self {
            star0: DMatrix::identity(n, n),
            star2: DMatrix::identity(n, n),
            base_weights: weights.to_vec(),
            base_metric: base,
            jop,
            d0adj,
            d1adj,
            degrees,
            green1,
            green2,
            h1,
            h2,
            cocycle_tolerance: tolerance::COCYCLE,
            complex,
        })
    }

    /// Threshold on `|D v|` below which [`kappa`](Self::kappa) accepts `v`.
    pub fn set_cocycle_tolerance(&mut self, tolerance: f64) {
        self.cocycle_tolerance = tolerance;
    }

    pub fn complex(&self) -> &TwistedComplex {
        &self.complex
    }

    pub fn base_weights(&self) -> &[f64] {
        &self.base_weights
    }

    pub fn base_metric(&self) -> &DMatrix<f64> {
        &self.base_metric
    }

    pub fn jop(&self) -> &DMatrix<f64> {
        &self.jop
    }

    /// The pairing `C^0 x C^2 -> R` turns `star0` into the identity on coordinates.
    pub fn star0(&self) -> &DMatrix<f64> {
        &self.star0
    }

    pub fn star2(&self) -> &DMatrix<f64> {
        &self.star2
    }

    pub fn d0adj(&self) -> &DMatrix<f64> {
        &self.d0adj
    }

    pub fn d1adj(&self) -> &DMatrix<f64> {
        &self.d1adj
    }

    fn degree(&self, j: usize) -> Result<&Degree> {
        self.degrees.get(j).ok_or(Error::DegreeOutOfRange(j))
    }

    pub fn metric(&self, j: usize) -> Result<&DMatrix<f64>> {
        Ok(&self.degree(j)?.metric)
    }

    pub fn g1(&self) -> &DMatrix<f64> {
        &self.degrees[1].metric
    }

    pub fn laplacian(&self, j: usize) -> Result<&DMatrix<f64>> {
        Ok(&self.degree(j)?.laplacian)
    }

    /// Metric-orthonormal basis of the harmonic space in degree `j`.
    pub fn harmonic_basis(&self, j: usize) -> Result<&DMatrix<f64>> {
        Ok(&self.degree(j)?.harmonic)
    }

    pub fn harmonic_dim(&self, j: usize) -> Result<usize> {
        Ok(self.degree(j)?.harmonic.ncols())
    }

    /// Projector onto the coboundaries `B^j`.
    pub fn exact_projector(&self, j: usize) -> Result<&DMatrix<f64>> {
        Ok(&self.degree(j)?.exact)
    }

    /// `iota_j alpha_j`.
    pub fn harmonic_projector(&self, j: usize) -> Result<&DMatrix<f64>> {
        Ok(&self.degree(j)?.harm_proj)
    }

    pub fn coexact_projector(&self, j: usize) -> Result<&DMatrix<f64>> {
        Ok(&self.degree(j)?.coexact)
    }

    /// Coordinates of the harmonic part in the harmonic basis.
    pub fn alpha(&self, v: &DVector<f64>, j: usize) -> Result<DVector<f64>> {
        let d = self.degree(j)?;
        Ok(d.harmonic.transpose() * &d.metric * v)
    }

    pub fn iota(&self, coords: &DVector<f64>, j: usize) -> Result<DVector<f64>> {
        Ok(&self.degree(j)?.harmonic * coords)
    }

    /// Inverse of the Laplacian on coboundaries, zero on their complement.
    pub fn green(&self, j: usize) -> Result<&DMatrix<f64>> {
        match j {
            1 => Ok(&self.green1),
            2 => Ok(&self.green2),
            _ => Err(Error::DegreeOutOfRange(j)),
        }
    }

    /// Matrix of the homotopy `h_j : C^j -> C^{j-1}`.
    pub fn homotopy(&self, j: usize) -> Result<&DMatrix<f64>> {
        match j {
            1 => Ok(&self.h1),
            2 => Ok(&self.h2),
            _ => Err(Error::DegreeOutOfRange(j)),
        }
    }

    pub fn homotopy_h(&self, v: &DVector<f64>, j: usize) -> Result<DVector<f64>> {
        Ok(self.homotopy(j)? * v)
    }

    pub fn hodge_split(&self, v: &DVector<f64>, j: usize) -> Result<HodgeSplit> {
        let d = self.degree(j)?;
        Ok(HodgeSplit {
            exact: &d.exact * v,
            harmonic: &d.harm_proj * v,
            coexact: &d.coexact * v,
        })
    }

    /// Harmonic representative of the class of a cocycle.
    pub fn kappa(&self, v: &DVector<f64>, j: usize) -> Result<DVector<f64>> {
        let residual = match j {
            0 => (self.complex.d0() * v).amax(),
            1 => (self.complex.d1() * v).amax(),
            2 => 0.0,
            _ => return Err(Error::DegreeOutOfRange(j)),
        };
        if residual > self.cocycle_tolerance {
            return Err(Error::NotACocycle(residual));
        }
        self.harmonic_part(v, j)
    }

    /// Harmonic projection without the cocycle check.
    pub fn harmonic_part(&self, v: &DVector<f64>, j: usize) -> Result<DVector<f64>> {
        Ok(&self.degree(j)?.harm_proj * v)
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>, j: usize) -> Result<f64> {
        Ok(u.dot(&(&self.degree(j)?.metric * v)))
    }

    pub fn norm(&self, v: &DVector<f64>, j: usize) -> Result<f64> {
        Ok(self.inner(v, v, j)?.max(0.0).sqrt())
    }

    /// Maps coordinates to metric-orthonormal ones and back.
    pub fn metric_sqrt(&self, j: usize) -> Result<(&DMatrix<f64>, &DMatrix<f64>)> {
        let d = self.degree(j)?;
        Ok((&d.sqrt, &d.sqrt_inv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{GroupId, LieContext};
    use crate::surface::CentralRep;

    fn package(id: GroupId, genus: usize) -> KaehlerHodgePackage {
        let rep = CentralRep::trivial(LieContext::new(id), genus).unwrap();
        KaehlerHodgePackage::build(TwistedComplex::build(rep).unwrap()).unwrap()
    }

    #[test]
    fn u1_complex_structure_is_block_rotation() {
        let p = package(GroupId::U1, 2);
        // sigma(u, v) = (1/2)(x y' - y x') per handle; J(x, y) = (-y, x).
        let mut expected = DMatrix::zeros(4, 4);
        for i in 0..2 {
            expected[(2 * i, 2 * i + 1)] = -1.0;
            expected[(2 * i + 1, 2 * i)] = 1.0;
        }
        assert!((p.jop() - expected).amax() < 1e-14);
        assert_eq!(p.harmonic_dim(1).unwrap(), 4);
    }

    #[test]
    fn trivial_su2_is_all_harmonic() {
        let p = package(GroupId::SU2, 2);
        assert_eq!(p.harmonic_dim(0).unwrap(), 3);
        assert_eq!(p.harmonic_dim(1).unwrap(), 12);
        assert_eq!(p.harmonic_dim(2).unwrap(), 3);
        assert!(linalg::max_abs(p.homotopy(1).unwrap()) < 1e-14);
        assert!(linalg::max_abs(p.homotopy(2).unwrap()) < 1e-14);
        assert!(linalg::max_abs(p.exact_projector(1).unwrap()) < 1e-14);
        let id = DMatrix::identity(12, 12);
        assert!((p.harmonic_projector(1).unwrap() - id).amax() < 1e-12);
    }

    #[test]
    fn degree_errors() {
        let p = package(GroupId::U1, 1);
        assert!(matches!(p.homotopy(0), Err(Error::DegreeOutOfRange(0))));
        assert!(matches!(
            p.hodge_split(&DVector::zeros(1), 3),
            Err(Error::DegreeOutOfRange(3))
        ));
    }

    #[test]
    fn base_weights_are_validated() {
        let rep = CentralRep::trivial(LieContext::new(GroupId::U1), 1).unwrap();
        let cx = TwistedComplex::build(rep).unwrap();
        assert!(KaehlerHodgePackage::build_with_base_weights(cx.clone(), &[1.0]).is_err());
        assert!(KaehlerHodgePackage::build_with_base_weights(cx, &[1.0, -2.0]).is_err());
    }
}
