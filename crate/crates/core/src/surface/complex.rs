//! The twisted cochain complex `C^0 -> C^1 -> C^2` of a central
//! representation and its cochain-level pairings.
//!
//! Cochains are stored in right coordinates: a 1-cochain assigns to each
//! generator `s` a vector `u_s` so that the deformation of the image is
//! `rho_s exp(u_s)`. With these coordinates
//!
//! * `(D0 phi)_s = Ad(rho_s)^-1 phi - phi`,
//! * `D1` is the derivative at zero of `log(relator(rho exp u) c^-1)`.
//!
//! The pairings come from an Alexander-Whitney diagonal on the single 2-cell,
//! evaluated along the relator with prefix transports. They are stored as
//! matrices: `cup_sigma(u, v) = u^T S v` and `cup_bracket(u, v)_m = u^T B_m v`.

use nalgebra::{DMatrix, DVector};

use super::{CentralRep, SurfacePresentation};
use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieContext};
use crate::linalg;
use crate::tolerance;

/// Transport data for one letter of the relator: the matrices `L_k` (value of
/// the left-extended cochain on the prefix before the letter) and `R_k`
/// (transported value on the letter itself), both `n x N`.
struct LetterTransport {
    left: DMatrix<f64>,
    right: DMatrix<f64>,
}

struct Assembly {
    d0: DMatrix<f64>,
    d1: DMatrix<f64>,
    letters: Vec<LetterTransport>,
    adjoints: Vec<DMatrix<f64>>,
}

fn assemble(
    ctx: &LieContext,
    presentation: &SurfacePresentation,
    images: &[GroupElement],
) -> Assembly {
    let n = ctx.dim();
    let gens = presentation.generator_count();
    let big = gens * n;
    let adjoints: Vec<DMatrix<f64>> = images.iter().map(|a| ctx.adjoint_action(a)).collect();
    let id = DMatrix::<f64>::identity(n, n);

    let mut d0 = DMatrix::zeros(big, n);
    for (s, ad) in adjoints.iter().enumerate() {
        // Ad is gram-orthogonal: Ad^-1 = G^-1 Ad^T G.
        let inv = ctx.gram_inv() * ad.transpose() * ctx.gram();
        d0.view_mut((s * n, 0), (n, n)).copy_from(&(inv - &id));
    }

    let prefixes = presentation.prefixes(images);
    let mut acc = DMatrix::zeros(n, big);
    let mut letters = Vec::with_capacity(presentation.relator().len());
    for (k, letter) in presentation.relator().iter().enumerate() {
        let s = letter.generator;
        let before = ctx.adjoint_action(&prefixes[k]);
        let block = if letter.inverse {
            -before
        } else {
            before * &adjoints[s]
        };
        let mut inc = DMatrix::zeros(n, big);
        inc.view_mut((0, s * n), (n, n)).copy_from(&block);
        letters.push(LetterTransport {
            left: acc.clone(),
            right: inc.clone(),
        });
        acc += inc;
    }
    Assembly {
        d0,
        d1: acc,
        letters,
        adjoints,
    }
}

/// Differentials of the twisted complex without the centrality check.
/// `D1 D0` vanishes only when the relator defect does.
pub fn twisted_differentials(rep: &CentralRep) -> (DMatrix<f64>, DMatrix<f64>) {
    let a = assemble(rep.context(), rep.presentation(), rep.images());
    (a.d0, a.d1)
}

#[derive(Debug, Clone)]
pub struct TwistedComplex {
    rep: CentralRep,
    n: usize,
    d0: DMatrix<f64>,
    d1: DMatrix<f64>,
    sigma: DMatrix<f64>,
    bracket: Vec<DMatrix<f64>>,
    adjoints: Vec<DMatrix<f64>>,
}

impl TwistedComplex {
    pub fn build(rep: CentralRep) -> Result<Self> {
        Self::build_with_admission(rep, tolerance::DEFECT_ADMISSION)
    }

    /// Builds the complex if the relator defect is at most `admission`.
    pub fn build_with_admission(rep: CentralRep, admission: f64) -> Result<Self> {
        if rep.defect() > admission {
            return Err(Error::NotCentral {
                defect: rep.defect(),
                tolerance: admission,
            });
        }
        let ctx = rep.context();
        let n = ctx.dim();
        let asm = assemble(ctx, rep.presentation(), rep.images());
        let big = asm.d1.ncols();

        let mut aw = DMatrix::zeros(big, big);
        let mut aw_bracket = vec![DMatrix::zeros(big, big); n];
        for t in &asm.letters {
            let lt = t.left.transpose();
            aw += &lt * ctx.gram() * &t.right;
            for (m, c) in ctx.structure_constants().iter().enumerate() {
                aw_bracket[m] += &lt * c * &t.right;
            }
        }
        // The inverse-letter correction term of the diagonal is symmetric in
        // the scalar pairing and antisymmetric in the bracket, so it drops out
        // of both (anti)symmetrizations below.
        let sigma = (&aw - aw.transpose()) * 0.5;
        let bracket = aw_bracket
            .into_iter()
            .map(|b| (&b + b.transpose()) * 0.5)
            .collect();
        Ok(Self {
            n,
            d0: asm.d0,
            d1: asm.d1,
            sigma,
            bracket,
            adjoints: asm.adjoints,
            rep,
        })
    }

    pub fn rep(&self) -> &CentralRep {
        &self.rep
    }

    pub fn context(&self) -> &LieContext {
        self.rep.context()
    }

    pub fn genus(&self) -> usize {
        self.rep.genus()
    }

    /// `dim g`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of `C^j`.
    pub fn cochain_dim(&self, j: usize) -> Result<usize> {
        match j {
            0 | 2 => Ok(self.n),
            1 => Ok(self.d1.ncols()),
            _ => Err(Error::DegreeOutOfRange(j)),
        }
    }

    pub fn c1_dim(&self) -> usize {
        self.d1.ncols()
    }

    pub fn d0(&self) -> &DMatrix<f64> {
        &self.d0
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    /// Matrix of `cup_sigma`.
    pub fn sigma_matrix(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Matrices `B_m` with `cup_bracket(u, v)_m = u^T B_m v`.
    pub fn bracket_tables(&self) -> &[DMatrix<f64>] {
        &self.bracket
    }

    /// `Ad(rho_s)` for each generator.
    pub fn image_adjoints(&self) -> &[DMatrix<f64>] {
        &self.adjoints
    }

    /// Gram matrix of the pairing of `C^0` with `C^2`.
    pub fn gram(&self) -> &DMatrix<f64> {
        self.context().gram()
    }

    pub fn cup_sigma(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.sigma * v))
    }

    pub fn cup_bracket(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.n, self.bracket.iter().map(|b| u.dot(&(b * v))))
    }

    /// Derivative of `u -> cup_bracket(u, u)` at `u`, i.e. `v -> 2 [u, v]`.
    pub fn bracket_jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.c1_dim());
        for (m, b) in self.bracket.iter().enumerate() {
            out.set_row(m, &((b * u).transpose() * 2.0));
        }
        out
    }

    pub fn pair02(&self, phi: &DVector<f64>, beta: &DVector<f64>) -> f64 {
        phi.dot(&(self.gram() * beta))
    }

    /// Blockwise bracket `[u_s, phi]` of a 1-cochain with a constant.
    pub fn bracket_c1_c0(&self, u: &DVector<f64>, phi: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let ctx = self.context();
        let mut out = DVector::zeros(u.len());
        for s in 0..u.len() / n {
            let block = u.rows(s * n, n).into_owned();
            out.rows_mut(s * n, n)
                .copy_from(&ctx.bracket_coords(&block, phi));
        }
        out
    }

    /// Matrix of `u -> [phi, u]` on `C^1`, blockwise.
    pub fn ad_c1(&self, phi: &DVector<f64>) -> DMatrix<f64> {
        linalg::block_diag(&self.context().ad_matrix(phi), self.genus() * 2)
    }

    /// Blockwise action of an adjoint matrix on `C^1`.
    pub fn act_c1(&self, adjoint: &DMatrix<f64>) -> DMatrix<f64> {
        linalg::block_diag(adjoint, self.genus() * 2)
    }

    pub fn betti(&self) -> [usize; 3] {
        let r0 = linalg::rank(&self.d0);
        let r1 = linalg::rank(&self.d1);
        [self.n - r0, self.c1_dim() - r0 - r1, self.n - r1]
    }

    pub fn euler_characteristic(&self) -> i64 {
        let b = self.betti();
        b[0] as i64 - b[1] as i64 + b[2] as i64
    }

    pub fn d1d0_residual(&self) -> f64 {
        linalg::max_abs(&(&self.d1 * &self.d0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{AlgebraElement, GroupId};
    use crate::surface::CentralRep;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diagonal_rep(genus: usize, angles: &[f64]) -> CentralRep {
        let ctx = LieContext::new(GroupId::SU2);
        let images = angles
            .iter()
            .map(|&t| ctx.exp_coords(&DVector::from_column_slice(&[0.0, 0.0, t])))
            .collect();
        assert_eq!(angles.len(), 2 * genus);
        CentralRep::with_twist(ctx, images, AlgebraElement::zero(3), 0).unwrap()
    }

    #[test]
    fn trivial_rep_has_zero_differentials() {
        for g in 1..=3 {
            let ctx = LieContext::new(GroupId::SU2);
            let cx = TwistedComplex::build(CentralRep::trivial(ctx, g).unwrap()).unwrap();
            assert_eq!(linalg::max_abs(cx.d0()), 0.0);
            assert!(linalg::max_abs(cx.d1()) < 1e-15);
            assert_eq!(cx.betti(), [3, 6 * g, 3]);
        }
    }

    #[test]
    fn trivial_rep_pairings_closed_form() {
        let ctx = LieContext::new(GroupId::SU2);
        let cx = TwistedComplex::build(CentralRep::trivial(ctx.clone(), 2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        use rand::Rng;
        let u = DVector::from_fn(12, |_, _| rng.random_range(-1.0..1.0));
        let v = DVector::from_fn(12, |_, _| rng.random_range(-1.0..1.0));
        let blk = |w: &DVector<f64>, s: usize| w.rows(3 * s, 3).into_owned();
        let mut sigma = 0.0;
        let mut br = DVector::zeros(3);
        for i in 0..2 {
            sigma += ctx.inner(&blk(&u, 2 * i), &blk(&v, 2 * i + 1))
                - ctx.inner(&blk(&u, 2 * i + 1), &blk(&v, 2 * i));
            br += ctx.bracket_coords(&blk(&u, 2 * i), &blk(&u, 2 * i + 1)) * 2.0;
        }
        assert!((cx.cup_sigma(&u, &v) - sigma).abs() < 1e-14);
        assert!((cx.cup_bracket(&u, &u) - br).amax() < 1e-14);
    }

    #[test]
    fn generic_diagonal_genus_one_betti() {
        let cx = TwistedComplex::build(diagonal_rep(1, &[0.4, 1.1])).unwrap();
        assert_eq!(cx.betti(), [1, 2, 1]);
        assert_eq!(cx.euler_characteristic(), 0);
    }

    #[test]
    fn non_central_rep_is_rejected() {
        let ctx = LieContext::new(GroupId::SU2);
        let a = ctx.exp_coords(&DVector::from_column_slice(&[0.05, 0.0, 0.0]));
        let b = ctx.exp_coords(&DVector::from_column_slice(&[0.0, 1.0, 0.0]));
        let rep = CentralRep::with_twist(ctx, vec![a, b], AlgebraElement::zero(3), 0).unwrap();
        assert!(rep.defect() > 0.05);
        assert!(matches!(
            TwistedComplex::build(rep.clone()),
            Err(Error::NotCentral { .. })
        ));
        let (d0, d1) = twisted_differentials(&rep);
        assert!(linalg::max_abs(&(d1 * d0)) > 1e-3);
    }

    #[test]
    fn cochain_dims() {
        let cx = TwistedComplex::build(diagonal_rep(1, &[0.4, 1.1])).unwrap();
        assert_eq!(cx.cochain_dim(1).unwrap(), 6);
        assert!(matches!(cx.cochain_dim(3), Err(Error::DegreeOutOfRange(3))));
    }
}
