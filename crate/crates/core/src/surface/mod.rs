//! Surface-group presentations and central representations.
//!
//! The closed genus-`g` surface is the one-vertex 2-complex with generators
//! `a1, b1, ..., ag, bg` and the single relator `a1 b1 a1^-1 b1^-1 ...`.
//! Generator `2i` is `a_{i+1}` and generator `2i + 1` is `b_{i+1}`.

mod complex;
mod polish;

pub use complex::{twisted_differentials, TwistedComplex};
pub use polish::{polish_relator, relator_log, PolishOutcome, POLISH_MAX_ITERATIONS};

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, CMatrix, GroupElement, LieContext};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePresentation {
    genus: usize,
    relator: Vec<Letter>,
}

impl SurfacePresentation {
    pub fn new(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidInput("genus must be at least 1".into()));
        }
        let relator = (0..genus)
            .flat_map(|i| {
                let (a, b) = (2 * i, 2 * i + 1);
                [
                    Letter {
                        generator: a,
                        inverse: false,
                    },
                    Letter {
                        generator: b,
                        inverse: false,
                    },
                    Letter {
                        generator: a,
                        inverse: true,
                    },
                    Letter {
                        generator: b,
                        inverse: true,
                    },
                ]
            })
            .collect();
        Ok(Self { genus, relator })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn generator_count(&self) -> usize {
        2 * self.genus
    }

    pub fn relator(&self) -> &[Letter] {
        &self.relator
    }

    pub fn generator_labels(&self) -> Vec<String> {
        (1..=self.genus)
            .flat_map(|i| [format!("a{i}"), format!("b{i}")])
            .collect()
    }

    /// Exponent sum of each generator in the relator.
    pub fn abelianization(&self) -> Vec<i64> {
        let mut out = vec![0; self.generator_count()];
        for l in &self.relator {
            out[l.generator] += if l.inverse { -1 } else { 1 };
        }
        out
    }

    /// Evaluates the relator on matrices, left to right.
    pub fn evaluate(&self, images: &[GroupElement]) -> GroupElement {
        let size = images.first().map_or(1, |a| a.size());
        let mut acc = CMatrix::identity(size, size);
        for l in &self.relator {
            let m = images[l.generator].matrix();
            acc = if l.inverse {
                acc * m.adjoint()
            } else {
                acc * m
            };
        }
        GroupElement::from_matrix_unchecked(acc)
    }

    /// Prefix products `P_0 = I, P_{k+1} = P_k x_k` of the relator.
    pub fn prefixes(&self, images: &[GroupElement]) -> Vec<GroupElement> {
        let size = images.first().map_or(1, |a| a.size());
        let mut out = Vec::with_capacity(self.relator.len() + 1);
        let mut acc = CMatrix::identity(size, size);
        out.push(GroupElement::from_matrix_unchecked(acc.clone()));
        for l in &self.relator {
            let m = images[l.generator].matrix();
            acc = if l.inverse {
                acc * m.adjoint()
            } else {
                acc * m
            };
            out.push(GroupElement::from_matrix_unchecked(acc.clone()));
        }
        out
    }
}

/// Product of commutators `prod [a_i, b_i]` over consecutive pairs of `images`.
pub fn relator_eval(images: &[GroupElement]) -> Result<GroupElement> {
    if images.is_empty() || !images.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "expected an even, positive number of images, got {}",
            images.len()
        )));
    }
    Ok(SurfacePresentation::new(images.len() / 2)?.evaluate(images))
}

/// A representation of the surface group whose relator is sent to a
/// prescribed central element `c`, the holonomy picture of a central
/// connection.
#[derive(Debug, Clone)]
pub struct CentralRep {
    context: LieContext,
    presentation: SurfacePresentation,
    images: Vec<GroupElement>,
    central_target: GroupElement,
    x_xi: AlgebraElement,
    defect: f64,
}

impl CentralRep {
    /// Validates the data and records the relator defect. The defect itself is
    /// not bounded here; [`TwistedComplex::build`] enforces admission.
    ///
    /// `central_target` must be central, `x_xi` must lie in the center of the
    /// algebra and `exp(x_xi) c^-1` must be one of the context's discrete
    /// central elements.
    pub fn new(
        context: LieContext,
        images: Vec<GroupElement>,
        x_xi: AlgebraElement,
        central_target: GroupElement,
    ) -> Result<Self> {
        if images.is_empty() || !images.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "expected 2g images, got {}",
                images.len()
            )));
        }
        let presentation = SurfacePresentation::new(images.len() / 2)?;
        let images = images
            .into_iter()
            .map(|a| context.element(a.into_matrix()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let central_target = context.element(central_target.into_matrix())?;
        if x_xi.dim() != context.dim() {
            return Err(Error::InvalidInput(format!(
                "central value has {} coordinates, expected {}",
                x_xi.dim(),
                context.dim()
            )));
        }
        for b in context.basis() {
            let comm = central_target.matrix() * b - b * central_target.matrix();
            if comm.norm() > tolerance::LIE_IDENTITY {
                return Err(Error::InvalidInput(format!(
                    "central target is not central: commutator {:.3e}",
                    comm.norm()
                )));
            }
        }
        let off_center: f64 = (0..context.dim())
            .filter(|i| !context.center_basis().contains(i))
            .map(|i| x_xi.coeffs[i].abs())
            .fold(0.0, f64::max);
        if off_center > tolerance::LIE_IDENTITY {
            return Err(Error::InvalidInput(format!(
                "central value leaves the center by {off_center:.3e}"
            )));
        }
        let twist = context.exp_alg(&x_xi).mul(&central_target.inverse());
        let twist_distance = context
            .discrete_center()
            .iter()
            .map(|d| d.distance(&twist))
            .fold(f64::INFINITY, f64::min);
        if twist_distance > tolerance::DEFECT_ADMISSION {
            return Err(Error::InvalidInput(format!(
                "exp of the central value misses the target by {twist_distance:.3e}"
            )));
        }
        let defect = Self::defect_of(&presentation, &images, &central_target);
        Ok(Self {
            context,
            presentation,
            images,
            central_target,
            x_xi,
            defect,
        })
    }

    /// Uses `c = exp(x_xi) d` with `d` the `twist`-th discrete central element.
    pub fn with_twist(
        context: LieContext,
        images: Vec<GroupElement>,
        x_xi: AlgebraElement,
        twist: usize,
    ) -> Result<Self> {
        let d = context
            .discrete_center()
            .get(twist)
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("no discrete central element {twist}")))?;
        let c = context.exp_alg(&x_xi).mul(&d);
        Self::new(context, images, x_xi, c)
    }

    /// All images equal to the identity.
    pub fn trivial(context: LieContext, genus: usize) -> Result<Self> {
        let n = context.dim();
        let images = vec![context.identity(); 2 * genus];
        Self::with_twist(context, images, AlgebraElement::zero(n), 0)
    }

    fn defect_of(
        presentation: &SurfacePresentation,
        images: &[GroupElement],
        c: &GroupElement,
    ) -> f64 {
        let r = presentation.evaluate(images).mul(&c.inverse());
        let size = r.size();
        (r.matrix() - CMatrix::identity(size, size)).norm()
    }

    /// Same target, new images.
    pub fn with_images(&self, images: Vec<GroupElement>) -> Result<Self> {
        Self::new(
            self.context.clone(),
            images,
            self.x_xi.clone(),
            self.central_target.clone(),
        )
    }

    pub fn context(&self) -> &LieContext {
        &self.context
    }

    pub fn presentation(&self) -> &SurfacePresentation {
        &self.presentation
    }

    pub fn genus(&self) -> usize {
        self.presentation.genus()
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn central_target(&self) -> &GroupElement {
        &self.central_target
    }

    pub fn x_xi(&self) -> &AlgebraElement {
        &self.x_xi
    }

    /// Frobenius norm of `relator(images) c^-1 - I`.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// Images deformed as `rho_s exp(eta_s)` with `eta` in C^1 block layout.
    pub fn deformed_images(&self, eta: &nalgebra::DVector<f64>) -> Vec<GroupElement> {
        let n = self.context.dim();
        self.images
            .iter()
            .enumerate()
            .map(|(s, a)| {
                let block = eta.rows(s * n, n).into_owned();
                a.mul(&self.context.exp_coords(&block))
            })
            .collect()
    }
}

/// Stabilizer data: an orthonormal basis of its Lie algebra and sampled
/// group elements that commute with every image.
#[derive(Debug, Clone)]
pub struct Stabilizer {
    /// Gram-orthonormal basis of `z_A`, as columns.
    pub algebra: DMatrix<f64>,
    pub samples: Vec<GroupElement>,
    /// `Ad` matrices of the samples.
    pub sample_adjoints: Vec<DMatrix<f64>>,
}

impl Stabilizer {
    pub fn dim(&self) -> usize {
        self.algebra.ncols()
    }
}

pub const DEFAULT_STABILIZER_SAMPLES: usize = 32;

/// Basis of `z_A` and up to `count` sampled stabilizer elements: the
/// identity, central and listed extra-component elements that commute with
/// the images, then exponentials of random `z_A` vectors with their inverses.
pub fn stabilizer_group<R: Rng + ?Sized>(
    rep: &CentralRep,
    count: usize,
    rng: &mut R,
) -> Stabilizer {
    let ctx = rep.context();
    let algebra = ctx.centralizer_matrix(rep.images());
    let commutes = |z: &GroupElement| {
        rep.images()
            .iter()
            .all(|a| z.commutator_norm(a) <= tolerance::LIE_IDENTITY)
    };
    let mut samples: Vec<GroupElement> = Vec::new();
    let push = |z: GroupElement, samples: &mut Vec<GroupElement>| {
        if samples.len() < count && !samples.iter().any(|w| w.distance(&z) < 1e-12) {
            samples.push(z);
        }
    };
    push(ctx.identity(), &mut samples);
    for d in ctx.discrete_center().iter().chain(ctx.extra_components()) {
        if commutes(d) {
            push(d.clone(), &mut samples);
        }
    }
    if algebra.ncols() > 0 {
        let discrete: Vec<GroupElement> = samples.clone();
        let mut attempts = 0;
        while samples.len() < count && attempts < 4 * count {
            attempts += 1;
            let w = nalgebra::DVector::from_fn(algebra.ncols(), |_, _| {
                rng.sample::<f64, _>(rand_distr::StandardNormal) * 1.5
            });
            let z = ctx.exp_coords(&(&algebra * w));
            let z = discrete[attempts % discrete.len()].mul(&z);
            push(z.inverse(), &mut samples);
            push(z, &mut samples);
        }
    }
    let sample_adjoints = samples.iter().map(|z| ctx.adjoint_action(z)).collect();
    Stabilizer {
        algebra,
        samples,
        sample_adjoints,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::GroupId;
    use nalgebra::{Complex, DVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_pair(ctx: &LieContext) -> Vec<GroupElement> {
        (0..2)
            .map(|k| {
                let mut x = DVector::zeros(3);
                x[k] = 1.0;
                GroupElement::from_matrix_unchecked(ctx.matrix_of(&x))
            })
            .collect()
    }

    #[test]
    fn relator_word_shape() {
        let p = SurfacePresentation::new(3).unwrap();
        assert_eq!(p.relator().len(), 12);
        assert!(p.abelianization().iter().all(|&e| e == 0));
        assert_eq!(p.generator_labels()[3], "b2");
        assert!(SurfacePresentation::new(0).is_err());
    }

    #[test]
    fn relator_examples() {
        let ctx = LieContext::new(GroupId::SU2);
        let id = relator_eval(&[ctx.identity(), ctx.identity()]).unwrap();
        assert!(id.distance(&ctx.identity()) < 1e-15);
        // (i s1)(i s2)(i s1)^-1(i s2)^-1 = (i s1)(i s2)(-i s1)(-i s2) = -I by hand.
        let r = relator_eval(&pauli_pair(&ctx)).unwrap();
        let minus = CMatrix::identity(2, 2) * Complex::new(-1.0, 0.0);
        assert!((r.matrix() - minus).norm() < 1e-15);
        let d1 = ctx.exp_coords(&DVector::from_column_slice(&[0.0, 0.0, 0.3]));
        let d2 = ctx.exp_coords(&DVector::from_column_slice(&[0.0, 0.0, -1.7]));
        assert!(relator_eval(&[d1, d2]).unwrap().distance(&ctx.identity()) < 1e-14);
        assert!(relator_eval(&[ctx.identity()]).is_err());
    }

    #[test]
    fn central_rep_validation() {
        let ctx = LieContext::new(GroupId::SU2);
        let rep = CentralRep::with_twist(ctx.clone(), pauli_pair(&ctx), AlgebraElement::zero(3), 1)
            .unwrap();
        assert!(rep.defect() < 1e-14);
        let bad_x = AlgebraElement::from_slice(&[0.0, 0.0, 1.0]);
        assert!(CentralRep::with_twist(ctx.clone(), pauli_pair(&ctx), bad_x, 0).is_err());
        let wrong_target =
            CentralRep::with_twist(ctx.clone(), pauli_pair(&ctx), AlgebraElement::zero(3), 0)
                .unwrap();
        assert!((wrong_target.defect() - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn u2_twist_through_center_algebra() {
        let ctx = LieContext::new(GroupId::U2);
        let images: Vec<GroupElement> = (1..3)
            .map(|k| {
                let mut x = DVector::zeros(4);
                x[k] = 1.0;
                GroupElement::from_matrix_unchecked(ctx.matrix_of(&x))
            })
            .collect();
        let x = AlgebraElement::from_slice(&[std::f64::consts::PI, 0.0, 0.0, 0.0]);
        let rep = CentralRep::with_twist(ctx, images, x, 0).unwrap();
        assert!(rep.defect() < 1e-14);
    }

    #[test]
    fn stabilizer_examples() {
        let ctx = LieContext::new(GroupId::SU2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rep = CentralRep::with_twist(ctx.clone(), pauli_pair(&ctx), AlgebraElement::zero(3), 1)
            .unwrap();
        let st = stabilizer_group(&rep, 32, &mut rng);
        assert_eq!(st.dim(), 0);
        assert_eq!(st.samples.len(), 2);

        let triv = CentralRep::trivial(ctx.clone(), 2).unwrap();
        let st = stabilizer_group(&triv, 32, &mut rng);
        assert_eq!(st.dim(), 3);
        assert_eq!(st.samples.len(), 32);

        let d1 = ctx.exp_coords(&DVector::from_column_slice(&[0.0, 0.0, 0.3]));
        let d2 = ctx.exp_coords(&DVector::from_column_slice(&[0.0, 0.0, 1.1]));
        let diag = CentralRep::trivial(ctx.clone(), 1)
            .unwrap()
            .with_images(vec![d1, d2])
            .unwrap();
        let st = stabilizer_group(&diag, 32, &mut rng);
        assert_eq!(st.dim(), 1);
        for z in &st.samples {
            for a in diag.images() {
                assert!(z.commutator_norm(a) < 1e-12);
            }
        }
    }
}
