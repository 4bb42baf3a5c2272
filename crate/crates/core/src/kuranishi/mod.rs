//! The local model at one central representation: curvature map, Kuranishi
//! map and its inverse, momentum maps, the cone and the chart maps.

mod sample;

pub use sample::{PolishRecord, ReducedSample, SampleRecord};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hodge::KaehlerHodgePackage;
use crate::lie::AlgebraElement;
use crate::linalg;
use crate::rng;
use crate::surface::{self, CentralRep, Stabilizer, TwistedComplex};
use crate::tolerance::Tolerances;

pub const INVERSE_MAX_ITERATIONS: usize = 200;
/// `r_A = BALL_NUMERATOR / max(1, norm_h)`.
pub const BALL_NUMERATOR: f64 = 0.25;

/// Coordinates of a momentum value in the basis dual to the orthonormal
/// basis of `z_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumValue {
    pub coords: DVector<f64>,
}

impl MomentumValue {
    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }
}

#[derive(Debug, Clone)]
pub struct InverseOutcome {
    pub eta: DVector<f64>,
    pub iterations: usize,
    /// The input lay in the certified ball.
    pub certified: bool,
}

#[derive(Debug, Clone)]
pub struct ChartPoint {
    pub phi: DVector<f64>,
    pub vartheta: MomentumValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonsingularReport {
    pub nonsingular: bool,
    /// Largest entry of the infinitesimal `z_A` action on harmonic 1-cochains.
    pub infinitesimal: f64,
    /// Largest deviation of a sampled stabilizer element from the identity on harmonics.
    pub sampled: f64,
    /// Largest momentum value over the polarized harmonic basis.
    pub momentum: f64,
}

#[derive(Debug, Clone)]
pub struct KuranishiChart {
    package: KaehlerHodgePackage,
    stab: Stabilizer,
    k_xi: DVector<f64>,
    norm_h: f64,
    ball_radius: f64,
    h1_infinitesimal: Vec<DMatrix<f64>>,
    h1_sample_actions: Vec<DMatrix<f64>>,
    h2_sample_actions: Vec<DMatrix<f64>>,
    seed: u64,
    tolerances: Tolerances,
}

impl KuranishiChart {
    /// Builds complex, package and chart. `seed` drives stabilizer sampling.
    pub fn new(rep: CentralRep, seed: u64) -> Result<Self> {
        let package = KaehlerHodgePackage::build(TwistedComplex::build(rep)?)?;
        Ok(Self::from_package(package, seed))
    }

    pub fn from_package(package: KaehlerHodgePackage, seed: u64) -> Self {
        let complex = package.complex();
        let mut stream = rng::stream(seed, "surface.stabilizer");
        let stab = surface::stabilizer_group(
            complex.rep(),
            surface::DEFAULT_STABILIZER_SAMPLES,
            &mut stream,
        );
        let k_xi = complex.rep().x_xi().coeffs.clone();

        let (w1, w1_inv) = package.metric_sqrt(1).expect("degree 1");
        let m = w1 * package.homotopy(2).expect("degree 2");
        let hat_tables: Vec<DMatrix<f64>> = complex
            .bracket_tables()
            .iter()
            .map(|b| w1_inv * b * w1_inv)
            .collect();
        let mut frob2 = 0.0;
        for c in 0..m.nrows() {
            let mut slice = DMatrix::zeros(complex.c1_dim(), complex.c1_dim());
            for (k, t) in hat_tables.iter().enumerate() {
                slice += t * m[(c, k)];
            }
            frob2 += slice.norm_squared();
        }
        let norm_h = frob2.sqrt();
        let ball_radius = BALL_NUMERATOR / norm_h.max(1.0);

        let harm1 = package.harmonic_basis(1).expect("degree 1").clone();
        let harm2 = package.harmonic_basis(2).expect("degree 2").clone();
        let g1 = package.g1().clone();
        let gram = complex.gram().clone();
        let restrict1 = |op: &DMatrix<f64>| harm1.transpose() * &g1 * op * &harm1;
        let restrict2 = |op: &DMatrix<f64>| harm2.transpose() * &gram * op * &harm2;
        let h1_infinitesimal = (0..stab.dim())
            .map(|i| restrict1(&complex.ad_c1(&stab.algebra.column(i).into_owned())))
            .collect();
        let h1_sample_actions = stab
            .sample_adjoints
            .iter()
            .map(|ad| restrict1(&complex.act_c1(ad)))
            .collect();
        let h2_sample_actions = stab.sample_adjoints.iter().map(restrict2).collect();
        Self {
            package,
            stab,
            k_xi,
            norm_h,
            ball_radius,
            h1_infinitesimal,
            h1_sample_actions,
            h2_sample_actions,
            seed,
            tolerances: Tolerances::default(),
        }
    }

    /// Replaces the threshold table used by membership tests, the cone test,
    /// the nonsingularity test and sampling.
    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.package
            .set_cocycle_tolerance(tolerances.get("cocycle"));
        self.tolerances = tolerances;
        self
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn package(&self) -> &KaehlerHodgePackage {
        &self.package
    }

    pub fn complex(&self) -> &TwistedComplex {
        self.package.complex()
    }

    pub fn rep(&self) -> &CentralRep {
        self.complex().rep()
    }

    pub fn stabilizer(&self) -> &Stabilizer {
        &self.stab
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn k_xi(&self) -> &DVector<f64> {
        &self.k_xi
    }

    pub fn norm_h(&self) -> f64 {
        self.norm_h
    }

    /// Radius of the certified ball, in the `g1` norm.
    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn h1_dim(&self) -> usize {
        self.package.harmonic_dim(1).expect("degree 1")
    }

    pub fn z_dim(&self) -> usize {
        self.stab.dim()
    }

    /// Matrices of the `z_A` basis acting on harmonic 1-cochains, in the harmonic basis.
    pub fn h1_infinitesimal_actions(&self) -> &[DMatrix<f64>] {
        &self.h1_infinitesimal
    }

    pub fn h1_sample_actions(&self) -> &[DMatrix<f64>] {
        &self.h1_sample_actions
    }

    pub fn h2_sample_actions(&self) -> &[DMatrix<f64>] {
        &self.h2_sample_actions
    }

    pub fn norm1(&self, v: &DVector<f64>) -> f64 {
        self.package.norm(v, 1).expect("degree 1")
    }

    pub fn curvature_quad(&self, eta: &DVector<f64>) -> DVector<f64> {
        let cx = self.complex();
        &self.k_xi + cx.d1() * eta + cx.cup_bracket(eta, eta) * 0.5
    }

    /// Coboundary part of `curvature_quad(eta) - K_xi`, in the `C^2` metric.
    pub fn slice_variety_residual(&self, eta: &DVector<f64>) -> f64 {
        let delta = self.curvature_quad(eta) - &self.k_xi;
        let p2 = self.package.exact_projector(2).expect("degree 2");
        self.package.norm(&(p2 * delta), 2).expect("degree 2")
    }

    /// Component of `eta` outside the transverse slice `ker D0^*`.
    pub fn slice_residual(&self, eta: &DVector<f64>) -> f64 {
        let v = self.package.d0adj() * eta;
        self.package.norm(&v, 0).expect("degree 0")
    }

    pub fn j_sharp(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        let residual = self.slice_variety_residual(eta);
        if residual > self.tolerances.get("slice_variety") {
            return Err(Error::NotInSliceVariety(residual));
        }
        self.package.harmonic_part(&self.curvature_quad(eta), 2)
    }

    /// `h2(cup_bracket(eta, eta))`.
    pub fn h_bracket(&self, eta: &DVector<f64>) -> DVector<f64> {
        self.package.homotopy(2).expect("degree 2") * self.complex().cup_bracket(eta, eta)
    }

    pub fn kuranishi_f(&self, eta: &DVector<f64>) -> DVector<f64> {
        eta + self.h_bracket(eta) * 0.5
    }

    /// Distance of a 1-cochain from the harmonic space, in the `g1` norm.
    pub fn harmonic_defect(&self, xi: &DVector<f64>) -> f64 {
        let h = self.package.harmonic_part(xi, 1).expect("degree 1");
        self.norm1(&(xi - h))
    }

    /// Solves `kuranishi_f(eta) = xi` by the fixed-point iteration
    /// `eta <- xi - h2[eta, eta] / 2`.
    pub fn kuranishi_inverse(&self, xi: &DVector<f64>) -> Result<InverseOutcome> {
        let scale = 1.0 + self.norm1(xi);
        if self.harmonic_defect(xi) > self.tolerances.get("cocycle") * scale {
            return Err(Error::NotInChart("input is not harmonic".into()));
        }
        let certified = self.norm1(xi) <= self.ball_radius * (1.0 + 1e-12);
        let mut eta = xi.clone();
        for it in 1..=INVERSE_MAX_ITERATIONS {
            let next = xi - self.h_bracket(&eta) * 0.5;
            let step = self.norm1(&(&next - &eta));
            eta = next;
            if !step.is_finite() || self.norm1(&eta) > 1e6 * scale {
                return Err(Error::NoConvergence {
                    iterations: it,
                    residual: step,
                });
            }
            if step <= 1e-15 * scale {
                return Ok(InverseOutcome {
                    eta,
                    iterations: it,
                    certified,
                });
            }
        }
        let residual = self.norm1(&(self.kuranishi_f(&eta) - xi));
        if residual <= 1e-12 * scale {
            return Ok(InverseOutcome {
                eta,
                iterations: INVERSE_MAX_ITERATIONS,
                certified,
            });
        }
        Err(Error::NoConvergence {
            iterations: INVERSE_MAX_ITERATIONS,
            residual,
        })
    }

    /// Momentum value of a harmonic 2-cochain.
    pub fn momentum_coords(&self, beta: &DVector<f64>) -> MomentumValue {
        let cx = self.complex();
        let coords = DVector::from_iterator(
            self.stab.dim(),
            (0..self.stab.dim())
                .map(|i| cx.pair02(&self.stab.algebra.column(i).into_owned(), beta)),
        );
        MomentumValue { coords }
    }

    /// `Theta(xi)`: coordinates of `kappa(cup_bracket(xi, xi)) / 2`.
    pub fn theta(&self, xi: &DVector<f64>) -> MomentumValue {
        let b = self.complex().cup_bracket(xi, xi) * 0.5;
        let h = self.package.harmonic_part(&b, 2).expect("degree 2");
        self.momentum_coords(&h)
    }

    /// Derivative of `Theta` at `xi` as a matrix acting on `C^1`.
    pub fn theta_jacobian(&self, xi: &DVector<f64>) -> DMatrix<f64> {
        let cx = self.complex();
        let harm = self.package.harmonic_projector(2).expect("degree 2");
        let dual = self.stab.algebra.transpose() * cx.gram();
        dual * harm * cx.bracket_jacobian(xi) * 0.5
    }

    /// Predicted derivative of the `i`-th momentum component at `xi` in
    /// direction `v`: the symplectic pairing of the generated vector field
    /// with `v`.
    pub fn momentum_derivative(&self, i: usize, xi: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let phi = self.stab.algebra.column(i).into_owned();
        let cx = self.complex();
        let field = cx.ad_c1(&phi) * xi;
        cx.cup_sigma(&field, v)
    }

    /// Matrix of the coadjoint action of a stabilizer element on momentum coordinates.
    pub fn coadjoint(&self, adjoint: &DMatrix<f64>) -> DMatrix<f64> {
        self.stab.algebra.transpose() * self.complex().gram() * adjoint * &self.stab.algebra
    }

    pub fn phi_chart(&self, eta: &DVector<f64>) -> Result<ChartPoint> {
        let variety = self.slice_variety_residual(eta);
        let slice = self.slice_residual(eta);
        let limit = self.tolerances.get("slice_variety");
        if variety > limit || slice > limit {
            return Err(Error::NotInChart(format!(
                "slice-variety residual {variety:.3e}, slice residual {slice:.3e}"
            )));
        }
        let phi = self.kuranishi_f(eta);
        if self.norm1(&phi) > self.ball_radius * (1.0 + 1e-9) {
            return Err(Error::NotInChart(format!(
                "image norm {:.3e} exceeds ball radius {:.3e}",
                self.norm1(&phi),
                self.ball_radius
            )));
        }
        let curv = self.j_sharp(eta)? - &self.k_xi;
        let vartheta = self.momentum_coords(&self.package.kappa(&curv, 2)?);
        Ok(ChartPoint { phi, vartheta })
    }

    /// Cone membership with its residual `|Theta(xi)|`.
    pub fn cone_test(&self, xi: &DVector<f64>) -> (bool, f64) {
        let r = self.theta(xi).norm();
        let n = self.norm1(xi);
        (r <= self.tolerances.get("cone") * (1.0 + n * n), r)
    }

    pub fn nonsingular_report(&self) -> NonsingularReport {
        let infinitesimal = self
            .h1_infinitesimal
            .iter()
            .map(linalg::max_abs)
            .fold(0.0, f64::max);
        let d = self.h1_dim();
        let sampled = self
            .h1_sample_actions
            .iter()
            .map(|a| linalg::max_abs(&(a - DMatrix::identity(d, d))))
            .fold(0.0, f64::max);
        let limit = self.tolerances.get("nonsingular");
        let nonsingular = infinitesimal <= limit && sampled <= limit;
        NonsingularReport {
            nonsingular,
            infinitesimal,
            sampled,
            momentum: self.theta_polarized_max(),
        }
    }

    pub fn nonsingular_test(&self) -> bool {
        self.nonsingular_report().nonsingular
    }

    /// Largest `|Theta|` over `e_a` and `e_a + e_b` in the harmonic basis;
    /// zero exactly when the quadratic map vanishes.
    pub fn theta_polarized_max(&self) -> f64 {
        let harm = self.package.harmonic_basis(1).expect("degree 1");
        let d = harm.ncols();
        let mut worst = 0.0_f64;
        for a in 0..d {
            for b in a..d {
                let mut xi = harm.column(a).into_owned();
                if b != a {
                    xi += harm.column(b);
                }
                worst = worst.max(self.theta(&xi).norm());
            }
        }
        worst
    }

    /// Unit harmonic vector from the polarized basis maximizing `|Theta|`.
    pub fn theta_witness(&self) -> Option<(DVector<f64>, f64)> {
        let harm = self.package.harmonic_basis(1).expect("degree 1");
        let d = harm.ncols();
        let mut best: Option<(DVector<f64>, f64)> = None;
        for a in 0..d {
            for b in a..d {
                let mut xi = harm.column(a).into_owned();
                if b != a {
                    xi += harm.column(b);
                }
                let xi = &xi / self.norm1(&xi);
                let r = self.theta(&xi).norm();
                if best.as_ref().is_none_or(|(_, m)| r > *m) {
                    best = Some((xi, r));
                }
            }
        }
        best
    }

    /// Exact nonlinear curvature `log(relator(rho exp eta) c^-1) + X_xi`.
    pub fn relator_curvature(&self, eta: &DVector<f64>) -> Result<AlgebraElement> {
        let rep = self.rep();
        let images = rep.deformed_images(eta);
        let log = surface::relator_log(
            rep.context(),
            rep.presentation(),
            &images,
            rep.central_target(),
        )?;
        Ok(AlgebraElement::new(log + &rep.x_xi().coeffs))
    }

    /// Random harmonic 1-cochain with unit-variance coordinates in the
    /// orthonormal harmonic basis.
    pub fn random_harmonic<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let harm = self.package.harmonic_basis(1).expect("degree 1");
        let c = DVector::from_fn(harm.ncols(), |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        harm * c
    }

    /// Chart point: the Kuranishi inverse of a random harmonic vector of norm
    /// uniform in `[0, fraction * r_A]`.
    pub fn random_chart_point<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        fraction: f64,
    ) -> Result<DVector<f64>> {
        if self.h1_dim() == 0 {
            return Ok(DVector::zeros(self.complex().c1_dim()));
        }
        let dir = self.random_harmonic(rng);
        let dir = &dir / self.norm1(&dir);
        let radius = rng.random_range(0.0..=1.0) * fraction * self.ball_radius;
        Ok(self.kuranishi_inverse(&(dir * radius))?.eta)
    }
}
