//! Named residual checks over a chart and everything beneath it.
//!
//! Each check returns one [`InvariantResult`]: the largest residual observed,
//! the tolerance it was held to and the verdict. Checks draw randomness from
//! streams labelled by their own name, so adding or reordering checks does
//! not perturb the others.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kuranishi::KuranishiChart;
use crate::lie::LieContext;
use crate::linalg;
use crate::rng;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    AtMost,
    AtLeast,
}

impl Comparison {
    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::AtMost => "le",
            Comparison::AtLeast => "ge",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantResult {
    pub name: String,
    pub residual: f64,
    pub tolerance_name: String,
    pub tolerance: f64,
    pub comparison: Comparison,
    /// No data point exercised the check (e.g. a slope over identically zero errors).
    pub vacuous: bool,
    pub passed: bool,
}

impl InvariantResult {
    fn new(
        name: &str,
        residual: f64,
        tol: &Tolerances,
        tolerance_name: &str,
        comparison: Comparison,
    ) -> Self {
        let tolerance = tol.get(tolerance_name);
        let passed = match comparison {
            Comparison::AtMost => residual <= tolerance,
            Comparison::AtLeast => residual >= tolerance,
        };
        Self {
            name: name.to_string(),
            residual,
            tolerance_name: tolerance_name.to_string(),
            tolerance,
            comparison,
            vacuous: false,
            passed,
        }
    }

    fn vacuous(name: &str, tol: &Tolerances, tolerance_name: &str, comparison: Comparison) -> Self {
        Self {
            name: name.to_string(),
            residual: 0.0,
            tolerance_name: tolerance_name.to_string(),
            tolerance: tol.get(tolerance_name),
            comparison,
            vacuous: true,
            passed: true,
        }
    }
}

impl fmt::Display for InvariantResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let cmp = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        };
        write!(
            f,
            "{verdict} {:<40} {:.3e} {cmp} {:.1e}{}",
            self.name,
            self.residual,
            self.tolerance,
            if self.vacuous { " (vacuous)" } else { "" }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Random vectors or chart points per sampled check.
    pub samples: usize,
    /// Cocycles in the second-order agreement test.
    pub taylor_cocycles: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            samples: 100,
            taylor_cocycles: 20,
            seed: 0,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    })
}

struct Runner<'a> {
    tol: &'a Tolerances,
    opts: SuiteOptions,
    out: Vec<InvariantResult>,
}

impl<'a> Runner<'a> {
    fn stream(&self, name: &str) -> ChaCha8Rng {
        rng::stream(self.opts.seed, &format!("suite.{name}"))
    }

    fn le(&mut self, name: &str, tolerance: &str, residual: f64) {
        self.out.push(InvariantResult::new(
            name,
            residual,
            self.tol,
            tolerance,
            Comparison::AtMost,
        ));
    }
}

/// Checks of the Lie backend alone.
pub fn lie_suite(ctx: &LieContext, tol: &Tolerances, opts: SuiteOptions) -> Vec<InvariantResult> {
    let mut r = Runner {
        tol,
        opts,
        out: Vec::new(),
    };
    let n = ctx.dim();
    let gram = ctx.gram();
    let min_eig = gram.clone().symmetric_eigenvalues().min();
    let asym = linalg::max_abs(&(gram - gram.transpose()));
    r.le(
        "lie.gram_positive_definite",
        "lie_identity",
        if min_eig > 0.0 { asym } else { f64::INFINITY },
    );
    r.le(
        "lie.bracket_invariance",
        "lie_identity",
        ctx.invariance_residual(),
    );
    r.le("lie.jacobi", "lie_identity", ctx.jacobi_residual());
    let center = worst(ctx.center_basis().iter().flat_map(|&c| {
        (0..n).map(move |j| {
            let mut x = DVector::zeros(n);
            let mut y = DVector::zeros(n);
            x[c] = 1.0;
            y[j] = 1.0;
            ctx.bracket_coords(&x, &y).amax()
        })
    }));
    r.le("lie.center_is_central", "lie_identity", center);

    let mut s = r.stream("lie.adjoint_orthogonality");
    let orth = worst((0..opts.samples).map(|_| {
        let a = ctx.random_element(&mut s);
        let ad = ctx.adjoint_action(&a);
        let x = gaussian(&mut s, n);
        let y = gaussian(&mut s, n);
        let pointwise = (ctx.inner(&(&ad * &x), &(&ad * &y)) - ctx.inner(&x, &y)).abs();
        pointwise.max(linalg::max_abs(&(ad.transpose() * gram * &ad - gram)))
    }));
    r.le("lie.adjoint_orthogonality", "lie_identity", orth);

    let mut s = r.stream("lie.exp_log_round_trip");
    let round = worst((0..opts.samples).map(|_| {
        let x = gaussian(&mut s, n);
        let x = &x / ctx.norm(&x).max(1e-300) * s.random_range(0.0..3.0);
        let a = ctx.exp_coords(&x);
        match ctx.log_group(&a) {
            Ok(l) => ctx.exp_alg(&l).distance(&a),
            Err(_) => f64::INFINITY,
        }
    }));
    r.le("lie.exp_log_round_trip", "identity_residual", round);

    let mut s = r.stream("lie.centralizer_fixed");
    let fixed = worst((0..opts.samples.min(20)).map(|_| {
        let elems: Vec<_> = (0..s.random_range(1..3))
            .map(|_| ctx.random_element(&mut s))
            .collect();
        centralizer_residual(ctx, &elems)
    }));
    r.le("lie.centralizer_fixed", "identity_residual", fixed);
    r.out
}

fn centralizer_residual(ctx: &LieContext, elems: &[crate::lie::GroupElement]) -> f64 {
    let z = ctx.centralizer_matrix(elems);
    let k = z.ncols();
    let orth = linalg::max_abs(&(z.transpose() * ctx.gram() * &z - DMatrix::identity(k, k)));
    let fix = worst(
        elems
            .iter()
            .map(|a| linalg::max_abs(&(ctx.adjoint_action(a) * &z - &z))),
    );
    orth.max(fix)
}

/// Checks of the twisted complex and its pairings.
pub fn surface_suite(
    chart: &KuranishiChart,
    tol: &Tolerances,
    opts: SuiteOptions,
) -> Vec<InvariantResult> {
    let mut r = Runner {
        tol,
        opts,
        out: Vec::new(),
    };
    let cx = chart.complex();
    let ctx = cx.context();
    let n = cx.n();
    let big = cx.c1_dim();
    let pkg = chart.package();
    let stab = chart.stabilizer();

    r.le(
        "surface.differential_square",
        "complex_residual",
        cx.d1d0_residual(),
    );
    let expected = (2 - 2 * cx.genus() as i64) * n as i64;
    r.le(
        "surface.euler_characteristic",
        "identity_residual",
        (cx.euler_characteristic() - expected).unsigned_abs() as f64,
    );
    let b = cx.betti();
    r.le(
        "surface.poincare_duality",
        "identity_residual",
        b[0].abs_diff(b[2]) as f64,
    );

    let mut s = r.stream("surface.stokes");
    let stokes = worst((0..opts.samples).map(|_| {
        let phi = gaussian(&mut s, n);
        let psi = gaussian(&mut s, big);
        (cx.pair02(&phi, &(cx.d1() * &psi)) - cx.cup_sigma(&(cx.d0() * &phi), &psi)).abs()
    }));
    r.le("surface.stokes", "identity_residual", stokes);

    let sigma = cx.sigma_matrix();
    r.le(
        "surface.sigma_antisymmetry",
        "identity_residual",
        linalg::max_abs(&(sigma + sigma.transpose())),
    );
    let mut s = r.stream("surface.bracket_symmetry");
    let sym = worst((0..opts.samples).map(|_| {
        let u = gaussian(&mut s, big);
        let v = gaussian(&mut s, big);
        (cx.cup_bracket(&u, &v) - cx.cup_bracket(&v, &u)).amax()
    }));
    r.le("surface.bracket_symmetry", "identity_residual", sym);

    let mut s = r.stream("surface.invariance_mixed");
    let mixed = worst((0..opts.samples).map(|_| {
        if stab.dim() == 0 {
            return 0.0;
        }
        let phi = &stab.algebra * gaussian(&mut s, stab.dim());
        let u = gaussian(&mut s, big);
        let v = gaussian(&mut s, big);
        (cx.pair02(&phi, &cx.cup_bracket(&u, &v)) - cx.cup_sigma(&u, &cx.bracket_c1_c0(&v, &phi)))
            .abs()
    }));
    r.le("surface.invariance_mixed", "identity_residual", mixed);

    let mut s = r.stream("surface.invariance_scalar");
    let scalar = worst((0..opts.samples).map(|_| {
        let phi = gaussian(&mut s, n);
        let psi = gaussian(&mut s, n);
        let beta = gaussian(&mut s, n);
        (cx.pair02(&ctx.bracket_coords(&phi, &psi), &beta)
            - cx.pair02(&phi, &ctx.bracket_coords(&psi, &beta)))
        .abs()
    }));
    r.le("surface.invariance_scalar", "identity_residual", scalar);

    let mut s = r.stream("surface.equivariance");
    let equi = worst(stab.sample_adjoints.iter().map(|z| {
        let zc = cx.act_c1(z);
        let u = gaussian(&mut s, big);
        let v = gaussian(&mut s, big);
        [
            linalg::max_abs(&(&zc * cx.d0() - cx.d0() * z)),
            linalg::max_abs(&(z * cx.d1() - cx.d1() * &zc)),
            linalg::max_abs(&(zc.transpose() * sigma * &zc - sigma)),
            linalg::max_abs(&(z.transpose() * cx.gram() * z - cx.gram())),
            (cx.cup_bracket(&(&zc * &u), &(&zc * &v)) - z * cx.cup_bracket(&u, &v)).amax(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }));
    r.le("surface.equivariance", "identity_residual", equi);

    let kernel = linalg::null_space(cx.d0());
    let cent = linalg::column_space(&stab.algebra);
    let dist = if kernel.ncols() == cent.ncols() {
        linalg::subspace_distance(&kernel, &cent)
    } else {
        f64::INFINITY
    };
    r.le("surface.kernel_is_centralizer", "identity_residual", dist);
    r.le(
        "surface.centralizer_fixed",
        "identity_residual",
        centralizer_residual(ctx, cx.rep().images()),
    );

    let cocycles = linalg::null_space(cx.d1());
    let mut s = r.stream("surface.bracket_descends");
    let descends = worst((0..opts.samples).map(|_| {
        if cocycles.ncols() == 0 {
            return 0.0;
        }
        let u = &cocycles * gaussian(&mut s, cocycles.ncols());
        let phi = gaussian(&mut s, n);
        let b = cx.cup_bracket(&u, &(cx.d0() * phi));
        pkg.harmonic_part(&b, 2).expect("degree 2").amax()
    }));
    r.le("surface.bracket_descends", "identity_residual", descends);
    r.out
}

/// Checks of the Kähler and Hodge package.
pub fn hodge_suite(
    chart: &KuranishiChart,
    tol: &Tolerances,
    opts: SuiteOptions,
) -> Vec<InvariantResult> {
    let mut r = Runner {
        tol,
        opts,
        out: Vec::new(),
    };
    let pkg = chart.package();
    let cx = chart.complex();
    let n = cx.n();
    let big = cx.c1_dim();
    let j = pkg.jop();
    let sigma = cx.sigma_matrix();
    let g1 = pkg.g1();
    let id = |k: usize| DMatrix::<f64>::identity(k, k);

    r.le(
        "hodge.complex_structure_square",
        "identity_residual",
        linalg::max_abs(&(j * j + id(big))),
    );
    r.le(
        "hodge.complex_structure_symplectic",
        "identity_residual",
        linalg::max_abs(&(j.transpose() * sigma * j - sigma)),
    );
    let min_eig = linalg::symmetrize(g1).symmetric_eigenvalues().min();
    let g1_res = linalg::max_abs(&(sigma * j - g1)).max(linalg::max_abs(&(g1 - g1.transpose())));
    r.le(
        "hodge.refined_metric",
        "identity_residual",
        if min_eig > 0.0 { g1_res } else { f64::INFINITY },
    );

    let star2 = pkg.star2();
    r.le(
        "hodge.codifferential_degree1",
        "identity_residual",
        linalg::max_abs(&(pkg.d0adj() - star2 * cx.d1() * j)),
    );
    r.le(
        "hodge.codifferential_degree2",
        "identity_residual",
        linalg::max_abs(&(pkg.d1adj() - j * cx.d0() * star2)),
    );

    let h1 = pkg.homotopy(1).expect("h1");
    let h2 = pkg.homotopy(2).expect("h2");
    let p = |k: usize| pkg.exact_projector(k).expect("degree");
    let harm = |k: usize| pkg.harmonic_projector(k).expect("degree");
    r.le(
        "hodge.codifferential_kills_homotopy",
        "identity_residual",
        linalg::max_abs(&(pkg.d0adj() * h2)),
    );
    let green_form = linalg::max_abs(&(h1 - pkg.d0adj() * pkg.green(1).unwrap() * p(1))).max(
        linalg::max_abs(&(h2 - pkg.d1adj() * pkg.green(2).unwrap() * p(2))),
    );
    r.le("hodge.homotopy_green_form", "identity_residual", green_form);

    let kernel_h = |h: &DMatrix<f64>, adj: &DMatrix<f64>| {
        let a = linalg::null_space(h);
        let b = linalg::null_space(adj);
        if a.ncols() == b.ncols() {
            linalg::subspace_distance(&a, &b)
        } else {
            f64::INFINITY
        }
    };
    r.le(
        "hodge.homotopy_kernel",
        "identity_residual",
        kernel_h(h1, pkg.d0adj()).max(kernel_h(h2, pkg.d1adj())),
    );
    r.le(
        "hodge.projector_from_homotopy",
        "identity_residual",
        linalg::max_abs(&(p(1) - cx.d0() * h1)).max(linalg::max_abs(&(p(2) - cx.d1() * h2))),
    );
    let homotopy = [
        linalg::op_norm(&(h1 * cx.d0() - (id(n) - harm(0)))),
        linalg::op_norm(&(cx.d0() * h1 + h2 * cx.d1() - (id(big) - harm(1)))),
        linalg::op_norm(&(cx.d1() * h2 - (id(n) - harm(2)))),
    ];
    r.le(
        "hodge.homotopy_identity",
        "identity_residual",
        worst(homotopy),
    );
    let green_inv = linalg::max_abs(&(pkg.laplacian(1).unwrap() * pkg.green(1).unwrap() - p(1)))
        .max(linalg::max_abs(
            &(pkg.laplacian(2).unwrap() * pkg.green(2).unwrap() - p(2)),
        ));
    r.le("hodge.green_inverse", "identity_residual", green_inv);

    let equi = worst(chart.stabilizer().sample_adjoints.iter().map(|z| {
        let zc = cx.act_c1(z);
        let comm = |a: &DMatrix<f64>, b: &DMatrix<f64>, op: &DMatrix<f64>| {
            linalg::max_abs(&(a * op - op * b))
        };
        worst([
            comm(z, z, pkg.laplacian(0).unwrap()),
            comm(&zc, &zc, pkg.laplacian(1).unwrap()),
            comm(z, z, pkg.laplacian(2).unwrap()),
            comm(&zc, &zc, p(1)),
            comm(z, z, p(2)),
            comm(&zc, &zc, harm(1)),
            comm(z, z, harm(2)),
            comm(z, z, harm(0)),
            comm(z, &zc, h1),
            comm(&zc, z, h2),
            comm(&zc, &zc, pkg.green(1).unwrap()),
            comm(z, z, pkg.green(2).unwrap()),
            comm(&zc, &zc, j),
        ])
    }));
    r.le("hodge.equivariance", "identity_residual", equi);

    let stab = chart.stabilizer();
    let infinitesimal = worst((0..stab.dim()).map(|i| {
        let ad = cx.ad_c1(&stab.algebra.column(i).into_owned());
        linalg::max_abs(&(&ad * j - j * &ad))
    }));
    r.le(
        "hodge.complex_structure_commutes",
        "identity_residual",
        infinitesimal,
    );

    let mut s = r.stream("hodge.class_compatibility");
    let compat = worst((0..opts.samples).map(|_| {
        let u = gaussian(&mut s, big);
        let v = gaussian(&mut s, big);
        let a = pkg.harmonic_part(&cx.cup_bracket(&u, &v), 2).unwrap();
        let b = pkg
            .harmonic_part(&cx.cup_bracket(&(j * &u), &(j * &v)), 2)
            .unwrap();
        (a - b).amax()
    }));
    r.le("hodge.class_compatibility", "class_residual", compat);

    let hb = pkg.harmonic_basis(1).unwrap();
    let d = hb.ncols();
    let preserve = linalg::max_abs(&((id(big) - harm(1)) * j * hb));
    let orthonormal = linalg::max_abs(&(hb.transpose() * g1 * hb - id(d)));
    let jh = hb.transpose() * g1 * j * hb;
    let sh = hb.transpose() * sigma * hb;
    let triple = if d == 0 {
        0.0
    } else {
        linalg::max_abs(&(&jh * &jh + id(d)))
            .max(linalg::max_abs(&(jh.transpose() * &sh * &jh - &sh)))
    };
    r.le(
        "hodge.hermitian_harmonic",
        "identity_residual",
        worst([preserve, orthonormal, triple]),
    );
    let unitary = worst(chart.h1_sample_actions().iter().map(|a| {
        linalg::max_abs(&(a.transpose() * a - id(d)))
            .max(linalg::max_abs(&(a.transpose() * &sh * a - &sh)))
    }));
    r.le("hodge.unitary_action", "identity_residual", unitary);

    let mut s = r.stream("hodge.split");
    let split = worst((0..opts.samples).flat_map(|_| {
        (0..3)
            .map(|k| {
                let dim = if k == 1 { big } else { n };
                let v = gaussian(&mut s, dim);
                let sp = pkg.hodge_split(&v, k).unwrap();
                let ip = |a: &DVector<f64>, b: &DVector<f64>| pkg.inner(a, b, k).unwrap().abs();
                worst([
                    (&sp.exact + &sp.harmonic + &sp.coexact - &v).amax(),
                    ip(&sp.exact, &sp.harmonic),
                    ip(&sp.exact, &sp.coexact),
                    ip(&sp.harmonic, &sp.coexact),
                ])
            })
            .collect::<Vec<_>>()
    }));
    r.le("hodge.split", "identity_residual", split);

    let cocycles = linalg::null_space(cx.d1());
    let mut s = r.stream("hodge.kappa_class");
    let kappa = worst((0..opts.samples).map(|_| {
        if cocycles.ncols() == 0 {
            return 0.0;
        }
        let v = &cocycles * gaussian(&mut s, cocycles.ncols());
        let phi = gaussian(&mut s, n);
        let a = pkg.kappa(&v, 1);
        let b = pkg.kappa(&(&v + cx.d0() * phi), 1);
        match (a, b) {
            (Ok(a), Ok(b)) => (a - b).amax(),
            _ => f64::INFINITY,
        }
    }));
    r.le("hodge.kappa_class", "identity_residual", kappa);
    r.out
}

/// Checks of the Kuranishi chart.
pub fn chart_suite(
    chart: &KuranishiChart,
    tol: &Tolerances,
    opts: SuiteOptions,
) -> Vec<InvariantResult> {
    let mut r = Runner {
        tol,
        opts,
        out: Vec::new(),
    };
    let pkg = chart.package();
    let cx = chart.complex();
    let big = cx.c1_dim();
    let k = chart.k_xi();
    let stab = chart.stabilizer();

    let k_harm = (pkg.laplacian(2).unwrap() * k)
        .amax()
        .max((k - pkg.harmonic_part(k, 2).unwrap()).amax());
    r.le("chart.curvature_harmonic", "identity_residual", k_harm);
    let k_inv = worst(stab.sample_adjoints.iter().map(|z| (z * k - k).amax()));
    r.le("chart.curvature_invariant", "identity_residual", k_inv);
    r.le(
        "chart.ball_contraction",
        "ball_contraction",
        2.0 * chart.ball_radius() * chart.norm_h(),
    );

    let step = tol.get("fd_step");
    let d1_scale = linalg::max_abs(cx.d1()).max(1.0);
    let mut quad_fd = DMatrix::zeros(cx.n(), big);
    let mut relator_fd = DMatrix::zeros(cx.n(), big);
    let mut relator_ok = true;
    for c in 0..big {
        let mut e = DVector::zeros(big);
        e[c] = step;
        quad_fd.set_column(
            c,
            &((chart.curvature_quad(&e) - chart.curvature_quad(&(-&e))) / (2.0 * step)),
        );
        match (chart.relator_curvature(&e), chart.relator_curvature(&(-&e))) {
            (Ok(p), Ok(m)) => relator_fd.set_column(c, &((p.coeffs - m.coeffs) / (2.0 * step))),
            _ => relator_ok = false,
        }
    }
    r.le(
        "chart.curvature_derivative",
        "jacobian_relative",
        linalg::max_abs(&(quad_fd - cx.d1())) / d1_scale,
    );
    r.le(
        "chart.relator_derivative",
        "jacobian_relative",
        if relator_ok {
            linalg::max_abs(&(relator_fd - cx.d1())) / d1_scale
        } else {
            f64::INFINITY
        },
    );

    let p2 = pkg.exact_projector(2).unwrap();
    let mut s = r.stream("chart.kuranishi_identities");
    let mut differential = 0.0_f64;
    let mut codifferential = 0.0_f64;
    let mut equivariance = 0.0_f64;
    for i in 0..opts.samples {
        let eta = gaussian(&mut s, big);
        let f = chart.kuranishi_f(&eta);
        differential = differential.max((cx.d1() * &f - p2 * chart.curvature_quad(&eta)).amax());
        codifferential = codifferential.max((pkg.d0adj() * (&f - &eta)).amax());
        if !stab.sample_adjoints.is_empty() {
            let z = &stab.sample_adjoints[i % stab.sample_adjoints.len()];
            let zc = cx.act_c1(z);
            equivariance = equivariance.max((chart.kuranishi_f(&(&zc * &eta)) - &zc * f).amax());
        }
    }
    r.le(
        "chart.kuranishi_differential",
        "identity_residual",
        differential,
    );
    r.le(
        "chart.kuranishi_codifferential",
        "identity_residual",
        codifferential,
    );
    r.le(
        "chart.kuranishi_equivariance",
        "identity_residual",
        equivariance,
    );

    // Chart points: inverses of random harmonic vectors in the ball.
    let mut s = r.stream("chart.points");
    let mut round_trip = 0.0_f64;
    let mut membership = 0.0_f64;
    let mut points = Vec::new();
    for _ in 0..opts.samples {
        if chart.h1_dim() == 0 {
            break;
        }
        let dir = chart.random_harmonic(&mut s);
        let xi = &dir / chart.norm1(&dir) * (chart.ball_radius() * s.random_range(0.0..=1.0));
        match chart.kuranishi_inverse(&xi) {
            Ok(out) => {
                round_trip = round_trip.max(chart.norm1(&(chart.kuranishi_f(&out.eta) - &xi)));
                membership = membership
                    .max(chart.slice_residual(&out.eta))
                    .max(chart.slice_variety_residual(&out.eta));
                points.push(out.eta);
            }
            Err(_) => round_trip = f64::INFINITY,
        }
    }
    r.le("chart.inverse_round_trip", "chart_residual", round_trip);
    r.le("chart.inverse_membership", "chart_residual", membership);

    let mut s = r.stream("chart.symplectic_pullback");
    let not_exact = DMatrix::<f64>::identity(big, big) - pkg.exact_projector(1).unwrap();
    let h2 = pkg.homotopy(2).unwrap();
    let pullback = worst(points.iter().map(|eta| {
        let psi = &not_exact * gaussian(&mut s, big);
        let theta = &not_exact * gaussian(&mut s, big);
        let push = |v: &DVector<f64>| v + h2 * cx.cup_bracket(eta, v);
        (cx.cup_sigma(&psi, &theta) - cx.cup_sigma(&push(&psi), &push(&theta))).abs()
    }));
    r.le("chart.symplectic_pullback", "chart_residual", pullback);

    let k_coords = chart.momentum_coords(&pkg.kappa(k, 2).unwrap());
    let mut intertwining = 0.0_f64;
    let mut chart_momentum = 0.0_f64;
    let mut mixed = 0.0_f64;
    let mut square = 0.0_f64;
    for eta in &points {
        let f = chart.kuranishi_f(eta);
        match chart.j_sharp(eta) {
            Ok(js) => {
                let lhs = chart.momentum_coords(&pkg.kappa(&js, 2).unwrap()).coords;
                let rhs = &k_coords.coords + chart.theta(&f).coords;
                intertwining = intertwining.max((lhs - rhs).amax());
            }
            Err(_) => intertwining = f64::INFINITY,
        }
        match chart.phi_chart(eta) {
            Ok(p) => {
                chart_momentum =
                    chart_momentum.max((p.vartheta.coords - chart.theta(&p.phi).coords).amax())
            }
            Err(_) => chart_momentum = f64::INFINITY,
        }
        let hb = chart.h_bracket(eta);
        mixed = mixed.max(
            pkg.norm(&pkg.harmonic_part(&cx.cup_bracket(eta, &hb), 2).unwrap(), 2)
                .unwrap(),
        );
        square = square.max(
            pkg.norm(&pkg.harmonic_part(&cx.cup_bracket(&hb, &hb), 2).unwrap(), 2)
                .unwrap(),
        );
    }
    r.le(
        "chart.momentum_intertwining",
        "chart_residual",
        intertwining,
    );
    r.le("chart.chart_momentum", "chart_residual", chart_momentum);
    r.le("chart.coboundary_mixed", "chart_residual", mixed);
    r.le("chart.coboundary_square", "chart_residual", square);

    let mut s = r.stream("chart.momentum_property");
    let mut momentum = 0.0_f64;
    for _ in 0..opts.samples.min(20) {
        if chart.h1_dim() == 0 {
            break;
        }
        let xi = chart.random_harmonic(&mut s);
        let v = chart.random_harmonic(&mut s);
        let plus = chart.theta(&(&xi + &v * step));
        let minus = chart.theta(&(&xi - &v * step));
        for i in 0..stab.dim() {
            let fd = (plus.coords[i] - minus.coords[i]) / (2.0 * step);
            let predicted = chart.momentum_derivative(i, &xi, &v);
            momentum = momentum.max((fd - predicted).abs() / predicted.abs().max(1.0));
        }
    }
    r.le("chart.momentum_property", "momentum_relative", momentum);

    let mut s = r.stream("chart.momentum_equivariance");
    let equi = worst(stab.sample_adjoints.iter().map(|z| {
        if chart.h1_dim() == 0 {
            return 0.0;
        }
        let xi = chart.random_harmonic(&mut s);
        let lhs = chart.theta(&(cx.act_c1(z) * &xi)).coords;
        let rhs = chart.coadjoint(z) * chart.theta(&xi).coords;
        (lhs - rhs).amax()
    }));
    r.le("chart.momentum_equivariance", "chart_residual", equi);

    r.out.push(taylor_slope(chart, tol, opts));
    r.out
}

/// Step sizes of the second-order agreement test: half-decades from 1e-1 to 1e-3.
pub fn taylor_steps() -> Vec<f64> {
    (0..5).map(|i| 10f64.powf(-1.0 - 0.5 * i as f64)).collect()
}

/// Log-log slope of the second-order agreement error between the exact
/// relator curvature and the quadratic model, minimized over random cocycles.
pub fn taylor_slope(
    chart: &KuranishiChart,
    tol: &Tolerances,
    opts: SuiteOptions,
) -> InvariantResult {
    taylor_slope_over(chart, tol, opts, &taylor_steps())
}

/// [`taylor_slope`] over caller-chosen step sizes.
pub fn taylor_slope_over(
    chart: &KuranishiChart,
    tol: &Tolerances,
    opts: SuiteOptions,
    ts: &[f64],
) -> InvariantResult {
    let name = "chart.taylor_slope";
    let pkg = chart.package();
    let cx = chart.complex();
    let cocycles = linalg::null_space(cx.d1());
    let mut s = rng::stream(opts.seed, &format!("suite.{name}"));
    let mut slopes = Vec::new();
    for _ in 0..opts.taylor_cocycles {
        if cocycles.ncols() == 0 {
            break;
        }
        let eta = &cocycles * gaussian(&mut s, cocycles.ncols());
        let eta = &eta / chart.norm1(&eta);
        let model = pkg
            .harmonic_part(&(cx.cup_bracket(&eta, &eta) * 0.5), 2)
            .unwrap();
        let mut errors = Vec::with_capacity(ts.len());
        for &t in ts {
            let mu = match chart.relator_curvature(&(&eta * t)) {
                Ok(m) => m.coeffs,
                Err(_) => {
                    return InvariantResult::new(
                        name,
                        f64::NEG_INFINITY,
                        tol,
                        "taylor_slope",
                        Comparison::AtLeast,
                    )
                }
            };
            let harm = pkg.harmonic_part(&(mu - chart.k_xi()), 2).unwrap();
            errors.push((harm - &model * (t * t)).norm());
        }
        if errors.iter().all(|&e| e <= 1e-13) {
            continue;
        }
        let pts: Vec<(f64, f64)> = ts
            .iter()
            .zip(&errors)
            .filter(|(_, &e)| e > 1e-15)
            .map(|(&t, &e)| (t.ln(), e.ln()))
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        slopes.push(sxy / sxx);
    }
    match slopes.iter().cloned().reduce(f64::min) {
        Some(min) => InvariantResult::new(name, min, tol, "taylor_slope", Comparison::AtLeast),
        None => InvariantResult::vacuous(name, tol, "taylor_slope", Comparison::AtLeast),
    }
}

/// Every check on one chart, including its Lie backend.
pub fn full_suite(
    chart: &KuranishiChart,
    tol: &Tolerances,
    opts: SuiteOptions,
) -> Vec<InvariantResult> {
    let mut out = lie_suite(chart.complex().context(), tol, opts);
    out.extend(surface_suite(chart, tol, opts));
    out.extend(hodge_suite(chart, tol, opts));
    out.extend(chart_suite(chart, tol, opts));
    out
}
