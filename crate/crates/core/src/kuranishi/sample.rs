//! Sampling of the reduced local model `Theta^-1(0) / Z_A` inside the
//! certified ball, with exact-solution polishing and orbit labels.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use super::KuranishiChart;
use crate::linalg;
use crate::rng;
use crate::surface::{self, POLISH_MAX_ITERATIONS};

/// Fraction of samples drawn near the cone rather than uniformly in the ball.
pub const CONE_FRACTION: f64 = 0.5;
const CONE_PROJECTION_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct PolishRecord {
    pub defect: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Harmonic part of the Kuranishi image of the polished point.
    pub chart_image: DVector<f64>,
    pub image_in_ball: bool,
    pub image_on_cone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub index: usize,
    pub xi: DVector<f64>,
    pub from_cone: bool,
    pub theta_norm: f64,
    pub kept: bool,
    pub label: Option<usize>,
    pub polish: Option<PolishRecord>,
    /// `|vartheta|` of the chart point over a kept sample.
    pub chart_momentum: Option<f64>,
    pub contradiction: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSample {
    pub records: Vec<SampleRecord>,
    pub kept: usize,
    pub labels: usize,
    pub contradictions: usize,
    /// Dimension of the reduced space near a generic kept sample.
    pub local_dimension: Option<usize>,
    /// Smallest orbit distance between polished images carrying distinct labels.
    pub min_label_separation: Option<f64>,
    pub cluster_radius: f64,
    pub separation_factor: f64,
}

impl ReducedSample {
    pub fn kept_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.kept as f64 / self.records.len() as f64
    }

    pub fn separation_ok(&self) -> bool {
        self.min_label_separation
            .is_none_or(|d| d >= self.separation_factor * self.cluster_radius)
    }
}

impl KuranishiChart {
    /// Orbit distance `min_z |z a - b|` over sampled stabilizer elements.
    pub fn orbit_distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let cx = self.complex();
        self.stabilizer()
            .sample_adjoints
            .iter()
            .map(|ad| self.norm1(&(cx.act_c1(ad) * a - b)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Label of `xi` against cluster representatives, if within `radius` of one.
    pub fn orbit_label(
        &self,
        representatives: &[DVector<f64>],
        xi: &DVector<f64>,
        radius: f64,
    ) -> Option<usize> {
        representatives
            .iter()
            .position(|r| self.orbit_distance(r, xi) <= radius)
    }

    /// Gauss-Newton projection of a harmonic vector onto the cone `Theta = 0`.
    pub fn project_to_cone(&self, xi: &DVector<f64>) -> Option<DVector<f64>> {
        let harm = self.package().harmonic_basis(1).expect("degree 1");
        let mut x = xi.clone();
        for _ in 0..CONE_PROJECTION_STEPS {
            let t = self.theta(&x);
            let size = self.norm1(&x);
            if t.norm() <= 1e-15 * size * size {
                return Some(x);
            }
            let jac = self.theta_jacobian(&x) * harm;
            let step = linalg::pinv(&jac) * &t.coords;
            x -= harm * step;
        }
        None
    }

    fn local_dimension_at(&self, xi: &DVector<f64>) -> usize {
        let harm = self.package().harmonic_basis(1).expect("degree 1");
        let d = harm.ncols();
        let unit = xi / self.norm1(xi);
        let jac = self.theta_jacobian(&unit) * harm;
        let cx = self.complex();
        let g1 = self.package().g1();
        let z = self.stabilizer().dim();
        let mut tangent = DMatrix::zeros(d, z);
        for i in 0..z {
            let field = cx.ad_c1(&self.stabilizer().algebra.column(i).into_owned()) * &unit;
            tangent.set_column(i, &(harm.transpose() * g1 * field));
        }
        d.saturating_sub(linalg::rank(&jac) + linalg::rank(&tangent))
    }

    fn draw(&self, seed: u64, index: usize) -> (DVector<f64>, bool) {
        let mut stream = rng::indexed_stream(seed, "kuranishi.reduced_sample", index as u64);
        let d = self.h1_dim() as f64;
        let unit = |v: DVector<f64>| {
            let n = self.norm1(&v);
            v / n
        };
        let dir = unit(self.random_harmonic(&mut stream));
        let radius = self.ball_radius() * stream.random_range(0.0..1.0f64).powf(1.0 / d);
        let use_cone = stream.random_range(0.0..1.0) < CONE_FRACTION;
        if use_cone {
            if let Some(p) = self.project_to_cone(&dir) {
                if self.norm1(&p) > 1e-3 {
                    return (unit(p) * radius, true);
                }
            }
        }
        (dir * radius, false)
    }

    fn evaluate_sample(&self, seed: u64, index: usize) -> SampleRecord {
        let (xi, from_cone) = self.draw(seed, index);
        let (kept, theta_norm) = self.cone_test(&xi);
        let mut record = SampleRecord {
            index,
            xi: xi.clone(),
            from_cone,
            theta_norm,
            kept,
            label: None,
            polish: None,
            chart_momentum: None,
            contradiction: false,
            failure: None,
        };
        let eta = match self.kuranishi_inverse(&xi) {
            Ok(out) => out.eta,
            Err(e) => {
                record.failure = Some(e.to_string());
                return record;
            }
        };
        if kept {
            match self.phi_chart(&eta) {
                Ok(p) => record.chart_momentum = Some(p.vartheta.norm()),
                Err(e) => record.failure = Some(e.to_string()),
            }
        }
        let rep = self.rep();
        let seed_images = rep.deformed_images(&eta);
        match surface::polish_relator(
            rep.context(),
            &seed_images,
            rep.central_target(),
            self.tolerances().get("polish_target"),
            POLISH_MAX_ITERATIONS,
        ) {
            Ok(out) => {
                let image = self.chart_image_of(&out.images);
                let (in_ball, on_cone) = match &image {
                    Some(x) => (
                        self.norm1(x) <= self.ball_radius() * (1.0 + 1e-9),
                        self.cone_test(x).0,
                    ),
                    None => (false, false),
                };
                let exact = out.defect <= self.tolerances().get("polish_defect");
                record.contradiction = if kept {
                    !exact
                } else {
                    exact && in_ball && on_cone
                };
                record.polish = Some(PolishRecord {
                    defect: out.defect,
                    converged: out.converged,
                    iterations: out.iterations,
                    chart_image: image.unwrap_or_else(|| DVector::zeros(xi.len())),
                    image_in_ball: in_ball,
                    image_on_cone: on_cone,
                });
            }
            Err(e) => {
                record.contradiction = kept;
                record.failure = Some(e.to_string());
            }
        }
        record
    }

    /// Harmonic part of the Kuranishi image of `rho exp(eta)` for the tuple
    /// `images`, with `eta_s = log(rho_s^-1 images_s)`.
    pub fn chart_image_of(&self, images: &[crate::lie::GroupElement]) -> Option<DVector<f64>> {
        let rep = self.rep();
        let ctx = rep.context();
        let n = ctx.dim();
        let mut eta = DVector::zeros(n * images.len());
        for (s, (a, b)) in rep.images().iter().zip(images).enumerate() {
            let log = ctx.log_group(&a.inverse().mul(b)).ok()?;
            eta.rows_mut(s * n, n).copy_from(&log.coeffs);
        }
        self.package()
            .harmonic_part(&self.kuranishi_f(&eta), 1)
            .ok()
    }

    /// Samples the reduced local model. Deterministic in `(count, seed)`;
    /// samples are evaluated in parallel on per-sample streams.
    pub fn reduced_sample(&self, count: usize, seed: u64) -> ReducedSample {
        let cluster_radius = self.tolerances().get("cluster_radius");
        let separation_factor = self.tolerances().get("separation_factor");
        let polish_defect = self.tolerances().get("polish_defect");
        if self.h1_dim() == 0 {
            return ReducedSample {
                records: Vec::new(),
                kept: 0,
                labels: 0,
                contradictions: 0,
                local_dimension: Some(0),
                min_label_separation: None,
                cluster_radius,
                separation_factor,
            };
        }
        let mut records: Vec<SampleRecord> = (0..count)
            .into_par_iter()
            .map(|i| self.evaluate_sample(seed, i))
            .collect();

        let mut representatives: Vec<DVector<f64>> = Vec::new();
        for r in records.iter_mut().filter(|r| r.kept) {
            let label = match self.orbit_label(&representatives, &r.xi, cluster_radius) {
                Some(l) => l,
                None => {
                    representatives.push(r.xi.clone());
                    representatives.len() - 1
                }
            };
            r.label = Some(label);
        }

        let kept: Vec<&SampleRecord> = records.iter().filter(|r| r.kept).collect();
        let point = |r: &SampleRecord| {
            r.polish
                .as_ref()
                .filter(|p| p.defect <= polish_defect)
                .map(|p| p.chart_image.clone())
                .unwrap_or_else(|| r.xi.clone())
        };
        let pairs: Vec<(usize, usize)> = (0..kept.len())
            .flat_map(|i| (i + 1..kept.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| kept[i].label != kept[j].label)
            .collect();
        let min_label_separation = pairs
            .par_iter()
            .map(|&(i, j)| self.orbit_distance(&point(kept[i]), &point(kept[j])))
            .reduce_with(f64::min);
        let local_dimension = kept
            .iter()
            .filter(|r| self.norm1(&r.xi) > 1e-3 * self.ball_radius())
            .map(|r| self.local_dimension_at(&r.xi))
            .max();

        ReducedSample {
            kept: kept.len(),
            labels: representatives.len(),
            contradictions: records.iter().filter(|r| r.contradiction).count(),
            local_dimension,
            min_label_separation,
            cluster_radius,
            separation_factor,
            records,
        }
    }
}
