//! Newton polishing of a tuple onto the relator equation `relator = c`.

use nalgebra::DVector;

use super::SurfacePresentation;
use crate::error::Result;
use crate::lie::{CMatrix, GroupElement, LieContext};
use crate::linalg;

pub const POLISH_MAX_ITERATIONS: usize = 50;
const JACOBIAN_STEP: f64 = 1e-6;
const MAX_HALVINGS: usize = 30;

/// Coordinates of `log(relator(images) c^-1)`.
pub fn relator_log(
    ctx: &LieContext,
    presentation: &SurfacePresentation,
    images: &[GroupElement],
    c: &GroupElement,
) -> Result<DVector<f64>> {
    let r = presentation.evaluate(images).mul(&c.inverse());
    Ok(ctx.log_group(&r)?.coeffs)
}

fn defect(presentation: &SurfacePresentation, images: &[GroupElement], c: &GroupElement) -> f64 {
    let r = presentation.evaluate(images).mul(&c.inverse());
    let size = r.size();
    (r.matrix() - CMatrix::identity(size, size)).norm()
}

fn deform(
    ctx: &LieContext,
    images: &[GroupElement],
    delta: &DVector<f64>,
    t: f64,
) -> Vec<GroupElement> {
    let n = ctx.dim();
    images
        .iter()
        .enumerate()
        .map(|(s, a)| a.mul(&ctx.exp_coords(&(delta.rows(s * n, n) * t))))
        .collect()
}

#[derive(Debug, Clone)]
pub struct PolishOutcome {
    pub images: Vec<GroupElement>,
    pub defect: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Gauss-Newton on `log(relator(rho exp eta) c^-1) = 0` with a
/// central-difference Jacobian and its pseudo-inverse, with step halving.
pub fn polish_relator(
    ctx: &LieContext,
    images: &[GroupElement],
    c: &GroupElement,
    target: f64,
    max_iterations: usize,
) -> Result<PolishOutcome> {
    let presentation = SurfacePresentation::new(images.len() / 2)?;
    let n = ctx.dim();
    let big = images.len() * n;
    let mut current = images.to_vec();
    let mut current_defect = defect(&presentation, &current, c);
    let mut iterations = 0;
    while current_defect > target && iterations < max_iterations {
        iterations += 1;
        let r = relator_log(ctx, &presentation, &current, c)?;
        let mut jac = nalgebra::DMatrix::zeros(n, big);
        for j in 0..big {
            let mut e = DVector::zeros(big);
            e[j] = 1.0;
            let plus = relator_log(
                ctx,
                &presentation,
                &deform(ctx, &current, &e, JACOBIAN_STEP),
                c,
            )?;
            let minus = relator_log(
                ctx,
                &presentation,
                &deform(ctx, &current, &e, -JACOBIAN_STEP),
                c,
            )?;
            jac.set_column(j, &((plus - minus) / (2.0 * JACOBIAN_STEP)));
        }
        let step = -linalg::pinv(&jac) * r;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = deform(ctx, &current, &step, t);
            let d = defect(&presentation, &trial, c);
            if d < current_defect {
                current = trial;
                current_defect = d;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(PolishOutcome {
        converged: current_defect <= target,
        images: current,
        defect: current_defect,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::GroupId;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polishes_random_su2_tuples() {
        let ctx = LieContext::new(GroupId::SU2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for twist in [0usize, 1] {
            let c = ctx.discrete_center()[twist].clone();
            let mut done = 0;
            for _ in 0..10 {
                let images: Vec<_> = (0..4).map(|_| ctx.random_element(&mut rng)).collect();
                if let Ok(out) = polish_relator(&ctx, &images, &c, 1e-12, POLISH_MAX_ITERATIONS) {
                    assert!(out.converged, "defect {}", out.defect);
                    assert!(out.defect <= 1e-12);
                    done += 1;
                }
            }
            assert!(done >= 5);
        }
    }
}
