//! Generators of central representations.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, GroupElement, GroupId, LieContext};
use crate::surface::{self, CentralRep, POLISH_MAX_ITERATIONS};
use crate::tolerance::{self, Tolerances};

const RANDOM_RESTARTS: usize = 20;
/// Representations are polished to roundoff; cochain identities inherit the defect.
const REP_POLISH_TARGET: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepStrategy {
    Trivial,
    Diagonal,
    PauliGenus1,
    RandomPolish,
    FromFile,
}

impl RepStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            RepStrategy::Trivial => "trivial",
            RepStrategy::Diagonal => "diagonal",
            RepStrategy::PauliGenus1 => "pauli-genus1",
            RepStrategy::RandomPolish => "random-polish",
            RepStrategy::FromFile => "from-file",
        }
    }
}

impl fmt::Display for RepStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RepStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(RepStrategy::Trivial),
            "diagonal" => Ok(RepStrategy::Diagonal),
            "pauli-genus1" => Ok(RepStrategy::PauliGenus1),
            "random-polish" => Ok(RepStrategy::RandomPolish),
            "from-file" => Ok(RepStrategy::FromFile),
            other => Err(Error::InvalidInput(format!("unknown strategy `{other}`"))),
        }
    }
}

/// The central target `c = exp(x_xi) d_twist`, after checking that `x_xi`
/// is central and that the twist exists.
pub fn central_target(
    ctx: &LieContext,
    x_xi: &AlgebraElement,
    twist: usize,
) -> Result<GroupElement> {
    let d = ctx
        .discrete_center()
        .get(twist)
        .ok_or_else(|| Error::InvalidInput(format!("no discrete central element {twist}")))?;
    Ok(ctx.exp_alg(x_xi).mul(d))
}

/// Whether `c` lies in the commutator subgroup, i.e. can be a relator value.
fn relator_reachable(ctx: &LieContext, c: &GroupElement) -> bool {
    let size = ctx.matrix_size();
    match ctx.group_id() {
        GroupId::U1 => c.distance(&ctx.identity()) <= tolerance::DEFECT_ADMISSION,
        GroupId::SU2 => true,
        GroupId::U2 => {
            let det = c.matrix().determinant();
            (det - nalgebra::Complex::new(1.0, 0.0)).norm() <= tolerance::DEFECT_ADMISSION
                && size == 2
        }
    }
}

fn is_identity(ctx: &LieContext, c: &GroupElement) -> bool {
    c.distance(&ctx.identity()) <= tolerance::DEFECT_ADMISSION
}

/// Produces a central representation with the requested strategy.
/// `FromFile` is not handled here.
pub fn find_central_rep<R: Rng + ?Sized>(
    ctx: &LieContext,
    genus: usize,
    x_xi: &AlgebraElement,
    twist: usize,
    strategy: RepStrategy,
    tol: &Tolerances,
    rng: &mut R,
) -> Result<CentralRep> {
    if genus == 0 {
        return Err(Error::InvalidInput("genus must be at least 1".into()));
    }
    let c = central_target(ctx, x_xi, twist)?;
    let n = ctx.dim();
    let images = match strategy {
        RepStrategy::Trivial | RepStrategy::Diagonal => {
            if !is_identity(ctx, &c) {
                return Err(Error::Infeasible(format!(
                    "strategy `{strategy}` yields relator I, but the central target is not I"
                )));
            }
            if strategy == RepStrategy::Trivial {
                vec![ctx.identity(); 2 * genus]
            } else {
                (0..2 * genus).map(|_| random_torus(ctx, rng)).collect()
            }
        }
        RepStrategy::PauliGenus1 => {
            if ctx.group_id() == GroupId::U1 {
                return Err(Error::Infeasible(
                    "pauli pair needs a nonabelian group".into(),
                ));
            }
            let minus = GroupElement::from_matrix_unchecked(-ctx.identity().into_matrix());
            if c.distance(&minus) > tolerance::DEFECT_ADMISSION {
                return Err(Error::Infeasible("pauli pair has relator -I".into()));
            }
            let offset = if ctx.group_id() == GroupId::U2 { 1 } else { 0 };
            let mut images: Vec<GroupElement> = (0..2)
                .map(|k| {
                    let mut x = DVector::zeros(n);
                    x[offset + k] = 1.0;
                    GroupElement::from_matrix_unchecked(ctx.matrix_of(&x))
                })
                .collect();
            images.extend(std::iter::repeat_n(ctx.identity(), 2 * genus - 2));
            images
        }
        RepStrategy::RandomPolish => {
            if !relator_reachable(ctx, &c) {
                return Err(Error::Infeasible(format!(
                    "the relator of a {} representation cannot reach the central target",
                    ctx.group_id()
                )));
            }
            random_polish(ctx, genus, &c, tol.get("polish_target"), rng)?
        }
        RepStrategy::FromFile => {
            return Err(Error::InvalidInput(
                "from-file representations are read by the caller".into(),
            ))
        }
    };
    let rep = CentralRep::new(ctx.clone(), images, x_xi.clone(), c)?;
    let admission = tol.get("defect_admission");
    if rep.defect() > admission {
        return Err(Error::NotCentral {
            defect: rep.defect(),
            tolerance: admission,
        });
    }
    Ok(rep)
}

fn random_torus<R: Rng + ?Sized>(ctx: &LieContext, rng: &mut R) -> GroupElement {
    let n = ctx.dim();
    let mut x = DVector::zeros(n);
    let tau = std::f64::consts::TAU;
    match ctx.group_id() {
        GroupId::U1 => x[0] = rng.random_range(-tau..tau),
        GroupId::SU2 => x[2] = rng.random_range(-tau..tau),
        GroupId::U2 => {
            x[0] = rng.random_range(-tau..tau);
            x[3] = rng.random_range(-tau..tau);
        }
    }
    ctx.exp_coords(&x)
}

fn random_polish<R: Rng + ?Sized>(
    ctx: &LieContext,
    genus: usize,
    c: &GroupElement,
    accept: f64,
    rng: &mut R,
) -> Result<Vec<GroupElement>> {
    let mut last = f64::INFINITY;
    for _ in 0..RANDOM_RESTARTS {
        let start: Vec<GroupElement> = (0..2 * genus).map(|_| ctx.random_element(rng)).collect();
        // Starting points whose relator sits on the branch cut are skipped.
        if let Ok(out) =
            surface::polish_relator(ctx, &start, c, REP_POLISH_TARGET, POLISH_MAX_ITERATIONS)
        {
            if out.defect <= accept {
                return Ok(out.images);
            }
            last = last.min(out.defect);
        }
    }
    Err(Error::NoConvergence {
        iterations: RANDOM_RESTARTS * POLISH_MAX_ITERATIONS,
        residual: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn strategy_names_round_trip() {
        for s in [
            RepStrategy::Trivial,
            RepStrategy::Diagonal,
            RepStrategy::PauliGenus1,
            RepStrategy::RandomPolish,
            RepStrategy::FromFile,
        ] {
            assert_eq!(s.as_str().parse::<RepStrategy>().unwrap(), s);
        }
    }

    #[test]
    fn pauli_pair() {
        let ctx = LieContext::new(GroupId::SU2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rep = find_central_rep(
            &ctx,
            1,
            &AlgebraElement::zero(3),
            1,
            RepStrategy::PauliGenus1,
            &Tolerances::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(rep.defect(), 0.0);
        let e = find_central_rep(
            &ctx,
            1,
            &AlgebraElement::zero(3),
            0,
            RepStrategy::PauliGenus1,
            &Tolerances::default(),
            &mut rng,
        );
        assert!(matches!(e, Err(Error::Infeasible(_))));
    }

    #[test]
    fn abelian_obstruction() {
        let ctx = LieContext::new(GroupId::U1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = AlgebraElement::from_slice(&[0.5]);
        for s in [
            RepStrategy::Trivial,
            RepStrategy::Diagonal,
            RepStrategy::RandomPolish,
        ] {
            assert!(matches!(
                find_central_rep(&ctx, 1, &x, 0, s, &Tolerances::default(), &mut rng),
                Err(Error::Infeasible(_))
            ));
        }
        // exp(2 pi i) = 1, so this central value is admissible.
        let full_turn = AlgebraElement::from_slice(&[std::f64::consts::TAU]);
        assert!(find_central_rep(
            &ctx,
            1,
            &full_turn,
            0,
            RepStrategy::Trivial,
            &Tolerances::default(),
            &mut rng
        )
        .is_ok());
    }

    #[test]
    fn random_polish_reaches_minus_identity() {
        let ctx = LieContext::new(GroupId::SU2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rep = find_central_rep(
            &ctx,
            2,
            &AlgebraElement::zero(3),
            1,
            RepStrategy::RandomPolish,
            &Tolerances::default(),
            &mut rng,
        )
        .unwrap();
        assert!(rep.defect() <= 1e-10);
        let u2 = LieContext::new(GroupId::U2);
        let half_turn = AlgebraElement::from_slice(&[std::f64::consts::PI, 0.0, 0.0, 0.0]);
        let rep = find_central_rep(
            &u2,
            2,
            &half_turn,
            0,
            RepStrategy::RandomPolish,
            &Tolerances::default(),
            &mut rng,
        )
        .unwrap();
        assert!(rep.defect() <= 1e-10);
        let quarter = AlgebraElement::from_slice(&[std::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0]);
        assert!(find_central_rep(
            &u2,
            2,
            &quarter,
            0,
            RepStrategy::RandomPolish,
            &Tolerances::default(),
            &mut rng
        )
        .is_err());
    }
}
