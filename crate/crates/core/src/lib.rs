//! Finite laboratory for the local structure of moduli spaces of central
//! Yang-Mills connections on a closed surface.
//!
//! A connection is replaced by its holonomy, a representation of the surface
//! group whose relator lands on a prescribed central element. Forms become
//! twisted cellular cochains on the one-vertex presentation complex. On top of
//! that complex the crate builds a compatible Kähler and Hodge package, the
//! Kuranishi map, quadratic momentum maps and sampling of the reduced local
//! model.
//!
//! The layers, bottom up:
//!
//! * [`lie`]: matrix backends for `U(1)`, `SU(2)` and `U(2)`.
//! * [`surface`]: presentations, central representations, twisted
//!   differentials and cup pairings.
//! * [`hodge`]: metrics, the complex structure, adjoints, Laplacians, Green
//!   operators and the homotopy.
//! * [`kuranishi`]: curvature, Kuranishi map, momentum maps and sampling.
//! * [`strategy`]: ways of producing a central representation.
//! * [`suite`]: named residual checks over all of the above.

pub mod error;
pub mod hodge;
pub mod kuranishi;
pub mod lie;
pub mod linalg;
pub mod rng;
pub mod strategy;
pub mod suite;
pub mod surface;
pub mod tolerance;

pub use error::{Error, Result};
pub use hodge::KaehlerHodgePackage;
pub use kuranishi::{KuranishiChart, MomentumValue};
pub use lie::{AlgebraElement, GroupElement, GroupId, LieContext, LieError};
pub use strategy::{find_central_rep, RepStrategy};
pub use suite::{InvariantResult, SuiteOptions};
pub use surface::{CentralRep, SurfacePresentation, TwistedComplex};
pub use tolerance::Tolerances;
