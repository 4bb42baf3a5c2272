//! Named numerical thresholds.
//!
//! The constants are the defaults; [`Tolerances`] is the overridable table
//! that the invariant suite reads and reports echo.

use std::collections::BTreeMap;

pub const LIE_IDENTITY: f64 = 1e-12;
pub const DEFECT_ADMISSION: f64 = 1e-10;
pub const COMPLEX_RESIDUAL: f64 = 1e-10;
pub const IDENTITY_RESIDUAL: f64 = 1e-10;
pub const CHART_RESIDUAL: f64 = 1e-9;
pub const COCYCLE: f64 = 1e-8;
pub const SLICE_VARIETY: f64 = 1e-8;
pub const CONE: f64 = 1e-8;
pub const POLISH_DEFECT: f64 = 1e-8;
pub const POLISH_TARGET: f64 = 1e-10;
pub const JACOBIAN_RELATIVE: f64 = 1e-6;
pub const MOMENTUM_RELATIVE: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-5;
pub const TAYLOR_SLOPE: f64 = 2.7;
pub const CLUSTER_RADIUS: f64 = 1e-4;
pub const SEPARATION_FACTOR: f64 = 10.0;
pub const NONSINGULAR: f64 = 1e-10;
pub const WITNESS_MOMENTUM: f64 = 1e-3;
pub const CLASS_RESIDUAL: f64 = 1e-8;
pub const BALL_CONTRACTION: f64 = 0.5;

/// Overridable threshold table keyed by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    values: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let values = [
            ("lie_identity", LIE_IDENTITY),
            ("defect_admission", DEFECT_ADMISSION),
            ("complex_residual", COMPLEX_RESIDUAL),
            ("identity_residual", IDENTITY_RESIDUAL),
            ("chart_residual", CHART_RESIDUAL),
            ("cocycle", COCYCLE),
            ("slice_variety", SLICE_VARIETY),
            ("cone", CONE),
            ("polish_defect", POLISH_DEFECT),
            ("polish_target", POLISH_TARGET),
            ("jacobian_relative", JACOBIAN_RELATIVE),
            ("momentum_relative", MOMENTUM_RELATIVE),
            ("fd_step", FD_STEP),
            ("taylor_slope", TAYLOR_SLOPE),
            ("cluster_radius", CLUSTER_RADIUS),
            ("separation_factor", SEPARATION_FACTOR),
            ("nonsingular", NONSINGULAR),
            ("witness_momentum", WITNESS_MOMENTUM),
            ("class_residual", CLASS_RESIDUAL),
            ("ball_contraction", BALL_CONTRACTION),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self { values }
    }
}

impl Tolerances {
    /// Looks up a threshold. Unknown names are a programming error.
    pub fn get(&self, name: &str) -> f64 {
        *self
            .values
            .get(name)
            .unwrap_or_else(|| panic!("unknown tolerance `{name}`"))
    }

    /// Overrides a known threshold; rejects unknown names and non-positive values.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), String> {
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("tolerance `{name}` must be positive, got {value}"));
        }
        match self.values.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(format!("unknown tolerance `{name}`")),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let mut t = Tolerances::default();
        assert_eq!(t.get("cone"), 1e-8);
        t.set("cone", 1e-6).unwrap();
        assert_eq!(t.get("cone"), 1e-6);
        assert!(t.set("cone", 0.0).is_err());
        assert!(t.set("nope", 1.0).is_err());
    }
}
