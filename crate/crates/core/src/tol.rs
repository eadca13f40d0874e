//! Numerical tolerances.
//!
//! The defaults are the acceptance thresholds. Front ends may scale the
//! residual-type tolerances through [`ENV_VAR`]; the classification
//! thresholds for variability are never scaled.

use serde::Serialize;

/// Environment variable holding a positive multiplier for residual tolerances.
pub const ENV_VAR: &str = "PONCELET_TOL_SCALE";

pub const VERTEX: f64 = 1e-10;
pub const REFLECTION: f64 = 1e-9;
pub const TANGENCY: f64 = 1e-10;
pub const J_SPREAD: f64 = 1e-10;
/// Closure gap relative to the perimeter.
pub const CLOSURE: f64 = 1e-8;
pub const TURNING_ROUND: f64 = 1e-6;
pub const PERIMETER: f64 = 1e-8;
pub const CLOSED_FORM: f64 = 1e-7;
pub const DUAL_FORM: f64 = 1e-10;
pub const K119: f64 = 1e-9;
pub const ORACLE: f64 = 1e-7;
pub const INVARIANT: f64 = 1e-7;
pub const VARIABLE: f64 = 1e-3;
/// Floor on |mean| when computing a relative spread. Zero-valued invariants
/// then need an absolute spread below 1e-11 to classify as invariant.
pub const SPREAD_FLOOR: f64 = 1e-4;
/// Roots closer than this (relative) are merged into one multiple root.
pub const ROOT_MERGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub scale: f64,
    pub vertex: f64,
    pub reflection: f64,
    pub tangency: f64,
    pub j_spread: f64,
    pub closure: f64,
    pub closed_form: f64,
    pub dual_form: f64,
    pub invariant: f64,
    pub variable: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::scaled(1.0)
    }
}

impl Tolerances {
    pub fn scaled(scale: f64) -> Self {
        Tolerances {
            scale,
            vertex: VERTEX * scale,
            reflection: REFLECTION * scale,
            tangency: TANGENCY * scale,
            j_spread: J_SPREAD * scale,
            closure: CLOSURE * scale,
            closed_form: CLOSED_FORM * scale,
            dual_form: DUAL_FORM * scale,
            invariant: INVARIANT * scale,
            variable: VARIABLE,
        }
    }

    /// Reads [`ENV_VAR`]; unset, unparsable or non-positive values give the defaults.
    pub fn from_env() -> Self {
        Self::scaled(scale_from(std::env::var(ENV_VAR).ok().as_deref()))
    }
}

pub fn scale_from(raw: Option<&str>) -> f64 {
    match raw.and_then(|s| s.trim().parse::<f64>().ok()) {
        Some(s) if s.is_finite() && s > 0.0 => s,
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_parsing() {
        assert_eq!(scale_from(None), 1.0);
        assert_eq!(scale_from(Some("10")), 10.0);
        assert_eq!(scale_from(Some("-1")), 1.0);
        assert_eq!(scale_from(Some("abc")), 1.0);
    }

    #[test]
    fn variability_threshold_not_scaled() {
        let t = Tolerances::scaled(100.0);
        assert_eq!(t.variable, VARIABLE);
        assert!((t.invariant - 1e-5).abs() < 1e-18);
    }
}
