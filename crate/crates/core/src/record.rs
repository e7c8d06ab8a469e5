//! One grid-point outcome of an identity check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::numeric::rel_err;

/// Parameter name to value, ordered by name.
pub type GridPoint = BTreeMap<String, f64>;

/// Result of checking one identity at one grid point.
///
/// `lhs` is the definitional (reference) side. `rhs_printed` evaluates the
/// identity as originally written, `rhs_corrected` the definition-consistent
/// form; for identities that are consistent as written both coincide.
/// Skipped records carry no values and no pass flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub identity_id: String,
    pub grid_point: GridPoint,
    pub lhs: Option<f64>,
    pub rhs_printed: Option<f64>,
    pub rhs_corrected: Option<f64>,
    pub rel_err_printed: Option<f64>,
    pub rel_err_corrected: Option<f64>,
    pub printed_pass: Option<bool>,
    pub corrected_pass: Option<bool>,
    pub tolerance: Option<f64>,
    pub skipped: bool,
    pub skip_reason: Option<String>,
}

impl IdentityRecord {
    pub fn evaluated(
        identity_id: impl Into<String>,
        grid_point: GridPoint,
        lhs: f64,
        rhs_printed: f64,
        rhs_corrected: f64,
        tolerance: f64,
    ) -> Self {
        let identity_id = identity_id.into();
        if ![lhs, rhs_printed, rhs_corrected]
            .iter()
            .all(|v| v.is_finite())
        {
            return Self::skipped(identity_id, grid_point, "non-finite value");
        }
        let ep = rel_err(lhs, rhs_printed);
        let ec = rel_err(lhs, rhs_corrected);
        Self {
            identity_id,
            grid_point,
            lhs: Some(lhs),
            rhs_printed: Some(rhs_printed),
            rhs_corrected: Some(rhs_corrected),
            rel_err_printed: Some(ep),
            rel_err_corrected: Some(ec),
            printed_pass: Some(ep <= tolerance),
            corrected_pass: Some(ec <= tolerance),
            tolerance: Some(tolerance),
            skipped: false,
            skip_reason: None,
        }
    }

    /// An identity whose printed form is already consistent.
    pub fn consistent(
        identity_id: impl Into<String>,
        grid_point: GridPoint,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        Self::evaluated(identity_id, grid_point, lhs, rhs, rhs, tolerance)
    }

    pub fn skipped(
        identity_id: impl Into<String>,
        grid_point: GridPoint,
        reason: impl Into<String>,
    ) -> Self {
        Self {
            identity_id: identity_id.into(),
            grid_point,
            lhs: None,
            rhs_printed: None,
            rhs_corrected: None,
            rel_err_printed: None,
            rel_err_corrected: None,
            printed_pass: None,
            corrected_pass: None,
            tolerance: None,
            skipped: true,
            skip_reason: Some(reason.into()),
        }
    }
}

/// Builds a [`GridPoint`] from `(name, value)` pairs.
pub fn grid_point<const N: usize>(pairs: [(&str, f64); N]) -> GridPoint {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
