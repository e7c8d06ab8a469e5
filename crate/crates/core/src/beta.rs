//! The p-k Beta function `pBk(x, y) = pΓk(x) pΓk(y) / pΓk(x+y) = B(x/k, y/k) / k`.
//!
//! `p` cancels, so every route here is independent of it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::gamma_closed;
use crate::kernel::{ln_gamma_classical, EvalReal, Method, PkParams};
use crate::quadrature::{integrate_semiaxis, integrate_unit_with_complement, QuadratureSpec};
use crate::record::{grid_point, IdentityRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaArgs {
    pub x: f64,
    pub y: f64,
    pub params: PkParams,
}

impl BetaArgs {
    pub fn new(x: f64, y: f64, params: PkParams) -> Result<Self> {
        for (name, v) in [("x", x), ("y", y)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { x, y, params })
    }

    fn swapped(&self) -> Self {
        Self {
            x: self.y,
            y: self.x,
            ..*self
        }
    }
}

/// `(1/k) B(x/k, y/k)` through classical log-gammas.
pub fn beta_closed(args: &BetaArgs) -> Result<EvalReal> {
    let k = args.params.k();
    let (z, w) = (args.x / k, args.y / k);
    let a = ln_gamma_classical(z)?;
    let b = ln_gamma_classical(w)?;
    let c = ln_gamma_classical(z + w)?;
    let ln = a.value + b.value - c.value - k.ln();
    let value = ln.exp();
    let ln_err = a.abs_err + b.abs_err + c.abs_err + 4.0 * f64::EPSILON * ln.abs();
    Ok(EvalReal::new(value, value * ln_err, Method::Closed))
}

/// The defining ratio `pΓk(x) pΓk(y) / pΓk(x+y)`.
pub fn beta_gamma_ratio(args: &BetaArgs) -> Result<EvalReal> {
    let gx = gamma_closed(args.params, args.x)?;
    let gy = gamma_closed(args.params, args.y)?;
    let gxy = gamma_closed(args.params, args.x + args.y)?;
    let ln = gx.ln_value + gy.ln_value - gxy.ln_value;
    let value = ln.exp();
    let ln_err = gx.abs_err_ln + gy.abs_err_ln + gxy.abs_err_ln;
    Ok(EvalReal::new(value, value * ln_err, Method::Closed))
}

/// Integral representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaForm {
    /// `(1/k) ∫_0^1 t^(x/k-1) (1-t)^(y/k-1) dt`
    Unit,
    /// `(1/k) ∫_0^1 (t^(x/k-1) + t^(y/k-1)) / (1+t)^((x+y)/k) dt`
    Symmetric,
    /// `∫_0^∞ t^(x-1) (1+t^k)^(-(x+y)/k) dt`
    Semiaxis,
}

impl BetaForm {
    pub const ALL: [BetaForm; 3] = [BetaForm::Unit, BetaForm::Symmetric, BetaForm::Semiaxis];

    pub fn id(self) -> &'static str {
        match self {
            BetaForm::Unit => "3.2",
            BetaForm::Symmetric => "3.3",
            BetaForm::Semiaxis => "3.4",
        }
    }
}

impl std::str::FromStr for BetaForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" | "3.2" => Ok(BetaForm::Unit),
            "symmetric" | "3.3" => Ok(BetaForm::Symmetric),
            "semiaxis" | "3.4" => Ok(BetaForm::Semiaxis),
            _ => Err(Error::InvalidParams(format!("unknown beta form {s:?}"))),
        }
    }
}

/// Largest of `log_f` over `samples`, used to normalise integrands.
fn log_peak(log_f: impl Fn(f64) -> f64, samples: impl Iterator<Item = f64>) -> f64 {
    samples
        .map(log_f)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
        .clamp(-600.0, 600.0)
}

fn log_add(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    hi + (-(a - b).abs()).exp().ln_1p()
}

/// Evaluates one integral representation. The integrand is computed in
/// log-space and normalised by its sampled peak before integration.
pub fn beta_integral(args: &BetaArgs, form: BetaForm, quad: &QuadratureSpec) -> Result<EvalReal> {
    let k = args.params.k();
    let (x, y) = (args.x, args.y);
    let (z, w) = (x / k, y / k);
    let unit_samples = || (1..64).map(|j| f64::from(j) / 64.0);

    let (shift, integral, prefactor) = match form {
        BetaForm::Unit => {
            let log_f = |t: f64, tc: f64| (z - 1.0) * t.ln() + (w - 1.0) * tc.ln();
            let shift = log_peak(|t| log_f(t, 1.0 - t), unit_samples());
            let i = integrate_unit_with_complement(|t, tc| (log_f(t, tc) - shift).exp(), quad)?;
            (shift, i, 1.0 / k)
        }
        BetaForm::Symmetric => {
            let log_f = |t: f64| {
                let denom = (z + w) * t.ln_1p();
                log_add((z - 1.0) * t.ln(), (w - 1.0) * t.ln()) - denom
            };
            let shift = log_peak(log_f, unit_samples());
            let i = integrate_unit_with_complement(|t, _| (log_f(t) - shift).exp(), quad)?;
            (shift, i, 1.0 / k)
        }
        BetaForm::Semiaxis => {
            let log_f = |t: f64| (x - 1.0) * t.ln() - (x + y) / k * t.powf(k).ln_1p();
            let shift = log_peak(log_f, (-40..=40).map(|j| 2f64.powi(j)));
            let i = integrate_semiaxis(|t| (log_f(t) - shift).exp(), quad)?;
            (shift, i, 1.0)
        }
    };
    let scale = prefactor * shift.exp();
    Ok(EvalReal::new(
        scale * integral.value,
        scale * integral.abs_err,
        Method::Integral,
    ))
}

/// Beta identities checked by [`check_beta_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BetaIdentity {
    /// Gamma ratio against `(1/k) B(x/k, y/k)`.
    Closed,
    /// One of the integral forms against the Gamma ratio.
    Integral(BetaForm),
    /// `pBk(x, y) = pBk(y, x)`
    Symmetry,
    /// `pBk(x+k, y) = x/(x+y) pBk(x, y)`
    Recurrence,
}

impl BetaIdentity {
    pub fn id(self) -> &'static str {
        match self {
            BetaIdentity::Closed => "3.1",
            BetaIdentity::Integral(form) => form.id(),
            BetaIdentity::Symmetry => "3.5-symmetry",
            BetaIdentity::Recurrence => "3.5-recurrence",
        }
    }
}

/// Checks one Beta identity; evaluation failures are recorded as skipped.
pub fn check_beta_identity(
    id: BetaIdentity,
    args: &BetaArgs,
    quad: &QuadratureSpec,
    tol: f64,
) -> IdentityRecord {
    let gp = grid_point([
        ("p", args.params.p()),
        ("k", args.params.k()),
        ("x", args.x),
        ("y", args.y),
    ]);
    let outcome = (|| -> Result<(f64, f64)> {
        Ok(match id {
            BetaIdentity::Closed => (beta_gamma_ratio(args)?.value, beta_closed(args)?.value),
            BetaIdentity::Integral(form) => (
                beta_gamma_ratio(args)?.value,
                beta_integral(args, form, quad)?.value,
            ),
            BetaIdentity::Symmetry => (
                beta_closed(args)?.value,
                beta_closed(&args.swapped())?.value,
            ),
            BetaIdentity::Recurrence => {
                let shifted = BetaArgs::new(args.x + args.params.k(), args.y, args.params)?;
                (
                    beta_closed(&shifted)?.value,
                    args.x / (args.x + args.y) * beta_closed(args)?.value,
                )
            }
        })
    })();
    match outcome {
        Ok((lhs, rhs)) => IdentityRecord::consistent(id.id(), gp, lhs, rhs, tol),
        Err(e) => IdentityRecord::skipped(id.id(), gp, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_err;
    use std::f64::consts::FRAC_PI_2;

    fn args(p: f64, k: f64, x: f64, y: f64) -> BetaArgs {
        BetaArgs::new(x, y, PkParams::new(p, k).unwrap()).unwrap()
    }

    #[test]
    fn closed_examples() {
        for p in [0.5, 1.0, 7.0] {
            assert!(
                rel_err(
                    1.0 / 12.0,
                    beta_closed(&args(p, 1.0, 2.0, 3.0)).unwrap().value
                ) < 1e-14
            );
        }
        assert!(rel_err(0.5, beta_closed(&args(1.0, 2.0, 2.0, 2.0)).unwrap().value) < 1e-14);
        assert!(
            rel_err(
                FRAC_PI_2,
                beta_closed(&args(1.0, 2.0, 1.0, 1.0)).unwrap().value
            ) < 1e-14
        );
        assert!(BetaArgs::new(0.0, 1.0, PkParams::classical()).is_err());
    }

    #[test]
    fn integral_examples() {
        let q = QuadratureSpec::default();
        let one = beta_integral(&args(1.0, 1.0, 1.0, 1.0), BetaForm::Unit, &q).unwrap();
        assert!(rel_err(1.0, one.value) < 1e-12);
        let semi = beta_integral(&args(1.0, 2.0, 1.0, 1.0), BetaForm::Semiaxis, &q).unwrap();
        assert!(rel_err(FRAC_PI_2, semi.value) < 1e-10);
        let sym = beta_integral(&args(1.0, 1.0, 2.0, 3.0), BetaForm::Symmetric, &q).unwrap();
        assert!(rel_err(1.0 / 12.0, sym.value) < 1e-10);
    }

    #[test]
    fn integral_forms_track_small_values() {
        let q = QuadratureSpec::default();
        let a = args(3.5, 0.5, 7.3, 4.9);
        let closed = beta_closed(&a).unwrap().value;
        assert!(closed < 1e-6);
        for form in BetaForm::ALL {
            let v = beta_integral(&a, form, &q).unwrap().value;
            assert!(rel_err(closed, v) < 1e-9, "{form:?}: {v} vs {closed}");
        }
    }

    #[test]
    fn identity_checks_pass() {
        let q = QuadratureSpec::default();
        let a = args(2.0, 3.0, 0.3, 2.5);
        for id in [
            BetaIdentity::Closed,
            BetaIdentity::Integral(BetaForm::Symmetric),
            BetaIdentity::Symmetry,
            BetaIdentity::Recurrence,
        ] {
            let r = check_beta_identity(id, &a, &q, 1e-9);
            assert_eq!(r.corrected_pass, Some(true), "{r:?}");
        }
    }
}
