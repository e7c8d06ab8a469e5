//! The p-k Psi function `pψk(x) = d/dx ln pΓk(x) = ln(p)/k + ψ(x/k)/k`, its
//! series forms, higher derivatives and the k-zeta function.
//!
//! The `_printed` variants evaluate the forms that omit the `1/k` on the
//! classical part (and carry an extra `k` on the polygamma), for audit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::gamma_closed;
use crate::kernel::{
    digamma_classical, hurwitz_zeta, nearest_pole, pole_check, EvalReal, Method, PkParams,
    EULER_GAMMA,
};
use crate::numeric::CompensatedSum;
use crate::quadrature::{integrate_unit, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiEval {
    pub value: f64,
    pub abs_err: f64,
}

fn reject_pole(params: PkParams, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    match pole_check(params, x).pole_index {
        Some(index) => Err(Error::Pole { index }),
        None => Ok(()),
    }
}

fn require_positive(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("x must be positive, got {x}")))
    }
}

/// `(ln p / k, ψ(x/k), error of ψ)`.
fn parts(params: PkParams, x: f64) -> Result<(f64, f64, f64)> {
    reject_pole(params, x)?;
    let k = params.k();
    let z = x / k;
    let dg = digamma_classical(z)?;
    let mut err = 4.0 * f64::EPSILON * dg.abs().max(1.0);
    if let Some((_, dist)) = nearest_pole(z) {
        err += f64::EPSILON * z.abs().max(1.0) / (dist * dist);
    }
    Ok((params.p().ln() / k, dg, err))
}

/// `ln(p)/k + ψ(x/k)/k`.
pub fn psi(params: PkParams, x: f64) -> Result<PsiEval> {
    let (lead, dg, err) = parts(params, x)?;
    let k = params.k();
    Ok(PsiEval {
        value: lead + dg / k,
        abs_err: err / k + f64::EPSILON * lead.abs(),
    })
}

/// `ln(p)/k + ψ(x/k)`, the form without `1/k` on the classical part.
pub fn psi_printed(params: PkParams, x: f64) -> Result<PsiEval> {
    let (lead, dg, err) = parts(params, x)?;
    Ok(PsiEval {
        value: lead + dg,
        abs_err: err + f64::EPSILON * lead.abs(),
    })
}

/// Series representations of the Psi function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiSeriesForm {
    /// `... - 1/x + (x/k) Σ_{n>=1} 1/(n(x+nk))`
    Harmonic,
    /// `... + ((x-k)/k) Σ_{n>=0} 1/((n+1)(x+nk))`
    Shifted,
}

impl PsiSeriesForm {
    pub const ALL: [PsiSeriesForm; 2] = [PsiSeriesForm::Harmonic, PsiSeriesForm::Shifted];

    pub fn id(self) -> &'static str {
        match self {
            PsiSeriesForm::Harmonic => "3.9",
            PsiSeriesForm::Shifted => "3.10",
        }
    }
}

impl std::str::FromStr for PsiSeriesForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" | "3.9" => Ok(PsiSeriesForm::Harmonic),
            "shifted" | "3.10" => Ok(PsiSeriesForm::Shifted),
            _ => Err(Error::InvalidParams(format!(
                "unknown psi series form {s:?}"
            ))),
        }
    }
}

/// Euler-Maclaurin estimate of `Σ_{n>=m} f(n)` from the tail integral,
/// `f(m)` and `f'(m)`.
fn em_tail(integral: f64, f_m: f64, df_m: f64) -> f64 {
    integral + 0.5 * f_m - df_m / 12.0
}

/// The classical digamma `ψ(z)` from `N` series terms plus an
/// Euler-Maclaurin tail. Returns `(value, abs_err)`.
fn digamma_series(z: f64, form: PsiSeriesForm, big_n: u64) -> (f64, f64) {
    let mut acc = CompensatedSum::new();
    let (value, m) = match form {
        PsiSeriesForm::Harmonic => {
            // z / (n(n+z)) = 1/n - 1/(n+z)
            for n in 1..=big_n {
                let nf = n as f64;
                acc.add(z / (nf * (nf + z)));
            }
            let m = (big_n + 1) as f64;
            let tail = em_tail(
                (z / m).ln_1p(),
                z / (m * (m + z)),
                -1.0 / (m * m) + 1.0 / ((m + z) * (m + z)),
            );
            (-EULER_GAMMA - 1.0 / z + acc.value() + tail, m)
        }
        PsiSeriesForm::Shifted => {
            // (z-1) / ((n+1)(n+z)) = 1/(n+1) - 1/(n+z)
            for n in 0..big_n {
                let nf = n as f64;
                acc.add((z - 1.0) / ((nf + 1.0) * (nf + z)));
            }
            let m = big_n as f64;
            let tail = em_tail(
                ((z - 1.0) / (m + 1.0)).ln_1p(),
                (z - 1.0) / ((m + 1.0) * (m + z)),
                -1.0 / ((m + 1.0) * (m + 1.0)) + 1.0 / ((m + z) * (m + z)),
            );
            (-EULER_GAMMA + acc.value() + tail, m)
        }
    };
    // Next Euler-Maclaurin term: f'''(m)/720 with |f'''| <= 6 |z-1|·3/m^5 roughly.
    let remainder = 6.0 * (z.abs() + 1.0) * 4.0 / (720.0 * m.powi(5));
    (
        value,
        remainder + 8.0 * f64::EPSILON * (acc.value().abs() + 1.0),
    )
}

fn check_series_args(x: f64, big_n: u64) -> Result<()> {
    require_positive(x)?;
    if big_n < 10 {
        return Err(Error::domain(format!("series needs N >= 10, got {big_n}")));
    }
    Ok(())
}

/// Series form of [`psi`] with `N` terms and an analytic tail correction.
pub fn psi_series(params: PkParams, x: f64, form: PsiSeriesForm, big_n: u64) -> Result<PsiEval> {
    check_series_args(x, big_n)?;
    let k = params.k();
    let (dg, err) = digamma_series(x / k, form, big_n);
    Ok(PsiEval {
        value: params.p().ln() / k + dg / k,
        abs_err: err / k,
    })
}

/// Series form without the `1/k` normalisation, matching [`psi_printed`].
pub fn psi_series_printed(
    params: PkParams,
    x: f64,
    form: PsiSeriesForm,
    big_n: u64,
) -> Result<PsiEval> {
    check_series_args(x, big_n)?;
    let k = params.k();
    let (dg, err) = digamma_series(x / k, form, big_n);
    Ok(PsiEval {
        value: params.p().ln() / k + dg,
        abs_err: err,
    })
}

/// `ln pΓk(x) = ∫_1^x pψk(t) dt + ln pΓk(1)`.
pub fn ln_gamma_via_psi(params: PkParams, x: f64, quad: &QuadratureSpec) -> Result<EvalReal> {
    let integral = psi_integral(params, x, quad)?;
    let base = gamma_closed(params, 1.0)?;
    Ok(EvalReal::new(
        integral.value + base.ln_value,
        integral.abs_err + base.abs_err_ln,
        Method::Integral,
    ))
}

/// `∫_1^x pψk(t) dt`, without the integration constant.
pub fn psi_integral(params: PkParams, x: f64, quad: &QuadratureSpec) -> Result<EvalReal> {
    require_positive(x)?;
    if x == 1.0 {
        return Ok(EvalReal::new(0.0, 0.0, Method::Integral));
    }
    let width = x - 1.0;
    let i = integrate_unit(
        |u| psi(params, 1.0 + width * u).map_or(f64::NAN, |v| v.value),
        quad,
    )?;
    Ok(EvalReal::new(
        width * i.value,
        width.abs() * i.abs_err,
        Method::Integral,
    ))
}

fn require_order(r: u32) -> Result<()> {
    if r < 2 {
        Err(Error::domain(format!(
            "order r must be at least 2, got {r}"
        )))
    } else {
        Ok(())
    }
}

fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

/// `d^r/dx^r ln pΓk(x) = (-1)^r (r-1)! ζk(x, r)` for `r >= 2`; independent of `p`.
pub fn polygamma(params: PkParams, x: f64, r: u32) -> Result<PsiEval> {
    require_order(r)?;
    require_positive(x)?;
    let k = params.k();
    let zeta = hurwitz_zeta(f64::from(r), x / k)?;
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    let value = sign * factorial(r - 1) * zeta * k.powi(-(r as i32));
    Ok(PsiEval {
        value,
        abs_err: 8.0 * f64::EPSILON * value.abs(),
    })
}

/// The polygamma with the extra factor `k` as originally printed.
pub fn polygamma_printed(params: PkParams, x: f64, r: u32) -> Result<PsiEval> {
    let v = polygamma(params, x, r)?;
    let k = params.k();
    Ok(PsiEval {
        value: k * v.value,
        abs_err: k * v.abs_err,
    })
}

/// `ζk(x, r) = Σ_{n>=0} (x + nk)^-r` from `N` terms plus an Euler-Maclaurin tail.
///
/// `abs_err` estimates the remaining Euler-Maclaurin term; it never exceeds
/// the raw tail bound `1 / ((r-1) k (x+Nk)^(r-1))`.
pub fn k_zeta(x: f64, r: u32, k: f64, big_n: u64) -> Result<EvalReal> {
    require_order(r)?;
    require_positive(x)?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParams(format!("k must be positive, got {k}")));
    }
    if big_n == 0 {
        return Err(Error::domain("k-zeta needs N >= 1"));
    }
    let rf = f64::from(r);
    let ri = r as i32;
    let mut acc = CompensatedSum::new();
    for n in 0..big_n {
        acc.add((x + n as f64 * k).powi(-ri));
    }
    let edge = x + big_n as f64 * k;
    let tail = em_tail(
        edge.powi(1 - ri) / ((rf - 1.0) * k),
        edge.powi(-ri),
        -rf * k * edge.powi(-ri - 1),
    );
    let value = acc.value() + tail;
    let remainder = rf * (rf + 1.0) * (rf + 2.0) * k.powi(3) * edge.powi(-ri - 3) / 720.0;
    let raw_bound = edge.powi(1 - ri) / ((rf - 1.0) * k);
    Ok(EvalReal::new(
        value,
        remainder.min(raw_bound) + 4.0 * f64::EPSILON * value,
        Method::Series,
    ))
}
