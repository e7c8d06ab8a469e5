//! The p-k Gamma function `pΓk(x) = p^(x/k) Γ(x/k) / k`.
//!
//! Values live in log-space with a sign channel. Besides the closed form
//! there are independent evaluators (Euler limit, integral, Euler product,
//! Weierstrass and Gauss reciprocal products) used to cross-check it, plus
//! the rescaling relations and the fundamental equations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{
    gamma_classical, ln_gamma_classical, nearest_pole, pole_check, EvalReal, Method, PkParams,
    EULER_GAMMA,
};
use crate::numeric::{sin_pi, CompensatedSum};
use crate::quadrature::{integrate_semiaxis, QuadratureSpec};
use crate::record::{grid_point, GridPoint, IdentityRecord};

/// `ln|pΓk(x)|` (or of its reciprocal, for the reciprocal evaluators) with
/// sign and an absolute error estimate on the logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaEval {
    pub ln_value: f64,
    pub sign: f64,
    pub abs_err_ln: f64,
    pub method: Method,
}

impl GammaEval {
    /// Linear-space value; may overflow to `±inf`.
    pub fn value(&self) -> f64 {
        self.sign * self.ln_value.exp()
    }

    /// Relative error implied by `abs_err_ln`.
    pub fn rel_err(&self) -> f64 {
        self.abs_err_ln.exp_m1()
    }
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

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Closed form via the classical kernel. Valid for any non-pole real `x`.
pub fn gamma_closed(params: PkParams, x: f64) -> Result<GammaEval> {
    reject_pole(params, x)?;
    let (p, k) = (params.p(), params.k());
    let z = x / k;
    let lg = ln_gamma_classical(z)?;
    let scale = z * p.ln() - k.ln();
    Ok(GammaEval {
        ln_value: scale + lg.value,
        sign: lg.sign,
        abs_err_ln: lg.abs_err + 2.0 * f64::EPSILON * (scale.abs() + lg.value.abs()),
        method: Method::Closed,
    })
}

/// Linear-space `pΓk(x)`, using the classical `Γ` in linear space when the
/// result is representable and [`gamma_closed`] exponentiated otherwise
/// (which overflows to `±inf` beyond the double range).
pub fn gamma_value(params: PkParams, x: f64) -> Result<EvalReal> {
    let g = gamma_closed(params, x)?;
    let (p, k) = (params.p(), params.k());
    let z = x / k;
    let (gz, gz_err) = gamma_classical(z)?;
    let scale = p.powf(z) / k;
    let value = scale * gz;
    if value.is_finite() && value != 0.0 && gz.is_finite() {
        let err = scale.abs() * gz_err + value.abs() * 4.0 * f64::EPSILON;
        return Ok(EvalReal::new(value, err, Method::Closed));
    }
    let value = g.value();
    Ok(EvalReal::new(
        value,
        value.abs() * g.abs_err_ln,
        Method::Closed,
    ))
}

/// Partial sums `Σ_{j=1}^{m} ln(1 + z/j)` sampled at each `m` in `marks`
/// (ascending), sharing one pass.
fn ln1p_partial_sums(z: f64, marks: &[u64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(marks.len());
    let mut acc = CompensatedSum::new();
    let mut j = 0u64;
    for &m in marks {
        while j < m {
            j += 1;
            acc.add((z / j as f64).ln_1p());
        }
        out.push(acc.value());
    }
    out
}

/// Euler limit `(1/k) n! p^(n+1) (np)^(x/k - 1) / p(x)_{n,k}` in log-space.
///
/// Converges like `O(1/n)`. With `accelerate`, the sequence at `n, 2n, 4n`
/// is Richardson-extrapolated to remove the `1/n` and `1/n²` terms.
pub fn gamma_limit(params: PkParams, x: f64, n: u64, accelerate: bool) -> Result<GammaEval> {
    require_positive("x", x)?;
    if n < 8 {
        return Err(Error::domain(format!("limit needs n >= 8, got {n}")));
    }
    let (p, k) = (params.p(), params.k());
    let z = x / k;
    let head = z * p.ln() - k.ln() - z.ln();
    // ln A_n = head + z ln n - Σ_{j<n} ln(1 + z/j)
    let at = |n: u64, sum: f64| head + z * (n as f64).ln() - sum;
    let ulp = |v: f64| 4.0 * f64::EPSILON * (v.abs() + z * (4.0 * n as f64).ln());

    let (ln_value, abs_err_ln) = if accelerate {
        let sums = ln1p_partial_sums(z, &[n - 1, 2 * n - 1, 4 * n - 1]);
        let l1 = at(n, sums[0]);
        let l2 = at(2 * n, sums[1]);
        let l4 = at(4 * n, sums[2]);
        let extrapolated = (8.0 * l4 - 6.0 * l2 + l1) / 3.0;
        let first_order = 2.0 * l4 - l2;
        (
            extrapolated,
            (extrapolated - first_order).abs() + ulp(extrapolated),
        )
    } else {
        let sums = ln1p_partial_sums(z, &[n - 1]);
        let l = at(n, sums[0]);
        // Leading term of the expansion in 1/n.
        (l, (z * (z - 1.0)).abs() / (2.0 * n as f64) + ulp(l))
    };
    Ok(GammaEval {
        ln_value,
        sign: 1.0,
        abs_err_ln,
        method: Method::Limit,
    })
}

/// `a^(x/k) ∫_0^∞ exp(-a t^k / p) t^(x-1) dt`; `a_scale = 1` is the plain
/// integral representation.
pub fn gamma_integral(
    params: PkParams,
    x: f64,
    a_scale: f64,
    quad: &QuadratureSpec,
) -> Result<GammaEval> {
    require_positive("x", x)?;
    require_positive("a", a_scale)?;
    let (p, k) = (params.p(), params.k());
    let log_integrand = |t: f64| (x - 1.0) * t.ln() - a_scale * t.powf(k) / p;
    // Normalise by the peak so the quadrature sees values of order one.
    let shift = if x > 1.0 {
        let peak = (p * (x - 1.0) / (a_scale * k)).powf(1.0 / k);
        log_integrand(peak)
    } else {
        0.0
    };
    let integral = integrate_semiaxis(|t| (log_integrand(t) - shift).exp(), quad)?;
    Ok(GammaEval {
        ln_value: (x / k) * a_scale.ln() + shift + integral.value.ln(),
        sign: 1.0,
        abs_err_ln: integral.abs_err / integral.value,
        method: Method::Integral,
    })
}

/// `Σ_{n>N} n^-j` by Euler-Maclaurin, for `j >= 2`.
fn zeta_tail(j: i32, big_n: f64) -> f64 {
    let jf = f64::from(j);
    big_n.powi(1 - j) / (jf - 1.0) - 0.5 * big_n.powi(-j) + jf / 12.0 * big_n.powi(-j - 1)
}

/// `Σ_{n=1}^{N} [z ln(1 + 1/n) - ln(1 + z/n)]` plus its tail beyond `N`.
fn euler_log_product(z: f64, big_n: u64) -> (f64, f64) {
    let mut acc = CompensatedSum::new();
    for n in 1..=big_n {
        let nf = n as f64;
        acc.add(z * nf.recip().ln_1p() - (z / nf).ln_1p());
    }
    let nf = big_n as f64;
    let (c2, c3, c4, c5) = (
        (z * z - z) / 2.0,
        (z - z.powi(3)) / 3.0,
        (z.powi(4) - z) / 4.0,
        (z - z.powi(5)) / 5.0,
    );
    let tail = c2 * zeta_tail(2, nf) + c3 * zeta_tail(3, nf) + c4 * zeta_tail(4, nf);
    let err = c5.abs() * zeta_tail(5, nf) + 4.0 * f64::EPSILON * nf * z.abs();
    (acc.value() + tail, err)
}

fn require_terms(big_n: u64) -> Result<()> {
    if big_n == 0 {
        Err(Error::domain("product needs at least one factor"))
    } else {
        Ok(())
    }
}

/// Euler product `(p^(x/k) / x) ∏_{n=1}^{N} (1 + 1/n)^(x/k) (1 + x/(nk))^-1`
/// with tail correction.
pub fn gamma_euler_product(params: PkParams, x: f64, big_n: u64) -> Result<GammaEval> {
    require_positive("x", x)?;
    require_terms(big_n)?;
    let z = x / params.k();
    let (sum, err) = euler_log_product(z, big_n);
    Ok(GammaEval {
        ln_value: z * params.p().ln() - x.ln() + sum,
        sign: 1.0,
        abs_err_ln: err,
        method: Method::EulerProduct,
    })
}

/// The Euler product with prefactor `p^(x/k) / k` as originally printed;
/// off by the factor `x/k`.
pub fn gamma_euler_product_printed(params: PkParams, x: f64, big_n: u64) -> Result<GammaEval> {
    let corrected = gamma_euler_product(params, x, big_n)?;
    Ok(GammaEval {
        ln_value: corrected.ln_value + (x / params.k()).ln(),
        ..corrected
    })
}

/// `ln(1 + u) - u`, accurate for small `u`.
fn ln1p_minus(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let mut term = u;
        let mut acc = 0.0;
        for j in 2..24 {
            term *= -u;
            acc += term / f64::from(j);
        }
        acc
    } else {
        u.ln_1p() - u
    }
}

/// Weierstrass product for the reciprocal:
/// `1/pΓk(x) = (x / p^(x/k)) e^(γx/k) ∏_{n=1}^{N} (1 + x/(nk)) e^(-x/(nk))`,
/// with tail correction. Valid for negative non-pole `x`.
pub fn gamma_weierstrass_recip(params: PkParams, x: f64, big_n: u64) -> Result<GammaEval> {
    reject_pole(params, x)?;
    require_terms(big_n)?;
    let z = x / params.k();
    let mut acc = CompensatedSum::new();
    let mut sign = x.signum();
    for n in 1..=big_n {
        let u = z / n as f64;
        if u < -1.0 {
            sign = -sign;
            acc.add((-1.0 - u).ln() - u);
        } else {
            acc.add(ln1p_minus(u));
        }
    }
    let nf = big_n as f64;
    let tail = -z * z / 2.0 * zeta_tail(2, nf) + z.powi(3) / 3.0 * zeta_tail(3, nf)
        - z.powi(4) / 4.0 * zeta_tail(4, nf);
    let err = z.powi(5).abs() / 5.0 * zeta_tail(5, nf) + 4.0 * f64::EPSILON * nf * z.abs();
    Ok(GammaEval {
        ln_value: x.abs().ln() - z * params.p().ln() + z * EULER_GAMMA + acc.value() + tail,
        sign,
        abs_err_ln: err,
        method: Method::Weierstrass,
    })
}

/// The Weierstrass reciprocal with prefactor `x / (k p^(x/k))` as originally
/// printed; off by the factor `1/k`.
pub fn gamma_weierstrass_recip_printed(params: PkParams, x: f64, big_n: u64) -> Result<GammaEval> {
    let corrected = gamma_weierstrass_recip(params, x, big_n)?;
    Ok(GammaEval {
        ln_value: corrected.ln_value - params.k().ln(),
        ..corrected
    })
}

/// Gauss limit for the reciprocal,
/// `1/pΓk(x) = (x / p^(x/k)) lim n^(-x/k) ∏_{r=1}^{n} (1 + x/(rk))`,
/// optionally Richardson-extrapolated over `n, 2n, 4n`.
pub fn gamma_gauss_recip(params: PkParams, x: f64, n: u64, accelerate: bool) -> Result<GammaEval> {
    require_positive("x", x)?;
    if n < 8 {
        return Err(Error::domain(format!("limit needs n >= 8, got {n}")));
    }
    let z = x / params.k();
    let head = x.ln() - z * params.p().ln();
    let at = |n: u64, sum: f64| head - z * (n as f64).ln() + sum;
    let ulp = |v: f64| 4.0 * f64::EPSILON * (v.abs() + z * (4.0 * n as f64).ln());
    let (ln_value, abs_err_ln) = if accelerate {
        let sums = ln1p_partial_sums(z, &[n, 2 * n, 4 * n]);
        let (l1, l2, l4) = (at(n, sums[0]), at(2 * n, sums[1]), at(4 * n, sums[2]));
        let extrapolated = (8.0 * l4 - 6.0 * l2 + l1) / 3.0;
        let first_order = 2.0 * l4 - l2;
        (
            extrapolated,
            (extrapolated - first_order).abs() + ulp(extrapolated),
        )
    } else {
        let l = at(n, ln1p_partial_sums(z, &[n])[0]);
        (l, (z * (z + 1.0)).abs() / (2.0 * n as f64) + ulp(l))
    };
    Ok(GammaEval {
        ln_value,
        sign: 1.0,
        abs_err_ln,
        method: Method::Limit,
    })
}

/// The Gauss reciprocal with prefactor `x / (k p^(x/k))` as originally printed.
pub fn gamma_gauss_recip_printed(
    params: PkParams,
    x: f64,
    n: u64,
    accelerate: bool,
) -> Result<GammaEval> {
    let corrected = gamma_gauss_recip(params, x, n, accelerate)?;
    Ok(GammaEval {
        ln_value: corrected.ln_value - params.k().ln(),
        ..corrected
    })
}

/// Rescaling relations between parameter pairs `(p, k)` and `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaRescale {
    /// `pΓs(x) = (k/s) pΓk(kx/s)`
    Order,
    /// `rΓs(x) = (k/s) (r/p)^(x/s) pΓk(kx/s)`
    OrderAndScale,
    /// `rΓk(x) = (r/p)^(x/k) pΓk(x)`
    Scale,
}

impl GammaRescale {
    pub fn id(self) -> &'static str {
        match self {
            GammaRescale::Order => "2.11",
            GammaRescale::OrderAndScale => "2.12",
            GammaRescale::Scale => "2.13",
        }
    }
}

/// Both sides of a rescaling relation, in log-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPair {
    pub lhs: GammaEval,
    pub rhs: GammaEval,
}

/// Evaluates a rescaling relation with base pair `params = (p, k)` and
/// auxiliary pair `aux = (r, s)`.
pub fn gamma_rescale(
    params: PkParams,
    aux: PkParams,
    x: f64,
    mode: GammaRescale,
) -> Result<GammaPair> {
    let (p, k) = (params.p(), params.k());
    let (r, s) = (aux.p(), aux.k());
    let shift = |g: GammaEval, ln_factor: f64| GammaEval {
        ln_value: g.ln_value + ln_factor,
        abs_err_ln: g.abs_err_ln + 2.0 * f64::EPSILON * ln_factor.abs(),
        ..g
    };
    let pair = match mode {
        GammaRescale::Order => GammaPair {
            lhs: gamma_closed(PkParams::new(p, s)?, x)?,
            rhs: shift(gamma_closed(params, k * x / s)?, (k / s).ln()),
        },
        GammaRescale::OrderAndScale => GammaPair {
            lhs: gamma_closed(aux, x)?,
            rhs: shift(
                gamma_closed(params, k * x / s)?,
                (k / s).ln() + x / s * (r / p).ln(),
            ),
        },
        GammaRescale::Scale => GammaPair {
            lhs: gamma_closed(PkParams::new(r, k)?, x)?,
            rhs: shift(gamma_closed(params, x)?, x / k * (r / p).ln()),
        },
    };
    Ok(pair)
}

/// The fundamental equations checked by [`check_gamma_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GammaIdentity {
    /// `p(x)_{n,k} = pΓk(x+nk) / pΓk(x)`
    PochRatio,
    /// `pΓk(x+k) = (xp/k) pΓk(x)`
    Functional,
    /// `pΓk(x+nk) = p^n (x/k)_n pΓk(x)`
    Upward,
    /// `pΓk(x) / pΓk(x-nk) = (p/k)^n (x-k)...(x-nk)`
    Downward,
    /// `pΓk(x) / pΓk(x-nk) = (-1)^n pΓk(-x+nk+k) / pΓk(-x+k)`
    Alternating,
    /// `pΓk(1) = p^(1/k) Γ(1/k) / k`
    AtOne,
    /// `pΓk(k) = p/k`
    AtK,
    /// `pΓk(p) = p^(p/k) Γ(p/k) / k`
    AtP,
    /// `pΓk(x) pΓk(-x) = -π / (xk sin(πx/k))`; printed without the minus.
    ReflectionNegated,
    /// `pΓk(x) pΓk(k-x) = (p/k²) π / sin(πx/k)`
    Reflection,
    /// Gauss multiplication over `m` shifted arguments.
    Multiplication,
}

impl GammaIdentity {
    pub const ALL: [GammaIdentity; 11] = [
        GammaIdentity::PochRatio,
        GammaIdentity::Functional,
        GammaIdentity::Upward,
        GammaIdentity::Downward,
        GammaIdentity::Alternating,
        GammaIdentity::AtOne,
        GammaIdentity::AtK,
        GammaIdentity::AtP,
        GammaIdentity::ReflectionNegated,
        GammaIdentity::Reflection,
        GammaIdentity::Multiplication,
    ];

    pub fn id(self) -> &'static str {
        match self {
            GammaIdentity::PochRatio => "2.22",
            GammaIdentity::Functional => "2.23",
            GammaIdentity::Upward => "2.24",
            GammaIdentity::Downward => "2.25",
            GammaIdentity::Alternating => "2.26",
            GammaIdentity::AtOne => "2.27",
            GammaIdentity::AtK => "2.28",
            GammaIdentity::AtP => "2.29",
            GammaIdentity::ReflectionNegated => "2.30",
            GammaIdentity::Reflection => "2.31",
            GammaIdentity::Multiplication => "2.32",
        }
    }

    /// Whether the identity varies with `x` (constant identities are checked
    /// once per parameter pair).
    pub fn uses_x(self) -> bool {
        !matches!(
            self,
            GammaIdentity::AtOne | GammaIdentity::AtK | GammaIdentity::AtP
        )
    }

    pub fn uses_n(self) -> bool {
        matches!(
            self,
            GammaIdentity::PochRatio
                | GammaIdentity::Upward
                | GammaIdentity::Downward
                | GammaIdentity::Alternating
        )
    }

    pub fn uses_m(self) -> bool {
        self == GammaIdentity::Multiplication
    }
}

/// One audit point: parameters, argument, and the integer indices used by
/// the identities that need them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPoint {
    pub params: PkParams,
    pub x: f64,
    pub n: u32,
    pub m: u32,
}

/// Arguments closer than this to a pole (in units of `k`) are skipped.
pub const POLE_MARGIN: f64 = 1e-3;

fn near_pole(params: PkParams, x: f64) -> bool {
    matches!(nearest_pole(x / params.k()), Some((_, d)) if d < POLE_MARGIN)
}

fn identity_point(id: GammaIdentity, pt: &GammaPoint) -> GridPoint {
    let mut gp = grid_point([("p", pt.params.p()), ("k", pt.params.k())]);
    if id.uses_x() {
        gp.insert("x".into(), pt.x);
    }
    if id.uses_n() {
        gp.insert("n".into(), f64::from(pt.n));
    }
    if id.uses_m() {
        gp.insert("m".into(), f64::from(pt.m));
    }
    gp
}

/// Checks one fundamental equation at one point. Points that put any Gamma
/// factor within [`POLE_MARGIN`] of a pole are recorded as skipped.
pub fn check_gamma_identity(id: GammaIdentity, pt: &GammaPoint, tol: f64) -> IdentityRecord {
    let gp = identity_point(id, pt);
    let (p, k, x) = (pt.params.p(), pt.params.k(), pt.x);
    let n = f64::from(pt.n);
    let args: Vec<f64> = match id {
        GammaIdentity::PochRatio | GammaIdentity::Upward => vec![x, x + n * k],
        GammaIdentity::Functional => vec![x, x + k],
        GammaIdentity::Downward => vec![x, x - n * k],
        GammaIdentity::Alternating => vec![x, x - n * k, -x + n * k + k, -x + k],
        GammaIdentity::AtOne => vec![1.0],
        GammaIdentity::AtK => vec![k],
        GammaIdentity::AtP => vec![p],
        GammaIdentity::ReflectionNegated => vec![x, -x],
        GammaIdentity::Reflection => vec![x, k - x],
        GammaIdentity::Multiplication => (0..pt.m)
            .map(|r| x + k * f64::from(r) / f64::from(pt.m))
            .chain(std::iter::once(f64::from(pt.m) * x))
            .collect(),
    };
    if args.iter().any(|&a| near_pole(pt.params, a)) {
        return IdentityRecord::skipped(id.id(), gp, "argument within pole margin");
    }
    match evaluate_identity(id, pt) {
        Ok((lhs, printed, corrected)) => {
            IdentityRecord::evaluated(id.id(), gp, lhs, printed, corrected, tol)
        }
        Err(e) => IdentityRecord::skipped(id.id(), gp, e.to_string()),
    }
}

/// `(lhs, rhs as printed, rhs corrected)`.
fn evaluate_identity(id: GammaIdentity, pt: &GammaPoint) -> Result<(f64, f64, f64)> {
    let params = pt.params;
    let (p, k, x) = (params.p(), params.k(), pt.x);
    let z = x / k;
    let nf = f64::from(pt.n);
    let g = |arg: f64| gamma_closed(params, arg);
    let ratio = |a: GammaEval, b: GammaEval| a.sign * b.sign * (a.ln_value - b.ln_value).exp();
    let same = |lhs: f64, rhs: f64| Ok((lhs, rhs, rhs));
    match id {
        GammaIdentity::PochRatio => {
            let poch =
                crate::pochhammer::poch_direct(&crate::pochhammer::PochSpec::new(x, pt.n, params)?);
            same(poch, ratio(g(x + nf * k)?, g(x)?))
        }
        GammaIdentity::Functional => same(g(x + k)?.value(), x * p / k * g(x)?.value()),
        GammaIdentity::Upward => {
            let rising: f64 = (0..pt.n).map(|j| z + f64::from(j)).product();
            same(
                g(x + nf * k)?.value(),
                p.powi(pt.n as i32) * rising * g(x)?.value(),
            )
        }
        GammaIdentity::Downward => {
            let falling: f64 = (1..=pt.n).map(|j| x - f64::from(j) * k).product();
            same(
                ratio(g(x)?, g(x - nf * k)?),
                (p / k).powi(pt.n as i32) * falling,
            )
        }
        GammaIdentity::Alternating => {
            let sign = if pt.n.is_multiple_of(2) { 1.0 } else { -1.0 };
            same(
                ratio(g(x)?, g(x - nf * k)?),
                sign * ratio(g(-x + nf * k + k)?, g(-x + k)?),
            )
        }
        GammaIdentity::AtOne => {
            let lg = ln_gamma_classical(1.0 / k)?;
            same(
                g(1.0)?.value(),
                p.powf(1.0 / k) * lg.sign * lg.value.exp() / k,
            )
        }
        GammaIdentity::AtK => same(g(k)?.value(), p / k),
        GammaIdentity::AtP => {
            let lg = ln_gamma_classical(p / k)?;
            same(g(p)?.value(), p.powf(p / k) * lg.sign * lg.value.exp() / k)
        }
        GammaIdentity::ReflectionNegated => {
            let lhs = g(x)?.value() * g(-x)?.value();
            let printed = std::f64::consts::PI / (x * k * sin_pi(z));
            Ok((lhs, printed, -printed))
        }
        GammaIdentity::Reflection => same(
            g(x)?.value() * g(k - x)?.value(),
            p / (k * k) * std::f64::consts::PI / sin_pi(z),
        ),
        GammaIdentity::Multiplication => {
            let m = f64::from(pt.m);
            if pt.m < 2 {
                return Err(Error::domain("multiplication needs m >= 2"));
            }
            let mut ln_lhs = CompensatedSum::new();
            let mut sign = 1.0;
            for r in 0..pt.m {
                let v = g(x + k * f64::from(r) / m)?;
                ln_lhs.add(v.ln_value);
                sign *= v.sign;
            }
            let gm = g(m * x)?;
            let ln_rhs = (m - 1.0) / 2.0 * (p.ln() + std::f64::consts::TAU.ln())
                - (m - 1.0) * k.ln()
                + (0.5 - m * z) * m.ln()
                + gm.ln_value;
            same(sign * ln_lhs.value().exp(), gm.sign * ln_rhs.exp())
        }
    }
}
