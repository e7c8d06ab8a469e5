//! The p-k hypergeometric series
//! `F(a,p,k; b,t,s; x) = Σ ∏ p_i(a_i)_{n,k_i} / ∏ t_j(b_j)_{n,s_j} xⁿ/n!`.
//!
//! It reduces to the classical `rFq(a/k; b/s; A x)` with `A = ∏p / ∏t`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{ln_gamma_classical, nearest_pole, EvalReal, Method, PkParams, POLE_TOL};
use crate::numeric::CompensatedSum;
use crate::pochhammer::{poch_direct, poch_ln, PochSpec};
use crate::quadrature::{integrate_unit_with_complement, QuadratureSpec};

/// Upper parameter `(a, p, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperParam {
    pub a: f64,
    pub p: f64,
    pub k: f64,
}

/// Lower parameter `(b, t, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerParam {
    pub b: f64,
    pub t: f64,
    pub s: f64,
}

impl UpperParam {
    pub fn new(a: f64, p: f64, k: f64) -> Self {
        Self { a, p, k }
    }

    /// Classical parameter `a/k`.
    pub fn alpha(&self) -> f64 {
        self.a / self.k
    }
}

impl LowerParam {
    pub fn new(b: f64, t: f64, s: f64) -> Self {
        Self { b, t, s }
    }

    /// Classical parameter `b/s`.
    pub fn beta(&self) -> f64 {
        self.b / self.s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperParams {
    upper: Vec<UpperParam>,
    lower: Vec<LowerParam>,
}

fn check_scale(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

impl HyperParams {
    /// Validates scales and rejects lower parameters with `b/s` a
    /// non-positive integer.
    pub fn new(upper: Vec<UpperParam>, lower: Vec<LowerParam>) -> Result<Self> {
        for u in &upper {
            if !u.a.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "a must be finite, got {}",
                    u.a
                )));
            }
            check_scale("p", u.p)?;
            check_scale("k", u.k)?;
        }
        for (index, l) in lower.iter().enumerate() {
            if !l.b.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "b must be finite, got {}",
                    l.b
                )));
            }
            check_scale("t", l.t)?;
            check_scale("s", l.s)?;
            if let Some((term, dist)) = nearest_pole(l.beta()) {
                if dist <= POLE_TOL {
                    return Err(Error::LowerPole {
                        index,
                        term: term as usize,
                    });
                }
            }
        }
        Ok(Self { upper, lower })
    }

    pub fn upper(&self) -> &[UpperParam] {
        &self.upper
    }

    pub fn lower(&self) -> &[LowerParam] {
        &self.lower
    }

    pub fn r(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// `A = ∏p / ∏t`.
    pub fn scale(&self) -> f64 {
        let top: f64 = self.upper.iter().map(|u| u.p).product();
        let bottom: f64 = self.lower.iter().map(|l| l.t).product();
        top / bottom
    }

    /// Number of non-zero terms when some `a/k` is a non-positive integer.
    fn terminates_after(&self) -> Option<u64> {
        self.upper
            .iter()
            .filter_map(|u| match nearest_pole(u.alpha()) {
                Some((m, dist)) if dist <= POLE_TOL => Some(m),
                _ => None,
            })
            .min()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConvergenceKind {
    AllFinite,
    FiniteRadius,
    DivergentFormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceClass {
    pub kind: ConvergenceKind,
    /// `∏t / ∏p`, set for [`ConvergenceKind::FiniteRadius`].
    pub radius: Option<f64>,
}

/// Ratio-test classification by the counts of upper and lower parameters.
pub fn classify(hp: &HyperParams) -> ConvergenceClass {
    let (r, q) = (hp.r(), hp.q());
    if r <= q {
        ConvergenceClass {
            kind: ConvergenceKind::AllFinite,
            radius: None,
        }
    } else if r == q + 1 {
        ConvergenceClass {
            kind: ConvergenceKind::FiniteRadius,
            radius: Some(1.0 / hp.scale()),
        }
    } else {
        ConvergenceClass {
            kind: ConvergenceKind::DivergentFormal,
            radius: None,
        }
    }
}

/// Classical parameters and argument scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperReduction {
    pub classical_upper: Vec<f64>,
    pub classical_lower: Vec<f64>,
    pub scale: f64,
}

pub fn reduce_classical(hp: &HyperParams) -> HyperReduction {
    HyperReduction {
        classical_upper: hp.upper.iter().map(UpperParam::alpha).collect(),
        classical_lower: hp.lower.iter().map(LowerParam::beta).collect(),
        scale: hp.scale(),
    }
}

/// Stopping controls for the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesControl {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_terms: 100_000,
        }
    }
}

impl SeriesControl {
    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidParams(format!(
                "series control needs tol > 0 and max_terms >= 1, got {tol}, {max_terms}"
            )));
        }
        Ok(Self { tol, max_terms })
    }
}

/// Sums `1 + Σ term_n` where `term_{n+1} = term_n · ratio(n)`.
///
/// Stops after three consecutive terms below `tol·|sum|`, or after exactly
/// `terminate` terms for a polynomial. `limit_ratio` is the asymptotic term
/// ratio, if known, used to bound the geometric tail.
fn sum_series(
    ratio: impl Fn(u64) -> f64,
    terminate: Option<u64>,
    limit_ratio: f64,
    ctl: SeriesControl,
) -> Result<EvalReal> {
    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    let mut abs_sum = 1.0;
    let mut term = 1.0f64;
    let mut streak = 0;
    let roundoff = |abs_sum: f64| 4.0 * f64::EPSILON * abs_sum;
    for n in 0..ctl.max_terms as u64 {
        if terminate == Some(n) {
            return Ok(EvalReal::new(
                sum.value(),
                roundoff(abs_sum),
                Method::Series,
            ));
        }
        let rho = ratio(n);
        term *= rho;
        sum.add(term);
        abs_sum += term.abs();
        if !term.is_finite() {
            return Err(Error::Divergent(format!("term {} is not finite", n + 1)));
        }
        if term.abs() <= ctl.tol * sum.value().abs() {
            streak += 1;
        } else {
            streak = 0;
        }
        if streak >= 3 {
            let rho = rho.abs().max(limit_ratio);
            let tail = if rho < 1.0 {
                term.abs() * rho / (1.0 - rho)
            } else {
                term.abs()
            };
            return Ok(EvalReal::new(
                sum.value(),
                tail + roundoff(abs_sum),
                Method::Series,
            ));
        }
    }
    if terminate.is_some_and(|m| m <= ctl.max_terms as u64) {
        return Ok(EvalReal::new(
            sum.value(),
            roundoff(abs_sum),
            Method::Series,
        ));
    }
    Err(Error::MaxTermsExceeded {
        partial: EvalReal::new(sum.value(), term.abs(), Method::Series),
        terms: ctl.max_terms,
    })
}

/// Rejects divergent configurations, unless the series terminates.
fn check_convergent(class: ConvergenceClass, x: f64, terminating: bool) -> Result<()> {
    if terminating {
        return Ok(());
    }
    match class.kind {
        ConvergenceKind::AllFinite => Ok(()),
        ConvergenceKind::DivergentFormal => Err(Error::Divergent(
            "more than q+1 upper parameters: the series diverges for x != 0".into(),
        )),
        ConvergenceKind::FiniteRadius => {
            let radius = class.radius.expect("finite radius");
            if x.abs() >= radius {
                Err(Error::Divergent(format!(
                    "|x| = {} is outside the radius of convergence {radius}",
                    x.abs()
                )))
            } else {
                Ok(())
            }
        }
    }
}

/// Sums the p-k series with the literal p-k factors
/// `(a p/k + n p) / (b t/s + n t)`.
pub fn hyper_series(hp: &HyperParams, x: f64, ctl: SeriesControl) -> Result<EvalReal> {
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    let class = classify(hp);
    let terminate = hp.terminates_after();
    if x == 0.0 {
        return Ok(EvalReal::new(1.0, 0.0, Method::Series));
    }
    check_convergent(class, x, terminate.is_some())?;
    let limit_ratio = match class.kind {
        ConvergenceKind::FiniteRadius => (hp.scale() * x).abs(),
        _ => 0.0,
    };
    let ratio = |n: u64| {
        let nf = n as f64;
        let top: f64 = hp
            .upper
            .iter()
            .map(|u| u.a * u.p / u.k + nf * u.p)
            .product();
        let bottom: f64 = hp
            .lower
            .iter()
            .map(|l| l.b * l.t / l.s + nf * l.t)
            .product();
        x * top / (bottom * (nf + 1.0))
    };
    sum_series(ratio, terminate, limit_ratio, ctl)
}

/// The classical `rFq(upper; lower; x)`.
pub fn classical_series(
    upper: &[f64],
    lower: &[f64],
    x: f64,
    ctl: SeriesControl,
) -> Result<EvalReal> {
    let to_upper = |&a: &f64| UpperParam::new(a, 1.0, 1.0);
    let to_lower = |&b: &f64| LowerParam::new(b, 1.0, 1.0);
    let hp = HyperParams::new(
        upper.iter().map(to_upper).collect(),
        lower.iter().map(to_lower).collect(),
    )?;
    let class = classify(&hp);
    let terminate = hp.terminates_after();
    if x == 0.0 {
        return Ok(EvalReal::new(1.0, 0.0, Method::Series));
    }
    check_convergent(class, x, terminate.is_some())?;
    let limit_ratio = if upper.len() == lower.len() + 1 {
        x.abs()
    } else {
        0.0
    };
    let ratio = |n: u64| {
        let nf = n as f64;
        let top: f64 = upper.iter().map(|a| a + nf).product();
        let bottom: f64 = lower.iter().map(|b| b + nf).product();
        x * top / (bottom * (nf + 1.0))
    };
    sum_series(ratio, terminate, limit_ratio, ctl)
}

/// The definition summed term by term, each coefficient built from its own
/// Pochhammer products (in log-space) rather than by a term recurrence.
/// Stops after three consecutive terms below `1e-17·|sum|` or `max_terms`.
pub fn hyper_direct(hp: &HyperParams, x: f64, max_terms: u32) -> Result<f64> {
    let mut sum = CompensatedSum::new();
    let mut streak = 0;
    for n in 0..max_terms {
        let (ln_c, sign) = ln_coefficient(hp, n)?;
        let term = if n == 0 {
            sign * ln_c.exp()
        } else if x == 0.0 || ln_c == f64::NEG_INFINITY {
            0.0
        } else {
            let x_sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
            sign * x_sign * (ln_c + f64::from(n) * x.abs().ln()).exp()
        };
        sum.add(term);
        streak = if term.abs() <= 1e-17 * sum.value().abs() {
            streak + 1
        } else {
            0
        };
        if streak >= 3 {
            break;
        }
    }
    Ok(sum.value())
}

/// `|term_{n+1} / term_n|` of the p-k series; tends to `|A x|` when `r = q+1`.
pub fn term_ratio_estimate(hp: &HyperParams, x: f64, n: u64) -> f64 {
    let nf = n as f64;
    let top: f64 = hp
        .upper
        .iter()
        .map(|u| u.a * u.p / u.k + nf * u.p)
        .product();
    let bottom: f64 = hp
        .lower
        .iter()
        .map(|l| l.b * l.t / l.s + nf * l.t)
        .product();
    (x * top / (bottom * (nf + 1.0))).abs()
}

/// `(ln|c_n|, sign)` of the coefficient of `xⁿ`, from Pochhammer products.
fn ln_coefficient(hp: &HyperParams, n: u32) -> Result<(f64, f64)> {
    let mut ln = -ln_gamma_classical(f64::from(n) + 1.0)?.value;
    let mut sign = 1.0;
    for u in &hp.upper {
        let (l, s) = poch_ln(&PochSpec::new(u.a, n, PkParams::new(u.p, u.k)?)?);
        ln += l;
        sign *= s;
    }
    for l in &hp.lower {
        let (v, s) = poch_ln(&PochSpec::new(l.b, n, PkParams::new(l.t, l.s)?)?);
        ln -= v;
        sign *= s;
    }
    Ok((ln, sign))
}

/// The coefficient of `xⁿ` in linear space; may overflow.
fn coefficient(hp: &HyperParams, n: u32) -> Result<f64> {
    let mut c = 1.0 / (1..=n).map(f64::from).product::<f64>();
    for u in &hp.upper {
        c *= poch_direct(&PochSpec::new(u.a, n, PkParams::new(u.p, u.k)?)?);
    }
    for l in &hp.lower {
        c /= poch_direct(&PochSpec::new(l.b, n, PkParams::new(l.t, l.s)?)?);
    }
    Ok(c)
}

/// Both sides of the coefficient relation
/// `n ∏(n + β_j - 1) c_n = A ∏(n - 1 + α_i) c_{n-1}` implied by the ODE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientCheck {
    pub n: u32,
    pub lhs: f64,
    pub rhs: f64,
    /// Relative deviation, `0` when both sides vanish.
    pub residual: f64,
}

/// Coefficient checks for `n = 1..=n_max`, with `c_n` computed from
/// Pochhammer products rather than from the recurrence.
pub fn ode_coefficient_residuals(hp: &HyperParams, n_max: u32) -> Result<Vec<CoefficientCheck>> {
    let red = reduce_classical(hp);
    (1..=n_max)
        .map(|n| {
            let nf = f64::from(n);
            let (ln_cn, sign_cn) = ln_coefficient(hp, n)?;
            let (ln_cp, sign_cp) = ln_coefficient(hp, n - 1)?;
            let left_poly: f64 = nf
                * red
                    .classical_lower
                    .iter()
                    .map(|b| nf + b - 1.0)
                    .product::<f64>();
            let right_poly: f64 = red.scale
                * red
                    .classical_upper
                    .iter()
                    .map(|a| nf - 1.0 + a)
                    .product::<f64>();
            let (lhs, rhs) = match (coefficient(hp, n)?, coefficient(hp, n - 1)?) {
                (cn, cp) if cn.is_normal() && cp.is_normal() => (left_poly * cn, right_poly * cp),
                // Out of double range: divide both sides by |c_{n-1}|.
                _ => (
                    left_poly * sign_cn * (ln_cn - ln_cp).exp(),
                    right_poly * sign_cp,
                ),
            };
            let residual = if lhs == rhs {
                0.0
            } else {
                (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
            };
            Ok(CoefficientCheck {
                n,
                lhs,
                rhs,
                residual,
            })
        })
        .collect()
}

/// Coefficients of `∏ (θ + c_i)` in powers of `θ`, lowest first.
fn theta_polynomial(shifts: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for c in shifts {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, &v) in coeffs.iter().enumerate() {
            next[i] += c * v;
            next[i + 1] += v;
        }
        coeffs = next;
    }
    coeffs
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Applies the hypergeometric differential operator
/// `θ ∏(θ + β_j - 1) - A x ∏(θ + α_i)` to `w` at `x` using central
/// differences of `g(u) = w(x eᵘ)` with step `h` (so `θʲw(x) = g⁽ʲ⁾(0)`).
///
/// Returns `|L w| / scale`, where `scale` sums the magnitudes of the
/// individual operator terms.
pub fn ode_residual_of(
    hp: &HyperParams,
    x: f64,
    h: f64,
    w: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::domain("the residual needs a finite x != 0"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {h}")));
    }
    let red = reduce_classical(hp);
    let mut left = theta_polynomial(red.classical_lower.iter().map(|b| b - 1.0));
    left.insert(0, 0.0);
    let right = theta_polynomial(red.classical_upper.iter().copied());
    let order = left.len().max(right.len()) - 1;

    let g = |u: f64| w(x * u.exp());
    let mut theta = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let mut acc = 0.0;
        for i in 0..=j {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binomial(j, i) * g((j as f64 / 2.0 - i as f64) * h)?;
        }
        theta.push(acc / h.powi(j as i32));
    }
    let mut total = CompensatedSum::new();
    let mut scale = 0.0;
    for (j, &c) in left.iter().enumerate() {
        total.add(c * theta[j]);
        scale += (c * theta[j]).abs();
    }
    for (j, &c) in right.iter().enumerate() {
        let v = red.scale * x * c * theta[j];
        total.add(-v);
        scale += v.abs();
    }
    Ok(if scale == 0.0 {
        0.0
    } else {
        total.value().abs() / scale
    })
}

/// [`ode_residual_of`] applied to the series itself. Requires `r <= q+1`
/// and, for a finite radius, `|x|` below half the radius.
pub fn ode_residual(hp: &HyperParams, x: f64, h: f64) -> Result<f64> {
    let class = classify(hp);
    match class.kind {
        ConvergenceKind::DivergentFormal => {
            return Err(Error::Divergent("the ODE check needs r <= q+1".into()))
        }
        ConvergenceKind::FiniteRadius => {
            let radius = class.radius.expect("finite radius");
            if x.abs() >= radius / 2.0 {
                return Err(Error::Divergent(format!(
                    "|x| must be below half the radius {radius}"
                )));
            }
        }
        ConvergenceKind::AllFinite => {}
    }
    let ctl = SeriesControl::new(1e-16, 100_000)?;
    ode_residual_of(hp, x, h, |y| hyper_series(hp, y, ctl).map(|e| e.value))
}

/// Both sides of `Σ p(a)_{n,k} xⁿ/n! = (1 - xp)^(-a/k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialEval {
    pub series: EvalReal,
    pub closed: f64,
}

/// The p-k binomial theorem, both sides computed independently.
pub fn pk_binomial(a: f64, params: PkParams, x: f64) -> Result<BinomialEval> {
    let p = params.p();
    if x.abs() >= 1.0 / p {
        return Err(Error::Divergent(format!(
            "|x| = {} must be below 1/p = {}",
            x.abs(),
            1.0 / p
        )));
    }
    let hp = HyperParams::new(vec![UpperParam::new(a, p, params.k())], vec![])?;
    let series = hyper_series(&hp, x, SeriesControl::new(1e-16, 100_000)?)?;
    let closed = (-(a / params.k()) * (-x * p).ln_1p()).exp();
    Ok(BinomialEval { series, closed })
}

/// Integral representation for one upper and one lower parameter:
/// `Γ(β)/(Γ(α)Γ(β-α)) ∫_0^1 t^(α-1) (1-t)^(β-α-1) e^(A x t) dt`
/// with `α = a/k`, `β = b/s`, `A = p/t`. Needs `0 < α < β`.
pub fn confluent_integral(hp: &HyperParams, x: f64, quad: &QuadratureSpec) -> Result<EvalReal> {
    if hp.r() != 1 || hp.q() != 1 {
        return Err(Error::UnsupportedShape(format!(
            "the integral form is implemented for one upper and one lower parameter, got r = {}, q = {}",
            hp.r(),
            hp.q()
        )));
    }
    let (alpha, beta) = (hp.upper[0].alpha(), hp.lower[0].beta());
    if !(alpha > 0.0 && beta > alpha) {
        return Err(Error::domain(format!(
            "the integral form needs 0 < a/k < b/s, got {alpha} and {beta}"
        )));
    }
    let ax = hp.scale() * x;
    let log_f = |t: f64, tc: f64| (alpha - 1.0) * t.ln() + (beta - alpha - 1.0) * tc.ln() + ax * t;
    let shift = (1..64)
        .map(|j| {
            let t = f64::from(j) / 64.0;
            log_f(t, 1.0 - t)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let integral = integrate_unit_with_complement(|t, tc| (log_f(t, tc) - shift).exp(), quad)?;
    let ln_pre = ln_gamma_classical(beta)?.value
        - ln_gamma_classical(alpha)?.value
        - ln_gamma_classical(beta - alpha)?.value;
    let scale = (ln_pre + shift).exp();
    Ok(EvalReal::new(
        scale * integral.value,
        scale * integral.abs_err,
        Method::Integral,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_err;
    use std::f64::consts::LN_2;

    fn up(a: f64, p: f64, k: f64) -> UpperParam {
        UpperParam::new(a, p, k)
    }

    fn lo(b: f64, t: f64, s: f64) -> LowerParam {
        LowerParam::new(b, t, s)
    }

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn classify_examples() {
        let hp = HyperParams::new(vec![], vec![lo(1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(classify(&hp).kind, ConvergenceKind::AllFinite);
        let hp = HyperParams::new(
            vec![up(1.0, 2.0, 1.0), up(1.0, 3.0, 1.0)],
            vec![lo(1.0, 1.0, 1.0)],
        )
        .unwrap();
        let c = classify(&hp);
        assert_eq!(c.kind, ConvergenceKind::FiniteRadius);
        assert!(rel_err(1.0 / 6.0, c.radius.unwrap()) < 1e-15);
        let hp = HyperParams::new(vec![up(1.0, 1.0, 1.0); 3], vec![lo(1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(classify(&hp).kind, ConvergenceKind::DivergentFormal);
    }

    #[test]
    fn lower_poles_are_rejected() {
        assert_eq!(
            HyperParams::new(vec![], vec![lo(-4.0, 1.0, 2.0)]),
            Err(Error::LowerPole { index: 0, term: 2 })
        );
        assert!(HyperParams::new(vec![], vec![lo(-3.0, 1.0, 2.0)]).is_ok());
    }

    #[test]
    fn series_examples() {
        let hp = HyperParams::new(vec![up(1.0, 1.0, 1.0)], vec![]).unwrap();
        assert_eq!(hyper_series(&hp, 0.0, ctl()).unwrap().value, 1.0);
        let v = hyper_series(&hp, 0.5, ctl()).unwrap();
        assert!(rel_err(2.0, v.value) < 1e-13);
        assert!(v.abs_err < 1e-12 && v.abs_err >= (v.value - 2.0).abs());
        let hp = HyperParams::new(
            vec![up(1.0, 1.0, 1.0), up(1.0, 1.0, 1.0)],
            vec![lo(2.0, 1.0, 1.0)],
        )
        .unwrap();
        let v = hyper_series(&hp, 0.5, ctl()).unwrap();
        assert!(rel_err(2.0 * LN_2, v.value) < 1e-13);
    }

    #[test]
    fn divergence_is_reported() {
        let hp = HyperParams::new(vec![up(1.0, 1.0, 1.0)], vec![]).unwrap();
        assert!(matches!(
            hyper_series(&hp, 1.0, ctl()),
            Err(Error::Divergent(_))
        ));
        let hp = HyperParams::new(vec![up(1.0, 1.0, 1.0); 3], vec![]).unwrap();
        assert!(matches!(
            hyper_series(&hp, 0.1, ctl()),
            Err(Error::Divergent(_))
        ));
        let tight = SeriesControl::new(1e-14, 5).unwrap();
        let hp = HyperParams::new(vec![up(1.0, 1.0, 1.0)], vec![]).unwrap();
        assert!(matches!(
            hyper_series(&hp, 0.9, tight),
            Err(Error::MaxTermsExceeded { terms: 5, .. })
        ));
    }

    #[test]
    fn terminating_series_is_a_polynomial() {
        // 2F0(-2, 1; ; x) = 1 - 2x + 2x², divergent as a formal series otherwise.
        let hp = HyperParams::new(vec![up(-4.0, 1.0, 2.0), up(1.0, 1.0, 1.0)], vec![]).unwrap();
        let v = hyper_series(&hp, 3.0, ctl()).unwrap();
        assert_eq!(v.value, 1.0 - 6.0 + 18.0);
        assert!(rel_err(13.0, hyper_direct(&hp, 3.0, 10).unwrap()) < 1e-14);
    }

    #[test]
    fn reduction_examples() {
        let hp = HyperParams::new(vec![up(2.0, 3.0, 1.0)], vec![lo(2.0, 1.0, 2.0)]).unwrap();
        let red = reduce_classical(&hp);
        assert_eq!(red.classical_upper, vec![2.0]);
        assert_eq!(red.classical_lower, vec![1.0]);
        assert_eq!(red.scale, 3.0);
        let pk = hyper_series(&hp, 0.4, ctl()).unwrap().value;
        let classical = classical_series(&[2.0], &[1.0], 1.2, ctl()).unwrap().value;
        assert!(rel_err(classical, pk) < 1e-13);

        let two = HyperParams::new(
            vec![up(1.0, 2.0, 1.0), up(1.0, 3.0, 1.0)],
            vec![lo(1.0, 1.0, 1.0)],
        )
        .unwrap();
        assert!(
            rel_err(
                classify(&two).radius.unwrap(),
                1.0 / reduce_classical(&two).scale
            ) < 1e-15
        );
    }

    #[test]
    fn coefficient_recurrence_holds() {
        let hp = HyperParams::new(
            vec![up(1.0, 1.0, 1.0), up(1.0, 1.0, 1.0)],
            vec![lo(2.0, 1.0, 1.0)],
        )
        .unwrap();
        for c in ode_coefficient_residuals(&hp, 50).unwrap() {
            assert!(c.residual <= 1e-15, "{c:?}");
        }
        let hp = HyperParams::new(
            vec![up(2.5, 3.5, 0.5), up(-0.7, 0.5, 2.0)],
            vec![lo(1.1, 2.0, 3.0)],
        )
        .unwrap();
        for c in ode_coefficient_residuals(&hp, 50).unwrap() {
            assert!(c.residual <= 1e-13, "{c:?}");
        }
    }

    #[test]
    fn ode_residual_examples() {
        let hp = HyperParams::new(vec![up(1.0, 1.0, 1.0)], vec![]).unwrap();
        let exact = ode_residual_of(&hp, 0.3, 1e-3, |y| Ok(1.0 / (1.0 - y))).unwrap();
        assert!(exact < 1e-6, "{exact}");
        let hp = HyperParams::new(
            vec![up(1.0, 1.0, 1.0), up(1.0, 1.0, 1.0)],
            vec![lo(2.0, 1.0, 1.0)],
        )
        .unwrap();
        let coarse = ode_residual(&hp, 0.25, 1e-3).unwrap();
        let fine = ode_residual(&hp, 0.25, 1e-4).unwrap();
        assert!(fine < coarse, "{fine} vs {coarse}");
        assert!(ode_residual(&hp, 0.6, 1e-3).is_err());
    }

    #[test]
    fn binomial_examples() {
        let b = pk_binomial(1.0, PkParams::new(1.0, 1.0).unwrap(), 0.5).unwrap();
        assert!(rel_err(2.0, b.series.value) < 1e-14);
        assert!(rel_err(2.0, b.closed) < 1e-15);
        let b = pk_binomial(3.0, PkParams::new(7.0, 2.0).unwrap(), 0.0).unwrap();
        assert_eq!((b.series.value, b.closed), (1.0, 1.0));
        let b = pk_binomial(2.0, PkParams::new(2.0, 1.0).unwrap(), 0.25).unwrap();
        assert!(rel_err(4.0, b.series.value) < 1e-13);
        assert!(pk_binomial(1.0, PkParams::new(2.0, 1.0).unwrap(), 0.5).is_err());
    }

    #[test]
    fn confluent_examples() {
        let q = QuadratureSpec::default();
        let hp = HyperParams::new(vec![up(1.0, 1.0, 1.0)], vec![lo(2.0, 1.0, 1.0)]).unwrap();
        let v = confluent_integral(&hp, 1.0, &q).unwrap();
        assert!(rel_err(std::f64::consts::E - 1.0, v.value) < 1e-10);
        assert!(rel_err(1.0, confluent_integral(&hp, 0.0, &q).unwrap().value) < 1e-12);
        // a/k = 1/2, b/s = 2: 1F1(1/2; 2; 1).
        let hp = HyperParams::new(vec![up(1.0, 1.0, 2.0)], vec![lo(4.0, 1.0, 2.0)]).unwrap();
        let v = confluent_integral(&hp, 1.0, &q).unwrap();
        assert!(rel_err(1.328_191_827_486_684_9, v.value) < 1e-10);
        let s = hyper_series(&hp, 1.0, ctl()).unwrap();
        assert!(rel_err(s.value, v.value) < 1e-10);

        let wrong = HyperParams::new(vec![up(3.0, 1.0, 1.0)], vec![lo(2.0, 1.0, 1.0)]).unwrap();
        assert!(matches!(
            confluent_integral(&wrong, 1.0, &q),
            Err(Error::Domain(_))
        ));
        let two = HyperParams::new(vec![up(1.0, 1.0, 1.0); 2], vec![lo(2.0, 1.0, 1.0)]).unwrap();
        assert!(matches!(
            confluent_integral(&two, 0.1, &q),
            Err(Error::UnsupportedShape(_))
        ));
    }
}
