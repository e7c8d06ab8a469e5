//! The p-k Pochhammer symbol `p(x)_{n,k} = ∏_{j<n} (xp/k + jp)`.
//!
//! Four independent routes are provided (direct product, elementary
//! symmetric expansion, reduction to the classical rising factorial, and a
//! ratio of p-k Gamma values), together with parameter derivatives,
//! rescalings and the two index recurrences.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::gamma_closed;
use crate::kernel::PkParams;
use crate::numeric::CompensatedSum;
use crate::record::{grid_point, IdentityRecord};

/// Argument, number of factors and deformation pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PochSpec {
    pub x: f64,
    pub n: u32,
    pub params: PkParams,
}

impl PochSpec {
    pub fn new(x: f64, n: u32, params: PkParams) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::domain(format!("x must be finite, got {x}")));
        }
        Ok(Self { x, n, params })
    }

    fn with_x(&self, x: f64) -> Self {
        Self { x, ..*self }
    }

    fn with_n(&self, n: u32) -> Self {
        Self { n, ..*self }
    }

    fn factor(&self, j: u32) -> f64 {
        let p = self.params.p();
        self.x * p / self.params.k() + f64::from(j) * p
    }
}

/// Direct product. `n = 0` gives the empty product 1. Overflows to `±inf`
/// for very large `n·|x|`; see [`poch_ln`].
pub fn poch_direct(spec: &PochSpec) -> f64 {
    (0..spec.n).map(|j| spec.factor(j)).product()
}

/// `(ln|value|, sign)` of the direct product, safe for any size.
pub fn poch_ln(spec: &PochSpec) -> (f64, f64) {
    let mut ln = CompensatedSum::new();
    let mut sign = 1.0;
    for j in 0..spec.n {
        let f = spec.factor(j);
        if f == 0.0 {
            return (f64::NEG_INFINITY, 1.0);
        }
        if f < 0.0 {
            sign = -sign;
        }
        ln.add(f.abs().ln());
    }
    (ln.value(), sign)
}

/// Whether the magnitude may exceed 1e300, in which case callers should
/// prefer [`poch_ln`].
pub fn needs_log_space(spec: &PochSpec) -> bool {
    let p = spec.params.p();
    let z = (spec.x / spec.params.k()).abs();
    let bound = f64::from(spec.n) * (p * (z + f64::from(spec.n))).ln();
    bound > 300.0 * std::f64::consts::LN_10
}

/// All elementary symmetric polynomials `e_0..=e_len` of `values`, built one
/// linear factor at a time (coefficients of `∏(λ + v_i)`).
pub fn elementary_symmetric_all(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for s in (1..=i + 1).rev() {
            e[s] += v * e[s - 1];
        }
    }
    e
}

/// `e_s(values)`.
pub fn elementary_symmetric(values: &[f64], s: usize) -> Result<f64> {
    if s > values.len() {
        return Err(Error::Index {
            s,
            len: values.len(),
        });
    }
    let mut e = vec![0.0; s + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for j in (1..=(i + 1).min(s)).rev() {
            e[j] += v * e[j - 1];
        }
    }
    Ok(e[s])
}

/// `Σ_{s<n} p^n e_s(1, …, n-1) (x/k)^(n-s)`. Requires `n >= 1`.
pub fn poch_symmetric(spec: &PochSpec) -> Result<f64> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::domain("symmetric expansion needs n >= 1"));
    }
    let nodes: Vec<f64> = (1..n).map(f64::from).collect();
    let e = elementary_symmetric_all(&nodes);
    let z = spec.x / spec.params.k();
    let sum: CompensatedSum = (0..n as usize)
        .map(|s| e[s] * z.powi((n as usize - s) as i32))
        .collect();
    Ok(spec.params.p().powi(n as i32) * sum.value())
}

/// `p^n (x/k)_n` with the classical rising factorial.
pub fn poch_reduce(spec: &PochSpec) -> f64 {
    let z = spec.x / spec.params.k();
    let rising: f64 = (0..spec.n).map(|j| z + f64::from(j)).product();
    spec.params.p().powi(spec.n as i32) * rising
}

/// Block form with `n` blocks of `q` factors:
/// `(pq)^(nq) ∏_{r=1}^{q} ((x/k + r - 1)/q)_n`, equal to `p(x)_{nq,k}`.
pub fn poch_generalized(spec: &PochSpec, q: u32) -> Result<f64> {
    if q == 0 {
        return Err(Error::domain("block size q must be at least 1"));
    }
    let z = spec.x / spec.params.k();
    let qf = f64::from(q);
    let blocks: f64 = (1..=q)
        .map(|r| {
            let start = (z + f64::from(r) - 1.0) / qf;
            (0..spec.n).map(|j| start + f64::from(j)).product::<f64>()
        })
        .product();
    Ok((spec.params.p() * qf).powi((spec.n * q) as i32) * blocks)
}

/// `pΓk(x + nk) / pΓk(x)` evaluated in log-space.
pub fn poch_gamma_ratio(spec: &PochSpec) -> Result<f64> {
    let k = spec.params.k();
    let top = gamma_closed(spec.params, spec.x + f64::from(spec.n) * k)?;
    let bottom = gamma_closed(spec.params, spec.x)?;
    Ok(top.sign * bottom.sign * (top.ln_value - bottom.ln_value).exp())
}

/// `∂/∂p p(x)_{n,k} = (n/p) p(x)_{n,k}`.
pub fn poch_dp(spec: &PochSpec) -> f64 {
    if spec.n == 0 {
        return 0.0;
    }
    f64::from(spec.n) / spec.params.p() * poch_direct(spec)
}

fn check_dk_domain(spec: &PochSpec) -> Result<()> {
    let k = spec.params.k();
    if let Some(s) = (0..spec.n).find(|&s| spec.x + f64::from(s) * k == 0.0) {
        return Err(Error::domain(format!("factor x + {s}k vanishes")));
    }
    Ok(())
}

/// `∂/∂k p(x)_{n,k} = p(x)_{n,k} [-n/k + Σ_{s=1}^{n-1} s/(x + sk)]`.
pub fn poch_dk(spec: &PochSpec) -> Result<f64> {
    check_dk_domain(spec)?;
    let k = spec.params.k();
    let mut log_deriv = CompensatedSum::new();
    log_deriv.add(-f64::from(spec.n) / k);
    for s in 1..spec.n {
        let sf = f64::from(s);
        log_deriv.add(sf / (spec.x + sf * k));
    }
    Ok(poch_direct(spec) * log_deriv.value())
}

/// Product form of the k-derivative:
/// `(p/k) Σ s p(x)_{s,k} p(x+(s+1)k)_{n-1-s,k} - (n/k) p(x)_{n,k}`.
pub fn poch_dk_product(spec: &PochSpec) -> Result<f64> {
    check_dk_domain(spec)?;
    let (p, k) = (spec.params.p(), spec.params.k());
    let mut acc = CompensatedSum::new();
    for s in 1..spec.n {
        let head = poch_direct(&spec.with_n(s));
        let tail = poch_direct(
            &spec
                .with_x(spec.x + f64::from(s + 1) * k)
                .with_n(spec.n - 1 - s),
        );
        acc.add(f64::from(s) * head * tail);
    }
    Ok(p / k * acc.value() - f64::from(spec.n) / k * poch_direct(spec))
}

/// The k-derivative as originally printed, with the full symbol `p(x)_{n,k}`
/// inside the sum in place of `p(x)_{s,k}`. Not a derivative in general.
pub fn poch_dk_printed(spec: &PochSpec) -> f64 {
    let (p, k) = (spec.params.p(), spec.params.k());
    let full = poch_direct(spec);
    let mut acc = CompensatedSum::new();
    for s in 1..spec.n {
        let tail = poch_direct(
            &spec
                .with_x(spec.x + f64::from(s + 1) * k)
                .with_n(spec.n - 1 - s),
        );
        acc.add(f64::from(s) * full * tail);
    }
    -f64::from(spec.n) / k * full + p / k * acc.value()
}

/// Which rescaling identity to evaluate, with `s` the replacement scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RescaleMode {
    /// `p(x)_{n,s} = p(kx/s)_{n,k}`
    StepToOrder,
    /// `p(x)_{n,s} = (p/s)^n s(kx/s)_{n,k}`
    StepAndScale,
    /// `p(x)_{n,k} = (p/s)^n s(x)_{n,k}`
    Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescalePair {
    /// Direct evaluation of the left side.
    pub lhs: f64,
    /// The rescaled evaluation.
    pub rhs: f64,
}

/// Evaluates both sides of a rescaling identity.
pub fn poch_rescale(spec: &PochSpec, s_new: f64, mode: RescaleMode) -> Result<RescalePair> {
    let (p, k) = (spec.params.p(), spec.params.k());
    let n = spec.n;
    let at = |x: f64, p: f64, k: f64| -> Result<f64> {
        Ok(poch_direct(&PochSpec::new(x, n, PkParams::new(p, k)?)?))
    };
    let ratio = (p / s_new).powi(n as i32);
    let pair = match mode {
        RescaleMode::StepToOrder => RescalePair {
            lhs: at(spec.x, p, s_new)?,
            rhs: at(k * spec.x / s_new, p, k)?,
        },
        RescaleMode::StepAndScale => RescalePair {
            lhs: at(spec.x, p, s_new)?,
            rhs: ratio * at(k * spec.x / s_new, s_new, k)?,
        },
        RescaleMode::Scale => RescalePair {
            lhs: at(spec.x, p, k)?,
            rhs: ratio * at(spec.x, s_new, k)?,
        },
    };
    Ok(pair)
}

/// The two index recurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PochRecurrence {
    /// `n p p(x)_{n-1,k} = p(x)_{n,k} - p(x-k)_{n,k}`; printed without the `p`.
    Difference,
    /// `p(x)_{n+j,k} = p(x)_{j,k} p(x+jk)_{n,k}`.
    Split,
}

impl PochRecurrence {
    pub fn id(self) -> &'static str {
        match self {
            PochRecurrence::Difference => "2.33",
            PochRecurrence::Split => "2.34",
        }
    }
}

/// Checks one recurrence at `spec` (and split index `j` for [`PochRecurrence::Split`]).
pub fn check_poch_recurrence(
    id: PochRecurrence,
    spec: &PochSpec,
    j: u32,
    tol: f64,
) -> IdentityRecord {
    let (p, k) = (spec.params.p(), spec.params.k());
    let n = spec.n;
    match id {
        PochRecurrence::Difference => {
            let point = grid_point([("p", p), ("k", k), ("x", spec.x), ("n", f64::from(n))]);
            if n == 0 {
                return IdentityRecord::skipped(id.id(), point, "needs n >= 1");
            }
            let lhs = poch_direct(spec) - poch_direct(&spec.with_x(spec.x - k));
            let lower = poch_direct(&spec.with_n(n - 1));
            let corrected = f64::from(n) * p * lower;
            let printed = f64::from(n) * lower;
            IdentityRecord::evaluated(id.id(), point, lhs, printed, corrected, tol)
        }
        PochRecurrence::Split => {
            let point = grid_point([
                ("p", p),
                ("k", k),
                ("x", spec.x),
                ("n", f64::from(n)),
                ("j", f64::from(j)),
            ]);
            let lhs = poch_direct(&spec.with_n(n + j));
            let rhs =
                poch_direct(&spec.with_n(j)) * poch_direct(&spec.with_x(spec.x + f64::from(j) * k));
            IdentityRecord::consistent(id.id(), point, lhs, rhs, tol)
        }
    }
}
