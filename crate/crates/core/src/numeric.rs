//! Small floating-point helpers shared across modules.

use std::f64::consts::PI;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Reduces `x` to `r` in `[-1, 1]` with `x = r + 2m`. Exact for |x| < 2^52.
fn reduce_half_period(x: f64) -> f64 {
    x - 2.0 * (0.5 * x).round()
}

/// `sin(pi * x)` with exact argument reduction, so integers give exact zeros.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = reduce_half_period(x);
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

/// `cos(pi * x)` with exact argument reduction.
pub fn cos_pi(x: f64) -> f64 {
    let r = reduce_half_period(x).abs();
    if r > 0.5 {
        -(PI * (r - 0.5)).sin()
    } else {
        (PI * (0.5 - r)).sin()
    }
}

/// Relative deviation of `other` from the reference `reference`.
///
/// Falls back to the absolute deviation when the reference is zero.
pub fn rel_err(reference: f64, other: f64) -> f64 {
    let diff = (reference - other).abs();
    if reference == other {
        0.0
    } else if reference == 0.0 {
        diff
    } else {
        diff / reference.abs()
    }
}

/// Second-order central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Relative steps used by the finite-difference oracles.
pub const FD_STEPS: [f64; 5] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];

/// Central difference over the step sweep `FD_STEPS` (scaled by `max(|x|, 1)`),
/// returning the estimate closest to `target`.
pub fn best_central_difference<F: Fn(f64) -> f64>(f: F, x: f64, target: f64) -> f64 {
    let scale = x.abs().max(1.0);
    FD_STEPS
        .iter()
        .map(|h| central_difference(&f, x, h * scale))
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .expect("step sweep is non-empty")
}

/// Ridders' extrapolated central difference starting from step `h0`.
///
/// Returns `(derivative, error estimate)`. `f` must be smooth on
/// `[x - h0, x + h0]`.
pub fn ridders_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64) -> (f64, f64) {
    const SHRINK: f64 = 1.4;
    const SHRINK2: f64 = SHRINK * SHRINK;
    const LEVELS: usize = 10;
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    let mut h = h0;
    table[0][0] = central_difference(&f, x, h);
    let mut best = (table[0][0], f64::INFINITY);
    for i in 1..LEVELS {
        h /= SHRINK;
        table[0][i] = central_difference(&f, x, h);
        let mut fac = SHRINK2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= SHRINK2;
            let err = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if err <= best.1 {
                best = (table[j][i], err);
            }
        }
        // Stop once higher order makes things worse.
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * best.1 {
            break;
        }
    }
    best
}

/// Renders `v` like C's `%.17g`.
pub fn format_g17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    const PREC: i32 = 17;
    let sci = format!("{:.*e}", (PREC - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PREC).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PREC - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_pi_is_exact_at_integers() {
        for n in -20..=20 {
            assert_eq!(sin_pi(n as f64), 0.0);
        }
        assert_eq!(sin_pi(0.5), 1.0);
        assert_eq!(sin_pi(-0.5), -1.0);
        assert!((sin_pi(1.0 / 6.0) - 0.5).abs() < 1e-16);
        assert!((sin_pi(-2.7) - (PI * -2.7).sin()).abs() < 1e-14);
    }

    #[test]
    fn cos_pi_matches_std() {
        for i in -40..=40 {
            let x = i as f64 * 0.137;
            assert!((cos_pi(x) - (PI * x).cos()).abs() < 1e-14, "x = {x}");
        }
        assert_eq!(cos_pi(0.5), 0.0);
        assert_eq!(cos_pi(1.0), -1.0);
        assert_eq!(cos_pi(2.0), 1.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e-16, 1e-16, -1.0].into_iter().collect();
        assert_eq!(s.value(), 2e-16);
    }

    #[test]
    fn ridders_is_accurate() {
        let (d, err) = ridders_derivative(f64::exp, 1.0, 0.1);
        assert!((d - std::f64::consts::E).abs() < 1e-12, "{d}");
        assert!(err < 1e-10);
        let (d, _) = ridders_derivative(|x| x.ln(), 0.3, 0.05);
        assert!((d - 1.0 / 0.3).abs() < 1e-10);
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(24.0), "24");
        assert_eq!(format_g17(-0.5772156649015329), "-0.57721566490153287");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(format_g17(0.0), "0");
    }
}
