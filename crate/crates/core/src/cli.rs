//! Command-line front end: `eval`, `audit` and `table`.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain or pole error, 3 I/O
//! error, 4 audit finished but some corrected form failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::audit::{run_audit, AuditGrid, AuditReport, Suite, Tolerances};
use crate::beta::{beta_closed, beta_integral, BetaArgs, BetaForm};
use crate::error::Error;
use crate::gamma::{
    gamma_euler_product, gamma_gauss_recip, gamma_integral, gamma_limit, gamma_value,
    gamma_weierstrass_recip, GammaEval,
};
use crate::hyper::{
    confluent_integral, hyper_direct, hyper_series, HyperParams, LowerParam, SeriesControl,
    UpperParam,
};
use crate::kernel::PkParams;
use crate::numeric::format_g17;
use crate::pochhammer::{
    poch_direct, poch_gamma_ratio, poch_generalized, poch_symmetric, PochSpec,
};
use crate::psi::{k_zeta, polygamma, psi, psi_series, PsiSeriesForm};
use crate::quadrature::QuadratureSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_AUDIT_FAILED: i32 = 4;

/// Most rows `table` will emit.
pub const MAX_TABLE_ROWS: u64 = 1_000_000;

const LIMIT_TERMS: u64 = 100_000;
const SERIES_TERMS: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(
    name = "pkgamma",
    version,
    about = "p-k Gamma, Beta, Psi and hypergeometric functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one function at one point.
    #[command(allow_negative_numbers = true)]
    Eval {
        function: Function,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "text")]
        format: EvalFormat,
    },
    /// Check every identity of a suite over a parameter grid.
    Audit {
        suite: String,
        /// `default` or `p=..;k=..;x=..;n=..;m=..` (values or a:b:step ranges).
        #[arg(long, default_value = "default")]
        grid: String,
        /// Where to write the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `text` prints a summary; `json` prints the full report.
        #[arg(long, default_value = "text")]
        format: EvalFormat,
        /// One tolerance for every identity instead of the built-in table.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sweep `x` over `a:b:step` and emit `x,value,abs_err` rows.
    #[command(allow_negative_numbers = true)]
    Table {
        function: Function,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "csv")]
        format: TableFormat,
    },
}

#[derive(Args, Debug, Clone)]
struct Inputs {
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Argument; a sweep `a:b:step` for `table`.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<f64>,
    /// Pochhammer length.
    #[arg(long)]
    n: Option<u32>,
    /// Polygamma order.
    #[arg(long)]
    r: Option<u32>,
    /// Pochhammer multiplicity for the generalized symbol.
    #[arg(long)]
    q: Option<u32>,
    /// Upper hypergeometric parameters: `a` or `a:p:k`, comma-separated.
    #[arg(long)]
    a: Option<String>,
    /// Lower hypergeometric parameters: `b` or `b:t:s`, comma-separated.
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    method: Option<String>,
    /// Beta integral form or Psi series form.
    #[arg(long)]
    form: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Function {
    Gamma,
    Beta,
    Psi,
    Poch,
    Hyper,
    Polygamma,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EvalFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TableFormat {
    Csv,
    Json,
}

/// A single evaluated value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    pub abs_err: f64,
    pub method: String,
}

enum Failure {
    Usage(String),
    Eval(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(msg) => Failure::Usage(msg),
            other => Failure::Eval(other),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn finite(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be a finite number, got {v}")))
    }
}

fn parse_number(name: &str, s: &str) -> Result<f64, Failure> {
    let v = s
        .trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("--{name}: cannot parse {s:?} as a number")))?;
    finite(name, v)
}

fn from_gamma(g: GammaEval, reciprocal: bool) -> Evaluation {
    let (ln, sign) = if reciprocal {
        (-g.ln_value, g.sign)
    } else {
        (g.ln_value, g.sign)
    };
    let value = sign * ln.exp();
    Evaluation {
        value,
        abs_err: value.abs() * g.abs_err_ln,
        method: g.method.to_string(),
    }
}

/// Parses `v` or `v:u:w` entries, filling missing scales with `default`.
fn parse_triples(
    name: &str,
    raw: &str,
    default: (f64, f64),
) -> Result<Vec<(f64, f64, f64)>, Failure> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(':').collect();
            match parts.as_slice() {
                [v] => Ok((parse_number(name, v)?, default.0, default.1)),
                [v, u, w] => Ok((
                    parse_number(name, v)?,
                    parse_number(name, u)?,
                    parse_number(name, w)?,
                )),
                _ => Err(usage(format!(
                    "--{name}: expected a single value or value:p:k, got {item:?}"
                ))),
            }
        })
        .collect()
}

impl Inputs {
    fn params(&self) -> Result<PkParams, Failure> {
        Ok(PkParams::new(finite("p", self.p)?, finite("k", self.k)?)?)
    }

    fn require_x(&self) -> Result<f64, Failure> {
        let raw = self.x.as_deref().ok_or_else(|| usage("--x is required"))?;
        parse_number("x", raw)
    }

    fn method(&self, allowed: &[&str], default: &str) -> Result<String, Failure> {
        let m = self.method.clone().unwrap_or_else(|| default.to_string());
        if allowed.contains(&m.as_str()) {
            Ok(m)
        } else {
            Err(usage(format!(
                "--method {m:?} is not one of {}",
                allowed.join(", ")
            )))
        }
    }

    fn hyper_params(&self) -> Result<HyperParams, Failure> {
        let upper = match &self.a {
            Some(raw) => parse_triples("a", raw, (self.p, self.k))?,
            None => Vec::new(),
        };
        let lower = match &self.b {
            Some(raw) => parse_triples("b", raw, (self.p, self.k))?,
            None => Vec::new(),
        };
        Ok(HyperParams::new(
            upper
                .into_iter()
                .map(|(a, p, k)| UpperParam::new(a, p, k))
                .collect(),
            lower
                .into_iter()
                .map(|(b, t, s)| LowerParam::new(b, t, s))
                .collect(),
        )?)
    }

    /// The function at argument `x`, other inputs held fixed.
    fn evaluate(&self, function: Function, x: f64) -> Result<Evaluation, Failure> {
        let params = self.params()?;
        let quad = QuadratureSpec::default();
        let eval = |value: f64, abs_err: f64, method: &str| Evaluation {
            value,
            abs_err,
            method: method.to_string(),
        };
        Ok(match function {
            Function::Gamma => {
                let m = self.method(
                    &[
                        "closed",
                        "limit",
                        "integral",
                        "euler_product",
                        "weierstrass",
                        "gauss",
                    ],
                    "closed",
                )?;
                match m.as_str() {
                    "closed" => {
                        let r = gamma_value(params, x)?;
                        eval(r.value, r.abs_err, "closed")
                    }
                    "limit" => from_gamma(gamma_limit(params, x, LIMIT_TERMS, true)?, false),
                    "integral" => from_gamma(gamma_integral(params, x, 1.0, &quad)?, false),
                    "euler_product" => {
                        from_gamma(gamma_euler_product(params, x, LIMIT_TERMS)?, false)
                    }
                    "weierstrass" => {
                        from_gamma(gamma_weierstrass_recip(params, x, LIMIT_TERMS)?, true)
                    }
                    _ => from_gamma(gamma_gauss_recip(params, x, LIMIT_TERMS, true)?, true),
                }
            }
            Function::Beta => {
                let y = finite(
                    "y",
                    self.y.ok_or_else(|| usage("--y is required for beta"))?,
                )?;
                let args = BetaArgs::new(x, y, params)?;
                let m = self.method(&["closed", "integral"], "closed")?;
                let r = if m == "closed" {
                    beta_closed(&args)?
                } else {
                    let form: BetaForm = self.form.as_deref().unwrap_or("unit").parse()?;
                    beta_integral(&args, form, &quad)?
                };
                eval(r.value, r.abs_err, &r.method.to_string())
            }
            Function::Psi => {
                let m = self.method(&["closed", "series"], "closed")?;
                if m == "closed" {
                    let r = psi(params, x)?;
                    eval(r.value, r.abs_err, "closed")
                } else {
                    let form: PsiSeriesForm = self.form.as_deref().unwrap_or("harmonic").parse()?;
                    let r = psi_series(params, x, form, SERIES_TERMS)?;
                    eval(r.value, r.abs_err, "series")
                }
            }
            Function::Polygamma => {
                let r = self
                    .r
                    .ok_or_else(|| usage("--r is required for polygamma"))?;
                let m = self.method(&["closed", "kzeta"], "closed")?;
                if m == "closed" || r < 2 {
                    let v = if r == 0 {
                        return Err(usage("--r must be at least 1"));
                    } else if r == 1 {
                        psi(params, x)?
                    } else {
                        polygamma(params, x, r)?
                    };
                    eval(v.value, v.abs_err, "closed")
                } else {
                    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                    let fact: f64 = (2..r).map(f64::from).product();
                    let z = k_zeta(x, r, params.k(), 1_000)?;
                    eval(sign * fact * z.value, fact * z.abs_err, "series")
                }
            }
            Function::Poch => {
                let n = self.n.ok_or_else(|| usage("--n is required for poch"))?;
                let spec = PochSpec::new(x, n, params)?;
                let m = self.method(
                    &["direct", "symmetric", "gamma_ratio", "generalized"],
                    "direct",
                )?;
                let v = match m.as_str() {
                    "direct" => poch_direct(&spec),
                    "symmetric" => poch_symmetric(&spec)?,
                    "gamma_ratio" => poch_gamma_ratio(&spec)?,
                    _ => poch_generalized(&spec, self.q.unwrap_or(1))?,
                };
                let terms = f64::from(n.max(1) * self.q.unwrap_or(1));
                eval(v, 2.0 * terms * f64::EPSILON * v.abs(), &m)
            }
            Function::Hyper => {
                let hp = self.hyper_params()?;
                let m = self.method(&["series", "direct", "integral"], "series")?;
                match m.as_str() {
                    "series" => {
                        let r = hyper_series(&hp, x, SeriesControl::default())?;
                        eval(r.value, r.abs_err, "series")
                    }
                    "direct" => {
                        let v = hyper_direct(&hp, x, 100_000)?;
                        eval(v, f64::NAN, "direct")
                    }
                    _ => {
                        let r = confluent_integral(&hp, x, &quad)?;
                        eval(r.value, r.abs_err, "integral")
                    }
                }
            }
        })
    }

    fn echo(&self, function: Function) -> serde_json::Value {
        let mut v = json!({
            "function": format!("{function:?}").to_lowercase(),
            "p": self.p,
            "k": self.k,
        });
        let obj = v.as_object_mut().expect("object literal");
        if let Some(x) = &self.x {
            obj.insert("x".into(), json!(x.trim().parse::<f64>().ok()));
        }
        for (key, val) in [("y", self.y)] {
            if let Some(val) = val {
                obj.insert(key.into(), json!(val));
            }
        }
        for (key, val) in [("n", self.n), ("r", self.r), ("q", self.q)] {
            if let Some(val) = val {
                obj.insert(key.into(), json!(val));
            }
        }
        for (key, val) in [
            ("a", &self.a),
            ("b", &self.b),
            ("method", &self.method),
            ("form", &self.form),
        ] {
            if let Some(val) = val {
                obj.insert(key.into(), json!(val));
            }
        }
        v
    }
}

/// Sweep points for `a:b:step`; `b` is included when it lies on the grid.
fn parse_sweep(raw: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = raw.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(usage(format!(
            "--x must be a sweep a:b:step for table, got {raw:?}"
        )));
    };
    let (a, b, step) = (
        parse_number("x", a)?,
        parse_number("x", b)?,
        parse_number("x", step)?,
    );
    if step.is_nan() || step <= 0.0 {
        return Err(usage("sweep step must be positive"));
    }
    if a.is_nan() || b.is_nan() || b <= a {
        return Err(usage(format!("sweep range {a}:{b} is empty")));
    }
    let intervals = ((b - a) / step * (1.0 + 1e-12)).floor();
    if intervals + 1.0 > MAX_TABLE_ROWS as f64 {
        return Err(usage(format!(
            "sweep has {} rows, more than the limit of {MAX_TABLE_ROWS}",
            intervals + 1.0
        )));
    }
    Ok((0..=intervals as u64)
        .map(|i| a + i as f64 * step)
        .collect())
}

/// Shortest round-trip rendering, switching to exponent form for very
/// large or small magnitudes.
fn shortest(v: f64) -> String {
    let a = v.abs();
    if v.is_finite() && a != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn cmd_eval(
    function: Function,
    inputs: &Inputs,
    format: EvalFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let x = inputs.require_x()?;
    let r = inputs.evaluate(function, x)?;
    match format {
        EvalFormat::Text => writeln!(
            out,
            "value: {}\nabs_err: {}\nmethod: {}",
            shortest(r.value),
            shortest(r.abs_err),
            r.method
        ),
        EvalFormat::Json => {
            let body = json!({
                "value": r.value,
                "abs_err": if r.abs_err.is_finite() { json!(r.abs_err) } else { json!(null) },
                "method": r.method,
                "inputs": inputs.echo(function),
            });
            writeln!(out, "{body}")
        }
    }
    .map_err(io_err)
}

fn cmd_table(
    function: Function,
    inputs: &Inputs,
    format: TableFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let raw = inputs
        .x
        .as_deref()
        .ok_or_else(|| usage("--x sweep is required"))?;
    let xs = parse_sweep(raw)?;
    // Validate fixed inputs once so usage errors are not turned into rows.
    inputs.params()?;
    let mut rows = Vec::with_capacity(xs.len());
    for x in xs {
        match inputs.evaluate(function, x) {
            Ok(r) => rows.push((x, Some(r))),
            Err(Failure::Eval(_)) => rows.push((x, None)),
            Err(other) => return Err(other),
        }
    }
    let mut w = std::io::BufWriter::new(out);
    match format {
        TableFormat::Csv => {
            writeln!(w, "x,value,abs_err").map_err(io_err)?;
            for (x, r) in &rows {
                let (v, e) = r
                    .as_ref()
                    .map_or((f64::NAN, f64::NAN), |r| (r.value, r.abs_err));
                writeln!(w, "{},{},{}", format_g17(*x), format_g17(v), format_g17(e))
                    .map_err(io_err)?;
            }
        }
        TableFormat::Json => {
            let finite_or_null = |v: f64| if v.is_finite() { json!(v) } else { json!(null) };
            let body: Vec<_> = rows
                .iter()
                .map(|(x, r)| {
                    json!({
                        "x": x,
                        "value": r.as_ref().map_or(json!(null), |r| finite_or_null(r.value)),
                        "abs_err": r.as_ref().map_or(json!(null), |r| finite_or_null(r.abs_err)),
                    })
                })
                .collect();
            writeln!(w, "{}", serde_json::Value::Array(body)).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// Canonical JSON body of a report. Byte-identical for identical inputs.
pub fn report_json(report: &AuditReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn write_summary(report: &AuditReport, out: &mut dyn Write) -> std::io::Result<()> {
    let pct = |r: Option<f64>| r.map_or("-".to_string(), |r| format!("{:.1}%", 100.0 * r));
    let sci = |r: Option<f64>| r.map_or("-".to_string(), |r| format!("{r:.2e}"));
    writeln!(
        out,
        "{:<16} {:>6} {:>6} {:>10} {:>10} {:>10} {:>10}  verdict",
        "identity", "count", "skip", "printed", "corrected", "max_err_p", "max_err_c"
    )?;
    for s in &report.summary.identities {
        writeln!(
            out,
            "{:<16} {:>6} {:>6} {:>10} {:>10} {:>10} {:>10}  {}",
            s.identity_id,
            s.count,
            s.skipped,
            pct(s.pass_rate_printed),
            pct(s.pass_rate_corrected),
            sci(s.max_rel_err_printed),
            sci(s.max_rel_err_corrected),
            s.verdict
        )?;
    }
    writeln!(
        out,
        "{} records, {} evaluated, {} skipped; corrected forms {}",
        report.summary.total_records,
        report.summary.evaluated,
        report.summary.skipped,
        if report.summary.all_corrected_pass {
            "all pass"
        } else {
            "FAIL"
        }
    )
}

fn cmd_audit(
    suite: &str,
    grid: &str,
    out_path: Option<&PathBuf>,
    format: EvalFormat,
    tol: Option<f64>,
    out: &mut dyn Write,
) -> Result<bool, Failure> {
    let suite: Suite = suite.parse()?;
    let grid = AuditGrid::parse(grid)?;
    let tolerances = match tol {
        Some(t) => Tolerances::uniform(t)?,
        None => Tolerances::default(),
    };
    let report = run_audit(suite, &grid, &tolerances)?;
    let body = report_json(&report);
    if let Some(path) = out_path {
        fs::write(path, &body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    match format {
        EvalFormat::Text => write_summary(&report, out),
        EvalFormat::Json => out.write_all(body.as_bytes()),
    }
    .map_err(io_err)?;
    Ok(report.summary.all_corrected_pass)
}

fn report_failure(f: &Failure, json_mode: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (code, kind, reason) = match f {
        Failure::Usage(msg) => (EXIT_USAGE, "usage", msg.clone()),
        Failure::Eval(e) => (EXIT_DOMAIN, e.kind(), e.to_string()),
        Failure::Io(msg) => (EXIT_IO, "io", msg.clone()),
    };
    // Diagnostics are best effort: a broken stream cannot be reported anyway.
    if json_mode {
        let _ = writeln!(out, "{}", json!({ "error": kind, "reason": reason }));
    }
    let _ = writeln!(err, "error: {reason}");
    code
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let (result, json_mode) = match &cli.command {
        Command::Eval {
            function,
            inputs,
            format,
        } => (
            cmd_eval(*function, inputs, *format, out).map(|_| true),
            *format == EvalFormat::Json,
        ),
        Command::Table {
            function,
            inputs,
            format,
        } => (
            cmd_table(*function, inputs, *format, out).map(|_| true),
            false,
        ),
        Command::Audit {
            suite,
            grid,
            out: path,
            format,
            tol,
        } => (
            cmd_audit(suite, grid, path.as_ref(), *format, *tol, out),
            *format == EvalFormat::Json,
        ),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_AUDIT_FAILED,
        Err(f) => report_failure(&f, json_mode, out, err),
    }
}
