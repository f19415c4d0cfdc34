//! Result rows, CSV output and the human-readable report.

use std::io::Write;

use crate::error::CliError;

pub const CSV_HEADER: [&str; 7] = [
    "name",
    "value",
    "expected",
    "tolerance",
    "residual",
    "status",
    "seconds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// No expectation attached; never affects the exit code.
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

/// One computed quantity. The status is derived, never stored, so it can
/// always be recomputed from the CSV columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub value: f64,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub seconds: f64,
}

impl Row {
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: None,
            tolerance: None,
            seconds: 0.0,
        }
    }

    pub fn expect(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: Some(expected),
            tolerance: Some(tolerance),
            seconds: 0.0,
        }
    }

    /// A residual-valued check: the value itself must be at most `tolerance`.
    pub fn check(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::expect(name, residual, 0.0, tolerance)
    }

    pub fn residual(&self) -> Option<f64> {
        self.expected.map(|e| (self.value - e).abs())
    }

    /// PASS iff `|value − expected| ≤ tolerance`; NaN fails.
    pub fn status(&self) -> Status {
        match (self.residual(), self.tolerance) {
            (Some(r), Some(t)) if r <= t => Status::Pass,
            (Some(_), Some(_)) => Status::Fail,
            _ => Status::Info,
        }
    }
}

/// C's `%.17g`: 17 significant digits, trailing zeros removed, exponent
/// form outside `1e-4 ≤ |x| < 1e17`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Input(format!("writing CSV: {e}"));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.name.clone(),
            g17(r.value),
            opt(r.expected),
            opt(r.tolerance),
            opt(r.residual()),
            r.status().as_str().to_string(),
            g17(r.seconds),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Input(format!("writing CSV: {e}")))
}

/// Short human form: ten significant figures for moderate magnitudes,
/// exponent form otherwise.
fn human(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if (1e-3..1e7).contains(&a) {
        format!("{x:.9}")
    } else {
        format!("{x:.3e}")
    }
}

/// Tolerances in exponent form with at most four significant figures.
fn short_e(t: f64) -> String {
    let s = format!("{t:.3e}");
    match s.split_once('e') {
        Some((m, e)) => format!("{}e{e}", trim_zeros(m)),
        None => s,
    }
}

/// `length = 6.283185307 (expected 6.283185307, residual < 1e-8, PASS)`
pub fn report_line(r: &Row) -> String {
    let mut line = format!("{} = {}", r.name, human(r.value));
    if let (Some(e), Some(t), Some(res)) = (r.expected, r.tolerance, r.residual()) {
        let cmp = match r.status() {
            Status::Pass => format!("residual < {}", short_e(t)),
            _ => format!("residual = {} > {}", human(res), short_e(t)),
        };
        line.push_str(&format!(
            " (expected {}, {cmp}, {})",
            human(e),
            r.status().as_str()
        ));
    }
    line
}

pub fn report_text(header: &[String], rows: &[Row]) -> String {
    let mut out = String::new();
    for h in header {
        out.push_str("# ");
        out.push_str(h);
        out.push('\n');
    }
    for r in rows {
        out.push_str(&report_line(r));
        out.push('\n');
    }
    let failed = rows.iter().filter(|r| r.status() == Status::Fail).count();
    let checked = rows.iter().filter(|r| r.status() != Status::Info).count();
    out.push_str(&format!(
        "# {}/{} checks passed\n",
        checked - failed,
        checked
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_c() {
        assert_eq!(g17(std::f64::consts::PI * 2.0), "6.2831853071795862");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(1e-8), "1e-08");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(0.0001234), "0.00012339999999999999");
        assert_eq!(g17(1e16), "10000000000000000");
        assert_eq!(g17(1.5e-300), "1.5000000000000001e-300");
        assert_eq!(g17(1e17), "1e+17");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(f64::NAN), "nan");
    }

    #[test]
    fn report_line_format() {
        let r = Row::expect(
            "length",
            2.0 * std::f64::consts::PI,
            2.0 * std::f64::consts::PI,
            1e-8,
        );
        assert_eq!(
            report_line(&r),
            "length = 6.283185307 (expected 6.283185307, residual < 1e-8, PASS)"
        );
        let r = Row::check("homogeneity", 0.75, 1e-11);
        assert_eq!(
            report_line(&r),
            "homogeneity = 0.750000000 (expected 0, residual = 0.750000000 > 1e-11, FAIL)"
        );
    }

    #[test]
    fn tolerances_print_short() {
        assert_eq!(short_e(1e-8), "1e-8");
        assert_eq!(short_e(6.283185307179587e-10), "6.283e-10");
    }

    #[test]
    fn status_follows_columns() {
        assert_eq!(Row::check("a", 1e-12, 1e-11).status(), Status::Pass);
        assert_eq!(Row::check("a", f64::NAN, 1e-11).status(), Status::Fail);
        assert_eq!(Row::info("a", 3.0).status(), Status::Info);
    }

    #[test]
    fn csv_uses_lf_and_full_precision() {
        let mut buf = Vec::new();
        write_csv(&[Row::expect("length", 0.1, 0.1, 1e-8)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "name,value,expected,tolerance,residual,status,seconds\n\
             length,0.10000000000000001,0.10000000000000001,1e-08,0,PASS,0\n"
        );
    }
}
