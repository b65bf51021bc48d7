use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use sideinfo::ExtReal;

use crate::error::Result;

pub const HEADER: &str = "experiment,n,M,R,k,metric,value,seed,runtime_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    EA,
    EB,
    EBk,
    Miss,
    RhoHi,
    RhoLo,
    EpsPred,
    ExponentEst,
    RnA,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::EA => "e_A",
            Metric::EB => "e_B",
            Metric::EBk => "e_B_k",
            Metric::Miss => "miss",
            Metric::RhoHi => "rho_hi",
            Metric::RhoLo => "rho_lo",
            Metric::EpsPred => "eps_pred",
            Metric::ExponentEst => "exponent_est",
            Metric::RnA => "R_n_a",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub n: usize,
    pub m: usize,
    pub r: f64,
    pub k: usize,
    pub metric: Metric,
    pub value: ExtReal,
    pub seed: u64,
    pub runtime_ms: u64,
}

/// `%.12g`: twelve significant digits, trailing zeros dropped, scientific
/// notation outside `[1e-5, 1e12)`.
pub fn format_real(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "+inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn format_value(v: ExtReal) -> String {
    format_real(v.value())
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_csv(rows: &[ResultRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            escape(&row.experiment),
            row.n,
            row.m,
            format_real(row.r),
            row.k,
            row.metric.as_str(),
            format_value(row.value),
            row.seed,
            row.runtime_ms
        )?;
    }
    out.flush()
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Writes the report to `path`.
pub fn emit_report(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_csv(rows, BufWriter::new(file))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(value: f64) -> ResultRow {
        ResultRow {
            experiment: "optimal".into(),
            n: 1,
            m: 2,
            r: 1.0,
            k: 0,
            metric: Metric::EA,
            value: ExtReal::finite(value),
            seed: 0,
            runtime_ms: 0,
        }
    }

    #[test]
    fn formats_like_printf_g() {
        assert_eq!(format_real(0.15), "0.15");
        assert_eq!(format_real(0.1 + 0.05), "0.15");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(0.736965594166), "0.736965594166");
        assert_eq!(format_real(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_real(1234567.0), "1234567");
        assert_eq!(format_real(1e-7), "1e-07");
        assert_eq!(format_real(1.5e15), "1.5e+15");
        assert_eq!(format_real(-0.25), "-0.25");
        assert_eq!(format_real(f64::INFINITY), "+inf");
        assert_eq!(format_real(0.0001), "0.0001");
        assert_eq!(format_real(999999999999.5), "1e+12");
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(to_csv_string(&[]), format!("{HEADER}\n"));
    }

    #[test]
    fn one_row_two_lines() {
        let s = to_csv_string(&[row(0.15)]);
        assert_eq!(s, format!("{HEADER}\noptimal,1,2,1,0,e_A,0.15,0,0\n"));
    }

    #[test]
    fn infinity_spelled_plus_inf() {
        let mut r = row(0.0);
        r.value = ExtReal::INFINITY;
        assert!(to_csv_string(&[r]).contains(",+inf,"));
    }

    #[test]
    fn values_round_trip_at_twelve_digits() {
        for x in [0.123456789012345, 3.0e-9, 7.77e20, 0.5, 1.0 / 3.0] {
            let s = format_real(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(format_real(back), s);
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }
}
