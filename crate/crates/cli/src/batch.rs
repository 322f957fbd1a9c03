//! Line-oriented batch evaluation: `operation,operand[,operand]` per line.

use std::io::Write;

use agmstar::verify::ReportFormat;
use agmstar::{
    agm, elliptic_i, solve_right, star, star_inverse, theta, BackendChoice, EllipticPair, Error, ToleranceConfig,
};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchRow {
    /// 1-based line number in the input.
    pub line: usize,
    pub operation: String,
    pub x: String,
    pub y: String,
    pub result: Option<f64>,
    pub backend: Option<String>,
    pub residual: Option<f64>,
    pub error: Option<String>,
}

struct Outcome {
    result: f64,
    backend: &'static str,
    residual: Option<f64>,
}

fn arity(op: &str) -> Option<usize> {
    match op {
        "agm" | "star" | "solve" | "elliptic" => Some(2),
        "theta" | "inverse" => Some(1),
        _ => None,
    }
}

fn evaluate(op: &str, args: &[f64], cfg: &ToleranceConfig) -> Result<Outcome, Error> {
    let plain = |result, backend| Outcome { result, backend, residual: None };
    Ok(match (op, args) {
        ("agm", &[x, y]) => plain(agm(x, y, cfg)?, "agm"),
        ("star", &[x, y]) => {
            let c = star(x, y, BackendChoice::Auto, cfg)?;
            Outcome { result: c.get(), backend: c.backend.as_str(), residual: Some(c.residual) }
        }
        ("theta", &[q]) => plain(theta(q, cfg)?, "series"),
        ("inverse", &[x]) => plain(star_inverse(x, cfg)?, "auto"),
        ("solve", &[x, z]) => plain(solve_right(x, z, cfg)?, "auto"),
        ("elliptic", &[x, y]) => plain(elliptic_i(EllipticPair::new(x, y)?, cfg)?, "agm"),
        _ => unreachable!("arity checked by caller"),
    })
}

fn process_line(line: usize, text: &str, cfg: &ToleranceConfig) -> BatchRow {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    let mut row = BatchRow {
        line,
        operation: fields[0].to_string(),
        x: fields.get(1).unwrap_or(&"").to_string(),
        y: fields.get(2).unwrap_or(&"").to_string(),
        result: None,
        backend: None,
        residual: None,
        error: None,
    };
    let Some(n) = arity(fields[0]) else {
        row.error = Some(format!("unknown operation `{}`", fields[0]));
        return row;
    };
    if fields.len() - 1 != n {
        row.error = Some(format!("`{}` takes {n} operand(s), got {}", fields[0], fields.len() - 1));
        return row;
    }
    let mut args = Vec::with_capacity(n);
    for f in &fields[1..] {
        match f.parse::<f64>() {
            Ok(v) => args.push(v),
            Err(_) => {
                row.error = Some(format!("`{f}` is not a number"));
                return row;
            }
        }
    }
    match evaluate(fields[0], &args, cfg) {
        Ok(o) => {
            row.result = Some(o.result);
            row.backend = Some(o.backend.to_string());
            row.residual = o.residual;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Evaluate every non-blank, non-comment line; output order follows input order.
pub fn run(input: &str, cfg: &ToleranceConfig) -> Vec<BatchRow> {
    let lines: Vec<(usize, &str)> = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    lines.par_iter().map(|&(n, l)| process_line(n, l, cfg)).collect()
}

pub fn write(rows: &[BatchRow], format: ReportFormat, out: &mut impl Write) -> std::io::Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["line", "operation", "x", "y", "result", "backend", "residual", "error"])?;
            for r in rows {
                w.write_record([
                    r.line.to_string(),
                    r.operation.clone(),
                    r.x.clone(),
                    r.y.clone(),
                    r.result.map(crate::format_number).unwrap_or_default(),
                    r.backend.clone().unwrap_or_default(),
                    r.residual.map(crate::format_number).unwrap_or_default(),
                    r.error.clone().unwrap_or_default(),
                ])?;
            }
            w.flush()
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn rows_in_order_with_isolated_failures() {
        let rows = run("star,3,5\n# comment\n\nagm,1,1\nstar,1\nfoo,1,2\nagm,1,-2\ntheta,x\n", &cfg());
        assert_eq!(rows.len(), 6);
        assert!((rows[0].result.unwrap() - 9.0).abs() < 1e-9);
        assert_eq!(rows[0].line, 1);
        assert_eq!(rows[1].result, Some(1.0));
        assert_eq!(rows[1].line, 4);
        for r in &rows[2..] {
            assert!(r.result.is_none() && r.error.is_some(), "{r:?}");
        }
        assert!(rows[4].error.as_ref().unwrap().contains("`y`"));
    }

    #[test]
    fn every_operation() {
        let rows = run("agm,1,2\nstar,5,13\ntheta,0\ninverse,1\nsolve,3,9\nelliptic,1,1\n", &cfg());
        let r: Vec<f64> = rows.iter().map(|r| r.result.unwrap()).collect();
        assert!((r[0] - 1.4567910310469068).abs() < 1e-15);
        assert!((r[1] - 25.0).abs() < 1e-8);
        assert_eq!(r[2], 1.0);
        assert!((r[3] - 1.0).abs() < 1e-12);
        assert!((r[4] - 5.0).abs() < 1e-8);
        assert!((r[5] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn empty_input() {
        let rows = run("", &cfg());
        assert!(rows.is_empty());
        let mut out = Vec::new();
        write(&rows, ReportFormat::Json, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().trim(), "[]");
    }

    #[test]
    fn csv_quotes_messages() {
        let rows = vec![BatchRow {
            line: 1,
            operation: "star".into(),
            x: "1".into(),
            y: "".into(),
            result: None,
            backend: None,
            residual: None,
            error: Some("a, b".into()),
        }];
        let mut out = Vec::new();
        write(&rows, ReportFormat::Csv, &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().contains("\"a, b\""));
    }
}
