//! Growth-law fits over emitted tables.

pub use cmorbit::fit::{log_log_fit, slope_fit, LinearFit};

use crate::error::{Result, SurveyError};

/// Read two numeric columns of a CSV table, skipping rows where either cell
/// is empty.
pub fn columns(csv_text: &str, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    let mut rd = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = rd.headers().map_err(|e| SurveyError::Malformed(e.to_string()))?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| SurveyError::Malformed(format!("no column {name}")))
    };
    let (ix, iy) = (find(x)?, find(y)?);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| SurveyError::Malformed(e.to_string()))?;
        let (a, b) = (&row[ix], &row[iy]);
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| SurveyError::Malformed(format!("{s}: {e}")));
        out.push((parse(a)?, parse(b)?));
    }
    Ok(out)
}

/// Least-squares fit of `y` against `x`, of their logarithms when `log` is set;
/// absolute values are taken first in that case, so signed discriminants work.
pub fn fit_columns(csv_text: &str, x: &str, y: &str, log: bool) -> Result<LinearFit> {
    let pts = columns(csv_text, x, y)?;
    Ok(if log {
        let abs: Vec<(f64, f64)> = pts.into_iter().map(|(a, b)| (a.abs(), b.abs())).collect();
        log_log_fit(&abs)?
    } else {
        slope_fit(&pts)?
    })
}
