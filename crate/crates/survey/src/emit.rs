//! Output rows, one schema per mode, and their CSV/JSON serialization.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{Format, Mode};
use crate::error::{Result, SurveyError};

/// Quadratic survey row: `D,h,clgroup,deg,isogeny_stat,hL,hperiod,disc`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadRow {
    #[serde(rename = "D")]
    pub d: i64,
    pub h: u64,
    /// Elementary divisors joined by `x`, `1` for the trivial group.
    pub clgroup: String,
    pub deg: u64,
    pub isogeny_stat: u64,
    #[serde(rename = "hL")]
    pub h_l: Option<f64>,
    #[serde(rename = "hperiod")]
    pub h_period: Option<f64>,
    pub disc: Option<f64>,
}

/// Quartic survey row: `polykey,DiscE,DiscE0,hE,hE0,hEstar,ker,H,deg,stat`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticRow {
    pub polykey: String,
    #[serde(rename = "DiscE")]
    pub disc_e: i64,
    #[serde(rename = "DiscE0")]
    pub disc_e0: i64,
    #[serde(rename = "hE")]
    pub h_e: u64,
    #[serde(rename = "hE0")]
    pub h_e0: u64,
    #[serde(rename = "hEstar")]
    pub h_estar: u64,
    pub ker: u64,
    #[serde(rename = "H")]
    pub h_sub: u64,
    pub deg: u64,
    pub stat: u64,
}

/// Height row: `D,h_class_number,L0_num,L0_den,Lprime0,h_L,h_period,discrepancy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightRow {
    #[serde(rename = "D")]
    pub d: i64,
    pub h_class_number: u64,
    #[serde(rename = "L0_num")]
    pub l0_num: i64,
    #[serde(rename = "L0_den")]
    pub l0_den: i64,
    #[serde(rename = "Lprime0")]
    pub lprime0: f64,
    #[serde(rename = "h_L")]
    pub h_l: f64,
    pub h_period: f64,
    pub discrepancy: f64,
}

/// Census row: `X,N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(rename = "N")]
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Record {
    Quad(QuadRow),
    Quartic(QuarticRow),
    Height(HeightRow),
    Census(CensusRow),
}

impl Record {
    pub fn mode(&self) -> Mode {
        match self {
            Record::Quad(_) => Mode::Quad,
            Record::Quartic(_) => Mode::Quartic,
            Record::Height(_) => Mode::Heights,
            Record::Census(_) => Mode::Census,
        }
    }

    /// Output order: by absolute discriminant (or census bound), then key.
    pub fn sort_key(&self) -> (u64, String) {
        match self {
            Record::Quad(r) => (r.d.unsigned_abs(), String::new()),
            Record::Quartic(r) => (r.disc_e.unsigned_abs(), r.polykey.clone()),
            Record::Height(r) => (r.d.unsigned_abs(), String::new()),
            Record::Census(r) => (r.x, String::new()),
        }
    }
}

fn csv_of<T: Serialize>(rows: &[&T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| SurveyError::Malformed(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| SurveyError::Malformed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| SurveyError::Malformed(e.to_string()))
}

fn json_of<T: Serialize>(rows: &[&T]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows).map_err(|e| SurveyError::Malformed(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render<T: Serialize>(rows: &[&T], format: Format) -> Result<String> {
    match format {
        Format::Csv => csv_of(rows),
        Format::Json => json_of(rows),
    }
}

/// Serialize records of a single mode in output order.
pub fn emit(records: &[Record], format: Format) -> Result<String> {
    let first = records.first().ok_or(SurveyError::EmptyInput)?.mode();
    if let Some(r) = records.iter().find(|r| r.mode() != first) {
        return Err(SurveyError::MixedModes(first, r.mode()));
    }
    let mut sorted: Vec<&Record> = records.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    macro_rules! rows {
        ($variant:ident) => {
            render(
                &sorted
                    .iter()
                    .map(|r| match r {
                        Record::$variant(x) => x,
                        _ => unreachable!("modes checked above"),
                    })
                    .collect::<Vec<_>>(),
                format,
            )
        };
    }
    match first {
        Mode::Quad => rows!(Quad),
        Mode::Quartic => rows!(Quartic),
        Mode::Heights => rows!(Height),
        Mode::Census => rows!(Census),
    }
}

pub fn write_output(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| SurveyError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(x: u64, n: u64) -> Record {
        Record::Census(CensusRow { x, n })
    }

    #[test]
    fn single_row_and_order() {
        let out = emit(&[census(4, 10)], Format::Csv).unwrap();
        assert_eq!(out, "X,N\n4,10\n");
        let out = emit(&[census(8, 30), census(4, 10)], Format::Csv).unwrap();
        assert_eq!(out, "X,N\n4,10\n8,30\n");
        let q = Record::Quad(QuadRow {
            d: -23,
            h: 3,
            clgroup: "3".into(),
            deg: 3,
            isogeny_stat: 2,
            h_l: None,
            h_period: None,
            disc: None,
        });
        assert_eq!(emit(&[q.clone()], Format::Csv).unwrap(), "D,h,clgroup,deg,isogeny_stat,hL,hperiod,disc\n-23,3,3,3,2,,,\n");
        assert!(matches!(emit(&[q, census(4, 10)], Format::Csv), Err(SurveyError::MixedModes(Mode::Quad, Mode::Census))));
        assert!(matches!(emit(&[], Format::Json), Err(SurveyError::EmptyInput)));
    }
}
