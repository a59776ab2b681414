//! Number formatting and the CSV layouts written by the commands, with
//! readers for each.

use std::io::Read;

use msdim::asymptotics::Exponent;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `%.12g`-style rendering: 12 significant digits, trailing zeros dropped.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn fmt_ratio(r: Exponent) -> String {
    r.to_string()
}

/// Decimal or `p/q`; the exact value is kept when the text is a fraction
/// or a terminating decimal.
pub fn parse_exponent(text: &str) -> Result<(f64, Option<Exponent>), CliError> {
    let text = text.trim();
    let bad = || CliError::Input(format!("cannot parse exponent `{text}`"));
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        let r = Exponent::new(p, q);
        return Ok((p as f64 / q as f64, Some(r)));
    }
    let v: f64 = text.parse().map_err(|_| bad())?;
    let exact = match text.split_once('.') {
        Some((int, frac)) if frac.len() <= 12 && frac.chars().all(|c| c.is_ascii_digit()) => {
            let digits = format!("{int}{frac}");
            digits
                .parse::<i64>()
                .ok()
                .map(|num| Exponent::new(num, 10i64.pow(frac.len() as u32)))
        }
        None => text.parse::<i64>().ok().map(Exponent::from_integer),
        _ => None,
    };
    Ok((v, exact))
}

/// Parses a float or a `p/q` cell.
pub fn parse_number(text: &str) -> Result<f64, CliError> {
    parse_exponent(text).map(|(v, _)| v)
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn read_rows<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> Result<Vec<T>, CliError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Input(format!("csv: {e}")))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CurveRow {
    pub x: String,
    pub y: String,
    pub level: String,
}

impl CurveRow {
    pub fn x(&self) -> f64 {
        parse_number(&self.x).unwrap_or(f64::NAN)
    }

    pub fn y(&self) -> f64 {
        parse_number(&self.y).unwrap_or(f64::NAN)
    }

    pub fn level(&self) -> f64 {
        parse_number(&self.level).unwrap_or(f64::NAN)
    }
}

pub fn read_curves_csv<R: Read>(input: R) -> Result<Vec<CurveRow>, CliError> {
    read_rows(input)
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct CensusRow {
    pub level: u32,
    pub atypical: usize,
    pub typical: usize,
    pub allowed_coords: u64,
}

pub fn read_census_csv<R: Read>(input: R) -> Result<Vec<CensusRow>, CliError> {
    read_rows(input)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ExpansionRow {
    pub level: u32,
    pub set_size: usize,
    pub samples: usize,
    pub predicted: f64,
    pub tolerance: f64,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub max_abs_deviation: f64,
    pub within_fraction: f64,
    pub partial: bool,
}

pub fn read_expansion_csv<R: Read>(input: R) -> Result<Vec<ExpansionRow>, CliError> {
    read_rows(input)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub x: String,
    pub experiment: String,
    pub success: bool,
    pub value: f64,
    pub extra: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

pub const CAMPAIGN_HEADER: [&str; 8] = [
    "trial",
    "seed",
    "n",
    "x",
    "experiment",
    "success",
    "value",
    "extra",
];

pub fn read_campaign_csv<R: Read>(input: R) -> Result<Vec<CampaignRecord>, CliError> {
    read_rows(input)
}

/// Signature dump: `vertex,k0,...,kD[,kinf]`.
pub fn read_signature_csv<R: Read>(input: R) -> Result<Vec<(usize, Vec<u32>)>, CliError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(format!("csv: {e}")))?;
        let mut cells = record.iter().map(|c| {
            c.parse::<u32>()
                .map_err(|_| CliError::Input(format!("csv: bad count `{c}`")))
        });
        let vertex = cells
            .next()
            .ok_or_else(|| CliError::Input("csv: empty row".into()))??
            as usize;
        out.push((vertex, cells.collect::<Result<Vec<_>, _>>()?));
    }
    Ok(out)
}
