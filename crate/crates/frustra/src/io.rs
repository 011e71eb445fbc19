//! Table and envelope formats shared by every command.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back reproduces the in-memory values bit for bit.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MeanFieldConfiguration;
use crate::scaling::{ExponentReport, Row};

pub const ROW_HEADER: [&str; 5] = ["g", "reduced_coupling", "observable", "index", "value"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn write_rows_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROW_HEADER)?;
    for r in rows {
        w.write_record([
            format!("{}", r.g),
            format!("{}", r.reduced_coupling),
            r.observable.clone(),
            r.index.to_string(),
            format!("{}", r.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Io(format!("not a number: {s:?}")))
}

pub fn read_rows_csv<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header != ROW_HEADER {
        return Err(Error::Io(format!("unexpected header {header:?}")));
    }
    rd.records()
        .map(|rec| {
            let rec = rec?;
            Ok(Row {
                g: parse_f64(&rec[0])?,
                reduced_coupling: parse_f64(&rec[1])?,
                observable: rec[2].to_string(),
                index: rec[3].parse().map_err(|_| Error::Io(format!("bad index {:?}", &rec[3])))?,
                value: parse_f64(&rec[4])?,
            })
        })
        .collect()
}

/// Top-level JSON object of every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub config: serde_json::Value,
    pub results: Vec<T>,
    pub warnings: Vec<String>,
}

pub fn write_json<W: Write, C: Serialize, T: Serialize>(
    config: &C,
    results: &[T],
    warnings: &[String],
    mut out: W,
) -> Result<()> {
    let env = serde_json::json!({
        "config": config,
        "results": results,
        "warnings": warnings,
    });
    serde_json::to_writer_pretty(&mut out, &env)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json<R: Read, T: DeserializeOwned>(input: R) -> Result<Envelope<T>> {
    Ok(serde_json::from_reader(input)?)
}

/// One ground-state configuration per CSV row: coherences, angles and
/// transverse spin per site.
pub fn write_configurations_csv<W: Write>(configs: &[MeanFieldConfiguration], out: W) -> Result<()> {
    let n = configs.first().map_or(0, |c| c.n_sites());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["solution".to_string(), "energy".to_string()];
    for name in ["alpha", "theta", "phi", "jx"] {
        header.extend((1..=n).map(|s| format!("{name}_{s}")));
    }
    w.write_record(&header)?;
    for (i, c) in configs.iter().enumerate() {
        if c.n_sites() != n {
            return Err(Error::Contract("configurations differ in size".into()));
        }
        let mut rec = vec![(i + 1).to_string(), format!("{}", c.energy)];
        for col in [&c.alphas, &c.thetas, &c.phis, &c.transverse_spin()] {
            rec.extend(col.iter().map(|v| format!("{v}")));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_configurations_csv<R: Read>(input: R) -> Result<Vec<MeanFieldConfiguration>> {
    let mut rd = csv::Reader::from_reader(input);
    let width = rd.headers()?.len();
    if width < 2 || (width - 2) % 4 != 0 {
        return Err(Error::Io(format!("unexpected column count {width}")));
    }
    let n = (width - 2) / 4;
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let vals = rec.iter().skip(1).map(parse_f64).collect::<Result<Vec<_>>>()?;
            Ok(MeanFieldConfiguration {
                energy: vals[0],
                alphas: vals[1..1 + n].to_vec(),
                thetas: vals[1 + n..1 + 2 * n].to_vec(),
                phis: vals[1 + 2 * n..1 + 3 * n].to_vec(),
            })
        })
        .collect()
}

/// Flat view of an exponent report, one line per fitted quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentLine {
    pub quantity: String,
    pub index: usize,
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub accepted: bool,
}

pub fn exponent_lines(report: &ExponentReport) -> Vec<ExponentLine> {
    let mut fits = vec![&report.gamma_mf];
    fits.extend(report.gamma_f.iter());
    fits.push(&report.normal_gap);
    for s in &report.sites {
        fits.push(&s.photon);
        fits.push(&s.squeezing);
    }
    fits.extend(report.hessian_mf.iter());
    fits.extend(report.hessian_f.iter());
    fits.into_iter()
        .map(|f| ExponentLine {
            quantity: f.quantity.clone(),
            index: f.index,
            exponent: f.exponent,
            prefactor: f.fit.prefactor,
            r_squared: f.fit.r_squared,
            accepted: f.accepted,
        })
        .collect()
}

pub fn write_exponents_csv<W: Write>(lines: &[ExponentLine], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["quantity", "index", "exponent", "prefactor", "r_squared", "accepted"])?;
    for l in lines {
        w.write_record([
            l.quantity.clone(),
            l.index.to_string(),
            format!("{}", l.exponent),
            format!("{}", l.prefactor),
            format!("{}", l.r_squared),
            l.accepted.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_exponents_csv<R: Read>(input: R) -> Result<Vec<ExponentLine>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}
