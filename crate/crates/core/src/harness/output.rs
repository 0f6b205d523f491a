use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BlerPoint;
use crate::channel::{entropy_rate, GaussMarkovChannel};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "rho,ebno_db,b,n,k,rate,trials,errors,bler,mean_guesses,abandon_rate";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// `.json` files get JSON, everything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Order rows by (ρ, Eb/N0, b, rate).
pub fn sort_points(points: &mut [BlerPoint]) {
    points.sort_by(|a, b| {
        a.rho
            .total_cmp(&b.rho)
            .then(a.ebno_db.total_cmp(&b.ebno_db))
            .then(a.b.cmp(&b.b))
            .then(a.rate.total_cmp(&b.rate))
    });
}

pub fn write_results<W: Write>(points: &[BlerPoint], format: OutputFormat, out: W) -> Result<()> {
    let mut rows = points.to_vec();
    sort_points(&mut rows);
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for p in &rows {
                w.serialize(p).map_err(|source| Error::Csv {
                    path: "<writer>".into(),
                    source,
                })?;
            }
            w.flush().map_err(|source| Error::Io {
                path: "<writer>".into(),
                source,
            })?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out).map_err(|source| Error::Io {
                path: "<writer>".into(),
                source,
            })?;
        }
    }
    Ok(())
}

/// Write results to `path`. An empty result set is rejected.
pub fn emit_results(points: &[BlerPoint], format: OutputFormat, path: &Path) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Config("no results to write".into()));
    }
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_results(points, format, &mut w).map_err(|e| match e {
        Error::Io { source, .. } => io_err(source),
        Error::Csv { source, .. } => Error::Csv {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })?;
    w.flush().map_err(io_err)
}

pub fn read_csv(path: &Path) -> Result<Vec<BlerPoint>> {
    let mut r = csv::Reader::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    r.deserialize()
        .map(|row| {
            row.map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub n_or_b: usize,
    pub rho: f64,
    pub sigma2: f64,
    pub entropy_nats: f64,
}

/// Entropy rate for each (ρ, length). With independence across blocks of
/// `b`, the rate equals the full-correlation rate at length `b`, so one
/// column covers both cases.
pub fn entropy_rows(rhos: &[f64], lengths: &[usize], sigma2: f64) -> Result<Vec<EntropyRow>> {
    let mut rows = Vec::with_capacity(rhos.len() * lengths.len());
    for &rho in rhos {
        let channel = GaussMarkovChannel::new(rho, sigma2)?;
        for &len in lengths {
            rows.push(EntropyRow {
                n_or_b: len,
                rho,
                sigma2,
                entropy_nats: entropy_rate(len, &channel)?,
            });
        }
    }
    Ok(rows)
}

pub fn write_entropy_csv<W: Write>(rows: &[EntropyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|source| Error::Csv {
            path: "<writer>".into(),
            source,
        })?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<writer>".into(),
        source,
    })
}
