//! Macro series CSV in, entropy report CSV out.
//!
//! Input header: `period,E,V,W[,N][,alpha]`. Missing `N` means 1 and
//! missing `alpha` means 1.0.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use econ_entropy::macro_entropy::{EntropyReport, MacroError, MacroObservation, MacroSeries};
use thiserror::Error;

const REQUIRED: [&str; 4] = ["period", "E", "V", "W"];
const OPTIONAL: [&str; 2] = ["N", "alpha"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty series")]
    EmptySeries,
    #[error("header is missing column `{0}` (expected period,E,V,W[,N][,alpha])")]
    MissingColumn(String),
    #[error("header has unexpected column `{name}` at position {position}")]
    UnexpectedColumn { name: String, position: usize },
    #[error("line {line}, column {column}: `{value}` is not {expected}")]
    NotNumeric {
        line: u64,
        column: String,
        value: String,
        expected: &'static str,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RowLength {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: {source}")]
    Invariant {
        line: u64,
        column: &'static str,
        #[source]
        source: MacroError,
    },
    #[error("line {line}: period {period} does not follow {previous}")]
    PeriodOrder {
        line: u64,
        period: i64,
        previous: i64,
    },
}

pub fn parse_macro_csv(path: &Path) -> Result<MacroSeries, IngestError> {
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
    parse_macro_str(&text)
}

pub fn parse_macro_str(text: &str) -> Result<MacroSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let layout = Layout::from_headers(&headers)?;

    let mut observations = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(IngestError::RowLength {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let cell = |i: usize| record.get(i).unwrap_or("").trim();
        let number = |i: usize| -> Result<f64, IngestError> {
            cell(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| IngestError::NotNumeric {
                    line,
                    column: headers[i].clone(),
                    value: cell(i).to_owned(),
                    expected: "a finite decimal number",
                })
        };
        let integer = |i: usize, expected| -> Result<i64, IngestError> {
            cell(i).parse::<i64>().map_err(|_| IngestError::NotNumeric {
                line,
                column: headers[i].clone(),
                value: cell(i).to_owned(),
                expected,
            })
        };

        let period = integer(0, "an integer year")?;
        let capital = number(1)?;
        let volume = number(2)?;
        let work = number(3)?;
        let agents = match layout.agents {
            Some(i) => {
                let n = integer(i, "a positive integer")?;
                u64::try_from(n).map_err(|_| IngestError::Invariant {
                    line,
                    column: "N",
                    source: MacroError::NoAgents,
                })?
            }
            None => 1,
        };
        let alpha = match layout.alpha {
            Some(i) => number(i)?,
            None => 1.0,
        };
        let obs = MacroObservation {
            period,
            capital,
            volume,
            work,
            agents,
            alpha,
        };
        obs.validated().map_err(|source| IngestError::Invariant {
            line,
            column: column_of(&source),
            source,
        })?;
        if let Some(prev) = observations.last().map(|o: &MacroObservation| o.period) {
            if period <= prev {
                return Err(IngestError::PeriodOrder {
                    line,
                    period,
                    previous: prev,
                });
            }
        }
        observations.push(obs);
    }
    if observations.is_empty() {
        return Err(IngestError::EmptySeries);
    }
    Ok(MacroSeries::new(observations).expect("rows were validated one by one"))
}

fn column_of(e: &MacroError) -> &'static str {
    match e {
        MacroError::NonPositiveCapital(_) => "E",
        MacroError::NonPositiveVolume(_) => "V",
        MacroError::NegativeStock(_) => "W",
        MacroError::NoAgents => "N",
        MacroError::NonPositiveAlpha(_) => "alpha",
        _ => "period",
    }
}

struct Layout {
    agents: Option<usize>,
    alpha: Option<usize>,
}

impl Layout {
    fn from_headers(headers: &[String]) -> Result<Self, IngestError> {
        for (i, name) in REQUIRED.iter().enumerate() {
            match headers.get(i) {
                Some(h) if h.trim() == *name => {}
                Some(h) if headers.iter().any(|x| x.trim() == *name) => {
                    return Err(IngestError::UnexpectedColumn {
                        name: h.trim().to_owned(),
                        position: i + 1,
                    })
                }
                _ => return Err(IngestError::MissingColumn((*name).to_owned())),
            }
        }
        let mut layout = Layout {
            agents: None,
            alpha: None,
        };
        let mut next_optional = 0;
        for (i, h) in headers.iter().enumerate().skip(REQUIRED.len()) {
            let name = h.trim();
            let slot = OPTIONAL[next_optional..].iter().position(|o| *o == name);
            match slot {
                Some(k) => {
                    next_optional += k + 1;
                    if name == "N" {
                        layout.agents = Some(i);
                    } else {
                        layout.alpha = Some(i);
                    }
                }
                None => {
                    return Err(IngestError::UnexpectedColumn {
                        name: name.to_owned(),
                        position: i + 1,
                    })
                }
            }
        }
        Ok(layout)
    }
}

/// `period,S,elasticity,direction`, empty elasticity for the first period.
pub fn report_csv(reports: &[EntropyReport]) -> String {
    let mut out = String::from("period,S,elasticity,direction\n");
    for r in reports {
        let elasticity = r.elasticity.map(|e| e.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            r.period, r.entropy, elasticity, r.direction
        )
        .expect("writing to a String");
    }
    out
}
