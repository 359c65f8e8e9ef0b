//! Return series representation and file ingestion.
//!
//! Input files are delimiter-separated text with a header row. Prices mode
//! computes natural-log returns from an adjusted-close column sorted by
//! ascending date; returns mode reads a return column verbatim. Rows with
//! missing values are skipped and counted; structurally bad rows are errors.

use std::path::Path;

use crate::error::{Error, Result};

/// How a series was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSource {
    Prices,
    Returns,
}

impl SeriesSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesSource::Prices => "prices",
            SeriesSource::Returns => "returns",
        }
    }
}

/// Ordered daily returns in decimal units, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub returns: Vec<f64>,
    /// ISO-8601 date per return, when the input carried dates.
    pub dates: Option<Vec<String>>,
    pub source: SeriesSource,
}

impl ReturnSeries {
    pub fn from_returns(returns: Vec<f64>) -> Self {
        ReturnSeries {
            returns,
            dates: None,
            source: SeriesSource::Returns,
        }
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

/// Column names used by the loader.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnNames {
    pub date: String,
    pub price: String,
    pub ret: String,
}

impl Default for ColumnNames {
    fn default() -> Self {
        ColumnNames {
            date: "Date".to_string(),
            price: "Adj Close".to_string(),
            ret: "Return".to_string(),
        }
    }
}

/// Loader result: the series plus the number of rows skipped for missing
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadOutcome {
    pub series: ReturnSeries,
    pub skipped_rows: usize,
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("null") || c.eq_ignore_ascii_case("na")
        || c.eq_ignore_ascii_case("n/a")
}

fn sniff_delimiter(header: &str) -> u8 {
    let candidates = *b",;\t";
    *candidates
        .iter()
        .max_by_key(|&&d| header.bytes().filter(|&b| b == d).count())
        .unwrap()
}

/// Loads a return series from a delimiter-separated file.
pub fn load_returns(path: &Path, format: SeriesSource, columns: &ColumnNames) -> Result<LoadOutcome> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::data(&display, None, e.to_string()))?;
    let header = text
        .lines()
        .next()
        .ok_or_else(|| Error::data(&display, None, "empty file"))?;
    let delimiter = sniff_delimiter(header);

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::data(&display, Some(1), e.to_string()))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);

    let date_col = find(&columns.date);
    let value_col = match format {
        SeriesSource::Prices => find(&columns.price).ok_or_else(|| {
            Error::data(&display, Some(1), format!("missing column '{}'", columns.price))
        })?,
        SeriesSource::Returns => find(&columns.ret).ok_or_else(|| {
            Error::data(&display, Some(1), format!("missing column '{}'", columns.ret))
        })?,
    };

    let mut rows: Vec<(Option<String>, f64)> = Vec::new();
    let mut skipped = 0usize;
    for (idx, record) in reader.records().enumerate() {
        let file_row = idx + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::data(&display, Some(file_row), e.to_string()))?;
        let cell = record.get(value_col).unwrap_or("");
        if is_missing(cell) {
            skipped += 1;
            continue;
        }
        let value: f64 = cell.trim().parse().map_err(|_| {
            Error::data(&display, Some(file_row), format!("cannot parse value '{cell}'"))
        })?;
        if !value.is_finite() {
            return Err(Error::data(&display, Some(file_row), "non-finite value"));
        }
        if format == SeriesSource::Prices && value <= 0.0 {
            return Err(Error::data(
                &display,
                Some(file_row),
                format!("nonpositive price {value}"),
            ));
        }
        let date = match date_col {
            Some(col) => {
                let cell = record.get(col).unwrap_or("");
                if is_missing(cell) {
                    skipped += 1;
                    continue;
                }
                Some(cell.trim().to_string())
            }
            None => None,
        };
        rows.push((date, value));
    }

    if rows.len() < 2 {
        return Err(Error::data(
            &display,
            None,
            format!("need at least 2 usable rows, got {}", rows.len()),
        ));
    }

    // ISO-8601 dates sort correctly as strings.
    if date_col.is_some() {
        rows.sort_by(|a, b| a.0.cmp(&b.0));
    }

    let has_dates = date_col.is_some();
    let series = match format {
        SeriesSource::Prices => {
            let returns: Vec<f64> = rows.windows(2).map(|w| (w[1].1 / w[0].1).ln()).collect();
            let dates = has_dates
                .then(|| rows.iter().skip(1).map(|r| r.0.clone().unwrap()).collect());
            ReturnSeries {
                returns,
                dates,
                source: SeriesSource::Prices,
            }
        }
        SeriesSource::Returns => {
            let returns: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let dates = has_dates.then(|| rows.iter().map(|r| r.0.clone().unwrap()).collect());
            ReturnSeries {
                returns,
                dates,
                source: SeriesSource::Returns,
            }
        }
    };
    Ok(LoadOutcome {
        series,
        skipped_rows: skipped,
    })
}
