//! Report documents, histogram export and table writing.
//!
//! Reports are plain text with stable key ordering; tabular exports are
//! comma-separated. All floats print with 17 significant digits so reruns
//! can be compared byte for byte.

use crate::error::{Error, Result};

/// 17-significant-digit scientific notation; round-trips through parsing.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One histogram bin with density normalised so the bin areas sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub density: f64,
}

/// Equal-width histogram over the draw range.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    /// Set when every draw is identical; the single bin is then a spike of
    /// infinite density at that value.
    pub degenerate: bool,
}

impl Histogram {
    /// Table form: `bin_left,bin_right,density` rows, flagged when the
    /// range is degenerate.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_left,bin_right,density\n");
        if self.degenerate {
            s.push_str("# degenerate_range = true\n");
        }
        for b in &self.bins {
            s.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(b.left),
                fmt_f64(b.right),
                fmt_f64(b.density)
            ));
        }
        s
    }
}

/// Bins draws into `bins` equal-width cells over `[min, max]`.
pub fn export_histogram(draws: &[f64], bins: usize) -> Result<Histogram> {
    if draws.len() < 2 {
        return Err(Error::usage("histogram needs at least 2 draws"));
    }
    if bins == 0 {
        return Err(Error::domain("bins must be >= 1"));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &d in draws {
        if !d.is_finite() {
            return Err(Error::numeric("export_histogram", "non-finite draw"));
        }
        min = min.min(d);
        max = max.max(d);
    }
    if min == max {
        return Ok(Histogram {
            bins: vec![HistogramBin {
                left: min,
                right: max,
                density: f64::INFINITY,
            }],
            degenerate: true,
        });
    }
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &d in draws {
        let idx = (((d - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = draws.len() as f64;
    let out = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| HistogramBin {
            left: min + i as f64 * width,
            right: min + (i + 1) as f64 * width,
            density: count as f64 / (n * width),
        })
        .collect();
    Ok(Histogram {
        bins: out,
        degenerate: false,
    })
}

/// Plain-text report document with `[section]` headers and `key = value`
/// lines emitted in insertion order.
#[derive(Debug, Default)]
pub struct ReportDoc {
    text: String,
}

impl ReportDoc {
    pub fn new() -> Self {
        ReportDoc::default()
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        self.text.push_str(&format!("[{name}]\n"));
        self
    }

    pub fn kv(&mut self, key: &str, value: impl AsRef<str>) -> &mut Self {
        self.text.push_str(key);
        self.text.push_str(" = ");
        self.text.push_str(value.as_ref());
        self.text.push('\n');
        self
    }

    pub fn kv_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.kv(key, fmt_f64(value))
    }

    /// Appends raw preformatted text.
    pub fn raw(&mut self, text: &str) -> &mut Self {
        self.text.push_str(text);
        self
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Joins one CSV row, quoting nothing; values must not contain commas.
pub fn csv_row(cells: &[String]) -> String {
    cells.join(",")
}
