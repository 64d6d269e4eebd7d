//! Small CSV and unit-suffix helpers. The pipeline's CSV files are plain
//! numeric columns with an optional header line; no quoting is involved.

use std::path::Path;

use anyhow::{bail, Context, Result};
use photonstat::CorrelationHistogram;

/// Parses a picosecond quantity with an optional `ps`, `ns`, or `us`
/// suffix; a bare integer is picoseconds.
pub fn parse_ps(text: &str) -> Result<u64, String> {
    let text = text.trim();
    let (digits, factor) = if let Some(d) = text.strip_suffix("ps") {
        (d, 1u64)
    } else if let Some(d) = text.strip_suffix("ns") {
        (d, 1_000)
    } else if let Some(d) = text.strip_suffix("us") {
        (d, 1_000_000)
    } else {
        (text, 1)
    };
    let value: u64 = digits
        .trim()
        .parse()
        .map_err(|_| format!("expected an integer with optional ps/ns/us suffix, got {text:?}"))?;
    value
        .checked_mul(factor)
        .ok_or_else(|| format!("{text:?} overflows a picosecond count"))
}

/// Reads numeric rows from a CSV file. Empty lines and `#` comments are
/// skipped; one leading non-numeric line is treated as a header. Every row
/// must have at least `min_cols` columns.
pub fn read_numeric_rows(path: &Path, min_cols: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: Result<Vec<f64>, _> =
            line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                if row.len() < min_cols {
                    bail!(
                        "{}:{}: expected at least {min_cols} columns, got {}",
                        path.display(),
                        lineno + 1,
                        row.len()
                    );
                }
                rows.push(row);
            }
            Err(_) if rows.is_empty() && lineno == 0 => continue, // header
            Err(e) => bail!("{}:{}: {e}", path.display(), lineno + 1),
        }
    }
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(rows)
}

/// Renders a normalized histogram as `bin_lo_ps,bin_hi_ps,counts,
/// normalized_value` rows.
pub fn histogram_csv(hist: &CorrelationHistogram) -> String {
    let values = hist.values();
    let mut out = String::from("bin_lo_ps,bin_hi_ps,counts,normalized_value\n");
    for i in 0..hist.num_bins() {
        let v = values.map_or(f64::NAN, |vs| vs[i]);
        out.push_str(&format!(
            "{},{},{},{}\n",
            hist.bin_lo_ps(i),
            hist.bin_hi_ps(i),
            hist.counts()[i],
            v
        ));
    }
    out
}

/// Histogram columns parsed back from a correlate CSV.
pub struct HistRows {
    pub tau_centers_us: Vec<f64>,
    pub counts: Vec<f64>,
    pub values: Vec<f64>,
    pub bin_edges_ps: Vec<(i64, i64)>,
}

pub fn read_hist_csv(path: &Path) -> Result<HistRows> {
    let rows = read_numeric_rows(path, 4)?;
    let mut out = HistRows {
        tau_centers_us: Vec::with_capacity(rows.len()),
        counts: Vec::with_capacity(rows.len()),
        values: Vec::with_capacity(rows.len()),
        bin_edges_ps: Vec::with_capacity(rows.len()),
    };
    for row in rows {
        out.tau_centers_us.push((row[0] + row[1]) / 2.0 * 1e-6);
        out.counts.push(row[2]);
        out.values.push(row[3]);
        out.bin_edges_ps.push((row[0] as i64, row[1] as i64));
    }
    Ok(out)
}
