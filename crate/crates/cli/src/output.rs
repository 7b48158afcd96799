//! CSV and JSON emitters.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::record::{Cell, ResultRecord, Series};

/// `%.12g`: twelve significant digits, trailing zeros trimmed, exponent
/// notation outside `[1e-4, 1e12)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_number(*x),
        Cell::Text(s) => s.clone(),
        Cell::Null => String::new(),
    }
}

/// Writes one series as CSV: optional `# generated ...` line, header, rows.
pub fn write_series<W: Write>(out: W, series: &Series, timestamp: Option<&str>) -> Result<(), CliError> {
    let mut out = out;
    if let Some(ts) = timestamp {
        writeln!(out, "# generated {ts}")?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&series.columns)?;
    for row in &series.rows {
        w.write_record(row.iter().map(cell_text))?;
    }
    w.flush()?;
    Ok(())
}

/// Scalars as a one-row table with sorted column names.
pub fn scalars_series(record: &ResultRecord) -> Series {
    let mut s = Series::new("scalars", record.scalars.keys().cloned());
    s.push(record.scalars.values().cloned().collect());
    s
}

/// `dir/stem_<series>.ext` for multi-series output.
pub fn series_path(base: &Path, series: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let ext = base.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    base.with_file_name(format!("{stem}_{series}.{ext}"))
}

/// Emits a record to `path` (or stdout). Returns the files written.
pub fn emit(
    record: &ResultRecord,
    format: OutputFormat,
    path: Option<&Path>,
    timestamp: Option<&str>,
) -> Result<Vec<PathBuf>, CliError> {
    match format {
        OutputFormat::Json => {
            let mut text = record.to_json()?;
            text.push('\n');
            match path {
                Some(p) => {
                    std::fs::write(p, text)?;
                    Ok(vec![p.to_path_buf()])
                }
                None => {
                    std::io::stdout().lock().write_all(text.as_bytes())?;
                    Ok(vec![])
                }
            }
        }
        OutputFormat::Csv => {
            let owned;
            let tables: Vec<&Series> = if record.series.is_empty() {
                owned = scalars_series(record);
                vec![&owned]
            } else {
                record.series.iter().collect()
            };
            match path {
                Some(p) if tables.len() == 1 => {
                    write_series(std::fs::File::create(p)?, tables[0], timestamp)?;
                    Ok(vec![p.to_path_buf()])
                }
                Some(p) => {
                    let mut written = Vec::new();
                    for s in tables {
                        let target = series_path(p, &s.name);
                        write_series(std::fs::File::create(&target)?, s, timestamp)?;
                        written.push(target);
                    }
                    Ok(written)
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    for (i, s) in tables.iter().enumerate() {
                        if tables.len() > 1 {
                            if i > 0 {
                                writeln!(lock)?;
                            }
                            writeln!(lock, "# series: {}", s.name)?;
                        }
                        write_series(&mut lock, s, if i == 0 { timestamp } else { None })?;
                    }
                    Ok(vec![])
                }
            }
        }
    }
}
