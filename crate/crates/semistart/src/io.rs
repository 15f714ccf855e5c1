//! CSV and JSON readers and writers.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use semistart_core::NormalMixture;

use crate::{CliError, Result};

/// How many significant digits numbers are written with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Significant(usize),
    /// Shortest representation that round-trips.
    Full,
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Significant(6)
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "full" {
            return Ok(Precision::Full);
        }
        match s.parse::<usize>() {
            Ok(d) if (1..=17).contains(&d) => Ok(Precision::Significant(d)),
            _ => Err(format!("precision must be 1..=17 or 'full', got '{s}'")),
        }
    }
}

pub fn format_number(v: f64, precision: Precision) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let digits = match precision {
        Precision::Full => return v.to_string(),
        Precision::Significant(d) => d,
    };
    if v == 0.0 {
        return "0".into();
    }
    // round in scientific form first so the exponent accounts for carries
    let sci = format!("{:.*e}", digits - 1, v);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if exp < -5 || exp >= digits as i32 + 4 {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let mut s = format!("{:.*}", decimals, v);
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn open(path: Option<&Path>) -> Result<Box<dyn Read>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(File::open(p).map_err(|e| CliError::file(p, e))?),
        _ => Box::new(io::stdin()),
    })
}

fn read_columns(path: Option<&Path>, header: bool, need: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(open(path)?);
    let mut cols = vec![Vec::new(); need];
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() < need {
            return Err(CliError::Format(format!("row {} has {} fields, need {need}", line + 1, record.len())));
        }
        for (c, col) in cols.iter_mut().enumerate() {
            let field = &record[c];
            let v: f64 = field
                .parse()
                .map_err(|_| CliError::Format(format!("row {}: '{field}' is not a number", line + 1)))?;
            if !v.is_finite() {
                return Err(CliError::Format(format!("row {}: '{field}' is not finite", line + 1)));
            }
            col.push(v);
        }
    }
    Ok(cols)
}

/// First column of a CSV file (stdin for `None` or `-`).
pub fn read_data(path: Option<&Path>, header: bool) -> Result<Vec<f64>> {
    Ok(read_columns(path, header, 1)?.pop().unwrap())
}

/// First two columns as (x, y).
pub fn read_pairs(path: Option<&Path>, header: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut cols = read_columns(path, header, 2)?;
    let y = cols.pop().unwrap();
    let x = cols.pop().unwrap();
    Ok((x, y))
}

pub fn read_mixture(path: &Path) -> Result<NormalMixture> {
    let file = File::open(path).map_err(|e| CliError::file(path, e))?;
    Ok(serde_json::from_reader(io::BufReader::new(file))?)
}

/// A table of named numeric columns; `None` cells are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W, header: bool, precision: Precision) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if header {
            w.write_record(&self.header)?;
        }
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map(|v| format_number(v, precision)).unwrap_or_default()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Writes to `path`, or stdout for `None` or `-`.
pub fn with_output<F>(path: Option<&Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) if p != Path::new("-") => {
            let mut file = io::BufWriter::new(File::create(p).map_err(|e| CliError::file(p, e))?);
            f(&mut file)?;
            file.flush()?;
        }
        _ => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}
