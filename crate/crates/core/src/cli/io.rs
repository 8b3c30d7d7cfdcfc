use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::bench::format_float;

use super::{CliError, CliResult, EXIT_PARSE, EXIT_USAGE};

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))
}

fn parse_value(field: &str, path: &Path, line: u64) -> CliResult<f64> {
    match field.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::new(
            EXIT_PARSE,
            format!("{}:{line}: invalid number `{}`", path.display(), field.trim()),
        )),
    }
}

/// Reads a CSV with header `t,y`.
pub fn read_observations(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    read_observations_from(open(path)?, path)
}

fn read_observations_from<R: Read>(reader: R, path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let parse_err = |line: u64, msg: String| CliError::new(EXIT_PARSE, format!("{}:{line}: {msg}", path.display()));
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != ["t", "y"] {
        return Err(parse_err(1, format!("expected header `t,y`, got `{}`", names.join(","))));
    }
    let (mut t, mut y) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, found {}", rec.len())));
        }
        t.push(parse_value(&rec[0], path, line)?);
        y.push(parse_value(&rec[1], path, line)?);
    }
    Ok((t, y))
}

/// One number per line; blank lines are skipped.
pub fn read_column(path: &Path) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_value(&line, path, i as u64 + 1)?);
    }
    Ok(out)
}

pub fn write_dense_csv<W: Write>(rows: &[Vec<f64>], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in rows {
        w.write_record(row.iter().map(|v| format_float(*v)))?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|e| CliError::new(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn write_failed(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("cannot write {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> CliResult<(Vec<f64>, Vec<f64>)> {
        read_observations_from(s.as_bytes(), Path::new("d.csv"))
    }

    #[test]
    fn observations() {
        let (t, y) = parse("t,y\n0,1.5\n0.5,2\n").unwrap();
        assert_eq!(t, vec![0.0, 0.5]);
        assert_eq!(y, vec![1.5, 2.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse("t,y\n0,1\n0.5,abc\n").unwrap_err();
        assert_eq!(e.code, EXIT_PARSE);
        assert!(e.message.contains(":3:"), "{}", e.message);
        assert_eq!(parse("x,y\n0,1\n").unwrap_err().code, EXIT_PARSE);
        let e = parse("t,y\n0,1\n1,2,3\n").unwrap_err();
        assert!(e.message.contains(":3:"), "{}", e.message);
        assert_eq!(parse("t,y\n0,NaN\n").unwrap_err().code, EXIT_PARSE);
    }
}
