use std::io::Write;

use super::runner::BenchmarkReport;

pub const REPORT_HEADER: [&str; 8] =
    ["example", "method", "reps", "median_mse", "q1_mse", "q3_mse", "failures", "wall_seconds"];

/// Shortest round-trip decimal; non-finite values become `NA`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "NA".to_string()
    }
}

pub fn write_report_csv<W: Write>(report: &BenchmarkReport, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.example.to_string(),
            r.method.to_string(),
            r.reps.to_string(),
            format_float(r.median_mse),
            format_float(r.q1_mse),
            format_float(r.q3_mse),
            r.failures.to_string(),
            r.wall_seconds.map_or_else(|| "NA".to_string(), format_float),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report_json<W: Write>(report: &BenchmarkReport, mut out: W) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n").map_err(serde_json::Error::io)
}
