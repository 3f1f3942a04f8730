//! `trace.csv`, `report.json` and `summary.csv` writers. Every real number
//! is written with six decimals.

use std::io::Write;

use serde_json::Value;

use super::{RunReport, TraceRow};
use crate::error::Result;

pub fn format_fixed(v: f64) -> String {
    format!("{v:.6}")
}

pub fn write_trace_csv<W: Write>(trace: &[TraceRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["step", "running_accuracy", "metric_value", "event"])?;
    for row in trace {
        w.write_record([
            row.step.to_string(),
            format_fixed(row.running_accuracy),
            format_fixed(row.metric_value),
            row.event.map(|e| e.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().unwrap_or(0.0);
            let rounded = (x * 1e6).round() / 1e6;
            if let Some(n) = serde_json::Number::from_f64(rounded) {
                *num = n;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON of the report with reals rounded to six decimals.
pub fn write_report_json<W: Write>(report: &RunReport, mut writer: W) -> Result<()> {
    let mut value = serde_json::to_value(report)?;
    round_floats(&mut value);
    serde_json::to_writer_pretty(&mut writer, &value)?;
    writeln!(writer).map_err(|e| crate::error::Error::io("<report>", e))?;
    Ok(())
}

/// A table row that knows its CSV layout.
pub trait SummaryRecord {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
}

pub fn write_summary_csv<R: SummaryRecord, W: Write>(rows: &[R], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
