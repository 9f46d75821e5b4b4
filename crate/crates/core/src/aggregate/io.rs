//! CSV interchange for signals and indicators.
//!
//! Signals: `post_id,author_id,unit_id,bin_start,value_or_label` with
//! RFC 3339 bin starts; a field that parses as a float is a numeric signal,
//! anything else is a label. Indicators:
//! `unit_id,bin_start,indicator,n_posts,n_users,suppressed` with indicators
//! fixed to six decimal places and an empty field when suppressed.

use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, Utc};

use super::{AggregateError, IndicatorSeries, SignalRecord, SignalValue, TimeBin};

/// Reads a signal CSV; every record is binned at `width_secs`.
pub fn read_signals_csv<R: Read>(
    reader: R,
    width_secs: u64,
) -> Result<Vec<SignalRecord>, AggregateError> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut out = Vec::new();
    for (idx, row) in csv_reader.records().enumerate() {
        let line = idx + 2; // header is line 1
        let row = row.map_err(|e| AggregateError::MalformedCsv {
            line,
            message: e.to_string(),
        })?;
        if row.len() != 5 {
            return Err(AggregateError::MalformedCsv {
                line,
                message: format!("expected 5 fields, got {}", row.len()),
            });
        }
        let start = DateTime::parse_from_rfc3339(&row[3])
            .map_err(|e| AggregateError::MalformedCsv {
                line,
                message: format!("bad bin_start: {e}"),
            })?
            .with_timezone(&Utc);
        let value = match row[4].parse::<f64>() {
            Ok(v) if v.is_finite() => SignalValue::Numeric(v),
            _ => SignalValue::Label(row[4].to_string()),
        };
        out.push(SignalRecord {
            post_id: row[0].to_string(),
            author_id: row[1].to_string(),
            unit_id: row[2].to_string(),
            bin: TimeBin::new(start, width_secs),
            value,
        });
    }
    Ok(out)
}

/// Writes indicator series sorted by unit and bin. Float formatting is fixed
/// at six decimals so repeated runs are byte-identical.
pub fn write_indicators_csv<W: Write>(
    series: &[IndicatorSeries],
    writer: W,
) -> Result<(), AggregateError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["unit_id", "bin_start", "indicator", "n_posts", "n_users", "suppressed"])
        .map_err(csv_io)?;

    let mut sorted: Vec<&IndicatorSeries> = series.iter().collect();
    sorted.sort_by(|a, b| a.unit_id.cmp(&b.unit_id));
    for s in sorted {
        let mut bins: Vec<_> = s.bins.iter().collect();
        bins.sort_by_key(|p| p.bin);
        for point in bins {
            let indicator = point
                .indicator
                .map(|v| format!("{v:.6}"))
                .unwrap_or_default();
            out.write_record([
                s.unit_id.clone(),
                point.bin.start.to_rfc3339_opts(SecondsFormat::Secs, true),
                indicator,
                point.n_posts.to_string(),
                point.n_users.to_string(),
                point.suppressed.to_string(),
            ])
            .map_err(csv_io)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> AggregateError {
    AggregateError::Io(std::io::Error::other(e))
}
