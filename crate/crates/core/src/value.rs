//! Scalar helpers shared by ingestion, widgets and code generation.

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde_json::Value;

/// Parses an ISO-8601 calendar date or date-time into epoch milliseconds (UTC).
///
/// Accepted shapes: `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]` (also with a
/// space separator) and RFC 3339 timestamps carrying an offset.
pub fn parse_iso_datetime(text: &str) -> Option<i64> {
    let s = text.trim();
    if s.len() < 10 || !s.as_bytes()[0].is_ascii_digit() {
        return None;
    }
    if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(date.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis());
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp_millis());
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    None
}

/// Numeric view of a scalar: JSON numbers, and strings that parse as finite floats.
pub fn as_number(value: &Value) -> Option<f64> {
    match value {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok().filter(|f| f.is_finite()),
        _ => None,
    }
}

/// Converts a textual cell into the most specific JSON scalar it represents,
/// keeping integer/float spelling (`10` stays an integer, `0.0` a float).
pub fn numeric_cell(text: &str) -> Option<Value> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Ok(i) = t.parse::<i64>() {
        return Some(Value::from(i));
    }
    let f = t.parse::<f64>().ok().filter(|f| f.is_finite())?;
    serde_json::Number::from_f64(f).map(Value::Number)
}

/// Stable textual rendering used for keys and diagnostics.
pub fn display(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iso_dates_parse_to_utc_millis() {
        assert_eq!(parse_iso_datetime("1970-01-02"), Some(86_400_000));
        assert_eq!(parse_iso_datetime("2012-01-01"), Some(1_325_376_000_000));
        assert_eq!(
            parse_iso_datetime("2012-01-01T00:00:01"),
            Some(1_325_376_001_000)
        );
        assert_eq!(
            parse_iso_datetime("2012-01-01T01:00:00+01:00"),
            Some(1_325_376_000_000)
        );
        assert_eq!(
            parse_iso_datetime("2012-01-01 00:00"),
            Some(1_325_376_000_000)
        );
    }

    #[test]
    fn non_dates_are_rejected() {
        for s in ["sun", "2012", "12.5", "2012-13-01", "Jan 1 2000", ""] {
            assert_eq!(parse_iso_datetime(s), None, "{s}");
        }
    }

    #[test]
    fn numeric_cells_keep_their_spelling() {
        assert_eq!(numeric_cell("10").unwrap().to_string(), "10");
        assert_eq!(numeric_cell("0.0").unwrap().to_string(), "0.0");
        assert_eq!(numeric_cell("-4.5").unwrap().to_string(), "-4.5");
        assert!(numeric_cell("NaN").is_none());
        assert!(numeric_cell("rain").is_none());
    }
}
