use serde_json::Value;

use super::{ChartError, MeasureType};
use crate::value::{as_number, parse_iso_datetime};

/// Infers a column's measure type.
///
/// Precedence: temporal (every value an ISO-8601 string), then quantitative
/// (every value numeric), then nominal. Nulls are ignored; a column of only
/// nulls, or of mixed kinds, is nominal. Ordinal is never inferred and must be
/// annotated.
pub fn infer_measure_type(values: &[Value]) -> Result<MeasureType, ChartError> {
    if values.is_empty() {
        return Err(ChartError::EmptyColumn(String::new()));
    }
    let present: Vec<&Value> = values.iter().filter(|v| !v.is_null()).collect();
    if present.is_empty() {
        return Ok(MeasureType::Nominal);
    }
    let temporal = present
        .iter()
        .all(|v| v.as_str().is_some_and(|s| parse_iso_datetime(s).is_some()));
    if temporal {
        return Ok(MeasureType::Temporal);
    }
    if present.iter().all(|v| as_number(v).is_some()) {
        return Ok(MeasureType::Quantitative);
    }
    Ok(MeasureType::Nominal)
}
