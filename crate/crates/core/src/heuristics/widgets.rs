use std::cmp::Ordering;

use serde::Serialize;
use serde_json::Value;

use super::SuggestError;
use crate::chart::{ChartSpec, DataTable, FieldDef, MeasureType};
use crate::interaction::{Comparator, FieldRef, QueryWidget, WidgetDomain, WidgetKind};
use crate::value::{as_number, parse_iso_datetime};

const DAY_MS: f64 = 86_400_000.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidgetSuggestionSet {
    pub version: u32,
    pub field: FieldRef,
    pub widgets: Vec<QueryWidget>,
    pub default: usize,
}

impl WidgetSuggestionSet {
    pub fn to_json(&self) -> String {
        crate::json::to_canonical_string(self)
    }
}

/// Suggests query widgets for a field from its measure type.
///
/// Discrete fields get radio buttons (the default) and a dropdown over their
/// distinct values; quantitative fields a slider over their extent; temporal
/// fields a slider over their time extent in epoch milliseconds. `dataset`
/// may be omitted, in which case the first dataset declaring the field wins.
pub fn suggest_widgets(
    chart: &ChartSpec,
    dataset: Option<&str>,
    field: &str,
) -> Result<WidgetSuggestionSet, SuggestError> {
    let (table, def) = chart
        .datasets
        .iter()
        .filter(|d| dataset.is_none_or(|id| d.id == id))
        .find_map(|d| d.field(field).map(|f| (d, f)))
        .ok_or_else(|| match dataset {
            Some(ds) => SuggestError::UnknownField(format!("{ds}.{field}")),
            None => SuggestError::UnknownField(field.to_string()),
        })?;

    let field_ref = FieldRef {
        dataset: table.id.clone(),
        field: def.name.clone(),
    };
    let make = |kind: WidgetKind, domain: Option<WidgetDomain>| QueryWidget {
        id: widget_id(&def.name),
        field: field_ref.clone(),
        widget_kind: kind,
        comparator: Comparator::Eq,
        domain,
        applications: Vec::new(),
    };

    let widgets = match def.measure_type {
        MeasureType::Nominal | MeasureType::Ordinal => {
            let options = distinct_values(table, def);
            vec![
                make(
                    WidgetKind::Radio,
                    Some(WidgetDomain::Options {
                        options: options.clone(),
                    }),
                ),
                make(WidgetKind::Select, Some(WidgetDomain::Options { options })),
            ]
        }
        MeasureType::Quantitative | MeasureType::Temporal => {
            vec![make(WidgetKind::Range, extent(table, def))]
        }
    };
    Ok(WidgetSuggestionSet {
        version: crate::FORMAT_VERSION,
        field: field_ref,
        widgets,
        default: 0,
    })
}

fn widget_id(field: &str) -> String {
    let clean: String = field
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    format!("widget_{clean}")
}

pub(crate) fn distinct_values(table: &DataTable, def: &FieldDef) -> Vec<Value> {
    let mut values: Vec<Value> = Vec::new();
    for row in &table.rows {
        let v = &row[&def.name];
        if !v.is_null() && !values.contains(v) {
            values.push(v.clone());
        }
    }
    values.sort_by(|a, b| match (as_number(a), as_number(b)) {
        (Some(x), Some(y)) if a.is_number() && b.is_number() => {
            x.partial_cmp(&y).unwrap_or(Ordering::Equal)
        }
        _ => crate::value::display(a).cmp(&crate::value::display(b)),
    });
    values
}

fn extent(table: &DataTable, def: &FieldDef) -> Option<WidgetDomain> {
    let temporal = def.measure_type == MeasureType::Temporal;
    let mut all_integer = true;
    let mut date_only = true;
    let mut values = Vec::new();
    for v in table
        .rows
        .iter()
        .map(|r| &r[&def.name])
        .filter(|v| !v.is_null())
    {
        let n = if temporal {
            let s = v.as_str()?;
            date_only &= s.len() == 10;
            parse_iso_datetime(s)? as f64
        } else {
            all_integer &= v.is_i64() || v.is_u64();
            as_number(v)?
        };
        values.push(n);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        return None;
    }
    let step = if temporal {
        if date_only {
            DAY_MS
        } else {
            1000.0
        }
    } else if all_integer || max == min {
        1.0
    } else {
        10f64.powf((max - min).log10().floor() - 2.0)
    };
    Some(WidgetDomain::Extent { min, max, step })
}
