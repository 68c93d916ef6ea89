use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Comparator, QueryWidget};
use crate::chart::Row;
use crate::value::{as_number, parse_iso_datetime};

/// Current value of a widget: one scalar, or a `[low, high]` pair for `between`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WidgetValue {
    Pair(Value, Value),
    Scalar(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PredicateError {
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

fn mismatch(msg: impl Into<String>) -> PredicateError {
    PredicateError::TypeMismatch(msg.into())
}

/// Whether `record[field] <comparator> value` holds. `between` is inclusive.
pub fn widget_predicate(
    widget: &QueryWidget,
    value: &WidgetValue,
    record: &Row,
) -> Result<bool, PredicateError> {
    let field = &widget.field.field;
    let actual = record
        .get(field)
        .ok_or_else(|| mismatch(format!("record has no field `{field}`")))?;
    match (widget.comparator, value) {
        (Comparator::Between, WidgetValue::Pair(lo, hi)) => {
            let above = compare(actual, lo)?.is_some_and(|o| o != Ordering::Less);
            let below = compare(actual, hi)?.is_some_and(|o| o != Ordering::Greater);
            Ok(above && below)
        }
        (Comparator::Between, WidgetValue::Scalar(_)) => {
            Err(mismatch("`between` needs a [low, high] pair"))
        }
        (_, WidgetValue::Pair(..)) => Err(mismatch("only `between` takes a pair")),
        (Comparator::Eq, WidgetValue::Scalar(v)) => equal(actual, v),
        (Comparator::Ne, WidgetValue::Scalar(v)) => equal(actual, v).map(|eq| !eq),
        (op, WidgetValue::Scalar(v)) => {
            let Some(ord) = compare(actual, v)? else {
                return Ok(false);
            };
            Ok(match op {
                Comparator::Lt => ord == Ordering::Less,
                Comparator::Le => ord != Ordering::Greater,
                Comparator::Gt => ord == Ordering::Greater,
                Comparator::Ge => ord != Ordering::Less,
                _ => unreachable!(),
            })
        }
    }
}

fn equal(a: &Value, b: &Value) -> Result<bool, PredicateError> {
    if a.is_null() || b.is_null() {
        return Ok(a.is_null() && b.is_null());
    }
    match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => Ok(x == y),
        (Value::Bool(_), _) | (_, Value::Bool(_)) => {
            Err(mismatch("boolean compared with non-boolean"))
        }
        _ => Ok(compare(a, b)? == Some(Ordering::Equal)),
    }
}

/// Orders two scalars. Nulls are unordered (`None`).
fn compare(a: &Value, b: &Value) -> Result<Option<Ordering>, PredicateError> {
    if a.is_null() || b.is_null() {
        return Ok(None);
    }
    if let (Value::String(x), Value::String(y)) = (a, b) {
        if let (Some(tx), Some(ty)) = (parse_iso_datetime(x), parse_iso_datetime(y)) {
            return Ok(Some(tx.cmp(&ty)));
        }
        return Ok(Some(x.cmp(y)));
    }
    let num = |v: &Value| match v {
        Value::Number(_) => as_number(v),
        Value::String(s) => parse_iso_datetime(s).map(|t| t as f64),
        _ => None,
    };
    match (num(a), num(b)) {
        (Some(x), Some(y)) => Ok(x.partial_cmp(&y)),
        _ => Err(mismatch(format!("cannot compare {a} with {b}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{FieldRef, WidgetKind};
    use serde_json::json;

    fn widget(field: &str, comparator: Comparator) -> QueryWidget {
        QueryWidget {
            id: "w".into(),
            field: FieldRef {
                dataset: "d".into(),
                field: field.into(),
            },
            widget_kind: WidgetKind::Range,
            comparator,
            domain: None,
            applications: Vec::new(),
        }
    }

    fn row(v: Value) -> Row {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn numeric_less_than() {
        let w = widget("temp", Comparator::Lt);
        let r = row(json!({"temp": 40}));
        assert!(widget_predicate(&w, &WidgetValue::Scalar(json!(50)), &r).unwrap());
    }

    #[test]
    fn string_equality() {
        let w = widget("weather", Comparator::Eq);
        let r = row(json!({"weather": "rain"}));
        assert!(!widget_predicate(&w, &WidgetValue::Scalar(json!("sun")), &r).unwrap());
    }

    #[test]
    fn between_is_inclusive() {
        let w = widget("v", Comparator::Between);
        let pair = WidgetValue::Pair(json!(10), json!(20));
        for (v, expect) in [
            (9.999, false),
            (10.0, true),
            (15.0, true),
            (20.0, true),
            (20.001, false),
        ] {
            let r = row(json!({ "v": v }));
            assert_eq!(widget_predicate(&w, &pair, &r).unwrap(), expect, "{v}");
        }
    }

    #[test]
    fn dates_compare_chronologically() {
        let w = widget("date", Comparator::Ge);
        let r = row(json!({"date": "2012-03-01"}));
        assert!(widget_predicate(&w, &WidgetValue::Scalar(json!("2012-02-29T12:00")), &r).unwrap());
    }

    #[test]
    fn type_mismatches() {
        let w = widget("temp", Comparator::Lt);
        let r = row(json!({"temp": 40}));
        assert!(widget_predicate(&w, &WidgetValue::Scalar(json!("warm")), &r).is_err());
        assert!(widget_predicate(&w, &WidgetValue::Pair(json!(1), json!(2)), &r).is_err());
        let b = widget("temp", Comparator::Between);
        assert!(widget_predicate(&b, &WidgetValue::Scalar(json!(1)), &r).is_err());
        let missing = widget("wind", Comparator::Eq);
        assert!(widget_predicate(&missing, &WidgetValue::Scalar(json!(1)), &r).is_err());
    }

    #[test]
    fn null_never_orders() {
        let w = widget("temp", Comparator::Lt);
        let r = row(json!({"temp": null}));
        assert!(!widget_predicate(&w, &WidgetValue::Scalar(json!(5)), &r).unwrap());
        let ne = widget("temp", Comparator::Ne);
        assert!(widget_predicate(&ne, &WidgetValue::Scalar(json!(5)), &r).unwrap());
    }
}
