//! Chart file format (version 1) and data ingestion.
//!
//! ```json
//! {
//!   "version": 1,
//!   "datasets": [{"id": "weather", "url": "seattle-weather.csv",
//!                 "fields": [{"name": "weather", "type": "nominal"}]}],
//!   "views": [{"id": "scatter", "width": 400, "height": 300,
//!              "scales": [{"id": "x", "channel": "x", "type": "continuous",
//!                          "dataset": "weather", "field": "date"}],
//!              "marks": [{"id": "points", "type": "symbol", "dataset": "weather",
//!                         "encode": {"x": {"scale": "x"}}}]}]
//! }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    infer_measure_type, Aggregate, Channel, ChartError, ChartSpec, DataTable, DomainKind, Encoding,
    FieldDef, MarkDef, MarkType, MeasureType, Row, ScaleDef, ViewDef,
};
use crate::value::{numeric_cell, parse_iso_datetime};
use crate::FORMAT_VERSION;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartDocument {
    version: u32,
    datasets: Vec<DatasetDoc>,
    views: Vec<ViewDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetDoc {
    id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    fields: Vec<FieldDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<Row>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<DataFormat>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    name: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    measure_type: Option<MeasureType>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ViewDoc {
    id: String,
    width: u32,
    height: u32,
    #[serde(default)]
    scales: Vec<ScaleDoc>,
    #[serde(default)]
    marks: Vec<MarkDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaleDoc {
    id: String,
    channel: Channel,
    #[serde(rename = "type")]
    domain_kind: DomainKind,
    dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aggregate: Option<Aggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkDoc {
    id: String,
    #[serde(rename = "type")]
    mark_type: MarkType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dataset: Option<String>,
    #[serde(default)]
    encode: BTreeMap<Channel, Encoding>,
}

/// Parses and resolves a chart document.
///
/// `base_dir` anchors relative data `url`s. Without one, url-backed datasets
/// are rejected: callers that receive charts over the wire pass `None`.
pub fn load_chart(document: &str, base_dir: Option<&Path>) -> Result<ChartSpec, ChartError> {
    let doc: ChartDocument =
        serde_json::from_str(document).map_err(|e| ChartError::Parse(e.to_string()))?;
    if doc.version != FORMAT_VERSION {
        return Err(ChartError::Parse(format!(
            "unsupported chart format version {} (expected {FORMAT_VERSION})",
            doc.version
        )));
    }
    if doc.views.is_empty() {
        return Err(ChartError::EmptyChart);
    }

    let mut datasets = Vec::with_capacity(doc.datasets.len());
    for ds in doc.datasets {
        if datasets.iter().any(|d: &DataTable| d.id == ds.id) {
            return Err(ChartError::Invalid(format!(
                "duplicate dataset id `{}`",
                ds.id
            )));
        }
        datasets.push(ingest(ds, base_dir)?);
    }

    let mut views = Vec::with_capacity(doc.views.len());
    let mut mark_ids = HashSet::new();
    for view in doc.views {
        if views.iter().any(|v: &ViewDef| v.id == view.id) {
            return Err(ChartError::Invalid(format!(
                "duplicate view id `{}`",
                view.id
            )));
        }
        let view = resolve_view(view, &datasets)?;
        for mark in &view.marks {
            if !mark_ids.insert(mark.id.clone()) {
                return Err(ChartError::Invalid(format!(
                    "duplicate mark id `{}`",
                    mark.id
                )));
            }
        }
        views.push(view);
    }

    Ok(ChartSpec { datasets, views })
}

/// Reads and resolves a chart file; relative data urls resolve against its directory.
pub fn load_chart_file(path: &Path) -> Result<ChartSpec, ChartError> {
    let text = fs::read_to_string(path).map_err(|source| ChartError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    load_chart(&text, Some(base))
}

/// Serializes a chart back to the file format, inlining all rows and
/// annotating every field's measure type.
pub fn save_chart(chart: &ChartSpec) -> String {
    let doc = ChartDocument {
        version: FORMAT_VERSION,
        datasets: chart
            .datasets
            .iter()
            .map(|d| DatasetDoc {
                id: d.id.clone(),
                fields: d
                    .fields
                    .iter()
                    .map(|f| FieldDoc {
                        name: f.name.clone(),
                        measure_type: Some(f.measure_type),
                    })
                    .collect(),
                values: Some(d.rows.clone()),
                url: None,
                format: None,
            })
            .collect(),
        views: chart
            .views
            .iter()
            .map(|v| ViewDoc {
                id: v.id.clone(),
                width: v.width,
                height: v.height,
                scales: v
                    .scales
                    .iter()
                    .map(|s| ScaleDoc {
                        id: s.id.clone(),
                        channel: s.channel,
                        domain_kind: s.domain_kind,
                        dataset: s.dataset.clone(),
                        field: s.field.clone(),
                        aggregate: s.aggregate,
                        range: s.range_extent,
                    })
                    .collect(),
                marks: v
                    .marks
                    .iter()
                    .map(|m| MarkDoc {
                        id: m.id.clone(),
                        mark_type: m.mark_type,
                        dataset: m.dataset.clone(),
                        encode: m.encodings.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    crate::json::to_canonical_string(&doc)
}

fn ingest(doc: DatasetDoc, base_dir: Option<&Path>) -> Result<DataTable, ChartError> {
    let (raw_rows, header) = match (doc.values, doc.url) {
        (Some(values), None) => (values, Vec::new()),
        (None, Some(url)) => {
            let base = base_dir.ok_or_else(|| {
                ChartError::Invalid(format!(
                    "dataset `{}` references url `{url}` but external data is not accepted here",
                    doc.id
                ))
            })?;
            let path = base.join(&url);
            let format = doc.format.unwrap_or_else(|| {
                if url.to_ascii_lowercase().ends_with(".json") {
                    DataFormat::Json
                } else {
                    DataFormat::Csv
                }
            });
            read_rows(&path, format)?
        }
        (Some(_), Some(_)) => {
            return Err(ChartError::Parse(format!(
                "dataset `{}` declares both `values` and `url`",
                doc.id
            )))
        }
        (None, None) => {
            return Err(ChartError::Parse(format!(
                "dataset `{}` declares neither `values` nor `url`",
                doc.id
            )))
        }
    };

    // Field order: annotations, then CSV header order, then first-seen row keys.
    let mut names: Vec<String> = Vec::new();
    let push = |name: &str, names: &mut Vec<String>| {
        if !names.iter().any(|n| n == name) {
            names.push(name.to_string());
        }
    };
    for f in &doc.fields {
        if names.contains(&f.name) {
            return Err(ChartError::Invalid(format!(
                "field `{}` declared twice in dataset `{}`",
                f.name, doc.id
            )));
        }
        push(&f.name, &mut names);
    }
    for h in &header {
        push(h, &mut names);
    }
    for row in &raw_rows {
        for key in row.keys() {
            push(key, &mut names);
        }
    }

    let mut rows: Vec<Row> = raw_rows;
    for row in &mut rows {
        for name in &names {
            row.entry(name.clone()).or_insert(Value::Null);
        }
    }

    let mut fields = Vec::with_capacity(names.len());
    for name in names {
        let annotated = doc
            .fields
            .iter()
            .find(|f| f.name == name)
            .and_then(|f| f.measure_type);
        let measure_type = match annotated {
            Some(t) => t,
            None if rows.is_empty() => MeasureType::Nominal,
            None => {
                let column: Vec<Value> = rows.iter().map(|r| r[&name].clone()).collect();
                infer_measure_type(&column).map_err(|_| ChartError::EmptyColumn(name.clone()))?
            }
        };
        conform_column(&doc.id, &name, measure_type, &mut rows)?;
        fields.push(FieldDef { name, measure_type });
    }

    Ok(DataTable {
        id: doc.id,
        fields,
        rows,
    })
}

/// Coerces numeric text in quantitative columns and checks temporal values parse.
fn conform_column(
    dataset: &str,
    field: &str,
    measure_type: MeasureType,
    rows: &mut [Row],
) -> Result<(), ChartError> {
    let bad = |v: &Value| {
        ChartError::Invalid(format!(
            "value {v} in `{dataset}.{field}` does not conform to its {} measure type",
            measure_type.as_str()
        ))
    };
    for row in rows.iter_mut() {
        let slot = row.get_mut(field).expect("slots were filled");
        match measure_type {
            MeasureType::Quantitative => match slot {
                Value::Null | Value::Number(_) => {}
                Value::String(s) => *slot = numeric_cell(s).ok_or_else(|| bad(slot))?,
                other => return Err(bad(other)),
            },
            MeasureType::Temporal => match slot {
                Value::Null | Value::Number(_) => {}
                Value::String(s) if parse_iso_datetime(s).is_some() => {}
                other => return Err(bad(other)),
            },
            MeasureType::Nominal | MeasureType::Ordinal => {}
        }
    }
    Ok(())
}

fn read_rows(path: &Path, format: DataFormat) -> Result<(Vec<Row>, Vec<String>), ChartError> {
    let io = |source| ChartError::Io {
        path: path.display().to_string(),
        source,
    };
    match format {
        DataFormat::Json => {
            let text = fs::read_to_string(path).map_err(io)?;
            let rows: Vec<Row> = serde_json::from_str(&text)
                .map_err(|e| ChartError::Parse(format!("{}: {e}", path.display())))?;
            Ok((rows, Vec::new()))
        }
        DataFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(true)
                .delimiter(b',')
                .from_path(path)
                .map_err(|e| csv_error(path, e))?;
            let header: Vec<String> = reader
                .headers()
                .map_err(|e| csv_error(path, e))?
                .iter()
                .map(str::to_string)
                .collect();
            let mut rows = Vec::new();
            for record in reader.records() {
                let record = record.map_err(|e| csv_error(path, e))?;
                let mut row = Row::new();
                for (name, cell) in header.iter().zip(record.iter()) {
                    let v = if cell.is_empty() {
                        Value::Null
                    } else {
                        Value::String(cell.to_string())
                    };
                    row.insert(name.clone(), v);
                }
                rows.push(row);
            }
            Ok((rows, header))
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> ChartError {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(source) => ChartError::Io {
                path: path.display().to_string(),
                source,
            },
            _ => unreachable!(),
        },
        _ => ChartError::Parse(format!("{}: {e}", path.display())),
    }
}

fn resolve_view(doc: ViewDoc, datasets: &[DataTable]) -> Result<ViewDef, ChartError> {
    if doc.width == 0 || doc.height == 0 {
        return Err(ChartError::Invalid(format!(
            "view `{}` must have positive width and height",
            doc.id
        )));
    }
    let dataset = |id: &str, from: &str| {
        datasets
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| ChartError::reference("dataset", id, from))
    };

    let mut scales: Vec<ScaleDef> = Vec::with_capacity(doc.scales.len());
    for s in doc.scales {
        let from = format!("scale `{}.{}`", doc.id, s.id);
        if scales.iter().any(|x| x.id == s.id) {
            return Err(ChartError::Invalid(format!("duplicate scale id in {from}")));
        }
        if s.channel == Channel::Text {
            return Err(ChartError::Invalid(format!(
                "{from} cannot target the text channel"
            )));
        }
        let ds = dataset(&s.dataset, &from)?;
        match (&s.field, s.aggregate) {
            (Some(f), _) => {
                ds.field(f).ok_or_else(|| {
                    ChartError::reference("field", format!("{}.{f}", ds.id), &from)
                })?;
            }
            (None, Some(Aggregate::Count)) => {}
            (None, _) => {
                return Err(ChartError::Invalid(format!("{from} needs a `field`")));
            }
        }
        let range_extent = match s.channel {
            Channel::X => Some(s.range.unwrap_or(doc.width)),
            Channel::Y => Some(s.range.unwrap_or(doc.height)),
            _ => s.range,
        };
        scales.push(ScaleDef {
            id: s.id,
            channel: s.channel,
            domain_kind: s.domain_kind,
            dataset: s.dataset,
            field: s.field,
            aggregate: s.aggregate,
            range_extent,
        });
    }

    let mut marks = Vec::with_capacity(doc.marks.len());
    for m in doc.marks {
        let from = format!("mark `{}`", m.id);
        let ds = match &m.dataset {
            Some(id) => Some(dataset(id, &from)?),
            None => None,
        };
        for (channel, enc) in &m.encode {
            match enc {
                Encoding::Scaled { scale, field } => {
                    let s = scales.iter().find(|s| &s.id == scale).ok_or_else(|| {
                        ChartError::reference("scale", format!("{}.{scale}", doc.id), &from)
                    })?;
                    if s.channel != *channel {
                        return Err(ChartError::Invalid(format!(
                            "{from} encodes {channel} through {} scale `{scale}`",
                            s.channel
                        )));
                    }
                    let ds = ds.ok_or_else(|| {
                        ChartError::Invalid(format!(
                            "{from} has no dataset but encodes {channel} from data"
                        ))
                    })?;
                    if let Some(f) = field {
                        if s.aggregate.is_some() {
                            return Err(ChartError::Invalid(format!(
                                "{from} overrides the field of aggregate scale `{scale}`"
                            )));
                        }
                        ds.field(f).ok_or_else(|| {
                            ChartError::reference("field", format!("{}.{f}", ds.id), &from)
                        })?;
                    } else if s.aggregate.is_none() {
                        let f = s
                            .field
                            .as_deref()
                            .expect("non-aggregate scales carry a field");
                        ds.field(f).ok_or_else(|| {
                            ChartError::reference("field", format!("{}.{f}", ds.id), &from)
                        })?;
                    }
                }
                Encoding::Field { field } => {
                    let ds = ds.ok_or_else(|| {
                        ChartError::Invalid(format!(
                            "{from} has no dataset but encodes {channel} from data"
                        ))
                    })?;
                    ds.field(field).ok_or_else(|| {
                        ChartError::reference("field", format!("{}.{field}", ds.id), &from)
                    })?;
                }
                Encoding::Constant { .. } => {}
            }
        }
        marks.push(MarkDef {
            id: m.id,
            mark_type: m.mark_type,
            dataset: m.dataset,
            encodings: m.encode,
        });
    }

    Ok(ViewDef {
        id: doc.id,
        width: doc.width,
        height: doc.height,
        marks,
        scales,
    })
}
