//! Static chart model: datasets, views, marks, scales and encodings.
//!
//! A [`ChartSpec`] is always fully resolved: every dataset, scale and field
//! reference has been checked by [`load_chart`], so downstream code indexes
//! into it without re-validating.

mod infer;
mod load;
mod profile;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use infer::infer_measure_type;
pub use load::{load_chart, load_chart_file, save_chart};
pub use profile::{profile_view, AxisKind, AxisProfile, ViewProfile};

pub type Row = serde_json::Map<String, Value>;

#[derive(Debug, thiserror::Error)]
pub enum ChartError {
    #[error("malformed chart document: {0}")]
    Parse(String),
    #[error("{kind} `{id}` referenced from {from} does not exist")]
    Reference {
        kind: &'static str,
        id: String,
        from: String,
    },
    #[error("chart declares no views")]
    EmptyChart,
    #[error("invalid chart: {0}")]
    Invalid(String),
    #[error("column `{0}` has no values to infer a measure type from")]
    EmptyColumn(String),
    #[error("unknown view `{0}`")]
    UnknownView(String),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ChartError {
    pub(crate) fn reference(
        kind: &'static str,
        id: impl Into<String>,
        from: impl Into<String>,
    ) -> Self {
        ChartError::Reference {
            kind,
            id: id.into(),
            from: from.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureType {
    Nominal,
    Ordinal,
    Quantitative,
    Temporal,
}

impl MeasureType {
    pub fn is_continuous(self) -> bool {
        matches!(self, MeasureType::Quantitative | MeasureType::Temporal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureType::Nominal => "nominal",
            MeasureType::Ordinal => "ordinal",
            MeasureType::Quantitative => "quantitative",
            MeasureType::Temporal => "temporal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDef {
    pub name: String,
    #[serde(rename = "type")]
    pub measure_type: MeasureType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub id: String,
    pub fields: Vec<FieldDef>,
    pub rows: Vec<Row>,
}

impl DataTable {
    pub fn field(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }
}

/// Encoding channels, in canonical declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    X,
    Y,
    Color,
    Size,
    Shape,
    Opacity,
    Text,
}

impl Channel {
    pub const ALL: [Channel; 7] = [
        Channel::X,
        Channel::Y,
        Channel::Color,
        Channel::Size,
        Channel::Shape,
        Channel::Opacity,
        Channel::Text,
    ];

    pub fn is_spatial(self) -> bool {
        matches!(self, Channel::X | Channel::Y)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Color => "color",
            Channel::Size => "size",
            Channel::Shape => "shape",
            Channel::Opacity => "opacity",
            Channel::Text => "text",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    Count,
    Sum,
    Mean,
    Min,
    Max,
}

impl Aggregate {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregate::Count => "count",
            Aggregate::Sum => "sum",
            Aggregate::Mean => "mean",
            Aggregate::Min => "min",
            Aggregate::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleDef {
    pub id: String,
    pub channel: Channel,
    pub domain_kind: DomainKind,
    pub dataset: String,
    /// Domain field; absent only for `count` aggregates.
    pub field: Option<String>,
    pub aggregate: Option<Aggregate>,
    /// Pixel extent; always set for x/y after loading.
    pub range_extent: Option<u32>,
}

impl ScaleDef {
    /// Name of the column this scale reads once the view's data is aggregated.
    pub fn output_field(&self) -> Option<String> {
        match (self.aggregate, &self.field) {
            (Some(Aggregate::Count), _) => Some("count".to_string()),
            (Some(op), Some(f)) => Some(format!("{}_{}", op.as_str(), f)),
            (None, f) => f.clone(),
            (Some(_), None) => None,
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.domain_kind == DomainKind::Continuous
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkType {
    Symbol,
    Rect,
    Line,
    Area,
    Text,
    Rule,
    Group,
}

impl MarkType {
    pub const ALL: [MarkType; 7] = [
        MarkType::Symbol,
        MarkType::Rect,
        MarkType::Line,
        MarkType::Area,
        MarkType::Text,
        MarkType::Rule,
        MarkType::Group,
    ];

    /// Marks drawn one item per datum (everything but lines and areas).
    pub fn is_discrete(self) -> bool {
        !matches!(self, MarkType::Line | MarkType::Area)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MarkType::Symbol => "symbol",
            MarkType::Rect => "rect",
            MarkType::Line => "line",
            MarkType::Area => "area",
            MarkType::Text => "text",
            MarkType::Rule => "rule",
            MarkType::Group => "group",
        }
    }
}

/// How a mark channel gets its value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EncodingDoc", into = "EncodingDoc")]
pub enum Encoding {
    /// Data field through a view scale. `field` defaults to the scale's field.
    Scaled {
        scale: String,
        field: Option<String>,
    },
    Constant {
        value: Value,
    },
    /// Raw field without a scale (text content).
    Field {
        field: String,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EncodingDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<Value>,
}

impl TryFrom<EncodingDoc> for Encoding {
    type Error = String;

    fn try_from(doc: EncodingDoc) -> Result<Self, String> {
        match doc {
            EncodingDoc {
                scale: Some(scale),
                field,
                value: None,
            } => Ok(Encoding::Scaled { scale, field }),
            EncodingDoc {
                scale: None,
                field: None,
                value: Some(value),
            } => Ok(Encoding::Constant { value }),
            EncodingDoc {
                scale: None,
                field: Some(field),
                value: None,
            } => Ok(Encoding::Field { field }),
            _ => Err("an encoding is one of {scale[, field]}, {value} or {field}".to_string()),
        }
    }
}

impl From<Encoding> for EncodingDoc {
    fn from(e: Encoding) -> Self {
        match e {
            Encoding::Scaled { scale, field } => EncodingDoc {
                scale: Some(scale),
                field,
                value: None,
            },
            Encoding::Constant { value } => EncodingDoc {
                scale: None,
                field: None,
                value: Some(value),
            },
            Encoding::Field { field } => EncodingDoc {
                scale: None,
                field: Some(field),
                value: None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkDef {
    pub id: String,
    pub mark_type: MarkType,
    /// `None` for singleton marks that draw exactly one item.
    pub dataset: Option<String>,
    pub encodings: BTreeMap<Channel, Encoding>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViewDef {
    pub id: String,
    pub width: u32,
    pub height: u32,
    pub marks: Vec<MarkDef>,
    pub scales: Vec<ScaleDef>,
}

impl ViewDef {
    pub fn scale(&self, id: &str) -> Option<&ScaleDef> {
        self.scales.iter().find(|s| s.id == id)
    }

    /// First scale declared for a channel.
    pub fn scale_for(&self, channel: Channel) -> Option<&ScaleDef> {
        self.scales.iter().find(|s| s.channel == channel)
    }

    pub fn is_aggregated(&self) -> bool {
        self.scales.iter().any(|s| s.aggregate.is_some())
    }

    /// Datasets read by this view's marks, in first-use order.
    pub fn datasets(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for ds in self.marks.iter().filter_map(|m| m.dataset.as_deref()) {
            if !out.contains(&ds) {
                out.push(ds);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub datasets: Vec<DataTable>,
    pub views: Vec<ViewDef>,
}

impl ChartSpec {
    pub fn dataset(&self, id: &str) -> Option<&DataTable> {
        self.datasets.iter().find(|d| d.id == id)
    }

    pub fn view(&self, id: &str) -> Option<&ViewDef> {
        self.views.iter().find(|v| v.id == id)
    }

    /// Looks a mark up by id, returning its owning view too.
    pub fn mark(&self, id: &str) -> Option<(&ViewDef, &MarkDef)> {
        self.views
            .iter()
            .find_map(|v| v.marks.iter().find(|m| m.id == id).map(|m| (v, m)))
    }

    /// Resolves the field an encoding reads, if it reads a raw data field.
    ///
    /// Aggregated scales yield `None`: their values are derived measures.
    pub fn encoded_field(
        &self,
        view: &ViewDef,
        mark: &MarkDef,
        encoding: &Encoding,
    ) -> Option<FieldDef> {
        let dataset = self.dataset(mark.dataset.as_deref()?)?;
        let name = match encoding {
            Encoding::Scaled { scale, field } => {
                let scale = view.scale(scale)?;
                if scale.aggregate.is_some() {
                    return None;
                }
                field.clone().or_else(|| scale.field.clone())?
            }
            Encoding::Field { field } => field.clone(),
            Encoding::Constant { .. } => return None,
        };
        dataset.field(&name).cloned()
    }

    /// Measure type of a field in a dataset.
    pub fn measure_type(&self, dataset: &str, field: &str) -> Option<MeasureType> {
        self.dataset(dataset)?.field(field).map(|f| f.measure_type)
    }
}
