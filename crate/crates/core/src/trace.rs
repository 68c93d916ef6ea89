//! Input-event traces and their classification into demonstrations.
//!
//! A trace is a time-ordered list of pointer events recorded over one view.
//! [`classify`] partitions it into drags, click chunks and hovers; those
//! demonstrations are what the suggestion heuristics consume.

use serde::{Deserialize, Serialize};

/// Minimum net pointer displacement, in pixels, for a press to count as a drag.
pub const DRAG_EPSILON: f64 = 4.0;

/// Clicks closer together than this (milliseconds) belong to the same chunk.
pub const CLICK_CHUNK_MS: f64 = 800.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TraceError {
    #[error("trace contains no demonstrable events")]
    EmptyTrace,
    #[error("unbalanced trace: {0}")]
    UnbalancedTrace(String),
    #[error("event {index} goes back in time ({t} ms after {previous} ms)")]
    NonMonotonic { index: usize, t: f64, previous: f64 },
    #[error("trace mixes views `{0}` and `{1}`")]
    MixedViews(String, String),
    #[error("drag has zero net displacement")]
    ZeroDisplacement,
    #[error("malformed trace: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    PointerDown,
    PointerMove,
    PointerUp,
    Click,
    HoverEnter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EventTarget {
    pub mark_id: String,
    pub datum_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InputEvent {
    pub kind: EventKind,
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub view_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<EventTarget>,
}

impl InputEvent {
    pub fn new(kind: EventKind, x: f64, y: f64, t: f64, view_id: &str) -> Self {
        InputEvent {
            kind,
            x,
            y,
            t,
            view_id: view_id.to_string(),
            target: None,
        }
    }

    pub fn on(mut self, mark_id: &str, datum_index: usize) -> Self {
        self.target = Some(EventTarget {
            mark_id: mark_id.to_string(),
            datum_index,
        });
        self
    }
}

/// Parses a trace file: a JSON array of events.
pub fn parse_trace(text: &str) -> Result<Vec<InputEvent>, TraceError> {
    serde_json::from_str(text).map_err(|e| TraceError::Parse(e.to_string()))
}

/// Indices of events lying outside `[0, width] x [0, height]`.
pub fn out_of_bounds(events: &[InputEvent], width: f64, height: f64) -> Vec<usize> {
    events
        .iter()
        .enumerate()
        .filter(|(_, e)| !(0.0..=width).contains(&e.x) || !(0.0..=height).contains(&e.y))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gesture {
    Drag {
        start: Point,
        end: Point,
        /// Degrees in `[0, 90]` from the horizontal axis.
        trajectory_angle: f64,
    },
    ClickChunk {
        count: usize,
        datum_indices: Vec<usize>,
    },
    Hover {
        datum_indices: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demonstration {
    pub view_id: String,
    pub gesture: Gesture,
    pub events: Vec<InputEvent>,
}

impl Demonstration {
    pub fn kind_name(&self) -> &'static str {
        match self.gesture {
            Gesture::Drag { .. } => "drag",
            Gesture::ClickChunk { .. } => "click_chunk",
            Gesture::Hover { .. } => "hover",
        }
    }

    /// Builds a drag demonstration straight from its endpoints.
    pub fn drag(view_id: &str, start: Point, end: Point) -> Result<Self, TraceError> {
        let trajectory_angle = angle_between(start, end)?;
        Ok(Demonstration {
            view_id: view_id.to_string(),
            gesture: Gesture::Drag {
                start,
                end,
                trajectory_angle,
            },
            events: Vec::new(),
        })
    }

    /// A drag whose trajectory angle is given directly, for threshold probes.
    pub fn drag_with_angle(view_id: &str, trajectory_angle: f64) -> Self {
        let rad = trajectory_angle.to_radians();
        Demonstration {
            view_id: view_id.to_string(),
            gesture: Gesture::Drag {
                start: Point { x: 0.0, y: 0.0 },
                end: Point {
                    x: 100.0 * rad.cos(),
                    y: 100.0 * rad.sin(),
                },
                trajectory_angle,
            },
            events: Vec::new(),
        }
    }

    pub fn clicks(view_id: &str, count: usize) -> Self {
        Demonstration {
            view_id: view_id.to_string(),
            gesture: Gesture::ClickChunk {
                count,
                datum_indices: Vec::new(),
            },
            events: Vec::new(),
        }
    }

    pub fn hover(view_id: &str) -> Self {
        Demonstration {
            view_id: view_id.to_string(),
            gesture: Gesture::Hover {
                datum_indices: Vec::new(),
            },
            events: Vec::new(),
        }
    }
}

/// Angle of a drag's net start-to-end displacement, folded into `[0, 90]`
/// degrees from horizontal and rounded to a billionth of a degree.
pub fn drag_angle(drag: &Demonstration) -> Result<f64, TraceError> {
    match &drag.gesture {
        Gesture::Drag { start, end, .. } => angle_between(*start, *end),
        _ => Err(TraceError::ZeroDisplacement),
    }
}

fn angle_between(start: Point, end: Point) -> Result<f64, TraceError> {
    let dx = (end.x - start.x).abs();
    let dy = (end.y - start.y).abs();
    if dx == 0.0 && dy == 0.0 {
        return Err(TraceError::ZeroDisplacement);
    }
    // Rounded so drags drawn at exactly 30 or 60 degrees land on the boundary.
    let deg = dy.atan2(dx).to_degrees();
    Ok((deg * 1e9).round() / 1e9)
}

/// Groups time-ordered clicks: a gap under [`CLICK_CHUNK_MS`] continues the
/// current chunk, a gap at or above it starts a new one.
pub fn chunk_clicks(clicks: &[InputEvent]) -> Vec<Vec<InputEvent>> {
    let mut chunks: Vec<Vec<InputEvent>> = Vec::new();
    for click in clicks {
        match chunks.last_mut() {
            Some(chunk)
                if click.t - chunk.last().expect("chunks are non-empty").t < CLICK_CHUNK_MS =>
            {
                chunk.push(click.clone())
            }
            _ => chunks.push(vec![click.clone()]),
        }
    }
    chunks
}

enum Atom {
    Drag(Vec<InputEvent>),
    Click(InputEvent, Vec<InputEvent>),
    Hover(InputEvent),
}

/// Partitions a trace into maximal demonstrations.
///
/// Press/release pairs become drags when their net displacement reaches
/// [`DRAG_EPSILON`] and clicks otherwise. A `click` event directly following a
/// release is the browser echo of that press and is folded into it. Runs of
/// clicks are chunked with [`chunk_clicks`]; runs of hover events form one
/// hover demonstration. Stray pointer moves outside a press carry no
/// demonstration.
pub fn classify(events: &[InputEvent]) -> Result<Vec<Demonstration>, TraceError> {
    if events.is_empty() {
        return Err(TraceError::EmptyTrace);
    }
    for (i, pair) in events.windows(2).enumerate() {
        if pair[1].t < pair[0].t {
            return Err(TraceError::NonMonotonic {
                index: i + 1,
                t: pair[1].t,
                previous: pair[0].t,
            });
        }
        if pair[1].view_id != pair[0].view_id {
            return Err(TraceError::MixedViews(
                pair[0].view_id.clone(),
                pair[1].view_id.clone(),
            ));
        }
    }
    let view_id = events[0].view_id.clone();

    let mut atoms: Vec<Atom> = Vec::new();
    let mut i = 0;
    while i < events.len() {
        let e = &events[i];
        match e.kind {
            EventKind::PointerDown => {
                let mut press = vec![e.clone()];
                let mut j = i + 1;
                loop {
                    let Some(next) = events.get(j) else {
                        return Err(TraceError::UnbalancedTrace(format!(
                            "pointerdown at t={} has no matching pointerup",
                            e.t
                        )));
                    };
                    match next.kind {
                        EventKind::PointerMove => press.push(next.clone()),
                        EventKind::PointerUp => {
                            press.push(next.clone());
                            break;
                        }
                        other => {
                            return Err(TraceError::UnbalancedTrace(format!(
                                "{other:?} at t={} interrupts the press started at t={}",
                                next.t, e.t
                            )))
                        }
                    }
                    j += 1;
                }
                let up = press.last().expect("press ends with pointerup").clone();
                // Fold the browser's trailing click into this press.
                if events
                    .get(j + 1)
                    .is_some_and(|n| n.kind == EventKind::Click)
                {
                    j += 1;
                    press.push(events[j].clone());
                }
                let displacement = (up.x - e.x).hypot(up.y - e.y);
                if displacement >= DRAG_EPSILON {
                    atoms.push(Atom::Drag(press));
                } else {
                    let mut click = up.clone();
                    click.kind = EventKind::Click;
                    click.target = e.target.clone().or(up.target.clone());
                    atoms.push(Atom::Click(click, press));
                }
                i = j + 1;
            }
            EventKind::PointerUp => {
                return Err(TraceError::UnbalancedTrace(format!(
                    "pointerup at t={} without a preceding pointerdown",
                    e.t
                )))
            }
            EventKind::Click => {
                atoms.push(Atom::Click(e.clone(), vec![e.clone()]));
                i += 1;
            }
            EventKind::HoverEnter => {
                atoms.push(Atom::Hover(e.clone()));
                i += 1;
            }
            EventKind::PointerMove => i += 1,
        }
    }

    let mut out = Vec::new();
    let mut k = 0;
    while k < atoms.len() {
        match &atoms[k] {
            Atom::Drag(press) => {
                let first = &press[0];
                let last = press
                    .iter()
                    .rev()
                    .find(|e| e.kind == EventKind::PointerUp)
                    .expect("drags end with pointerup");
                let start = Point {
                    x: first.x,
                    y: first.y,
                };
                let end = Point {
                    x: last.x,
                    y: last.y,
                };
                out.push(Demonstration {
                    view_id: view_id.clone(),
                    gesture: Gesture::Drag {
                        start,
                        end,
                        trajectory_angle: angle_between(start, end)?,
                    },
                    events: press.clone(),
                });
                k += 1;
            }
            Atom::Click(..) => {
                let mut clicks = Vec::new();
                let mut raw: Vec<Vec<InputEvent>> = Vec::new();
                while let Some(Atom::Click(click, events)) = atoms.get(k) {
                    clicks.push(click.clone());
                    raw.push(events.clone());
                    k += 1;
                }
                let mut consumed = 0;
                for chunk in chunk_clicks(&clicks) {
                    let n = chunk.len();
                    out.push(Demonstration {
                        view_id: view_id.clone(),
                        gesture: Gesture::ClickChunk {
                            count: n,
                            datum_indices: chunk
                                .iter()
                                .filter_map(|c| c.target.as_ref().map(|t| t.datum_index))
                                .collect(),
                        },
                        events: raw[consumed..consumed + n].concat(),
                    });
                    consumed += n;
                }
            }
            Atom::Hover(_) => {
                let mut hovers = Vec::new();
                while let Some(Atom::Hover(h)) = atoms.get(k) {
                    hovers.push(h.clone());
                    k += 1;
                }
                out.push(Demonstration {
                    view_id: view_id.clone(),
                    gesture: Gesture::Hover {
                        datum_indices: hovers
                            .iter()
                            .filter_map(|h| h.target.as_ref().map(|t| t.datum_index))
                            .collect(),
                    },
                    events: hovers,
                });
            }
        }
    }

    if out.is_empty() {
        return Err(TraceError::EmptyTrace);
    }
    Ok(out)
}
