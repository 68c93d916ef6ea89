use std::collections::HashSet;

use super::{
    Axis, EventSource, Selection, SelectionKind, SignalDescriptor, SignalRole, SignalSpace,
};
use crate::chart::{profile_view, ChartSpec};

/// Lists the signals a selection decomposes into.
///
/// Intervals expose pixel extents per projected axis, then data extents named
/// after each axis scale's field. Point selections expose one data value per
/// datum field; hovers add the mouse position in pixel and data space.
/// Returns nothing for a selection whose view does not exist.
pub fn enumerate_signals(selection: &Selection, chart: &ChartSpec) -> Vec<SignalDescriptor> {
    let Some(view) = chart.view(&selection.source_view) else {
        return Vec::new();
    };
    let mut names = Namer::default();
    let mut out = Vec::new();
    let id = &selection.id;
    let sig =
        |name: String, space, role, axis: Option<Axis>, field: Option<String>| SignalDescriptor {
            name,
            space,
            role,
            source: id.clone(),
            axis,
            field,
        };

    match &selection.kind {
        SelectionKind::Interval { encodings } => {
            for &axis in encodings {
                for (suffix, role) in [("start", SignalRole::Start), ("end", SignalRole::End)] {
                    let name = names.claim(format!("{id}_{axis}_{suffix}"), "px");
                    out.push(sig(name, SignalSpace::Pixel, role, Some(axis), None));
                }
            }
            for &axis in encodings {
                let Some(field) = view
                    .scale_for(axis.channel())
                    .and_then(|s| s.output_field())
                else {
                    continue;
                };
                for (suffix, role) in [("start", SignalRole::Start), ("end", SignalRole::End)] {
                    let name = names.claim(format!("{id}_{field}_{suffix}"), "data");
                    out.push(sig(
                        name,
                        SignalSpace::Data,
                        role,
                        Some(axis),
                        Some(field.clone()),
                    ));
                }
            }
        }
        SelectionKind::Point { .. } => {
            let datum_fields = profile_view(chart, &view.id)
                .map(|p| p.datum_fields)
                .unwrap_or_default();
            for field in datum_fields {
                let name = names.claim(format!("{id}_{field}"), "value");
                out.push(sig(
                    name,
                    SignalSpace::Data,
                    SignalRole::Value,
                    None,
                    Some(field),
                ));
            }
            if selection.event_source == EventSource::Hover {
                let axes = [(Axis::X, SignalRole::MouseX), (Axis::Y, SignalRole::MouseY)];
                for (axis, role) in axes {
                    let name = names.claim(format!("{id}_{axis}_mouse"), "px");
                    out.push(sig(name, SignalSpace::Pixel, role, Some(axis), None));
                }
                for (axis, role) in axes {
                    let Some(field) = view
                        .scale_for(axis.channel())
                        .and_then(|s| s.output_field())
                    else {
                        continue;
                    };
                    let name = names.claim(format!("{id}_{field}_mouse"), "data");
                    out.push(sig(name, SignalSpace::Data, role, Some(axis), Some(field)));
                }
            }
        }
    }
    out
}

/// Hands out unique names; a clash gets a space tag and then a counter.
/// Characters that cannot appear in an expression identifier become `_`.
#[derive(Default)]
struct Namer {
    taken: HashSet<String>,
}

impl Namer {
    fn claim(&mut self, base: String, tag: &str) -> String {
        let base: String = base
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        if self.taken.insert(base.clone()) {
            return base;
        }
        let tagged = format!("{base}_{tag}");
        if self.taken.insert(tagged.clone()) {
            return tagged;
        }
        let mut n = 2;
        loop {
            let candidate = format!("{tagged}{n}");
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
            n += 1;
        }
    }
}
