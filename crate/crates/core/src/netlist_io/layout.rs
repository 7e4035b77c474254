//! Saved boards: a versioned JSON document.

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LayoutError;
use crate::breadboard::{BreadboardLayout, Hole, Row, COLUMNS, HOLE_PITCH};
use crate::circuit::{Component, ComponentKind, ComponentParams};
use crate::Real;

pub const SCHEMA_VERSION: u32 = 1;

/// Board constants recorded alongside the placements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoardSpec {
    pub columns: u8,
    pub rows: Vec<String>,
    pub hole_pitch_m: f64,
}

impl Default for BoardSpec {
    fn default() -> Self {
        Self {
            columns: COLUMNS,
            rows: Row::ALL.iter().map(|r| r.label().to_string()).collect(),
            hole_pitch_m: HOLE_PITCH,
        }
    }
}

/// Parameter values keyed by name, kept in the kind's fixed order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamMap(pub Vec<(String, f64)>);

impl Serialize for ParamMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ParamMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MapVisitor;

        impl<'de> Visitor<'de> for MapVisitor {
            type Value = ParamMap;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of parameter values")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<ParamMap, A::Error> {
                let mut entries = Vec::new();
                while let Some(entry) = access.next_entry::<String, f64>()? {
                    entries.push(entry);
                }
                Ok(ParamMap(entries))
            }
        }

        deserializer.deserialize_map(MapVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementRecord {
    pub id: String,
    pub kind: ComponentKind,
    pub params: ParamMap,
    pub holes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDocument {
    pub schema_version: u32,
    pub board: BoardSpec,
    pub placements: Vec<PlacementRecord>,
}

impl LayoutDocument {
    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("document is plain data") + "\n"
    }

    /// Parses the document, checking the schema version before anything else.
    pub fn from_text(text: &str) -> Result<Self, LayoutError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| LayoutError::MalformedDocument(e.to_string()))?;
        let version = value
            .get("schema_version")
            .ok_or_else(|| LayoutError::MalformedDocument("missing schema_version".into()))?;
        let version = version
            .as_u64()
            .ok_or_else(|| LayoutError::MalformedDocument("schema_version must be an integer".into()))?;
        if version != u64::from(SCHEMA_VERSION) {
            return Err(LayoutError::SchemaVersionUnsupported(version));
        }
        serde_json::from_str(text).map_err(|e| LayoutError::MalformedDocument(e.to_string()))
    }
}

pub fn save_layout<T: Real>(layout: &BreadboardLayout<T>) -> LayoutDocument {
    let placements = layout
        .placements()
        .iter()
        .map(|p| PlacementRecord {
            id: p.component.id().to_string(),
            kind: p.component.kind(),
            params: ParamMap(
                p.component
                    .params()
                    .named_values()
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v.to_f64_lossy()))
                    .collect(),
            ),
            holes: p.holes.iter().map(ToString::to_string).collect(),
        })
        .collect();
    LayoutDocument { schema_version: SCHEMA_VERSION, board: BoardSpec::default(), placements }
}

/// Rebuilds a layout, re-checking every placement rule. Parameters may come
/// in any order but each must appear exactly once.
pub fn load_layout<T: Real>(doc: &LayoutDocument) -> Result<BreadboardLayout<T>, LayoutError> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(LayoutError::SchemaVersionUnsupported(u64::from(doc.schema_version)));
    }
    if doc.board != BoardSpec::default() {
        return Err(LayoutError::MalformedDocument("board geometry does not match this engine".into()));
    }
    let malformed = |context: &str, detail: String| LayoutError::MalformedDocument(format!("{context}: {detail}"));
    let mut layout = BreadboardLayout::new();
    for record in &doc.placements {
        let mut params = ComponentParams::<T>::defaults(record.kind);
        let expected = record.kind.param_specs();
        for spec in expected {
            let mut values = record.params.0.iter().filter(|(k, _)| k == spec.key);
            let (Some((_, value)), None) = (values.next(), values.next()) else {
                return Err(malformed(&record.id, format!("parameter '{}' must appear exactly once", spec.key)));
            };
            params.set(spec.key, T::lit(*value)).map_err(|e| malformed(&record.id, e.to_string()))?;
        }
        if record.params.0.len() != expected.len() {
            return Err(malformed(&record.id, format!("{} takes {} parameters", record.kind, expected.len())));
        }
        let component = Component::new(record.id.as_str(), params).map_err(|e| malformed(&record.id, e.to_string()))?;
        if component.id().as_str() != record.id {
            return Err(malformed(&record.id, "ids are stored upper-case".into()));
        }
        let holes = record
            .holes
            .iter()
            .map(|h| h.parse::<Hole>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| malformed(&record.id, e.to_string()))?;
        layout = layout.place(component, holes).map_err(|e| malformed(&record.id, e.to_string()))?;
    }
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BreadboardLayout<f64> {
        let mut layout = BreadboardLayout::new();
        for (id, holes) in [
            ("V1", ["rail+1", "rail-1"]),
            ("R1", ["rail+3", "a3"]),
            ("LED1", ["b3", "b8"]),
            ("W1", ["c8", "rail-8"]),
            ("C1", ["f12", "RAIL-12"]),
        ] {
            let kind = ComponentKind::from_id(id).unwrap();
            let component = Component::with_defaults(id, kind).unwrap();
            layout = layout.place(component, holes.iter().map(|h| h.parse().unwrap()).collect()).unwrap();
        }
        layout
    }

    #[test]
    fn save_load_identity() {
        let layout = sample();
        let text = save_layout(&layout).to_text();
        let back: BreadboardLayout<f64> = load_layout(&LayoutDocument::from_text(&text).unwrap()).unwrap();
        assert_eq!(back, layout);
    }

    #[test]
    fn field_order_is_fixed() {
        let text = save_layout(&sample()).to_text();
        let version = text.find("schema_version").unwrap();
        let board = text.find("\"board\"").unwrap();
        let placements = text.find("\"placements\"").unwrap();
        assert!(version < board && board < placements);
        assert!(text.contains("\"params\": {\n        \"is\": 1e-18,\n        \"n\": 2.0,\n        \"inom\": 0.02\n"));
    }

    #[test]
    fn unknown_version_rejected() {
        let text = save_layout(&sample()).to_text().replace("\"schema_version\": 1", "\"schema_version\": 999");
        assert_eq!(LayoutDocument::from_text(&text).unwrap_err(), LayoutError::SchemaVersionUnsupported(999));
    }

    #[test]
    fn overlapping_holes_malformed() {
        let mut doc = save_layout(&sample());
        doc.placements[1].holes[1] = "rail+1".into();
        assert!(matches!(load_layout::<f64>(&doc), Err(LayoutError::MalformedDocument(_))));
    }

    #[test]
    fn malformed_inputs() {
        for text in ["", "[]", "{}", "{\"schema_version\": \"1\"}", "{\"schema_version\": 1}"] {
            assert!(matches!(LayoutDocument::from_text(text), Err(LayoutError::MalformedDocument(_))), "{text}");
        }
        let mut doc = save_layout(&sample());
        doc.placements[0].params.0.swap(0, 1);
        assert!(load_layout::<f64>(&doc).is_ok());
        doc.placements[0].params.0[0].0 = "v".into();
        assert!(load_layout::<f64>(&doc).is_err());
        doc.placements[0].params.0.pop();
        assert!(load_layout::<f64>(&doc).is_err());
        let mut doc = save_layout(&sample());
        doc.placements[0].kind = ComponentKind::Resistor;
        assert!(load_layout::<f64>(&doc).is_err());
        let mut doc = save_layout(&sample());
        doc.board.columns = 60;
        assert!(load_layout::<f64>(&doc).is_err());
    }
}
