//! JSON interchange formats.
//!
//! Instance: `{"points":[{"x":num,"y":num,"color":"str"}],"epsilon":num}`,
//! optionally with a `"metadata"` object carried through untouched.
//! Layout: `{"buses":{"color":y}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coord::Coord;
use crate::model::{BusLayout, ColoredPointSet, EpsilonPolicy, ModelError};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PointRecord {
    x: Coord,
    y: Coord,
    color: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceRecord {
    points: Vec<PointRecord>,
    #[serde(default)]
    epsilon: Coord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<serde_json::Value>,
}

/// A parsed instance file.
#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub instance: ColoredPointSet,
    pub epsilon: EpsilonPolicy,
    pub metadata: Option<serde_json::Value>,
}

impl InstanceFile {
    pub fn new(instance: ColoredPointSet, epsilon: EpsilonPolicy) -> Self {
        InstanceFile { instance, epsilon, metadata: None }
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let record: InstanceRecord = serde_json::from_str(text)?;
        let instance = ColoredPointSet::from_named(record.points.iter().map(|p| (p.x, p.y, p.color.as_str())));
        Ok(InstanceFile { instance, epsilon: EpsilonPolicy::new(record.epsilon)?, metadata: record.metadata })
    }

    pub fn to_json(&self) -> String {
        let record = InstanceRecord {
            points: self
                .instance
                .points()
                .iter()
                .map(|p| PointRecord { x: p.x, y: p.y, color: self.instance.color_name(p.color).to_string() })
                .collect(),
            epsilon: self.epsilon.value(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&record).expect("instance serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LayoutRecord {
    buses: BTreeMap<String, Coord>,
}

pub fn layout_to_json(instance: &ColoredPointSet, layout: &BusLayout) -> String {
    serde_json::to_string_pretty(&layout_to_value(instance, layout)).expect("layout serializes")
}

pub fn layout_to_value(instance: &ColoredPointSet, layout: &BusLayout) -> serde_json::Value {
    let record =
        LayoutRecord { buses: instance.colors().map(|c| (instance.color_name(c).to_string(), layout.y(c))).collect() };
    serde_json::to_value(record).expect("layout serializes")
}

pub fn layout_from_json(instance: &ColoredPointSet, text: &str) -> Result<BusLayout, IoError> {
    let record: LayoutRecord = serde_json::from_str(text)?;
    let mut ys = vec![None; instance.k()];
    for (name, y) in &record.buses {
        let id = instance.color_id(name).ok_or_else(|| ModelError::UnknownBus(name.clone()))?;
        ys[id.0] = Some(*y);
    }
    let ys = ys
        .into_iter()
        .enumerate()
        .map(|(i, y)| y.ok_or_else(|| ModelError::MissingBus(instance.color_names()[i].clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BusLayout::new(ys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let text = r#"{"points":[{"x":1,"y":2.5,"color":"R"},{"x":3,"y":-1,"color":"B"}],"epsilon":0.5}"#;
        let file = InstanceFile::from_json(text).unwrap();
        assert_eq!(file.instance.n(), 2);
        assert_eq!(file.epsilon.value(), Coord::new(1, 2));
        let again = InstanceFile::from_json(&file.to_json()).unwrap();
        assert_eq!(again.instance, file.instance);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = InstanceFile::from_json("{\"points\": [ }").unwrap_err();
        match err {
            IoError::Parse { line, column, .. } => assert!(line == 1 && column > 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn layout_requires_every_color() {
        let file =
            InstanceFile::from_json(r#"{"points":[{"x":1,"y":2,"color":"R"},{"x":3,"y":1,"color":"B"}]}"#).unwrap();
        let err = layout_from_json(&file.instance, r#"{"buses":{"R":3}}"#).unwrap_err();
        assert!(matches!(err, IoError::Model(ModelError::MissingBus(ref c)) if c == "B"));
        let layout = layout_from_json(&file.instance, r#"{"buses":{"R":3,"B":0}}"#).unwrap();
        assert_eq!(layout.ys(), &[Coord::from_int(3), Coord::from_int(0)]);
    }
}
