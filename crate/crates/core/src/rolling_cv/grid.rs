use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{Map, Value};

use super::CvError;

/// One candidate value on a grid axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HyperValue {
    Bool(bool),
    Int(i64),
    Real(f64),
    Tag(String),
}

impl HyperValue {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            HyperValue::Int(i) => Some(i as f64),
            HyperValue::Real(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_usize(&self) -> Option<usize> {
        match *self {
            HyperValue::Int(i) if i >= 0 => Some(i as usize),
            HyperValue::Real(r) if r >= 0.0 && r.fract() == 0.0 => Some(r as usize),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            HyperValue::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_tag(&self) -> Option<&str> {
        match self {
            HyperValue::Tag(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for HyperValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperValue::Bool(b) => write!(f, "{b}"),
            HyperValue::Int(i) => write!(f, "{i}"),
            HyperValue::Real(r) => write!(f, "{r}"),
            HyperValue::Tag(s) => f.write_str(s),
        }
    }
}

impl From<i64> for HyperValue {
    fn from(v: i64) -> Self {
        HyperValue::Int(v)
    }
}

impl From<f64> for HyperValue {
    fn from(v: f64) -> Self {
        HyperValue::Real(v)
    }
}

impl From<bool> for HyperValue {
    fn from(v: bool) -> Self {
        HyperValue::Bool(v)
    }
}

impl From<&str> for HyperValue {
    fn from(v: &str) -> Self {
        HyperValue::Tag(v.to_string())
    }
}

/// One point of a grid: axis names with their chosen values, in axis order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HyperPoint(Vec<(String, HyperValue)>);

impl HyperPoint {
    pub fn new(entries: Vec<(String, HyperValue)>) -> Self {
        Self(entries)
    }

    pub fn get(&self, name: &str) -> Option<&HyperValue> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, HyperValue)] {
        &self.0
    }

    pub fn with(mut self, name: &str, value: impl Into<HyperValue>) -> Self {
        let value = value.into();
        match self.0.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.0.push((name.to_string(), value)),
        }
        self
    }
}

impl fmt::Display for HyperPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        for (i, (name, value)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

impl Serialize for HyperPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (name, value) in &self.0 {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for HyperPoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = Map::<String, Value>::deserialize(deserializer)?;
        map.into_iter()
            .map(|(k, v)| {
                serde_json::from_value(v)
                    .map(|v| (k, v))
                    .map_err(serde::de::Error::custom)
            })
            .collect::<Result<Vec<_>, _>>()
            .map(HyperPoint)
    }
}

/// Named axes of candidate values. The grid is their Cartesian product,
/// enumerated row-major: the last axis varies fastest. A grid with no axes has
/// exactly one (empty) point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Map<String, Value>", into = "Map<String, Value>")]
pub struct HyperGrid {
    axes: Vec<(String, Vec<HyperValue>)>,
}

impl HyperGrid {
    pub fn new(axes: Vec<(String, Vec<HyperValue>)>) -> Result<Self, CvError> {
        for (i, (name, values)) in axes.iter().enumerate() {
            if values.is_empty() {
                return Err(CvError::InvalidGrid(format!("axis {name:?} has no values")));
            }
            if axes[..i].iter().any(|(n, _)| n == name) {
                return Err(CvError::InvalidGrid(format!("axis {name:?} declared twice")));
            }
        }
        Ok(Self { axes })
    }

    /// Builder-style axis addition for code-defined grids.
    pub fn axis<V: Into<HyperValue>>(mut self, name: &str, values: impl IntoIterator<Item = V>) -> Self {
        self.axes.push((name.to_string(), values.into_iter().map(Into::into).collect()));
        self
    }

    pub fn axes(&self) -> &[(String, Vec<HyperValue>)] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every point in enumeration order.
    pub fn points(&self) -> Vec<HyperPoint> {
        let total = self.len();
        let mut out = Vec::with_capacity(total);
        for mut flat in 0..total {
            let mut entries = vec![(String::new(), HyperValue::Bool(false)); self.axes.len()];
            for (slot, (name, values)) in entries.iter_mut().zip(&self.axes).rev() {
                *slot = (name.clone(), values[flat % values.len()].clone());
                flat /= values.len();
            }
            out.push(HyperPoint(entries));
        }
        out
    }
}

impl TryFrom<Map<String, Value>> for HyperGrid {
    type Error = CvError;

    fn try_from(map: Map<String, Value>) -> Result<Self, Self::Error> {
        let axes = map
            .into_iter()
            .map(|(name, value)| {
                let values: Vec<HyperValue> = match value {
                    Value::Array(items) => items
                        .into_iter()
                        .map(serde_json::from_value)
                        .collect::<Result<_, _>>()
                        .map_err(|e| CvError::InvalidGrid(format!("axis {name:?}: {e}")))?,
                    scalar => vec![serde_json::from_value(scalar)
                        .map_err(|e| CvError::InvalidGrid(format!("axis {name:?}: {e}")))?],
                };
                Ok((name, values))
            })
            .collect::<Result<Vec<_>, CvError>>()?;
        HyperGrid::new(axes)
    }
}

impl From<HyperGrid> for Map<String, Value> {
    fn from(grid: HyperGrid) -> Self {
        grid.axes
            .into_iter()
            .map(|(name, values)| (name, serde_json::to_value(values).expect("plain values")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_enumeration() {
        let grid = HyperGrid::default().axis("a", [1i64, 2]).axis("b", ["x", "y", "z"]);
        let points = grid.points();
        assert_eq!(points.len(), 6);
        let text: Vec<String> = points.iter().map(ToString::to_string).collect();
        assert_eq!(text[0], "a=1, b=x");
        assert_eq!(text[1], "a=1, b=y");
        assert_eq!(text[3], "a=2, b=x");
        assert_eq!(HyperGrid::default().points(), vec![HyperPoint::default()]);
    }

    #[test]
    fn json_round_trip_keeps_axis_order() {
        let grid: HyperGrid = serde_json::from_str(r#"{"p": [1, 2], "lambda": [0.1, 1e-3], "depth": ["unlimited", 4], "boot": true}"#).unwrap();
        assert_eq!(grid.axes()[0].0, "p");
        assert_eq!(grid.axes()[1].1[1], HyperValue::Real(1e-3));
        assert_eq!(grid.axes()[2].1[0], HyperValue::Tag("unlimited".into()));
        assert_eq!(grid.axes()[3].1, vec![HyperValue::Bool(true)]);
        assert_eq!(grid.len(), 8);
        let back: HyperGrid = serde_json::from_str(&serde_json::to_string(&grid).unwrap()).unwrap();
        assert_eq!(back, grid);
        let point = &grid.points()[0];
        assert_eq!(serde_json::to_string(point).unwrap(), r#"{"p":1,"lambda":0.1,"depth":"unlimited","boot":true}"#);
    }

    #[test]
    fn rejects_empty_axis() {
        assert!(serde_json::from_str::<HyperGrid>(r#"{"p": []}"#).is_err());
        assert!(HyperGrid::new(vec![("a".into(), vec![1i64.into()]), ("a".into(), vec![2i64.into()])]).is_err());
    }

    #[test]
    fn value_conversions() {
        assert_eq!(HyperValue::Int(3).as_f64(), Some(3.0));
        assert_eq!(HyperValue::Real(4.0).as_usize(), Some(4));
        assert_eq!(HyperValue::Real(4.5).as_usize(), None);
        assert_eq!(HyperValue::Int(-1).as_usize(), None);
    }
}
