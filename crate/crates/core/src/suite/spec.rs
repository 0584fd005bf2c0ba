use alloc::string::String;
use alloc::vec::Vec;

/// A JSON-like value with ordered object keys.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecValue {
    Null,
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<SpecValue>),
    Map(Vec<(String, SpecValue)>),
}

impl From<i64> for SpecValue {
    fn from(v: i64) -> Self {
        SpecValue::Int(v)
    }
}

impl From<usize> for SpecValue {
    fn from(v: usize) -> Self {
        SpecValue::Int(v as i64)
    }
}

impl From<f64> for SpecValue {
    fn from(v: f64) -> Self {
        SpecValue::Float(v)
    }
}

impl From<&str> for SpecValue {
    fn from(v: &str) -> Self {
        SpecValue::Text(v.into())
    }
}

impl From<String> for SpecValue {
    fn from(v: String) -> Self {
        SpecValue::Text(v)
    }
}

impl<T: Into<SpecValue>> From<Option<T>> for SpecValue {
    fn from(v: Option<T>) -> Self {
        v.map_or(SpecValue::Null, Into::into)
    }
}

impl<T: Into<SpecValue>> From<Vec<T>> for SpecValue {
    fn from(v: Vec<T>) -> Self {
        SpecValue::List(v.into_iter().map(Into::into).collect())
    }
}

impl<T: Clone + Into<SpecValue>> From<&[T]> for SpecValue {
    fn from(v: &[T]) -> Self {
        SpecValue::List(v.iter().cloned().map(Into::into).collect())
    }
}

/// The per-instance parameter record, keys in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpecSnapshot {
    entries: Vec<(String, SpecValue)>,
}

impl SpecSnapshot {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends, or replaces in place when the key exists.
    pub fn set(&mut self, key: &str, value: impl Into<SpecValue>) {
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key.into(), value)),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<SpecValue>) -> Self {
        self.set(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&SpecValue> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn entries(&self) -> &[(String, SpecValue)] {
        &self.entries
    }
}

/// Row-major nested lists.
pub(crate) fn matrix(rows: &[Vec<f64>]) -> SpecValue {
    SpecValue::List(rows.iter().map(|r| SpecValue::from(r.as_slice())).collect())
}
