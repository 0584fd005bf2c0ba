//! `spec.json`: the instance parameter record with keys in generation order.

use std::fs;
use std::path::Path;

use graphopt_core::suite::{SpecSnapshot, SpecValue};
use serde_json::{Map, Number, Value};

use crate::Error;

pub fn to_value(v: &SpecValue) -> Value {
    match v {
        SpecValue::Null => Value::Null,
        SpecValue::Int(i) => Value::Number((*i).into()),
        // Non-finite numbers have no JSON form.
        SpecValue::Float(f) => Number::from_f64(*f).map_or(Value::Null, Value::Number),
        SpecValue::Text(s) => Value::String(s.clone()),
        SpecValue::List(items) => Value::Array(items.iter().map(to_value).collect()),
        SpecValue::Map(entries) => Value::Object(
            entries
                .iter()
                .map(|(k, v)| (k.clone(), to_value(v)))
                .collect::<Map<_, _>>(),
        ),
    }
}

pub fn spec_to_json(spec: &SpecSnapshot) -> Value {
    Value::Object(
        spec.entries()
            .iter()
            .map(|(k, v)| (k.clone(), to_value(v)))
            .collect(),
    )
}

/// Pretty-printed with two-space indentation and a trailing newline.
pub fn render_spec(spec: &SpecSnapshot) -> String {
    let mut s =
        serde_json::to_string_pretty(&spec_to_json(spec)).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn write_spec(path: &Path, spec: &SpecSnapshot) -> Result<(), Error> {
    fs::write(path, render_spec(spec)).map_err(Error::io(path))
}
