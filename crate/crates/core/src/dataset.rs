//! JSON datasets: `{"examples": [{"input": {"x": ..}, "output": ..}, ..]}`.

use std::path::Path;

use serde_json::{json, Map, Value as Json};

use crate::error::DatasetError;
use crate::loss::{DataSet, Example};
use crate::value::{Env, Value};

/// How JSON scalars become values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    /// Integers, written as JSON numbers or decimal strings.
    Int,
    Str,
}

fn convert(kind: ValueKind, v: &Json) -> Result<Value, String> {
    match (kind, v) {
        (ValueKind::Str, Json::String(s)) => Ok(Value::Str(s.clone())),
        (ValueKind::Int, Json::Number(n)) => n
            .as_i64()
            .map(Value::Int)
            .ok_or_else(|| format!("`{n}` is not an integer")),
        (ValueKind::Int, Json::String(s)) => s
            .trim()
            .parse()
            .map(Value::Int)
            .map_err(|_| format!("`{s}` is not an integer")),
        (ValueKind::Str, other) => Err(format!("expected a string, got {other}")),
        (ValueKind::Int, other) => Err(format!("expected an integer, got {other}")),
    }
}

pub fn parse_dataset(text: &str, kind: ValueKind) -> Result<DataSet, DatasetError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| DatasetError::Json(e.to_string()))?;
    let rows = doc
        .get("examples")
        .and_then(Json::as_array)
        .ok_or_else(|| DatasetError::Json("missing `examples` array".into()))?;
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut examples = Vec::with_capacity(rows.len());
    for (row, r) in rows.iter().enumerate() {
        let err = |message: String| DatasetError::Row { row, message };
        let input = r
            .get("input")
            .and_then(Json::as_object)
            .ok_or_else(|| err("missing `input` object".into()))?;
        let mut env = Env::new();
        for (name, v) in input {
            env.bind(name.clone(), convert(kind, v).map_err(|m| err(format!("input `{name}`: {m}")))?);
        }
        let output = r.get("output").ok_or_else(|| err("missing `output`".into()))?;
        let output = convert(kind, output).map_err(|m| err(format!("output: {m}")))?;
        examples.push(Example::new(env, output));
    }
    Ok(DataSet::new(examples))
}

pub fn load_dataset(path: &Path, kind: ValueKind) -> Result<DataSet, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&text, kind)
}

fn to_json(v: &Value) -> Json {
    match v {
        Value::Int(i) => json!(i),
        Value::Str(s) => json!(s),
        other => json!(other.to_string()),
    }
}

pub fn dataset_json(data: &DataSet) -> Json {
    let rows: Vec<Json> = data
        .iter()
        .map(|e| {
            let input: Map<String, Json> = e.input.iter().map(|(k, v)| (k.to_string(), to_json(v))).collect();
            json!({ "input": input, "output": to_json(&e.output) })
        })
        .collect();
    json!({ "examples": rows })
}

pub fn write_dataset(path: &Path, data: &DataSet) -> Result<(), DatasetError> {
    let text = serde_json::to_string_pretty(&dataset_json(data)).expect("dataset JSON serialises");
    std::fs::write(path, text + "\n").map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_rows_are_integers() {
        let d = parse_dataset(r#"{"examples":[{"input":{"x":"1"},"output":"9"}]}"#, ValueKind::Int).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.examples()[0].output, Value::Int(9));
        assert_eq!(d.examples()[0].input.get("x").unwrap(), &Value::Int(1));
        let d = parse_dataset(r#"{"examples":[{"input":{"x":2},"output":12}]}"#, ValueKind::Int).unwrap();
        assert_eq!(d.examples()[0].output, Value::Int(12));
    }

    #[test]
    fn errors_name_the_row() {
        assert_eq!(parse_dataset(r#"{"examples":[]}"#, ValueKind::Str).unwrap_err(), DatasetError::Empty);
        let e = parse_dataset(
            r#"{"examples":[{"input":{"x":"a"},"output":"b"},{"input":{"x":"a"}}]}"#,
            ValueKind::Str,
        )
        .unwrap_err();
        assert!(matches!(e, DatasetError::Row { row: 1, .. }));
        let e = parse_dataset(r#"{"examples":[{"input":{"x":"a"},"output":"b"}]}"#, ValueKind::Int).unwrap_err();
        assert!(matches!(e, DatasetError::Row { row: 0, .. }));
        assert!(matches!(parse_dataset("{", ValueKind::Str), Err(DatasetError::Json(_))));
        assert!(matches!(parse_dataset("{}", ValueKind::Str), Err(DatasetError::Json(_))));
    }

    #[test]
    fn round_trip() {
        let text = r#"{"examples":[{"input":{"x":"Nancy FreeHafer"},"output":"Nancy"}]}"#;
        let d = parse_dataset(text, ValueKind::Str).unwrap();
        let back = parse_dataset(&dataset_json(&d).to_string(), ValueKind::Str).unwrap();
        assert_eq!(back, d);
    }
}
