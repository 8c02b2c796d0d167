//! Command output. Every command builds one ordered JSON object; the human
//! form is a rendering of the same object, so both carry the same content.

use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    /// Insert `value` rendered with `Display`; numbers stay exact strings.
    pub fn text(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.put(key, value.to_string())
    }

    pub fn list<T: ToString>(&mut self, key: &str, items: &[T]) -> &mut Self {
        let v: Vec<Value> = items.iter().map(|x| Value::String(x.to_string())).collect();
        self.put(key, v)
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.fields)
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(&self.fields).expect("serializable");
            s.push('\n');
            s
        } else {
            let mut s = String::new();
            render_map(&self.fields, 0, &mut s);
            s
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        _ => None,
    }
}

fn render_map(m: &Map<String, Value>, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (k, v) in m {
        match scalar(v) {
            Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
            None => {
                out.push_str(&format!("{pad}{k}:\n"));
                render_nested(v, indent + 2, out);
            }
        }
    }
}

fn render_nested(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => render_map(m, indent, out),
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_nested(item, indent + 2, out);
                    }
                }
            }
        }
        _ => unreachable!("scalars are rendered inline"),
    }
}
