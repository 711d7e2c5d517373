//! Reports: one JSON document per run, rendered as JSON or as indented text.

use serde_json::{Map, Value};

pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        let mut fields = Map::new();
        fields.insert("spec".into(), Value::from(1));
        fields.insert("command".into(), Value::from(command));
        Report { fields }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Report {
        self.fields.insert(key.into(), v.into());
        self
    }

    pub fn render(&self, machine: bool) -> String {
        if machine {
            let mut s = serde_json::to_string_pretty(&Value::Object(self.fields.clone())).expect("report serializes");
            s.push('\n');
            return s;
        }
        let mut out = String::new();
        for (k, v) in &self.fields {
            text(&mut out, k, v, 0);
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) if !s.contains('\n') => Some(s.clone()),
        _ => None,
    }
}

fn text(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    match v {
        Value::String(s) => {
            out.push_str(&format!("{pad}{key}: |\n"));
            for l in s.lines() {
                out.push_str(&format!("{pad}  {l}\n"));
            }
        }
        Value::Array(items) => {
            out.push_str(&format!("{pad}{key}: [{}]\n", items.len()));
            for (i, it) in items.iter().enumerate() {
                match scalar(it) {
                    Some(s) => out.push_str(&format!("{pad}  - {s}\n")),
                    None => text(out, &format!("[{i}]"), it, depth + 1),
                }
            }
        }
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, x) in m {
                text(out, k, x, depth + 1);
            }
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_layout() {
        let mut r = Report::new("solve");
        r.set("count", 2).set("points", vec!["(a1)", "(0)"]);
        assert_eq!(r.render(false), "spec: 1\ncommand: solve\ncount: 2\npoints: [2]\n  - (a1)\n  - (0)\n");
        assert!(r.render(true).starts_with("{\n  \"spec\": 1,"));
    }
}
