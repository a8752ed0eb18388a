//! Output rendering. The human format is a line-per-leaf projection of the JSON report.

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Json,
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => polytower_core::io::to_string(v),
        Format::Human => {
            let mut out = String::new();
            human(v, "", &mut out);
            out
        }
    }
}

fn scalar_like(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(scalar_like),
        Value::Object(_) => false,
        _ => true,
    }
}

fn leaf(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn human(v: &Value, path: &str, out: &mut String) {
    let label = if path.is_empty() { "." } else { path };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, child) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                human(child, &p, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            let inline = leaf(v);
            if scalar_like(v) && inline.len() <= 80 {
                out.push_str(&format!("{label}: {inline}\n"));
                return;
            }
            for (i, child) in items.iter().enumerate() {
                human(child, &format!("{path}[{i}]"), out);
            }
        }
        _ => out.push_str(&format!("{label}: {}\n", leaf(v))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn human_lines() {
        let v = json!({"verdict": {"status": "holds"}, "groups": [{"degree": 0, "torsion": []}], "name": ["a", "b"]});
        let text = render(&v, Format::Human);
        assert_eq!(text, "groups[0].degree: 0\ngroups[0].torsion: []\nname: [\"a\",\"b\"]\nverdict.status: holds\n");
    }
}
