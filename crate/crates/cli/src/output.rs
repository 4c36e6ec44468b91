use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// The document every command emits.
#[derive(Debug, Serialize)]
pub struct Document {
    pub config: Value,
    pub results: Vec<Value>,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
}

impl Document {
    pub fn new(config: Value, results: Vec<Value>, seed: u64) -> Self {
        Document {
            config,
            results,
            provenance: Provenance {
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => Ok(self.csv()),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# config: {}\n", self.config));
        out.push_str(&format!(
            "# provenance: seed={} version={}\n",
            self.provenance.seed, self.provenance.version
        ));
        let columns: Vec<String> = match self.results.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => return out,
        };
        out.push_str(&columns.join(","));
        out.push('\n');
        for row in &self.results {
            let empty = Map::new();
            let m = row.as_object().unwrap_or(&empty);
            let cells: Vec<String> = columns.iter().map(|c| cell(m.get(c))).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::Number(n)) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => format!("{f:.16e}"),
            _ => n.to_string(),
        },
        Some(Value::String(s)) => quote(s),
        Some(Value::Bool(b)) => b.to_string(),
        Some(other) => quote(&other.to_string()),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit(text: &str, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}
