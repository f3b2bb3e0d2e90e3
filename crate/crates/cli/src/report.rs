//! Key/value reports rendered as text lines or a JSON object.

use std::io::Write;
use std::path::Path;

use lqu_core::linalg::CMatrix;
use lqu_core::sweep::format_float;
use serde_json::{json, Map, Value};

use crate::commands::CliError;
use crate::OutputFormat;

#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, Entry)>,
}

#[derive(Debug)]
enum Entry {
    Number(f64),
    Integer(usize),
    Text(String),
    List(Vec<f64>),
    Matrix(CMatrix),
}

impl Report {
    pub fn number(&mut self, key: &str, v: f64) -> &mut Self {
        self.entries.push((key.to_string(), Entry::Number(v)));
        self
    }

    pub fn integer(&mut self, key: &str, v: usize) -> &mut Self {
        self.entries.push((key.to_string(), Entry::Integer(v)));
        self
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) -> &mut Self {
        self.entries.push((key.to_string(), Entry::Text(v.into())));
        self
    }

    pub fn list(&mut self, key: &str, v: &[f64]) -> &mut Self {
        self.entries.push((key.to_string(), Entry::List(v.to_vec())));
        self
    }

    pub fn matrix(&mut self, key: &str, m: &CMatrix) -> &mut Self {
        self.entries.push((key.to_string(), Entry::Matrix(m.clone())));
        self
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, e) in &self.entries {
            match e {
                Entry::Number(v) => out.push_str(&format!("{k}: {}\n", format_float(*v))),
                Entry::Integer(v) => out.push_str(&format!("{k}: {v}\n")),
                Entry::Text(s) => out.push_str(&format!("{k}: {s}\n")),
                Entry::List(v) => {
                    let items: Vec<String> = v.iter().map(|x| format_float(*x)).collect();
                    out.push_str(&format!("{k}: [{}]\n", items.join(", ")));
                }
                Entry::Matrix(m) => {
                    out.push_str(&format!("{k}:\n"));
                    for i in 0..m.nrows() {
                        let row: Vec<String> = (0..m.ncols())
                            .map(|j| format!("{:+.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im))
                            .collect();
                        out.push_str(&format!("  {}\n", row.join("  ")));
                    }
                }
            }
        }
        out
    }

    fn to_json(&self) -> String {
        let mut map = Map::new();
        for (k, e) in &self.entries {
            let v = match e {
                Entry::Number(v) => json!(v),
                Entry::Integer(v) => json!(v),
                Entry::Text(s) => json!(s),
                Entry::List(v) => json!(v),
                Entry::Matrix(m) => lqu_core::io::matrix_to_value(m),
            };
            map.insert(k.clone(), v);
        }
        serde_json::to_string_pretty(&Value::Object(map)).expect("report is serializable") + "\n"
    }

    /// Text for the default or csv format, a JSON object for json.
    pub fn render(&self, format: Option<OutputFormat>) -> String {
        match format {
            Some(OutputFormat::Json) => self.to_json(),
            _ => self.to_text(),
        }
    }
}

pub fn emit(contents: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => lqu_core::io::write_file(path, contents).map_err(CliError::Input),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| {
                    CliError::Input(lqu_core::LquError::Io {
                        path: "<stdout>".into(),
                        source: e,
                    })
                })
        }
    }
}
