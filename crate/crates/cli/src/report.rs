//! Report assembly and the three output formats.

use std::io;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

pub const TOOL_VERSION: &str = concat!("grav ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
}

/// Every command produces one of these. Map keys are sorted, so output order is stable.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub config: RunConfig,
    pub quantities: Map<String, Value>,
    pub residuals: Map<String, Value>,
    pub verdicts: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Diagnostic>,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Self {
            tool_version: TOOL_VERSION,
            config,
            quantities: Map::new(),
            residuals: Map::new(),
            verdicts: Vec::new(),
            error: None,
        }
    }

    pub fn quantity(&mut self, key: &str, value: impl Serialize) {
        self.quantities.insert(key.into(), to_value(value));
    }

    pub fn residual(&mut self, key: &str, value: impl Serialize) {
        self.residuals.insert(key.into(), to_value(value));
    }

    pub fn verdict(&mut self, value: impl Serialize) {
        self.verdicts.push(to_value(value));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => to_csv(self),
            Format::Pretty => to_pretty(self),
        }
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values are plain data")
}

/// JSON formatter that writes every double with 17 significant digits.
struct Precise(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", float(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn float(v: f64) -> String {
    // Fold −0 into 0 so sign noise from cancellations does not show.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report values are plain data");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Leaves of a JSON tree as (dotted path, text) pairs.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::Number(n) => {
            let text = match (n.as_i64(), n.as_u64(), n.as_f64()) {
                (Some(i), _, _) => i.to_string(),
                (_, Some(u), _) => u.to_string(),
                (_, _, Some(f)) => float(f),
                _ => n.to_string(),
            };
            out.push((prefix.to_string(), text));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Null => out.push((prefix.to_string(), "null".into())),
    }
}

fn sections(report: &Report) -> Vec<(&'static str, Vec<(String, String)>)> {
    let tree = serde_json::to_value(report).expect("report values are plain data");
    let mut out = Vec::new();
    for name in ["tool_version", "config", "quantities", "residuals", "verdicts", "error"] {
        if let Some(v) = tree.get(name) {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            out.push((name, rows));
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_csv(report: &Report) -> String {
    let mut s = String::from("section,key,value\n");
    for (section, rows) in sections(report) {
        for (k, v) in rows {
            s.push_str(&format!("{section},{},{}\n", csv_field(&k), csv_field(&v)));
        }
    }
    s
}

fn to_pretty(report: &Report) -> String {
    let mut s = String::new();
    for (section, rows) in sections(report) {
        if section == "tool_version" {
            s.push_str(&format!("{}\n", report.tool_version));
            continue;
        }
        if rows.is_empty() {
            continue;
        }
        s.push_str(&format!("\n[{section}]\n"));
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            s.push_str(&format!("  {k:<width$}  {v}\n"));
        }
    }
    s
}
