//! Structured text output: the one document format every subcommand emits.
//!
//! Documents render as TOML so the same parser reads CLI output, registry
//! files and other inputs. Floats are printed to a configurable number of
//! significant digits; everything else is printed verbatim, and field
//! order is insertion order, so output is byte-stable for fixed inputs.

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<Value>),
    /// Inline table `{ k = v, ... }`.
    Inline(Vec<(String, Value)>),
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}
impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}
impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_owned())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    fields: Vec<(String, Value)>,
    sections: Vec<(String, Document)>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_owned(), value.into()));
        self
    }

    pub fn push_section(&mut self, name: &str, section: Document) -> &mut Self {
        self.sections.push((name.to_owned(), section));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty() && self.sections.is_empty()
    }

    pub fn render(&self, digits: usize) -> String {
        let mut out = String::new();
        self.render_into("", &mut out, digits);
        out
    }

    fn render_into(&self, path: &str, out: &mut String, digits: usize) {
        for (key, value) in &self.fields {
            push_key(key, out);
            out.push_str(" = ");
            render_value(value, out, digits);
            out.push('\n');
        }
        for (name, section) in &self.sections {
            let mut quoted = String::new();
            push_key(name, &mut quoted);
            let section_path = if path.is_empty() {
                quoted
            } else {
                format!("{path}.{quoted}")
            };
            if !out.is_empty() {
                out.push('\n');
            }
            out.push('[');
            out.push_str(&section_path);
            out.push_str("]\n");
            section.render_into(&section_path, out, digits);
        }
    }
}

/// Bare keys where TOML allows it, quoted otherwise.
fn push_key(key: &str, out: &mut String) {
    let bare = !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if bare {
        out.push_str(key);
    } else {
        render_value(&Value::Str(key.to_owned()), out, 1);
    }
}

fn render_value(value: &Value, out: &mut String, digits: usize) {
    match value {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(i) => out.push_str(&i.to_string()),
        Value::Float(x) => out.push_str(&format_significant(*x, digits)),
        Value::Str(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    c => out.push(c),
                }
            }
            out.push('"');
        }
        Value::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_value(item, out, digits);
            }
            out.push(']');
        }
        Value::Inline(fields) => {
            out.push_str("{ ");
            for (i, (key, item)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                push_key(key, out);
                out.push_str(" = ");
                render_value(item, out, digits);
            }
            out.push_str(" }");
        }
    }
}

/// Print `x` with the given number of significant digits, as plain decimal
/// where reasonable and exponent notation otherwise. Trailing zeros are
/// trimmed but a decimal point is kept, so the token still parses as a
/// float.
pub fn format_significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0.0".to_owned();
    }
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_owned() } else { "-inf".to_owned() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("e-format always has exponent");
    let exponent: i32 = exponent.parse().expect("valid exponent");
    if exponent >= -4 && exponent < digits as i32 + 3 {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        let plain = format!("{:.*}", decimals, x);
        trim_float(plain)
    } else {
        format!("{}e{}", trim_float(mantissa.to_owned()), exponent)
    }
}

fn trim_float(mut s: String) -> String {
    if !s.contains('.') {
        s.push_str(".0");
        return s;
    }
    while s.ends_with('0') && !s.ends_with(".0") {
        s.pop();
    }
    s
}
