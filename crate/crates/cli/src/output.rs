//! Deterministic JSON rendering for reports.
//!
//! Every report prints through this module so that identical runs produce
//! byte-identical output: floats are rendered in scientific notation with
//! 12 significant digits, object keys are sorted (serde_json's default map
//! ordering), indentation is two spaces, and short arrays collapse onto a
//! single line. Integers (dimensions, counts, the schema tag) stay plain.

use serde_json::{Map, Number, Value};

use mapnorm::channels::{Classification, LinearMapRep};
use mapnorm::linalg::{ComplexMatrix, HermitianOperator};
use mapnorm::measures::{MeasureResult, Witness, WitnessSet};

/// Version tag stamped into every JSON report.
pub const SCHEMA: u64 = 1;

/// Arrays whose one-line rendering fits in this many characters stay inline.
const INLINE_LIMIT: usize = 100;

/// Scientific notation with 12 significant digits; `0.0` for zero of
/// either sign.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        "0.0".to_owned()
    } else {
        format!("{v:.11e}")
    }
}

/// JSON number from a finite float (report values are certified finite).
pub fn float_value(v: f64) -> Value {
    Value::Number(Number::from_f64(v).expect("report floats are finite"))
}

/// JSON value for a complex matrix: a list of rows, each a list of
/// `[re, im]` pairs — the same layout the channel file format uses.
pub fn matrix_value(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<Value> = (0..m.cols())
                .map(|j| {
                    let z = m.at(i, j);
                    Value::Array(vec![float_value(z.re), float_value(z.im)])
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

/// JSON value for a Hermitian operator (matrix layout).
pub fn operator_value(h: &HermitianOperator) -> Value {
    matrix_value(h.matrix())
}

/// JSON object mapping witness names to matrices or scalars.
pub fn witness_value(w: &WitnessSet) -> Value {
    let mut map = Map::new();
    for (name, item) in w.iter() {
        let v = match item {
            Witness::Operator(op) => operator_value(op),
            Witness::Scalar(s) => float_value(*s),
        };
        map.insert(name.to_owned(), v);
    }
    Value::Object(map)
}

/// JSON object for a map classification at its stated tolerance.
pub fn classification_value(c: &Classification) -> Value {
    let mut map = Map::new();
    map.insert(
        "hermiticity_preserving".into(),
        Value::Bool(c.hermiticity_preserving),
    );
    map.insert("cp".into(), Value::Bool(c.cp));
    map.insert("tp".into(), Value::Bool(c.tp));
    map.insert("tni".into(), Value::Bool(c.tni));
    map.insert("proportional_tp".into(), Value::Bool(c.proportional_tp));
    map.insert("factor".into(), float_value(c.factor));
    map.insert("tolerance".into(), float_value(c.tolerance));
    Value::Object(map)
}

/// JSON object describing the channel under study.
pub fn channel_value(source: &str, map: &LinearMapRep, class_tol: f64) -> Value {
    let mut obj = Map::new();
    obj.insert("source".into(), Value::String(source.to_owned()));
    obj.insert("d_in".into(), Value::from(map.d_in() as u64));
    obj.insert("d_out".into(), Value::from(map.d_out() as u64));
    obj.insert(
        "classification".into(),
        classification_value(&map.classify(class_tol)),
    );
    Value::Object(obj)
}

/// JSON object for one certified measure result, witnesses included.
pub fn measure_result_value(r: &MeasureResult) -> Value {
    let mut map = Map::new();
    map.insert("measure".into(), Value::String(r.measure.clone()));
    map.insert("value".into(), float_value(r.value));
    map.insert("gap".into(), float_value(r.gap));
    map.insert("status".into(), Value::String(r.status.as_str().into()));
    map.insert("primal_witness".into(), witness_value(&r.primal_witness));
    map.insert("dual_witness".into(), witness_value(&r.dual_witness));
    Value::Object(map)
}

/// Render a JSON tree to its canonical textual form (trailing newline
/// included).
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn push_indent(out: &mut String, levels: usize) {
    for _ in 0..levels {
        out.push_str("  ");
    }
}

fn leaf_text(v: &Value) -> String {
    match v {
        Value::Null => "null".to_owned(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => number_text(n),
        Value::String(s) => quote(s),
        _ => unreachable!("leaf_text called on container"),
    }
}

fn number_text(n: &Number) -> String {
    if let Some(u) = n.as_u64() {
        return u.to_string();
    }
    if let Some(i) = n.as_i64() {
        return i.to_string();
    }
    format_f64(n.as_f64().expect("JSON number"))
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One-line rendering of a value, unless it contains a nonempty object or
/// exceeds [`INLINE_LIMIT`] characters.
fn inline_render(v: &Value) -> Option<String> {
    fn go(v: &Value, out: &mut String) -> bool {
        match v {
            Value::Object(map) if map.is_empty() => out.push_str("{}"),
            Value::Object(_) => return false,
            Value::Array(items) => {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    if !go(item, out) {
                        return false;
                    }
                }
                out.push(']');
            }
            leaf => out.push_str(&leaf_text(leaf)),
        }
        out.len() <= INLINE_LIMIT
    }
    let mut out = String::new();
    go(v, &mut out).then_some(out)
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if let Some(inline) = inline_render(v) {
                out.push_str(&inline);
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                push_indent(out, indent + 1);
                write_value(out, item, indent + 1);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            push_indent(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                push_indent(out, indent + 1);
                out.push_str(&quote(key));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                if k + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            push_indent(out, indent);
            out.push('}');
        }
        leaf => out.push_str(&leaf_text(leaf)),
    }
}
