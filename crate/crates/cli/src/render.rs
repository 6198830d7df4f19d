use std::fmt::Write;

use serde_json::{json, Map, Value};

use crate::commands::Report;

fn envelope(report: &Report, wall_time_s: f64) -> Value {
    json!({
        "command": report.command,
        "ok": report.ok,
        "parameters": report.parameters,
        "result": report.result,
        "wall_time_s": wall_time_s,
    })
}

pub fn json(report: &Report, wall_time_s: f64) -> String {
    let mut s = serde_json::to_string_pretty(&envelope(report, wall_time_s)).expect("json");
    s.push('\n');
    s
}

/// Indented `key: value` listing; arrays of scalars stay on one line.
pub fn text(report: &Report, wall_time_s: f64) -> String {
    let mut out = String::new();
    if let Value::Object(map) = envelope(report, wall_time_s) {
        write_map(&mut out, &map, 0);
    }
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(is_flat),
        Value::Object(_) => false,
        _ => true,
    }
}

fn write_map(out: &mut String, map: &Map<String, Value>, depth: usize) {
    for (k, v) in map {
        write_entry(out, k, v, depth);
    }
}

fn write_entry(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Value::String(s) = v {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    if is_flat(v) {
        let _ = writeln!(out, "{pad}{key}: {v}");
        return;
    }
    let _ = writeln!(out, "{pad}{key}:");
    match v {
        Value::Object(m) => write_map(out, m, depth + 1),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                write_entry(out, &format!("[{i}]"), item, depth + 1);
            }
        }
        _ => unreachable!(),
    }
}
