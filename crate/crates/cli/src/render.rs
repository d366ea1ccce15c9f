//! Shared formatting: states as project-index arrays in JSON and as labels in
//! text, optional grouping by relabeling class.

use std::fmt::Write;

use num_rational::Rational64;
use serde_json::{json, Value};
use teamform_core::report::format_real;
use teamform_core::{Model, StateSpace, Utility};

pub fn state_json(space: &StateSpace, x: usize) -> Value {
    json!(space.state(x).indices())
}

pub fn states_json(space: &StateSpace, xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| state_json(space, x)).collect())
}

pub fn rational_json(r: Rational64) -> Value {
    json!({"num": r.numer(), "den": r.denom()})
}

pub fn real_json(v: f64) -> Value {
    Value::String(format_real(v))
}

pub fn utility_json(u: Utility) -> Value {
    match u {
        Utility::Exact(r) => rational_json(r),
        Utility::Real(v) => real_json(v),
    }
}

pub fn label(model: &Model, space: &StateSpace, x: usize) -> String {
    model.state_label(space.state(x))
}

/// Class summary: one entry per class with a representative and a count.
pub fn classes_json(space: &StateSpace, xs: &[usize]) -> Value {
    Value::Array(
        space
            .group_by_class(xs)
            .iter()
            .map(|g| json!({"representative": state_json(space, g[0]), "count": g.len()}))
            .collect(),
    )
}

/// Text listing of `xs`, one state per line, or one class per line.
pub fn states_text(model: &Model, space: &StateSpace, xs: &[usize], classes: bool) -> String {
    let mut out = String::new();
    if classes {
        for g in space.group_by_class(xs) {
            let _ = writeln!(out, "  {} ×{}", label(model, space, g[0]), g.len());
        }
    } else {
        for &x in xs {
            let _ = writeln!(out, "  {}", label(model, space, x));
        }
    }
    out
}

/// Add a `classes` entry to a JSON object when requested.
pub fn with_classes(mut obj: Value, space: &StateSpace, xs: &[usize], classes: bool) -> Value {
    if classes {
        obj["classes"] = classes_json(space, xs);
    }
    obj
}
