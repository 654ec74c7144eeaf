//! Browser bindings for the demo page. Every export takes plain strings or
//! numbers and returns a JSON string; the `*_json` functions hold the logic
//! so they can be tested natively.

use cifc::bounds::{capacity_det, search_frontier, BoundKind, SearchConfig};
use cifc::format::round_json;
use cifc::polytope::linspace_weights;
use cifc::prob::compose_with_channel;
use cifc::schemes::{emit_table, verify_zero_error, BuiltinScheme};
use cifc::{BuiltinChannel, JointPmf, Role};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn builtin(name: &str) -> Result<BuiltinChannel, String> {
    name.parse().map_err(|e| format!("{e}"))
}

fn finish(mut v: Value) -> String {
    round_json(&mut v);
    v.to_string()
}

/// Input alphabet sizes of a built-in channel.
pub fn channel_info_json(channel: &str) -> Result<String, String> {
    let c = builtin(channel)?.cards();
    Ok(json!({"x1": c.x1, "x2": c.x2, "y1": c.y1, "y2": c.y2}).to_string())
}

/// Deterministic-channel capacity region at the input law given by
/// `weights`: `|X1|·|X2|` non-negative numbers, `x1` major, normalized here.
pub fn det_region_json(channel: &str, weights: &str) -> Result<String, String> {
    let b = builtin(channel)?;
    let c = b.cards();
    let w: Vec<f64> = weights
        .split(|ch: char| ch.is_whitespace() || ch == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| format!("'{s}' is not a number"))
        })
        .collect::<Result<_, _>>()?;
    if w.len() != c.x1 * c.x2 {
        return Err(format!("expected {} weights, got {}", c.x1 * c.x2, w.len()));
    }
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err("weights must be non-negative".into());
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err("weights must not all be zero".into());
    }
    let p = JointPmf::from_table(
        w.iter().map(|v| v / total).collect(),
        &[(Role::X1, c.x1), (Role::X2, c.x2)],
    )
    .map_err(|e| e.to_string())?;
    let ch = b.channel();
    let region = capacity_det(&ch, &p).map_err(|e| e.to_string())?;
    let joint = compose_with_channel(&p, &ch).map_err(|e| e.to_string())?;
    let h = |r: Role| {
        joint
            .entropy(&[r], &[])
            .map(|b| b.value())
            .unwrap_or(f64::NAN)
    };
    Ok(finish(json!({
        "region": region.to_json_value(),
        "H(Y1)": h(Role::Y1),
        "H(Y2)": h(Role::Y2),
    })))
}

/// Weighted-sum frontier of `bound` with `n_weights` evenly spaced weights.
pub fn frontier_json(
    channel: &str,
    bound: &str,
    budget: usize,
    seed: u64,
    n_weights: usize,
) -> Result<String, String> {
    let ch = builtin(channel)?.channel();
    let bound: BoundKind = bound.parse().map_err(|e| format!("{e}"))?;
    if budget == 0 || n_weights < 2 {
        return Err("budget must be at least 1 and weights at least 2".into());
    }
    let cfg = SearchConfig {
        weights: linspace_weights(n_weights),
        budget,
        seed,
        ..SearchConfig::default()
    };
    let pts = search_frontier(&ch, bound, &cfg).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = pts
        .iter()
        .map(|p| json!({"lambda": p.lambda, "R1": p.point.0, "R2": p.point.1, "value": p.value}))
        .collect();
    Ok(finish(Value::Array(rows)))
}

/// Encoder/decoder table of a built-in zero-error scheme and its verdict.
pub fn scheme_table_json(name: &str) -> Result<String, String> {
    let s: BuiltinScheme = name.parse().map_err(|e| format!("{e}"))?;
    let ch = s.channel().channel();
    let table = s.table();
    let rows = emit_table(&ch, &table).map_err(|e| e.to_string())?;
    let v = verify_zero_error(&ch, &table).map_err(|e| e.to_string())?;
    Ok(finish(json!({
        "scheme": s.name(),
        "channel": s.channel().name(),
        "rates": [v.rates.0, v.rates.1],
        "ok": v.ok,
        "rows": rows,
    })))
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn channel_info(channel: &str) -> Result<String, JsValue> {
    js(channel_info_json(channel))
}

#[wasm_bindgen]
pub fn det_region(channel: &str, weights: &str) -> Result<String, JsValue> {
    js(det_region_json(channel, weights))
}

#[wasm_bindgen]
pub fn frontier(
    channel: &str,
    bound: &str,
    budget: u32,
    seed: u32,
    n_weights: u32,
) -> Result<String, JsValue> {
    js(frontier_json(
        channel,
        bound,
        budget as usize,
        seed as u64,
        n_weights as usize,
    ))
}

#[wasm_bindgen]
pub fn scheme_table(name: &str) -> Result<String, JsValue> {
    js(scheme_table_json(name))
}
