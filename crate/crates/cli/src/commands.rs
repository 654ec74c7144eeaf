use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cifc::bounds::{
    classify_regime, search_frontier, Binning, BoundKind, BoundsError, FrontierPoint, SearchConfig,
};
use cifc::format::{fmt_num, round_json};
use cifc::polytope::{frontier_csv, FrontierSample};
use cifc::schemes::{emit_table, scheme_from_csv, table_csv, verify_zero_error, BuiltinScheme};
use cifc::{CifcChannel, Role};
use serde_json::{json, Value};

use crate::args::{BinningArg, ClassifyArgs, Command, EvalArgs, Format, FrontierArgs, VerifyArgs};
use crate::inputs::{load_channel, parse_assignment, parse_aux_cards, parse_weights};
use crate::{eval_err, input_err, Cli, CliError};

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval(a) => cmd_eval(&a),
        Command::Frontier(a) => cmd_frontier(&a),
        Command::Classify(a) => cmd_classify(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(mut v: Value) -> String {
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn bound_of(name: &str) -> Result<BoundKind, CliError> {
    name.parse()
        .map_err(|e: BoundsError| CliError::Input(e.to_string()))
}

fn binning(b: BinningArg) -> Binning {
    match b {
        BinningArg::Joint => Binning::Joint,
        BinningArg::TwoStep => Binning::TwoStep,
    }
}

fn bounds_err(e: BoundsError) -> CliError {
    match e {
        BoundsError::FactorizationMismatch(_) | BoundsError::BadCoupling(_) => input_err(e),
        _ => eval_err(e),
    }
}

/// Writes the region's constraints and vertices.
pub fn cmd_eval(a: &EvalArgs) -> Result<(), CliError> {
    let ch = load_channel(&a.common.channel)?;
    let bound = bound_of(&a.bound)?;
    bound.supports(&ch).map_err(eval_err)?;
    let assignment = parse_assignment(
        a.assignment.as_deref(),
        a.input.as_deref(),
        &ch,
        bound.factorization(),
    )?;
    let region = bound
        .evaluate(&ch, &assignment, binning(a.binning))
        .map_err(bounds_err)?;
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Json => json_text(region.to_json_value()),
        Format::Csv => {
            let mut s = String::from("R1,R2\n");
            for &(r1, r2) in region.vertices() {
                let _ = writeln!(s, "{},{}", fmt_num(r1), fmt_num(r2));
            }
            s
        }
    };
    write_output(a.common.out.as_deref(), &text)
}

fn effective_cards(bound: BoundKind, ch: &CifcChannel, cfg: &SearchConfig) -> Vec<(Role, usize)> {
    bound
        .default_aux_cards(ch.cards())
        .into_iter()
        .map(|(r, k)| (r, cfg.aux_cards.get(&r).copied().unwrap_or(k)))
        .collect()
}

fn frontier_json(points: &[FrontierPoint]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| {
                json!({
                    "lambda": p.lambda,
                    "R1": p.point.0,
                    "R2": p.point.1,
                    "value": p.value,
                    "seed": p.seed,
                    "assignment": p.assignment,
                })
            })
            .collect(),
    )
}

/// Frontier CSV (or JSON with the maximizing laws) plus a `<out>.meta.json`
/// sidecar when writing to a file.
pub fn cmd_frontier(a: &FrontierArgs) -> Result<(), CliError> {
    let ch = load_channel(&a.common.channel)?;
    let bound = bound_of(&a.bound)?;
    if a.budget == 0 {
        return Err(CliError::Input("--budget must be at least 1".into()));
    }
    let cfg = SearchConfig {
        aux_cards: parse_aux_cards(a.aux_cards.as_deref())?,
        weights: parse_weights(&a.weights)?,
        budget: a.budget,
        seed: a.seed,
        binning: binning(a.binning),
        ..SearchConfig::default()
    };
    let points = search_frontier(&ch, bound, &cfg).map_err(eval_err)?;
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let samples: Vec<FrontierSample> = points
                .iter()
                .enumerate()
                .map(|(k, p)| FrontierSample {
                    lambda: p.lambda,
                    point: p.point,
                    value: p.value,
                    region: k,
                })
                .collect();
            frontier_csv(&samples)
        }
        Format::Json => json_text(frontier_json(&points)),
    };
    write_output(a.common.out.as_deref(), &text)?;
    if let Some(out) = &a.common.out {
        let cards: serde_json::Map<String, Value> = effective_cards(bound, &ch, &cfg)
            .into_iter()
            .map(|(r, k)| (r.to_string(), Value::from(k)))
            .collect();
        let meta = json!({
            "command": "frontier",
            "channel": a.common.channel,
            "bound": bound.name(),
            "seed": cfg.seed,
            "budget": cfg.budget,
            "weights": cfg.weights,
            "binning": format!("{:?}", cfg.binning),
            "sweep_cap": cfg.sweep_cap,
            "aux_cardinalities": cards,
        });
        let mut path = out.clone().into_os_string();
        path.push(".meta.json");
        write_output(Some(Path::new(&path)), &json_text(meta))?;
    }
    Ok(())
}

/// Regime report; violated conditions are results, not errors.
pub fn cmd_classify(a: &ClassifyArgs) -> Result<(), CliError> {
    let ch = load_channel(&a.common.channel)?;
    let cards = parse_aux_cards(a.aux_cards.as_deref())?;
    if let Some(r) = cards.keys().find(|r| **r != Role::U) {
        return Err(CliError::Input(format!("classify only takes U=K, got {r}")));
    }
    let c = ch.cards();
    let aux = cards.get(&Role::U).copied().unwrap_or(c.x1 * c.x2);
    if a.budget == 0 {
        return Err(CliError::Input("--budget must be at least 1".into()));
    }
    let report = classify_regime(&ch, aux, a.budget, a.seed).map_err(eval_err)?;
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Json => json_text(serde_json::to_value(&report).map_err(eval_err)?),
        Format::Csv => {
            let mut s = String::from("condition,status,violation,aux_cardinality,evaluations\n");
            for r in &report.conditions {
                let status = serde_json::to_value(r.status).map_err(eval_err)?;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.condition,
                    status.as_str().unwrap_or_default(),
                    fmt_num(r.violation),
                    r.aux_cardinality.map(|k| k.to_string()).unwrap_or_default(),
                    r.evaluations
                );
            }
            s
        }
    };
    write_output(a.common.out.as_deref(), &text)
}

/// Exhaustive zero-error check; exit code 4 when any pair fails.
pub fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let (scheme, ch, channel_name) = match a.scheme.parse::<BuiltinScheme>() {
        Ok(b) => {
            let (ch, name) = match &a.channel {
                Some(spec) => (load_channel(spec)?, spec.clone()),
                None => (
                    b.channel().channel(),
                    format!("builtin:{}", b.channel().name()),
                ),
            };
            (b.table(), ch, name)
        }
        Err(_) => {
            let spec = a.channel.as_ref().ok_or_else(|| {
                CliError::Input(format!(
                    "'{}' is not a built-in scheme; pass --channel for a scheme file",
                    a.scheme
                ))
            })?;
            let ch = load_channel(spec)?;
            let text = fs::read_to_string(&a.scheme)
                .map_err(|e| CliError::Input(format!("{}: {e}", a.scheme)))?;
            (
                scheme_from_csv(&a.scheme, &text, &ch).map_err(input_err)?,
                ch,
                spec.clone(),
            )
        }
    };
    let v = verify_zero_error(&ch, &scheme).map_err(input_err)?;
    let text = match a.format {
        None => {
            let mut s = String::new();
            let _ = writeln!(s, "scheme {} on {channel_name}", scheme.name());
            let _ = writeln!(s, "rates {},{}", fmt_num(v.rates.0), fmt_num(v.rates.1));
            if v.ok {
                s.push_str("ok\n");
            } else {
                for r in &v.failures {
                    let _ = writeln!(
                        s,
                        "failure (w1={}, w2={}) -> (x1={}, x2={}) -> (y1={}, y2={}) decoded {:?}",
                        r.w1,
                        r.w2,
                        r.x1,
                        r.x2,
                        r.y1,
                        r.y2,
                        (r.w1_hat, r.w2_hat)
                    );
                }
                for (p, q) in &v.collisions {
                    let _ = writeln!(s, "collision {p:?} and {q:?} send the same inputs");
                }
            }
            s
        }
        Some(Format::Json) => json_text(serde_json::to_value(&v).map_err(eval_err)?),
        Some(Format::Csv) => table_csv(&emit_table(&ch, &scheme).map_err(input_err)?),
    };
    write_output(a.out.as_deref(), &text)?;
    if v.ok {
        Ok(())
    } else {
        Err(CliError::Verify(format!(
            "{} failing pairs, {} collisions",
            v.failures.len(),
            v.collisions.len()
        )))
    }
}
