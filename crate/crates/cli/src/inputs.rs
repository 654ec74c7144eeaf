//! Channel, input-law, assignment and option parsing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cifc::bounds::{AuxAssignment, Factorization};
use cifc::channel::example_two_input;
use cifc::polytope::linspace_weights;
use cifc::{CifcChannel, JointPmf, Role};

use crate::{input_err, CliError};

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(Path::new(path)).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

/// `builtin:NAME` or a channel JSON file.
pub fn load_channel(spec: &str) -> Result<CifcChannel, CliError> {
    match spec.strip_prefix("builtin:") {
        Some(name) => CifcChannel::builtin(name).map_err(input_err),
        None => CifcChannel::from_json(&read(spec)?)
            .map_err(|e| CliError::Input(format!("{spec}: {e}"))),
    }
}

fn pmf_file(path: &str) -> Result<JointPmf, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn inputs(ch: &CifcChannel) -> [(Role, usize); 2] {
    let c = ch.cards();
    [(Role::X1, c.x1), (Role::X2, c.x2)]
}

fn check_inputs(p: &JointPmf, ch: &CifcChannel) -> Result<(), CliError> {
    for (role, card) in inputs(ch) {
        match p.card(role) {
            Some(k) if k == card => {}
            Some(k) => {
                return Err(CliError::Input(format!(
                    "{role} has {k} symbols, the channel expects {card}"
                )))
            }
            None => return Err(CliError::Input(format!("input law has no {role} axis"))),
        }
    }
    Ok(())
}

/// `uniform:AxB`, `table:exII`, `pointmass:i,j` or a PMF JSON file.
pub fn parse_input(spec: &str, ch: &CifcChannel) -> Result<JointPmf, CliError> {
    let axes = inputs(ch);
    let p = if let Some(dims) = spec.strip_prefix("uniform:") {
        let (a, b) = dims
            .split_once('x')
            .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
            .ok_or_else(|| CliError::Input(format!("'{spec}': expected uniform:AxB")))?;
        if (a, b) != (axes[0].1, axes[1].1) {
            return Err(CliError::Input(format!(
                "'{spec}' does not match the channel inputs {}x{}",
                axes[0].1, axes[1].1
            )));
        }
        JointPmf::uniform(&axes).map_err(input_err)?
    } else if let Some(name) = spec.strip_prefix("table:") {
        match name {
            "exII" => example_two_input(),
            _ => return Err(CliError::Input(format!("unknown input table '{name}'"))),
        }
    } else if let Some(at) = spec.strip_prefix("pointmass:") {
        let idx: Vec<usize> = at
            .split(',')
            .map(|v| v.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Input(format!("'{spec}': expected pointmass:i,j")))?;
        if idx.len() != 2 {
            return Err(CliError::Input(format!("'{spec}': expected pointmass:i,j")));
        }
        JointPmf::point_mass(&axes, &idx).map_err(input_err)?
    } else {
        pmf_file(spec)?
    };
    check_inputs(&p, ch)?;
    Ok(p)
}

/// Extends `input` with auxiliaries that copy a function of the inputs:
/// `map:U=y2,U1pb=x1`. Sources are `const`, `x1`, `x2`, `x1x2`, `y1`, `y2`;
/// the output sources need a deterministic output.
fn mapped_assignment(spec: &str, input: &JointPmf, ch: &CifcChannel) -> Result<JointPmf, CliError> {
    let c = ch.cards();
    let mut p = input.clone();
    for item in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (role, src) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("'{item}': expected ROLE=SOURCE")))?;
        let role: Role = role.trim().parse().map_err(input_err)?;
        let table = |f: Option<Vec<Vec<usize>>>, which: &str| {
            f.ok_or_else(|| CliError::Input(format!("{which} is not a deterministic output")))
        };
        let (card, f): (usize, Box<dyn Fn(usize, usize) -> usize>) = match src.trim() {
            "const" => (1, Box::new(|_, _| 0)),
            "x1" => (c.x1, Box::new(|a, _| a)),
            "x2" => (c.x2, Box::new(|_, b| b)),
            "x1x2" => (c.x1 * c.x2, Box::new(move |a, b| a * c.x2 + b)),
            "y1" => {
                let t = table(ch.f1(), "Y1")?;
                (c.y1, Box::new(move |a, b| t[a][b]))
            }
            "y2" => {
                let t = table(ch.f2(), "Y2")?;
                (c.y2, Box::new(move |a, b| t[a][b]))
            }
            other => {
                return Err(CliError::Input(format!(
                    "unknown auxiliary source '{other}'"
                )))
            }
        };
        let (ax1, ax2) = (p.axis_of(Role::X1).unwrap(), p.axis_of(Role::X2).unwrap());
        p = p
            .extend_deterministic(role, card, |i| f(i[ax1], i[ax2]))
            .map_err(input_err)?;
    }
    Ok(p)
}

/// Builds the assignment a bound is evaluated at. Bounds over the inputs
/// alone accept `--input` by itself.
pub fn parse_assignment(
    assignment: Option<&str>,
    input: Option<&str>,
    ch: &CifcChannel,
    factorization: Factorization,
) -> Result<AuxAssignment, CliError> {
    let input = input.map(|s| parse_input(s, ch)).transpose()?;
    let pmf = match (assignment, input) {
        (Some(spec), input) => match spec.strip_prefix("map:") {
            Some(maps) => {
                let base = input
                    .ok_or_else(|| CliError::Input("a map: assignment needs --input".into()))?;
                mapped_assignment(maps, &base, ch)?
            }
            None => {
                let p = pmf_file(spec)?;
                check_inputs(&p, ch)?;
                p
            }
        },
        (None, Some(p)) if factorization == Factorization::Generic => p,
        (None, Some(_)) => {
            return Err(CliError::Input(format!(
                "this bound needs auxiliaries: pass --assignment ({factorization:?} factorization)"
            )))
        }
        (None, None) => return Err(CliError::Input("pass --input or --assignment".into())),
    };
    AuxAssignment::new(pmf, factorization).map_err(input_err)
}

/// `ROLE=K[,ROLE=K...]`
pub fn parse_aux_cards(spec: Option<&str>) -> Result<BTreeMap<Role, usize>, CliError> {
    let mut out = BTreeMap::new();
    for item in spec
        .unwrap_or("")
        .split(',')
        .filter(|s| !s.trim().is_empty())
    {
        let (role, k) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("'{item}': expected ROLE=K")))?;
        let role: Role = role.trim().parse().map_err(input_err)?;
        let k: usize =
            k.trim().parse().ok().filter(|&k| k > 0).ok_or_else(|| {
                CliError::Input(format!("'{item}': K must be a positive integer"))
            })?;
        out.insert(role, k);
    }
    Ok(out)
}

/// A weight count (at least 2) or an explicit list of weights in `[0, 1]`.
pub fn parse_weights(spec: &str) -> Result<Vec<f64>, CliError> {
    if !spec.contains(',') {
        if let Ok(n) = spec.trim().parse::<usize>() {
            if n < 2 {
                return Err(CliError::Input("at least 2 weights are needed".into()));
            }
            return Ok(linspace_weights(n));
        }
    }
    let w: Vec<f64> = spec
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("'{spec}': expected a count or a list of weights")))?;
    if w.len() < 2 || w.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(CliError::Input(
            "weights must be at least 2 values in [0, 1]".into(),
        ));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cifc::BuiltinChannel;

    #[test]
    fn input_shorthands() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        assert_eq!(parse_input("uniform:4x8", &ch).unwrap().len(), 32);
        assert!(parse_input("uniform:2x8", &ch).is_err());
        let p = parse_input("pointmass:1,7", &ch).unwrap();
        assert_eq!(p.prob(&[1, 7]), 1.0);
        assert!(parse_input("table:exII", &ch).is_err());
        let sym = BuiltinChannel::SymmetricClipper.channel();
        assert!(parse_input("table:exII", &sym).is_ok());
    }

    #[test]
    fn mapped_auxiliaries() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let a = parse_assignment(
            Some("map:U=y2"),
            Some("uniform:4x8"),
            &ch,
            Factorization::Wu,
        )
        .unwrap();
        assert_eq!(a.pmf().card(Role::U), Some(8));
        assert!(parse_assignment(None, Some("uniform:4x8"), &ch, Factorization::Wu).is_err());
        assert!(
            parse_assignment(Some("map:U=z"), Some("uniform:4x8"), &ch, Factorization::Wu).is_err()
        );
    }

    #[test]
    fn weights_and_cards() {
        assert_eq!(parse_weights("3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_weights("0.2,0.8").unwrap(), vec![0.2, 0.8]);
        assert!(parse_weights("1").is_err());
        assert!(parse_weights("0.5,2").is_err());
        let c = parse_aux_cards(Some("U=3,U1pb=2")).unwrap();
        assert_eq!(c[&Role::U], 3);
        assert!(parse_aux_cards(Some("U=0")).is_err());
    }
}
