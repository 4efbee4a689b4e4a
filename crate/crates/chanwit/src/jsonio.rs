//! JSON schemas for games, channels, and results.
//!
//! Games: `{"g": [[...], ...]}` with row-major real entries, or
//! `{"p": [...], "u": [[...], ...]}` for a prior and payoff function.
//!
//! Channels: `{"kind": "<name>", "params": {...}}` for named constructors,
//! or `{"kind": "kraus", "din": d, "dout": d', "ops": [matrix, ...]}` for a
//! raw Kraus list. Complex matrices are rows of `[re, im]` pairs.

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::channels::{Channel, DensityMatrix, Povm};
use crate::closedform::{Decoding, UtilityResult};
use crate::error::{Error, Result};
use crate::games::Game;
use crate::matcore::CMatrix;

type JsonMatrix = Vec<Vec<[f64; 2]>>;

fn matrix_from_json(m: &JsonMatrix) -> Result<CMatrix> {
    let rows: Vec<Vec<Complex64>> = m
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    CMatrix::from_rows(&rows)
}

/// Matrix as rows of [re, im] pairs.
pub fn matrix_to_json(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    json!(rows)
}

#[derive(Deserialize)]
struct GameSpec {
    g: Option<Vec<Vec<f64>>>,
    p: Option<Vec<f64>>,
    u: Option<Vec<Vec<f64>>>,
}

/// Parses a game from its JSON spec.
pub fn parse_game(text: &str) -> Result<Game> {
    let spec: GameSpec = serde_json::from_str(text)?;
    match (spec.g, spec.p, spec.u) {
        (Some(g), None, None) => Game::from_rows(&g),
        (None, Some(p), Some(u)) => Game::from_prior_payoff(&p, &u),
        _ => Err(Error::InvalidSpec {
            detail: "game spec needs either {\"g\": ...} or {\"p\": ..., \"u\": ...}".into(),
        }),
    }
}

#[derive(Deserialize)]
struct ChannelSpec {
    kind: String,
    #[serde(default)]
    params: Value,
    din: Option<usize>,
    dout: Option<usize>,
    ops: Option<JsonMatrix2>,
}

type JsonMatrix2 = Vec<JsonMatrix>;

fn param_f64(params: &Value, name: &str) -> Result<f64> {
    params
        .get(name)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::InvalidSpec {
            detail: format!("missing numeric parameter `{name}`"),
        })
}

fn param_usize(params: &Value, name: &str) -> Result<usize> {
    params
        .get(name)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| Error::InvalidSpec {
            detail: format!("missing integer parameter `{name}`"),
        })
}

fn param_matrix(params: &Value, name: &str) -> Result<CMatrix> {
    let raw = params.get(name).ok_or_else(|| Error::InvalidSpec {
        detail: format!("missing matrix parameter `{name}`"),
    })?;
    let m: JsonMatrix = serde_json::from_value(raw.clone())?;
    matrix_from_json(&m)
}

/// Parses a channel from its JSON spec.
pub fn parse_channel(text: &str) -> Result<Channel> {
    let spec: ChannelSpec = serde_json::from_str(text)?;
    let params = &spec.params;
    match spec.kind.as_str() {
        "identity" => Ok(Channel::identity(param_usize(params, "d")?)),
        "unitary" => Channel::unitary(&param_matrix(params, "u")?),
        "dephasing" => Channel::dephasing(param_f64(params, "lambda")?, param_usize(params, "d")?),
        "trace_class" => {
            let sigma = DensityMatrix::new(param_matrix(params, "sigma")?)?;
            Channel::trace_class(&sigma)
        }
        "erasure" => Channel::erasure(param_f64(params, "lambda")?, param_usize(params, "d")?),
        "qc" => {
            let raw = params.get("povm").ok_or_else(|| Error::InvalidSpec {
                detail: "missing POVM parameter `povm`".into(),
            })?;
            let mats: JsonMatrix2 = serde_json::from_value(raw.clone())?;
            let elements = mats
                .iter()
                .map(matrix_from_json)
                .collect::<Result<Vec<_>>>()?;
            Channel::qc(&Povm::new(elements)?)
        }
        "depolarizing" => {
            Channel::depolarizing(param_f64(params, "lambda")?, param_usize(params, "d")?)
        }
        "pauli" => {
            let raw = params.get("lambda").ok_or_else(|| Error::InvalidSpec {
                detail: "missing parameter `lambda` (4 weights)".into(),
            })?;
            let weights: Vec<f64> = serde_json::from_value(raw.clone())?;
            if weights.len() != 4 {
                return Err(Error::InvalidSpec {
                    detail: format!("pauli needs 4 weights, got {}", weights.len()),
                });
            }
            Channel::pauli([weights[0], weights[1], weights[2], weights[3]])
        }
        "ampdamp" | "amplitude_damping" => Channel::amplitude_damping(param_f64(params, "eta")?),
        "shifted_depolarizing" => {
            let sigma = DensityMatrix::new(param_matrix(params, "sigma")?)?;
            Channel::shifted_depolarizing(param_f64(params, "lambda")?, &sigma)
        }
        "cloning" | "cloning_1to2" => Channel::cloning_1to2(param_usize(params, "d")?),
        "kraus" => {
            let (din, dout, ops) = match (spec.din, spec.dout, &spec.ops) {
                (Some(din), Some(dout), Some(ops)) => (din, dout, ops),
                _ => {
                    return Err(Error::InvalidSpec {
                        detail: "kraus channel needs top-level `din`, `dout`, `ops`".into(),
                    })
                }
            };
            let kraus = ops
                .iter()
                .map(matrix_from_json)
                .collect::<Result<Vec<_>>>()?;
            Channel::from_kraus(din, dout, kraus)
        }
        other => Err(Error::InvalidSpec {
            detail: format!("unknown channel kind `{other}`"),
        }),
    }
}

/// Serializes a utility result, including any witnessing strategy.
pub fn utility_result_to_json(result: &UtilityResult) -> Value {
    let encoding = result.encoding.as_ref().map(|states| {
        states
            .iter()
            .map(|rho| matrix_to_json(rho.mat()))
            .collect::<Vec<_>>()
    });
    let decoding = result.decoding.as_ref().map(|d| match d {
        Decoding::Povm(povm) => json!({
            "type": "povm",
            "elements": povm.elements().iter().map(matrix_to_json).collect::<Vec<_>>(),
        }),
        Decoding::Classical(map) => json!({ "type": "classical", "map": map }),
        Decoding::Constant(y) => json!({ "type": "constant", "output": y }),
    });
    json!({
        "value": result.value,
        "provenance": result.provenance,
        "encoding": encoding,
        "decoding": decoding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_from_g() {
        let g = parse_game(r#"{"g": [[0.5, 0.0], [0.0, 0.5]]}"#).unwrap();
        assert_eq!(g.inputs(), 2);
        assert_eq!(g.entry(1, 1), 0.5);
    }

    #[test]
    fn game_from_prior_payoff() {
        let g = parse_game(r#"{"p": [0.3, 0.7], "u": [[1.0, 0.0], [0.0, 2.0]]}"#).unwrap();
        assert!((g.entry(0, 0) - 0.3).abs() < 1e-15);
        assert!((g.entry(1, 1) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn game_rejects_mixed_spec() {
        assert!(parse_game(r#"{"p": [1.0]}"#).is_err());
        assert!(parse_game("not json").is_err());
    }

    #[test]
    fn channel_named_kinds() {
        let ch =
            parse_channel(r#"{"kind": "pauli", "params": {"lambda": [0.7, 0.3, 0, 0]}}"#).unwrap();
        assert_eq!(ch.din(), 2);
        let ch = parse_channel(r#"{"kind": "ampdamp", "params": {"eta": 0.5}}"#).unwrap();
        assert!(ch.label().contains("amplitude_damping"));
        let ch = parse_channel(r#"{"kind": "cloning", "params": {"d": 2}}"#).unwrap();
        assert_eq!(ch.dout(), 4);
        assert!(parse_channel(r#"{"kind": "nonsense"}"#).is_err());
    }

    #[test]
    fn channel_every_kind_parses_and_validates() {
        let half = "[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]";
        let specs = [
            r#"{"kind": "identity", "params": {"d": 3}}"#.to_string(),
            r#"{"kind": "unitary", "params": {"u": [[[0,0],[1,0]],[[1,0],[0,0]]]}}"#.to_string(),
            r#"{"kind": "dephasing", "params": {"lambda": 0.3, "d": 2}}"#.to_string(),
            format!(r#"{{"kind": "trace_class", "params": {{"sigma": {half}}}}}"#),
            r#"{"kind": "erasure", "params": {"lambda": 0.5, "d": 2}}"#.to_string(),
            format!(r#"{{"kind": "qc", "params": {{"povm": [{half}, {half}]}}}}"#),
            r#"{"kind": "depolarizing", "params": {"lambda": 0.6, "d": 3}}"#.to_string(),
            format!(
                r#"{{"kind": "shifted_depolarizing", "params": {{"lambda": 0.5, "sigma": {half}}}}}"#
            ),
        ];
        for text in &specs {
            let ch = parse_channel(text).unwrap_or_else(|e| panic!("{text}: {e}"));
            ch.validate_cptp().unwrap_or_else(|e| panic!("{text}: {e}"));
        }
        // parameter out of range surfaces as an error, not a panic
        assert!(
            parse_channel(r#"{"kind": "dephasing", "params": {"lambda": 1.5, "d": 2}}"#).is_err()
        );
        assert!(parse_channel(r#"{"kind": "pauli", "params": {"lambda": [1, 1, 0, 0]}}"#).is_err());
    }

    #[test]
    fn channel_raw_kraus() {
        let text = r#"{
            "kind": "kraus", "din": 2, "dout": 2,
            "ops": [[[[1, 0], [0, 0]], [[0, 0], [0, 1]]]]
        }"#;
        let ch = parse_channel(text).unwrap();
        assert_eq!(ch.kraus().len(), 1);
        ch.validate_cptp().unwrap();
    }

    #[test]
    fn result_round_trips_value() {
        let r = crate::closedform::utility_ampdamp_binary(0.5, 0.5).unwrap();
        let v = utility_result_to_json(&r);
        assert!((v["value"].as_f64().unwrap() - r.value).abs() < 1e-15);
        assert!(v["encoding"].as_array().unwrap().len() == 2);
    }
}
