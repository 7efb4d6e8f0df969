//! The distribution file format: a JSON document
//!
//! ```json
//! {
//!   "n": 2,
//!   "rows": [
//!     {"setting": "a1b1", "values": ["1/2", "0", "0", "0.5"]},
//!     ...
//!   ],
//!   "settings_probs": ["1/4", "1/4", "1/4", "1/4"]
//! }
//! ```
//!
//! Values are `"p/q"` strings, decimal strings, or JSON numbers; decimals are
//! read exactly. Rows may come in any order and are sorted into the canonical
//! order on load. For `n = 2` the labels `ab`, `ab'`, `a'b`, `a'b'` are also
//! accepted.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::{DistributionMatrix, Scenario, SettingsDistribution};
use crate::rational::{fmt_q, parse_q, Q};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RowRecord {
    pub setting: String,
    pub values: Vec<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionFile {
    pub n: usize,
    pub rows: Vec<RowRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings_probs: Option<Vec<Value>>,
}

/// A loaded distribution with its optional settings distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedDistribution {
    pub matrix: DistributionMatrix,
    pub settings: Option<SettingsDistribution>,
}

/// Reads a JSON number or string as an exact rational. Exponents are allowed
/// in both forms.
pub fn value_to_q(v: &Value) -> Result<Q> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(Error::Parse(format!("expected a number, got {other}"))),
    };
    parse_with_exponent(&text)
}

fn parse_with_exponent(text: &str) -> Result<Q> {
    let t = text.trim();
    if t.contains('/') {
        return parse_q(t);
    }
    match t.split_once(['e', 'E']) {
        None => parse_q(t),
        Some((mant, exp)) => {
            let m = parse_q(mant)?;
            let e: i32 = exp
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {t:?}")))?;
            let p = Q::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
            Ok(if e >= 0 { m * p } else { m / p })
        }
    }
}

/// Canonical row index of a setting label such as `"a2b1"` (or `"a'b"` when
/// `n = 2`).
pub fn parse_setting_label(sc: Scenario, label: &str) -> Result<usize> {
    let l: String = label.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let l = l.replace('\u{2032}', "'");
    if sc.n() == 2 {
        let short = match l.as_str() {
            "ab" => Some((0, 0)),
            "ab'" => Some((0, 1)),
            "a'b" => Some((1, 0)),
            "a'b'" => Some((1, 1)),
            _ => None,
        };
        if let Some((a, b)) = short {
            return Ok(sc.row_of_settings(a, b).expect("n = 2 has all pairs"));
        }
    }
    let bad = || Error::Parse(format!("bad setting label {label:?}"));
    let rest = l.strip_prefix('a').ok_or_else(bad)?;
    let (a, b) = rest.split_once('b').ok_or_else(bad)?;
    let a: usize = a.parse().map_err(|_| bad())?;
    let b: usize = b.parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    sc.row_of_settings(a - 1, b - 1).ok_or_else(|| {
        Error::Shape(format!("setting {label:?} is not one of the 2n chained setting pairs"))
    })
}

pub fn parse_distribution(text: &str) -> Result<LoadedDistribution> {
    let file: DistributionFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("distribution file: {e}")))?;
    from_file(&file)
}

pub fn from_file(file: &DistributionFile) -> Result<LoadedDistribution> {
    let sc = Scenario::new(file.n)?;
    if file.rows.len() != sc.rows() {
        return Err(Error::Shape(format!(
            "n = {} needs {} rows, file has {}",
            sc.n(),
            sc.rows(),
            file.rows.len()
        )));
    }
    let mut slots: Vec<Option<[Q; 4]>> = vec![None; sc.rows()];
    for rec in &file.rows {
        let k = parse_setting_label(sc, &rec.setting)?;
        if rec.values.len() != 4 {
            return Err(Error::Shape(format!(
                "row {} has {} values, expected 4",
                rec.setting,
                rec.values.len()
            )));
        }
        let vals = rec.values.iter().map(value_to_q).collect::<Result<Vec<_>>>()?;
        if slots[k].is_some() {
            return Err(Error::Shape(format!("setting {} appears twice", sc.row_label(k))));
        }
        slots[k] = Some([vals[0].clone(), vals[1].clone(), vals[2].clone(), vals[3].clone()]);
    }
    let rows: Vec<[Q; 4]> = slots.into_iter().map(|s| s.expect("all rows filled")).collect();
    let matrix = DistributionMatrix::new(sc, rows)?;
    let settings = match &file.settings_probs {
        None => None,
        Some(v) => Some(SettingsDistribution::new(
            sc,
            v.iter().map(value_to_q).collect::<Result<Vec<_>>>()?,
        )?),
    };
    Ok(LoadedDistribution { matrix, settings })
}

pub fn load_distribution(path: &Path) -> Result<LoadedDistribution> {
    let text = std::fs::read_to_string(path)?;
    parse_distribution(&text)
}

/// A settings file: a JSON array in canonical row order, an object mapping
/// setting labels to probabilities, or an object with a `settings_probs`
/// field (for example a distribution file).
pub fn parse_settings(sc: Scenario, text: &str) -> Result<SettingsDistribution> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("settings file: {e}")))?;
    match v {
        Value::Array(items) => SettingsDistribution::new(
            sc,
            items.iter().map(value_to_q).collect::<Result<Vec<_>>>()?,
        ),
        Value::Object(map) => {
            if let Some(Value::Array(items)) = map.get("settings_probs") {
                return SettingsDistribution::new(
                    sc,
                    items.iter().map(value_to_q).collect::<Result<Vec<_>>>()?,
                );
            }
            let mut probs: Vec<Option<Q>> = vec![None; sc.rows()];
            for (label, val) in &map {
                let k = parse_setting_label(sc, label)?;
                probs[k] = Some(value_to_q(val)?);
            }
            let probs = probs
                .into_iter()
                .enumerate()
                .map(|(k, p)| p.ok_or_else(|| Error::Shape(format!("no probability for {}", sc.row_label(k)))))
                .collect::<Result<Vec<_>>>()?;
            SettingsDistribution::new(sc, probs)
        }
        other => Err(Error::Parse(format!("settings file must be an array or object, got {other}"))),
    }
}

/// Serializes in canonical order with exact `p/q` strings.
pub fn to_file(dm: &DistributionMatrix, settings: Option<&SettingsDistribution>) -> DistributionFile {
    let sc = dm.scenario();
    DistributionFile {
        n: sc.n(),
        rows: (0..sc.rows())
            .map(|k| RowRecord {
                setting: sc.row_label(k),
                values: dm.rows()[k].iter().map(|v| Value::String(fmt_q(v))).collect(),
            })
            .collect(),
        settings_probs: settings.map(|s| s.probs().iter().map(|p| Value::String(fmt_q(p))).collect()),
    }
}

pub fn write_distribution(dm: &DistributionMatrix, settings: Option<&SettingsDistribution>) -> String {
    serde_json::to_string_pretty(&to_file(dm, settings)).expect("serializable")
}

/// Setting label -> four exact values, for reports.
pub fn rows_as_map(dm: &DistributionMatrix) -> BTreeMap<String, [String; 4]> {
    let sc = dm.scenario();
    (0..sc.rows())
        .map(|k| (sc.row_label(k), dm.rows()[k].clone().map(|v| fmt_q(&v))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    const LABELLED: &str = r#"{
        "n": 2,
        "rows": [
            {"setting": "ab",   "values": [0.0001422, 0.0000743, 0.0000699, 0.9997136]},
            {"setting": "ab'",  "values": ["0.0001530", "0.0000635", "0.0005249", "0.9992586"]},
            {"setting": "a'b",  "values": ["0.0001476", "0.0004795", "0.0000644", "0.9993084"]},
            {"setting": "a'b'", "values": ["0.0000024", "0.0006247", "0.0006755", "0.9986974"]}
        ]
    }"#;

    #[test]
    fn reads_prime_labels_and_reorders() {
        let d = parse_distribution(LABELLED).unwrap();
        let m = d.matrix;
        // canonical order ab, a'b, a'b', ab'
        assert_eq!(m.rows()[0][1], q(743, 10_000_000));
        assert_eq!(m.rows()[3][0], q(1530, 10_000_000));
        assert_eq!(m.rows()[2][0], q(24, 10_000_000));
        assert!(d.settings.is_none());
    }

    #[test]
    fn round_trip() {
        let d = parse_distribution(LABELLED).unwrap();
        let s = SettingsDistribution::uniform(Scenario::two_two_two());
        let text = write_distribution(&d.matrix, Some(&s));
        let back = parse_distribution(&text).unwrap();
        assert_eq!(back.matrix, d.matrix);
        assert_eq!(back.settings, Some(s));
    }

    #[test]
    fn exponents_and_labels() {
        assert_eq!(value_to_q(&serde_json::json!("1.5e-3")).unwrap(), q(3, 2000));
        assert_eq!(value_to_q(&serde_json::from_str::<Value>("2E2").unwrap()).unwrap(), q(200, 1));
        let sc = Scenario::new(3).unwrap();
        assert_eq!(parse_setting_label(sc, "a1b3").unwrap(), 5);
        assert!(parse_setting_label(sc, "a1b2").is_err());
        assert!(parse_setting_label(sc, "xyz").is_err());
    }

    #[test]
    fn shape_errors() {
        let text = r#"{"n": 2, "rows": [{"setting": "a1b1", "values": [1, 0, 0, 0]}]}"#;
        assert!(matches!(parse_distribution(text), Err(Error::Shape(_))));
        assert!(matches!(parse_distribution("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn settings_forms() {
        let sc = Scenario::two_two_two();
        let a = parse_settings(sc, r#"["1/2", "1/6", "1/6", "1/6"]"#).unwrap();
        let b = parse_settings(sc, r#"{"ab": "1/2", "a'b": "1/6", "a'b'": "1/6", "ab'": "1/6"}"#).unwrap();
        assert_eq!(a, b);
        assert!(parse_settings(sc, r#"["1/2", "1/2", "1/2", "1/2"]"#).is_err());
    }
}
