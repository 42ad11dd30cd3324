//! Scenario configuration: a single JSON object assembled from an optional
//! file and command-line overrides, then decoded into [`ScenarioConfig`].

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::UsageError;

/// A real number that may be written with units, e.g. `"2pi*32.1kHz"`,
/// `"62ns"`, `"pi/2"` or plain `1.5e-6`. Stored in SI units (seconds,
/// rad/s for `2pi*` frequencies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity(pub f64);

const UNITS: [(&str, f64); 9] = [
    ("GHz", 1e9),
    ("MHz", 1e6),
    ("kHz", 1e3),
    ("Hz", 1.0),
    ("ms", 1e-3),
    ("us", 1e-6),
    ("µs", 1e-6),
    ("ns", 1e-9),
    ("s", 1.0),
];

/// Parses `[2pi*]<number or pi-multiple>[unit]`.
pub fn parse_quantity(text: &str) -> Result<f64, UsageError> {
    let bad = || UsageError(format!("cannot read quantity {text:?}"));
    let mut s = text.trim();
    let mut factor = 1.0;
    for prefix in ["2pi*", "2*pi*", "2π*"] {
        if let Some(rest) = s.strip_prefix(prefix) {
            factor = 2.0 * PI;
            s = rest.trim_start();
            break;
        }
    }
    if let Some((unit, scale)) = UNITS.iter().find(|(u, _)| s.ends_with(u)) {
        factor *= scale;
        s = s[..s.len() - unit.len()].trim_end();
    }
    let value = match s.split_once("pi") {
        Some((coef, rest)) => {
            let coef = coef.trim().trim_end_matches('*');
            let c = match coef {
                "" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let d = match rest.trim() {
                "" => 1.0,
                r => r.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?,
            };
            c * PI / d
        }
        None => s.parse::<f64>().map_err(|_| bad())?,
    };
    let v = value * factor;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Quantity;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string such as \"2pi*32.1kHz\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Quantity, E> {
                Ok(Quantity(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Quantity, E> {
                Ok(Quantity(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Quantity, E> {
                Ok(Quantity(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Quantity, E> {
                parse_quantity(v).map(Quantity).map_err(|e| E::custom(e.0))
            }
        }
        d.deserialize_any(V)
    }
}

/// Sample points: `"start:stop:count"` (inclusive, evenly spaced) or an
/// explicit list of quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid(text: &str) -> Result<Vec<f64>, UsageError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(UsageError(format!("grid {text:?} is not start:stop:count")));
    };
    let (a, b) = (parse_quantity(start)?, parse_quantity(stop)?);
    let n: usize = count
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("grid count {count:?} is not a positive integer")))?;
    match n {
        0 => Err(UsageError(format!("grid {text:?} has no points"))),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Spec(String),
            List(Vec<Quantity>),
        }
        match Raw::deserialize(d)? {
            Raw::Spec(s) => parse_grid(&s).map(Grid).map_err(|e| de::Error::custom(e.0)),
            Raw::List(v) if v.is_empty() => Err(de::Error::custom("empty grid")),
            Raw::List(v) => Ok(Grid(v.into_iter().map(|q| q.0).collect())),
        }
    }
}

/// Every key a scenario may read. Keys a scenario does not use are
/// accepted and ignored; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Twice the ground-manifold spin.
    pub two_j: Option<u32>,
    pub state: Option<String>,
    /// Coherent-state direction.
    pub theta: Option<Quantity>,
    pub phi: Option<Quantity>,
    /// Dicke projection `m` (may be half-integer).
    pub m: Option<f64>,
    /// Relative phase of the cat state.
    pub alpha: Option<Quantity>,
    /// Pure-state amplitudes `[re, im]`, ordered from `m = -J` upward.
    pub amplitudes: Option<Vec<[f64; 2]>>,
    pub theta_grid: Option<Grid>,
    pub phi_grid: Option<Grid>,
    pub time_grid: Option<Grid>,
    /// Fringe samples on `[0, 2 pi)`.
    pub phi_points: Option<usize>,
    pub chi: Option<Quantity>,
    pub larmor: Option<Quantity>,
    pub duration: Option<Quantity>,
    /// Excited-state lifetime.
    pub tau: Option<Quantity>,
    pub pulse_duration: Option<Quantity>,
    pub area: Option<Quantity>,
    pub detuning: Option<Quantity>,
    pub polarization: Option<String>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    /// Husimi samples CSV for tomography.
    pub samples: Option<String>,
    pub nodes: Option<usize>,
    pub clip: Option<bool>,
    pub lambda_global: Option<f64>,
    pub lambda_pair: Option<f64>,
    pub format: Option<String>,
}

/// A merged, validated configuration together with the canonical JSON it
/// was decoded from.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub config: ScenarioConfig,
    pub document: Value,
}

impl ResolvedConfig {
    /// `document` must be a JSON object.
    pub fn from_document(document: Value) -> Result<Self, UsageError> {
        if !document.is_object() {
            return Err(UsageError("config must be a JSON object".into()));
        }
        let config = ScenarioConfig::deserialize(&document).map_err(|e| UsageError(format!("invalid config: {e}")))?;
        Ok(Self { config, document })
    }

    /// Canonical (key-sorted, compact) serialization.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&self.document).expect("JSON values always serialize")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// `--set key=value`: the value is read as JSON when possible, otherwise
/// kept as a string.
pub fn apply_override(doc: &mut Map<String, Value>, assignment: &str) -> Result<(), UsageError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| UsageError(format!("--set expects key=value, got {assignment:?}")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(UsageError(format!("empty key in {assignment:?}")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    doc.insert(key.replace('-', "_"), value);
    Ok(())
}
