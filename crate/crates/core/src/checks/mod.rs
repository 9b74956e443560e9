//! Named verification suites with JSON parameters and reports.

mod bundle;
mod geometry;
mod gluing;
mod hopf;
mod smoothing;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::GeomError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckInfo {
    pub name: &'static str,
    pub description: &'static str,
}

type Runner = fn(Value, u64) -> Result<CheckOutcome, CheckError>;

struct Entry {
    info: CheckInfo,
    run: Runner,
}

const fn entry(name: &'static str, description: &'static str, run: Runner) -> Entry {
    Entry { info: CheckInfo { name, description }, run }
}

static REGISTRY: [Entry; 12] = [
    entry("smoothing-lemma12", "g_ε tip data, g'' ≤ −r, g' ≤ g₀' and g_ε = g₀/2 beyond ε", smoothing::lemma12),
    entry("smoothing-lemma13", "slope and weighted comparison of g_ε(t) against g₀(t₀)", smoothing::lemma13),
    entry("oracle-sanity", "FD curvature oracle on round spheres, flat space and Bianchi", geometry::oracle_sanity),
    entry("conic-equivalence", "conic metric plane curvatures vs −G''/G and (1 − G'²)/G²", geometry::conic_equivalence),
    entry("bundle-formula-vs-oracle", "regular-point bundle curvature formula vs FD oracle", bundle::formula_vs_oracle),
    entry("bundle-zero-section", "zero-section curvature formula vs extrapolated oracle", bundle::zero_section),
    entry("bundle-vw-identities", "V/W identity and bounds on random draws", bundle::vw_identities),
    entry("bundle-positivity-family", "select L, then scan the g_ε family near the zero section", bundle::positivity_family),
    entry("extract-q-roundtrip", "recover the connection from the total metric", bundle::extract_q_roundtrip),
    entry("glue-positivity-demo", "cutoff bounds, glued positivity and zero-section convexity", gluing::demo),
    entry("hopf-radius-half", "Hopf map invariance, |df| = 2 and quotient curvature 4", hopf::radius_half),
    entry("hopf-sp2", "induced Sp(2) → SO(5) and sp(2) → so(5) maps", hopf::sp2),
];

pub fn list_checks() -> Vec<CheckInfo> {
    REGISTRY.iter().map(|e| e.info.clone()).collect()
}

pub fn is_check(name: &str) -> bool {
    REGISTRY.iter().any(|e| e.info.name == name)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub details: Value,
    pub tolerances: Value,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid config: {0}")]
    Config(String),
}

/// Runs `name` with check-specific `params` (a JSON object, possibly empty).
/// Computation errors inside a suite count as failures, not config errors.
pub fn run_check(name: &str, params: Value, seed: u64) -> Result<CheckOutcome, CheckError> {
    let e = REGISTRY.iter().find(|e| e.info.name == name).ok_or_else(|| CheckError::UnknownCheck(name.into()))?;
    (e.run)(params, seed)
}

pub(crate) fn parse<P: DeserializeOwned>(params: Value) -> Result<P, CheckError> {
    let params = if params.is_null() { Value::Object(Map::new()) } else { params };
    serde_json::from_value(params).map_err(|e| CheckError::Config(e.to_string()))
}

pub(crate) fn outcome<T: Serialize, D: Serialize>(
    passed: bool,
    details: D,
    tolerances: &T,
) -> Result<CheckOutcome, CheckError> {
    let to_value = |v: serde_json::Result<Value>| v.map_err(|e| CheckError::Config(e.to_string()));
    Ok(CheckOutcome {
        passed,
        details: to_value(serde_json::to_value(details))?,
        tolerances: to_value(serde_json::to_value(tolerances))?,
    })
}

/// Outcome of a suite that stopped on a computation error.
pub(crate) fn failed<T: Serialize>(err: GeomError, tolerances: &T) -> Result<CheckOutcome, CheckError> {
    outcome(false, serde_json::json!({ "error": err.to_string() }), tolerances)
}

pub(crate) fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Lists that also accept a single element.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OneOrMany<T = f64> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<'de, T: serde::de::DeserializeOwned> Deserialize<'de> for OneOrMany<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match Value::deserialize(d)? {
            Value::Array(items) => items
                .into_iter()
                .map(serde_json::from_value)
                .collect::<Result<_, _>>()
                .map(OneOrMany::Many)
                .map_err(D::Error::custom),
            v => serde_json::from_value(v).map(OneOrMany::One).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests;
