//! Document shapes and float formatting.

use serde::Serialize;
use serde_json::value::RawValue;

/// A float written with 17 significant digits so it round-trips exactly.
/// Non-finite values become `null`; `-0` is written as `0`.
#[derive(Clone, Copy, Debug)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0 + 0.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

/// 17-significant-digit text for CSV cells.
pub fn f17(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

#[derive(Serialize)]
pub struct CheckDoc {
    pub model: String,
    pub ssf: bool,
    pub safe_symbol: Option<u8>,
    pub witness_count: usize,
    pub counterexample: Option<[u8; 4]>,
}

#[derive(Serialize)]
pub struct SiteDoc {
    pub site: [i32; 2],
    pub p_lower: F17,
    pub p_upper: F17,
    pub edge_term: F17,
}

#[derive(Serialize)]
pub struct PressureDoc {
    pub model: String,
    pub nu: String,
    pub n: u32,
    pub per_site: Vec<SiteDoc>,
    pub pressure_lower: F17,
    pub pressure_upper: F17,
    pub canopy_count: usize,
    pub skipped_count: usize,
    pub wall_time_ms: F17,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
}

#[derive(Serialize)]
pub struct StripEntry {
    pub width: usize,
    pub per_site_lower: F17,
    pub per_site_upper: F17,
    pub log_lambda_lower: F17,
    pub log_lambda_upper: F17,
    pub states: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Serialize)]
pub struct IncrementEntry {
    pub width: usize,
    pub lower: F17,
    pub upper: F17,
}

#[derive(Serialize)]
pub struct BoxEntry {
    pub size: usize,
    pub per_site: F17,
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum OracleDoc {
    Strip {
        model: String,
        width: usize,
        estimates: Vec<StripEntry>,
        increments: Vec<IncrementEntry>,
        extrapolated: Option<F17>,
        trend: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        convention: Option<String>,
    },
    Box {
        model: String,
        size: usize,
        values: Vec<BoxEntry>,
        #[serde(skip_serializing_if = "Option::is_none")]
        convention: Option<String>,
    },
}

/// "increasing", "decreasing", "constant" or "mixed".
pub fn trend(values: &[f64]) -> &'static str {
    let up = values.windows(2).all(|w| w[1] >= w[0]);
    let down = values.windows(2).all(|w| w[1] <= w[0]);
    match (up, down) {
        (true, true) => "constant",
        (true, false) => "increasing",
        (false, true) => "decreasing",
        (false, false) => "mixed",
    }
}
