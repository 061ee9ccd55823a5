//! Machine-readable run reports. The JSON layout is part of the external
//! interface: {command, surface, curve, indices, diagnostics, version},
//! emitted with stable field order so identical runs produce identical
//! bytes.

use serde::{Deserialize, Serialize};

use crate::winding::{HalfIndex, WindingReport};

/// One computed index with the route that produced it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IndexEntry {
    pub route: String,
    pub twice_index: i64,
    pub residual: f64,
}

impl IndexEntry {
    pub fn new(route: &str, index: HalfIndex, residual: f64) -> Self {
        IndexEntry { route: route.to_string(), twice_index: index.twice, residual }
    }

    pub fn index(&self) -> HalfIndex {
        HalfIndex::from_twice(self.twice_index)
    }
}

/// Winding diagnostics for one route.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Diagnostic {
    pub route: String,
    pub samples: usize,
    pub min_magnitude: f64,
    pub max_step_angle: f64,
    pub refined: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Diagnostic {
    pub fn from_winding(route: &str, w: &WindingReport) -> Self {
        Diagnostic {
            route: route.to_string(),
            samples: w.samples,
            min_magnitude: w.min_magnitude,
            max_step_angle: w.max_step_angle,
            refined: w.refined,
            note: None,
        }
    }

    pub fn note(route: &str, note: impl Into<String>) -> Self {
        Diagnostic {
            route: route.to_string(),
            samples: 0,
            min_magnitude: 0.0,
            max_step_angle: 0.0,
            refined: false,
            note: Some(note.into()),
        }
    }
}

/// Full report of one CLI invocation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub surface: String,
    pub curve: String,
    pub indices: Vec<IndexEntry>,
    pub diagnostics: Vec<Diagnostic>,
    pub version: String,
}

impl RunReport {
    pub fn new(command: &str, surface: &str, curve: &str) -> Self {
        RunReport {
            command: command.to_string(),
            surface: surface.to_string(),
            curve: curve.to_string(),
            indices: Vec::new(),
            diagnostics: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
