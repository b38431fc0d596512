//! JSON schemas and CSV formatting for the command-line interface.
//!
//! - simplex input:  {"dimension": n, "curvature": "spherical"|"hyperbolic",
//!   "angles": [θ01, θ02, …]} with angles in lexicographic pair order,
//!   radians;
//! - polyhedron input:  {"model": "hyperboloid"|"klein", "vertices": [[…]],
//!   "faces": [[indices, ccw from outside]]};
//! - abstract polyhedron input:  {"faces": [[vertex ids]], "weights":
//!   {"i-j": w}, "mode": "andreev"|"bao-bonahon"};
//! - CSV: header row mandatory, '.' decimal, 17 significant digits.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplexInput {
    pub dimension: usize,
    pub curvature: String,
    pub angles: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyhedronInput {
    pub model: String,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbstractInput {
    pub faces: Vec<Vec<usize>>,
    pub weights: BTreeMap<String, f64>,
    pub mode: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VolumeReport {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
    pub boundary_depth: usize,
    pub anchor: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeLengthEntry {
    pub vertices: [usize; 2],
    /// None for edges into ideal vertices (unbounded length).
    pub length: Option<f64>,
    pub truncated: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplexReport {
    pub classification: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_types: Option<Vec<String>>,
    pub determinant: f64,
    pub cofactors: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_lengths: Option<Vec<EdgeLengthEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schlafli_gradient: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViolationReport {
    pub condition: String,
    pub witness: String,
    pub lhs: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlackJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_circuit_excess: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_nonelementary_excess: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_path_excess: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidateReport {
    pub mode: String,
    pub accepted: bool,
    pub violations: Vec<ViolationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<SlackJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaRow {
    pub lemma: String,
    pub parameter: f64,
    pub trials: u64,
    pub violations: u64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmasReport {
    pub rows: Vec<LemmaRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_t0_angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_t0_dist: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_eps0_spherical: Option<f64>,
}

/// 17-significant-digit scientific formatting for CSV cells.
pub fn g17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// RFC-style CSV assembly: header plus rows, '\n' line ends.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
