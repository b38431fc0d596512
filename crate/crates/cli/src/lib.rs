//! Command implementations behind the `hvol` binary: parsing the published
//! JSON schemas, driving the library, and emitting deterministic JSON/CSV
//! reports.
//!
//! Exit-code contract: 0 success/accepted, 2 domain rejection (invalid
//! values, failed checks), 1 operational error (I/O, malformed JSON).

pub mod formats;

use formats::*;
use hvol::angle_space::{
    andreev_check, bao_bonahon_check, boundary_slack, AbstractPolyhedron, CheckReport,
    ConditionId, EdgeWeights, SlackReport, WeightMode, Witness,
};
use hvol::degeneration::{
    belt_excess_logscale, cross_section_angle_sum, empirical_t0, extract_belt, find_empty_slab,
    make_drum, sample_lemma_angle, sample_lemma_dist, sample_lemma_spherical,
};
use hvol::gram::{
    build_gram, classify, cofactors, compact_boundary_distance, edge_lengths,
    edge_lengths_truncated, pairs, DihedralAngles, SimplexClass, VertexType,
};
use hvol::minkowski::HPoint;
use hvol::oracles::from_klein;
use hvol::polyhedron::PolyhedronGeometry;
use hvol::schlafli::{
    schlafli_gradient, simplex_volume_spherical, tetra_volume_hyperbolic, SchlafliContext,
    TetraVolumeOpts,
};
use hvol::stats::fit_line;

#[derive(Debug)]
pub enum CliError {
    /// Semantically invalid input or a rejected configuration (exit 2).
    Domain(String),
    /// Operational failure: I/O, malformed JSON (exit 1).
    Op(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Op(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Op(m) => m,
        }
    }
}

fn domain<T: std::fmt::Display>(e: T) -> CliError {
    CliError::Domain(e.to_string())
}

/// Parse JSON with line/column diagnostics; malformed input is operational.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Op(format!(
            "malformed input at line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })
}

/// Shared run configuration (defaults: seed 0, 10⁶ samples, tol 1e−8).
#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: u64,
    pub tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            samples: 1_000_000,
            tol: 1e-8,
        }
    }
}

fn vertex_type_str(v: VertexType) -> &'static str {
    match v {
        VertexType::Finite => "finite",
        VertexType::Ideal => "ideal",
        VertexType::Hyperideal => "hyperideal",
    }
}

// ---------------------------------------------------------------------------
// simplex
// ---------------------------------------------------------------------------

/// Classification, cofactors, edge lengths, Schläfli gradient and volume of
/// a simplex given by its dihedral angles.
pub fn cmd_simplex(input: &SimplexInput, cfg: &RunConfig) -> Result<SimplexReport, CliError> {
    let angles = DihedralAngles::new(input.dimension, input.angles.clone()).map_err(domain)?;
    let gram = build_gram(&angles);
    let class = classify(&gram).map_err(domain)?;
    let cof = cofactors(&gram);
    let n = input.dimension;

    let requested_hyperbolic = match input.curvature.as_str() {
        "hyperbolic" => true,
        "spherical" => false,
        other => {
            return Err(CliError::Domain(format!(
                "curvature must be \"spherical\" or \"hyperbolic\", got \"{other}\""
            )))
        }
    };
    let matches = match &class {
        SimplexClass::Spherical => !requested_hyperbolic,
        SimplexClass::Hyperbolic { .. } => requested_hyperbolic,
        SimplexClass::Degenerate => false,
    };
    if !matches {
        return Err(CliError::Domain(format!(
            "angles classify as {}, not {}",
            class_str(&class),
            input.curvature
        )));
    }

    let cof_rows: Vec<Vec<f64>> = (0..=n)
        .map(|i| (0..=n).map(|j| cof.get(i, j)).collect())
        .collect();

    let vertex_types = match &class {
        SimplexClass::Hyperbolic { vertex_types } => Some(
            vertex_types
                .iter()
                .map(|v| vertex_type_str(*v).to_string())
                .collect(),
        ),
        _ => None,
    };

    let edge_entries = match &class {
        SimplexClass::Hyperbolic { vertex_types } => {
            if vertex_types.iter().all(|v| *v == VertexType::Finite) {
                let table = edge_lengths(&gram).map_err(domain)?;
                Some(
                    pairs(n)
                        .map(|(i, j)| EdgeLengthEntry {
                            vertices: [i, j],
                            length: Some(table.get(i, j)),
                            truncated: false,
                        })
                        .collect(),
                )
            } else {
                let table = edge_lengths_truncated(&gram).map_err(domain)?;
                Some(
                    pairs(n)
                        .zip(table)
                        .map(|((i, j), t)| EdgeLengthEntry {
                            vertices: [i, j],
                            length: t.length.is_finite().then_some(t.length),
                            truncated: t.truncated,
                        })
                        .collect(),
                )
            }
        }
        _ => None,
    };

    let (gradient, volume) = if n == 3 {
        match &class {
            SimplexClass::Spherical => {
                let ctx = SchlafliContext::spherical();
                let grad = schlafli_gradient(&angles, &ctx).ok();
                let vol = simplex_volume_spherical(&angles, None, cfg.tol).map_err(domain)?;
                (
                    grad,
                    Some(VolumeReport {
                        value: vol.value,
                        error_estimate: vol.error_estimate,
                        panels: vol.panels,
                        boundary_depth: vol.boundary_depth,
                        anchor: vol.anchor_note,
                    }),
                )
            }
            SimplexClass::Hyperbolic { vertex_types } => {
                let compact = vertex_types.iter().all(|v| *v == VertexType::Finite);
                let grad = if compact {
                    schlafli_gradient(&angles, &SchlafliContext::hyperbolic()).ok()
                } else {
                    None
                };
                let no_hyperideal = vertex_types.iter().all(|v| *v != VertexType::Hyperideal);
                let vol = if no_hyperideal {
                    let opts = TetraVolumeOpts {
                        tol: cfg.tol,
                        anchor_mc_seed: cfg.seed,
                        ..TetraVolumeOpts::default()
                    };
                    Some(tetra_volume_hyperbolic(&angles, &opts).map_err(domain)?)
                } else {
                    None
                };
                (
                    grad,
                    vol.map(|v| VolumeReport {
                        value: v.value,
                        error_estimate: v.error_estimate,
                        panels: v.panels,
                        boundary_depth: v.boundary_depth,
                        anchor: v.anchor_note,
                    }),
                )
            }
            SimplexClass::Degenerate => (None, None),
        }
    } else {
        (None, None)
    };

    Ok(SimplexReport {
        classification: class_str(&class).to_string(),
        vertex_types,
        determinant: gram.det(),
        cofactors: cof_rows,
        edge_lengths: edge_entries,
        schlafli_gradient: gradient,
        volume,
    })
}

fn class_str(c: &SimplexClass) -> &'static str {
    match c {
        SimplexClass::Spherical => "spherical",
        SimplexClass::Hyperbolic { .. } => "hyperbolic",
        SimplexClass::Degenerate => "degenerate",
    }
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

fn witness_str(w: &Witness) -> String {
    match w {
        Witness::Edge((a, b)) => format!("edge ({a}, {b})"),
        Witness::Vertex(v) => format!("vertex {v}"),
        Witness::Circuit(fs) => format!("prismatic circuit through faces {fs:?}"),
        Witness::Face(f) => format!("face {f}"),
        Witness::Path(p) => format!("path {p:?}"),
    }
}

fn condition_str(c: ConditionId) -> &'static str {
    match c {
        ConditionId::EdgeRange => "edge-range",
        ConditionId::VertexSum => "vertex-sum",
        ConditionId::Prismatic3 => "prismatic-3-circuit",
        ConditionId::Prismatic4 => "prismatic-4-circuit",
        ConditionId::QuadFace => "quadrilateral-face",
        ConditionId::CircuitSum => "circuit-sum",
        ConditionId::PathSum => "path-sum",
    }
}

fn check_to_report(mode: &str, report: &CheckReport, slack: Option<SlackJson>) -> ValidateReport {
    ValidateReport {
        mode: mode.to_string(),
        accepted: report.accepted,
        violations: report
            .violations
            .iter()
            .map(|v| ViolationReport {
                condition: condition_str(v.condition).to_string(),
                witness: witness_str(&v.witness),
                lhs: v.lhs,
                bound: v.bound,
                slack: v.slack,
            })
            .collect(),
        slack,
    }
}

/// Andreev / Bao–Bonahon membership check over the abstract-polyhedron
/// schema. The report's `accepted` drives the exit code.
pub fn cmd_validate(input: &AbstractInput) -> Result<ValidateReport, CliError> {
    let poly = AbstractPolyhedron::from_faces(input.faces.clone()).map_err(domain)?;
    let mode = match input.mode.as_str() {
        "andreev" => WeightMode::Andreev,
        "bao-bonahon" => WeightMode::BaoBonahon,
        other => {
            return Err(CliError::Domain(format!(
                "mode must be \"andreev\" or \"bao-bonahon\", got \"{other}\""
            )))
        }
    };
    type WeightEntries = Result<Vec<((usize, usize), f64)>, CliError>;
    let entries: WeightEntries = input
        .weights
        .iter()
        .map(|(key, &w)| {
            let (a, b) = key
                .split_once('-')
                .ok_or_else(|| CliError::Domain(format!("weight key \"{key}\" is not \"i-j\"")))?;
            let a: usize = a
                .trim()
                .parse()
                .map_err(|_| CliError::Domain(format!("bad vertex id in \"{key}\"")))?;
            let b: usize = b
                .trim()
                .parse()
                .map_err(|_| CliError::Domain(format!("bad vertex id in \"{key}\"")))?;
            Ok(((a, b), w))
        })
        .collect();
    let weights = EdgeWeights::new(mode, entries?).map_err(domain)?;

    let report = match mode {
        WeightMode::Andreev => andreev_check(&poly, &weights).map_err(domain)?,
        WeightMode::BaoBonahon => bao_bonahon_check(&poly, &weights).map_err(domain)?,
    };
    let slack = if report.accepted {
        match boundary_slack(&poly, &weights).map_err(domain)? {
            SlackReport::Andreev(s) => Some(SlackJson {
                distance: Some(s.distance),
                cap_slack: Some(s.cap_slack),
                min_circuit_excess: None,
                min_nonelementary_excess: None,
                min_path_excess: None,
            }),
            SlackReport::BaoBonahon(s) => Some(SlackJson {
                distance: None,
                cap_slack: None,
                min_circuit_excess: Some(s.min_circuit_excess),
                min_nonelementary_excess: Some(s.min_nonelementary_excess),
                min_path_excess: Some(s.min_path_excess),
            }),
        }
    } else {
        None
    };
    let mode_str = match mode {
        WeightMode::Andreev => "andreev",
        WeightMode::BaoBonahon => "bao-bonahon",
    };
    Ok(check_to_report(mode_str, &report, slack))
}

// ---------------------------------------------------------------------------
// degenerate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DrumFamily {
    pub k: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_steps: usize,
    pub r: f64,
}

const DEGENERATE_HEADER: [&str; 17] = [
    "tau",
    "k",
    "n_vertices",
    "rho",
    "belt_faces",
    "excess",
    "log_excess",
    "excess_direct",
    "bound",
    "curvature_sum",
    "curvature_bound_rho_n",
    "curvature_bound_rho_2n",
    "polygon_sum",
    "polygon_bound",
    "belt_polygon_gap",
    "link_bound",
    "at_noise_floor",
];

/// Drum-family degeneration sweep (one CSV row per member, sorted by τ).
/// The `excess` column comes from the log-scaled family evaluation, which
/// keeps relative precision long after the direct Σ−2π hits the rounding
/// floor; `excess_direct` carries the generic belt extraction for
/// comparison, and `at_noise_floor` marks rows where it is unresolvable.
pub fn cmd_degenerate_family(family: &DrumFamily) -> Result<String, CliError> {
    if family.tau_steps < 1 || family.tau_max < family.tau_min {
        return Err(CliError::Domain("bad tau range".into()));
    }
    let mut rows = Vec::new();
    for step in 0..family.tau_steps {
        let tau = if family.tau_steps == 1 {
            family.tau_min
        } else {
            family.tau_min
                + (family.tau_max - family.tau_min) * step as f64 / (family.tau_steps - 1) as f64
        };
        let p = make_drum(family.k, tau, family.r).map_err(domain)?;
        let stretched = belt_excess_logscale(family.k, tau, family.r).map_err(domain)?;
        let frame = find_empty_slab(&p).map_err(domain)?;
        let belt = extract_belt(&p, &frame).map_err(domain)?;
        let cs = cross_section_angle_sum(&p, &frame).map_err(domain)?;
        let n = belt.n_vertices as f64;
        let bound = 12.0 * n * (-stretched.rho / (2.0 * n)).exp();
        // The direct route sums k O(1) dihedral angles whose normals come
        // from double-precision vertices, so it cannot resolve excesses
        // below ~k·1e−13; past that only the log-scaled value is meaningful.
        let at_floor = stretched.excess < belt.k as f64 * 1e-13;
        rows.push(vec![
            g17(tau),
            family.k.to_string(),
            belt.n_vertices.to_string(),
            g17(stretched.rho),
            belt.k.to_string(),
            g17(stretched.excess),
            g17(stretched.excess.ln()),
            g17(belt.excess),
            g17(bound),
            g17(stretched.turning_sum),
            g17(3.0 * belt.k as f64 * (-stretched.rho / n).exp()),
            g17(3.0 * belt.k as f64 * (-stretched.rho / (2.0 * n)).exp()),
            g17(cs.exterior_sum),
            g17(cs.bound),
            g17(cs.belt_polygon_gap),
            g17(cs.link_bound),
            (at_floor as u8).to_string(),
        ]);
    }
    Ok(csv(&DEGENERATE_HEADER, &rows))
}

/// Belt diagnostics of a single polyhedron from the JSON schema.
pub fn cmd_degenerate_input(input: &PolyhedronInput) -> Result<String, CliError> {
    let p = parse_polyhedron(input)?;
    let report = p.validate();
    if !report.accepted {
        return Err(CliError::Domain(format!(
            "polyhedron rejected by the validator: {report:?}"
        )));
    }
    let frame = find_empty_slab(&p).map_err(domain)?;
    let belt = extract_belt(&p, &frame).map_err(domain)?;
    let cs = cross_section_angle_sum(&p, &frame).map_err(domain)?;
    let at_floor = belt.excess.abs() < belt.k as f64 * 1e-13;
    let rows = vec![vec![
        String::new(),
        String::new(),
        belt.n_vertices.to_string(),
        g17(belt.rho),
        belt.k.to_string(),
        g17(belt.excess),
        if belt.excess > 0.0 {
            g17(belt.excess.ln())
        } else {
            String::new()
        },
        g17(belt.excess),
        g17(belt.bound),
        g17(belt.curvature_sum),
        g17(belt.curvature_bound_rho_n),
        g17(belt.curvature_bound_rho_2n),
        g17(cs.exterior_sum),
        g17(cs.bound),
        g17(cs.belt_polygon_gap),
        g17(cs.link_bound),
        (at_floor as u8).to_string(),
    ]];
    Ok(csv(&DEGENERATE_HEADER, &rows))
}

fn parse_polyhedron(input: &PolyhedronInput) -> Result<PolyhedronGeometry, CliError> {
    let vertices: Result<Vec<HPoint>, CliError> = match input.model.as_str() {
        "hyperboloid" => input
            .vertices
            .iter()
            .map(|v| {
                if v.len() != 4 {
                    return Err(CliError::Domain(
                        "hyperboloid vertices need 4 coordinates".into(),
                    ));
                }
                HPoint::new(hvol::minkowski::MVector::new(v[0], v[1], v[2], v[3]))
                    .map_err(domain)
            })
            .collect(),
        "klein" => input
            .vertices
            .iter()
            .map(|v| {
                if v.len() != 3 {
                    return Err(CliError::Domain("klein vertices need 3 coordinates".into()));
                }
                from_klein([v[0], v[1], v[2]]).map_err(domain)
            })
            .collect(),
        other => Err(CliError::Domain(format!(
            "model must be \"hyperboloid\" or \"klein\", got \"{other}\""
        ))),
    };
    let geometry = PolyhedronGeometry::new(vertices?, input.faces.clone()).map_err(domain)?;
    Ok(geometry.into_oriented().0)
}

// ---------------------------------------------------------------------------
// regularity
// ---------------------------------------------------------------------------

const REGULARITY_HEADER: [&str; 7] = [
    "d",
    "volume",
    "grad_max",
    "max_edge",
    "holder_exponent",
    "ell_slope",
    "cauchy_c",
];

/// Regularity probe along a ray toward the boundary of the compact region:
/// rows of (boundary distance, volume, max gradient, max edge length) plus
/// the fitted Hölder exponent and the slope of ℓ against −log d.
pub fn cmd_regularity(
    input: &SimplexInput,
    direction: Option<&[f64]>,
    steps: usize,
    cfg: &RunConfig,
) -> Result<String, CliError> {
    if input.dimension != 3 {
        return Err(CliError::Domain("regularity probe needs n = 3".into()));
    }
    let angles = DihedralAngles::new(3, input.angles.clone()).map_err(domain)?;
    if !classify(&build_gram(&angles))
        .map_err(domain)?
        .is_compact_hyperbolic()
    {
        return Err(CliError::Domain(
            "start angles must be a compact hyperbolic tetrahedron".into(),
        ));
    }
    let default_dir: Vec<f64> = angles
        .as_slice()
        .iter()
        .map(|a| std::f64::consts::PI / 3.0 - a)
        .collect();
    let dir: Vec<f64> = match direction {
        Some(d) if d.len() == 6 => d.to_vec(),
        Some(_) => return Err(CliError::Domain("direction needs 6 components".into())),
        None => default_dir,
    };
    let s_bound = compact_boundary_distance(&angles, &dir, 1.0).map_err(domain)?;
    // The probe targets ideal-vertex limits, where the gradient is
    // log-singular; a ray leaving through the degenerate (Euclidean) sheet
    // is the wrong direction for it.
    let past = angles
        .try_offset(&dir, (s_bound * 1.0001).min(1.0))
        .and_then(|a| classify(&build_gram(&a)).ok());
    let exits_ideal = matches!(past, Some(SimplexClass::Hyperbolic { .. }));
    if !exits_ideal {
        return Err(CliError::Domain(
            "no ideal boundary on this ray (it exits through the degenerate sheet); \
             aim the direction at an ideal-vertex limit"
                .into(),
        ));
    }
    let dir_norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();

    let steps = steps.max(3);
    let opts = TetraVolumeOpts {
        tol: cfg.tol.min(1e-8),
        anchor_mc_seed: cfg.seed,
        verify_anchor: false,
        ..TetraVolumeOpts::default()
    };
    let mut ds = Vec::new();
    let mut volumes = Vec::new();
    let mut grads = Vec::new();
    let mut ells = Vec::new();
    for i in 0..steps {
        let d_ray = s_bound * 0.5f64.powi(i as i32 + 1);
        let at = angles
            .try_offset(&dir, s_bound - d_ray)
            .ok_or_else(|| CliError::Domain("ray leaves the angle chart".into()))?;
        let v = tetra_volume_hyperbolic(&at, &opts).map_err(domain)?;
        let grad = schlafli_gradient(&at, &SchlafliContext::hyperbolic()).map_err(domain)?;
        let lengths = edge_lengths(&build_gram(&at)).map_err(domain)?;
        ds.push(d_ray * dir_norm);
        volumes.push(v.value);
        grads.push(grad.iter().fold(0.0f64, |m, g| m.max(g.abs())));
        ells.push(lengths.max());
    }

    // Fitted columns.
    let mut log_dv = Vec::new();
    let mut log_dx = Vec::new();
    let mut cauchy_c = 0.0f64;
    for i in 0..steps - 1 {
        let dv = (volumes[i] - volumes[i + 1]).abs();
        let dx = (ds[i] - ds[i + 1]).abs();
        if dv > 0.0 && dx > 0.0 {
            log_dv.push(dv.ln());
            log_dx.push(dx.ln());
            cauchy_c = cauchy_c.max(dv / (dx * (1.0 + dx.ln().abs())));
        }
    }
    let holder = fit_line(&log_dx, &log_dv).map(|f| f.slope).unwrap_or(f64::NAN);
    let neg_log_d: Vec<f64> = ds.iter().map(|d| -d.ln()).collect();
    let ell_slope = fit_line(&neg_log_d, &ells).map(|f| f.slope).unwrap_or(f64::NAN);

    let rows: Vec<Vec<String>> = (0..steps)
        .map(|i| {
            vec![
                g17(ds[i]),
                g17(volumes[i]),
                g17(grads[i]),
                g17(ells[i]),
                g17(holder),
                g17(ell_slope),
                g17(cauchy_c),
            ]
        })
        .collect();
    Ok(csv(&REGULARITY_HEADER, &rows))
}

// ---------------------------------------------------------------------------
// lemmas
// ---------------------------------------------------------------------------

/// Violation counts and max ratios for the three lemma samplers, with
/// empirical smallest safe parameters estimated from the given grids.
pub fn cmd_lemmas(
    t_list: &[f64],
    eps_list: &[f64],
    trials: u64,
    seed: u64,
) -> Result<LemmasReport, CliError> {
    for &t in t_list {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Domain(format!("t must be positive, got {t}")));
        }
    }
    for &eps in eps_list {
        if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
            return Err(CliError::Domain(format!("ε must be in (0, 1), got {eps}")));
        }
    }
    let mut rows = Vec::new();
    if trials > 0 {
        for &t in t_list {
            let rep = sample_lemma_angle(t, trials, seed);
            rows.push(LemmaRow {
                lemma: "angle".into(),
                parameter: t,
                trials: rep.trials,
                violations: rep.violations,
                max_ratio: rep.max_ratio,
            });
        }
        for &t in t_list {
            let rep = sample_lemma_dist(t, trials, seed);
            rows.push(LemmaRow {
                lemma: "distance".into(),
                parameter: t,
                trials: rep.trials,
                violations: rep.violations,
                max_ratio: rep.max_ratio,
            });
        }
        for &eps in eps_list {
            let rep = sample_lemma_spherical(eps, trials, seed);
            rows.push(LemmaRow {
                lemma: "spherical".into(),
                parameter: eps,
                trials: rep.trials,
                violations: rep.violations,
                max_ratio: rep.max_ratio,
            });
        }
    }
    let (t0_angle, t0_dist, eps0) = if trials > 0 && !t_list.is_empty() {
        (
            empirical_t0(sample_lemma_angle, t_list, trials, seed),
            empirical_t0(sample_lemma_dist, t_list, trials, seed),
            if eps_list.is_empty() {
                None
            } else {
                // The spherical lemma weakens as ε grows; scan downward from
                // the largest ε that stays violation-free.
                let mut sorted = eps_list.to_vec();
                sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let mut best = None;
                for &eps in &sorted {
                    if sample_lemma_spherical(eps, trials, seed).violations == 0 {
                        best = Some(eps);
                        break;
                    }
                }
                best
            },
        )
    } else {
        (None, None, None)
    };
    Ok(LemmasReport {
        rows,
        empirical_t0_angle: t0_angle,
        empirical_t0_dist: t0_dist,
        empirical_eps0_spherical: eps0,
    })
}

/// Deterministic pretty JSON used by every JSON-emitting subcommand.
pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Op(e.to_string()))
}
