//! Combinatorial angle-space membership: Andreev's theorem, the
//! Bao–Bonahon conditions, and boundary-slack reports.
//!
//! Graphs are given by their face cycles (a cell decomposition of S²).
//! Andreev's conditions for non-obtuse compact polyhedra, for an abstract
//! polyhedron with more than 4 faces and weights α per edge:
//!
//! 1. 0 < α_i ≤ π/2,
//! 2. at each (trivalent) vertex α₁+α₂+α₃ > π,
//! 3. over each prismatic 3-circuit α₁+α₂+α₃ < π,
//! 4. over each prismatic 4-circuit α₁+α₂+α₃+α₄ < 2π,
//! 5. for each quadrilateral face both mixed sums are < 3π.
//!
//! Bao–Bonahon, for hyperideal polyhedra with exterior weights w ∈ (0, π):
//! every circuit in the 1-skeleton sums to ≥ 2π, strictly unless the circuit
//! bounds a single 2-cell, and every simple path joining two vertices of a
//! common face and not contained in that face's boundary sums to > π.
//!
//! Circuit minima are computed exactly with shortest paths and small edge
//! exclusions (any simple cycle through e other than the boundaries of e's
//! two faces must omit at least one edge of each), never by exponential
//! enumeration. Strict inequalities are evaluated with an equality band of
//! 1e−12: boundary cases within the band count as violations.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use thiserror::Error;

/// Equality band for the theorems' strict inequalities.
pub const EQUALITY_BAND: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AngleSpaceError {
    #[error("vertex ids must be dense 0..V")]
    VertexIdsNotDense,
    #[error("face {face} has a bad cycle ({reason})")]
    BadFaceCycle { face: usize, reason: String },
    #[error("edge ({0}, {1}) lies in {2} faces, expected 2")]
    EdgeNotTwoFaces(usize, usize, usize),
    #[error("Euler characteristic failed: V−E+F = {0}")]
    EulerFailed(i64),
    #[error("Andreev's theorem needs more than 4 faces, got {faces}")]
    NotCovered { faces: usize },
    #[error("vertex {vertex} has degree {degree}; Andreev mode needs trivalent vertices")]
    NonTrivalentVertex { vertex: usize, degree: usize },
    #[error("weights are in {found:?} mode, expected {expected:?}")]
    WrongMode { expected: WeightMode, found: WeightMode },
    #[error("missing weight for edge ({0}, {1})")]
    MissingWeight(usize, usize),
    #[error("weight {value} for edge ({a}, {b}) is outside {range}")]
    WeightOutOfRange { a: usize, b: usize, value: f64, range: &'static str },
    #[error("boundary slack requires a passing check")]
    CheckFailed,
    #[error("prismatic circuits are defined for k = 3 or 4, got {0}")]
    BadCircuitLength(usize),
}

pub type EdgeKey = (usize, usize);

fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Planar-graph combinatorics of a cell decomposition of S², given by face
/// cycles over dense vertex ids.
#[derive(Clone, Debug)]
pub struct AbstractPolyhedron {
    faces: Vec<Vec<usize>>,
    n_vertices: usize,
    edges: Vec<EdgeKey>,
    edge_index: BTreeMap<EdgeKey, usize>,
    /// The two faces of each edge.
    edge_faces: Vec<[usize; 2]>,
    /// Incident edges per vertex.
    vertex_edges: Vec<Vec<usize>>,
}

impl AbstractPolyhedron {
    pub fn from_faces(faces: Vec<Vec<usize>>) -> Result<Self, AngleSpaceError> {
        let mut seen = BTreeSet::new();
        for (fi, cycle) in faces.iter().enumerate() {
            if cycle.len() < 3 {
                return Err(AngleSpaceError::BadFaceCycle {
                    face: fi,
                    reason: "fewer than 3 vertices".into(),
                });
            }
            let distinct: BTreeSet<_> = cycle.iter().collect();
            if distinct.len() != cycle.len() {
                return Err(AngleSpaceError::BadFaceCycle {
                    face: fi,
                    reason: "repeated vertex".into(),
                });
            }
            seen.extend(cycle.iter().copied());
        }
        let n_vertices = seen.len();
        if seen.iter().max().map(|m| m + 1).unwrap_or(0) != n_vertices {
            return Err(AngleSpaceError::VertexIdsNotDense);
        }

        let mut edge_map: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
        for (fi, cycle) in faces.iter().enumerate() {
            for w in 0..cycle.len() {
                let k = edge_key(cycle[w], cycle[(w + 1) % cycle.len()]);
                edge_map.entry(k).or_default().push(fi);
            }
        }
        let mut edges = Vec::new();
        let mut edge_faces = Vec::new();
        let mut edge_index = BTreeMap::new();
        for (k, fs) in &edge_map {
            if fs.len() != 2 {
                return Err(AngleSpaceError::EdgeNotTwoFaces(k.0, k.1, fs.len()));
            }
            edge_index.insert(*k, edges.len());
            edges.push(*k);
            edge_faces.push([fs[0], fs[1]]);
        }
        let euler = n_vertices as i64 - edges.len() as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(AngleSpaceError::EulerFailed(euler));
        }
        let mut vertex_edges = vec![Vec::new(); n_vertices];
        for (ei, &(a, b)) in edges.iter().enumerate() {
            vertex_edges[a].push(ei);
            vertex_edges[b].push(ei);
        }
        Ok(AbstractPolyhedron {
            faces,
            n_vertices,
            edges,
            edge_index,
            edge_faces,
            vertex_edges,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[EdgeKey] {
        &self.edges
    }

    pub fn edge_faces(&self, e: usize) -> [usize; 2] {
        self.edge_faces[e]
    }

    pub fn vertex_degree(&self, v: usize) -> usize {
        self.vertex_edges[v].len()
    }

    fn shared_edge(&self, f: usize, g: usize) -> Option<usize> {
        self.edge_faces
            .iter()
            .position(|fs| (fs[0] == f && fs[1] == g) || (fs[0] == g && fs[1] == f))
    }

    /// Boundary edge indices of a face.
    fn face_edge_ids(&self, f: usize) -> Vec<usize> {
        let cycle = &self.faces[f];
        (0..cycle.len())
            .map(|w| self.edge_index[&edge_key(cycle[w], cycle[(w + 1) % cycle.len()])])
            .collect()
    }

    /// Dual cell decomposition: one vertex per face, one face per vertex
    /// (the cyclic fan of faces around it).
    pub fn dual(&self) -> Result<AbstractPolyhedron, AngleSpaceError> {
        let mut dual_faces = Vec::with_capacity(self.n_vertices);
        for v in 0..self.n_vertices {
            // Walk faces around v, pivoting over the shared edge at v.
            let incident: Vec<usize> = (0..self.faces.len())
                .filter(|&f| self.faces[f].contains(&v))
                .collect();
            let start = incident[0];
            let mut cycle = vec![start];
            // Edges of `start` at v.
            let at_v = |f: usize| -> Vec<usize> {
                self.face_edge_ids(f)
                    .into_iter()
                    .filter(|&e| self.edges[e].0 == v || self.edges[e].1 == v)
                    .collect()
            };
            let mut cur_face = start;
            let mut cur_edge = at_v(start)[0];
            loop {
                let [fa, fb] = self.edge_faces[cur_edge];
                let next_face = if fa == cur_face { fb } else { fa };
                if next_face == start {
                    break;
                }
                cycle.push(next_face);
                let next_edges = at_v(next_face);
                cur_edge = if next_edges[0] == cur_edge {
                    next_edges[1]
                } else {
                    next_edges[0]
                };
                cur_face = next_face;
                if cycle.len() > self.faces.len() {
                    return Err(AngleSpaceError::BadFaceCycle {
                        face: v,
                        reason: "vertex link does not close".into(),
                    });
                }
            }
            if cycle.len() != incident.len() {
                return Err(AngleSpaceError::BadFaceCycle {
                    face: v,
                    reason: "vertex link misses faces".into(),
                });
            }
            dual_faces.push(cycle);
        }
        AbstractPolyhedron::from_faces(dual_faces)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// Interior angles α ∈ (0, π/2] (Andreev).
    Andreev,
    /// Exterior angles w ∈ (0, π) (Bao–Bonahon).
    BaoBonahon,
}

/// Per-edge weights with their interpretation.
#[derive(Clone, Debug)]
pub struct EdgeWeights {
    mode: WeightMode,
    map: BTreeMap<EdgeKey, f64>,
}

impl EdgeWeights {
    pub fn new(
        mode: WeightMode,
        entries: impl IntoIterator<Item = (EdgeKey, f64)>,
    ) -> Result<Self, AngleSpaceError> {
        let mut map = BTreeMap::new();
        for ((a, b), w) in entries {
            let k = edge_key(a, b);
            let ok = match mode {
                WeightMode::Andreev => w > 0.0 && w <= PI / 2.0,
                WeightMode::BaoBonahon => w > 0.0 && w < PI,
            };
            if !ok || !w.is_finite() {
                return Err(AngleSpaceError::WeightOutOfRange {
                    a: k.0,
                    b: k.1,
                    value: w,
                    range: match mode {
                        WeightMode::Andreev => "(0, π/2]",
                        WeightMode::BaoBonahon => "(0, π)",
                    },
                });
            }
            map.insert(k, w);
        }
        Ok(EdgeWeights { mode, map })
    }

    /// The same weight on every edge of `c`.
    pub fn uniform(
        mode: WeightMode,
        c: &AbstractPolyhedron,
        w: f64,
    ) -> Result<Self, AngleSpaceError> {
        EdgeWeights::new(mode, c.edges().iter().map(|&k| (k, w)))
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        self.map.get(&edge_key(a, b)).copied()
    }

    fn require_cover(&self, c: &AbstractPolyhedron) -> Result<Vec<f64>, AngleSpaceError> {
        c.edges()
            .iter()
            .map(|&(a, b)| {
                self.get(a, b)
                    .ok_or(AngleSpaceError::MissingWeight(a, b))
            })
            .collect()
    }
}

/// A prismatic circuit: cyclically adjacent faces whose crossed edges are
/// pairwise non-incident.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrismaticCircuit {
    pub faces: Vec<usize>,
    pub edges: Vec<EdgeKey>,
}

/// All prismatic k-circuits (k ∈ {3, 4}) in deterministic canonical order.
pub fn enumerate_prismatic_circuits(
    c: &AbstractPolyhedron,
    k: usize,
) -> Result<Vec<PrismaticCircuit>, AngleSpaceError> {
    if k != 3 && k != 4 {
        return Err(AngleSpaceError::BadCircuitLength(k));
    }
    let nf = c.n_faces();
    let mut out: Vec<PrismaticCircuit> = Vec::new();
    let mut push = |faces: Vec<usize>| {
        let mut edges = Vec::with_capacity(faces.len());
        for i in 0..faces.len() {
            let e = c.shared_edge(faces[i], faces[(i + 1) % faces.len()]);
            match e {
                Some(e) => edges.push(c.edges()[e]),
                None => return,
            }
        }
        // Crossed edges pairwise vertex-disjoint.
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (a, b) = edges[i];
                let (x, y) = edges[j];
                if a == x || a == y || b == x || b == y {
                    return;
                }
            }
        }
        out.push(PrismaticCircuit { faces, edges });
    };
    if k == 3 {
        for a in 0..nf {
            for b in (a + 1)..nf {
                for d in (b + 1)..nf {
                    push(vec![a, b, d]);
                }
            }
        }
    } else {
        for a in 0..nf {
            for b in (a + 1)..nf {
                for d in (b + 1)..nf {
                    for e in (d + 1)..nf {
                        // Distinct cyclic arrangements starting at the
                        // smallest face, up to reflection.
                        push(vec![a, b, d, e]);
                        push(vec![a, b, e, d]);
                        push(vec![a, d, b, e]);
                    }
                }
            }
        }
    }
    out.sort_by(|p, q| p.faces.cmp(&q.faces));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionId {
    /// 0 < α ≤ π/2.
    EdgeRange,
    /// Vertex sum > π.
    VertexSum,
    /// Prismatic 3-circuit sum < π.
    Prismatic3,
    /// Prismatic 4-circuit sum < 2π.
    Prismatic4,
    /// Quadrilateral-face sums < 3π.
    QuadFace,
    /// Circuit sum ≥ 2π (strict unless elementary).
    CircuitSum,
    /// Path sum > π.
    PathSum,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Edge(EdgeKey),
    Vertex(usize),
    /// Prismatic circuit, by its face sequence.
    Circuit(Vec<usize>),
    Face(usize),
    /// Cycle or path, by its vertex sequence.
    Path(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub condition: ConditionId,
    pub witness: Witness,
    pub lhs: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub accepted: bool,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        CheckReport {
            accepted: violations.is_empty(),
            violations,
        }
    }
}

/// Andreev's five conditions for non-obtuse weights on a trivalent abstract
/// polyhedron with more than 4 faces.
pub fn andreev_check(
    c: &AbstractPolyhedron,
    weights: &EdgeWeights,
) -> Result<CheckReport, AngleSpaceError> {
    if weights.mode() != WeightMode::Andreev {
        return Err(AngleSpaceError::WrongMode {
            expected: WeightMode::Andreev,
            found: weights.mode(),
        });
    }
    if c.n_faces() <= 4 {
        return Err(AngleSpaceError::NotCovered { faces: c.n_faces() });
    }
    for v in 0..c.n_vertices() {
        let d = c.vertex_degree(v);
        if d != 3 {
            return Err(AngleSpaceError::NonTrivalentVertex { vertex: v, degree: d });
        }
    }
    let w = weights.require_cover(c)?;
    let mut violations = Vec::new();

    // (1) range — enforced by the weight type, re-scanned for the report.
    for (ei, &(a, b)) in c.edges().iter().enumerate() {
        if !(w[ei] > 0.0 && w[ei] <= PI / 2.0) {
            violations.push(Violation {
                condition: ConditionId::EdgeRange,
                witness: Witness::Edge((a, b)),
                lhs: w[ei],
                bound: PI / 2.0,
                slack: PI / 2.0 - w[ei],
            });
        }
    }

    // (2) vertex sums strictly above π.
    for v in 0..c.n_vertices() {
        let sum: f64 = c.vertex_edges[v].iter().map(|&e| w[e]).sum();
        if sum <= PI + EQUALITY_BAND {
            violations.push(Violation {
                condition: ConditionId::VertexSum,
                witness: Witness::Vertex(v),
                lhs: sum,
                bound: PI,
                slack: sum - PI,
            });
        }
    }

    // (3, 4) prismatic circuits strictly below π / 2π.
    for (k, cond, bound) in [
        (3usize, ConditionId::Prismatic3, PI),
        (4, ConditionId::Prismatic4, 2.0 * PI),
    ] {
        for circuit in enumerate_prismatic_circuits(c, k)? {
            let sum: f64 = circuit
                .edges
                .iter()
                .map(|&(a, b)| weights.get(a, b).unwrap())
                .sum();
            if sum >= bound - EQUALITY_BAND {
                violations.push(Violation {
                    condition: cond,
                    witness: Witness::Circuit(circuit.faces.clone()),
                    lhs: sum,
                    bound,
                    slack: bound - sum,
                });
            }
        }
    }

    // (5) quadrilateral faces: both mixed sums strictly below 3π.
    for (fi, cycle) in c.faces().iter().enumerate() {
        if cycle.len() != 4 {
            continue;
        }
        // Side edges e1..e4 and the third edge entering each corner.
        let side: Vec<f64> = (0..4)
            .map(|i| weights.get(cycle[i], cycle[(i + 1) % 4]).unwrap())
            .collect();
        let mut entering_sum = 0.0;
        for i in 0..4 {
            let corner = cycle[(i + 1) % 4];
            let e_prev = edge_key(cycle[i], corner);
            let e_next = edge_key(corner, cycle[(i + 2) % 4]);
            let third = c.vertex_edges[corner]
                .iter()
                .map(|&e| c.edges()[e])
                .find(|&k| k != e_prev && k != e_next)
                .expect("trivalent corner has a third edge");
            entering_sum += weights.get(third.0, third.1).unwrap();
        }
        for (lhs, label) in [
            (side[0] + side[2] + entering_sum, 0),
            (side[1] + side[3] + entering_sum, 1),
        ] {
            let _ = label;
            if lhs >= 3.0 * PI - EQUALITY_BAND {
                violations.push(Violation {
                    condition: ConditionId::QuadFace,
                    witness: Witness::Face(fi),
                    lhs,
                    bound: 3.0 * PI,
                    slack: 3.0 * PI - lhs,
                });
            }
        }
    }

    Ok(CheckReport::from_violations(violations))
}

/// Shortest-path distance between `from` and `to` avoiding `banned` edges.
/// Plain O(V²) scan, graphs here are tiny. Returns the path as vertices.
fn dijkstra(
    c: &AbstractPolyhedron,
    w: &[f64],
    from: usize,
    to: usize,
    banned: &[usize],
) -> Option<(f64, Vec<usize>)> {
    let n = c.n_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[from] = 0.0;
    for _ in 0..n {
        let mut best = usize::MAX;
        let mut bd = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < bd {
                bd = dist[v];
                best = v;
            }
        }
        if best == usize::MAX {
            break;
        }
        if best == to {
            break;
        }
        done[best] = true;
        for &e in &c.vertex_edges[best] {
            if banned.contains(&e) {
                continue;
            }
            let (a, b) = c.edges()[e];
            let other = if a == best { b } else { a };
            let nd = dist[best] + w[e];
            if nd < dist[other] {
                dist[other] = nd;
                prev[other] = best;
            }
        }
    }
    if dist[to].is_infinite() {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    Some((dist[to], path))
}

/// Minimum-weight cycle through edge `e` that is not the boundary of either
/// incident face: exact via exclusion of one edge from each boundary.
fn min_nonelementary_cycle_through(
    c: &AbstractPolyhedron,
    w: &[f64],
    e: usize,
) -> Option<(f64, Vec<usize>)> {
    let (u, v) = c.edges()[e];
    let [f1, f2] = c.edge_faces(e);
    let b1: Vec<usize> = c.face_edge_ids(f1).into_iter().filter(|&q| q != e).collect();
    let b2: Vec<usize> = c.face_edge_ids(f2).into_iter().filter(|&q| q != e).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for &q1 in &b1 {
        for &q2 in &b2 {
            if let Some((d, path)) = dijkstra(c, w, u, v, &[e, q1, q2]) {
                let total = d + w[e];
                if best.as_ref().map(|(bd, _)| total < *bd).unwrap_or(true) {
                    best = Some((total, path));
                }
            }
        }
    }
    best
}

/// Minimum weight over all cycles (including elementary), with its witness.
fn min_cycle(c: &AbstractPolyhedron, w: &[f64]) -> Option<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for e in 0..c.n_edges() {
        let (u, v) = c.edges()[e];
        if let Some((d, path)) = dijkstra(c, w, u, v, &[e]) {
            let total = d + w[e];
            if best.as_ref().map(|(bd, _)| total < *bd).unwrap_or(true) {
                best = Some((total, path));
            }
        }
    }
    best
}

/// Minimum over faces f and vertex pairs u, v ∈ f of the weight of a simple
/// path joining u and v not contained in ∂f. Exact via arc-edge exclusion.
fn min_constrained_path(
    c: &AbstractPolyhedron,
    w: &[f64],
) -> Option<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for f in 0..c.n_faces() {
        let cycle = &c.faces()[f];
        let k = cycle.len();
        let boundary = c.face_edge_ids(f);
        for i in 0..k {
            for j in (i + 1)..k {
                let (u, v) = (cycle[i], cycle[j]);
                // The two boundary arcs between u and v.
                let arc1: Vec<usize> = (i..j).map(|t| boundary[t]).collect();
                let arc2: Vec<usize> = (j..j + k - (j - i))
                    .map(|t| boundary[t % k])
                    .collect();
                for &a1 in &arc1 {
                    for &a2 in &arc2 {
                        if let Some((d, path)) = dijkstra(c, w, u, v, &[a1, a2]) {
                            if best.as_ref().map(|(bd, _)| d < *bd).unwrap_or(true) {
                                best = Some((d, path));
                            }
                        }
                    }
                }
            }
        }
    }
    best
}

/// The Bao–Bonahon conditions: circuit sums ≥ 2π (strict unless the circuit
/// bounds a single 2-cell) and constrained path sums > π.
pub fn bao_bonahon_check(
    sigma: &AbstractPolyhedron,
    weights: &EdgeWeights,
) -> Result<CheckReport, AngleSpaceError> {
    if weights.mode() != WeightMode::BaoBonahon {
        return Err(AngleSpaceError::WrongMode {
            expected: WeightMode::BaoBonahon,
            found: weights.mode(),
        });
    }
    let w = weights.require_cover(sigma)?;
    let mut violations = Vec::new();

    // Elementary circuits: face boundaries, equality allowed.
    for f in 0..sigma.n_faces() {
        let sum: f64 = sigma.face_edge_ids(f).iter().map(|&e| w[e]).sum();
        if sum < 2.0 * PI - EQUALITY_BAND {
            violations.push(Violation {
                condition: ConditionId::CircuitSum,
                witness: Witness::Face(f),
                lhs: sum,
                bound: 2.0 * PI,
                slack: sum - 2.0 * PI,
            });
        }
    }

    // Non-elementary circuits: strictly above 2π.
    for e in 0..sigma.n_edges() {
        if let Some((total, path)) = min_nonelementary_cycle_through(sigma, &w, e) {
            if total <= 2.0 * PI + EQUALITY_BAND {
                violations.push(Violation {
                    condition: ConditionId::CircuitSum,
                    witness: Witness::Path(path),
                    lhs: total,
                    bound: 2.0 * PI,
                    slack: total - 2.0 * PI,
                });
            }
        }
    }

    // Paths joining two vertices of a common face, not contained in its
    // boundary: strictly above π.
    if let Some((d, path)) = min_constrained_path(sigma, &w) {
        if d <= PI + EQUALITY_BAND {
            violations.push(Violation {
                condition: ConditionId::PathSum,
                witness: Witness::Path(path),
                lhs: d,
                bound: PI,
                slack: d - PI,
            });
        }
    }

    Ok(CheckReport::from_violations(violations))
}

/// Per-family slack data for an accepted Andreev configuration.
#[derive(Clone, Debug)]
pub struct AndreevSlack {
    /// Euclidean distance to the closest degeneration constraint.
    pub distance: f64,
    pub closest: Option<(ConditionId, Witness)>,
    /// Distance to the non-obtuse cap α ≤ π/2, excluded from `distance`.
    pub cap_slack: f64,
    pub family_minima: Vec<(ConditionId, f64)>,
}

/// Slack bounds for an accepted Bao–Bonahon configuration.
#[derive(Clone, Debug)]
pub struct BaoBonahonSlack {
    /// min over all circuits of (sum − 2π); 0 at elementary equality.
    pub min_circuit_excess: f64,
    /// min over non-elementary circuits of (sum − 2π).
    pub min_nonelementary_excess: f64,
    /// min over constrained paths of (sum − π).
    pub min_path_excess: f64,
}

#[derive(Clone, Debug)]
pub enum SlackReport {
    Andreev(AndreevSlack),
    BaoBonahon(BaoBonahonSlack),
}

/// Boundary-slack report for a configuration that passes its check.
///
/// Andreev mode: the exact Euclidean distance to the boundary of the linear
/// constraint polytope (min over constraints of slack/‖normal‖); the cap
/// α ≤ π/2 is a chart restriction, reported separately. Bao–Bonahon mode:
/// minimum circuit and path excesses, which are slack bounds rather than a
/// Euclidean distance.
pub fn boundary_slack(
    c: &AbstractPolyhedron,
    weights: &EdgeWeights,
) -> Result<SlackReport, AngleSpaceError> {
    match weights.mode() {
        WeightMode::Andreev => {
            let report = andreev_check(c, weights)?;
            if !report.accepted {
                return Err(AngleSpaceError::CheckFailed);
            }
            let w = weights.require_cover(c)?;
            let mut best = f64::INFINITY;
            let mut closest = None;
            let mut family_minima: Vec<(ConditionId, f64)> = Vec::new();
            let update =
                |family: &mut Vec<(ConditionId, f64)>,
                 cond: ConditionId,
                 value: f64,
                 witness: Witness,
                 best: &mut f64,
                 closest: &mut Option<(ConditionId, Witness)>| {
                    match family.iter_mut().find(|(c, _)| *c == cond) {
                        Some((_, m)) => *m = m.min(value),
                        None => family.push((cond, value)),
                    }
                    if value < *best {
                        *best = value;
                        *closest = Some((cond, witness));
                    }
                };

            for (ei, &(a, b)) in c.edges().iter().enumerate() {
                update(
                    &mut family_minima,
                    ConditionId::EdgeRange,
                    w[ei],
                    Witness::Edge((a, b)),
                    &mut best,
                    &mut closest,
                );
            }
            for v in 0..c.n_vertices() {
                let sum: f64 = c.vertex_edges[v].iter().map(|&e| w[e]).sum();
                update(
                    &mut family_minima,
                    ConditionId::VertexSum,
                    (sum - PI) / 3.0f64.sqrt(),
                    Witness::Vertex(v),
                    &mut best,
                    &mut closest,
                );
            }
            for circuit in enumerate_prismatic_circuits(c, 3)? {
                let sum: f64 = circuit
                    .edges
                    .iter()
                    .map(|&(a, b)| weights.get(a, b).unwrap())
                    .sum();
                update(
                    &mut family_minima,
                    ConditionId::Prismatic3,
                    (PI - sum) / 3.0f64.sqrt(),
                    Witness::Circuit(circuit.faces),
                    &mut best,
                    &mut closest,
                );
            }
            for circuit in enumerate_prismatic_circuits(c, 4)? {
                let sum: f64 = circuit
                    .edges
                    .iter()
                    .map(|&(a, b)| weights.get(a, b).unwrap())
                    .sum();
                update(
                    &mut family_minima,
                    ConditionId::Prismatic4,
                    (2.0 * PI - sum) / 2.0,
                    Witness::Circuit(circuit.faces),
                    &mut best,
                    &mut closest,
                );
            }
            for (fi, cycle) in c.faces().iter().enumerate() {
                if cycle.len() != 4 {
                    continue;
                }
                let side: Vec<f64> = (0..4)
                    .map(|i| weights.get(cycle[i], cycle[(i + 1) % 4]).unwrap())
                    .collect();
                let mut entering = 0.0;
                for i in 0..4 {
                    let corner = cycle[(i + 1) % 4];
                    let e_prev = edge_key(cycle[i], corner);
                    let e_next = edge_key(corner, cycle[(i + 2) % 4]);
                    let third = c.vertex_edges[corner]
                        .iter()
                        .map(|&e| c.edges()[e])
                        .find(|&k| k != e_prev && k != e_next)
                        .expect("trivalent corner");
                    entering += weights.get(third.0, third.1).unwrap();
                }
                for lhs in [side[0] + side[2] + entering, side[1] + side[3] + entering] {
                    update(
                        &mut family_minima,
                        ConditionId::QuadFace,
                        (3.0 * PI - lhs) / 6.0f64.sqrt(),
                        Witness::Face(fi),
                        &mut best,
                        &mut closest,
                    );
                }
            }
            let cap_slack = c
                .edges()
                .iter()
                .enumerate()
                .map(|(ei, _)| PI / 2.0 - w[ei])
                .fold(f64::INFINITY, f64::min);
            Ok(SlackReport::Andreev(AndreevSlack {
                distance: best,
                closest,
                cap_slack,
                family_minima,
            }))
        }
        WeightMode::BaoBonahon => {
            let report = bao_bonahon_check(c, weights)?;
            if !report.accepted {
                return Err(AngleSpaceError::CheckFailed);
            }
            let w = weights.require_cover(c)?;
            let overall = min_cycle(c, &w).map(|(d, _)| d).unwrap_or(f64::INFINITY);
            let nonelem = (0..c.n_edges())
                .filter_map(|e| min_nonelementary_cycle_through(c, &w, e).map(|(d, _)| d))
                .fold(f64::INFINITY, f64::min);
            let path = min_constrained_path(c, &w)
                .map(|(d, _)| d)
                .unwrap_or(f64::INFINITY);
            Ok(SlackReport::BaoBonahon(BaoBonahonSlack {
                min_circuit_excess: overall - 2.0 * PI,
                min_nonelementary_excess: nonelem - 2.0 * PI,
                min_path_excess: path - PI,
            }))
        }
    }
}

/// Fixture combinatorics used across the test and acceptance suites.
pub mod fixtures {
    use super::{AbstractPolyhedron, AngleSpaceError};

    pub fn tetrahedron() -> AbstractPolyhedron {
        AbstractPolyhedron::from_faces(vec![
            vec![0, 1, 2],
            vec![0, 3, 1],
            vec![1, 3, 2],
            vec![2, 3, 0],
        ])
        .expect("tetrahedron is valid")
    }

    pub fn cube() -> AbstractPolyhedron {
        AbstractPolyhedron::from_faces(vec![
            vec![0, 1, 2, 3],
            vec![7, 6, 5, 4],
            vec![0, 4, 5, 1],
            vec![1, 5, 6, 2],
            vec![2, 6, 7, 3],
            vec![3, 7, 4, 0],
        ])
        .expect("cube is valid")
    }

    pub fn triangular_prism() -> AbstractPolyhedron {
        AbstractPolyhedron::from_faces(vec![
            vec![0, 1, 2],
            vec![5, 4, 3],
            vec![0, 3, 4, 1],
            vec![1, 4, 5, 2],
            vec![2, 5, 3, 0],
        ])
        .expect("prism is valid")
    }

    pub fn icosahedron() -> AbstractPolyhedron {
        AbstractPolyhedron::from_faces(vec![
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 4, 5],
            vec![0, 5, 1],
            vec![1, 6, 2],
            vec![2, 6, 7],
            vec![2, 7, 3],
            vec![3, 7, 8],
            vec![3, 8, 4],
            vec![4, 8, 9],
            vec![4, 9, 5],
            vec![5, 9, 10],
            vec![5, 10, 1],
            vec![1, 10, 6],
            vec![6, 11, 7],
            vec![7, 11, 8],
            vec![8, 11, 9],
            vec![9, 11, 10],
            vec![10, 11, 6],
        ])
        .expect("icosahedron is valid")
    }

    /// Dodecahedron as the dual of the icosahedron.
    pub fn dodecahedron() -> Result<AbstractPolyhedron, AngleSpaceError> {
        icosahedron().dual()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    /// Exhaustive simple-circuit enumeration oracle (DFS), for small graphs.
    fn all_circuits(c: &AbstractPolyhedron) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let n = c.n_vertices();
        for start in 0..n {
            let mut stack = vec![(start, vec![start], vec![false; c.n_edges()])];
            while let Some((v, path, used)) = stack.pop() {
                for &e in &c.vertex_edges[v] {
                    if used[e] {
                        continue;
                    }
                    let (a, b) = c.edges()[e];
                    let next = if a == v { b } else { a };
                    if next == start && path.len() >= 3 {
                        // Canonical: smallest vertex first, then direction.
                        if path[0] == *path.iter().min().unwrap()
                            && path[1] < *path.last().unwrap()
                        {
                            out.push(path.clone());
                        }
                        continue;
                    }
                    if next < start || path.contains(&next) {
                        continue;
                    }
                    let mut used2 = used.clone();
                    used2[e] = true;
                    let mut p2 = path.clone();
                    p2.push(next);
                    stack.push((next, p2, used2));
                }
            }
        }
        out
    }

    fn circuit_weight(_c: &AbstractPolyhedron, w: &EdgeWeights, cyc: &[usize]) -> f64 {
        (0..cyc.len())
            .map(|i| w.get(cyc[i], cyc[(i + 1) % cyc.len()]).unwrap())
            .sum()
    }

    fn is_face_boundary(c: &AbstractPolyhedron, cyc: &[usize]) -> bool {
        c.faces().iter().any(|f| {
            f.len() == cyc.len() && {
                let set: BTreeSet<_> = f.iter().collect();
                cyc.iter().all(|v| set.contains(v))
            }
        })
    }

    #[test]
    fn fixture_counts() {
        let cube = cube();
        assert_eq!((cube.n_vertices(), cube.n_edges(), cube.n_faces()), (8, 12, 6));
        let dodeca = dodecahedron().unwrap();
        assert_eq!(
            (dodeca.n_vertices(), dodeca.n_edges(), dodeca.n_faces()),
            (20, 30, 12)
        );
        assert!((0..20).all(|v| dodeca.vertex_degree(v) == 3));
        let prism = triangular_prism();
        assert_eq!((prism.n_vertices(), prism.n_edges(), prism.n_faces()), (6, 9, 5));
    }

    #[test]
    fn bad_graphs_rejected() {
        // Open edge (a missing face).
        assert!(matches!(
            AbstractPolyhedron::from_faces(vec![vec![0, 1, 2], vec![0, 2, 3]]),
            Err(AngleSpaceError::EdgeNotTwoFaces(..))
        ));
        assert!(matches!(
            AbstractPolyhedron::from_faces(vec![vec![0, 1], vec![1, 0]]),
            Err(AngleSpaceError::BadFaceCycle { .. })
        ));
    }

    #[test]
    fn prismatic_circuits_on_fixtures() {
        let cube = cube();
        assert_eq!(enumerate_prismatic_circuits(&cube, 3).unwrap().len(), 0);
        let four = enumerate_prismatic_circuits(&cube, 4).unwrap();
        assert_eq!(four.len(), 3, "cube equators");

        let dodeca = dodecahedron().unwrap();
        assert_eq!(enumerate_prismatic_circuits(&dodeca, 3).unwrap().len(), 0);
        assert_eq!(enumerate_prismatic_circuits(&dodeca, 4).unwrap().len(), 0);

        let prism = triangular_prism();
        let three = enumerate_prismatic_circuits(&prism, 3).unwrap();
        assert_eq!(three.len(), 1, "prism waist");
        // The waist crosses the three lateral edges.
        assert!(three[0].edges.iter().all(|&(a, b)| (a < 3) != (b < 3)));
    }

    #[test]
    fn andreev_cube_rejected_with_equator_witness() {
        let cube = cube();
        let w = EdgeWeights::uniform(WeightMode::Andreev, &cube, PI / 2.0).unwrap();
        let report = andreev_check(&cube, &w).unwrap();
        assert!(!report.accepted);
        let quad = report
            .violations
            .iter()
            .find(|v| v.condition == ConditionId::Prismatic4)
            .expect("prismatic 4-circuit violation");
        assert_eq!(quad.lhs, 2.0 * PI);
        assert_eq!(quad.bound, 2.0 * PI);
    }

    #[test]
    fn andreev_dodecahedron_accepted() {
        let dodeca = dodecahedron().unwrap();
        let w = EdgeWeights::uniform(WeightMode::Andreev, &dodeca, PI / 2.0).unwrap();
        let report = andreev_check(&dodeca, &w).unwrap();
        assert!(report.accepted, "violations: {:?}", report.violations);
    }

    #[test]
    fn andreev_vertex_boundary_rejected() {
        // One vertex of the cube with all three edges at π/3: sum = π is not
        // strict.
        let cube = cube();
        let mut entries: Vec<_> = cube.edges().iter().map(|&k| (k, 0.45 * PI)).collect();
        for (k, w) in entries.iter_mut() {
            if k.0 == 0 || k.1 == 0 {
                *w = PI / 3.0;
            }
        }
        let w = EdgeWeights::new(WeightMode::Andreev, entries).unwrap();
        let report = andreev_check(&cube, &w).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == ConditionId::VertexSum && v.witness == Witness::Vertex(0)));
    }

    #[test]
    fn andreev_not_covered_and_trivalence() {
        let tetra = tetrahedron();
        let w = EdgeWeights::uniform(WeightMode::Andreev, &tetra, 1.2).unwrap();
        assert!(matches!(
            andreev_check(&tetra, &w),
            Err(AngleSpaceError::NotCovered { faces: 4 })
        ));
        let ico = icosahedron();
        let w = EdgeWeights::uniform(WeightMode::Andreev, &ico, 1.2).unwrap();
        assert!(matches!(
            andreev_check(&ico, &w),
            Err(AngleSpaceError::NonTrivalentVertex { .. })
        ));
    }

    #[test]
    fn bao_bonahon_regular_ideal_tetrahedron() {
        let tetra = tetrahedron();
        let w = EdgeWeights::uniform(WeightMode::BaoBonahon, &tetra, 2.0 * PI / 3.0).unwrap();
        let report = bao_bonahon_check(&tetra, &w).unwrap();
        assert!(report.accepted, "violations: {:?}", report.violations);
        match boundary_slack(&tetra, &w).unwrap() {
            SlackReport::BaoBonahon(s) => {
                assert!(s.min_circuit_excess.abs() < 1e-12, "{}", s.min_circuit_excess);
                assert!(
                    (s.min_nonelementary_excess - 2.0 * PI / 3.0).abs() < 1e-12,
                    "{}",
                    s.min_nonelementary_excess
                );
                // Shortest constrained path: two edges through the 4th vertex.
                assert!((s.min_path_excess - PI / 3.0).abs() < 1e-12);
            }
            other => panic!("wrong report {other:?}"),
        }
    }

    #[test]
    fn bao_bonahon_small_weights_rejected() {
        let tetra = tetrahedron();
        let w = EdgeWeights::uniform(WeightMode::BaoBonahon, &tetra, PI / 2.0).unwrap();
        let report = bao_bonahon_check(&tetra, &w).unwrap();
        assert!(!report.accepted);
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == ConditionId::CircuitSum && (v.lhs - 1.5 * PI).abs() < 1e-12));
    }

    #[test]
    fn weights_domain_is_enforced() {
        assert!(EdgeWeights::new(WeightMode::BaoBonahon, [((0, 1), PI)]).is_err());
        assert!(EdgeWeights::new(WeightMode::Andreev, [((0, 1), 1.6)]).is_err());
        assert!(EdgeWeights::new(WeightMode::Andreev, [((0, 1), 0.0)]).is_err());
    }

    #[test]
    fn min_cycle_matches_enumeration_oracle() {
        // On every fixture with ≤ 12 edges, the shortest-path machinery must
        // agree with exhaustive circuit enumeration.
        let mut rng = crate::rng::CounterRng::new(40);
        for c in [tetrahedron(), cube(), triangular_prism()] {
            if c.n_edges() > 12 {
                continue;
            }
            let entries: Vec<_> = c
                .edges()
                .iter()
                .map(|&k| (k, rng.next_in(0.5, 3.0)))
                .collect();
            let w = EdgeWeights::new(WeightMode::BaoBonahon, entries).unwrap();
            let wv: Vec<f64> = c.edges().iter().map(|&(a, b)| w.get(a, b).unwrap()).collect();

            let circuits = all_circuits(&c);
            let oracle_min = circuits
                .iter()
                .map(|cyc| circuit_weight(&c, &w, cyc))
                .fold(f64::INFINITY, f64::min);
            let got = min_cycle(&c, &wv).unwrap().0;
            assert!((got - oracle_min).abs() < 1e-12, "min cycle {got} vs {oracle_min}");

            let oracle_nonelem = circuits
                .iter()
                .filter(|cyc| !is_face_boundary(&c, cyc))
                .map(|cyc| circuit_weight(&c, &w, cyc))
                .fold(f64::INFINITY, f64::min);
            let got_nonelem = (0..c.n_edges())
                .filter_map(|e| min_nonelementary_cycle_through(&c, &wv, e).map(|(d, _)| d))
                .fold(f64::INFINITY, f64::min);
            assert!(
                (got_nonelem - oracle_nonelem).abs() < 1e-12,
                "non-elementary {got_nonelem} vs {oracle_nonelem}"
            );
        }
    }

    #[test]
    fn dodecahedron_slack_value() {
        let dodeca = dodecahedron().unwrap();
        let w = EdgeWeights::uniform(WeightMode::Andreev, &dodeca, PI / 2.0).unwrap();
        match boundary_slack(&dodeca, &w).unwrap() {
            SlackReport::Andreev(s) => {
                let expect = PI / (2.0 * 3.0f64.sqrt());
                assert!((s.distance - expect).abs() < 1e-12, "{}", s.distance);
                assert!(matches!(s.closest, Some((ConditionId::VertexSum, _))));
                assert!(s.cap_slack.abs() < 1e-15);
            }
            other => panic!("wrong report {other:?}"),
        }
    }

    #[test]
    fn slack_is_linear_in_uniform_perturbation() {
        let dodeca = dodecahedron().unwrap();
        let delta = 0.01;
        let w0 = EdgeWeights::uniform(WeightMode::Andreev, &dodeca, PI / 2.0 - delta).unwrap();
        let w1 = EdgeWeights::uniform(WeightMode::Andreev, &dodeca, PI / 2.0 - 2.0 * delta).unwrap();
        let (SlackReport::Andreev(s0), SlackReport::Andreev(s1)) = (
            boundary_slack(&dodeca, &w0).unwrap(),
            boundary_slack(&dodeca, &w1).unwrap(),
        ) else {
            panic!()
        };
        // Vertex-sum slack moves by 3δ/√3 per step of δ.
        let step = 3.0 * delta / 3.0f64.sqrt();
        assert!(((s0.distance - s1.distance) - step).abs() < 1e-12);
    }

    #[test]
    fn andreev_slack_is_one_lipschitz() {
        // |distance(w) − distance(w′)| ≤ ‖w − w′‖₂ on random weight pairs.
        let dodeca = dodecahedron().unwrap();
        let mut rng = crate::rng::CounterRng::new(60);
        for _ in 0..24 {
            let w1: Vec<f64> = (0..dodeca.n_edges())
                .map(|_| rng.next_in(1.25, PI / 2.0))
                .collect();
            let w2: Vec<f64> = w1
                .iter()
                .map(|w| (w + rng.next_in(-0.05, 0.05)).clamp(1.2, PI / 2.0))
                .collect();
            let make = |w: &[f64]| {
                EdgeWeights::new(
                    WeightMode::Andreev,
                    dodeca.edges().iter().copied().zip(w.iter().copied()),
                )
                .unwrap()
            };
            let (Ok(SlackReport::Andreev(s1)), Ok(SlackReport::Andreev(s2))) = (
                boundary_slack(&dodeca, &make(&w1)),
                boundary_slack(&dodeca, &make(&w2)),
            ) else {
                continue; // a perturbation left the admissible region
            };
            let dist: f64 = w1
                .iter()
                .zip(&w2)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(
                (s1.distance - s2.distance).abs() <= dist + 1e-12,
                "slacks {} vs {} over ‖Δw‖ = {dist}",
                s1.distance,
                s2.distance
            );
        }
    }

    #[test]
    fn andreev_monotonicity_direction() {
        // Decreasing a weight helps circuits (3, 4) and hurts vertex sums.
        let dodeca = dodecahedron().unwrap();
        let w_hi = EdgeWeights::uniform(WeightMode::Andreev, &dodeca, 1.45).unwrap();
        let w_lo = EdgeWeights::uniform(WeightMode::Andreev, &dodeca, 1.35).unwrap();
        let (SlackReport::Andreev(hi), SlackReport::Andreev(lo)) = (
            boundary_slack(&dodeca, &w_hi).unwrap(),
            boundary_slack(&dodeca, &w_lo).unwrap(),
        ) else {
            panic!()
        };
        let vertex = |s: &AndreevSlack| {
            s.family_minima
                .iter()
                .find(|(c, _)| *c == ConditionId::VertexSum)
                .unwrap()
                .1
        };
        assert!(vertex(&hi) > vertex(&lo));
    }

    #[test]
    fn dual_of_dual_is_isomorphic_in_counts() {
        let prism = triangular_prism();
        let dd = prism.dual().unwrap().dual().unwrap();
        assert_eq!(dd.n_vertices(), prism.n_vertices());
        assert_eq!(dd.n_edges(), prism.n_edges());
        assert_eq!(dd.n_faces(), prism.n_faces());
    }
}
