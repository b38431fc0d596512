//! Explicit compact convex polyhedra in H³: validation, dihedral angles,
//! face areas (hyperbolic Gauss–Bonnet), diameter, and the polar
//! (Gaussian-image) metric data.
//!
//! Vertices live on the hyperboloid; faces are supplied as vertex-index
//! cycles (no hull construction here — generators know their face
//! structure). Face planes are fitted by a least-squares spacelike normal
//! and oriented outward, so angle computations do not depend on the cycle
//! orientation; mis-oriented cycles are only reported.

use crate::gram::Realization;
use crate::minkowski::{
    acosh_stable, angle_at, mdot, HPlane, HPoint, MVector, MinkowskiError,
};
use nalgebra::DMatrix;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyhedronError {
    #[error("face {face} references vertex {vertex} out of range")]
    BadIndex { face: usize, vertex: usize },
    #[error("face {face} has fewer than 3 distinct vertices")]
    FaceTooSmall { face: usize },
    #[error("edge ({0}, {1}) lies in {2} faces, expected exactly 2")]
    OpenEdge(usize, usize, usize),
    #[error("need at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("face {face} plane fit failed ({reason})")]
    PlaneFitFailed { face: usize, reason: String },
    #[error("faces {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("polygon is degenerate")]
    DegeneratePolygon,
    #[error("realization is not a hyperbolic tetrahedron")]
    NotATetrahedron,
    #[error(transparent)]
    Minkowski(#[from] MinkowskiError),
}

/// Edge of the polyhedron with its two incident faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub faces: [usize; 2],
}

/// Convex polyhedron in the hyperboloid model: vertices plus face cycles,
/// with derived edges.
#[derive(Clone, Debug)]
pub struct PolyhedronGeometry {
    vertices: Vec<HPoint>,
    faces: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub accepted: bool,
    pub euler_ok: bool,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_faces: usize,
    pub max_planarity_residual: f64,
    /// Faces whose planarity residual exceeds tolerance.
    pub planarity_failures: Vec<(usize, f64)>,
    /// Worst (most positive) signed incidence of a non-incident vertex.
    pub min_convexity_margin: f64,
    /// (face, vertex, signed incidence) triples violating convexity.
    pub convexity_failures: Vec<(usize, usize, f64)>,
    /// Faces whose cycles read clockwise from outside (warning, not a
    /// rejection; angle computations fix orientation internally).
    pub misoriented_faces: Vec<usize>,
}

/// Per-edge dihedral angle data.
#[derive(Clone, Copy, Debug)]
pub struct EdgeAngle {
    pub edge: Edge,
    pub interior: f64,
    pub exterior: f64,
}

/// Cone points and dual-edge weights of the polar (Gaussian-image) metric.
#[derive(Clone, Debug)]
pub struct PolarMetric {
    /// Cone angle at the point dual to each face.
    pub cone_angles: Vec<f64>,
    /// (face, face, exterior dihedral angle) per edge of the polyhedron.
    pub dual_edges: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Copy, Debug)]
pub struct DiameterInfo {
    pub diameter: f64,
    pub attaining_pair: (usize, usize),
    pub max_edge_length: f64,
}

impl PolyhedronGeometry {
    /// Structural construction: indices in range, faces simple, every edge
    /// in exactly two faces. Geometric checks live in [`Self::validate`].
    pub fn new(vertices: Vec<HPoint>, faces: Vec<Vec<usize>>) -> Result<Self, PolyhedronError> {
        if vertices.len() < 4 {
            return Err(PolyhedronError::TooFewVertices(vertices.len()));
        }
        for (fi, cycle) in faces.iter().enumerate() {
            if cycle.len() < 3 {
                return Err(PolyhedronError::FaceTooSmall { face: fi });
            }
            let mut sorted = cycle.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cycle.len() {
                return Err(PolyhedronError::FaceTooSmall { face: fi });
            }
            for &v in cycle {
                if v >= vertices.len() {
                    return Err(PolyhedronError::BadIndex { face: fi, vertex: v });
                }
            }
        }
        let mut edge_map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, cycle) in faces.iter().enumerate() {
            for w in 0..cycle.len() {
                let (a, b) = (cycle[w], cycle[(w + 1) % cycle.len()]);
                let k = if a < b { (a, b) } else { (b, a) };
                edge_map.entry(k).or_default().push(fi);
            }
        }
        let mut edges = Vec::new();
        for (&(a, b), fs) in &edge_map {
            if fs.len() != 2 {
                return Err(PolyhedronError::OpenEdge(a, b, fs.len()));
            }
            edges.push(Edge {
                a,
                b,
                faces: [fs[0], fs[1]],
            });
        }
        Ok(PolyhedronGeometry {
            vertices,
            faces,
            edges,
        })
    }

    /// Tetrahedron from a realized compact hyperbolic Gram matrix; face i is
    /// opposite vertex i.
    pub fn from_tetrahedron(real: &Realization) -> Result<Self, PolyhedronError> {
        if real.dimension() != 3 || !real.is_hyperbolic() {
            return Err(PolyhedronError::NotATetrahedron);
        }
        let vertices: Result<Vec<HPoint>, MinkowskiError> = (0..4)
            .map(|j| HPoint::new(real.vertex_mvector(j).expect("n = 3")))
            .collect();
        let faces = vec![
            vec![1, 2, 3],
            vec![0, 2, 3],
            vec![0, 1, 3],
            vec![0, 1, 2],
        ];
        let raw = PolyhedronGeometry::new(vertices?, faces)?;
        Ok(raw.into_oriented().0)
    }

    pub fn vertices(&self) -> &[HPoint] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn coordinate_scale(&self) -> f64 {
        self.vertices
            .iter()
            .flat_map(|p| p.vector().0)
            .fold(1.0f64, |a, c| a.max(c.abs()))
    }

    /// Least-squares face plane, oriented outward (non-incident vertices on
    /// the negative side).
    pub fn face_plane(&self, f: usize) -> Result<HPlane, PolyhedronError> {
        let cycle = &self.faces[f];
        // Minimize Σ ⟨v_i, n⟩² = nᵗ (Σ (ηv)(ηv)ᵗ) n over Euclidean-unit n:
        // the smallest eigenvector of the 4×4 normal matrix, rescaled to
        // unit Minkowski norm. Coordinates are prescaled for conditioning.
        let scale = cycle
            .iter()
            .flat_map(|&v| self.vertices[v].vector().0)
            .fold(1.0f64, |a, c| a.max(c.abs()));
        let mut normal_matrix = DMatrix::zeros(4, 4);
        for &v in cycle {
            let x = self.vertices[v].vector();
            let row = [-x[0] / scale, x[1] / scale, x[2] / scale, x[3] / scale];
            for a in 0..4 {
                for b in 0..4 {
                    normal_matrix[(a, b)] += row[a] * row[b];
                }
            }
        }
        let eig = nalgebra::SymmetricEigen::new(normal_matrix);
        let mut min_idx = 0;
        for i in 1..4 {
            if eig.eigenvalues[i] < eig.eigenvalues[min_idx] {
                min_idx = i;
            }
        }
        let n_raw = MVector::new(
            eig.eigenvectors[(0, min_idx)],
            eig.eigenvectors[(1, min_idx)],
            eig.eigenvectors[(2, min_idx)],
            eig.eigenvectors[(3, min_idx)],
        );
        let plane = HPlane::from_spacelike(n_raw).map_err(|e| PolyhedronError::PlaneFitFailed {
            face: f,
            reason: e.to_string(),
        })?;
        // Orient outward by the side carrying the other vertices.
        let mut side = 0.0;
        for (vi, p) in self.vertices.iter().enumerate() {
            if !cycle.contains(&vi) {
                side += plane.eval(p);
            }
        }
        Ok(if side > 0.0 { plane.flipped() } else { plane })
    }

    /// Planarity, convexity, Euler count and cycle orientation, with
    /// tolerances scaled to the coordinate size.
    pub fn validate(&self) -> ValidationReport {
        let scale = self.coordinate_scale();
        let planar_tol = 1e-8 * scale;
        let mut report = ValidationReport {
            n_vertices: self.vertices.len(),
            n_edges: self.edges.len(),
            n_faces: self.faces.len(),
            ..ValidationReport::default()
        };
        report.euler_ok = self.vertices.len() as i64 - self.edges.len() as i64
            + self.faces.len() as i64
            == 2;
        report.min_convexity_margin = f64::INFINITY;

        for f in 0..self.faces.len() {
            let plane = match self.face_plane(f) {
                Ok(p) => p,
                Err(_) => {
                    report.planarity_failures.push((f, f64::INFINITY));
                    continue;
                }
            };
            let mut residual = 0.0f64;
            for &v in &self.faces[f] {
                residual = residual.max(plane.eval(&self.vertices[v]).abs());
            }
            report.max_planarity_residual = report.max_planarity_residual.max(residual);
            if residual > planar_tol {
                report.planarity_failures.push((f, residual));
            }
            // Convexity against the cycle-oriented plane: the input contract
            // says cycles read ccw from outside, so every non-incident
            // vertex must land strictly on the negative side.
            let oriented = self.cycle_oriented_plane(f, &plane);
            for (vi, p) in self.vertices.iter().enumerate() {
                if self.faces[f].contains(&vi) {
                    continue;
                }
                let s = oriented.eval(p);
                report.min_convexity_margin = report.min_convexity_margin.min(-s);
                if s > planar_tol {
                    report.convexity_failures.push((f, vi, s));
                }
            }
            if !self.cycle_is_ccw_from_outside(f, &plane) {
                report.misoriented_faces.push(f);
            }
        }
        report.accepted = report.euler_ok
            && report.planarity_failures.is_empty()
            && report.convexity_failures.is_empty();
        report
    }

    /// The face plane signed by the cycle: its positive side is the one the
    /// cycle reads counterclockwise from.
    fn cycle_oriented_plane(&self, f: usize, fitted: &HPlane) -> HPlane {
        if self.cycle_is_ccw_from_outside(f, fitted) {
            *fitted
        } else {
            fitted.flipped()
        }
    }

    /// Orientation test in the Klein model, where face planes are Euclidean.
    fn cycle_is_ccw_from_outside(&self, f: usize, plane: &HPlane) -> bool {
        let cycle = &self.faces[f];
        let klein: Vec<[f64; 3]> = cycle
            .iter()
            .map(|&v| {
                let x = self.vertices[v].vector();
                [x[1] / x[0], x[2] / x[0], x[3] / x[0]]
            })
            .collect();
        // Newell normal of the Klein polygon.
        let mut n = [0.0f64; 3];
        for i in 0..klein.len() {
            let p = klein[i];
            let q = klein[(i + 1) % klein.len()];
            n[0] += (p[1] - q[1]) * (p[2] + q[2]);
            n[1] += (p[2] - q[2]) * (p[0] + q[0]);
            n[2] += (p[0] - q[0]) * (p[1] + q[1]);
        }
        // Outward direction in Klein coordinates: the plane normal seen from
        // the body interior. Use the Minkowski normal's spatial part at the
        // face centroid as the outward direction.
        let nm = plane.normal();
        let dot = n[0] * nm[1] + n[1] * nm[2] + n[2] * nm[3];
        dot >= 0.0
    }

    /// Reverse the cycles of mis-oriented faces; returns the fixed geometry
    /// and the list of faces that were flipped.
    pub fn into_oriented(mut self) -> (Self, Vec<usize>) {
        let mut flipped = Vec::new();
        for f in 0..self.faces.len() {
            if let Ok(plane) = self.face_plane(f) {
                if !self.cycle_is_ccw_from_outside(f, &plane) {
                    self.faces[f].reverse();
                    flipped.push(f);
                }
            }
        }
        (self, flipped)
    }

    /// Interior and exterior dihedral angles at every edge, from outward
    /// face normals: cos(interior) = −⟨n₁, n₂⟩.
    pub fn dihedral_angles(&self) -> Result<Vec<EdgeAngle>, PolyhedronError> {
        let planes: Result<Vec<HPlane>, _> =
            (0..self.faces.len()).map(|f| self.face_plane(f)).collect();
        let planes = planes?;
        Ok(self
            .edges
            .iter()
            .map(|&edge| {
                let [f, g] = edge.faces;
                let c = -mdot(planes[f].normal(), planes[g].normal());
                let interior = c.clamp(-1.0, 1.0).acos();
                EdgeAngle {
                    edge,
                    interior,
                    exterior: std::f64::consts::PI - interior,
                }
            })
            .collect())
    }

    /// Dihedral angle between two adjacent faces.
    pub fn dihedral_angle(&self, f: usize, g: usize) -> Result<EdgeAngle, PolyhedronError> {
        self.dihedral_angles()?
            .into_iter()
            .find(|ea| ea.edge.faces == [f, g] || ea.edge.faces == [g, f])
            .ok_or(PolyhedronError::NotAdjacent(f, g))
    }

    /// Hyperbolic area of face f by Gauss–Bonnet:
    /// area = (k−2)π − Σ interior planar angles.
    pub fn face_area(&self, f: usize) -> Result<f64, PolyhedronError> {
        let cycle = &self.faces[f];
        let pts: Vec<HPoint> = cycle.iter().map(|&v| self.vertices[v]).collect();
        polygon_area(&pts)
    }

    /// Cone angles (2π + face area at each face point) and dual-edge weights
    /// (exterior dihedral angles) of the Gaussian image.
    pub fn polar_metric(&self) -> Result<PolarMetric, PolyhedronError> {
        let mut cone_angles = Vec::with_capacity(self.faces.len());
        for (f, cycle) in self.faces.iter().enumerate() {
            let k = cycle.len();
            let mut angle_sum = 0.0;
            for i in 0..k {
                let v = self.vertices[cycle[i]];
                let prev = self.vertices[cycle[(i + k - 1) % k]];
                let next = self.vertices[cycle[(i + 1) % k]];
                angle_sum += angle_at(&v, &prev, &next);
            }
            let _ = f;
            cone_angles.push(k as f64 * std::f64::consts::PI - angle_sum);
        }
        let angles = self.dihedral_angles()?;
        let dual_edges = angles
            .iter()
            .map(|ea| (ea.edge.faces[0], ea.edge.faces[1], ea.exterior))
            .collect();
        Ok(PolarMetric {
            cone_angles,
            dual_edges,
        })
    }

    /// Diameter (max vertex-pair distance; exact for convex polyhedra) and
    /// maximal edge length, in log-scaled arithmetic.
    pub fn diameter(&self) -> DiameterInfo {
        let mut best = 0.0f64;
        let mut pair = (0, 0);
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                let c = -mdot(self.vertices[i].vector(), self.vertices[j].vector());
                let d = acosh_stable(c.max(1.0));
                if d > best {
                    best = d;
                    pair = (i, j);
                }
            }
        }
        let max_edge = self
            .edges
            .iter()
            .map(|e| {
                let c = -mdot(self.vertices[e.a].vector(), self.vertices[e.b].vector());
                acosh_stable(c.max(1.0))
            })
            .fold(0.0f64, f64::max);
        DiameterInfo {
            diameter: best,
            attaining_pair: pair,
            max_edge_length: max_edge,
        }
    }

    /// 2D Klein coordinates of the face's vertices inside its own plane
    /// (an orthonormal tangent frame at the plane). Used by area oracles.
    pub fn plane_coordinates(&self, f: usize) -> Result<Vec<[f64; 2]>, PolyhedronError> {
        let plane = self.face_plane(f)?;
        let n = plane.normal();
        // Timelike frame vector inside the plane.
        let e0 = MVector::basis(0);
        let c = mdot(e0, n);
        let w = e0 - n.scale(c);
        let ut = {
            let q = w.norm2();
            debug_assert!(q < 0.0);
            let mut u = w.scale(1.0 / (-q).sqrt());
            if u[0] < 0.0 {
                u = -u;
            }
            u
        };
        // Two spacelike frame vectors via Minkowski Gram–Schmidt.
        let mut frame: Vec<MVector> = Vec::with_capacity(2);
        for i in 1..4 {
            if frame.len() == 2 {
                break;
            }
            let mut x = MVector::basis(i);
            x = x - n.scale(mdot(x, n));
            x = x + ut.scale(mdot(x, ut));
            for u in &frame {
                x = x - u.scale(mdot(x, *u));
            }
            let q = x.norm2();
            if q > 1e-12 {
                frame.push(x.scale(1.0 / q.sqrt()));
            }
        }
        if frame.len() != 2 {
            return Err(PolyhedronError::PlaneFitFailed {
                face: f,
                reason: "tangent frame construction failed".into(),
            });
        }
        Ok(self.faces[f]
            .iter()
            .map(|&v| {
                let x = self.vertices[v].vector();
                let t = -mdot(x, ut);
                [mdot(x, frame[0]) / t, mdot(x, frame[1]) / t]
            })
            .collect())
    }
}

/// Area of a planar convex hyperbolic polygon by Gauss–Bonnet:
/// (k−2)π − Σ interior angles.
pub fn polygon_area(points: &[HPoint]) -> Result<f64, PolyhedronError> {
    let k = points.len();
    if k < 3 {
        return Err(PolyhedronError::DegeneratePolygon);
    }
    let mut angle_sum = 0.0;
    for i in 0..k {
        let v = points[i];
        let prev = points[(i + k - 1) % k];
        let next = points[(i + 1) % k];
        if (mdot(v.vector(), prev.vector()) + 1.0).abs() < 1e-14
            || (mdot(v.vector(), next.vector()) + 1.0).abs() < 1e-14
        {
            return Err(PolyhedronError::DegeneratePolygon);
        }
        angle_sum += angle_at(&v, &prev, &next);
    }
    Ok((k as f64 - 2.0) * std::f64::consts::PI - angle_sum)
}
