//! Quantitative degeneration diagnostics: slab construction, belt
//! extraction, the angle-sum and curvature estimates, and randomized
//! samplers for the supporting lemmas.
//!
//! For a polyhedron with N vertices and diameter ρ, equally spaced points on
//! a diameter leave (pigeonhole) a vertex-free subsegment; three planes
//! orthogonal to the diameter bound a slab of half-width t = ρ/(2N) there.
//! The faces crossing the slab form a belt whose exterior dihedral angles
//! sum to less than 2π + 12N·exp(−ρ/2N), and the belt is a quasigeodesic in
//! the Gaussian image with small turning angles. The lemma samplers check
//! the quantitative ingredients on random planes, lines and spherical
//! triangles:
//!
//! - plane through both slab walls: |cos(angle with mid-plane)| < 3e^{−t},
//! - line through both walls: cosh(distance of mid-plane hit from the
//!   center) < 4e^{−2t} + 1,
//! - spherical triangle with |cos β|, |cos γ| < ε: |α − A| < 2ε,
//! - polygon with vertices within r of a point: Σ(exterior) < 2π·cosh(r).

use crate::minkowski::{
    acosh_stable, angle_at, line_plane_intersection, mdot, HLine, HPlane, HPoint, MVector,
    MinkowskiError,
};
use crate::polyhedron::{PolyhedronError, PolyhedronGeometry};
use crate::rng::CounterRng;
use std::f64::consts::PI;
use thiserror::Error;

pub use crate::drum::{belt_excess_logscale, diameter_logscale, make_drum, DrumError, StretchedBelt};

#[derive(Debug, Error)]
pub enum DegenerationError {
    #[error("no vertex-free diameter segment found (tolerance failure)")]
    NoFreeSegment,
    #[error("a vertex lies on the mid-plane within tolerance")]
    VertexOnMidplane { vertex: usize },
    #[error("face {face} has {count} crossing edges, expected 0 or 2")]
    FaceCrossingCount { face: usize, count: usize },
    #[error("belt is not a single cycle: walked {walked} of {total} crossing edges")]
    BeltNotSingleCycle { walked: usize, total: usize },
    #[error("polyhedron has fewer than 4 vertices")]
    TooSmall,
    #[error(transparent)]
    Polyhedron(#[from] PolyhedronError),
    #[error(transparent)]
    Minkowski(#[from] MinkowskiError),
}

/// Slab frame: axis, center, half-width and the three orthogonal planes.
#[derive(Clone, Debug)]
pub struct SlabFrame {
    pub axis: HLine,
    pub center: HPoint,
    pub half_width: f64,
    pub mid: HPlane,
    pub minus: HPlane,
    pub plus: HPlane,
}

/// Degeneration bound c₁(N)·exp(−c₂(N)·ρ) with c₁ = 12N and c₂ = 1/(2N).
#[derive(Clone, Copy, Debug)]
pub struct DegenerationBounds {
    pub n_vertices: usize,
    pub rho: f64,
}

impl DegenerationBounds {
    pub fn c1(&self) -> f64 {
        12.0 * self.n_vertices as f64
    }

    pub fn c2(&self) -> f64 {
        1.0 / (2.0 * self.n_vertices as f64)
    }

    pub fn value(&self) -> f64 {
        self.c1() * (-self.c2() * self.rho).exp()
    }
}

/// Belt of faces crossing the slab, with angle sums and curvature data.
#[derive(Clone, Debug)]
pub struct BeltReport {
    /// Cyclic sequence of belt faces.
    pub faces: Vec<usize>,
    /// Crossed edges e_i shared by consecutive belt faces.
    pub crossed_edges: Vec<(usize, usize)>,
    pub k: usize,
    pub n_vertices: usize,
    pub rho: f64,
    pub exterior_sum: f64,
    /// Σ(exterior) − 2π.
    pub excess: f64,
    /// 12N·exp(−ρ/2N).
    pub bound: f64,
    /// k ≤ 2N − 4.
    pub face_count_ok: bool,
    /// Turning angle contributed by each belt face (0 if its crossed edges
    /// are hyperparallel).
    pub turning_angles: Vec<f64>,
    pub curvature_sum: f64,
    /// 3k·exp(−ρ/N) and the ρ/2N variant, reported side by side.
    pub curvature_bound_rho_n: f64,
    pub curvature_bound_rho_2n: f64,
    /// Mid-plane crossing points, in walk order.
    pub cross_section: Vec<HPoint>,
}

/// Cross-section polygon report for the angle-sum lemma, including the
/// proof-level intermediate quantities for inspection.
#[derive(Clone, Debug)]
pub struct CrossSectionReport {
    pub exterior_angles: Vec<f64>,
    pub exterior_sum: f64,
    /// Max distance of a polygon vertex from the slab center.
    pub r_max: f64,
    /// 2π·cosh(r_max).
    pub bound: f64,
    pub within_bound: bool,
    /// Distance-lemma bound on r_max: arccosh(4e^{−2t} + 1).
    pub r_max_bound: f64,
    /// Proof-level polygon bound 2π·(4e^{−2t} + 1).
    pub proof_polygon_bound: f64,
    /// |belt dihedral sum − polygon angle sum| and the link-corollary bound
    /// 2·(3e^{−t})·k.
    pub belt_polygon_gap: f64,
    pub link_bound: f64,
}

/// Report of a randomized lemma check.
#[derive(Clone, Debug)]
pub struct TrialReport {
    pub trials: u64,
    pub violations: u64,
    /// Max of (checked quantity)/(bound); < 1 means the lemma held with room.
    pub max_ratio: f64,
    pub parameter: f64,
}

/// Place N equally spaced points on a diameter, take a vertex-free
/// subsegment (the one with the largest projection margin), and erect the
/// three orthogonal planes with half-width t = ρ/(2N).
pub fn find_empty_slab(p: &PolyhedronGeometry) -> Result<SlabFrame, DegenerationError> {
    let n = p.vertices().len();
    if n < 4 {
        return Err(DegenerationError::TooSmall);
    }
    let info = p.diameter();
    let (ia, ib) = info.attaining_pair;
    let rho = info.diameter;
    let u = p.vertices()[ia];
    let v = p.vertices()[ib];
    let axis = HLine::new(u, v)?;

    // Projection parameter of each vertex onto the axis: the root of
    // ln cosh d(w, γ(s))′ = 0, i.e. A_u·cosh(ρ−s) = A_v·cosh(s), solved in
    // log scale so exponentially large coordinates survive.
    let ln_cosh = |x: f64| x.abs() + (-2.0 * x.abs()).exp().ln_1p() - std::f64::consts::LN_2;
    let projections: Vec<f64> = p
        .vertices()
        .iter()
        .map(|w| {
            let la = crate::minkowski::neg_mdot_log(w, &u);
            let lb = crate::minkowski::neg_mdot_log(w, &v);
            let g = |s: f64| la + ln_cosh(rho - s) - lb - ln_cosh(s);
            if g(0.0) <= 0.0 {
                return 0.0;
            }
            if g(rho) >= 0.0 {
                return rho;
            }
            let (mut lo, mut hi) = (0.0, rho);
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();

    // N points split the diameter into N−1 segments; pick the one with the
    // largest margin to any projection.
    let seg = rho / (n as f64 - 1.0);
    let mut best: Option<(usize, f64)> = None;
    for i in 0..(n - 1) {
        let lo = seg * i as f64;
        let hi = lo + seg;
        let margin = projections
            .iter()
            .map(|&s| (lo - s).max(s - hi))
            .fold(f64::INFINITY, f64::min);
        if best.map(|(_, m)| margin > m).unwrap_or(true) {
            best = Some((i, margin));
        }
    }
    let (idx, margin) = best.expect("at least one segment");
    if margin < -1e-9 * rho.max(1.0) {
        return Err(DegenerationError::NoFreeSegment);
    }
    let s_mid = seg * idx as f64 + 0.5 * seg;
    let t = rho / (2.0 * n as f64);

    Ok(SlabFrame {
        axis,
        center: crate::minkowski::geodesic_interpolate(&u, &v, s_mid),
        half_width: t,
        mid: crate::minkowski::geodesic_normal(&u, &v, s_mid),
        minus: crate::minkowski::geodesic_normal(&u, &v, s_mid - t),
        plus: crate::minkowski::geodesic_normal(&u, &v, s_mid + t),
    })
}

/// Walk the faces crossing the mid-plane into a single cyclic belt and
/// compute its angle sums, bounds and turning angles.
pub fn extract_belt(
    p: &PolyhedronGeometry,
    frame: &SlabFrame,
) -> Result<BeltReport, DegenerationError> {
    let scale = p
        .vertices()
        .iter()
        .flat_map(|v| v.vector().0)
        .fold(1.0f64, |a, c| a.max(c.abs()));
    let side: Vec<f64> = p.vertices().iter().map(|v| frame.mid.eval(v)).collect();
    for (vi, &s) in side.iter().enumerate() {
        if s.abs() < 1e-14 * scale {
            return Err(DegenerationError::VertexOnMidplane { vertex: vi });
        }
    }

    // Crossing edges and the crossing count per face.
    let crossing: Vec<usize> = (0..p.edges().len())
        .filter(|&e| {
            let edge = p.edges()[e];
            side[edge.a] * side[edge.b] < 0.0
        })
        .collect();
    let mut per_face: Vec<Vec<usize>> = vec![Vec::new(); p.faces().len()];
    for &e in &crossing {
        for f in p.edges()[e].faces {
            per_face[f].push(e);
        }
    }
    for (f, es) in per_face.iter().enumerate() {
        if !es.is_empty() && es.len() != 2 {
            return Err(DegenerationError::FaceCrossingCount {
                face: f,
                count: es.len(),
            });
        }
    }

    // Walk: enter a face through one crossing edge, leave through the other.
    let first_edge = *crossing.first().ok_or(DegenerationError::BeltNotSingleCycle {
        walked: 0,
        total: 0,
    })?;
    let first_face = p.edges()[first_edge].faces[0];
    let mut faces = Vec::new();
    let mut edges = Vec::new();
    let (mut cur_face, mut entry) = (first_face, first_edge);
    loop {
        faces.push(cur_face);
        let es = &per_face[cur_face];
        let exit = if es[0] == entry { es[1] } else { es[0] };
        edges.push(exit);
        let [fa, fb] = p.edges()[exit].faces;
        let next = if fa == cur_face { fb } else { fa };
        if next == first_face {
            break;
        }
        cur_face = next;
        entry = exit;
        if faces.len() > p.faces().len() {
            return Err(DegenerationError::BeltNotSingleCycle {
                walked: faces.len(),
                total: crossing.len(),
            });
        }
    }
    if edges.len() != crossing.len() {
        return Err(DegenerationError::BeltNotSingleCycle {
            walked: edges.len(),
            total: crossing.len(),
        });
    }

    let k = faces.len();
    let n_vertices = p.vertices().len();
    let info = p.diameter();
    let rho = info.diameter;
    let bounds = DegenerationBounds { n_vertices, rho };

    // Exterior-angle sum over the crossed edges.
    let all_angles = p.dihedral_angles()?;
    let angle_of = |e: usize| -> f64 { all_angles[e].exterior };
    let exterior_sum: f64 = edges.iter().map(|&e| angle_of(e)).sum();

    // Mid-plane crossing points, in walk order (exit edge of each face).
    let mut cross_section = Vec::with_capacity(k);
    for &e in &edges {
        let edge = p.edges()[e];
        let line = HLine::new(p.vertices()[edge.a], p.vertices()[edge.b])?;
        let hit = line_plane_intersection(&line, &frame.mid).ok_or(
            DegenerationError::FaceCrossingCount {
                face: 0,
                count: 0,
            },
        )?;
        cross_section.push(hit);
    }

    // Turning angle per face: the angle at the intersection point of its two
    // crossed edge lines between the rays toward the mid-plane hits.
    let mut turning_angles = Vec::with_capacity(k);
    for (i, &f) in faces.iter().enumerate() {
        let e_in = edges[(i + k - 1) % k];
        let e_out = edges[i];
        let a_pt = cross_section[(i + k - 1) % k];
        let b_pt = cross_section[i];
        turning_angles.push(face_turning_angle(p, f, e_in, e_out, &a_pt, &b_pt)?);
    }
    let curvature_sum: f64 = turning_angles.iter().sum();

    Ok(BeltReport {
        faces,
        crossed_edges: edges
            .iter()
            .map(|&e| (p.edges()[e].a, p.edges()[e].b))
            .collect(),
        k,
        n_vertices,
        rho,
        exterior_sum,
        excess: exterior_sum - 2.0 * PI,
        bound: bounds.value(),
        face_count_ok: k <= 2 * n_vertices - 4,
        turning_angles,
        curvature_sum,
        curvature_bound_rho_n: 3.0 * k as f64 * (-rho / n_vertices as f64).exp(),
        curvature_bound_rho_2n: 3.0 * k as f64 * (-rho / (2.0 * n_vertices as f64)).exp(),
        cross_section,
    })
}

/// Angle between the two crossed edge lines of a belt face at their common
/// point, measured between the rays toward the mid-plane hits; 0 when the
/// lines are hyperparallel inside the face plane.
fn face_turning_angle(
    p: &PolyhedronGeometry,
    face: usize,
    e_in: usize,
    e_out: usize,
    toward_a: &HPoint,
    toward_b: &HPoint,
) -> Result<f64, DegenerationError> {
    let n_f = p.face_plane(face)?.normal();
    let line_points = |e: usize| -> (MVector, MVector) {
        let edge = p.edges()[e];
        (p.vertices()[edge.a].vector(), p.vertices()[edge.b].vector())
    };
    let (a1, b1) = line_points(e_in);
    let (a2, b2) = line_points(e_out);
    // In-plane normal of the second line: orthogonal to its two points and
    // to the face normal.
    let m2 = cross4(a2, b2, n_f);
    // Intersection of line 1 with line 2 inside the face plane.
    let x = a1.scale(mdot(b1, m2)) - b1.scale(mdot(a1, m2));
    let q = x.norm2();
    if q >= 0.0 {
        return Ok(0.0); // hyperparallel edges contribute nothing
    }
    let c = HPoint::from_timelike(x)?;
    Ok(angle_at(&c, toward_a, toward_b))
}

/// Minkowski 4D cross product: ⟨cross4(a,b,c), a⟩ = 0 and cyclic.
fn cross4(a: MVector, b: MVector, c: MVector) -> MVector {
    let det3 = |c0: usize, c1: usize, c2: usize| -> f64 {
        a[c0] * (b[c1] * c[c2] - b[c2] * c[c1]) - a[c1] * (b[c0] * c[c2] - b[c2] * c[c0])
            + a[c2] * (b[c0] * c[c1] - b[c1] * c[c0])
    };
    MVector::new(
        -det3(1, 2, 3),
        -det3(0, 2, 3),
        det3(0, 1, 3),
        -det3(0, 1, 2),
    )
}

/// Exterior angles of the mid-plane cross-section polygon, the 2π·cosh(r)
/// bound, and the link-corollary comparison against the belt's dihedral sum.
pub fn cross_section_angle_sum(
    p: &PolyhedronGeometry,
    frame: &SlabFrame,
) -> Result<CrossSectionReport, DegenerationError> {
    let belt = extract_belt(p, frame)?;
    let pts = &belt.cross_section;
    let k = pts.len();
    let mut exterior_angles = Vec::with_capacity(k);
    for i in 0..k {
        let prev = &pts[(i + k - 1) % k];
        let next = &pts[(i + 1) % k];
        let interior = angle_at(&pts[i], prev, next);
        exterior_angles.push(PI - interior);
    }
    let exterior_sum: f64 = exterior_angles.iter().sum();
    let r_max = pts
        .iter()
        .map(|a| acosh_stable((-mdot(a.vector(), frame.center.vector())).max(1.0)))
        .fold(0.0f64, f64::max);
    let bound = 2.0 * PI * r_max.cosh();
    let t = frame.half_width;
    let eps = 3.0 * (-t).exp();
    let dist_margin = 4.0 * (-2.0 * t).exp();
    Ok(CrossSectionReport {
        exterior_sum,
        r_max,
        bound,
        // Tolerance floor: beyond ρ ≈ 60 both sums are 2π plus sub-rounding
        // excesses, so the comparison carries an absolute noise allowance.
        within_bound: exterior_sum < bound + 1e-12 * k as f64,
        r_max_bound: (1.0 + dist_margin).acosh(),
        proof_polygon_bound: 2.0 * PI * (1.0 + dist_margin),
        belt_polygon_gap: (belt.exterior_sum - exterior_sum).abs(),
        link_bound: 2.0 * eps * k as f64,
        exterior_angles,
    })
}

// ---------------------------------------------------------------------------
// Lemma samplers
// ---------------------------------------------------------------------------

/// Standard frame for the samplers: x₀ = (1,0,0,0), P = {⟨x, e₁⟩ = 0},
/// P± = φ(±t)P, sampling window of radius 2t on each wall.
fn wall_point(rng: &mut CounterRng, t: f64, sign: f64, window: f64) -> HPoint {
    let r = rng.next_in(0.0, window);
    let psi = rng.next_in(0.0, 2.0 * PI);
    // Closed form is exact up to rounding; renormalization would only hurt
    // at these coordinate scales.
    let p = HPoint::trusted(MVector::new(
        r.cosh(),
        0.0,
        r.sinh() * psi.cos(),
        r.sinh() * psi.sin(),
    ));
    crate::minkowski::boost(sign * t).apply_point(&p)
}

/// Random planes through both slab walls: Q must meet the mid-plane at an
/// angle with |cos α| < 3e^{−t}.
pub fn sample_lemma_angle(t: f64, trials: u64, seed: u64) -> TrialReport {
    let mut rng = CounterRng::with_stream(seed, 0xA);
    let window = 2.0 * t;
    let e1 = MVector::basis(1);
    let bound = 3.0 * (-t).exp();
    let mut violations = 0u64;
    let mut max_ratio = 0.0f64;
    for _ in 0..trials {
        let qm = wall_point(&mut rng, t, -1.0, window);
        let qp = wall_point(&mut rng, t, 1.0, window);
        let Some((b1, b2)) = plane_family_basis(&qm, &qp) else {
            violations += 1;
            continue;
        };
        let psi = rng.next_in(0.0, 2.0 * PI);
        let n = b1.scale(psi.cos()) + b2.scale(psi.sin());
        let cos_alpha = mdot(n, e1).abs();
        // Q must intersect P at all, and the cosine must obey the bound.
        if cos_alpha >= 1.0 || cos_alpha >= bound {
            violations += 1;
        }
        max_ratio = max_ratio.max(cos_alpha / bound);
    }
    TrialReport {
        trials,
        violations,
        max_ratio,
        parameter: t,
    }
}

/// Minkowski-orthonormal basis of the normals of all planes through two
/// points: the (spacelike) complement of span(q⁻, q⁺). Extracted from the
/// null space of Σ (ηq)(ηq)ᵗ, which stays well-conditioned for the large
/// coordinates of wide sampling windows.
fn plane_family_basis(qm: &HPoint, qp: &HPoint) -> Option<(MVector, MVector)> {
    let scale = qm.vector().0.iter().chain(qp.vector().0.iter())
        .fold(1.0f64, |a, c| a.max(c.abs()));
    let mut a = nalgebra::Matrix4::<f64>::zeros();
    for q in [qm.vector(), qp.vector()] {
        let row = [-q[0] / scale, q[1] / scale, q[2] / scale, q[3] / scale];
        for i in 0..4 {
            for j in 0..4 {
                a[(i, j)] += row[i] * row[j];
            }
        }
    }
    let eig = nalgebra::SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].partial_cmp(&eig.eigenvalues[y]).unwrap());
    let col = |i: usize| {
        MVector::new(
            eig.eigenvectors[(0, order[i])],
            eig.eigenvectors[(1, order[i])],
            eig.eigenvectors[(2, order[i])],
            eig.eigenvectors[(3, order[i])],
        )
    };
    // Minkowski Gram–Schmidt inside the (positive definite) null plane.
    let v1 = col(0);
    let q1 = v1.norm2();
    if q1 <= 0.0 {
        return None;
    }
    let b1 = v1.scale(1.0 / q1.sqrt());
    let mut v2 = col(1);
    v2 = v2 - b1.scale(mdot(v2, b1));
    let q2 = v2.norm2();
    if q2 <= 0.0 {
        return None;
    }
    Some((b1, v2.scale(1.0 / q2.sqrt())))
}

/// Random lines through both slab walls: the mid-plane intersection point
/// satisfies cosh d(·, x₀) < 4e^{−2t} + 1.
pub fn sample_lemma_dist(t: f64, trials: u64, seed: u64) -> TrialReport {
    let mut rng = CounterRng::with_stream(seed, 0xD);
    let window = 2.0 * t;
    let mid = HPlane::new(MVector::basis(1)).expect("e₁ is unit spacelike");
    let x0 = HPoint::origin();
    let margin = 4.0 * (-2.0 * t).exp();
    let mut violations = 0u64;
    let mut max_ratio = 0.0f64;
    for _ in 0..trials {
        let qm = wall_point(&mut rng, t, -1.0, window);
        let qp = wall_point(&mut rng, t, 1.0, window);
        let Ok(line) = HLine::new(qm, qp) else {
            violations += 1;
            continue;
        };
        let Some(hit) = line_plane_intersection(&line, &mid) else {
            violations += 1;
            continue;
        };
        let cosh_d = -mdot(hit.vector(), x0.vector());
        if cosh_d >= 1.0 + margin {
            violations += 1;
        }
        max_ratio = max_ratio.max((cosh_d - 1.0) / margin);
    }
    TrialReport {
        trials,
        violations,
        max_ratio,
        parameter: t,
    }
}

/// Random spherical triangles with two near-right angles: |α − A| < 2ε.
/// Triangles are built ASA from angles β, γ (|cos| < ε) and the included
/// side A; α comes from the polar law of cosines.
pub fn sample_lemma_spherical(eps: f64, trials: u64, seed: u64) -> TrialReport {
    let mut rng = CounterRng::with_stream(seed, 0x5);
    let mut violations = 0u64;
    let mut max_ratio = 0.0f64;
    for _ in 0..trials {
        let beta = rng.next_in(-eps, eps).acos();
        let gamma = rng.next_in(-eps, eps).acos();
        let side_a = rng.next_in(0.01, PI - 0.01);
        let cos_alpha = -beta.cos() * gamma.cos() + beta.sin() * gamma.sin() * side_a.cos();
        let alpha = cos_alpha.clamp(-1.0, 1.0).acos();
        let dev = (alpha - side_a).abs();
        if dev >= 2.0 * eps {
            violations += 1;
        }
        max_ratio = max_ratio.max(dev / (2.0 * eps));
    }
    TrialReport {
        trials,
        violations,
        max_ratio,
        parameter: eps,
    }
}

/// Smallest parameter in `grid` from which upward all sampled runs are
/// violation-free: the empirical t₀ of the lemma statements.
pub fn empirical_t0(
    sampler: impl Fn(f64, u64, u64) -> TrialReport,
    grid: &[f64],
    trials: u64,
    seed: u64,
) -> Option<f64> {
    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let reports: Vec<TrialReport> = sorted.iter().map(|&t| sampler(t, trials, seed)).collect();
    let mut t0 = None;
    for (i, rep) in reports.iter().enumerate() {
        if rep.violations == 0 && reports[i..].iter().all(|r| r.violations == 0) {
            t0 = Some(sorted[i]);
            break;
        }
    }
    t0
}
