//! Drum (antiprism) test family: two regular k-gon caps at axial parameters
//! ±τ, twisted by π/k, with triangulated lateral faces — the stretching
//! family driving the degeneration sweeps.
//!
//! Besides the double-precision generator there is a log-scaled evaluation
//! path for the belt quantities: every vertex component equals e^τ times a
//! polynomial in δ = e^{−τ}, so normal products and their limits can be
//! computed with the exponential scale factored out. The belt's exterior
//! angle excess over 2π then comes from the identically-vanishing constant
//! term of x∞²·B·C − A², which keeps full relative precision long after
//! Σ(exterior) − 2π has drowned in double rounding (the excess decays like
//! e^{−ρ/2} while doubles resolve absolute differences of ~1e−15 only).

use crate::minkowski::{HPoint, MVector};
use crate::polyhedron::{PolyhedronGeometry, PolyhedronError, ValidationReport};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DrumError {
    #[error("drum needs k ≥ 3, τ > 0, r > 0 (got k = {k}, τ = {tau}, r = {r})")]
    BadParams { k: usize, tau: f64, r: f64 },
    #[error("drum parameters produce a non-convex or non-planar geometry")]
    NotConvex(Box<ValidationReport>),
    #[error(transparent)]
    Polyhedron(#[from] PolyhedronError),
}

fn upper_vertex(k: usize, tau: f64, r: f64, j: usize) -> MVector {
    let theta = 2.0 * PI * j as f64 / k as f64;
    let (ch, sh) = (r.cosh(), r.sinh());
    let (ct, st) = (tau.cosh(), tau.sinh());
    // φ(τ) applied to (cosh r, 0, sinh r cos θ, sinh r sin θ).
    MVector::new(ct * ch, st * ch, sh * theta.cos(), sh * theta.sin())
}

fn lower_vertex(k: usize, tau: f64, r: f64, j: usize) -> MVector {
    let theta = 2.0 * PI * j as f64 / k as f64 + PI / k as f64;
    let (ch, sh) = (r.cosh(), r.sinh());
    let (ct, st) = (tau.cosh(), tau.sinh());
    MVector::new(ct * ch, -st * ch, sh * theta.cos(), sh * theta.sin())
}

/// Drum combinatorics: 2k vertices (upper 0..k, lower k..2k), two k-gon caps
/// and 2k lateral triangles.
pub fn drum_faces(k: usize) -> Vec<Vec<usize>> {
    let mut faces = Vec::with_capacity(2 * k + 2);
    faces.push((0..k).collect());
    faces.push((k..2 * k).rev().collect());
    for j in 0..k {
        let jn = (j + 1) % k;
        faces.push(vec![j, jn, k + j]); // upper triangle T_j
        faces.push(vec![k + j, k + jn, jn]); // lower triangle S_j
    }
    faces
}

/// Build and validate a drum. The returned geometry has outward-oriented
/// face cycles and passes the validator for the documented parameter ranges
/// (k ≥ 3, any τ > 0, 0 < r ≲ 1.5).
pub fn make_drum(k: usize, tau: f64, r: f64) -> Result<PolyhedronGeometry, DrumError> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if k < 3 || !positive(tau) || !positive(r) {
        return Err(DrumError::BadParams { k, tau, r });
    }
    // Closed-form coordinates are exact up to rounding; renormalizing
    // against the (cancellation-dominated) quadratic form would corrupt
    // them once cosh²τ·ε exceeds 1.
    let mut vertices = Vec::with_capacity(2 * k);
    for j in 0..k {
        vertices.push(HPoint::trusted(upper_vertex(k, tau, r, j)));
    }
    for j in 0..k {
        vertices.push(HPoint::trusted(lower_vertex(k, tau, r, j)));
    }
    let geometry = PolyhedronGeometry::new(vertices, drum_faces(k))?;
    let (geometry, _flipped) = geometry.into_oriented();
    let report = geometry.validate();
    if !report.accepted {
        return Err(DrumError::NotConvex(Box::new(report)));
    }
    Ok(geometry)
}

// ---------------------------------------------------------------------------
// Log-scaled stretch path
// ---------------------------------------------------------------------------

/// Dense polynomial in δ with f64 coefficients.
#[derive(Clone, Debug)]
struct Poly(Vec<f64>);

impl Poly {
    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut c = vec![0.0; n];
        for (i, v) in self.0.iter().enumerate() {
            c[i] += v;
        }
        for (i, v) in o.0.iter().enumerate() {
            c[i] += v;
        }
        Poly(c)
    }

    fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-1.0))
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut c = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly(c)
    }

    fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    fn constant_term(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    fn zero_constant(&mut self) {
        if let Some(c) = self.0.first_mut() {
            *c = 0.0;
        }
    }

    /// Divide by δ, requiring an (identically) vanishing constant term.
    fn shift_down(&self) -> Poly {
        debug_assert!(self.constant_term() == 0.0, "constant term must vanish");
        if self.0.len() <= 1 {
            Poly(vec![0.0])
        } else {
            Poly(self.0[1..].to_vec())
        }
    }
}

/// Vertex components divided by e^τ, as polynomials in δ = e^{−τ}:
/// cosh τ = e^τ(1+δ²)/2 and sinh τ = e^τ(1−δ²)/2, spatial parts pick up δ.
fn upper_poly(k: usize, r: f64, j: usize) -> [Poly; 4] {
    let theta = 2.0 * PI * j as f64 / k as f64;
    let (ch, sh) = (r.cosh(), r.sinh());
    [
        Poly(vec![ch / 2.0, 0.0, ch / 2.0]),
        Poly(vec![ch / 2.0, 0.0, -ch / 2.0]),
        Poly(vec![0.0, sh * theta.cos()]),
        Poly(vec![0.0, sh * theta.sin()]),
    ]
}

fn lower_poly(k: usize, r: f64, j: usize) -> [Poly; 4] {
    let theta = 2.0 * PI * j as f64 / k as f64 + PI / k as f64;
    let (ch, sh) = (r.cosh(), r.sinh());
    [
        Poly(vec![ch / 2.0, 0.0, ch / 2.0]),
        Poly(vec![-ch / 2.0, 0.0, ch / 2.0]),
        Poly(vec![0.0, sh * theta.cos()]),
        Poly(vec![0.0, sh * theta.sin()]),
    ]
}

fn mdot_poly(a: &[Poly; 4], b: &[Poly; 4]) -> Poly {
    a[1].mul(&b[1])
        .add(&a[2].mul(&b[2]))
        .add(&a[3].mul(&b[3]))
        .sub(&a[0].mul(&b[0]))
}

/// Minkowski normal of the plane through three points: m = η·∗(a∧b∧c),
/// so that ⟨m, a⟩ = ⟨m, b⟩ = ⟨m, c⟩ = 0.
fn cross_poly(a: &[Poly; 4], b: &[Poly; 4], c: &[Poly; 4]) -> [Poly; 4] {
    let det3 = |c0: usize, c1: usize, c2: usize| -> Poly {
        a[c0]
            .mul(&b[c1].mul(&c[c2]).sub(&b[c2].mul(&c[c1])))
            .sub(&a[c1].mul(&b[c0].mul(&c[c2]).sub(&b[c2].mul(&c[c0]))))
            .add(&a[c2].mul(&b[c0].mul(&c[c1]).sub(&b[c1].mul(&c[c0]))))
    };
    // N_ν = ±det of the minor without column ν; m = η N.
    let n0 = det3(1, 2, 3);
    let n1 = det3(0, 2, 3).scale(-1.0);
    let n2 = det3(0, 1, 3);
    let n3 = det3(0, 1, 2).scale(-1.0);
    [n0.scale(-1.0), n1, n2, n3]
}

/// Exterior-angle deficit (π − π/k) − exterior = interior∞ − interior of one
/// lateral edge, evaluated stably: the constant term of x∞²·B·C − A² vanishes
/// identically and is zeroed, so the deficit keeps relative precision at any τ.
fn edge_deficit(m1: &[Poly; 4], m2: &[Poly; 4], delta: f64) -> f64 {
    let mut a = mdot_poly(m1, m2);
    let b = mdot_poly(m1, m1);
    let c = mdot_poly(m2, m2);

    // Outward orientation: the drum center (1,0,0,0) must satisfy
    // ⟨m, center⟩ < 0, i.e. m⁰ > 0, at the evaluated δ.
    let s1 = if m1[0].eval(delta) > 0.0 { 1.0 } else { -1.0 };
    let s2 = if m2[0].eval(delta) > 0.0 { 1.0 } else { -1.0 };
    a = a.scale(s1 * s2);

    let (a0, b0, c0) = (a.constant_term(), b.constant_term(), c.constant_term());
    debug_assert!(b0 > 0.0 && c0 > 0.0, "limit normals must stay spacelike");
    let d_inf = a0 / (b0 * c0).sqrt();
    let t = d_inf * d_inf;

    let mut numer = b.mul(&c).scale(t).sub(&a.mul(&a));
    numer.zero_constant();

    let av = a.eval(delta);
    let bv = b.eval(delta);
    let cv = c.eval(delta);
    let nv = numer.eval(delta);
    let d = av / (bv * cv).sqrt();
    // D − D∞ without cancellation: D² − D∞² = −numer/(B·C).
    let delta_d = -nv / (bv * cv * (d + d_inf));

    // interior = arccos(−D); deficit = interior∞ − interior.
    let u_inf = -d_inf;
    let du = -delta_d; // u − u∞
    if du.abs() > 1e-5 {
        let u = -d;
        u_inf.clamp(-1.0, 1.0).acos() - u.clamp(-1.0, 1.0).acos()
    } else {
        let s = (1.0 - u_inf * u_inf).sqrt();
        du / s + u_inf * du * du / (2.0 * s * s * s)
    }
}

/// Apex turning angle of one lateral triangle (angle at the far cap vertex
/// between the two long edges), in log scale. With cosh c the τ-independent
/// ring-neighbor distance and a = b the long-edge lengths,
/// 1 − cos γ = (cosh c − cosh(a−b)) / (sinh a sinh b).
fn apex_angle(k: usize, tau: f64, r: f64) -> f64 {
    let (ch, sh) = (r.cosh(), r.sinh());
    let delta = (-tau).exp();
    // cosh(edge u_j u_{j+1}) — exact, τ-independent.
    let cosh_c = ch * ch - sh * sh * (2.0 * PI / k as f64).cos();
    // cosh(a) = e^{2τ}·(ch²(1+δ⁴)/2 − δ²sh²cos(π/k)); work with logs.
    let arg = ch * ch * (1.0 + delta.powi(4)) / 2.0
        - delta * delta * sh * sh * (PI / k as f64).cos();
    let log_cosh_a = 2.0 * tau + arg.ln();
    // ln sinh a = ln cosh a + ½·ln(1 − cosh⁻²a).
    let log_sinh_a = log_cosh_a + 0.5 * (-(-2.0 * log_cosh_a).exp()).ln_1p();
    // Symmetric drum: a = b, so cosh(a−b) = 1.
    let log_one_minus_cos = (cosh_c - 1.0).ln() - 2.0 * log_sinh_a;
    let one_minus_cos = log_one_minus_cos.exp();
    if one_minus_cos > 1e-8 {
        (1.0 - one_minus_cos).clamp(-1.0, 1.0).acos()
    } else {
        // γ = √(2u)·(1 + u/12 + 3u²/160 + …), u = 1 − cos γ.
        let u = one_minus_cos;
        (2.0 * u).sqrt() * (1.0 + u / 12.0 + 3.0 * u * u / 160.0)
    }
}

/// Belt quantities of the drum family in log-scaled arithmetic.
#[derive(Clone, Debug)]
pub struct StretchedBelt {
    pub k: usize,
    pub n_vertices: usize,
    /// Diameter ρ (log-scaled evaluation).
    pub rho: f64,
    /// Σ(exterior dihedral over the 2k lateral edges) − 2π.
    pub excess: f64,
    /// Per-edge deficits (π/k − exterior angle), 2k entries.
    pub per_edge_deficit: Vec<f64>,
    /// Apex turning angles, one per lateral triangle.
    pub turning_angles: Vec<f64>,
    pub turning_sum: f64,
}

/// Belt excess and turning angles of drum(k, τ, r) via the log-scaled path.
pub fn belt_excess_logscale(k: usize, tau: f64, r: f64) -> Result<StretchedBelt, DrumError> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if k < 3 || !positive(tau) || !positive(r) {
        return Err(DrumError::BadParams { k, tau, r });
    }
    let delta = (-tau).exp();
    let uppers: Vec<[Poly; 4]> = (0..k).map(|j| upper_poly(k, r, j)).collect();
    let lowers: Vec<[Poly; 4]> = (0..k).map(|j| lower_poly(k, r, j)).collect();
    // Ring-neighbor differences carry a structural factor δ (the constant
    // and δ² parts of the first two components coincide and cancel exactly);
    // factoring it keeps the limit normals nonzero at δ = 0. By
    // multilinearity cross(a, b, c) = cross(a, b − a, c) = δ·cross(a, e, c).
    let ring_dir = |a: &[Poly; 4], b: &[Poly; 4]| -> [Poly; 4] {
        [
            b[0].sub(&a[0]).shift_down(),
            b[1].sub(&a[1]).shift_down(),
            b[2].sub(&a[2]).shift_down(),
            b[3].sub(&a[3]).shift_down(),
        ]
    };
    let tri_upper: Vec<[Poly; 4]> = (0..k)
        .map(|j| {
            let e = ring_dir(&uppers[j], &uppers[(j + 1) % k]);
            cross_poly(&uppers[j], &e, &lowers[j])
        })
        .collect();
    let tri_lower: Vec<[Poly; 4]> = (0..k)
        .map(|j| {
            let e = ring_dir(&lowers[j], &lowers[(j + 1) % k]);
            cross_poly(&lowers[j], &e, &uppers[(j + 1) % k])
        })
        .collect();

    let mut per_edge_deficit = Vec::with_capacity(2 * k);
    for j in 0..k {
        // Edge (u_j, w_j): faces T_j and S_{j−1}.
        per_edge_deficit.push(edge_deficit(
            &tri_upper[j],
            &tri_lower[(j + k - 1) % k],
            delta,
        ));
        // Edge (u_{j+1}, w_j): faces T_j and S_j.
        per_edge_deficit.push(edge_deficit(&tri_upper[j], &tri_lower[j], delta));
    }
    let excess: f64 = per_edge_deficit.iter().sum();

    let gamma = apex_angle(k, tau, r);
    let turning_angles = vec![gamma; 2 * k];
    let turning_sum = 2.0 * k as f64 * gamma;

    Ok(StretchedBelt {
        k,
        n_vertices: 2 * k,
        rho: diameter_logscale(k, tau, r),
        excess,
        per_edge_deficit,
        turning_angles,
        turning_sum,
    })
}

/// Diameter ρ of drum(k, τ, r), valid for any τ (log-scaled).
pub fn diameter_logscale(k: usize, tau: f64, r: f64) -> f64 {
    let (ch, sh) = (r.cosh(), r.sinh());
    let delta = (-tau).exp();
    let mut best = f64::NEG_INFINITY;
    for j in 0..k {
        let dtheta = 2.0 * PI * j as f64 / k as f64 + PI / k as f64;
        let arg = ch * ch * (1.0 + delta.powi(4)) / 2.0 - delta * delta * sh * sh * dtheta.cos();
        best = best.max(arg);
    }
    let log_cosh_cross = (2.0 * tau + best.ln()).max(0.0);
    let mut best_same: f64 = 1.0;
    for j in 1..k {
        let dtheta = 2.0 * PI * j as f64 / k as f64;
        best_same = best_same.max(ch * ch - sh * sh * dtheta.cos());
    }
    let log_cosh = log_cosh_cross.max(best_same.ln());
    // acosh(e^L) = L + ln(1 + √(1 − e^{−2L})).
    log_cosh + (1.0 + (1.0 - (-2.0 * log_cosh).exp()).max(0.0).sqrt()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{mdot, point_distance};

    #[test]
    fn drum_combinatorics() {
        let p = make_drum(4, 5.0, 0.5).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.faces().len(), 10);
        assert_eq!(p.edges().len(), 16);
        let report = p.validate();
        assert!(report.accepted && report.euler_ok, "{report:?}");
    }

    #[test]
    fn drum_diameter_at_least_cap_separation() {
        for &(k, tau, r) in &[(3usize, 2.0, 0.4), (4, 5.0, 0.5), (6, 8.0, 0.8)] {
            let p = make_drum(k, tau, r).unwrap();
            let info = p.diameter();
            assert!(info.diameter >= 2.0 * tau, "ρ = {} < 2τ", info.diameter);
            // Log-scaled diameter must agree with the brute force.
            let log_rho = diameter_logscale(k, tau, r);
            assert!(
                (log_rho - info.diameter).abs() < 1e-9,
                "{log_rho} vs {}",
                info.diameter
            );
        }
    }

    #[test]
    fn drum_dihedrals_have_k_fold_symmetry() {
        let p = make_drum(5, 3.0, 0.6).unwrap();
        let angles = p.dihedral_angles().unwrap();
        // Collect lateral-lateral interior angles; the symmetry forces all
        // per-class values equal.
        let mut lateral: Vec<f64> = angles
            .iter()
            .filter(|ea| ea.edge.faces.iter().all(|&f| f >= 2))
            .map(|ea| ea.interior)
            .collect();
        assert_eq!(lateral.len(), 10);
        lateral.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(lateral.last().unwrap() - lateral.first().unwrap() < 1e-10);
    }

    #[test]
    fn upper_lower_polys_match_vertices() {
        let (k, tau, r) = (5usize, 3.7f64, 0.6);
        let delta = (-tau).exp();
        let scale = tau.exp();
        for j in 0..k {
            let u = upper_vertex(k, tau, r, j);
            let up = upper_poly(k, r, j);
            for c in 0..4 {
                assert!(
                    (u[c] - scale * up[c].eval(delta)).abs() < 1e-9 * scale,
                    "upper j={j} c={c}"
                );
            }
            let w = lower_vertex(k, tau, r, j);
            let wp = lower_poly(k, r, j);
            for c in 0..4 {
                assert!(
                    (w[c] - scale * wp[c].eval(delta)).abs() < 1e-9 * scale,
                    "lower j={j} c={c}"
                );
            }
        }
    }

    #[test]
    fn cross_poly_is_orthogonal_to_generators() {
        let (k, tau, r) = (4usize, 2.2f64, 0.5);
        let delta = (-tau).exp();
        let a = upper_poly(k, r, 0);
        let b = upper_poly(k, r, 1);
        let c = lower_poly(k, r, 0);
        let m = cross_poly(&a, &b, &c);
        for gen in [&a, &b, &c] {
            let dot = mdot_poly(&m, gen).eval(delta);
            assert!(dot.abs() < 1e-12, "dot {dot}");
        }
    }

    #[test]
    fn logscale_excess_matches_direct_at_moderate_tau() {
        // Where doubles still resolve the excess, the two routes must agree.
        for &(k, tau) in &[(4usize, 2.0), (4, 4.0), (6, 3.0), (6, 6.0)] {
            let r = 0.6;
            let p = make_drum(k, tau, r).unwrap();
            let angles = p.dihedral_angles().unwrap();
            let direct: f64 = angles
                .iter()
                .filter(|ea| ea.edge.faces.iter().all(|&f| f >= 2))
                .map(|ea| ea.exterior)
                .sum::<f64>()
                - 2.0 * PI;
            let stretched = belt_excess_logscale(k, tau, r).unwrap();
            assert!(
                (stretched.excess - direct).abs() < 1e-9 * direct.abs().max(1e-6),
                "k={k} τ={tau}: logscale {} vs direct {direct}",
                stretched.excess
            );
            assert!(stretched.excess > 0.0);
        }
    }

    #[test]
    fn logscale_excess_decays_exponentially() {
        let mut prev_log = f64::INFINITY;
        for &tau in &[5.0, 10.0, 20.0, 40.0, 60.0] {
            let s = belt_excess_logscale(6, tau, 0.6).unwrap();
            assert!(s.excess > 0.0, "τ={tau} excess {}", s.excess);
            let lg = s.excess.ln();
            assert!(lg < prev_log, "τ={tau}");
            prev_log = lg;
        }
        // At τ = 60 the excess is far below double-rounding of a 2π sum.
        let deep = belt_excess_logscale(6, 60.0, 0.6).unwrap();
        assert!(deep.excess < 1e-20 && deep.excess > 0.0);
    }

    #[test]
    fn apex_angles_match_direct_at_moderate_tau() {
        let (k, tau, r) = (4usize, 3.0, 0.5);
        let p = make_drum(k, tau, r).unwrap();
        // Direct: angle at w_0 between u_0 and u_1 (apex of T_0).
        let w0 = p.vertices()[k];
        let u0 = p.vertices()[0];
        let u1 = p.vertices()[1];
        let direct = crate::minkowski::angle_at(&w0, &u0, &u1);
        let gamma = apex_angle(k, tau, r);
        assert!(
            (gamma - direct).abs() < 1e-9 * direct.max(1e-9),
            "{gamma} vs {direct}"
        );
    }

    #[test]
    fn drum_edge_lengths_consistent() {
        let p = make_drum(4, 2.0, 0.5).unwrap();
        // Ring-neighbor distance formula cosh c = cosh²r − sinh²r·cos(2π/k).
        let want = (0.5f64.cosh().powi(2)
            - 0.5f64.sinh().powi(2) * (PI / 2.0).cos())
        .acosh();
        let got = point_distance(&p.vertices()[0], &p.vertices()[1]).unwrap();
        assert!((got - want).abs() < 1e-12);
        // Long edges have cosh a = e^{2τ}-scale products.
        let a = -mdot(p.vertices()[0].vector(), p.vertices()[4].vector());
        assert!(a > 1.0);
    }
}
