//! Linear algebra of Minkowski space R^{3,1} and the hyperboloid model of H³.
//!
//! The ambient scalar product is ⟨x, y⟩ = −x₀y₀ + x₁y₁ + x₂y₂ + x₃y₃ (first
//! coordinate timelike). Hyperbolic space is the upper sheet {⟨x, x⟩ = −1,
//! x₀ > 0}; planes are the loci {⟨x, n⟩ = 0} for unit spacelike normals n;
//! the boost φ(r) translates by r along the geodesic through (1,0,0,0) in
//! the x₁ direction:
//!
//! ```text
//!          ⎛ cosh r  sinh r  0  0 ⎞
//!   φ(r) = ⎜ sinh r  cosh r  0  0 ⎟
//!          ⎜   0       0     1  0 ⎟
//!          ⎝   0       0     0  1 ⎠
//! ```
//!
//! All values are immutable after construction; every operation is pure.

use thiserror::Error;

/// Module-level tolerance ε_geom for invariant checks.
pub const GEOM_TOL: f64 = 1e-9;
/// Classification band around |⟨n₁,n₂⟩| = 1 treated as asymptotic planes.
pub const ASYMPTOTIC_BAND: f64 = 1e-12;
/// Constructors renormalize inputs within this drift budget and reject beyond.
pub const DRIFT_BUDGET: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinkowskiError {
    #[error("vector is not on the hyperboloid: ⟨x,x⟩ = {norm2}, drift beyond budget")]
    NotOnHyperboloid { norm2: f64 },
    #[error("point must lie on the upper sheet (x₀ > 0), got x₀ = {t}")]
    WrongSheet { t: f64 },
    #[error("normal is not unit spacelike: ⟨n,n⟩ = {norm2}, drift beyond budget")]
    NotUnitSpacelike { norm2: f64 },
    #[error("line endpoints are proportional")]
    DegenerateLine,
    #[error("points are not within distance domain: −⟨p,q⟩ = {value} < 1")]
    DistanceDomain { value: f64 },
    #[error("coordinates must be finite")]
    NonFinite,
}

/// Vector in R^{3,1}, signature (−,+,+,+); coordinate 0 is timelike.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MVector(pub [f64; 4]);

impl MVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        MVector([t, x, y, z])
    }

    /// Standard basis vector e_i, 0 ≤ i ≤ 3.
    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        MVector(c)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Minkowski square ⟨v, v⟩.
    pub fn norm2(&self) -> f64 {
        mdot(*self, *self)
    }

    pub fn scale(&self, s: f64) -> Self {
        MVector([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }
}

impl std::ops::Add for MVector {
    type Output = MVector;
    fn add(self, o: MVector) -> MVector {
        MVector([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
}

impl std::ops::Sub for MVector {
    type Output = MVector;
    fn sub(self, o: MVector) -> MVector {
        MVector([
            self.0[0] - o.0[0],
            self.0[1] - o.0[1],
            self.0[2] - o.0[2],
            self.0[3] - o.0[3],
        ])
    }
}

impl std::ops::Neg for MVector {
    type Output = MVector;
    fn neg(self) -> MVector {
        self.scale(-1.0)
    }
}

impl std::ops::Index<usize> for MVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// The Minkowski scalar product ⟨u, v⟩ = −u₀v₀ + u₁v₁ + u₂v₂ + u₃v₃.
#[inline]
pub fn mdot(u: MVector, v: MVector) -> f64 {
    -u.0[0] * v.0[0] + u.0[1] * v.0[1] + u.0[2] * v.0[2] + u.0[3] * v.0[3]
}

/// arccosh that stays accurate for very large arguments (log-scaled branch).
pub fn acosh_stable(u: f64) -> f64 {
    if u >= 1e8 {
        // acosh u = ln(2u) − 1/(4u²) − ...; the correction is below 1 ulp here.
        u.ln() + std::f64::consts::LN_2
    } else {
        u.acosh()
    }
}

/// Point on the upper hyperboloid sheet ⟨x,x⟩ = −1, x₀ > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    v: MVector,
}

impl HPoint {
    /// Renormalizes within the drift budget; rejects non-timelike input or
    /// drift beyond `DRIFT_BUDGET`.
    pub fn new(v: MVector) -> Result<Self, MinkowskiError> {
        if !v.is_finite() {
            return Err(MinkowskiError::NonFinite);
        }
        let q = v.norm2();
        if q >= 0.0 || (q + 1.0).abs() > DRIFT_BUDGET * q.abs().max(1.0) {
            return Err(MinkowskiError::NotOnHyperboloid { norm2: q });
        }
        if v[0] <= 0.0 {
            return Err(MinkowskiError::WrongSheet { t: v[0] });
        }
        Ok(HPoint {
            v: v.scale(1.0 / (-q).sqrt()),
        })
    }

    /// Normalize an arbitrary timelike vector onto the upper sheet.
    pub fn from_timelike(v: MVector) -> Result<Self, MinkowskiError> {
        if !v.is_finite() {
            return Err(MinkowskiError::NonFinite);
        }
        let q = v.norm2();
        if q >= 0.0 {
            return Err(MinkowskiError::NotOnHyperboloid { norm2: q });
        }
        let mut u = v.scale(1.0 / (-q).sqrt());
        if u[0] < 0.0 {
            u = -u;
        }
        Ok(HPoint { v: u })
    }

    pub fn origin() -> Self {
        HPoint {
            v: MVector::new(1.0, 0.0, 0.0, 0.0),
        }
    }

    pub fn vector(&self) -> MVector {
        self.v
    }

    /// Accept `v` as already on the hyperboloid. Used after exact isometries
    /// and closed-form constructions whose coordinates are too large for the
    /// quadratic form to be evaluated without catastrophic cancellation.
    pub(crate) fn trusted(v: MVector) -> HPoint {
        HPoint { v }
    }

    /// Renormalize when the scale permits it, otherwise trust the input.
    fn after_isometry(v: MVector) -> HPoint {
        let scale = v.0.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale < 1e6 {
            HPoint::from_timelike(v).expect("isometry image of a point is timelike")
        } else {
            let mut u = v;
            if u[0] < 0.0 {
                u = -u;
            }
            HPoint::trusted(u)
        }
    }
}

/// Plane in H³, stored as its unit spacelike normal (⟨n,n⟩ = +1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPlane {
    normal: MVector,
}

impl HPlane {
    pub fn new(normal: MVector) -> Result<Self, MinkowskiError> {
        if !normal.is_finite() {
            return Err(MinkowskiError::NonFinite);
        }
        let q = normal.norm2();
        if q <= 0.0 || (q - 1.0).abs() > DRIFT_BUDGET * q.max(1.0) {
            return Err(MinkowskiError::NotUnitSpacelike { norm2: q });
        }
        Ok(HPlane {
            normal: normal.scale(1.0 / q.sqrt()),
        })
    }

    /// Normalize an arbitrary spacelike vector.
    pub fn from_spacelike(normal: MVector) -> Result<Self, MinkowskiError> {
        if !normal.is_finite() {
            return Err(MinkowskiError::NonFinite);
        }
        let q = normal.norm2();
        if q <= 0.0 {
            return Err(MinkowskiError::NotUnitSpacelike { norm2: q });
        }
        Ok(HPlane {
            normal: normal.scale(1.0 / q.sqrt()),
        })
    }

    pub fn normal(&self) -> MVector {
        self.normal
    }

    pub(crate) fn trusted(normal: MVector) -> HPlane {
        HPlane { normal }
    }

    /// Normalize when the coordinate scale permits, trust otherwise (for
    /// closed-form constructions with very large entries).
    pub(crate) fn from_spacelike_or_trust(normal: MVector) -> HPlane {
        HPlane::after_isometry(normal)
    }

    fn after_isometry(normal: MVector) -> HPlane {
        let scale = normal.0.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale < 1e6 {
            HPlane::from_spacelike(normal).expect("isometry image of a normal is spacelike")
        } else {
            HPlane::trusted(normal)
        }
    }

    /// Signed incidence ⟨p, n⟩ of a point against this plane.
    pub fn eval(&self, p: &HPoint) -> f64 {
        mdot(p.vector(), self.normal)
    }

    pub fn flipped(&self) -> HPlane {
        HPlane {
            normal: -self.normal,
        }
    }
}

/// Line in H³ spanned by two distinct points.
#[derive(Clone, Copy, Debug)]
pub struct HLine {
    a: HPoint,
    b: HPoint,
}

impl HLine {
    pub fn new(a: HPoint, b: HPoint) -> Result<Self, MinkowskiError> {
        // Proportional unit timelike vectors on the same sheet are equal.
        if (mdot(a.vector(), b.vector()) + 1.0).abs() < ASYMPTOTIC_BAND {
            return Err(MinkowskiError::DegenerateLine);
        }
        Ok(HLine { a, b })
    }

    pub fn endpoints(&self) -> (HPoint, HPoint) {
        (self.a, self.b)
    }

    /// Unit tangent at `a` pointing toward `b`.
    pub fn tangent_at_start(&self) -> MVector {
        let u = self.a.vector();
        let w = self.b.vector();
        let t = w + u.scale(mdot(w, u));
        t.scale(1.0 / t.norm2().sqrt())
    }

    /// Unit-speed geodesic through the endpoints: γ(0) = a, γ(d(a,b)) = b.
    /// Accurate for moderate coordinates; for endpoints with exponentially
    /// large entries use [`geodesic_interpolate`], which avoids the
    /// cosh-scale cancellation of this form.
    pub fn at(&self, s: f64) -> HPoint {
        let u = self.a.vector();
        let t = self.tangent_at_start();
        HPoint {
            v: u.scale(s.cosh()) + t.scale(s.sinh()),
        }
    }
}

/// Hyperbolic distance arccosh(−⟨p, q⟩).
pub fn point_distance(p: &HPoint, q: &HPoint) -> Result<f64, MinkowskiError> {
    let c = -mdot(p.vector(), q.vector());
    if c < 1.0 - GEOM_TOL {
        return Err(MinkowskiError::DistanceDomain { value: c });
    }
    Ok(acosh_stable(c.max(1.0)))
}

/// Log-scaled accessor: ln(−⟨p, q⟩). Survives distances far beyond the range
/// where cosh(d) itself is representable in intermediate computations.
pub fn neg_mdot_log(p: &HPoint, q: &HPoint) -> f64 {
    (-mdot(p.vector(), q.vector())).max(f64::MIN_POSITIVE).ln()
}

/// Mutual position of two planes, classified by |⟨n₁, n₂⟩| against 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaneRelation {
    /// Planes meet along a line; `cos_angle` = ⟨n₁, n₂⟩, the cosine of
    /// the intersection angle.
    Intersecting { cos_angle: f64 },
    /// Planes meet at infinity.
    Asymptotic,
    /// Disjoint planes with a common perpendicular of length `distance`.
    Ultraparallel { distance: f64 },
}

pub fn plane_relation(p: &HPlane, q: &HPlane) -> PlaneRelation {
    let d = mdot(p.normal, q.normal);
    if d.abs() < 1.0 - ASYMPTOTIC_BAND {
        PlaneRelation::Intersecting { cos_angle: d }
    } else if d.abs() <= 1.0 + ASYMPTOTIC_BAND {
        // |⟨n₁,n₂⟩| = 1 covers both tangent planes and equal planes; equal
        // normals (up to sign) mean the same plane, which meets itself.
        let s = d.signum();
        let gap = (q.normal - p.normal.scale(s)).0;
        if gap.iter().all(|c| c.abs() <= 1e-9) {
            PlaneRelation::Intersecting { cos_angle: s }
        } else {
            PlaneRelation::Asymptotic
        }
    } else {
        PlaneRelation::Ultraparallel {
            distance: acosh_stable(d.abs()),
        }
    }
}

/// Intersection point of a line with a plane, if a timelike combination of
/// the endpoints lies on the plane.
///
/// The point is m/‖m‖ with ⟨m, n⟩ = 0, ‖Z‖ = √(−⟨Z,Z⟩). A line contained in
/// the plane returns its first endpoint.
pub fn line_plane_intersection(line: &HLine, plane: &HPlane) -> Option<HPoint> {
    let (a, b) = (line.a.vector(), line.b.vector());
    let fa = mdot(a, plane.normal);
    let fb = mdot(b, plane.normal);
    if fa.abs() < GEOM_TOL && fb.abs() < GEOM_TOL {
        return Some(line.a);
    }
    // x·fa + y·fb = 0 up to scale.
    let m = a.scale(fb) - b.scale(fa);
    let q = m.norm2();
    if q >= -GEOM_TOL * (fa * fa + fb * fb).max(1.0) {
        return None;
    }
    HPoint::from_timelike(m).ok()
}

/// Hyperbolic translation by r along the x₁-axis geodesic.
#[derive(Clone, Copy, Debug)]
pub struct Boost {
    r: f64,
    m: [[f64; 4]; 4],
}

/// The boost φ(r).
pub fn boost(r: f64) -> Boost {
    Boost::new(r)
}

impl Boost {
    pub fn new(r: f64) -> Self {
        let (c, s) = (r.cosh(), r.sinh());
        Boost {
            r,
            m: [
                [c, s, 0.0, 0.0],
                [s, c, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
        }
    }

    pub fn parameter(&self) -> f64 {
        self.r
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        self.m
    }

    pub fn inverse(&self) -> Boost {
        Boost::new(-self.r)
    }

    /// Matrix composition; the group law gives φ(r)∘φ(s) = φ(r+s).
    pub fn then(&self, other: &Boost) -> Boost {
        Boost {
            r: self.r + other.r,
            m: mat_mul(&other.m, &self.m),
        }
    }

    pub fn apply(&self, v: MVector) -> MVector {
        mat_vec(&self.m, v)
    }

    pub fn apply_point(&self, p: &HPoint) -> HPoint {
        HPoint::after_isometry(self.apply(p.vector()))
    }

    pub fn apply_plane(&self, p: &HPlane) -> HPlane {
        HPlane::after_isometry(self.apply(p.normal()))
    }
}

/// General Lorentz map (orthochronous), used for composing boosts with
/// spatial rotations when moving fixtures around.
#[derive(Clone, Copy, Debug)]
pub struct Isometry {
    m: [[f64; 4]; 4],
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            m: [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
        }
    }

    pub fn from_boost(b: &Boost) -> Self {
        Isometry { m: b.matrix() }
    }

    /// Rotation by `angle` in the spatial coordinate plane (i, j), 1 ≤ i < j ≤ 3.
    pub fn rotation(i: usize, j: usize, angle: f64) -> Self {
        assert!((1..=3).contains(&i) && (1..=3).contains(&j) && i < j);
        let (s, c) = angle.sin_cos();
        let mut m = Isometry::identity().m;
        m[i][i] = c;
        m[j][j] = c;
        m[i][j] = -s;
        m[j][i] = s;
        Isometry { m }
    }

    pub fn then(&self, other: &Isometry) -> Isometry {
        Isometry {
            m: mat_mul(&other.m, &self.m),
        }
    }

    pub fn apply(&self, v: MVector) -> MVector {
        mat_vec(&self.m, v)
    }

    pub fn apply_point(&self, p: &HPoint) -> HPoint {
        HPoint::after_isometry(self.apply(p.vector()))
    }

    pub fn apply_plane(&self, p: &HPlane) -> HPlane {
        HPlane::after_isometry(self.apply(p.normal()))
    }

    /// Max deviation of MᵗηM from η; 0 for an exact Lorentz matrix.
    pub fn lorentz_defect(&self) -> f64 {
        let eta = [-1.0, 1.0, 1.0, 1.0];
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for (row, e) in self.m.iter().zip(eta) {
                    s += row[a] * e * row[b];
                }
                let target = if a == b { eta[a] } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

fn mat_mul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0.0;
            for k in 0..4 {
                s += a[i][k] * b[k][j];
            }
            out[i][j] = s;
        }
    }
    out
}

fn mat_vec(m: &[[f64; 4]; 4], v: MVector) -> MVector {
    let mut out = [0.0; 4];
    for (i, row) in m.iter().enumerate() {
        out[i] = row[0] * v.0[0] + row[1] * v.0[1] + row[2] * v.0[2] + row[3] * v.0[3];
    }
    MVector(out)
}

/// Point at arclength s on the geodesic from u to v, in the sinh-weighted
/// form γ(s) = [u·sinh(ρ−s) + v·sinh(s)]/sinh(ρ) with the coefficients
/// evaluated in log space. Unlike `HLine::at`, this stays accurate when the
/// endpoints have exponentially large coordinates (the coefficients carry
/// the scale, so no large-term cancellation occurs).
pub fn geodesic_interpolate(u: &HPoint, v: &HPoint, s: f64) -> HPoint {
    let log_cosh_rho = neg_mdot_log(u, v);
    let rho = log_cosh_rho + (1.0 + (1.0 - (-2.0 * log_cosh_rho).exp()).max(0.0).sqrt()).ln();
    if rho == 0.0 {
        return *u;
    }
    // sinh(a)/sinh(ρ) = e^{a−ρ}·(1−e^{−2a})/(1−e^{−2ρ}) for a ≥ 0.
    let log_denom = (-(-2.0 * rho).exp()).ln_1p();
    let coeff = |a: f64| -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        ((a - rho) + (-(-2.0 * a).exp()).ln_1p() - log_denom).exp()
    };
    let w = u.vector().scale(coeff(rho - s)) + v.vector().scale(coeff(s));
    let scale = w.0.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale < 1e6 {
        HPoint::from_timelike(w).expect("geodesic point is timelike")
    } else {
        HPoint::trusted(w)
    }
}

/// Unit normal of the plane orthogonal to the geodesic from u to v at
/// arclength s (the geodesic's unit tangent there), in the same stable form.
pub fn geodesic_normal(u: &HPoint, v: &HPoint, s: f64) -> HPlane {
    let log_cosh_rho = neg_mdot_log(u, v);
    let rho = log_cosh_rho + (1.0 + (1.0 - (-2.0 * log_cosh_rho).exp()).max(0.0).sqrt()).ln();
    let log_denom = (-(-2.0 * rho).exp()).ln_1p();
    // cosh(a)/sinh(ρ) = e^{a−ρ}·(1+e^{−2a})/(1−e^{−2ρ}).
    let coeff = |a: f64| -> f64 {
        ((a.abs() - rho) + ((-2.0 * a.abs()).exp()).ln_1p() - log_denom).exp()
    };
    let n = v.vector().scale(coeff(s)) - u.vector().scale(coeff(rho - s));
    HPlane::from_spacelike_or_trust(n)
}

/// Tangent vector at `p` pointing toward `q` (Minkowski projection onto the
/// tangent space at p), not normalized.
pub fn tangent_toward(p: &HPoint, q: &HPoint) -> MVector {
    let u = p.vector();
    let w = q.vector();
    w + u.scale(mdot(w, u))
}

/// Angle at `p` between the geodesics toward `a` and toward `b`.
pub fn angle_at(p: &HPoint, a: &HPoint, b: &HPoint) -> f64 {
    let ta = tangent_toward(p, a);
    let tb = tangent_toward(p, b);
    let c = mdot(ta, tb) / (ta.norm2().sqrt() * tb.norm2().sqrt());
    c.clamp(-1.0, 1.0).acos()
}
