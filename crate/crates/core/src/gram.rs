//! Angle Gram matrices of n-simplices: construction, classification,
//! cofactor edge lengths, and realization.
//!
//! A simplex in S^n or H^n with faces 0..=n and interior dihedral angles
//! θ_ij has angle Gram matrix G with unit diagonal and G_ij = −cos θ_ij.
//! G is positive definite exactly for spherical simplices and has signature
//! (n, 1) for hyperbolic ones. Writing c_ij for the cofactors of G, vertex i
//! is finite / ideal / hyperideal as c_ii > 0 / = 0 / < 0, and for finite
//! vertices Cramer's rule gives the edge lengths
//!
//! ```text
//!   cosh d(v_i, v_j) = c_ij / √(c_ii c_jj)        (hyperbolic)
//!   cos  d(v_i, v_j) = c_ij / √(c_ii c_jj)        (spherical)
//! ```
//!
//! `realize` factors G = Sᵗ η S (η the ambient signature) into unit face
//! normals S and recovers scaled vertices from the duality Sᵗ η W = I.
//! Normals are inward: ⟨n_i, v_i⟩ > 0 for the opposite vertex.
//!
//! Everything here accepts any n ≥ 2; the volume machinery restricts to
//! n = 3 separately.

use crate::minkowski::MVector;
use nalgebra::DMatrix;
use thiserror::Error;

/// Relative eigenvalue band below which the Gram matrix counts as degenerate.
pub const DEGENERATE_BAND: f64 = 1e-12;
/// Relative cofactor band within which a vertex counts as ideal.
pub const IDEAL_BAND: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GramError {
    #[error("angle {value} at pair index {index} is outside (0, π)")]
    AngleOutOfRange { index: usize, value: f64 },
    #[error("dimension {n} needs {expected} angles, got {got}")]
    WrongCount { n: usize, expected: usize, got: usize },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("signature ({pos}, {neg}, {zero}) is neither spherical nor hyperbolic")]
    NotASimplex { pos: usize, neg: usize, zero: usize },
    #[error("vertex {vertex} is ideal or hyperideal (c_ii = {cofactor:e})")]
    IdealOrHyperidealVertex { vertex: usize, cofactor: f64 },
    #[error("Gram matrix is singular")]
    Singular,
    #[error("vertex {vertex} cannot be scaled onto the unit sheet (⟨w,w⟩ = {norm2:e})")]
    ScalingImpossible { vertex: usize, norm2: f64 },
    #[error("realization spans both hyperboloid sheets")]
    InconsistentRealization,
    #[error("expected a {expected} Gram matrix")]
    WrongClass { expected: &'static str },
    #[error("ray never degenerates within the scan bound")]
    NoBoundaryOnRay,
}

/// Index of the unordered pair (i, j), i < j ≤ n, in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j <= n);
    i * (2 * n - i + 1) / 2 + (j - i - 1)
}

/// All pairs (i, j) with 0 ≤ i < j ≤ n in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).flat_map(move |i| ((i + 1)..=n).map(move |j| (i, j)))
}

/// Ordered dihedral-angle assignment of an n-simplex: θ_ij ∈ (0, π) for each
/// unordered face pair, indexed lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct DihedralAngles {
    n: usize,
    angles: Vec<f64>,
}

impl DihedralAngles {
    pub fn new(n: usize, angles: Vec<f64>) -> Result<Self, GramError> {
        if n < 2 {
            return Err(GramError::DimensionTooSmall(n));
        }
        let expected = (n + 1) * n / 2;
        if angles.len() != expected {
            return Err(GramError::WrongCount {
                n,
                expected,
                got: angles.len(),
            });
        }
        for (index, &value) in angles.iter().enumerate() {
            if !(value > 0.0 && value < std::f64::consts::PI) || !value.is_finite() {
                return Err(GramError::AngleOutOfRange { index, value });
            }
        }
        Ok(DihedralAngles { n, angles })
    }

    /// The regular assignment θ_ij = θ for all pairs.
    pub fn regular(n: usize, theta: f64) -> Result<Self, GramError> {
        let count = (n + 1) * n / 2;
        DihedralAngles::new(n, vec![theta; count])
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.angles[pair_index(self.n, i, j)]
    }

    /// Angles offset by s·dir, or None when any angle leaves (0, π).
    pub fn try_offset(&self, dir: &[f64], s: f64) -> Option<DihedralAngles> {
        assert_eq!(dir.len(), self.angles.len());
        let moved: Vec<f64> = self
            .angles
            .iter()
            .zip(dir)
            .map(|(a, d)| a + s * d)
            .collect();
        DihedralAngles::new(self.n, moved).ok()
    }

    /// Relabel the faces by `perm` (face i of the result is face perm[i]).
    pub fn permuted(&self, perm: &[usize]) -> DihedralAngles {
        assert_eq!(perm.len(), self.n + 1);
        let mut angles = vec![0.0; self.angles.len()];
        for (i, j) in pairs(self.n) {
            angles[pair_index(self.n, i, j)] = self.get(perm[i], perm[j]);
        }
        DihedralAngles {
            n: self.n,
            angles,
        }
    }
}

/// The angle Gram matrix G: unit diagonal, G_ij = −cos θ_ij.
#[derive(Clone, Debug)]
pub struct AngleGram {
    n: usize,
    m: DMatrix<f64>,
}

/// Build the angle Gram matrix of a dihedral-angle assignment.
pub fn build_gram(angles: &DihedralAngles) -> AngleGram {
    let n = angles.dimension();
    let mut m = DMatrix::identity(n + 1, n + 1);
    for (i, j) in pairs(n) {
        let g = -angles.get(i, j).cos();
        m[(i, j)] = g;
        m[(j, i)] = g;
    }
    AngleGram { n, m }
}

impl AngleGram {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn det(&self) -> f64 {
        self.m.clone().determinant()
    }

    /// Simultaneous row/column permutation.
    pub fn permuted(&self, perm: &[usize]) -> AngleGram {
        assert_eq!(perm.len(), self.n + 1);
        let k = self.n + 1;
        let mut m = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                m[(a, b)] = self.m[(perm[a], perm[b])];
            }
        }
        AngleGram { n: self.n, m }
    }
}

/// Cofactors c_ij of the angle Gram matrix.
#[derive(Clone, Debug)]
pub struct CofactorTable {
    n: usize,
    c: DMatrix<f64>,
}

/// Compute all cofactors by minor expansion. Robust near-singular matrices
/// (no division by det), which is exactly where the cofactors matter.
pub fn cofactors(gram: &AngleGram) -> CofactorTable {
    let k = gram.n + 1;
    let mut c = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let minor = gram.m.clone().remove_row(i).remove_column(j);
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            c[(i, j)] = sign * minor.determinant();
        }
    }
    CofactorTable { n: gram.n, c }
}

impl CofactorTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Largest cofactor magnitude; the natural scale for ideal-vertex bands.
    pub fn scale(&self) -> f64 {
        self.c.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(f64::MIN_POSITIVE)
    }

    /// Max relative deviation of Laplace expansions Σ_j G_ij c_ij from det G.
    pub fn laplace_residual(&self, gram: &AngleGram) -> f64 {
        let det = gram.det();
        let scale = self.scale().max(det.abs());
        let mut worst: f64 = 0.0;
        for i in 0..=self.n {
            let mut s = 0.0;
            for j in 0..=self.n {
                s += gram.m[(i, j)] * self.c[(i, j)];
            }
            worst = worst.max((s - det).abs() / scale);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexType {
    Finite,
    Ideal,
    Hyperideal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimplexClass {
    Spherical,
    Hyperbolic { vertex_types: Vec<VertexType> },
    Degenerate,
}

impl SimplexClass {
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, SimplexClass::Hyperbolic { .. })
    }

    pub fn is_compact_hyperbolic(&self) -> bool {
        matches!(self, SimplexClass::Hyperbolic { vertex_types }
            if vertex_types.iter().all(|v| *v == VertexType::Finite))
    }
}

/// Classify by eigenvalue signature, with vertex types from cofactor signs.
pub fn classify(gram: &AngleGram) -> Result<SimplexClass, GramError> {
    let eig = gram.m.clone().symmetric_eigenvalues();
    let scale = eig.iter().fold(0.0f64, |a, &l| a.max(l.abs())).max(1e-300);
    let band = DEGENERATE_BAND * scale;
    let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
    for &l in eig.iter() {
        if l > band {
            pos += 1;
        } else if l < -band {
            neg += 1;
        } else {
            zero += 1;
        }
    }
    if zero > 0 {
        return Ok(SimplexClass::Degenerate);
    }
    if neg == 0 {
        return Ok(SimplexClass::Spherical);
    }
    if neg == 1 {
        let cof = cofactors(gram);
        let band = IDEAL_BAND * cof.scale();
        let vertex_types = (0..=gram.n)
            .map(|i| {
                let c = cof.get(i, i);
                if c > band {
                    VertexType::Finite
                } else if c < -band {
                    VertexType::Hyperideal
                } else {
                    VertexType::Ideal
                }
            })
            .collect();
        return Ok(SimplexClass::Hyperbolic { vertex_types });
    }
    Err(GramError::NotASimplex { pos, neg, zero })
}

/// Symmetric table of vertex distances, indexed like the angle pairs.
#[derive(Clone, Debug)]
pub struct EdgeLengthTable {
    n: usize,
    d: Vec<f64>,
}

impl EdgeLengthTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.d[pair_index(self.n, i, j)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }

    pub fn max(&self) -> f64 {
        self.d.iter().fold(0.0f64, |a, &x| a.max(x))
    }
}

/// Edge lengths d(v_i, v_j) = arccosh(c_ij/√(c_ii c_jj)) of a compact
/// hyperbolic simplex.
pub fn edge_lengths(gram: &AngleGram) -> Result<EdgeLengthTable, GramError> {
    let class = classify(gram)?;
    if !class.is_hyperbolic() {
        return Err(GramError::WrongClass {
            expected: "hyperbolic",
        });
    }
    let cof = cofactors(gram);
    let band = IDEAL_BAND * cof.scale();
    for i in 0..=gram.n {
        let c = cof.get(i, i);
        if c <= band {
            return Err(GramError::IdealOrHyperidealVertex {
                vertex: i,
                cofactor: c,
            });
        }
    }
    let d = pairs(gram.n)
        .map(|(i, j)| {
            let ratio = cof.get(i, j) / (cof.get(i, i) * cof.get(j, j)).sqrt();
            ratio.max(1.0).acosh()
        })
        .collect();
    Ok(EdgeLengthTable { n: gram.n, d })
}

/// Edge datum for simplices with hyperideal vertices.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedLength {
    pub length: f64,
    /// True when one or both endpoints were replaced by polar truncation.
    pub truncated: bool,
}

/// Edge lengths extended to hyperideal vertices by the polar-truncation
/// convention: between two hyperideal vertices the length of the common
/// perpendicular arccosh(|c_ij|/√(c_ii c_jj)); between a finite and a
/// hyperideal vertex the truncated length arcsinh(|c_ij|/√(−c_ii c_jj)).
pub fn edge_lengths_truncated(gram: &AngleGram) -> Result<Vec<TruncatedLength>, GramError> {
    let class = classify(gram)?;
    let SimplexClass::Hyperbolic { vertex_types } = class else {
        return Err(GramError::WrongClass {
            expected: "hyperbolic",
        });
    };
    let cof = cofactors(gram);
    pairs(gram.n)
        .map(|(i, j)| {
            let (ci, cj, cij) = (cof.get(i, i), cof.get(j, j), cof.get(i, j));
            match (vertex_types[i], vertex_types[j]) {
                (VertexType::Ideal, _) | (_, VertexType::Ideal) => Ok(TruncatedLength {
                    length: f64::INFINITY,
                    truncated: false,
                }),
                (VertexType::Finite, VertexType::Finite) => Ok(TruncatedLength {
                    length: (cij / (ci * cj).sqrt()).max(1.0).acosh(),
                    truncated: false,
                }),
                (VertexType::Hyperideal, VertexType::Hyperideal) => Ok(TruncatedLength {
                    length: (cij.abs() / (ci * cj).sqrt()).max(1.0).acosh(),
                    truncated: true,
                }),
                _ => Ok(TruncatedLength {
                    length: (cij.abs() / (-ci * cj).sqrt()).asinh(),
                    truncated: true,
                }),
            }
        })
        .collect()
}

/// Realized simplex: unit face normals, scaled vertices, and the length Gram
/// matrix, in the ambient of the matching curvature.
#[derive(Clone, Debug)]
pub struct Realization {
    n: usize,
    hyperbolic: bool,
    /// Columns are inward unit face normals.
    pub normals: DMatrix<f64>,
    /// Columns are vertices scaled onto ⟨v,v⟩ = −1 (hyperbolic) or +1 (spherical).
    pub vertices: DMatrix<f64>,
    /// G* = W_sᵗ η W_s.
    pub length_gram: DMatrix<f64>,
}

impl Realization {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.hyperbolic
    }

    /// Vertex j as a Minkowski 4-vector (n = 3, hyperbolic only).
    pub fn vertex_mvector(&self, j: usize) -> Option<MVector> {
        if self.n != 3 || !self.hyperbolic {
            return None;
        }
        let col = self.vertices.column(j);
        Some(MVector::new(col[0], col[1], col[2], col[3]))
    }

    /// Normal of face i as a Minkowski 4-vector (n = 3, hyperbolic only).
    pub fn normal_mvector(&self, i: usize) -> Option<MVector> {
        if self.n != 3 || !self.hyperbolic {
            return None;
        }
        let col = self.normals.column(i);
        Some(MVector::new(col[0], col[1], col[2], col[3]))
    }

    /// Recover the dihedral angles from the realized normals (round trip).
    pub fn angles_from_normals(&self) -> Result<DihedralAngles, GramError> {
        let k = self.n + 1;
        let eta = eta_matrix(k, self.hyperbolic);
        let g = self.normals.transpose() * &eta * &self.normals;
        let mut angles = Vec::with_capacity(k * (k - 1) / 2);
        for (i, j) in pairs(self.n) {
            angles.push((-g[(i, j)]).clamp(-1.0, 1.0).acos());
        }
        DihedralAngles::new(self.n, angles)
    }
}

fn eta_matrix(k: usize, hyperbolic: bool) -> DMatrix<f64> {
    let mut eta = DMatrix::identity(k, k);
    if hyperbolic {
        eta[(0, 0)] = -1.0;
    }
    eta
}

/// Factor G = Sᵗ η S by eigendecomposition (the timelike direction carries
/// the unique negative eigenvalue) and recover vertices from Sᵗ η W = I.
pub fn realize(gram: &AngleGram) -> Result<Realization, GramError> {
    let class = classify(gram)?;
    let hyperbolic = match class {
        SimplexClass::Spherical => false,
        SimplexClass::Hyperbolic { .. } => true,
        SimplexClass::Degenerate => return Err(GramError::Singular),
    };
    let k = gram.n + 1;
    let eig = nalgebra::SymmetricEigen::new(gram.m.clone());

    // Ascending eigenvalue order puts the negative one (if any) first.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let mut s = DMatrix::zeros(k, k);
    for (row, &src) in order.iter().enumerate() {
        let lam = eig.eigenvalues[src];
        let w = lam.abs().sqrt();
        for col in 0..k {
            s[(row, col)] = w * eig.eigenvectors[(col, src)];
        }
    }

    let eta = eta_matrix(k, hyperbolic);
    let st_eta = s.transpose() * &eta;
    let w = st_eta.try_inverse().ok_or(GramError::Singular)?;

    // Scale vertex columns onto the unit sheet.
    let mut vertices = w.clone();
    let mut sheet_sign: Option<f64> = None;
    for j in 0..k {
        let col = w.column(j);
        let q: f64 = if hyperbolic {
            -col[0] * col[0] + col.iter().skip(1).map(|x| x * x).sum::<f64>()
        } else {
            col.iter().map(|x| x * x).sum::<f64>()
        };
        if hyperbolic {
            if q >= 0.0 {
                return Err(GramError::ScalingImpossible { vertex: j, norm2: q });
            }
            let f = 1.0 / (-q).sqrt();
            let sign = col[0].signum();
            match sheet_sign {
                None => sheet_sign = Some(sign),
                Some(s0) if s0 != sign => return Err(GramError::InconsistentRealization),
                _ => {}
            }
            for r in 0..k {
                vertices[(r, j)] = col[r] * f;
            }
        } else {
            if q <= 0.0 {
                return Err(GramError::ScalingImpossible { vertex: j, norm2: q });
            }
            let f = 1.0 / q.sqrt();
            for r in 0..k {
                vertices[(r, j)] = col[r] * f;
            }
        }
    }
    // Move a lower-sheet realization to the upper sheet (global flip keeps
    // G = Sᵗ η S and the duality pairing intact).
    if hyperbolic && sheet_sign == Some(-1.0) {
        s.neg_mut();
        vertices.neg_mut();
    }

    let length_gram = vertices.transpose() * &eta * &vertices;

    // Reconstruction residual guard.
    let recon = s.transpose() * &eta * &s;
    let residual = (&recon - &gram.m).amax();
    if residual > 1e-9 * gram.m.amax().max(1.0) {
        return Err(GramError::Singular);
    }

    Ok(Realization {
        n: gram.n,
        hyperbolic,
        normals: s,
        vertices,
        length_gram,
    })
}

/// Distance s* > 0 along `dir` (in ray-parameter units) at which the Gram
/// matrix first becomes degenerate, bisected to 1e−12.
///
/// Scans `SENTINELS` uniform sentinels up to `max_s` (stopping early if the
/// angles leave (0, π)) for the first sign change of det G, then bisects.
pub fn boundary_distance(
    angles: &DihedralAngles,
    dir: &[f64],
    max_s: f64,
) -> Result<f64, GramError> {
    const SENTINELS: usize = 256;
    let start = classify(&build_gram(angles))?;
    if !start.is_hyperbolic() {
        return Err(GramError::WrongClass {
            expected: "hyperbolic",
        });
    }
    let det_at = |s: f64| -> Option<f64> {
        angles.try_offset(dir, s).map(|a| build_gram(&a).det())
    };
    let d0 = det_at(0.0).expect("origin is valid");
    debug_assert!(d0 < 0.0);
    let mut prev_s = 0.0;
    let mut prev_det = d0;
    let mut bracket = None;
    for k in 1..=SENTINELS {
        let s = max_s * k as f64 / SENTINELS as f64;
        let Some(det) = det_at(s) else {
            break; // chart exit: angles left (0, π)
        };
        if det >= 0.0 {
            bracket = Some((prev_s, s));
            break;
        }
        prev_s = s;
        prev_det = det;
    }
    let _ = prev_det;
    let (mut lo, mut hi) = bracket.ok_or(GramError::NoBoundaryOnRay)?;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        match det_at(mid) {
            Some(det) if det < 0.0 => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Distance s* along `dir` at which the compact-hyperbolic classification
/// first fails (degenerate, ideal or hyperideal sheet, or chart exit),
/// bisected to 1e−12. This is the boundary event relevant to regularity
/// probes along rays toward ideal-vertex limits, where det G stays negative.
pub fn compact_boundary_distance(
    angles: &DihedralAngles,
    dir: &[f64],
    max_s: f64,
) -> Result<f64, GramError> {
    const SENTINELS: usize = 256;
    let ok_at = |s: f64| -> bool {
        angles
            .try_offset(dir, s)
            .map(|a| {
                classify(&build_gram(&a))
                    .map(|c| c.is_compact_hyperbolic())
                    .unwrap_or(false)
            })
            .unwrap_or(false)
    };
    if !ok_at(0.0) {
        return Err(GramError::WrongClass {
            expected: "compact hyperbolic",
        });
    }
    let mut bracket = None;
    for k in 1..=SENTINELS {
        let s = max_s * k as f64 / SENTINELS as f64;
        if !ok_at(s) {
            bracket = Some((max_s * (k - 1) as f64 / SENTINELS as f64, s));
            break;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(GramError::NoBoundaryOnRay)?;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if ok_at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
