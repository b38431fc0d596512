//! Volume of 3-dimensional simplices by integrating the Schläfli
//! differential along paths in dihedral-angle space.
//!
//! In constant curvature K and dimension n the volume of a smooth family
//! satisfies K·dV = (1/(n−1))·Σ_F V_{n−2}(F)·dθ_F over codimension-2 faces.
//! For n = 3 the codimension-2 faces are edges, so
//!
//! ```text
//!   ∂V/∂θ_e = ℓ_e / (2K),
//! ```
//!
//! with ℓ_e from the cofactor formulas (arccosh for H³, arccos for S³).
//! Volumes are anchored where they are known — π²/8 at the all-right
//! spherical orthant, 0 at a Euclidean (degenerate) boundary point — and the
//! 1-form is integrated along piecewise-linear paths with adaptive panels,
//! refined geometrically toward boundary endpoints where the integrand has
//! an integrable logarithmic singularity.

use crate::gram::{
    boundary_distance, build_gram, classify, pairs, DihedralAngles, GramError, SimplexClass,
};
use crate::oracles::{mc_volume_klein, to_klein, McConfig};
use std::cell::Cell;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchlafliError {
    #[error(transparent)]
    Gram(#[from] GramError),
    #[error("expected {expected:?} geometry for this context")]
    WrongCurvature { expected: Curvature },
    #[error("only n = 3 volume integration is supported, got n = {0}")]
    DimensionNot3(usize),
    #[error("path exits the admissible domain near s = {s}")]
    PathExitsDomain { s: f64 },
    #[error("no anchor on the default ray ({detail}); supply a custom ray")]
    AnchorNotFound { detail: String },
    #[error("anchor check failed: Monte-Carlo volume {estimate} at the boundary checkpoint exceeds {threshold}")]
    AnchorCheckFailed { estimate: f64, threshold: f64 },
    #[error("path needs at least one waypoint")]
    EmptyPath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Curvature {
    Spherical,
    Hyperbolic,
}

impl Curvature {
    /// The curvature sign K.
    pub fn k(self) -> f64 {
        match self {
            Curvature::Spherical => 1.0,
            Curvature::Hyperbolic => -1.0,
        }
    }
}

/// Governing-identity context: curvature K and dimension n (n = 3 here).
#[derive(Clone, Copy, Debug)]
pub struct SchlafliContext {
    pub curvature: Curvature,
    pub dimension: usize,
}

impl SchlafliContext {
    pub fn hyperbolic() -> Self {
        SchlafliContext {
            curvature: Curvature::Hyperbolic,
            dimension: 3,
        }
    }

    pub fn spherical() -> Self {
        SchlafliContext {
            curvature: Curvature::Spherical,
            dimension: 3,
        }
    }
}

/// Piecewise-linear path in dihedral-angle space with an anchored volume at
/// its first waypoint.
#[derive(Clone, Debug)]
pub struct AnglePath {
    waypoints: Vec<DihedralAngles>,
    anchor_volume: f64,
    anchor_note: String,
}

impl AnglePath {
    pub fn new(
        waypoints: Vec<DihedralAngles>,
        anchor_volume: f64,
        anchor_note: impl Into<String>,
    ) -> Result<Self, SchlafliError> {
        if waypoints.is_empty() {
            return Err(SchlafliError::EmptyPath);
        }
        let n = waypoints[0].dimension();
        if n != 3 {
            return Err(SchlafliError::DimensionNot3(n));
        }
        Ok(AnglePath {
            waypoints,
            anchor_volume,
            anchor_note: anchor_note.into(),
        })
    }

    pub fn constant(angles: DihedralAngles, volume: f64) -> Result<Self, SchlafliError> {
        AnglePath::new(vec![angles], volume, "constant path")
    }

    pub fn anchor_volume(&self) -> f64 {
        self.anchor_volume
    }

    pub fn anchor_note(&self) -> &str {
        &self.anchor_note
    }

    pub fn waypoints(&self) -> &[DihedralAngles] {
        &self.waypoints
    }
}

#[derive(Clone, Debug)]
pub struct VolumeResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Accepted quadrature panels across all segments.
    pub panels: usize,
    /// Deepest geometric boundary-refinement level used.
    pub boundary_depth: usize,
    /// Where the anchor volume came from.
    pub anchor_note: String,
}

const PAIR_COUNT: usize = 6;

/// Complementary vertex pair of a face pair: faces (i, j) meet along the
/// edge joining the two vertices not in {i, j}.
fn complement(i: usize, j: usize) -> (usize, usize) {
    let mut out = [0usize; 2];
    let mut w = 0;
    for v in 0..4 {
        if v != i && v != j {
            out[w] = v;
            w += 1;
        }
    }
    (out[0], out[1])
}

/// Hand-rolled cofactor table of a symmetric 4×4 matrix. This is the hot
/// path of the quadrature integrand; the generic `gram::cofactors` route is
/// kept independent and the two are cross-checked in tests.
#[allow(clippy::needless_range_loop)]
fn cof4(g: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let minor = |r: [usize; 3], c: [usize; 3]| -> f64 {
        g[r[0]][c[0]] * (g[r[1]][c[1]] * g[r[2]][c[2]] - g[r[1]][c[2]] * g[r[2]][c[1]])
            - g[r[0]][c[1]] * (g[r[1]][c[0]] * g[r[2]][c[2]] - g[r[1]][c[2]] * g[r[2]][c[0]])
            + g[r[0]][c[2]] * (g[r[1]][c[0]] * g[r[2]][c[1]] - g[r[1]][c[1]] * g[r[2]][c[0]])
    };
    let others = |k: usize| -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut w = 0;
        for v in 0..4 {
            if v != k {
                out[w] = v;
                w += 1;
            }
        }
        out
    };
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            c[i][j] = sign * minor(others(i), others(j));
        }
    }
    c
}

#[allow(clippy::needless_range_loop)]
fn gram4(angles: &[f64]) -> [[f64; 4]; 4] {
    let mut g = [[0.0; 4]; 4];
    for v in 0..4 {
        g[v][v] = 1.0;
    }
    for (idx, (i, j)) in pairs(3).enumerate() {
        let x = -angles[idx].cos();
        g[i][j] = x;
        g[j][i] = x;
    }
    g
}

/// Per-angle-pair edge lengths at an interior point, or None when the point
/// is outside the admissible region for the given curvature.
#[allow(clippy::needless_range_loop)]
fn length_vector(angles: &[f64], curvature: Curvature) -> Option<[f64; PAIR_COUNT]> {
    for &a in angles {
        if !(a > 0.0 && a < PI) {
            return None;
        }
    }
    let g = gram4(angles);
    let c = cof4(&g);
    let det: f64 = (0..4).map(|j| g[0][j] * c[0][j]).sum();
    match curvature {
        Curvature::Hyperbolic => {
            if det >= 0.0 {
                return None;
            }
            for v in 0..4 {
                if c[v][v] <= 0.0 {
                    return None;
                }
            }
        }
        Curvature::Spherical => {
            if det <= 0.0 {
                return None;
            }
            for v in 0..4 {
                if c[v][v] <= 0.0 {
                    return None;
                }
            }
        }
    }
    let mut out = [0.0; PAIR_COUNT];
    for (idx, (i, j)) in pairs(3).enumerate() {
        let (k, l) = complement(i, j);
        let ratio = c[k][l] / (c[k][k] * c[l][l]).sqrt();
        out[idx] = match curvature {
            Curvature::Hyperbolic => ratio.max(1.0).acosh(),
            Curvature::Spherical => ratio.clamp(-1.0, 1.0).acos(),
        };
    }
    Some(out)
}

/// The Schläfli gradient ∂V/∂θ_e = ℓ_e/(2K), indexed like the angle pairs.
pub fn schlafli_gradient(
    angles: &DihedralAngles,
    ctx: &SchlafliContext,
) -> Result<Vec<f64>, SchlafliError> {
    if angles.dimension() != 3 || ctx.dimension != 3 {
        return Err(SchlafliError::DimensionNot3(angles.dimension()));
    }
    let class = classify(&build_gram(angles))?;
    let matches = match ctx.curvature {
        Curvature::Spherical => class == SimplexClass::Spherical,
        Curvature::Hyperbolic => class.is_compact_hyperbolic(),
    };
    if !matches {
        return Err(SchlafliError::WrongCurvature {
            expected: ctx.curvature,
        });
    }
    let lengths = length_vector(angles.as_slice(), ctx.curvature)
        .expect("interior point has finite lengths");
    let k = ctx.curvature.k();
    Ok(lengths.iter().map(|l| l / (2.0 * k)).collect())
}

/// Whether a point is interior for the curvature (compact simplex of the
/// right kind). Boundary endpoints of paths are allowed to fail this.
fn is_interior(angles: &DihedralAngles, curvature: Curvature) -> bool {
    match classify(&build_gram(angles)) {
        Ok(SimplexClass::Spherical) => curvature == Curvature::Spherical,
        Ok(ref c) if c.is_compact_hyperbolic() => curvature == Curvature::Hyperbolic,
        _ => false,
    }
}

const SENTINELS: usize = 64;

/// Integrate the Schläfli 1-form along the path:
/// V(end) = anchor + ∫ (1/(2K)) Σ_e ℓ_e(θ(s)) θ_e′(s) ds.
pub fn integrate_volume(
    path: &AnglePath,
    ctx: &SchlafliContext,
    tol: f64,
) -> Result<VolumeResult, SchlafliError> {
    let mut value = path.anchor_volume();
    let mut error = 0.0;
    let mut panels = 0usize;
    let mut depth_used = 0usize;
    let nseg = path.waypoints().len() - 1;

    for (seg, pair) in path.waypoints().windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let av = a.as_slice().to_vec();
        let dir: Vec<f64> = b
            .as_slice()
            .iter()
            .zip(&av)
            .map(|(bb, aa)| bb - aa)
            .collect();
        if dir.iter().all(|d| d.abs() == 0.0) {
            continue;
        }
        let at = |s: f64| -> Vec<f64> { av.iter().zip(&dir).map(|(x, d)| x + s * d).collect() };

        // Sentinel validity scan on the open segment.
        let start_interior = is_interior(a, ctx.curvature);
        let end_interior = is_interior(b, ctx.curvature);
        for k in 1..SENTINELS {
            let s = k as f64 / SENTINELS as f64;
            let probe = DihedralAngles::new(3, at(s)).ok();
            let ok = probe.map(|p| is_interior(&p, ctx.curvature)).unwrap_or(false);
            if !ok {
                // Bisect toward the last good sentinel to report the exit.
                let (mut lo, mut hi) = ((k - 1) as f64 / SENTINELS as f64, s);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let good = DihedralAngles::new(3, at(mid))
                        .map(|p| is_interior(&p, ctx.curvature))
                        .unwrap_or(false);
                    if good {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Err(SchlafliError::PathExitsDomain {
                    s: (seg as f64 + hi) / nseg as f64,
                });
            }
        }

        let bad_s: Cell<Option<f64>> = Cell::new(None);
        let k = ctx.curvature.k();
        let integrand = |s: f64| -> f64 {
            match length_vector(&at(s), ctx.curvature) {
                Some(lengths) => {
                    let mut acc = 0.0;
                    for idx in 0..PAIR_COUNT {
                        acc += lengths[idx] * dir[idx];
                    }
                    acc / (2.0 * k)
                }
                None => {
                    if bad_s.get().is_none() {
                        bad_s.set(Some(s));
                    }
                    0.0
                }
            }
        };

        let seg_tol = tol / nseg as f64;
        let r = integrate_segment(
            &integrand,
            !start_interior,
            !end_interior,
            seg_tol,
            &mut depth_used,
        );
        if let Some(s) = bad_s.get() {
            return Err(SchlafliError::PathExitsDomain {
                s: (seg as f64 + s) / nseg as f64,
            });
        }
        value += r.0;
        error += r.1;
        panels += r.2;
    }

    Ok(VolumeResult {
        value,
        error_estimate: error,
        panels,
        boundary_depth: depth_used,
        anchor_note: path.anchor_note().to_string(),
    })
}

/// Integrate over [0, 1] with geometric refinement (ratio 1/2) toward
/// boundary endpoints. Returns (value, error, panels).
fn integrate_segment<F: Fn(f64) -> f64>(
    f: &F,
    refine_start: bool,
    refine_end: bool,
    tol: f64,
    depth_used: &mut usize,
) -> (f64, f64, usize) {
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0usize;

    let mut core = (0.0, 1.0);
    if refine_start && refine_end {
        core = (0.25, 0.75);
    } else if refine_start {
        core = (0.25, 1.0);
    } else if refine_end {
        core = (0.0, 0.75);
    }

    let qr = crate::quad::adaptive(f, core.0, core.1, 0.5 * tol, 40);
    value += qr.value;
    error += qr.error;
    panels += qr.panels;

    let mut tail = |toward_start: bool| {
        let mut outer = if toward_start { core.0 } else { core.1 };
        let tail_tol = 0.25 * tol;
        let mut depth = 0usize;
        loop {
            depth += 1;
            let inner = if toward_start { outer * 0.5 } else { outer + 0.5 * (1.0 - outer) };
            let (lo, hi) = if toward_start {
                (inner, outer)
            } else {
                (outer, inner)
            };
            let qr = crate::quad::adaptive(f, lo, hi, tail_tol * 0.25, 30);
            value += qr.value;
            error += qr.error;
            panels += qr.panels;
            let width = hi - lo;
            outer = inner;
            // The integrand is bounded by C·|log width| near the boundary, so
            // the remaining tail is of the order of the last contribution.
            if (qr.value.abs() < tail_tol && depth >= 12) || depth >= 52 || width < 1e-16 {
                error += qr.value.abs();
                break;
            }
        }
        *depth_used = (*depth_used).max(depth);
    };

    if refine_start {
        tail(true);
    }
    if refine_end {
        tail(false);
    }
    (value, error, panels)
}

/// Options for [`tetra_volume_hyperbolic`].
#[derive(Clone, Debug)]
pub struct TetraVolumeOpts {
    /// Volume tolerance for interior quadrature (boundary legs get 1e−6).
    pub tol: f64,
    /// Anchor-ray direction; defaults to pointing at the regular Euclidean
    /// point θ_all = arccos(1/3).
    pub anchor_direction: Option<Vec<f64>>,
    /// Verify the anchor by a small Monte-Carlo volume near the boundary.
    pub verify_anchor: bool,
    pub anchor_mc_samples: u64,
    pub anchor_mc_seed: u64,
}

impl Default for TetraVolumeOpts {
    fn default() -> Self {
        TetraVolumeOpts {
            tol: 1e-8,
            anchor_direction: None,
            verify_anchor: true,
            anchor_mc_samples: 50_000,
            anchor_mc_seed: 0,
        }
    }
}

/// Volume of a hyperbolic tetrahedron: locate a Euclidean (degenerate)
/// boundary point along a ray, anchor V = 0 there, and integrate inward.
pub fn tetra_volume_hyperbolic(
    angles: &DihedralAngles,
    opts: &TetraVolumeOpts,
) -> Result<VolumeResult, SchlafliError> {
    if angles.dimension() != 3 {
        return Err(SchlafliError::DimensionNot3(angles.dimension()));
    }
    let class = classify(&build_gram(angles))?;
    if !class.is_hyperbolic() {
        return Err(SchlafliError::WrongCurvature {
            expected: Curvature::Hyperbolic,
        });
    }

    let theta_euclid = (1.0f64 / 3.0).acos();
    let dir: Vec<f64> = match &opts.anchor_direction {
        Some(d) => d.clone(),
        None => angles
            .as_slice()
            .iter()
            .map(|a| theta_euclid - a)
            .collect(),
    };
    let s_star = boundary_distance(angles, &dir, 1.0).map_err(|e| match e {
        GramError::NoBoundaryOnRay => SchlafliError::AnchorNotFound {
            detail: "ray does not reach a degenerate point".into(),
        },
        other => SchlafliError::Gram(other),
    })?;
    let anchor = angles
        .try_offset(&dir, s_star)
        .ok_or_else(|| SchlafliError::AnchorNotFound {
            detail: "degenerate point lies outside the angle chart".into(),
        })?;

    if opts.verify_anchor {
        verify_euclidean_anchor(angles, &dir, s_star, opts)?;
    }

    let note = format!(
        "euclidean-boundary anchor, V = 0 at ray parameter {s_star:.6e}"
    );
    let path = AnglePath::new(vec![anchor, angles.clone()], 0.0, note)?;
    let ctx = SchlafliContext::hyperbolic();
    let mut result =
        integrate_volume(&path, &ctx, opts.tol.max(1e-10)).map_err(|e| match e {
            SchlafliError::PathExitsDomain { s } => SchlafliError::AnchorNotFound {
                detail: format!("default ray exits the domain near s = {s}"),
            },
            other => other,
        })?;
    result.value = result.value.max(0.0);
    Ok(result)
}

/// Anchor-policy check: det G must vanish at the anchor and a small
/// Monte-Carlo estimate just inside the boundary must be near zero.
fn verify_euclidean_anchor(
    angles: &DihedralAngles,
    dir: &[f64],
    s_star: f64,
    opts: &TetraVolumeOpts,
) -> Result<(), SchlafliError> {
    let s_check = s_star * (1.0 - 1e-2);
    let Some(near) = angles.try_offset(dir, s_check) else {
        return Ok(());
    };
    let g = build_gram(&near);
    if !classify(&g)?.is_compact_hyperbolic() {
        return Ok(()); // too close to the boundary to realize; det check only
    }
    let real = crate::gram::realize(&g)?;
    let mut pts = [[0.0; 3]; 4];
    for (j, pt) in pts.iter_mut().enumerate() {
        let v = real.vertex_mvector(j).expect("n = 3 hyperbolic");
        let hp = crate::minkowski::HPoint::new(v).map_err(|e| SchlafliError::AnchorNotFound {
            detail: format!("checkpoint vertex off the hyperboloid: {e}"),
        })?;
        *pt = to_klein(&hp);
    }
    let est = mc_volume_klein(
        &pts,
        McConfig {
            samples: opts.anchor_mc_samples.max(1),
            seed: opts.anchor_mc_seed,
        },
    )
    .map_err(|_| SchlafliError::AnchorNotFound {
        detail: "anchor checkpoint could not be sampled".into(),
    })?;
    let threshold = 0.02f64.max(5.0 * est.std_error);
    if est.estimate > threshold {
        return Err(SchlafliError::AnchorCheckFailed {
            estimate: est.estimate,
            threshold,
        });
    }
    Ok(())
}

/// Volume of a spherical 3-simplex, anchored at the all-right orthant
/// (V = π²/8) and integrated along the straight segment; a rejected segment
/// can be rerouted through a caller-supplied waypoint.
pub fn simplex_volume_spherical(
    angles: &DihedralAngles,
    waypoint: Option<&DihedralAngles>,
    tol: f64,
) -> Result<VolumeResult, SchlafliError> {
    if angles.dimension() != 3 {
        return Err(SchlafliError::DimensionNot3(angles.dimension()));
    }
    let class = classify(&build_gram(angles))?;
    if class != SimplexClass::Spherical {
        return Err(SchlafliError::WrongCurvature {
            expected: Curvature::Spherical,
        });
    }
    let orthant = DihedralAngles::regular(3, PI / 2.0).expect("orthant is valid");
    let anchor_v = PI * PI / 8.0;
    let ctx = SchlafliContext::spherical();

    let direct = AnglePath::new(
        vec![orthant.clone(), angles.clone()],
        anchor_v,
        "spherical orthant anchor, V = π²/8",
    )?;
    match integrate_volume(&direct, &ctx, tol) {
        Ok(mut r) => {
            r.value = r.value.max(0.0);
            Ok(r)
        }
        Err(SchlafliError::PathExitsDomain { s }) => {
            let Some(w) = waypoint else {
                return Err(SchlafliError::PathExitsDomain { s });
            };
            let rerouted = AnglePath::new(
                vec![orthant, w.clone(), angles.clone()],
                anchor_v,
                "spherical orthant anchor, rerouted via waypoint",
            )?;
            let mut r = integrate_volume(&rerouted, &ctx, tol)?;
            r.value = r.value.max(0.0);
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::cofactors;
    use crate::rng::CounterRng;

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn cof4_matches_generic_cofactors() {
        let mut rng = CounterRng::new(77);
        for _ in 0..16 {
            let angles = DihedralAngles::new(
                3,
                (0..6).map(|_| rng.next_in(0.3, 2.8)).collect(),
            )
            .unwrap();
            let g = build_gram(&angles);
            let fast = cof4(&gram4(angles.as_slice()));
            let slow = cofactors(&g);
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (fast[i][j] - slow.get(i, j)).abs() < 1e-12,
                        "({i},{j}): {} vs {}",
                        fast[i][j],
                        slow.get(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn orthant_gradient_is_quarter_pi() {
        let orthant = DihedralAngles::regular(3, PI / 2.0).unwrap();
        let grad = schlafli_gradient(&orthant, &SchlafliContext::spherical()).unwrap();
        for g in grad {
            assert!((g - PI / 4.0).abs() < 1e-12, "{g}");
        }
    }

    #[test]
    fn hyperbolic_gradient_is_minus_half_length() {
        let angles = DihedralAngles::regular(3, 1.2).unwrap();
        let grad = schlafli_gradient(&angles, &SchlafliContext::hyperbolic()).unwrap();
        let lengths = crate::gram::edge_lengths(&build_gram(&angles)).unwrap();
        // Pair (i,j) carries the length of the complementary edge, which for
        // the regular family is the common value.
        for g in &grad {
            assert!((g + lengths.get(0, 1) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_path_returns_anchor() {
        let angles = DihedralAngles::regular(3, 1.2).unwrap();
        let path = AnglePath::constant(angles, 0.625).unwrap();
        let r = integrate_volume(&path, &SchlafliContext::hyperbolic(), 1e-10).unwrap();
        assert_eq!(r.value, 0.625);
    }

    #[test]
    fn forward_backward_cancels() {
        let a = DihedralAngles::regular(3, 1.15).unwrap();
        let b = DihedralAngles::new(3, vec![1.2, 1.18, 1.17, 1.21, 1.19, 1.16]).unwrap();
        let path = AnglePath::new(vec![a.clone(), b, a], 0.0, "loop").unwrap();
        let r = integrate_volume(&path, &SchlafliContext::hyperbolic(), 1e-12).unwrap();
        assert!(r.value.abs() < 1e-10, "net change {}", r.value);
    }

    #[test]
    fn spherical_orthant_is_exact() {
        let orthant = DihedralAngles::regular(3, PI / 2.0).unwrap();
        let r = simplex_volume_spherical(&orthant, None, 1e-10).unwrap();
        assert!((r.value - PI * PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn spherical_volume_monotone_on_regular_ray() {
        // Gradient is positive, so volume grows with θ along the regular ray.
        let mut prev = 0.0;
        for (i, theta) in [PI / 2.0, PI / 2.0 + 0.04, PI / 2.0 + 0.08]
            .iter()
            .enumerate()
        {
            let v = simplex_volume_spherical(
                &DihedralAngles::regular(3, *theta).unwrap(),
                None,
                1e-9,
            )
            .unwrap()
            .value;
            if i > 0 {
                assert!(v > prev, "volume not increasing: {v} after {prev}");
            }
            prev = v;
        }
    }

    #[test]
    fn hyperbolic_anchor_found_and_positive() {
        let angles = DihedralAngles::regular(3, 1.22).unwrap();
        let opts = TetraVolumeOpts {
            verify_anchor: false,
            ..TetraVolumeOpts::default()
        };
        let r = tetra_volume_hyperbolic(&angles, &opts).unwrap();
        assert!(r.value > 0.0);
        assert!(r.error_estimate < 1e-6);
        // Path independence: two different rays to the same target.
        let skew = {
            let mut d: Vec<f64> = angles
                .as_slice()
                .iter()
                .map(|a| (1.0f64 / 3.0).acos() - a)
                .collect();
            d[0] *= 1.4;
            d[1] *= 0.8;
            d
        };
        let opts2 = TetraVolumeOpts {
            anchor_direction: Some(skew),
            verify_anchor: false,
            ..TetraVolumeOpts::default()
        };
        let r2 = tetra_volume_hyperbolic(&angles, &opts2).unwrap();
        assert!(
            (r.value - r2.value).abs() < 1e-6,
            "{} vs {}",
            r.value,
            r2.value
        );
    }

    #[test]
    fn gradient_matches_central_differences() {
        let angles = DihedralAngles::new(3, vec![1.16, 1.19, 1.22, 1.18, 1.2, 1.17]).unwrap();
        let ctx = SchlafliContext::hyperbolic();
        let grad = schlafli_gradient(&angles, &ctx).unwrap();
        let opts = TetraVolumeOpts {
            verify_anchor: false,
            tol: 1e-10,
            ..TetraVolumeOpts::default()
        };
        let h = 1e-4;
        for idx in 0..3 {
            let mut dir = vec![0.0; 6];
            dir[idx] = 1.0;
            let plus = angles.try_offset(&dir, h).unwrap();
            let minus = angles.try_offset(&dir, -h).unwrap();
            let vp = tetra_volume_hyperbolic(&plus, &opts).unwrap().value;
            let vm = tetra_volume_hyperbolic(&minus, &opts).unwrap().value;
            let fd = (vp - vm) / (2.0 * h);
            let rel = (fd - grad[idx]).abs() / grad[idx].abs();
            assert!(rel < 1e-4, "pair {idx}: fd {fd} vs grad {}", grad[idx]);
        }
    }

    #[test]
    fn wrong_curvature_is_rejected() {
        let spherical = DihedralAngles::regular(3, 1.6).unwrap();
        assert!(matches!(
            schlafli_gradient(&spherical, &SchlafliContext::hyperbolic()),
            Err(SchlafliError::WrongCurvature { .. })
        ));
        assert!(tetra_volume_hyperbolic(&spherical, &TetraVolumeOpts::default()).is_err());
    }

    #[test]
    fn spherical_path_exit_reports_location() {
        // Walking from the orthant toward a hyperbolic target must fail.
        let target = DihedralAngles::regular(3, 1.2).unwrap();
        let err = simplex_volume_spherical(&target, None, 1e-8).unwrap_err();
        assert!(matches!(err, SchlafliError::WrongCurvature { .. }));
        // A genuinely exiting path through integrate_volume.
        let orthant = DihedralAngles::regular(3, PI / 2.0).unwrap();
        let path = AnglePath::new(
            vec![orthant, DihedralAngles::regular(3, 1.2).unwrap()],
            PI * PI / 8.0,
            "exit test",
        )
        .unwrap();
        match integrate_volume(&path, &SchlafliContext::spherical(), 1e-8) {
            Err(SchlafliError::PathExitsDomain { s }) => {
                assert!((0.0..=1.0).contains(&s));
            }
            other => panic!("expected PathExitsDomain, got {other:?}"),
        }
    }
}
