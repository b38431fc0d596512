//! Independent brute-force references used to cross-check everything else.
//!
//! - [`lobachevsky`]: Л(θ) = −∫₀^θ log|2 sin t| dt by series + adaptive
//!   quadrature,
//! - [`mc_volume_klein`] / [`mc_area_klein2`]: Monte-Carlo volume (area) of
//!   convex bodies in the Klein model, density (1−‖x‖²)^{−2} (resp. ^{−3/2}),
//! - [`mc_volume_sphere`]: rejection sampling on S³,
//! - [`ideal_tetra_volume`]: Л(α)+Л(β)+Л(γ) for ideal tetrahedra.
//!
//! Sampling is chunked (65536 samples per chunk) with per-chunk derived RNG
//! streams and pairwise reduction in chunk order, so a fixed seed gives
//! bit-identical estimates across runs and thread counts.

use crate::minkowski::{HPoint, MVector, MinkowskiError};
use crate::rng::{pairwise_sum, run_chunks, CounterRng};
use std::f64::consts::PI;
use thiserror::Error;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("convex hull is degenerate ({0})")]
    DegenerateHull(String),
    #[error("region is empty: 0 hits in {samples} samples")]
    EmptyRegion { samples: u64 },
    #[error("angles must be positive with α+β+γ = π, got sum {sum}")]
    AngleSum { sum: f64 },
    #[error("Klein point must lie strictly inside the unit ball, |x| = {norm}")]
    OutsideBall { norm: f64 },
    #[error("sample count must be ≥ 1")]
    NoSamples,
    #[error(transparent)]
    Minkowski(#[from] MinkowskiError),
}

/// Monte-Carlo configuration. Identical (seed, samples) always reproduces
/// the identical estimate.
#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

// ---------------------------------------------------------------------------
// Lobachevsky function
// ---------------------------------------------------------------------------

/// ζ(2n) for n = 1..=8.
#[allow(clippy::excessive_precision)]
const ZETA_EVEN: [f64; 8] = [
    1.6449340668482264,
    1.0823232337111382,
    1.0173430619844491,
    1.0040773561979443,
    1.0009945751278181,
    1.0002460865533080,
    1.0000612481350587,
    1.0000152822594087,
];

/// Series for Л(θ) on |θ| ≤ 0.1:
/// Л(θ) = θ − θ log(2θ) + Σ_{n≥1} ζ(2n) θ^{2n+1} / (n (2n+1) π^{2n}).
/// With eight terms the truncation error is below (θ/π)^{18} θ < 1e−27.
fn lobachevsky_series(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let mut acc = theta - theta * (2.0 * theta).ln();
    let ratio2 = (theta / PI) * (theta / PI);
    let mut pow = theta;
    for (n, zeta) in ZETA_EVEN.iter().enumerate() {
        let nn = (n + 1) as f64;
        pow *= ratio2;
        acc += zeta * pow / (nn * (2.0 * nn + 1.0));
    }
    acc
}

/// Lobachevsky function Л(θ) = −∫₀^θ log|2 sin t| dt.
///
/// Odd and π-periodic by range reduction; series expansion near multiples of
/// π, adaptive quadrature elsewhere.
pub fn lobachevsky(theta: f64) -> f64 {
    // Reduce to [0, π), then to [0, π/2] using Л(π − t) = −Л(t).
    let mut t = theta % PI;
    if t < 0.0 {
        t += PI;
    }
    let (t, sign) = if t > 0.5 * PI { (PI - t, -1.0) } else { (t, 1.0) };
    if t <= 0.1 {
        return sign * lobachevsky_series(t);
    }
    let head = lobachevsky_series(0.1);
    let tail = crate::quad::adaptive(&|u: f64| (2.0 * u.sin()).ln(), 0.1, t, 1e-14, 48);
    sign * (head - tail.value)
}

/// Volume Л(α)+Л(β)+Л(γ) of the ideal tetrahedron with dihedral angles
/// (α, β, γ) at each vertex; requires α+β+γ = π.
pub fn ideal_tetra_volume(alpha: f64, beta: f64, gamma: f64) -> Result<f64, OracleError> {
    let sum = alpha + beta + gamma;
    if (sum - PI).abs() > 1e-9 || alpha <= 0.0 || beta <= 0.0 || gamma <= 0.0 {
        return Err(OracleError::AngleSum { sum });
    }
    Ok(lobachevsky(alpha) + lobachevsky(beta) + lobachevsky(gamma))
}

// ---------------------------------------------------------------------------
// Klein model conversions
// ---------------------------------------------------------------------------

/// Hyperboloid → Klein ball.
pub fn to_klein(p: &HPoint) -> [f64; 3] {
    let v = p.vector();
    [v[1] / v[0], v[2] / v[0], v[3] / v[0]]
}

/// Klein ball → hyperboloid.
pub fn from_klein(k: [f64; 3]) -> Result<HPoint, OracleError> {
    let n2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if n2 >= 1.0 {
        return Err(OracleError::OutsideBall { norm: n2.sqrt() });
    }
    let s = 1.0 / (1.0 - n2).sqrt();
    Ok(HPoint::new(MVector::new(s, s * k[0], s * k[1], s * k[2]))?)
}

// ---------------------------------------------------------------------------
// Monte-Carlo in the Klein model
// ---------------------------------------------------------------------------

/// Density-weighted Monte-Carlo integral over an arbitrary region of the
/// Klein ball: ∫_region (1−‖x‖²)^{−2} dx, sampled uniformly in `bbox`.
pub fn mc_klein_region<R>(
    region: R,
    bbox: ([f64; 3], [f64; 3]),
    cfg: McConfig,
) -> Result<McEstimate, OracleError>
where
    R: Fn(&[f64; 3]) -> bool + Sync,
{
    if cfg.samples == 0 {
        return Err(OracleError::NoSamples);
    }
    let (lo, hi) = bbox;
    let vol_box = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    let root = CounterRng::new(cfg.seed);
    let n_chunks = cfg.samples.div_ceil(CHUNK) as usize;

    let partials = run_chunks(n_chunks, |c| {
        let mut rng = root.stream(c as u64);
        let count = CHUNK.min(cfg.samples - c as u64 * CHUNK);
        let (mut s1, mut s2, mut hits) = (0.0f64, 0.0f64, 0u64);
        for _ in 0..count {
            let x = [
                rng.next_in(lo[0], hi[0]),
                rng.next_in(lo[1], hi[1]),
                rng.next_in(lo[2], hi[2]),
            ];
            if region(&x) {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                let w = 1.0 / ((1.0 - r2) * (1.0 - r2));
                s1 += w;
                s2 += w * w;
                hits += 1;
            }
        }
        (s1, s2, hits)
    });

    let sums1: Vec<f64> = partials.iter().map(|p| p.0).collect();
    let sums2: Vec<f64> = partials.iter().map(|p| p.1).collect();
    let hits: u64 = partials.iter().map(|p| p.2).sum();
    let n = cfg.samples as f64;
    let m1 = pairwise_sum(&sums1) / n;
    let m2 = pairwise_sum(&sums2) / n;
    let var = (m2 - m1 * m1).max(0.0);
    Ok(McEstimate {
        estimate: vol_box * m1,
        std_error: vol_box * (var / n).sqrt(),
        samples: cfg.samples,
        hits,
    })
}

/// Facet of a convex hull in outward form n·x ≤ d.
struct Facet {
    n: [f64; 3],
    d: f64,
}

/// Brute-force facet enumeration over all point triples: a triple spans a
/// facet when every other point lies weakly on one side. Intended for the
/// small vertex sets the oracle sees; fails with `DegenerateHull` when the
/// points are affinely degenerate.
fn hull_facets(points: &[[f64; 3]]) -> Result<Vec<Facet>, OracleError> {
    let m = points.len();
    if m < 4 {
        return Err(OracleError::DegenerateHull("fewer than 4 points".into()));
    }
    let mut facets: Vec<Facet> = Vec::new();
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |a, &c| a.max(c.abs()))
        .max(1e-12);
    let tol = 1e-12 * scale * scale;
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let (a, b, c) = (points[i], points[j], points[k]);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let mut n = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                if norm <= tol {
                    continue;
                }
                let mut d = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
                let (mut pos, mut neg) = (false, false);
                for (idx, p) in points.iter().enumerate() {
                    if idx == i || idx == j || idx == k {
                        continue;
                    }
                    let s = n[0] * p[0] + n[1] * p[1] + n[2] * p[2] - d;
                    if s > tol {
                        pos = true;
                    } else if s < -tol {
                        neg = true;
                    }
                }
                if pos && neg {
                    continue;
                }
                if pos {
                    n = [-n[0], -n[1], -n[2]];
                    d = -d;
                }
                // Deduplicate parallel copies of the same supporting plane.
                let dup = facets.iter().any(|f| {
                    let cross = (f.n[1] * n[2] - f.n[2] * n[1]).abs()
                        + (f.n[2] * n[0] - f.n[0] * n[2]).abs()
                        + (f.n[0] * n[1] - f.n[1] * n[0]).abs();
                    let nn = f.n[0] * n[0] + f.n[1] * n[1] + f.n[2] * n[2];
                    cross < 1e-9 * norm && nn > 0.0 && (f.d * norm - d * (nn / norm)).abs() < 1e-9 * norm
                });
                if !dup {
                    facets.push(Facet { n, d });
                }
            }
        }
    }
    if facets.len() < 4 {
        return Err(OracleError::DegenerateHull(format!(
            "only {} supporting planes found",
            facets.len()
        )));
    }
    Ok(facets)
}

/// Monte-Carlo hyperbolic volume of the convex hull of Klein-ball points:
/// ∫_hull (1−‖x‖²)^{−2} dx by rejection sampling in the bounding box.
pub fn mc_volume_klein(points: &[[f64; 3]], cfg: McConfig) -> Result<McEstimate, OracleError> {
    for p in points {
        let n2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        if n2 >= 1.0 {
            return Err(OracleError::OutsideBall { norm: n2.sqrt() });
        }
    }
    let facets = hull_facets(points)?;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let inside = move |x: &[f64; 3]| {
        facets
            .iter()
            .all(|f| f.n[0] * x[0] + f.n[1] * x[1] + f.n[2] * x[2] <= f.d)
    };
    mc_klein_region(inside, (lo, hi), cfg)
}

/// 2D analogue of [`mc_volume_klein`] for a convex polygon in the Klein disk,
/// with the hyperbolic area density (1−‖x‖²)^{−3/2}.
pub fn mc_area_klein2(polygon: &[[f64; 2]], cfg: McConfig) -> Result<McEstimate, OracleError> {
    if cfg.samples == 0 {
        return Err(OracleError::NoSamples);
    }
    if polygon.len() < 3 {
        return Err(OracleError::DegenerateHull("fewer than 3 vertices".into()));
    }
    let k = polygon.len();
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in polygon {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let area2 = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    // Convex membership: consistent sign of all edge cross products.
    let inside = |x: &[f64; 2]| {
        let mut sign = 0.0f64;
        for i in 0..k {
            let a = polygon[i];
            let b = polygon[(i + 1) % k];
            let c = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
            if c.abs() < 1e-300 {
                continue;
            }
            if sign == 0.0 {
                sign = c.signum();
            } else if c.signum() != sign {
                return false;
            }
        }
        true
    };

    let root = CounterRng::new(cfg.seed);
    let n_chunks = cfg.samples.div_ceil(CHUNK) as usize;
    let partials = run_chunks(n_chunks, |c| {
        let mut rng = root.stream(c as u64);
        let count = CHUNK.min(cfg.samples - c as u64 * CHUNK);
        let (mut s1, mut s2, mut hits) = (0.0f64, 0.0f64, 0u64);
        for _ in 0..count {
            let x = [rng.next_in(lo[0], hi[0]), rng.next_in(lo[1], hi[1])];
            if inside(&x) {
                let r2 = x[0] * x[0] + x[1] * x[1];
                let w = (1.0 - r2).powf(-1.5);
                s1 += w;
                s2 += w * w;
                hits += 1;
            }
        }
        (s1, s2, hits)
    });
    let sums1: Vec<f64> = partials.iter().map(|p| p.0).collect();
    let sums2: Vec<f64> = partials.iter().map(|p| p.1).collect();
    let hits: u64 = partials.iter().map(|p| p.2).sum();
    let n = cfg.samples as f64;
    let m1 = pairwise_sum(&sums1) / n;
    let m2 = pairwise_sum(&sums2) / n;
    Ok(McEstimate {
        estimate: area2 * m1,
        std_error: area2 * ((m2 - m1 * m1).max(0.0) / n).sqrt(),
        samples: cfg.samples,
        hits,
    })
}

// ---------------------------------------------------------------------------
// Monte-Carlo on S³
// ---------------------------------------------------------------------------

/// Spherical simplex volume by rejection sampling on S³.
///
/// The simplex is {x ∈ S³ : n_i · x ≤ 0} for the four outward normals
/// (Euclidean inner product); uniform points come from normalized 4D
/// Gaussians, and the estimate is 2π² times the hit fraction.
pub fn mc_volume_sphere(normals: &[[f64; 4]; 4], cfg: McConfig) -> Result<McEstimate, OracleError> {
    if cfg.samples == 0 {
        return Err(OracleError::NoSamples);
    }
    let root = CounterRng::new(cfg.seed);
    let n_chunks = cfg.samples.div_ceil(CHUNK) as usize;
    let hits_per: Vec<u64> = run_chunks(n_chunks, |c| {
        let mut rng = root.stream(c as u64);
        let count = CHUNK.min(cfg.samples - c as u64 * CHUNK);
        let mut hits = 0u64;
        for _ in 0..count {
            let g = [
                rng.next_gaussian(),
                rng.next_gaussian(),
                rng.next_gaussian(),
                rng.next_gaussian(),
            ];
            let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]).sqrt();
            if norm == 0.0 {
                continue;
            }
            let ok = normals.iter().all(|n| {
                n[0] * g[0] + n[1] * g[1] + n[2] * g[2] + n[3] * g[3] <= 0.0
            });
            if ok {
                hits += 1;
            }
        }
        hits
    });
    let hits: u64 = hits_per.iter().sum();
    if hits == 0 {
        return Err(OracleError::EmptyRegion {
            samples: cfg.samples,
        });
    }
    let n = cfg.samples as f64;
    let p = hits as f64 / n;
    let total = 2.0 * PI * PI;
    Ok(McEstimate {
        estimate: total * p,
        std_error: total * (p * (1.0 - p) / n).sqrt(),
        samples: cfg.samples,
        hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const N_TEST: u64 = 200_000;

    #[test]
    fn lobachevsky_zero_and_right_angle() {
        assert_eq!(lobachevsky(0.0), 0.0);
        // Classical: ∫₀^{π/2} log(2 sin t) dt = 0.
        assert!(lobachevsky(PI / 2.0).abs() < 1e-13, "{}", lobachevsky(PI / 2.0));
    }

    #[test]
    fn lobachevsky_doubling_identity() {
        // Л(π/6) = (3/2)·Л(π/3).
        let lhs = lobachevsky(PI / 6.0);
        let rhs = 1.5 * lobachevsky(PI / 3.0);
        assert!((lhs - rhs).abs() < 1e-10, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn lobachevsky_odd_and_periodic() {
        for &theta in &[0.05, 0.3, 1.0, 1.8, 2.9] {
            let l = lobachevsky(theta);
            assert!((lobachevsky(-theta) + l).abs() < 1e-12);
            assert!((lobachevsky(theta + PI) - l).abs() < 1e-12);
            assert!((lobachevsky(theta - 2.0 * PI) - l).abs() < 1e-12);
        }
    }

    #[test]
    fn lobachevsky_matches_direct_quadrature() {
        // The series + split route must agree with a single adaptive
        // integral across the log singularity at 0.
        for &t in &[0.05, 0.2, 1.0] {
            let direct = -crate::quad::adaptive(&|u: f64| (2.0 * u.sin()).ln(), 0.0, t, 1e-13, 48)
                .value;
            let val = lobachevsky(t);
            assert!((val - direct).abs() < 1e-10, "t={t}: {val} vs {direct}");
        }
    }

    #[test]
    fn lobachevsky_max_near_pi_over_six() {
        // Ternary search for the maximum on [0, π].
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..100 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if lobachevsky(m1) < lobachevsky(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        let argmax = 0.5 * (lo + hi);
        assert!((argmax - PI / 6.0).abs() < 1e-6, "argmax {argmax}");
    }

    #[test]
    fn ideal_tetra_values() {
        let regular = ideal_tetra_volume(PI / 3.0, PI / 3.0, PI / 3.0).unwrap();
        assert!((regular - 1.0149416064096535).abs() < 1e-10, "{regular}");
        let half = ideal_tetra_volume(PI / 2.0, PI / 4.0, PI / 4.0).unwrap();
        assert!((half - 0.915965594177219).abs() < 1e-10, "{half}");
        assert!(ideal_tetra_volume(PI, 1e-3, -1e-3 + 0.0).is_err());
        assert!(ideal_tetra_volume(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn klein_round_trip() {
        let p = from_klein([0.3, -0.2, 0.5]).unwrap();
        let k = to_klein(&p);
        assert!((k[0] - 0.3).abs() < 1e-14);
        assert!((k[1] + 0.2).abs() < 1e-14);
        assert!((k[2] - 0.5).abs() < 1e-14);
        assert!(from_klein([0.8, 0.6, 0.0]).is_err());
    }

    #[test]
    fn klein_ball_volume_self_test() {
        // Hyperbolic ball of radius 1 as a Klein ball of radius tanh(1):
        // volume π(sinh 2 − 2).
        let rk = 1.0f64.tanh();
        let cfg = McConfig {
            samples: 400_000,
            seed: 0,
        };
        let est = mc_klein_region(
            |x| x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < rk * rk,
            ([-rk, -rk, -rk], [rk, rk, rk]),
            cfg,
        )
        .unwrap();
        let exact = PI * (2.0f64.sinh() - 2.0);
        assert!(
            (est.estimate - exact).abs() < 3.0 * est.std_error,
            "est {} ± {} vs {}",
            est.estimate,
            est.std_error,
            exact
        );
    }

    #[test]
    fn klein_hull_volume_of_known_simplex() {
        // Euclidean-small tetrahedron: hyperbolic volume ≈ Euclidean integral.
        let pts = [
            [0.0, 0.0, 0.0],
            [0.05, 0.0, 0.0],
            [0.0, 0.05, 0.0],
            [0.0, 0.0, 0.05],
        ];
        let cfg = McConfig {
            samples: N_TEST,
            seed: 1,
        };
        let est = mc_volume_klein(&pts, cfg).unwrap();
        let eucl = 0.05f64.powi(3) / 6.0;
        // Density is within [1, (1−3·0.0025)^{−2}] on the body.
        assert!(est.estimate > eucl * 0.9 && est.estimate < eucl * 1.2);
    }

    #[test]
    fn klein_hull_rejects_degenerate() {
        let flat = [
            [0.0, 0.0, 0.0],
            [0.1, 0.0, 0.0],
            [0.0, 0.1, 0.0],
            [0.1, 0.1, 0.0],
        ];
        let cfg = McConfig {
            samples: 100,
            seed: 0,
        };
        assert!(matches!(
            mc_volume_klein(&flat, cfg),
            Err(OracleError::DegenerateHull(_))
        ));
    }

    #[test]
    fn stderr_shrinks_with_samples() {
        let pts = [
            [0.0, 0.0, 0.0],
            [0.4, 0.0, 0.0],
            [0.0, 0.4, 0.0],
            [0.0, 0.0, 0.4],
        ];
        let a = mc_volume_klein(
            &pts,
            McConfig {
                samples: N_TEST,
                seed: 7,
            },
        )
        .unwrap();
        let b = mc_volume_klein(
            &pts,
            McConfig {
                samples: 2 * N_TEST,
                seed: 7,
            },
        )
        .unwrap();
        let ratio = b.std_error / a.std_error;
        assert!(
            (ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.15,
            "ratio {ratio}"
        );
    }

    #[test]
    fn sphere_orthant_and_hemisphere() {
        let e = |i: usize| {
            let mut v = [0.0; 4];
            v[i] = 1.0;
            v
        };
        let cfg = McConfig {
            samples: N_TEST,
            seed: 0,
        };
        let orthant = mc_volume_sphere(&[e(0), e(1), e(2), e(3)], cfg).unwrap();
        let expect = PI * PI / 8.0;
        assert!(
            (orthant.estimate - expect).abs() < 3.0 * orthant.std_error,
            "orthant {} ± {}",
            orthant.estimate,
            orthant.std_error
        );
        let hemi = mc_volume_sphere(&[e(3), e(3), e(3), e(3)], cfg).unwrap();
        assert!(
            (hemi.estimate - PI * PI).abs() < 3.0 * hemi.std_error,
            "hemisphere {} ± {}",
            hemi.estimate,
            hemi.std_error
        );
    }

    #[test]
    fn fixed_seed_reproduces_bits() {
        let pts = [
            [0.0, 0.0, 0.0],
            [0.3, 0.0, 0.1],
            [0.0, 0.3, -0.1],
            [-0.1, 0.0, 0.3],
        ];
        let cfg = McConfig {
            samples: 100_000,
            seed: 123,
        };
        let a = mc_volume_klein(&pts, cfg).unwrap();
        let b = mc_volume_klein(&pts, cfg).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }
}
