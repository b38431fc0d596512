//! Adaptive panel quadrature with a fixed-order Gauss rule per panel.
//!
//! Panels are bisected while the two-level estimate |G(panel) − G(left) −
//! G(right)| exceeds the panel's error budget. Nodes are interior to the
//! panel, so integrands with (integrable) endpoint singularities are never
//! evaluated at the endpoints themselves.

/// 15-point Gauss–Legendre nodes on [-1, 1] (positive half; rule is symmetric).
#[allow(clippy::excessive_precision)]
const GL15_X: [f64; 8] = [
    0.000000000000000000,
    0.201194093997434522,
    0.394151347077563370,
    0.570972172608538848,
    0.724417731360170047,
    0.848206583410427216,
    0.937273392400705904,
    0.987992518020485428,
];

#[allow(clippy::excessive_precision)]
const GL15_W: [f64; 8] = [
    0.202578241925561273,
    0.198431485327111576,
    0.186161000015562211,
    0.166269205816993934,
    0.139570677926154314,
    0.107159220467171935,
    0.070366047488108125,
    0.030753241996117268,
];

#[derive(Clone, Copy, Debug, Default)]
pub struct QuadResult {
    pub value: f64,
    /// Accumulated two-level error estimate.
    pub error: f64,
    /// Number of panels at the finest accepted level.
    pub panels: usize,
}

/// Fixed 15-point Gauss–Legendre rule on [a, b].
pub fn gauss15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = GL15_W[0] * f(mid);
    for i in 1..8 {
        let dx = half * GL15_X[i];
        acc += GL15_W[i] * (f(mid + dx) + f(mid - dx));
    }
    acc * half
}

/// Adaptive bisection to absolute tolerance `tol` (total over [a, b]).
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> QuadResult {
    let mut out = QuadResult::default();
    let whole = gauss15(f, a, b);
    refine(f, a, b, whole, tol, max_depth, &mut out);
    out
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    out: &mut QuadResult,
) {
    let mid = 0.5 * (a + b);
    let left = gauss15(f, a, mid);
    let right = gauss15(f, mid, b);
    let diff = (left + right - whole).abs();
    if diff <= tol || depth == 0 || mid <= a || mid >= b {
        out.value += left + right;
        out.error += diff;
        out.panels += 2;
        return;
    }
    refine(f, a, mid, left, 0.5 * tol, depth - 1, out);
    refine(f, mid, b, right, 0.5 * tol, depth - 1, out);
}
