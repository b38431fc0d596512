//! Constant-curvature simplices and polyhedra, parametrized by dihedral angles.
//!
//! The crate makes four groups of computations executable:
//!
//! - **Minkowski / hyperboloid model** ([`minkowski`]): points, planes, lines,
//!   boosts and distances in R^{3,1}.
//! - **Angle Gram matrices** ([`gram`], [`schlafli`]): construction and
//!   classification of simplex Gram matrices, cofactor edge lengths, and
//!   volume by integrating the Schläfli differential along paths in angle
//!   space.
//! - **Angle-space membership** ([`angle_space`]): Andreev and Bao–Bonahon
//!   checkers over planar-graph combinatorics, with boundary-slack reports.
//! - **Degeneration diagnostics** ([`polyhedron`], [`degeneration`], [`drum`]):
//!   slab construction, belt extraction, the quantitative angle-sum and
//!   curvature estimates, and randomized lemma samplers.
//!
//! Independent brute-force references (Lobachevsky function, Monte-Carlo
//! volumes) live in [`oracles`] and are used throughout the test suite.
//!
//! All values are immutable after construction and every operation is a pure
//! function; the crate is safe for unrestricted concurrent use.

pub mod angle_space;
pub mod degeneration;
pub mod drum;
pub mod gram;
pub mod minkowski;
pub mod oracles;
pub mod polyhedron;
pub mod quad;
pub mod rng;
pub mod schlafli;
pub mod stats;

pub use gram::{AngleGram, CofactorTable, DihedralAngles, SimplexClass, VertexType};
pub use minkowski::{Boost, HLine, HPlane, HPoint, Isometry, MVector};
pub use schlafli::{AnglePath, Curvature, VolumeResult};
