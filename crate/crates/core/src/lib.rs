//! Shadows of centrally symmetric polytopes.
//!
//! The crate computes volumes, facet measures and shadow areas of bodies
//! given as intersections of symmetric slabs, builds their projection bodies
//! (zonotopes), finds minimal enclosing ellipsoids and the decompositions of
//! the identity they induce, moves a body to the position where its smallest
//! shadow is largest, and maximises volume over budgeted slab families.
//!
//! All routines are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the precision.

// `!(a <= b)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod john;
pub mod kernel;
pub mod minkowski;
pub mod polytope;
pub mod scalar;
pub mod shadow;
pub mod zonotope;

pub use error::{GeomError, Result};

pub use john::{extract_john_decomposition, mvee_symmetric, Design, Ellipsoid, JohnDecomposition};
pub use kernel::{Mat, RandomSource};
pub use minkowski::{construct_pathological, maximize_volume_in_family, PathologicalReport, SlabFamilySpec};
pub use polytope::SymmetricHPolytope;
pub use scalar::Scalar;
pub use shadow::{ball_shadow_ratio, min_shadow_direction, shadow_position, verify_theorem3, ShadowPositionReport};
pub use zonotope::{projection_body, WeightedDirections, Zonotope};

/// Library version, recorded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Polytope64 = SymmetricHPolytope<f64>;
pub type Polytope32 = SymmetricHPolytope<f32>;
pub type Zonotope64 = Zonotope<f64>;
pub type Zonotope32 = Zonotope<f32>;
pub type Ellipsoid64 = Ellipsoid<f64>;
pub type Ellipsoid32 = Ellipsoid<f32>;
pub type John64 = JohnDecomposition<f64>;
pub type John32 = JohnDecomposition<f32>;
pub type Mat64 = Mat<f64>;
pub type Mat32 = Mat<f32>;
pub type SlabFamily64 = SlabFamilySpec<f64>;
pub type SlabFamily32 = SlabFamilySpec<f32>;
