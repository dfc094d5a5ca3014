//! Deterministic linear algebra, random sampling and dimensional constants.

pub mod ball;
pub mod combinatorics;
pub mod linalg;
pub mod random;

pub use ball::{ln_unit_ball_volume, unit_ball_volume};
pub use linalg::{psd_sqrt, Mat, OrthoBasis};
pub use random::{sample_unit_sphere, RandomSource};
