//! Shadow position: the affine image whose minimal shadow is at least
//! `|C̃|^{(n-1)/n}`, together with the inequality checks that certify it.
//!
//! Pipeline: projection body `ΠC` → vertices of its polar `Π*C` → minimal
//! enclosing ellipsoid `{xᵀHx <= 1}` of those vertices → transform
//! `A = H^{1/2} / det(H^{1/2})^{1/n}`, which maps that ellipsoid to a ball
//! because `Π*(AC) = A Π*(C)` for `|det A| = 1`.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::john::{extract_john_decomposition, mvee_symmetric, JohnDecomposition};
use crate::kernel::ball::ln_unit_ball_volume;
use crate::kernel::combinatorics::combinations;
use crate::kernel::linalg::{self, canonical_sign, dot, hyperplane_normal, norm, psd_sqrt, scaled, Mat};
use crate::kernel::random::{sample_unit_sphere, RandomSource};
use crate::polytope::SymmetricHPolytope;
use crate::scalar::Scalar;
use crate::zonotope::{projection_body, DecompositionResidual, WeightedDirections, Zonotope};

pub const MAX_NORMAL_GENERATORS: usize = 20;
pub const MAX_NORMAL_DIM: usize = 6;
/// Largest generator count handled by the exact minimal-shadow branch.
pub const MAX_EXACT_GENERATORS: usize = 16;
pub const SAMPLING_DRAWS: usize = 100_000;
pub const REFINEMENT_STARTS: usize = 200;
/// Best sampled directions that get a local vertex polish.
pub const POLISH_CANDIDATES: usize = 20;
/// Shadow-position ratios below `1 - RATIO_TOL` are reported as failures.
pub const RATIO_TOL: f64 = 1e-4;

/// Unit normals of all hyperplanes spanned by `n - 1` generators, one per
/// antipodal pair. For a zonotope these are exactly its facet normals.
pub fn zonotope_facet_normals<T: Scalar>(z: &Zonotope<T>) -> Result<Vec<Vec<T>>> {
    let n = z.dim();
    let m = z.num_generators();
    if m > MAX_NORMAL_GENERATORS {
        return Err(GeomError::Capacity {
            what: "generator count for facet normals",
            limit: MAX_NORMAL_GENERATORS,
            got: m,
        });
    }
    if n > MAX_NORMAL_DIM {
        return Err(GeomError::Capacity {
            what: "dimension for facet normals",
            limit: MAX_NORMAL_DIM,
            got: n,
        });
    }
    if n == 1 {
        return Ok(if m > 0 { vec![vec![T::one()]] } else { Vec::new() });
    }
    let tol = T::tol(1e-12);
    let mut normals: Vec<Vec<T>> = Vec::new();
    for subset in combinations(m, n - 1) {
        let vs: Vec<&[T]> = subset.iter().map(|&j| z.generators()[j].as_slice()).collect();
        let Some(nu) = hyperplane_normal(&vs, T::tol(1e-10)) else {
            continue;
        };
        let nu = canonical_sign(&nu, tol);
        if !normals.iter().any(|p| linalg::dist(p, &nu) < T::tol(1e-9)) {
            normals.push(nu);
        }
    }
    Ok(normals)
}

/// Vertices of `{x : Σ_j |<x, w_j>| <= 1}`, the polar of a zonotope.
#[derive(Clone, Debug, Serialize)]
pub struct PolarVertexSet<T> {
    pub vertices: Vec<Vec<T>>,
}

/// Each facet normal `ν` of `Z` gives the polar vertices `±ν / h_Z(ν)`.
pub fn polar_vertices<T: Scalar>(z: &Zonotope<T>) -> Result<PolarVertexSet<T>> {
    let mut vertices = Vec::new();
    for nu in zonotope_facet_normals(z)? {
        let h = z.support(&nu);
        let v = scaled(&nu, T::one() / h);
        vertices.push(linalg::neg(&v));
        vertices.push(v);
    }
    Ok(PolarVertexSet { vertices })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchBranch {
    /// Every polar vertex was examined; the value is the true minimum.
    Exact,
    /// Sampling plus local refinement; an upper estimate of the minimum.
    Estimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinShadow<T> {
    pub direction: Vec<T>,
    pub value: T,
    pub branch: SearchBranch,
}

/// Projected subgradient descent of `h_Z` on the sphere from `start`.
fn refine_min<T: Scalar>(z: &Zonotope<T>, start: Vec<T>) -> (Vec<T>, T) {
    let n = z.dim();
    let mut theta = start;
    let mut best_val = z.support(&theta);
    let mut best = theta.clone();
    let scale = z.alphas().iter().copied().sum::<T>().max(T::min_positive_value());
    for k in 0..200 {
        let mut g = vec![T::zero(); n];
        for w in z.generators() {
            let s = dot(&theta, w);
            if s != T::zero() {
                linalg::axpy(&mut g, s.signum(), w);
            }
        }
        let radial = dot(&g, &theta);
        linalg::axpy(&mut g, -radial, &theta);
        let gn = norm(&g);
        if gn <= T::tol(1e-14) * scale {
            break;
        }
        let step = T::lit(0.5) / T::of(k + 1).sqrt();
        linalg::axpy(&mut theta, -step / gn, &g);
        let Some(t) = linalg::normalized(&theta) else { break };
        theta = t;
        let v = z.support(&theta);
        if v < best_val {
            best_val = v;
            best = theta.clone();
        }
    }
    (best, best_val)
}

/// Candidate polar vertices near `theta`: normals of hyperplanes spanned by
/// `n - 1` of the generators most nearly orthogonal to `theta`.
fn polish<T: Scalar>(z: &Zonotope<T>, theta: &[T]) -> Option<(Vec<T>, T)> {
    let n = z.dim();
    if n < 2 {
        return None;
    }
    let mut near: Vec<(T, usize)> = z
        .generators()
        .iter()
        .enumerate()
        .map(|(j, w)| ((dot(theta, w) / norm(w)).abs(), j))
        .collect();
    near.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    near.truncate((n + 3).min(near.len()));
    let mut best: Option<(Vec<T>, T)> = None;
    for subset in combinations(near.len(), n - 1) {
        let vs: Vec<&[T]> = subset.iter().map(|&k| z.generators()[near[k].1].as_slice()).collect();
        let Some(nu) = hyperplane_normal(&vs, T::tol(1e-10)) else {
            continue;
        };
        let v = z.support(&nu);
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((nu, v));
        }
    }
    best
}

/// Minimum of `θ ↦ h_Z(θ)` over the unit sphere.
///
/// The minimum of a norm on the sphere sits at a vertex of its unit ball, and
/// the unit ball of `h_Z` is the polar of `Z`, whose vertices point along the
/// facet normals of `Z`. The exact branch therefore takes the smallest
/// `h_Z(ν)` over all facet normals; random starts refined by subgradient
/// descent run in both branches as a cross-check.
pub fn min_support_direction<T: Scalar>(z: &Zonotope<T>, rng: &mut RandomSource) -> Result<MinShadow<T>> {
    let exact = z.num_generators() <= MAX_EXACT_GENERATORS && z.dim() <= MAX_NORMAL_DIM;
    min_support_search(z, rng, exact)
}

/// The sampling branch of [`min_support_direction`] regardless of size:
/// uniform draws, subgradient refinement and a local vertex polish.
pub fn min_support_direction_sampled<T: Scalar>(z: &Zonotope<T>, rng: &mut RandomSource) -> Result<MinShadow<T>> {
    min_support_search(z, rng, false)
}

fn min_support_search<T: Scalar>(z: &Zonotope<T>, rng: &mut RandomSource, exact: bool) -> Result<MinShadow<T>> {
    let n = z.dim();
    let mut best: Option<(Vec<T>, T)> = None;
    let consider = |theta: Vec<T>, v: T, best: &mut Option<(Vec<T>, T)>| {
        if best.as_ref().is_none_or(|b| v < b.1) {
            *best = Some((theta, v));
        }
    };
    if exact {
        for nu in zonotope_facet_normals(z)? {
            let v = z.support(&nu);
            consider(nu, v, &mut best);
        }
    } else {
        let mut draws: Vec<(T, Vec<T>)> = Vec::with_capacity(SAMPLING_DRAWS);
        for _ in 0..SAMPLING_DRAWS {
            let theta: Vec<T> = sample_unit_sphere(n, rng)?;
            draws.push((z.support(&theta), theta));
        }
        draws.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        for (v, theta) in draws.into_iter().take(POLISH_CANDIDATES) {
            if let Some((t, pv)) = polish(z, &theta) {
                consider(t, pv, &mut best);
            }
            consider(theta, v, &mut best);
        }
    }
    for _ in 0..REFINEMENT_STARTS {
        let start: Vec<T> = sample_unit_sphere(n, rng)?;
        let (theta, v) = refine_min(z, start);
        consider(theta, v, &mut best);
    }
    if let Some((theta, _)) = best.clone() {
        let (t, v) = refine_min(z, theta);
        consider(t, v, &mut best);
    }
    let (direction, value) = best.ok_or_else(|| GeomError::InvalidInput("empty zonotope".into()))?;
    Ok(MinShadow {
        direction,
        value,
        branch: if exact { SearchBranch::Exact } else { SearchBranch::Estimate },
    })
}

/// Direction of the smallest shadow of `C`, and its area.
pub fn min_shadow_direction<T: Scalar>(c: &SymmetricHPolytope<T>, rng: &mut RandomSource) -> Result<MinShadow<T>> {
    min_support_direction(&projection_body(c)?, rng)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowPositionReport<T: Scalar> {
    /// Linear map with `|det| = 1` taking `C` to `body`.
    pub transform: Mat<T>,
    pub body: SymmetricHPolytope<T>,
    pub min_shadow: T,
    pub min_direction: Vec<T>,
    pub branch: SearchBranch,
    pub volume: T,
    /// `min_shadow / volume^{(n-1)/n}`
    pub ratio: T,
    /// Decomposition of the identity by the contact directions of the polar
    /// body's minimal ellipsoid, in the frame of `body`.
    pub john: JohnDecomposition<T>,
    pub residuals: DecompositionResidual<T>,
    /// Largest relative deviation of a contact shadow from `min_shadow`.
    pub contact_shadow_spread: T,
    pub mvee_iterations: usize,
}

/// Puts `C` in shadow position.
pub fn shadow_position<T: Scalar>(
    c: &SymmetricHPolytope<T>,
    epsilon: T,
    rng: &mut RandomSource,
) -> Result<ShadowPositionReport<T>> {
    let n = c.dim();
    let pc = projection_body(c)?;
    let polar = polar_vertices(&pc)?;
    let design = mvee_symmetric(&polar.vertices, epsilon)?;
    let john = extract_john_decomposition(&design)?;

    let root = psd_sqrt(design.ellipsoid.shape())?;
    let det = root.determinant();
    if !(det > T::zero()) {
        return Err(GeomError::Numerical(format!("ellipsoid root has determinant {det}")));
    }
    let transform = root.scale(T::one() / det.powf(T::one() / T::of(n)));
    let body = c.affine_image(&transform)?;

    let min = min_shadow_direction(&body, rng)?;
    let volume = body.volume()?;
    let nf = T::of(n);
    let ratio = min.value / volume.powf((nf - T::one()) / nf);

    let mut spread = T::zero();
    for u in &john.contacts {
        let s = body.shadow_unchecked(u)?;
        spread = spread.max((s - min.value).abs() / min.value);
    }
    if ratio < T::one() - T::tol(RATIO_TOL) {
        return Err(GeomError::Numerical(format!(
            "shadow-position ratio {ratio} below 1 (min shadow {}, volume {volume}, branch {:?})",
            min.value, min.branch
        )));
    }
    let residuals = john.as_weighted().residual();
    Ok(ShadowPositionReport {
        transform,
        body,
        min_shadow: min.value,
        min_direction: min.direction,
        branch: min.branch,
        volume,
        ratio,
        john,
        residuals,
        contact_shadow_spread: spread,
        mvee_iterations: design.iterations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionInequalityReport<T> {
    /// `|C|^{n-1}`
    pub lhs: T,
    /// `Π |P_{u_i} C|^{c_i}`
    pub rhs: T,
    /// `rhs / lhs`, computed in log space.
    pub ratio: T,
}

/// Checks `|C|^{n-1} <= Π |P_{u_i} C|^{c_i}` for a decomposition of the identity.
pub fn verify_theorem3<T: Scalar>(c: &SymmetricHPolytope<T>, wd: &WeightedDirections<T>) -> Result<ProjectionInequalityReport<T>> {
    let wd = WeightedDirections::new(wd.directions.clone(), wd.weights.clone())?;
    if wd.dim() != c.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: c.dim(),
            got: wd.dim(),
        });
    }
    let n = T::of(c.dim());
    let ln_lhs = (n - T::one()) * c.volume()?.ln();
    let mut ln_rhs = T::zero();
    for (u, &w) in wd.directions.iter().zip(&wd.weights) {
        let u = scaled(u, T::one() / norm(u));
        ln_rhs = ln_rhs + w * c.shadow_unchecked(&u)?.ln();
    }
    Ok(ProjectionInequalityReport {
        lhs: ln_lhs.exp(),
        rhs: ln_rhs.exp(),
        ratio: (ln_rhs - ln_lhs).exp(),
    })
}

/// The orthonormal special case: `|C|^{n-1} <= Π_i |P_{e_i} C|`.
pub fn loomis_whitney_check<T: Scalar>(c: &SymmetricHPolytope<T>) -> Result<ProjectionInequalityReport<T>> {
    verify_theorem3(c, &WeightedDirections::orthonormal(c.dim()))
}

/// `v_{n-1} / v_n^{(n-1)/n}`: shadow of the Euclidean ball of unit volume.
pub fn ball_shadow_ratio<T: Scalar>(n: usize) -> Result<T> {
    if !(2..=200).contains(&n) {
        return Err(GeomError::InvalidInput(format!("ball ratio needs 2 <= n <= 200, got {n}")));
    }
    let nf = n as f64;
    let ln = ln_unit_ball_volume(n - 1) - (nf - 1.0) / nf * ln_unit_ball_volume(n);
    Ok(T::lit(ln.exp()))
}
