//! Minimal-volume enclosing ellipsoids of symmetric point sets and the John
//! decomposition read off their contact points.
//!
//! The ellipsoid comes from the D-optimal design problem
//! `max log det Σ λ_k v_k v_kᵀ` over the simplex, solved by Frank-Wolfe with
//! Wolfe-Atwood away steps. With `M = Σ λ_k v_k v_kᵀ` at the optimum, the
//! ellipsoid is `{x : xᵀ (nM)⁻¹ x <= 1}`.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::kernel::linalg::{self, canonical_sign, dot, norm, psd_sqrt, scaled, Mat, OrthoBasis};
use crate::kernel::random::{sample_unit_sphere, RandomSource};
use crate::kernel::unit_ball_volume;
use crate::scalar::Scalar;
use crate::zonotope::{DecompositionResidual, WeightedDirections};

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 1_000_000;
/// Iterations between full refactorisations of the design matrix.
const REFRESH_EVERY: usize = 64;

/// `{x : xᵀ H x <= 1}` with `H` symmetric positive definite.
#[derive(Clone, Debug, Serialize)]
pub struct Ellipsoid<T> {
    shape: Mat<T>,
}

impl<T: Scalar> Ellipsoid<T> {
    pub fn new(shape: Mat<T>) -> Result<Self> {
        shape.cholesky()?;
        Ok(Self { shape })
    }

    pub fn unit_ball(n: usize) -> Self {
        Self {
            shape: Mat::identity(n),
        }
    }

    pub fn shape(&self) -> &Mat<T> {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// `xᵀ H x`
    pub fn gauge_squared(&self, x: &[T]) -> T {
        self.shape.quad_form(x)
    }

    pub fn volume(&self) -> Result<T> {
        let vn: T = unit_ball_volume(self.dim())?;
        Ok(vn / self.shape.determinant().sqrt())
    }
}

/// Output of [`mvee_symmetric`].
#[derive(Clone, Debug, Serialize)]
pub struct Design<T> {
    pub ellipsoid: Ellipsoid<T>,
    /// One representative per antipodal pair of input points.
    pub points: Vec<Vec<T>>,
    /// Design weights on `points`, summing to 1.
    pub weights: Vec<T>,
    pub epsilon: T,
    pub iterations: usize,
    /// `max_k v_kᵀ (nM)⁻¹ v_k` over all points.
    pub max_gauge: T,
    /// `min_k v_kᵀ (nM)⁻¹ v_k` over points with positive weight.
    pub min_support_gauge: T,
}

/// Collapses a point list to one representative per pair `±v`.
fn antipodal_representatives<T: Scalar>(points: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = points.first().map(Vec::len).unwrap_or(0);
    if n == 0 {
        return Err(GeomError::InvalidInput("empty point set".into()));
    }
    let scale = points.iter().map(|p| norm(p)).fold(T::zero(), T::max);
    let tol = T::tol(1e-12) * scale.max(T::one());
    let mut reps: Vec<Vec<T>> = Vec::new();
    for p in points {
        if p.len() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::InvalidInput("non-finite point".into()));
        }
        if norm(p) <= tol {
            continue;
        }
        let c = canonical_sign(p, tol);
        if !reps.iter().any(|r| linalg::dist(r, &c) <= tol) {
            reps.push(c);
        }
    }
    Ok(reps)
}

fn design_matrix<T: Scalar>(points: &[Vec<T>], weights: &[T]) -> Mat<T> {
    let mut m = Mat::zeros(points[0].len());
    for (v, &w) in points.iter().zip(weights) {
        if w > T::zero() {
            m.add_outer(w, v);
        }
    }
    m
}

/// Minimal-volume origin-centred ellipsoid containing `±points`.
///
/// Stops once every point satisfies `vᵀ(nM)⁻¹v <= 1 + ε` and every point
/// carrying weight satisfies `vᵀ(nM)⁻¹v >= 1 − ε`.
pub fn mvee_symmetric<T: Scalar>(points: &[Vec<T>], epsilon: T) -> Result<Design<T>> {
    if !(epsilon >= T::lit(1e-10) && epsilon <= T::lit(1e-2)) {
        return Err(GeomError::InvalidInput(format!("epsilon {epsilon} outside [1e-10, 1e-2]")));
    }
    let pts = antipodal_representatives(points)?;
    let n = pts[0].len();
    let mut span = OrthoBasis::new(n);
    for p in &pts {
        span.push(p, T::tol(1e-10));
    }
    if span.rank() < n {
        return Err(GeomError::RankDeficient(format!(
            "points span a {}-dimensional subspace of R^{n}",
            span.rank()
        )));
    }

    let k = pts.len();
    let nf = T::of(n);
    let mut weights = vec![T::one() / T::of(k); k];
    let mut minv = design_matrix(&pts, &weights).inverse()?;
    let mut gauges = vec![T::zero(); k];

    for iter in 0..MAX_ITERATIONS {
        if iter % REFRESH_EVERY == 0 {
            minv = design_matrix(&pts, &weights).inverse()?;
        }
        for (g, v) in gauges.iter_mut().zip(&pts) {
            *g = minv.quad_form(v);
        }
        let (j, gmax) = argmax(&gauges, |_| true);
        let (i, gmin) = argmin(&gauges, |idx| weights[idx] > T::zero());
        let up = gmax / nf - T::one();
        let down = T::one() - gmin / nf;
        if up <= epsilon && down <= epsilon {
            let h = design_matrix(&pts, &weights).scale(nf).inverse()?;
            let ellipsoid = Ellipsoid::new(h)?;
            return Ok(Design {
                ellipsoid,
                points: pts,
                weights,
                epsilon,
                iterations: iter,
                max_gauge: gmax / nf,
                min_support_gauge: gmin / nf,
            });
        }

        // optimal step along e_idx: τ = (κ − n) / (n (κ − 1))
        let (idx, kappa, tau) = if up > down {
            (j, gmax, (gmax - nf) / (nf * (gmax - T::one())))
        } else {
            let floor = -weights[i] / (T::one() - weights[i]);
            let tau = if gmin <= T::one() {
                floor
            } else {
                ((gmin - nf) / (nf * (gmin - T::one()))).max(floor)
            };
            (i, gmin, tau)
        };
        let keep = T::one() - tau;
        for w in weights.iter_mut() {
            *w = *w * keep;
        }
        weights[idx] = weights[idx] + tau;
        if weights[idx] < T::epsilon() {
            weights[idx] = T::zero();
        }
        // M' = (1 − τ)(M + s v vᵀ) with s = τ / (1 − τ)
        let s = tau / keep;
        let mv = minv.mul_vec(&pts[idx]);
        let denom = T::one() + s * kappa;
        if denom.abs() > T::tol(1e-12) {
            minv.add_outer(-s / denom, &mv);
            minv = minv.scale(T::one() / keep);
        } else {
            minv = design_matrix(&pts, &weights).inverse()?;
        }
    }
    Err(GeomError::NotConverged {
        iterations: MAX_ITERATIONS,
        residual: f64::NAN,
        best: weights.iter().map(|w| w.to_f64_lossy()).collect(),
    })
}

fn argmax<T: Scalar>(xs: &[T], keep: impl Fn(usize) -> bool) -> (usize, T) {
    xs.iter()
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .fold((0, T::neg_infinity()), |b, (i, &x)| if x > b.1 { (i, x) } else { b })
}

fn argmin<T: Scalar>(xs: &[T], keep: impl Fn(usize) -> bool) -> (usize, T) {
    xs.iter()
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .fold((0, T::infinity()), |b, (i, &x)| if x < b.1 { (i, x) } else { b })
}

/// Contact directions `u_i` and weights `c_i` with `Σ c_i u_i ⊗ u_i = I`.
#[derive(Clone, Debug, Serialize)]
pub struct JohnDecomposition<T> {
    pub contacts: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Scalar> JohnDecomposition<T> {
    pub fn as_weighted(&self) -> WeightedDirections<T> {
        WeightedDirections {
            directions: self.contacts.clone(),
            weights: self.weights.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.contacts[0].len()
    }

    /// Maps the contacts by an orthogonal matrix (weights unchanged).
    pub fn rotated(&self, q: &Mat<T>) -> Self {
        Self {
            contacts: self.contacts.iter().map(|u| q.mul_vec(u)).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// Tolerance allowed on the decomposition residual for a design computed at `ε`.
pub fn residual_tolerance<T: Scalar>(n: usize, epsilon: T) -> T {
    T::tol(1e-6).max(T::lit(10.0) * T::of(n) * epsilon)
}

/// After mapping by `H^{1/2}`, the support points of the design become unit
/// contact vectors and `c_i = n λ_i |H^{1/2} v_i|²`, renormalised so that
/// `Σ c_i = n`.
pub fn extract_john_decomposition<T: Scalar>(design: &Design<T>) -> Result<JohnDecomposition<T>> {
    let n = design.ellipsoid.dim();
    let nf = T::of(n);
    let root = psd_sqrt(design.ellipsoid.shape())?;
    let threshold = design.epsilon.max(T::tol(1e-9));
    let mut contacts = Vec::new();
    let mut weights = Vec::new();
    for (v, &lam) in design.points.iter().zip(&design.weights) {
        if lam <= threshold {
            continue;
        }
        let y = root.mul_vec(v);
        let r2 = dot(&y, &y);
        contacts.push(scaled(&y, T::one() / r2.sqrt()));
        weights.push(nf * lam * r2);
    }
    let mut span = OrthoBasis::new(n);
    for u in &contacts {
        span.push(u, T::tol(1e-8));
    }
    if span.rank() < n {
        return Err(GeomError::RankDeficient(format!(
            "{} contact points span only {} dimensions",
            contacts.len(),
            span.rank()
        )));
    }
    let total: T = weights.iter().copied().sum();
    for w in weights.iter_mut() {
        *w = *w * nf / total;
    }
    let j = JohnDecomposition { contacts, weights };
    let r = j.as_weighted().residual();
    let tol = residual_tolerance(n, design.epsilon);
    if r.frobenius > tol {
        return Err(GeomError::Numerical(format!(
            "John decomposition residual {} exceeds {}",
            r.frobenius, tol
        )));
    }
    Ok(j)
}

#[derive(Clone, Debug, Serialize)]
pub struct JohnResidual<T> {
    pub frobenius: T,
    pub trace_gap: T,
    /// Largest relative error of `|x|² = Σ c_i <u_i, x>²` over sampled `x`.
    pub quadratic_identity: T,
}

pub fn john_residual<T: Scalar>(j: &JohnDecomposition<T>, rng: &mut RandomSource) -> Result<JohnResidual<T>> {
    let DecompositionResidual { frobenius, trace_gap } = j.as_weighted().residual();
    let n = j.dim();
    let mut worst = T::zero();
    for _ in 0..20 {
        let x: Vec<T> = sample_unit_sphere(n, rng)?;
        let q: T = j
            .contacts
            .iter()
            .zip(&j.weights)
            .map(|(u, &c)| {
                let d = dot(u, &x);
                c * d * d
            })
            .sum();
        worst = worst.max((q - dot(&x, &x)).abs());
    }
    Ok(JohnResidual {
        frobenius,
        trace_gap,
        quadratic_identity: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        points.iter().flat_map(|p| [p.clone(), linalg::neg(p)]).collect()
    }

    #[test]
    fn orthonormal_points_give_the_ball() {
        let n = 4;
        let pts = pm(&(0..n).map(|i| linalg::unit(n, i)).collect::<Vec<_>>());
        let d = mvee_symmetric(&pts, 1e-8).unwrap();
        assert!(d.ellipsoid.shape().sub(&Mat::identity(n)).frobenius() < 1e-12);
        assert_eq!(d.points.len(), n);
        for w in &d.weights {
            assert!((w - 0.25).abs() < 1e-12);
        }
        let j = extract_john_decomposition(&d).unwrap();
        assert_eq!(j.contacts.len(), n);
        assert!(j.weights.iter().all(|c| (c - 1.0).abs() < 1e-12));
        let r = john_residual(&j, &mut RandomSource::new(0)).unwrap();
        assert!(r.frobenius < 1e-12 && r.trace_gap.abs() < 1e-12 && r.quadratic_identity < 1e-12);
    }

    #[test]
    fn rotated_square() {
        let pts = pm(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
        let d = mvee_symmetric(&pts, 1e-8).unwrap();
        assert!(d.ellipsoid.shape().sub(&Mat::identity(2).scale(0.5)).frobenius() < 1e-12);
        assert!(d.weights.iter().all(|w| (w - 0.5).abs() < 1e-12));
        let j = extract_john_decomposition(&d).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for u in &j.contacts {
            assert!((u[0] - s).abs() < 1e-12 && (u[1].abs() - s).abs() < 1e-12);
        }
        assert!((j.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn axis_aligned_extremes() {
        let pts = pm(&[vec![2.0, 0.0], vec![0.0, 1.0]]);
        let d = mvee_symmetric(&pts, 1e-8).unwrap();
        let h = d.ellipsoid.shape();
        assert!((h[(0, 0)] - 0.25).abs() < 1e-9 && (h[(1, 1)] - 1.0).abs() < 1e-9);
        assert!(h[(0, 1)].abs() < 1e-9);
        for p in &pts {
            assert!(d.ellipsoid.gauge_squared(p) <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn interior_points_get_no_weight() {
        let pts = pm(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.3, 0.3], vec![0.5, -0.2]]);
        let d = mvee_symmetric(&pts, 1e-9).unwrap();
        let j = extract_john_decomposition(&d).unwrap();
        assert_eq!(j.contacts.len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        let flat = pm(&[vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(matches!(mvee_symmetric(&flat, 1e-8), Err(GeomError::RankDeficient(_))));
        let pts = pm(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(mvee_symmetric(&pts, 0.5).is_err());
        assert!(mvee_symmetric(&pts, 1e-12).is_err());
        assert!(mvee_symmetric::<f64>(&[], 1e-8).is_err());
    }

    #[test]
    fn single_precision_design() {
        let pts: Vec<Vec<f32>> = vec![vec![2.0, 0.0], vec![-2.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let d = mvee_symmetric(&pts, 1e-4).unwrap();
        assert!((d.ellipsoid.shape()[(0, 0)] - 0.25).abs() < 1e-3);
    }
}
