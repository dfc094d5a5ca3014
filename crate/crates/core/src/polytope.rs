//! Origin-symmetric H-polytopes `{x : |<x, u_i>| <= t_i}` at desk scale.
//!
//! Vertices come from brute-force enumeration of active constraint subsets.
//! Facet measures are computed by walking the face lattice: every k-face is
//! coned from its vertex centroid over its (k-1)-faces, all inside the face's
//! own orthonormal chart, down to edges. Volume, surface area and shadow areas
//! are all read off the resulting facet list.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::kernel::ball::ln_unit_ball_volume;
use crate::kernel::combinatorics::{binomial, combinations};
use crate::kernel::linalg::{self, dot, norm, scaled, Mat, OrthoBasis};
use crate::kernel::random::{sample_unit_sphere, RandomSource};
use crate::scalar::Scalar;

pub const MAX_SLABS: usize = 24;
pub const MAX_DIM: usize = 7;

/// Relative feasibility tolerance for candidate vertices.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Relative radius under which two vertices are the same point.
pub const DEDUP_RADIUS: f64 = 1e-8;
/// Facets below this measure are dropped.
pub const MIN_FACET_MEASURE: f64 = 1e-12;

/// Origin-symmetric intersection of slabs `|<x, u_i>| <= t_i`.
#[derive(Debug, Serialize)]
pub struct SymmetricHPolytope<T: Scalar> {
    dim: usize,
    directions: Vec<Vec<T>>,
    offsets: Vec<T>,
    #[serde(skip)]
    cache: OnceLock<Result<FacetDecomposition<T>>>,
}

impl<T: Scalar> Clone for SymmetricHPolytope<T> {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            directions: self.directions.clone(),
            offsets: self.offsets.clone(),
            cache: self.cache.clone(),
        }
    }
}

impl<T: Scalar> PartialEq for SymmetricHPolytope<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.directions == other.directions && self.offsets == other.offsets
    }
}

/// One (n-1)-dimensional face of a polytope.
#[derive(Clone, Debug, Serialize)]
pub struct FacetData<T> {
    pub normal: Vec<T>,
    pub offset: T,
    pub measure: T,
    /// Index of the generating slab; the sign says which side.
    pub slab: usize,
    pub positive: bool,
    pub vertices: Vec<usize>,
}

/// Vertices of a symmetric polytope; closed under negation.
#[derive(Clone, Debug, Serialize)]
pub struct VertexSet<T> {
    pub points: Vec<Vec<T>>,
}

impl<T> VertexSet<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Everything derived from the vertex/facet structure of one polytope.
#[derive(Clone, Debug, Serialize)]
pub struct FacetDecomposition<T> {
    pub vertices: VertexSet<T>,
    pub facets: Vec<FacetData<T>>,
}

impl<T: Scalar> SymmetricHPolytope<T> {
    /// Builds the body, checking unit directions, positive offsets and span.
    pub fn new(directions: Vec<Vec<T>>, offsets: Vec<T>) -> Result<Self> {
        let m = directions.len();
        if m == 0 {
            return Err(GeomError::InvalidInput("no slab directions".into()));
        }
        let n = directions[0].len();
        if n == 0 {
            return Err(GeomError::InvalidInput("dimension must be >= 1".into()));
        }
        if offsets.len() != m {
            return Err(GeomError::DimensionMismatch {
                expected: m,
                got: offsets.len(),
            });
        }
        for (i, u) in directions.iter().enumerate() {
            if u.len() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    got: u.len(),
                });
            }
            if u.iter().any(|x| !x.is_finite()) {
                return Err(GeomError::InvalidInput(format!("direction {i} is not finite")));
            }
            let r = norm(u);
            if (r - T::one()).abs() > T::tol(1e-12) {
                return Err(GeomError::InvalidInput(format!(
                    "direction {i} has norm {r}, expected a unit vector"
                )));
            }
        }
        for (i, t) in offsets.iter().enumerate() {
            if !(t.is_finite() && *t > T::zero()) {
                return Err(GeomError::InvalidInput(format!("offset {i} must be positive, got {t}")));
            }
        }
        let mut span = OrthoBasis::new(n);
        for u in &directions {
            span.push(u, T::tol(1e-10));
        }
        if m < n || span.rank() < n {
            return Err(GeomError::Unbounded(n));
        }
        Ok(Self {
            dim: n,
            directions,
            offsets,
            cache: OnceLock::new(),
        })
    }

    /// Builds `{x : |<x, w_i>| <= s_i}` for arbitrary nonzero `w_i`, normalising
    /// each constraint.
    pub fn from_constraints(normals: Vec<Vec<T>>, bounds: Vec<T>) -> Result<Self> {
        if normals.len() != bounds.len() {
            return Err(GeomError::DimensionMismatch {
                expected: normals.len(),
                got: bounds.len(),
            });
        }
        let mut dirs = Vec::with_capacity(normals.len());
        let mut offs = Vec::with_capacity(normals.len());
        for (i, (w, s)) in normals.into_iter().zip(bounds).enumerate() {
            let r = norm(&w);
            if !(r > T::zero()) || !r.is_finite() {
                return Err(GeomError::InvalidInput(format!("constraint {i} has a zero normal")));
            }
            dirs.push(scaled(&w, T::one() / r));
            offs.push(s / r);
        }
        Self::new(dirs, offs)
    }

    /// The box `[-h_1, h_1] x ... x [-h_n, h_n]`.
    pub fn axis_box(half_widths: &[T]) -> Result<Self> {
        let n = half_widths.len();
        Self::new(
            (0..n).map(|i| linalg::unit(n, i)).collect(),
            half_widths.to_vec(),
        )
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::axis_box(&vec![T::one(); n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_slabs(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Vec<T>] {
        &self.directions
    }

    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    /// Same directions, new offsets.
    pub fn with_offsets(&self, offsets: Vec<T>) -> Result<Self> {
        Self::new(self.directions.clone(), offsets)
    }

    pub fn contains(&self, x: &[T], rel_tol: T) -> bool {
        self.directions
            .iter()
            .zip(&self.offsets)
            .all(|(u, &t)| dot(x, u).abs() <= t + rel_tol * t.max(T::one()))
    }

    fn check_guards(&self) -> Result<()> {
        if self.num_slabs() > MAX_SLABS {
            return Err(GeomError::Capacity {
                what: "slab count",
                limit: MAX_SLABS,
                got: self.num_slabs(),
            });
        }
        if self.dim > MAX_DIM {
            return Err(GeomError::Capacity {
                what: "dimension",
                limit: MAX_DIM,
                got: self.dim,
            });
        }
        Ok(())
    }

    /// All vertices, by solving every nonsingular n-subset of slabs for every
    /// sign pattern and keeping the feasible, distinct solutions.
    pub fn enumerate_vertices(&self) -> Result<VertexSet<T>> {
        self.check_guards()?;
        let n = self.dim;
        let m = self.num_slabs();
        let subsets: Vec<Vec<usize>> = combinations(m, n).collect();
        debug_assert_eq!(subsets.len(), binomial(m, n));
        let feas = T::tol(FEASIBILITY_TOL);

        let candidates: Vec<Vec<Vec<T>>> = subsets
            .par_iter()
            .map(|subset| {
                let rows: Vec<Vec<T>> = subset.iter().map(|&i| self.directions[i].clone()).collect();
                let lu = match Mat::from_rows(&rows).and_then(|a| a.lu()) {
                    Ok(lu) => lu,
                    Err(_) => return Vec::new(),
                };
                let mut found = Vec::new();
                // first sign fixed to +; the negated solution covers the rest
                for mask in 0..(1usize << (n - 1)) {
                    let rhs: Vec<T> = subset
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| {
                            let neg = k > 0 && (mask >> (k - 1)) & 1 == 1;
                            if neg {
                                -self.offsets[i]
                            } else {
                                self.offsets[i]
                            }
                        })
                        .collect();
                    let x = lu.solve(&rhs);
                    if x.iter().all(|v| v.is_finite()) && self.contains(&x, feas) {
                        found.push(x);
                    }
                }
                found
            })
            .collect();

        let scale = self.offsets.iter().fold(T::zero(), |a, &b| a.max(b)).max(T::one());
        let radius = T::tol(DEDUP_RADIUS) * scale;
        let mut points: Vec<Vec<T>> = Vec::new();
        for x in candidates.into_iter().flatten() {
            for y in [x.clone(), linalg::neg(&x)] {
                if !points.iter().any(|p| linalg::dist(p, &y) < radius) {
                    points.push(y);
                }
            }
        }
        Ok(VertexSet { points })
    }

    /// Vertices and facets with their (n-1)-dimensional measures; cached.
    pub fn decomposition(&self) -> Result<&FacetDecomposition<T>> {
        self.cache
            .get_or_init(|| self.compute_decomposition())
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn facet_decomposition(&self) -> Result<Vec<FacetData<T>>> {
        Ok(self.decomposition()?.facets.clone())
    }

    fn compute_decomposition(&self) -> Result<FacetDecomposition<T>> {
        let vertices = self.enumerate_vertices()?;
        let n = self.dim;
        let nv = vertices.len();
        let scale = self.offsets.iter().fold(T::zero(), |a, &b| a.max(b)).max(T::one());
        let act_tol = T::tol(1e-8) * scale;

        // signed constraint 2i is +u_i, 2i+1 is -u_i
        let signed = 2 * self.num_slabs();
        let incidence: Vec<BitSet> = (0..signed)
            .map(|k| {
                let (i, s) = (k / 2, if k % 2 == 0 { T::one() } else { -T::one() });
                let mut b = BitSet::new(nv);
                for (v, x) in vertices.points.iter().enumerate() {
                    if (s * dot(x, &self.directions[i]) - self.offsets[i]).abs() <= act_tol {
                        b.insert(v);
                    }
                }
                b
            })
            .collect();

        let mut lattice = FaceLattice::new(&vertices.points, &incidence);
        let mut seen: Vec<BitSet> = Vec::new();
        let mut facets = Vec::new();
        for (k, face) in incidence.iter().enumerate().take(signed) {
            if face.count() < n || seen.contains(face) {
                continue;
            }
            if lattice.affine_rank(face) + 1 != n {
                continue;
            }
            seen.push(face.clone());
            let ids = face.ones();
            let measure = lattice.measure(face, n - 1);
            if measure < T::tol(MIN_FACET_MEASURE) {
                continue;
            }
            let (i, positive) = (k / 2, k % 2 == 0);
            let normal = if positive {
                self.directions[i].clone()
            } else {
                linalg::neg(&self.directions[i])
            };
            facets.push(FacetData {
                normal,
                offset: self.offsets[i],
                measure,
                slab: i,
                positive,
                vertices: ids,
            });
        }
        Ok(FacetDecomposition { vertices, facets })
    }

    /// Volume as a sum of cones from the origin over the facets.
    pub fn volume(&self) -> Result<T> {
        let d = self.decomposition()?;
        let n = T::of(self.dim);
        Ok(d.facets.iter().map(|f| f.offset * f.measure).sum::<T>() / n)
    }

    pub fn surface_area(&self) -> Result<T> {
        Ok(self.decomposition()?.facets.iter().map(|f| f.measure).sum())
    }

    /// (n-1)-volume of the orthogonal projection onto `θ^⊥`:
    /// `½ Σ_F |<θ, n_F>| |F|`.
    pub fn shadow_area(&self, theta: &[T]) -> Result<T> {
        check_unit(theta, self.dim)?;
        self.shadow_unchecked(theta)
    }

    pub(crate) fn shadow_unchecked(&self, theta: &[T]) -> Result<T> {
        let d = self.decomposition()?;
        let half = T::lit(0.5);
        Ok(half * d.facets.iter().map(|f| dot(theta, &f.normal).abs() * f.measure).sum::<T>())
    }

    /// Facet measure attached to each slab (zero for redundant slabs).
    ///
    /// `∂|P| / ∂t_i` equals twice this value.
    pub fn slab_facet_measures(&self) -> Result<Vec<T>> {
        let d = self.decomposition()?;
        let mut out = vec![T::zero(); self.num_slabs()];
        for f in d.facets.iter().filter(|f| f.positive) {
            out[f.slab] = f.measure;
        }
        // a slab can be attained only on its negative side when a duplicate
        // took the positive facet; symmetry makes both measures equal anyway
        for f in d.facets.iter().filter(|f| !f.positive) {
            if out[f.slab] == T::zero() && !d.facets.iter().any(|g| g.positive && g.vertices == f.vertices) {
                out[f.slab] = f.measure;
            }
        }
        Ok(out)
    }

    /// Support function `max_{x ∈ P} <x, θ>`.
    pub fn support(&self, theta: &[T]) -> Result<T> {
        let d = self.decomposition()?;
        Ok(d.vertices
            .points
            .iter()
            .map(|v| dot(v, theta))
            .fold(T::neg_infinity(), T::max))
    }

    /// `{A x : x ∈ P}` for invertible `A`.
    pub fn affine_image(&self, a: &Mat<T>) -> Result<Self> {
        if a.dim() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: a.dim(),
            });
        }
        let det = a.determinant();
        if !(det.abs() > T::tol(1e-12)) {
            return Err(GeomError::Singular(format!("affine map has determinant {det}")));
        }
        let inv_t = a.inverse()?.transpose();
        let normals = self.directions.iter().map(|u| inv_t.mul_vec(u)).collect();
        Self::from_constraints(normals, self.offsets.clone())
    }

    /// Surface area predicted from sampled shadows:
    /// `(n v_n / v_{n-1}) · mean_θ |P_θ P|`. Returns `(estimate, standard error)`.
    pub fn cauchy_surface_estimate(&self, samples: usize, rng: &mut RandomSource) -> Result<(T, T)> {
        let n = self.dim;
        if n < 2 {
            return Err(GeomError::InvalidInput("Cauchy's formula needs n >= 2".into()));
        }
        if samples < 2 {
            return Err(GeomError::InvalidInput("need at least two samples".into()));
        }
        let constant = T::lit(
            (n as f64).ln() + ln_unit_ball_volume(n) - ln_unit_ball_volume(n - 1),
        )
        .exp();
        let mut sum = T::zero();
        let mut sum_sq = T::zero();
        for _ in 0..samples {
            let theta: Vec<T> = sample_unit_sphere(n, rng)?;
            let s = self.shadow_unchecked(&theta)?;
            sum = sum + s;
            sum_sq = sum_sq + s * s;
        }
        let k = T::of(samples);
        let mean = sum / k;
        let var = ((sum_sq / k - mean * mean) * k / (k - T::one())).max(T::zero());
        Ok((constant * mean, constant * (var / k).sqrt()))
    }
}

pub(crate) fn check_unit<T: Scalar>(theta: &[T], n: usize) -> Result<()> {
    if theta.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: theta.len(),
        });
    }
    let r = norm(theta);
    if (r - T::one()).abs() > T::tol(1e-9) {
        return Err(GeomError::InvalidInput(format!("direction has norm {r}, expected 1")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Self) -> Self {
        Self {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| 64 * k + w.trailing_zeros() as usize)
    }

    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(64 * k + b);
                w &= w - 1;
            }
        }
        out
    }
}

struct FaceLattice<'a, T> {
    points: &'a [Vec<T>],
    incidence: &'a [BitSet],
    bases: HashMap<BitSet, OrthoBasis<T>>,
    measures: HashMap<BitSet, T>,
}

impl<'a, T: Scalar> FaceLattice<'a, T> {
    fn new(points: &'a [Vec<T>], incidence: &'a [BitSet]) -> Self {
        Self {
            points,
            incidence,
            bases: HashMap::new(),
            measures: HashMap::new(),
        }
    }

    /// Orthonormal basis of the affine hull directions of `face`; cached.
    fn basis(&mut self, face: &BitSet) -> &OrthoBasis<T> {
        if !self.bases.contains_key(face) {
            let n = self.points[0].len();
            let mut b = OrthoBasis::new(n);
            let ids = face.ones();
            if let Some((&first, rest)) = ids.split_first() {
                for &i in rest {
                    b.push(&linalg::sub(&self.points[i], &self.points[first]), T::tol(1e-9));
                    if b.rank() == n {
                        break;
                    }
                }
            }
            self.bases.insert(face.clone(), b);
        }
        &self.bases[face]
    }

    fn affine_rank(&mut self, face: &BitSet) -> usize {
        self.basis(face).rank()
    }

    /// k-dimensional measure of the face with vertex set `face`.
    fn measure(&mut self, face: &BitSet, k: usize) -> T {
        if let Some(&m) = self.measures.get(face) {
            return m;
        }
        let ids = face.ones();
        let value = match k {
            0 => T::one(),
            1 => {
                let mut best = T::zero();
                for (a, &i) in ids.iter().enumerate() {
                    for &j in &ids[a + 1..] {
                        best = best.max(linalg::dist(&self.points[i], &self.points[j]));
                    }
                }
                best
            }
            _ => {
                let n = self.points[0].len();
                let mut centroid = vec![T::zero(); n];
                for &i in &ids {
                    linalg::axpy(&mut centroid, T::one(), &self.points[i]);
                }
                let centroid = scaled(&centroid, T::one() / T::of(ids.len()));
                let mut seen: HashSet<BitSet> = HashSet::new();
                let mut total = T::zero();
                for inc in self.incidence {
                    let sub = face.and(inc);
                    let c = sub.count();
                    if c < k || c == ids.len() || !seen.insert(sub.clone()) {
                        continue;
                    }
                    if self.affine_rank(&sub) + 1 != k {
                        continue;
                    }
                    let anchor = &self.points[sub.first().expect("non-empty face")];
                    let offset = linalg::sub(&centroid, anchor);
                    let h = norm(&self.basis(&sub).residual(&offset));
                    total = total + h * self.measure(&sub, k - 1);
                }
                total / T::of(k)
            }
        };
        self.measures.insert(face.clone(), value);
        value
    }
}
