//! Zonotopes `Z = Σ_j [-w_j, w_j]`: volumes, support numbers, projection
//! bodies, the mixed volume `v_{n-1}(C, Z)` and the inequalities built on it.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::kernel::combinatorics::combinations;
use crate::kernel::linalg::{self, dot, norm, orthonormal_complement, scaled, Mat};
use crate::polytope::{check_unit, SymmetricHPolytope};
use crate::scalar::Scalar;

pub const MAX_GENERATORS: usize = 24;
pub const MAX_DIM: usize = 7;
/// Generators shorter than this are dropped at construction.
pub const MIN_GENERATOR_NORM: f64 = 1e-12;
/// Upper bound on leaf evaluations of the projection-formula recursion.
pub const MAX_RECURSION_LEAVES: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Zonotope<T> {
    dim: usize,
    generators: Vec<Vec<T>>,
}

impl<T: Scalar> Zonotope<T> {
    pub fn new(dim: usize, generators: Vec<Vec<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::InvalidInput("dimension must be >= 1".into()));
        }
        let mut kept = Vec::with_capacity(generators.len());
        for w in generators {
            if w.len() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    got: w.len(),
                });
            }
            if w.iter().any(|x| !x.is_finite()) {
                return Err(GeomError::InvalidInput("non-finite generator".into()));
            }
            if norm(&w) > T::lit(MIN_GENERATOR_NORM) {
                kept.push(w);
            }
        }
        Ok(Self {
            dim,
            generators: kept,
        })
    }

    /// `Σ α_i [-u_i, u_i]`.
    pub fn from_directions(directions: &[Vec<T>], alphas: &[T]) -> Result<Self> {
        if directions.len() != alphas.len() {
            return Err(GeomError::DimensionMismatch {
                expected: directions.len(),
                got: alphas.len(),
            });
        }
        let dim = directions.first().map(Vec::len).unwrap_or(0);
        if alphas.iter().any(|a| !(*a > T::zero())) {
            return Err(GeomError::InvalidInput("segment lengths must be positive".into()));
        }
        Self::new(
            dim,
            directions.iter().zip(alphas).map(|(u, &a)| scaled(u, a)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<T>] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Segment half-lengths `α_j = |w_j|`.
    pub fn alphas(&self) -> Vec<T> {
        self.generators.iter().map(|w| norm(w)).collect()
    }

    /// Unit segment directions `u_j = w_j / |w_j|`.
    pub fn directions(&self) -> Vec<Vec<T>> {
        self.generators
            .iter()
            .map(|w| scaled(w, T::one() / norm(w)))
            .collect()
    }

    /// `h_Z(θ) = Σ_j |<θ, w_j>|`
    pub fn support(&self, theta: &[T]) -> T {
        self.generators.iter().map(|w| dot(theta, w).abs()).sum()
    }

    pub fn scale(&self, s: T) -> Result<Self> {
        Self::new(self.dim, self.generators.iter().map(|w| scaled(w, s)).collect())
    }

    pub fn linear_image(&self, a: &Mat<T>) -> Result<Self> {
        Self::new(self.dim, self.generators.iter().map(|w| a.mul_vec(w)).collect())
    }

    /// Minkowski sum `self + other`.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut g = self.generators.clone();
        g.extend(other.generators.iter().cloned());
        Self::new(self.dim, g)
    }

    pub fn spans(&self) -> bool {
        let mut b = linalg::OrthoBasis::new(self.dim);
        for w in &self.generators {
            b.push(w, T::tol(1e-10));
        }
        b.rank() == self.dim
    }

    fn check_guards(&self) -> Result<()> {
        if self.num_generators() > MAX_GENERATORS {
            return Err(GeomError::Capacity {
                what: "generator count",
                limit: MAX_GENERATORS,
                got: self.num_generators(),
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

    /// `|Z| = 2^n Σ_{|S| = n} |det W_S|`.
    pub fn volume_exact(&self) -> Result<T> {
        self.check_guards()?;
        let n = self.dim;
        let mut total = T::zero();
        for subset in combinations(self.num_generators(), n) {
            let cols: Vec<&[T]> = subset.iter().map(|&j| self.generators[j].as_slice()).collect();
            total = total + Mat::from_cols(&cols).determinant().abs();
        }
        Ok(total * T::lit(2.0).powi(n as i32))
    }

    /// The projection `P_u Z` onto `u^⊥`, in an orthonormal chart of `u^⊥`.
    pub fn project_along(&self, u: &[T]) -> Result<Zonotope<T>> {
        if self.dim < 2 {
            return Err(GeomError::InvalidInput("cannot project a 1-dimensional zonotope".into()));
        }
        let chart = orthonormal_complement(u);
        let gens = self
            .generators
            .iter()
            .map(|w| chart.iter().map(|q| dot(q, w)).collect())
            .collect();
        Zonotope::new(self.dim - 1, gens)
    }

    /// `|P_u Z|` via [`Self::volume_by_projection_formula`] in the chart of `u^⊥`.
    pub fn shadow(&self, u: &[T]) -> Result<T> {
        check_unit(u, self.dim)?;
        self.project_along(u)?.volume_by_projection_formula()
    }

    /// `|Z| = (2/n) Σ_i α_i |P_{u_i} Z|`, applied recursively down to `n = 1`
    /// where `|Z| = 2 Σ_i α_i`.
    pub fn volume_by_projection_formula(&self) -> Result<T> {
        self.check_guards()?;
        let m = self.num_generators();
        let leaves = (1..self.dim).try_fold(1usize, |acc, _| acc.checked_mul(m.max(1)));
        match leaves {
            Some(l) if l <= MAX_RECURSION_LEAVES => {}
            _ => {
                return Err(GeomError::Capacity {
                    what: "projection-formula recursion leaves",
                    limit: MAX_RECURSION_LEAVES,
                    got: leaves.unwrap_or(usize::MAX),
                })
            }
        }
        Ok(self.projection_formula_unchecked())
    }

    fn projection_formula_unchecked(&self) -> T {
        let two = T::lit(2.0);
        if self.generators.len() < self.dim {
            return T::zero();
        }
        if self.dim == 1 {
            return two * self.generators.iter().map(|w| w[0].abs()).sum::<T>();
        }
        let mut total = T::zero();
        for w in &self.generators {
            let alpha = norm(w);
            let u = scaled(w, T::one() / alpha);
            let shadow = self
                .project_along(&u)
                .map(|p| p.projection_formula_unchecked())
                .unwrap_or(T::zero());
            total = total + alpha * shadow;
        }
        two * total / T::of(self.dim)
    }

    /// Both sides of the zonotope volume formula.
    pub fn volume_formula_check(&self) -> Result<VolumeFormulaReport<T>> {
        let lhs = self.volume_exact()?;
        let rhs = self.volume_by_projection_formula()?;
        Ok(VolumeFormulaReport {
            lhs,
            rhs,
            relative_gap: relative_gap(lhs, rhs),
        })
    }
}

fn relative_gap<T: Scalar>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeFormulaReport<T> {
    /// Determinant expansion.
    pub lhs: T,
    /// `(2/n) Σ α_i |P_{u_i} Z|`.
    pub rhs: T,
    pub relative_gap: T,
}

/// Unit vectors with positive weights resolving the identity:
/// `Σ c_i u_i ⊗ u_i = I_n`.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedDirections<T> {
    pub directions: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

pub const DECOMPOSITION_RESIDUAL_TOL: f64 = 1e-6;
pub const TRACE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecompositionResidual<T> {
    /// `‖Σ c_i u_i ⊗ u_i − I‖_F`
    pub frobenius: T,
    /// `Σ c_i − n`
    pub trace_gap: T,
}

impl<T: Scalar> WeightedDirections<T> {
    /// Validating constructor: unit directions, positive weights, and the
    /// identity resolved within the standard tolerances.
    pub fn new(directions: Vec<Vec<T>>, weights: Vec<T>) -> Result<Self> {
        let wd = Self::new_unchecked(directions, weights)?;
        let r = wd.residual();
        if r.frobenius > T::tol(DECOMPOSITION_RESIDUAL_TOL) || r.trace_gap.abs() > T::tol(TRACE_TOL) {
            return Err(GeomError::InvalidInput(format!(
                "weights do not resolve the identity (residual {}, trace gap {})",
                r.frobenius, r.trace_gap
            )));
        }
        Ok(wd)
    }

    /// Checks shapes, unit norms and positivity only.
    pub fn new_unchecked(directions: Vec<Vec<T>>, weights: Vec<T>) -> Result<Self> {
        if directions.is_empty() || directions.len() != weights.len() {
            return Err(GeomError::DimensionMismatch {
                expected: directions.len(),
                got: weights.len(),
            });
        }
        let n = directions[0].len();
        for u in &directions {
            if u.len() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    got: u.len(),
                });
            }
            if (norm(u) - T::one()).abs() > T::tol(1e-8) {
                return Err(GeomError::InvalidInput("directions must be unit vectors".into()));
            }
        }
        if weights.iter().any(|c| !(*c > T::zero()) || !c.is_finite()) {
            return Err(GeomError::InvalidInput("weights must be positive".into()));
        }
        Ok(Self { directions, weights })
    }

    /// The orthonormal basis with unit weights.
    pub fn orthonormal(n: usize) -> Self {
        Self {
            directions: (0..n).map(|i| linalg::unit(n, i)).collect(),
            weights: vec![T::one(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.directions[0].len()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn frame_operator(&self) -> Mat<T> {
        let mut m = Mat::zeros(self.dim());
        for (u, &c) in self.directions.iter().zip(&self.weights) {
            m.add_outer(c, u);
        }
        m
    }

    pub fn residual(&self) -> DecompositionResidual<T> {
        let n = self.dim();
        DecompositionResidual {
            frobenius: self.frame_operator().sub(&Mat::identity(n)).frobenius(),
            trace_gap: self.weights.iter().copied().sum::<T>() - T::of(n),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZonotopeBoundReport<T> {
    pub volume: T,
    /// `2^n Π (α_i / c_i)^{c_i}`
    pub bound: T,
    pub ratio: T,
}

/// Lower bound for `|Σ α_i [-u_i, u_i]|` in terms of a decomposition of the
/// identity carried by the same directions.
pub fn lemma4_bound<T: Scalar>(wd: &WeightedDirections<T>, alphas: &[T]) -> Result<ZonotopeBoundReport<T>> {
    let wd = WeightedDirections::new(wd.directions.clone(), wd.weights.clone())?;
    if alphas.len() != wd.len() {
        return Err(GeomError::DimensionMismatch {
            expected: wd.len(),
            got: alphas.len(),
        });
    }
    let z = Zonotope::from_directions(&wd.directions, alphas)?;
    let volume = z.volume_exact()?;
    let n = wd.dim();
    let ln_bound = T::of(n) * T::LN_2()
        + wd
            .weights
            .iter()
            .zip(alphas)
            .map(|(&c, &a)| c * (a / c).ln())
            .sum::<T>();
    let bound = ln_bound.exp();
    Ok(ZonotopeBoundReport {
        volume,
        bound,
        ratio: volume / bound,
    })
}

/// Projection body of a polytope: one generator `|F| n_F` per antipodal facet
/// pair, so that `h_{ΠC}(θ) = |P_θ C|`.
pub fn projection_body<T: Scalar>(c: &SymmetricHPolytope<T>) -> Result<Zonotope<T>> {
    let d = c.decomposition()?;
    let gens = d
        .facets
        .iter()
        .filter(|f| f.positive)
        .map(|f| scaled(&f.normal, f.measure))
        .collect();
    Zonotope::new(c.dim(), gens)
}

/// `v_{n-1}(C, Z) = (2/n) Σ α_i |P_{u_i} C|`
pub fn mixed_volume_vn1<T: Scalar>(c: &SymmetricHPolytope<T>, z: &Zonotope<T>) -> Result<T> {
    if c.dim() != z.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: c.dim(),
            got: z.dim(),
        });
    }
    let mut total = T::zero();
    for w in z.generators() {
        let alpha = norm(w);
        total = total + alpha * c.shadow_unchecked(&scaled(w, T::one() / alpha))?;
    }
    Ok(T::lit(2.0) * total / T::of(c.dim()))
}

#[derive(Clone, Debug, Serialize)]
pub struct MinkowskiInequalityReport<T> {
    /// `|C|^{(n-1)/n} |Z|^{1/n}`
    pub lhs: T,
    /// `v_{n-1}(C, Z)`
    pub rhs: T,
    /// `(rhs - lhs) / lhs`
    pub gap: T,
}

pub fn minkowski_inequality_check<T: Scalar>(
    c: &SymmetricHPolytope<T>,
    z: &Zonotope<T>,
) -> Result<MinkowskiInequalityReport<T>> {
    let n = T::of(c.dim());
    let vc = c.volume()?;
    let vz = z.volume_exact()?;
    let lhs = vc.powf((n - T::one()) / n) * vz.powf(T::one() / n);
    let rhs = mixed_volume_vn1(c, z)?;
    Ok(MinkowskiInequalityReport {
        lhs,
        rhs,
        gap: (rhs - lhs) / lhs,
    })
}

/// True when `Z ⊆ C`: each slab of `C` must contain `Z`, i.e. `h_Z(u_i) <= t_i`.
pub fn zonotope_inside<T: Scalar>(z: &Zonotope<T>, c: &SymmetricHPolytope<T>, rel_tol: T) -> bool {
    c.directions()
        .iter()
        .zip(c.offsets())
        .all(|(u, &t)| z.support(u) <= t * (T::one() + rel_tol))
}

#[derive(Clone, Debug, Serialize)]
pub struct DominanceBound<T> {
    /// `((2/n) Σ α_i s_i)^{n/(n-1)} |Z|^{-1/(n-1)}`, from Minkowski's inequality for D.
    pub shadow_bound: T,
    /// `(|C| / |Z|)^{1/(n-1)} |C|`, valid when D's shadows are dominated by C's.
    pub containment_bound: T,
    pub bound: T,
}

/// Upper bound on `|D|` from the shadows `s_i = |P_{u_i} D|` along the
/// generator directions of a zonotope `Z ⊆ C`.
pub fn dominance_volume_bound<T: Scalar>(
    c: &SymmetricHPolytope<T>,
    z: &Zonotope<T>,
    shadows_of_d: &[T],
) -> Result<DominanceBound<T>> {
    let n = c.dim();
    if n < 2 {
        return Err(GeomError::InvalidInput("dominance bound needs n >= 2".into()));
    }
    if z.dim() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: z.dim(),
        });
    }
    if shadows_of_d.len() != z.num_generators() {
        return Err(GeomError::DimensionMismatch {
            expected: z.num_generators(),
            got: shadows_of_d.len(),
        });
    }
    if !zonotope_inside(z, c, T::tol(1e-9)) {
        return Err(GeomError::InvalidInput("zonotope is not contained in C".into()));
    }
    let nf = T::of(n);
    let vz = z.volume_exact()?;
    if !(vz > T::zero()) {
        return Err(GeomError::InvalidInput("zonotope has zero volume".into()));
    }
    let vc = c.volume()?;
    let mixed = T::lit(2.0) / nf
        * z.alphas()
            .iter()
            .zip(shadows_of_d)
            .map(|(&a, &s)| a * s)
            .sum::<T>();
    let exp = T::one() / (nf - T::one());
    let shadow_bound = mixed.powf(nf * exp) * vz.powf(-exp);
    let containment_bound = (vc / vz).powf(exp) * vc;
    Ok(DominanceBound {
        shadow_bound,
        containment_bound,
        bound: shadow_bound.min(containment_bound),
    })
}
